// Copyright 2026 The BPGAN Codec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bpgan/bpgan.hpp"
#include "helpers.hpp"

using bpgan::Tensor;
using bpgan_test::expect_error;

namespace {

// Two sines plus a touch of noise; long enough for one speech patch.
std::vector<double> speech_like_signal(std::size_t n, std::uint64_t seed) {
  bpgan::Rng rng(seed);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    x[i] = 0.45 * std::sin(2.0 * M_PI * 220.0 * t / 16000.0) +
           0.25 * std::sin(2.0 * M_PI * 1330.0 * t / 16000.0 + 0.7) +
           0.02 * rng.normal();
  }
  return x;
}

}  // namespace

TEST_CASE("mel filterbank rows sum to the triangle areas", "[pipeline][mel]") {
  const auto fb = bpgan::mel_filterbank(24, 256, 16000.0);
  REQUIRE(fb.shape == bpgan::Shape{24, 129});

  // Every filter is a triangle over FFT bins: nonnegative, nonempty, and the
  // peak never exceeds 1.
  for (std::size_t m = 0; m < 24; ++m) {
    double row_sum = 0.0, row_max = 0.0;
    for (std::size_t k = 0; k < 129; ++k) {
      const double w = fb.data[m * 129 + k];
      REQUIRE(w >= 0.0);
      row_sum += w;
      row_max = std::max(row_max, w);
    }
    REQUIRE(row_sum > 0.0);
    REQUIRE(row_max <= 1.0 + 1e-12);
  }

  // Between the first and last filter peaks adjacent triangles are exact
  // complements, so the columns there form a partition of unity.
  const double mel_max = bpgan::hz_to_mel(8000.0);
  const double first_peak = bpgan::mel_to_hz(mel_max * 1.0 / 25.0);
  const double last_peak = bpgan::mel_to_hz(mel_max * 24.0 / 25.0);
  std::size_t covered = 0;
  for (std::size_t k = 0; k < 129; ++k) {
    const double f = static_cast<double>(k) * 16000.0 / 256.0;
    if (f < first_peak || f > last_peak) continue;
    double col = 0.0;
    for (std::size_t m = 0; m < 24; ++m) col += fb.data[m * 129 + k];
    REQUIRE(col == Catch::Approx(1.0).margin(1e-9));
    ++covered;
  }
  REQUIRE(covered > 100);  // nearly the whole axis sits between the peaks
}

TEST_CASE("mel projection against a hand loop", "[pipeline][mel]") {
  const auto fb = bpgan::mel_filterbank(8, 64, 8000.0);
  auto mag = bpgan_test::random_tensor({33, 5}, 17);
  for (double& v : mag.data) v = std::abs(v);
  const auto mel = bpgan::mel_project(mag, fb);
  REQUIRE(mel.shape == bpgan::Shape{8, 5});
  for (std::size_t m = 0; m < 8; ++m)
    for (std::size_t t = 0; t < 5; ++t) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 33; ++k) acc += fb.data[m * 33 + k] * mag.data[k * 5 + t];
      REQUIRE(mel.data[m * 5 + t] == Catch::Approx(acc).margin(1e-12));
    }

  SECTION("shape mismatch") {
    const auto e = expect_error([&] { bpgan::mel_project(bpgan_test::random_tensor({32, 5}, 1), fb); });
    REQUIRE(e.code() == bpgan::Errc::format);
  }
  SECTION("config validation") {
    const auto e = expect_error([] { bpgan::mel_filterbank(0, 64, 8000.0); });
    REQUIRE(e.reason() == "bad-config");
  }
}

TEST_CASE("mel inversion is a right inverse in the mel domain", "[pipeline][mel]") {
  const std::size_t bins = 257, frames = 6;
  const auto fb = bpgan::mel_filterbank(128, 512, 16000.0);
  // Smooth magnitude surface. Its mel projection keeps the lifted estimate
  // inside the nonnegative cone, so the clamp in unproject() stays inactive
  // and the ridge pseudo-inverse obeys project(unproject(m)) ~= m up to the
  // regularization bias. (Full linear-frequency recovery is not promised:
  // the narrow low-frequency triangles lose information by construction.)
  Tensor mag({bins, frames});
  for (std::size_t k = 0; k < bins; ++k)
    for (std::size_t t = 0; t < frames; ++t)
      mag.data[k * frames + t] =
          1.0 + 0.5 * std::cos(0.015 * static_cast<double>(k)) +
          0.1 * std::sin(0.9 * static_cast<double>(t));

  const Tensor mel = bpgan::mel_project(mag, fb);
  const bpgan::MelInverter inv(fb);
  const Tensor lifted = inv.unproject(mel);
  REQUIRE(lifted.shape == mag.shape);
  for (double v : lifted.data) REQUIRE(v >= 0.0);  // magnitudes stay clamped

  const Tensor back = bpgan::mel_project(lifted, fb);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < mel.numel(); ++i) {
    const double d = back.data[i] - mel.data[i];
    num += d * d;
    den += mel.data[i] * mel.data[i];
  }
  // Measured relative error is ~2e-6 (set by the ridge term lambda).
  REQUIRE(std::sqrt(num / den) < 1e-4);

  // All-zero mel comes back (numerically) all-zero.
  const auto zero = inv.unproject(Tensor::zeros({128, 3}));
  for (double v : zero.data) REQUIRE(std::abs(v) < 1e-12);
}

TEST_CASE("log normalization anchors and round trip", "[pipeline][mel]") {
  SECTION("exact anchors") {
    Tensor mel({4});
    mel.data = {2.0, 1.0, 2.0 * std::exp(-8.0), 1e-12};
    Tensor out;
    const double mx = bpgan::log_normalize(mel, 8.0, out);
    REQUIRE(mx == 2.0);
    REQUIRE(out.data[0] == 1.0);                                     // max -> exactly 1
    REQUIRE(out.data[1] == Catch::Approx(2.0 * std::log(0.5) / 8.0 + 1.0).margin(1e-15));
    REQUIRE(out.data[2] == -1.0);  // at the floor -> exactly -1
    REQUIRE(out.data[3] == -1.0);  // below the floor -> exactly -1
  }

  SECTION("round trip above the floor") {
    auto mel = bpgan_test::random_tensor({64}, 3);
    for (double& v : mel.data) v = 0.5 + 0.4 * std::tanh(v);  // well above max * e^-8
    Tensor out;
    const double mx = bpgan::log_normalize(mel, 8.0, out);
    const auto back = bpgan::log_denormalize(out, 8.0, mx);
    for (std::size_t i = 0; i < mel.numel(); ++i)
      REQUIRE(back.data[i] == Catch::Approx(mel.data[i]).epsilon(1e-5));
  }

  SECTION("clamped values come back at the floor") {
    Tensor mel({2});
    mel.data = {1.0, 1e-9};
    Tensor out;
    bpgan::log_normalize(mel, 4.0, out);
    const auto back = bpgan::log_denormalize(out, 4.0, 1.0);
    REQUIRE(back.data[1] == Catch::Approx(std::exp(-4.0)).margin(1e-12));
  }

  SECTION("rejections") {
    Tensor z = Tensor::zeros({3});
    Tensor out;
    REQUIRE(expect_error([&] { bpgan::log_normalize(z, 8.0, out); }).reason() == "all-zero");
    Tensor neg({1});
    neg.data = {-0.5};
    REQUIRE(expect_error([&] { bpgan::log_normalize(neg, 8.0, out); }).reason() == "bad-magnitude");
    Tensor ok({1});
    ok.data = {1.0};
    REQUIRE(expect_error([&] { bpgan::log_normalize(ok, 0.0, out); }).reason() == "bad-config");
  }
}

TEST_CASE("speech patch accounting", "[pipeline][speech]") {
  bpgan::SpeechPipelineConfig cfg;
  REQUIRE(bpgan::patch_hop_samples(cfg) == 128 * 128);
  REQUIRE(bpgan::patch_window_samples(cfg) == 512 + 127 * 128);
  REQUIRE(bpgan::patch_window_samples(cfg) == 16768);
  REQUIRE(bpgan::patch_nominal_seconds(cfg) == 1.0);

  bpgan::SpeechPipelineConfig small;
  small.frame_size = 64;
  small.stride = 16;
  small.patch_frames = 10;
  REQUIRE(bpgan::patch_window_samples(small) == 64 + 9 * 16);
  REQUIRE(bpgan::patch_hop_samples(small) == 160);

  SECTION("config validation") {
    bpgan::SpeechPipelineConfig bad;
    bad.stride = 1024;  // exceeds the 512-sample frame
    REQUIRE(expect_error([&] { bpgan::check_speech_config(bad); }).reason() == "bad-config");
    // The analysis entry point runs the same check before touching samples.
    REQUIRE(expect_error([&] {
              (void)bpgan::extract_speech_patch(std::vector<double>(64, 0.0), bad);
            }).reason() == "bad-config");
    bad = bpgan::SpeechPipelineConfig{};
    bad.mel_bins = 0;
    REQUIRE(expect_error([&] { bpgan::check_speech_config(bad); }).reason() == "bad-config");
  }
}

TEST_CASE("speech patch extraction and synthesis round trip", "[pipeline][speech]") {
  // Keep the transform small so Griffin-Lim converges quickly in tests.
  bpgan::SpeechPipelineConfig cfg;
  cfg.frame_size = 256;
  cfg.stride = 64;
  cfg.mel_bins = 80;
  cfg.patch_frames = 32;
  cfg.griffin_lim_iters = 50;

  const auto x = speech_like_signal(bpgan::patch_window_samples(cfg), 11);
  const auto patch = bpgan::extract_speech_patch(x, cfg);
  REQUIRE(patch.patch.shape == bpgan::Shape{1, 80, 32});
  REQUIRE(patch.max_value > 0.0);
  for (double v : patch.patch.data) {
    REQUIRE(v >= -1.0);
    REQUIRE(v <= 1.0);
  }

  const auto rec = bpgan::synthesize_speech_patch(patch.patch, patch.max_value, cfg);
  REQUIRE(rec.size() == bpgan::patch_window_samples(cfg));

  // The mel bottleneck is lossy in the waveform domain, but the *spectral
  // envelope* survives: re-extract and compare normalized patches.
  const auto back = bpgan::extract_speech_patch(rec, cfg);
  double mse = 0.0;
  for (std::size_t i = 0; i < patch.patch.numel(); ++i) {
    const double d = patch.patch.data[i] - back.patch.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(patch.patch.numel());
  const double spectral_psnr = 10.0 * std::log10(4.0 / mse);  // peak-to-peak 2
  REQUIRE(spectral_psnr > 25.0);  // measured ~33 dB on this signal

  SECTION("rank-2 patch is accepted") {
    Tensor flat({80, 32});
    flat.data = patch.patch.data;
    const auto rec2 = bpgan::synthesize_speech_patch(flat, patch.max_value, cfg);
    REQUIRE(rec2 == rec);
  }

  SECTION("rejections") {
    REQUIRE(expect_error([&] {
              bpgan::extract_speech_patch(std::vector<double>(100, 0.1), cfg);
            }).reason() == "input-too-short");
    REQUIRE(expect_error([&] {
              bpgan::synthesize_speech_patch(patch.patch, 0.0, cfg);
            }).reason() == "bad-magnitude");
    REQUIRE(expect_error([&] {
              bpgan::synthesize_speech_patch(Tensor::zeros({3, 80, 32}), 1.0, cfg);
            }).reason() == "bad-shape");
  }
}

TEST_CASE("bilinear resize", "[pipeline][image]") {
  SECTION("identity at matching size") {
    const auto t = bpgan_test::random_tensor({2, 5, 7}, 5);
    const auto r = bpgan::bilinear_resize(t, 5, 7);
    REQUIRE(r.shape == t.shape);
    REQUIRE(r.data == t.data);
  }

  SECTION("2x2 to 1x1 averages the four pixels") {
    Tensor t({1, 2, 2});
    t.data = {1.0, 3.0, 5.0, 7.0};
    const auto r = bpgan::bilinear_resize(t, 1, 1);
    REQUIRE(r.shape == bpgan::Shape{1, 1, 1});
    REQUIRE(r.data[0] == Catch::Approx(4.0).margin(1e-12));
  }

  SECTION("constant images stay constant under any scaling") {
    Tensor t({1, 3, 4});
    for (double& v : t.data) v = 42.0;
    for (const auto& hw : {std::pair<std::size_t, std::size_t>{6, 8},
                          std::pair<std::size_t, std::size_t>{2, 2},
                          std::pair<std::size_t, std::size_t>{7, 3}}) {
      const auto r = bpgan::bilinear_resize(t, hw.first, hw.second);
      for (double v : r.data) REQUIRE(v == Catch::Approx(42.0).margin(1e-12));
    }
  }

  SECTION("upscaling preserves a horizontal gradient's endpoints") {
    Tensor t({1, 1, 4});
    t.data = {0.0, 1.0, 2.0, 3.0};
    const auto r = bpgan::bilinear_resize(t, 1, 8);
    REQUIRE(r.data[0] == 0.0);      // edge clamp
    REQUIRE(r.data[7] == 3.0);      // edge clamp
    for (std::size_t i = 1; i < 8; ++i) REQUIRE(r.data[i] >= r.data[i - 1]);  // monotone
  }

  SECTION("rejections") {
    REQUIRE(expect_error([] {
              bpgan::bilinear_resize(Tensor::zeros({4, 4}), 2, 2);
            }).reason() == "bad-shape");
    REQUIRE(expect_error([] {
              bpgan::bilinear_resize(Tensor::zeros({1, 4, 4}), 0, 2);
            }).reason() == "bad-config");
  }
}

TEST_CASE("channel matching", "[pipeline][image]") {
  Tensor rgb({3, 1, 2});
  rgb.data = {10.0, 20.0,   // R
              30.0, 60.0,   // G
              50.0, 100.0};  // B

  SECTION("identity when counts already match") {
    REQUIRE(bpgan::detail::match_channels(rgb, 3).data == rgb.data);
  }

  SECTION("RGB to gray averages the channels") {
    const auto g = bpgan::detail::match_channels(rgb, 1);
    REQUIRE(g.shape == bpgan::Shape{1, 1, 2});
    REQUIRE(g.data[0] == Catch::Approx((10.0 + 30.0 + 50.0) / 3.0).margin(1e-12));
    REQUIRE(g.data[1] == Catch::Approx((20.0 + 60.0 + 100.0) / 3.0).margin(1e-12));
  }

  SECTION("gray to RGB replicates the plane") {
    Tensor g({1, 2, 2});
    g.data = {1.0, 2.0, 3.0, 4.0};
    const auto r = bpgan::detail::match_channels(g, 3);
    REQUIRE(r.shape == bpgan::Shape{3, 2, 2});
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < 4; ++i) REQUIRE(r.data[c * 4 + i] == g.data[i]);
  }

  SECTION("unsupported conversion") {
    REQUIRE(expect_error([&] { bpgan::detail::match_channels(rgb, 2); }).reason() == "bad-shape");
  }
}

TEST_CASE("image prepare and finish", "[pipeline][image]") {
  bpgan::Image img;
  img.width = 4;
  img.height = 2;
  img.channels = 1;
  img.pixels = {0, 255, 128, 64, 32, 200, 250, 5};

  bpgan::ImagePipelineConfig cfg;
  cfg.target_width = 4;
  cfg.target_height = 2;
  cfg.channels = 1;

  const auto sig = bpgan::prepare_image(img, cfg);
  REQUIRE(sig.shape == bpgan::Shape{1, 2, 4});
  REQUIRE(sig.data[0] == -1.0);  // pixel 0
  REQUIRE(sig.data[1] == 1.0);   // pixel 255
  REQUIRE(sig.data[2] == Catch::Approx(128.0 / 127.5 - 1.0).margin(1e-15));
  for (double v : sig.data) {
    REQUIRE(v >= -1.0);
    REQUIRE(v <= 1.0);
  }

  SECTION("finish inverts prepare exactly on aligned sizes") {
    const auto out = bpgan::finish_image(sig);
    REQUIRE(out.width == 4);
    REQUIRE(out.height == 2);
    REQUIRE(out.channels == 1);
    REQUIRE(out.pixels == img.pixels);
  }

  SECTION("finish clamps out-of-range signals") {
    Tensor wild({1, 1, 2});
    wild.data = {-3.0, 3.0};
    const auto out = bpgan::finish_image(wild);
    REQUIRE(out.pixels == std::vector<std::uint8_t>{0, 255});
  }

  SECTION("prepare resizes and converts channels") {
    bpgan::ImagePipelineConfig big;
    big.target_width = 8;
    big.target_height = 4;
    big.channels = 3;
    const auto s = bpgan::prepare_image(img, big);
    REQUIRE(s.shape == bpgan::Shape{3, 4, 8});
    // Replicated channels stay identical after the value map.
    for (std::size_t i = 0; i < 32; ++i) REQUIRE(s.data[i] == s.data[32 + i]);
  }

  SECTION("config validation") {
    bpgan::ImagePipelineConfig bad;
    bad.channels = 2;
    REQUIRE(expect_error([&] { bpgan::prepare_image(img, bad); }).reason() == "bad-config");
  }
}

TEST_CASE("PNM round trips", "[pipeline][imageio]") {
  SECTION("P5 grayscale") {
    bpgan::Image img;
    img.width = 3;
    img.height = 2;
    img.channels = 1;
    img.pixels = {0, 1, 2, 253, 254, 255};
    const auto bytes = bpgan::encode_pnm(img);
    REQUIRE(bytes[0] == 'P');
    REQUIRE(bytes[1] == '5');
    const auto back = bpgan::decode_pnm(bytes);
    REQUIRE(back.width == 3);
    REQUIRE(back.height == 2);
    REQUIRE(back.channels == 1);
    REQUIRE(back.pixels == img.pixels);
  }

  SECTION("P6 color with comments in the header") {
    bpgan::Image img;
    img.width = 2;
    img.height = 2;
    img.channels = 3;
    for (int i = 0; i < 12; ++i) img.pixels.push_back(static_cast<std::uint8_t>(20 * i));
    auto bytes = bpgan::encode_pnm(img);
    // Splice a comment line after the magic; decoders must skip it.
    const std::string comment = "\n# synthetic fixture\n";
    bytes.insert(bytes.begin() + 2, comment.begin(), comment.end());
    const auto back = bpgan::decode_pnm(bytes);
    REQUIRE(back.channels == 3);
    REQUIRE(back.pixels == img.pixels);
  }

  SECTION("tensor conversion is planar") {
    bpgan::Image img;
    img.width = 2;
    img.height = 1;
    img.channels = 3;
    img.pixels = {1, 2, 3, 4, 5, 6};  // interleaved RGB RGB
    const auto t = bpgan::image_to_tensor(img);
    REQUIRE(t.shape == bpgan::Shape{3, 1, 2});
    REQUIRE(t.data == std::vector<double>{1, 4, 2, 5, 3, 6});  // planar R R G G B B
    const auto back = bpgan::tensor_to_image(t);
    REQUIRE(back.pixels == img.pixels);
  }

  SECTION("decode rejections") {
    const std::string not_pnm = "JFIF....";
    REQUIRE(expect_error([&] {
              bpgan::decode_pnm(bpgan::Bytes(not_pnm.begin(), not_pnm.end()));
            }).reason() == "bad-magic");

    const std::string wide = "P5\n2 2\n65535\n";
    REQUIRE(expect_error([&] {
              bpgan::decode_pnm(bpgan::Bytes(wide.begin(), wide.end()));
            }).reason() == "bad-header");

    const std::string short_raster = "P5\n4 4\n255\nab";
    REQUIRE(expect_error([&] {
              bpgan::decode_pnm(bpgan::Bytes(short_raster.begin(), short_raster.end()));
            }).reason() == "truncated");
  }

  SECTION("file round trip") {
    bpgan::Image img;
    img.width = 2;
    img.height = 2;
    img.channels = 1;
    img.pixels = {9, 8, 7, 6};
    const std::string path = "pipeline_test_image.pgm";
    bpgan::save_image_file(path, img);
    const auto back = bpgan::load_image_file(path);
    std::remove(path.c_str());
    REQUIRE(back.pixels == img.pixels);

    const auto e = expect_error([] { bpgan::load_image_file("no_such_image.pgm"); });
    REQUIRE(e.code() == bpgan::Errc::io);
    REQUIRE(std::string(e.what()).find("no_such_image.pgm") != std::string::npos);
  }
}

TEST_CASE("WAV round trips", "[pipeline][wavio]") {
  SECTION("synthetic tone survives 16-bit quantization") {
    bpgan::WavData wav;
    wav.sample_rate = 16000;
    wav.samples = speech_like_signal(400, 23);
    const auto bytes = bpgan::encode_wav(wav);
    REQUIRE(bytes.size() == 44 + 2 * 400);
    const auto back = bpgan::decode_wav(bytes);
    REQUIRE(back.sample_rate == 16000);
    REQUIRE(back.samples.size() == 400);
    for (std::size_t i = 0; i < 400; ++i)
      REQUIRE(back.samples[i] == Catch::Approx(wav.samples[i]).margin(1.0 / 32768.0));
  }

  SECTION("exact scaling anchors") {
    bpgan::WavData wav;
    wav.sample_rate = 8000;
    wav.samples = {0.0, -1.0, 0.5, 2.0, -2.0};  // the last two clip
    const auto back = bpgan::decode_wav(bpgan::encode_wav(wav));
    REQUIRE(back.samples[0] == 0.0);
    REQUIRE(back.samples[1] == -1.0);
    REQUIRE(back.samples[2] == Catch::Approx(16384.0 / 32768.0).margin(1e-12));
    REQUIRE(back.samples[3] == Catch::Approx(32767.0 / 32768.0).margin(1e-12));
    REQUIRE(back.samples[4] == -1.0);
  }

  SECTION("reader tolerates extra chunks") {
    bpgan::WavData wav;
    wav.sample_rate = 16000;
    wav.samples = {0.25, -0.25};
    auto bytes = bpgan::encode_wav(wav);
    // Append a LIST chunk; RIFF walkers must skip unknown chunks.
    const char extra[] = {'L', 'I', 'S', 'T', 4, 0, 0, 0, 'I', 'N', 'F', 'O'};
    bytes.insert(bytes.end(), extra, extra + sizeof(extra));
    const auto back = bpgan::decode_wav(bytes);
    REQUIRE(back.samples.size() == 2);
  }

  SECTION("decode rejections") {
    const std::string junk = "RIFFxxxxAIFF";
    REQUIRE(expect_error([&] {
              bpgan::decode_wav(bpgan::Bytes(junk.begin(), junk.end()));
            }).reason() == "bad-magic");

    bpgan::WavData wav;
    wav.sample_rate = 16000;
    wav.samples = {0.1};
    auto bytes = bpgan::encode_wav(wav);
    bytes[22] = 2;  // channel count -> stereo
    REQUIRE(expect_error([&] { bpgan::decode_wav(bytes); }).reason() == "unsupported-encoding");

    auto truncated = bpgan::encode_wav(wav);
    truncated.resize(20);
    const auto e = expect_error([&] { bpgan::decode_wav(truncated); });
    REQUIRE(e.code() == bpgan::Errc::format);
  }

  SECTION("file round trip") {
    bpgan::WavData wav;
    wav.sample_rate = 16000;
    wav.samples = {0.1, -0.1, 0.2};
    const std::string path = "pipeline_test_audio.wav";
    bpgan::save_wav_file(path, wav);
    const auto back = bpgan::load_wav_file(path);
    std::remove(path.c_str());
    REQUIRE(back.sample_rate == 16000);
    REQUIRE(back.samples.size() == 3);
  }
}

TEST_CASE("PSNR", "[pipeline][metrics]") {
  Tensor x = Tensor::zeros({10});
  Tensor y = Tensor::zeros({10});

  SECTION("identical inputs report infinity") { REQUIRE(std::isinf(bpgan::psnr(x, y, 255.0))); }

  SECTION("unit error at 8-bit peak") {
    for (double& v : y.data) v = 1.0;  // MSE = 1
    REQUIRE(bpgan::psnr(x, y, 255.0) == Catch::Approx(10.0 * std::log10(255.0 * 255.0)).margin(1e-12));
    REQUIRE(bpgan::psnr(x, y, 255.0) == Catch::Approx(48.13080361).margin(1e-6));
  }

  SECTION("known MSE at unit peak") {
    y.data[0] = 0.1;  // MSE = 0.001: 10 log10(1/0.001) = 30 dB
    REQUIRE(bpgan::psnr(x, y, 1.0) == Catch::Approx(30.0).margin(1e-9));
  }

  SECTION("symmetry and monotonicity") {
    const auto a = bpgan_test::random_tensor({32}, 7);
    auto near = a, far = a;
    near.data[0] += 0.01;
    far.data[0] += 0.1;
    REQUIRE(bpgan::psnr(a, near, 1.0) == bpgan::psnr(near, a, 1.0));
    REQUIRE(bpgan::psnr(a, near, 1.0) > bpgan::psnr(a, far, 1.0));
  }

  SECTION("rejections") {
    REQUIRE(expect_error([&] { bpgan::psnr(x, Tensor::zeros({9}), 1.0); }).code() ==
            bpgan::Errc::format);
    REQUIRE(expect_error([&] { bpgan::psnr(x, y, 0.0); }).reason() == "bad-config");
  }
}
