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

// bpgan: command-line surface over the codec library.
//
//   synth-model    build a deterministic synthetic generator/encoder pair
//   synth-corpus   draw a seeded scalar latent corpus for codebook fitting
//   fit-codebook   1-D K-means over a corpus file -> .bpcb
//   compress       signal file -> .bpgc container
//   decompress     .bpgc container -> signal file
//   eval           PSNR / MS-SSIM (image) or spectral PSNR (speech)
//   bench-quant    method x dim x levels sweep -> CSV
//
// All informational output is key=value lines on stdout. Errors are a single
// machine-parsable line on stderr; the exit code is the error category
// (1 internal, 2 input/IO, 3 format/mismatch, 4 numeric), with 2 also used
// for command-line usage errors.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpgan/bpgan.hpp"

namespace {

using bpgan::Codebook;
using bpgan::Errc;
using bpgan::Model;
using bpgan::SearchConfig;
using bpgan::SignalType;
using bpgan::Tensor;

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void usage_fail(const std::string& reason, const std::string& message) {
  bpgan::fail(Errc::io, "cli", reason, message);
}

// "1x8x8" or "1,8,8" -> shape.
bpgan::Shape parse_shape(const std::string& text) {
  bpgan::Shape shape;
  std::size_t value = 0;
  bool in_number = false;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      value = value * 10 + static_cast<std::size_t>(c - '0');
      in_number = true;
    } else if ((c == 'x' || c == ',') && in_number) {
      shape.push_back(value);
      value = 0;
      in_number = false;
    } else {
      usage_fail("bad-shape", "cannot parse shape '" + text + "'; expected e.g. 1x8x8");
    }
  }
  if (in_number) shape.push_back(value);
  if (shape.empty() || shape.size() > 4)
    usage_fail("bad-shape", "shape '" + text + "' must have 1..4 positive dimensions");
  for (std::size_t d : shape)
    if (d == 0) usage_fail("bad-shape", "shape '" + text + "' has a zero dimension");
  return shape;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::size_t value = 0;
  bool in_number = false;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      value = value * 10 + static_cast<std::size_t>(c - '0');
      in_number = true;
    } else if (c == ',' && in_number) {
      out.push_back(value);
      value = 0;
      in_number = false;
    } else {
      usage_fail("bad-list", std::string("cannot parse ") + what + " list '" + text + "'");
    }
  }
  if (in_number) out.push_back(value);
  if (out.empty()) usage_fail("bad-list", std::string(what) + " list is empty");
  return out;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

SignalType resolve_type(const std::string& requested, const std::string& path) {
  if (requested == "image") return SignalType::image;
  if (requested == "speech") return SignalType::speech;
  const auto ends_with = [&path](const char* suffix) {
    const std::string s(suffix);
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".wav")) return SignalType::speech;
  if (ends_with(".pgm") || ends_with(".ppm") || ends_with(".pnm")) return SignalType::image;
  usage_fail("unknown-signal-type",
             "cannot infer signal type from '" + path + "'; pass --type image|speech");
}

// ---------------------------------------------------------------------------
// Shared option groups.

struct SearchFlags {
  std::string method = "admm";
  std::size_t iters = 500;
  double step = 0.01;
  std::string optimizer = "adam";
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double mu = 0.01;
  std::size_t inner_steps = 1;
  double tol = 1e-6;
  std::string iht_quota;  // comma list; empty -> even split over 4 sub-steps
  std::string iht_inner;  // comma list; empty -> iters / substeps each
  std::uint64_t seed = 0;
};

void add_search_flags(CLI::App* sub, SearchFlags& f) {
  sub->add_option("--method", f.method, "Latent search method")
      ->check(CLI::IsMember({"direct", "admm", "iht"}))
      ->capture_default_str();
  sub->add_option("--iters", f.iters, "Outer iteration budget")->capture_default_str();
  sub->add_option("--step", f.step, "Optimizer step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--optimizer", f.optimizer, "Gradient optimizer")
      ->check(CLI::IsMember({"sgd", "adam"}))
      ->capture_default_str();
  sub->add_option("--beta1", f.beta1, "Adam first-moment decay")->capture_default_str();
  sub->add_option("--beta2", f.beta2, "Adam second-moment decay")->capture_default_str();
  sub->add_option("--adam-eps", f.adam_eps, "Adam denominator epsilon")->capture_default_str();
  sub->add_option("--mu", f.mu, "ADMM penalty weight")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--inner-steps", f.inner_steps, "ADMM z-step gradient iterations")
      ->capture_default_str();
  sub->add_option("--tol", f.tol,
                  "Stop when |dF| <= tol between iterations; negative disables")
      ->capture_default_str();
  sub->add_option("--iht-quota", f.iht_quota,
                  "IHT coordinates frozen per sub-step, e.g. 4,4,4,4 (default: even split)");
  sub->add_option("--iht-inner", f.iht_inner,
                  "IHT gradient iterations per sub-step (default: --iters split evenly)");
  sub->add_option("--seed", f.seed, "Random-initialization seed")->capture_default_str();
}

std::vector<std::size_t> default_iht_quota(std::size_t dim) {
  const std::size_t substeps = std::min<std::size_t>(4, dim);
  std::vector<std::size_t> quota(substeps, dim / substeps);
  for (std::size_t i = 0; i < dim % substeps; ++i) ++quota[i];
  return quota;
}

SearchConfig to_search_config(const SearchFlags& f, std::size_t dim) {
  SearchConfig cfg;
  if (f.method == "direct") cfg.method = bpgan::SearchMethod::direct;
  else if (f.method == "admm") cfg.method = bpgan::SearchMethod::admm;
  else cfg.method = bpgan::SearchMethod::iht;
  cfg.max_iters = f.iters;
  cfg.step = f.step;
  cfg.optimizer = f.optimizer == "sgd" ? bpgan::OptimizerKind::sgd : bpgan::OptimizerKind::adam;
  cfg.beta1 = f.beta1;
  cfg.beta2 = f.beta2;
  cfg.eps = f.adam_eps;
  cfg.mu = f.mu;
  cfg.inner_steps = f.inner_steps;
  cfg.convergence_tol = f.tol;
  cfg.seed = f.seed;
  if (cfg.method == bpgan::SearchMethod::iht) {
    cfg.iht_quota = f.iht_quota.empty() ? default_iht_quota(dim)
                                        : parse_size_list(f.iht_quota, "IHT quota");
    if (f.iht_inner.empty())
      cfg.iht_inner.assign(cfg.iht_quota.size(), f.iters / cfg.iht_quota.size());
    else
      cfg.iht_inner = parse_size_list(f.iht_inner, "IHT inner");
  }
  return cfg;
}

struct SpeechFlags {
  std::size_t sample_rate = 16000;
  std::size_t frame_size = 512;
  std::size_t stride = 128;
  std::size_t mel_bins = 128;
  std::size_t patch_frames = 128;
  double dynamic_range = 8.0;
  std::size_t gl_iters = 60;
};

void add_speech_flags(CLI::App* sub, SpeechFlags& f) {
  sub->add_option("--sample-rate", f.sample_rate, "Waveform sample rate (Hz)")
      ->capture_default_str();
  sub->add_option("--frame-size", f.frame_size, "STFT frame size")->capture_default_str();
  sub->add_option("--stride", f.stride, "STFT hop")->capture_default_str();
  sub->add_option("--mel-bins", f.mel_bins, "Mel filter count")->capture_default_str();
  sub->add_option("--patch-frames", f.patch_frames, "Frames per compressed patch")
      ->capture_default_str();
  sub->add_option("--dynamic-range", f.dynamic_range, "Log-magnitude clamp depth r")
      ->capture_default_str();
  sub->add_option("--gl-iters", f.gl_iters, "Griffin-Lim iterations at synthesis")
      ->capture_default_str();
}

bpgan::SpeechPipelineConfig to_speech_config(const SpeechFlags& f) {
  bpgan::SpeechPipelineConfig cfg;
  cfg.sample_rate = f.sample_rate;
  cfg.frame_size = f.frame_size;
  cfg.stride = f.stride;
  cfg.mel_bins = f.mel_bins;
  cfg.patch_frames = f.patch_frames;
  cfg.dynamic_range = f.dynamic_range;
  cfg.griffin_lim_iters = f.gl_iters;
  return cfg;
}

std::vector<double> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) bpgan::fail(Errc::io, "cli", "unreadable-corpus", "cannot open corpus file: " + path);
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof())
    bpgan::fail(Errc::format, "cli", "bad-corpus", "non-numeric entry in corpus file: " + path);
  if (values.empty())
    bpgan::fail(Errc::format, "cli", "bad-corpus", "corpus file is empty: " + path);
  return values;
}

// ---------------------------------------------------------------------------
// synth-model

struct SynthModelOptions {
  std::string kind = "orthonormal-linear";
  std::size_t latent_dim = 0;
  std::string shape;
  std::size_t depth = 2;
  std::size_t width = 32;
  std::uint64_t seed = 0;
  std::string out;
  std::string encoder_out;
};

void run_synth_model(const SynthModelOptions& o) {
  bpgan::SyntheticModelSpec spec;
  if (o.kind == "orthonormal-linear") spec.kind = bpgan::SyntheticKind::orthonormal_linear;
  else if (o.kind == "dct-decoder") spec.kind = bpgan::SyntheticKind::dct_decoder;
  else spec.kind = bpgan::SyntheticKind::random_mlp;
  spec.latent_dim = o.latent_dim;
  spec.signal_shape = parse_shape(o.shape);
  spec.depth = o.depth;
  spec.width = o.width;
  spec.seed = o.seed;

  const Model g = bpgan::make_synthetic(spec);
  bpgan::save_model_file(g, o.out);
  std::cout << "kind=" << o.kind << "\n";
  std::cout << "latent_dim=" << spec.latent_dim << "\n";
  std::cout << "signal_shape=" << bpgan::shape_str(g.output_shape) << "\n";
  std::cout << "layers=" << g.layers.size() << "\n";
  std::cout << "model_id=" << g.model_id << "\n";
  std::cout << "out=" << o.out << "\n";
  if (!o.encoder_out.empty()) {
    const Model e = bpgan::make_oracle_encoder(spec);
    bpgan::save_model_file(e, o.encoder_out);
    std::cout << "encoder_model_id=" << e.model_id << "\n";
    std::cout << "encoder_out=" << o.encoder_out << "\n";
  }
}

// ---------------------------------------------------------------------------
// synth-corpus

struct SynthCorpusOptions {
  std::size_t count = 4096;
  std::string dist = "gaussian";
  double mean = 0.0;
  double stddev = 1.0;
  double lo = -1.0;
  double hi = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_synth_corpus(const SynthCorpusOptions& o) {
  if (o.count == 0) usage_fail("bad-config", "corpus count must be positive");
  std::ofstream out(o.out);
  if (!out) bpgan::fail(Errc::io, "cli", "unwritable-file", "cannot open for writing: " + o.out);
  bpgan::Rng rng(o.seed);
  for (std::size_t i = 0; i < o.count; ++i) {
    const double v = o.dist == "gaussian" ? o.mean + o.stddev * rng.normal()
                                          : rng.uniform(o.lo, o.hi);
    out << fmt_g(v) << "\n";
  }
  if (!out) bpgan::fail(Errc::io, "cli", "write-failed", "short write to " + o.out);
  std::cout << "count=" << o.count << "\n";
  std::cout << "dist=" << o.dist << "\n";
  std::cout << "out=" << o.out << "\n";
}

// ---------------------------------------------------------------------------
// fit-codebook

struct FitCodebookOptions {
  std::string corpus;
  std::size_t levels = 0;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  std::string out;
};

void run_fit_codebook(const FitCodebookOptions& o) {
  const std::vector<double> samples = load_corpus(o.corpus);
  bpgan::KmeansTrace trace;
  const Codebook cb = bpgan::fit_codebook(samples, o.levels, o.max_iters, o.seed, &trace);
  bpgan::save_codebook_file(cb, o.out);
  std::cout << "levels=" << cb.levels() << "\n";
  std::cout << "samples=" << samples.size() << "\n";
  std::cout << "iterations=" << trace.distortion.size() << "\n";
  std::cout << "distortion=" << fmt_g(trace.final_distortion) << "\n";
  std::cout << "occupancy=";
  for (std::size_t i = 0; i < trace.occupancy.size(); ++i)
    std::cout << (i ? "," : "") << trace.occupancy[i];
  std::cout << "\n";
  std::cout << "out=" << o.out << "\n";
}

// ---------------------------------------------------------------------------
// compress

struct CompressOptions {
  std::string input;
  std::string out;
  std::string type = "auto";
  std::string generator;
  std::string encoder;
  std::string codebook;
  std::string objective = "mse";
  double lambda3 = 1.0;
  double gamma = 0.1;
  std::size_t msssim_scales = 5;
  std::string discriminator;
  double lambda4 = 10.0;
  std::string feature_net;
  std::string feature_layers;
  bool no_entropy = false;
  SearchFlags search;
  SpeechFlags speech;
};

void run_compress(const CompressOptions& o) {
  const Model generator = bpgan::load_model_file(o.generator);
  std::optional<Model> encoder;
  if (!o.encoder.empty()) encoder = bpgan::load_model_file(o.encoder);
  const Codebook cb = bpgan::load_codebook_file(o.codebook);
  const SignalType type = resolve_type(o.type, o.input);

  Tensor target;
  double speech_seconds = 1.0;
  if (type == SignalType::image) {
    if (generator.output_shape.size() != 3)
      bpgan::fail(Errc::format, "cli", "bad-generator",
                  "image compression needs a (channels, height, width) generator, got " +
                      bpgan::shape_str(generator.output_shape));
    const bpgan::Image img = bpgan::load_image_file(o.input);
    bpgan::ImagePipelineConfig icfg;
    icfg.channels = generator.output_shape[0];
    icfg.target_height = generator.output_shape[1];
    icfg.target_width = generator.output_shape[2];
    target = bpgan::prepare_image(img, icfg);
  } else {
    const bpgan::SpeechPipelineConfig scfg = to_speech_config(o.speech);
    const bpgan::WavData wav = bpgan::load_wav_file(o.input);
    if (wav.sample_rate != scfg.sample_rate)
      bpgan::fail(Errc::io, "cli", "sample-rate-mismatch",
                  "input is " + std::to_string(wav.sample_rate) + " Hz, pipeline expects " +
                      std::to_string(scfg.sample_rate));
    target = bpgan::extract_speech_patch(wav.samples, scfg).patch;
    speech_seconds = bpgan::patch_nominal_seconds(scfg);
  }

  // The objective closures capture the generator and any auxiliary nets by
  // reference; everything here outlives the search below.
  std::optional<Model> discriminator, feature_net;
  bpgan::Objective objective;
  if (o.objective == "mse") {
    objective = bpgan::make_mse_objective(target, generator);
  } else if (o.objective == "image") {
    bpgan::ImageObjectiveConfig ocfg;
    ocfg.lambda3 = o.lambda3;
    ocfg.gamma = o.gamma;
    ocfg.msssim.scales = o.msssim_scales;
    if (!o.discriminator.empty()) {
      discriminator = bpgan::load_model_file(o.discriminator);
      ocfg.use_discriminator = true;
      ocfg.discriminator = &*discriminator;
    }
    objective = bpgan::make_image_objective(target, generator, ocfg);
  } else {
    bpgan::SpeechObjectiveConfig ocfg;
    ocfg.lambda4 = o.lambda4;
    if (!o.feature_net.empty()) {
      feature_net = bpgan::load_model_file(o.feature_net);
      ocfg.feature_net = &*feature_net;
      ocfg.feature_layers = parse_size_list(o.feature_layers, "feature-layer");
    }
    objective = bpgan::make_speech_objective(target, generator, ocfg);
  }

  const SearchConfig cfg = to_search_config(o.search, generator.input_numel());
  const bpgan::CompressResult res =
      bpgan::compress_signal(target, type, generator, encoder ? &*encoder : nullptr, cb,
                             objective, cfg, !o.no_entropy);
  bpgan::write_file_bytes(o.out, res.container, "cli");

  const bpgan::RateReport rate =
      bpgan::rate_report(type, target.shape, res.payload_bits, res.container.size(),
                         speech_seconds);
  std::cout << "signal_type=" << (type == SignalType::image ? "image" : "speech") << "\n";
  std::cout << "latent_dim=" << generator.input_numel() << "\n";
  std::cout << "levels=" << cb.levels() << "\n";
  std::cout << "iterations=" << res.report.iterations << "\n";
  std::cout << "final_objective=" << fmt_g(res.report.final_objective) << "\n";
  std::cout << "payload_bits=" << res.payload_bits << "\n";
  std::cout << "container_bytes=" << res.container.size() << "\n";
  std::cout << "payload_rate=" << fmt_g(rate.payload_rate) << "\n";
  std::cout << "total_rate=" << fmt_g(rate.total_rate) << "\n";
  std::cout << "unit=" << rate.unit << "\n";
  std::cout << "out=" << o.out << "\n";
}

// ---------------------------------------------------------------------------
// decompress

struct DecompressOptions {
  std::string input;
  std::string generator;
  std::string out;
  std::uint64_t seed = 0;  // accepted for uniformity; decoding is deterministic
  SpeechFlags speech;
};

void run_decompress(const DecompressOptions& o) {
  const Model generator = bpgan::load_model_file(o.generator);
  const bpgan::Bytes container = bpgan::read_file_bytes(o.input, "cli");
  const bpgan::DecompressResult dec = bpgan::decompress_signal(container, generator);

  if (dec.parts.signal_type == SignalType::image) {
    bpgan::save_image_file(o.out, bpgan::finish_image(dec.signal));
  } else {
    // The container carries the normalized log-mel patch only; absolute
    // level is not coded, so synthesis runs at unit scale.
    const bpgan::SpeechPipelineConfig scfg = to_speech_config(o.speech);
    bpgan::WavData wav;
    wav.sample_rate = static_cast<std::uint32_t>(scfg.sample_rate);
    wav.samples = bpgan::synthesize_speech_patch(dec.signal, 1.0, scfg);
    bpgan::save_wav_file(o.out, wav);
  }
  std::cout << "signal_type="
            << (dec.parts.signal_type == SignalType::image ? "image" : "speech") << "\n";
  std::cout << "signal_shape=" << bpgan::shape_str(dec.parts.signal_shape) << "\n";
  std::cout << "latent_dim=" << dec.parts.latent_dim << "\n";
  std::cout << "levels=" << dec.parts.codebook.levels() << "\n";
  std::cout << "out=" << o.out << "\n";
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string original;
  std::string reconstruction;
  std::string type = "auto";
  std::size_t msssim_scales = 5;
  std::uint64_t seed = 0;  // accepted for uniformity; evaluation is deterministic
  SpeechFlags speech;
};

void run_eval(const EvalOptions& o) {
  const SignalType type = resolve_type(o.type, o.original);
  if (type == SignalType::image) {
    Tensor a = bpgan::image_to_tensor(bpgan::load_image_file(o.original));
    Tensor b = bpgan::image_to_tensor(bpgan::load_image_file(o.reconstruction));
    const double peak_psnr = bpgan::psnr(a, b, 255.0);
    for (double& v : a.data) v = v / 127.5 - 1.0;
    for (double& v : b.data) v = v / 127.5 - 1.0;
    bpgan::MsssimConfig mc;
    mc.scales = o.msssim_scales;
    // Compute before printing so a metric failure never leaves a dangling key.
    const double ms = bpgan::msssim_index(a, b, mc);
    std::cout << "psnr=" << fmt_g(peak_psnr) << "\n";
    std::cout << "msssim=" << fmt_g(ms) << "\n";
  } else {
    const bpgan::SpeechPipelineConfig scfg = to_speech_config(o.speech);
    const bpgan::WavData wa = bpgan::load_wav_file(o.original);
    const bpgan::WavData wb = bpgan::load_wav_file(o.reconstruction);
    const Tensor pa = bpgan::extract_speech_patch(wa.samples, scfg).patch;
    const Tensor pb = bpgan::extract_speech_patch(wb.samples, scfg).patch;
    // Peak-to-peak of the normalized log-mel patch is 2.
    const double sp = bpgan::psnr(pa, pb, 2.0);
    std::cout << "spectral_psnr=" << fmt_g(sp) << "\n";
  }
}

// ---------------------------------------------------------------------------
// bench-quant

struct BenchOptions {
  std::string dims = "8,16";
  std::string levels = "4,16";
  std::string seeds = "0,1,2,3,4,5,6,7,8,9";
  std::string methods = "direct,admm,iht";
  std::size_t iters = 150;
  double step = 0.05;
  std::string optimizer = "adam";
  double mu = 0.01;
  std::size_t inner_steps = 1;
  double tol = -1.0;
  std::uint64_t seed = 0;  // offset added to every listed seed
  std::string out;        // empty -> stdout
};

struct BenchRow {
  double objective = 0.0;
  std::uint64_t bits = 0;
};

BenchRow bench_instance(const std::string& method, std::size_t dim, std::size_t k,
                        std::uint64_t seed, const BenchOptions& o) {
  bpgan::SyntheticModelSpec spec;
  spec.kind = bpgan::SyntheticKind::orthonormal_linear;
  spec.latent_dim = dim;
  spec.signal_shape = {4 * dim};
  spec.seed = seed * 3 + 1;
  const Model g = bpgan::make_synthetic(spec);

  bpgan::Rng target_rng(seed * 3 + 2);
  Tensor zstar({dim});
  for (double& v : zstar.data) v = target_rng.uniform(-0.9, 0.9);
  auto [x, tape] = bpgan::forward(g, zstar);
  (void)tape;

  Codebook cb;
  for (std::size_t i = 0; i < k; ++i)
    cb.centers.push_back(static_cast<double>(static_cast<float>(
        -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(k - 1))));

  SearchFlags flags;
  flags.method = method;
  flags.iters = o.iters;
  flags.step = o.step;
  flags.optimizer = o.optimizer;
  flags.mu = o.mu;
  flags.inner_steps = o.inner_steps;
  flags.tol = o.tol;
  flags.seed = seed;
  const SearchConfig cfg = to_search_config(flags, dim);

  const auto objective = bpgan::make_mse_objective(x, g);
  const Tensor z0 = bpgan::initialize(x, nullptr, dim, cfg.seed);
  auto [zq, report] = bpgan::run_search(z0, cb, objective, cfg);

  const auto symbols = bpgan::symbol_indices(cb, zq);
  std::vector<std::uint64_t> counts(cb.levels(), 0);
  for (std::uint32_t s : symbols) ++counts[s];
  const bpgan::HuffmanTable table = bpgan::build_table(counts);
  bpgan::BitWriter bw;
  bpgan::huffman_encode(table, symbols, bw);

  BenchRow row;
  row.objective = report.final_objective;
  row.bits = bw.bit_count();
  return row;
}

void run_bench(const BenchOptions& o) {
  const auto dims = parse_size_list(o.dims, "dim");
  const auto levels = parse_size_list(o.levels, "level");
  const auto seeds = parse_size_list(o.seeds, "seed");
  const auto methods = split_csv(o.methods);
  if (methods.empty()) usage_fail("empty-grid", "bench needs at least one method");
  for (const auto& m : methods)
    if (m != "direct" && m != "admm" && m != "iht")
      usage_fail("bad-method", "unknown bench method '" + m + "'");
  for (std::size_t k : levels)
    if (k < 2) usage_fail("bad-config", "bench level counts must be at least 2");
  for (std::size_t d : dims)
    if (d == 0) usage_fail("bad-config", "bench dims must be positive");

  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) bpgan::fail(Errc::io, "cli", "unwritable-file", "cannot open for writing: " + o.out);
  }
  std::ostream& os = o.out.empty() ? std::cout : file;

  os << "method,latent_dim,levels,seed,final_objective,payload_bits\n";
  for (const auto& method : methods) {
    for (std::size_t dim : dims) {
      for (std::size_t k : levels) {
        std::vector<BenchRow> rows;
        for (std::size_t s : seeds) {
          const std::uint64_t seed = static_cast<std::uint64_t>(s) + o.seed;
          const BenchRow row = bench_instance(method, dim, k, seed, o);
          os << method << "," << dim << "," << k << "," << seed << ","
             << fmt_g(row.objective) << "," << row.bits << "\n";
          rows.push_back(row);
        }
        double mean_f = 0.0, mean_b = 0.0;
        for (const BenchRow& r : rows) {
          mean_f += r.objective;
          mean_b += static_cast<double>(r.bits);
        }
        mean_f /= static_cast<double>(rows.size());
        mean_b /= static_cast<double>(rows.size());
        double var_f = 0.0, var_b = 0.0;
        for (const BenchRow& r : rows) {
          var_f += (r.objective - mean_f) * (r.objective - mean_f);
          var_b += (static_cast<double>(r.bits) - mean_b) * (static_cast<double>(r.bits) - mean_b);
        }
        var_f /= static_cast<double>(rows.size());
        var_b /= static_cast<double>(rows.size());
        os << method << "," << dim << "," << k << ",mean," << fmt_g(mean_f) << ","
           << fmt_g(mean_b) << "\n";
        os << method << "," << dim << "," << k << ",std," << fmt_g(std::sqrt(var_f)) << ","
           << fmt_g(std::sqrt(var_b)) << "\n";
      }
    }
  }
  if (!o.out.empty() && !file) bpgan::fail(Errc::io, "cli", "write-failed", "short write to " + o.out);
}

// ---------------------------------------------------------------------------
// Wiring.

void register_commands(CLI::App& app) {
  {
    auto o = std::make_shared<SynthModelOptions>();
    CLI::App* sub =
        app.add_subcommand("synth-model", "Build a deterministic synthetic generator");
    sub->add_option("--kind", o->kind, "Generator family")
        ->check(CLI::IsMember({"orthonormal-linear", "dct-decoder", "random-mlp"}))
        ->capture_default_str();
    sub->add_option("--latent-dim", o->latent_dim, "Latent dimension")->required();
    sub->add_option("--shape", o->shape, "Signal shape, e.g. 1x8x8")->required();
    sub->add_option("--depth", o->depth, "random-mlp layer count")->capture_default_str();
    sub->add_option("--width", o->width, "random-mlp hidden width")->capture_default_str();
    sub->add_option("--seed", o->seed, "Weight seed")->capture_default_str();
    sub->add_option("--out", o->out, "Output .bpgm path")->required();
    sub->add_option("--encoder-out", o->encoder_out,
                    "Also write the oracle encoder (linear kinds only)");
    sub->callback([o] { run_synth_model(*o); });
  }
  {
    auto o = std::make_shared<SynthCorpusOptions>();
    CLI::App* sub =
        app.add_subcommand("synth-corpus", "Draw a seeded scalar corpus for codebook fitting");
    sub->add_option("--count", o->count, "Number of samples")->capture_default_str();
    sub->add_option("--dist", o->dist, "Sampling distribution")
        ->check(CLI::IsMember({"gaussian", "uniform"}))
        ->capture_default_str();
    sub->add_option("--mean", o->mean, "Gaussian mean")->capture_default_str();
    sub->add_option("--stddev", o->stddev, "Gaussian standard deviation")->capture_default_str();
    sub->add_option("--lo", o->lo, "Uniform lower bound")->capture_default_str();
    sub->add_option("--hi", o->hi, "Uniform upper bound")->capture_default_str();
    sub->add_option("--seed", o->seed, "Draw seed")->capture_default_str();
    sub->add_option("--out", o->out, "Output text file, one value per line")->required();
    sub->callback([o] { run_synth_corpus(*o); });
  }
  {
    auto o = std::make_shared<FitCodebookOptions>();
    CLI::App* sub = app.add_subcommand("fit-codebook", "1-D K-means over a latent corpus");
    sub->add_option("--corpus", o->corpus, "Corpus text file, one value per line")->required();
    sub->add_option("--levels", o->levels, "Quantization level count K")->required();
    sub->add_option("--max-iters", o->max_iters, "Lloyd iteration cap")->capture_default_str();
    sub->add_option("--seed", o->seed, "Accepted for uniformity; the fit is deterministic")
        ->capture_default_str();
    sub->add_option("--out", o->out, "Output .bpcb path")->required();
    sub->callback([o] { run_fit_codebook(*o); });
  }
  {
    auto o = std::make_shared<CompressOptions>();
    CLI::App* sub = app.add_subcommand("compress", "Compress a signal file into a .bpgc container");
    sub->add_option("--input", o->input, "PGM/PPM image or mono 16-bit WAV")->required();
    sub->add_option("--out", o->out, "Output .bpgc path")->required();
    sub->add_option("--type", o->type, "Signal type (default: infer from extension)")
        ->check(CLI::IsMember({"auto", "image", "speech"}))
        ->capture_default_str();
    sub->add_option("--generator", o->generator, "Generator .bpgm")->required();
    sub->add_option("--encoder", o->encoder, "Optional encoder .bpgm for warm-starting");
    sub->add_option("--codebook", o->codebook, "Codebook .bpcb")->required();
    sub->add_option("--objective", o->objective, "Search objective")
        ->check(CLI::IsMember({"mse", "image", "speech"}))
        ->capture_default_str();
    sub->add_option("--lambda3", o->lambda3, "Image objective: distortion weight")
        ->capture_default_str();
    sub->add_option("--gamma", o->gamma, "Image objective: MSE share of distortion")
        ->capture_default_str();
    sub->add_option("--msssim-scales", o->msssim_scales, "MS-SSIM pyramid depth")
        ->capture_default_str();
    sub->add_option("--discriminator", o->discriminator,
                    "Optional discriminator .bpgm for the image objective");
    sub->add_option("--lambda4", o->lambda4, "Speech objective: MSE weight")
        ->capture_default_str();
    sub->add_option("--feature-net", o->feature_net,
                    "Feature network .bpgm for the speech objective");
    sub->add_option("--feature-layers", o->feature_layers,
                    "Conv layer indices in the feature network, e.g. 0,2");
    sub->add_flag("--no-entropy-coding", o->no_entropy,
                  "Fixed-width symbols instead of Huffman coding");
    add_search_flags(sub, o->search);
    add_speech_flags(sub, o->speech);
    sub->callback([o] { run_compress(*o); });
  }
  {
    auto o = std::make_shared<DecompressOptions>();
    CLI::App* sub = app.add_subcommand("decompress", "Decode a .bpgc container to a signal file");
    sub->add_option("--input", o->input, "Input .bpgc path")->required();
    sub->add_option("--generator", o->generator, "Generator .bpgm")->required();
    sub->add_option("--out", o->out, "Output PGM/PPM or WAV path")->required();
    sub->add_option("--seed", o->seed, "Accepted for uniformity; decoding is deterministic")
        ->capture_default_str();
    add_speech_flags(sub, o->speech);
    sub->callback([o] { run_decompress(*o); });
  }
  {
    auto o = std::make_shared<EvalOptions>();
    CLI::App* sub = app.add_subcommand("eval", "Report quality metrics for a reconstruction");
    sub->add_option("--original", o->original, "Reference signal file")->required();
    sub->add_option("--reconstruction", o->reconstruction, "Reconstructed signal file")
        ->required();
    sub->add_option("--type", o->type, "Signal type (default: infer from extension)")
        ->check(CLI::IsMember({"auto", "image", "speech"}))
        ->capture_default_str();
    sub->add_option("--msssim-scales", o->msssim_scales, "MS-SSIM pyramid depth")
        ->capture_default_str();
    sub->add_option("--seed", o->seed, "Accepted for uniformity; evaluation is deterministic")
        ->capture_default_str();
    add_speech_flags(sub, o->speech);
    sub->callback([o] { run_eval(*o); });
  }
  {
    auto o = std::make_shared<BenchOptions>();
    CLI::App* sub = app.add_subcommand(
        "bench-quant", "Sweep search methods over a synthetic (dim, levels) grid, emit CSV");
    sub->add_option("--dims", o->dims, "Latent dimensions, comma list")->capture_default_str();
    sub->add_option("--levels", o->levels, "Quantization level counts, comma list")
        ->capture_default_str();
    sub->add_option("--seeds", o->seeds, "Instance seeds, comma list")->capture_default_str();
    sub->add_option("--methods", o->methods, "Search methods, comma list")
        ->capture_default_str();
    sub->add_option("--iters", o->iters, "Outer iteration budget per instance")
        ->capture_default_str();
    sub->add_option("--step", o->step, "Optimizer step size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--optimizer", o->optimizer, "Gradient optimizer")
        ->check(CLI::IsMember({"sgd", "adam"}))
        ->capture_default_str();
    sub->add_option("--mu", o->mu, "ADMM penalty weight")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--inner-steps", o->inner_steps, "ADMM z-step gradient iterations")
        ->capture_default_str();
    sub->add_option("--tol", o->tol, "Convergence tolerance; negative disables early stop")
        ->capture_default_str();
    sub->add_option("--seed", o->seed, "Offset added to every listed seed")
        ->capture_default_str();
    sub->add_option("--out", o->out, "CSV output path (default: stdout)");
    sub->callback([o] { run_bench(*o); });
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-search codec: quantized generative compression tools"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value config file");
  register_commands(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: code=2 module=cli reason=usage message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const bpgan::Error& e) {
    std::cerr << "error: " << e.diagnostic() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: code=1 module=cli reason=unhandled message=\"" << e.what() << "\"\n";
    return 1;
  }
  return 0;
}
