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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpgan/bytes.hpp"

namespace bpgan {

// Mono 16-bit PCM WAV. The reader walks RIFF chunks and tolerates extras
// (LIST, fact, ...); the writer emits the canonical 44-byte header. Samples
// are exchanged as doubles in [-1, 1) scaled by 1/32768.

struct WavData {
  std::uint32_t sample_rate = 0;
  std::vector<double> samples;
};

inline WavData decode_wav(const Bytes& bytes) {
  ByteReader r(bytes, "wav-io");
  r.set_block("riff-header");
  if (r.remaining() < 12) fail(Errc::format, "wav-io", "truncated", "file shorter than a RIFF header");
  if (r.tag(4) != "RIFF") fail(Errc::format, "wav-io", "bad-magic", "missing RIFF tag");
  r.u32();  // declared size; chunk walk below is bounds-checked anyway
  if (r.tag(4) != "WAVE") fail(Errc::format, "wav-io", "bad-magic", "missing WAVE tag");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  WavData wav;
  bool have_data = false;
  while (r.remaining() >= 8) {
    r.set_block("chunk-header");
    const std::string id = r.tag(4);
    const std::uint32_t size = r.u32();
    if (size > r.remaining())
      fail(Errc::format, "wav-io", "truncated",
           "chunk '" + id + "' claims " + std::to_string(size) + " bytes, " +
               std::to_string(r.remaining()) + " remain");
    if (id == "fmt ") {
      r.set_block("fmt-chunk");
      if (size < 16) fail(Errc::format, "wav-io", "bad-format", "fmt chunk shorter than 16 bytes");
      const std::uint16_t audio_format = r.u16();
      channels = r.u16();
      sample_rate = r.u32();
      r.u32();  // byte rate
      r.u16();  // block align
      bits = r.u16();
      r.skip(size - 16);
      if (audio_format != 1)
        fail(Errc::format, "wav-io", "unsupported-encoding",
             "only PCM (format 1) is supported, got " + std::to_string(audio_format));
      have_fmt = true;
    } else if (id == "data") {
      r.set_block("data-chunk");
      if (!have_fmt) fail(Errc::format, "wav-io", "bad-format", "data chunk precedes fmt chunk");
      if (channels != 1)
        fail(Errc::format, "wav-io", "unsupported-encoding",
             "only mono audio is supported, got " + std::to_string(channels) + " channels");
      if (bits != 16)
        fail(Errc::format, "wav-io", "unsupported-encoding",
             "only 16-bit samples are supported, got " + std::to_string(bits));
      const std::size_t count = size / 2;
      wav.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i)
        wav.samples[i] = static_cast<double>(static_cast<std::int16_t>(r.u16())) / 32768.0;
      if (size % 2 != 0) r.skip(1);
      have_data = true;
    } else {
      r.skip(size + (size % 2));  // chunks are word-aligned
    }
  }
  if (!have_fmt || !have_data)
    fail(Errc::format, "wav-io", "bad-format", "missing fmt or data chunk");
  if (sample_rate == 0) fail(Errc::format, "wav-io", "bad-format", "sample rate must be positive");
  wav.sample_rate = sample_rate;
  return wav;
}

inline Bytes encode_wav(const WavData& wav) {
  if (wav.sample_rate == 0) fail(Errc::io, "wav-io", "bad-config", "sample rate must be positive");
  const std::size_t n = wav.samples.size();
  if (n > (0xffffffffu - 44) / 2) fail(Errc::io, "wav-io", "bad-config", "waveform too long for WAV");
  ByteWriter w;
  w.tag("RIFF");
  w.u32(static_cast<std::uint32_t>(36 + 2 * n));
  w.tag("WAVE");
  w.tag("fmt ");
  w.u32(16);
  w.u16(1);  // PCM
  w.u16(1);  // mono
  w.u32(wav.sample_rate);
  w.u32(wav.sample_rate * 2);  // byte rate
  w.u16(2);                    // block align
  w.u16(16);                   // bits per sample
  w.tag("data");
  w.u32(static_cast<std::uint32_t>(2 * n));
  for (double v : wav.samples) {
    double s = v * 32768.0;
    s = s < -32768.0 ? -32768.0 : (s > 32767.0 ? 32767.0 : s);
    const auto q = static_cast<std::int16_t>(s >= 0.0 ? s + 0.5 : s - 0.5);
    w.u16(static_cast<std::uint16_t>(q));
  }
  return std::move(w).take();
}

inline WavData load_wav_file(const std::string& path) {
  return decode_wav(read_file_bytes(path, "wav-io"));
}

inline void save_wav_file(const std::string& path, const WavData& wav) {
  write_file_bytes(path, encode_wav(wav), "wav-io");
}

}  // namespace bpgan
