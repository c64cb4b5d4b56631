/*
Copyright 2026 The pitchbench Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// RIFF/WAVE reading (16-bit PCM or 32-bit IEEE float, mono or stereo) and
// writing. Multi-byte fields are little-endian regardless of host order.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "pitchbench/error.hpp"
#include "pitchbench/signal.hpp"

namespace pitchbench {

enum class SampleFormat { kPcm16, kFloat32 };

struct LoadOptions {
  // Channel to keep from a multi-channel file; nullopt averages channels.
  std::optional<int> channel;
};

namespace detail {

constexpr std::uint16_t kWaveFormatPcm = 0x0001;
constexpr std::uint16_t kWaveFormatFloat = 0x0003;
constexpr std::uint16_t kWaveFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, std::string path)
      : bytes_(bytes), path_(std::move(path)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void require(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(path_ + ": truncated file at byte offset " +
                       std::to_string(pos_) + " while reading " + what);
    }
  }

  std::uint32_t u32(const char* what) {
    require(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  std::uint16_t u16(const char* what) {
    require(2, what);
    auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  std::string fourcc(const char* what) {
    require(4, what);
    std::string s(reinterpret_cast<const char*>(&bytes_[pos_]), 4);
    pos_ += 4;
    return s;
  }

  void skip(std::size_t n, const char* what) {
    require(n, what);
    pos_ += n;
  }

  const std::uint8_t* data() const { return bytes_.data() + pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

inline std::string encoding_name(std::uint16_t tag, std::uint16_t bits) {
  switch (tag) {
    case kWaveFormatPcm:
      return "PCM " + std::to_string(bits) + "-bit";
    case kWaveFormatFloat:
      return "IEEE float " + std::to_string(bits) + "-bit";
    case 0x0002:
      return "MS ADPCM";
    case 0x0006:
      return "A-law";
    case 0x0007:
      return "mu-law";
    default: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "format tag 0x%04X", tag);
      return buf;
    }
  }
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace detail

// Parses an in-memory WAV image. `name` is only used in error messages.
inline Signal decode_wav(const std::vector<std::uint8_t>& bytes,
                         const std::string& name = "<memory>",
                         const LoadOptions& options = {}) {
  detail::ByteReader rd(bytes, name);
  if (rd.fourcc("RIFF header") != "RIFF") {
    throw FormatError(name + ": not a RIFF file");
  }
  rd.u32("RIFF size");
  if (rd.fourcc("WAVE tag") != "WAVE") {
    throw FormatError(name + ": RIFF file is not WAVE");
  }

  std::uint16_t tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (true) {
    const std::string id = rd.fourcc("chunk id");
    const std::uint32_t size = rd.u32("chunk size");
    if (id == "fmt ") {
      rd.require(size, "fmt chunk");
      const std::size_t start = rd.offset();
      tag = rd.u16("format tag");
      channels = rd.u16("channel count");
      rate = rd.u32("sample rate");
      rd.u32("byte rate");
      rd.u16("block align");
      bits = rd.u16("bits per sample");
      if (tag == detail::kWaveFormatExtensible && size >= 40) {
        rd.u16("extension size");
        rd.u16("valid bits");
        rd.u32("channel mask");
        tag = rd.u16("sub-format");  // first two bytes of the GUID
      }
      const std::size_t used = rd.offset() - start;
      rd.skip(size - used + (size & 1), "fmt chunk padding");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError(name + ": data chunk before fmt chunk");
      const bool pcm16 = tag == detail::kWaveFormatPcm && bits == 16;
      const bool f32 = tag == detail::kWaveFormatFloat && bits == 32;
      if (!pcm16 && !f32) {
        throw FormatError(name + ": unsupported encoding " +
                          detail::encoding_name(tag, bits) +
                          " (expected PCM 16-bit or IEEE float 32-bit)");
      }
      if (channels < 1 || channels > 2) {
        throw FormatError(name + ": unsupported channel count " +
                          std::to_string(channels));
      }
      if (rate == 0) throw FormatError(name + ": zero sample rate");
      if (options.channel &&
          (*options.channel < 0 || *options.channel >= channels)) {
        throw BoundsError(name + ": channel " +
                          std::to_string(*options.channel) +
                          " not present (file has " + std::to_string(channels) +
                          ")");
      }
      const std::size_t bytes_per_sample = bits / 8;
      const std::size_t frame_bytes = bytes_per_sample * channels;
      rd.require(size, "data chunk");
      const std::size_t n = size / frame_bytes;
      const std::uint8_t* p = rd.data();
      Signal out;
      out.sample_rate = static_cast<int>(rate);
      out.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
          const std::uint8_t* s = p + i * frame_bytes + c * bytes_per_sample;
          double v;
          if (pcm16) {
            const auto raw = static_cast<std::int16_t>(s[0] | (s[1] << 8));
            v = static_cast<double>(raw) / 32768.0;
          } else {
            const std::uint32_t raw = static_cast<std::uint32_t>(s[0]) |
                                      (static_cast<std::uint32_t>(s[1]) << 8) |
                                      (static_cast<std::uint32_t>(s[2]) << 16) |
                                      (static_cast<std::uint32_t>(s[3]) << 24);
            v = static_cast<double>(std::bit_cast<float>(raw));
          }
          if (options.channel) {
            if (c == *options.channel) acc = v;
          } else {
            acc += v;
          }
        }
        out.samples[i] = options.channel ? acc : acc / channels;
      }
      validate(out);
      return out;
    } else {
      rd.skip(size + (size & 1), "chunk body");
    }
  }
}

inline Signal load_audio(const std::filesystem::path& path,
                         const LoadOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.string(), options);
}

inline std::vector<std::uint8_t> encode_wav(
    const Signal& signal, SampleFormat format = SampleFormat::kFloat32) {
  validate(signal);
  const bool f32 = format == SampleFormat::kFloat32;
  const std::uint16_t bits = f32 ? 32 : 16;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(signal.size() * (bits / 8));
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  detail::put_tag(out, "RIFF");
  detail::put_u32(out, 36 + data_bytes);
  detail::put_tag(out, "WAVE");
  detail::put_tag(out, "fmt ");
  detail::put_u32(out, 16);
  detail::put_u16(out, f32 ? detail::kWaveFormatFloat : detail::kWaveFormatPcm);
  detail::put_u16(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(signal.sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(signal.sample_rate) * (bits / 8));
  detail::put_u16(out, bits / 8);
  detail::put_u16(out, bits);
  detail::put_tag(out, "data");
  detail::put_u32(out, data_bytes);
  for (double v : signal.samples) {
    if (f32) {
      detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    } else {
      const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      detail::put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }
  }
  return out;
}

inline void save_audio(const std::filesystem::path& path, const Signal& signal,
                       SampleFormat format = SampleFormat::kFloat32) {
  const auto bytes = encode_wav(signal, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pitchbench
