#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parastyle/error.hpp"

namespace parastyle {

inline constexpr std::array<int, 5> kSupportedSampleRates = {16000, 22050, 24000, 44100, 48000};

inline bool is_supported_sample_rate(int rate) {
  return std::find(kSupportedSampleRates.begin(), kSupportedSampleRates.end(), rate) !=
         kSupportedSampleRates.end();
}

/// Interleaved PCM16. Mono is canonical; multichannel clips are accepted
/// by the loudness meter and downmixed elsewhere.
struct AudioClip {
  std::vector<std::int16_t> samples;
  int sample_rate = 24000;
  int channels = 1;

  std::size_t frames() const { return channels > 0 ? samples.size() / channels : 0; }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(frames()) / sample_rate : 0.0;
  }
  bool empty() const { return samples.empty(); }

  void validate() const {
    if (!is_supported_sample_rate(sample_rate))
      throw Error(ErrorKind::InvalidArgument,
                  "unsupported sample rate " + std::to_string(sample_rate));
    if (channels < 1) throw Error(ErrorKind::InvalidArgument, "channel count must be >= 1");
    if (samples.size() % channels != 0)
      throw Error(ErrorKind::InvalidArgument, "sample count is not a multiple of channels");
  }

  bool operator==(const AudioClip&) const = default;
};

inline double to_float(std::int16_t s) { return static_cast<double>(s) / 32768.0; }

inline std::int16_t to_pcm16(double x) {
  const double scaled = std::round(x * 32767.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

/// Channel-average downmix to mono.
inline AudioClip downmix(const AudioClip& clip) {
  if (clip.channels == 1) return clip;
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.channels = 1;
  out.samples.resize(clip.frames());
  for (std::size_t f = 0; f < clip.frames(); ++f) {
    long sum = 0;
    for (int c = 0; c < clip.channels; ++c) sum += clip.samples[f * clip.channels + c];
    out.samples[f] = static_cast<std::int16_t>(sum / clip.channels);
  }
  return out;
}

// ---------------------------------------------------------------------------
// RIFF/WAVE PCM16

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}
inline std::uint32_t get_u32(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[pos + i]);
  return v;
}
inline std::uint16_t get_u16(std::string_view in, std::size_t pos) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(in[pos]) |
                                    (static_cast<unsigned char>(in[pos + 1]) << 8));
}

}  // namespace detail

inline std::string encode_wav(const AudioClip& clip) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);  // PCM
  detail::put_u16(out, static_cast<std::uint16_t>(clip.channels));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate * clip.channels * 2));
  detail::put_u16(out, static_cast<std::uint16_t>(clip.channels * 2));
  detail::put_u16(out, 16);
  out += "data";
  detail::put_u32(out, data_bytes);
  for (auto s : clip.samples) detail::put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

/// Decodes PCM16 WAV. Streamed WAVs with a placeholder data size
/// (0xFFFFFFFF or larger than the payload) are read to end of buffer.
inline AudioClip decode_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE")
    throw Error(ErrorKind::Parse, "not a RIFF/WAVE buffer");
  AudioClip clip;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto id = bytes.substr(pos, 4);
    std::uint32_t size = detail::get_u32(bytes, pos + 4);
    pos += 8;
    if (id == "fmt ") {
      if (pos + 16 > bytes.size()) throw Error(ErrorKind::Parse, "truncated fmt chunk");
      const auto format = detail::get_u16(bytes, pos);
      clip.channels = detail::get_u16(bytes, pos + 2);
      clip.sample_rate = static_cast<int>(detail::get_u32(bytes, pos + 4));
      const auto bits = detail::get_u16(bytes, pos + 14);
      if ((format != 1 && format != 0xFFFE) || bits != 16)
        throw Error(ErrorKind::Parse, "only PCM16 WAV is supported");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error(ErrorKind::Parse, "data chunk before fmt chunk");
      if (size > bytes.size() - pos) size = static_cast<std::uint32_t>(bytes.size() - pos);
      size -= size % 2;
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i)
        clip.samples[i] = static_cast<std::int16_t>(detail::get_u16(bytes, pos + 2 * i));
      if (clip.channels > 0) clip.samples.resize(clip.samples.size() - clip.samples.size() % clip.channels);
      return clip;
    }
    if (size > bytes.size() - pos) break;
    pos += size + (size & 1);
  }
  throw Error(ErrorKind::Parse, "WAV buffer has no data chunk");
}

inline void write_wav_file(const std::string& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  const auto bytes = encode_wav(clip);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path);
}

inline AudioClip read_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

// ---------------------------------------------------------------------------
// Base64 (RFC 4648, padded) for the JSON wire contracts.

inline std::string base64_encode(std::string_view in) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < in.size(); i += 3) {
    const std::uint32_t n = (static_cast<unsigned char>(in[i]) << 16) |
                            (static_cast<unsigned char>(in[i + 1]) << 8) |
                            static_cast<unsigned char>(in[i + 2]);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (i < in.size()) {
    std::uint32_t n = static_cast<unsigned char>(in[i]) << 16;
    if (i + 1 < in.size()) n |= static_cast<unsigned char>(in[i + 1]) << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += (i + 1 < in.size()) ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

inline std::string base64_decode(std::string_view in) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+' || c == '-') return 62;
    if (c == '/' || c == '_') return 63;
    return -1;
  };
  std::string out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (char c : in) {
    if (c == '=') break;
    if (c == '\n' || c == '\r' || c == ' ') continue;
    const int v = value(c);
    if (v < 0) throw Error(ErrorKind::Parse, "invalid base64 character");
    buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xff));
    }
  }
  return out;
}

inline std::string wav_base64(const AudioClip& clip) { return base64_encode(encode_wav(clip)); }
inline AudioClip wav_from_base64(std::string_view b64) { return decode_wav(base64_decode(b64)); }

}  // namespace parastyle
