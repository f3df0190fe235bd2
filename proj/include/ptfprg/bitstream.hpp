#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptfprg/error.hpp"
#include "ptfprg/random.hpp"

namespace ptfprg {

/// A finite sequence of bits, consumed most-significant-bit first from
/// 64-bit words. Hex input maps the first hex digit to the first four bits.
class BitStream {
 public:
  BitStream() = default;
  BitStream(std::vector<std::uint64_t> words, std::size_t bit_length)
      : words_(std::move(words)), bit_length_(bit_length) {
    if (bit_length_ > words_.size() * 64) {
      throw ParameterError("bit length exceeds word storage");
    }
  }

  static BitStream from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    std::vector<std::uint64_t> words((hex.size() * 4 + 63) / 64, 0);
    for (std::size_t i = 0; i < hex.size(); ++i) {
      const char c = hex[i];
      std::uint64_t nibble = 0;
      if (c >= '0' && c <= '9') {
        nibble = static_cast<std::uint64_t>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        nibble = static_cast<std::uint64_t>(c - 'a' + 10);
      } else if (c >= 'A' && c <= 'F') {
        nibble = static_cast<std::uint64_t>(c - 'A' + 10);
      } else {
        throw ParameterError("invalid hex digit in seed: '" + std::string(1, c) + "'");
      }
      const std::size_t bit = i * 4;
      words[bit / 64] |= nibble << (60 - bit % 64);
    }
    return BitStream(std::move(words), hex.size() * 4);
  }

  std::size_t size() const noexcept { return bit_length_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Reads `count` (<= 64) bits starting at `offset` as an unsigned integer.
  std::uint64_t read(std::size_t offset, unsigned count) const {
    if (count > 64 || offset + count > bit_length_) {
      throw ParameterError("bit read past end of stream");
    }
    if (count == 0) return 0;
    const std::size_t word = offset / 64;
    const unsigned shift = static_cast<unsigned>(offset % 64);
    std::uint64_t hi = words_[word] << shift;
    if (shift != 0 && shift + count > 64) {
      hi |= words_[word + 1] >> (64 - shift);
    }
    return hi >> (64 - count);
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t bit_length_ = 0;
};

/// Expands a 64-bit key into the master bitstream for sample `index`.
inline BitStream expand_seed(std::uint64_t key, std::uint64_t index, std::size_t bit_length) {
  std::vector<std::uint64_t> words((bit_length + 63) / 64);
  const std::uint64_t base = derive_key(key, index);
  for (std::size_t j = 0; j < words.size(); ++j) {
    words[j] = splitmix64(base + 0x9e3779b97f4a7c15ULL * j);
  }
  return BitStream(std::move(words), bit_length);
}

/// Parses a hex string of at most 16 digits as a 64-bit key.
inline std::uint64_t parse_hex_key(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty() || hex.size() > 16) {
    throw ParameterError("seed key must be 1 to 16 hex digits");
  }
  return BitStream::from_hex(hex).read(0, static_cast<unsigned>(hex.size() * 4));
}

}  // namespace ptfprg
