#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptfprg/error.hpp"

namespace ptfprg {

/// Largest modulus accepted anywhere in the library.
inline constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 62;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Smallest prime >= n.
inline std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  std::uint64_t c = n | 1;
  while (!is_prime(c)) {
    if (c > kMaxModulus) throw ParameterError("no prime below 2^62 at or above requested bound");
    c += 2;
  }
  return c;
}

/// ceil(log2 q) for q >= 2; the number of bits that index F_q.
inline unsigned ceil_log2(std::uint64_t q) {
  if (q < 2) throw ParameterError("ceil_log2 requires q >= 2");
  return static_cast<unsigned>(std::bit_width(q - 1));
}

/// Reduction modulo a fixed q. Moduli below 2^32 use Barrett reduction on
/// the 64-bit product; larger ones fall back to 128-bit division.
class Modulus {
 public:
  explicit Modulus(std::uint64_t q) : q_(q), barrett_(barrett_factor(q)) {}

  std::uint64_t value() const noexcept { return q_; }

  std::uint64_t reduce(std::uint64_t a) const noexcept {
    if (barrett_ == 0) return a % q_;
    const auto est = static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * barrett_) >> 64);
    std::uint64_t r = a - est * q_;
    while (r >= q_) r -= q_;
    return r;
  }

  /// (a * b + c) mod q for a, b, c < q.
  std::uint64_t mul_add(std::uint64_t a, std::uint64_t b, std::uint64_t c) const noexcept {
    if (barrett_ != 0) return reduce(a * b + c);
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b + c) % q_);
  }

 private:
  static std::uint64_t barrett_factor(std::uint64_t q) {
    if (q < 2) throw ParameterError("modulus must be at least 2");
    return q < (std::uint64_t{1} << 32) ? ~std::uint64_t{0} / q : 0;
  }

  std::uint64_t q_;
  std::uint64_t barrett_;
};

/// K-wise independent family of n variables over F_q: the seed is the
/// coefficient vector of a polynomial of degree < K, and coordinate i is its
/// value at a fixed distinct field element.
class KWiseFamily {
 public:
  KWiseFamily(std::uint64_t q, std::size_t independence, std::vector<std::uint64_t> eval_points)
      : modulus_(q), independence_(independence), eval_points_(std::move(eval_points)) {
    if (q > kMaxModulus || !is_prime(q)) throw ParameterError("modulus must be a prime <= 2^62");
    if (independence_ == 0) throw ParameterError("independence order must be positive");
    if (eval_points_.size() > q) throw ParameterError("more evaluation points than field elements");
    std::vector<std::uint64_t> sorted = eval_points_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] >= q) throw ParameterError("evaluation point outside the field");
      if (i > 0 && sorted[i] == sorted[i - 1]) throw ParameterError("evaluation points must be distinct");
    }
  }

  /// Evaluation points 0, 1, ..., n-1.
  static KWiseFamily standard(std::uint64_t q, std::size_t independence, std::size_t n) {
    std::vector<std::uint64_t> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = i;
    return KWiseFamily(q, independence, std::move(pts));
  }

  std::uint64_t q() const noexcept { return modulus_.value(); }
  std::size_t independence() const noexcept { return independence_; }
  std::size_t size() const noexcept { return eval_points_.size(); }
  const std::vector<std::uint64_t>& eval_points() const noexcept { return eval_points_; }
  const Modulus& modulus() const noexcept { return modulus_; }

  /// Horner evaluation without argument checks.
  std::uint64_t eval_unchecked(std::span<const std::uint64_t> seed, std::size_t i) const noexcept {
    const std::uint64_t x = eval_points_[i];
    std::uint64_t acc = 0;
    for (std::size_t t = seed.size(); t-- > 0;) acc = modulus_.mul_add(acc, x, seed[t]);
    return acc;
  }

  void check_seed(std::span<const std::uint64_t> seed) const {
    if (seed.size() != independence_) {
      throw ParameterError("seed must have exactly K = " + std::to_string(independence_) + " field elements");
    }
    for (std::uint64_t s : seed) {
      if (s >= q()) throw ParameterError("seed entry outside the field");
    }
  }

 private:
  Modulus modulus_;
  std::size_t independence_;
  std::vector<std::uint64_t> eval_points_;
};

/// sum_t seed[t] * eval_points[i]^t mod q.
inline std::uint64_t kwise_eval(const KWiseFamily& family, std::span<const std::uint64_t> seed, std::size_t i) {
  if (i >= family.size()) throw std::out_of_range("coordinate index out of range");
  family.check_seed(seed);
  return family.eval_unchecked(seed, i);
}

}  // namespace ptfprg
