#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "isodec/errors.hpp"

namespace isodec {

// Multiplication/inversion tally, accumulated per call; never global state.
struct OpCount {
  std::uint64_t mul = 0;
  std::uint64_t inv = 0;
  OpCount& operator+=(const OpCount& o) {
    mul += o.mul;
    inv += o.inv;
    return *this;
  }
};

// Element of GF(p^m) in polynomial basis. For p = 2 the coefficient bitstring
// is packed LSB-first (bit i of the word array = coefficient of x^i), which
// keeps degree-331 elements in six words. For p > 2 each word holds one
// residue in [0, p).
inline constexpr std::size_t kFeWords = 6;

struct Fe {
  std::array<std::uint64_t, kFeWords> w{};
  friend bool operator==(const Fe&, const Fe&) = default;
  // representation order only (containers in tests); not a field order
  friend auto operator<=>(const Fe&, const Fe&) = default;
};

// Counter-based deterministic RNG (SplitMix64). state advances by the golden
// gamma 0x9E3779B97F4A7C15; output is the finalizer
// z ^= z>>30, z *= 0xBF58476D1CE4E5B9, z ^= z>>27, z *= 0x94D049BB133111EB,
// z ^= z>>31. Identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // Uniform double in [0,1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

// Field description as it appears in code-spec files: characteristic, degree,
// monic irreducible modulus, and the designated generator candidate.
struct FieldSpec {
  std::uint64_t p = 2;
  unsigned m = 1;
  // Modulus coefficients c_0..c_m (c_m = 1). For p = 2 only the exponents of
  // nonzero terms are stored.
  std::vector<std::uint64_t> modulus;
  std::string generator_hex = "2";
};

class Gf {
 public:
  // Builds GF(p^m) from a spec. Verifies the modulus is monic of degree m and
  // irreducible: exhaustive trial division when p^m <= 2^20, a deterministic
  // Rabin test otherwise.
  explicit Gf(const FieldSpec& spec);

  static Gf gf2(unsigned m, const std::vector<unsigned>& taps);  // x^m + sum x^tap + ... (taps include 0)
  static Gf prime(std::uint64_t p);

  std::uint64_t characteristic() const { return p_; }
  unsigned degree() const { return m_; }
  const FieldSpec& spec() const { return spec_; }
  // Number of field elements if it fits in 64 bits, else 0.
  std::uint64_t size() const { return size_; }

  Fe zero() const { return Fe{}; }
  Fe one() const;
  Fe generator() const { return gen_; }

  bool is_zero(const Fe& a) const { return a == Fe{}; }

  Fe add(const Fe& a, const Fe& b) const;
  Fe sub(const Fe& a, const Fe& b) const;
  Fe neg(const Fe& a) const;
  Fe mul(const Fe& a, const Fe& b, OpCount* ops = nullptr) const;
  Fe inv(const Fe& a, OpCount* ops = nullptr) const;
  Fe pow(const Fe& a, std::uint64_t e, OpCount* ops = nullptr) const;

  Fe from_uint(std::uint64_t v) const;  // small-integer embed via base-p digits
  Fe random(Rng& rng) const;

  // Big-endian hex of the coefficient value sum c_i p^i, LSB = constant term,
  // zero-padded to the field's fixed width.
  std::string to_hex(const Fe& a) const;
  Fe from_hex(std::string_view s) const;
  unsigned hex_width() const { return hex_width_; }

  // Element enumeration for exhaustive tests; valid only when size() > 0.
  Fe element_at(std::uint64_t index) const;

  bool same_field(const Gf& o) const { return p_ == o.p_ && m_ == o.m_ && spec_.modulus == o.spec_.modulus; }

 private:
  void init();
  Fe mul2(const Fe& a, const Fe& b) const;
  Fe inv2(const Fe& a) const;
  Fe mulp(const Fe& a, const Fe& b) const;
  Fe invp(const Fe& a) const;
  bool irreducible_small() const;
  bool irreducible_rabin() const;

  FieldSpec spec_;
  std::uint64_t p_ = 2;
  unsigned m_ = 1;
  std::uint64_t size_ = 0;
  unsigned hex_width_ = 1;
  unsigned words_ = 1;                  // words used by an element (p=2: ceil(m/64))
  std::vector<unsigned> taps_;          // p=2: exponents of modulus terms below m
  std::vector<std::uint64_t> modlow_;   // p>2: modulus coefficients c_0..c_{m-1}
  Fe gen_;
};

// Default field housing the worked (5,3,2) example: GF(2^331) with the
// low-weight irreducible pentanomial x^331 + x^10 + x^6 + x^2 + 1 and
// generator candidate x.
FieldSpec default_example_field();

// GF(2^61), x^61 + x^5 + x^2 + x + 1. Used for randomized structural-zero
// classification of patterned minors.
FieldSpec gf2_61_field();

}  // namespace isodec
