#include "isodec/field.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace isodec {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::ShapeError: return "ShapeError";
    case Errc::IndexError: return "IndexError";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::EmptyMessage: return "EmptyMessage";
    case Errc::FieldTooSmall: return "FieldTooSmall";
    case Errc::NotRealizable: return "NotRealizable";
    case Errc::NotReduced: return "NotReduced";
    case Errc::DegreeBound: return "DegreeBound";
    case Errc::PrefixUnknown: return "PrefixUnknown";
    case Errc::IntegrityError: return "IntegrityError";
    case Errc::PatternError: return "PatternError";
    case Errc::ParseError: return "ParseError";
    case Errc::DegenerateField: return "DegenerateField";
    case Errc::InvalidField: return "InvalidField";
  }
  return "Unknown";
}

namespace {

constexpr std::size_t kW = kFeWords;
constexpr std::size_t kW2 = 2 * kFeWords;

int top_bit(const std::uint64_t* w, std::size_t nw) {
  for (std::size_t i = nw; i-- > 0;) {
    if (w[i]) return static_cast<int>(i * 64 + 63 - std::countl_zero(w[i]));
  }
  return -1;
}

// XOR (src << bits) into dst, dst has nw words of room.
void xor_shifted(std::uint64_t* dst, std::size_t nw, const std::uint64_t* src, std::size_t ns, unsigned bits) {
  unsigned wsh = bits / 64, bsh = bits % 64;
  for (std::size_t i = 0; i < ns; ++i) {
    std::uint64_t v = src[i];
    if (!v) continue;
    std::size_t j = i + wsh;
    if (j < nw) dst[j] ^= v << bsh;
    if (bsh && j + 1 < nw) dst[j + 1] ^= v >> (64 - bsh);
  }
}

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, p);
    a = mulmod_u64(a, a, p);
    e >>= 1;
  }
  return r;
}

std::uint64_t invmod_u64(std::uint64_t a, std::uint64_t p) { return powmod_u64(a, p - 2, p); }

// Dense polynomial over GF(p), coefficients ascending. Used only for modulus
// verification at construction time.
using Poly = std::vector<std::uint64_t>;

void ptrim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly pmulmod_p(const Poly& a, const Poly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod_u64(a[i], b[j], p)) % p;
  }
  ptrim(r);
  return r;
}

Poly pmod(Poly a, const Poly& f, std::uint64_t p) {
  ptrim(a);
  std::uint64_t lead_inv = invmod_u64(f.back(), p);
  while (a.size() >= f.size()) {
    std::uint64_t c = mulmod_u64(a.back(), lead_inv, p);
    std::size_t off = a.size() - f.size();
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::uint64_t t = mulmod_u64(c, f[i], p);
      a[off + i] = (a[off + i] + p - t) % p;
    }
    ptrim(a);
    if (a.empty()) break;
  }
  return a;
}

Poly pgcd(Poly a, Poly b, std::uint64_t p) {
  ptrim(a);
  ptrim(b);
  while (!b.empty()) {
    Poly r = pmod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Poly ppowmod(Poly base, std::uint64_t e, const Poly& f, std::uint64_t p) {
  Poly r{1};
  base = pmod(std::move(base), f, p);
  while (e) {
    if (e & 1) r = pmod(pmulmod_p(r, base, p), f, p);
    base = pmod(pmulmod_p(base, base, p), f, p);
    e >>= 1;
  }
  return r;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> fs;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      fs.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) fs.push_back(n);
  return fs;
}

constexpr char kHex[] = "0123456789abcdef";

int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Gf::Gf(const FieldSpec& spec) : spec_(spec), p_(spec.p), m_(spec.m) {
  init();
  gen_ = from_hex(spec_.generator_hex);
  if (is_zero(gen_)) fail(Errc::InvalidField, "generator candidate must be nonzero");
}

Gf Gf::gf2(unsigned m, const std::vector<unsigned>& taps) {
  FieldSpec s;
  s.p = 2;
  s.m = m;
  s.modulus.assign(m + 1, 0);
  s.modulus[m] = 1;
  for (unsigned t : taps) s.modulus[t] = 1;
  s.generator_hex = "2";
  return Gf(s);
}

Gf Gf::prime(std::uint64_t p) {
  FieldSpec s;
  s.p = p;
  s.m = 1;
  s.modulus = {0, 1};  // x
  s.generator_hex = "1";
  return Gf(s);
}

void Gf::init() {
  if (p_ < 2) fail(Errc::InvalidField, "characteristic must be a prime >= 2");
  if (m_ < 1) fail(Errc::InvalidField, "extension degree must be >= 1");
  for (std::uint64_t d = 2; d * d <= p_; ++d)
    if (p_ % d == 0) fail(Errc::InvalidField, "characteristic is not prime");
  if (spec_.modulus.size() != m_ + 1 || spec_.modulus[m_] != 1)
    fail(Errc::InvalidField, "modulus must be monic of degree m");
  for (std::uint64_t c : spec_.modulus)
    if (c >= p_) fail(Errc::InvalidField, "modulus coefficient out of range");

  if (p_ == 2) {
    if (m_ > 383) fail(Errc::InvalidField, "GF(2^m) supported up to m = 383");
    words_ = (m_ + 63) / 64;
    taps_.clear();
    for (unsigned i = 0; i < m_; ++i)
      if (spec_.modulus[i]) taps_.push_back(i);
    size_ = (m_ < 64) ? (1ULL << m_) : 0;
    hex_width_ = (m_ + 3) / 4;
  } else {
    if (p_ >= (1ULL << 31)) fail(Errc::InvalidField, "characteristic supported up to 2^31");
    if (m_ > kFeWords) fail(Errc::InvalidField, "GF(p^m) with p > 2 supported up to m = 6");
    words_ = m_;
    modlow_.assign(spec_.modulus.begin(), spec_.modulus.end() - 1);
    // size = p^m, reject overflow past 2^62 so hex values fit one word
    std::uint64_t sz = 1;
    for (unsigned i = 0; i < m_; ++i) {
      if (sz > (1ULL << 62) / p_) fail(Errc::InvalidField, "field too large for p > 2 representation");
      sz *= p_;
    }
    size_ = sz;
    unsigned bits = 64 - std::countl_zero(size_ - 1 > 0 ? size_ - 1 : 1);
    hex_width_ = (bits + 3) / 4;
  }

  if (m_ > 1) {
    bool small = size_ != 0 && size_ <= (1ULL << 20);
    bool ok = small ? irreducible_small() : irreducible_rabin();
    if (!ok) fail(Errc::InvalidField, "modulus is not irreducible");
  }
}

bool Gf::irreducible_small() const {
  // Trial division by all monic polynomials of degree 1..m/2.
  const Poly f(spec_.modulus.begin(), spec_.modulus.end());
  for (unsigned d = 1; d <= m_ / 2; ++d) {
    std::uint64_t count = 1;
    for (unsigned i = 0; i < d; ++i) count *= p_;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      Poly g(d + 1, 0);
      g[d] = 1;
      std::uint64_t v = idx;
      for (unsigned i = 0; i < d; ++i) {
        g[i] = v % p_;
        v /= p_;
      }
      if (pmod(f, g, p_).empty()) return false;
    }
  }
  return true;
}

bool Gf::irreducible_rabin() const {
  // f irreducible over GF(p) of degree m iff x^(p^m) = x (mod f) and
  // gcd(x^(p^(m/q)) - x, f) = 1 for every prime q dividing m.
  const Poly f(spec_.modulus.begin(), spec_.modulus.end());
  auto frob = [&](unsigned steps) {
    Poly r{0, 1};  // x
    for (unsigned i = 0; i < steps; ++i) r = ppowmod(std::move(r), p_, f, p_);
    return r;
  };
  Poly xm = frob(m_);
  ptrim(xm);
  if (!(xm == Poly{0, 1})) return false;
  for (std::uint64_t q : prime_factors(m_)) {
    Poly g = frob(static_cast<unsigned>(m_ / q));
    // g - x
    if (g.size() < 2) g.resize(2, 0);
    g[1] = (g[1] + p_ - 1) % p_;
    ptrim(g);
    Poly d = pgcd(f, g, p_);
    if (!(d.size() == 1)) return false;
  }
  return true;
}

Fe Gf::one() const {
  Fe r;
  r.w[0] = 1;
  return r;
}

Fe Gf::add(const Fe& a, const Fe& b) const {
  Fe r;
  if (p_ == 2) {
    for (std::size_t i = 0; i < kW; ++i) r.w[i] = a.w[i] ^ b.w[i];
  } else {
    for (std::size_t i = 0; i < words_; ++i) r.w[i] = (a.w[i] + b.w[i]) % p_;
  }
  return r;
}

Fe Gf::neg(const Fe& a) const {
  if (p_ == 2) return a;
  Fe r;
  for (std::size_t i = 0; i < words_; ++i) r.w[i] = (p_ - a.w[i]) % p_;
  return r;
}

Fe Gf::sub(const Fe& a, const Fe& b) const { return add(a, neg(b)); }

Fe Gf::mul(const Fe& a, const Fe& b, OpCount* ops) const {
  if (ops) ops->mul++;
  return p_ == 2 ? mul2(a, b) : mulp(a, b);
}

Fe Gf::mul2(const Fe& a, const Fe& b) const {
  // 4-bit windowed carryless multiply, then fold by the modulus taps.
  std::uint64_t tab[16][kW + 1] = {};
  std::memcpy(tab[1], a.w.data(), kW * sizeof(std::uint64_t));
  for (unsigned i = 2; i < 16; i += 2) {
    // tab[i] = tab[i/2] << 1, tab[i+1] = tab[i] ^ a
    std::uint64_t carry = 0;
    for (std::size_t wj = 0; wj <= kW; ++wj) {
      std::uint64_t v = tab[i / 2][wj];
      tab[i][wj] = (v << 1) | carry;
      carry = v >> 63;
    }
    for (std::size_t wj = 0; wj < kW; ++wj) tab[i + 1][wj] = tab[i][wj] ^ a.w[wj];
    tab[i + 1][kW] = tab[i][kW];
  }

  std::uint64_t prod[kW2 + 1] = {};
  for (int nib = 15; nib >= 0; --nib) {
    if (nib != 15) {
      // prod <<= 4
      std::uint64_t carry = 0;
      for (std::size_t wj = 0; wj <= kW2; ++wj) {
        std::uint64_t v = prod[wj];
        prod[wj] = (v << 4) | carry;
        carry = v >> 60;
      }
    }
    for (std::size_t wj = 0; wj < words_; ++wj) {
      unsigned v = (b.w[wj] >> (4 * nib)) & 0xF;
      if (!v) continue;
      for (std::size_t t = 0; t <= kW; ++t) prod[wj + t] ^= tab[v][t];
    }
  }

  // reduce mod x^m + sum taps
  int tb;
  while ((tb = top_bit(prod, kW2 + 1)) >= static_cast<int>(m_)) {
    // fold the whole top word region in one pass, top-down
    for (std::size_t wi = kW2 + 1; wi-- > 0;) {
      int base = static_cast<int>(wi * 64);
      if (base + 63 < static_cast<int>(m_)) break;
      std::uint64_t chunk;
      int pos;
      if (base >= static_cast<int>(m_)) {
        chunk = prod[wi];
        prod[wi] = 0;
        pos = base;
      } else {
        unsigned off = m_ - base;
        chunk = prod[wi] >> off;
        prod[wi] &= (1ULL << off) - 1;
        pos = static_cast<int>(m_);
      }
      if (!chunk) continue;
      std::uint64_t cw[1] = {chunk};
      for (unsigned t : taps_) xor_shifted(prod, kW2 + 1, cw, 1, static_cast<unsigned>(pos - m_ + t));
    }
  }

  Fe r;
  std::memcpy(r.w.data(), prod, kW * sizeof(std::uint64_t));
  return r;
}

Fe Gf::mulp(const Fe& a, const Fe& b) const {
  std::uint64_t prod[2 * kFeWords] = {};
  for (std::size_t i = 0; i < words_; ++i) {
    if (!a.w[i]) continue;
    for (std::size_t j = 0; j < words_; ++j)
      prod[i + j] = (prod[i + j] + mulmod_u64(a.w[i], b.w[j], p_)) % p_;
  }
  // reduce by monic modulus: x^m = -modlow
  for (std::size_t d = 2 * words_ - 2 + 1; d-- > m_;) {
    std::uint64_t c = prod[d];
    if (!c) continue;
    prod[d] = 0;
    for (unsigned i = 0; i < m_; ++i) {
      std::uint64_t t = mulmod_u64(c, modlow_[i], p_);
      std::size_t idx = d - m_ + i;
      prod[idx] = (prod[idx] + p_ - t) % p_;
    }
  }
  Fe r;
  for (std::size_t i = 0; i < words_; ++i) r.w[i] = prod[i];
  return r;
}

Fe Gf::inv(const Fe& a, OpCount* ops) const {
  if (is_zero(a)) fail(Errc::DivisionByZero, "inverse of zero");
  if (ops) ops->inv++;
  return p_ == 2 ? inv2(a) : invp(a);
}

Fe Gf::inv2(const Fe& a) const {
  // Polynomial extended Euclid on (a, f) over GF(2).
  constexpr std::size_t NB = kW + 1;
  std::uint64_t u[NB] = {}, v[NB] = {}, g1[NB] = {}, g2[NB] = {};
  std::memcpy(u, a.w.data(), kW * sizeof(std::uint64_t));
  v[m_ / 64] |= 1ULL << (m_ % 64);
  for (unsigned t : taps_) v[t / 64] |= 1ULL << (t % 64);
  g1[0] = 1;

  int du = top_bit(u, NB), dv = top_bit(v, NB);
  while (du > 0) {
    if (du < dv) {
      std::swap_ranges(u, u + NB, v);
      std::swap_ranges(g1, g1 + NB, g2);
      std::swap(du, dv);
    }
    unsigned j = static_cast<unsigned>(du - dv);
    xor_shifted(u, NB, v, NB, j);
    xor_shifted(g1, NB, g2, NB, j);
    du = top_bit(u, NB);
  }
  // u == 1 now (gcd(a, f) = 1 since f irreducible and a nonzero)
  Fe r;
  std::memcpy(r.w.data(), g1, kW * sizeof(std::uint64_t));
  return r;
}

Fe Gf::invp(const Fe& a) const {
  // Extended Euclid over GF(p)[x] against the modulus.
  Poly u(words_), v(spec_.modulus.begin(), spec_.modulus.end());
  for (std::size_t i = 0; i < words_; ++i) u[i] = a.w[i];
  ptrim(u);
  Poly g1{1}, g2{};
  while (!(u.size() == 1)) {
    if (u.size() < v.size()) {
      std::swap(u, v);
      std::swap(g1, g2);
    }
    std::uint64_t c = mulmod_u64(u.back(), invmod_u64(v.back(), p_), p_);
    std::size_t off = u.size() - v.size();
    auto submul = [&](Poly& x, const Poly& y) {
      if (x.size() < y.size() + off) x.resize(y.size() + off, 0);
      for (std::size_t i = 0; i < y.size(); ++i) {
        std::uint64_t t = mulmod_u64(c, y[i], p_);
        x[off + i] = (x[off + i] + p_ - t) % p_;
      }
      ptrim(x);
    };
    submul(u, v);
    submul(g1, g2);
    if (u.empty()) fail(Errc::DivisionByZero, "element not invertible");
  }
  std::uint64_t s = invmod_u64(u[0], p_);
  Fe r;
  for (std::size_t i = 0; i < g1.size() && i < words_; ++i) r.w[i] = mulmod_u64(g1[i], s, p_);
  return r;
}

Fe Gf::pow(const Fe& a, std::uint64_t e, OpCount* ops) const {
  Fe r = one(), base = a;
  while (e) {
    if (e & 1) r = mul(r, base, ops);
    base = mul(base, base, ops);
    e >>= 1;
  }
  return r;
}

Fe Gf::from_uint(std::uint64_t v) const {
  Fe r;
  if (p_ == 2) {
    r.w[0] = v;
    if (m_ < 64) r.w[0] &= (1ULL << m_) - 1;
  } else {
    for (std::size_t i = 0; i < words_; ++i) {
      r.w[i] = v % p_;
      v /= p_;
    }
  }
  return r;
}

Fe Gf::random(Rng& rng) const {
  Fe r;
  if (p_ == 2) {
    for (std::size_t i = 0; i < words_; ++i) r.w[i] = rng.next();
    unsigned rem = m_ % 64;
    if (rem) r.w[words_ - 1] &= (1ULL << rem) - 1;
    for (std::size_t i = words_; i < kW; ++i) r.w[i] = 0;
  } else {
    for (std::size_t i = 0; i < words_; ++i) r.w[i] = rng.below(p_);
  }
  return r;
}

std::string Gf::to_hex(const Fe& a) const {
  std::string out(hex_width_, '0');
  if (p_ == 2) {
    for (unsigned d = 0; d < hex_width_; ++d) {
      unsigned bit = 4 * d;
      unsigned v = (a.w[bit / 64] >> (bit % 64)) & 0xF;
      if (bit % 64 > 60 && bit / 64 + 1 < kW) v |= (a.w[bit / 64 + 1] << (64 - bit % 64)) & 0xF;
      out[hex_width_ - 1 - d] = kHex[v];
    }
  } else {
    std::uint64_t v = 0;
    for (std::size_t i = words_; i-- > 0;) v = v * p_ + a.w[i];
    for (unsigned d = 0; d < hex_width_; ++d) {
      out[hex_width_ - 1 - d] = kHex[v & 0xF];
      v >>= 4;
    }
  }
  return out;
}

Fe Gf::from_hex(std::string_view s) const {
  if (s.empty() || s.size() > std::max<std::size_t>(hex_width_, 16))
    fail(Errc::ParseError, "bad hex element literal");
  Fe r;
  if (p_ == 2) {
    unsigned bit = 0;
    for (std::size_t i = s.size(); i-- > 0 && bit < 64 * kW;) {
      int v = hex_val(s[i]);
      if (v < 0) fail(Errc::ParseError, std::string("bad hex digit '") + s[i] + "'");
      for (int b = 0; b < 4; ++b, ++bit) {
        if (bit >= m_) {
          if ((v >> b) & 1) fail(Errc::ParseError, "hex element exceeds field degree");
          continue;
        }
        if ((v >> b) & 1) r.w[bit / 64] |= 1ULL << (bit % 64);
      }
    }
  } else {
    std::uint64_t v = 0;
    for (char c : s) {
      int h = hex_val(c);
      if (h < 0) fail(Errc::ParseError, std::string("bad hex digit '") + c + "'");
      if (v > (~0ULL >> 4)) fail(Errc::ParseError, "hex element out of range");
      v = (v << 4) | static_cast<unsigned>(h);
    }
    if (size_ && v >= size_) fail(Errc::ParseError, "hex element exceeds field size");
    for (std::size_t i = 0; i < words_; ++i) {
      r.w[i] = v % p_;
      v /= p_;
    }
  }
  return r;
}

Fe Gf::element_at(std::uint64_t index) const {
  Fe r;
  if (p_ == 2) {
    r.w[0] = index;
    for (std::size_t i = 1; i < words_ && i < kW; ++i) r.w[i] = 0;
  } else {
    for (std::size_t i = 0; i < words_; ++i) {
      r.w[i] = index % p_;
      index /= p_;
    }
  }
  return r;
}

FieldSpec default_example_field() {
  FieldSpec s;
  s.p = 2;
  s.m = 331;
  s.modulus.assign(332, 0);
  s.modulus[331] = 1;
  s.modulus[10] = 1;
  s.modulus[6] = 1;
  s.modulus[2] = 1;
  s.modulus[0] = 1;
  s.generator_hex = "2";
  return s;
}

FieldSpec gf2_61_field() {
  FieldSpec s;
  s.p = 2;
  s.m = 61;
  s.modulus.assign(62, 0);
  s.modulus[61] = 1;
  s.modulus[5] = 1;
  s.modulus[2] = 1;
  s.modulus[1] = 1;
  s.modulus[0] = 1;
  s.generator_hex = "2";
  return s;
}

}  // namespace isodec
