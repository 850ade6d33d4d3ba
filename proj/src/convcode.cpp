#include "isodec/convcode.hpp"

#include <algorithm>

#include "isodec/structured.hpp"

namespace isodec {

namespace {

// Polynomials over the working field, coefficients ascending.
using PolyF = std::vector<Fe>;

int pdeg(const Gf& f, const PolyF& p) {
  for (std::size_t i = p.size(); i-- > 0;)
    if (!f.is_zero(p[i])) return static_cast<int>(i);
  return -1;
}

PolyF padd(const Gf& f, const PolyF& a, const PolyF& b) {
  PolyF r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    Fe x = i < a.size() ? a[i] : Fe{};
    Fe y = i < b.size() ? b[i] : Fe{};
    r[i] = f.add(x, y);
  }
  return r;
}

PolyF pmul(const Gf& f, const PolyF& a, const PolyF& b) {
  if (a.empty() || b.empty()) return {};
  PolyF r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (f.is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (f.is_zero(b[j])) continue;
      r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
    }
  }
  return r;
}

PolyF pscale(const Gf& f, const PolyF& a, const Fe& c) {
  PolyF r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f.mul(a[i], c);
  return r;
}

PolyF pmod(const Gf& f, PolyF a, const PolyF& b) {
  int db = pdeg(f, b);
  int da = pdeg(f, a);
  Fe lead_inv = f.inv(b[static_cast<std::size_t>(db)]);
  while (da >= db) {
    Fe c = f.mul(a[static_cast<std::size_t>(da)], lead_inv);
    std::size_t off = static_cast<std::size_t>(da - db);
    for (int i = 0; i <= db; ++i) {
      std::size_t ai = off + static_cast<std::size_t>(i);
      a[ai] = f.sub(a[ai], f.mul(c, b[static_cast<std::size_t>(i)]));
    }
    da = pdeg(f, a);
  }
  return a;
}

PolyF pgcd(const Gf& f, PolyF a, PolyF b) {
  while (pdeg(f, b) >= 0) {
    PolyF r = pmod(f, std::move(a), b);
    a = std::move(b);
    b = std::move(r);
  }
  int d = pdeg(f, a);
  if (d >= 0) {
    Fe inv = f.inv(a[static_cast<std::size_t>(d)]);
    a = pscale(f, a, inv);
    a.resize(static_cast<std::size_t>(d) + 1);
  }
  return a;
}

// Determinant of a square matrix of polynomials by cofactor expansion.
PolyF polymat_det(const Gf& f, const std::vector<std::vector<PolyF>>& m) {
  std::size_t n = m.size();
  if (n == 0) return {f.one()};
  if (n == 1) return m[0][0];
  PolyF acc;
  for (std::size_t j = 0; j < n; ++j) {
    if (pdeg(f, m[0][j]) < 0) continue;
    std::vector<std::vector<PolyF>> sub(n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) sub[r - 1].push_back(m[r][c]);
    PolyF term = pmul(f, m[0][j], polymat_det(f, sub));
    if (j % 2 == 1) {
      for (Fe& x : term) x = f.neg(x);
    }
    acc = padd(f, acc, term);
  }
  return acc;
}

// Entry (r,c) of G(z) as a polynomial.
PolyF entry_poly(const Gf& f, const PolyGenerator& g, std::size_t r, std::size_t c) {
  PolyF p(g.mu + 1);
  for (std::size_t i = 0; i <= g.mu; ++i) p[i] = g.g[i].at(r, c);
  while (!p.empty() && f.is_zero(p.back())) p.pop_back();
  return p;
}

std::vector<PolyF> all_maximal_minors_poly(const Gf& f, const PolyGenerator& g) {
  if (g.k > 6) fail(Errc::FieldTooSmall, "polynomial minor expansion limited to k <= 6");
  std::vector<PolyF> out;
  std::vector<std::size_t> rows(g.k);
  for (std::size_t i = 0; i < g.k; ++i) rows[i] = i;
  do {
    std::vector<std::vector<PolyF>> sub(g.k, std::vector<PolyF>(g.k));
    for (std::size_t r = 0; r < g.k; ++r)
      for (std::size_t c = 0; c < g.k; ++c) sub[r][c] = entry_poly(f, g, rows[r], c);
    out.push_back(polymat_det(f, sub));
  } while (next_combination(rows, g.n));
  return out;
}

Mat eval_at(const Gf& f, const PolyGenerator& g, const Fe& x) {
  // Horner over matrix coefficients.
  Mat acc = g.g[g.mu];
  for (std::size_t i = g.mu; i-- > 0;) {
    Mat next(g.n, g.k);
    for (std::size_t r = 0; r < g.n; ++r)
      for (std::size_t c = 0; c < g.k; ++c)
        next.at(r, c) = f.add(f.mul(acc.at(r, c), x), g.g[i].at(r, c));
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

void validate_generator(const Gf& f, const PolyGenerator& g) {
  if (g.n == 0 || g.k == 0 || g.k > g.n) fail(Errc::ShapeError, "generator needs 1 <= k <= n");
  if (g.g.size() != g.mu + 1) fail(Errc::ShapeError, "coefficient count must be mu + 1");
  for (const Mat& gi : g.g)
    if (gi.rows() != g.n || gi.cols() != g.k) fail(Errc::ShapeError, "coefficient block shape mismatch");
  if (g.mu > 0 && g.g[g.mu].is_zero()) fail(Errc::ShapeError, "leading coefficient G_mu is zero");

  Mat stacked = g.g[0];
  for (std::size_t i = 1; i <= g.mu; ++i) stacked = mat_vcat(stacked, g.g[i]);
  if (rank_of(f, stacked) != g.k) fail(Errc::ShapeError, "stacked coefficients are column rank deficient");

  // A single full-rank evaluation certifies full column rank of G(z); over
  // tiny fields fall back to polynomial minors.
  Rng rng(0xC0DEC0DEULL);
  bool certified = false;
  for (std::size_t t = 0; t <= g.k && !certified; ++t)
    certified = rank_of(f, eval_at(f, g, f.random(rng))) == g.k;
  if (!certified) {
    for (const PolyF& m : all_maximal_minors_poly(f, g))
      if (pdeg(f, m) >= 0) {
        certified = true;
        break;
      }
  }
  if (!certified) fail(Errc::ShapeError, "G(z) is column rank deficient");
}

Blocks encode(const Gf& f, const PolyGenerator& g, const Blocks& message, OpCount* ops) {
  if (message.empty()) fail(Errc::EmptyMessage, "empty message");
  for (const auto& m : message)
    if (m.size() != g.k) fail(Errc::ShapeError, "message block size must be k");
  std::size_t gamma = message.size() - 1;
  Blocks out(gamma + g.mu + 1, std::vector<Fe>(g.n));
  for (std::size_t t = 0; t < out.size(); ++t) {
    for (std::size_t i = 0; i <= std::min(t, g.mu); ++i) {
      if (t - i > gamma) continue;
      auto contrib = mat_apply(f, g.g[i], message[t - i], ops);
      for (std::size_t r = 0; r < g.n; ++r) out[t][r] = f.add(out[t][r], contrib[r]);
    }
  }
  return out;
}

ColumnDegrees column_degrees_and_reduced(const Gf& f, const PolyGenerator& g) {
  ColumnDegrees out;
  out.degs.assign(g.k, 0);
  for (std::size_t c = 0; c < g.k; ++c) {
    for (std::size_t i = g.mu + 1; i-- > 0;) {
      bool nz = false;
      for (std::size_t r = 0; r < g.n; ++r) nz = nz || !f.is_zero(g.g[i].at(r, c));
      if (nz) {
        out.degs[c] = i;
        break;
      }
    }
  }
  Mat lead(g.n, g.k);
  for (std::size_t c = 0; c < g.k; ++c)
    for (std::size_t r = 0; r < g.n; ++r) lead.at(r, c) = g.g[out.degs[c]].at(r, c);
  out.reduced = rank_of(f, lead) == g.k;
  return out;
}

std::size_t code_degree(const Gf& f, const PolyGenerator& g) {
  auto cd = column_degrees_and_reduced(f, g);
  std::size_t dmax = 0;
  for (auto d : cd.degs) dmax += d;

  bool enough_points = f.size() == 0 || f.size() > dmax;
  if (enough_points) {
    // Evaluate all maximal minors at dmax+1 distinct points and interpolate.
    std::size_t npts = dmax + 1;
    std::vector<Fe> xs(npts);
    for (std::size_t t = 0; t < npts; ++t) xs[t] = f.element_at(t);
    std::vector<Mat> evals(npts);
    for (std::size_t t = 0; t < npts; ++t) evals[t] = eval_at(f, g, xs[t]);

    Mat vand(npts, npts);
    for (std::size_t r = 0; r < npts; ++r) {
      Fe acc = f.one();
      for (std::size_t c = 0; c < npts; ++c) {
        vand.at(r, c) = acc;
        acc = f.mul(acc, xs[r]);
      }
    }
    Mat vinv = inverse(f, vand);

    std::size_t best = 0;
    std::vector<std::size_t> rows(g.k);
    for (std::size_t i = 0; i < g.k; ++i) rows[i] = i;
    std::vector<std::size_t> cols(g.k);
    for (std::size_t i = 0; i < g.k; ++i) cols[i] = i;
    do {
      std::vector<Fe> vals(npts);
      for (std::size_t t = 0; t < npts; ++t) vals[t] = minor_det(f, evals[t], rows, cols);
      auto coeffs = mat_apply(f, vinv, vals);
      for (std::size_t d = npts; d-- > 0;) {
        if (!f.is_zero(coeffs[d])) {
          best = std::max(best, d);
          break;
        }
      }
    } while (next_combination(rows, g.n));
    return best;
  }

  std::size_t best = 0;
  for (const PolyF& m : all_maximal_minors_poly(f, g)) {
    int d = pdeg(f, m);
    if (d > static_cast<int>(best)) best = static_cast<std::size_t>(d);
  }
  return best;
}

bool is_noncatastrophic(const Gf& f, const PolyGenerator& g) {
  PolyF acc;
  for (const PolyF& m : all_maximal_minors_poly(f, g)) {
    if (pdeg(f, m) < 0) continue;
    acc = acc.empty() ? m : pgcd(f, acc, m);
    if (pdeg(f, acc) == 0) return true;
  }
  return !acc.empty() && pdeg(f, acc) == 0;
}

std::size_t column_distance_bruteforce(const Gf& f, const PolyGenerator& g, std::size_t j,
                                       std::uint64_t budget) {
  std::size_t nsym = g.k * (j + 1);
  if (f.size() == 0) fail(Errc::BudgetExceeded, "field too large for enumeration");
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < nsym; ++i) {
    if (total > budget / f.size()) fail(Errc::BudgetExceeded, "column distance enumeration budget");
    total *= f.size();
  }

  std::vector<std::uint64_t> idx(nsym, 0);
  std::size_t best = SIZE_MAX;
  std::vector<std::vector<Fe>> msg(j + 1, std::vector<Fe>(g.k));
  for (std::uint64_t count = 0; count < total; ++count) {
    if (count > 0) {
      std::size_t pos = 0;
      while (pos < nsym && ++idx[pos] == f.size()) idx[pos++] = 0;
    }
    bool m0_zero = true;
    for (std::size_t i = 0; i < g.k; ++i) m0_zero = m0_zero && idx[i] == 0;
    if (m0_zero) continue;
    for (std::size_t t = 0; t <= j; ++t)
      for (std::size_t i = 0; i < g.k; ++i) msg[t][i] = f.element_at(idx[t * g.k + i]);

    std::size_t w = 0;
    for (std::size_t t = 0; t <= j && w < best; ++t) {
      std::vector<Fe> blk(g.n);
      for (std::size_t i = 0; i <= std::min(t, g.mu); ++i) {
        auto contrib = mat_apply(f, g.g[i], msg[t - i]);
        for (std::size_t r = 0; r < g.n; ++r) blk[r] = f.add(blk[r], contrib[r]);
      }
      for (const Fe& x : blk)
        if (!f.is_zero(x)) ++w;
    }
    best = std::min(best, w);
  }
  return best;
}

Mat sliding_generator(const Gf& f, const PolyGenerator& g, std::size_t j) {
  Mat out((j + 1) * g.n, (j + 1) * g.k);
  for (std::size_t br = 0; br <= j; ++br)
    for (std::size_t bc = 0; bc <= br; ++bc) {
      std::size_t i = br - bc;
      if (i > g.mu) continue;
      for (std::size_t r = 0; r < g.n; ++r)
        for (std::size_t c = 0; c < g.k; ++c) out.at(br * g.n + r, bc * g.k + c) = g.g[i].at(r, c);
    }
  (void)f;
  return out;
}

bool mdp_check_minors(const Gf& f, const PolyGenerator& g, std::uint64_t budget) {
  if (g.k >= g.n) fail(Errc::ShapeError, "MDP criteria need k < n");
  auto cd = column_degrees_and_reduced(f, g);
  if (!cd.reduced) fail(Errc::NotReduced, "MDP minor criterion requires a column reduced generator");
  std::size_t delta = code_degree(f, g);
  std::size_t L = mdp_window_L(g.n, g.k, delta);

  Mat actual = sliding_generator(f, g, L);
  std::size_t rows = (L + 1) * g.n, cols = (L + 1) * g.k;

  // number of full-size minors = C(rows, cols)
  {
    long double cnt = 1;
    for (std::size_t i = 0; i < cols; ++i) cnt = cnt * static_cast<long double>(rows - i) / static_cast<long double>(i + 1);
    if (cnt > static_cast<long double>(budget)) fail(Errc::BudgetExceeded, "minor enumeration budget");
  }

  StructuredMatrix pattern(rows, cols);
  for (std::size_t br = 0; br <= L; ++br)
    for (std::size_t bc = 0; bc <= br; ++bc) {
      std::size_t i = br - bc;
      if (i > g.mu) continue;
      pattern.place(static_cast<int>(i), br * g.n, bc * g.k, g.n, g.k);
    }
  const Gf& cls = classifier_field();
  auto instances = pattern.random_instances(8, 0x5EED5EEDULL, cls);

  std::vector<std::size_t> rsel(cols);
  for (std::size_t i = 0; i < cols; ++i) rsel[i] = i;
  std::vector<std::size_t> csel(cols);
  for (std::size_t i = 0; i < cols; ++i) csel[i] = i;
  do {
    if (StructuredMatrix::minor_trivially_zero(cls, instances, rsel, csel)) continue;
    if (f.is_zero(minor_det(f, actual, rsel, csel))) return false;
  } while (next_combination(rsel, rows));
  return true;
}

CodeProfile profile(const Gf& f, const PolyGenerator& g, std::uint64_t minor_budget) {
  CodeProfile p;
  p.n = g.n;
  p.k = g.k;
  auto cd = column_degrees_and_reduced(f, g);
  p.column_degrees = cd.degs;
  p.column_reduced = cd.reduced;
  p.delta = code_degree(f, g);
  p.noncatastrophic = is_noncatastrophic(f, g);
  if (g.k < g.n) {
    p.L = mdp_window_L(g.n, g.k, p.delta);
    p.mdp = cd.reduced && mdp_check_minors(f, g, minor_budget);
  }
  return p;
}

std::optional<PolyGenerator> search_mdp_generator(const Gf& f, std::size_t n, std::size_t k,
                                                  std::size_t delta, std::uint64_t seed,
                                                  std::size_t max_tries) {
  Rng rng(seed);
  std::vector<std::size_t> degs(k);
  for (std::size_t j = 0; j < k; ++j) degs[j] = delta / k + (j < delta % k ? 1 : 0);
  std::size_t mu = 0;
  for (auto d : degs) mu = std::max(mu, d);

  for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
    PolyGenerator g;
    g.n = n;
    g.k = k;
    g.mu = mu;
    g.g.assign(mu + 1, Mat(n, k));
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t i = 0; i <= degs[c]; ++i)
        for (std::size_t r = 0; r < n; ++r) g.g[i].at(r, c) = f.random(rng);

    auto cd = column_degrees_and_reduced(f, g);
    if (cd.degs != degs || !cd.reduced) continue;
    try {
      validate_generator(f, g);
      if (mdp_check_minors(f, g)) return g;
    } catch (const Error&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace isodec
