#include "isodec/sysrep.hpp"

#include <algorithm>
#include <cmath>

#include "isodec/structured.hpp"

namespace isodec {

void validate_system(const StateSpace& sys) {
  if (sys.k == 0 || sys.k >= sys.n) fail(Errc::ShapeError, "system needs 1 <= k < n");
  std::size_t p = sys.n - sys.k;
  if (sys.A.rows() != sys.s || sys.A.cols() != sys.s) fail(Errc::ShapeError, "A must be s x s");
  if (sys.B.rows() != sys.s || sys.B.cols() != sys.k) fail(Errc::ShapeError, "B must be s x k");
  if (sys.C.rows() != p || sys.C.cols() != sys.s) fail(Errc::ShapeError, "C must be (n-k) x s");
  if (sys.D.rows() != p || sys.D.cols() != sys.k) fail(Errc::ShapeError, "D must be (n-k) x k");
}

Trajectory simulate(const Gf& f, const StateSpace& sys, std::span<const Fe> x0,
                    const std::vector<std::vector<Fe>>& inputs, OpCount* ops) {
  if (x0.size() != sys.s) fail(Errc::ShapeError, "x0 must have s components");
  Trajectory tr;
  std::vector<Fe> x(x0.begin(), x0.end());
  tr.states.push_back(x);
  for (const auto& u : inputs) {
    if (u.size() != sys.k) fail(Errc::ShapeError, "input block must have k components");
    auto cx = mat_apply(f, sys.C, x, ops);
    auto du = mat_apply(f, sys.D, u, ops);
    for (std::size_t i = 0; i < cx.size(); ++i) cx[i] = f.add(cx[i], du[i]);
    tr.outputs.push_back(std::move(cx));
    auto ax = mat_apply(f, sys.A, x, ops);
    auto bu = mat_apply(f, sys.B, u, ops);
    for (std::size_t i = 0; i < ax.size(); ++i) ax[i] = f.add(ax[i], bu[i]);
    x = std::move(ax);
    tr.states.push_back(x);
  }
  return tr;
}

namespace {

Mat reach_matrix(const Gf& f, const StateSpace& sys, std::size_t l) {
  // [A^{l-1}B ... B]
  Mat out(sys.s, l * sys.k);
  Mat pw = Mat::identity(f, sys.s);
  for (std::size_t t = 0; t < l; ++t) {
    // column block for u index (l-1-t) is A^t B
    Mat blk = mat_mul(f, pw, sys.B);
    std::size_t bc = (l - 1 - t) * sys.k;
    for (std::size_t r = 0; r < sys.s; ++r)
      for (std::size_t c = 0; c < sys.k; ++c) out.at(r, bc + c) = blk.at(r, c);
    if (t + 1 < l) pw = mat_mul(f, pw, sys.A);
  }
  return out;
}

}  // namespace

bool kalman_reachable(const Gf& f, const StateSpace& sys) {
  if (sys.s == 0) return true;
  return rank_of(f, reach_matrix(f, sys, sys.s)) == sys.s;
}

bool kalman_observable(const Gf& f, const StateSpace& sys) {
  if (sys.s == 0) return true;
  Mat stack(0, sys.s);
  Mat row = sys.C;
  for (std::size_t t = 0; t < sys.s; ++t) {
    stack = mat_vcat(stack, row);
    if (t + 1 < sys.s) row = mat_mul(f, row, sys.A);
  }
  return rank_of(f, stack) == sys.s;
}

bool membership_check(const Gf& f, const StateSpace& sys, const Blocks& blocks,
                      bool check_termination) {
  std::vector<Fe> x(sys.s);
  for (const auto& blk : blocks) {
    if (blk.size() != sys.n) fail(Errc::ShapeError, "block size must be n");
    std::span<const Fe> y(blk.data(), sys.n - sys.k);
    std::span<const Fe> u(blk.data() + (sys.n - sys.k), sys.k);
    auto yexp = mat_apply(f, sys.C, x);
    auto du = mat_apply(f, sys.D, u);
    for (std::size_t i = 0; i < yexp.size(); ++i) {
      if (!(f.add(yexp[i], du[i]) == y[i])) return false;
    }
    auto ax = mat_apply(f, sys.A, x);
    auto bu = mat_apply(f, sys.B, u);
    for (std::size_t i = 0; i < sys.s; ++i) x[i] = f.add(ax[i], bu[i]);
  }
  if (check_termination) {
    // The word extends by zeros, so the residual state must die out through
    // ker(A) while staying invisible to C. Observable systems reduce this to
    // x = 0 at the end.
    for (std::size_t m = 0; m <= sys.s; ++m) {
      bool zero = true;
      for (const Fe& xi : x) zero = zero && f.is_zero(xi);
      if (zero) return true;
      for (const Fe& yi : mat_apply(f, sys.C, x))
        if (!f.is_zero(yi)) return false;
      x = mat_apply(f, sys.A, x);
    }
    return false;
  }
  return true;
}

StateSpace realize(const Gf& f, const PolyGenerator& g) {
  validate_generator(f, g);
  auto cd = column_degrees_and_reduced(f, g);
  if (!cd.reduced) fail(Errc::NotReduced, "realization requires a column reduced generator");
  std::size_t p = g.n - g.k;
  if (g.k >= g.n) fail(Errc::ShapeError, "realization needs k < n");

  Mat u0 = g.g[0].sub(p, 0, g.k, g.k);
  Mat u0i;
  if (!try_inverse(f, u0, u0i))
    fail(Errc::NotRealizable, "constant u-block is singular; y-over-u transfer is not causal");

  std::size_t s = 0;
  for (auto d : cd.degs) s += d;

  // State layout: for each column j with degree d_j >= 1, a chain of d_j
  // phase variables; the reversed-coefficient matrices drive the top rows.
  std::vector<std::size_t> base(g.k, 0);
  {
    std::size_t acc = 0;
    for (std::size_t j = 0; j < g.k; ++j) {
      base[j] = acc;
      acc += cd.degs[j];
    }
  }

  // Low-order coefficient selectors of the reversed column polynomials:
  // column (j, r) of U_low / Y_low is the coefficient block G_{d_j - r}[., j].
  Mat u_low(g.k, s), y_low(p, s);
  for (std::size_t j = 0; j < g.k; ++j)
    for (std::size_t r = 0; r < cd.degs[j]; ++r) {
      const Mat& gi = g.g[cd.degs[j] - r];
      for (std::size_t row = 0; row < g.k; ++row) u_low.at(row, base[j] + r) = gi.at(p + row, j);
      for (std::size_t row = 0; row < p; ++row) y_low.at(row, base[j] + r) = gi.at(row, j);
    }

  StateSpace sys;
  sys.n = g.n;
  sys.k = g.k;
  sys.s = s;
  sys.D = mat_mul(f, g.g[0].sub(0, 0, p, g.k), u0i);
  sys.A = Mat(s, s);
  sys.B = Mat(s, g.k);
  Mat ubar = mat_mul(f, u0i, u_low);  // k x s
  for (std::size_t j = 0; j < g.k; ++j) {
    std::size_t d = cd.degs[j];
    if (d == 0) continue;
    for (std::size_t r = 0; r + 1 < d; ++r) sys.A.at(base[j] + r, base[j] + r + 1) = f.one();
    std::size_t top = base[j] + d - 1;
    for (std::size_t c = 0; c < s; ++c) sys.A.at(top, c) = f.neg(ubar.at(j, c));
    for (std::size_t c = 0; c < g.k; ++c) sys.B.at(top, c) = u0i.at(j, c);
  }
  // C = Y_low - D U_low
  Mat du = mat_mul(f, sys.D, u_low);
  sys.C = Mat(p, s);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < s; ++c) sys.C.at(r, c) = f.sub(y_low.at(r, c), du.at(r, c));
  return sys;
}

PolyGenerator generator_of(const Gf& f, const StateSpace& sys) {
  validate_system(sys);

  // Flattened u-coefficient shift span of the picks. A pick's stored degree
  // is the true word degree: on non-observable systems the state may return
  // to zero later than the last nonzero (y,u) block, so the raw kernel level
  // can overshoot and is trimmed after simulation.
  struct Pick {
    std::size_t deg;
    std::vector<std::vector<Fe>> u;     // u_0..u_deg
    std::vector<std::vector<Fe>> word;  // full blocks (y,u)_0..deg
  };
  std::vector<Pick> picks;
  const std::size_t p = sys.n - sys.k;

  for (std::size_t d = 0; d <= sys.s + 1 && picks.size() < sys.k; ++d) {
    // Degree-d codeword inputs: kernel of [A^d B ... B].
    Mat rhat(sys.s, (d + 1) * sys.k);
    Mat pw = Mat::identity(f, sys.s);
    for (std::size_t t = d + 1; t-- > 0;) {
      Mat blk = mat_mul(f, pw, sys.B);  // A^{d-t} B for u_t
      for (std::size_t r = 0; r < sys.s; ++r)
        for (std::size_t c = 0; c < sys.k; ++c) rhat.at(r, t * sys.k + c) = blk.at(r, c);
      pw = mat_mul(f, pw, sys.A);
    }
    auto kb = kernel_basis(f, rhat);

    // Span of shifts of existing picks inside degree d.
    std::size_t width = (d + 1) * sys.k;
    std::vector<std::vector<Fe>> span_rows;
    for (const Pick& pk : picks)
      for (std::size_t sh = 0; sh + pk.deg <= d; ++sh) {
        std::vector<Fe> row(width);
        for (std::size_t t = 0; t <= pk.deg; ++t)
          for (std::size_t c = 0; c < sys.k; ++c) row[(sh + t) * sys.k + c] = pk.u[t][c];
        span_rows.push_back(std::move(row));
      }
    auto rank_with = [&](const std::vector<std::vector<Fe>>& rows) {
      Mat m(rows.size(), width);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < width; ++c) m.at(r, c) = rows[r][c];
      return rank_of(f, m);
    };
    std::size_t cur = rank_with(span_rows);
    for (const auto& v : kb) {
      if (picks.size() == sys.k) break;
      span_rows.push_back(v);
      std::size_t nr = rank_with(span_rows);
      if (nr == cur) {
        span_rows.pop_back();
        continue;
      }
      cur = nr;
      Pick pk;
      pk.u.assign(d + 1, std::vector<Fe>(sys.k));
      for (std::size_t t = 0; t <= d; ++t)
        for (std::size_t c = 0; c < sys.k; ++c) pk.u[t][c] = v[t * sys.k + c];
      auto tr = simulate(f, sys, std::vector<Fe>(sys.s), pk.u);
      std::size_t deg = 0;
      pk.word.assign(d + 1, std::vector<Fe>(sys.n));
      for (std::size_t t = 0; t <= d; ++t) {
        bool nz = false;
        for (std::size_t r = 0; r < p; ++r) {
          pk.word[t][r] = tr.outputs[t][r];
          nz = nz || !f.is_zero(tr.outputs[t][r]);
        }
        for (std::size_t r = 0; r < sys.k; ++r) {
          pk.word[t][p + r] = pk.u[t][r];
          nz = nz || !f.is_zero(pk.u[t][r]);
        }
        if (nz) deg = t;
      }
      pk.deg = deg;
      pk.u.resize(deg + 1);
      pk.word.resize(deg + 1);
      picks.push_back(std::move(pk));
    }
  }
  if (picks.size() != sys.k)
    fail(Errc::DegreeBound, "kernel basis incomplete within the degree bound");

  std::size_t mu = 0;
  for (const Pick& pk : picks) mu = std::max(mu, pk.deg);

  PolyGenerator g;
  g.n = sys.n;
  g.k = sys.k;
  g.mu = mu;
  g.g.assign(mu + 1, Mat(sys.n, sys.k));
  for (std::size_t j = 0; j < sys.k; ++j) {
    const Pick& pk = picks[j];
    for (std::size_t t = 0; t <= pk.deg; ++t)
      for (std::size_t r = 0; r < sys.n; ++r) g.g[t].at(r, j) = pk.word[t][r];
  }
  validate_generator(f, g);
  return g;
}

StructuralCache::StructuralCache(const Gf& f, const StateSpace& sys, std::size_t t_max)
    : f_(&f), sys_(&sys), t_max_(t_max) {
  validate_system(sys);
  apow_.reserve(t_max + 1);
  apow_.push_back(Mat::identity(f, sys.s));
  for (std::size_t t = 1; t <= t_max; ++t) apow_.push_back(mat_mul(f, apow_.back(), sys.A));
  markov_.reserve(t_max + 1);
  obs_.reserve(t_max + 1);
  for (std::size_t t = 0; t <= t_max; ++t) {
    Mat ca = mat_mul(f, sys.C, apow_[t]);
    markov_.push_back(mat_mul(f, ca, sys.B));
    obs_.push_back(std::move(ca));
  }
  // ell = max l with R_l of full column rank; -1 when B itself is deficient
  if (sys.k <= sys.s && rank_of(f, sys.B) == sys.k) {
    std::size_t l = 1;
    while ((l + 1) * sys.k <= sys.s && rank_of(f, reach_matrix(f, sys, l + 1)) == (l + 1) * sys.k) ++l;
    ell_ = static_cast<int>(l);
  }
}

Mat StructuralCache::obs_stack(std::size_t j) const {
  std::size_t p = sys_->n - sys_->k;
  Mat out((j + 1) * p, sys_->s);
  for (std::size_t t = 0; t <= j; ++t)
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < sys_->s; ++c) out.at(t * p + r, c) = obs_.at(t).at(r, c);
  return out;
}

Mat StructuralCache::f_matrix(std::size_t j) const {
  std::size_t p = sys_->n - sys_->k, k = sys_->k;
  Mat out((j + 1) * p, (j + 1) * k);
  for (std::size_t br = 0; br <= j; ++br)
    for (std::size_t bc = 0; bc <= br; ++bc) {
      const Mat& blk = br == bc ? sys_->D : markov_.at(br - bc - 1);
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < k; ++c) out.at(br * p + r, bc * k + c) = blk.at(r, c);
    }
  return out;
}

Mat StructuralCache::reach(std::size_t l) const { return reach_matrix(*f_, *sys_, l); }

Mat StructuralCache::termination_matrix(std::size_t w, std::size_t last_block) const {
  std::size_t p = sys_->n - sys_->k, k = sys_->k;
  Mat out((w + 1) * p, (last_block + 1) * k);
  for (std::size_t r = 0; r <= w; ++r)
    for (std::size_t j = 0; j <= last_block; ++j) {
      const Mat& blk = markov_.at(last_block + r - j);
      for (std::size_t rr = 0; rr < p; ++rr)
        for (std::size_t cc = 0; cc < k; ++cc) out.at(r * p + rr, j * k + cc) = blk.at(rr, cc);
    }
  return out;
}

namespace {

// All-size nontrivial-minor certificate over a block pattern.
bool superregular_check(const Gf& f, const Mat& actual, const StructuredMatrix& pattern,
                        std::uint64_t budget) {
  const Gf& cls = classifier_field();
  auto instances = pattern.random_instances(8, 0x5EED5EEDULL, cls);
  std::size_t maxsz = std::min(actual.rows(), actual.cols());
  std::uint64_t tested = 0;
  for (std::size_t sz = 1; sz <= maxsz; ++sz) {
    std::vector<std::size_t> rsel(sz), csel(sz);
    for (std::size_t i = 0; i < sz; ++i) rsel[i] = i;
    do {
      for (std::size_t i = 0; i < sz; ++i) csel[i] = i;
      do {
        if (++tested > budget) fail(Errc::BudgetExceeded, "minor enumeration budget");
        if (StructuredMatrix::minor_trivially_zero(cls, instances, rsel, csel)) continue;
        if (f.is_zero(minor_det(f, actual, rsel, csel))) return false;
      } while (next_combination(csel, actual.cols()));
    } while (next_combination(rsel, actual.rows()));
  }
  return true;
}

// Pattern of F_j: D on the diagonal repeats, markov block t on subdiagonal
// t+1. Block ids: 0 = D, t+1 = C A^t B.
StructuredMatrix f_pattern(const StateSpace& sys, std::size_t j) {
  std::size_t p = sys.n - sys.k, k = sys.k;
  StructuredMatrix pat((j + 1) * p, (j + 1) * k);
  for (std::size_t br = 0; br <= j; ++br)
    for (std::size_t bc = 0; bc <= br; ++bc)
      pat.place(br == bc ? 0 : static_cast<int>(br - bc), br * p, bc * k, p, k);
  return pat;
}

}  // namespace

bool is_mdp_system(const Gf& f, const StateSpace& sys, std::uint64_t budget) {
  validate_system(sys);
  std::size_t delta = kalman_reachable(f, sys) ? sys.s : code_degree(f, generator_of(f, sys));
  std::size_t L = mdp_window_L(sys.n, sys.k, delta);
  StructuralCache cache(f, sys, L == 0 ? 1 : L);
  Mat fl = cache.f_matrix(L);

  StructuredMatrix pat = f_pattern(sys, L);
  return superregular_check(f, fl, pat, budget);
}

QualityReport quality_report(const Gf& f, const StateSpace& sys, std::size_t T, std::size_t gamma,
                             std::size_t sample_budget, std::uint64_t seed) {
  validate_system(sys);
  QualityReport rep;
  rep.T = T;
  rep.gamma = gamma;
  std::size_t delta = kalman_reachable(f, sys) ? sys.s : code_degree(f, generator_of(f, sys));
  std::size_t p = sys.n - sys.k;

  StructuralCache cache(f, sys, T + gamma + sys.s + 2);
  rep.ell = cache.ell();

  for (std::size_t j = 1; j <= T; ++j) {
    Mat fj = cache.f_matrix(j);
    rep.property1.push_back(superregular_check(f, fj, f_pattern(sys, j), 1u << 22));

    // [obs stack | F_j] with obs rows as their own free blocks.
    Mat combined = mat_hcat(cache.obs_stack(j), fj);
    StructuredMatrix pat((j + 1) * p, sys.s + (j + 1) * sys.k);
    int next_id = static_cast<int>(j) + 1;  // ids 0..j are D and markov blocks
    for (std::size_t t = 0; t <= j; ++t) pat.place(next_id + static_cast<int>(t), t * p, 0, p, sys.s);
    for (std::size_t br = 0; br <= j; ++br)
      for (std::size_t bc = 0; bc <= br; ++bc)
        pat.place(br == bc ? 0 : static_cast<int>(br - bc), br * p, sys.s + bc * sys.k, p, sys.k);
    rep.property2.push_back(superregular_check(f, combined, pat, 1u << 22));
  }

  // Property 3: sampled column subsets of E that become independent for some
  // w <= delta-1.
  if (delta >= 1) {
    std::size_t last = gamma + sys.s;  // generator degree bounded by s
    std::size_t cols = (last + 1) * sys.k;
    std::size_t max_take = std::min(cols, delta * p);
    Rng rng(seed);
    for (std::size_t trial = 0; trial < sample_budget; ++trial) {
      std::size_t take = 1 + rng.below(max_take);
      std::vector<std::size_t> sel;
      while (sel.size() < take) {
        std::size_t c = rng.below(cols);
        if (std::find(sel.begin(), sel.end(), c) == sel.end()) sel.push_back(c);
      }
      std::sort(sel.begin(), sel.end());
      rep.e_subsets_tested++;
      for (std::size_t w = 0; w < delta; ++w) {
        Mat ew = cache.termination_matrix(w, last);
        Mat sub(ew.rows(), take);
        for (std::size_t r = 0; r < ew.rows(); ++r)
          for (std::size_t c = 0; c < take; ++c) sub.at(r, c) = ew.at(r, sel[c]);
        if (rank_of(f, sub) == take) {
          rep.e_subsets_independent++;
          break;
        }
      }
    }
  }
  return rep;
}

StateSpace construct_example_532(const Gf& f, bool enforce_threshold) {
  if (enforce_threshold) {
    long double bits = static_cast<long double>(f.degree());
    if (f.characteristic() != 2) {
      // log2(p^m) = m log2 p
      bits = f.degree() * std::log2l(static_cast<long double>(f.characteristic()));
    }
    if (bits <= 330.0L) fail(Errc::DegenerateField, "example construction needs a field larger than 2^330");
  }
  Fe a = f.generator();
  auto ap = [&](std::uint64_t e) { return f.pow(a, e); };
  if (ap(8) == f.one()) fail(Errc::DegenerateField, "generator candidate satisfies a^8 = 1");

  StateSpace sys;
  sys.n = 5;
  sys.k = 3;
  sys.s = 2;
  sys.C = Mat(2, 2);
  sys.C.at(0, 0) = ap(8);
  sys.C.at(0, 1) = ap(16);
  sys.C.at(1, 0) = ap(16);
  sys.C.at(1, 1) = ap(32);
  sys.D = Mat(2, 3);
  sys.D.at(0, 0) = ap(1);
  sys.D.at(0, 1) = ap(2);
  sys.D.at(0, 2) = ap(4);
  sys.D.at(1, 0) = ap(2);
  sys.D.at(1, 1) = ap(4);
  sys.D.at(1, 2) = ap(8);
  Mat ca(2, 2), cb(2, 3);
  ca.at(0, 0) = ap(64);
  ca.at(0, 1) = ap(128);
  ca.at(1, 0) = ap(128);
  ca.at(1, 1) = ap(256);
  cb.at(0, 0) = ap(8);
  cb.at(0, 1) = ap(16);
  cb.at(0, 2) = ap(32);
  cb.at(1, 0) = ap(16);
  cb.at(1, 1) = ap(32);
  cb.at(1, 2) = ap(64);
  Mat cinv;
  if (!try_inverse(f, sys.C, cinv)) fail(Errc::DegenerateField, "C is singular in this field");
  sys.B = mat_mul(f, cinv, cb);
  sys.A = mat_mul(f, cinv, ca);
  return sys;
}

}  // namespace isodec
