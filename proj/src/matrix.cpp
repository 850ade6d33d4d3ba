#include "isodec/matrix.hpp"

#include <algorithm>

namespace isodec {

Mat Mat::identity(const Gf& f, std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = f.one();
  return m;
}

bool Mat::is_zero() const {
  for (const Fe& x : e_)
    if (!(x == Fe{})) return false;
  return true;
}

Mat Mat::sub(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) fail(Errc::IndexError, "submatrix out of range");
  Mat out(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) out.at(r, c) = at(r0 + r, c0 + c);
  return out;
}

Mat mat_add(const Gf& f, const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(Errc::ShapeError, "mat_add shape mismatch");
  Mat out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out.at(r, c) = f.add(a.at(r, c), b.at(r, c));
  return out;
}

Mat mat_mul(const Gf& f, const Mat& a, const Mat& b, OpCount* ops) {
  if (a.cols() != b.rows()) fail(Errc::ShapeError, "mat_mul shape mismatch");
  Mat out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t t = 0; t < a.cols(); ++t) {
      const Fe& av = a.at(r, t);
      if (f.is_zero(av)) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) {
        if (f.is_zero(b.at(t, c))) continue;
        out.at(r, c) = f.add(out.at(r, c), f.mul(av, b.at(t, c), ops));
      }
    }
  return out;
}

Mat mat_vcat(const Mat& top, const Mat& bottom) {
  if (top.cols() != bottom.cols() && top.rows() != 0 && bottom.rows() != 0)
    fail(Errc::ShapeError, "mat_vcat width mismatch");
  std::size_t cols = top.rows() ? top.cols() : bottom.cols();
  Mat out(top.rows() + bottom.rows(), cols);
  for (std::size_t r = 0; r < top.rows(); ++r)
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = top.at(r, c);
  for (std::size_t r = 0; r < bottom.rows(); ++r)
    for (std::size_t c = 0; c < cols; ++c) out.at(top.rows() + r, c) = bottom.at(r, c);
  return out;
}

Mat mat_hcat(const Mat& left, const Mat& right) {
  if (left.rows() != right.rows() && left.cols() != 0 && right.cols() != 0)
    fail(Errc::ShapeError, "mat_hcat height mismatch");
  std::size_t rows = left.cols() ? left.rows() : right.rows();
  Mat out(rows, left.cols() + right.cols());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < left.cols(); ++c) out.at(r, c) = left.at(r, c);
    for (std::size_t c = 0; c < right.cols(); ++c) out.at(r, left.cols() + c) = right.at(r, c);
  }
  return out;
}

std::vector<Fe> mat_apply(const Gf& f, const Mat& a, std::span<const Fe> v, OpCount* ops) {
  if (a.cols() != v.size()) fail(Errc::ShapeError, "mat_apply shape mismatch");
  std::vector<Fe> out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    Fe acc{};
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (f.is_zero(a.at(r, c)) || f.is_zero(v[c])) continue;
      acc = f.add(acc, f.mul(a.at(r, c), v[c], ops));
    }
    out[r] = acc;
  }
  return out;
}

namespace {

// In-place RREF over the full width of m. Returns pivot columns.
std::vector<std::size_t> rref_inplace(const Gf& f, Mat& m, OpCount* ops) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && f.is_zero(m.at(p, c))) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(p, j), m.at(r, j));
    Fe piv_inv = f.inv(m.at(r, c), ops);
    for (std::size_t j = c; j < m.cols(); ++j)
      if (!f.is_zero(m.at(r, j))) m.at(r, j) = f.mul(piv_inv, m.at(r, j), ops);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || f.is_zero(m.at(i, c))) continue;
      Fe factor = m.at(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) {
        if (f.is_zero(m.at(r, j))) continue;
        m.at(i, j) = f.sub(m.at(i, j), f.mul(factor, m.at(r, j), ops));
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

RrefResult rref(const Gf& f, Mat m, OpCount* ops) {
  RrefResult out;
  out.pivots = rref_inplace(f, m, ops);
  out.rank = out.pivots.size();
  out.m = std::move(m);
  return out;
}

std::size_t rank_of(const Gf& f, const Mat& m, OpCount* ops) {
  Mat tmp = m;
  return rref_inplace(f, tmp, ops).size();
}

bool try_inverse(const Gf& f, const Mat& m, Mat& out, OpCount* ops) {
  if (m.rows() != m.cols()) fail(Errc::ShapeError, "inverse of non-square matrix");
  Mat aug = mat_hcat(m, Mat::identity(f, m.rows()));
  auto piv = rref_inplace(f, aug, ops);
  // nonsingular iff the pivots are exactly the left-block columns
  if (piv.size() < m.rows() || (m.rows() > 0 && piv[m.rows() - 1] != m.rows() - 1)) return false;
  out = aug.sub(0, m.cols(), m.rows(), m.cols());
  return true;
}

Mat inverse(const Gf& f, const Mat& m, OpCount* ops) {
  Mat out;
  if (!try_inverse(f, m, out, ops)) fail(Errc::ShapeError, "matrix is singular");
  return out;
}

SolveOutcome solve_determined(const Gf& f, const Mat& a, std::span<const Fe> b, OpCount* ops) {
  if (a.rows() != b.size()) fail(Errc::ShapeError, "solve_determined shape mismatch");
  OpCount local;
  Mat aug(a.rows(), a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) aug.at(r, c) = a.at(r, c);
    aug.at(r, a.cols()) = b[r];
  }
  auto pivots = rref_inplace(f, aug, &local);

  SolveOutcome out;
  out.mult_count = local.mul;
  out.status.assign(a.cols(), SolveOutcome::Var::Underdetermined);
  out.value.assign(a.cols(), Fe{});
  out.consistent = pivots.empty() || pivots.back() != a.cols();
  if (ops) *ops += local;
  if (!out.consistent) return out;

  for (std::size_t ri = 0; ri < pivots.size(); ++ri) {
    std::size_t c = pivots[ri];
    bool lone = true;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j != c && !f.is_zero(aug.at(ri, j))) {
        lone = false;
        break;
      }
    }
    if (lone) {
      out.status[c] = SolveOutcome::Var::Determined;
      out.value[c] = aug.at(ri, a.cols());
    }
  }
  return out;
}

std::vector<std::vector<Fe>> kernel_basis(const Gf& f, const Mat& m, OpCount* ops) {
  Mat red = m;
  auto pivots = rref_inplace(f, red, ops);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;

  std::vector<std::vector<Fe>> basis;
  for (std::size_t fc = 0; fc < m.cols(); ++fc) {
    if (is_pivot[fc]) continue;
    std::vector<Fe> v(m.cols());
    v[fc] = f.one();
    for (std::size_t ri = 0; ri < pivots.size(); ++ri) v[pivots[ri]] = f.neg(red.at(ri, fc));
    basis.push_back(std::move(v));
  }
  return basis;
}

Fe minor_det(const Gf& f, const Mat& m, std::span<const std::size_t> row_idx,
             std::span<const std::size_t> col_idx, OpCount* ops) {
  if (row_idx.size() != col_idx.size()) fail(Errc::IndexError, "minor index lists differ in size");
  auto check = [&](std::span<const std::size_t> idx, std::size_t bound) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= bound) fail(Errc::IndexError, "minor index out of range");
      if (i && idx[i] <= idx[i - 1]) fail(Errc::IndexError, "minor indices must be strictly increasing");
    }
  };
  check(row_idx, m.rows());
  check(col_idx, m.cols());

  Mat s(row_idx.size(), col_idx.size());
  for (std::size_t r = 0; r < row_idx.size(); ++r)
    for (std::size_t c = 0; c < col_idx.size(); ++c) s.at(r, c) = m.at(row_idx[r], col_idx[c]);
  return det(f, s, ops);
}

Fe det(const Gf& f, const Mat& m, OpCount* ops) {
  if (m.rows() != m.cols()) fail(Errc::ShapeError, "determinant of non-square matrix");
  std::size_t n = m.rows();
  if (n == 0) return f.one();
  Mat a = m;
  Fe d = f.one();
  bool negate = false;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && f.is_zero(a.at(p, c))) ++p;
    if (p == n) return Fe{};
    if (p != c) {
      for (std::size_t j = c; j < n; ++j) std::swap(a.at(p, j), a.at(c, j));
      negate = !negate;
    }
    d = f.mul(d, a.at(c, c), ops);
    Fe piv_inv = f.inv(a.at(c, c), ops);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (f.is_zero(a.at(i, c))) continue;
      Fe factor = f.mul(a.at(i, c), piv_inv, ops);
      for (std::size_t j = c; j < n; ++j) {
        if (f.is_zero(a.at(c, j))) continue;
        a.at(i, j) = f.sub(a.at(i, j), f.mul(factor, a.at(c, j), ops));
      }
    }
  }
  return negate ? f.neg(d) : d;
}

}  // namespace isodec
