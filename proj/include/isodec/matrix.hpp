#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isodec/field.hpp"

namespace isodec {

// Dense matrix over one field. Shapes with zero rows or columns are valid and
// behave as the usual empty products.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

  static Mat identity(const Gf& f, std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Fe& at(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
  const Fe& at(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }

  bool is_zero() const;
  Mat sub(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Fe> e_;
};

Mat mat_add(const Gf& f, const Mat& a, const Mat& b);
Mat mat_mul(const Gf& f, const Mat& a, const Mat& b, OpCount* ops = nullptr);
Mat mat_vcat(const Mat& top, const Mat& bottom);
Mat mat_hcat(const Mat& left, const Mat& right);
std::vector<Fe> mat_apply(const Gf& f, const Mat& a, std::span<const Fe> v, OpCount* ops = nullptr);

struct RrefResult {
  Mat m;
  std::vector<std::size_t> pivots;  // pivot columns, increasing
  std::size_t rank = 0;
};

// Reduced row echelon form with partial pivoting by first nonzero entry,
// ties broken by lowest row index.
RrefResult rref(const Gf& f, Mat m, OpCount* ops = nullptr);

std::size_t rank_of(const Gf& f, const Mat& m, OpCount* ops = nullptr);

// Inverse of a square matrix; the bool overload reports singularity, the
// throwing overload treats it as a ShapeError.
bool try_inverse(const Gf& f, const Mat& m, Mat& out, OpCount* ops = nullptr);
Mat inverse(const Gf& f, const Mat& m, OpCount* ops = nullptr);

struct SolveOutcome {
  enum class Var : unsigned char { Determined, Underdetermined };
  bool consistent = true;
  std::vector<Var> status;  // one per unknown
  std::vector<Fe> value;    // valid where status == Determined
  std::uint64_t mult_count = 0;

  bool all_determined() const {
    for (auto s : status)
      if (s != Var::Determined) return false;
    return true;
  }
};

// Ax = b with per-unknown resolution: unknown j is Determined exactly when the
// j-th unit row vector lies in the row space of A, i.e. its value is constant
// across every solution. Inconsistent systems report no determined unknowns.
SolveOutcome solve_determined(const Gf& f, const Mat& a, std::span<const Fe> b, OpCount* ops = nullptr);

// Basis of the right kernel of m (each column of the result is one basis
// vector), from the free columns of the RREF.
std::vector<std::vector<Fe>> kernel_basis(const Gf& f, const Mat& m, OpCount* ops = nullptr);

// Determinant of the square submatrix selected by strictly increasing index
// lists; pivoted elimination with sign tracking.
Fe minor_det(const Gf& f, const Mat& m, std::span<const std::size_t> row_idx,
             std::span<const std::size_t> col_idx, OpCount* ops = nullptr);

Fe det(const Gf& f, const Mat& m, OpCount* ops = nullptr);

}  // namespace isodec
