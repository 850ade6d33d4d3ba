#include "isodec/structured.hpp"

namespace isodec {

const Gf& classifier_field() {
  static const Gf f{Gf(gf2_61_field())};
  return f;
}

void StructuredMatrix::place(int block_id, std::size_t r0, std::size_t c0, std::size_t brows,
                             std::size_t bcols) {
  if (r0 + brows > rows_ || c0 + bcols > cols_) fail(Errc::IndexError, "block placement out of range");
  placements_.push_back({block_id, r0, c0, brows, bcols});
  if (block_id > max_id_) max_id_ = block_id;
}

Mat StructuredMatrix::assemble(const std::vector<Mat>& blocks) const {
  Mat out(rows_, cols_);
  for (const auto& p : placements_) {
    const Mat& b = blocks[static_cast<std::size_t>(p.id)];
    if (b.rows() != p.brows || b.cols() != p.bcols) fail(Errc::ShapeError, "block shape mismatch");
    for (std::size_t r = 0; r < p.brows; ++r)
      for (std::size_t c = 0; c < p.bcols; ++c) out.at(p.r0 + r, p.c0 + c) = b.at(r, c);
  }
  return out;
}

std::vector<Mat> StructuredMatrix::random_instances(std::size_t reps, std::uint64_t seed,
                                                    const Gf& cls) const {
  std::vector<Mat> out;
  Rng rng(seed);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::vector<Mat> blocks(static_cast<std::size_t>(max_id_) + 1);
    // shapes from the first placement of each id
    for (const auto& p : placements_) {
      auto& b = blocks[static_cast<std::size_t>(p.id)];
      if (b.rows() == 0 && b.cols() == 0) b = Mat(p.brows, p.bcols);
    }
    for (auto& b : blocks)
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) b.at(r, c) = cls.random(rng);
    out.push_back(assemble(blocks));
  }
  return out;
}

bool StructuredMatrix::minor_trivially_zero(const Gf& cls, const std::vector<Mat>& instances,
                                            std::span<const std::size_t> rows,
                                            std::span<const std::size_t> cols) {
  for (const Mat& inst : instances) {
    if (!cls.is_zero(minor_det(cls, inst, rows, cols))) return false;
  }
  return true;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  std::size_t k = idx.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i-- > 0) {
    if (idx[i] + (k - i) < n) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace isodec
