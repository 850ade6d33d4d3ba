#pragma once

#include <cstdint>
#include <vector>

#include "isodec/matrix.hpp"

namespace isodec {

// Block-structured matrix pattern for classifying minors as trivially zero.
// A minor is trivially zero when it vanishes for every choice of the free
// blocks; operationally the same minor is re-evaluated on instances whose free
// blocks are uniform random matrices over GF(2^61) (repeated placements of one
// block id stay tied), and an all-zero result across the repetitions
// classifies it as trivial. Schwartz-Zippel keeps the misclassification
// probability below 2^-50 at the sizes that occur here.
class StructuredMatrix {
 public:
  StructuredMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void place(int block_id, std::size_t r0, std::size_t c0, std::size_t brows, std::size_t bcols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  // Assemble the actual matrix from per-id blocks (index = block id).
  Mat assemble(const std::vector<Mat>& blocks) const;

  // Random instances over the classifier field, deterministic under seed.
  std::vector<Mat> random_instances(std::size_t reps, std::uint64_t seed, const Gf& cls) const;

  static bool minor_trivially_zero(const Gf& cls, const std::vector<Mat>& instances,
                                   std::span<const std::size_t> rows, std::span<const std::size_t> cols);

 private:
  struct Placement {
    int id;
    std::size_t r0, c0, brows, bcols;
  };
  std::size_t rows_, cols_;
  std::vector<Placement> placements_;
  int max_id_ = -1;
};

// Shared classifier field accessor (GF(2^61)).
const Gf& classifier_field();

// Lexicographic k-combinations of {0..n-1}. Initialize idx to {0,1,..,k-1};
// returns false when exhausted.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n);

}  // namespace isodec
