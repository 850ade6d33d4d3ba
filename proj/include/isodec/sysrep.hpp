#pragma once

#include <cstdint>
#include <vector>

#include "isodec/convcode.hpp"
#include "isodec/matrix.hpp"

namespace isodec {

// Input-state-output representation (A,B,C,D): x_{t+1} = A x_t + B u_t,
// y_t = C x_t + D u_t, with u the last k and y the first n-k components of
// each code block. s = 0 is the memoryless case with D the sole carrier.
struct StateSpace {
  std::size_t n = 0, k = 0, s = 0;
  Mat A, B, C, D;
};

void validate_system(const StateSpace& sys);

struct Trajectory {
  std::vector<std::vector<Fe>> states;   // x_0..x_{T+1}
  std::vector<std::vector<Fe>> outputs;  // y_0..y_T
};

Trajectory simulate(const Gf& f, const StateSpace& sys, std::span<const Fe> x0,
                    const std::vector<std::vector<Fe>>& inputs, OpCount* ops = nullptr);

bool kalman_reachable(const Gf& f, const StateSpace& sys);
bool kalman_observable(const Gf& f, const StateSpace& sys);

// Zero-state trajectory check for a block sequence (y,u per block), with an
// optional terminal return-to-zero requirement for complete codewords.
bool membership_check(const Gf& f, const StateSpace& sys, const Blocks& blocks,
                      bool check_termination = true);

// Minimal (s = delta) realization in controller canonical form, built per
// column from the column degrees. Requires a column reduced generator whose
// constant u-block is invertible (the y-over-u transfer is then causal).
StateSpace realize(const Gf& f, const PolyGenerator& g);

// Polynomial kernel basis extraction: minimal-degree codeword sequences are
// grown degree by degree, keeping those independent of shifts of earlier
// picks. Degrees are capped at s+1 (Cayley-Hamilton makes s sufficient).
PolyGenerator generator_of(const Gf& f, const StateSpace& sys);

// Precomputed structural matrices for one decode session: powers of A, Markov
// blocks C A^t B, observability rows, input-stacking matrices R_l and the
// constant ell. Read-only after construction.
class StructuralCache {
 public:
  StructuralCache(const Gf& f, const StateSpace& sys, std::size_t t_max);

  std::size_t t_max() const { return t_max_; }
  const Mat& apow(std::size_t t) const { return apow_.at(t); }
  const Mat& markov(std::size_t t) const { return markov_.at(t); }  // C A^t B
  const Mat& obs_row(std::size_t t) const { return obs_.at(t); }    // C A^t
  Mat obs_stack(std::size_t j) const;                               // (C; CA; ..; CA^j)
  Mat f_matrix(std::size_t j) const;                                // F_j
  Mat reach(std::size_t l) const;                                   // R_l = [A^{l-1}B .. B]
  int ell() const { return ell_; }

  // E_w for a stream with blocks u_0..u_N: block (r, j) = C A^{N+r-j} B.
  Mat termination_matrix(std::size_t w, std::size_t last_block) const;

 private:
  const Gf* f_;
  const StateSpace* sys_;
  std::size_t t_max_;
  std::vector<Mat> apow_, markov_, obs_;
  int ell_ = -1;
};

// Superregularity certificate on F_L: every minor (all sizes) that is not
// trivially zero must be nonzero. delta is taken as s for reachable systems,
// else from the extracted generator.
bool is_mdp_system(const Gf& f, const StateSpace& sys, std::uint64_t budget = 1u << 22);

struct QualityReport {
  std::size_t T = 0, gamma = 0;
  int ell = -1;
  std::vector<bool> property1;  // index j-1 holds the verdict for F_j, j = 1..T
  std::vector<bool> property2;  // same for [obs stack | F_j]
  std::size_t e_subsets_tested = 0;
  std::size_t e_subsets_independent = 0;  // independent for some w <= delta-1
};

QualityReport quality_report(const Gf& f, const StateSpace& sys, std::size_t T, std::size_t gamma,
                             std::size_t sample_budget = 200, std::uint64_t seed = 1);

// The worked (5,3,2) construction: C and D from powers of the generator
// candidate a, then B = C^{-1}(CB) and A = C^{-1}(CA). Requires a field
// larger than 2^330 unless enforce_threshold is off (small-field variants are
// useful in tests but carry no superregularity guarantee).
StateSpace construct_example_532(const Gf& f, bool enforce_threshold = true);

}  // namespace isodec
