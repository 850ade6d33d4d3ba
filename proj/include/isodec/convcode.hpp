#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "isodec/matrix.hpp"

namespace isodec {

// Polynomial generator matrix G(z) of an (n,k) convolutional code, stored as
// the coefficient list G_0..G_mu in ascending time index: block t of an
// encoded word is sum_i G_i m_{t-i}.
struct PolyGenerator {
  std::size_t n = 0, k = 0, mu = 0;
  std::vector<Mat> g;  // g[i] is n x k

  const Mat& coeff(std::size_t i) const { return g[i]; }
};

// Structural validation: G_mu nonzero unless mu = 0, and full column rank of
// the stacked coefficient matrix plus generic-evaluation rank checks.
void validate_generator(const Gf& f, const PolyGenerator& g);

using Blocks = std::vector<std::vector<Fe>>;

// v_t = sum_{i<=min(t,mu)} G_i m_{t-i} for t = 0..(gamma+mu); the first n-k
// components of each block are the y-part, the last k the u-part.
Blocks encode(const Gf& f, const PolyGenerator& g, const Blocks& message, OpCount* ops = nullptr);

struct ColumnDegrees {
  std::vector<std::size_t> degs;
  bool reduced = false;
};
ColumnDegrees column_degrees_and_reduced(const Gf& f, const PolyGenerator& g);

// Highest degree of the k x k minors of G(z); evaluation-interpolation when
// the field has enough points, cofactor expansion over F[z] otherwise.
std::size_t code_degree(const Gf& f, const PolyGenerator& g);

// gcd of all k x k minors is a nonzero constant.
bool is_noncatastrophic(const Gf& f, const PolyGenerator& g);

inline std::size_t mdp_window_L(std::size_t n, std::size_t k, std::size_t delta) {
  return delta / k + delta / (n - k);
}

// Minimum accumulated weight of blocks v_0..v_j over all messages with
// m_0 != 0. Enumerates |F|^(k(j+1)) truncated messages.
std::size_t column_distance_bruteforce(const Gf& f, const PolyGenerator& g, std::size_t j,
                                       std::uint64_t budget = 1u << 22);

// Full-size minor criterion on the sliding matrix G^c_L: true iff every minor
// that is not trivially zero (classified by randomized structural testing) is
// nonzero.
bool mdp_check_minors(const Gf& f, const PolyGenerator& g, std::uint64_t budget = 1u << 22);

// Sliding block lower-triangular Toeplitz matrix with blocks G_0..G_j
// (zero beyond mu): (j+1)n rows, (j+1)k columns.
Mat sliding_generator(const Gf& f, const PolyGenerator& g, std::size_t j);

struct CodeProfile {
  std::size_t n = 0, k = 0, delta = 0, L = 0;
  std::vector<std::size_t> column_degrees;
  bool column_reduced = false;
  bool noncatastrophic = false;
  bool mdp = false;
};

CodeProfile profile(const Gf& f, const PolyGenerator& g, std::uint64_t minor_budget = 1u << 22);

// Random search for a column-reduced MDP generator with the given parameters;
// deterministic under seed. Returns nullopt when the attempt budget runs out.
std::optional<PolyGenerator> search_mdp_generator(const Gf& f, std::size_t n, std::size_t k,
                                                  std::size_t delta, std::uint64_t seed,
                                                  std::size_t max_tries = 2000);

}  // namespace isodec
