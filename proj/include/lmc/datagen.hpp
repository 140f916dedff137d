#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmc/matrix.hpp"

namespace lmc {

/// Corruption applied to a clean instance.
struct NoiseSpec {
  enum class Kind { None, Bounded, SparseColumns, Additive };

  Kind kind = Kind::None;
  double eps = 0.0;                      // Bounded: exact per-column l2 size
  std::size_t s0 = 0;                    // SparseColumns: count
  std::vector<std::size_t> positions;    // SparseColumns: empty means random
  std::optional<DenseMatrix> additive;   // Additive: user-supplied E

  static NoiseSpec none() { return {}; }
  static NoiseSpec bounded(double eps);
  static NoiseSpec sparse_columns(std::size_t s0,
                                  std::vector<std::size_t> positions = {});
  /// Extension hook for externally synthesized (e.g. adversarial) noise.
  static NoiseSpec additive_matrix(DenseMatrix e);
};

struct Instance {
  DenseMatrix L;  // clean matrix
  DenseMatrix M;  // observation
  std::vector<std::size_t> noise_support;
  DenseMatrix U_true;  // orthonormal basis of range(L)
  std::size_t rank = 0;
  std::string generator;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  /// Subspace index per column (mixture instances only).
  std::vector<std::size_t> membership;
};

/// L = normalize_columns(X Y), X (m x r) and Y (r x n) standard normal.
Instance gen_gaussian_lowrank(std::size_t m, std::size_t n, std::size_t r,
                              std::uint64_t seed);

/// Five N(0,1) base vectors u_1..u_5; column blocks of widths
/// 200,200,200,200,1200 equal to normalized partial sums u_1 + ... + u_j.
Instance gen_cumulative(std::size_t m, std::uint64_t seed);

/// h independent tau-dimensional subspaces cut from one orthonormalized
/// m x (h tau) Gaussian frame; per_subspace unit columns from each, in a
/// random interleaved order.
Instance gen_mixture(std::size_t m, std::size_t per_subspace, std::size_t h,
                     std::size_t tau, std::uint64_t seed);

/// l = floor(m / (mu0 r)) and u_k the normalized indicator of rows
/// [k l, (k+1) l).
DenseMatrix lower_bound_basis(std::size_t m, double mu0, std::size_t r);

/// Block-diagonal L = sum_k b_k u_k u_k^T (an m x m matrix). Columns are not
/// normalized.
Instance gen_lower_bound(std::size_t m, double mu0, std::size_t r,
                         const std::vector<double>& b_values,
                         std::uint64_t seed);

/// Returns a copy of `inst` whose M carries the requested corruption.
Instance apply_noise(const Instance& inst, const NoiseSpec& spec,
                     std::uint64_t seed);

/// Text format: "rows cols" on the first line, then one line per row of
/// space-separated literals with 17 significant digits.
void save_matrix(const std::filesystem::path& path, const DenseMatrix& a);
DenseMatrix load_matrix(const std::filesystem::path& path);
std::string format_matrix(const DenseMatrix& a);
DenseMatrix parse_matrix(const std::string& text);

}  // namespace lmc
