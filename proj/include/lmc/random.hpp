#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "lmc/matrix.hpp"

namespace lmc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a base seed and a path of
/// indices (cell, trial, purpose, ...). Pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> path) noexcept;

IndexSet sample_with_replacement(std::size_t m, std::size_t d, Rng& rng);
IndexSet sample_without_replacement(std::size_t m, std::size_t d, Rng& rng);
/// Each of [0, n) kept independently with probability p.
IndexSet sample_bernoulli(std::size_t n, double p, Rng& rng);

Vector gaussian_vector(std::size_t n, Rng& rng);
/// Uniform direction on the unit sphere of R^n.
Vector random_unit_vector(std::size_t n, Rng& rng);
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace lmc
