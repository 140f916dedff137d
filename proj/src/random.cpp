#include "lmc/random.hpp"

#include <numeric>
#include <utility>

#include "lmc/errors.hpp"

namespace lmc {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(base);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

IndexSet sample_with_replacement(std::size_t m, std::size_t d, Rng& rng) {
  if (m == 0) throw Error("cannot sample from an empty range");
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  IndexSet out{std::vector<std::size_t>(d), true};
  for (auto& idx : out.indices) idx = pick(rng);
  return out;
}

IndexSet sample_without_replacement(std::size_t m, std::size_t d, Rng& rng) {
  if (d > m) throw Error("cannot draw more distinct indices than rows");
  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < d; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(d);
  return IndexSet{std::move(pool), false};
}

IndexSet sample_bernoulli(std::size_t n, double p, Rng& rng) {
  std::bernoulli_distribution keep(p);
  IndexSet out{{}, false};
  for (std::size_t i = 0; i < n; ++i) {
    if (keep(rng)) out.indices.push_back(i);
  }
  return out;
}

Vector gaussian_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

Vector random_unit_vector(std::size_t n, Rng& rng) {
  for (;;) {
    Vector v = gaussian_vector(n, rng);
    const double nrm = norm2(v);
    if (nrm > 0.0) {
      for (double& x : v) x /= nrm;
      return v;
    }
  }
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> data(rows * cols);
  for (double& x : data) x = normal(rng);
  return DenseMatrix(rows, cols, std::move(data));
}

}  // namespace lmc
