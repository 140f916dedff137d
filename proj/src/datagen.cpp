#include "lmc/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lmc/errors.hpp"
#include "lmc/linalg.hpp"
#include "lmc/random.hpp"

namespace lmc {

namespace {

// Streams drawn from one instance seed.
enum Stream : std::uint64_t { kFactors = 1, kPermutation = 2, kNoise = 3 };

std::string fmt_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void normalize_columns(DenseMatrix& a) {
  for (std::size_t j = 0; j < a.cols(); ++j) {
    Vector col = a.column(j);
    const double nrm = norm2(col);
    if (nrm == 0.0) continue;
    for (double& x : col) x /= nrm;
    a.set_column(j, col);
  }
}

}  // namespace

NoiseSpec NoiseSpec::bounded(double eps) {
  NoiseSpec s;
  s.kind = Kind::Bounded;
  s.eps = eps;
  return s;
}

NoiseSpec NoiseSpec::sparse_columns(std::size_t s0,
                                    std::vector<std::size_t> positions) {
  NoiseSpec s;
  s.kind = Kind::SparseColumns;
  s.s0 = s0;
  s.positions = std::move(positions);
  return s;
}

NoiseSpec NoiseSpec::additive_matrix(DenseMatrix e) {
  NoiseSpec s;
  s.kind = Kind::Additive;
  s.additive = std::move(e);
  return s;
}

Instance gen_gaussian_lowrank(std::size_t m, std::size_t n, std::size_t r,
                              std::uint64_t seed) {
  if (r < 1 || r > std::min(m, n)) {
    throw ConfigError("gen_gaussian_lowrank: need 1 <= r <= min(m, n)");
  }
  Rng rng(derive_seed(seed, {kFactors}));
  Instance inst;
  for (;;) {
    const DenseMatrix x = gaussian_matrix(m, r, rng);
    const DenseMatrix y = gaussian_matrix(r, n, rng);
    inst.L = multiply(x, y);
    normalize_columns(inst.L);
    if (numerical_rank(inst.L) == r) {
      inst.U_true = orthonormalize(x);
      break;
    }
  }
  inst.M = inst.L;
  inst.rank = r;
  inst.generator = "gaussian";
  inst.parameters = {{"m", std::to_string(m)},
                     {"n", std::to_string(n)},
                     {"r", std::to_string(r)}};
  inst.seed = seed;
  return inst;
}

Instance gen_cumulative(std::size_t m, std::uint64_t seed) {
  constexpr std::size_t kBases = 5;
  constexpr std::size_t kWidths[kBases] = {200, 200, 200, 200, 1200};
  if (m < kBases) throw ConfigError("gen_cumulative: need m >= 5");
  Rng rng(derive_seed(seed, {kFactors}));
  const DenseMatrix u = gaussian_matrix(m, kBases, rng);

  std::size_t n = 0;
  for (std::size_t w : kWidths) n += w;
  Instance inst;
  inst.L = DenseMatrix(m, n);
  Vector partial(m, 0.0);
  std::size_t col = 0;
  for (std::size_t b = 0; b < kBases; ++b) {
    for (std::size_t i = 0; i < m; ++i) partial[i] += u(i, b);
    Vector unit = partial;
    const double nrm = norm2(unit);
    for (double& x : unit) x /= nrm;
    for (std::size_t c = 0; c < kWidths[b]; ++c) inst.L.set_column(col++, unit);
  }
  inst.M = inst.L;
  inst.U_true = orthonormalize(u);
  inst.rank = kBases;
  inst.generator = "cumulative";
  inst.parameters = {{"m", std::to_string(m)}, {"n", std::to_string(n)}};
  inst.seed = seed;
  return inst;
}

Instance gen_mixture(std::size_t m, std::size_t per_subspace, std::size_t h,
                     std::size_t tau, std::uint64_t seed) {
  if (h < 1 || tau < 1 || h * tau > m) {
    throw ConfigError("gen_mixture: need h, tau >= 1 and h * tau <= m");
  }
  if (per_subspace < 1) throw ConfigError("gen_mixture: per_subspace >= 1");
  Rng rng(derive_seed(seed, {kFactors}));
  DenseMatrix frame;
  do {
    frame = orthonormalize(gaussian_matrix(m, h * tau, rng));
  } while (frame.cols() != h * tau);

  const std::size_t n = h * per_subspace;
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  Rng shuffle_rng(derive_seed(seed, {kPermutation}));
  for (std::size_t j = n; j > 1; --j) {
    std::uniform_int_distribution<std::size_t> pick(0, j - 1);
    std::swap(order[j - 1], order[pick(shuffle_rng)]);
  }

  Instance inst;
  inst.L = DenseMatrix(m, n);
  inst.membership.resize(n);
  for (std::size_t s = 0; s < h; ++s) {
    for (std::size_t c = 0; c < per_subspace; ++c) {
      const Vector g = gaussian_vector(tau, rng);
      Vector col(m, 0.0);
      for (std::size_t a = 0; a < tau; ++a) {
        for (std::size_t i = 0; i < m; ++i) col[i] += g[a] * frame(i, s * tau + a);
      }
      const double nrm = norm2(col);
      for (double& x : col) x /= nrm;
      const std::size_t pos = order[s * per_subspace + c];
      inst.L.set_column(pos, col);
      inst.membership[pos] = s;
    }
  }
  inst.M = inst.L;
  inst.U_true = frame;
  inst.rank = h * tau;
  inst.generator = "mixture";
  inst.parameters = {{"m", std::to_string(m)},
                     {"per_subspace", std::to_string(per_subspace)},
                     {"h", std::to_string(h)},
                     {"tau", std::to_string(tau)}};
  inst.seed = seed;
  return inst;
}

DenseMatrix lower_bound_basis(std::size_t m, double mu0, std::size_t r) {
  if (r < 1 || !(mu0 > 0.0)) {
    throw ConfigError("lower_bound: need r >= 1 and mu0 > 0");
  }
  const double raw = static_cast<double>(m) / (mu0 * static_cast<double>(r));
  const auto ell = static_cast<std::size_t>(std::floor(raw));
  if (ell == 0) {
    throw ConfigError("lower_bound: block size floor(m / (mu0 r)) is 0");
  }
  const double entry = std::sqrt(1.0 / static_cast<double>(ell));
  DenseMatrix u(m, r);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t i = k * ell; i < (k + 1) * ell; ++i) u.set(i, k, entry);
  }
  return u;
}

Instance gen_lower_bound(std::size_t m, double mu0, std::size_t r,
                         const std::vector<double>& b_values,
                         std::uint64_t seed) {
  if (b_values.size() != r) {
    throw ConfigError("gen_lower_bound: need exactly r b-values");
  }
  const DenseMatrix u = lower_bound_basis(m, mu0, r);
  const auto ell = static_cast<std::size_t>(
      std::floor(static_cast<double>(m) / (mu0 * static_cast<double>(r))));
  Instance inst;
  inst.L = DenseMatrix(m, m);
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < r; ++k) {
    if (b_values[k] == 0.0) continue;
    active.push_back(k);
    for (std::size_t i = 0; i < m; ++i) {
      if (u(i, k) == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (u(j, k) == 0.0) continue;
        // u_i u_j = 1 / ell inside the block; divide directly so the entry
        // is exact rather than a product of two rounded square roots.
        inst.L.set(i, j, b_values[k] / static_cast<double>(ell));
      }
    }
  }
  inst.M = inst.L;
  inst.U_true = u.select_columns(active);
  inst.rank = active.size();
  inst.generator = "lower_bound";
  std::ostringstream mu;
  mu << mu0;
  inst.parameters = {{"m", std::to_string(m)},
                     {"mu0", mu.str()},
                     {"r", std::to_string(r)}};
  inst.seed = seed;
  return inst;
}

Instance apply_noise(const Instance& inst, const NoiseSpec& spec,
                     std::uint64_t seed) {
  Instance out = inst;
  out.M = inst.L;
  out.noise_support.clear();
  const std::size_t m = inst.L.rows();
  const std::size_t n = inst.L.cols();
  Rng rng(derive_seed(seed, {kNoise}));

  switch (spec.kind) {
    case NoiseSpec::Kind::None:
      break;
    case NoiseSpec::Kind::Bounded: {
      if (!(spec.eps >= 0.0)) throw ConfigError("bounded noise: eps < 0");
      for (std::size_t j = 0; j < n; ++j) {
        const Vector dir = random_unit_vector(m, rng);
        Vector col = inst.L.column(j);
        for (std::size_t i = 0; i < m; ++i) col[i] += spec.eps * dir[i];
        out.M.set_column(j, col);
      }
      break;
    }
    case NoiseSpec::Kind::SparseColumns: {
      if (spec.s0 > n) {
        throw ConfigError("sparse noise: s0=" + std::to_string(spec.s0) +
                          " exceeds column count " + std::to_string(n));
      }
      std::vector<std::size_t> pos = spec.positions;
      if (pos.empty()) {
        pos = sample_without_replacement(n, spec.s0, rng).indices;
      } else if (pos.size() != spec.s0) {
        throw ConfigError("sparse noise: positions list length != s0");
      }
      std::sort(pos.begin(), pos.end());
      if (std::adjacent_find(pos.begin(), pos.end()) != pos.end() ||
          (!pos.empty() && pos.back() >= n)) {
        throw ConfigError("sparse noise: positions must be distinct and < n");
      }
      for (std::size_t j : pos) out.M.set_column(j, random_unit_vector(m, rng));
      out.noise_support = std::move(pos);
      break;
    }
    case NoiseSpec::Kind::Additive: {
      if (!spec.additive || spec.additive->rows() != m ||
          spec.additive->cols() != n) {
        throw ConfigError("additive noise: matrix shape differs from L");
      }
      out.M = DenseMatrix(m, n);
      for (std::size_t j = 0; j < n; ++j) {
        Vector col = inst.L.column(j);
        for (std::size_t i = 0; i < m; ++i) col[i] += (*spec.additive)(i, j);
        out.M.set_column(j, col);
      }
      break;
    }
  }
  return out;
}

std::string format_matrix(const DenseMatrix& a) {
  std::string out = std::to_string(a.rows()) + " " + std::to_string(a.cols());
  out += '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j > 0) out += ' ';
      out += fmt_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

DenseMatrix parse_matrix(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  // Tokens of one line as (1-based column, text) pairs.
  auto tokenize = [](const std::string& line) {
    std::vector<std::pair<std::size_t, std::string>> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      const std::size_t b = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      toks.emplace_back(b + 1, line.substr(b, i - b));
    }
    return toks;
  };

  if (lines.empty()) throw ParseError("empty matrix file", 1, 1);
  const auto header = tokenize(lines[0]);
  if (header.size() != 2) {
    throw ParseError("header must be \"rows cols\"", 1, 1);
  }
  std::size_t dims[2] = {0, 0};
  for (int h = 0; h < 2; ++h) {
    const std::string& tok = header[h].second;
    const auto res =
        std::from_chars(tok.data(), tok.data() + tok.size(), dims[h]);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ParseError("bad dimension '" + tok + "'", 1, header[h].first);
    }
  }
  const std::size_t rows = dims[0];
  const std::size_t cols = dims[1];
  std::vector<double> data;
  data.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t lineno = r + 2;
    if (r + 1 >= lines.size()) {
      throw ParseError("missing row " + std::to_string(r + 1), lineno, 1);
    }
    const auto toks = tokenize(lines[r + 1]);
    if (toks.size() != cols) {
      const std::size_t at = toks.size() > cols ? toks[cols].first
                                                : lines[r + 1].size() + 1;
      throw ParseError("row has " + std::to_string(toks.size()) +
                           " entries, expected " + std::to_string(cols),
                       lineno, at);
    }
    for (const auto& [col, tok] : toks) {
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() ||
          !std::isfinite(v)) {
        throw ParseError("bad number '" + tok + "'", lineno, col);
      }
      data.push_back(v);
    }
  }
  for (std::size_t extra = rows + 1; extra < lines.size(); ++extra) {
    if (!tokenize(lines[extra]).empty()) {
      throw ParseError("unexpected content after last row", extra + 1, 1);
    }
  }
  return DenseMatrix(rows, cols, std::move(data));
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << format_matrix(a);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str());
}

}  // namespace lmc
