#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class NotOrthonormal : public Error {
 public:
  using Error::Error;
};

/// A subsampled basis has lost column rank, so the least-squares
/// completion is not unique. Usually means the sample count d is too small.
class RankDeficient : public Error {
 public:
  RankDeficient(std::size_t rows, std::size_t cols, std::size_t rank)
      : Error("rank-deficient subsampled basis: " + std::to_string(rows) +
              "x" + std::to_string(cols) + " has numerical rank " +
              std::to_string(rank) + " < " + std::to_string(cols) +
              " (sample count " + std::to_string(rows) + " too small)"),
        rows_(rows),
        cols_(cols),
        rank_(rank) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t rank() const noexcept { return rank_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t rank_;
};

class CombinatorialBudgetExceeded : public Error {
 public:
  explicit CombinatorialBudgetExceeded(std::size_t cap)
      : Error("sparse support search exceeded the combination cap of " +
              std::to_string(cap)),
        cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace lmc
