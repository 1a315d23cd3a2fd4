#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace streamcode::gf {

/// A field element of GF(2^m), m <= 16, stored in the low m bits.
using Element = std::uint16_t;

/// GF(2^m) with log/antilog tables built once at construction.
///
/// The reduction polynomial is fixed per degree so that every table, and
/// therefore every generated code and trace, is reproducible bit for bit:
/// m = 8 uses x^8 + x^4 + x^3 + x + 1 and m = 16 uses
/// x^16 + x^12 + x^3 + x + 1. Other degrees in [2, 16] use a standard
/// primitive polynomial.
class Field
{
public:
  explicit Field(unsigned degree = 16);

  unsigned degree() const noexcept { return degree_; }
  std::uint32_t size() const noexcept { return std::uint32_t{1} << degree_; }
  std::uint32_t polynomial() const noexcept { return polynomial_; }
  Element mask() const noexcept { return static_cast<Element>(size() - 1); }
  /// Smallest element whose powers enumerate the multiplicative group.
  Element generator() const noexcept { return generator_; }

  static Element add(Element a, Element b) noexcept { return a ^ b; }

  Element mul(Element a, Element b) const noexcept
  {
    if (a == 0 || b == 0) {
      return 0;
    }
    return exp_[log_[a] + log_[b]];
  }

  /// Throws std::domain_error for a == 0.
  Element inv(Element a) const;
  Element div(Element a, Element b) const;
  Element pow(Element a, std::uint64_t e) const;

  /// Discrete log base generator(); a must be nonzero.
  std::uint32_t log(Element a) const noexcept { return log_[a]; }
  /// generator()^i for i < 2 (2^m - 1).
  Element exp(std::uint32_t i) const noexcept { return exp_[i]; }

  bool contains(std::uint32_t value) const noexcept { return value < size(); }

  /// Default polynomial used for a degree (including the x^8 / x^16 choices).
  static std::uint32_t default_polynomial(unsigned degree);

private:
  unsigned degree_;
  std::uint32_t polynomial_;
  Element generator_ = 0;
  std::vector<Element> exp_;
  std::vector<std::uint32_t> log_;
};

/// Carry-less shift-and-reduce product, independent of the tables.
Element slow_mul(Element a, Element b, unsigned degree, std::uint32_t polynomial) noexcept;

/// Dense row-major matrix over a field.
class FieldMatrix
{
public:
  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  FieldMatrix(std::size_t rows, std::size_t cols, std::vector<Element> data);

  static FieldMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Element& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  Element operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<Element> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const Element> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  const std::vector<Element>& data() const noexcept { return data_; }

  bool is_zero() const noexcept;

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Element> data_;
};

FieldMatrix multiply(const Field& field, const FieldMatrix& a, const FieldMatrix& b);

/// Row vector times matrix: returns x * M.
std::vector<Element> multiply(const Field& field, std::span<const Element> x, const FieldMatrix& m);

/// Matrix times column vector: returns M * x.
std::vector<Element> apply(const Field& field, const FieldMatrix& m, std::span<const Element> x);

/// Row rank by Gaussian elimination (pivot: first row with a nonzero entry,
/// columns scanned left to right).
std::size_t rank(const Field& field, FieldMatrix m);

/// Pivot columns of the column-ordered echelon form. The number of pivots
/// among the first c columns equals the rank of those c columns.
std::vector<std::size_t> pivot_columns(const Field& field, FieldMatrix m);

struct Solution
{
  std::vector<Element> x;
  bool unique = false;
};

/// Solves A x = b. Returns nullopt when inconsistent; otherwise a solution
/// with free variables set to zero, and unique = true iff A has full column
/// rank.
std::optional<Solution> solve(const Field& field, FieldMatrix a, std::vector<Element> b);

/// Matrix with entries from a counter-based generator keyed by seed.
FieldMatrix seeded_random_matrix(const Field& field, std::size_t rows, std::size_t cols, std::uint64_t seed);

} // namespace streamcode::gf
