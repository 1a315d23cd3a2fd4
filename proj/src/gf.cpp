#include "streamcode/gf.hpp"

#include "streamcode/errors.hpp"
#include "streamcode/rng.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace streamcode::gf {

namespace {

// Primitive polynomials for the degrees without a fixed choice.
constexpr std::uint32_t k_polynomials[17] = {
  0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11B, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
};

std::uint32_t multiplicative_order(Element g, unsigned degree, std::uint32_t polynomial)
{
  const std::uint32_t group = (std::uint32_t{1} << degree) - 1;
  Element x = g;
  for (std::uint32_t k = 1; k <= group; ++k) {
    if (x == 1) {
      return k;
    }
    x = slow_mul(x, g, degree, polynomial);
  }
  return 0;
}

} // namespace

Element slow_mul(Element a, Element b, unsigned degree, std::uint32_t polynomial) noexcept
{
  std::uint32_t acc = 0;
  std::uint32_t x = a;
  const std::uint32_t top = std::uint32_t{1} << degree;
  for (std::uint32_t y = b; y != 0; y >>= 1) {
    if (y & 1U) {
      acc ^= x;
    }
    x <<= 1;
    if (x & top) {
      x ^= polynomial;
    }
  }
  return static_cast<Element>(acc);
}

std::uint32_t Field::default_polynomial(unsigned degree)
{
  if (degree < 2 || degree > 16) {
    throw ParameterError("field degree must be in [2, 16], got " + std::to_string(degree));
  }
  return k_polynomials[degree];
}

Field::Field(unsigned degree) : degree_(degree), polynomial_(default_polynomial(degree))
{
  const std::uint32_t group = size() - 1;

  // x^8 + x^4 + x^3 + x + 1 is irreducible but not primitive, so search for
  // the smallest generator instead of assuming x.
  for (std::uint32_t g = 2; g < size(); ++g) {
    if (multiplicative_order(static_cast<Element>(g), degree_, polynomial_) == group) {
      generator_ = static_cast<Element>(g);
      break;
    }
  }
  if (generator_ == 0) {
    throw ParameterError("reduction polynomial has no primitive element");
  }

  exp_.resize(2 * static_cast<std::size_t>(group));
  log_.assign(size(), 0);
  Element x = 1;
  for (std::uint32_t i = 0; i < group; ++i) {
    exp_[i] = x;
    exp_[i + group] = x;
    log_[x] = i;
    x = slow_mul(x, generator_, degree_, polynomial_);
  }
}

Element Field::inv(Element a) const
{
  if (a == 0) {
    throw std::domain_error("inverse of zero");
  }
  const std::uint32_t group = size() - 1;
  return exp_[(group - log_[a]) % group];
}

Element Field::div(Element a, Element b) const
{
  if (b == 0) {
    throw std::domain_error("division by zero");
  }
  if (a == 0) {
    return 0;
  }
  const std::uint32_t group = size() - 1;
  return exp_[log_[a] + group - log_[b]];
}

Element Field::pow(Element a, std::uint64_t e) const
{
  if (e == 0) {
    return 1;
  }
  if (a == 0) {
    return 0;
  }
  const std::uint64_t group = size() - 1;
  return exp_[static_cast<std::uint32_t>((log_[a] * (e % group)) % group)];
}

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols, std::vector<Element> data)
  : rows_(rows), cols_(cols), data_(std::move(data))
{
  if (data_.size() != rows_ * cols_) {
    throw ParameterError("matrix data length does not match its shape");
  }
}

FieldMatrix FieldMatrix::identity(std::size_t n)
{
  FieldMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1;
  }
  return m;
}

bool FieldMatrix::is_zero() const noexcept
{
  return std::all_of(data_.begin(), data_.end(), [](Element e) { return e == 0; });
}

FieldMatrix multiply(const Field& field, const FieldMatrix& a, const FieldMatrix& b)
{
  if (a.cols() != b.rows()) {
    throw ParameterError("matrix shapes do not compose");
  }
  FieldMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const Element x = a(i, l);
      if (x == 0) {
        continue;
      }
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) ^= field.mul(x, b(l, j));
      }
    }
  }
  return out;
}

std::vector<Element> multiply(const Field& field, std::span<const Element> x, const FieldMatrix& m)
{
  if (x.size() != m.rows()) {
    throw ParameterError("vector length does not match matrix rows");
  }
  std::vector<Element> out(m.cols(), 0);
  for (std::size_t l = 0; l < m.rows(); ++l) {
    if (x[l] == 0) {
      continue;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out[j] ^= field.mul(x[l], m(l, j));
    }
  }
  return out;
}

std::vector<Element> apply(const Field& field, const FieldMatrix& m, std::span<const Element> x)
{
  if (x.size() != m.cols()) {
    throw ParameterError("vector length does not match matrix columns");
  }
  std::vector<Element> out(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Element acc = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      acc ^= field.mul(m(i, j), x[j]);
    }
    out[i] = acc;
  }
  return out;
}

std::vector<std::size_t> pivot_columns(const Field& field, FieldMatrix m)
{
  const std::uint32_t group = field.size() - 1;
  std::vector<std::size_t> active(m.rows());
  for (std::size_t r = 0; r < active.size(); ++r) {
    active[r] = r;
  }

  std::vector<std::size_t> pivots;
  std::vector<std::pair<std::size_t, std::uint32_t>> pivot_row; // (column, log value)
  for (std::size_t c = 0; c < m.cols() && !active.empty(); ++c) {
    auto it = std::find_if(active.begin(), active.end(), [&](std::size_t r) { return m(r, c) != 0; });
    if (it == active.end()) {
      continue;
    }
    const std::size_t p = *it;
    active.erase(it);
    pivots.push_back(c);

    // Only the pivot row's nonzeros right of c take part in the update.
    const std::uint32_t lead = field.log(m(p, c));
    pivot_row.clear();
    for (std::size_t j = c + 1; j < m.cols(); ++j) {
      if (m(p, j) != 0) {
        pivot_row.emplace_back(j, field.log(m(p, j)));
      }
    }
    for (std::size_t r : active) {
      const Element a = m(r, c);
      if (a == 0) {
        continue;
      }
      const std::uint32_t factor = (field.log(a) + group - lead) % group;
      m(r, c) = 0;
      auto row = m.row(r);
      for (const auto& [j, lv] : pivot_row) {
        row[j] ^= field.exp(factor + lv);
      }
    }
  }
  return pivots;
}

std::size_t rank(const Field& field, FieldMatrix m)
{
  return pivot_columns(field, std::move(m)).size();
}

std::optional<Solution> solve(const Field& field, FieldMatrix a, std::vector<Element> b)
{
  if (a.rows() != b.size()) {
    throw ParameterError("right-hand side length does not match matrix rows");
  }
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::vector<std::size_t> pivot_col_of_row;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a(p, c) == 0) {
      ++p;
    }
    if (p == rows) {
      continue;
    }
    if (p != r) {
      for (std::size_t j = 0; j < cols; ++j) {
        std::swap(a(p, j), a(r, j));
      }
      std::swap(b[p], b[r]);
    }
    const Element scale = field.inv(a(r, c));
    for (std::size_t j = c; j < cols; ++j) {
      a(r, j) = field.mul(a(r, j), scale);
    }
    b[r] = field.mul(b[r], scale);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a(i, c) == 0) {
        continue;
      }
      const Element f = a(i, c);
      for (std::size_t j = c; j < cols; ++j) {
        a(i, j) ^= field.mul(f, a(r, j));
      }
      b[i] ^= field.mul(f, b[r]);
    }
    pivot_col_of_row.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (b[i] != 0) {
      return std::nullopt;
    }
  }
  Solution s;
  s.x.assign(cols, 0);
  for (std::size_t i = 0; i < r; ++i) {
    s.x[pivot_col_of_row[i]] = b[i];
  }
  s.unique = (r == cols);
  return s;
}

FieldMatrix seeded_random_matrix(const Field& field, std::size_t rows, std::size_t cols, std::uint64_t seed)
{
  FieldMatrix m(rows, cols);
  const Element mask = field.mask();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = static_cast<Element>(rng::at(seed, i * cols + j) & mask);
    }
  }
  return m;
}

} // namespace streamcode::gf
