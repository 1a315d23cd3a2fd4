#include "oracles.hpp"
#include "streamcode/gf.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace streamcode;
using gf::Element;
using gf::Field;
using gf::FieldMatrix;

namespace {

oracle::Rows to_rows(const FieldMatrix& m)
{
  oracle::Rows rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows.emplace_back(m.row(r).begin(), m.row(r).end());
  }
  return rows;
}

FieldMatrix random_matrix(std::mt19937_64& gen, const Field& f, std::size_t r, std::size_t c)
{
  FieldMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      m(i, j) = static_cast<Element>(gen() & f.mask());
    }
  }
  return m;
}

void sparsify(std::mt19937_64& gen, FieldMatrix& m, unsigned one_in)
{
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (gen() % one_in == 0) {
        m(i, j) = 0;
      }
    }
  }
}

} // namespace

TEST(Field, DefaultPolynomials)
{
  EXPECT_EQ(Field(8).polynomial(), 0x11Bu);
  EXPECT_EQ(Field(16).polynomial(), 0x1100Bu);
  EXPECT_EQ(Field().degree(), 16u);
  EXPECT_THROW(Field(1), std::exception);
  EXPECT_THROW(Field(17), std::exception);
}

TEST(Field, KnownProductGf256)
{
  // 0x53 and 0xCA are inverses modulo x^8+x^4+x^3+x+1.
  const Field f(8);
  EXPECT_EQ(f.mul(0x53, 0xCA), 1);
  EXPECT_EQ(f.inv(0x53), 0xCA);
  EXPECT_EQ(oracle::mul(0x53, 0xCA, 8, 0x11B), 1);
}

TEST(Field, TablesMatchShiftAndAddExhaustiveGf256)
{
  const Field f(8);
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = 0; b < 256; ++b) {
      ASSERT_EQ(f.mul(Element(a), Element(b)), oracle::mul(Element(a), Element(b), 8, 0x11B)) << a << "*" << b;
    }
  }
}

TEST(Field, TablesMatchShiftAndAddGf65536)
{
  const Field f(16);
  std::mt19937_64 gen(7);
  for (int i = 0; i < 200000; ++i) {
    const auto a = static_cast<Element>(gen());
    const auto b = static_cast<Element>(gen());
    ASSERT_EQ(f.mul(a, b), oracle::mul(a, b, 16, 0x1100B));
    ASSERT_EQ(f.mul(a, b), gf::slow_mul(a, b, 16, 0x1100B));
  }
}

TEST(Field, SmallDegreesAreFields)
{
  for (unsigned m = 2; m <= 12; ++m) {
    const Field f(m);
    for (std::uint32_t a = 1; a < f.size(); ++a) {
      ASSERT_EQ(f.mul(Element(a), f.inv(Element(a))), 1) << "m=" << m << " a=" << a;
      ASSERT_EQ(f.mul(Element(a), f.inv(Element(a))), oracle::mul(Element(a), f.inv(Element(a)), m, f.polynomial()));
    }
    // generator enumerates the whole group
    std::vector<bool> seen(f.size(), false);
    Element x = 1;
    for (std::uint32_t i = 0; i + 1 < f.size(); ++i) {
      ASSERT_FALSE(seen[x]);
      seen[x] = true;
      x = f.mul(x, f.generator());
    }
    EXPECT_EQ(x, 1);
  }
}

TEST(Field, AxiomsGf256)
{
  const Field f(8);
  for (unsigned a = 1; a < 256; ++a) {
    EXPECT_EQ(f.mul(Element(a), f.inv(Element(a))), 1);
  }
  EXPECT_THROW(f.inv(0), std::domain_error);
  for (unsigned a = 0; a < 256; a += 3) {
    for (unsigned b = 0; b < 256; b += 5) {
      for (unsigned c = 0; c < 256; c += 7) {
        const Element x(a), y(b), z(c);
        ASSERT_EQ(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        ASSERT_EQ(f.mul(x, Element(y ^ z)), Element(f.mul(x, y) ^ f.mul(x, z)));
        ASSERT_EQ(f.mul(x, y), f.mul(y, x));
      }
    }
  }
}

TEST(Field, PowAndDiv)
{
  const Field f(16);
  std::mt19937_64 gen(3);
  for (int i = 0; i < 1000; ++i) {
    const auto a = static_cast<Element>(gen() | 1);
    const auto b = static_cast<Element>(gen() | 1);
    EXPECT_EQ(f.mul(f.div(a, b), b), a);
    EXPECT_EQ(f.pow(a, 65535), 1);
    EXPECT_EQ(f.pow(a, 3), f.mul(a, f.mul(a, a)));
  }
}

TEST(Rank, Examples)
{
  const Field f(16);
  EXPECT_EQ(gf::rank(f, FieldMatrix::identity(3)), 3u);
  EXPECT_EQ(gf::rank(f, FieldMatrix(2, 5)), 0u);

  std::mt19937_64 gen(11);
  auto m = random_matrix(gen, f, 4, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    m(3, c) = m(1, c);
  }
  const auto expected = oracle::rank(to_rows(m), 16, 0x1100B);
  EXPECT_EQ(expected, 3u);
  EXPECT_EQ(gf::rank(f, m), expected);
}

TEST(Rank, MatchesRowReductionOracle)
{
  const Field f(8);
  std::mt19937_64 gen(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t r = 1 + gen() % 6;
    const std::size_t c = 1 + gen() % 6;
    auto m = random_matrix(gen, f, r, c);
    sparsify(gen, m, 3); // so deficient ranks show up
    ASSERT_EQ(gf::rank(f, m), oracle::rank(to_rows(m), 8, 0x11B));
  }
}

TEST(Rank, InvariantUnderRowSwapsAndScaling)
{
  const Field f(16);
  std::mt19937_64 gen(9);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t r = 2 + gen() % 5;
    const std::size_t c = 2 + gen() % 5;
    auto m = random_matrix(gen, f, r, c);
    if (gen() % 2) {
      const auto src = gen() % r;
      const auto dst = gen() % r;
      for (std::size_t j = 0; j < c; ++j) {
        m(dst, j) = m(src, j);
      }
    }
    const auto base = gf::rank(f, m);
    auto t = m;
    const auto a = gen() % r;
    const auto b = gen() % r;
    for (std::size_t j = 0; j < c; ++j) {
      std::swap(t(a, j), t(b, j));
    }
    const auto s = static_cast<Element>((gen() % 65535) + 1);
    for (std::size_t j = 0; j < c; ++j) {
      t(a, j) = f.mul(t(a, j), s);
    }
    ASSERT_EQ(gf::rank(f, t), base);
  }
}

TEST(PivotColumns, CountsPrefixRanks)
{
  const Field f(8);
  std::mt19937_64 gen(21);
  for (int i = 0; i < 300; ++i) {
    auto m = random_matrix(gen, f, 1 + gen() % 5, 1 + gen() % 7);
    sparsify(gen, m, 2);
    const auto pivots = gf::pivot_columns(f, m);
    for (std::size_t c = 0; c <= m.cols(); ++c) {
      oracle::Rows prefix;
      for (std::size_t r = 0; r < m.rows(); ++r) {
        std::vector<std::uint16_t> row(m.row(r).begin(), m.row(r).begin() + static_cast<std::ptrdiff_t>(c));
        row.push_back(0);
        prefix.push_back(row);
      }
      const auto below = std::count_if(pivots.begin(), pivots.end(), [&](std::size_t p) { return p < c; });
      ASSERT_EQ(static_cast<std::size_t>(below), oracle::rank(prefix, 8, 0x11B));
    }
  }
}

TEST(Solve, Examples)
{
  const Field f(16);
  const std::vector<Element> b{5, 6, 7};
  const auto s = gf::solve(f, FieldMatrix::identity(3), b);
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->unique);
  EXPECT_EQ(s->x, b);

  EXPECT_FALSE(gf::solve(f, FieldMatrix(2, 2), {0, 1}));

  FieldMatrix a(3, 2, {1, 2, 3, 4, 5, 6});
  const std::vector<Element> x{0x1234, 0xBEEF};
  const auto rhs = gf::apply(f, a, x);
  const auto got = gf::solve(f, a, rhs);
  ASSERT_TRUE(got);
  EXPECT_TRUE(got->unique);
  EXPECT_EQ(got->x, x);
  EXPECT_EQ(gf::apply(f, a, got->x), rhs);
}

TEST(Solve, SolutionsSatisfyTheSystem)
{
  const Field f(16);
  std::mt19937_64 gen(13);
  int underdetermined = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t r = 1 + gen() % 6;
    const std::size_t c = 1 + gen() % 6;
    auto a = random_matrix(gen, f, r, c);
    std::vector<Element> x(c);
    for (auto& e : x) {
      e = static_cast<Element>(gen());
    }
    const auto b = gf::apply(f, a, x);
    const auto s = gf::solve(f, a, b);
    ASSERT_TRUE(s);
    ASSERT_EQ(gf::apply(f, a, s->x), b);
    ASSERT_EQ(s->unique, gf::rank(f, a) == c);
    underdetermined += s->unique ? 0 : 1;
  }
  EXPECT_GT(underdetermined, 0);
}

TEST(SeededRandomMatrix, Determinism)
{
  const Field f(16);
  EXPECT_TRUE(gf::seeded_random_matrix(f, 0, 5, 1).empty());
  EXPECT_EQ(gf::seeded_random_matrix(f, 3, 4, 99), gf::seeded_random_matrix(f, 3, 4, 99));
  EXPECT_NE(gf::seeded_random_matrix(f, 3, 4, 99), gf::seeded_random_matrix(f, 3, 4, 100));
}

TEST(SeededRandomMatrix, SquareMatricesAreInvertible)
{
  // singular 4x4 over GF(2^16) has probability about 1/65535
  const Field f(16);
  int singular = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    singular += gf::rank(f, gf::seeded_random_matrix(f, 4, 4, seed)) < 4 ? 1 : 0;
  }
  EXPECT_LE(singular, 3);
}

TEST(Multiply, MatchesDefinition)
{
  const Field f(8);
  std::mt19937_64 gen(17);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_matrix(gen, f, 3, 4);
    const auto b = random_matrix(gen, f, 4, 2);
    const auto c = gf::multiply(f, a, b);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t k = 0; k < 2; ++k) {
        std::uint16_t acc = 0;
        for (std::size_t j = 0; j < 4; ++j) {
          acc ^= oracle::mul(a(r, j), b(j, k), 8, 0x11B);
        }
        ASSERT_EQ(c(r, k), acc);
      }
    }
  }
}
