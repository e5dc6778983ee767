#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nnrenyi/csv_io.hpp"
#include "nnrenyi/error.hpp"
#include "nnrenyi/point_set.hpp"

using namespace nnrenyi;

TEST(PointSet, StoresRowMajor) {
  const PointSet ps{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};
  EXPECT_EQ(ps.size(), 3u);
  EXPECT_EQ(ps.dim(), 2u);
  EXPECT_EQ(ps.at(1, 0), 3.0);
  EXPECT_EQ(ps[2][1], 6.0);
}

TEST(PointSet, RejectsEmptyAndMismatchedInput) {
  EXPECT_THROW(PointSet(0, 2, {}), DataError);
  EXPECT_THROW(PointSet(2, 0, {}), DataError);
  EXPECT_THROW(PointSet(2, 2, {1.0, 2.0, 3.0}), Error);
  EXPECT_THROW((PointSet{{1.0, 2.0}, {3.0}}), Error);
}

TEST(PointSet, RejectsNonFiniteCoordinates) {
  EXPECT_THROW(PointSet(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), DataError);
  EXPECT_THROW(PointSet(1, 1, {std::numeric_limits<double>::infinity()}), DataError);
}

TEST(PointSet, SubsetAndColumnsKeepOrder) {
  const PointSet ps{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const std::vector<std::size_t> rows{2, 0};
  const PointSet s = ps.subset(rows);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at(0, 0), 7.0);
  EXPECT_EQ(s.at(1, 2), 3.0);
  const std::vector<std::size_t> cols{2, 1};
  const PointSet c = ps.columns(cols);
  EXPECT_EQ(c.dim(), 2u);
  EXPECT_EQ(c.at(1, 0), 6.0);
  EXPECT_EQ(c.at(1, 1), 5.0);
}

TEST(PointSet, LineBuildsOneDimensionalSample) {
  const std::vector<double> v{0.0, 1.0, 3.0};
  const PointSet ps = PointSet::line(v);
  EXPECT_EQ(ps.dim(), 1u);
  EXPECT_EQ(ps.at(2, 0), 3.0);
}

TEST(NeighborSpec, CanonicalSortedUniqueForm) {
  const NeighborSpec s({3, 1, 2, 3});
  EXPECT_EQ(s.ranks(), (std::vector<unsigned>{1, 2, 3}));
  EXPECT_EQ(s.k(), 3u);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_FALSE(s.singleton());
  EXPECT_TRUE(NeighborSpec{4}.singleton());
}

TEST(NeighborSpec, ParsesCommaList) {
  EXPECT_EQ(NeighborSpec::parse("2,1"), (NeighborSpec{1, 2}));
  EXPECT_EQ(NeighborSpec::parse(" 3 "), (NeighborSpec{3}));
  EXPECT_THROW(NeighborSpec::parse(""), UsageError);
  EXPECT_THROW(NeighborSpec::parse("1,x"), UsageError);
  EXPECT_THROW(NeighborSpec::parse("0,1"), UsageError);
}

TEST(NeighborSpec, RejectsEmptyOrZero) {
  EXPECT_THROW(NeighborSpec(std::vector<unsigned>{}), UsageError);
  EXPECT_THROW(NeighborSpec({0u}), UsageError);
}

TEST(Cube, ClosedBoxMembership) {
  const Cube c({0.0, 1.0}, 2.0);
  EXPECT_EQ(c.upper(1), 3.0);
  const std::vector<double> in{2.0, 1.0}, out{2.0, 3.5};
  EXPECT_TRUE(c.contains(in));
  EXPECT_FALSE(c.contains(out));
  EXPECT_THROW(Cube({0.0}, 0.0), UsageError);
  EXPECT_EQ(Cube::unit(3).dim(), 3u);
}

TEST(Csv, ReadsHeaderAndRows) {
  const CsvTable t = parse_csv("x,y\n1,2\n3.5,-4e-1\n");
  ASSERT_TRUE(t.header.has_value());
  EXPECT_EQ(*t.header, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(t.points.size(), 2u);
  EXPECT_EQ(t.points.at(1, 1), -0.4);
}

TEST(Csv, NumericFirstRowIsData) {
  const CsvTable t = parse_csv("1,2\n3,4\n");
  EXPECT_FALSE(t.header.has_value());
  EXPECT_EQ(t.points.size(), 2u);
}

TEST(Csv, SkipsBlankLinesAndCarriageReturns) {
  const CsvTable t = parse_csv("\xEF\xBB\xBF" "a\r\n1\r\n\r\n2\r\n");
  EXPECT_EQ(t.points.size(), 2u);
  EXPECT_EQ(t.points.at(1, 0), 2.0);
}

TEST(Csv, EmptyInputIsNoData) {
  try {
    parse_csv("");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "no data");
  }
  EXPECT_THROW(parse_csv("a,b\n"), DataError);
}

TEST(Csv, InconsistentColumnsNameTheLine) {
  try {
    parse_csv("1,2\n3,4\n5\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Csv, RejectsNonNumericAndNonFiniteFields) {
  EXPECT_THROW(parse_csv("1,2\n3,abc\n"), DataError);
  EXPECT_THROW(parse_csv("1,2\n3,nan\n"), DataError);
  EXPECT_THROW(parse_csv("1,2\n3,\n"), DataError);
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}
