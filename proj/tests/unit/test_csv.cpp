#include <gtest/gtest.h>

#include <sstream>

#include "conu/csv.hpp"

using namespace conu;

TEST(Csv, OrdinaryRoundTripIsExact) {
  const auto ds = make_gaussian_mixture({3, 7, 4, 2.0}, 1);
  std::stringstream ss;
  write_ordinary_csv(ds, ss);
  const auto back = read_ordinary_csv(ss);
  EXPECT_EQ(back.q, 3);
  EXPECT_TRUE(back.features == ds.features);
  EXPECT_EQ(back.labels, ds.labels);
}

TEST(Csv, OrdinaryUsesOneBasedLabels) {
  std::stringstream ss("f0,y\n0.5,1\n-1,2\n");
  const auto ds = read_ordinary_csv(ss);
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 1}));
}

TEST(Csv, ComplementaryRoundTrip) {
  const auto ds = make_gaussian_mixture({4, 10, 2, 2.0}, 1);
  const auto cds = gen_complementary(ds, ScarIndependent{{0.4, 0.4, 0.4, 0.4}}, 2);
  std::stringstream ss;
  write_complementary_csv(cds, ss);
  const auto back = read_complementary_csv(ss, 4);
  EXPECT_TRUE(back.comp == cds.comp);
  EXPECT_TRUE(back.features == cds.features);
}

TEST(Csv, ComplementaryEmptySetAndExplicitQ) {
  std::stringstream ss("f0,cl\n1.0,\n2.0,1;3\n");
  const auto cds = read_complementary_csv(ss, 5);
  EXPECT_EQ(cds.q, 5);
  EXPECT_EQ(cds.comp.row(0).cast<int>().sum(), 0);
  EXPECT_EQ(cds.comp(1, 0), 1);
  EXPECT_EQ(cds.comp(1, 2), 1);
}

TEST(Csv, PriorsRoundTrip) {
  const ClassPriors p{{0.1, 0.2, 0.7}, {0.3, 0.25, 0.05}};
  std::stringstream ss;
  write_priors_csv(p, ss);
  const auto back = read_priors_csv(ss);
  EXPECT_EQ(back.pi, p.pi);
  EXPECT_EQ(back.pi_bar, p.pi_bar);
}

namespace {

std::size_t error_line(const std::string& text, int kind) {
  std::stringstream ss(text);
  try {
    if (kind == 0) read_ordinary_csv(ss);
    else if (kind == 1) read_complementary_csv(ss);
    else read_priors_csv(ss);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Csv, MalformedInputReportsLine) {
  EXPECT_EQ(error_line("f0,y\n1,1\n1,2\nx,1\n", 0), 4u);
  EXPECT_EQ(error_line("f0,y\n1,1\n1,2,3\n", 0), 3u);
  EXPECT_EQ(error_line("f0,y\n1,0\n", 0), 2u);
  EXPECT_EQ(error_line("g0,y\n1,1\n", 0), 1u);
  EXPECT_EQ(error_line("f0,cl\n1,1;1\n", 1), 2u);
  EXPECT_EQ(error_line("f0,cl\n1,2\n1,1;2\n", 1), 3u);  // every class flagged
  EXPECT_EQ(error_line("k,pi_k,pi_bar_k\n1,0.5,0.1\n3,0.5,0.1\n", 2), 3u);
  std::stringstream ss("f0,y\n1,1\nbad,2\n");
  try {
    read_ordinary_csv(ss);
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 3:", 0), 0u) << e.what();
  }
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}
