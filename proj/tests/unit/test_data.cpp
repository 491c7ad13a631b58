#include <gtest/gtest.h>

#include <cmath>

#include "conu/data.hpp"
#include "conu/rng.hpp"
#include "oracles.hpp"

using namespace conu;

namespace {

OrdinaryDataset balanced(int q, Index per_class, std::uint64_t seed = 3) {
  return make_gaussian_mixture({q, per_class, 2, 1.0}, seed);
}

std::vector<std::vector<double>> rows_of(const Matrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  return out;
}

}  // namespace

TEST(Rng, DerivedStreamsDifferAndRepeat) {
  EXPECT_EQ(derive_seed(7, "data"), derive_seed(7, "data"));
  EXPECT_NE(derive_seed(7, "data"), derive_seed(7, "labels"));
  EXPECT_NE(derive_seed(7, "data"), derive_seed(8, "data"));
  EXPECT_NE(derive_seed(7, "shuffle", 0), derive_seed(7, "shuffle", 1));
}

TEST(GaussianMixture, ZeroSeparationTwoPoints) {
  const auto ds = make_gaussian_mixture({2, 1, 1, 0.0}, 11);
  ASSERT_EQ(ds.size(), 2);
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 1}));
  EXPECT_LT(std::fabs(ds.features(0, 0)), 6.0);
}

TEST(GaussianMixture, SeparatedIsNearlyPerfectForNearestCentroid) {
  const auto ds = make_gaussian_mixture({4, 1000, 2, 6.0}, 5);
  EXPECT_GE(oracle::nearest_centroid_accuracy(rows_of(ds.features), ds.labels, 4), 0.99);
}

TEST(GaussianMixture, SameSeedIsBitwiseIdentical) {
  const auto a = make_gaussian_mixture({3, 20, 4, 2.0}, 9);
  const auto b = make_gaussian_mixture({3, 20, 4, 2.0}, 9);
  EXPECT_TRUE(a.features == b.features);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(GaussianMixture, RejectsBadSizes) {
  EXPECT_THROW(make_gaussian_mixture({1, 10, 2, 1.0}, 0), std::invalid_argument);
  EXPECT_THROW(make_gaussian_mixture({3, 0, 2, 1.0}, 0), std::invalid_argument);
  EXPECT_THROW(make_gaussian_mixture({3, 10, 0, 1.0}, 0), std::invalid_argument);
}

TEST(GaussianMixture, CentreLayouts) {
  const Matrix axis = gaussian_centers(3, 5, 2.0);
  EXPECT_DOUBLE_EQ(axis(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(axis(1, 0), 0.0);
  const Matrix circle = gaussian_centers(4, 2, 6.0);
  for (Index k = 0; k < 4; ++k) EXPECT_NEAR(circle.row(k).norm(), 6.0, 1e-12);
  const Matrix line = gaussian_centers(3, 1, 1.0);
  EXPECT_DOUBLE_EQ(line(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(line(2, 0), 1.0);
}

TEST(GenComplementary, TwoClassUniformFlagsTheOtherClass) {
  OrdinaryDataset ds;
  ds.q = 2;
  ds.features = Matrix::Zero(50, 1);
  ds.labels.assign(50, 0);
  const auto cds = gen_complementary(ds, UniformTransition{}, 1);
  for (Index i = 0; i < cds.size(); ++i) {
    EXPECT_EQ(cds.comp(i, 0), 0);
    EXPECT_EQ(cds.comp(i, 1), 1);
  }
}

TEST(GenComplementary, UniformNeverFlagsTruthAndFlagsExactlyOne) {
  const auto ds = balanced(10, 30);
  const auto cds = gen_complementary(ds, UniformTransition{}, 4);
  for (Index i = 0; i < cds.size(); ++i) {
    EXPECT_EQ(cds.comp.row(i).cast<int>().sum(), 1);
    EXPECT_EQ(cds.comp(i, ds.labels[static_cast<std::size_t>(i)]), 0);
  }
  EXPECT_EQ(cds.truth, ds.labels);
}

TEST(GenComplementary, BiasedTableRowOne) {
  EXPECT_DOUBLE_EQ(published_biased_matrix("biased-a")(0, 1), 0.250);
  const Matrix a = builtin_biased("biased-a").matrix;
  for (Index r = 0; r < a.rows(); ++r) EXPECT_NEAR(a.row(r).sum(), 1.0, 1e-12);

  OrdinaryDataset ds;
  ds.q = 10;
  ds.features = Matrix::Zero(40000, 1);
  ds.labels.assign(40000, 0);
  const auto cds = gen_complementary(ds, builtin_biased("biased-a"), 2);
  double hits = 0;
  for (Index i = 0; i < cds.size(); ++i) hits += cds.comp(i, 1);
  EXPECT_NEAR(hits / 40000.0, 0.250 / 0.999, 0.01);
}

TEST(GenComplementary, ScarIndependentFlagRates) {
  const auto ds = balanced(10, 10000);
  std::vector<double> c{0.2, 0.3, 0.4, 0.5, 0.6, 0.1, 0.2, 0.3, 0.4, 0.5};
  const auto cds = gen_complementary(ds, ScarIndependent{c}, 8);
  for (int k = 0; k < 10; ++k) {
    double flagged = 0, others = 0;
    for (Index i = 0; i < cds.size(); ++i) {
      if (ds.labels[static_cast<std::size_t>(i)] == k) {
        EXPECT_EQ(cds.comp(i, k), 0);
        continue;
      }
      ++others;
      flagged += cds.comp(i, k);
    }
    EXPECT_NEAR(flagged / others, c[static_cast<std::size_t>(k)], 0.01) << "class " << k + 1;
  }
}

TEST(GenComplementary, ScarMarginalMatchesAlgebra) {
  const auto ds = balanced(4, 5000);
  std::vector<double> c{0.2, 0.5, 0.7, 0.4};
  const auto pi = label_frequencies(ds);
  const auto pb = complementary_priors(gen_complementary(ds, ScarIndependent{c}, 21));
  const double n = static_cast<double>(ds.size());
  for (std::size_t k = 0; k < 4; ++k) {
    const double expect = c[k] * (1.0 - pi[k]);
    const double se = std::sqrt(expect * (1 - expect) / n);
    EXPECT_NEAR(pb[k], expect, 3 * se);
  }
}

TEST(GenComplementary, ScarSingleAllZeroIsUnsatisfiable) {
  const auto ds = balanced(3, 5);
  EXPECT_THROW(gen_complementary(ds, ScarSingle{{0.0, 0.0, 0.0}}, 1), std::exception);
}

TEST(GenComplementary, ScarSingleGivesAtMostOneLabel) {
  const auto ds = balanced(10, 50);
  const auto pi = label_frequencies(ds);
  const auto spec = parse_transition("scar-a", 10, pi);
  ASSERT_TRUE(std::holds_alternative<ScarSingle>(spec));
  const auto cds = gen_complementary(ds, spec, 3);
  for (Index i = 0; i < cds.size(); ++i) EXPECT_EQ(cds.comp.row(i).cast<int>().sum(), 1);
}

TEST(ParseTransition, Names) {
  const std::vector<double> pi(4, 0.25);
  EXPECT_TRUE(std::holds_alternative<UniformTransition>(parse_transition("uniform", 4, pi)));
  EXPECT_TRUE(std::holds_alternative<ScarIndependent>(parse_transition("scar:0.1,0.2,0.3,0.4", 4, pi)));
  EXPECT_TRUE(std::holds_alternative<ScarSingle>(parse_transition("scar-single:0.1,0.2,0.3,0.4", 4, pi)));
  EXPECT_THROW(parse_transition("scar:0.1,0.2", 4, pi), std::invalid_argument);
  EXPECT_THROW(parse_transition("biased-a", 4, pi), std::invalid_argument);
  EXPECT_THROW(parse_transition("nonsense", 4, pi), std::invalid_argument);
}

TEST(ComplementaryPriors, Counting) {
  ComplementaryDataset cds;
  cds.q = 3;
  cds.features = Matrix::Zero(4, 1);
  cds.comp = BitMatrix::Zero(4, 3);
  cds.comp(0, 1) = cds.comp(1, 1) = cds.comp(3, 1) = 1;
  const auto pb = complementary_priors(cds);
  EXPECT_DOUBLE_EQ(pb[1], 0.75);
  EXPECT_DOUBLE_EQ(pb[0], 0.0);
  cds.comp.setZero();
  for (double v : complementary_priors(cds)) EXPECT_EQ(v, 0.0);
}

TEST(ComplementaryPriors, UniformBalancedTendsToOneOverQ) {
  const auto cds = gen_complementary(balanced(10, 5000), UniformTransition{}, 6);
  for (double v : complementary_priors(cds)) EXPECT_NEAR(v, 0.1, 0.01);
}

TEST(Decompose, Definition) {
  BitMatrix comp = BitMatrix::Zero(3, 3);
  comp(0, 1) = 1;                // {2}
  comp(1, 0) = comp(1, 2) = 1;   // {1,3}
  const auto dec = decompose(comp);
  EXPECT_EQ(dec.classes[0].neg, (std::vector<Index>{1}));
  EXPECT_EQ(dec.classes[0].unl, (std::vector<Index>{0, 2}));
  EXPECT_EQ(dec.classes[2].neg, (std::vector<Index>{1}));
  EXPECT_EQ(dec.classes[1].neg, (std::vector<Index>{0}));
}

TEST(Decompose, EmptyRowsAndPartition) {
  const auto dec0 = decompose(BitMatrix::Zero(5, 4));
  for (const auto& c : dec0.classes) {
    EXPECT_TRUE(c.neg.empty());
    EXPECT_EQ(c.unl.size(), 5u);
  }
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    BitMatrix comp(17, 5);
    for (Index i = 0; i < comp.rows(); ++i)
      for (Index k = 0; k < comp.cols(); ++k) comp(i, k) = static_cast<std::uint8_t>(rng() % 2);
    const auto dec = decompose(comp);
    for (const auto& c : dec.classes) EXPECT_EQ(static_cast<Index>(c.neg.size() + c.unl.size()), 17);
  }
}

TEST(CorruptPriors, SigmaZeroUnchanged) {
  ClassPriors p{{0.1, 0.2, 0.7}, {0.3, 0.3, 0.1}};
  const auto c = corrupt_priors(p, 0.0, 5);
  EXPECT_EQ(c.pi, p.pi);
  EXPECT_EQ(c.pi_bar, p.pi_bar);
}

TEST(CorruptPriors, InjectedMultipliers) {
  ClassPriors p{{0.5, 0.5}, {0.5, 0.5}};
  const std::vector<double> eps{1.2, 0.8};
  const auto c = corrupt_priors_with(p, eps);
  EXPECT_NEAR(c.pi[0], 0.6, 1e-15);
  EXPECT_NEAR(c.pi[1], 0.4, 1e-15);
  EXPECT_EQ(c.pi_bar, p.pi_bar);
  const std::vector<double> zero{-1.0, -2.0};
  EXPECT_THROW(corrupt_priors_with(p, zero), std::exception);
}

TEST(CorruptPriors, StaysOnSimplex) {
  ClassPriors p{{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}};
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto c = corrupt_priors(p, 0.8, s);
    double sum = 0;
    for (double v : c.pi) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(ClassPriorsTest, Validation) {
  EXPECT_NO_THROW((ClassPriors{{0.5, 0.5}, {0.2, 0.3}}.validate()));
  EXPECT_THROW((ClassPriors{{0.5, 0.6}, {0.2, 0.3}}.validate()), std::invalid_argument);
  EXPECT_THROW((ClassPriors{{0.5, 0.5}, {1.0, 0.3}}.validate()), std::invalid_argument);
  EXPECT_FALSE((ClassPriors{{0.5, 0.5}, {0.6, 0.3}}.is_consistent()));
}

TEST(Split, SizesDeterminismAndRange) {
  const auto cds = gen_complementary(balanced(2, 5), UniformTransition{}, 1);
  const auto [a, b] = split(cds, 0.8, 3);
  EXPECT_EQ(a.size(), 8);
  EXPECT_EQ(b.size(), 2);
  const auto [a2, b2] = split(cds, 0.8, 3);
  EXPECT_TRUE(a.features == a2.features);
  EXPECT_TRUE(b.comp == b2.comp);
  EXPECT_THROW(split(cds, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(split(cds, 1.0, 1), std::invalid_argument);
}

TEST(Split, IsAPartition) {
  const auto [l, r] = split_indices(37, 0.3, 9);
  std::vector<int> seen(37, 0);
  for (auto i : l) ++seen[static_cast<std::size_t>(i)];
  for (auto i : r) ++seen[static_cast<std::size_t>(i)];
  for (int s : seen) EXPECT_EQ(s, 1);
}
