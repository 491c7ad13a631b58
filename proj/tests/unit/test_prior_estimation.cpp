#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "conu/prior_estimation.hpp"
#include "oracles.hpp"

using namespace conu;

namespace {

double auc(const Vector& pos, const Vector& neg) {
  double wins = 0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / static_cast<double>(pos.size() * neg.size());
}

Matrix gaussian_column(Index n, double mean, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(mean, 1.0);
  Matrix x(n, 1);
  for (Index i = 0; i < n; ++i) x(i, 0) = g(rng);
  return x;
}

}  // namespace

TEST(UpperCdf, Counting) {
  const std::vector<double> s{0.1, 0.9};
  EXPECT_EQ(empirical_upper_cdf(s, 0.0), 1.0);
  EXPECT_EQ(empirical_upper_cdf(s, 0.5), 0.5);
  EXPECT_EQ(empirical_upper_cdf(s, std::nextafter(0.9, 1.0)), 0.0);
  EXPECT_THROW(empirical_upper_cdf(std::vector<double>{}, 0.5), std::invalid_argument);
}

TEST(Bbe, HandGrid) {
  std::vector<double> zp(100, 0.9), zu(50, 0.9);
  zu.insert(zu.end(), 50, 0.1);
  const double brute = oracle::bbe_brute(zp, zu, 0.01, 0.1);
  EXPECT_NEAR(brute, 0.5, 1e-12);
  EXPECT_NEAR(bbe_theta(zp, zu, 0.01, 0.1), 0.5, 0.1);
  EXPECT_DOUBLE_EQ(bbe_theta(zp, zu, 0.01, 0.1), brute);
}

TEST(Bbe, MatchesBruteForceOnRandomScores) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> zp(30 + rng() % 40), zu(30 + rng() % 40);
    for (auto& v : zp) v = std::round(std::sqrt(u(rng)) * 20) / 20;
    for (auto& v : zu) v = std::round(u(rng) * 20) / 20;
    EXPECT_DOUBLE_EQ(bbe_theta(zp, zu, 0.01, 0.1), oracle::bbe_brute(zp, zu, 0.01, 0.1));
  }
}

TEST(Bbe, SameDistributionGivesNearlyOne) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> z(20000);
  for (auto& v : z) v = u(rng);
  EXPECT_GT(bbe_theta(z, z, 0.01, 0.1), 0.95);
}

TEST(Bbe, TwoGaussianMixture) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> hi(4, 1), lo(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-(x - 2.0))); };
  std::vector<double> zp(5000), zu(5000);
  for (auto& v : zp) v = sig(hi(rng));
  for (auto& v : zu) v = sig(u(rng) < 0.7 ? hi(rng) : lo(rng));
  EXPECT_NEAR(bbe_theta(zp, zu, 0.01, 0.1), 0.7, 0.05);
}

TEST(Bbe, EmptyThrows) {
  const std::vector<double> z{0.5};
  EXPECT_THROW(bbe_theta(std::vector<double>{}, z, 0.01, 0.1), std::invalid_argument);
}

TEST(PriorRecovery, Algebra) {
  EXPECT_DOUBLE_EQ(recover_one_minus_pi(1.0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(recover_one_minus_pi(0.0, 0.3), 0.3);
  EXPECT_NEAR(recover_one_minus_pi(0.5, 0.2), 0.6, 1e-15);
  // theta = 1 everywhere -> pi = 0 everywhere -> uniform after normalisation.
  const auto p = normalize_priors({0.0, 0.0, 0.0, 0.0});
  for (double v : p) EXPECT_DOUBLE_EQ(v, 0.25);
  const auto r = normalize_priors({0.2, -0.1, 0.6});
  EXPECT_NEAR(r[0], 0.25, 1e-15);
  EXPECT_EQ(r[1], 0.0);
  EXPECT_NEAR(r[2], 0.75, 1e-15);
}

TEST(Pvu, SeparatedSetsHaveHighAuc) {
  const Matrix a = gaussian_column(400, 5.0, 1), b = gaussian_column(400, -5.0, 2);
  PvuTrainConfig cfg;
  cfg.epochs = 20;
  const auto s = train_pvu(a, b, {8}, cfg, 3);
  EXPECT_GE(auc(s.score(gaussian_column(200, 5.0, 4)), s.score(gaussian_column(200, -5.0, 5))), 0.99);
}

TEST(Pvu, IdenticalSetsScoreAboutHalf) {
  const Matrix a = gaussian_column(500, 0.0, 1);
  PvuTrainConfig cfg;
  cfg.epochs = 10;
  const auto s = train_pvu(a, a, {8}, cfg, 3);
  const Vector z = s.score(a);
  EXPECT_NEAR(z.minCoeff(), 0.5, 0.1);
  EXPECT_NEAR(z.maxCoeff(), 0.5, 0.1);
}

TEST(Pvu, DeterministicAndRejectsEmpty) {
  const Matrix a = gaussian_column(50, 1.0, 1), b = gaussian_column(50, -1.0, 2);
  PvuTrainConfig cfg;
  cfg.epochs = 3;
  EXPECT_TRUE(train_pvu(a, b, {4}, cfg, 9).params.values == train_pvu(a, b, {4}, cfg, 9).params.values);
  EXPECT_THROW(train_pvu(Matrix(0, 1), b, {4}, cfg, 9), std::invalid_argument);
}

TEST(EstimatePriors, MissingFlagsNameTheClass) {
  auto ds = make_gaussian_mixture({3, 50, 2, 4.0}, 1);
  auto cds = gen_complementary(ds, ScarIndependent{{0.5, 0.0, 0.5}}, 2);
  try {
    estimate_priors(cds, BbeConfig{}, 3);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("class 2"), std::string::npos) << e.what();
  }
}

TEST(EstimatePriors, FourClassScar) {
  const auto ds = make_gaussian_mixture({4, 2000, 2, 6.0}, 21);
  const auto cds = gen_complementary(ds, ScarIndependent{{0.5, 0.5, 0.5, 0.5}}, 22);
  const auto est = estimate_priors_detailed(cds, BbeConfig{}, 23);
  for (double v : est.priors.pi) EXPECT_NEAR(v, 0.25, 0.03);
  EXPECT_EQ(est.priors.pi_bar, complementary_priors(cds));
  EXPECT_EQ(est.theta.size(), 4u);
}
