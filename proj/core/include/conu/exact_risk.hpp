#pragma once

#include <cstdint>
#include <vector>

#include "conu/data.hpp"
#include "conu/model.hpp"

namespace conu {

/// A finite population: support points with truth labels and probability
/// masses, plus SCAR flag probabilities c_k. Everything the risk identity
/// needs (pi_k, pi_bar_k and both conditionals per class) follows in closed
/// form.
struct DiscreteDistribution {
  Matrix points;  // m x d
  std::vector<int> labels;
  std::vector<double> masses;
  std::vector<double> flag_probs;
  int q = 0;

  Index support_size() const { return points.rows(); }
  void validate() const;
  ClassPriors priors() const;  // pi_k and pi_bar_k = c_k (1 - pi_k)
};

struct ExactRisks {
  double ovr = 0.0;  // expectation of l(f_y) + sum_{k != y} l(-f_k)
  double nu = 0.0;   // sum_k R_k built from p(x | flag_k = 1), p(x | flag_k = 0)
};

/// Both routes to the population risk for fixed scores (one row per support
/// point). Throws when some c_k = 0 although p(y != k) > 0.
ExactRisks exact_risks(const DiscreteDistribution& dist, const Matrix& scores);
ExactRisks exact_risks(const DiscreteDistribution& dist, const ModelParams& params);

/// n i.i.d. draws from the population with independent SCAR flags.
ComplementaryDataset sample_complementary(const DiscreteDistribution& dist,
                                          Index n, std::uint64_t seed);

}  // namespace conu
