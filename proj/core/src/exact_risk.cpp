#include "conu/exact_risk.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "conu/rng.hpp"

namespace conu {

void DiscreteDistribution::validate() const {
  const auto m = static_cast<std::size_t>(points.rows());
  if (q < 2) throw std::invalid_argument("distribution needs q >= 2");
  if (m == 0 || labels.size() != m || masses.size() != m)
    throw std::invalid_argument("distribution arrays have inconsistent sizes");
  if (flag_probs.size() != static_cast<std::size_t>(q))
    throw std::invalid_argument("flag probability vector must have length q");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(masses[i] > 0.0)) throw std::invalid_argument("masses must be positive");
    if (labels[i] < 0 || labels[i] >= q) throw std::invalid_argument("label out of range");
    total += masses[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("masses must sum to 1");
  for (double c : flag_probs)
    if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("flag probabilities must lie in [0, 1)");
}

ClassPriors DiscreteDistribution::priors() const {
  ClassPriors p;
  p.pi.assign(static_cast<std::size_t>(q), 0.0);
  for (std::size_t i = 0; i < masses.size(); ++i)
    p.pi[static_cast<std::size_t>(labels[i])] += masses[i];
  p.pi_bar.resize(p.pi.size());
  for (std::size_t k = 0; k < p.pi.size(); ++k)
    p.pi_bar[k] = flag_probs[k] * (1.0 - p.pi[k]);
  return p;
}

ExactRisks exact_risks(const DiscreteDistribution& dist, const Matrix& scores) {
  dist.validate();
  const Index m = dist.support_size();
  if (scores.rows() != m || scores.cols() != dist.q)
    throw std::invalid_argument("exact_risks: scores must be support_size x q");
  const ClassPriors pr = dist.priors();

  ExactRisks out;
  for (Index i = 0; i < m; ++i) {
    const int y = dist.labels[static_cast<std::size_t>(i)];
    double point = 0.0;
    for (int k = 0; k < dist.q; ++k)
      point += k == y ? softplus(-scores(i, k)) : softplus(scores(i, k));
    out.ovr += dist.masses[static_cast<std::size_t>(i)] * point;
  }

  for (int k = 0; k < dist.q; ++k) {
    const double pi = pr.pi[static_cast<std::size_t>(k)];
    const double pb = pr.pi_bar[static_cast<std::size_t>(k)];
    const double c = dist.flag_probs[static_cast<std::size_t>(k)];
    const double not_k = 1.0 - pi;
    if (not_k > 0.0 && c <= 0.0)
      throw std::invalid_argument("exact_risks: c_" + std::to_string(k + 1) +
                                  " = 0 leaves p(x | flag) undefined");
    // p(x | flag_k = 1) = p(x, y != k) / (1 - pi_k)
    // p(x | flag_k = 0) = (p(x, y = k) + (1 - c_k) p(x, y != k)) / (1 - pi_bar_k)
    double e_neg_pos = 0.0, e_neg_neg = 0.0, e_unl_pos = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double mass = dist.masses[static_cast<std::size_t>(i)];
      const bool is_k = dist.labels[static_cast<std::size_t>(i)] == k;
      const double lp = softplus(-scores(i, k));
      const double ln = softplus(scores(i, k));
      if (!is_k && not_k > 0.0) {
        const double w = mass / not_k;
        e_neg_pos += w * lp;
        e_neg_neg += w * ln;
      }
      const double wu = (is_k ? mass : (1.0 - c) * mass) / (1.0 - pb);
      e_unl_pos += wu * lp;
    }
    out.nu += not_k * e_neg_neg + (pb + pi - 1.0) * e_neg_pos + (1.0 - pb) * e_unl_pos;
  }
  return out;
}

ExactRisks exact_risks(const DiscreteDistribution& dist, const ModelParams& params) {
  return exact_risks(dist, forward(params, dist.points));
}

ComplementaryDataset sample_complementary(const DiscreteDistribution& dist,
                                          Index n, std::uint64_t seed) {
  dist.validate();
  Engine rng(seed);
  std::discrete_distribution<Index> pick(dist.masses.begin(), dist.masses.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ComplementaryDataset out;
  out.q = dist.q;
  out.features.resize(n, dist.points.cols());
  out.comp = BitMatrix::Zero(n, dist.q);
  out.truth.resize(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    const Index i = pick(rng);
    const int y = dist.labels[static_cast<std::size_t>(i)];
    out.features.row(r) = dist.points.row(i);
    out.truth[static_cast<std::size_t>(r)] = y;
    for (int k = 0; k < dist.q; ++k)
      out.comp(r, k) = (k != y && unit(rng) < dist.flag_probs[static_cast<std::size_t>(k)]) ? 1 : 0;
  }
  return out;
}

}  // namespace conu
