#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "conu/data.hpp"
#include "conu/model.hpp"

namespace conu {

/// Which sample plays the mixture when estimating class k.
///  Unlabeled: rows not flagged with k; BBE then estimates the share of
///             "not k" inside that set and 1 - pi_k is recovered from it.
///  All:       every row; BBE estimates 1 - pi_k directly.
enum class MixtureSource { Unlabeled, All };

MixtureSource parse_mixture_source(std::string_view name);

struct PvuTrainConfig {
  Index epochs = 50;
  Index batch_size = 256;
  double lr = 1e-3;
  double weight_decay = 0.0;
};

struct BbeConfig {
  double gamma = 0.01;
  double delta = 0.1;
  double split_fraction = 0.8;
  std::vector<Index> pvu_hidden = {64, 64};
  PvuTrainConfig pvu_train;
  MixtureSource mixture = MixtureSource::Unlabeled;

  void validate() const;
};

/// Binary scorer in [0, 1]: sigmoid of the margin between the two heads of a
/// two-output model (head 1 = component, head 0 = mixture).
struct PvuScorer {
  ModelParams params;

  Vector score(const Matrix& x) const;
};

/// Trains a component-vs-mixture classifier with the logistic loss.
PvuScorer train_pvu(const Matrix& component, const Matrix& mixture,
                    const std::vector<Index>& hidden, const PvuTrainConfig& cfg,
                    std::uint64_t seed);

/// Fraction of scores >= z.
double empirical_upper_cdf(std::span<const double> scores, double z);

struct BbeResult {
  double theta = 0.0;     // clipped to [0, 1]
  double threshold = 0.0; // selected z
  double q_component = 0.0;
  double q_mixture = 0.0;
};

/// Best-bin estimate of the component proportion inside the mixture.
/// Scans the distinct values of both score sets and keeps the threshold
/// minimising q_U(z)/q_P(z) + (1+gamma)/q_P(z) * (sqrt(ln(4/delta)/2n_P) +
/// sqrt(ln(4/delta)/2n_U)).
BbeResult bbe_select(std::span<const double> component_scores,
                     std::span<const double> mixture_scores, double gamma,
                     double delta);
double bbe_theta(std::span<const double> component_scores,
                 std::span<const double> mixture_scores, double gamma,
                 double delta);

/// 1 - pi_k = pi_bar_k + theta_k (1 - pi_bar_k).
double recover_one_minus_pi(double theta, double pi_bar);

/// Clamps at zero and rescales onto the simplex; an all-zero vector becomes
/// uniform.
std::vector<double> normalize_priors(std::vector<double> raw);

struct PriorEstimate {
  ClassPriors priors;
  std::vector<double> theta;       // per-class BBE output
  std::vector<double> raw_pi;      // before normalisation
};

/// Per class: split, build flagged / unflagged sets, train a PvU scorer on the
/// training part, run BBE on validation scores, recover 1 - pi_k; finally
/// normalise. pi_bar is the empirical flag rate on the full dataset.
PriorEstimate estimate_priors_detailed(const ComplementaryDataset& cds,
                                       const BbeConfig& config,
                                       std::uint64_t seed);
ClassPriors estimate_priors(const ComplementaryDataset& cds,
                            const BbeConfig& config, std::uint64_t seed);

}  // namespace conu
