#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "conu/data.hpp"

namespace conu {

struct LossValue {
  double value;
  double derivative;
};

/// Logistic loss l(z) = log(1 + exp(-z)), evaluated without overflow.
LossValue logistic_loss(double z);
double softplus(double x);
double sigmoid(double x);

/// Non-negative wrapper applied to each per-class positive part.
/// Identity leaves the unbiased estimator untouched.
enum class Correction { Identity, Abs, Relu };

double apply_correction(Correction g, double z);
/// Subgradient used during training. Ties at z == 0 resolve to +1 for Abs
/// and Relu.
double correction_slope(Correction g, double z);

Correction parse_correction(std::string_view name);
std::string_view to_string(Correction g);

struct RiskSpec {
  Correction correction = Correction::Abs;
  ClassPriors priors;
};

/// Empirical one-versus-rest risk with ordinary labels:
/// mean over examples of l(f_y) + sum_{k != y} l(-f_k).
double ovr_empirical_risk(const Matrix& scores, std::span<const int> labels);
/// Same quantity; writes d risk / d scores into `grad` when non-null.
double ovr_risk_with_grad(const Matrix& scores, std::span<const int> labels,
                          Matrix* grad);

/// Per-class pieces of the negative-unlabeled risk.
struct ClassRiskTerms {
  double positive_part = 0.0;  // may be negative
  double negative_term = 0.0;  // (1 - pi_k) mean l(-f_k) over flagged rows
  bool has_negatives = false;
  bool has_unlabeled = false;
};

/// Positive part for one class:
///   (pi_bar + pi - 1) mean_N l(f) + (1 - pi_bar) mean_U l(f).
/// An empty side drops its term; both sides empty throws.
double positive_part(const Eigen::Ref<const Vector>& scores_k,
                     const ClassSplit& split, double pi_k, double pi_bar_k);

ClassRiskTerms class_risk_terms(const Eigen::Ref<const Vector>& scores_k,
                                const ClassSplit& split, double pi_k,
                                double pi_bar_k);

/// Unbiased estimator: sum_k [ R^P_k + (1 - pi_k) mean_N l(-f_k) ].
double ure_risk(const Matrix& scores, const BinaryDecomposition& dec,
                const ClassPriors& priors);

/// Corrected estimator: sum_k [ g(R^P_k) + (1 - pi_k) mean_N l(-f_k) ].
double corrected_risk(const Matrix& scores, const BinaryDecomposition& dec,
                      const ClassPriors& priors, Correction g);

struct RiskBreakdown {
  double total = 0.0;
  std::vector<ClassRiskTerms> classes;

  double min_positive_part() const;
};

/// Evaluates the risk selected by `spec` and, when `grad` is non-null,
/// fills it with d risk / d scores (same shape as `scores`).
RiskBreakdown risk_with_grad(const Matrix& scores, const BinaryDecomposition& dec,
                             const RiskSpec& spec, Matrix* grad);

/// Same as risk_with_grad but reads the decomposition straight from a bit
/// matrix (no index vectors); used inside the training loop.
RiskBreakdown risk_with_grad(const Matrix& scores, const BitMatrix& comp,
                             const RiskSpec& spec, Matrix* grad);

}  // namespace conu
