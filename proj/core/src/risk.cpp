#include "conu/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace conu {

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossValue logistic_loss(double z) { return {softplus(-z), -sigmoid(-z)}; }

double apply_correction(Correction g, double z) {
  switch (g) {
    case Correction::Identity: return z;
    case Correction::Abs: return std::abs(z);
    case Correction::Relu: return std::max(z, 0.0);
  }
  return z;
}

double correction_slope(Correction g, double z) {
  switch (g) {
    case Correction::Identity: return 1.0;
    case Correction::Abs: return z >= 0.0 ? 1.0 : -1.0;
    case Correction::Relu: return z >= 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

Correction parse_correction(std::string_view name) {
  if (name == "abs" || name == "conu") return Correction::Abs;
  if (name == "relu") return Correction::Relu;
  if (name == "identity" || name == "ure" || name == "none") return Correction::Identity;
  throw std::invalid_argument("unknown correction '" + std::string(name) + "'");
}

std::string_view to_string(Correction g) {
  switch (g) {
    case Correction::Identity: return "identity";
    case Correction::Abs: return "abs";
    case Correction::Relu: return "relu";
  }
  return "?";
}

double ovr_risk_with_grad(const Matrix& scores, std::span<const int> labels,
                          Matrix* grad) {
  const Index n = scores.rows();
  const Index q = scores.cols();
  if (n == 0) throw std::invalid_argument("ovr risk of an empty sample");
  if (static_cast<Index>(labels.size()) != n)
    throw std::invalid_argument("label count does not match score rows");
  if (grad) grad->setZero(n, q);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= q) throw std::invalid_argument("label out of range");
    for (Index k = 0; k < q; ++k) {
      if (k == y) {
        const auto l = logistic_loss(scores(i, k));
        total += l.value;
        if (grad) (*grad)(i, k) = inv_n * l.derivative;
      } else {
        const auto l = logistic_loss(-scores(i, k));
        total += l.value;
        if (grad) (*grad)(i, k) = -inv_n * l.derivative;
      }
    }
  }
  return total * inv_n;
}

double ovr_empirical_risk(const Matrix& scores, std::span<const int> labels) {
  return ovr_risk_with_grad(scores, labels, nullptr);
}

ClassRiskTerms class_risk_terms(const Eigen::Ref<const Vector>& scores_k,
                                const ClassSplit& split, double pi_k,
                                double pi_bar_k) {
  ClassRiskTerms t;
  t.has_negatives = !split.neg.empty();
  t.has_unlabeled = !split.unl.empty();
  if (!t.has_negatives && !t.has_unlabeled)
    throw std::invalid_argument("class has neither negative nor unlabeled rows");
  if (t.has_negatives) {
    double pos = 0.0, neg = 0.0;
    for (Index i : split.neg) {
      pos += softplus(-scores_k(i));
      neg += softplus(scores_k(i));
    }
    const double inv = 1.0 / static_cast<double>(split.neg.size());
    t.positive_part += (pi_bar_k + pi_k - 1.0) * pos * inv;
    t.negative_term = (1.0 - pi_k) * neg * inv;
  }
  if (t.has_unlabeled) {
    double pos = 0.0;
    for (Index i : split.unl) pos += softplus(-scores_k(i));
    t.positive_part += (1.0 - pi_bar_k) * pos / static_cast<double>(split.unl.size());
  }
  return t;
}

double positive_part(const Eigen::Ref<const Vector>& scores_k,
                     const ClassSplit& split, double pi_k, double pi_bar_k) {
  return class_risk_terms(scores_k, split, pi_k, pi_bar_k).positive_part;
}

double RiskBreakdown::min_positive_part() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : classes) m = std::min(m, c.positive_part);
  return m;
}

namespace {

void check_shapes(const Matrix& scores, Index n, int q, const ClassPriors& priors) {
  if (scores.rows() != n || scores.cols() != q)
    throw std::invalid_argument("score matrix shape does not match the decomposition");
  if (priors.num_classes() != q)
    throw std::invalid_argument("prior vector length does not match class count");
  if (n == 0) throw std::invalid_argument("risk of an empty batch");
}

// Shared kernel. `is_neg(i, k)` tells whether row i is flagged with class k.
template <class IsNeg>
RiskBreakdown nu_risk(const Matrix& scores, IsNeg is_neg, const RiskSpec& spec,
                      Matrix* grad) {
  const Index n = scores.rows();
  const int q = static_cast<int>(scores.cols());
  const auto& pr = spec.priors;
  RiskBreakdown out;
  out.classes.resize(static_cast<std::size_t>(q));
  if (grad) grad->setZero(n, q);

  for (int k = 0; k < q; ++k) {
    const double pi = pr.pi[static_cast<std::size_t>(k)];
    const double pb = pr.pi_bar[static_cast<std::size_t>(k)];
    Index n_neg = 0;
    double sum_pos_neg = 0.0, sum_neg_neg = 0.0, sum_pos_unl = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double s = scores(i, k);
      if (is_neg(i, k)) {
        ++n_neg;
        sum_pos_neg += softplus(-s);
        sum_neg_neg += softplus(s);
      } else {
        sum_pos_unl += softplus(-s);
      }
    }
    const Index n_unl = n - n_neg;
    auto& t = out.classes[static_cast<std::size_t>(k)];
    t.has_negatives = n_neg > 0;
    t.has_unlabeled = n_unl > 0;
    const double a = pb + pi - 1.0;
    const double b = 1.0 - pb;
    const double inv_neg = n_neg > 0 ? 1.0 / static_cast<double>(n_neg) : 0.0;
    const double inv_unl = n_unl > 0 ? 1.0 / static_cast<double>(n_unl) : 0.0;
    t.positive_part = a * sum_pos_neg * inv_neg + b * sum_pos_unl * inv_unl;
    t.negative_term = (1.0 - pi) * sum_neg_neg * inv_neg;
    out.total += apply_correction(spec.correction, t.positive_part) + t.negative_term;

    if (grad) {
      const double slope = correction_slope(spec.correction, t.positive_part);
      for (Index i = 0; i < n; ++i) {
        const double s = scores(i, k);
        // d/ds l(s) = -sigmoid(-s), d/ds l(-s) = sigmoid(s)
        if (is_neg(i, k)) {
          (*grad)(i, k) = -slope * a * inv_neg * sigmoid(-s) +
                          (1.0 - pi) * inv_neg * sigmoid(s);
        } else {
          (*grad)(i, k) = -slope * b * inv_unl * sigmoid(-s);
        }
      }
    }
  }
  return out;
}

}  // namespace

RiskBreakdown risk_with_grad(const Matrix& scores, const BinaryDecomposition& dec,
                             const RiskSpec& spec, Matrix* grad) {
  check_shapes(scores, dec.n, dec.q(), spec.priors);
  BitMatrix comp = BitMatrix::Zero(dec.n, dec.q());
  for (int k = 0; k < dec.q(); ++k) {
    const auto& cls = dec.classes[static_cast<std::size_t>(k)];
    if (static_cast<Index>(cls.neg.size() + cls.unl.size()) != dec.n)
      throw std::invalid_argument("decomposition is not a partition of the rows");
    for (Index i : cls.neg) comp(i, k) = 1;
  }
  return risk_with_grad(scores, comp, spec, grad);
}

RiskBreakdown risk_with_grad(const Matrix& scores, const BitMatrix& comp,
                             const RiskSpec& spec, Matrix* grad) {
  check_shapes(scores, comp.rows(), static_cast<int>(comp.cols()), spec.priors);
  return nu_risk(
      scores, [&comp](Index i, int k) { return comp(i, k) != 0; }, spec, grad);
}

double ure_risk(const Matrix& scores, const BinaryDecomposition& dec,
                const ClassPriors& priors) {
  return corrected_risk(scores, dec, priors, Correction::Identity);
}

double corrected_risk(const Matrix& scores, const BinaryDecomposition& dec,
                      const ClassPriors& priors, Correction g) {
  check_shapes(scores, dec.n, dec.q(), priors);
  double total = 0.0;
  for (int k = 0; k < dec.q(); ++k) {
    const auto t = class_risk_terms(scores.col(k), dec.classes[static_cast<std::size_t>(k)],
                                    priors.pi[static_cast<std::size_t>(k)],
                                    priors.pi_bar[static_cast<std::size_t>(k)]);
    total += apply_correction(g, t.positive_part) + t.negative_term;
  }
  return total;
}

}  // namespace conu
