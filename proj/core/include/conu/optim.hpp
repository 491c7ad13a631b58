#pragma once

#include <cstdint>
#include <functional>

#include "conu/data.hpp"

namespace conu {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled
};

struct AdamState {
  AdamConfig config;
  long long step = 0;
  Vector m;
  Vector v;

  AdamState() = default;
  AdamState(Index n, AdamConfig cfg)
      : config(cfg), m(Vector::Zero(n)), v(Vector::Zero(n)) {}
};

/// One Adam update with bias correction. Weight decay is decoupled:
/// params <- params - lr * wd * params, then the Adam delta.
void adam_step(AdamState& state, Vector& params, const Vector& grads);

/// Objective for gradient checking: returns f(theta) and, when `grad` is
/// non-null, the analytic gradient.
using Objective = std::function<double(const Vector& theta, Vector* grad)>;
/// Optional distance of theta to the nearest non-differentiable point of the
/// objective (e.g. min_k |R^P_k| for an |.|-corrected risk).
using KinkDistance = std::function<double(const Vector& theta)>;

struct GradCheckOptions {
  double h = 1e-5;
  Index max_coords = 0;     // 0 checks every coordinate; otherwise a seeded sample
  std::uint64_t seed = 0;
  double kink_margin = 1e-3;
  double denom_floor = 1e-6;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  Index checked = 0;
  Index excluded = 0;
};

/// Compares the analytic gradient with central differences
/// (f(theta + h e_i) - f(theta - h e_i)) / 2h. Relative error per coordinate
/// is |a - n| / max(|a|, |n|, denom_floor). Coordinates whose perturbed
/// points come within `kink_margin` of a kink are skipped.
GradCheckResult grad_check(const Vector& theta, const Objective& f,
                           const GradCheckOptions& opts = {},
                           const KinkDistance& kink = {});

}  // namespace conu
