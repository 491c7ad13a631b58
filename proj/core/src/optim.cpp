#include "conu/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "conu/rng.hpp"

namespace conu {

void adam_step(AdamState& state, Vector& params, const Vector& grads) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw std::invalid_argument("adam_step: vector lengths disagree");
  const auto& c = state.config;
  ++state.step;
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * grads;
  state.v = c.beta2 * state.v + (1.0 - c.beta2) * grads.cwiseAbs2();
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  if (c.weight_decay != 0.0) params *= 1.0 - c.lr * c.weight_decay;
  params.array() -=
      c.lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + c.eps);
}

GradCheckResult grad_check(const Vector& theta, const Objective& f,
                           const GradCheckOptions& opts, const KinkDistance& kink) {
  if (!(opts.h > 0.0)) throw std::invalid_argument("grad_check: h must be positive");
  Vector analytic(theta.size());
  f(theta, &analytic);
  if (analytic.size() != theta.size())
    throw std::invalid_argument("grad_check: gradient length mismatch");

  std::vector<Index> coords(static_cast<std::size_t>(theta.size()));
  std::iota(coords.begin(), coords.end(), Index{0});
  if (opts.max_coords > 0 && opts.max_coords < theta.size()) {
    Engine rng(opts.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(static_cast<std::size_t>(opts.max_coords));
    std::sort(coords.begin(), coords.end());
  }

  GradCheckResult res;
  Vector probe = theta;
  for (Index i : coords) {
    probe(i) = theta(i) + opts.h;
    const bool near_plus = kink && kink(probe) < opts.kink_margin;
    const double fp = f(probe, nullptr);
    probe(i) = theta(i) - opts.h;
    const bool near_minus = kink && kink(probe) < opts.kink_margin;
    const double fm = f(probe, nullptr);
    probe(i) = theta(i);
    if (near_plus || near_minus) {
      ++res.excluded;
      continue;
    }
    const double numeric = (fp - fm) / (2.0 * opts.h);
    const double a = analytic(i);
    const double err = std::abs(a - numeric);
    const double denom = std::max({std::abs(a), std::abs(numeric), opts.denom_floor});
    res.max_abs_error = std::max(res.max_abs_error, err);
    res.max_rel_error = std::max(res.max_rel_error, err / denom);
    ++res.checked;
  }
  return res;
}

}  // namespace conu
