#include "conu/prior_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "conu/optim.hpp"
#include "conu/rng.hpp"

namespace conu {

MixtureSource parse_mixture_source(std::string_view name) {
  if (name == "unlabeled" || name == "unl") return MixtureSource::Unlabeled;
  if (name == "all") return MixtureSource::All;
  throw std::invalid_argument("unknown mixture source '" + std::string(name) + "'");
}

void BbeConfig::validate() const {
  if (!(gamma >= 0.0)) throw std::invalid_argument("BBE gamma must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("BBE delta must lie in (0, 1)");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw std::invalid_argument("split fraction must lie in (0, 1)");
  if (pvu_train.epochs < 1 || pvu_train.batch_size < 1)
    throw std::invalid_argument("PvU epochs and batch size must be >= 1");
}

Vector PvuScorer::score(const Matrix& x) const {
  const Matrix s = forward(params, x);
  Vector out(s.rows());
  for (Index i = 0; i < s.rows(); ++i) out(i) = sigmoid(s(i, 1) - s(i, 0));
  return out;
}

PvuScorer train_pvu(const Matrix& component, const Matrix& mixture,
                    const std::vector<Index>& hidden, const PvuTrainConfig& cfg,
                    std::uint64_t seed) {
  if (component.rows() == 0 || mixture.rows() == 0)
    throw std::invalid_argument("train_pvu: both samples must be nonempty");
  if (component.cols() != mixture.cols())
    throw std::invalid_argument("train_pvu: feature widths differ");
  const Index n = component.rows() + mixture.rows();
  Matrix x(n, component.cols());
  x << component, mixture;
  std::vector<int> is_component(static_cast<std::size_t>(n), 0);
  std::fill_n(is_component.begin(), component.rows(), 1);

  const ModelConfig mc = hidden.empty() ? ModelConfig::linear(x.cols(), 2)
                                        : ModelConfig::mlp(x.cols(), 2, hidden);
  PvuScorer scorer{init_params(mc, derive_seed(seed, "init"))};
  AdamState adam(scorer.params.size(), {cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Matrix xb;
  ForwardCache cache;
  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    Engine rng = make_engine(seed, "shuffle", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index m = std::min(cfg.batch_size, n - start);
      xb.resize(m, x.cols());
      for (Index r = 0; r < m; ++r) xb.row(r) = x.row(order[static_cast<std::size_t>(start + r)]);
      const Matrix s = forward(scorer.params, xb, &cache);
      Matrix ds = Matrix::Zero(m, 2);
      for (Index r = 0; r < m; ++r) {
        const double margin = s(r, 1) - s(r, 0);
        const bool pos = is_component[static_cast<std::size_t>(order[static_cast<std::size_t>(start + r)])];
        // logistic loss on +margin (component) or -margin (mixture)
        const double d = pos ? -sigmoid(-margin) : sigmoid(margin);
        ds(r, 1) = d / static_cast<double>(m);
        ds(r, 0) = -d / static_cast<double>(m);
      }
      adam_step(adam, scorer.params.values, backward(scorer.params, cache, ds));
    }
  }
  return scorer;
}

double empirical_upper_cdf(std::span<const double> scores, double z) {
  if (scores.empty()) throw std::invalid_argument("empirical_upper_cdf: empty score set");
  const auto count = std::count_if(scores.begin(), scores.end(),
                                   [z](double s) { return s >= z; });
  return static_cast<double>(count) / static_cast<double>(scores.size());
}

BbeResult bbe_select(std::span<const double> component_scores,
                     std::span<const double> mixture_scores, double gamma,
                     double delta) {
  if (component_scores.empty() || mixture_scores.empty())
    throw std::invalid_argument("bbe: both score sets must be nonempty");
  std::vector<double> zp(component_scores.begin(), component_scores.end());
  std::vector<double> zu(mixture_scores.begin(), mixture_scores.end());
  std::sort(zp.begin(), zp.end());
  std::sort(zu.begin(), zu.end());
  std::vector<double> grid;
  grid.reserve(zp.size() + zu.size());
  std::merge(zp.begin(), zp.end(), zu.begin(), zu.end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const double np = static_cast<double>(zp.size());
  const double nu = static_cast<double>(zu.size());
  const double slack = (1.0 + gamma) * (std::sqrt(std::log(4.0 / delta) / (2.0 * np)) +
                                        std::sqrt(std::log(4.0 / delta) / (2.0 * nu)));
  auto upper = [](const std::vector<double>& sorted, double z) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), z);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
  };

  BbeResult best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (double z : grid) {
    const double qp = upper(zp, z);
    if (qp <= 0.0) continue;
    const double qu = upper(zu, z);
    const double obj = qu / qp + slack / qp;
    if (obj < best_obj) {
      best_obj = obj;
      best = {std::min(1.0, qu / qp), z, qp, qu};
    }
  }
  if (!std::isfinite(best_obj)) throw std::runtime_error("bbe: no admissible threshold");
  return best;
}

double bbe_theta(std::span<const double> component_scores,
                 std::span<const double> mixture_scores, double gamma,
                 double delta) {
  return bbe_select(component_scores, mixture_scores, gamma, delta).theta;
}

double recover_one_minus_pi(double theta, double pi_bar) {
  return pi_bar + theta * (1.0 - pi_bar);
}

std::vector<double> normalize_priors(std::vector<double> raw) {
  double sum = 0.0;
  for (double& p : raw) {
    p = std::max(0.0, p);
    sum += p;
  }
  if (!(sum > 0.0)) {
    std::fill(raw.begin(), raw.end(), 1.0 / static_cast<double>(raw.size()));
    return raw;
  }
  for (double& p : raw) p /= sum;
  return raw;
}

namespace {

Matrix gather_rows(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

PriorEstimate estimate_priors_detailed(const ComplementaryDataset& cds,
                                       const BbeConfig& config,
                                       std::uint64_t seed) {
  config.validate();
  cds.validate();
  const int q = cds.q;
  const auto [train, val] = split(cds, config.split_fraction, derive_seed(seed, "bbe-split"));
  const auto dec_train = decompose(train);
  const auto dec_val = decompose(val);

  PriorEstimate est;
  est.priors.pi_bar = complementary_priors(cds);
  est.theta.resize(static_cast<std::size_t>(q));
  est.raw_pi.resize(static_cast<std::size_t>(q));

  std::vector<Index> all_train(static_cast<std::size_t>(train.size()));
  std::iota(all_train.begin(), all_train.end(), Index{0});
  std::vector<Index> all_val(static_cast<std::size_t>(val.size()));
  std::iota(all_val.begin(), all_val.end(), Index{0});

  for (int k = 0; k < q; ++k) {
    const auto& tr = dec_train.classes[static_cast<std::size_t>(k)];
    const auto& va = dec_val.classes[static_cast<std::size_t>(k)];
    if (tr.neg.empty() || va.neg.empty())
      throw std::invalid_argument("class " + std::to_string(k + 1) +
                                  " has no complementary-labelled examples in the "
                                  "training or validation split");
    const bool all = config.mixture == MixtureSource::All;
    const auto& mix_train = all ? all_train : tr.unl;
    const auto& mix_val = all ? all_val : va.unl;
    if (mix_train.empty() || mix_val.empty())
      throw std::invalid_argument("class " + std::to_string(k + 1) +
                                  " has an empty mixture sample");

    const PvuScorer scorer =
        train_pvu(gather_rows(train.features, tr.neg), gather_rows(train.features, mix_train),
                  config.pvu_hidden, config.pvu_train,
                  derive_seed(seed, "pvu", static_cast<std::uint64_t>(k)));
    const auto zp = to_std(scorer.score(gather_rows(val.features, va.neg)));
    const auto zu = to_std(scorer.score(gather_rows(val.features, mix_val)));
    const double theta = bbe_theta(zp, zu, config.gamma, config.delta);
    est.theta[static_cast<std::size_t>(k)] = theta;
    const double one_minus_pi =
        all ? theta : recover_one_minus_pi(theta, est.priors.pi_bar[static_cast<std::size_t>(k)]);
    est.raw_pi[static_cast<std::size_t>(k)] = 1.0 - one_minus_pi;
  }
  est.priors.pi = normalize_priors(est.raw_pi);
  return est;
}

ClassPriors estimate_priors(const ComplementaryDataset& cds, const BbeConfig& config,
                            std::uint64_t seed) {
  return estimate_priors_detailed(cds, config, seed).priors;
}

}  // namespace conu
