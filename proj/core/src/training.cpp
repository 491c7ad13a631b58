#include "conu/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "conu/csv.hpp"
#include "conu/optim.hpp"
#include "conu/rng.hpp"

namespace conu {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be >= 0");
}

double TrainReport::tail_accuracy(std::size_t k) const {
  if (test_acc.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t take = std::min(k, test_acc.size());
  double s = 0.0;
  for (std::size_t i = test_acc.size() - take; i < test_acc.size(); ++i) s += test_acc[i];
  return s / static_cast<double>(take);
}

std::vector<int> predict_from_scores(const Matrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index k = 1; k < scores.cols(); ++k)
      if (scores(i, k) > scores(i, best)) best = k;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> predict(const ModelParams& params, const Matrix& x) {
  return predict_from_scores(forward(params, x));
}

double accuracy(const ModelParams& params, const OrdinaryDataset& ds) {
  const auto pred = predict(params, ds.features);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == ds.labels[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

namespace {

// BatchGrad(rows) -> RiskGradient over the selected rows; FullRisk(params) ->
// full-data risk for the curve.
template <class BatchGrad, class FullRisk>
TrainResult run_loop(Index n, const ModelConfig& model, const TrainConfig& cfg,
                     const OrdinaryDataset* test, BatchGrad batch_grad,
                     FullRisk full_risk) {
  cfg.validate();
  if (n == 0) throw std::invalid_argument("training set is empty");
  TrainResult res{init_params(model, derive_seed(cfg.seed, "init")), {}};
  AdamState adam(res.params.size(), {cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<Index> rows;

  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    Engine rng = make_engine(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index m = std::min(cfg.batch_size, n - start);
      rows.assign(order.begin() + start, order.begin() + start + m);
      const RiskGradient g = batch_grad(res.params, rows);
      if (cfg.record_batches) {
        res.report.batch_risk.push_back(g.risk);
        res.report.batch_min_positive_part.push_back(g.breakdown.min_positive_part());
      }
      adam_step(adam, res.params.values, g.grad);
    }
    if (cfg.record_curves) {
      res.report.train_risk.push_back(full_risk(res.params));
      res.report.test_acc.push_back(test ? accuracy(res.params, *test)
                                         : std::numeric_limits<double>::quiet_NaN());
    }
  }
  return res;
}

Matrix gather(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
  return out;
}

void check_test_set(const OrdinaryDataset* test, const ModelConfig& model) {
  if (!test) return;
  test->validate();
  if (test->dim() != model.input_dim || test->q != model.output_dim)
    throw std::invalid_argument("test set shape does not match the model");
}

}  // namespace

TrainResult train_conu(const ComplementaryDataset& cds, const ClassPriors& priors,
                       const ModelConfig& model, const TrainConfig& cfg,
                       const OrdinaryDataset* test) {
  cds.validate();
  priors.validate();
  if (priors.num_classes() != cds.q)
    throw std::invalid_argument("prior vector has " + std::to_string(priors.num_classes()) +
                                " classes but the dataset has " + std::to_string(cds.q));
  if (model.input_dim != cds.dim() || model.output_dim != cds.q)
    throw std::invalid_argument("model shape does not match the dataset");
  check_test_set(test, model);
  const RiskSpec spec{cfg.correction, priors};
  BitMatrix comp_batch;
  auto batch = [&](const ModelParams& p, const std::vector<Index>& rows) {
    comp_batch.resize(static_cast<Index>(rows.size()), cds.q);
    for (std::size_t i = 0; i < rows.size(); ++i)
      comp_batch.row(static_cast<Index>(i)) = cds.comp.row(rows[i]);
    return risk_and_grad(p, gather(cds.features, rows), comp_batch, spec);
  };
  auto full = [&](const ModelParams& p) {
    return risk_with_grad(forward(p, cds.features), cds.comp, spec, nullptr).total;
  };
  return run_loop(cds.size(), model, cfg, test, batch, full);
}

TrainResult train_supervised(const OrdinaryDataset& ds, const ModelConfig& model,
                             const TrainConfig& cfg, const OrdinaryDataset* test) {
  ds.validate();
  if (model.input_dim != ds.dim() || model.output_dim != ds.q)
    throw std::invalid_argument("model shape does not match the dataset");
  check_test_set(test, model);
  std::vector<int> labels;
  auto batch = [&](const ModelParams& p, const std::vector<Index>& rows) {
    labels.clear();
    for (Index r : rows) labels.push_back(ds.labels[static_cast<std::size_t>(r)]);
    return ovr_risk_and_grad(p, gather(ds.features, rows), labels);
  };
  auto full = [&](const ModelParams& p) {
    return ovr_empirical_risk(forward(p, ds.features), ds.labels);
  };
  return run_loop(ds.size(), model, cfg, test, batch, full);
}

void write_report_csv(const TrainReport& report, std::ostream& out) {
  out << "epoch,train_risk,test_acc\n";
  for (std::size_t e = 0; e < report.train_risk.size(); ++e) {
    out << e + 1 << ',' << format_double(report.train_risk[e]) << ',';
    if (e < report.test_acc.size() && !std::isnan(report.test_acc[e]))
      out << format_double(report.test_acc[e]);
    out << '\n';
  }
}

void write_report_csv(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_report_csv(report, out);
}

}  // namespace conu
