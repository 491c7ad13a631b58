#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "conu/data.hpp"
#include "conu/model.hpp"
#include "conu/risk.hpp"

namespace conu {

struct TrainConfig {
  Index epochs = 200;
  Index batch_size = 256;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  std::uint64_t seed = 0;
  Correction correction = Correction::Abs;  // Identity trains on the plain URE
  bool record_curves = true;    // per-epoch full-data risk and test accuracy
  bool record_batches = false;  // per-update batch risk and min_k R^P_k

  void validate() const;
};

struct TrainReport {
  std::vector<double> train_risk;  // full training set, end of each epoch
  std::vector<double> test_acc;    // NaN when no test set was given
  std::vector<double> batch_risk;
  std::vector<double> batch_min_positive_part;

  /// Mean test accuracy over the last `k` recorded epochs.
  double tail_accuracy(std::size_t k = 10) const;
};

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

/// Mini-batch Adam on the (corrected) negative-unlabeled risk. Every epoch
/// reshuffles with a stream derived from (seed, epoch); the final short
/// batch is kept.
TrainResult train_conu(const ComplementaryDataset& cds, const ClassPriors& priors,
                       const ModelConfig& model, const TrainConfig& cfg,
                       const OrdinaryDataset* test = nullptr);

/// Same loop on the ordinary one-versus-rest risk.
TrainResult train_supervised(const OrdinaryDataset& ds, const ModelConfig& model,
                             const TrainConfig& cfg,
                             const OrdinaryDataset* test = nullptr);

/// argmax_k f_k(x); ties go to the smallest class index.
std::vector<int> predict_from_scores(const Matrix& scores);
std::vector<int> predict(const ModelParams& params, const Matrix& x);
double accuracy(const ModelParams& params, const OrdinaryDataset& ds);

/// CSV with header epoch,train_risk,test_acc (epochs numbered from 1).
void write_report_csv(const TrainReport& report, std::ostream& out);
void write_report_csv(const TrainReport& report, const std::string& path);

}  // namespace conu
