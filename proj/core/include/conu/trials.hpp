#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "conu/data.hpp"
#include "conu/prior_estimation.hpp"
#include "conu/training.hpp"

namespace conu {

/// Desk-scale synthetic benchmarks.
///  separated: q=4, d=2, centres on a circle of radius 6, 1000 per class,
///             MLP [64]. Nearest-centroid accuracy is about 0.99+.
///  overfit:   q=10, d=10, axis centres at distance 2.5, 50 per class,
///             MLP [300,300,300]; small enough for the plain estimator to
///             drive its training risk below zero.
struct BenchmarkPreset {
  GaussianMixtureSpec train;
  Index test_per_class = 500;
  std::string model;
};

BenchmarkPreset benchmark_preset(std::string_view name);

enum class Method { Conu, Ure, Supervised };

Method parse_method(std::string_view name);
std::string_view to_string(Method m);

/// One column of the results table: a complementary-label generator and an
/// optional prior perturbation.
struct TrialSetting {
  std::string name;
  std::string transition = "uniform";
  double prior_sigma = 0.0;
};

enum class PriorSource { Given, Estimated };

struct ExperimentSpec {
  GaussianMixtureSpec train_data;
  Index test_per_class = 500;
  std::vector<Method> methods = {Method::Conu};
  std::vector<TrialSetting> settings = {{"uniform", "uniform", 0.0}};
  std::string model = "mlp:64";
  TrainConfig train;
  PriorSource priors = PriorSource::Given;
  BbeConfig bbe;
  std::uint64_t seed = 0;
  std::size_t tail_epochs = 10;
};

struct TrialRow {
  std::string method;
  std::string setting;
  std::uint64_t seed = 0;
  double acc = 0.0;
};

struct TrialSummary {
  std::string method;
  std::string setting;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
  std::size_t runs = 0;
};

struct TrialTable {
  std::vector<TrialRow> rows;
  std::vector<TrialSummary> summary;

  const TrialSummary& find(std::string_view method, std::string_view setting) const;
};

/// For each seed 0..n_seeds-1: regenerate complementary labels, derive the
/// priors, reinitialise and train every method under every setting. A run
/// scores the mean test accuracy of its last `tail_epochs` epochs. Seeds may
/// run on up to `jobs` threads; rows come back in seed order regardless.
TrialTable run_trials(const ExperimentSpec& spec, int n_seeds, int jobs = 1);

TrialSummary summarize(std::string_view method, std::string_view setting,
                       const std::vector<double>& accs);

/// method,setting,seed,acc
void write_trials_csv(const TrialTable& table, std::ostream& out);
/// method,setting,mean,std
void write_summary_csv(const TrialTable& table, std::ostream& out);

}  // namespace conu
