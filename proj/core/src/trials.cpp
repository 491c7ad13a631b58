#include "conu/trials.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "conu/csv.hpp"
#include "conu/rng.hpp"

namespace conu {

BenchmarkPreset benchmark_preset(std::string_view name) {
  if (name == "separated") return {{4, 1000, 2, 6.0}, 500, "mlp:64"};
  if (name == "overfit") return {{10, 50, 10, 2.5}, 100, "mlp:300,300,300"};
  throw std::invalid_argument("unknown benchmark '" + std::string(name) + "'");
}

Method parse_method(std::string_view name) {
  if (name == "conu") return Method::Conu;
  if (name == "ure") return Method::Ure;
  if (name == "supervised") return Method::Supervised;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Conu: return "conu";
    case Method::Ure: return "ure";
    case Method::Supervised: return "supervised";
  }
  return "?";
}

const TrialSummary& TrialTable::find(std::string_view method, std::string_view setting) const {
  for (const auto& s : summary)
    if (s.method == method && s.setting == setting) return s;
  throw std::out_of_range("no summary for " + std::string(method) + "/" + std::string(setting));
}

TrialSummary summarize(std::string_view method, std::string_view setting,
                       const std::vector<double>& accs) {
  TrialSummary s{std::string(method), std::string(setting), 0.0, 0.0, accs.size()};
  if (accs.empty()) return s;
  for (double a : accs) s.mean += a;
  s.mean /= static_cast<double>(accs.size());
  if (accs.size() > 1) {
    double ss = 0.0;
    for (double a : accs) ss += (a - s.mean) * (a - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(accs.size() - 1));
  }
  return s;
}

namespace {

std::vector<TrialRow> run_one_seed(const ExperimentSpec& spec, const OrdinaryDataset& train,
                                   const OrdinaryDataset& test, std::uint64_t seed) {
  const std::uint64_t trial_seed = derive_seed(spec.seed, "trial", seed);
  const ModelConfig model = parse_model(spec.model, train.dim(), train.q);
  const auto truth_pi = label_frequencies(train);
  std::vector<TrialRow> rows;
  double supervised_acc = std::nan("");

  for (const auto& setting : spec.settings) {
    ComplementaryDataset cds;
    ClassPriors priors;
    bool have_cl = false;
    auto ensure_cl = [&] {
      if (have_cl) return;
      const auto transition = parse_transition(setting.transition, train.q, truth_pi);
      cds = gen_complementary(train, transition, derive_seed(trial_seed, "labels"));
      if (spec.priors == PriorSource::Estimated) {
        priors = estimate_priors(cds, spec.bbe, derive_seed(trial_seed, "prior-estimation"));
      } else {
        priors = {truth_pi, complementary_priors(cds)};
      }
      priors = corrupt_priors(priors, setting.prior_sigma, derive_seed(trial_seed, "corrupt"));
      have_cl = true;
    };
    for (Method m : spec.methods) {
      TrainConfig cfg = spec.train;
      cfg.seed = derive_seed(trial_seed, "train");
      cfg.record_curves = true;
      double acc = 0.0;
      if (m == Method::Supervised) {
        if (std::isnan(supervised_acc))
          supervised_acc =
              train_supervised(train, model, cfg, &test).report.tail_accuracy(spec.tail_epochs);
        acc = supervised_acc;
      } else {
        ensure_cl();
        cfg.correction = m == Method::Conu ? Correction::Abs : Correction::Identity;
        acc = train_conu(cds, priors, model, cfg, &test).report.tail_accuracy(spec.tail_epochs);
      }
      rows.push_back({std::string(to_string(m)), setting.name, seed, acc});
    }
  }
  return rows;
}

}  // namespace

TrialTable run_trials(const ExperimentSpec& spec, int n_seeds, int jobs) {
  if (n_seeds < 1) throw std::invalid_argument("run_trials: need at least one seed");
  if (spec.methods.empty() || spec.settings.empty())
    throw std::invalid_argument("run_trials: no methods or settings");
  const OrdinaryDataset train = make_gaussian_mixture(spec.train_data, derive_seed(spec.seed, "data"));
  GaussianMixtureSpec test_spec = spec.train_data;
  test_spec.n_per_class = spec.test_per_class;
  const OrdinaryDataset test = make_gaussian_mixture(test_spec, derive_seed(spec.seed, "test"));

  std::vector<std::vector<TrialRow>> per_seed(static_cast<std::size_t>(n_seeds));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_seeds));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s; (s = next.fetch_add(1)) < n_seeds;) {
      try {
        per_seed[static_cast<std::size_t>(s)] =
            run_one_seed(spec, train, test, static_cast<std::uint64_t>(s));
      } catch (...) {
        errors[static_cast<std::size_t>(s)] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, n_seeds);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  TrialTable table;
  for (auto& rows : per_seed)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  for (const auto& setting : spec.settings) {
    for (Method m : spec.methods) {
      std::vector<double> accs;
      for (const auto& r : table.rows)
        if (r.method == to_string(m) && r.setting == setting.name) accs.push_back(r.acc);
      table.summary.push_back(summarize(to_string(m), setting.name, accs));
    }
  }
  return table;
}

void write_trials_csv(const TrialTable& table, std::ostream& out) {
  out << "method,setting,seed,acc\n";
  for (const auto& r : table.rows)
    out << r.method << ',' << r.setting << ',' << r.seed << ',' << format_double(r.acc) << '\n';
}

void write_summary_csv(const TrialTable& table, std::ostream& out) {
  out << "method,setting,mean,std\n";
  for (const auto& s : table.summary)
    out << s.method << ',' << s.setting << ',' << format_double(s.mean) << ','
        << format_double(s.std) << '\n';
}

}  // namespace conu
