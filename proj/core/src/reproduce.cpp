#include "conu/reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "conu/data.hpp"
#include "conu/exact_risk.hpp"
#include "conu/model.hpp"
#include "conu/optim.hpp"
#include "conu/prior_estimation.hpp"
#include "conu/risk.hpp"
#include "conu/rng.hpp"
#include "conu/training.hpp"
#include "conu/trials.hpp"

namespace conu {
namespace {

std::string strf(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
  return r;
}

ClassPriors truth_priors(const OrdinaryDataset& ds, const ComplementaryDataset& cds) {
  return {label_frequencies(ds), complementary_priors(cds)};
}

// 1 -----------------------------------------------------------------------
CriterionResult suite_identity(const ReproduceOptions& opts) {
  CriterionResult r{1, "identity", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  Engine rng = make_engine(opts.seed, "identity");
  std::uniform_int_distribution<int> pick_q(2, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> c_dist(0.1, 0.9);
  double worst = 0.0;
  constexpr int kTrials = 100;
  constexpr Index kDim = 3;
  for (int t = 0; t < kTrials; ++t) {
    DiscreteDistribution dist;
    dist.q = pick_q(rng);
    const int m = std::uniform_int_distribution<int>(1, 10)(rng);
    dist.points = Matrix::NullaryExpr(m, kDim, [&] { return 4.0 * unit(rng) - 2.0; });
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      dist.labels.push_back(std::uniform_int_distribution<int>(0, dist.q - 1)(rng));
      dist.masses.push_back(0.05 + unit(rng));
      total += dist.masses.back();
    }
    for (double& w : dist.masses) w /= total;
    for (int k = 0; k < dist.q; ++k) dist.flag_probs.push_back(c_dist(rng));
    ModelParams params = zero_params(ModelConfig::linear(kDim, dist.q));
    for (Index i = 0; i < params.size(); ++i) params.values(i) = 4.0 * unit(rng) - 2.0;
    const auto ex = exact_risks(dist, params);
    worst = std::max(worst, std::abs(ex.ovr - ex.nu));
  }
  r.seconds = elapsed_since(t0);
  r.passed = worst < 1e-10 && r.seconds < 5.0;
  r.detail = strf("max |ovr - nu| over %d distributions = %.3g (< 1e-10), runtime %.2fs (< 5s)",
                  kTrials, worst, r.seconds);
  return r;
}

// 2 -----------------------------------------------------------------------
CriterionResult suite_unbiased(const ReproduceOptions& opts) {
  CriterionResult r{2, "unbiased", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  // Population: a fixed draw of 3-class Gaussian points with uniform mass.
  const auto pop = make_gaussian_mixture({3, 200, 2, 2.0}, derive_seed(opts.seed, "mc-population"));
  DiscreteDistribution dist;
  dist.q = 3;
  dist.points = pop.features;
  dist.labels = pop.labels;
  dist.masses.assign(pop.labels.size(), 1.0 / static_cast<double>(pop.labels.size()));
  dist.flag_probs = {0.3, 0.5, 0.4};
  const ModelParams params = init_params(ModelConfig::mlp(2, 3, {16, 16}), derive_seed(opts.seed, "mc-params"));
  const auto exact = exact_risks(dist, params);
  const ClassPriors priors = dist.priors();

  constexpr int kResamples = 2000;
  constexpr Index kSampleSize = 200;
  std::vector<double> ure, corrected;
  ure.reserve(kResamples);
  corrected.reserve(kResamples);
  const RiskSpec ure_spec{Correction::Identity, priors};
  const RiskSpec abs_spec{Correction::Abs, priors};
  for (int t = 0; t < kResamples; ++t) {
    const auto sample = sample_complementary(dist, kSampleSize,
                                             derive_seed(opts.seed, "mc-sample", static_cast<std::uint64_t>(t)));
    const Matrix scores = forward(params, sample.features);
    ure.push_back(risk_with_grad(scores, sample.comp, ure_spec, nullptr).total);
    corrected.push_back(risk_with_grad(scores, sample.comp, abs_spec, nullptr).total);
  }
  const auto u = mean_se(ure);
  const auto c = mean_se(corrected);
  r.seconds = elapsed_since(t0);
  const bool unbiased = std::abs(u.mean - exact.ovr) <= 3.0 * u.se;
  const bool bias_sign = c.mean - exact.ovr >= -3.0 * c.se;
  const bool routes = std::abs(exact.ovr - exact.nu) < 1e-10;
  r.passed = unbiased && bias_sign && routes && r.seconds < 120.0;
  r.detail = strf(
      "exact R = %.6f; URE mean = %.6f (|diff| %.2e <= 3 SE = %.2e: %s); corrected mean - R = %.2e "
      "(>= -3 SE: %s); runtime %.1fs (< 120s)",
      exact.ovr, u.mean, std::abs(u.mean - exact.ovr), 3.0 * u.se, unbiased ? "yes" : "no",
      c.mean - exact.ovr, bias_sign ? "yes" : "no", r.seconds);
  return r;
}

// 3 -----------------------------------------------------------------------
CriterionResult suite_dominance(const ReproduceOptions& opts) {
  CriterionResult r{3, "dominance", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  Engine rng = make_engine(opts.seed, "dominance");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 2.0);
  constexpr int kInstances = 1000;
  int violations = 0, equality_failures = 0, all_nonneg_cases = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < kInstances; ++t) {
    const int q = std::uniform_int_distribution<int>(2, 5)(rng);
    const Index n = std::uniform_int_distribution<Index>(1, 30)(rng);
    const Matrix scores = Matrix::NullaryExpr(n, q, [&] { return normal(rng); });
    BitMatrix comp = BitMatrix::Zero(n, q);
    for (Index i = 0; i < n; ++i) {
      const int skip = std::uniform_int_distribution<int>(0, q - 1)(rng);
      for (int k = 0; k < q; ++k)
        if (k != skip && unit(rng) < 0.4) comp(i, k) = 1;
    }
    ClassPriors priors;
    double total = 0.0;
    for (int k = 0; k < q; ++k) {
      priors.pi.push_back(unit(rng) + 1e-3);
      total += priors.pi.back();
    }
    for (double& p : priors.pi) p /= total;
    for (int k = 0; k < q; ++k)
      priors.pi_bar.push_back(unit(rng) * (1.0 - priors.pi[static_cast<std::size_t>(k)]));
    const auto dec = decompose(comp);
    const double ure = ure_risk(scores, dec, priors);
    const double abs_risk = corrected_risk(scores, dec, priors, Correction::Abs);
    const double relu_risk = corrected_risk(scores, dec, priors, Correction::Relu);
    if (abs_risk < ure - 1e-12 || relu_risk < ure - 1e-12) ++violations;
    const auto parts = risk_with_grad(scores, dec, {Correction::Identity, priors}, nullptr);
    if (parts.min_positive_part() >= 0.0) {
      ++all_nonneg_cases;
      worst_gap = std::max(worst_gap, std::abs(abs_risk - ure));
      if (std::abs(abs_risk - ure) > 1e-12) ++equality_failures;
    }
  }
  r.seconds = elapsed_since(t0);
  r.passed = violations == 0 && equality_failures == 0;
  r.detail = strf("%d instances: %d dominance violations; %d with all R^P_k >= 0, max |corrected - ure| = %.2g",
                  kInstances, violations, all_nonneg_cases, worst_gap);
  return r;
}

// 4 -----------------------------------------------------------------------
CriterionResult suite_gradients(const ReproduceOptions& opts) {
  CriterionResult r{4, "gradients", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  for (const std::string arch : {"linear", "mlp:16,16"}) {
    // Find a batch and parameter vector where some positive part is negative
    // and no positive part sits at a kink.
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < 50 && !found; ++attempt) {
      const auto data = make_gaussian_mixture({4, 16, 2, 3.0},
                                              derive_seed(opts.seed, "grad-data", attempt));
      const auto cds = gen_complementary(data, UniformTransition{},
                                         derive_seed(opts.seed, "grad-labels", attempt));
      const ClassPriors priors = truth_priors(data, cds);
      const ModelConfig mc = parse_model(arch, 2, 4);
      TrainConfig tc;
      tc.epochs = 30;
      tc.batch_size = 16;
      tc.lr = 1e-2;
      tc.weight_decay = 0.0;
      tc.record_curves = false;
      tc.seed = derive_seed(opts.seed, "grad-init", attempt);
      ModelParams params = train_supervised(data, mc, tc).params;
      const Vector theta = params.values;

      const auto parts = risk_and_grad(params, cds.features, cds.comp, {Correction::Identity, priors}).breakdown;
      double min_abs = std::numeric_limits<double>::infinity();
      for (const auto& c : parts.classes) min_abs = std::min(min_abs, std::abs(c.positive_part));
      if (parts.min_positive_part() >= 0.0 || min_abs < 1e-2) continue;
      found = true;

      for (Correction g : {Correction::Identity, Correction::Abs}) {
        const RiskSpec spec{g, priors};
        ModelParams probe = params;
        Objective f = [&](const Vector& th, Vector* grad) {
          probe.values = th;
          if (grad) {
            auto rg = risk_and_grad(probe, cds.features, cds.comp, spec);
            *grad = rg.grad;
            return rg.risk;
          }
          return risk_with_grad(forward(probe, cds.features), cds.comp, spec, nullptr).total;
        };
        KinkDistance kink;
        if (g == Correction::Abs) {
          kink = [&](const Vector& th) {
            probe.values = th;
            const auto b = risk_with_grad(forward(probe, cds.features), cds.comp, spec, nullptr);
            double m = std::numeric_limits<double>::infinity();
            for (const auto& c : b.classes) m = std::min(m, std::abs(c.positive_part));
            return m;
          };
        }
        GradCheckOptions go;
        go.h = 1e-5;
        go.max_coords = theta.size() > 400 ? 300 : 0;
        go.seed = derive_seed(opts.seed, "grad-coords");
        const auto res = grad_check(theta, f, go, kink);
        const bool pass = res.max_rel_error < 1e-5 && res.checked > 0;
        ok = ok && pass;
        detail += strf("%s/%s: max rel err %.2e over %lld coords (%lld excluded); ", arch.c_str(),
                       std::string(to_string(g)).c_str(), res.max_rel_error,
                       static_cast<long long>(res.checked), static_cast<long long>(res.excluded));
      }
      detail += strf("%s min R^P_k = %.3f; ", arch.c_str(), parts.min_positive_part());
    }
    if (!found) {
      ok = false;
      detail += arch + ": no batch with a negative positive part found; ";
    }
  }
  r.seconds = elapsed_since(t0);
  r.passed = ok;
  r.detail = detail + "threshold 1e-5, h = 1e-5";
  return r;
}

// 5 -----------------------------------------------------------------------
CriterionResult suite_bbe(const ReproduceOptions& opts) {
  CriterionResult r{5, "bbe", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  constexpr double kTheta = 0.7;
  constexpr int kSeeds = 5;
  constexpr int kN = 5000;
  int good = 0;
  std::string thetas;
  for (int s = 0; s < kSeeds; ++s) {
    Engine rng = make_engine(opts.seed, "bbe", static_cast<std::uint64_t>(s));
    std::normal_distribution<double> component(4.0, 1.0), other(0.0, 1.0);
    std::bernoulli_distribution from_component(kTheta);
    std::vector<double> zp(kN), zu(kN);
    for (auto& z : zp) z = sigmoid(component(rng) - 2.0);
    for (auto& z : zu) z = sigmoid((from_component(rng) ? component(rng) : other(rng)) - 2.0);
    const double theta = bbe_theta(zp, zu, 0.01, 0.1);
    good += std::abs(theta - kTheta) <= 0.05;
    thetas += strf("%s%.4f", s ? ", " : "", theta);
  }
  r.seconds = elapsed_since(t0);
  r.passed = good >= 4;
  r.detail = strf("theta_hat = [%s]; %d/%d within 0.05 of 0.7 (need >= 4)", thetas.c_str(), good, kSeeds);
  return r;
}

// 6 -----------------------------------------------------------------------
CriterionResult suite_priors(const ReproduceOptions& opts) {
  CriterionResult r{6, "priors", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = make_gaussian_mixture({4, 2000, 2, 6.0}, derive_seed(opts.seed, "priors-data"));
  const auto cds = gen_complementary(data, ScarIndependent{{0.5, 0.5, 0.5, 0.5}},
                                     derive_seed(opts.seed, "priors-labels"));
  const auto est = estimate_priors_detailed(cds, BbeConfig{}, derive_seed(opts.seed, "priors-est"));
  double worst = 0.0;
  std::string values;
  for (std::size_t k = 0; k < est.priors.pi.size(); ++k) {
    worst = std::max(worst, std::abs(est.priors.pi[k] - 0.25));
    values += strf("%s%.4f", k ? ", " : "", est.priors.pi[k]);
  }
  r.seconds = elapsed_since(t0);
  r.passed = worst <= 0.03 && r.seconds < 300.0;
  r.detail = strf("pi_hat = [%s]; max |pi_hat - 0.25| = %.4f (<= 0.03); runtime %.1fs (< 300s)",
                  values.c_str(), worst, r.seconds);
  return r;
}

// 7 -----------------------------------------------------------------------
CriterionResult suite_overfit(const ReproduceOptions& opts) {
  CriterionResult r{7, "overfit", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const auto preset = benchmark_preset("overfit");
  const auto train = make_gaussian_mixture(preset.train, derive_seed(opts.seed, "fig2-data"));
  GaussianMixtureSpec test_spec = preset.train;
  test_spec.n_per_class = preset.test_per_class;
  const auto test = make_gaussian_mixture(test_spec, derive_seed(opts.seed, "fig2-test"));
  const auto cds = gen_complementary(train, UniformTransition{}, derive_seed(opts.seed, "fig2-labels"));
  const ClassPriors priors = truth_priors(train, cds);
  const ModelConfig mc = parse_model(preset.model, train.dim(), train.q);

  TrainConfig cfg;
  cfg.seed = derive_seed(opts.seed, "fig2-train");
  cfg.correction = Correction::Identity;
  const auto ure = train_conu(cds, priors, mc, cfg, &test);
  cfg.correction = Correction::Abs;
  const auto conu = train_conu(cds, priors, mc, cfg, &test);

  const auto& ur = ure.report.train_risk;
  const auto neg = std::find_if(ur.begin(), ur.end(), [](double v) { return v < 0.0; });
  const double conu_min = *std::min_element(conu.report.train_risk.begin(), conu.report.train_risk.end());
  const double ure_acc = ure.report.test_acc.back();
  const double conu_acc = conu.report.test_acc.back();
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    write_report_csv(ure.report, (std::filesystem::path(opts.out_dir) / "overfit_ure.csv").string());
    write_report_csv(conu.report, (std::filesystem::path(opts.out_dir) / "overfit_conu.csv").string());
  }
  r.seconds = elapsed_since(t0);
  r.passed = neg != ur.end() && conu_min >= 0.0 && conu_acc >= ure_acc;
  r.detail = strf(
      "URE train risk first negative at epoch %s (min %.3f); CONU min train risk %.4f (>= 0); "
      "final test acc CONU %.4f vs URE %.4f",
      neg == ur.end() ? "never" : std::to_string(neg - ur.begin() + 1).c_str(),
      *std::min_element(ur.begin(), ur.end()), conu_min, conu_acc, ure_acc);
  return r;
}

ExperimentSpec separated_experiment(const ReproduceOptions& opts) {
  const auto preset = benchmark_preset("separated");
  ExperimentSpec spec;
  spec.train_data = preset.train;
  spec.test_per_class = preset.test_per_class;
  spec.model = preset.model;
  spec.seed = derive_seed(opts.seed, "separated");
  return spec;
}

double nearest_centroid_accuracy(const OrdinaryDataset& train, const OrdinaryDataset& test) {
  Matrix centroids = Matrix::Zero(train.q, train.dim());
  Vector counts = Vector::Zero(train.q);
  for (Index i = 0; i < train.size(); ++i) {
    centroids.row(train.labels[static_cast<std::size_t>(i)]) += train.features.row(i);
    counts(train.labels[static_cast<std::size_t>(i)]) += 1.0;
  }
  for (int k = 0; k < train.q; ++k) centroids.row(k) /= counts(k);
  std::size_t hit = 0;
  for (Index i = 0; i < test.size(); ++i) {
    Index best = 0;
    (centroids.rowwise() - test.features.row(i)).rowwise().squaredNorm().minCoeff(&best);
    hit += static_cast<int>(best) == test.labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(hit) / static_cast<double>(test.size());
}

// 8 -----------------------------------------------------------------------
CriterionResult suite_learning(const ReproduceOptions& opts) {
  CriterionResult r{8, "learning", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentSpec spec = separated_experiment(opts);
  spec.methods = {Method::Conu, Method::Supervised};
  const auto train = make_gaussian_mixture(spec.train_data, derive_seed(spec.seed, "data"));
  GaussianMixtureSpec ts = spec.train_data;
  ts.n_per_class = spec.test_per_class;
  const auto test = make_gaussian_mixture(ts, derive_seed(spec.seed, "test"));
  const double nc = nearest_centroid_accuracy(train, test);

  const auto table = run_trials(spec, 5, opts.jobs);
  const auto& conu = table.find("conu", "uniform");
  const auto& sup = table.find("supervised", "uniform");
  r.seconds = elapsed_since(t0);
  r.passed = nc >= 0.99 && conu.mean >= 0.90 && sup.mean - conu.mean <= 0.05;
  r.detail = strf("nearest-centroid %.4f (>= 0.99); CONU %.4f +- %.4f (>= 0.90); supervised %.4f +- %.4f "
                  "(gap %.4f <= 0.05)",
                  nc, conu.mean, conu.std, sup.mean, sup.std, sup.mean - conu.mean);
  return r;
}

// 9 -----------------------------------------------------------------------
CriterionResult suite_sensitivity(const ReproduceOptions& opts) {
  CriterionResult r{9, "sensitivity", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentSpec spec = separated_experiment(opts);
  spec.methods = {Method::Conu};
  spec.settings = {{"sigma=0", "uniform", 0.0}, {"sigma=0.1", "uniform", 0.1}, {"sigma=0.3", "uniform", 0.3}};
  const auto table = run_trials(spec, 5, opts.jobs);
  const double m0 = table.find("conu", "sigma=0").mean;
  const double m1 = table.find("conu", "sigma=0.1").mean;
  const double m3 = table.find("conu", "sigma=0.3").mean;
  r.seconds = elapsed_since(t0);
  r.passed = m0 >= m3 - 0.01;
  r.detail = strf("mean acc sigma=0: %.4f, 0.1: %.4f, 0.3: %.4f (need sigma=0 >= sigma=0.3 - 0.01)", m0, m1, m3);
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"identity", "unbiased", "dominance",
                                                 "gradients", "bbe",      "priors",
                                                 "overfit",  "learning",  "sensitivity"};
  return names;
}

CriterionResult run_suite(std::string_view name, const ReproduceOptions& opts) {
  if (name == "identity") return suite_identity(opts);
  if (name == "unbiased") return suite_unbiased(opts);
  if (name == "dominance") return suite_dominance(opts);
  if (name == "gradients") return suite_gradients(opts);
  if (name == "bbe") return suite_bbe(opts);
  if (name == "priors") return suite_priors(opts);
  if (name == "overfit") return suite_overfit(opts);
  if (name == "learning") return suite_learning(opts);
  if (name == "sensitivity") return suite_sensitivity(opts);
  throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

std::vector<CriterionResult> run_suites(const std::vector<std::string>& names,
                                        const ReproduceOptions& opts) {
  std::vector<std::string> expanded;
  for (const auto& n : names) {
    if (n == "all") {
      expanded.insert(expanded.end(), suite_names().begin(), suite_names().end());
    } else {
      expanded.push_back(n);
    }
  }
  std::vector<CriterionResult> out;
  for (const auto& n : expanded) out.push_back(run_suite(n, opts));
  return out;
}

std::string format_result(const CriterionResult& r) {
  return strf("[%s] %d %s: %s (%.2f s)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
              r.detail.c_str(), r.seconds);
}

void write_results_csv(const std::vector<CriterionResult>& results, std::ostream& out) {
  out << "id,name,passed,seconds,detail\n";
  for (const auto& r : results) {
    std::string d = r.detail;
    std::replace(d.begin(), d.end(), '"', '\'');
    out << r.id << ',' << r.name << ',' << (r.passed ? 1 : 0) << ',' << strf("%.3f", r.seconds)
        << ",\"" << d << "\"\n";
  }
}

}  // namespace conu
