#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "conu/csv.hpp"
#include "conu/data.hpp"
#include "conu/model.hpp"
#include "conu/prior_estimation.hpp"
#include "conu/reproduce.hpp"
#include "conu/rng.hpp"
#include "conu/training.hpp"
#include "conu/trials.hpp"

namespace conu::cli {
namespace {

namespace fs = std::filesystem;

struct GenDataArgs {
  std::string benchmark = "separated";
  int q = 0;
  long long n_per_class = 0;
  long long d = 0;
  double separation = -1.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct GenClArgs {
  std::string in;
  std::string spec = "uniform";
  std::uint64_t seed = 0;
  std::string out;
};

struct PvuArgs {
  double gamma = 0.01;
  double delta = 0.1;
  double split = 0.8;
  std::string mixture = "unlabeled";
  std::string hidden = "64,64";
  long long epochs = 50;
};

struct EstimateArgs {
  std::string in;
  int q = 0;
  std::uint64_t seed = 0;
  PvuArgs pvu;
  std::string out;
};

struct TrainArgs {
  std::string train;
  std::string test;
  std::string priors = "uniform";
  double sigma = 0.0;
  std::string risk = "conu";
  std::string model = "mlp:64";
  int q = 0;
  long long epochs = 200;
  long long batch_size = 256;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

struct EvalArgs {
  std::string benchmark = "separated";
  int q = 0;
  long long n_per_class = 0;
  long long d = 0;
  double separation = -1.0;
  long long test_per_class = 0;
  std::string model;
  std::vector<std::string> methods = {"conu", "ure", "supervised"};
  std::vector<std::string> settings = {"uniform"};
  std::vector<double> sigmas = {0.0};
  std::string priors = "given";
  int seeds = 5;
  int jobs = 1;
  long long epochs = 200;
  long long batch_size = 256;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  std::uint64_t seed = 0;
  std::string checkpoint;
  std::string test;
  std::string out = "results.csv";
  std::string summary;
};

struct ReproduceArgs {
  std::vector<std::string> suites = {"all"};
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = ".";
};

GaussianMixtureSpec resolve_data(const std::string& benchmark, int q, long long n,
                                 long long d, double sep) {
  GaussianMixtureSpec g = benchmark_preset(benchmark).train;
  if (q > 0) g.q = q;
  if (n > 0) g.n_per_class = n;
  if (d > 0) g.d = d;
  if (sep >= 0.0) g.separation = sep;
  return g;
}

std::string sigma_label(double s) {
  std::ostringstream os;
  os << s;
  return os.str();
}

void ensure_parent(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

int cmd_gen_data(const GenDataArgs& a, std::ostream& out) {
  const auto spec = resolve_data(a.benchmark, a.q, a.n_per_class, a.d, a.separation);
  const auto ds = make_gaussian_mixture(spec, derive_seed(a.seed, "data"));
  ensure_parent(a.out);
  write_ordinary_csv(ds, a.out);
  read_ordinary_csv(a.out, ds.q).validate();
  out << "wrote " << ds.size() << " rows (q=" << ds.q << ", d=" << ds.dim() << ") to " << a.out << '\n';
  return 0;
}

int cmd_gen_cl(const GenClArgs& a, std::ostream& out) {
  const auto ds = read_ordinary_csv(a.in);
  const auto transition = parse_transition(a.spec, ds.q, label_frequencies(ds));
  const auto cds = gen_complementary(ds, transition, derive_seed(a.seed, "labels"));
  ensure_parent(a.out);
  write_complementary_csv(cds, a.out);
  read_complementary_csv(a.out, cds.q).validate();
  out << "wrote " << cds.size() << " complementary-labelled rows to " << a.out << '\n';
  return 0;
}

BbeConfig make_bbe(const PvuArgs& a) {
  BbeConfig cfg;
  cfg.gamma = a.gamma;
  cfg.delta = a.delta;
  cfg.split_fraction = a.split;
  cfg.mixture = parse_mixture_source(a.mixture);
  cfg.pvu_hidden = a.hidden.empty() ? std::vector<Index>{} : parse_model("mlp:" + a.hidden, 1, 2).hidden;
  cfg.pvu_train.epochs = a.epochs;
  cfg.validate();
  return cfg;
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const auto cds = read_complementary_csv(a.in, a.q);
  const auto est = estimate_priors_detailed(cds, make_bbe(a.pvu), derive_seed(a.seed, "prior-estimation"));
  ensure_parent(a.out);
  write_priors_csv(est.priors, a.out);
  read_priors_csv(a.out);
  for (int k = 0; k < cds.q; ++k)
    out << "class " << k + 1 << ": pi=" << est.priors.pi[static_cast<std::size_t>(k)]
        << " pi_bar=" << est.priors.pi_bar[static_cast<std::size_t>(k)]
        << " theta=" << est.theta[static_cast<std::size_t>(k)] << '\n';
  return 0;
}

TrainConfig make_train_config(long long epochs, long long batch, double lr, double wd,
                              std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.lr = lr;
  cfg.weight_decay = wd;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  std::unique_ptr<OrdinaryDataset> test;
  TrainConfig cfg = make_train_config(a.epochs, a.batch_size, a.lr, a.weight_decay,
                                      derive_seed(a.seed, "train"));
  TrainResult result;
  if (a.risk == "supervised") {
    const auto ds = read_ordinary_csv(a.train, a.q);
    if (!a.test.empty()) test = std::make_unique<OrdinaryDataset>(read_ordinary_csv(a.test, ds.q));
    result = train_supervised(ds, parse_model(a.model, ds.dim(), ds.q), cfg, test.get());
  } else {
    cfg.correction = parse_correction(a.risk);
    const auto cds = read_complementary_csv(a.train, a.q);
    if (!a.test.empty()) test = std::make_unique<OrdinaryDataset>(read_ordinary_csv(a.test, cds.q));
    ClassPriors priors;
    if (a.priors == "uniform") {
      priors = {std::vector<double>(static_cast<std::size_t>(cds.q), 1.0 / cds.q),
                complementary_priors(cds)};
    } else if (a.priors == "estimate") {
      priors = estimate_priors(cds, BbeConfig{}, derive_seed(a.seed, "prior-estimation"));
    } else {
      priors = read_priors_csv(a.priors);
    }
    priors = corrupt_priors(priors, a.sigma, derive_seed(a.seed, "corrupt"));
    result = train_conu(cds, priors, parse_model(a.model, cds.dim(), cds.q), cfg, test.get());
  }
  fs::create_directories(a.out_dir);
  const auto ckpt = (fs::path(a.out_dir) / "params.bin").string();
  const auto curves = (fs::path(a.out_dir) / "curves.csv").string();
  save_checkpoint(result.params, ckpt);
  write_report_csv(result.report, curves);
  if (load_checkpoint(ckpt).values != result.params.values)
    throw std::runtime_error("checkpoint did not read back identically");
  out << "final train risk " << result.report.train_risk.back();
  if (test) out << ", test accuracy " << result.report.test_acc.back();
  out << "\nwrote " << ckpt << " and " << curves << '\n';
  return 0;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  TrialTable table;
  if (!a.checkpoint.empty()) {
    if (a.test.empty()) throw std::invalid_argument("--checkpoint needs --test");
    const auto params = load_checkpoint(a.checkpoint);
    const auto test = read_ordinary_csv(a.test, static_cast<int>(params.config.output_dim));
    const double acc = accuracy(params, test);
    table.rows.push_back({"checkpoint", fs::path(a.checkpoint).filename().string(), 0, acc});
    table.summary.push_back(summarize("checkpoint", table.rows.back().setting, {acc}));
  } else {
    const auto preset = benchmark_preset(a.benchmark);
    ExperimentSpec spec;
    spec.train_data = resolve_data(a.benchmark, a.q, a.n_per_class, a.d, a.separation);
    spec.test_per_class = a.test_per_class > 0 ? a.test_per_class : preset.test_per_class;
    spec.model = a.model.empty() ? preset.model : a.model;
    spec.train = make_train_config(a.epochs, a.batch_size, a.lr, a.weight_decay, 0);
    spec.seed = a.seed;
    if (a.priors == "estimated") spec.priors = PriorSource::Estimated;
    else if (a.priors != "given") throw std::invalid_argument("--priors must be given or estimated");
    spec.methods.clear();
    for (const auto& m : a.methods) spec.methods.push_back(parse_method(m));
    spec.settings.clear();
    for (const auto& s : a.settings) {
      for (double sigma : a.sigmas) {
        std::string name = s;
        if (a.sigmas.size() > 1 || sigma != 0.0) name += "@sigma=" + sigma_label(sigma);
        spec.settings.push_back({name, s, sigma});
      }
    }
    table = run_trials(spec, a.seeds, a.jobs);
  }
  ensure_parent(a.out);
  {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot open '" + a.out + "' for writing");
    write_trials_csv(table, f);
  }
  const std::string summary = a.summary.empty()
                                  ? (fs::path(a.out).replace_extension().string() + "_summary.csv")
                                  : a.summary;
  {
    ensure_parent(summary);
    std::ofstream f(summary);
    if (!f) throw std::runtime_error("cannot open '" + summary + "' for writing");
    write_summary_csv(table, f);
  }
  for (const auto& s : table.summary)
    out << s.method << " / " << s.setting << ": " << s.mean << " +- " << s.std << " (" << s.runs
        << " runs)\n";
  out << "wrote " << a.out << " and " << summary << '\n';
  return 0;
}

int cmd_reproduce(const ReproduceArgs& a, std::ostream& out) {
  ReproduceOptions opts;
  opts.seed = a.seed;
  opts.jobs = a.jobs;
  opts.out_dir = a.out_dir;
  std::vector<CriterionResult> results;
  bool all_passed = true;
  std::vector<std::string> names;
  for (const auto& s : a.suites) {
    if (s == "all") names.insert(names.end(), suite_names().begin(), suite_names().end());
    else names.push_back(s);
  }
  for (const auto& name : names) {
    results.push_back(run_suite(name, opts));
    out << format_result(results.back()) << '\n' << std::flush;
    all_passed = all_passed && results.back().passed;
  }
  fs::create_directories(a.out_dir);
  const auto path = (fs::path(a.out_dir) / "reproduce_summary.csv").string();
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_results_csv(results, f);
  out << (all_passed ? "all criteria passed" : "some criteria FAILED") << "; summary in " << path << '\n';
  return all_passed ? 0 : 2;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning from complementary labels via negative-unlabeled risks"};
  app.name("conu");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI file; options go under a [subcommand] section");
  app.allow_config_extras(CLI::config_extras_mode::error);

  GenDataArgs gd;
  auto* gen_data = app.add_subcommand("gen-data", "Write a Gaussian-mixture ordinary-label CSV");
  gen_data->add_option("--benchmark", gd.benchmark, "Preset: separated or overfit")->capture_default_str();
  gen_data->add_option("--q", gd.q, "Class count (overrides preset)");
  gen_data->add_option("--n-per-class", gd.n_per_class, "Examples per class (overrides preset)");
  gen_data->add_option("--d", gd.d, "Feature dimension (overrides preset)");
  gen_data->add_option("--separation", gd.separation, "Distance of class centres from the origin");
  gen_data->add_option("--seed", gd.seed, "Seed")->capture_default_str();
  gen_data->add_option("--out", gd.out, "Output CSV (f0..f{d-1},y)")->required();

  GenClArgs gc;
  auto* gen_cl = app.add_subcommand("gen-cl", "Draw complementary labels for an ordinary CSV");
  gen_cl->add_option("--in", gc.in, "Ordinary-label CSV")->required();
  gen_cl->add_option("--spec", gc.spec,
                     "uniform | biased-a | biased-b | scar-a | scar-b | scar:c1,..,cq | scar-single:c1,..,cq")
      ->capture_default_str();
  gen_cl->add_option("--seed", gc.seed, "Seed")->capture_default_str();
  gen_cl->add_option("--out", gc.out, "Output CSV (f0..f{d-1},cl)")->required();

  auto add_pvu = [](CLI::App* sub, PvuArgs& p) {
    sub->add_option("--gamma", p.gamma, "BBE confidence weight")->capture_default_str();
    sub->add_option("--delta", p.delta, "BBE confidence level")->capture_default_str();
    sub->add_option("--split", p.split, "Training fraction of the train/validation split")->capture_default_str();
    sub->add_option("--mixture", p.mixture, "Mixture sample: unlabeled or all")->capture_default_str();
    sub->add_option("--pvu-hidden", p.hidden, "Hidden widths of the PvU scorer (empty = linear)")
        ->capture_default_str();
    sub->add_option("--pvu-epochs", p.epochs, "PvU training epochs")->capture_default_str();
  };

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate-priors", "Estimate class priors from complementary labels");
  estimate->add_option("--in", ea.in, "Complementary-label CSV")->required();
  estimate->add_option("--q", ea.q, "Class count (default: largest index in the file)");
  estimate->add_option("--seed", ea.seed, "Seed")->capture_default_str();
  add_pvu(estimate, ea.pvu);
  estimate->add_option("--out", ea.out, "Output CSV (k,pi_k,pi_bar_k)")->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a scorer; writes params.bin and curves.csv");
  train->add_option("--train", ta.train, "Training CSV (complementary; ordinary for --risk supervised)")
      ->required();
  train->add_option("--test", ta.test, "Ordinary-label test CSV for the accuracy curve");
  train->add_option("--priors", ta.priors, "Priors CSV, 'uniform' or 'estimate'")->capture_default_str();
  train->add_option("--sigma", ta.sigma, "Multiplicative prior noise N(1, sigma^2)")->capture_default_str();
  train->add_option("--risk", ta.risk, "conu (|.| correction) | relu | ure | supervised")->capture_default_str();
  train->add_option("--model", ta.model, "linear | mlp | mlp:w1,w2,...")->capture_default_str();
  train->add_option("--q", ta.q, "Class count (default: inferred from the file)");
  train->add_option("--epochs", ta.epochs, "Epochs")->capture_default_str();
  train->add_option("--batch-size", ta.batch_size, "Mini-batch size")->capture_default_str();
  train->add_option("--lr", ta.lr, "Adam learning rate")->capture_default_str();
  train->add_option("--weight-decay", ta.weight_decay, "Decoupled weight decay")->capture_default_str();
  train->add_option("--seed", ta.seed, "Seed")->capture_default_str();
  train->add_option("--out-dir", ta.out_dir, "Output directory")->capture_default_str();

  EvalArgs va;
  auto* eval = app.add_subcommand("eval", "Multi-seed accuracy table, or accuracy of a checkpoint");
  eval->add_option("--benchmark", va.benchmark, "Preset: separated or overfit")->capture_default_str();
  eval->add_option("--q", va.q, "Class count (overrides preset)");
  eval->add_option("--n-per-class", va.n_per_class, "Training examples per class");
  eval->add_option("--d", va.d, "Feature dimension");
  eval->add_option("--separation", va.separation, "Class centre distance");
  eval->add_option("--test-per-class", va.test_per_class, "Test examples per class");
  eval->add_option("--model", va.model, "Model (default: preset)");
  eval->add_option("--methods", va.methods, "conu, ure, supervised")->delimiter(',')->capture_default_str();
  eval->add_option("--settings", va.settings, "Complementary-label generators")->delimiter(',')->capture_default_str();
  eval->add_option("--sigmas", va.sigmas, "Prior noise levels")->delimiter(',')->capture_default_str();
  eval->add_option("--priors", va.priors, "given or estimated")->capture_default_str();
  eval->add_option("--seeds", va.seeds, "Number of seeds")->capture_default_str();
  eval->add_option("--jobs", va.jobs, "Concurrent seeds")->capture_default_str();
  eval->add_option("--epochs", va.epochs, "Epochs")->capture_default_str();
  eval->add_option("--batch-size", va.batch_size, "Mini-batch size")->capture_default_str();
  eval->add_option("--lr", va.lr, "Adam learning rate")->capture_default_str();
  eval->add_option("--weight-decay", va.weight_decay, "Decoupled weight decay")->capture_default_str();
  eval->add_option("--seed", va.seed, "Base seed")->capture_default_str();
  eval->add_option("--checkpoint", va.checkpoint, "Evaluate this checkpoint instead of running trials");
  eval->add_option("--test", va.test, "Ordinary-label CSV used with --checkpoint");
  eval->add_option("--out", va.out, "Per-run table (method,setting,seed,acc)")->capture_default_str();
  eval->add_option("--summary", va.summary, "Aggregated table (method,setting,mean,std)");

  ReproduceArgs ra;
  auto* reproduce = app.add_subcommand("reproduce", "Run the desk-scale verification suite");
  reproduce->add_option("--suite", ra.suites, "Suite name(s) or 'all'")->capture_default_str();
  reproduce->add_option("--seed", ra.seed, "Seed")->capture_default_str();
  reproduce->add_option("--jobs", ra.jobs, "Concurrent seeds in multi-seed suites")->capture_default_str();
  reproduce->add_option("--out-dir", ra.out_dir, "Where to write reproduce_summary.csv")->capture_default_str();

  std::vector<const char*> argv{"conu"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0 && !dynamic_cast<const CLI::CallForHelp*>(&e)) err << app.help();
    return code;
  }

  try {
    if (*gen_data) return cmd_gen_data(gd, out);
    if (*gen_cl) return cmd_gen_cl(gc, out);
    if (*estimate) return cmd_estimate(ea, out);
    if (*train) return cmd_train(ta, out);
    if (*eval) return cmd_eval(va, out);
    if (*reproduce) return cmd_reproduce(ra, out);
  } catch (const ParseError& e) {
    err << "conu: parse error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "conu: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 1;
}

}  // namespace conu::cli
