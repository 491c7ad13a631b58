#include "conu/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "conu/rng.hpp"

namespace conu {
namespace {

constexpr double kSimplexTol = 1e-9;

// Reference tables, row-major, three decimals as published.
constexpr double kBiasedA[10][10] = {
    {0, 0.250, 0.043, 0.040, 0.043, 0.040, 0.250, 0.040, 0.250, 0.043},
    {0.043, 0, 0.250, 0.043, 0.040, 0.043, 0.040, 0.250, 0.040, 0.250},
    {0.250, 0.043, 0, 0.250, 0.043, 0.040, 0.043, 0.040, 0.250, 0.040},
    {0.040, 0.250, 0.043, 0, 0.250, 0.043, 0.040, 0.043, 0.040, 0.250},
    {0.250, 0.040, 0.250, 0.043, 0, 0.250, 0.043, 0.040, 0.043, 0.040},
    {0.040, 0.250, 0.040, 0.250, 0.043, 0, 0.250, 0.043, 0.040, 0.043},
    {0.043, 0.040, 0.250, 0.040, 0.250, 0.043, 0, 0.250, 0.043, 0.040},
    {0.040, 0.043, 0.040, 0.250, 0.040, 0.250, 0.043, 0, 0.250, 0.043},
    {0.043, 0.040, 0.043, 0.040, 0.250, 0.040, 0.250, 0.043, 0, 0.250},
    {0.250, 0.043, 0.040, 0.043, 0.040, 0.250, 0.040, 0.250, 0.043, 0},
};

constexpr double kBiasedB[10][10] = {
    {0, 0.220, 0.080, 0.033, 0.080, 0.033, 0.220, 0.033, 0.220, 0.080},
    {0.080, 0, 0.220, 0.080, 0.033, 0.080, 0.033, 0.220, 0.033, 0.220},
    {0.220, 0.080, 0, 0.220, 0.080, 0.033, 0.080, 0.033, 0.220, 0.033},
    {0.033, 0.220, 0.080, 0, 0.220, 0.080, 0.033, 0.080, 0.033, 0.220},
    {0.220, 0.033, 0.220, 0.080, 0, 0.220, 0.080, 0.033, 0.080, 0.033},
    {0.033, 0.220, 0.033, 0.220, 0.080, 0, 0.220, 0.080, 0.033, 0.080},
    {0.080, 0.033, 0.220, 0.033, 0.220, 0.080, 0, 0.220, 0.080, 0.033},
    {0.033, 0.080, 0.033, 0.220, 0.033, 0.220, 0.080, 0, 0.220, 0.080},
    {0.080, 0.033, 0.080, 0.033, 0.220, 0.033, 0.220, 0.080, 0, 0.220},
    {0.220, 0.080, 0.033, 0.080, 0.033, 0.220, 0.033, 0.220, 0.080, 0},
};

constexpr double kScarA[10] = {0.05, 0.05, 0.2, 0.2, 0.1, 0.1, 0.05, 0.05, 0.1, 0.1};
constexpr double kScarB[10] = {0.1, 0.1, 0.2, 0.05, 0.05, 0.1, 0.1, 0.2, 0.05, 0.05};

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) throw std::invalid_argument("empty entry in number list");
    std::size_t used = 0;
    double v = std::stod(token, &used);
    if (used != token.size())
      throw std::invalid_argument("bad number '" + token + "'");
    out.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (c != ' ') {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

void check_flag_probs(const std::vector<double>& c, int q) {
  if (static_cast<int>(c.size()) != q)
    throw std::invalid_argument("flag probability vector has length " +
                                std::to_string(c.size()) + ", expected " +
                                std::to_string(q));
  for (double ck : c) {
    if (!(ck >= 0.0 && ck < 1.0))
      throw std::invalid_argument("flag probabilities must lie in [0, 1)");
  }
}

}  // namespace

void OrdinaryDataset::validate() const {
  if (q < 2) throw std::invalid_argument("need at least two classes");
  if (features.rows() < 1 || features.cols() < 1)
    throw std::invalid_argument("dataset must have n >= 1 and d >= 1");
  if (static_cast<Index>(labels.size()) != features.rows())
    throw std::invalid_argument("label count does not match feature rows");
  for (int y : labels) {
    if (y < 0 || y >= q)
      throw std::invalid_argument("label " + std::to_string(y + 1) +
                                  " outside 1.." + std::to_string(q));
  }
}

void ComplementaryDataset::validate() const {
  if (q < 2) throw std::invalid_argument("need at least two classes");
  if (comp.rows() != features.rows() || comp.cols() != q)
    throw std::invalid_argument("complementary label matrix has wrong shape");
  for (Index i = 0; i < comp.rows(); ++i) {
    int set = 0;
    for (int k = 0; k < q; ++k) {
      if (comp(i, k) > 1)
        throw std::invalid_argument("complementary bits must be 0 or 1");
      set += comp(i, k);
    }
    if (set == q)
      throw std::invalid_argument("row " + std::to_string(i + 1) +
                                  " marks every class as complementary");
  }
  if (!truth.empty() && static_cast<Index>(truth.size()) != features.rows())
    throw std::invalid_argument("truth label count does not match rows");
}

void ClassPriors::validate() const {
  if (pi.size() < 2) throw std::invalid_argument("priors need q >= 2");
  if (pi_bar.size() != pi.size())
    throw std::invalid_argument("pi and pi_bar lengths differ");
  double sum = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0)) throw std::invalid_argument("class prior is negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTol)
    throw std::invalid_argument("class priors do not sum to one");
  for (double pb : pi_bar) {
    if (!(pb >= 0.0 && pb < 1.0))
      throw std::invalid_argument("pi_bar entries must lie in [0, 1)");
  }
}

bool ClassPriors::is_consistent(double tol) const {
  for (std::size_t k = 0; k < pi.size(); ++k) {
    if (pi[k] + pi_bar[k] > 1.0 + tol) return false;
  }
  return true;
}

void validate_transition(const TransitionSpec& spec, int q) {
  if (q < 2) throw std::invalid_argument("need at least two classes");
  if (const auto* b = std::get_if<BiasedTransition>(&spec)) {
    if (b->matrix.rows() != q || b->matrix.cols() != q)
      throw std::invalid_argument("transition matrix must be q x q");
    for (int r = 0; r < q; ++r) {
      if (b->matrix(r, r) != 0.0)
        throw std::invalid_argument("transition matrix diagonal must be zero");
      if ((b->matrix.row(r).array() < 0.0).any())
        throw std::invalid_argument("transition matrix has negative entries");
      if (std::abs(b->matrix.row(r).sum() - 1.0) > kSimplexTol)
        throw std::invalid_argument("transition matrix row " +
                                    std::to_string(r + 1) + " does not sum to 1");
    }
  } else if (const auto* s = std::get_if<ScarIndependent>(&spec)) {
    check_flag_probs(s->flag_probs, q);
  } else if (const auto* s1 = std::get_if<ScarSingle>(&spec)) {
    check_flag_probs(s1->flag_probs, q);
    if (std::none_of(s1->flag_probs.begin(), s1->flag_probs.end(),
                     [](double c) { return c > 0.0; }))
      throw std::invalid_argument(
          "single-label SCAR needs at least one positive flag probability");
  }
}

Matrix published_biased_matrix(std::string_view name) {
  const double(*table)[10] = nullptr;
  if (name == "biased-a") {
    table = kBiasedA;
  } else if (name == "biased-b") {
    table = kBiasedB;
  } else {
    throw std::invalid_argument("unknown biased matrix '" + std::string(name) + "'");
  }
  Matrix m(10, 10);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) m(r, c) = table[r][c];
  return m;
}

BiasedTransition builtin_biased(std::string_view name) {
  Matrix m = published_biased_matrix(name);
  for (int r = 0; r < m.rows(); ++r) m.row(r) /= m.row(r).sum();
  return {std::move(m)};
}

std::vector<double> builtin_scar_pi_bar(std::string_view name) {
  if (name == "scar-a") return {std::begin(kScarA), std::end(kScarA)};
  if (name == "scar-b") return {std::begin(kScarB), std::end(kScarB)};
  throw std::invalid_argument("unknown SCAR prior set '" + std::string(name) + "'");
}

std::vector<double> scar_flag_probs(std::span<const double> pi_bar,
                                    std::span<const double> pi) {
  if (pi_bar.size() != pi.size())
    throw std::invalid_argument("pi_bar and pi lengths differ");
  std::vector<double> c(pi.size());
  for (std::size_t k = 0; k < pi.size(); ++k) {
    if (pi[k] >= 1.0)
      throw std::invalid_argument("class prior of 1 leaves no room for flags");
    c[k] = pi_bar[k] / (1.0 - pi[k]);
  }
  return c;
}

TransitionSpec parse_transition(std::string_view text, int q,
                                std::span<const double> pi) {
  TransitionSpec spec;
  if (text == "uniform") {
    spec = UniformTransition{};
  } else if (text == "biased-a" || text == "biased-b") {
    spec = builtin_biased(text);
  } else if (text == "scar-a" || text == "scar-b") {
    if (static_cast<int>(pi.size()) != q)
      throw std::invalid_argument("SCAR built-ins need class priors of length q");
    spec = ScarSingle{scar_flag_probs(builtin_scar_pi_bar(text), pi)};
  } else if (text.starts_with("scar:")) {
    spec = ScarIndependent{parse_number_list(text.substr(5))};
  } else if (text.starts_with("scar-single:")) {
    spec = ScarSingle{parse_number_list(text.substr(12))};
  } else {
    throw std::invalid_argument("unknown transition '" + std::string(text) + "'");
  }
  validate_transition(spec, q);
  return spec;
}

Matrix gaussian_centers(int q, Index d, double separation) {
  Matrix centers = Matrix::Zero(q, d);
  if (d >= q) {
    for (int k = 0; k < q; ++k) centers(k, k) = separation;
  } else if (d >= 2) {
    for (int k = 0; k < q; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / q;
      centers(k, 0) = separation * std::cos(angle);
      centers(k, 1) = separation * std::sin(angle);
    }
  } else {
    for (int k = 0; k < q; ++k)
      centers(k, 0) = separation * (k - 0.5 * (q - 1));
  }
  return centers;
}

Matrix gaussian_centers(const GaussianMixtureSpec& spec) {
  return gaussian_centers(spec.q, spec.d, spec.separation);
}

OrdinaryDataset make_gaussian_mixture(const GaussianMixtureSpec& spec,
                                      std::uint64_t seed) {
  if (spec.q < 2) throw std::invalid_argument("make_gaussian_mixture: q must be >= 2");
  if (spec.d < 1) throw std::invalid_argument("make_gaussian_mixture: d must be >= 1");
  if (spec.n_per_class < 1)
    throw std::invalid_argument("make_gaussian_mixture: n_per_class must be >= 1");
  if (!(spec.separation >= 0.0))
    throw std::invalid_argument("make_gaussian_mixture: separation must be >= 0");

  const Matrix centers = gaussian_centers(spec);
  Engine rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  OrdinaryDataset ds;
  ds.q = spec.q;
  ds.features.resize(spec.q * spec.n_per_class, spec.d);
  ds.labels.resize(static_cast<std::size_t>(spec.q * spec.n_per_class));
  Index row = 0;
  for (int k = 0; k < spec.q; ++k) {
    for (Index i = 0; i < spec.n_per_class; ++i, ++row) {
      for (Index j = 0; j < spec.d; ++j)
        ds.features(row, j) = centers(k, j) + normal(rng);
      ds.labels[static_cast<std::size_t>(row)] = k;
    }
  }
  return ds;
}

ComplementaryDataset gen_complementary(const OrdinaryDataset& ds,
                                       const TransitionSpec& spec,
                                       std::uint64_t seed) {
  ds.validate();
  const int q = ds.q;
  validate_transition(spec, q);

  ComplementaryDataset out;
  out.features = ds.features;
  out.q = q;
  out.truth = ds.labels;
  out.comp = BitMatrix::Zero(ds.size(), q);

  Engine rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto draw_flags = [&](const std::vector<double>& c, int y, Index row) {
    int set = 0;
    for (int k = 0; k < q; ++k) {
      const bool flag = k != y && unit(rng) < c[static_cast<std::size_t>(k)];
      out.comp(row, k) = flag ? 1 : 0;
      set += flag;
    }
    return set;
  };

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformTransition>) {
          std::uniform_int_distribution<int> pick(0, q - 2);
          for (Index i = 0; i < ds.size(); ++i) {
            const int y = ds.labels[static_cast<std::size_t>(i)];
            int k = pick(rng);
            if (k >= y) ++k;
            out.comp(i, k) = 1;
          }
        } else if constexpr (std::is_same_v<T, BiasedTransition>) {
          std::vector<std::discrete_distribution<int>> rows;
          rows.reserve(static_cast<std::size_t>(q));
          for (int r = 0; r < q; ++r) {
            std::vector<double> w(static_cast<std::size_t>(q));
            for (int c = 0; c < q; ++c) w[static_cast<std::size_t>(c)] = s.matrix(r, c);
            rows.emplace_back(w.begin(), w.end());
          }
          for (Index i = 0; i < ds.size(); ++i) {
            const int y = ds.labels[static_cast<std::size_t>(i)];
            out.comp(i, rows[static_cast<std::size_t>(y)](rng)) = 1;
          }
        } else if constexpr (std::is_same_v<T, ScarIndependent>) {
          for (Index i = 0; i < ds.size(); ++i)
            draw_flags(s.flag_probs, ds.labels[static_cast<std::size_t>(i)], i);
        } else {
          for (Index i = 0; i < ds.size(); ++i) {
            const int y = ds.labels[static_cast<std::size_t>(i)];
            bool any = false;
            for (int k = 0; k < q; ++k)
              any = any || (k != y && s.flag_probs[static_cast<std::size_t>(k)] > 0.0);
            if (!any)
              throw std::invalid_argument(
                  "single-label SCAR is unsatisfiable for class " +
                  std::to_string(y + 1) + ": every other flag probability is 0");
            int attempts = 0;
            while (draw_flags(s.flag_probs, y, i) != 1) {
              if (++attempts >= kScarSingleMaxAttempts)
                throw std::runtime_error(
                    "single-label SCAR rejection sampling exceeded the attempt cap");
            }
          }
        }
      },
      spec);
  return out;
}

std::vector<double> complementary_priors(const ComplementaryDataset& cds) {
  std::vector<double> pb(static_cast<std::size_t>(cds.q), 0.0);
  if (cds.size() == 0) throw std::invalid_argument("complementary_priors: empty dataset");
  for (int k = 0; k < cds.q; ++k) {
    pb[static_cast<std::size_t>(k)] =
        static_cast<double>(cds.comp.col(k).cast<int>().sum()) /
        static_cast<double>(cds.size());
  }
  return pb;
}

std::vector<double> label_frequencies(const OrdinaryDataset& ds) {
  std::vector<double> f(static_cast<std::size_t>(ds.q), 0.0);
  for (int y : ds.labels) f[static_cast<std::size_t>(y)] += 1.0;
  for (double& v : f) v /= static_cast<double>(ds.labels.size());
  return f;
}

BinaryDecomposition decompose(const BitMatrix& comp) {
  BinaryDecomposition out;
  out.n = comp.rows();
  out.classes.resize(static_cast<std::size_t>(comp.cols()));
  for (Index k = 0; k < comp.cols(); ++k) {
    auto& cls = out.classes[static_cast<std::size_t>(k)];
    for (Index i = 0; i < comp.rows(); ++i) {
      (comp(i, k) ? cls.neg : cls.unl).push_back(i);
    }
  }
  return out;
}

ClassPriors corrupt_priors_with(const ClassPriors& priors,
                                std::span<const double> multipliers) {
  if (multipliers.size() != priors.pi.size())
    throw std::invalid_argument("multiplier count does not match class count");
  ClassPriors out = priors;
  double sum = 0.0;
  for (std::size_t k = 0; k < out.pi.size(); ++k) {
    out.pi[k] = std::max(0.0, multipliers[k] * priors.pi[k]);
    sum += out.pi[k];
  }
  if (!(sum > 0.0)) throw std::domain_error("corrupted priors are all zero");
  for (double& p : out.pi) p /= sum;
  return out;
}

ClassPriors corrupt_priors(const ClassPriors& priors, double sigma,
                           std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("corrupt_priors: sigma must be >= 0");
  if (sigma == 0.0) return priors;
  Engine rng(seed);
  std::normal_distribution<double> eps(1.0, sigma);
  std::vector<double> mult(priors.pi.size());
  for (;;) {
    double sum = 0.0;
    for (std::size_t k = 0; k < mult.size(); ++k) {
      mult[k] = eps(rng);
      sum += std::max(0.0, mult[k] * priors.pi[k]);
    }
    if (sum > 0.0) return corrupt_priors_with(priors, mult);
  }
}

ComplementaryDataset subset(const ComplementaryDataset& cds,
                            std::span<const Index> rows) {
  ComplementaryDataset out;
  out.q = cds.q;
  out.features.resize(static_cast<Index>(rows.size()), cds.dim());
  out.comp.resize(static_cast<Index>(rows.size()), cds.q);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Index>(i)) = cds.features.row(rows[i]);
    out.comp.row(static_cast<Index>(i)) = cds.comp.row(rows[i]);
  }
  if (!cds.truth.empty()) {
    out.truth.reserve(rows.size());
    for (Index r : rows) out.truth.push_back(cds.truth[static_cast<std::size_t>(r)]);
  }
  return out;
}

OrdinaryDataset subset(const OrdinaryDataset& ds, std::span<const Index> rows) {
  OrdinaryDataset out;
  out.q = ds.q;
  out.features.resize(static_cast<Index>(rows.size()), ds.dim());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Index>(i)) = ds.features.row(rows[i]);
    out.labels.push_back(ds.labels[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

std::pair<std::vector<Index>, std::vector<Index>> split_indices(
    Index n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("split fraction must lie in (0, 1)");
  const auto left = static_cast<Index>(std::llround(fraction * static_cast<double>(n)));
  if (left < 1 || left >= n)
    throw std::invalid_argument("split would leave one side empty");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Engine rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Index> a(order.begin(), order.begin() + left);
  std::vector<Index> b(order.begin() + left, order.end());
  return {std::move(a), std::move(b)};
}

std::pair<ComplementaryDataset, ComplementaryDataset> split(
    const ComplementaryDataset& cds, double fraction, std::uint64_t seed) {
  auto [a, b] = split_indices(cds.size(), fraction, seed);
  return {subset(cds, a), subset(cds, b)};
}

}  // namespace conu
