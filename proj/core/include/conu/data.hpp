#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace conu {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using BitMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Class indices are 0-based in memory; files and user-facing text use 1-based.

struct OrdinaryDataset {
  Matrix features;          // n x d
  std::vector<int> labels;  // n entries in [0, q)
  int q = 0;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  void validate() const;
};

/// Features plus one q-bit complementary-label row per example. Bit k set
/// means "this example is not class k".
struct ComplementaryDataset {
  Matrix features;      // n x d
  BitMatrix comp;       // n x q, entries 0/1
  int q = 0;
  std::vector<int> truth;  // ground truth when known (generated data), else empty

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  bool flagged(Index row, int k) const { return comp(row, k) != 0; }
  void validate() const;
};

/// pi: class priors on the simplex. pi_bar: per-class probability of being
/// flagged as a complementary label.
struct ClassPriors {
  std::vector<double> pi;
  std::vector<double> pi_bar;

  int num_classes() const { return static_cast<int>(pi.size()); }
  /// Simplex and range checks; throws std::invalid_argument.
  void validate() const;
  /// pi_bar_k + pi_k <= 1 + tol for every k (holds for any SCAR population).
  bool is_consistent(double tol = 1e-9) const;
};

struct UniformTransition {};
struct BiasedTransition {
  Matrix matrix;  // q x q, row-stochastic, zero diagonal
};
struct ScarIndependent {
  std::vector<double> flag_probs;  // c_k in [0, 1)
};
struct ScarSingle {
  std::vector<double> flag_probs;
};

using TransitionSpec =
    std::variant<UniformTransition, BiasedTransition, ScarIndependent, ScarSingle>;

void validate_transition(const TransitionSpec& spec, int q);

/// The two biased transition tables as published (three decimals, rows sum
/// to 0.999). `name` is "biased-a" or "biased-b".
Matrix published_biased_matrix(std::string_view name);
/// Row-normalised version of the published table, usable as a BiasedTransition.
BiasedTransition builtin_biased(std::string_view name);
/// Complementary-label marginals pi_bar for "scar-a" / "scar-b" (q = 10).
std::vector<double> builtin_scar_pi_bar(std::string_view name);
/// c_k = pi_bar_k / (1 - pi_k).
std::vector<double> scar_flag_probs(std::span<const double> pi_bar,
                                    std::span<const double> pi);

/// Resolves a textual transition name: uniform, biased-a, biased-b,
/// scar-a, scar-b (single label, via rejection), scar:<c1,c2,...>
/// (independent flags) or scar-single:<c1,...>. The SCAR built-ins need the
/// truth priors `pi` to turn pi_bar into flag probabilities.
TransitionSpec parse_transition(std::string_view text, int q,
                                std::span<const double> pi);

struct GaussianMixtureSpec {
  int q = 4;
  Index n_per_class = 1000;
  Index d = 2;
  double separation = 6.0;
};

/// Class centres: separation * e_k when d >= q, equally spaced on a circle of
/// radius `separation` in the first two coordinates when 2 <= d < q, equally
/// spaced on the line (unit spacing times `separation`) when d == 1.
Matrix gaussian_centers(int q, Index d, double separation);
Matrix gaussian_centers(const GaussianMixtureSpec& spec);

/// Isotropic unit-variance Gaussians around gaussian_centers(). Rows are
/// grouped by class.
OrdinaryDataset make_gaussian_mixture(const GaussianMixtureSpec& spec,
                                      std::uint64_t seed);

inline constexpr int kScarSingleMaxAttempts = 1'000'000;

ComplementaryDataset gen_complementary(const OrdinaryDataset& ds,
                                       const TransitionSpec& spec,
                                       std::uint64_t seed);

/// Empirical pi_bar_k = n_k^N / n.
std::vector<double> complementary_priors(const ComplementaryDataset& cds);

/// Empirical class frequencies of an ordinary dataset.
std::vector<double> label_frequencies(const OrdinaryDataset& ds);

struct ClassSplit {
  std::vector<Index> neg;  // rows flagged with this class
  std::vector<Index> unl;  // everything else
};

struct BinaryDecomposition {
  std::vector<ClassSplit> classes;
  Index n = 0;

  int q() const { return static_cast<int>(classes.size()); }
};

BinaryDecomposition decompose(const BitMatrix& comp);
inline BinaryDecomposition decompose(const ComplementaryDataset& cds) {
  return decompose(cds.comp);
}

/// pi'_k = eps_k * pi_k with eps_k ~ N(1, sigma^2), clamped at 0 and
/// renormalised. pi_bar is left untouched. An all-zero draw is resampled.
ClassPriors corrupt_priors(const ClassPriors& priors, double sigma,
                           std::uint64_t seed);
/// Same transformation with caller-supplied multipliers; throws if the
/// clamped vector is all zero.
ClassPriors corrupt_priors_with(const ClassPriors& priors,
                                std::span<const double> multipliers);

ComplementaryDataset subset(const ComplementaryDataset& cds,
                            std::span<const Index> rows);
OrdinaryDataset subset(const OrdinaryDataset& ds, std::span<const Index> rows);

/// Row indices of a seeded shuffle, first round(fraction * n) go left.
std::pair<std::vector<Index>, std::vector<Index>> split_indices(
    Index n, double fraction, std::uint64_t seed);

std::pair<ComplementaryDataset, ComplementaryDataset> split(
    const ComplementaryDataset& cds, double fraction, std::uint64_t seed);

}  // namespace conu
