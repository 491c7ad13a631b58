#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "conu/data.hpp"
#include "conu/risk.hpp"

namespace conu {

enum class Architecture { Linear, Mlp };

/// A scorer mapping d features to q real scores f_1..f_q. The MLP variant
/// shares its ReLU hidden layers across classes; the final affine layer holds
/// one output head per class.
struct ModelConfig {
  Architecture arch = Architecture::Linear;
  std::vector<Index> hidden;  // MLP hidden widths
  Index input_dim = 0;
  Index output_dim = 0;

  static ModelConfig linear(Index d, Index q);
  static ModelConfig mlp(Index d, Index q, std::vector<Index> hidden = {300, 300, 300});

  void validate() const;
  /// "linear" or "mlp:300,300,300".
  std::string describe() const;
};

/// Parses "linear" or "mlp:64,64" (also "mlp" for the default widths).
ModelConfig parse_model(const std::string& text, Index d, Index q);

struct LayerShape {
  Index in = 0;
  Index out = 0;
  Index offset = 0;  // weights (in x out, column-major) then out biases

  Index weight_count() const { return in * out; }
  Index size() const { return in * out + out; }
};

struct ModelParams {
  ModelConfig config;
  std::vector<LayerShape> layers;
  Vector values;

  Index size() const { return values.size(); }

  Eigen::Map<const Matrix> weights(std::size_t layer) const;
  Eigen::Map<Matrix> weights(std::size_t layer);
  Eigen::Map<const Vector> bias(std::size_t layer) const;
  Eigen::Map<Vector> bias(std::size_t layer);
};

std::vector<LayerShape> layer_layout(const ModelConfig& config);
Index parameter_count(const ModelConfig& config);

/// All-zero parameters with the right layout.
ModelParams zero_params(const ModelConfig& config);
/// Weights ~ U(-a, a), a = sqrt(6 / (fan_in + fan_out)); biases zero.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Hidden activations kept for the backward pass.
struct ForwardCache {
  std::vector<Matrix> inputs;  // input to each layer (post-ReLU for hidden ones)
};

Matrix forward(const ModelParams& params, const Matrix& x, ForwardCache* cache = nullptr);

/// Reverse-mode pass: gradient of a scalar objective with respect to the
/// flat parameter vector, given d objective / d scores.
Vector backward(const ModelParams& params, const ForwardCache& cache,
                const Matrix& score_grad);

struct RiskGradient {
  double risk = 0.0;
  Vector grad;
  RiskBreakdown breakdown;
};

/// Negative-unlabeled risk (corrected or not, per `spec`) of a batch and its
/// exact gradient. Throws on an empty batch.
RiskGradient risk_and_grad(const ModelParams& params, const Matrix& x,
                           const BitMatrix& comp, const RiskSpec& spec);
RiskGradient risk_and_grad(const ModelParams& params, const Matrix& x,
                           const BinaryDecomposition& dec, const RiskSpec& spec);

/// Ordinary-label one-versus-rest risk and gradient.
RiskGradient ovr_risk_and_grad(const ModelParams& params, const Matrix& x,
                               std::span<const int> labels);

/// Checkpoint: one text line
///   conu-params v1 arch=<describe()> d=<d> q=<q> count=<n>
/// followed by n little-endian IEEE-754 doubles.
void save_checkpoint(const ModelParams& params, std::ostream& out);
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(std::istream& in);
ModelParams load_checkpoint(const std::string& path);

}  // namespace conu
