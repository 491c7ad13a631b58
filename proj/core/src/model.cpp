#include "conu/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "conu/rng.hpp"

namespace conu {

ModelConfig ModelConfig::linear(Index d, Index q) {
  return {Architecture::Linear, {}, d, q};
}

ModelConfig ModelConfig::mlp(Index d, Index q, std::vector<Index> hidden) {
  return {Architecture::Mlp, std::move(hidden), d, q};
}

void ModelConfig::validate() const {
  if (input_dim < 1) throw std::invalid_argument("model input dimension must be >= 1");
  if (output_dim < 2) throw std::invalid_argument("model needs at least two outputs");
  if (arch == Architecture::Mlp) {
    if (hidden.empty()) throw std::invalid_argument("MLP needs at least one hidden layer");
    for (Index w : hidden)
      if (w < 1) throw std::invalid_argument("hidden widths must be >= 1");
  }
}

std::string ModelConfig::describe() const {
  if (arch == Architecture::Linear) return "linear";
  std::string s = "mlp:";
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(hidden[i]);
  }
  return s;
}

ModelConfig parse_model(const std::string& text, Index d, Index q) {
  ModelConfig cfg;
  if (text == "linear") {
    cfg = ModelConfig::linear(d, q);
  } else if (text == "mlp") {
    cfg = ModelConfig::mlp(d, q);
  } else if (text.rfind("mlp:", 0) == 0) {
    std::vector<Index> widths;
    std::stringstream ss(text.substr(4));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t used = 0;
      long long w = 0;
      try {
        w = std::stoll(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tok.size())
        throw std::invalid_argument("bad hidden width '" + tok + "'");
      widths.push_back(static_cast<Index>(w));
    }
    cfg = ModelConfig::mlp(d, q, std::move(widths));
  } else {
    throw std::invalid_argument("unknown model '" + text + "'");
  }
  cfg.validate();
  return cfg;
}

std::vector<LayerShape> layer_layout(const ModelConfig& config) {
  config.validate();
  std::vector<LayerShape> layers;
  Index in = config.input_dim;
  Index offset = 0;
  auto add = [&](Index out) {
    LayerShape s{in, out, offset};
    offset += s.size();
    layers.push_back(s);
    in = out;
  };
  if (config.arch == Architecture::Mlp)
    for (Index w : config.hidden) add(w);
  add(config.output_dim);
  return layers;
}

Index parameter_count(const ModelConfig& config) {
  Index n = 0;
  for (const auto& l : layer_layout(config)) n += l.size();
  return n;
}

Eigen::Map<const Matrix> ModelParams::weights(std::size_t layer) const {
  const auto& s = layers.at(layer);
  return {values.data() + s.offset, s.in, s.out};
}

Eigen::Map<Matrix> ModelParams::weights(std::size_t layer) {
  const auto& s = layers.at(layer);
  return {values.data() + s.offset, s.in, s.out};
}

Eigen::Map<const Vector> ModelParams::bias(std::size_t layer) const {
  const auto& s = layers.at(layer);
  return {values.data() + s.offset + s.weight_count(), s.out};
}

Eigen::Map<Vector> ModelParams::bias(std::size_t layer) {
  const auto& s = layers.at(layer);
  return {values.data() + s.offset + s.weight_count(), s.out};
}

ModelParams zero_params(const ModelConfig& config) {
  ModelParams p;
  p.config = config;
  p.layers = layer_layout(config);
  p.values = Vector::Zero(parameter_count(config));
  return p;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = zero_params(config);
  Engine rng(seed);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& s = p.layers[l];
    const double a = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
    std::uniform_real_distribution<double> u(-a, a);
    auto w = p.weights(l);
    for (Index c = 0; c < w.cols(); ++c)
      for (Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
  }
  return p;
}

Matrix forward(const ModelParams& params, const Matrix& x, ForwardCache* cache) {
  if (x.cols() != params.config.input_dim)
    throw std::invalid_argument("forward: input has " + std::to_string(x.cols()) +
                                " columns, model expects " +
                                std::to_string(params.config.input_dim));
  if (cache) cache->inputs.clear();
  Matrix h = x;
  const std::size_t last = params.layers.size() - 1;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Matrix z = h * params.weights(l);
    z.rowwise() += params.bias(l).transpose();
    if (l != last) z = z.cwiseMax(0.0);
    if (cache) {
      cache->inputs.push_back(std::move(h));
    }
    h = std::move(z);
  }
  return h;
}

Vector backward(const ModelParams& params, const ForwardCache& cache,
                const Matrix& score_grad) {
  if (cache.inputs.size() != params.layers.size())
    throw std::invalid_argument("backward: cache does not match the model");
  Vector grad = Vector::Zero(params.size());
  Matrix g = score_grad;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& s = params.layers[l];
    const Matrix& in = cache.inputs[l];
    Eigen::Map<Matrix>(grad.data() + s.offset, s.in, s.out).noalias() = in.transpose() * g;
    Eigen::Map<Vector>(grad.data() + s.offset + s.weight_count(), s.out) =
        g.colwise().sum().transpose();
    if (l > 0) {
      Matrix prev = g * params.weights(l).transpose();
      // ReLU: inputs to layer l are post-activation values of layer l - 1.
      g = (in.array() > 0.0).select(prev, 0.0);
    }
  }
  return grad;
}

RiskGradient risk_and_grad(const ModelParams& params, const Matrix& x,
                           const BitMatrix& comp, const RiskSpec& spec) {
  if (x.rows() == 0) throw std::invalid_argument("risk_and_grad: empty batch");
  if (comp.rows() != x.rows())
    throw std::invalid_argument("risk_and_grad: label rows do not match features");
  ForwardCache cache;
  const Matrix scores = forward(params, x, &cache);
  Matrix dscores;
  RiskGradient out;
  out.breakdown = risk_with_grad(scores, comp, spec, &dscores);
  out.risk = out.breakdown.total;
  out.grad = backward(params, cache, dscores);
  return out;
}

RiskGradient risk_and_grad(const ModelParams& params, const Matrix& x,
                           const BinaryDecomposition& dec, const RiskSpec& spec) {
  if (x.rows() == 0) throw std::invalid_argument("risk_and_grad: empty batch");
  ForwardCache cache;
  const Matrix scores = forward(params, x, &cache);
  Matrix dscores;
  RiskGradient out;
  out.breakdown = risk_with_grad(scores, dec, spec, &dscores);
  out.risk = out.breakdown.total;
  out.grad = backward(params, cache, dscores);
  return out;
}

RiskGradient ovr_risk_and_grad(const ModelParams& params, const Matrix& x,
                               std::span<const int> labels) {
  if (x.rows() == 0) throw std::invalid_argument("ovr_risk_and_grad: empty batch");
  ForwardCache cache;
  const Matrix scores = forward(params, x, &cache);
  Matrix dscores;
  RiskGradient out;
  out.risk = ovr_risk_with_grad(scores, labels, &dscores);
  out.grad = backward(params, cache, dscores);
  return out;
}

namespace {

constexpr const char* kMagic = "conu-params";

void write_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

double read_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated parameter data");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const ModelParams& params, std::ostream& out) {
  out << kMagic << " v1 arch=" << params.config.describe()
      << " d=" << params.config.input_dim << " q=" << params.config.output_dim
      << " count=" << params.size() << '\n';
  for (Index i = 0; i < params.size(); ++i) write_le(out, params.values(i));
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_checkpoint(params, out);
}

ModelParams load_checkpoint(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("checkpoint: missing header");
  std::istringstream hs(header);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != kMagic || version != "v1")
    throw std::runtime_error("checkpoint: unrecognised header '" + header + "'");
  std::string arch;
  long long d = -1, q = -1, count = -1;
  std::string field;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::runtime_error("checkpoint: bad field '" + field + "'");
    const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "arch") arch = val;
    else if (key == "d") d = std::stoll(val);
    else if (key == "q") q = std::stoll(val);
    else if (key == "count") count = std::stoll(val);
  }
  if (arch.empty() || d < 1 || q < 2 || count < 0)
    throw std::runtime_error("checkpoint: incomplete header '" + header + "'");
  ModelParams p = zero_params(parse_model(arch, d, q));
  if (p.size() != count)
    throw std::runtime_error("checkpoint: parameter count does not match layout");
  for (Index i = 0; i < p.size(); ++i) p.values(i) = read_le(in);
  return p;
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_checkpoint(in);
}

}  // namespace conu
