#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "conu/model.hpp"
#include "conu/optim.hpp"

using namespace conu;

TEST(Model, ParameterCounts) {
  EXPECT_EQ(parameter_count(ModelConfig::linear(2, 3)), 9);
  EXPECT_EQ(parameter_count(ModelConfig::mlp(784, 10)),
            784 * 300 + 300 + 2 * (300 * 300 + 300) + 300 * 10 + 10);
}

TEST(Model, ParseModel) {
  EXPECT_EQ(parse_model("linear", 3, 4).arch, Architecture::Linear);
  EXPECT_EQ(parse_model("mlp:8,4", 3, 4).hidden, (std::vector<Index>{8, 4}));
  EXPECT_EQ(parse_model("mlp:8,4", 3, 4).describe(), "mlp:8,4");
  EXPECT_THROW(parse_model("mlp:8,x", 3, 4), std::invalid_argument);
  EXPECT_THROW(parse_model("cnn", 3, 4), std::invalid_argument);
  EXPECT_THROW(parse_model("linear", 3, 1), std::invalid_argument);
}

TEST(Model, InitIsSeededAndBounded) {
  const auto cfg = ModelConfig::mlp(5, 3, {7});
  const auto a = init_params(cfg, 1), b = init_params(cfg, 1), c = init_params(cfg, 2);
  EXPECT_TRUE(a.values == b.values);
  EXPECT_FALSE(a.values == c.values);
  const double bound = std::sqrt(6.0 / 12.0);
  EXPECT_LE(a.weights(0).cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(a.bias(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Model, ZeroParamsGiveZeroScores) {
  const auto p = zero_params(ModelConfig::mlp(3, 4, {5, 5}));
  EXPECT_EQ(forward(p, Matrix::Random(6, 3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Model, LinearHandExample) {
  auto p = zero_params(ModelConfig::linear(1, 2));
  p.weights(0) << 2.0, -1.0;
  p.bias(0) << 0.0, 1.0;
  Matrix x(1, 1);
  x << 3.0;
  const Matrix s = forward(p, x);
  EXPECT_DOUBLE_EQ(s(0, 0), 6.0);
  EXPECT_DOUBLE_EQ(s(0, 1), -2.0);
  EXPECT_THROW(forward(p, Matrix::Zero(1, 2)), std::invalid_argument);
}

TEST(Model, ZeroLinearBiasGradient) {
  // All scores are 0, so each flagged row contributes
  // a_k * invN * l'(0) + (1-pi) * invN * (-l'(0)) and each unflagged row
  // b_k * invU * l'(0) to d/d b_k, with l'(0) = -1/2.
  const auto p = zero_params(ModelConfig::linear(2, 2));
  Matrix x(4, 2);
  x << 1, 0, -1, 0, 0, 1, 0, -1;
  BitMatrix comp = BitMatrix::Zero(4, 2);
  comp(0, 1) = comp(1, 1) = comp(2, 0) = comp(3, 0) = 1;
  const ClassPriors pr{{0.5, 0.5}, {0.3, 0.3}};
  const auto r = risk_and_grad(p, x, comp, {Correction::Identity, pr});
  const double a = 0.3 + 0.5 - 1.0, b = 1.0 - 0.3;
  const double expect = a * -0.5 + 0.5 * 0.5 + b * -0.5;
  const auto& layer = p.layers[0];
  EXPECT_NEAR(r.grad(layer.offset + layer.weight_count() + 0), expect, 1e-15);
  EXPECT_NEAR(r.grad(layer.offset + layer.weight_count() + 1), expect, 1e-15);
  // Symmetric features: weight gradients cancel.
  EXPECT_NEAR(r.grad.head(layer.weight_count()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  EXPECT_THROW(risk_and_grad(p, Matrix(0, 2), BitMatrix(0, 2), {Correction::Abs, pr}),
               std::invalid_argument);
}

TEST(Model, CheckpointRoundTrip) {
  const auto p = init_params(ModelConfig::mlp(3, 4, {6, 2}), 4);
  std::stringstream ss;
  save_checkpoint(p, ss);
  const auto q = load_checkpoint(ss);
  EXPECT_EQ(q.config.describe(), "mlp:6,2");
  EXPECT_TRUE(q.values == p.values);
  std::stringstream bad("conu-params v1 arch=linear d=3 q=4 count=2\n");
  EXPECT_THROW(load_checkpoint(bad), std::runtime_error);
}

TEST(Adam, ZeroGradientLeavesParams) {
  Vector p = Vector::LinSpaced(5, -1, 1), before = p;
  AdamState st(5, {});
  for (int i = 0; i < 3; ++i) adam_step(st, p, Vector::Zero(5));
  EXPECT_TRUE(p == before);
}

TEST(Adam, FirstStepIsSignTimesLr) {
  Vector p = Vector::Zero(4);
  Vector g(4);
  g << 3.0, -0.5, 100.0, -1e-2;
  AdamState st(4, {.lr = 0.01});
  adam_step(st, p, g);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(p(i), -0.01 * (g(i) > 0 ? 1 : -1), 1e-6);
}

TEST(Adam, DecoupledDecayShrinksParams) {
  Vector p = Vector::Constant(2, 2.0);
  AdamState st(2, {.lr = 0.1, .weight_decay = 0.5});
  adam_step(st, p, Vector::Zero(2));
  EXPECT_NEAR(p(0), 2.0 * (1 - 0.05), 1e-15);
}

TEST(Adam, Deterministic) {
  auto run = [] {
    Vector p = Vector::LinSpaced(6, -2, 2);
    AdamState st(6, {});
    for (int t = 0; t < 50; ++t) adam_step(st, p, p.array().sin().matrix());
    return p;
  };
  EXPECT_TRUE(run() == run());
}

TEST(GradCheck, LinearOvr) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Matrix x(12, 3);
  for (auto& v : x.reshaped()) v = g(rng);
  std::vector<int> y(12);
  for (auto& v : y) v = static_cast<int>(rng() % 4);
  auto p = init_params(ModelConfig::linear(3, 4), 5);
  const Objective f = [&](const Vector& th, Vector* grad) {
    auto q = p;
    q.values = th;
    const auto r = ovr_risk_and_grad(q, x, y);
    if (grad) *grad = r.grad;
    return r.risk;
  };
  const auto res = grad_check(p.values, f);
  EXPECT_LT(res.max_rel_error, 1e-5);
  EXPECT_EQ(res.checked, p.size());
}

TEST(GradCheck, ConstantObjective) {
  const Objective f = [](const Vector& th, Vector* grad) {
    if (grad) *grad = Vector::Zero(th.size());
    return 4.0;
  };
  const auto res = grad_check(Vector::Ones(5), f);
  EXPECT_LT(res.max_abs_error, 1e-12);
}

TEST(GradCheck, MlpCorrectedAwayFromKinks) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const Index n = 10;
  Matrix x(n, 2);
  for (auto& v : x.reshaped()) v = g(rng);
  BitMatrix comp = BitMatrix::Zero(n, 3);
  for (Index i = 0; i < n; ++i) comp(i, static_cast<Index>(rng() % 3)) = 1;
  // pi + pi_bar far below 1 makes the flagged coefficient strongly negative.
  const ClassPriors pr{{0.2, 0.3, 0.5}, {0.3, 0.3, 0.3}};
  const auto p = init_params(ModelConfig::mlp(2, 3, {6, 5}), 2);
  for (auto corr : {Correction::Identity, Correction::Abs, Correction::Relu}) {
    const RiskSpec spec{corr, pr};
    const Objective f = [&](const Vector& th, Vector* grad) {
      auto q = p;
      q.values = th;
      const auto r = risk_and_grad(q, x, comp, spec);
      if (grad) *grad = r.grad;
      return r.risk;
    };
    const KinkDistance kink = [&](const Vector& th) {
      auto q = p;
      q.values = th;
      double m = 1e300;
      for (const auto& c : risk_with_grad(forward(q, x), comp, spec, nullptr).classes)
        m = std::min(m, std::fabs(c.positive_part));
      return m;
    };
    const auto res = grad_check(p.values, f, {}, kink);
    EXPECT_LT(res.max_rel_error, 1e-4) << to_string(corr);
    EXPECT_GT(res.checked, 0);
  }
}
