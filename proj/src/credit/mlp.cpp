// Copyright 2026 The prlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "credit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "core/error.hpp"

namespace prlab::credit {

using core::Dataset;
using core::Instance;
using core::Label;

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double target(Label y) { return y == Label::kPositive ? 1.0 : 0.0; }

}  // namespace

Standardizer Standardizer::fit(std::span<const Instance> rows) {
  if (rows.empty()) fail(ErrorCode::kInvalidArgument, "cannot fit a scaler on no rows");
  const std::size_t d = rows.front().size();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) s.mean[i] += r[i];
  }
  for (double& m : s.mean) m /= static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) s.scale[i] += (r[i] - s.mean[i]) * (r[i] - s.mean[i]);
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(rows.size()));
    if (v == 0.0) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(const Instance& x) const {
  if (x.size() != mean.size()) fail(ErrorCode::kConformance, "input width does not match scaler");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
  return out;
}

MlpParams::MlpParams(std::size_t inputs, std::size_t hidden)
    : inputs_(inputs), hidden_(hidden), theta_(hidden * inputs + 2 * hidden + 1, 0.0) {
  if (inputs == 0 || hidden == 0) fail(ErrorCode::kInvalidArgument, "empty network layer");
}

double MlpParams::logit(std::span<const double> x) const {
  double z = b2();
  for (std::size_t j = 0; j < hidden_; ++j) {
    double a = b1(j);
    const double* w = &theta_[j * inputs_];
    for (std::size_t i = 0; i < inputs_; ++i) a += w[i] * x[i];
    z += w2(j) * sigmoid(a);
  }
  return z;
}

double MlpParams::probability(std::span<const double> x) const { return sigmoid(logit(x)); }

double bce_loss(const MlpParams& p, std::span<const std::vector<double>> x,
                std::span<const Label> y) {
  double total = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double z = p.logit(x[n]);
    total += softplus(z) - target(y[n]) * z;
  }
  return total / static_cast<double>(x.size());
}

std::vector<double> bce_gradient(const MlpParams& p, std::span<const std::vector<double>> x,
                                 std::span<const Label> y) {
  std::vector<double> g(p.size(), 0.0);
  std::vector<double> h(p.hidden());
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    const auto& xn = x[n];
    double z = p.b2();
    for (std::size_t j = 0; j < p.hidden(); ++j) {
      double a = p.b1(j);
      for (std::size_t i = 0; i < p.inputs(); ++i) a += p.w1(j, i) * xn[i];
      h[j] = sigmoid(a);
      z += p.w2(j) * h[j];
    }
    const double dz = (sigmoid(z) - target(y[n])) * inv_n;
    g[p.b2_index()] += dz;
    for (std::size_t j = 0; j < p.hidden(); ++j) {
      g[p.w2_index(j)] += dz * h[j];
      const double da = dz * p.w2(j) * h[j] * (1.0 - h[j]);
      g[p.b1_index(j)] += da;
      for (std::size_t i = 0; i < p.inputs(); ++i) g[p.w1_index(j, i)] += da * xn[i];
    }
  }
  return g;
}

MlpModel::MlpModel(Standardizer scaler, MlpParams params)
    : scaler_(std::move(scaler)), params_(std::move(params)) {
  if (scaler_.mean.size() != params_.inputs())
    fail(ErrorCode::kInvalidArgument, "scaler width does not match network inputs");
}

double MlpModel::probability(const Instance& x) const {
  return params_.probability(scaler_.apply(x));
}

Label MlpModel::classify(const Instance& x) const {
  return probability(x) >= 0.5 ? Label::kPositive : Label::kNegative;
}

nlohmann::json MlpModel::to_json() const {
  return {{"inputs", params_.inputs()},
          {"hidden", params_.hidden()},
          {"scaler", {{"mean", scaler_.mean}, {"scale", scaler_.scale}}},
          {"theta", std::vector<double>(params_.theta().begin(), params_.theta().end())}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
  try {
    MlpParams p(j.at("inputs").get<std::size_t>(), j.at("hidden").get<std::size_t>());
    const auto theta = j.at("theta").get<std::vector<double>>();
    if (theta.size() != p.size()) fail(ErrorCode::kParse, "parameter vector has wrong length");
    if (!std::all_of(theta.begin(), theta.end(), [](double v) { return std::isfinite(v); }))
      fail(ErrorCode::kParse, "non-finite network parameter");
    std::copy(theta.begin(), theta.end(), p.theta().begin());
    Standardizer s{j.at("scaler").at("mean").get<std::vector<double>>(),
                   j.at("scaler").at("scale").get<std::vector<double>>()};
    if (s.scale.size() != s.mean.size()) fail(ErrorCode::kParse, "scaler vectors differ in length");
    return MlpModel(std::move(s), std::move(p));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed network: ") + e.what());
  }
}

std::size_t training_rows(std::size_t n, double validation_split) {
  return static_cast<std::size_t>(static_cast<double>(n) * (1.0 - validation_split));
}

namespace {

class Adam {
 public:
  Adam(const TrainSpec& spec, std::size_t size)
      : spec_(spec), m_(size, 0.0), v_(size, 0.0) {}

  void step(std::span<double> theta, std::span<const double> g) {
    ++t_;
    const double c1 = 1.0 - std::pow(spec_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(spec_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m_[k] = spec_.beta1 * m_[k] + (1.0 - spec_.beta1) * g[k];
      v_[k] = spec_.beta2 * v_[k] + (1.0 - spec_.beta2) * g[k] * g[k];
      theta[k] -= spec_.learning_rate * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + spec_.epsilon);
    }
  }

 private:
  TrainSpec spec_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

void check_spec(const TrainSpec& spec) {
  if (!(spec.validation_split > 0.0 && spec.validation_split < 1.0))
    fail(ErrorCode::kInvalidArgument, "validation split must lie in (0, 1)");
  if (spec.epochs < 1) fail(ErrorCode::kInvalidArgument, "epochs must be at least 1");
  if (!(spec.learning_rate > 0.0)) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  if (spec.hidden == 0) fail(ErrorCode::kInvalidArgument, "hidden layer must not be empty");
}

void run_epochs(MlpParams& params, Adam& adam, const std::vector<std::vector<double>>& x,
                const std::vector<Label>& y, std::size_t batch_size, std::mt19937_64& rng,
                int epochs, const std::function<void()>& after_epoch) {
  const std::size_t n = x.size();
  const std::size_t bs = batch_size == 0 ? n : std::min(batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> bx;
  std::vector<Label> by;
  for (int e = 0; e < epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t end = std::min(n, start + bs);
      bx.clear();
      by.clear();
      for (std::size_t k = start; k < end; ++k) {
        bx.push_back(x[order[k]]);
        by.push_back(y[order[k]]);
      }
      const auto g = bce_gradient(params, bx, by);
      adam.step(params.theta(), g);
    }
    if (after_epoch) after_epoch();
  }
}

}  // namespace

MlpParams glorot_params(std::size_t inputs, std::size_t hidden, std::mt19937_64& rng) {
  MlpParams params(inputs, hidden);
  const double lim1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
  const double lim2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  std::uniform_real_distribution<double> u1(-lim1, lim1), u2(-lim2, lim2);
  for (std::size_t j = 0; j < hidden; ++j) {
    for (std::size_t i = 0; i < inputs; ++i) params.theta()[params.w1_index(j, i)] = u1(rng);
  }
  for (std::size_t j = 0; j < hidden; ++j) params.theta()[params.w2_index(j)] = u2(rng);
  return params;
}

MlpModel initial_model(const Dataset& data, const TrainSpec& spec) {
  check_spec(spec);
  const std::size_t n_train = training_rows(data.size(), spec.validation_split);
  if (n_train == 0) fail(ErrorCode::kInvalidArgument, "validation split leaves no training rows");
  std::mt19937_64 rng(spec.seed);
  return MlpModel(Standardizer::fit(std::span<const Instance>(data.instances.data(), n_train)),
                  glorot_params(data.instances.front().size(), spec.hidden, rng));
}

TrainResult train_mlp(const Dataset& data, const TrainSpec& spec) {
  check_spec(spec);
  if (data.size() < kMinTrainingRecords)
    fail(ErrorCode::kInvalidArgument, "training needs at least 100 records");
  if (data.labels.size() != data.size())
    fail(ErrorCode::kInvalidArgument, "training set needs one label per instance");
  const std::size_t n_train = training_rows(data.size(), spec.validation_split);
  if (n_train == 0 || n_train == data.size())
    fail(ErrorCode::kInvalidArgument, "validation split leaves an empty partition");

  const std::span<const Instance> train_rows(data.instances.data(), n_train);
  const auto train_pos = std::count(data.labels.begin(), data.labels.begin() + n_train, Label::kPositive);
  const auto val_pos = std::count(data.labels.begin() + n_train, data.labels.end(), Label::kPositive);
  const auto n_val = static_cast<std::ptrdiff_t>(data.size() - n_train);
  const bool train_single = train_pos == 0 || train_pos == static_cast<std::ptrdiff_t>(n_train);
  const bool val_has_other = train_pos == 0 ? val_pos > 0 : (n_val - val_pos) > 0;
  if (train_single && val_has_other)
    fail(ErrorCode::kDegenerate, "training split holds a single class absent from validation");

  Standardizer scaler = Standardizer::fit(train_rows);
  std::vector<std::vector<double>> x_train, x_val;
  for (std::size_t i = 0; i < data.size(); ++i)
    (i < n_train ? x_train : x_val).push_back(scaler.apply(data.instances[i]));
  const std::vector<Label> y_train(data.labels.begin(), data.labels.begin() + n_train);
  const std::vector<Label> y_val(data.labels.begin() + n_train, data.labels.end());

  std::mt19937_64 rng(spec.seed);
  MlpParams params = glorot_params(data.instances.front().size(), spec.hidden, rng);

  TrainResult result;
  result.train_rows = n_train;
  auto accuracy = [&] {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < x_val.size(); ++k) {
      const Label p = params.probability(x_val[k]) >= 0.5 ? Label::kPositive : Label::kNegative;
      hits += p == y_val[k];
    }
    return static_cast<double>(hits) / static_cast<double>(x_val.size());
  };
  Adam adam(spec, params.size());
  run_epochs(params, adam, x_train, y_train, spec.batch_size, rng, spec.epochs,
             [&] { result.epoch_validation_accuracy.push_back(accuracy()); });
  result.validation_accuracy = result.epoch_validation_accuracy.back();
  result.model = MlpModel(std::move(scaler), std::move(params));
  return result;
}

void continue_training(MlpModel& model, const Dataset& train, const TrainSpec& spec, int epochs) {
  check_spec(spec);
  std::vector<std::vector<double>> x;
  for (const auto& r : train.instances) x.push_back(model.scaler().apply(r));
  std::mt19937_64 rng(spec.seed);
  Adam adam(spec, model.params().size());
  run_epochs(model.mutable_params(), adam, x, train.labels, spec.batch_size, rng, epochs, {});
}

double gradient_check(const MlpModel& model, const Dataset& batch, double step) {
  std::vector<std::vector<double>> x;
  for (const auto& r : batch.instances) x.push_back(model.scaler().apply(r));
  MlpParams p = model.params();
  const auto analytic = bce_gradient(p, x, batch.labels);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double saved = p.theta()[k];
    p.theta()[k] = saved + step;
    const double up = bce_loss(p, x, batch.labels);
    p.theta()[k] = saved - step;
    const double down = bce_loss(p, x, batch.labels);
    p.theta()[k] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
  }
  return worst;
}

}  // namespace prlab::credit
