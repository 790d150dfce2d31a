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

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "core/classifier.hpp"
#include "core/feature_space.hpp"
#include "json.hpp"

namespace prlab::credit {

// Per-column affine scaling to zero mean and unit variance. Constant columns
// keep unit scale.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(std::span<const core::Instance> rows);
  std::vector<double> apply(const core::Instance& x) const;
};

// input -> hidden (sigmoid) -> one sigmoid output. Parameters live in one flat
// vector laid out as [w1 (hidden x inputs, row-major), b1, w2, b2].
class MlpParams {
 public:
  MlpParams() = default;
  MlpParams(std::size_t inputs, std::size_t hidden);

  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t size() const { return theta_.size(); }

  std::span<double> theta() { return theta_; }
  std::span<const double> theta() const { return theta_; }

  double w1(std::size_t j, std::size_t i) const { return theta_[j * inputs_ + i]; }
  double b1(std::size_t j) const { return theta_[hidden_ * inputs_ + j]; }
  double w2(std::size_t j) const { return theta_[hidden_ * inputs_ + hidden_ + j]; }
  double b2() const { return theta_.back(); }

  std::size_t w1_index(std::size_t j, std::size_t i) const { return j * inputs_ + i; }
  std::size_t b1_index(std::size_t j) const { return hidden_ * inputs_ + j; }
  std::size_t w2_index(std::size_t j) const { return hidden_ * inputs_ + hidden_ + j; }
  std::size_t b2_index() const { return theta_.size() - 1; }

  // Output pre-activation for an already scaled input.
  double logit(std::span<const double> x) const;
  double probability(std::span<const double> x) const;

 private:
  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> theta_;
};

// Mean binary cross-entropy over a batch of scaled inputs.
double bce_loss(const MlpParams& p, std::span<const std::vector<double>> x,
                std::span<const core::Label> y);
// Analytic gradient of bce_loss, same layout as the parameters.
std::vector<double> bce_gradient(const MlpParams& p, std::span<const std::vector<double>> x,
                                 std::span<const core::Label> y);

class MlpModel final : public core::Classifier {
 public:
  MlpModel() = default;
  MlpModel(Standardizer scaler, MlpParams params);

  // Raw (unscaled) instance in, probability of label 1 out.
  double probability(const core::Instance& x) const;
  core::Label classify(const core::Instance& x) const override;

  const Standardizer& scaler() const { return scaler_; }
  const MlpParams& params() const { return params_; }
  MlpParams& mutable_params() { return params_; }

  nlohmann::json to_json() const;
  static MlpModel from_json(const nlohmann::json& j);

 private:
  Standardizer scaler_;
  MlpParams params_;
};

struct TrainSpec {
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 100;
  // Trailing fraction of the rows held out for validation.
  double validation_split = 0.25;
  // 0 trains on the whole training split at once.
  std::size_t batch_size = 0;
  std::size_t hidden = 23;
  std::uint64_t seed = 0;
};

MlpParams glorot_params(std::size_t inputs, std::size_t hidden, std::mt19937_64& rng);

struct TrainResult {
  MlpModel model;
  double validation_accuracy = 0.0;
  std::vector<double> epoch_validation_accuracy;
  std::size_t train_rows = 0;
};

inline constexpr std::size_t kMinTrainingRecords = 100;

// Adam on binary cross-entropy, Glorot-uniform initialisation, reshuffled
// batches every epoch. Bit-reproducible for a fixed seed and row order.
TrainResult train_mlp(const core::Dataset& data, const TrainSpec& spec);

// Runs `epochs` more epochs of the same optimiser on a given model, without
// validation bookkeeping. Used to probe gradients after training steps.
// The untrained network train_mlp starts from: scaler fit on the training
// rows, Glorot weights, zero biases.
MlpModel initial_model(const core::Dataset& data, const TrainSpec& spec);

void continue_training(MlpModel& model, const core::Dataset& train, const TrainSpec& spec,
                       int epochs);

// Largest relative error between the analytic gradient and central finite
// differences with the given step. The relative error of a component is
// |g - fd| / max(|g|, |fd|, 1e-6).
double gradient_check(const MlpModel& model, const core::Dataset& batch, double step = 1e-5);

std::size_t training_rows(std::size_t n, double validation_split);

}  // namespace prlab::credit
