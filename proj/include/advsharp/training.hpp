#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "advsharp/dataset.hpp"
#include "advsharp/perturbation.hpp"

namespace advsharp {

enum class WeightInit { Zeros, Gaussian };

struct TrainConfig {
  PerturbationSpec perturbation;
  double learning_rate = 0.1;
  int epochs = 500;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  double stop_tol = 0.0;  // stop once ||grad|| < stop_tol
  int record_every = 1;
  WeightInit init = WeightInit::Zeros;
  double init_scale = 0.01;  // sd of the Gaussian init

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

struct Checkpoint {
  WeightVector w;
  int epoch = 0;                // completed updates
  double train_loss = 0.0;      // mean loss on the perturbations regenerated at w
  double train_robust_acc = 0;  // accuracy on the same perturbed points, in percent
  double grad_norm = 0.0;
  std::uint64_t perturbation_seed = 0;  // noise stream behind train_loss (random kinds)
  TrainConfig config;

  // The spec that reproduces train_loss at w.
  PerturbationSpec perturbation_at_checkpoint() const;
};

void to_json(nlohmann::json& j, const Checkpoint& ckpt);
void from_json(const nlohmann::json& j, Checkpoint& ckpt);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct TrainResult {
  std::vector<Checkpoint> history;  // every record_every epochs, plus the final state
  Checkpoint final;
  bool stopped_early = false;
};

// Called with every recorded checkpoint and the perturbed features it was
// evaluated on.
using TrainObserver = std::function<void(const Checkpoint&, const FeatureMatrix&)>;

// Gradient descent on the (1/N) sum max_eta loss objective: each step
// regenerates the perturbations at the current w, then steps along the
// gradient of the loss on the perturbed points.
TrainResult train(const Dataset& data, const TrainConfig& cfg, const TrainObserver& observer = {});

struct Evaluation {
  double robust_accuracy = 0.0;  // percent
  double robust_loss = 0.0;
  PerturbationSpec spec;
};

Evaluation evaluate(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec);

// train accuracy - test accuracy; both must use the same spec.
double generalization_gap(const Evaluation& train_eval, const Evaluation& test_eval);

// Noise stream used for the perturbations at a given epoch/batch of training.
std::uint64_t training_noise_seed(const TrainConfig& cfg, int epoch, int batch);

}  // namespace advsharp
