#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advsharp/dataset.hpp"
#include "advsharp/perturbation.hpp"
#include "advsharp/training.hpp"
#include "advsharp/verify.hpp"

namespace advsharp {

struct DatasetConfig {
  std::string kind = "mnist2";  // mnist2 | synth
  std::filesystem::path data_dir = "data/mnist";
  // synth only
  Eigen::Index n_per_class = 500;
  Eigen::Index dim = 20;
  double margin = 0.3;
  double noise_sd = 0.05;
  std::uint64_t seed = 0;
  // Appends a constant-1 feature (an intercept); off by default.
  bool bias_column = false;
};

struct LandscapeConfig {
  int points = 41;
  double radius = 1.0;
  std::uint64_t seed = 0;
};

struct SpectrumConfig {
  int top_k = 3;
  bool crosscheck = true;  // Lanczos next to the dense solver
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::vector<EpsilonGrid> grids;
  TrainConfig train;  // its perturbation field is ignored; grids supply it
  LandscapeConfig landscape;
  SpectrumConfig spectrum;
  std::filesystem::path outputs = "out";
  int jobs = 1;
  VerifyOptions verify;

  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct DataSplits {
  Dataset train;
  Dataset test;
};

// mnist2: the canonical IDX files in data_dir. synth: train and test drawn with
// seeds `seed` and `seed + 1`.
DataSplits load_splits(const DatasetConfig& cfg);

// Shortest round-trip decimal text; identical bytes for identical doubles.
std::string format_number(double v);

std::filesystem::path checkpoint_path(const ExperimentConfig& cfg, PerturbationKind kind,
                                      double epsilon);

struct AccuracyRow {
  double epsilon = 0.0;
  PerturbationKind kind = PerturbationKind::None;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double gap = 0.0;
};

struct CurvatureRow {
  double epsilon = 0.0;
  PerturbationKind kind = PerturbationKind::None;
  double curvature = 0.0;
  double g0 = 0.0;
  double train_loss = 0.0;
  double w_norm = 0.0;
};

struct SpectrumRow {
  double epsilon = 0.0;
  PerturbationKind kind = PerturbationKind::None;
  Vector top;
  double w_norm = 0.0;
  double train_loss = 0.0;
  double lanczos_rel_diff = 0.0;  // NaN when the crosscheck is off
};

struct SpectrumSummary {
  PerturbationKind kind = PerturbationKind::None;
  std::size_t points = 0;
  double r2 = 0.0;  // NaN with fewer than two distinct epsilons
  bool strictly_increasing = false;
  double lanczos_max_rel_diff = 0.0;
};

// Trains one checkpoint per grid epsilon and writes checkpoints/, history/ and
// accuracy.csv under cfg.outputs.
std::vector<AccuracyRow> cmd_train(const ExperimentConfig& cfg);

// Needs the checkpoints of cmd_train. Writes landscape.csv, curvature.csv and
// one SVG per grid (plus an overlay per norm when several kinds share it).
std::vector<CurvatureRow> cmd_landscape(const ExperimentConfig& cfg);

// Needs the checkpoints of cmd_train. Writes spectrum.csv and
// spectrum_summary.csv.
std::vector<SpectrumRow> cmd_spectrum(const ExperimentConfig& cfg,
                                      std::vector<SpectrumSummary>* summary = nullptr);

// Runs the oracle suite and writes verify.json.
std::vector<CheckResult> cmd_verify(const ExperimentConfig& cfg);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<SvgSeries>& series);

}  // namespace advsharp
