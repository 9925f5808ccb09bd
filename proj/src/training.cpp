#include "advsharp/training.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "advsharp/linear_model.hpp"
#include "advsharp/rng.hpp"

namespace advsharp {

namespace {

constexpr int kCheckpointVersion = 1;

Dataset subset(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  FeatureMatrix f(static_cast<Eigen::Index>(rows.size()), data.dim());
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    f.row(static_cast<Eigen::Index>(i)) = data.features().row(rows[i]);
    y[static_cast<Eigen::Index>(i)] = data.labels()[rows[i]];
  }
  return Dataset(std::move(f), std::move(y), data.name());
}

}  // namespace

void TrainConfig::validate() const {
  perturbation.validate();
  require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorKind::Config,
          "learning_rate must be > 0");
  require(epochs >= 1, ErrorKind::Config, "epochs must be >= 1");
  require(batch_size >= 0, ErrorKind::Config, "batch_size must be >= 0");
  require(stop_tol >= 0.0, ErrorKind::Config, "stop_tol must be >= 0");
  require(record_every >= 1, ErrorKind::Config, "record_every must be >= 1");
  require(init_scale >= 0.0, ErrorKind::Config, "init_scale must be >= 0");
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = nlohmann::json{{"perturbation", cfg.perturbation},
                     {"learning_rate", cfg.learning_rate},
                     {"epochs", cfg.epochs},
                     {"batch_size", cfg.batch_size},
                     {"seed", cfg.seed},
                     {"stop_tol", cfg.stop_tol},
                     {"record_every", cfg.record_every},
                     {"init", cfg.init == WeightInit::Zeros ? "zeros" : "gaussian"},
                     {"init_scale", cfg.init_scale}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  if (!j.is_object()) fail(ErrorKind::Config, "train config must be a JSON object");
  try {
    cfg = TrainConfig{};
    if (j.contains("perturbation")) cfg.perturbation = j.at("perturbation").get<PerturbationSpec>();
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.stop_tol = j.value("stop_tol", cfg.stop_tol);
    cfg.record_every = j.value("record_every", cfg.record_every);
    cfg.init_scale = j.value("init_scale", cfg.init_scale);
    const auto init = j.value("init", std::string("zeros"));
    if (init == "zeros") {
      cfg.init = WeightInit::Zeros;
    } else if (init == "gaussian") {
      cfg.init = WeightInit::Gaussian;
    } else {
      fail(ErrorKind::Config, "unknown init '" + init + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed train config: ") + e.what());
  }
}

PerturbationSpec Checkpoint::perturbation_at_checkpoint() const {
  PerturbationSpec spec = config.perturbation;
  spec.seed = perturbation_seed;
  return spec;
}

void to_json(nlohmann::json& j, const Checkpoint& ckpt) {
  j = nlohmann::json{{"version", kCheckpointVersion},
                     {"w", std::vector<double>(ckpt.w.values().begin(), ckpt.w.values().end())},
                     {"epoch", ckpt.epoch},
                     {"train_loss", ckpt.train_loss},
                     {"train_robust_acc", ckpt.train_robust_acc},
                     {"grad_norm", ckpt.grad_norm},
                     {"perturbation_seed", ckpt.perturbation_seed},
                     {"config", ckpt.config}};
}

void from_json(const nlohmann::json& j, Checkpoint& ckpt) {
  try {
    const int version = j.at("version").get<int>();
    require(version == kCheckpointVersion, ErrorKind::Format,
            "unsupported checkpoint version " + std::to_string(version));
    const auto w = j.at("w").get<std::vector<double>>();
    ckpt.w = WeightVector(Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
    ckpt.epoch = j.at("epoch").get<int>();
    ckpt.train_loss = j.at("train_loss").get<double>();
    ckpt.train_robust_acc = j.at("train_robust_acc").get<double>();
    ckpt.grad_norm = j.at("grad_norm").get<double>();
    ckpt.perturbation_seed = j.at("perturbation_seed").get<std::uint64_t>();
    ckpt.config = j.at("config").get<TrainConfig>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << nlohmann::json(ckpt).dump(1) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, "checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  return j.get<Checkpoint>();
}

std::uint64_t training_noise_seed(const TrainConfig& cfg, int epoch, int batch) {
  return stream_seed(cfg.perturbation.seed ^ mix64(cfg.seed), static_cast<std::uint64_t>(epoch),
                     static_cast<std::uint64_t>(batch));
}

TrainResult train(const Dataset& data, const TrainConfig& cfg, const TrainObserver& observer) {
  cfg.validate();

  Vector w0 = Vector::Zero(data.dim());
  if (cfg.init == WeightInit::Gaussian) {
    auto eng = make_stream(cfg.seed, 0xC0FFEE);
    std::normal_distribution<double> normal(0.0, cfg.init_scale);
    for (Eigen::Index j = 0; j < w0.size(); ++j) w0[j] = normal(eng);
  }
  WeightVector w(std::move(w0));

  const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= data.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  TrainResult result;

  // Loss, accuracy and gradient on the whole training set at the current w.
  auto snapshot = [&](int epoch, Vector* gradient_out) {
    PerturbationSpec spec = cfg.perturbation;
    spec.seed = training_noise_seed(cfg, epoch, 0);
    const FeatureMatrix perturbed = perturb(data, w, spec);
    Checkpoint c;
    c.w = w;
    c.epoch = epoch;
    c.train_loss = loss(perturbed, data.labels(), w);
    c.train_robust_acc = accuracy(perturbed, data.labels(), w);
    Vector g = grad(perturbed, data.labels(), w);
    c.grad_norm = g.norm();
    c.perturbation_seed = spec.seed;
    c.config = cfg;
    if (!std::isfinite(c.train_loss) || !std::isfinite(c.grad_norm)) {
      fail(ErrorKind::Diverged, "training diverged at epoch " + std::to_string(epoch));
    }
    if (gradient_out) *gradient_out = std::move(g);
    return std::make_pair(std::move(c), perturbed);
  };

  auto descend = [&](const Vector& g, int epoch) {
    Vector next = w.values() - cfg.learning_rate * g;
    if (!next.allFinite()) {
      fail(ErrorKind::Diverged, "training diverged at epoch " + std::to_string(epoch));
    }
    w = WeightVector(std::move(next));
  };

  auto record = [&](const Checkpoint& c, const FeatureMatrix& perturbed) {
    result.history.push_back(c);
    if (observer) observer(c, perturbed);
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Vector g;
    auto [ckpt, perturbed] = snapshot(epoch, &g);
    if (epoch % cfg.record_every == 0) record(ckpt, perturbed);
    if (ckpt.grad_norm < cfg.stop_tol) {
      result.stopped_early = true;
      result.final = ckpt;
      if (epoch % cfg.record_every != 0) record(ckpt, perturbed);
      return result;
    }

    if (full_batch) {
      descend(g, epoch);
      continue;
    }

    std::mt19937_64 shuffle_eng(stream_seed(cfg.seed, 0x5EED, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_eng);
    int batch = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size), ++batch) {
      const auto stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const Dataset mini = subset(data, {order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(stop)});
      PerturbationSpec spec = cfg.perturbation;
      spec.seed = training_noise_seed(cfg, epoch, batch + 1);
      const FeatureMatrix p = perturb(mini, w, spec);
      descend(grad(p, mini.labels(), w), epoch);
    }
  }

  auto [final_ckpt, perturbed] = snapshot(cfg.epochs, nullptr);
  result.final = final_ckpt;
  record(final_ckpt, perturbed);
  return result;
}

Evaluation evaluate(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec) {
  const FeatureMatrix perturbed = perturb(data, w, spec);
  return {accuracy(perturbed, data.labels(), w), loss(perturbed, data.labels(), w), spec};
}

double generalization_gap(const Evaluation& train_eval, const Evaluation& test_eval) {
  PerturbationSpec a = train_eval.spec;
  PerturbationSpec b = test_eval.spec;
  a.seed = b.seed = 0;  // noise realizations may differ between splits
  require(a == b, ErrorKind::InvalidArgument,
          "generalization gap needs both evaluations under the same perturbation spec");
  return train_eval.robust_accuracy - test_eval.robust_accuracy;
}

}  // namespace advsharp
