#include "advsharp/landscape.hpp"

#include <random>

#include "advsharp/linear_model.hpp"
#include "advsharp/rng.hpp"

namespace advsharp {

Vector sample_direction(const WeightVector& w, std::uint64_t seed) {
  const double w_norm = w.norm();
  require(w_norm > 0.0, ErrorKind::InvalidArgument, "direction normalization needs ||w|| > 0");
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto eng = make_stream(seed + attempt, 0xD1EC);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector h(w.dim());
    for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = normal(eng);
    const double h_norm = h.norm();
    if (h_norm > 0.0) return h * (w_norm / h_norm);
  }
}

std::vector<double> symmetric_grid(int points, double radius) {
  require(points >= 3 && points % 2 == 1, ErrorKind::Config, "alpha grid needs an odd count >= 3");
  require(radius > 0.0, ErrorKind::Config, "alpha radius must be > 0");
  const int half = points / 2;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = -half; i <= half; ++i) out.push_back(radius * static_cast<double>(i) / half);
  return out;
}

std::size_t check_alpha_grid(const std::vector<double>& alphas) {
  require(alphas.size() >= 3, ErrorKind::Config, "alpha grid needs at least 3 points");
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    require(alphas[i] > alphas[i - 1], ErrorKind::Config, "alpha grid must be strictly increasing");
  }
  const std::size_t n = alphas.size();
  for (std::size_t i = 0; i < n; ++i) {
    require(std::abs(alphas[i] + alphas[n - 1 - i]) <= 1e-12, ErrorKind::Config,
            "alpha grid must be symmetric about 0");
  }
  require(n % 2 == 1 && alphas[n / 2] == 0.0, ErrorKind::Config, "alpha grid must contain 0");
  return n / 2;
}

LandscapeProfile sweep(const Dataset& data, const Checkpoint& ckpt, const PerturbationSpec& spec,
                       const std::vector<double>& alphas, std::uint64_t seed) {
  check_alpha_grid(alphas);
  require(ckpt.w.dim() == data.dim(), ErrorKind::Dimension, "checkpoint dim != data dim");
  const Vector h = sample_direction(ckpt.w, seed);

  LandscapeProfile profile;
  profile.alphas = alphas;
  profile.direction_seed = seed;
  profile.direction_norm = h.norm();
  profile.spec = spec;
  profile.checkpoint_ref = data.name() + "@epoch" + std::to_string(ckpt.epoch);
  profile.losses.reserve(alphas.size());
  for (double alpha : alphas) {
    // alpha = 0 must reproduce the checkpoint exactly, so skip the 0 * h add.
    const WeightVector displaced =
        alpha == 0.0 ? ckpt.w : WeightVector(ckpt.w.values() + alpha * h);
    const FeatureMatrix perturbed = perturb(data, displaced, spec);
    profile.losses.push_back(loss(perturbed, data.labels(), displaced));
  }
  return profile;
}

double curvature_at_zero(const LandscapeProfile& profile) {
  require(profile.alphas.size() == profile.losses.size(), ErrorKind::InvalidArgument,
          "profile alphas and losses differ in length");
  const std::size_t zero = check_alpha_grid(profile.alphas);
  const double delta = profile.alphas[zero + 1];
  require(std::abs(profile.alphas[zero - 1] + delta) <= 1e-12, ErrorKind::InvalidArgument,
          "grid spacing around 0 is not symmetric");
  const double g0 = profile.losses[zero];
  return (profile.losses[zero + 1] - 2.0 * g0 + profile.losses[zero - 1]) / (delta * delta);
}

}  // namespace advsharp
