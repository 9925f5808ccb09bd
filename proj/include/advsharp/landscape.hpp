#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advsharp/dataset.hpp"
#include "advsharp/perturbation.hpp"
#include "advsharp/training.hpp"

namespace advsharp {

struct LandscapeProfile {
  std::vector<double> alphas;  // strictly increasing, symmetric, contains 0
  std::vector<double> losses;
  std::uint64_t direction_seed = 0;
  double direction_norm = 0.0;
  std::string checkpoint_ref;
  PerturbationSpec spec;
};

// Gaussian direction rescaled to ||w|| (whole-vector filter normalization; the
// linear model has a single filter).
Vector sample_direction(const WeightVector& w, std::uint64_t seed);

// `points` values evenly spaced on [-radius, radius]; points must be odd.
std::vector<double> symmetric_grid(int points = 41, double radius = 1.0);

// Validates the grid and returns the index of alpha = 0.
std::size_t check_alpha_grid(const std::vector<double>& alphas);

// g(alpha) = mean loss at w + alpha h, with the perturbations regenerated
// against the displaced weights for every alpha.
LandscapeProfile sweep(const Dataset& data, const Checkpoint& ckpt, const PerturbationSpec& spec,
                       const std::vector<double>& alphas, std::uint64_t seed);

// (g(delta) - 2 g(0) + g(-delta)) / delta^2 at the grid points next to 0.
double curvature_at_zero(const LandscapeProfile& profile);

}  // namespace advsharp
