#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "advsharp/dataset.hpp"
#include "advsharp/types.hpp"

namespace advsharp {

enum class PerturbationKind {
  None,
  PgdL2,
  PgdLinf,
  AnalyticL2,
  AnalyticLinf,
  UniformLinf,
  UniformL2Ball,
};

enum class NormKind { None, L2, Linf };

std::string_view to_string(PerturbationKind kind);
PerturbationKind parse_perturbation_kind(std::string_view text);
std::string_view to_string(NormKind norm);
NormKind norm_of(PerturbationKind kind);
bool is_pgd(PerturbationKind kind);
bool is_analytic(PerturbationKind kind);
bool is_random(PerturbationKind kind);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::None;
  double epsilon = 0.0;    // budget, in the norm of `kind`
  double step_size = 0.0;  // PGD only
  int iterations = 1;      // PGD only
  bool clip_01 = false;
  std::uint64_t seed = 0;  // random kinds only

  // epsilon for kind=None reads as 0.
  double effective_epsilon() const { return kind == PerturbationKind::None ? 0.0 : epsilon; }
  void validate() const;

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;
};

void to_json(nlohmann::json& j, const PerturbationSpec& spec);
void from_json(const nlohmann::json& j, PerturbationSpec& spec);

// A family of specs that differ only in epsilon. With step_fraction > 0 the PGD
// step is step_fraction * epsilon (the L2 convention), otherwise base.step_size.
// eval_iterations > 0 replaces the PGD iteration count for evaluation.
struct EpsilonGrid {
  PerturbationSpec base;
  std::vector<double> epsilons;
  double step_fraction = 0.0;
  int eval_iterations = 0;

  PerturbationSpec train_spec(double epsilon) const;
  PerturbationSpec eval_spec(double epsilon) const;
  void validate() const;
};

void to_json(nlohmann::json& j, const EpsilonGrid& grid);
void from_json(const nlohmann::json& j, EpsilonGrid& grid);

// Gradient of log(1 + exp(-y w.x)) with respect to x: -y sigmoid(-y w.x) w.
Vector input_gradient(const Eigen::Ref<const Vector>& x, double y, const WeightVector& w);

// Projected gradient ascent on each sample's loss, starting at the clean
// point. pgd_linf steps along sign(grad), pgd_l2 along grad/||grad||. A sample
// whose input gradient is exactly zero is left where it is.
FeatureMatrix pgd(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec);

// Closed-form worst case for the linear model: x - eps y w/||w|| (L2) or
// x - eps y sign(w) (Linf). Requires ||w|| > 0 and clip_01 = false.
FeatureMatrix analytic_adversary(const Dataset& data, const WeightVector& w,
                                 const PerturbationSpec& spec);

// Uniform noise in the Linf box or the L2 ball; one RNG stream per sample.
FeatureMatrix random_noise(const Dataset& data, const PerturbationSpec& spec);

// Dispatches on spec.kind. Adversarial kinds at w = 0 return the clean
// features, since every point of the ball is then a maximizer.
FeatureMatrix perturb(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec);

}  // namespace advsharp
