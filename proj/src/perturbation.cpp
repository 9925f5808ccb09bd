#include "advsharp/perturbation.hpp"

#include <array>
#include <random>

#include "advsharp/linear_model.hpp"
#include "advsharp/rng.hpp"

namespace advsharp {

namespace {

struct KindName {
  PerturbationKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 7> kKindNames{{
    {PerturbationKind::None, "none"},
    {PerturbationKind::PgdL2, "pgd_l2"},
    {PerturbationKind::PgdLinf, "pgd_linf"},
    {PerturbationKind::AnalyticL2, "analytic_l2"},
    {PerturbationKind::AnalyticLinf, "analytic_linf"},
    {PerturbationKind::UniformLinf, "uniform_linf"},
    {PerturbationKind::UniformL2Ball, "uniform_l2_ball"},
}};

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void clip_unit(Eigen::Ref<Vector> x) { x = x.cwiseMax(0.0).cwiseMin(1.0); }

}  // namespace

std::string_view to_string(PerturbationKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

PerturbationKind parse_perturbation_kind(std::string_view text) {
  for (const auto& k : kKindNames) {
    if (k.name == text) return k.kind;
  }
  // Accept the hyphenated spelling as well (pgd-l2).
  std::string underscored(text);
  for (auto& c : underscored) c = c == '-' ? '_' : c;
  for (const auto& k : kKindNames) {
    if (k.name == underscored) return k.kind;
  }
  fail(ErrorKind::InvalidSpec, "unknown perturbation kind '" + std::string(text) + "'");
}

std::string_view to_string(NormKind norm) {
  switch (norm) {
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
    case NormKind::None: break;
  }
  return "none";
}

NormKind norm_of(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::PgdL2:
    case PerturbationKind::AnalyticL2:
    case PerturbationKind::UniformL2Ball: return NormKind::L2;
    case PerturbationKind::PgdLinf:
    case PerturbationKind::AnalyticLinf:
    case PerturbationKind::UniformLinf: return NormKind::Linf;
    case PerturbationKind::None: break;
  }
  return NormKind::None;
}

bool is_pgd(PerturbationKind kind) {
  return kind == PerturbationKind::PgdL2 || kind == PerturbationKind::PgdLinf;
}
bool is_analytic(PerturbationKind kind) {
  return kind == PerturbationKind::AnalyticL2 || kind == PerturbationKind::AnalyticLinf;
}
bool is_random(PerturbationKind kind) {
  return kind == PerturbationKind::UniformLinf || kind == PerturbationKind::UniformL2Ball;
}

void PerturbationSpec::validate() const {
  require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorKind::InvalidSpec, "epsilon must be >= 0");
  if (is_pgd(kind)) {
    require(iterations >= 1, ErrorKind::InvalidSpec, "PGD needs iterations >= 1");
    if (epsilon > 0.0) {
      require(std::isfinite(step_size) && step_size > 0.0, ErrorKind::InvalidSpec,
              "PGD needs step_size > 0");
    }
  }
  if (is_analytic(kind)) {
    require(!clip_01, ErrorKind::InvalidSpec,
            "analytic adversaries are only exact without [0,1] clipping");
  }
}

void to_json(nlohmann::json& j, const PerturbationSpec& spec) {
  j = nlohmann::json{{"kind", std::string(to_string(spec.kind))},
                     {"epsilon", spec.epsilon},
                     {"step_size", spec.step_size},
                     {"iterations", spec.iterations},
                     {"clip_01", spec.clip_01},
                     {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, PerturbationSpec& spec) {
  if (!j.is_object()) fail(ErrorKind::InvalidSpec, "perturbation spec must be a JSON object");
  try {
    spec = PerturbationSpec{};
    spec.kind = parse_perturbation_kind(j.value("kind", std::string("none")));
    spec.epsilon = j.value("epsilon", 0.0);
    spec.step_size = j.value("step_size", 0.0);
    spec.iterations = j.value("iterations", 1);
    spec.clip_01 = j.value("clip_01", false);
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidSpec, std::string("malformed perturbation spec: ") + e.what());
  }
}

PerturbationSpec EpsilonGrid::train_spec(double epsilon) const {
  PerturbationSpec spec = base;
  spec.epsilon = epsilon;
  if (step_fraction > 0.0) spec.step_size = step_fraction * epsilon;
  return spec;
}

PerturbationSpec EpsilonGrid::eval_spec(double epsilon) const {
  PerturbationSpec spec = train_spec(epsilon);
  if (is_pgd(spec.kind) && eval_iterations > 0) spec.iterations = eval_iterations;
  return spec;
}

void EpsilonGrid::validate() const {
  require(!epsilons.empty(), ErrorKind::Config, "epsilon grid is empty");
  require(std::is_sorted(epsilons.begin(), epsilons.end()), ErrorKind::Config,
          "epsilon grid must be sorted ascending");
  require(step_fraction >= 0.0, ErrorKind::Config, "step_fraction must be >= 0");
  require(eval_iterations >= 0, ErrorKind::Config, "eval_iterations must be >= 0");
  for (double eps : epsilons) {
    train_spec(eps).validate();
    eval_spec(eps).validate();
  }
}

void to_json(nlohmann::json& j, const EpsilonGrid& grid) {
  j = grid.base;
  j.erase("epsilon");
  j["epsilons"] = grid.epsilons;
  j["step_fraction"] = grid.step_fraction;
  j["eval_iterations"] = grid.eval_iterations;
}

void from_json(const nlohmann::json& j, EpsilonGrid& grid) {
  grid = EpsilonGrid{};
  grid.base = j.get<PerturbationSpec>();
  try {
    if (j.contains("epsilons")) {
      grid.epsilons = j.at("epsilons").get<std::vector<double>>();
    } else if (j.contains("epsilon")) {
      grid.epsilons = {j.at("epsilon").get<double>()};
    }
    grid.step_fraction = j.value("step_fraction", 0.0);
    grid.eval_iterations = j.value("eval_iterations", 0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed epsilon grid: ") + e.what());
  }
}

Vector input_gradient(const Eigen::Ref<const Vector>& x, double y, const WeightVector& w) {
  const double m = y * w.values().dot(x);
  return (-y * sigmoid(-m)) * w.values();
}

FeatureMatrix pgd(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec) {
  spec.validate();
  require(is_pgd(spec.kind), ErrorKind::InvalidSpec, "pgd() needs a pgd_l2 or pgd_linf spec");
  require(w.dim() == data.dim(), ErrorKind::Dimension, "weight dim != feature dim");

  FeatureMatrix out = data.features();
  const double eps = spec.epsilon;
  if (eps == 0.0 || w.is_zero()) return out;
  const bool linf = spec.kind == PerturbationKind::PgdLinf;

  // The input gradient is -y sigmoid(-y w.x) w, so both step rules reduce to
  // a fixed row scaled by the sign of that coefficient.
  const RowVector w_row = w.values().transpose();
  const RowVector step_row = linf ? RowVector(w_row.unaryExpr(&sign))
                                  : RowVector(w_row / w.norm());
  RowVector next(data.dim());
  for (Eigen::Index n = 0; n < data.size(); ++n) {
    auto x = out.row(n);
    const auto clean = data.features().row(n);
    const double y = data.labels()[n];
    for (int it = 0; it < spec.iterations; ++it) {
      const double coeff = -y * sigmoid(-y * x.dot(w_row));
      if (coeff == 0.0) break;
      next = x + (coeff > 0.0 ? spec.step_size : -spec.step_size) * step_row;
      if (linf) {
        next = next.cwiseMax((clean.array() - eps).matrix()).cwiseMin((clean.array() + eps).matrix());
      } else {
        const double dn = (next - clean).norm();
        if (dn > eps) next = clean + (next - clean) * (eps / dn);
      }
      if (spec.clip_01) next = next.cwiseMax(0.0).cwiseMin(1.0);
      // The update depends only on the current iterate, so a fixed point
      // stays fixed for the remaining iterations.
      if (next == x) break;
      x = next;
    }
  }
  return out;
}

FeatureMatrix analytic_adversary(const Dataset& data, const WeightVector& w,
                                 const PerturbationSpec& spec) {
  spec.validate();
  require(is_analytic(spec.kind), ErrorKind::InvalidSpec,
          "analytic_adversary() needs an analytic_l2 or analytic_linf spec");
  require(w.dim() == data.dim(), ErrorKind::Dimension, "weight dim != feature dim");
  require(w.norm() > 0.0, ErrorKind::InvalidArgument, "analytic adversary needs ||w|| > 0");

  const Vector step = spec.kind == PerturbationKind::AnalyticL2
                          ? Vector(spec.epsilon * w.direction())
                          : Vector(spec.epsilon * w.values().unaryExpr(&sign));
  FeatureMatrix out = data.features();
  for (Eigen::Index n = 0; n < data.size(); ++n) {
    out.row(n) -= data.labels()[n] * step.transpose();
  }
  return out;
}

FeatureMatrix random_noise(const Dataset& data, const PerturbationSpec& spec) {
  spec.validate();
  require(is_random(spec.kind), ErrorKind::InvalidSpec,
          "random_noise() needs a uniform_linf or uniform_l2_ball spec");
  FeatureMatrix out = data.features();
  const double eps = spec.epsilon;
  if (eps == 0.0) return out;

  const Eigen::Index d = data.dim();
  Vector eta(d);
  for (Eigen::Index n = 0; n < data.size(); ++n) {
    auto eng = make_stream(spec.seed, static_cast<std::uint64_t>(n));
    // Per sample: the distribution caches a second draw between calls.
    std::normal_distribution<double> normal(0.0, 1.0);
    if (spec.kind == PerturbationKind::UniformLinf) {
      for (Eigen::Index j = 0; j < d; ++j) eta[j] = eps * (2.0 * uniform01(eng) - 1.0);
    } else {
      double norm = 0.0;
      do {
        for (Eigen::Index j = 0; j < d; ++j) eta[j] = normal(eng);
        norm = eta.norm();
      } while (norm == 0.0);
      const double radius = eps * std::pow(uniform01(eng), 1.0 / static_cast<double>(d));
      eta *= radius / norm;
    }
    Vector x = data.features().row(n).transpose() + eta;
    if (spec.clip_01) clip_unit(x);
    out.row(n) = x.transpose();
  }
  return out;
}

FeatureMatrix perturb(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec) {
  spec.validate();
  if (spec.kind == PerturbationKind::None || spec.epsilon == 0.0) return data.features();
  if (is_random(spec.kind)) return random_noise(data, spec);
  if (w.is_zero()) return data.features();
  if (is_pgd(spec.kind)) return pgd(data, w, spec);
  return analytic_adversary(data, w, spec);
}

}  // namespace advsharp
