#include "advsharp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "advsharp/error.hpp"
#include "advsharp/linear_model.hpp"
#include "advsharp/perturbation.hpp"
#include "advsharp/rng.hpp"
#include "advsharp/spectrum.hpp"

namespace advsharp {

namespace {

using Engine = std::mt19937_64;

double unif(Engine& eng, double lo, double hi) { return lo + (hi - lo) * uniform01(eng); }

Vector gaussian(Engine& eng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(eng);
  return v;
}

Dataset random_dataset(Engine& eng, Eigen::Index n, Eigen::Index d) {
  FeatureMatrix x(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = uniform01(eng);
    y[i] = uniform01(eng) < 0.5 ? -1.0 : 1.0;
  }
  return Dataset(std::move(x), std::move(y), "fixture");
}

double rel_err(const Matrix& approx, const Matrix& exact) {
  const double scale = std::max({approx.norm(), exact.norm(), 1e-300});
  return (approx - exact).norm() / scale;
}

Vector fd_grad(const std::function<double(const Vector&)>& f, const Vector& w, double h) {
  Vector g(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    Vector plus = w, minus = w;
    plus[j] += h;
    minus[j] -= h;
    g[j] = (f(plus) - f(minus)) / (2.0 * h);
  }
  return g;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& g, const Vector& w, double h) {
  Matrix j(w.size(), w.size());
  for (Eigen::Index c = 0; c < w.size(); ++c) {
    Vector plus = w, minus = w;
    plus[c] += h;
    minus[c] -= h;
    j.col(c) = (g(plus) - g(minus)) / (2.0 * h);
  }
  return j;
}

CheckResult upper_bound(std::string name, double metric, double tol, std::string detail) {
  return {std::move(name), metric < tol, metric, tol, std::move(detail)};
}

CheckResult gradient_fd(Engine& eng) {
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(t % 9);
    const Dataset data = random_dataset(eng, 12, d);
    const Vector w = gaussian(eng, d);
    const Vector fd = fd_grad([&](const Vector& v) { return loss(data, WeightVector(v)); }, w, 1e-5);
    worst = std::max(worst, rel_err(fd, grad(data, WeightVector(w))));
  }
  return upper_bound("gradient_fd", worst, 1e-6, "100 random instances, central differences h=1e-5");
}

CheckResult hessian_fd(Engine& eng) {
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(t % 7);
    const Dataset data = random_dataset(eng, 12, d);
    const Vector w = gaussian(eng, d);
    const Matrix fd =
        fd_jacobian([&](const Vector& v) { return grad(data, WeightVector(v)); }, w, 1e-5);
    worst = std::max(worst, rel_err(fd, hessian_exact(data, WeightVector(w))));
  }
  return upper_bound("hessian_fd", worst, 1e-4, "50 random instances, differenced gradient");
}

CheckResult robust_hessian_fd(Engine& eng) {
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(t % 7);
    const Dataset data = random_dataset(eng, 12, d);
    const Vector w = gaussian(eng, d);
    const double eps = unif(eng, 0.1, 1.0);
    const Matrix fd = fd_jacobian(
        [&](const Vector& v) { return robust_l2_grad(data, WeightVector(v), eps); }, w, 1e-5);
    worst = std::max(worst, rel_err(fd, robust_l2_hessian(data, WeightVector(w), eps)));
    const Vector fdg =
        fd_grad([&](const Vector& v) { return robust_l2_loss(data, WeightVector(v), eps); }, w, 1e-5);
    worst = std::max(worst, rel_err(fdg, robust_l2_grad(data, WeightVector(w), eps)));
  }
  return upper_bound("robust_hessian_fd", worst, 1e-4,
                     "worst-case L2 loss: gradient and Hessian vs finite differences");
}

CheckResult hessian_psd(Engine& eng) {
  double lowest = INFINITY;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(t % 6);
    const Dataset data = random_dataset(eng, 15, d);
    const WeightVector w(gaussian(eng, d));
    const PerturbationSpec spec{PerturbationKind::AnalyticL2, unif(eng, 0.1, 1.0), 0.0, 1, false, 0};
    lowest = std::min(lowest, eig_dense(hessian_at_perturbed(data, w, spec)).minCoeff());
  }
  return {"hessian_psd", lowest >= -1e-9, lowest, -1e-9,
          "min eigenvalue of the exact Hessian on adversarial points (must be >= tolerance)"};
}

CheckResult projector_spectrum(Engine& eng) {
  double worst = 0.0;
  for (Eigen::Index d : {2, 5, 10, 784}) {
    const Vector ev = eig_dense(projector(WeightVector(gaussian(eng, d))));
    Vector expected = Vector::Ones(d);
    expected[d - 1] = 0.0;
    worst = std::max(worst, (ev - expected).cwiseAbs().maxCoeff());
  }
  return upper_bound("projector_spectrum", worst, 1e-10, "eigenvalues {1 x (d-1), 0}, d in {2,5,10,784}");
}

// Worst ratio max_abs_diff / tolerance over the draws, and the best one.
std::pair<double, double> optimum_ratios(Engine& eng, bool flipped) {
  double worst = 0.0, best = INFINITY;
  const Eigen::Index dims[] = {2, 5, 10, 784};
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = dims[t % 4];
    const Vector x = gaussian(eng, d);
    const int y = uniform01(eng) < 0.5 ? -1 : 1;
    const double eps = unif(eng, 0.05, 2.0);
    const double scale = unif(eng, 0.2, 5.0);
    const OptimumMatch m = verify_optimum_match(x, y, eps, scale, flipped);
    const double ratio = m.max_abs_diff / m.tolerance;
    worst = std::max(worst, ratio);
    best = std::min(best, ratio);
  }
  return {worst, best};
}

CheckResult optimum_match(Engine& eng) {
  const double worst = optimum_ratios(eng, false).first;
  return upper_bound("optimum_match", worst, 1.0,
                     "max over 20 draws of max_abs_diff / (1e-8 max(1, ||exact||_F))");
}

CheckResult optimum_negative_control(Engine& eng) {
  const double best = optimum_ratios(eng, true).second;
  return {"optimum_negative_control", best > 1.0, best, 1.0,
          "theory side with a flipped projector sign must fail every draw (metric must exceed tolerance)"};
}

CheckResult lemma1(Engine& eng) {
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    DecomposedAdvLoss d;
    d.clean_logit = unif(eng, -5.0, 5.0);
    d.w_norm = unif(eng, 0.01, 3.0);
    d.eta_norm = unif(eng, 0.01, 3.0);
    d.label = uniform01(eng) < 0.5 ? -1 : 1;
    double c1 = unif(eng, -1.0, 1.0), c2 = unif(eng, -1.0, 1.0);
    if (c1 > c2) std::swap(c1, c2);
    if (c1 == c2) continue;
    d.cos_theta = c1;
    const double lo = decomposed_adv_loss(d);
    d.cos_theta = c2;
    const double hi = decomposed_adv_loss(d);
    const bool ok = d.label == 1 ? hi > lo : hi < lo;
    violations += ok ? 0 : 1;
  }
  return {"lemma1", violations == 0, static_cast<double>(violations), 0.0,
          "strict monotonicity in cos(theta), direction set by the label; 1000 draws"};
}

CheckResult lemma1_analytic(Engine& eng) {
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Dataset data = random_dataset(eng, 8, 6);
    const WeightVector w(gaussian(eng, 6));
    const double eps = unif(eng, 0.05, 1.5);
    const PerturbationSpec spec{PerturbationKind::AnalyticL2, eps, 0.0, 1, false, 0};
    const Vector adv = per_sample_loss(analytic_adversary(data, w, spec), data.labels(), w);
    for (Eigen::Index n = 0; n < data.size(); ++n) {
      DecomposedAdvLoss d;
      d.label = data.labels()[n] > 0 ? 1 : -1;
      d.clean_logit = data.labels()[n] * w.values().dot(data.features().row(n).transpose());
      d.w_norm = w.norm();
      d.eta_norm = eps;
      d.cos_theta = d.label;
      worst = std::max(worst, std::abs(decomposed_adv_loss(d) - adv[n]));
    }
  }
  return upper_bound("lemma1_analytic", worst, 1e-12,
                     "decomposed loss at y cos(theta) = 1 vs loss at the analytic L2 adversary");
}

CheckResult pgd_vs_analytic(Engine& eng) {
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(t % 9) * 10;
    const Dataset data = random_dataset(eng, 20, d);
    const WeightVector w(gaussian(eng, d));
    const double eps = unif(eng, 0.05, 1.5);
    const bool linf = t % 2 == 1;
    const PerturbationSpec pgd_spec{linf ? PerturbationKind::PgdLinf : PerturbationKind::PgdL2,
                                    eps, 0.15 * eps, 100, false, 0};
    const PerturbationSpec exact_spec{
        linf ? PerturbationKind::AnalyticLinf : PerturbationKind::AnalyticL2, eps, 0.0, 1, false, 0};
    const Vector a = per_sample_loss(pgd(data, w, pgd_spec), data.labels(), w);
    const Vector b = per_sample_loss(analytic_adversary(data, w, exact_spec), data.labels(), w);
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  return upper_bound("pgd_vs_analytic", worst, 1e-8,
                     "per-sample loss, 100-step PGD (L2 and Linf, no clipping) vs closed form");
}

CheckResult uniform_variance(Engine& eng) {
  const Eigen::Index n = 100000;
  const double eps = unif(eng, 0.1, 0.5);
  const Dataset data(FeatureMatrix::Constant(n, 1, 0.5), Vector::Ones(n), "variance");
  const PerturbationSpec spec{PerturbationKind::UniformLinf, eps, 0.0, 1, false, eng()};
  const Vector eta = (random_noise(data, spec) - data.features()).col(0);
  const double mean = eta.mean();
  const double var = (eta.array() - mean).square().sum() / static_cast<double>(n - 1);
  const double target = eps * eps / 3.0;
  const double rel = std::abs(var / target - 1.0);
  const bool mean_ok = std::abs(mean) <= 3.0 * eps / std::sqrt(3.0 * static_cast<double>(n));
  return {"uniform_variance", rel < 0.02 && mean_ok, rel, 0.02,
          "1e5 draws of U(-eps, eps): |var / (eps^2/3) - 1|; mean within 3 standard errors"};
}

CheckResult lanczos_vs_dense(Engine& eng) {
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(t % 5) * 15;
    const Matrix a = Matrix::NullaryExpr(n, n, [&]() { return unif(eng, -1.0, 1.0); });
    const Matrix h = (a + a.transpose()) / 2.0;
    const Vector dense = eig_dense(h).head(3);
    LanczosOptions opts;
    opts.seed = eng();
    const Vector lanczos = eig_topk([&](const Vector& v) { return Vector(h * v); }, n, 3, opts);
    const double scale = std::max(dense.cwiseAbs().maxCoeff(), 1e-300);
    worst = std::max(worst, (dense - lanczos).cwiseAbs().maxCoeff() / scale);
  }
  return upper_bound("lanczos_vs_dense", worst, 1e-6, "top-3 eigenvalues on 50 random symmetric matrices");
}

CheckResult noise_trajectory(Engine& eng) {
  const Dataset data = synth_separable(100, 10, 0.3, eng());
  EpsilonGrid grid;
  grid.base = {PerturbationKind::UniformLinf, 0.0, 0.0, 1, false, 0};
  grid.epsilons = {16.0 / 255.0};
  TrainConfig cfg;
  cfg.learning_rate = 2.0;
  cfg.epochs = 1000;
  cfg.seed = eng();
  const NoiseTrajectory traj = random_noise_sharpness_scan(data, grid, cfg).front();
  const TrajectoryPoint& first = traj.points.at(1);
  const TrajectoryPoint& last = traj.points.back();
  const double ratio = last.top_eigenvalue / first.top_eigenvalue;
  const bool grad_shrinks = last.grad_norm < 0.05 * first.grad_norm;
  return {"noise_trajectory", ratio < 0.05 && grad_shrinks, ratio, 0.05,
          "uniform-noise training on separable data: final / epoch-1 top eigenvalue, with the "
          "gradient norm also shrinking below 5%"};
}

using CheckFn = CheckResult (*)(Engine&);

struct NamedCheck {
  const char* name;
  CheckFn fn;
};

const NamedCheck kChecks[] = {
    {"gradient_fd", gradient_fd},
    {"hessian_fd", hessian_fd},
    {"robust_hessian_fd", robust_hessian_fd},
    {"hessian_psd", hessian_psd},
    {"projector_spectrum", projector_spectrum},
    {"optimum_match", optimum_match},
    {"optimum_negative_control", optimum_negative_control},
    {"lemma1", lemma1},
    {"lemma1_analytic", lemma1_analytic},
    {"pgd_vs_analytic", pgd_vs_analytic},
    {"uniform_variance", uniform_variance},
    {"lanczos_vs_dense", lanczos_vs_dense},
    {"noise_trajectory", noise_trajectory},
};

}  // namespace

const std::vector<std::string>& oracle_check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& c : kChecks) out.emplace_back(c.name);
    return out;
  }();
  return names;
}

std::vector<CheckResult> run_oracle_suite(const VerifyOptions& options) {
  const auto& names = oracle_check_names();
  for (const auto& want : options.only) {
    require(std::find(names.begin(), names.end(), want) != names.end(), ErrorKind::Config,
            "unknown check '" + want + "'");
  }
  std::vector<CheckResult> out;
  std::uint64_t index = 0;
  for (const auto& c : kChecks) {
    ++index;
    const bool selected = options.only.empty() ||
                          std::find(options.only.begin(), options.only.end(), c.name) !=
                              options.only.end();
    if (!selected) continue;
    // Each check owns a stream, so --only reproduces the numbers of a full run.
    Engine eng = make_stream(options.seed, index);
    out.push_back(c.fn(eng));
  }
  return out;
}

nlohmann::json to_report(const std::vector<CheckResult>& results) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& r : results) {
    j[r.name] = {{"pass", r.passed}, {"metric", r.metric}, {"tolerance", r.tolerance},
                 {"detail", r.detail}};
  }
  return j;
}

}  // namespace advsharp
