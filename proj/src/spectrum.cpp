#include "advsharp/spectrum.hpp"

#include <numeric>

#include "advsharp/linear_model.hpp"

namespace advsharp {

namespace {
constexpr Eigen::Index kDenseLimit = 1024;
}

Matrix projector(const WeightVector& w) {
  const Vector u = w.direction();
  return Matrix::Identity(w.dim(), w.dim()) - u * u.transpose();
}

Matrix theory_hessian_at_optimum(const Dataset& data, const WeightVector& w_star,
                                 const Vector& eta_norms) {
  require(w_star.dim() == data.dim(), ErrorKind::Dimension, "weight dim != feature dim");
  require(eta_norms.size() == data.size(), ErrorKind::Dimension, "need one noise norm per sample");
  require((eta_norms.array() >= 0.0).all(), ErrorKind::InvalidArgument, "noise norms must be >= 0");
  const double coeff = eta_norms.sum() / (2.0 * static_cast<double>(data.size()) * w_star.norm());
  return coeff * projector(w_star);
}

Matrix random_noise_hessian_limit(const Dataset& data, double epsilon, double kappa) {
  require(kappa >= 0.0, ErrorKind::InvalidArgument, "kappa must be >= 0");
  const double n = static_cast<double>(data.size());
  Matrix second_moment = data.features().transpose() * data.features() / n;
  second_moment.diagonal().array() += epsilon * epsilon / 3.0;
  return second_moment * (kappa / ((kappa + 1.0) * (kappa + 1.0)));
}

OptimumMatch verify_optimum_match(const Vector& x, int y, double epsilon, double scale,
                                  bool flip_projector_sign) {
  require(y == 1 || y == -1, ErrorKind::InvalidArgument, "label must be -1 or +1");
  require(x.norm() > 0.0, ErrorKind::InvalidArgument, "x must be nonzero");
  require(epsilon >= 1e-6, ErrorKind::InvalidArgument,
          "epsilon below 1e-6 degenerates the optimality condition");
  require(scale > 0.0, ErrorKind::InvalidArgument, "scale must be > 0");

  // The condition w*/||w*|| = y x / ||eta|| with ||eta|| = eps forces ||x|| = eps.
  const Vector x_scaled = x * (epsilon / x.norm());
  OptimumMatch m;
  m.w_star = WeightVector(scale * static_cast<double>(y) * x_scaled / epsilon);

  FeatureMatrix features = x_scaled.transpose();
  const Vector labels = Vector::Constant(1, static_cast<double>(y));
  m.exact = robust_l2_hessian(features, labels, m.w_star, epsilon);
  const Matrix proj = projector(m.w_star);
  const double w_norm = m.w_star.norm();

  // Same dataset shape as the exact side: N = 1, ||eta|| = eps.
  const double coeff = epsilon / (2.0 * w_norm);
  m.theory = (flip_projector_sign ? -coeff : coeff) * proj;

  m.max_abs_diff = (m.exact - m.theory).cwiseAbs().maxCoeff();
  m.tolerance = 1e-8 * std::max(1.0, m.exact.norm());
  return m;
}

Matrix hessian_at_perturbed(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec) {
  const FeatureMatrix perturbed = perturb(data, w, spec);
  return hessian_exact(perturbed, data.labels(), w);
}

Vector top_eigenvalues(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec,
                       Eigen::Index k) {
  const FeatureMatrix perturbed = perturb(data, w, spec);
  if (data.dim() <= kDenseLimit) {
    return eig_dense(hessian_exact(perturbed, data.labels(), w)).head(k);
  }
  return eig_topk(
      [&](const Vector& v) { return hessian_vector_product(perturbed, data.labels(), w, v); },
      data.dim(), k);
}

double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument,
          "linear fit needs at least two (x, y) pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::InvalidArgument, "linear fit needs distinct x values");
  if (syy == 0.0) return 1.0;
  return (sxy * sxy) / (sxx * syy);
}

std::vector<SharpnessRow> adversarial_sharpness_scan(const Dataset& data, const EpsilonGrid& grid,
                                                     const TrainConfig& base, Eigen::Index k) {
  grid.validate();
  require(k >= 1 && k <= data.dim(), ErrorKind::InvalidArgument, "need 1 <= k <= d");
  std::vector<SharpnessRow> rows;
  rows.reserve(grid.epsilons.size());
  for (double eps : grid.epsilons) {
    TrainConfig cfg = base;
    cfg.perturbation = grid.train_spec(eps);
    const TrainResult trained = train(data, cfg);
    SharpnessRow row;
    row.epsilon = eps;
    row.checkpoint = trained.final;
    row.w_norm = trained.final.w.norm();
    row.train_loss = trained.final.train_loss;
    row.top = top_eigenvalues(data, trained.final.w, trained.final.perturbation_at_checkpoint(), k);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<NoiseTrajectory> random_noise_sharpness_scan(const Dataset& data,
                                                         const EpsilonGrid& grid,
                                                         const TrainConfig& base) {
  grid.validate();
  require(is_random(grid.base.kind) || grid.base.kind == PerturbationKind::None,
          ErrorKind::InvalidSpec, "random-noise scan needs a uniform noise kind");
  std::vector<NoiseTrajectory> out;
  for (double eps : grid.epsilons) {
    TrainConfig cfg = base;
    cfg.perturbation = grid.train_spec(eps);
    NoiseTrajectory traj;
    traj.epsilon = eps;
    train(data, cfg, [&](const Checkpoint& c, const FeatureMatrix& perturbed) {
      const Vector top = eig_dense(hessian_exact(perturbed, data.labels(), c.w));
      traj.points.push_back({c.epoch, top[0], c.grad_norm, c.train_loss});
    });
    out.push_back(std::move(traj));
  }
  return out;
}

bool looks_separable(const Dataset& data, int max_epochs) {
  Vector w = Vector::Zero(data.dim());
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    bool clean = true;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const double y = data.labels()[i];
      if (y * w.dot(data.features().row(i).transpose()) <= 0.0) {
        w += y * data.features().row(i).transpose();
        clean = false;
      }
    }
    if (clean) return true;
  }
  return false;
}

}  // namespace advsharp
