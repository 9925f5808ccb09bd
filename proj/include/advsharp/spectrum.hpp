#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "advsharp/dataset.hpp"
#include "advsharp/perturbation.hpp"
#include "advsharp/training.hpp"

namespace advsharp {

// ---------------------------------------------------------------------------
// Symmetric eigensolvers

struct SymmetricEigen {
  Vector eigenvalues;  // descending
  Matrix eigenvectors;  // column k pairs with eigenvalues[k]
};

// Householder tridiagonalization followed by implicit-shift QL.
// Throws NotSymmetric when |H - H^T| exceeds 1e-10 * max(1, max|H|).
Vector eig_dense(const Matrix& h);
SymmetricEigen eig_dense_decompose(const Matrix& h);

// Eigen-decomposition of the symmetric tridiagonal matrix with the given
// diagonal and off-diagonal (size n-1). Eigenvalues descending.
SymmetricEigen eig_tridiagonal(const Vector& diagonal, const Vector& off_diagonal);

using LinearOperator = std::function<Vector(const Vector&)>;

struct LanczosOptions {
  double tolerance = 1e-12;  // residual bound relative to the largest Ritz value
  std::uint64_t seed = 1;
  int max_restarts = 3;
};

// Top-k eigenvalues (descending) of a symmetric operator by Lanczos with full
// reorthogonalization. On breakdown the basis is extended with a fresh random
// vector orthogonal to it.
Vector eig_topk(const LinearOperator& op, Eigen::Index dim, Eigen::Index k,
                const LanczosOptions& options = {});

// ---------------------------------------------------------------------------
// Theory oracles

enum class SpectrumSource { Exact, TheoryAtOptimum, RandomLimit };

struct HessianSpectrum {
  Vector eigenvalues;  // descending
  double epsilon = 0.0;
  NormKind norm = NormKind::None;
  double w_norm = 0.0;
  SpectrumSource source = SpectrumSource::Exact;
};

// I - w w^T / ||w||^2.
Matrix projector(const WeightVector& w);

// (1/2N) sum_n (||eta_n|| / ||w*||) (I - w* w*^T/||w*||^2): the Hessian of the
// L2-adversarial loss at a weight satisfying the per-point optimality condition.
Matrix theory_hessian_at_optimum(const Dataset& data, const WeightVector& w_star,
                                 const Vector& eta_norms);

// Large-N form of the uniform-noise Hessian at a common per-sample kappa:
// (1/N) sum (x x^T + eps^2/3 I) kappa/(kappa+1)^2.
Matrix random_noise_hessian_limit(const Dataset& data, double epsilon, double kappa);

struct OptimumMatch {
  Matrix exact;
  Matrix theory;
  double max_abs_diff = 0.0;
  double tolerance = 0.0;  // 1e-8 * max(1, ||exact||_F)
  WeightVector w_star;
  bool passed() const { return max_abs_diff < tolerance; }
};

// Builds a single-sample instance satisfying the optimality condition
// (x rescaled to ||x|| = eps, w* = scale * y x / eps), evaluates the exact
// Hessian of the worst-case L2 loss at w*, and compares it with
// theory_hessian_at_optimum. `flip_projector_sign` negates the projector term of
// the theory side; it exists only as a negative control.
OptimumMatch verify_optimum_match(const Vector& x, int y, double epsilon, double scale = 1.0,
                                  bool flip_projector_sign = false);

// ---------------------------------------------------------------------------
// Sharpness scans

// Hessian of the mean loss on the perturbations regenerated at w.
Matrix hessian_at_perturbed(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec);

// Top-k eigenvalues of that Hessian: dense for d <= 1024, Lanczos beyond.
Vector top_eigenvalues(const Dataset& data, const WeightVector& w, const PerturbationSpec& spec,
                       Eigen::Index k);

struct SharpnessRow {
  double epsilon = 0.0;
  Vector top;  // descending, k entries
  double w_norm = 0.0;
  double train_loss = 0.0;
  Checkpoint checkpoint;
};

// Least-squares fit y = a + b x; returns R^2 (1 when y is constant and exactly fit).
double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y);

// One trained model per grid epsilon (training hyperparameters from `base`),
// then top-k eigenvalues at the perturbations regenerated at the final w.
std::vector<SharpnessRow> adversarial_sharpness_scan(const Dataset& data, const EpsilonGrid& grid,
                                                     const TrainConfig& base, Eigen::Index k = 3);

struct TrajectoryPoint {
  int epoch = 0;
  double top_eigenvalue = 0.0;
  double grad_norm = 0.0;
  double train_loss = 0.0;
};

struct NoiseTrajectory {
  double epsilon = 0.0;
  std::vector<TrajectoryPoint> points;
};

// Random-noise training per epsilon, logging the top Hessian eigenvalue (on the
// noisy points of that step) at every recorded epoch.
std::vector<NoiseTrajectory> random_noise_sharpness_scan(const Dataset& data,
                                                         const EpsilonGrid& grid,
                                                         const TrainConfig& base);

// True when some w classifies every sample correctly (checked with a long
// perceptron run); the random-noise scan needs this premise.
bool looks_separable(const Dataset& data, int max_epochs = 1000);

}  // namespace advsharp
