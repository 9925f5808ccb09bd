#pragma once

#include <optional>

#include "advsharp/dataset.hpp"
#include "advsharp/types.hpp"

namespace advsharp {

// log(1 + e^z) without overflow.
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Mean logistic loss (1/N) sum log(1 + exp(-y w.x)).
double loss(const FeatureMatrix& features, const Vector& labels, const WeightVector& w);
double loss(const Dataset& data, const WeightVector& w);

// log(1 + exp(-y w.x)) for every sample.
Vector per_sample_loss(const FeatureMatrix& features, const Vector& labels, const WeightVector& w);

// Gradient of the mean loss with respect to w.
Vector grad(const FeatureMatrix& features, const Vector& labels, const WeightVector& w);
Vector grad(const Dataset& data, const WeightVector& w);

// (1/N) sum s(1-s) x' x'^T with s = sigmoid(y w.x'), x' = x + eta held fixed.
// When `perturbed` is empty, x' = x.
Matrix hessian_exact(const Dataset& data, const WeightVector& w,
                     const std::optional<FeatureMatrix>& perturbed = std::nullopt);
Matrix hessian_exact(const FeatureMatrix& features, const Vector& labels, const WeightVector& w);

// Matrix-free H v for the same Hessian.
Vector hessian_vector_product(const FeatureMatrix& features, const Vector& labels,
                              const WeightVector& w, const Vector& v);

// The adversarial per-sample loss written through the noise norm and an angle:
// log(1 + exp(-y w.x + y ||w|| ||eta|| cos(theta))). With this sign theta is
// measured between w and -eta, so the worst case is y cos(theta) = 1.
struct DecomposedAdvLoss {
  double clean_logit = 0.0;  // y w.x
  double w_norm = 0.0;
  double eta_norm = 0.0;
  double cos_theta = 0.0;
  int label = 1;

  void validate() const;
};

double decomposed_adv_loss(const DecomposedAdvLoss& d);

// Worst-case L2 robust loss seen as a function of w, where the adversary
// follows w: (1/N) sum log(1 + exp(-y w.x + eps ||w||)). These are the loss,
// gradient and exact Hessian of that envelope (w != 0). The matrix overloads
// accept arbitrary real features.
double robust_l2_loss(const FeatureMatrix& features, const Vector& labels, const WeightVector& w,
                      double epsilon);
Vector robust_l2_grad(const FeatureMatrix& features, const Vector& labels, const WeightVector& w,
                      double epsilon);
Matrix robust_l2_hessian(const FeatureMatrix& features, const Vector& labels, const WeightVector& w,
                         double epsilon);
double robust_l2_loss(const Dataset& data, const WeightVector& w, double epsilon);
Vector robust_l2_grad(const Dataset& data, const WeightVector& w, double epsilon);
Matrix robust_l2_hessian(const Dataset& data, const WeightVector& w, double epsilon);

// Percentage of samples with y w.x > 0 (a zero logit counts as an error).
double accuracy(const FeatureMatrix& features, const Vector& labels, const WeightVector& w);

}  // namespace advsharp
