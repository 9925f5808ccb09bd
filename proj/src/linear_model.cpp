#include "advsharp/linear_model.hpp"

#include <string>

namespace advsharp {

namespace {

void check_dims(const FeatureMatrix& features, const Vector& labels, const WeightVector& w) {
  require(features.rows() == labels.size(), ErrorKind::Dimension,
          "feature rows (" + std::to_string(features.rows()) + ") != labels (" +
              std::to_string(labels.size()) + ")");
  require(features.cols() == w.dim(), ErrorKind::Dimension,
          "feature dim (" + std::to_string(features.cols()) + ") != weight dim (" +
              std::to_string(w.dim()) + ")");
  require(features.rows() > 0, ErrorKind::Dimension, "empty feature matrix");
}

// y_n * w.x_n for every sample.
Vector margins(const FeatureMatrix& features, const Vector& labels, const WeightVector& w) {
  return (features * w.values()).cwiseProduct(labels);
}

}  // namespace

Vector per_sample_loss(const FeatureMatrix& features, const Vector& labels, const WeightVector& w) {
  check_dims(features, labels, w);
  const Vector m = margins(features, labels, w);
  return m.unaryExpr([](double v) { return softplus(-v); });
}

double loss(const FeatureMatrix& features, const Vector& labels, const WeightVector& w) {
  const Vector l = per_sample_loss(features, labels, w);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.size(); ++i) sum += l[i];
  return sum / static_cast<double>(l.size());
}

double loss(const Dataset& data, const WeightVector& w) {
  return loss(data.features(), data.labels(), w);
}

Vector grad(const FeatureMatrix& features, const Vector& labels, const WeightVector& w) {
  check_dims(features, labels, w);
  const Vector m = margins(features, labels, w);
  // d/dw log(1+exp(-y w.x)) = -y x sigmoid(-y w.x)
  Vector coeff(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) coeff[i] = -labels[i] * sigmoid(-m[i]);
  return features.transpose() * coeff / static_cast<double>(m.size());
}

Vector grad(const Dataset& data, const WeightVector& w) {
  return grad(data.features(), data.labels(), w);
}

Matrix hessian_exact(const FeatureMatrix& features, const Vector& labels, const WeightVector& w) {
  check_dims(features, labels, w);
  const Vector m = margins(features, labels, w);
  // (g-1)/g^2 with g = 1 + exp(-m) equals sigmoid(m) * sigmoid(-m).
  Vector root(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) root[i] = std::sqrt(sigmoid(m[i]) * sigmoid(-m[i]));
  const FeatureMatrix scaled = root.asDiagonal() * features;
  Matrix h = Matrix::Zero(features.cols(), features.cols());
  h.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose(), 1.0 / static_cast<double>(m.size()));
  h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
  return h;
}

Matrix hessian_exact(const Dataset& data, const WeightVector& w,
                     const std::optional<FeatureMatrix>& perturbed) {
  if (perturbed) {
    require(perturbed->rows() == data.size() && perturbed->cols() == data.dim(), ErrorKind::Dimension,
            "perturbed features must have the dataset's shape");
    return hessian_exact(*perturbed, data.labels(), w);
  }
  return hessian_exact(data.features(), data.labels(), w);
}

Vector hessian_vector_product(const FeatureMatrix& features, const Vector& labels,
                              const WeightVector& w, const Vector& v) {
  check_dims(features, labels, w);
  require(v.size() == w.dim(), ErrorKind::Dimension, "vector length != weight dim");
  const Vector m = margins(features, labels, w);
  Vector xv = features * v;
  for (Eigen::Index i = 0; i < m.size(); ++i) xv[i] *= sigmoid(m[i]) * sigmoid(-m[i]);
  return features.transpose() * xv / static_cast<double>(m.size());
}

void DecomposedAdvLoss::validate() const {
  require(std::abs(cos_theta) <= 1.0, ErrorKind::InvalidArgument, "|cos_theta| must be <= 1");
  require(eta_norm >= 0.0 && w_norm >= 0.0, ErrorKind::InvalidArgument, "norms must be >= 0");
  require(label == 1 || label == -1, ErrorKind::InvalidArgument, "label must be -1 or +1");
}

double decomposed_adv_loss(const DecomposedAdvLoss& d) {
  d.validate();
  return softplus(-d.clean_logit + d.label * d.w_norm * d.eta_norm * d.cos_theta);
}

namespace {

struct RobustTerms {
  Vector m;      // -y w.x + eps ||w||
  Vector w_hat;  // w / ||w||
  double w_norm;
};

RobustTerms robust_terms(const FeatureMatrix& features, const Vector& labels, const WeightVector& w,
                         double epsilon) {
  check_dims(features, labels, w);
  require(epsilon >= 0.0, ErrorKind::InvalidArgument, "epsilon must be >= 0");
  RobustTerms t;
  t.w_norm = w.norm();
  t.w_hat = w.direction();
  t.m = -margins(features, labels, w).array() + epsilon * t.w_norm;
  return t;
}

}  // namespace

double robust_l2_loss(const FeatureMatrix& features, const Vector& labels, const WeightVector& w,
                      double epsilon) {
  const auto t = robust_terms(features, labels, w, epsilon);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < t.m.size(); ++i) sum += softplus(t.m[i]);
  return sum / static_cast<double>(t.m.size());
}

Vector robust_l2_grad(const FeatureMatrix& features, const Vector& labels, const WeightVector& w,
                      double epsilon) {
  const auto t = robust_terms(features, labels, w, epsilon);
  Vector g = Vector::Zero(w.dim());
  for (Eigen::Index i = 0; i < t.m.size(); ++i) {
    const Vector a = -labels[i] * features.row(i).transpose() + epsilon * t.w_hat;
    g += sigmoid(t.m[i]) * a;
  }
  return g / static_cast<double>(t.m.size());
}

Matrix robust_l2_hessian(const FeatureMatrix& features, const Vector& labels, const WeightVector& w,
                         double epsilon) {
  const auto t = robust_terms(features, labels, w, epsilon);
  const Eigen::Index d = w.dim();
  const Matrix proj = Matrix::Identity(d, d) - t.w_hat * t.w_hat.transpose();
  Matrix h = Matrix::Zero(d, d);
  double projector_weight = 0.0;
  for (Eigen::Index i = 0; i < t.m.size(); ++i) {
    const double s = sigmoid(t.m[i]);
    const Vector a = -labels[i] * features.row(i).transpose() + epsilon * t.w_hat;
    h.noalias() += (s * sigmoid(-t.m[i])) * (a * a.transpose());
    projector_weight += s;
  }
  h += (projector_weight * epsilon / t.w_norm) * proj;
  return h / static_cast<double>(t.m.size());
}

double robust_l2_loss(const Dataset& data, const WeightVector& w, double epsilon) {
  return robust_l2_loss(data.features(), data.labels(), w, epsilon);
}
Vector robust_l2_grad(const Dataset& data, const WeightVector& w, double epsilon) {
  return robust_l2_grad(data.features(), data.labels(), w, epsilon);
}
Matrix robust_l2_hessian(const Dataset& data, const WeightVector& w, double epsilon) {
  return robust_l2_hessian(data.features(), data.labels(), w, epsilon);
}

double accuracy(const FeatureMatrix& features, const Vector& labels, const WeightVector& w) {
  check_dims(features, labels, w);
  const Vector m = margins(features, labels, w);
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i) correct += m[i] > 0.0 ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(m.size());
}

}  // namespace advsharp
