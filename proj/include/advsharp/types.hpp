#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>

#include "advsharp/error.hpp"

namespace advsharp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;
// One sample per row.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Model parameter of the linear classifier (no bias term).
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(Vector w) : w_(std::move(w)) {
    require(w_.allFinite(), ErrorKind::InvalidArgument, "weight vector has non-finite entries");
  }
  static WeightVector zeros(Eigen::Index d) { return WeightVector(Vector::Zero(d)); }

  const Vector& values() const noexcept { return w_; }
  Eigen::Index dim() const noexcept { return w_.size(); }
  double norm() const { return w_.norm(); }
  bool is_zero() const { return w_.isZero(0.0); }

  // w / ||w||; requires ||w|| > 0.
  Vector direction() const {
    const double n = norm();
    require(n > 0.0, ErrorKind::InvalidArgument, "direction of a zero weight vector is undefined");
    return w_ / n;
  }

 private:
  Vector w_;
};

}  // namespace advsharp
