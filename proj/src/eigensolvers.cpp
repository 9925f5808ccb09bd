#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "advsharp/rng.hpp"
#include "advsharp/spectrum.hpp"

namespace advsharp {

namespace {

constexpr int kMaxQlIterations = 100;

// Householder reduction of the symmetric matrix held in v to tridiagonal form.
// On return d holds the diagonal, e the sub-diagonal in e[1..n-1], and v the
// accumulated orthogonal transformation.
void householder_tridiagonalize(Matrix& v, Vector& d, Vector& e) {
  const Eigen::Index n = v.rows();
  d = v.row(n - 1).transpose();
  e = Vector::Zero(n);

  for (Eigen::Index i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (Eigen::Index k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (Eigen::Index j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (Eigen::Index k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (Eigen::Index j = 0; j < i; ++j) e[j] = 0.0;

      for (Eigen::Index j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (Eigen::Index k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (Eigen::Index j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (Eigen::Index j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (Eigen::Index j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (Eigen::Index k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (Eigen::Index i = 0; i < n - 1; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (Eigen::Index k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (Eigen::Index j = 0; j <= i; ++j) {
        double g = 0.0;
        for (Eigen::Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (Eigen::Index k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (Eigen::Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e[1..n-1]); rotations are
// accumulated into v.
void implicit_ql(Vector& d, Vector& e, Matrix& v) {
  const Eigen::Index n = d.size();
  for (Eigen::Index i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    Eigen::Index m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxQlIterations) {
          fail(ErrorKind::Data, "implicit QL did not converge");
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (Eigen::Index i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (Eigen::Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (Eigen::Index k = 0; k < v.rows(); ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
          if (i == 0) break;
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

SymmetricEigen sorted_descending(const Vector& d, const Matrix& v) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return d[a] > d[b]; });
  SymmetricEigen out;
  out.eigenvalues.resize(d.size());
  out.eigenvectors.resize(v.rows(), d.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.eigenvalues[static_cast<Eigen::Index>(k)] = d[idx[k]];
    out.eigenvectors.col(static_cast<Eigen::Index>(k)) = v.col(idx[k]);
  }
  return out;
}

void check_symmetric(const Matrix& h) {
  require(h.rows() == h.cols(), ErrorKind::Dimension, "matrix is not square");
  require(h.rows() > 0, ErrorKind::Dimension, "empty matrix");
  require(h.allFinite(), ErrorKind::InvalidArgument, "matrix has non-finite entries");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    fail(ErrorKind::NotSymmetric, "matrix is not symmetric (max |H - H^T| = " + std::to_string(asym) + ")");
  }
}

}  // namespace

SymmetricEigen eig_dense_decompose(const Matrix& h) {
  check_symmetric(h);
  Matrix v = 0.5 * (h + h.transpose());
  if (v.rows() == 1) return {Vector::Constant(1, v(0, 0)), Matrix::Identity(1, 1)};
  Vector d;
  Vector e;
  householder_tridiagonalize(v, d, e);
  implicit_ql(d, e, v);
  return sorted_descending(d, v);
}

Vector eig_dense(const Matrix& h) { return eig_dense_decompose(h).eigenvalues; }

SymmetricEigen eig_tridiagonal(const Vector& diagonal, const Vector& off_diagonal) {
  const Eigen::Index n = diagonal.size();
  require(n >= 1 && off_diagonal.size() == n - 1, ErrorKind::Dimension,
          "tridiagonal needs n diagonal and n-1 off-diagonal entries");
  Vector d = diagonal;
  Vector e = Vector::Zero(n);
  for (Eigen::Index i = 1; i < n; ++i) e[i] = off_diagonal[i - 1];
  Matrix v = Matrix::Identity(n, n);
  if (n > 1) implicit_ql(d, e, v);
  return sorted_descending(d, v);
}

namespace {

Vector random_unit(Eigen::Index dim, std::uint64_t seed, std::uint64_t counter) {
  auto eng = make_stream(seed, counter);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector q(dim);
  for (Eigen::Index i = 0; i < dim; ++i) q[i] = normal(eng);
  return q / q.norm();
}

// Two passes of classical Gram-Schmidt against the first `cols` basis vectors.
void reorthogonalize(const Matrix& basis, Eigen::Index cols, Vector& z) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    z.noalias() -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * z);
  }
}

}  // namespace

Vector eig_topk(const LinearOperator& op, Eigen::Index dim, Eigen::Index k,
                const LanczosOptions& options) {
  require(dim >= 1, ErrorKind::Dimension, "operator dimension must be >= 1");
  require(k >= 1 && k <= dim, ErrorKind::InvalidArgument, "need 1 <= k <= dim");

  Matrix basis(dim, dim);
  std::vector<double> alpha;
  std::vector<double> beta;
  std::uint64_t fresh_counter = 0;
  int failed_restarts = 0;
  double scale = 0.0;

  Vector q = random_unit(dim, options.seed, fresh_counter++);
  SymmetricEigen ritz;
  for (Eigen::Index j = 0; j < dim; ++j) {
    basis.col(j) = q;
    Vector z = op(q);
    require(z.size() == dim, ErrorKind::Dimension, "operator returned a vector of the wrong size");
    const double a = q.dot(z);
    z -= a * q;
    if (j > 0) z -= beta.back() * basis.col(j - 1);
    reorthogonalize(basis, j + 1, z);
    alpha.push_back(a);
    double b = z.norm();
    scale = std::max({scale, std::abs(a), b});

    const auto m = static_cast<Eigen::Index>(alpha.size());
    ritz = eig_tridiagonal(Eigen::Map<const Vector>(alpha.data(), m),
                           Eigen::Map<const Vector>(beta.data(), m - 1));
    if (m == dim) break;

    const bool invariant = b <= 1e-13 * std::max(scale, 1e-300);
    if (m >= k) {
      const double tol = options.tolerance * std::max(std::abs(ritz.eigenvalues[0]), 1e-300);
      bool converged = true;
      for (Eigen::Index i = 0; i < k && converged; ++i) {
        converged = std::abs(b * ritz.eigenvectors(m - 1, i)) <= tol;
      }
      if (converged && !invariant) break;
      if (converged && invariant && m >= k) break;
    }

    if (invariant) {
      // Krylov space is invariant: continue from a fresh direction orthogonal
      // to everything seen so far.
      b = 0.0;
      z.setZero();
      while (failed_restarts <= options.max_restarts) {
        z = random_unit(dim, options.seed, fresh_counter++);
        reorthogonalize(basis, j + 1, z);
        if (z.norm() > 1e-8) break;
        ++failed_restarts;
      }
      if (failed_restarts > options.max_restarts) break;
      q = z / z.norm();
    } else {
      q = z / b;
    }
    beta.push_back(b);
  }

  require(ritz.eigenvalues.size() >= k, ErrorKind::Data, "Lanczos found fewer than k Ritz values");
  return ritz.eigenvalues.head(k);
}

}  // namespace advsharp
