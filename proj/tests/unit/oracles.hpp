#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "advsharp/dataset.hpp"
#include "advsharp/types.hpp"

namespace oracle {

using advsharp::FeatureMatrix;
using advsharp::Matrix;
using advsharp::Vector;

inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& w,
                          double h = 1e-5) {
  Vector g(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    Vector p = w, m = w;
    p[j] += h;
    m[j] -= h;
    g[j] = (f(p) - f(m)) / (2 * h);
  }
  return g;
}

inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& g, const Vector& w,
                          double h = 1e-5) {
  Matrix j(w.size(), w.size());
  for (Eigen::Index c = 0; c < w.size(); ++c) {
    Vector p = w, m = w;
    p[c] += h;
    m[c] -= h;
    j.col(c) = (g(p) - g(m)) / (2 * h);
  }
  return j;
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

// Cyclic Jacobi rotations; eigenvalues sorted descending.
inline Vector jacobi_eigenvalues(Matrix a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return Eigen::Map<Vector>(ev.data(), n);
}

inline Matrix random_symmetric(std::mt19937_64& eng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(eng);
  return (a + a.transpose()) / 2;
}

inline Vector random_vector(std::mt19937_64& eng, Eigen::Index n) {
  std::normal_distribution<double> g(0, 1);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(eng);
  return v;
}

inline advsharp::Dataset random_dataset(std::mt19937_64& eng, Eigen::Index n, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0, 1);
  FeatureMatrix x(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = u(eng);
    y[i] = u(eng) < 0.5 ? -1 : 1;
  }
  return advsharp::Dataset(std::move(x), std::move(y), "random");
}

inline void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_idx_images(const std::filesystem::path& path, std::uint32_t count,
                             std::uint32_t rows, std::uint32_t cols,
                             const std::vector<unsigned char>& pixels,
                             std::uint32_t magic = 0x803) {
  std::ofstream out(path, std::ios::binary);
  put_u32(out, magic);
  put_u32(out, count);
  put_u32(out, rows);
  put_u32(out, cols);
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

inline void write_idx_labels(const std::filesystem::path& path, const std::vector<unsigned char>& labels,
                             std::uint32_t magic = 0x801, std::int64_t count = -1) {
  std::ofstream out(path, std::ios::binary);
  put_u32(out, magic);
  put_u32(out, count < 0 ? static_cast<std::uint32_t>(labels.size()) : static_cast<std::uint32_t>(count));
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() /
           ("advsharp_test_" + tag + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
