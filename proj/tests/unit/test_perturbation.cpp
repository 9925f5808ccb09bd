#include <cmath>
#include <random>

#include "advsharp/linear_model.hpp"
#include "advsharp/perturbation.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace advsharp;
using K = PerturbationKind;

namespace {

PerturbationSpec spec(K kind, double eps, double step = 0.0, int iters = 1, bool clip = false,
                      std::uint64_t seed = 0) {
  return {kind, eps, step, iters, clip, seed};
}

Dataset one_point(const Vector& x, double y) {
  return Dataset(FeatureMatrix(x.transpose()), Vector::Constant(1, y), "one");
}

}  // namespace

TEST_CASE("kind names round-trip, hyphenated spellings accepted") {
  for (K k : {K::None, K::PgdL2, K::PgdLinf, K::AnalyticL2, K::AnalyticLinf, K::UniformLinf,
              K::UniformL2Ball}) {
    CHECK(parse_perturbation_kind(to_string(k)) == k);
  }
  CHECK(parse_perturbation_kind("pgd-linf") == K::PgdLinf);
  CHECK(parse_perturbation_kind("uniform-l2-ball") == K::UniformL2Ball);
  CHECK_THROWS_AS(parse_perturbation_kind("fgsm"), Error);
  CHECK(norm_of(K::UniformLinf) == NormKind::Linf);
  CHECK(norm_of(K::AnalyticL2) == NormKind::L2);
  CHECK(norm_of(K::None) == NormKind::None);
}

TEST_CASE("spec validation and JSON") {
  CHECK_THROWS_AS(spec(K::PgdL2, -0.1, 0.1, 1).validate(), Error);
  CHECK_THROWS_AS(spec(K::PgdL2, 0.5, 0.0, 10).validate(), Error);
  CHECK_THROWS_AS(spec(K::PgdLinf, 0.5, 0.1, 0).validate(), Error);
  CHECK_THROWS_AS(spec(K::AnalyticL2, 0.5, 0, 1, true).validate(), Error);
  CHECK_NOTHROW(spec(K::PgdL2, 0.0, 0.0, 10).validate());
  CHECK(spec(K::None, 3.0).effective_epsilon() == 0.0);

  const PerturbationSpec s = spec(K::PgdLinf, 8.0 / 255, 0.01, 40, true, 9);
  const nlohmann::json j = s;
  CHECK(j.at("kind") == "pgd_linf");
  CHECK(j.get<PerturbationSpec>() == s);
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"kind":"pgd_l2","epsilon":"big"})").get<PerturbationSpec>(),
                  Error);
}

TEST_CASE("epsilon grid") {
  EpsilonGrid g;
  g.base = spec(K::PgdL2, 0, 0, 40, true);
  g.epsilons = {0, 0.5, 1.0};
  g.step_fraction = 0.15;
  g.eval_iterations = 100;
  CHECK_NOTHROW(g.validate());
  CHECK(g.train_spec(1.0).step_size == doctest::Approx(0.15));
  CHECK(g.train_spec(1.0).iterations == 40);
  CHECK(g.eval_spec(1.0).iterations == 100);
  const nlohmann::json j = g;
  const auto back = j.get<EpsilonGrid>();
  CHECK(back.epsilons == g.epsilons);
  CHECK(back.train_spec(0.5) == g.train_spec(0.5));

  g.epsilons = {};
  CHECK_THROWS_AS(g.validate(), Error);
  g.epsilons = {0.5, 0.2};
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("epsilon = 0 leaves every kind unchanged") {
  std::mt19937_64 eng(1);
  const Dataset data = oracle::random_dataset(eng, 7, 4);
  const WeightVector w(oracle::random_vector(eng, 4));
  CHECK(pgd(data, w, spec(K::PgdL2, 0, 0.1, 5)) == data.features());
  CHECK(pgd(data, w, spec(K::PgdLinf, 0, 0.1, 5)) == data.features());
  CHECK(analytic_adversary(data, w, spec(K::AnalyticL2, 0)) == data.features());
  CHECK(random_noise(data, spec(K::UniformLinf, 0)) == data.features());
  CHECK(perturb(data, w, spec(K::None, 0.7)) == data.features());
}

TEST_CASE("analytic L2 adversary: w = (3,4), y = +1, eps = 1 at the origin") {
  Vector x = Vector::Zero(2), w(2);
  w << 3, 4;
  const Dataset d = one_point(x, 1);
  const FeatureMatrix adv = analytic_adversary(d, WeightVector(w), spec(K::AnalyticL2, 1.0));
  CHECK(adv(0, 0) == doctest::Approx(-0.6).epsilon(1e-15));
  CHECK(adv(0, 1) == doctest::Approx(-0.8).epsilon(1e-15));

  // Dense grid search over the unit circle for the loss maximizer.
  double best = -INFINITY, best_angle = 0;
  for (int i = 0; i < 100000; ++i) {
    const double a = 2 * M_PI * i / 100000.0;
    const double l = softplus(-(3 * std::cos(a) + 4 * std::sin(a)));
    if (l > best) best = l, best_angle = a;
  }
  CHECK(std::cos(best_angle) == doctest::Approx(-0.6).epsilon(1e-4));
  CHECK(std::sin(best_angle) == doctest::Approx(-0.8).epsilon(1e-4));

  CHECK_THROWS_AS(analytic_adversary(d, WeightVector::zeros(2), spec(K::AnalyticL2, 1.0)), Error);
}

TEST_CASE("analytic adversary beats random probes inside the ball") {
  std::mt19937_64 eng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (K kind : {K::AnalyticL2, K::AnalyticLinf}) {
    const Dataset data = oracle::random_dataset(eng, 5, 3);
    const WeightVector w(oracle::random_vector(eng, 3));
    const double eps = 0.3;
    const Vector adv = per_sample_loss(analytic_adversary(data, w, spec(kind, eps)), data.labels(), w);
    for (int t = 0; t < 1000; ++t) {
      Vector v(3);
      for (int j = 0; j < 3; ++j) v[j] = 2 * u(eng) - 1;
      if (kind == K::AnalyticL2) v *= eps * u(eng) / v.norm();
      else v *= eps;
      FeatureMatrix probe = data.features();
      probe.rowwise() += v.transpose();
      const Vector l = per_sample_loss(probe, data.labels(), w);
      CHECK((adv.array() >= l.array() - 1e-15).all());
    }
  }
}

TEST_CASE("one PGD-Linf step with step >= eps equals x - eps y sign(w); corner enumeration agrees") {
  std::mt19937_64 eng(3);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(t % 3);
    const Dataset data = oracle::random_dataset(eng, 4, d);
    const WeightVector w(oracle::random_vector(eng, d));
    const double eps = 0.2;
    const FeatureMatrix out = pgd(data, w, spec(K::PgdLinf, eps, eps * 1.5, 1));
    for (Eigen::Index n = 0; n < data.size(); ++n) {
      const double y = data.labels()[n];
      const Vector expect = data.features().row(n).transpose() - eps * y * w.values().unaryExpr([](double v) {
        return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
      });
      CHECK((out.row(n).transpose() - expect).cwiseAbs().maxCoeff() < 1e-15);

      // Brute force over the 2^d corners of the box.
      double best = -INFINITY;
      for (int mask = 0; mask < (1 << d); ++mask) {
        Vector c = data.features().row(n).transpose();
        for (Eigen::Index j = 0; j < d; ++j) c[j] += (mask >> j & 1) ? eps : -eps;
        best = std::max(best, softplus(-y * w.values().dot(c)));
      }
      const double got = softplus(-y * w.values().dot(out.row(n).transpose()));
      CHECK(got == doctest::Approx(best).epsilon(1e-14));
    }
  }
}

TEST_CASE("100-step PGD-L2 without clipping matches the analytic adversary to 1e-8") {
  std::mt19937_64 eng(4);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index d = 2 + 20 * t;
    const Dataset data = oracle::random_dataset(eng, 12, d);
    const WeightVector w(oracle::random_vector(eng, d));
    const double eps = 0.1 + 0.1 * t;
    const Vector a = per_sample_loss(pgd(data, w, spec(K::PgdL2, eps, 0.15 * eps, 100)), data.labels(), w);
    const Vector b = per_sample_loss(analytic_adversary(data, w, spec(K::AnalyticL2, eps)), data.labels(), w);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((b.array() >= a.array() - 1e-9).all());
  }
}

TEST_CASE("PGD stays in the ball and in [0,1], and never lowers the loss") {
  std::mt19937_64 eng(5);
  for (K kind : {K::PgdL2, K::PgdLinf}) {
    for (bool clip : {false, true}) {
      const Dataset data = oracle::random_dataset(eng, 30, 6);
      const WeightVector w(oracle::random_vector(eng, 6));
      const double eps = kind == K::PgdL2 ? 0.8 : 0.1;
      const int iters = 10;
      const FeatureMatrix out = pgd(data, w, spec(kind, eps, eps / iters, iters, clip));
      const Vector clean = per_sample_loss(data.features(), data.labels(), w);
      Vector prev = clean;
      for (int k = 1; k <= iters; ++k) {
        const Vector cur =
            per_sample_loss(pgd(data, w, spec(kind, eps, eps / iters, k, clip)), data.labels(), w);
        CHECK((cur.array() >= prev.array() - 1e-12).all());
        prev = cur;
      }
      for (Eigen::Index n = 0; n < data.size(); ++n) {
        const Vector delta = (out.row(n) - data.features().row(n)).transpose();
        const double norm = kind == K::PgdL2 ? delta.norm() : delta.cwiseAbs().maxCoeff();
        CHECK(norm <= eps + 1e-9);
      }
      if (clip) {
        CHECK(out.minCoeff() >= 0.0);
        CHECK(out.maxCoeff() <= 1.0);
      }
    }
  }
}

TEST_CASE("PGD leaves a sample with zero input gradient in place") {
  Vector x(2), w(2);
  x << 1, 0;
  w << 1000, 0;  // sigmoid(-1000) underflows to 0
  const Dataset d = one_point(x, 1);
  CHECK(input_gradient(x, 1, WeightVector(w)).isZero(0.0));
  CHECK(pgd(d, WeightVector(w), spec(K::PgdL2, 0.5, 0.1, 10)) == d.features());
}

TEST_CASE("perturb dispatch at w = 0 returns the clean points for adversarial kinds") {
  std::mt19937_64 eng(6);
  const Dataset data = oracle::random_dataset(eng, 5, 3);
  CHECK(perturb(data, WeightVector::zeros(3), spec(K::PgdL2, 0.5, 0.1, 3)) == data.features());
  CHECK(perturb(data, WeightVector::zeros(3), spec(K::AnalyticLinf, 0.5)) == data.features());
  CHECK(perturb(data, WeightVector::zeros(3), spec(K::UniformLinf, 0.5, 0, 1, false, 1)) != data.features());
}

TEST_CASE("uniform Linf noise: mean and variance over 1e5 draws") {
  const Eigen::Index n = 100000;
  const double eps = 0.3;
  const Dataset data(FeatureMatrix::Constant(n, 1, 0.5), Vector::Ones(n), "var");
  const Vector eta = (random_noise(data, spec(K::UniformLinf, eps, 0, 1, false, 42)) - data.features()).col(0);
  const double mean = eta.mean();
  const double var = (eta.array() - mean).square().sum() / (n - 1);
  CHECK(std::abs(mean) <= 3 * eps / std::sqrt(3.0 * n));
  CHECK(std::abs(var / (eps * eps / 3) - 1) < 0.02);
  CHECK(eta.cwiseAbs().maxCoeff() <= eps);
}

TEST_CASE("uniform L2-ball noise lies in the ball with radius law U^(1/d)") {
  const Eigen::Index n = 20000, d = 3;
  const double eps = 0.2;
  const Dataset data(FeatureMatrix::Constant(n, d, 0.5), Vector::Ones(n), "ball");
  const FeatureMatrix eta = random_noise(data, spec(K::UniformL2Ball, eps, 0, 1, false, 5)) - data.features();
  const Vector r = eta.rowwise().norm();
  CHECK(r.maxCoeff() <= eps + 1e-15);
  // P(r < eps/2) = 2^-d
  const double inner = (r.array() < eps / 2).cast<double>().mean();
  CHECK(inner == doctest::Approx(0.125).epsilon(0.1));
  // isotropy: mean direction near 0
  CHECK(eta.colwise().mean().norm() < 0.01);
}

TEST_CASE("random noise is deterministic per seed, and a sample's draw does not depend on its neighbours") {
  std::mt19937_64 eng(7);
  const Dataset data = oracle::random_dataset(eng, 20, 5);
  for (K kind : {K::UniformLinf, K::UniformL2Ball}) {
    const auto a = random_noise(data, spec(kind, 0.1, 0, 1, false, 3));
    CHECK(a == random_noise(data, spec(kind, 0.1, 0, 1, false, 3)));
    CHECK(a != random_noise(data, spec(kind, 0.1, 0, 1, false, 4)));
    // Dropping the first sample must not change the draws of the others'
    // stream index n; re-create a dataset whose row 0 differs.
    FeatureMatrix f = data.features();
    f.row(0).setZero();
    const auto b = random_noise(Dataset(f, data.labels(), "x"), spec(kind, 0.1, 0, 1, false, 3));
    CHECK((b.bottomRows(19) - f.bottomRows(19)) == (a.bottomRows(19) - data.features().bottomRows(19)));
  }
}

TEST_CASE("clipping keeps noisy points in [0,1]") {
  const Dataset data(FeatureMatrix::Constant(500, 4, 0.99), Vector::Ones(500), "edge");
  const auto out = random_noise(data, spec(K::UniformLinf, 0.2, 0, 1, true, 1));
  CHECK(out.maxCoeff() <= 1.0);
  CHECK(out.minCoeff() >= 0.0);
  CHECK(out.maxCoeff() == 1.0);
}
