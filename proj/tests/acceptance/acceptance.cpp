// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// MNIST comes from $ADVSHARP_MNIST_DIR when set, else the bundled 0/1 subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "advsharp/linear_model.hpp"
#include "advsharp/perturbation.hpp"
#include "advsharp/report.hpp"
#include "advsharp/spectrum.hpp"
#include "advsharp/verify.hpp"

using namespace advsharp;
using K = PerturbationKind;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void progress(const std::string& msg) {
  std::fprintf(stderr, "[acceptance] %s\n", msg.c_str());
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

std::string join(const std::vector<double>& v, const char* f = "%.4g") {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + fmt(f, x);
  return s;
}

// Oracle suite: every check passes and the whole run takes under 60 s.
void ac1() {
  const auto t0 = Clock::now();
  const auto results = run_oracle_suite({});
  const double secs = seconds_since(t0);
  bool all = true;
  std::string failed;
  for (const auto& r : results) {
    if (!r.passed) {
      all = false;
      failed += " " + r.name;
    }
  }
  report("AC1", all && secs < 60.0,
         std::to_string(results.size()) + " checks, " + fmt("%.2f s", secs) + " (limit 60 s)" +
             (failed.empty() ? "" : "; failed:" + failed));
}

// Noise training on separable data: trajectories collapse, early-epoch
// ordering by epsilon, and the uniform noise variance.
void ac3() {
  const auto t0 = Clock::now();
  const Dataset data = synth_separable(500, 20, 0.3, 1);
  EpsilonGrid grid;
  grid.base = {K::UniformLinf, 0, 0, 1, false, 0};
  grid.epsilons = {0.0, 8.0 / 255, 16.0 / 255};
  TrainConfig base;
  base.learning_rate = 2.0;
  base.epochs = 1000;
  base.seed = 1;
  const auto traj = random_noise_sharpness_scan(data, grid, base);

  constexpr int kOrderEpoch = 200;
  bool decay = true, ordered = true;
  std::vector<double> ratios, grad_ratios, at_order;
  for (const auto& t : traj) {
    const auto& first = t.points[1];  // epoch 1
    const auto& last = t.points.back();
    ratios.push_back(last.top_eigenvalue / first.top_eigenvalue);
    grad_ratios.push_back(last.grad_norm / first.grad_norm);
    decay = decay && ratios.back() < 0.05 && grad_ratios.back() < 0.05;
    at_order.push_back(t.points[kOrderEpoch].top_eigenvalue);
  }
  ordered = strictly_increasing(at_order);

  const Eigen::Index n = 100000;
  const double eps = 16.0 / 255;
  const Dataset flat(FeatureMatrix::Constant(n, 1, 0.5), Vector::Ones(n), "flat");
  const Vector eta = (random_noise(flat, {K::UniformLinf, eps, 0, 1, false, 99}) - flat.features()).col(0);
  const double mean = eta.mean();
  const double var = (eta.array() - mean).square().sum() / static_cast<double>(n - 1);
  const double var_rel = std::abs(var / (eps * eps / 3.0) - 1.0);

  report("AC3", decay && ordered && var_rel < 0.02,
         "lambda_final/lambda_epoch1=" + join(ratios) + " (<0.05), grad ratio=" + join(grad_ratios) +
             " (<0.05), lambda@epoch" + std::to_string(kOrderEpoch) + "=" + join(at_order, "%.6g") +
             " (increasing in eps), variance rel err=" + fmt("%.4f", var_rel) + " (<0.02), " +
             fmt("%.1f s", seconds_since(t0)));
}

struct MnistRun {
  std::vector<AccuracyRow> accuracy;
  std::vector<CurvatureRow> curvature;
  std::vector<SpectrumRow> spectrum;
  std::vector<SpectrumSummary> summary;
  bool stable = true;
  std::string unstable;
  std::vector<std::vector<double>> landscape_losses;
  double g0_max_diff = 0.0;
};

template <class Row>
std::vector<const Row*> rows_of(const std::vector<Row>& rows, K kind) {
  std::vector<const Row*> out;
  for (const auto& r : rows) {
    if (r.kind == kind) out.push_back(&r);
  }
  return out;
}

MnistRun run_mnist(const fs::path& source_dir, const fs::path& out) {
  ExperimentConfig cfg = load_experiment_config(source_dir / "configs" / "mnist2.json");
  const char* env = std::getenv("ADVSHARP_MNIST_DIR");
  cfg.dataset.data_dir = env && *env ? fs::path(env) : source_dir / "tests" / "data" / "mnist_subset";
  cfg.outputs = out;
  fs::remove_all(out);
  progress("MNIST2 from " + cfg.dataset.data_dir.string());

  MnistRun run;
  auto t0 = Clock::now();
  run.accuracy = cmd_train(cfg);
  progress("train " + fmt("%.1f s", seconds_since(t0)));
  t0 = Clock::now();
  run.curvature = cmd_landscape(cfg);
  run.spectrum = cmd_spectrum(cfg, &run.summary);
  progress("landscape + spectrum " + fmt("%.1f s", seconds_since(t0)));

  // g(0) against the loss recorded at training time, and finiteness of every profile loss.
  for (const auto& c : run.curvature) run.g0_max_diff = std::max(run.g0_max_diff, std::abs(c.g0 - c.train_loss));
  {
    std::ifstream in(out / "landscape.csv");
    std::string line;
    std::getline(in, line);
    std::vector<double> losses;
    while (std::getline(in, line)) {
      const auto a = line.find(',');
      const auto b = line.find(',', a + 1);
      losses.push_back(std::stod(line.substr(a + 1, b - a - 1)));
    }
    run.landscape_losses.push_back(losses);
  }

  // Rerun the report commands on the same checkpoints; every artifact must keep its bytes.
  std::map<fs::path, std::string> before;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (e.is_regular_file()) before[e.path()] = slurp(e.path());
  }
  cmd_landscape(cfg);
  cmd_spectrum(cfg);
  for (const auto& [path, bytes] : before) {
    if (slurp(path) != bytes) {
      run.stable = false;
      run.unstable += " " + fs::relative(path, out).string();
    }
  }
  return run;
}

// Eigenvalue growth with epsilon under L2 and Linf PGD training.
void ac2(const MnistRun& run, double train_secs) {
  std::vector<double> l2_eps, l2_top, linf_top;
  for (const auto* r : rows_of(run.spectrum, K::PgdL2)) {
    l2_eps.push_back(r->epsilon);
    l2_top.push_back(r->top[0]);
  }
  for (const auto* r : rows_of(run.spectrum, K::PgdLinf)) linf_top.push_back(r->top[0]);
  const double r2 = l2_eps.size() >= 2 ? linear_fit_r2(l2_eps, l2_top) : NAN;
  const bool pass = l2_top.size() == 6 && linf_top.size() == 5 && strictly_increasing(l2_top) &&
                    r2 > 0.95 && strictly_increasing(linf_top);
  report("AC2", pass,
         "L2 lambda_max=" + join(l2_top) + " R2=" + fmt("%.4f", r2) + " (>0.95); Linf lambda_max=" +
             join(linf_top) + "; MNIST pipeline " + fmt("%.0f s", train_secs) + " (target 600 s)");
}

// Random L2-ball training vs L2 PGD at epsilon = 1.
void ac4(const MnistRun& run) {
  auto find = [](const auto& rows, K kind) -> decltype(&rows[0]) {
    for (const auto& r : rows) {
      if (r.kind == kind && r.epsilon == 1.0) return &r;
    }
    return nullptr;
  };
  const auto* adv_s = find(run.spectrum, K::PgdL2);
  const auto* rnd_s = find(run.spectrum, K::UniformL2Ball);
  const auto* adv_c = find(run.curvature, K::PgdL2);
  const auto* rnd_c = find(run.curvature, K::UniformL2Ball);
  if (!adv_s || !rnd_s || !adv_c || !rnd_c) {
    report("AC4", false, "missing epsilon=1 rows");
    return;
  }
  const bool pass = rnd_s->top[0] < adv_s->top[0] && rnd_c->curvature < adv_c->curvature;
  report("AC4", pass,
         "lambda_max random=" + fmt("%.4g", rnd_s->top[0]) + " < adversarial=" + fmt("%.4g", adv_s->top[0]) +
             "; curvature random=" + fmt("%.4g", rnd_c->curvature) + " < adversarial=" +
             fmt("%.4g", adv_c->curvature));
}

// Table values: clean and eps = 1 test robust accuracy, constant noise-training accuracy.
void ac5(const MnistRun& run) {
  double clean = NAN, robust = NAN;
  for (const auto* r : rows_of(run.accuracy, K::PgdL2)) {
    if (r->epsilon == 0.0) clean = r->test_acc;
    if (r->epsilon == 1.0) robust = r->test_acc;
  }
  std::vector<double> noise_train;
  for (const auto* r : rows_of(run.accuracy, K::UniformLinf)) noise_train.push_back(r->train_acc);
  double spread = NAN;
  if (!noise_train.empty()) {
    spread = *std::max_element(noise_train.begin(), noise_train.end()) -
             *std::min_element(noise_train.begin(), noise_train.end());
  }
  const bool pass = std::abs(clean - 99.95) <= 0.5 && std::abs(robust - 99.62) <= 0.5 &&
                    noise_train.size() == 5 && spread <= 0.2;
  report("AC5", pass,
         "test acc eps=0 " + fmt("%.2f", clean) + " (99.95+-0.5), eps=1 " + fmt("%.2f", robust) +
             " (99.62+-0.5); uniform Linf train acc " + join(noise_train, "%.2f") + " spread " +
             fmt("%.2f", spread) + " (<=0.2)");
}

// Landscape: g(0), curvature order over the L2 grid, finite losses, byte-stable artifacts.
void ac6(const MnistRun& run) {
  std::vector<double> curv;
  for (const auto* r : rows_of(run.curvature, K::PgdL2)) curv.push_back(r->curvature);
  bool finite = true;
  std::size_t count = 0;
  for (const auto& v : run.landscape_losses) {
    for (double l : v) {
      finite = finite && std::isfinite(l);
      ++count;
    }
  }
  const bool pass = run.g0_max_diff <= 1e-12 && curv.size() == 6 && strictly_increasing(curv) && finite &&
                    count > 0 && run.stable;
  report("AC6", pass,
         "max|g(0)-train_loss|=" + fmt("%.3g", run.g0_max_diff) + " (<=1e-12); L2 curvature=" + join(curv) +
             " (increasing); " + std::to_string(count) + " profile losses " + (finite ? "finite" : "NOT finite") +
             "; rerun artifacts " + (run.stable ? "byte-identical" : "differ:" + run.unstable));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path source_dir = ADVSHARP_SOURCE_DIR;
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_out";
  try {
    ac1();
    ac3();
    const auto t0 = Clock::now();
    const MnistRun run = run_mnist(source_dir, out);
    const double secs = seconds_since(t0);
    ac2(run, secs);
    ac4(run);
    ac5(run);
    ac6(run);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d of 6 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
