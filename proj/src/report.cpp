#include "advsharp/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "advsharp/landscape.hpp"
#include "advsharp/linear_model.hpp"
#include "advsharp/spectrum.hpp"

namespace advsharp {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// config

void ExperimentConfig::validate() const {
  require(dataset.kind == "mnist2" || dataset.kind == "synth", ErrorKind::Config,
          "dataset.kind must be mnist2 or synth");
  if (dataset.kind == "synth") {
    require(dataset.n_per_class >= 1 && dataset.dim >= 2, ErrorKind::Config,
            "synth needs n_per_class >= 1 and dim >= 2");
    require(dataset.margin > 0.0 && dataset.noise_sd >= 0.0, ErrorKind::Config,
            "synth needs margin > 0 and noise_sd >= 0");
  }
  require(!grids.empty(), ErrorKind::Config, "grids must not be empty");
  std::set<PerturbationKind> kinds;
  for (const auto& g : grids) {
    g.validate();
    require(kinds.insert(g.base.kind).second, ErrorKind::Config,
            "two grids share kind '" + std::string(to_string(g.base.kind)) + "'");
  }
  TrainConfig t = train;
  t.perturbation = {};
  t.validate();
  require(landscape.points >= 3 && landscape.points % 2 == 1, ErrorKind::Config,
          "landscape.points must be odd and >= 3");
  require(landscape.radius > 0.0, ErrorKind::Config, "landscape.radius must be > 0");
  require(spectrum.top_k >= 1, ErrorKind::Config, "spectrum.top_k must be >= 1");
  require(jobs >= 1, ErrorKind::Config, "jobs must be >= 1");
  require(!outputs.empty(), ErrorKind::Config, "outputs must be set");
}

void to_json(nlohmann::json& j, const ExperimentConfig& cfg) {
  nlohmann::json ds{{"kind", cfg.dataset.kind}, {"bias_column", cfg.dataset.bias_column}};
  if (cfg.dataset.kind == "mnist2") {
    ds["data_dir"] = cfg.dataset.data_dir.string();
  } else {
    ds["n_per_class"] = cfg.dataset.n_per_class;
    ds["dim"] = cfg.dataset.dim;
    ds["margin"] = cfg.dataset.margin;
    ds["noise_sd"] = cfg.dataset.noise_sd;
    ds["seed"] = cfg.dataset.seed;
  }
  nlohmann::json train = cfg.train;
  train.erase("perturbation");
  j = nlohmann::json{
      {"dataset", ds},
      {"grids", cfg.grids},
      {"train", train},
      {"landscape",
       {{"points", cfg.landscape.points}, {"radius", cfg.landscape.radius}, {"seed", cfg.landscape.seed}}},
      {"spectrum", {{"top_k", cfg.spectrum.top_k}, {"crosscheck", cfg.spectrum.crosscheck}}},
      {"outputs", cfg.outputs.string()},
      {"jobs", cfg.jobs},
      {"verify", {{"only", cfg.verify.only}, {"seed", cfg.verify.seed}}}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
  if (!j.is_object()) fail(ErrorKind::Config, "experiment config must be a JSON object");
  cfg = ExperimentConfig{};
  try {
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      cfg.dataset.kind = d.value("kind", cfg.dataset.kind);
      cfg.dataset.data_dir = d.value("data_dir", cfg.dataset.data_dir.string());
      cfg.dataset.n_per_class = d.value("n_per_class", cfg.dataset.n_per_class);
      cfg.dataset.dim = d.value("dim", cfg.dataset.dim);
      cfg.dataset.margin = d.value("margin", cfg.dataset.margin);
      cfg.dataset.noise_sd = d.value("noise_sd", cfg.dataset.noise_sd);
      cfg.dataset.seed = d.value("seed", cfg.dataset.seed);
      cfg.dataset.bias_column = d.value("bias_column", cfg.dataset.bias_column);
    }
    if (j.contains("grids")) cfg.grids = j.at("grids").get<std::vector<EpsilonGrid>>();
    if (j.contains("train")) cfg.train = j.at("train").get<TrainConfig>();
    if (j.contains("landscape")) {
      const auto& l = j.at("landscape");
      cfg.landscape.points = l.value("points", cfg.landscape.points);
      cfg.landscape.radius = l.value("radius", cfg.landscape.radius);
      cfg.landscape.seed = l.value("seed", cfg.landscape.seed);
    }
    if (j.contains("spectrum")) {
      const auto& s = j.at("spectrum");
      cfg.spectrum.top_k = s.value("top_k", cfg.spectrum.top_k);
      cfg.spectrum.crosscheck = s.value("crosscheck", cfg.spectrum.crosscheck);
    }
    cfg.outputs = j.value("outputs", cfg.outputs.string());
    cfg.jobs = j.value("jobs", cfg.jobs);
    if (j.contains("verify")) {
      const auto& v = j.at("verify");
      cfg.verify.only = v.value("only", cfg.verify.only);
      cfg.verify.seed = v.value("seed", cfg.verify.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return j.get<ExperimentConfig>();
}

DataSplits load_splits(const DatasetConfig& cfg) {
  auto finish = [&](Dataset d) { return cfg.bias_column ? with_bias_column(d) : d; };
  if (cfg.kind == "mnist2") {
    require(has_mnist_files(cfg.data_dir), ErrorKind::Data,
            "no MNIST IDX files in " + cfg.data_dir.string());
    auto splits = load_mnist2(cfg.data_dir);
    return {finish(std::move(splits.train)), finish(std::move(splits.test))};
  }
  require(cfg.kind == "synth", ErrorKind::Config, "unknown dataset kind '" + cfg.kind + "'");
  return {finish(synth_separable(cfg.n_per_class, cfg.dim, cfg.margin, cfg.seed, cfg.noise_sd)),
          finish(synth_separable(cfg.n_per_class, cfg.dim, cfg.margin, cfg.seed + 1, cfg.noise_sd))};
}

// ---------------------------------------------------------------------------
// formatting and files

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  std::string s(buf, res.ptr);
  return s == "-0.00" || s == "-0.0" || s == "-0" ? s.substr(1) : s;
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

// Runs fn(0..n-1) on up to `jobs` threads; rethrows the first failure in index order.
template <class Fn>
void run_pool(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct GridPoint {
  const EpsilonGrid* grid;
  double epsilon;
};

std::vector<GridPoint> grid_points(const ExperimentConfig& cfg) {
  std::vector<GridPoint> out;
  for (const auto& g : cfg.grids) {
    for (double e : g.epsilons) out.push_back({&g, e});
  }
  return out;
}

Checkpoint load_required(const ExperimentConfig& cfg, const GridPoint& p) {
  const fs::path path = checkpoint_path(cfg, p.grid->base.kind, p.epsilon);
  require(fs::exists(path), ErrorKind::Data,
          "missing checkpoint for epsilon=" + format_number(p.epsilon) + " (" +
              std::string(to_string(p.grid->base.kind)) + "): " + path.string() +
              "; run train first");
  return load_checkpoint(path);
}

std::string kind_str(PerturbationKind k) { return std::string(to_string(k)); }
std::string norm_str(PerturbationKind k) { return std::string(to_string(norm_of(k))); }

}  // namespace

fs::path checkpoint_path(const ExperimentConfig& cfg, PerturbationKind kind, double epsilon) {
  return cfg.outputs / "checkpoints" /
         (std::string(to_string(kind)) + "_eps" + format_number(epsilon) + ".json");
}

// ---------------------------------------------------------------------------
// svg

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<SvgSeries>& series) {
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double width = 720, height = 460;
  const double left = 80, right = 170, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : series) {
    require(s.x.size() == s.y.size(), ErrorKind::InvalidArgument, "series x/y lengths differ");
    for (double v : s.x) x_lo = std::min(x_lo, v), x_hi = std::max(x_hi, v);
    for (double v : s.y) {
      if (std::isfinite(v)) y_lo = std::min(y_lo, v), y_hi = std::max(y_hi, v);
    }
  }
  if (!(x_lo < x_hi)) x_lo -= 1.0, x_hi += 1.0;
  if (!(y_lo < y_hi)) y_lo -= 1.0, y_hi += 1.0;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;
  auto sx = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\""
    << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(width, 0) << ' ' << fixed(height, 0)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
    << "\" fill=\"white\"/>\n"
    << "<text x=\"" << fixed(left + pw / 2, 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
    << xml_escape(title) << "</text>\n"
    << "<rect x=\"" << fixed(left, 2) << "\" y=\"" << fixed(top, 2) << "\" width=\"" << fixed(pw, 2)
    << "\" height=\"" << fixed(ph, 2) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    o << "<line x1=\"" << fixed(sx(xv), 2) << "\" y1=\"" << fixed(top + ph, 2) << "\" x2=\""
      << fixed(sx(xv), 2) << "\" y2=\"" << fixed(top + ph + 5, 2) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(sx(xv), 2) << "\" y=\"" << fixed(top + ph + 19, 2)
      << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n"
      << "<line x1=\"" << fixed(left - 5, 2) << "\" y1=\"" << fixed(sy(yv), 2) << "\" x2=\""
      << fixed(left, 2) << "\" y2=\"" << fixed(sy(yv), 2) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(left - 8, 2) << "\" y=\"" << fixed(sy(yv) + 4, 2)
      << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  o << "<text x=\"" << fixed(left + pw / 2, 2) << "\" y=\"" << fixed(height - 15, 2)
    << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n"
    << "<text x=\"18\" y=\"" << fixed(top + ph / 2, 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fixed(top + ph / 2, 2) << ")\">" << xml_escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % (sizeof(kColors) / sizeof(kColors[0]))];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      o << (first ? "" : " ") << fixed(sx(s.x[i]), 2) << ',' << fixed(sy(s.y[i]), 2);
      first = false;
    }
    o << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << fixed(left + pw + 12, 2) << "\" y1=\"" << fixed(ly, 2) << "\" x2=\""
      << fixed(left + pw + 36, 2) << "\" y2=\"" << fixed(ly, 2) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << fixed(left + pw + 42, 2) << "\" y=\"" << fixed(ly + 4, 2) << "\">"
      << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// commands

std::vector<AccuracyRow> cmd_train(const ExperimentConfig& cfg) {
  cfg.validate();
  const DataSplits data = load_splits(cfg.dataset);
  const auto points = grid_points(cfg);
  std::vector<AccuracyRow> rows(points.size());
  fs::create_directories(cfg.outputs / "checkpoints");
  fs::create_directories(cfg.outputs / "history");

  run_pool(points.size(), cfg.jobs, [&](std::size_t i) {
    const GridPoint& p = points[i];
    TrainConfig tc = cfg.train;
    tc.perturbation = p.grid->train_spec(p.epsilon);
    const TrainResult result = train(data.train, tc);
    save_checkpoint(result.final, checkpoint_path(cfg, p.grid->base.kind, p.epsilon));

    std::string hist = "epoch,train_loss,train_robust_acc,grad_norm\n";
    for (const auto& c : result.history) {
      hist += std::to_string(c.epoch) + ',' + format_number(c.train_loss) + ',' +
              format_number(c.train_robust_acc) + ',' + format_number(c.grad_norm) + '\n';
    }
    write_file(cfg.outputs / "history" /
                   (kind_str(p.grid->base.kind) + "_eps" + format_number(p.epsilon) + ".csv"),
               hist);

    const PerturbationSpec eval = p.grid->eval_spec(p.epsilon);
    const Evaluation tr = evaluate(data.train, result.final.w, eval);
    const Evaluation te = evaluate(data.test, result.final.w, eval);
    rows[i] = {p.epsilon, p.grid->base.kind, tr.robust_accuracy, te.robust_accuracy,
               generalization_gap(tr, te)};
  });

  std::string csv = "epsilon,norm,kind,train_acc,test_acc,gap\n";
  for (const auto& r : rows) {
    csv += format_number(r.epsilon) + ',' + norm_str(r.kind) + ',' + kind_str(r.kind) + ',' +
           format_number(r.train_acc) + ',' + format_number(r.test_acc) + ',' +
           format_number(r.gap) + '\n';
  }
  write_file(cfg.outputs / "accuracy.csv", csv);
  return rows;
}

std::vector<CurvatureRow> cmd_landscape(const ExperimentConfig& cfg) {
  cfg.validate();
  const DataSplits data = load_splits(cfg.dataset);
  const auto points = grid_points(cfg);
  const auto alphas = symmetric_grid(cfg.landscape.points, cfg.landscape.radius);

  // Fail on a missing checkpoint before any sweep starts.
  std::vector<Checkpoint> ckpts;
  for (const auto& p : points) ckpts.push_back(load_required(cfg, p));

  std::vector<LandscapeProfile> profiles(points.size());
  run_pool(points.size(), cfg.jobs, [&](std::size_t i) {
    profiles[i] = sweep(data.train, ckpts[i], ckpts[i].perturbation_at_checkpoint(), alphas,
                        cfg.landscape.seed);
  });

  std::vector<CurvatureRow> rows;
  std::string csv = "alpha,loss,epsilon,norm,kind,seed\n";
  std::string curv = "epsilon,norm,kind,curvature,g0,train_loss,w_norm\n";
  std::map<NormKind, std::vector<SvgSeries>> by_norm;
  std::map<NormKind, std::set<PerturbationKind>> kinds_by_norm;
  std::map<PerturbationKind, std::vector<SvgSeries>> by_kind;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto kind = points[i].grid->base.kind;
    const auto& prof = profiles[i];
    for (double l : prof.losses) {
      require(std::isfinite(l), ErrorKind::Data,
              "non-finite landscape loss at epsilon=" + format_number(points[i].epsilon));
    }
    for (std::size_t a = 0; a < prof.alphas.size(); ++a) {
      csv += format_number(prof.alphas[a]) + ',' + format_number(prof.losses[a]) + ',' +
             format_number(points[i].epsilon) + ',' + norm_str(kind) + ',' + kind_str(kind) + ',' +
             std::to_string(prof.direction_seed) + '\n';
    }
    CurvatureRow row{points[i].epsilon, kind, curvature_at_zero(prof),
                     prof.losses[prof.alphas.size() / 2], ckpts[i].train_loss, ckpts[i].w.norm()};
    curv += format_number(row.epsilon) + ',' + norm_str(kind) + ',' + kind_str(kind) + ',' +
            format_number(row.curvature) + ',' + format_number(row.g0) + ',' +
            format_number(row.train_loss) + ',' + format_number(row.w_norm) + '\n';
    rows.push_back(row);

    SvgSeries s{"eps=" + format_number(points[i].epsilon), prof.alphas, prof.losses};
    by_kind[kind].push_back(s);
    s.label = kind_str(kind) + " " + s.label;
    by_norm[norm_of(kind)].push_back(std::move(s));
    kinds_by_norm[norm_of(kind)].insert(kind);
  }
  write_file(cfg.outputs / "landscape.csv", csv);
  write_file(cfg.outputs / "curvature.csv", curv);
  for (const auto& [kind, series] : by_kind) {
    write_file(cfg.outputs / ("landscape_" + norm_str(kind) + "_" + kind_str(kind) + ".svg"),
               render_svg("loss landscape: " + kind_str(kind), "alpha", "loss", series));
  }
  for (const auto& [norm, series] : by_norm) {
    if (kinds_by_norm[norm].size() < 2) continue;
    const std::string n(to_string(norm));
    write_file(cfg.outputs / ("landscape_" + n + "_overlay.svg"),
               render_svg("loss landscape: " + n + " overlay", "alpha", "loss", series));
  }
  return rows;
}

std::vector<SpectrumRow> cmd_spectrum(const ExperimentConfig& cfg,
                                      std::vector<SpectrumSummary>* summary) {
  cfg.validate();
  const DataSplits data = load_splits(cfg.dataset);
  const auto points = grid_points(cfg);
  const Eigen::Index k = std::min<Eigen::Index>(cfg.spectrum.top_k, data.train.dim());

  std::vector<Checkpoint> ckpts;
  for (const auto& p : points) ckpts.push_back(load_required(cfg, p));

  std::vector<SpectrumRow> rows(points.size());
  run_pool(points.size(), cfg.jobs, [&](std::size_t i) {
    const Checkpoint& c = ckpts[i];
    const FeatureMatrix perturbed = perturb(data.train, c.w, c.perturbation_at_checkpoint());
    SpectrumRow row;
    row.epsilon = points[i].epsilon;
    row.kind = points[i].grid->base.kind;
    row.w_norm = c.w.norm();
    row.train_loss = c.train_loss;
    row.top = eig_dense(hessian_exact(perturbed, data.train.labels(), c.w)).head(k);
    row.lanczos_rel_diff = NAN;
    if (cfg.spectrum.crosscheck) {
      LanczosOptions opts;
      opts.seed = cfg.train.seed + 1;
      const Vector lz = eig_topk(
          [&](const Vector& v) { return hessian_vector_product(perturbed, data.train.labels(), c.w, v); },
          data.train.dim(), k, opts);
      const double scale = std::max(row.top.cwiseAbs().maxCoeff(), 1e-300);
      row.lanczos_rel_diff = (lz - row.top).cwiseAbs().maxCoeff() / scale;
    }
    rows[i] = std::move(row);
  });

  std::string csv = "epsilon,norm,kind,rank,eigenvalue,eigenvalue_times_wnorm,w_norm,train_loss\n";
  for (const auto& r : rows) {
    for (Eigen::Index j = 0; j < r.top.size(); ++j) {
      csv += format_number(r.epsilon) + ',' + norm_str(r.kind) + ',' + kind_str(r.kind) + ',' +
             std::to_string(j + 1) + ',' + format_number(r.top[j]) + ',' +
             format_number(r.top[j] * r.w_norm) + ',' + format_number(r.w_norm) + ',' +
             format_number(r.train_loss) + '\n';
    }
  }
  write_file(cfg.outputs / "spectrum.csv", csv);

  std::vector<SpectrumSummary> sums;
  std::string sum_csv =
      "norm,kind,points,r2_lambda_max_vs_epsilon,lambda_max_strictly_increasing,lanczos_max_rel_diff\n";
  for (const auto& g : cfg.grids) {
    SpectrumSummary s;
    s.kind = g.base.kind;
    std::vector<double> eps, lam;
    double lz = cfg.spectrum.crosscheck ? 0.0 : NAN;
    for (const auto& r : rows) {
      if (r.kind != g.base.kind) continue;
      eps.push_back(r.epsilon);
      lam.push_back(r.top[0]);
      if (cfg.spectrum.crosscheck) lz = std::max(lz, r.lanczos_rel_diff);
    }
    s.points = eps.size();
    s.r2 = eps.size() >= 2 && eps.front() < eps.back() ? linear_fit_r2(eps, lam) : NAN;
    s.strictly_increasing = true;
    for (std::size_t i = 1; i < lam.size(); ++i) s.strictly_increasing &= lam[i] > lam[i - 1];
    s.lanczos_max_rel_diff = lz;
    sum_csv += norm_str(s.kind) + ',' + kind_str(s.kind) + ',' + std::to_string(s.points) + ',' +
               format_number(s.r2) + ',' + (s.strictly_increasing ? "true" : "false") + ',' +
               format_number(s.lanczos_max_rel_diff) + '\n';
    sums.push_back(s);
  }
  write_file(cfg.outputs / "spectrum_summary.csv", sum_csv);
  if (summary) *summary = std::move(sums);
  return rows;
}

std::vector<CheckResult> cmd_verify(const ExperimentConfig& cfg) {
  require(!cfg.outputs.empty(), ErrorKind::Config, "outputs must be set");
  auto results = run_oracle_suite(cfg.verify);
  write_file(cfg.outputs / "verify.json", to_report(results).dump(2) + "\n");
  return results;
}

}  // namespace advsharp
