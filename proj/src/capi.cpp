#include "advsharp/advsharp.h"

#include <cstring>
#include <new>
#include <string>

#include "advsharp/landscape.hpp"
#include "advsharp/linear_model.hpp"
#include "advsharp/report.hpp"
#include "advsharp/spectrum.hpp"

struct advsharp_dataset {
  advsharp::Dataset data;
};

struct advsharp_checkpoint {
  advsharp::Checkpoint ckpt;
};

namespace {

using namespace advsharp;

thread_local std::string g_last_error;

advsharp_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return ADVSHARP_ERR_INVALID_ARGUMENT;
    case ErrorKind::Dimension: return ADVSHARP_ERR_DIMENSION;
    case ErrorKind::Format: return ADVSHARP_ERR_FORMAT;
    case ErrorKind::Consistency: return ADVSHARP_ERR_CONSISTENCY;
    case ErrorKind::Io: return ADVSHARP_ERR_IO;
    case ErrorKind::Data: return ADVSHARP_ERR_DATA;
    case ErrorKind::InvalidSpec: return ADVSHARP_ERR_INVALID_SPEC;
    case ErrorKind::Diverged: return ADVSHARP_ERR_DIVERGED;
    case ErrorKind::NotSymmetric: return ADVSHARP_ERR_NOT_SYMMETRIC;
    case ErrorKind::Config: return ADVSHARP_ERR_CONFIG;
  }
  return ADVSHARP_ERR_INTERNAL;
}

template <class Fn>
advsharp_status guarded(Fn&& fn) {
  try {
    const advsharp_status s = fn();
    if (s == ADVSHARP_OK) g_last_error.clear();
    return s;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return ADVSHARP_ERR_INTERNAL;
}

template <class T>
void need(const T* p, const char* what) {
  require(p != nullptr, ErrorKind::InvalidArgument, std::string(what) + " must not be NULL");
}

WeightVector weights(const double* w, std::size_t d) {
  need(w, "w");
  return WeightVector(Eigen::Map<const Vector>(w, static_cast<Eigen::Index>(d)));
}

nlohmann::json parse_json(const char* text, const char* what) {
  need(text, what);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string(what) + " is not valid JSON: " + e.what());
  }
}

PerturbationSpec parse_spec(const char* text) {
  const auto spec = parse_json(text, "spec_json").get<PerturbationSpec>();
  spec.validate();
  return spec;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_out(const FeatureMatrix& m, double* out) {
  Eigen::Map<FeatureMatrix>(out, m.rows(), m.cols()) = m;
}

void copy_out(const Matrix& m, double* out) {
  Eigen::Map<FeatureMatrix>(out, m.rows(), m.cols()) = m;
}

}  // namespace

extern "C" {

const char* advsharp_version(void) { return "0.1.0"; }

const char* advsharp_last_error(void) { return g_last_error.c_str(); }

const char* advsharp_status_name(advsharp_status status) {
  switch (status) {
    case ADVSHARP_OK: return "ok";
    case ADVSHARP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ADVSHARP_ERR_DIMENSION: return "dimension";
    case ADVSHARP_ERR_FORMAT: return "format";
    case ADVSHARP_ERR_CONSISTENCY: return "consistency";
    case ADVSHARP_ERR_IO: return "io";
    case ADVSHARP_ERR_DATA: return "data";
    case ADVSHARP_ERR_INVALID_SPEC: return "invalid_spec";
    case ADVSHARP_ERR_DIVERGED: return "diverged";
    case ADVSHARP_ERR_NOT_SYMMETRIC: return "not_symmetric";
    case ADVSHARP_ERR_CONFIG: return "config";
    case ADVSHARP_ERR_VERIFICATION: return "verification";
    case ADVSHARP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int advsharp_exit_code(advsharp_status status) {
  switch (status) {
    case ADVSHARP_OK: return 0;
    case ADVSHARP_ERR_CONFIG:
    case ADVSHARP_ERR_INVALID_SPEC:
    case ADVSHARP_ERR_INVALID_ARGUMENT: return 2;
    case ADVSHARP_ERR_DATA:
    case ADVSHARP_ERR_IO:
    case ADVSHARP_ERR_FORMAT:
    case ADVSHARP_ERR_CONSISTENCY:
    case ADVSHARP_ERR_DIMENSION: return 3;
    default: return 1;
  }
}

void advsharp_string_free(char* s) { std::free(s); }

advsharp_status advsharp_dataset_create(const double* features, const double* labels, size_t n,
                                        size_t d, const char* name, advsharp_dataset** out) {
  return guarded([&] {
    need(features, "features");
    need(labels, "labels");
    need(out, "out");
    *out = nullptr;
    const auto rows = static_cast<Eigen::Index>(n), cols = static_cast<Eigen::Index>(d);
    FeatureMatrix f = Eigen::Map<const FeatureMatrix>(features, rows, cols);
    Vector y = Eigen::Map<const Vector>(labels, rows);
    *out = new advsharp_dataset{Dataset(std::move(f), std::move(y), name ? name : "dataset")};
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_dataset_load_mnist2(const char* dir, advsharp_dataset** train,
                                             advsharp_dataset** test) {
  return guarded([&] {
    need(dir, "dir");
    need(train, "train");
    need(test, "test");
    *train = *test = nullptr;
    auto splits = load_mnist2(dir);
    auto* a = new advsharp_dataset{std::move(splits.train)};
    *test = new advsharp_dataset{std::move(splits.test)};
    *train = a;
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_dataset_load_idx(const char* images_path, const char* labels_path,
                                          advsharp_dataset** out) {
  return guarded([&] {
    need(images_path, "images_path");
    need(labels_path, "labels_path");
    need(out, "out");
    *out = nullptr;
    *out = new advsharp_dataset{filter_mnist2(load_idx(images_path, labels_path))};
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_dataset_synth(size_t n_per_class, size_t d, double margin, uint64_t seed,
                                       advsharp_dataset** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new advsharp_dataset{synth_separable(static_cast<Eigen::Index>(n_per_class),
                                                static_cast<Eigen::Index>(d), margin, seed)};
    return ADVSHARP_OK;
  });
}

void advsharp_dataset_free(advsharp_dataset* data) { delete data; }

size_t advsharp_dataset_size(const advsharp_dataset* data) {
  return data ? static_cast<size_t>(data->data.size()) : 0;
}

size_t advsharp_dataset_dim(const advsharp_dataset* data) {
  return data ? static_cast<size_t>(data->data.dim()) : 0;
}

advsharp_status advsharp_dataset_features(const advsharp_dataset* data, double* out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    copy_out(data->data.features(), out);
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_dataset_labels(const advsharp_dataset* data, double* out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    Eigen::Map<Vector>(out, data->data.size()) = data->data.labels();
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_loss(const advsharp_dataset* data, const double* w, size_t d, double* out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    *out = loss(data->data, weights(w, d));
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_grad(const advsharp_dataset* data, const double* w, size_t d, double* out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    const Vector g = grad(data->data, weights(w, d));
    Eigen::Map<Vector>(out, g.size()) = g;
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_hessian(const advsharp_dataset* data, const double* w, size_t d,
                                 const char* spec_json, double* out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    const WeightVector wv = weights(w, d);
    const Matrix h = spec_json ? hessian_at_perturbed(data->data, wv, parse_spec(spec_json))
                               : hessian_exact(data->data, wv);
    copy_out(h, out);
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_decomposed_adv_loss(double clean_logit, double w_norm, double eta_norm,
                                             double cos_theta, int label, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = decomposed_adv_loss({clean_logit, w_norm, eta_norm, cos_theta, label});
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_perturb(const advsharp_dataset* data, const double* w, size_t d,
                                 const char* spec_json, double* out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    copy_out(perturb(data->data, weights(w, d), parse_spec(spec_json)), out);
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_train(const advsharp_dataset* data, const char* config_json,
                               advsharp_checkpoint** out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    *out = nullptr;
    const auto cfg = parse_json(config_json, "config_json").get<TrainConfig>();
    *out = new advsharp_checkpoint{train(data->data, cfg).final};
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_checkpoint_load(const char* path, advsharp_checkpoint** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new advsharp_checkpoint{load_checkpoint(path)};
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_checkpoint_save(const advsharp_checkpoint* ckpt, const char* path) {
  return guarded([&] {
    need(ckpt, "ckpt");
    need(path, "path");
    save_checkpoint(ckpt->ckpt, path);
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_checkpoint_to_json(const advsharp_checkpoint* ckpt, char** out) {
  return guarded([&] {
    need(ckpt, "ckpt");
    need(out, "out");
    *out = dup_string(nlohmann::json(ckpt->ckpt).dump());
    return ADVSHARP_OK;
  });
}

void advsharp_checkpoint_free(advsharp_checkpoint* ckpt) { delete ckpt; }

size_t advsharp_checkpoint_dim(const advsharp_checkpoint* ckpt) {
  return ckpt ? static_cast<size_t>(ckpt->ckpt.w.dim()) : 0;
}

advsharp_status advsharp_checkpoint_weights(const advsharp_checkpoint* ckpt, double* out) {
  return guarded([&] {
    need(ckpt, "ckpt");
    need(out, "out");
    Eigen::Map<Vector>(out, ckpt->ckpt.w.dim()) = ckpt->ckpt.w.values();
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_checkpoint_train_loss(const advsharp_checkpoint* ckpt, double* out) {
  return guarded([&] {
    need(ckpt, "ckpt");
    need(out, "out");
    *out = ckpt->ckpt.train_loss;
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_evaluate(const advsharp_dataset* data, const double* w, size_t d,
                                  const char* spec_json, double* robust_accuracy,
                                  double* robust_loss) {
  return guarded([&] {
    need(data, "data");
    const Evaluation e = evaluate(data->data, weights(w, d), parse_spec(spec_json));
    if (robust_accuracy) *robust_accuracy = e.robust_accuracy;
    if (robust_loss) *robust_loss = e.robust_loss;
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_eig_dense(const double* h, size_t n, double* out) {
  return guarded([&] {
    need(h, "h");
    need(out, "out");
    const auto k = static_cast<Eigen::Index>(n);
    const Matrix m = Eigen::Map<const FeatureMatrix>(h, k, k);
    Eigen::Map<Vector>(out, k) = eig_dense(m);
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_eig_topk(const double* h, size_t n, size_t k, uint64_t seed, double* out) {
  return guarded([&] {
    need(h, "h");
    need(out, "out");
    const auto dim = static_cast<Eigen::Index>(n);
    const Matrix m = Eigen::Map<const FeatureMatrix>(h, dim, dim);
    require((m - m.transpose()).cwiseAbs().maxCoeff() <=
                1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff()),
            ErrorKind::NotSymmetric, "matrix is not symmetric");
    LanczosOptions opts;
    opts.seed = seed;
    const Vector top =
        eig_topk([&](const Vector& v) { return Vector(m * v); }, dim, static_cast<Eigen::Index>(k), opts);
    Eigen::Map<Vector>(out, top.size()) = top;
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_verify_optimum_match(const double* x, size_t d, int y, double epsilon,
                                              double scale, int flip_projector_sign,
                                              double* max_abs_diff, double* tolerance) {
  return guarded([&] {
    need(x, "x");
    const OptimumMatch m =
        verify_optimum_match(Eigen::Map<const Vector>(x, static_cast<Eigen::Index>(d)), y, epsilon,
                             scale, flip_projector_sign != 0);
    if (max_abs_diff) *max_abs_diff = m.max_abs_diff;
    if (tolerance) *tolerance = m.tolerance;
    return m.passed() ? ADVSHARP_OK : ADVSHARP_ERR_VERIFICATION;
  });
}

advsharp_status advsharp_landscape_sweep(const advsharp_dataset* data,
                                         const advsharp_checkpoint* ckpt, const double* alphas,
                                         size_t n_alpha, uint64_t seed, double* out_losses) {
  return guarded([&] {
    need(data, "data");
    need(ckpt, "ckpt");
    need(alphas, "alphas");
    need(out_losses, "out_losses");
    const std::vector<double> grid(alphas, alphas + n_alpha);
    const auto prof =
        sweep(data->data, ckpt->ckpt, ckpt->ckpt.perturbation_at_checkpoint(), grid, seed);
    std::copy(prof.losses.begin(), prof.losses.end(), out_losses);
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_curvature_at_zero(const double* alphas, const double* losses, size_t n,
                                           double* out) {
  return guarded([&] {
    need(alphas, "alphas");
    need(losses, "losses");
    need(out, "out");
    LandscapeProfile p;
    p.alphas.assign(alphas, alphas + n);
    p.losses.assign(losses, losses + n);
    *out = curvature_at_zero(p);
    return ADVSHARP_OK;
  });
}

advsharp_status advsharp_run_command(const char* command, const char* config_json,
                                     char** report_json) {
  if (report_json) *report_json = nullptr;
  return guarded([&] {
    need(command, "command");
    const auto cfg = parse_json(config_json, "config_json").get<ExperimentConfig>();
    const std::string cmd = command;
    nlohmann::json report = nlohmann::json::array();
    advsharp_status status = ADVSHARP_OK;
    if (cmd == "train") {
      for (const auto& r : cmd_train(cfg)) {
        report.push_back({{"epsilon", r.epsilon}, {"kind", to_string(r.kind)},
                          {"train_acc", r.train_acc}, {"test_acc", r.test_acc}, {"gap", r.gap}});
      }
    } else if (cmd == "landscape") {
      for (const auto& r : cmd_landscape(cfg)) {
        report.push_back({{"epsilon", r.epsilon}, {"kind", to_string(r.kind)},
                          {"curvature", r.curvature}, {"g0", r.g0}, {"train_loss", r.train_loss}});
      }
    } else if (cmd == "spectrum") {
      std::vector<SpectrumSummary> sums;
      cmd_spectrum(cfg, &sums);
      for (const auto& s : sums) {
        report.push_back({{"kind", to_string(s.kind)}, {"points", s.points},
                          {"r2", std::isfinite(s.r2) ? nlohmann::json(s.r2) : nlohmann::json()},
                          {"strictly_increasing", s.strictly_increasing}});
      }
    } else if (cmd == "verify") {
      const auto results = cmd_verify(cfg);
      report = to_report(results);
      for (const auto& r : results) {
        if (!r.passed) status = ADVSHARP_ERR_VERIFICATION;
      }
      if (status != ADVSHARP_OK) g_last_error = "verification failed";
    } else {
      fail(ErrorKind::Config, "unknown command '" + cmd + "'");
    }
    if (report_json) *report_json = dup_string(report.dump(2));
    return status;
  });
}

}  // extern "C"
