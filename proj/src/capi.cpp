#include "cica/cica.h"

#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <utility>

#include "cica/augment.hpp"
#include "cica/bench.hpp"
#include "cica/error.hpp"
#include "cica/io.hpp"

struct cica_matrix {
  cica::Matrix m;
};

struct cica_labels {
  std::vector<cica::ClassId> v;
};

struct cica_model {
  cica::AnyModel model;
};

struct cica_config {
  cica::BenchConfig config;
};

namespace {

thread_local std::string last_error;

cica_status status_for(cica::ErrorKind kind) {
  using cica::ErrorKind;
  switch (kind) {
    case ErrorKind::Config: return CICA_ERR_CONFIG;
    case ErrorKind::Contract:
    case ErrorKind::Parse:
    case ErrorKind::MissingClass:
    case ErrorKind::InsufficientSamples:
    case ErrorKind::Degenerate: return CICA_ERR_DATA;
    case ErrorKind::Numerical:
    case ErrorKind::RankDeficient:
    case ErrorKind::Domain:
    case ErrorKind::Definiteness: return CICA_ERR_NUMERICAL;
  }
  return CICA_ERR_INTERNAL;
}

template <class F>
cica_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return CICA_OK;
  } catch (const cica::Error& e) {
    last_error = std::string(cica::to_string(e.kind())) + ": " + e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return CICA_ERR_DATA;
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown exception";
  }
  return CICA_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (p == nullptr) cica::fail(cica::ErrorKind::Config, std::string(what) + " must not be NULL");
}

cica::MatrixFormat format_of(const char* name) {
  need(name, "format");
  return cica::parse_matrix_format(name);
}

template <class T, class... Args>
void emit(T** out, Args&&... args) {
  need(out, "output pointer");
  *out = new T{std::forward<Args>(args)...};
}

}  // namespace

extern "C" {

const char* cica_last_error(void) { return last_error.c_str(); }

const char* cica_version(void) { return "1.0.0"; }

cica_status cica_matrix_create(size_t rows, size_t cols, const double* values, cica_matrix** out) {
  return guarded([&] {
    need(values, "values");
    if (rows == 0 || cols == 0) cica::fail(cica::ErrorKind::Config, "matrix dimensions must be positive");
    emit(out, cica::Matrix(rows, cols, std::vector<double>(values, values + rows * cols)));
  });
}

cica_status cica_matrix_load(const char* path, const char* format, cica_matrix** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, cica::load_matrix(path, format_of(format)));
  });
}

cica_status cica_matrix_save(const cica_matrix* m, const char* path, const char* format) {
  return guarded([&] {
    need(m, "matrix");
    need(path, "path");
    cica::save_matrix(path, m->m, format_of(format));
  });
}

size_t cica_matrix_rows(const cica_matrix* m) { return m ? m->m.rows() : 0; }
size_t cica_matrix_cols(const cica_matrix* m) { return m ? m->m.cols() : 0; }
const double* cica_matrix_data(const cica_matrix* m) { return m ? m->m.data() : nullptr; }
void cica_matrix_free(cica_matrix* m) { delete m; }

cica_status cica_labels_create(size_t n, const int64_t* values, cica_labels** out) {
  return guarded([&] {
    need(values, "values");
    emit(out, std::vector<cica::ClassId>(values, values + n));
  });
}

cica_status cica_labels_load(const char* path, cica_labels** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, cica::load_labels(path));
  });
}

cica_status cica_labels_save(const cica_labels* labels, const char* path) {
  return guarded([&] {
    need(labels, "labels");
    need(path, "path");
    cica::save_labels(path, labels->v);
  });
}

size_t cica_labels_size(const cica_labels* labels) { return labels ? labels->v.size() : 0; }
const int64_t* cica_labels_data(const cica_labels* labels) { return labels ? labels->v.data() : nullptr; }
void cica_labels_free(cica_labels* labels) { delete labels; }

cica_status cica_fit_rest(const cica_matrix* x, size_t k, uint64_t seed, cica_model** out) {
  return guarded([&] {
    need(x, "matrix");
    if (k < 2) cica::fail(cica::ErrorKind::Config, "k must be >= 2");
    if (k > x->m.rows())
      cica::fail(cica::ErrorKind::Config, "k = " + std::to_string(k) + " exceeds the " + std::to_string(x->m.rows()) +
                                              " features");
    emit(out, cica::AnyModel{cica::fit_unconditional(x->m, k, seed)});
  });
}

cica_status cica_fit_task(const cica_model* rest, const cica_matrix* x, const cica_labels* labels, cica_model** out) {
  return guarded([&] {
    need(rest, "model");
    need(x, "matrix");
    need(labels, "labels");
    const cica::UnmixingModel& unmixing =
        std::visit([](const auto& m) -> const cica::UnmixingModel& { return m.unmixing; }, rest->model);
    if (x->m.rows() != unmixing.features())
      cica::fail(cica::ErrorKind::Contract, "task data has " + std::to_string(x->m.rows()) +
                                                " features, model expects " + std::to_string(unmixing.features()));
    emit(out, cica::AnyModel{cica::fit_conditional(unmixing, x->m, labels->v)});
  });
}

cica_status cica_generate(const cica_model* model, size_t n, uint64_t seed, cica_matrix** x_out,
                          cica_labels** labels_out) {
  return guarded([&] {
    need(model, "model");
    need(x_out, "output pointer");
    if (n == 0) cica::fail(cica::ErrorKind::Config, "number of fakes must be positive");
    cica::LabeledDataset ds;
    if (const auto* u = std::get_if<cica::UnconditionalModel>(&model->model)) {
      ds.x = cica::generate_unconditional(*u, n, seed);
      ds.labels.assign(n, 0);
    } else {
      ds = cica::generate_conditional_dataset(std::get<cica::ConditionalIcaModel>(model->model), n, seed);
    }
    cica_labels* labels = labels_out ? new cica_labels{std::move(ds.labels)} : nullptr;
    *x_out = new cica_matrix{std::move(ds.x)};
    if (labels_out) *labels_out = labels;
  });
}

cica_status cica_augment_baseline(const char* method, const cica_matrix* x, const cica_labels* labels, size_t k,
                                  size_t n, uint64_t seed, cica_matrix** x_out, cica_labels** labels_out) {
  return guarded([&] {
    need(method, "method");
    need(x, "matrix");
    need(labels, "labels");
    need(x_out, "output pointer");
    const cica::Method m = cica::parse_method(method);
    const cica::LabeledDataset task = cica::LabeledDataset::make(x->m, labels->v);
    cica::LabeledDataset out;
    switch (m) {
      case cica::Method::Ica: out = cica::augment_ica(task, k, n, seed); break;
      case cica::Method::Cov: out = cica::augment_covariance(task, n, seed); break;
      case cica::Method::IcaCov: out = cica::augment_ica_covariance(task, k, n, seed); break;
      default:
        cica::fail(cica::ErrorKind::Config, std::string("'") + method + "' is not a baseline (expected ica, cov or icacov)");
    }
    cica_labels* l = labels_out ? new cica_labels{std::move(out.labels)} : nullptr;
    *x_out = new cica_matrix{std::move(out.x)};
    if (labels_out) *labels_out = l;
  });
}

cica_status cica_model_save(const cica_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    std::visit([&](const auto& m) { cica::save_model(path, m); }, model->model);
  });
}

cica_status cica_model_load(const char* path, cica_model** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, cica::load_model(path));
  });
}

cica_model_kind cica_model_get_kind(const cica_model* model) {
  return model && std::holds_alternative<cica::ConditionalIcaModel>(model->model) ? CICA_MODEL_CONDITIONAL
                                                                                  : CICA_MODEL_UNCONDITIONAL;
}

size_t cica_model_components(const cica_model* model) {
  if (!model) return 0;
  return std::visit([](const auto& m) { return m.unmixing.components(); }, model->model);
}

size_t cica_model_features(const cica_model* model) {
  if (!model) return 0;
  return std::visit([](const auto& m) { return m.unmixing.features(); }, model->model);
}

int cica_model_converged(const cica_model* model) {
  if (!model) return 0;
  return std::visit([](const auto& m) { return m.unmixing.converged ? 1 : 0; }, model->model);
}

void cica_model_free(cica_model* model) { delete model; }

cica_status cica_config_create(cica_config** out) {
  return guarded([&] { emit(out, cica::BenchConfig{}); });
}

cica_status cica_config_set(cica_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    cica::set_config_value(config->config, key, value);
  });
}

cica_status cica_config_load_file(cica_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    cica::load_config_file(config->config, path);
  });
}

void cica_config_free(cica_config* config) { delete config; }

cica_status cica_run_fake_vs_real(const cica_config* config, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(out_dir, "output directory");
    cica::write_report(out_dir, "fake_vs_real", cica::exp_fake_vs_real(config->config));
  });
}

cica_status cica_run_augment(const cica_config* config, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(out_dir, "output directory");
    cica::write_report(out_dir, "augment", cica::exp_augmentation_benchmark(config->config));
  });
}

cica_status cica_run_sweep_k(const cica_config* config, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(out_dir, "output directory");
    cica::write_sweep(out_dir, "sweep_k", cica::exp_sensitivity_k(config->config));
  });
}

cica_status cica_synth(const cica_config* config, const char* out_dir, const char* format) {
  return guarded([&] {
    need(config, "config");
    need(out_dir, "output directory");
    const cica::MatrixFormat fmt = format_of(format);
    const std::string ext = fmt == cica::MatrixFormat::Csv ? ".csv" : ".bin";
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const cica::SyntheticWorld world = cica::make_world(config->config);
    cica::save_matrix(dir / ("rest" + ext), world.rest, fmt);
    cica::save_matrix(dir / ("task_x" + ext), world.task.x, fmt);
    cica::save_labels(dir / "task_labels.txt", world.task.labels);
  });
}

}  // extern "C"
