#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cica/cica.h"

namespace {

struct Options {
  std::optional<std::size_t> components;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_fakes;
  std::optional<std::string> method;
  std::optional<std::string> classifier;
  std::optional<std::size_t> folds;
  std::string out;
  std::string format = "csv";
  std::string config_file;
  std::vector<std::string> settings;
  std::string input;
  std::string labels;
  std::string model;
  std::string labels_out;
};

int report(cica_status status) {
  if (status != CICA_OK) std::fprintf(stderr, "cica: %s\n", cica_last_error());
  return static_cast<int>(status);
}

// RAII holders for the opaque handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
};
using MatrixH = Handle<cica_matrix, cica_matrix_free>;
using LabelsH = Handle<cica_labels, cica_labels_free>;
using ModelH = Handle<cica_model, cica_model_free>;
using ConfigH = Handle<cica_config, cica_config_free>;

// Flags first, then --set pairs, then the config file.
cica_status build_config(const Options& o, ConfigH& cfg) {
  cica_status st = cica_config_create(&cfg.ptr);
  auto set = [&](const char* key, const std::string& value) {
    if (st == CICA_OK) st = cica_config_set(cfg.ptr, key, value.c_str());
  };
  if (o.seed) set("seed", std::to_string(*o.seed));
  if (o.components) set("components", std::to_string(*o.components));
  if (o.n_fakes) set("n_fakes", std::to_string(*o.n_fakes));
  if (o.method) set("methods", *o.method);
  if (o.classifier) set("classifiers", *o.classifier);
  if (o.folds) set("folds", std::to_string(*o.folds));
  for (const std::string& kv : o.settings) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "cica: --set expects key=value, got '%s'\n", kv.c_str());
      return CICA_ERR_CONFIG;
    }
    set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
  }
  if (st == CICA_OK && !o.config_file.empty()) st = cica_config_load_file(cfg.ptr, o.config_file.c_str());
  return st;
}

int run_experiment(const Options& o, cica_status (*fn)(const cica_config*, const char*)) {
  ConfigH cfg;
  cica_status st = build_config(o, cfg);
  if (st == CICA_OK) st = fn(cfg.ptr, o.out.c_str());
  return report(st);
}

int run_synth(const Options& o) {
  ConfigH cfg;
  cica_status st = build_config(o, cfg);
  if (st == CICA_OK) st = cica_synth(cfg.ptr, o.out.c_str(), o.format.c_str());
  return report(st);
}

int run_fit_rest(const Options& o) {
  MatrixH x;
  ModelH model;
  cica_status st = cica_matrix_load(o.input.c_str(), o.format.c_str(), &x.ptr);
  if (st == CICA_OK) st = cica_fit_rest(x.ptr, o.components.value_or(32), o.seed.value_or(0), &model.ptr);
  if (st == CICA_OK) st = cica_model_save(model.ptr, o.out.c_str());
  if (st == CICA_OK && !cica_model_converged(model.ptr))
    std::fprintf(stderr, "cica: warning: ICA did not converge; the model is usable but may be suboptimal\n");
  return report(st);
}

int run_fit_task(const Options& o) {
  MatrixH x;
  LabelsH labels;
  ModelH rest, task;
  cica_status st = cica_model_load(o.model.c_str(), &rest.ptr);
  if (st == CICA_OK) st = cica_matrix_load(o.input.c_str(), o.format.c_str(), &x.ptr);
  if (st == CICA_OK) st = cica_labels_load(o.labels.c_str(), &labels.ptr);
  if (st == CICA_OK) st = cica_fit_task(rest.ptr, x.ptr, labels.ptr, &task.ptr);
  if (st == CICA_OK) st = cica_model_save(task.ptr, o.out.c_str());
  return report(st);
}

int run_generate(const Options& o) {
  const std::string method = o.method.value_or("condica");
  if (!o.n_fakes || *o.n_fakes == 0) {
    std::fprintf(stderr, "cica: --n-fakes must be a positive count\n");
    return CICA_ERR_CONFIG;
  }
  MatrixH fakes;
  LabelsH fake_labels;
  cica_status st = CICA_OK;
  if (method == "condica") {
    if (o.model.empty()) {
      std::fprintf(stderr, "cica: --model is required for method condica\n");
      return CICA_ERR_CONFIG;
    }
    ModelH model;
    st = cica_model_load(o.model.c_str(), &model.ptr);
    if (st == CICA_OK) st = cica_generate(model.ptr, *o.n_fakes, o.seed.value_or(0), &fakes.ptr, &fake_labels.ptr);
  } else {
    if (o.input.empty() || o.labels.empty()) {
      std::fprintf(stderr, "cica: --input and --labels are required for baseline methods\n");
      return CICA_ERR_CONFIG;
    }
    MatrixH x;
    LabelsH labels;
    st = cica_matrix_load(o.input.c_str(), o.format.c_str(), &x.ptr);
    if (st == CICA_OK) st = cica_labels_load(o.labels.c_str(), &labels.ptr);
    if (st == CICA_OK)
      st = cica_augment_baseline(method.c_str(), x.ptr, labels.ptr, o.components.value_or(32), *o.n_fakes,
                                 o.seed.value_or(0), &fakes.ptr, &fake_labels.ptr);
  }
  if (st == CICA_OK) st = cica_matrix_save(fakes.ptr, o.out.c_str(), o.format.c_str());
  if (st == CICA_OK && !o.labels_out.empty()) st = cica_labels_save(fake_labels.ptr, o.labels_out.c_str());
  return report(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional ICA data augmentation toolkit"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-k,--components", o.components, "Number of ICA components");
    sub->add_option("--seed", o.seed, "Root random seed");
    sub->add_option("--format", o.format, "Matrix file format")->check(CLI::IsMember({"csv", "bin"}));
  };
  auto experiment = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--n-fakes", o.n_fakes, "Fakes (fake-vs-real: total; augmentation: per class)");
    sub->add_option("--method", o.method, "Comma-separated methods: condica, ica, cov, icacov, none");
    sub->add_option("--classifier", o.classifier, "Comma-separated classifiers: lda, logreg, mlp");
    sub->add_option("--folds", o.folds, "Cross-validation folds");
    sub->add_option("--config", o.config_file, "key = value file applied after the flags")->check(CLI::ExistingFile);
    sub->add_option("--set", o.settings, "Extra key=value setting (repeatable)");
    sub->add_option("--out", o.out, "Output directory")->required();
  };

  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic rest set and labeled task pool");
  experiment(synth);

  CLI::App* fit_rest = app.add_subcommand("fit-rest", "Fit the unconditional model on unlabeled data");
  common(fit_rest);
  fit_rest->add_option("--input", o.input, "Data matrix, one sample per row (csv) or CMAT1 (bin)")->required();
  fit_rest->add_option("--out", o.out, "Model file to write")->required();

  CLI::App* fit_task = app.add_subcommand("fit-task", "Fit class-conditional means and covariance on labeled data");
  common(fit_task);
  fit_task->add_option("--model", o.model, "Model produced by fit-rest")->required();
  fit_task->add_option("--input", o.input, "Task data matrix")->required();
  fit_task->add_option("--labels", o.labels, "One integer label per line")->required();
  fit_task->add_option("--out", o.out, "Model file to write")->required();

  CLI::App* generate = app.add_subcommand("generate", "Sample synthetic data");
  common(generate);
  generate->add_option("--method", o.method, "condica (needs --model) or ica, cov, icacov (need --input, --labels)");
  generate->add_option("--model", o.model, "Model file");
  generate->add_option("--input", o.input, "Task data for baseline methods");
  generate->add_option("--labels", o.labels, "Task labels for baseline methods");
  generate->add_option("--n-fakes", o.n_fakes, "Samples (per class for labeled models)")->required();
  generate->add_option("--out", o.out, "Matrix file to write")->required();
  generate->add_option("--labels-out", o.labels_out, "Write the generated labels here");

  CLI::App* fvr = app.add_subcommand("bench-fake-vs-real", "Discriminate generated from real rest samples");
  experiment(fvr);
  CLI::App* aug = app.add_subcommand("bench-augment", "Few-shot augmentation benchmark");
  experiment(aug);
  CLI::App* sweep = app.add_subcommand("sweep-k", "Augmentation accuracy as a function of k");
  experiment(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(CICA_ERR_CONFIG);
  }

  if (synth->parsed()) return run_synth(o);
  if (fit_rest->parsed()) return run_fit_rest(o);
  if (fit_task->parsed()) return run_fit_task(o);
  if (generate->parsed()) return run_generate(o);
  if (fvr->parsed()) return run_experiment(o, cica_run_fake_vs_real);
  if (aug->parsed()) return run_experiment(o, cica_run_augment);
  if (sweep->parsed()) return run_experiment(o, cica_run_sweep_k);
  return static_cast<int>(CICA_ERR_CONFIG);
}
