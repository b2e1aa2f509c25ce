#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cica/classify.hpp"
#include "cica/ica.hpp"
#include "cica/synthetic.hpp"

namespace cica {

enum class Method { None, CondIca, Ica, Cov, IcaCov };

const char* to_string(Method method) noexcept;
Method parse_method(std::string_view name);

struct BenchConfig {
  std::uint64_t seed = 0;

  // Synthetic world.
  std::size_t p = 64;
  std::size_t k_true = 32;
  std::size_t n_rest = 50000;
  std::vector<SourceFamily> families;
  double latent_correlation = 0.3;
  double noise = 0.01;
  std::size_t classes = 10;
  std::size_t train_per_class = 20;
  std::size_t test_per_class = 100;
  double class_separation = 2.0;

  // Generative models.
  std::size_t components = 32;
  std::size_t n_quantiles = 0;
  FastIcaOptions ica;

  // Experiments. Empty `methods` selects the experiment's default list.
  std::vector<Method> methods;
  std::vector<ClassifierKind> classifiers{ClassifierKind::Lda, ClassifierKind::LogReg, ClassifierKind::Mlp};
  std::size_t folds = 5;
  std::size_t splits = 5;
  // Fake-vs-real: total fakes (unset: same as n_rest). Augmentation: fakes
  // per class (unset: twice train_per_class).
  std::optional<std::size_t> n_fakes;
  std::vector<std::size_t> k_grid{2, 4, 8, 16, 32};

  LogRegOptions logreg;
  MlpOptions mlp;
};

/// Sets one key. Unknown keys and malformed values raise ErrorKind::Config.
/// `preset` accepts "desk" (the defaults) or "full" (p 1024, k 900, hidden
/// layers of 1024).
void set_config_value(BenchConfig& config, std::string_view key, std::string_view value);

/// Applies a file of `key = value` lines; '#' starts a comment.
void load_config_file(BenchConfig& config, const std::filesystem::path& path);

/// Canonical key/value listing of every setting, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const BenchConfig& config);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1), 0 for one value
  std::vector<double> values;
};

MetricSummary summarize(std::vector<double> values);

/// Paired comparison of per-split accuracies. An empty `test` means the
/// statistic was undefined (identical or too few splits) and prints as "n/a".
struct Comparison {
  std::optional<TTest> test;
};

struct ReportCell {
  std::string method;
  std::string classifier;
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  std::optional<Comparison> vs_none;
  std::optional<Comparison> vs_condica;
};

struct BenchReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<ReportCell> cells;
  std::vector<std::string> warnings;
  // Wall-clock seconds per method. Not part of the JSON/CSV payloads.
  std::vector<std::pair<std::string, double>> runtime_seconds;

  const ReportCell& cell(std::string_view method, std::string_view classifier) const;
};

struct SweepRow {
  std::size_t k = 0;
  std::string method;
  std::string classifier;
  std::optional<MetricSummary> accuracy;
  std::string error;  // non-empty when this k could not be evaluated
};

struct SweepReport {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<SweepRow> rows;
  std::vector<std::pair<std::string, double>> runtime_seconds;
};

/// Real rest samples (label 0) against generated ones (label 1), k-fold CV.
/// Default methods: condica, ica, cov, icacov.
BenchReport exp_fake_vs_real(const BenchConfig& config);

/// Few-shot task benchmark over seeded train/test splits. Default methods:
/// none, condica, ica, cov, icacov.
BenchReport exp_augmentation_benchmark(const BenchConfig& config);

/// The augmentation benchmark repeated over config.k_grid. Default method:
/// condica.
SweepReport exp_sensitivity_k(const BenchConfig& config);

std::string report_to_json(const BenchReport& report);
BenchReport report_from_json(std::string_view json);
std::string report_to_csv(const BenchReport& report);

std::string sweep_to_json(const SweepReport& report);
std::string sweep_to_csv(const SweepReport& report);

/// Writes <stem>.json, <stem>.csv and timings.txt into `dir` (created if
/// needed).
void write_report(const std::filesystem::path& dir, const std::string& stem, const BenchReport& report);
void write_sweep(const std::filesystem::path& dir, const std::string& stem, const SweepReport& report);

/// Synthetic rest and task pool drawn exactly as the experiments draw them.
struct SyntheticWorld {
  Matrix rest;
  LabeledDataset task;
  Matrix mixing;
};

SyntheticWorld make_world(const BenchConfig& config);

}  // namespace cica
