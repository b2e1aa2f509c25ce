#include "cica/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "cica/augment.hpp"
#include "cica/error.hpp"
#include "cica/random.hpp"

namespace cica {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t stream(std::uint64_t root, const char* name, std::uint64_t index = 0) {
  return derive_seed(root, hash_id(name), index);
}

std::uint64_t method_seed(std::uint64_t root, const char* experiment, std::size_t split, Method m) {
  return derive_seed(stream(root, experiment), split, hash_id(to_string(m)));
}

std::uint64_t classifier_seed(std::uint64_t method_seed, ClassifierKind kind) {
  return derive_seed(method_seed, hash_id(to_string(kind)));
}

SyntheticSpec world_spec(const BenchConfig& c) {
  SyntheticSpec s;
  s.p = c.p;
  s.k_true = c.k_true;
  s.families = c.families;
  s.latent_correlation = c.latent_correlation;
  s.classes = c.classes;
  s.class_separation = c.class_separation;
  s.noise = c.noise;
  s.world_seed = stream(c.seed, "world");
  return s;
}

void validate_common(const BenchConfig& c) {
  if (c.classifiers.empty()) fail(ErrorKind::Config, "no classifiers configured");
  if (c.folds < 2) fail(ErrorKind::Config, "folds must be >= 2");
  if (c.components < 2) fail(ErrorKind::Config, "components must be >= 2");
  if (c.components > c.p) fail(ErrorKind::Config, "components must not exceed p");
  if (c.k_true == 0 || c.k_true > c.p) fail(ErrorKind::Config, "k_true must lie in [1, p]");
  for (std::size_t h : c.mlp.hidden)
    if (h == 0) fail(ErrorKind::Config, "mlp_hidden sizes must be positive");
  if (c.mlp.hidden.empty()) fail(ErrorKind::Config, "mlp_hidden must list at least one layer");
  if (c.mlp.batch == 0 || !(c.mlp.lr > 0.0)) fail(ErrorKind::Config, "mlp_batch and mlp_lr must be positive");
  if (c.logreg.c_grid.empty()) fail(ErrorKind::Config, "logreg_c_grid must not be empty");
  for (double v : c.logreg.c_grid)
    if (!(v > 0.0)) fail(ErrorKind::Config, "logreg_c_grid values must be positive");
}

void validate_task(const BenchConfig& c) {
  validate_common(c);
  if (c.classes < 2) fail(ErrorKind::Config, "classes must be >= 2");
  if (c.train_per_class < 2) fail(ErrorKind::Config, "train_per_class must be >= 2");
  if (c.test_per_class < 1) fail(ErrorKind::Config, "test_per_class must be >= 1");
  if (c.splits < 1) fail(ErrorKind::Config, "splits must be >= 1");
  if (c.n_rest < 2 * c.components) fail(ErrorKind::Config, "n_rest must be at least 2 * components");
}

ClassifierSpec classifier_spec(const BenchConfig& c, ClassifierKind kind) {
  ClassifierSpec spec;
  spec.kind = kind;
  spec.logreg = c.logreg;
  spec.mlp = c.mlp;
  return spec;
}

LabeledDataset relabeled(Matrix x, ClassId label) {
  std::vector<ClassId> labels(x.cols(), label);
  return LabeledDataset{std::move(x), std::move(labels), {label}};
}

std::optional<Comparison> compare(const std::vector<double>& a, const std::vector<double>& b) {
  try {
    return Comparison{paired_t_test(a, b)};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Degenerate || e.kind() == ErrorKind::Contract) return Comparison{};
    throw;
  }
}

// Per-split scores of every (method, classifier) pair on the task benchmark.
struct TaskRun {
  std::map<std::pair<Method, ClassifierKind>, std::vector<Scores>> scores;
  std::vector<std::pair<std::string, double>> runtime;
  std::vector<std::string> warnings;
};

struct Split {
  LabeledDataset train;
  LabeledDataset test;
};

std::vector<Split> make_splits(const BenchConfig& c, const LabeledDataset& pool) {
  std::vector<Split> splits;
  const auto members = pool.class_members();
  for (std::size_t s = 0; s < c.splits; ++s) {
    CounterRng rng(stream(c.seed, "split", s));
    std::vector<std::size_t> train, test;
    for (auto idx : members) {
      shuffle(std::span<std::size_t>(idx), rng);
      train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(c.train_per_class));
      test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(c.train_per_class), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    splits.push_back({pool.subset(train), pool.subset(test)});
  }
  return splits;
}

LabeledDataset make_fakes(Method m, const BenchConfig& c, const UnmixingModel& rest_unmixing, const LabeledDataset& train,
                          std::size_t k, std::size_t n_per_class, std::uint64_t seed) {
  switch (m) {
    case Method::None:
      return LabeledDataset{Matrix(train.features(), 0), {}, train.class_ids};
    case Method::CondIca: {
      const ConditionalIcaModel model = fit_conditional(rest_unmixing, train.x, train.labels, c.n_quantiles);
      return generate_conditional_dataset(model, n_per_class, seed);
    }
    case Method::Ica:
      return augment_ica(train, k, n_per_class, seed, c.ica);
    case Method::Cov:
      return augment_covariance(train, n_per_class, seed);
    case Method::IcaCov:
      return augment_ica_covariance(train, k, n_per_class, seed, c.ica);
  }
  fail(ErrorKind::Config, "unknown method");
}

TaskRun run_task(const BenchConfig& c, const std::vector<Split>& splits, const Matrix& rest, std::size_t k,
                 const std::vector<Method>& methods) {
  TaskRun run;
  const std::size_t n_per_class = c.n_fakes.value_or(2 * c.train_per_class);

  std::optional<UnmixingModel> rest_unmixing;
  double rest_seconds = 0.0;
  if (std::find(methods.begin(), methods.end(), Method::CondIca) != methods.end()) {
    const auto start = Clock::now();
    rest_unmixing = fastica_fit(rest, k, stream(c.seed, "rest-ica", k), c.ica);
    rest_seconds = seconds_since(start);
    if (!rest_unmixing->converged)
      run.warnings.push_back("rest ICA (k=" + std::to_string(k) + ") did not converge within " +
                             std::to_string(c.ica.max_iter) + " iterations");
  }

  for (Method m : methods) {
    const auto start = Clock::now();
    for (std::size_t s = 0; s < splits.size(); ++s) {
      const std::uint64_t seed = method_seed(c.seed, "augment", s, m);
      const LabeledDataset fakes =
          make_fakes(m, c, rest_unmixing ? *rest_unmixing : UnmixingModel{}, splits[s].train, k, n_per_class, seed);
      const LabeledDataset augmented = concat(splits[s].train, fakes);
      for (ClassifierKind kind : c.classifiers) {
        const Classifier model = fit_classifier(classifier_spec(c, kind), augmented, classifier_seed(seed, kind));
        run.scores[{m, kind}].push_back(evaluate(model, splits[s].test));
      }
    }
    double elapsed = seconds_since(start);
    if (m == Method::CondIca) elapsed += rest_seconds;
    run.runtime.emplace_back(to_string(m), elapsed);
  }
  return run;
}

ReportCell make_cell(Method m, ClassifierKind kind, const std::vector<Scores>& scores) {
  ReportCell cell;
  cell.method = to_string(m);
  cell.classifier = to_string(kind);
  std::vector<double> acc, pre, rec;
  for (const Scores& s : scores) {
    acc.push_back(s.accuracy);
    pre.push_back(s.macro_precision);
    rec.push_back(s.macro_recall);
  }
  cell.accuracy = summarize(std::move(acc));
  cell.precision = summarize(std::move(pre));
  cell.recall = summarize(std::move(rec));
  return cell;
}

}  // namespace

MetricSummary summarize(std::vector<double> values) {
  MetricSummary s;
  const double n = static_cast<double>(values.size());
  if (!values.empty()) {
    for (double v : values) s.mean += v;
    s.mean /= n;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.std = std::sqrt(ss / (n - 1.0));
    }
  }
  s.values = std::move(values);
  return s;
}

const ReportCell& BenchReport::cell(std::string_view method, std::string_view classifier) const {
  for (const ReportCell& c : cells)
    if (c.method == method && c.classifier == classifier) return c;
  fail(ErrorKind::Contract, "report has no cell " + std::string(method) + "/" + std::string(classifier));
}

SyntheticWorld make_world(const BenchConfig& c) {
  SyntheticSpec spec = world_spec(c);
  SyntheticWorld world;
  world.mixing = synthetic_mixing(spec);
  spec.n = c.n_rest;
  spec.seed = stream(c.seed, "rest");
  world.rest = gen_synthetic_rest(spec);
  spec.n = c.classes * (c.train_per_class + c.test_per_class);
  spec.seed = stream(c.seed, "task");
  world.task = gen_synthetic_task(spec);
  return world;
}

BenchReport exp_fake_vs_real(const BenchConfig& c) {
  validate_common(c);
  const std::vector<Method> methods =
      c.methods.empty() ? std::vector<Method>{Method::CondIca, Method::Ica, Method::Cov, Method::IcaCov} : c.methods;
  for (Method m : methods)
    if (m == Method::None) fail(ErrorKind::Config, "fake-vs-real: method 'none' generates no samples");
  const std::size_t n_fakes = c.n_fakes.value_or(c.n_rest);
  if (n_fakes == 0) fail(ErrorKind::Config, "fake-vs-real: n_fakes must be positive");
  if (c.n_rest < 2 * c.components) fail(ErrorKind::Config, "n_rest must be at least 2 * components");

  BenchReport report;
  report.experiment = "fake-vs-real";
  report.config = config_entries(c);

  SyntheticSpec spec = world_spec(c);
  spec.n = c.n_rest;
  spec.seed = stream(c.seed, "rest");
  const Matrix rest = gen_synthetic_rest(spec);
  const FitOptions fit{c.ica, c.n_quantiles};

  for (Method m : methods) {
    const auto start = Clock::now();
    const std::uint64_t seed = method_seed(c.seed, "fake-vs-real", 0, m);
    Matrix fakes;
    if (m == Method::CondIca) {
      const UnconditionalModel model = fit_unconditional(rest, c.components, derive_seed(seed, 1), fit);
      if (!model.unmixing.converged) report.warnings.push_back("condica: ICA did not converge");
      fakes = generate_unconditional(model, n_fakes, derive_seed(seed, 2));
    } else {
      const LabeledDataset real = relabeled(rest, 0);
      if (m == Method::Ica) fakes = augment_ica(real, c.components, n_fakes, derive_seed(seed, 3), c.ica).x;
      if (m == Method::Cov) fakes = augment_covariance(real, n_fakes, derive_seed(seed, 3)).x;
      if (m == Method::IcaCov) fakes = augment_ica_covariance(real, c.components, n_fakes, derive_seed(seed, 3), c.ica).x;
    }
    const LabeledDataset data = concat(relabeled(rest, 0), relabeled(std::move(fakes), 1));
    for (ClassifierKind kind : c.classifiers) {
      const FitReport fr = kfold_cv(data, c.folds, classifier_spec(c, kind), classifier_seed(seed, kind));
      if (!fr.stratified) report.warnings.push_back(std::string(to_string(m)) + ": unstratified folds");
      report.cells.push_back(make_cell(m, kind, fr.folds));
    }
    report.runtime_seconds.emplace_back(to_string(m), seconds_since(start));
  }
  return report;
}

BenchReport exp_augmentation_benchmark(const BenchConfig& c) {
  validate_task(c);
  const std::vector<Method> methods =
      c.methods.empty()
          ? std::vector<Method>{Method::None, Method::CondIca, Method::Ica, Method::Cov, Method::IcaCov}
          : c.methods;

  BenchReport report;
  report.experiment = "augment";
  report.config = config_entries(c);

  const SyntheticWorld world = make_world(c);
  const std::vector<Split> splits = make_splits(c, world.task);
  TaskRun run = run_task(c, splits, world.rest, c.components, methods);
  report.warnings = std::move(run.warnings);
  report.runtime_seconds = std::move(run.runtime);

  const bool has_none = std::find(methods.begin(), methods.end(), Method::None) != methods.end();
  const bool has_condica = std::find(methods.begin(), methods.end(), Method::CondIca) != methods.end();
  for (Method m : methods) {
    for (ClassifierKind kind : c.classifiers) {
      ReportCell cell = make_cell(m, kind, run.scores.at({m, kind}));
      auto accuracies = [&](Method other) {
        std::vector<double> out;
        for (const Scores& s : run.scores.at({other, kind})) out.push_back(s.accuracy);
        return out;
      };
      if (has_none) cell.vs_none = compare(cell.accuracy.values, accuracies(Method::None));
      if (has_condica) cell.vs_condica = compare(cell.accuracy.values, accuracies(Method::CondIca));
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

SweepReport exp_sensitivity_k(const BenchConfig& c) {
  BenchConfig base = c;
  if (c.k_grid.empty()) fail(ErrorKind::Config, "k_grid must not be empty");
  base.components = std::max<std::size_t>(2, std::min(c.p, c.k_grid.front()));
  validate_task(base);
  const std::vector<Method> methods = c.methods.empty() ? std::vector<Method>{Method::CondIca} : c.methods;

  SweepReport report;
  report.config = config_entries(c);
  const SyntheticWorld world = make_world(c);
  const std::vector<Split> splits = make_splits(c, world.task);

  for (std::size_t k : c.k_grid) {
    for (Method m : methods) {
      const auto start = Clock::now();
      try {
        if (k < 2) fail(ErrorKind::Contract, "k must be >= 2");
        if (k > c.p) fail(ErrorKind::RankDeficient, "k exceeds the feature count");
        const TaskRun run = run_task(c, splits, world.rest, k, {m});
        for (ClassifierKind kind : c.classifiers) {
          std::vector<double> acc;
          for (const Scores& s : run.scores.at({m, kind})) acc.push_back(s.accuracy);
          report.rows.push_back({k, to_string(m), to_string(kind), summarize(std::move(acc)), {}});
        }
      } catch (const Error& e) {
        for (ClassifierKind kind : c.classifiers)
          report.rows.push_back({k, to_string(m), to_string(kind), std::nullopt, e.what()});
      }
      report.runtime_seconds.emplace_back(std::string(to_string(m)) + "@k=" + std::to_string(k),
                                          seconds_since(start));
    }
  }
  return report;
}

}  // namespace cica
