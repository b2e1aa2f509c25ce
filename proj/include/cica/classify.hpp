#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "cica/dataset.hpp"
#include "cica/linalg.hpp"

namespace cica {

struct Scores {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
};

/// Accuracy plus macro-averaged precision and recall. Classes are the union of
/// true and predicted labels; a class never predicted has precision 0.
Scores score(std::span<const ClassId> truth, std::span<const ClassId> predicted);

struct FitReport {
  Scores mean;
  std::vector<Scores> folds;
  bool stratified = true;  // false when a class had fewer samples than folds
};

// ---------------------------------------------------------------- LDA

struct LdaModel {
  std::vector<ClassId> class_ids;
  Matrix coef;       // C x p, rows are Lambda^{-1} mu_c
  Vector intercept;  // -1/2 mu_c^T Lambda^{-1} mu_c + log prior_c
};

/// Shared Ledoit-Wolf covariance of the class-centered data.
LdaModel lda_fit(const LabeledDataset& data);

// ---------------------------------------------------------------- LogReg

struct LogRegOptions {
  std::vector<double> c_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  std::size_t cv_folds = 5;
  std::size_t max_iter = 20000;
  double grad_tol = 1e-6;
};

struct LogRegModel {
  std::vector<ClassId> class_ids;
  Matrix weights;  // C x p
  Vector bias;     // C
  double c = 1.0;  // selected inverse regularization strength
  std::size_t iterations = 0;
};

/// Objective (1/n) sum CE + ||W||^2 / (2 c n) of a multinomial softmax model
/// with unpenalized bias. `targets[j]` is the class position of column j.
/// Gradients are written when the output pointers are non-null.
double logreg_objective(const Matrix& x, std::span<const std::size_t> targets, double c, const Matrix& weights,
                        std::span<const double> bias, Matrix* grad_weights, Vector* grad_bias);

/// Fits at a fixed c with L-BFGS and a backtracking Armijo search.
LogRegModel logreg_fit_fixed(const LabeledDataset& data, double c, const LogRegOptions& options = {});

/// Selects c from the grid by stratified internal CV accuracy (ties go to the
/// smaller c), then refits on all of `data`. When the smallest class is too
/// small for two folds the largest c in the grid is used.
LogRegModel logreg_fit(const LabeledDataset& data, const LogRegOptions& options, std::uint64_t seed);

// ---------------------------------------------------------------- MLP

struct MlpOptions {
  std::vector<std::size_t> hidden{64, 64};
  double lr = 1e-4;
  std::size_t batch = 32;
  double l2 = 1e-5;
  std::size_t max_steps = 20000;
  std::size_t max_epochs = 200;
  // Early stop when the epoch loss fails to improve by `tol` this many times.
  double tol = 1e-4;
  std::size_t patience = 10;
};

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;
};

struct MlpModel {
  std::vector<ClassId> class_ids;
  std::vector<DenseLayer> layers;  // ReLU between layers, softmax output
  std::vector<double> epoch_losses;
};

/// Mean softmax cross-entropy over the columns of x plus (l2 / 2n) times the
/// squared weight norm. Fills `grads` (same shapes as `layers`) when non-null.
double mlp_objective(const std::vector<DenseLayer>& layers, const Matrix& x, std::span<const std::size_t> targets,
                     double l2, std::vector<DenseLayer>* grads);

/// Adam (beta1 0.9, beta2 0.999, eps 1e-8) on seeded shuffled minibatches.
MlpModel mlp_fit(const LabeledDataset& data, const MlpOptions& options, std::uint64_t seed);

// ---------------------------------------------------------------- common

enum class ClassifierKind { Lda, LogReg, Mlp };

const char* to_string(ClassifierKind kind) noexcept;
/// Parses "lda", "logreg" or "mlp"; throws ErrorKind::Config otherwise.
ClassifierKind parse_classifier(std::string_view name);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Lda;
  LogRegOptions logreg;
  MlpOptions mlp;
};

using Classifier = std::variant<LdaModel, LogRegModel, MlpModel>;

Classifier fit_classifier(const ClassifierSpec& spec, const LabeledDataset& data, std::uint64_t seed);

/// Argmax of the class scores; ties go to the lowest class id.
std::vector<ClassId> predict(const Classifier& model, const Matrix& x);

Scores evaluate(const Classifier& model, const LabeledDataset& test);

/// Seeded fold assignment (fold index per sample). Stratified round-robin
/// within each class unless some class has fewer than `folds` samples.
std::vector<std::size_t> kfold_assign(std::span<const ClassId> labels, std::size_t folds, std::uint64_t seed,
                                      bool* stratified = nullptr);

FitReport kfold_cv(const LabeledDataset& data, std::size_t folds, const ClassifierSpec& spec, std::uint64_t seed);

struct TTest {
  double t = 0.0;
  double p = 1.0;  // two-sided
};

/// Paired t-test on a - b with n - 1 degrees of freedom. Throws
/// ErrorKind::Degenerate when all differences coincide.
TTest paired_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability of Student's t with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

}  // namespace cica
