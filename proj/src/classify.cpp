#include "cica/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <type_traits>

#include <boost/math/special_functions/beta.hpp>

#include "cica/error.hpp"
#include "cica/gaussian.hpp"
#include "cica/random.hpp"

namespace cica {

namespace {

std::vector<std::size_t> class_positions(const LabeledDataset& data) {
  std::vector<std::size_t> targets(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) targets[j] = data.class_index(data.labels[j]);
  return targets;
}

void require_classes(const LabeledDataset& data, const char* op) {
  if (data.class_ids.size() < 2) fail(ErrorKind::InsufficientSamples, std::string(op) + ": need at least 2 classes");
  for (std::size_t c = 0; c < data.class_ids.size(); ++c)
    if (std::find(data.labels.begin(), data.labels.end(), data.class_ids[c]) == data.labels.end())
      fail(ErrorKind::MissingClass, std::string(op) + ": class " + std::to_string(data.class_ids[c]) + " has no samples");
}

std::vector<ClassId> argmax_columns(const Matrix& scores, const std::vector<ClassId>& class_ids) {
  std::vector<ClassId> out(scores.cols());
  for (std::size_t j = 0; j < scores.cols(); ++j) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.rows(); ++c)
      if (scores(c, j) > scores(best, j)) best = c;
    out[j] = class_ids[best];
  }
  return out;
}

Matrix affine(const Matrix& w, std::span<const double> b, const Matrix& x) {
  Matrix z = w * x;
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (double& v : z.row(i)) v += b[i];
  return z;
}

// Replaces the logits in z (C x n) by softmax probabilities and returns the
// summed cross-entropy against `targets`.
double softmax_cross_entropy(Matrix& z, std::span<const std::size_t> targets) {
  const std::size_t classes = z.rows();
  double total = 0.0;
  for (std::size_t j = 0; j < z.cols(); ++j) {
    double top = z(0, j);
    for (std::size_t c = 1; c < classes; ++c) top = std::max(top, z(c, j));
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z(c, j) - top);
    const double log_norm = top + std::log(sum);
    total += log_norm - z(targets[j], j);
    for (std::size_t c = 0; c < classes; ++c) z(c, j) = std::exp(z(c, j) - log_norm);
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Metrics

Scores score(std::span<const ClassId> truth, std::span<const ClassId> predicted) {
  require(truth.size() == predicted.size(), "score: label lists differ in length");
  require(!truth.empty(), "score: no samples");
  std::vector<ClassId> all(truth.begin(), truth.end());
  all.insert(all.end(), predicted.begin(), predicted.end());
  const std::vector<ClassId> classes = unique_sorted(all);
  const std::size_t nc = classes.size();

  std::vector<double> tp(nc, 0.0), n_pred(nc, 0.0), n_true(nc, 0.0);
  std::size_t correct = 0;
  auto pos = [&](ClassId id) {
    return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), id) - classes.begin());
  };
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const std::size_t t = pos(truth[j]);
    const std::size_t p = pos(predicted[j]);
    n_true[t] += 1;
    n_pred[p] += 1;
    if (t == p) {
      tp[t] += 1;
      ++correct;
    }
  }
  Scores s;
  s.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (std::size_t c = 0; c < nc; ++c) {
    s.macro_precision += n_pred[c] > 0 ? tp[c] / n_pred[c] : 0.0;
    s.macro_recall += n_true[c] > 0 ? tp[c] / n_true[c] : 0.0;
  }
  s.macro_precision /= static_cast<double>(nc);
  s.macro_recall /= static_cast<double>(nc);
  return s;
}

// ---------------------------------------------------------------------------
// LDA

LdaModel lda_fit(const LabeledDataset& data) {
  require_classes(data, "lda_fit");
  for (const auto& m : data.class_members())
    if (m.size() < 2) fail(ErrorKind::InsufficientSamples, "lda_fit: every class needs at least 2 samples");

  const std::size_t p = data.features();
  const std::vector<Vector> means = fit_class_means(data.x, data.labels, data.class_ids);
  Matrix centered = data.x;
  for (std::size_t j = 0; j < centered.cols(); ++j) {
    const Vector& mu = means[data.class_index(data.labels[j])];
    for (std::size_t i = 0; i < p; ++i) centered(i, j) -= mu[i];
  }
  const Matrix cov = ledoit_wolf(centered).sigma_shrunk;

  Matrix chol;
  try {
    chol = cholesky(cov, 0.0);
  } catch (const DefinitenessError&) {
    const double jitter = 1e-10 * cov.trace() / static_cast<double>(p);
    try {
      if (!(jitter > 0.0)) throw DefinitenessError(0, "zero covariance");
      chol = cholesky(cov, jitter);
    } catch (const DefinitenessError& e) {
      fail(ErrorKind::Numerical, std::string("lda_fit: shrunk covariance is singular after jitter (") + e.what() + ")");
    }
  }

  LdaModel model;
  model.class_ids = data.class_ids;
  model.coef = Matrix(means.size(), p);
  model.intercept.resize(means.size());
  const auto members = data.class_members();
  for (std::size_t c = 0; c < means.size(); ++c) {
    const Vector solved = cholesky_solve(chol, means[c]);
    for (std::size_t i = 0; i < p; ++i) model.coef(c, i) = solved[i];
    const double prior = static_cast<double>(members[c].size()) / static_cast<double>(data.size());
    model.intercept[c] = -0.5 * dot(means[c], solved) + std::log(prior);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Logistic regression

double logreg_objective(const Matrix& x, std::span<const std::size_t> targets, double c, const Matrix& weights,
                        std::span<const double> bias, Matrix* grad_weights, Vector* grad_bias) {
  const std::size_t n = x.cols();
  require(n == targets.size() && n > 0, "logreg_objective: one target per sample required");
  require(weights.cols() == x.rows() && bias.size() == weights.rows(), "logreg_objective: parameter shape mismatch");
  require(c > 0.0, "logreg_objective: c must be positive");
  const double inv_n = 1.0 / static_cast<double>(n);
  const double penalty = 1.0 / (c * static_cast<double>(n));

  Matrix prob = affine(weights, bias, x);
  const double ce = softmax_cross_entropy(prob, targets);
  const double loss = ce * inv_n + 0.5 * penalty * dot(weights.values(), weights.values());

  if (grad_weights != nullptr || grad_bias != nullptr) {
    for (std::size_t j = 0; j < n; ++j) prob(targets[j], j) -= 1.0;
    prob *= inv_n;
    if (grad_weights != nullptr) {
      *grad_weights = matmul_nt(prob, x);
      for (std::size_t i = 0; i < weights.size(); ++i) grad_weights->data()[i] += penalty * weights.data()[i];
    }
    if (grad_bias != nullptr) {
      grad_bias->assign(prob.rows(), 0.0);
      for (std::size_t k = 0; k < prob.rows(); ++k)
        for (double v : prob.row(k)) (*grad_bias)[k] += v;
    }
  }
  return loss;
}

LogRegModel logreg_fit_fixed(const LabeledDataset& data, double c, const LogRegOptions& options) {
  require_classes(data, "logreg_fit");
  const std::size_t classes = data.class_ids.size();
  const std::size_t p = data.features();
  const std::size_t nw = classes * p;
  const std::size_t dim = nw + classes;
  const std::vector<std::size_t> targets = class_positions(data);

  Matrix w(classes, p);
  Vector b(classes, 0.0);
  Matrix gw;
  Vector gb;
  auto eval = [&](const Vector& theta, Vector& grad) {
    std::copy(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(nw), w.data());
    std::copy(theta.begin() + static_cast<std::ptrdiff_t>(nw), theta.end(), b.begin());
    const double f = logreg_objective(data.x, targets, c, w, b, &gw, &gb);
    grad.resize(dim);
    std::copy(gw.values().begin(), gw.values().end(), grad.begin());
    std::copy(gb.begin(), gb.end(), grad.begin() + static_cast<std::ptrdiff_t>(nw));
    return f;
  };
  auto max_abs = [](const Vector& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };

  constexpr std::size_t kMemory = 10;
  std::vector<Vector> s_hist, y_hist;
  std::vector<double> rho_hist;
  Vector theta(dim, 0.0), grad, next(dim), next_grad, dir(dim);
  double f = eval(theta, grad);
  std::size_t iter = 0;
  std::size_t rising = 0;

  for (; iter < options.max_iter && max_abs(grad) >= options.grad_tol; ++iter) {
    // Two-loop recursion.
    dir = grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t h = s_hist.size(); h-- > 0;) {
      alpha[h] = rho_hist[h] * dot(s_hist[h], dir);
      for (std::size_t i = 0; i < dim; ++i) dir[i] -= alpha[h] * y_hist[h][i];
    }
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : dir) v *= gamma;
    } else {
      const double scale = 1.0 / std::max(1.0, max_abs(grad));
      for (double& v : dir) v *= scale;
    }
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * dot(y_hist[h], dir);
      for (std::size_t i = 0; i < dim; ++i) dir[i] += (alpha[h] - beta) * s_hist[h][i];
    }
    for (double& v : dir) v = -v;
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
      slope = dot(grad, dir);
    }

    double step = 1.0;
    double f_next = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      for (std::size_t i = 0; i < dim; ++i) next[i] = theta[i] + step * dir[i];
      f_next = eval(next, next_grad);
      if (std::isfinite(f_next) && f_next <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no further decrease representable at this precision
    if (!std::isfinite(f_next)) fail(ErrorKind::Numerical, "logreg_fit: non-finite objective");
    rising = f_next > f ? rising + 1 : 0;
    if (rising >= 10) fail(ErrorKind::Numerical, "logreg_fit: objective increased over 10 consecutive steps");

    Vector s(dim), y(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      s[i] = next[i] - theta[i];
      y[i] = next_grad[i] - grad[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (s_hist.size() == kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    theta.swap(next);
    grad.swap(next_grad);
    f = f_next;
  }

  LogRegModel model;
  model.class_ids = data.class_ids;
  model.weights = Matrix(classes, p, Vector(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(nw)));
  model.bias.assign(theta.begin() + static_cast<std::ptrdiff_t>(nw), theta.end());
  model.c = c;
  model.iterations = iter;
  return model;
}

LogRegModel logreg_fit(const LabeledDataset& data, const LogRegOptions& options, std::uint64_t seed) {
  require_classes(data, "logreg_fit");
  if (options.c_grid.empty()) fail(ErrorKind::Config, "logreg_fit: empty regularization grid");
  for (double c : options.c_grid)
    if (!(c > 0.0)) fail(ErrorKind::Config, "logreg_fit: inverse regularization strengths must be positive");

  std::vector<double> grid = options.c_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::size_t smallest = data.size();
  for (const auto& m : data.class_members()) smallest = std::min(smallest, m.size());
  const std::size_t folds = std::min(options.cv_folds, smallest);

  double chosen = grid.back();
  if (grid.size() > 1 && folds >= 2) {
    const std::vector<std::size_t> assign = kfold_assign(data.labels, folds, seed);
    double best = -1.0;
    for (double c : grid) {
      std::size_t correct = 0;
      for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train, test;
        for (std::size_t j = 0; j < assign.size(); ++j) (assign[j] == f ? test : train).push_back(j);
        const LabeledDataset tr = data.subset(train);
        const LogRegModel m = logreg_fit_fixed(tr, c, options);
        const std::vector<ClassId> pred = predict(Classifier{m}, select_columns(data.x, test));
        for (std::size_t t = 0; t < test.size(); ++t) correct += pred[t] == data.labels[test[t]] ? 1 : 0;
      }
      const double acc = static_cast<double>(correct) / static_cast<double>(data.size());
      if (acc > best) {
        best = acc;
        chosen = c;
      }
    }
  }
  return logreg_fit_fixed(data, chosen, options);
}

// ---------------------------------------------------------------------------
// MLP

double mlp_objective(const std::vector<DenseLayer>& layers, const Matrix& x, std::span<const std::size_t> targets,
                     double l2, std::vector<DenseLayer>* grads) {
  const std::size_t n = x.cols();
  require(!layers.empty() && n == targets.size() && n > 0, "mlp_objective: shape mismatch");
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<Matrix> acts;
  acts.reserve(layers.size());
  acts.push_back(x);
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    Matrix h = affine(layers[l].weights, layers[l].bias, acts.back());
    for (double& v : h.values()) v = v > 0.0 ? v : 0.0;
    acts.push_back(std::move(h));
  }
  Matrix out = affine(layers.back().weights, layers.back().bias, acts.back());
  double loss = softmax_cross_entropy(out, targets) * inv_n;
  double sq = 0.0;
  for (const DenseLayer& layer : layers) sq += dot(layer.weights.values(), layer.weights.values());
  loss += 0.5 * l2 * inv_n * sq;

  if (grads != nullptr) {
    grads->resize(layers.size());
    for (std::size_t j = 0; j < n; ++j) out(targets[j], j) -= 1.0;
    out *= inv_n;
    Matrix delta = std::move(out);
    for (std::size_t l = layers.size(); l-- > 0;) {
      DenseLayer& g = (*grads)[l];
      g.weights = matmul_nt(delta, acts[l]);
      for (std::size_t i = 0; i < g.weights.size(); ++i) g.weights.data()[i] += l2 * inv_n * layers[l].weights.data()[i];
      g.bias.assign(delta.rows(), 0.0);
      for (std::size_t i = 0; i < delta.rows(); ++i)
        for (double v : delta.row(i)) g.bias[i] += v;
      if (l == 0) break;
      Matrix back = matmul_tn(layers[l].weights, delta);
      const Matrix& a = acts[l];
      for (std::size_t i = 0; i < back.size(); ++i)
        if (a.data()[i] <= 0.0) back.data()[i] = 0.0;
      delta = std::move(back);
    }
  }
  return loss;
}

MlpModel mlp_fit(const LabeledDataset& data, const MlpOptions& options, std::uint64_t seed) {
  require_classes(data, "mlp_fit");
  require(!options.hidden.empty(), "mlp_fit: at least one hidden layer required");
  for (std::size_t h : options.hidden) require(h > 0, "mlp_fit: hidden layer sizes must be positive");
  require(options.batch > 0 && options.lr > 0.0 && options.l2 >= 0.0, "mlp_fit: invalid optimizer settings");

  MlpModel model;
  model.class_ids = data.class_ids;
  std::vector<std::size_t> sizes{data.features()};
  sizes.insert(sizes.end(), options.hidden.begin(), options.hidden.end());
  sizes.push_back(data.class_ids.size());

  CounterRng init(derive_seed(seed, 0));
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer{Matrix(sizes[l + 1], sizes[l]), Vector(sizes[l + 1], 0.0)};
    const double scale = std::sqrt(2.0 / static_cast<double>(sizes[l]));
    for (double& v : layer.weights.values()) v = scale * init.normal();
    model.layers.push_back(std::move(layer));
  }

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::vector<DenseLayer> m1, m2;
  for (const DenseLayer& l : model.layers) {
    m1.push_back({Matrix(l.weights.rows(), l.weights.cols()), Vector(l.bias.size(), 0.0)});
    m2.push_back(m1.back());
  }
  auto adam = [&](double& param, double& first, double& second, double g, double lr_t) {
    first = kBeta1 * first + (1.0 - kBeta1) * g;
    second = kBeta2 * second + (1.0 - kBeta2) * g * g;
    param -= lr_t * first / (std::sqrt(second) + kEps);
  };

  const std::vector<std::size_t> targets = class_positions(data);
  std::vector<std::size_t> order(data.size());
  std::vector<DenseLayer> grads;
  std::size_t step = 0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 0; epoch < options.max_epochs && step < options.max_steps; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng shuffler(derive_seed(seed, 1, epoch));
    shuffle(std::span<std::size_t>(order), shuffler);

    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size() && step < options.max_steps; start += options.batch) {
      const std::size_t stop = std::min(order.size(), start + options.batch);
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      std::vector<std::size_t> batch_targets(idx.size());
      for (std::size_t t = 0; t < idx.size(); ++t) batch_targets[t] = targets[idx[t]];
      const double loss = mlp_objective(model.layers, select_columns(data.x, idx), batch_targets, options.l2, &grads);
      if (!std::isfinite(loss))
        fail(ErrorKind::Numerical, "mlp_fit: non-finite loss in epoch " + std::to_string(epoch));
      epoch_loss += loss * static_cast<double>(idx.size());
      seen += idx.size();

      ++step;
      const double lr_t = options.lr * std::sqrt(1.0 - std::pow(kBeta2, static_cast<double>(step))) /
                          (1.0 - std::pow(kBeta1, static_cast<double>(step)));
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        DenseLayer& layer = model.layers[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i)
          adam(layer.weights.data()[i], m1[l].weights.data()[i], m2[l].weights.data()[i], grads[l].weights.data()[i],
               lr_t);
        for (std::size_t i = 0; i < layer.bias.size(); ++i)
          adam(layer.bias[i], m1[l].bias[i], m2[l].bias[i], grads[l].bias[i], lr_t);
      }
    }
    epoch_loss /= static_cast<double>(seen);
    model.epoch_losses.push_back(epoch_loss);
    if (epoch_loss > best - options.tol) {
      if (++stale >= options.patience) break;
    } else {
      stale = 0;
    }
    best = std::min(best, epoch_loss);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Common interface

const char* to_string(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::Lda: return "lda";
    case ClassifierKind::LogReg: return "logreg";
    case ClassifierKind::Mlp: return "mlp";
  }
  return "unknown";
}

ClassifierKind parse_classifier(std::string_view name) {
  if (name == "lda") return ClassifierKind::Lda;
  if (name == "logreg") return ClassifierKind::LogReg;
  if (name == "mlp") return ClassifierKind::Mlp;
  fail(ErrorKind::Config, "unknown classifier '" + std::string(name) + "' (expected lda, logreg or mlp)");
}

Classifier fit_classifier(const ClassifierSpec& spec, const LabeledDataset& data, std::uint64_t seed) {
  switch (spec.kind) {
    case ClassifierKind::Lda: return lda_fit(data);
    case ClassifierKind::LogReg: return logreg_fit(data, spec.logreg, seed);
    case ClassifierKind::Mlp: return mlp_fit(data, spec.mlp, seed);
  }
  fail(ErrorKind::Config, "fit_classifier: unknown classifier kind");
}

std::vector<ClassId> predict(const Classifier& model, const Matrix& x) {
  return std::visit(
      [&](const auto& m) -> std::vector<ClassId> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LdaModel>) {
          require(x.rows() == m.coef.cols(), "predict: feature count mismatch");
          return argmax_columns(affine(m.coef, m.intercept, x), m.class_ids);
        } else if constexpr (std::is_same_v<T, LogRegModel>) {
          require(x.rows() == m.weights.cols(), "predict: feature count mismatch");
          return argmax_columns(affine(m.weights, m.bias, x), m.class_ids);
        } else {
          require(x.rows() == m.layers.front().weights.cols(), "predict: feature count mismatch");
          Matrix h = x;
          for (std::size_t l = 0; l < m.layers.size(); ++l) {
            h = affine(m.layers[l].weights, m.layers[l].bias, h);
            if (l + 1 < m.layers.size())
              for (double& v : h.values()) v = v > 0.0 ? v : 0.0;
          }
          return argmax_columns(h, m.class_ids);
        }
      },
      model);
}

Scores evaluate(const Classifier& model, const LabeledDataset& test) {
  return score(test.labels, predict(model, test.x));
}

std::vector<std::size_t> kfold_assign(std::span<const ClassId> labels, std::size_t folds, std::uint64_t seed,
                                      bool* stratified) {
  require(folds >= 2, "kfold: need at least 2 folds");
  require(labels.size() >= folds, "kfold: fewer samples than folds");
  const std::vector<ClassId> ids = unique_sorted(labels);
  std::vector<std::vector<std::size_t>> members(ids.size());
  for (std::size_t j = 0; j < labels.size(); ++j)
    members[static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), labels[j]) - ids.begin())].push_back(j);
  const bool strat = std::all_of(members.begin(), members.end(), [&](const auto& m) { return m.size() >= folds; });
  if (stratified != nullptr) *stratified = strat;

  std::vector<std::size_t> assign(labels.size());
  if (!strat) {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    CounterRng rng(derive_seed(seed, 0));
    shuffle(std::span<std::size_t>(all), rng);
    for (std::size_t i = 0; i < all.size(); ++i) assign[all[i]] = i % folds;
    return assign;
  }
  std::size_t offset = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    CounterRng rng(derive_seed(seed, 1, c));
    shuffle(std::span<std::size_t>(members[c]), rng);
    for (std::size_t i = 0; i < members[c].size(); ++i) assign[members[c][i]] = (offset + i) % folds;
    offset += members[c].size();
  }
  return assign;
}

FitReport kfold_cv(const LabeledDataset& data, std::size_t folds, const ClassifierSpec& spec, std::uint64_t seed) {
  FitReport report;
  const std::vector<std::size_t> assign = kfold_assign(data.labels, folds, derive_seed(seed, 0), &report.stratified);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t j = 0; j < assign.size(); ++j) (assign[j] == f ? test : train).push_back(j);
    const LabeledDataset tr = data.subset(train);
    const LabeledDataset train_set = LabeledDataset::make(tr.x, tr.labels);
    const Classifier model = fit_classifier(spec, train_set, derive_seed(seed, 1, f));
    const Scores s = evaluate(model, data.subset(test));
    report.folds.push_back(s);
    report.mean.accuracy += s.accuracy / static_cast<double>(folds);
    report.mean.macro_precision += s.macro_precision / static_cast<double>(folds);
    report.mean.macro_recall += s.macro_recall / static_cast<double>(folds);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Paired t-test

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0.0)) fail(ErrorKind::Domain, "student_t_two_sided: degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return boost::math::ibeta(0.5 * dof, 0.5, dof / (dof + t * t));
}

TTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "paired_t_test: samples differ in length");
  require(a.size() >= 2, "paired_t_test: need at least 2 pairs");
  const std::size_t n = a.size();
  Vector d(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    scale = std::max(scale, std::abs(d[i]));
  }
  const double spread = *std::max_element(d.begin(), d.end()) - *std::min_element(d.begin(), d.end());
  if (spread <= 4.0 * std::numeric_limits<double>::epsilon() * scale)
    fail(ErrorKind::Degenerate, "paired_t_test: all differences are identical; the statistic is undefined");

  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTest out;
  out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  out.p = student_t_two_sided(out.t, static_cast<double>(n - 1));
  return out;
}

}  // namespace cica
