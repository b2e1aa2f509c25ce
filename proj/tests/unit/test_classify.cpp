#include <map>

#include "doctest.h"

#include "cica/classify.hpp"
#include "cica/error.hpp"
#include "oracles.hpp"

using namespace cica;

namespace {

LabeledDataset gaussian_classes(std::size_t p, std::size_t n, std::size_t classes, double shift, std::uint64_t seed) {
  Matrix x = oracle::random_matrix(p, n, seed);
  std::vector<ClassId> labels(n);
  for (std::size_t j = 0; j < n; ++j) {
    labels[j] = static_cast<ClassId>(j % classes);
    x(j % classes % p, j) += shift;
  }
  return LabeledDataset::make(std::move(x), std::move(labels));
}

LabeledDataset two_gaussians(std::size_t n, std::uint64_t seed) {
  Matrix x = oracle::random_matrix(2, n, seed);
  std::vector<ClassId> labels(n);
  for (std::size_t j = 0; j < n; ++j) {
    labels[j] = static_cast<ClassId>(j % 2);
    x(0, j) += labels[j] ? 1.0 : -1.0;
  }
  return LabeledDataset::make(std::move(x), std::move(labels));
}

LabeledDataset xor_clusters(std::size_t n, std::uint64_t seed) {
  Matrix x = oracle::random_matrix(2, n, seed, 0.25);
  std::vector<ClassId> labels(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = (j % 4) & 1 ? 1.0 : -1.0;
    const double b = (j % 4) & 2 ? 1.0 : -1.0;
    x(0, j) += a;
    x(1, j) += b;
    labels[j] = a * b > 0 ? 1 : 0;
  }
  return LabeledDataset::make(std::move(x), std::move(labels));
}

std::vector<std::size_t> positions(const LabeledDataset& d) {
  std::vector<std::size_t> t(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) t[j] = d.class_index(d.labels[j]);
  return t;
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max(scale, std::abs(numeric[i]));
  }
  return diff / std::max(scale, 1e-12);
}

double majority_rate(const LabeledDataset& d) {
  std::map<ClassId, std::size_t> counts;
  for (ClassId c : d.labels) ++counts[c];
  std::size_t best = 0;
  for (const auto& [c, n] : counts) best = std::max(best, n);
  return double(best) / double(d.size());
}

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Contract;
}

ClassifierSpec spec_for(ClassifierKind kind) {
  ClassifierSpec s;
  s.kind = kind;
  s.mlp.hidden = {16, 16};
  s.mlp.lr = 1e-3;
  s.mlp.max_epochs = 50;
  return s;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("confusion-matrix metrics match the hand enumeration") {
    // Rows are true classes: [[2,0,0],[1,1,0],[0,0,2]].
    const std::vector<ClassId> truth{0, 0, 1, 1, 2, 2};
    const std::vector<ClassId> pred{0, 0, 0, 1, 2, 2};
    const Scores s = score(truth, pred);
    CHECK(s.accuracy == 5.0 / 6.0);
    CHECK(std::abs(s.macro_precision - 8.0 / 9.0) <= 1e-15);
    CHECK(std::abs(s.macro_recall - 5.0 / 6.0) <= 1e-15);
  }

  TEST_CASE("perfect and constant predictors") {
    const std::vector<ClassId> truth{0, 1, 2, 0, 1, 2, 0, 1, 2};
    const Scores perfect = score(truth, truth);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.macro_precision == 1.0);
    CHECK(perfect.macro_recall == 1.0);
    const std::vector<ClassId> constant(9, 1);
    const Scores c = score(truth, constant);
    CHECK(c.accuracy == doctest::Approx(1.0 / 3.0));
    CHECK(c.macro_precision == doctest::Approx(1.0 / 9.0));  // classes 0 and 2 never predicted
    CHECK(c.macro_recall == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("a predicted label outside the truth counts as a class") {
    const std::vector<ClassId> truth{0, 0, 1, 1};
    const std::vector<ClassId> pred{0, 5, 1, 1};
    const Scores s = score(truth, pred);
    CHECK(s.accuracy == 0.75);
    CHECK(s.macro_recall == doctest::Approx((0.5 + 1.0 + 0.0) / 3.0));
    CHECK(s.macro_precision == doctest::Approx((1.0 + 1.0 + 0.0) / 3.0));
  }

  TEST_CASE("LDA approaches the Bayes rate") {
    const LabeledDataset train = two_gaussians(2000, 1);
    const LabeledDataset test = two_gaussians(20000, 2);
    const Classifier m = fit_classifier(spec_for(ClassifierKind::Lda), train, 0);
    CHECK(std::abs(evaluate(m, test).accuracy - oracle::normal_cdf_series(1.0)) < 0.03);
  }

  TEST_CASE("LDA assigns a class mean to its class") {
    const LabeledDataset train = gaussian_classes(3, 300, 3, 3.0, 3);
    const LdaModel m = lda_fit(train);
    const auto members = train.class_members();
    for (std::size_t c = 0; c < 3; ++c) {
      const Matrix mean = Matrix::column_vector(row_means(select_columns(train.x, members[c])));
      CHECK(predict(Classifier{m}, mean)[0] == train.class_ids[c]);
    }
  }

  TEST_CASE("LDA requires two classes") {
    const LabeledDataset one = LabeledDataset::make(oracle::random_matrix(2, 10, 4), std::vector<ClassId>(10, 0));
    CHECK_THROWS_AS(lda_fit(one), Error);
  }

  TEST_CASE("accuracy is invariant under consistent relabeling") {
    const LabeledDataset train = gaussian_classes(4, 200, 3, 1.5, 5);
    const LabeledDataset test = gaussian_classes(4, 300, 3, 1.5, 6);
    auto relabel = [](LabeledDataset d) {
      for (ClassId& c : d.labels) c = 10 - 3 * c;  // 0 -> 10, 1 -> 7, 2 -> 4 (order reversed)
      return LabeledDataset::make(d.x, d.labels);
    };
    for (ClassifierKind kind : {ClassifierKind::Lda, ClassifierKind::LogReg}) {
      const ClassifierSpec spec = spec_for(kind);
      const Scores a = evaluate(fit_classifier(spec, train, 7), test);
      const Scores b = evaluate(fit_classifier(spec, relabel(train), 7), relabel(test));
      CHECK(a.accuracy == doctest::Approx(b.accuracy).epsilon(1e-12));
      CHECK(a.macro_precision == doctest::Approx(b.macro_precision).epsilon(1e-12));
      CHECK(a.macro_recall == doctest::Approx(b.macro_recall).epsilon(1e-12));
    }
  }

  TEST_CASE("logreg gradient matches central differences") {
    const LabeledDataset d = gaussian_classes(4, 30, 3, 1.0, 8);
    const std::vector<std::size_t> t = positions(d);
    for (double c : {1e-2, 1.0}) {
      Matrix w = oracle::random_matrix(3, 4, 9, 0.5);
      Vector b{0.1, -0.2, 0.3};
      Matrix gw;
      Vector gb;
      logreg_objective(d.x, t, c, w, b, &gw, &gb);
      const double h = 1e-6;
      Matrix fw(3, 4);
      for (std::size_t i = 0; i < w.size(); ++i) {
        Matrix wp = w, wm = w;
        wp.data()[i] += h;
        wm.data()[i] -= h;
        fw.data()[i] = (logreg_objective(d.x, t, c, wp, b, nullptr, nullptr) -
                        logreg_objective(d.x, t, c, wm, b, nullptr, nullptr)) / (2 * h);
      }
      Vector fb(3);
      for (std::size_t i = 0; i < 3; ++i) {
        Vector bp = b, bm = b;
        bp[i] += h;
        bm[i] -= h;
        fb[i] = (logreg_objective(d.x, t, c, w, bp, nullptr, nullptr) -
                 logreg_objective(d.x, t, c, w, bm, nullptr, nullptr)) / (2 * h);
      }
      CHECK(relative_error(gw.values(), fw.values()) < 1e-5);
      CHECK(relative_error(gb, fb) < 1e-5);
    }
  }

  TEST_CASE("logreg gradient vanishes at the fitted optimum") {
    const LabeledDataset d = gaussian_classes(4, 60, 3, 1.0, 10);
    const LogRegModel m = logreg_fit_fixed(d, 0.1);
    Matrix gw;
    Vector gb;
    logreg_objective(d.x, positions(d), 0.1, m.weights, m.bias, &gw, &gb);
    CHECK(gw.max_abs() < 1e-6);
    for (double g : gb) CHECK(std::abs(g) < 1e-6);
  }

  TEST_CASE("logreg objective is non-increasing in the iteration budget") {
    const LabeledDataset d = gaussian_classes(5, 80, 4, 1.0, 11);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t budget : {1, 2, 3, 5, 8, 13, 50, 500}) {
      LogRegOptions o;
      o.max_iter = budget;
      const LogRegModel m = logreg_fit_fixed(d, 1.0, o);
      const double f = logreg_objective(d.x, positions(d), 1.0, m.weights, m.bias, nullptr, nullptr);
      CHECK(f <= prev + 1e-12);
      prev = f;
    }
  }

  TEST_CASE("logreg separates separable data under strong regularization") {
    Matrix x = oracle::random_matrix(2, 100, 12, 0.5);
    std::vector<ClassId> labels(100);
    for (std::size_t j = 0; j < 100; ++j) {
      labels[j] = static_cast<ClassId>(j % 2);
      x(0, j) += labels[j] ? 3.0 : -3.0;
    }
    const LabeledDataset d = LabeledDataset::make(x, labels);
    const LogRegModel m = logreg_fit_fixed(d, 1e-3);
    CHECK(m.weights.all_finite());
    CHECK(evaluate(Classifier{m}, d).accuracy == 1.0);
  }

  TEST_CASE("logreg with one sample per class memorizes") {
    const Matrix x(2, 3, std::vector<double>{1, 0, -1, 0, 1, 0});
    const LabeledDataset d = LabeledDataset::make(x, {4, 5, 6});
    const LogRegModel m = logreg_fit(d, {}, 13);
    CHECK(m.c == 1.0);
    CHECK(predict(Classifier{m}, d.x) == d.labels);
  }

  TEST_CASE("logreg selects c by internal cross validation") {
    const LabeledDataset d = gaussian_classes(5, 150, 3, 1.0, 14);
    const LogRegModel m = logreg_fit(d, {}, 15);
    const std::vector<double> grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    CHECK(std::find(grid.begin(), grid.end(), m.c) != grid.end());
    const LogRegModel again = logreg_fit(d, {}, 15);
    CHECK(again.weights == m.weights);
    CHECK(again.c == m.c);
  }

  TEST_CASE("MLP gradient matches central differences on a 4-3-3-2 net") {
    const LabeledDataset d = gaussian_classes(4, 12, 2, 1.0, 16);
    const std::vector<std::size_t> t = positions(d);
    std::vector<DenseLayer> layers{{oracle::random_matrix(3, 4, 17), {0.1, -0.1, 0.2}},
                                   {oracle::random_matrix(3, 3, 18), {0.05, 0.02, -0.05}},
                                   {oracle::random_matrix(2, 3, 19), {0.0, 0.1}}};
    const double l2 = 1e-2;
    std::vector<DenseLayer> grads;
    mlp_objective(layers, d.x, t, l2, &grads);
    const double h = 1e-6;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      std::vector<double> fw(layers[l].weights.size()), fb(layers[l].bias.size());
      for (std::size_t i = 0; i < fw.size(); ++i) {
        auto plus = layers, minus = layers;
        plus[l].weights.data()[i] += h;
        minus[l].weights.data()[i] -= h;
        fw[i] = (mlp_objective(plus, d.x, t, l2, nullptr) - mlp_objective(minus, d.x, t, l2, nullptr)) / (2 * h);
      }
      for (std::size_t i = 0; i < fb.size(); ++i) {
        auto plus = layers, minus = layers;
        plus[l].bias[i] += h;
        minus[l].bias[i] -= h;
        fb[i] = (mlp_objective(plus, d.x, t, l2, nullptr) - mlp_objective(minus, d.x, t, l2, nullptr)) / (2 * h);
      }
      CHECK(relative_error(grads[l].weights.values(), fw) < 1e-4);
      CHECK(relative_error(grads[l].bias, fb) < 1e-4);
    }
  }

  TEST_CASE("MLP solves XOR where LDA cannot") {
    const LabeledDataset train = xor_clusters(800, 20);
    const LabeledDataset test = xor_clusters(2000, 21);
    MlpOptions o;
    o.hidden = {32, 32};
    o.lr = 1e-2;
    const MlpModel m = mlp_fit(train, o, 22);
    CHECK(evaluate(Classifier{m}, test).accuracy > 0.95);
    CHECK(std::abs(evaluate(Classifier{lda_fit(train)}, test).accuracy - 0.5) < 0.1);
  }

  TEST_CASE("MLP epoch losses are non-increasing within tolerance") {
    const LabeledDataset d = gaussian_classes(5, 200, 3, 1.5, 23);
    MlpOptions o;
    o.hidden = {16, 16};
    o.lr = 1e-3;
    o.max_epochs = 40;
    const MlpModel m = mlp_fit(d, o, 24);
    REQUIRE(m.epoch_losses.size() >= 2);
    for (std::size_t e = 1; e < m.epoch_losses.size(); ++e) CHECK(m.epoch_losses[e] <= m.epoch_losses[e - 1] + 1e-3);
  }

  TEST_CASE("MLP rejects empty hidden layers") {
    const LabeledDataset d = gaussian_classes(3, 20, 2, 1.0, 25);
    MlpOptions o;
    o.hidden = {4, 0};
    CHECK(kind_of([&] { mlp_fit(d, o, 0); }) == ErrorKind::Contract);
  }

  TEST_CASE("classifiers are deterministic and beat the majority rate on training data") {
    LabeledDataset d = gaussian_classes(6, 120, 4, 1.0, 26);
    // Imbalance the classes so the majority predictor is non-trivial.
    d = LabeledDataset::make(hstack(d.x, oracle::random_matrix(6, 40, 27)), [&] {
      auto l = d.labels;
      l.insert(l.end(), 40, 0);
      return l;
    }());
    for (ClassifierKind kind : {ClassifierKind::Lda, ClassifierKind::LogReg, ClassifierKind::Mlp}) {
      const ClassifierSpec spec = spec_for(kind);
      const Classifier a = fit_classifier(spec, d, 28);
      const Classifier b = fit_classifier(spec, d, 28);
      CHECK(predict(a, d.x) == predict(b, d.x));
      CHECK(evaluate(a, d).accuracy >= majority_rate(d));
    }
  }

  TEST_CASE("classifier names parse") {
    CHECK(parse_classifier("lda") == ClassifierKind::Lda);
    CHECK(parse_classifier("logreg") == ClassifierKind::LogReg);
    CHECK(parse_classifier("mlp") == ClassifierKind::Mlp);
    CHECK(kind_of([] { parse_classifier("forest"); }) == ErrorKind::Config);
  }

  TEST_CASE("stratified folds balance classes and are seeded") {
    std::vector<ClassId> labels(50);
    for (std::size_t j = 0; j < 50; ++j) labels[j] = static_cast<ClassId>(j % 2);
    bool strat = false;
    const auto folds = kfold_assign(labels, 5, 3, &strat);
    CHECK(strat);
    std::map<std::pair<std::size_t, ClassId>, int> counts;
    for (std::size_t j = 0; j < 50; ++j) ++counts[{folds[j], labels[j]}];
    for (const auto& [key, n] : counts) CHECK(n == 5);
    CHECK(kfold_assign(labels, 5, 3) == folds);
    CHECK_FALSE(kfold_assign(labels, 5, 4) == folds);
  }

  TEST_CASE("small classes fall back to unstratified folds") {
    std::vector<ClassId> labels(20, 0);
    labels[0] = labels[1] = 1;
    bool strat = true;
    const auto folds = kfold_assign(labels, 5, 1, &strat);
    CHECK_FALSE(strat);
    std::vector<int> sizes(5, 0);
    for (std::size_t f : folds) ++sizes[f];
    for (int s : sizes) CHECK(s == 4);

    const LabeledDataset d = LabeledDataset::make(oracle::random_matrix(3, 20, 2), labels);
    CHECK_FALSE(kfold_cv(d, 5, spec_for(ClassifierKind::LogReg), 3).stratified);
  }

  TEST_CASE("cross validation reports one entry per fold") {
    const LabeledDataset d = gaussian_classes(4, 100, 2, 2.0, 29);
    const FitReport r = kfold_cv(d, 5, spec_for(ClassifierKind::Lda), 30);
    CHECK(r.folds.size() == 5);
    CHECK(r.stratified);
    double acc = 0.0;
    for (const Scores& s : r.folds) {
      CHECK(s.accuracy >= 0.0);
      CHECK(s.accuracy <= 1.0);
      acc += s.accuracy;
    }
    CHECK(r.mean.accuracy == doctest::Approx(acc / 5.0));
    CHECK(r.mean.accuracy > 0.8);
    CHECK(kind_of([&] { kfold_cv(d, 1, {}, 0); }) == ErrorKind::Contract);
  }

  TEST_CASE("paired t-test on d = 1..5") {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{0, 0, 0, 0, 0};
    const TTest t = paired_t_test(a, b);
    CHECK(std::abs(t.t - 4.2426) < 1e-3);
    CHECK(std::abs(t.p - oracle::student_t_two_sided(t.t, 4.0)) < 1e-6);
    CHECK(std::abs(t.p - 0.0132) < 1e-4);
  }

  TEST_CASE("paired t-test symmetric and degenerate cases") {
    const std::vector<double> a{1, -1, 1, -1}, z{0, 0, 0, 0};
    const TTest t = paired_t_test(a, z);
    CHECK(t.t == 0.0);
    CHECK(t.p == doctest::Approx(1.0));
    const std::vector<double> ones{1, 1, 1, 1};
    CHECK(kind_of([&] { paired_t_test(ones, z); }) == ErrorKind::Degenerate);
    CHECK(kind_of([&] { paired_t_test(std::vector<double>{1.0}, std::vector<double>{0.0}); }) != ErrorKind::Numerical);
  }

  TEST_CASE("Student-t tail matches numeric integration") {
    for (double dof : {1.0, 2.0, 4.0, 9.0, 30.0})
      for (double t : {0.1, 0.7, 1.5, 2.5, 4.0}) CHECK(std::abs(student_t_two_sided(t, dof) - oracle::student_t_two_sided(t, dof)) < 1e-7);
    CHECK(student_t_two_sided(0.0, 3.0) == doctest::Approx(1.0));
  }
}
