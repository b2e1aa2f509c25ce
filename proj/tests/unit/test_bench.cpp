#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "cica/bench.hpp"
#include "cica/error.hpp"
#include "cica/io.hpp"
#include "oracles.hpp"

using namespace cica;

namespace {

std::filesystem::path tmp_dir(const char* name) {
  const std::filesystem::path dir = std::filesystem::path(CICA_TEST_TMP) / "bench" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

ErrorKind kind_of(const auto& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Contract;
}

BenchConfig small_config() {
  BenchConfig c;
  c.p = 12;
  c.k_true = 6;
  c.n_rest = 3000;
  c.classes = 3;
  c.train_per_class = 10;
  c.test_per_class = 30;
  c.components = 6;
  c.splits = 3;
  c.classifiers = {ClassifierKind::Lda, ClassifierKind::LogReg};
  c.logreg.c_grid = {1e-2, 1.0};
  c.seed = 5;
  return c;
}

double excess_kurtosis(std::span<const double> v) {
  const double n = double(v.size());
  double m = 0;
  for (double x : v) m += x;
  m /= n;
  double m2 = 0, m4 = 0;
  for (double x : v) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("Laplace sources have excess kurtosis near 3") {
    SyntheticSpec s;
    s.p = 8;
    s.k_true = 4;
    s.n = 50000;
    s.families = {SourceFamily::Laplace};
    s.latent_correlation = 0.0;
    s.seed = 1;
    const SyntheticSample draw = gen_synthetic_rest_full(s);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(excess_kurtosis(draw.sources.row(i)) - 3.0) < 0.5);
  }

  TEST_CASE("source families are unit variance") {
    SyntheticSpec s;
    s.p = 6;
    s.k_true = 3;
    s.n = 50000;
    s.latent_correlation = 0.0;
    const SyntheticSample draw = gen_synthetic_rest_full(s);
    const Matrix c = oracle::sample_covariance(draw.sources);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(c(i, i) - 1.0) < 0.05);
    CHECK(std::abs(excess_kurtosis(draw.sources.row(1)) + 1.2) < 0.1);  // uniform
  }

  TEST_CASE("latent correlation induces dependent sources") {
    SyntheticSpec s;
    s.p = 6;
    s.k_true = 3;
    s.n = 20000;
    s.families = {SourceFamily::Uniform};
    s.latent_correlation = 0.3;
    const SyntheticSample draw = gen_synthetic_rest_full(s);
    const double r = oracle::correlation(draw.sources.row(0), draw.sources.row(1));
    CHECK(r > 0.2);
    CHECK(r < 0.4);
  }

  TEST_CASE("mixing has orthonormal columns and rest data follows x = A s + noise") {
    SyntheticSpec s;
    s.p = 10;
    s.k_true = 4;
    s.n = 500;
    s.noise = 0.0;
    const SyntheticSample draw = gen_synthetic_rest_full(s);
    CHECK(oracle::max_abs_diff(matmul_tn(draw.mixing, draw.mixing), Matrix::identity(4)) < 1e-12);
    CHECK(oracle::max_abs_diff(draw.x, draw.mixing * draw.sources) < 1e-12);
  }

  TEST_CASE("single-sample draws and determinism") {
    SyntheticSpec s;
    s.p = 5;
    s.k_true = 3;
    s.n = 1;
    const Matrix x = gen_synthetic_rest(s);
    CHECK(x.rows() == 5);
    CHECK(x.cols() == 1);
    CHECK(x.all_finite());
    s.n = 200;
    CHECK(gen_synthetic_rest(s) == gen_synthetic_rest(s));
    SyntheticSpec t = s;
    t.seed = 9;
    CHECK_FALSE(gen_synthetic_rest(s) == gen_synthetic_rest(t));
    CHECK(synthetic_mixing(s) == synthetic_mixing(t));
  }

  TEST_CASE("task draws are balanced") {
    SyntheticSpec s;
    s.p = 8;
    s.k_true = 4;
    s.n = 70;
    s.classes = 7;
    const LabeledDataset d = gen_synthetic_task(s);
    for (ClassId c = 0; c < 7; ++c) CHECK(std::count(d.labels.begin(), d.labels.end(), c) == 10);
    const Matrix shifts = synthetic_class_shifts(s);
    for (std::size_t c = 0; c < 7; ++c) {
      double norm = 0.0;
      for (std::size_t i = 0; i < 4; ++i) norm += shifts(i, c) * shifts(i, c);
      CHECK(std::sqrt(norm) == doctest::Approx(s.class_separation));
    }
  }

  TEST_CASE("class separation controls task difficulty") {
    SyntheticSpec s;
    s.p = 16;
    s.k_true = 8;
    s.classes = 4;
    s.n = 4000;
    s.class_separation = 0.0;
    s.seed = 1;
    LabeledDataset train = gen_synthetic_task(s);
    s.seed = 2;
    LabeledDataset test = gen_synthetic_task(s);
    CHECK(std::abs(evaluate(Classifier{lda_fit(train)}, test).accuracy - 0.25) < 0.05);

    s.classes = 2;
    s.class_separation = 5.0;
    s.n = 1000;
    s.seed = 3;
    train = gen_synthetic_task(s);
    s.seed = 4;
    test = gen_synthetic_task(s);
    CHECK(evaluate(Classifier{lda_fit(train)}, test).accuracy > 0.95);
  }

  TEST_CASE("Amari index of scaled permutations is zero") {
    CHECK(amari_index(Matrix::identity(4)) == 0.0);
    const Matrix p(3, 3, std::vector<double>{0, -2, 0, 0, 0, 0.5, 3, 0, 0});
    CHECK(amari_index(p) == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("Amari index matches the direct formula") {
    // sum_i (sum_j |p_ij| / max_j |p_ij| - 1) + sum_j (sum_i |p_ij| / max_i |p_ij| - 1), over 2 k (k - 1).
    auto direct = [](const Matrix& p) {
      const std::size_t k = p.rows();
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double s = 0, m = 0;
        for (std::size_t j = 0; j < k; ++j) s += std::abs(p(i, j)), m = std::max(m, std::abs(p(i, j)));
        total += s / m - 1.0;
      }
      for (std::size_t j = 0; j < k; ++j) {
        double s = 0, m = 0;
        for (std::size_t i = 0; i < k; ++i) s += std::abs(p(i, j)), m = std::max(m, std::abs(p(i, j)));
        total += s / m - 1.0;
      }
      return total / (2.0 * double(k) * double(k - 1));
    };
    CHECK(amari_index(Matrix(2, 2, 1.0)) == doctest::Approx(direct(Matrix(2, 2, 1.0))));
    CHECK(amari_index(Matrix(2, 2, 1.0)) == doctest::Approx(1.0));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Matrix p = oracle::random_matrix(4, 4, seed);
      CHECK(amari_index(p) == doctest::Approx(direct(p)).epsilon(1e-12));
    }
  }

  TEST_CASE("CSV matrices are one sample per row") {
    const auto dir = tmp_dir("csv");
    write_text(dir / "m.csv", "1,2\n3,4\n");
    const Matrix m = load_matrix(dir / "m.csv", MatrixFormat::Csv);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m(0, 1) == 3.0);
    CHECK(m(1, 0) == 2.0);
    const Matrix r = oracle::random_matrix(3, 7, 1);
    save_matrix(dir / "r.csv", r, MatrixFormat::Csv);
    CHECK(load_matrix(dir / "r.csv", MatrixFormat::Csv) == r);
  }

  TEST_CASE("binary matrices round-trip bit-identically") {
    const auto dir = tmp_dir("bin");
    const Matrix r = oracle::random_matrix(5, 9, 2);
    save_matrix(dir / "r.bin", r, MatrixFormat::Bin);
    CHECK(load_matrix(dir / "r.bin", MatrixFormat::Bin) == r);
    const std::string bytes = read_text(dir / "r.bin");
    CHECK(bytes.substr(0, 5) == "CMAT1");
    CHECK(bytes.size() == 5 + 16 + 8 * r.size());
  }

  TEST_CASE("malformed matrix files are parse errors with locations") {
    const auto dir = tmp_dir("bad");
    std::string msg;
    write_text(dir / "ragged.csv", "1,2,3\n4,5\n");
    CHECK(kind_of([&] { load_matrix(dir / "ragged.csv", MatrixFormat::Csv); }, &msg) == ErrorKind::Parse);
    CHECK(msg.find(":2:") != std::string::npos);
    write_text(dir / "text.csv", "1,2\n3,x\n");
    CHECK(kind_of([&] { load_matrix(dir / "text.csv", MatrixFormat::Csv); }, &msg) == ErrorKind::Parse);
    CHECK(msg.find(":2:") != std::string::npos);
    write_text(dir / "magic.bin", "CMAT9aaaaaaaaaaaaaaaa");
    CHECK(kind_of([&] { load_matrix(dir / "magic.bin", MatrixFormat::Bin); }) == ErrorKind::Parse);
    save_matrix(dir / "short.bin", Matrix(2, 2, 1.0), MatrixFormat::Bin);
    std::filesystem::resize_file(dir / "short.bin", 5 + 16 + 24);
    CHECK(kind_of([&] { load_matrix(dir / "short.bin", MatrixFormat::Bin); }, &msg) == ErrorKind::Parse);
    CHECK(kind_of([&] { parse_matrix_format("npy"); }) == ErrorKind::Config);
  }

  TEST_CASE("labels load one integer per line") {
    const auto dir = tmp_dir("labels");
    write_text(dir / "ok.txt", "3\n-1\n7\n");
    CHECK(load_labels(dir / "ok.txt") == std::vector<ClassId>{3, -1, 7});
    save_labels(dir / "back.txt", {1, 2, 3});
    CHECK(load_labels(dir / "back.txt") == std::vector<ClassId>{1, 2, 3});
    std::string msg;
    write_text(dir / "bad.txt", "1\n2.5\n");
    CHECK(kind_of([&] { load_labels(dir / "bad.txt"); }, &msg) == ErrorKind::Parse);
    CHECK(msg.find(":2:") != std::string::npos);
    // Length mismatch against the matrix.
    CHECK_THROWS_AS(LabeledDataset::make(Matrix(2, 3, 0.0), {1, 2}), Error);
  }

  TEST_CASE("config keys, files and canonical listing") {
    BenchConfig c;
    set_config_value(c, "seed", "42");
    set_config_value(c, "methods", "condica,ica");
    set_config_value(c, "k_grid", "2,8");
    CHECK(c.seed == 42);
    CHECK(c.methods == std::vector<Method>{Method::CondIca, Method::Ica});
    CHECK(c.k_grid == std::vector<std::size_t>{2, 8});
    CHECK(kind_of([&] { set_config_value(c, "nonsense", "1"); }) == ErrorKind::Config);
    CHECK(kind_of([&] { set_config_value(c, "p", "-3"); }) == ErrorKind::Config);
    CHECK(kind_of([&] { set_config_value(c, "methods", "gan"); }) == ErrorKind::Config);

    const auto dir = tmp_dir("config");
    write_text(dir / "ok.cfg", "# comment\nfolds = 3\n\nclassifiers = lda\n");
    load_config_file(c, dir / "ok.cfg");
    CHECK(c.folds == 3);
    CHECK(c.classifiers == std::vector<ClassifierKind>{ClassifierKind::Lda});
    write_text(dir / "bad.cfg", "folds = 3\nwhat = 1\n");
    std::string msg;
    CHECK(kind_of([&] { load_config_file(c, dir / "bad.cfg"); }, &msg) == ErrorKind::Config);
    CHECK(msg.find("bad.cfg:2") != std::string::npos);

    const auto entries = config_entries(c);
    CHECK(entries == config_entries(c));
    bool found = false;
    for (const auto& [k, v] : entries)
      if (k == "seed") found = v == "42";
    CHECK(found);
  }

  TEST_CASE("fake-vs-real rejects zero fakes and the none method") {
    BenchConfig c = small_config();
    c.n_fakes = 0;
    CHECK(kind_of([&] { exp_fake_vs_real(c); }) == ErrorKind::Config);
    c.n_fakes.reset();
    c.methods = {Method::None};
    CHECK(kind_of([&] { exp_fake_vs_real(c); }) == ErrorKind::Config);
    c.methods = {};
    c.folds = 1;
    CHECK(kind_of([&] { exp_fake_vs_real(c); }) == ErrorKind::Config);
  }

  TEST_CASE("fake-vs-real report is deterministic and round-trips") {
    BenchConfig c = small_config();
    c.methods = {Method::CondIca, Method::Cov};
    const BenchReport a = exp_fake_vs_real(c);
    const BenchReport b = exp_fake_vs_real(c);
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK(report_to_csv(a) == report_to_csv(b));
    CHECK(a.cells.size() == 4);
    for (const ReportCell& cell : a.cells) {
      CHECK(cell.accuracy.values.size() == 5);
      CHECK(cell.accuracy.mean >= 0.0);
      CHECK(cell.accuracy.mean <= 1.0);
    }
    const BenchReport back = report_from_json(report_to_json(a));
    CHECK(report_to_json(back) == report_to_json(a));
    CHECK(report_to_csv(back) == report_to_csv(a));
    CHECK(kind_of([] { report_from_json("{\"cells\": 3}"); }) == ErrorKind::Parse);
  }

  TEST_CASE("augmentation benchmark cells, comparisons and seed isolation") {
    BenchConfig c = small_config();
    c.methods = {Method::None, Method::CondIca, Method::Cov};
    const BenchReport r = exp_augmentation_benchmark(c);
    CHECK(r.cells.size() == 6);
    const ReportCell& none = r.cell("none", "lda");
    REQUIRE(none.vs_none.has_value());
    CHECK_FALSE(none.vs_none->test.has_value());  // compared with itself: n/a
    const ReportCell& cond = r.cell("condica", "lda");
    REQUIRE(cond.vs_condica.has_value());
    CHECK_FALSE(cond.vs_condica->test.has_value());
    const ReportCell& cov = r.cell("cov", "logreg");
    if (cov.vs_none && cov.vs_none->test) {
      CHECK(cov.vs_none->test->p > 0.0);
      CHECK(cov.vs_none->test->p <= 1.0);
    }
    CHECK(report_to_csv(r).find("n/a") != std::string::npos);

    // Adding a method leaves the other methods' numbers untouched.
    BenchConfig fewer = c;
    fewer.methods = {Method::None, Method::CondIca};
    const BenchReport f = exp_augmentation_benchmark(fewer);
    CHECK(f.cell("condica", "lda").accuracy.values == cond.accuracy.values);
    CHECK(f.cell("none", "logreg").accuracy.values == r.cell("none", "logreg").accuracy.values);

    const BenchReport back = report_from_json(report_to_json(r));
    CHECK(report_to_json(back) == report_to_json(r));
  }

  TEST_CASE("no-augmentation baseline runs with zero fakes") {
    BenchConfig c = small_config();
    c.methods = {Method::None};
    c.classifiers = {ClassifierKind::Lda};
    const BenchReport r = exp_augmentation_benchmark(c);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].accuracy.values.size() == c.splits);
  }

  TEST_CASE("a one-point sweep equals the benchmark cell") {
    BenchConfig c = small_config();
    c.methods = {Method::CondIca};
    c.k_grid = {4};
    const SweepReport s = exp_sensitivity_k(c);
    BenchConfig b = c;
    b.components = 4;
    const BenchReport r = exp_augmentation_benchmark(b);
    REQUIRE(s.rows.size() == 2);
    for (const SweepRow& row : s.rows) {
      REQUIRE(row.accuracy.has_value());
      CHECK(row.accuracy->values == r.cell("condica", row.classifier).accuracy.values);
    }
  }

  TEST_CASE("a sweep records per-k errors and continues") {
    BenchConfig c = small_config();
    c.p = 40;
    c.k_true = 20;
    c.train_per_class = 5;
    c.methods = {Method::Ica};
    c.classifiers = {ClassifierKind::Lda};
    c.k_grid = {4, 30};
    const SweepReport s = exp_sensitivity_k(c);
    REQUIRE(s.rows.size() == 2);
    CHECK(s.rows[0].accuracy.has_value());
    CHECK(s.rows[0].error.empty());
    CHECK_FALSE(s.rows[1].accuracy.has_value());
    CHECK_FALSE(s.rows[1].error.empty());
    CHECK(sweep_to_csv(s).find("30,ica,lda,,,") != std::string::npos);
  }

  TEST_CASE("reports are written with timings kept separate") {
    BenchConfig c = small_config();
    c.methods = {Method::None};
    c.classifiers = {ClassifierKind::Lda};
    const auto dir = tmp_dir("write");
    const BenchReport r = exp_augmentation_benchmark(c);
    write_report(dir, "augment", r);
    CHECK(read_text(dir / "augment.json") == report_to_json(r));
    CHECK(read_text(dir / "augment.csv") == report_to_csv(r));
    CHECK(std::filesystem::exists(dir / "timings.txt"));
    CHECK(read_text(dir / "augment.json").find("runtime") == std::string::npos);
  }

  TEST_CASE("summaries use the sample standard deviation") {
    const MetricSummary s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(summarize({0.7}).std == 0.0);
  }
}
