#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <type_traits>

#include "cica/bench.hpp"
#include "cica/error.hpp"

namespace cica {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  fail(ErrorKind::Config, "config key '" + std::string(key) + "': invalid value '" + std::string(value) + "' (expected " +
                              expected + ")");
}

template <class T>
T parse_number(std::string_view key, std::string_view value, const char* expected) {
  value = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, expected);
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(out)) bad_value(key, value, expected);
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  return parse_number<std::size_t>(key, value, "a non-negative integer");
}

double parse_real(std::string_view key, std::string_view value) { return parse_number<double>(key, value, "a real"); }

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  for (;;) {
    const std::size_t comma = value.find(',');
    const std::string_view item = trim(value.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    value = value.substr(comma + 1);
  }
  return out;
}

template <class T, class F>
std::vector<T> parse_list(std::string_view key, std::string_view value, F parse_item) {
  std::vector<T> out;
  for (std::string_view item : split_list(value)) out.push_back(parse_item(item));
  if (out.empty()) bad_value(key, value, "a non-empty comma-separated list");
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& items, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::None: return "none";
    case Method::CondIca: return "condica";
    case Method::Ica: return "ica";
    case Method::Cov: return "cov";
    case Method::IcaCov: return "icacov";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "none") return Method::None;
  if (name == "condica") return Method::CondIca;
  if (name == "ica") return Method::Ica;
  if (name == "cov") return Method::Cov;
  if (name == "icacov") return Method::IcaCov;
  fail(ErrorKind::Config, "unknown method '" + std::string(name) + "' (expected condica, ica, cov, icacov or none)");
}

void set_config_value(BenchConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto count = [&] { return parse_count(key, value); };
  auto real = [&] { return parse_real(key, value); };

  if (key == "preset") {
    if (value == "desk") {
      const BenchConfig fresh;
      c.p = fresh.p;
      c.k_true = fresh.k_true;
      c.components = fresh.components;
      c.mlp.hidden = fresh.mlp.hidden;
      c.k_grid = fresh.k_grid;
    } else if (value == "full") {
      c.p = 1024;
      c.k_true = 900;
      c.components = 900;
      c.mlp.hidden = {1024, 1024};
      c.k_grid = {100, 300, 500, 700, 900};
    } else {
      bad_value(key, value, "desk or full");
    }
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value, "an unsigned 64-bit integer");
  } else if (key == "p") {
    c.p = count();
  } else if (key == "k_true") {
    c.k_true = count();
  } else if (key == "n_rest") {
    c.n_rest = count();
  } else if (key == "families") {
    c.families = parse_list<SourceFamily>(key, value, parse_source_family);
  } else if (key == "latent_correlation") {
    c.latent_correlation = real();
  } else if (key == "noise") {
    c.noise = real();
  } else if (key == "classes") {
    c.classes = count();
  } else if (key == "train_per_class") {
    c.train_per_class = count();
  } else if (key == "test_per_class") {
    c.test_per_class = count();
  } else if (key == "class_separation") {
    c.class_separation = real();
  } else if (key == "components" || key == "k") {
    c.components = count();
  } else if (key == "n_quantiles") {
    c.n_quantiles = count();
  } else if (key == "ica_tol") {
    c.ica.tol = real();
  } else if (key == "ica_max_iter") {
    c.ica.max_iter = count();
  } else if (key == "methods" || key == "method") {
    c.methods = parse_list<Method>(key, value, parse_method);
  } else if (key == "classifiers" || key == "classifier") {
    c.classifiers = parse_list<ClassifierKind>(key, value, parse_classifier);
  } else if (key == "folds") {
    c.folds = count();
  } else if (key == "splits") {
    c.splits = count();
  } else if (key == "n_fakes") {
    c.n_fakes = count();
  } else if (key == "k_grid") {
    c.k_grid = parse_list<std::size_t>(key, value, [&](std::string_view v) { return parse_count(key, v); });
  } else if (key == "logreg_c_grid") {
    c.logreg.c_grid = parse_list<double>(key, value, [&](std::string_view v) { return parse_real(key, v); });
  } else if (key == "logreg_cv_folds") {
    c.logreg.cv_folds = count();
  } else if (key == "logreg_max_iter") {
    c.logreg.max_iter = count();
  } else if (key == "logreg_grad_tol") {
    c.logreg.grad_tol = real();
  } else if (key == "mlp_hidden") {
    c.mlp.hidden = parse_list<std::size_t>(key, value, [&](std::string_view v) { return parse_count(key, v); });
  } else if (key == "mlp_lr") {
    c.mlp.lr = real();
  } else if (key == "mlp_batch") {
    c.mlp.batch = count();
  } else if (key == "mlp_l2") {
    c.mlp.l2 = real();
  } else if (key == "mlp_max_steps") {
    c.mlp.max_steps = count();
  } else if (key == "mlp_max_epochs") {
    c.mlp.max_epochs = count();
  } else if (key == "mlp_tol") {
    c.mlp.tol = real();
  } else if (key == "mlp_patience") {
    c.mlp.patience = count();
  } else {
    fail(ErrorKind::Config, "unknown config key '" + std::string(key) + "'");
  }
}

void load_config_file(BenchConfig& config, const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Config, "cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view body = line;
    if (const std::size_t hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorKind::Config, path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    try {
      set_config_value(config, body.substr(0, eq), body.substr(eq + 1));
    } catch (const Error& e) {
      fail(ErrorKind::Config, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const BenchConfig& c) {
  auto num = [](std::size_t v) { return std::to_string(v); };
  const std::vector<SourceFamily> families =
      c.families.empty() ? std::vector<SourceFamily>{SourceFamily::Laplace, SourceFamily::Uniform, SourceFamily::Bimodal}
                         : c.families;
  return {
      {"seed", std::to_string(c.seed)},
      {"p", num(c.p)},
      {"k_true", num(c.k_true)},
      {"n_rest", num(c.n_rest)},
      {"families", join(families, [](SourceFamily f) { return std::string(to_string(f)); })},
      {"latent_correlation", format_real(c.latent_correlation)},
      {"noise", format_real(c.noise)},
      {"classes", num(c.classes)},
      {"train_per_class", num(c.train_per_class)},
      {"test_per_class", num(c.test_per_class)},
      {"class_separation", format_real(c.class_separation)},
      {"components", num(c.components)},
      {"n_quantiles", num(c.n_quantiles)},
      {"ica_tol", format_real(c.ica.tol)},
      {"ica_max_iter", num(c.ica.max_iter)},
      {"methods", join(c.methods, [](Method m) { return std::string(to_string(m)); })},
      {"classifiers", join(c.classifiers, [](ClassifierKind k) { return std::string(to_string(k)); })},
      {"folds", num(c.folds)},
      {"splits", num(c.splits)},
      {"n_fakes", c.n_fakes ? num(*c.n_fakes) : std::string("default")},
      {"k_grid", join(c.k_grid, num)},
      {"logreg_c_grid", join(c.logreg.c_grid, format_real)},
      {"logreg_cv_folds", num(c.logreg.cv_folds)},
      {"logreg_max_iter", num(c.logreg.max_iter)},
      {"logreg_grad_tol", format_real(c.logreg.grad_tol)},
      {"mlp_hidden", join(c.mlp.hidden, num)},
      {"mlp_lr", format_real(c.mlp.lr)},
      {"mlp_batch", num(c.mlp.batch)},
      {"mlp_l2", format_real(c.mlp.l2)},
      {"mlp_max_steps", num(c.mlp.max_steps)},
      {"mlp_max_epochs", num(c.mlp.max_epochs)},
      {"mlp_tol", format_real(c.mlp.tol)},
      {"mlp_patience", num(c.mlp.patience)},
  };
}

}  // namespace cica
