#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cica/bench.hpp"
#include "cica/error.hpp"

namespace cica {

namespace {

using Json = nlohmann::ordered_json;

Json summary_json(const MetricSummary& s) { return Json{{"mean", s.mean}, {"std", s.std}, {"values", s.values}}; }

MetricSummary summary_from(const Json& j) {
  MetricSummary s;
  s.mean = j.at("mean").get<double>();
  s.std = j.at("std").get<double>();
  s.values = j.at("values").get<std::vector<double>>();
  return s;
}

Json comparison_json(const Comparison& c) {
  if (!c.test) return "n/a";
  return Json{{"t", c.test->t}, {"p", c.test->p}};
}

std::optional<Comparison> comparison_from(const Json& cell, const char* key) {
  if (!cell.contains(key)) return std::nullopt;
  const Json& j = cell.at(key);
  if (j.is_string()) {
    if (j.get<std::string>() != "n/a") fail(ErrorKind::Parse, std::string("report: bad comparison value for ") + key);
    return Comparison{};
  }
  return Comparison{TTest{j.at("t").get<double>(), j.at("p").get<double>()}};
}

Json config_json(const std::vector<std::pair<std::string, std::string>>& config) {
  Json j = Json::object();
  for (const auto& [k, v] : config) j[k] = v;
  return j;
}

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void comparison_csv(std::ostringstream& os, const std::optional<Comparison>& c) {
  if (!c) {
    os << ",,";
  } else if (!c->test) {
    os << ",n/a,n/a";
  } else {
    os << ',' << real(c->test->t) << ',' << real(c->test->p);
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::Parse, "cannot open " + path.string() + " for writing");
  os << text;
  if (!os) fail(ErrorKind::Parse, "write failed for " + path.string());
}

void write_timings(const std::filesystem::path& dir, const std::vector<std::pair<std::string, double>>& runtime) {
  std::ostringstream os;
  for (const auto& [name, secs] : runtime) os << name << ' ' << real(secs) << '\n';
  write_file(dir / "timings.txt", os.str());
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string report_to_json(const BenchReport& report) {
  Json cells = Json::array();
  for (const ReportCell& c : report.cells) {
    Json j{{"method", c.method},
           {"classifier", c.classifier},
           {"accuracy", summary_json(c.accuracy)},
           {"precision", summary_json(c.precision)},
           {"recall", summary_json(c.recall)}};
    if (c.vs_none) j["vs_none"] = comparison_json(*c.vs_none);
    if (c.vs_condica) j["vs_condica"] = comparison_json(*c.vs_condica);
    cells.push_back(std::move(j));
  }
  const Json doc{{"experiment", report.experiment},
                 {"config", config_json(report.config)},
                 {"cells", std::move(cells)},
                 {"warnings", report.warnings}};
  return doc.dump(2) + "\n";
}

BenchReport report_from_json(std::string_view text) {
  BenchReport report;
  try {
    const Json doc = Json::parse(text);
    report.experiment = doc.at("experiment").get<std::string>();
    for (const auto& [k, v] : doc.at("config").items()) report.config.emplace_back(k, v.get<std::string>());
    for (const Json& j : doc.at("cells")) {
      ReportCell c;
      c.method = j.at("method").get<std::string>();
      c.classifier = j.at("classifier").get<std::string>();
      c.accuracy = summary_from(j.at("accuracy"));
      c.precision = summary_from(j.at("precision"));
      c.recall = summary_from(j.at("recall"));
      c.vs_none = comparison_from(j, "vs_none");
      c.vs_condica = comparison_from(j, "vs_condica");
      report.cells.push_back(std::move(c));
    }
    report.warnings = doc.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("report: ") + e.what());
  }
  return report;
}

std::string report_to_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "method,classifier,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,recall_std,"
        "t_vs_none,p_vs_none,t_vs_condica,p_vs_condica\n";
  for (const ReportCell& c : report.cells) {
    os << c.method << ',' << c.classifier << ',' << real(c.accuracy.mean) << ',' << real(c.accuracy.std) << ','
       << real(c.precision.mean) << ',' << real(c.precision.std) << ',' << real(c.recall.mean) << ','
       << real(c.recall.std);
    comparison_csv(os, c.vs_none);
    comparison_csv(os, c.vs_condica);
    os << '\n';
  }
  return os.str();
}

std::string sweep_to_json(const SweepReport& report) {
  Json rows = Json::array();
  for (const SweepRow& r : report.rows) {
    Json j{{"k", r.k}, {"method", r.method}, {"classifier", r.classifier}};
    j["accuracy"] = r.accuracy ? summary_json(*r.accuracy) : Json(nullptr);
    j["error"] = r.error;
    rows.push_back(std::move(j));
  }
  const Json doc{{"experiment", "sweep-k"}, {"config", config_json(report.config)}, {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

std::string sweep_to_csv(const SweepReport& report) {
  std::ostringstream os;
  os << "k,method,classifier,mean_accuracy,std_accuracy,error\n";
  for (const SweepRow& r : report.rows) {
    os << r.k << ',' << r.method << ',' << r.classifier << ',';
    if (r.accuracy) os << real(r.accuracy->mean) << ',' << real(r.accuracy->std);
    else os << ',';
    os << ',' << csv_escape(r.error) << '\n';
  }
  return os.str();
}

void write_report(const std::filesystem::path& dir, const std::string& stem, const BenchReport& report) {
  std::filesystem::create_directories(dir);
  write_file(dir / (stem + ".json"), report_to_json(report));
  write_file(dir / (stem + ".csv"), report_to_csv(report));
  write_timings(dir, report.runtime_seconds);
}

void write_sweep(const std::filesystem::path& dir, const std::string& stem, const SweepReport& report) {
  std::filesystem::create_directories(dir);
  write_file(dir / (stem + ".json"), sweep_to_json(report));
  write_file(dir / (stem + ".csv"), sweep_to_csv(report));
  write_timings(dir, report.runtime_seconds);
}

}  // namespace cica
