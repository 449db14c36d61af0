#include "loopsoup/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#ifndef LOOPSOUP_VERSION
#define LOOPSOUP_VERSION "unknown"
#endif

namespace loopsoup {

using nlohmann::json;

std::string version() { return LOOPSOUP_VERSION; }

json point_json(const Point& p, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(p[i]);
  return a;
}

Point point_from_json(const json& j) {
  if (!j.is_array() || j.size() > static_cast<std::size_t>(kMaxDim)) throw InvalidArgument("malformed point");
  Point p{};
  for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<int>(i)] = j[i].get<int32_t>();
  return p;
}

json to_json(const Estimate& e) {
  json extra = json::object();
  for (const auto& [k, v] : e.diag.extra) extra[k] = v;
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"samples", e.samples},
          {"seed", e.seed},
          {"wall_seconds", e.wall_seconds},
          {"diagnostics",
           {{"tail_bound", e.diag.tail_bound},
            {"boundary_touch_rate", e.diag.boundary_touch_rate},
            {"correction_bound", e.diag.correction_bound},
            {"lower", e.diag.lower},
            {"upper", e.diag.upper},
            {"max_length", e.diag.max_length},
            {"warnings", e.diag.warnings},
            {"extra", extra}}}};
}

json to_json(const ScanResult& r) {
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  json summary = json::object();
  for (const auto& [k, v] : r.summary) summary[k] = v;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"param", row.param},
                    {"estimate", to_json(row.est)},
                    {"reference", row.reference},
                    {"ratio", row.ratio},
                    {"ci_low", row.ci_low},
                    {"ci_high", row.ci_high},
                    {"scaled", row.scaled},
                    {"scaled_se", row.scaled_se}});
  }
  return {{"schema", "loopsoup-scan"},
          {"schema_version", kScanSchemaVersion},
          {"version", version()},
          {"kind", r.kind},
          {"params", params},
          {"rows", rows},
          {"summary", summary},
          {"notes", r.notes}};
}

json to_json(const VerifyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"observed", c.observed},
                      {"expected", c.expected},
                      {"std_error", c.std_error},
                      {"tolerance_sigmas", c.tolerance_sigmas},
                      {"pass", c.pass},
                      {"note", c.note}});
  }
  return {{"suite", r.suite}, {"passed", r.passed()}, {"checks", checks}};
}

json to_json(const CapacityLimit& c) {
  json est = json::array();
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    json e = to_json(c.estimates[i]);
    e["alpha"] = c.alphas[i];
    est.push_back(e);
  }
  return {{"estimates", est},
          {"fit", {{"coef", c.fit.coef}, {"coef_se", c.fit.coef_se}, {"chi2", c.fit.chi2}, {"dof", c.fit.dof}}},
          {"reference", c.reference},
          {"z", c.z}};
}

namespace {

void csv_value(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "nan";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  os << buf;
}

}  // namespace

void write_scan_csv(std::ostream& os, const ScanResult& r) {
  os << "# schema: loopsoup-scan " << kScanSchemaVersion << "\n";
  os << "# kind: " << r.kind << "\n";
  os << "# version: " << version() << "\n";
  os << "# params:";
  for (const auto& [k, v] : r.params) os << ' ' << k << '=' << v;
  os << "\n";
  for (const auto& [k, v] : r.summary) {
    os << "# summary: " << k << '=';
    csv_value(os, v);
    os << "\n";
  }
  for (const auto& n : r.notes) os << "# note: " << n << "\n";
  os << "param,estimate,std_error,reference,ratio,samples,tail_bound,boundary_touch_rate,"
        "ci_low,ci_high,scaled,scaled_se\n";
  for (const auto& row : r.rows) {
    const double cells[] = {row.param,
                            row.est.value,
                            row.est.std_error,
                            row.reference,
                            row.ratio,
                            static_cast<double>(row.est.samples),
                            row.est.diag.tail_bound,
                            row.est.diag.boundary_touch_rate,
                            row.ci_low,
                            row.ci_high,
                            row.scaled,
                            row.scaled_se};
    for (std::size_t i = 0; i < std::size(cells); ++i) {
      if (i) os << ',';
      csv_value(os, cells[i]);
    }
    os << "\n";
  }
}

void write_soup_jsonl(std::ostream& os, const Soup& soup, const json& params) {
  const int d = soup.dim();
  json header = {{"schema", "loopsoup-soup"},
                 {"schema_version", kSoupSchemaVersion},
                 {"version", version()},
                 {"dim", d},
                 {"window", {{"center", point_json(soup.window().center, d)}, {"radius", soup.window().radius}}},
                 {"root_window",
                  {{"center", point_json(soup.root_window().center, d)}, {"radius", soup.root_window().radius}}},
                 {"loops", soup.size()},
                 {"params", params.is_null() ? json::object() : params}};
  os << header.dump() << "\n";
  for (const auto& loop : soup.loops()) {
    json trace = json::array();
    for (const auto& p : loop.trace) trace.push_back(point_json(p, d));
    os << json{{"root", point_json(loop.root, d)}, {"length", loop.length}, {"trace", trace}}.dump() << "\n";
  }
}

Soup read_soup_jsonl(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("soup dump: empty input");
  const json header = json::parse(line);
  if (header.value("schema", "") != "loopsoup-soup" || header.value("schema_version", 0) != kSoupSchemaVersion) {
    throw InvalidArgument("soup dump: schema mismatch");
  }
  const int d = header.at("dim").get<int>();
  auto box = [](const json& j) { return Box{point_from_json(j.at("center")), j.at("radius").get<int32_t>()}; };
  Soup soup(d, box(header.at("window")), box(header.at("root_window")));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Loop loop;
    loop.root = point_from_json(j.at("root"));
    loop.length = j.at("length").get<int>();
    for (const auto& p : j.at("trace")) loop.trace.push_back(point_from_json(p));
    if (!loop_is_valid(loop, d)) throw InvalidArgument("soup dump: invalid loop");
    soup.add(std::move(loop));
  }
  return soup;
}

json table_to_json(const LengthTable& t) {
  json p = json::array();
  for (int k = 2; k <= t.max_length; k += 2) p.push_back(t.p(k));
  return {{"schema", "loopsoup-table"},
          {"schema_version", kTableSchemaVersion},
          {"version", version()},
          {"d", t.dim},
          {"L_max", t.max_length},
          {"p", p},
          {"m_d", t.per_vertex_mass},
          {"return_mass", t.return_mass},
          {"tail_bound", t.tail_bound}};
}

LengthTable table_from_json(const json& j) {
  if (j.value("schema", "") != "loopsoup-table" || j.value("schema_version", 0) != kTableSchemaVersion) {
    throw InvalidArgument("table dump: schema mismatch");
  }
  LengthTable t = build_length_table(j.at("d").get<int>(), j.at("L_max").get<int>());
  const auto& p = j.at("p");
  if (p.size() != static_cast<std::size_t>(t.max_length / 2)) throw InvalidArgument("table dump: wrong p length");
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double stored = p[i].get<double>();
    const double fresh = t.p(2 * static_cast<int>(i) + 2);
    if (std::abs(stored - fresh) > 1e-12 * fresh) {
      throw NumericalError("table dump: p_" + std::to_string(2 * i + 2) + " does not match a fresh build");
    }
  }
  return t;
}

}  // namespace loopsoup
