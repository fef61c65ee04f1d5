#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "harness_internal.hpp"

namespace metriflow::harness {

namespace {

using nlohmann::json;

std::vector<double> read_series(const json& values) {
  std::vector<double> out;
  for (const auto& v : values) {
    out.push_back(v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

bool contains(const std::vector<std::string>& list, const std::string& name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << x;
  return s.str();
}

}  // namespace

Report report(const json& doc) {
  Report r;
  Thresholds t;
  if (doc.contains("meta") && doc["meta"].contains("thresholds")) {
    const auto& jt = doc["meta"]["thresholds"];
    if (jt.contains("drift")) t.drift = jt["drift"].get<std::map<std::string, double>>();
    if (jt.contains("final_max")) t.final_max = jt["final_max"].get<std::map<std::string, double>>();
    if (jt.contains("increasing")) t.increasing = jt["increasing"].get<std::vector<std::string>>();
    if (jt.contains("decreasing")) t.decreasing = jt["decreasing"].get<std::vector<std::string>>();
    if (jt.contains("slack")) t.slack = jt["slack"].get<double>();
  }

  std::set<std::string> seen;
  const json diags = doc.value("diagnostics", json::object());
  for (const auto& [name, values] : diags.items()) {
    seen.insert(name);
    const auto x = read_series(values);
    ObservableReport o;
    o.name = name;
    if (x.empty()) {
      o.verdict = "SKIP";
      o.detail = "empty series";
      r.observables.push_back(o);
      continue;
    }
    o.initial = x.front();
    o.final = x.back();
    bool finite = true;
    bool inc = true;
    bool dec = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      finite = finite && std::isfinite(x[i]);
      o.max_drift = std::max(o.max_drift, std::abs(x[i] - x[0]));
      if (i > 0) {
        if (x[i] < x[i - 1] - t.slack) inc = false;
        if (x[i] > x[i - 1] + t.slack) dec = false;
      }
    }
    if (!finite) o.max_drift = std::numeric_limits<double>::quiet_NaN();
    o.monotone = !finite ? "none" : inc && dec ? "constant" : inc ? "increasing" : dec ? "decreasing" : "none";

    std::vector<std::string> checks;
    bool pass = true;
    bool checked = false;
    if (auto it = t.drift.find(name); it != t.drift.end()) {
      checked = true;
      const bool ok = finite && o.max_drift <= it->second;
      pass = pass && ok;
      checks.push_back("drift " + sci(o.max_drift) + (ok ? " <= " : " > ") + sci(it->second));
    }
    if (contains(t.increasing, name)) {
      checked = true;
      pass = pass && finite && inc;
      checks.push_back(inc && finite ? "nondecreasing" : "NOT nondecreasing");
    }
    if (contains(t.decreasing, name)) {
      checked = true;
      pass = pass && finite && dec;
      checks.push_back(dec && finite ? "nonincreasing" : "NOT nonincreasing");
    }
    if (auto it = t.final_max.find(name); it != t.final_max.end()) {
      checked = true;
      const bool ok = std::isfinite(o.final) && std::abs(o.final) <= it->second;
      pass = pass && ok;
      checks.push_back("final " + sci(std::abs(o.final)) + (ok ? " <= " : " > ") + sci(it->second));
    }
    o.verdict = !checked ? "INFO" : pass ? "PASS" : "FAIL";
    for (std::size_t i = 0; i < checks.size(); ++i) o.detail += (i ? "; " : "") + checks[i];
    r.pass = r.pass && o.verdict != "FAIL";
    r.observables.push_back(o);
  }

  std::set<std::string> wanted;
  for (const auto& [k, v] : t.drift) wanted.insert(k);
  for (const auto& [k, v] : t.final_max) wanted.insert(k);
  wanted.insert(t.increasing.begin(), t.increasing.end());
  wanted.insert(t.decreasing.begin(), t.decreasing.end());
  for (const auto& name : wanted) {
    if (seen.count(name)) continue;
    ObservableReport o;
    o.name = name;
    o.verdict = "SKIP";
    o.detail = "observable not recorded";
    r.observables.push_back(o);
  }

  if (doc.contains("meta") && doc["meta"].value("status", "ok") != "ok") r.pass = false;
  return r;
}

std::string format_report(const Report& r) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "observable" << std::setw(14) << "initial" << std::setw(14)
      << "final" << std::setw(12) << "max_drift" << std::setw(12) << "monotone" << std::setw(6)
      << "verdict"
      << "  detail\n";
  for (const auto& o : r.observables) {
    out << std::left << std::setw(16) << o.name;
    if (o.verdict == "SKIP" && o.detail == "observable not recorded") {
      out << std::setw(14) << "-" << std::setw(14) << "-" << std::setw(12) << "-" << std::setw(12)
          << "-";
    } else {
      std::ostringstream a, b;
      a << std::setprecision(8) << o.initial;
      b << std::setprecision(8) << o.final;
      out << std::setw(14) << a.str() << std::setw(14) << b.str() << std::setw(12) << sci(o.max_drift)
          << std::setw(12) << o.monotone;
    }
    out << std::setw(6) << o.verdict << "  " << o.detail << '\n';
  }
  out << (r.pass ? "overall: PASS" : "overall: FAIL") << '\n';
  return out.str();
}

}  // namespace metriflow::harness
