#pragma once

// Check/report plumbing shared by all verifiers, with byte-stable JSON and
// table serialization.

#include <cstdio>
#include <string>
#include <vector>

namespace qdeform {

struct Check {
  std::string name;
  std::string anchor;  // short identity tag, e.g. "pentagon:W"
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline Check make_check(std::string name, std::string anchor, double defect,
                        double tolerance) {
  bool pass = defect <= tolerance;
  return Check{std::move(name), std::move(anchor), defect, tolerance, pass};
}

struct Report {
  std::string suite;
  std::vector<Check> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  double max_defect() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.defect);
    return m;
  }
  void add(Check c) { checks.push_back(std::move(c)); }
  void add(std::string name, std::string anchor, double defect, double tol) {
    checks.push_back(make_check(std::move(name), std::move(anchor), defect, tol));
  }
  void merge(const Report& other, const std::string& prefix = "") {
    for (auto c : other.checks) {
      if (!prefix.empty()) c.name = prefix + c.name;
      checks.push_back(std::move(c));
    }
  }
};

// Fixed 17-significant-digit float format so serialized reports are
// byte-stable across runs.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if ((unsigned char)ch < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

struct ReportEnvironment {
  unsigned long long seed = 0;
  double tol_identity = 1e-10;
  double tol_span = 1e-8;
  std::string version = "1.0.0";
};

inline std::string to_json(const std::vector<Report>& reports,
                           const ReportEnvironment& env) {
  std::string out = "{\n  \"schema\": 1,\n";
  out += "  \"environment\": {\"seed\": " + std::to_string(env.seed) +
         ", \"tol_identity\": " + format_double(env.tol_identity) +
         ", \"tol_span\": " + format_double(env.tol_span) + ", \"version\": \"" +
         json_escape(env.version) + "\"},\n";
  out += "  \"suites\": [\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out += "    {\"suite\": \"" + json_escape(r.suite) + "\", \"pass\": " +
           (r.pass() ? "true" : "false") + ", \"checks\": [\n";
    for (size_t k = 0; k < r.checks.size(); ++k) {
      const auto& c = r.checks[k];
      out += "      {\"name\": \"" + json_escape(c.name) + "\", \"anchor\": \"" +
             json_escape(c.anchor) + "\", \"defect\": " + format_double(c.defect) +
             ", \"tolerance\": " + format_double(c.tolerance) + ", \"pass\": " +
             (c.pass ? "true" : "false") + "}";
      out += (k + 1 < r.checks.size()) ? ",\n" : "\n";
    }
    out += "    ]}";
    out += (i + 1 < reports.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

inline std::string to_table(const std::vector<Report>& reports) {
  std::string out;
  for (const auto& r : reports) {
    out += "suite " + r.suite + ": " + (r.pass() ? "PASS" : "FAIL") + "\n";
    for (const auto& c : r.checks) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "  %-58s %-24s defect=%.3e tol=%.0e %s\n",
                    c.name.c_str(), c.anchor.c_str(), c.defect, c.tolerance,
                    c.pass ? "ok" : "FAIL");
      out += buf;
    }
  }
  return out;
}

}  // namespace qdeform
