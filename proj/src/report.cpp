#include "contactforge/report.hpp"

#include <cstdio>

namespace cforge {

int Report::count(const std::string& status) const {
  int n = 0;
  for (const auto& c : checks)
    if (c.status == status) ++n;
  return n;
}

int Report::exit_code() const {
  if (count("inconsistent") > 0) return 2;
  if (count("fail") > 0) return 1;
  return 0;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

static void json_escape(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

std::string report_json(const Report& r) {
  std::string out;
  out.reserve(4096);
  out += "{\n  \"schema\": \"contactforge-report/1\",\n  \"scenario\": ";
  json_escape(r.scenario, out);
  out += ",\n  \"seed\": " + std::to_string(r.seed);
  out += ",\n  \"samples\": " + std::to_string(r.samples);
  out += ",\n  \"tolerances\": {";
  for (std::size_t i = 0; i < r.tolerances.size(); ++i) {
    if (i) out += ", ";
    json_escape(r.tolerances[i].first, out);
    out += ": ";
    out += format_double(r.tolerances[i].second);
  }
  out += "},\n  \"checks\": [\n";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const auto& c = r.checks[i];
    out += "    {\"name\": ";
    json_escape(c.name, out);
    out += ", \"status\": ";
    json_escape(c.status, out);
    out += ", \"residual\": " + format_double(c.residual);
    out += ", \"tolerance\": " + format_double(c.tolerance);
    out += ", \"samples_used\": " + std::to_string(c.samples_used);
    out += ", \"skipped\": " + std::to_string(c.skipped);
    out += ", \"worst_point\": [";
    for (std::size_t k = 0; k < c.worst_point.size(); ++k) {
      if (k) out += ", ";
      out += format_double(c.worst_point[k]);
    }
    out += "]";
    if (!c.details.empty()) {
      out += ", \"details\": {";
      for (std::size_t k = 0; k < c.details.size(); ++k) {
        if (k) out += ", ";
        json_escape(c.details[k].first, out);
        out += ": ";
        json_escape(c.details[k].second, out);
      }
      out += "}";
    }
    out += "}";
    if (i + 1 < r.checks.size()) out += ",";
    out += "\n";
  }
  out += "  ],\n  \"summary\": {\"pass\": " + std::to_string(r.count("pass"));
  out += ", \"fail\": " + std::to_string(r.count("fail"));
  out += ", \"skipped\": " + std::to_string(r.count("skipped"));
  out += ", \"inconsistent\": " + std::to_string(r.count("inconsistent"));
  out += ", \"exit_code\": " + std::to_string(r.exit_code());
  out += "}\n}\n";
  return out;
}

std::string report_text(const Report& r, double wall_seconds) {
  std::string out;
  out += "scenario: " + r.scenario + "  (seed " + std::to_string(r.seed) + ", " +
         std::to_string(r.samples) + " samples)\n";
  for (const auto& c : r.checks) {
    char line[160];
    std::snprintf(line, sizeof line, "  [%-12s] %-44s residual %.3g", c.status.c_str(),
                  c.name.c_str(), c.residual);
    out += line;
    if (c.skipped > 0) out += " (skipped " + std::to_string(c.skipped) + ")";
    out += "\n";
    for (const auto& [k, v] : c.details) out += "      " + k + ": " + v + "\n";
  }
  char tail[160];
  std::snprintf(tail, sizeof tail,
                "  %d pass, %d fail, %d skipped, %d inconsistent  (%.3f s)\n",
                r.count("pass"), r.count("fail"), r.count("skipped"),
                r.count("inconsistent"), wall_seconds);
  out += tail;
  return out;
}

}  // namespace cforge
