#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cforge {

// One verdict line of a run. `status` is one of pass, fail, skipped,
// inconsistent. Details are ordered key/value pairs so serialisation is
// reproducible byte for byte.
struct CheckRecord {
  std::string name;
  std::string status;
  double residual = 0.0;
  double tolerance = 0.0;
  int samples_used = 0;
  int skipped = 0;
  std::vector<double> worst_point;
  std::vector<std::pair<std::string, std::string>> details;
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<std::pair<std::string, double>> tolerances;
  std::vector<CheckRecord> checks;

  int count(const std::string& status) const;
  // 0 all pass, 1 any fail, 2 any inconsistent
  int exit_code() const;
};

std::string format_double(double v);  // 17 significant digits

// Machine-readable report. Deterministic for a fixed (scenario, seed,
// tolerance) triple: no timing data, fixed key order, fixed float format.
std::string report_json(const Report& r);

// Human-readable summary; wall time goes here and only here.
std::string report_text(const Report& r, double wall_seconds);

}  // namespace cforge
