#pragma once

#include "contactforge/report.hpp"
#include "contactforge/sampling.hpp"
#include "contactforge/scenario.hpp"

namespace cforge {

struct RunOptions {
  std::uint64_t seed = 42;
  int samples = 64;
  std::map<std::string, double> tol_overrides;
  std::string csv_path;  // trajectory export for flow tasks
};

const std::vector<std::string>& known_commands();

// Executes one command over a scenario: structure verification first, then
// the scenario's tasks that belong to the command, in declaration order.
// Checks across tasks may run in parallel (capped by CONTACTFORGE_THREADS);
// the report order does not depend on the schedule.
Report run_command(const Scenario& sc, const std::string& command, const RunOptions& opt);

}  // namespace cforge
