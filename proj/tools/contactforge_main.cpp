// contactforge: checks contact, Jacobi, Poisson and bi-Hamiltonian
// structures given as coordinate expressions in scenario files, computes
// recursion operators and their eigenvalue fields, runs symplectisations
// and flows, and emits deterministic reports.

#include <chrono>
#include <map>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "contactforge/engine.hpp"

using namespace cforge;

int main(int argc, char** argv) {
  CLI::App app{"verification engine for contact and bi-Hamiltonian structures"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::uint64_t seed = 42;
  int samples = 64;
  std::vector<std::string> tol_args;
  std::string json_path, csv_path;

  const std::map<std::string, std::string> descriptions = {
      {"check-structure", "verify the declared structure axioms"},
      {"recursion", "recursion operators, compatibility, bi-Hamiltonian fields"},
      {"involution", "pairwise bracket residuals of declared function families"},
      {"integrable", "integrability verdicts for declared systems"},
      {"symplectize", "symplectisation, lifts, projections, bracket correspondence"},
      {"nogo-report", "homogeneity table and the obstruction diagnostic"},
      {"flow", "integrate flows with invariant monitors"},
      {"all", "every declared task"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& name : known_commands()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("scenario", scenario_arg,
                    "scenario file or builtin name (poisson_example, contact_example)")
        ->required();
    sub->add_option("--seed", seed, "sampling seed");
    sub->add_option("--samples", samples, "sample points per check");
    sub->add_option("--tol", tol_args, "tolerance override NAME=VALUE");
    sub->add_option("--json", json_path, "write the machine-readable report here");
    sub->add_option("--csv", csv_path, "write flow trajectories here (flow tasks)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  std::string command;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) command = known_commands()[i];

  try {
    RunOptions opt;
    opt.seed = seed;
    opt.samples = samples;
    opt.csv_path = csv_path;
    for (const auto& t : tol_args) {
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw Error(ErrKind::Usage, "--tol expects NAME=VALUE, got '" + t + "'");
      opt.tol_overrides[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    }

    Scenario sc = load_scenario(scenario_arg);
    auto t0 = std::chrono::steady_clock::now();
    Report rep = run_command(sc, command, opt);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::cout << report_text(rep, wall);
    if (!json_path.empty()) {
      std::ofstream out(json_path, std::ios::binary);
      if (!out) throw Error(ErrKind::Usage, "cannot write '" + json_path + "'");
      out << report_json(rep);
    }
    return rep.exit_code();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == ErrKind::Usage || e.kind() == ErrKind::Parse) return 3;
    if (e.kind() == ErrKind::InternalInconsistency) return 2;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
