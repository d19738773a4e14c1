#pragma once

#include "contactforge/tensor.hpp"
#include "contactforge/toml.hpp"

namespace cforge {

// Declarations as they appear in a scenario file. Tasks keep their raw
// parameter tables; the engine interprets them per check kind.
struct StructureDecl {
  std::string kind;  // poisson | jacobi | contact | exact_symplectic
  std::string name;
  std::string bivector, vector, oneform;
  std::string induced;  // contact: name of the declared closed-form Jacobi structure
  bool verify = true;
};

struct SystemDecl {
  std::string name;
  std::string structure;
  std::string hamiltonian;
  std::string liouville;  // vector field name, homogeneous systems
  std::vector<std::string> integrals;
};

struct TaskDecl {
  std::string check;
  std::string label;  // deterministic report name
  TomlKeyValues params;
};

struct Scenario {
  std::string name;
  std::string description;
  ChartPtr chart;
  std::map<std::string, Expr> scalars;
  std::map<std::string, TensorField> vectors;
  std::map<std::string, TensorField> oneforms;
  std::map<std::string, TensorField> bivectors;
  std::vector<StructureDecl> structures;
  std::vector<SystemDecl> systems;
  std::vector<TaskDecl> tasks;
  std::map<std::string, std::pair<double, double>> sampling_box;
  std::map<std::string, double> tolerances;

  const Expr& scalar(const std::string& n) const;
  const TensorField& vector_field(const std::string& n) const;
  const TensorField& one_form(const std::string& n) const;
  const TensorField& bivector_field(const std::string& n) const;
  const StructureDecl& structure(const std::string& n) const;
  const SystemDecl& system(const std::string& n) const;
};

Scenario load_scenario_text(const std::string& toml_text, const std::string& source_name);

// Resolves builtin names first, then treats the argument as a file path.
Scenario load_scenario(const std::string& name_or_path);

std::vector<std::string> builtin_scenario_names();
const char* builtin_scenario_text(const std::string& name);  // nullptr when absent

}  // namespace cforge
