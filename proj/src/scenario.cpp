#include "contactforge/scenario.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "builtin_scenarios.hpp"

namespace cforge {

const Expr& Scenario::scalar(const std::string& n) const {
  auto it = scalars.find(n);
  if (it == scalars.end())
    throw Error(ErrKind::UnknownReference, "scalar '" + n + "' is not declared");
  return it->second;
}

static const TensorField& find_field(const std::map<std::string, TensorField>& m,
                                     const std::string& n, const char* what) {
  auto it = m.find(n);
  if (it == m.end())
    throw Error(ErrKind::UnknownReference, std::string(what) + " '" + n + "' is not declared");
  return it->second;
}

const TensorField& Scenario::vector_field(const std::string& n) const {
  return find_field(vectors, n, "vector field");
}
const TensorField& Scenario::one_form(const std::string& n) const {
  return find_field(oneforms, n, "one-form");
}
const TensorField& Scenario::bivector_field(const std::string& n) const {
  return find_field(bivectors, n, "bivector");
}

const StructureDecl& Scenario::structure(const std::string& n) const {
  for (const auto& s : structures)
    if (s.name == n) return s;
  throw Error(ErrKind::UnknownReference, "structure '" + n + "' is not declared");
}

const SystemDecl& Scenario::system(const std::string& n) const {
  for (const auto& s : systems)
    if (s.name == n) return s;
  throw Error(ErrKind::UnknownReference, "system '" + n + "' is not declared");
}

namespace {

Expr parse_component(const std::string& text, const std::string& where, int line) {
  try {
    return parse(text);
  } catch (const ParseError& pe) {
    throw Error(ErrKind::Parse,
                where + ": " + pe.what() + " (scenario line " + std::to_string(line) + ")");
  }
}

void check_bound(const Expr& e, const Chart& chart, const std::string& where) {
  for (const auto& v : e.free_variables())
    if (!chart.has_coord(v))
      throw Error(ErrKind::UnknownReference,
                  where + " references '" + v + "', which is not a coordinate of chart '" +
                      chart.name + "'");
}

// "x1,p1" or "1,3" (1-based) -> index tuple
IndexTuple parse_indices(const std::string& key, const Chart& chart, const std::string& where) {
  IndexTuple idx;
  std::string token;
  std::stringstream ss(key);
  while (std::getline(ss, token, ',')) {
    std::size_t b = token.find_first_not_of(" \t");
    std::size_t e = token.find_last_not_of(" \t");
    if (b == std::string::npos)
      throw Error(ErrKind::Parse, where + ": empty index in component key '" + key + "'");
    token = token.substr(b, e - b + 1);
    bool numeric = !token.empty();
    for (char c : token)
      if (!std::isdigit(static_cast<unsigned char>(c))) numeric = false;
    if (numeric) {
      int one_based = std::stoi(token);
      if (one_based < 1 || one_based > chart.dim())
        throw Error(ErrKind::IndexOutOfRange,
                    where + ": index " + token + " is outside 1.." +
                        std::to_string(chart.dim()));
      idx.push_back(one_based - 1);
    } else {
      idx.push_back(chart.index_of(token));
    }
  }
  IndexTuple sorted = idx;
  int s = sort_sign(sorted);
  if (s == 0)
    throw Error(ErrKind::AntisymmetryViolation,
                where + ": repeated index in component '" + key + "'");
  if (sorted != idx)
    throw Error(ErrKind::AntisymmetryViolation,
                where + ": component '" + key +
                    "' must list indices in increasing coordinate order");
  return idx;
}

void load_fields(const TomlDoc& doc, const std::string& prefix, FieldKind kind, int degree,
                 const ChartPtr& chart, std::map<std::string, TensorField>& out) {
  for (const auto& [path, kv] : doc.tables) {
    if (path.rfind(prefix + ".", 0) != 0) continue;
    std::string name = path.substr(prefix.size() + 1);
    TensorField f = make_field(chart, kind, degree);
    for (const auto& [key, val] : kv) {
      std::string where = "[" + path + "] " + key;
      IndexTuple idx = parse_indices(key, *chart, where);
      Expr e = parse_component(val.as_string(), where, val.line);
      check_bound(e, *chart, where);
      f.set(idx, e);
    }
    out.emplace(name, std::move(f));
  }
}

}  // namespace

Scenario load_scenario_text(const std::string& toml_text, const std::string& source_name) {
  TomlDoc doc = toml_parse(toml_text);
  Scenario sc;

  if (const TomlValue* v = doc.find(doc.root, "name")) sc.name = v->as_string();
  if (sc.name.empty()) sc.name = source_name;
  if (const TomlValue* v = doc.find(doc.root, "description")) sc.description = v->as_string();

  const TomlKeyValues* chart_kv = doc.table("chart");
  if (!chart_kv) throw Error(ErrKind::Parse, "scenario is missing the [chart] block");
  std::string chart_name = "chart";
  std::vector<std::string> coords;
  std::vector<Expr> positive;
  for (const auto& [k, v] : *chart_kv) {
    if (k == "name") chart_name = v.as_string();
    else if (k == "coords") coords = v.as_string_array();
    else if (k == "positive") {
      for (const auto& s : v.as_string_array()) positive.push_back(parse(s));
    } else {
      throw Error(ErrKind::Parse, "unknown key '" + k + "' in [chart]");
    }
  }
  if (coords.empty()) throw Error(ErrKind::Parse, "[chart] needs a coords list");
  sc.chart = make_chart(chart_name, coords, positive);
  for (const Expr& c : sc.chart->positive) check_bound(c, *sc.chart, "[chart] positive");

  if (const TomlKeyValues* kv = doc.table("sampling")) {
    for (const auto& [k, v] : *kv) {
      if (!sc.chart->has_coord(k))
        throw Error(ErrKind::UnknownReference, "[sampling] names unknown coordinate '" + k + "'");
      auto arr = v.as_number_array();
      if (arr.size() != 2 || !(arr[0] < arr[1]))
        throw Error(ErrKind::Parse, "[sampling] " + k + " needs [lo, hi] with lo < hi");
      sc.sampling_box[k] = {arr[0], arr[1]};
    }
  }

  if (const TomlKeyValues* kv = doc.table("tolerances")) {
    for (const auto& [k, v] : *kv) sc.tolerances[k] = v.as_number();
  }

  if (const TomlKeyValues* kv = doc.table("scalars")) {
    for (const auto& [k, v] : *kv) {
      Expr e = parse_component(v.as_string(), "[scalars] " + k, v.line);
      check_bound(e, *sc.chart, "[scalars] " + k);
      sc.scalars.emplace(k, std::move(e));
    }
  }
  // coordinates double as scalar fields unless shadowed by a declaration
  for (const auto& c : sc.chart->coords)
    if (!sc.scalars.count(c)) sc.scalars.emplace(c, Expr::variable(c));

  load_fields(doc, "vectors", FieldKind::Multivector, 1, sc.chart, sc.vectors);
  load_fields(doc, "oneforms", FieldKind::Form, 1, sc.chart, sc.oneforms);
  load_fields(doc, "bivectors", FieldKind::Multivector, 2, sc.chart, sc.bivectors);

  auto arr_it = doc.table_arrays.find("structure");
  if (arr_it != doc.table_arrays.end()) {
    for (const auto& kv : arr_it->second) {
      StructureDecl d;
      for (const auto& [k, v] : kv) {
        if (k == "kind") d.kind = v.as_string();
        else if (k == "name") d.name = v.as_string();
        else if (k == "bivector") d.bivector = v.as_string();
        else if (k == "vector") d.vector = v.as_string();
        else if (k == "oneform") d.oneform = v.as_string();
        else if (k == "induced") d.induced = v.as_string();
        else if (k == "verify") d.verify = v.as_bool();
        else throw Error(ErrKind::Parse, "unknown key '" + k + "' in [[structure]]");
      }
      if (d.name.empty()) throw Error(ErrKind::Parse, "[[structure]] needs a name");
      if (d.kind == "poisson") {
        sc.bivector_field(d.bivector);
      } else if (d.kind == "jacobi") {
        sc.bivector_field(d.bivector);
        sc.vector_field(d.vector);
      } else if (d.kind == "contact") {
        sc.one_form(d.oneform);
        if (sc.chart->dim() % 2 == 0)
          throw Error(ErrKind::ChartMismatch,
                      "contact structure '" + d.name + "' needs an odd-dimensional chart");
      } else if (d.kind == "exact_symplectic") {
        sc.one_form(d.oneform);
        if (sc.chart->dim() % 2 != 0)
          throw Error(ErrKind::ChartMismatch,
                      "exact symplectic structure '" + d.name +
                          "' needs an even-dimensional chart");
      } else {
        throw Error(ErrKind::Parse, "unknown structure kind '" + d.kind + "'");
      }
      sc.structures.push_back(std::move(d));
    }
  }
  for (const auto& s : sc.structures)
    if (!s.induced.empty() && sc.structure(s.induced).kind != "jacobi")
      throw Error(ErrKind::UnknownReference,
                  "induced reference '" + s.induced + "' must name a jacobi structure");

  auto sys_it = doc.table_arrays.find("system");
  if (sys_it != doc.table_arrays.end()) {
    for (const auto& kv : sys_it->second) {
      SystemDecl d;
      for (const auto& [k, v] : kv) {
        if (k == "name") d.name = v.as_string();
        else if (k == "structure") d.structure = v.as_string();
        else if (k == "hamiltonian") d.hamiltonian = v.as_string();
        else if (k == "liouville") d.liouville = v.as_string();
        else if (k == "integrals") d.integrals = v.as_string_array();
        else throw Error(ErrKind::Parse, "unknown key '" + k + "' in [[system]]");
      }
      sc.structure(d.structure);
      sc.scalar(d.hamiltonian);
      if (!d.liouville.empty()) sc.vector_field(d.liouville);
      for (const auto& f : d.integrals) sc.scalar(f);
      sc.systems.push_back(std::move(d));
    }
  }

  auto task_it = doc.table_arrays.find("task");
  if (task_it != doc.table_arrays.end()) {
    std::map<std::string, int> counts;
    for (const auto& kv : task_it->second) {
      TaskDecl t;
      for (const auto& [k, v] : kv) {
        if (k == "check") t.check = v.as_string();
        t.params.emplace_back(k, v);
      }
      if (t.check.empty()) throw Error(ErrKind::Parse, "[[task]] needs a check kind");
      std::string suffix;
      for (const auto& [k, v] : t.params) {
        if (k == "object" || k == "bracket" || k == "system") {
          suffix = v.as_string();
          break;
        }
      }
      std::string base = t.check + (suffix.empty() ? "" : "/" + suffix);
      int n = ++counts[base];
      t.label = n == 1 ? base : base + "#" + std::to_string(n);
      sc.tasks.push_back(std::move(t));
    }
  }
  return sc;
}

std::vector<std::string> builtin_scenario_names() {
  return {"poisson_example", "contact_example"};
}

const char* builtin_scenario_text(const std::string& name) {
  if (name == "poisson_example") return kPoissonExampleToml;
  if (name == "contact_example") return kContactExampleToml;
  return nullptr;
}

Scenario load_scenario(const std::string& name_or_path) {
  if (const char* text = builtin_scenario_text(name_or_path))
    return load_scenario_text(text, name_or_path);
  std::ifstream in(name_or_path);
  if (!in)
    throw Error(ErrKind::Usage, "'" + name_or_path +
                                    "' is neither a builtin scenario nor a readable file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario_text(ss.str(), name_or_path);
}

}  // namespace cforge
