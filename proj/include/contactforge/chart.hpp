#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "contactforge/errors.hpp"
#include "contactforge/expr.hpp"

namespace cforge {

// A single coordinate chart. Every field in a scenario lives on exactly one
// chart; domain constraints are expressions required strictly positive.
struct Chart {
  std::string name;
  std::vector<std::string> coords;
  std::vector<Expr> positive;  // each must evaluate > 0 on the domain

  int dim() const { return int(coords.size()); }

  int index_of(std::string_view coord) const {
    for (int i = 0; i < dim(); ++i)
      if (coords[i] == coord) return i;
    throw Error(ErrKind::UnknownReference,
                "'" + std::string(coord) + "' is not a coordinate of chart '" + name + "'");
  }

  bool has_coord(std::string_view coord) const {
    for (const auto& c : coords)
      if (c == coord) return true;
    return false;
  }

  // True if x satisfies every declared constraint with the given margin.
  bool admits(std::span<const double> x, double margin = 0.0) const {
    for (const Expr& c : positive) {
      double v = eval<double>(c, coords, x);
      if (!(v >= margin)) return false;
    }
    return true;
  }
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::string name, std::vector<std::string> coords,
                           std::vector<Expr> positive = {}) {
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j)
      if (coords[i] == coords[j])
        throw Error(ErrKind::NameCollision, "duplicate coordinate '" + coords[i] + "'");
  auto c = std::make_shared<Chart>();
  c->name = std::move(name);
  c->coords = std::move(coords);
  c->positive = std::move(positive);
  return c;
}

}  // namespace cforge
