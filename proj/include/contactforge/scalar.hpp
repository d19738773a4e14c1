#pragma once

namespace cforge {

// Extracts the underlying double from any scalar the evaluator runs on.
// Dual numbers overload this recursively; domain checks look only at the
// primal part.
inline double primal_of(double x) { return x; }

}  // namespace cforge
