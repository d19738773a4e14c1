#include "contactforge/sampling.hpp"

namespace cforge {

std::vector<std::vector<double>> sample_points(
    const Chart& chart, int n, std::uint64_t seed,
    const std::map<std::string, std::pair<double, double>>& boxes, double margin) {
  if (n <= 0) throw Error(ErrKind::Usage, "sample count must be positive");
  Rng rng(seed);
  const int dim = chart.dim();
  std::vector<std::pair<double, double>> box(dim, {-2.0, 2.0});
  for (int i = 0; i < dim; ++i) {
    auto it = boxes.find(chart.coords[i]);
    if (it != boxes.end()) box[i] = it->second;
  }
  std::vector<std::vector<double>> out;
  out.reserve(n);
  std::vector<double> x(dim);
  constexpr long kMaxAttempts = 1000000;
  long attempts = 0;
  while (int(out.size()) < n) {
    if (++attempts > kMaxAttempts)
      throw Error(ErrKind::RejectionExhausted,
                  "constraints admit too few points in the sampling box (found " +
                      std::to_string(out.size()) + " of " + std::to_string(n) + ")");
    for (int i = 0; i < dim; ++i) x[i] = rng.uniform(box[i].first, box[i].second);
    bool ok = true;
    for (const Expr& c : chart.positive) {
      double v;
      try {
        v = eval<double>(c, chart.coords, x);
      } catch (const Error&) {
        ok = false;
        break;
      }
      if (!(v >= margin)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(x);
  }
  return out;
}

}  // namespace cforge
