#include "contactforge/flows.hpp"

#include <cmath>
#include <cstdio>

namespace cforge {

Trajectory integrate(ChartPtr chart, const VectorFieldFn& vf, std::vector<double> x0,
                     double t_end, double dt) {
  if (!(dt > 0.0)) throw Error(ErrKind::Usage, "integration step must be positive");
  Trajectory traj;
  traj.chart = chart;
  traj.dt = dt;
  const int n = chart->dim();
  if (!chart->admits(x0))
    throw Error(ErrKind::Domain, "initial state violates the chart domain");

  long steps = std::lround(t_end / dt);
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  std::vector<double> k1, k2, k3, k4, tmp(n), next(n);
  std::vector<double> x = std::move(x0);
  for (long s = 0; s < steps; ++s) {
    double t = s * dt;
    try {
      k1 = vf(x);
      for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
      k2 = vf(tmp);
      for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
      k3 = vf(tmp);
      for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
      k4 = vf(tmp);
      for (int i = 0; i < n; ++i)
        next[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::SingularFlat ||
          e.kind() == ErrKind::SingularSymplectic) {
        traj.truncated = true;
        traj.exit_time = t;
        return traj;
      }
      throw;
    }
    if (!chart->admits(next)) {
      traj.truncated = true;
      traj.exit_time = t;
      return traj;
    }
    x = next;
    traj.times.push_back((s + 1) * dt);
    traj.states.push_back(x);
  }
  return traj;
}

DissipationReport dissipation_monitor(const Trajectory& traj, const ContactForm& c,
                                      const Expr& h, const Expr& f, double dissipated_tol) {
  DissipationReport rep;
  auto pj = induced_jacobi(c);
  const auto& chart = *traj.chart;

  // dissipation is a bracket statement; check it on a thin subset of states
  std::size_t stride = std::max<std::size_t>(1, traj.states.size() / 16);
  for (std::size_t i = 0; i < traj.states.size(); i += stride)
    rep.bracket_residual =
        std::max(rep.bracket_residual, std::abs(jacobi_bracket(pj, f, h, traj.states[i])));
  rep.dissipated = rep.bracket_residual < dissipated_tol;

  double f0 = eval<double>(f, chart.coords, traj.states.front());
  // Reeb rate R(h) along the trajectory
  std::vector<double> rate(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    auto r = reeb(c, traj.states[i]);
    auto dh = gradient(h, chart, traj.states[i]);
    double v = 0.0;
    for (int k = 0; k < chart.dim(); ++k) v += r[k] * dh[k];
    rate[i] = v;
  }
  double integral = 0.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (i > 0) integral += 0.5 * traj.dt * (rate[i - 1] + rate[i]);
    double ft = eval<double>(f, chart.coords, traj.states[i]);
    rep.raw_drift = std::max(rep.raw_drift, std::abs(ft - f0));
    rep.law_residual = std::max(rep.law_residual, std::abs(ft - f0 * std::exp(-integral)));
  }
  return rep;
}

double conservation_monitor(const Trajectory& traj, const Expr& f) {
  const auto& chart = *traj.chart;
  double f0 = eval<double>(f, chart.coords, traj.states.front());
  double drift = 0.0;
  for (const auto& x : traj.states)
    drift = std::max(drift, std::abs(eval<double>(f, chart.coords, x) - f0));
  return drift;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (const auto& c : traj.chart->coords) {
    out += ',';
    out += c;
  }
  out += '\n';
  char buf[40];
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
    out += buf;
    for (double v : traj.states[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace cforge
