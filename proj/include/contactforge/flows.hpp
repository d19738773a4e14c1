#pragma once

#include <string>

#include "contactforge/structures.hpp"

namespace cforge {

struct Trajectory {
  ChartPtr chart;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  bool truncated = false;  // left the chart domain before t_end
  double exit_time = 0.0;
  std::string integrator = "rk4";
};

using VectorFieldFn = std::function<std::vector<double>(std::span<const double>)>;

// Classical fixed-step fourth-order Runge-Kutta. A step whose stages leave
// the chart domain truncates the trajectory and records the exit time.
Trajectory integrate(ChartPtr chart, const VectorFieldFn& vf, std::vector<double> x0,
                     double t_end, double dt);

struct DissipationReport {
  bool dissipated = true;       // |{f, h}| stayed below tol along the way
  double bracket_residual = 0.0;
  double law_residual = 0.0;    // max |f(x_t) - f(x_0) exp(-int R(h))|
  double raw_drift = 0.0;       // max |f(x_t) - f(x_0)|, shown for non-dissipated f
};

// Checks the exponential decay law of a dissipated quantity along a contact
// Hamiltonian trajectory; the Reeb-rate integral runs on the same grid by
// the trapezoid rule.
DissipationReport dissipation_monitor(const Trajectory& traj, const ContactForm& c,
                                      const Expr& h, const Expr& f,
                                      double dissipated_tol = 1e-8);

// max_t |F(x_t) - F(x_0)|.
double conservation_monitor(const Trajectory& traj, const Expr& f);

// CSV export: header "t,<coords...>", 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace cforge
