#pragma once

// Explicit time stepping for vector, matrix and spectral states.
//
// A State must support State + State, double * State, and the free functions
// max_abs(State) and is_finite(State) (found by ADL or declared below for Eigen
// types). Fields are plain callables State -> State.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "metriflow/circle_field.hpp"

namespace metriflow::integrate {

enum class Method { rk4, rk45_adaptive, integrating_factor_rk4 };

const char* to_string(Method m);
Method method_from_string(const std::string& name);

struct IntegratorConfig {
  Method method = Method::rk4;
  double dt = 1e-3;      // fixed step, or initial step for rk45_adaptive
  double t_max = 1.0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int observer_stride = 1;
  double min_dt = 1e-12;
  bool keep_states = true;
};

/// Throws std::invalid_argument for a non-positive dt or tolerance, dt ≥ t_max,
/// or stride < 1.
void validate(const IntegratorConfig& config);

enum class Status { ok, nan_detected, step_underflow };
const char* to_string(Status s);

template <class State>
using Diagnostic = std::pair<std::string, std::function<double(const State&)>>;

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;  // empty when keep_states is false
  std::vector<std::string> diagnostic_names;
  std::vector<std::vector<double>> diagnostics;  // one series per name, aligned with times
  Status status = Status::ok;
  std::string message;
  State last_good{};
  double last_good_time = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;

  const std::vector<double>& series(const std::string& name) const {
    for (std::size_t i = 0; i < diagnostic_names.size(); ++i) {
      if (diagnostic_names[i] == name) return diagnostics[i];
    }
    throw std::out_of_range("Trajectory: no diagnostic named '" + name + "'");
  }
};

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline bool is_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }
inline bool is_finite(const Eigen::VectorXd& v) { return v.allFinite(); }
inline bool is_finite(const circle::PeriodicField& u) { return u.is_finite(); }
using circle::max_abs;

template <class State>
using Field = std::function<State(const State&)>;

/// Split u_t = Λ(u₀)u + N(u) for the integrating-factor method. linear returns
/// the per-mode multiplier Λ(n), n = 0..order, evaluated at the state at the
/// start of each step and held fixed over it. remainder defaults to
/// field(u) - Λu.
struct StiffSplit {
  Field<circle::PeriodicField> field;
  std::function<circle::ModeMultiplier(const circle::PeriodicField&)> linear;
  Field<circle::PeriodicField> remainder;
};

namespace detail {

template <class State>
State rk4_step(const Field<State>& f, const State& y, double h) {
  const State k1 = f(y);
  const State k2 = f(State(y + (0.5 * h) * k1));
  const State k3 = f(State(y + (0.5 * h) * k2));
  const State k4 = f(State(y + h * k3));
  return State(y + (h / 6.0) * State(k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b̂ (fifth minus embedded fourth order weights)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <class State>
std::pair<State, State> dopri_step(const Field<State>& f, const State& y, double h) {
  using D = DormandPrince;
  const State k1 = f(y);
  const State k2 = f(State(y + (h * D::a21) * k1));
  const State k3 = f(State(y + h * State(D::a31 * k1 + D::a32 * k2)));
  const State k4 = f(State(y + h * State(D::a41 * k1 + D::a42 * k2 + D::a43 * k3)));
  const State k5 =
      f(State(y + h * State(D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4)));
  const State k6 = f(
      State(y + h * State(D::a61 * k1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 + D::a65 * k5)));
  const State y5 =
      State(y + h * State(D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6));
  const State k7 = f(y5);
  const State err =
      State(h * State(D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 + D::e6 * k6 + D::e7 * k7));
  return {y5, err};
}

template <class State>
class Recorder {
 public:
  Recorder(Trajectory<State>& traj, const std::vector<Diagnostic<State>>& diags, bool keep)
      : traj_(traj), diags_(diags), keep_(keep) {
    for (const auto& d : diags_) traj_.diagnostic_names.push_back(d.first);
    traj_.diagnostics.resize(diags_.size());
  }

  void record(double t, const State& y) {
    traj_.times.push_back(t);
    if (keep_) traj_.states.push_back(y);
    for (std::size_t i = 0; i < diags_.size(); ++i) traj_.diagnostics[i].push_back(diags_[i].second(y));
  }

 private:
  Trajectory<State>& traj_;
  const std::vector<Diagnostic<State>>& diags_;
  bool keep_;
};

// Fixed-step driver shared by rk4 and the integrating-factor method.
template <class State, class Step>
Trajectory<State> fixed_step(Step step, State y, const IntegratorConfig& config,
                             const std::vector<Diagnostic<State>>& diags) {
  Trajectory<State> traj;
  Recorder<State> rec(traj, diags, config.keep_states);
  rec.record(0.0, y);
  traj.last_good = y;
  const auto steps = static_cast<long>(std::ceil(config.t_max / config.dt - 1e-7));
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    const double t_next = (i + 1 == steps) ? config.t_max : static_cast<double>(i + 1) * config.dt;
    State next = step(y, t_next - t);
    if (!is_finite(next)) {
      traj.status = Status::nan_detected;
      traj.message = "non-finite state at t = " + std::to_string(t_next);
      return traj;
    }
    y = std::move(next);
    t = t_next;
    ++traj.accepted_steps;
    traj.last_good = y;
    traj.last_good_time = t;
    if ((i + 1) % config.observer_stride == 0 || i + 1 == steps) rec.record(t, y);
  }
  return traj;
}

}  // namespace detail

template <class State>
Trajectory<State> integrate_rk4(const Field<State>& f, State y0, const IntegratorConfig& config,
                                const std::vector<Diagnostic<State>>& diags = {}) {
  validate(config);
  return detail::fixed_step<State>(
      [&f](const State& y, double h) { return detail::rk4_step(f, y, h); }, std::move(y0), config,
      diags);
}

template <class State>
Trajectory<State> integrate_rk45(const Field<State>& f, State y0, const IntegratorConfig& config,
                                 const std::vector<Diagnostic<State>>& diags = {}) {
  validate(config);
  Trajectory<State> traj;
  detail::Recorder<State> rec(traj, diags, config.keep_states);
  State y = std::move(y0);
  rec.record(0.0, y);
  traj.last_good = y;
  double t = 0.0;
  double h = config.dt;
  long accepted = 0;
  while (t < config.t_max) {
    const bool last = t + h >= config.t_max * (1.0 - 1e-14);
    const double step = last ? config.t_max - t : h;
    auto [y_new, err] = detail::dopri_step(f, y, step);
    double ratio = std::numeric_limits<double>::infinity();
    if (is_finite(y_new) && is_finite(err)) {
      const double scale =
          config.abs_tol + config.rel_tol * std::max(max_abs(y), max_abs(y_new));
      ratio = max_abs(err) / scale;
    }
    if (ratio <= 1.0) {
      t = last ? config.t_max : t + step;
      y = std::move(y_new);
      ++accepted;
      ++traj.accepted_steps;
      traj.last_good = y;
      traj.last_good_time = t;
      if (accepted % config.observer_stride == 0 || t >= config.t_max) rec.record(t, y);
      const double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
      h = step * std::clamp(grow, 0.2, 5.0);
    } else {
      ++traj.rejected_steps;
      const double shrink = std::isfinite(ratio) ? 0.9 * std::pow(ratio, -0.25) : 0.25;
      h = step * std::clamp(shrink, 0.1, 0.5);
      if (h < config.min_dt) {
        traj.status = Status::step_underflow;
        traj.message = "step size fell below " + std::to_string(config.min_dt) + " at t = " +
                       std::to_string(t);
        return traj;
      }
    }
  }
  return traj;
}

/// Dispatches on config.method; integrating_factor_rk4 is only available for
/// spectral states (see the StiffSplit overload).
template <class State>
Trajectory<State> integrate(const Field<State>& f, State y0, const IntegratorConfig& config,
                            const std::vector<Diagnostic<State>>& diags = {}) {
  switch (config.method) {
    case Method::rk4:
      return integrate_rk4(f, std::move(y0), config, diags);
    case Method::rk45_adaptive:
      return integrate_rk45(f, std::move(y0), config, diags);
    case Method::integrating_factor_rk4:
      break;
  }
  throw std::invalid_argument("integrate: integrating_factor_rk4 needs a spectral stiff split");
}

/// One Lawson integrating-factor RK4 step with Λ frozen at u.
circle::PeriodicField if_rk4_step(const StiffSplit& split, const circle::PeriodicField& u, double h);

Trajectory<circle::PeriodicField> integrate(const StiffSplit& split, circle::PeriodicField u0,
                                            const IntegratorConfig& config,
                                            const std::vector<Diagnostic<circle::PeriodicField>>& diags = {});

// ---- convergence -------------------------------------------------------------

struct ConvergenceReport {
  std::vector<double> dts;
  std::vector<double> differences;  // ‖y(dt_i) - y(dt_{i+1})‖_max
  std::vector<double> orders;       // log(d_i/d_{i+1}) / log(dt_i/dt_{i+1})
  double observed_order = 0.0;
  bool reliable = false;
  bool roundoff_limited = false;
  std::string note;
};

/// Self-convergence from solutions at ≥ 3 decreasing step sizes. The estimate
/// is flagged unreliable when successive orders disagree by more than 0.5, are
/// not finite, or (for nominal_order > 0) the observed order is more than 0.5
/// away from the nominal one. It is roundoff-limited when the finest difference
/// is below 1e-13 of the solution scale.
ConvergenceReport convergence_from_differences(const std::vector<double>& dts,
                                               const std::vector<double>& differences,
                                               double solution_scale, double nominal_order = 0.0);

template <class State>
ConvergenceReport convergence_study(const std::function<State(double dt)>& solve,
                                    const std::vector<double>& dts, double nominal_order = 0.0) {
  if (dts.size() < 3) throw std::invalid_argument("convergence_study: need at least 3 step sizes");
  std::vector<State> sols;
  for (double dt : dts) sols.push_back(solve(dt));
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < sols.size(); ++i) {
    diffs.push_back(max_abs(State(sols[i] - sols[i + 1])));
  }
  return convergence_from_differences(dts, diffs, max_abs(sols.back()), nominal_order);
}

/// Convenience: final states of integrate() at each dt up to t_end.
template <class State>
ConvergenceReport convergence_study(const Field<State>& f, const State& y0, double t_end,
                                    const std::vector<double>& dts, Method method = Method::rk4) {
  return convergence_study<State>(
      [&](double dt) {
        IntegratorConfig cfg;
        cfg.method = method;
        cfg.dt = dt;
        cfg.t_max = t_end;
        cfg.keep_states = false;
        cfg.observer_stride = std::numeric_limits<int>::max();
        auto traj = integrate(f, y0, cfg);
        if (traj.status != Status::ok) throw std::runtime_error("convergence_study: " + traj.message);
        return traj.last_good;
      },
      dts, method == Method::rk45_adaptive ? 0.0 : 4.0);
}

ConvergenceReport convergence_study(const StiffSplit& split, const circle::PeriodicField& u0,
                                    double t_end, const std::vector<double>& dts,
                                    Method method = Method::integrating_factor_rk4);

}  // namespace metriflow::integrate
