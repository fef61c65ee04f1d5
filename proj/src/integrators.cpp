#include "metriflow/integrators.hpp"

#include <cmath>
#include <sstream>

namespace metriflow::integrate {

using circle::ModeMultiplier;
using circle::PeriodicField;

const char* to_string(Method m) {
  switch (m) {
    case Method::rk4:
      return "rk4";
    case Method::rk45_adaptive:
      return "rk45_adaptive";
    case Method::integrating_factor_rk4:
      return "integrating_factor_rk4";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "rk4") return Method::rk4;
  if (name == "rk45_adaptive" || name == "rk45") return Method::rk45_adaptive;
  if (name == "integrating_factor_rk4" || name == "if_rk4") return Method::integrating_factor_rk4;
  throw std::invalid_argument("unknown integrator method '" + name +
                              "' (expected rk4, rk45_adaptive or integrating_factor_rk4)");
}

const char* to_string(Status s) {
  switch (s) {
    case Status::ok:
      return "ok";
    case Status::nan_detected:
      return "nan_detected";
    case Status::step_underflow:
      return "step_underflow";
  }
  return "?";
}

void validate(const IntegratorConfig& c) {
  std::ostringstream msg;
  if (!(c.dt > 0.0)) msg << "dt must be positive; ";
  if (!(c.t_max > 0.0)) msg << "t_max must be positive; ";
  if (c.dt > 0.0 && c.t_max > 0.0 && !(c.dt < c.t_max)) msg << "dt must be smaller than t_max; ";
  if (c.method == Method::rk45_adaptive && !(c.abs_tol > 0.0 && c.rel_tol > 0.0)) {
    msg << "tolerances must be positive; ";
  }
  if (c.observer_stride < 1) msg << "observer_stride must be >= 1; ";
  if (!msg.str().empty()) throw std::invalid_argument("integrator config: " + msg.str());
}

PeriodicField if_rk4_step(const StiffSplit& split, const PeriodicField& u, double h) {
  const ModeMultiplier lambda = split.linear(u);
  if (lambda.size() != static_cast<std::size_t>(u.order()) + 1) {
    throw std::invalid_argument("if_rk4_step: linear multiplier has the wrong number of modes");
  }
  ModeMultiplier half(lambda.size());
  for (std::size_t n = 0; n < lambda.size(); ++n) half[n] = std::exp(0.5 * h * lambda[n]);

  auto N = [&](const PeriodicField& v) {
    if (split.remainder) return split.remainder(v);
    return PeriodicField(split.field(v) - circle::apply(lambda, v));
  };
  auto E = [&](const PeriodicField& v) { return circle::apply(half, v); };

  const PeriodicField k1 = N(u);
  const PeriodicField Eu = E(u);
  const PeriodicField k2 = N(E(u + (0.5 * h) * k1));
  const PeriodicField k3 = N(Eu + (0.5 * h) * k2);
  const PeriodicField k4 = N(E(Eu) + h * E(k3));
  return E(Eu) + (h / 6.0) * (E(E(k1)) + 2.0 * E(k2 + k3) + k4);
}

Trajectory<PeriodicField> integrate(const StiffSplit& split, PeriodicField u0,
                                    const IntegratorConfig& config,
                                    const std::vector<Diagnostic<PeriodicField>>& diags) {
  if (!split.field) throw std::invalid_argument("integrate: stiff split without a field");
  if (config.method != Method::integrating_factor_rk4) {
    return integrate<PeriodicField>(split.field, std::move(u0), config, diags);
  }
  if (!split.linear) throw std::invalid_argument("integrate: stiff split without a linear part");
  validate(config);
  return detail::fixed_step<PeriodicField>(
      [&split](const PeriodicField& u, double h) { return if_rk4_step(split, u, h); },
      std::move(u0), config, diags);
}

ConvergenceReport convergence_from_differences(const std::vector<double>& dts,
                                               const std::vector<double>& differences,
                                               double solution_scale, double nominal_order) {
  if (dts.size() < 3 || differences.size() + 1 != dts.size()) {
    throw std::invalid_argument(
        "convergence_from_differences: need >= 3 step sizes and one difference per adjacent pair");
  }
  ConvergenceReport r;
  r.dts = dts;
  r.differences = differences;
  const double floor = 1e-13 * std::max(1.0, solution_scale);
  if (differences.back() < floor) {
    r.roundoff_limited = true;
    r.note = "finest difference at roundoff level; order not measurable";
  }
  bool finite = true;
  for (std::size_t i = 0; i + 1 < differences.size(); ++i) {
    const double p = std::log(differences[i] / differences[i + 1]) / std::log(dts[i] / dts[i + 1]);
    r.orders.push_back(p);
    finite = finite && std::isfinite(p);
  }
  r.observed_order = r.orders.back();
  r.reliable = finite && !r.roundoff_limited;
  for (std::size_t i = 0; i + 1 < r.orders.size(); ++i) {
    if (std::abs(r.orders[i] - r.orders[i + 1]) > 0.5) r.reliable = false;
  }
  if (!r.reliable && r.note.empty()) r.note = "successive order estimates disagree";
  if (r.reliable && nominal_order > 0.0 && std::abs(r.observed_order - nominal_order) > 0.5) {
    r.reliable = false;
    r.note = "observed order departs from the nominal order of the method";
  }
  return r;
}

ConvergenceReport convergence_study(const StiffSplit& split, const PeriodicField& u0, double t_end,
                                    const std::vector<double>& dts, Method method) {
  return convergence_study<PeriodicField>(
      [&](double dt) {
        IntegratorConfig cfg;
        cfg.method = method;
        cfg.dt = dt;
        cfg.t_max = t_end;
        cfg.keep_states = false;
        cfg.observer_stride = std::numeric_limits<int>::max();
        auto traj = integrate(split, u0, cfg);
        if (traj.status != Status::ok) throw std::runtime_error("convergence_study: " + traj.message);
        return traj.last_good;
      },
      dts, method == Method::rk45_adaptive ? 0.0 : 4.0);
}

}  // namespace metriflow::integrate
