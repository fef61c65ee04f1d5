#include "metriflow/pde_flows.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace metriflow::pde {

namespace circle = metriflow::circle;

namespace {

PeriodicField leaf_derivative(const Functional& f, const PeriodicField& u, LeafPolicy policy,
                              const char* what) {
  PeriodicField d = f.derivative(u);
  const double scale = std::max(1.0, d.max_abs_coeff());
  if (std::abs(d.mean()) > 1e-12 * scale) {
    if (policy == LeafPolicy::restrict_to_zero_mean) return circle::zero_mean_part(d);
    std::ostringstream msg;
    msg << what << "(" << f.name << "): δH/δu has mean " << std::setprecision(17) << d.mean()
        << "; its antiderivative is not periodic";
    throw std::domain_error(msg.str());
  }
  return circle::zero_mean_part(d);
}

}  // namespace

// ---- functionals --------------------------------------------------------------

Functional H0() {
  return {"H0", [](const PeriodicField& u) { return circle::integral(u); },
          [](const PeriodicField& u) { return PeriodicField::constant(u.order(), 1.0); }};
}

Functional H2() {
  return {"H2", [](const PeriodicField& u) { return 0.5 * circle::integral_of_product(u, u); },
          [](const PeriodicField& u) { return u; }};
}

Functional H1() {
  return {"H1",
          [](const PeriodicField& u) {
            const auto du = circle::derivative(u);
            return 0.5 * circle::integral_of_product(du, du);
          },
          [](const PeriodicField& u) { return -circle::derivative(circle::derivative(u)); }};
}

Functional H_KdV() {
  return {"H_KdV",
          [](const PeriodicField& u) {
            const auto du = circle::derivative(u);
            return circle::kTwoPi * circle::mean_of_triple_product(u, u, u) +
                   0.5 * circle::integral_of_product(du, du);
          },
          [](const PeriodicField& u) {
            return 3.0 * circle::pointwise_product(u, u) -
                   circle::derivative(circle::derivative(u));
          }};
}

Functional H_BO() {
  return {"H_BO",
          [](const PeriodicField& u) {
            const auto hdu = circle::hilbert(circle::derivative(u));
            return 0.5 * circle::integral_of_product(u, hdu) +
                   circle::kTwoPi * circle::mean_of_triple_product(u, u, u) / 3.0;
          },
          [](const PeriodicField& u) {
            return circle::hilbert(circle::derivative(u)) + circle::pointwise_product(u, u);
          }};
}

std::vector<Functional> functional_presets() { return {H0(), H2(), H1(), H_KdV(), H_BO()}; }

Functional scaled(const Functional& f, double c, std::string name) {
  if (name.empty()) name = std::to_string(c) + "*" + f.name;
  return {std::move(name), [f, c](const PeriodicField& u) { return c * f(u); },
          [f, c](const PeriodicField& u) { return c * f.derivative(u); }};
}

double directional_derivative(const Functional& f, const PeriodicField& u, const PeriodicField& v,
                              double eps) {
  return (f(u + eps * v) - f(u - eps * v)) / (2.0 * eps);
}

// ---- gradients and Hamiltonian fields --------------------------------------------

PeriodicField grad_induced(const Functional& f, const PeriodicField& u) {
  return f.derivative(u);
}

PeriodicField grad_normal(const Functional& f, const PeriodicField& u, LeafPolicy policy) {
  const auto d = leaf_derivative(f, u, policy, "grad_normal");
  return -circle::zero_mean_antiderivative(circle::zero_mean_antiderivative(d));
}

PeriodicField grad_kahler(const Functional& f, const PeriodicField& u, LeafPolicy policy) {
  const auto d = leaf_derivative(f, u, policy, "grad_kahler");
  return -circle::hilbert(circle::zero_mean_antiderivative(d));
}

PeriodicField gardner_hamiltonian_field(const Functional& f, const PeriodicField& u) {
  return circle::derivative(f.derivative(u));
}

PeriodicField kahler_hamiltonian_field(const Functional& f, const PeriodicField& u) {
  return circle::hilbert(grad_kahler(f, u, LeafPolicy::strict));
}

double gardner_bracket(const Functional& f, const Functional& g, const PeriodicField& u) {
  return circle::integral_of_product(f.derivative(u), circle::derivative(g.derivative(u)));
}

// ---- hybrid flows -------------------------------------------------------------

void validate(const FlowSpec& spec) {
  if (spec.structure != HamiltonianStructure::none && !spec.hamiltonian) {
    throw std::invalid_argument("FlowSpec '" + spec.name +
                                "': Hamiltonian structure chosen without a Hamiltonian");
  }
  if (spec.dissipation != Dissipation::none && !spec.entropy) {
    throw std::invalid_argument("FlowSpec '" + spec.name +
                                "': dissipation chosen without a generating functional");
  }
  if (spec.structure == HamiltonianStructure::none && spec.dissipation == Dissipation::none) {
    throw std::invalid_argument("FlowSpec '" + spec.name + "': empty flow");
  }
}

PeriodicField hybrid_field(const FlowSpec& spec, const PeriodicField& u) {
  validate(spec);
  PeriodicField out(u.order());
  switch (spec.structure) {
    case HamiltonianStructure::none:
      break;
    case HamiltonianStructure::gardner:
      out += gardner_hamiltonian_field(*spec.hamiltonian, u);
      break;
    case HamiltonianStructure::kahler_symplectic:
      out += kahler_hamiltonian_field(*spec.hamiltonian, u);
      break;
  }
  switch (spec.dissipation) {
    case Dissipation::none:
      break;
    case Dissipation::grad_induced:
      out -= spec.sign * grad_induced(*spec.entropy, u);
      break;
    case Dissipation::grad_normal:
      out -= spec.sign * grad_normal(*spec.entropy, u);
      break;
    case Dissipation::grad_kahler:
      out -= spec.sign * grad_kahler(*spec.entropy, u);
      break;
    case Dissipation::symmetric_H0:
      out += spec.sign * symmetric_H0_field(*spec.entropy, u);
      break;
  }
  return out.resized(u.order());
}

FlowSpec kdv_spec() {
  return {"kdv", HamiltonianStructure::gardner, H_KdV(), Dissipation::none, std::nullopt, 1.0};
}

FlowSpec kdv_linear_damping_spec() {
  return {"kdv_linear_damping", HamiltonianStructure::gardner, H_KdV(), Dissipation::grad_normal,
          H1(), 1.0};
}

FlowSpec kdv_viscous_spec() {
  return {"kdv_viscous", HamiltonianStructure::gardner, H_KdV(), Dissipation::grad_induced, H1(),
          1.0};
}

FlowSpec kdv_landau_spec() {
  return {"kdv_landau", HamiltonianStructure::gardner, H_KdV(), Dissipation::grad_kahler, H1(),
          1.0};
}

FlowSpec advection_landau_spec() {
  return {"advection_landau", HamiltonianStructure::kahler_symplectic, H1(),
          Dissipation::grad_kahler, H1(), 1.0};
}

FlowSpec translation_spec() {
  return {"translation", HamiltonianStructure::kahler_symplectic, H1(), Dissipation::none,
          std::nullopt, 1.0};
}

FlowSpec heat_spec() {
  return {"heat", HamiltonianStructure::none, std::nullopt, Dissipation::symmetric_H0,
          scaled(H2(), -1.0, "-H2"), 1.0};
}

FlowSpec benjamin_ono_spec() {
  return {"benjamin_ono", HamiltonianStructure::gardner, H_BO(), Dissipation::none, std::nullopt,
          1.0};
}

// ---- metriplectic and symmetric brackets ---------------------------------------------

double gd3_S(const PeriodicField& u) { return circle::integral(u); }

double gd3_Q(const PeriodicField& u) {
  const auto du = circle::derivative(u);
  return circle::integral_of_product(du, du);
}

PeriodicField gardner_metriplectic_field(const PeriodicField& u) {
  const auto du = circle::derivative(u);
  PeriodicField out = du + gd3_S(u) * circle::derivative(du);
  out.set_coeff(0, out.coeff(0) + gd3_Q(u));
  return out;
}

PeriodicField symmetric_H0_field(const Functional& g, const PeriodicField& u) {
  return -circle::derivative(circle::derivative(g.derivative(u)));
}

double triple_bracket_infinite(const Functional& e, const Functional& f, const Functional& g,
                               const PeriodicField& u) {
  const auto eu = e.derivative(u);
  const auto fu = f.derivative(u);
  const auto gu = g.derivative(u);
  return gu.mean() * circle::integral_of_product(fu, circle::derivative(eu)) +
         eu.mean() * circle::integral_of_product(gu, circle::derivative(fu)) +
         fu.mean() * circle::integral_of_product(eu, circle::derivative(gu));
}

}  // namespace metriflow::pde
