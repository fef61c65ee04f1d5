#pragma once

// Vector fields on periodic functions u(θ): metric gradients of functionals,
// Gardner and Kähler Hamiltonian fields, hybrid (Hamiltonian minus gradient)
// flows, the Gardner-triple metriplectic equation and the infinite triple
// bracket.
//
// Functionals are integrals ∫_{-π}^{π} dθ and δH/δu is taken with respect to
// that measure. The metrics b, b₁, b₂ of circle_field carry 1/2π, so each
// gradient satisfies D(H/2π)(u)·v = metric(grad H(u), v).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metriflow/circle_field.hpp"

namespace metriflow::pde {

using circle::PeriodicField;

struct Functional {
  std::string name;
  std::function<double(const PeriodicField&)> value;
  std::function<PeriodicField(const PeriodicField&)> derivative;  // δH/δu

  double operator()(const PeriodicField& u) const { return value(u); }
};

Functional H0();     // ∫ u,                 δ = 1
Functional H2();     // ∫ u²/2,              δ = u
Functional H1();     // ∫ u'²/2,             δ = -u''
Functional H_KdV();  // ∫ (u³ + u'²/2),      δ = 3u² - u''
Functional H_BO();   // ∫ (½uℋu' + u³/3),    δ = ℋu' + u²
std::vector<Functional> functional_presets();

/// c·F.
Functional scaled(const Functional& f, double c, std::string name = {});

/// Directional derivative (H(u + εv) - H(u - εv)) / 2ε.
double directional_derivative(const Functional& f, const PeriodicField& u, const PeriodicField& v,
                              double eps = 1e-6);

/// How the normal and Kähler gradients treat δH/δu with nonzero mean.
/// strict rejects (the antiderivative would not be periodic);
/// restrict_to_zero_mean drops the mean, i.e. the gradient of H restricted to
/// the zero-mean leaf.
enum class LeafPolicy { strict, restrict_to_zero_mean };

PeriodicField grad_induced(const Functional& f, const PeriodicField& u);
/// -∂⁻²(δH/δu) with zero-mean primitives.
PeriodicField grad_normal(const Functional& f, const PeriodicField& u,
                          LeafPolicy policy = LeafPolicy::strict);
/// -ℋ∂⁻¹(δH/δu).
PeriodicField grad_kahler(const Functional& f, const PeriodicField& u,
                          LeafPolicy policy = LeafPolicy::strict);

/// ∂(δH/δu).
PeriodicField gardner_hamiltonian_field(const Functional& f, const PeriodicField& u);
/// ℋ(grad_kahler) = ∂⁻¹(δH/δu); H₁ gives -u'.
PeriodicField kahler_hamiltonian_field(const Functional& f, const PeriodicField& u);

/// {F,G} = ∫ F_u ∂G_u.
double gardner_bracket(const Functional& f, const Functional& g, const PeriodicField& u);

enum class HamiltonianStructure { none, gardner, kahler_symplectic };
enum class Dissipation { none, grad_induced, grad_normal, grad_kahler, symmetric_H0 };

/// u_t = X_H(u) - sign·grad S(u). For symmetric_H0 the dissipative part is
/// sign·symmetric_H0_field(S, u).
struct FlowSpec {
  std::string name;
  HamiltonianStructure structure = HamiltonianStructure::none;
  std::optional<Functional> hamiltonian;
  Dissipation dissipation = Dissipation::none;
  std::optional<Functional> entropy;
  double sign = 1.0;
};

/// Throws std::invalid_argument if a required functional is missing.
void validate(const FlowSpec& spec);
PeriodicField hybrid_field(const FlowSpec& spec, const PeriodicField& u);

FlowSpec kdv_spec();                 // u_t = 6uu' - u'''
FlowSpec kdv_linear_damping_spec();  // ... - u
FlowSpec kdv_viscous_spec();         // ... + u''
FlowSpec kdv_landau_spec();          // ... - ℋu'
FlowSpec advection_landau_spec();    // u_t = -u' - ℋu'
FlowSpec translation_spec();         // u_t = -u'
FlowSpec heat_spec();                // u_t = u''
FlowSpec benjamin_ono_spec();        // u_t = ℋu'' + 2uu'

/// S = ∫u, Q = ∫u'².
double gd3_S(const PeriodicField& u);
double gd3_Q(const PeriodicField& u);
/// u' + S u'' + Q, with S and Q evaluated at u.
PeriodicField gardner_metriplectic_field(const PeriodicField& u);

/// -∂²(δG/δu); G = -H₂ gives the heat equation u_t = u''.
PeriodicField symmetric_H0_field(const Functional& g, const PeriodicField& u);

/// {E,F,G} = ⟨G_u⟩∫F_u E'_u + ⟨E_u⟩∫G_u F'_u + ⟨F_u⟩∫E_u G'_u, where ⟨·⟩ is
/// the mean over the circle. With F = H₀ this is the Gardner bracket ∫E_u G'_u.
double triple_bracket_infinite(const Functional& e, const Functional& f, const Functional& g,
                               const PeriodicField& u);

}  // namespace metriflow::pde
