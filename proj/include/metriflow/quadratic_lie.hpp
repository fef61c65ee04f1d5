#pragma once

// Finite-dimensional quadratic Lie algebras: a Lie algebra with structure
// constants c^p_{ij} ([e_i, e_j] = c^p_{ij} e_p) and a nondegenerate invariant
// symmetric form κ. Everything here is built from three ingredients:
//
//   [x, y]^p = c^p_{ij} x^i y^j,   κ(x, y) = κ_{ij} x^i y^j,   ∇f = κ⁻¹ ∂f/∂ξ,
//
// and the triple bracket {f,g,h}(ξ) = κ(∇f, [∇g, ∇h]).

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace metriflow::lie {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class LieAlgebraSpec {
 public:
  /// structure_constants holds c^p_{ij} at index (p*dim + i)*dim + j.
  /// Throws std::invalid_argument if antisymmetry, Jacobi, invariance of κ or
  /// nondegeneracy fail.
  LieAlgebraSpec(int dim, std::vector<double> structure_constants, Matrix form,
                 std::string name = "custom");

  /// Same algebra with κ set to its Killing form κ_{ij} = c^p_{iq} c^q_{jp}.
  static LieAlgebraSpec with_killing_form(int dim, std::vector<double> structure_constants,
                                          std::string name = "custom");

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  double c(int p, int i, int j) const { return c_[static_cast<std::size_t>((p * dim_ + i) * dim_ + j)]; }
  const std::vector<double>& structure_constants() const { return c_; }
  const Matrix& form() const { return form_; }
  const Matrix& form_inverse() const { return form_inverse_; }

  /// +1 if κ([a,b],[a,b]) ≥ 0 on all sampled pairs, -1 if ≤ 0, 0 if indefinite.
  /// The symmetric bracket is s·κ(X_{h,f}, X_{h,g}).
  int symmetric_sign() const { return symmetric_sign_; }

  /// Matrix of ad_x = [x, ·].
  Matrix ad(const Vector& x) const;

  double jacobi_residual() const;
  double invariance_residual() const;
  double antisymmetry_residual() const;

 private:
  int dim_;
  std::vector<double> c_;
  Matrix form_;
  Matrix form_inverse_;
  std::string name_;
  int symmetric_sign_ = 0;
};

/// Killing form κ_{ij} = Σ c^p_{iq} c^q_{jp} of the given structure constants.
Matrix killing_form(int dim, const std::vector<double>& structure_constants);

/// ℝ³ with the cross product and the dot product.
LieAlgebraSpec so3_preset();

/// Scalar function on the algebra with its Euclidean differential ∂f/∂ξ^i.
/// When no differential is supplied, central differences with step
/// 1e-6·(1 + ‖ξ‖) are used.
struct ScalarField {
  std::string name;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> differential;

  double operator()(const Vector& xi) const { return value(xi); }
  Vector euclidean_differential(const Vector& xi) const;
};

ScalarField constant_field(double c);
ScalarField linear_field(const Vector& c);                 // c·ξ
ScalarField coordinate_field(int dim, int i);              // ξ^i
ScalarField quadratic_field(const Matrix& q, std::string name = "quadratic");  // ½ ξᵀQξ
ScalarField casimir_c2(const LieAlgebraSpec& alg);         // ½κ(ξ,ξ)
ScalarField rigid_body_energy(const Vector& inertia);      // ½ Σ Π_i²/I_i
ScalarField product(const ScalarField& f, const ScalarField& g);
ScalarField finite_difference_only(ScalarField f);         // drops the analytic differential

Vector bracket(const LieAlgebraSpec& alg, const Vector& x, const Vector& y);
double pairing(const LieAlgebraSpec& alg, const Vector& x, const Vector& y);
Vector metric_gradient(const LieAlgebraSpec& alg, const ScalarField& f, const Vector& xi);

/// {f,g,h}(ξ) = κ(∇f, [∇g, ∇h]).
double triple_bracket(const LieAlgebraSpec& alg, const ScalarField& f, const ScalarField& g,
                      const ScalarField& h, const Vector& xi);

/// X_{f,g}(ξ) = [∇f, ∇g]; κ(∇h, X_{f,g}) = {h,f,g}.
Vector pair_vector_field(const LieAlgebraSpec& alg, const ScalarField& f, const ScalarField& g,
                         const Vector& xi);

/// {f,g}_±(ξ) = ±κ(ξ, [∇f, ∇g]).
double lie_poisson_bracket(const LieAlgebraSpec& alg, const ScalarField& f, const ScalarField& g,
                           int sign, const Vector& xi);

/// Hamiltonian vector field of h for {,}_±: X = ∓[ξ, ∇h].
Vector lie_poisson_field(const LieAlgebraSpec& alg, const ScalarField& h, int sign,
                         const Vector& xi);

/// [L, [L, ∇H(L)]]; equals [L,[L,N]] for H(L) = κ(L,N).
Vector double_bracket_gradient_field(const LieAlgebraSpec& alg, const ScalarField& H,
                                     const Vector& L);

/// Gradient of H in the normal metric built from the positive form s·κ:
/// -s[L, [L, ∇H]].
Vector normal_metric_gradient(const LieAlgebraSpec& alg, const ScalarField& H, const Vector& L);

/// (f,g)_h = s·κ(X_{h,f}, X_{h,g}), positive semidefinite.
/// Throws std::domain_error when the algebra has no definite sign.
double symmetric_bracket(const LieAlgebraSpec& alg, const ScalarField& f, const ScalarField& g,
                         const ScalarField& h, const Vector& xi);

/// Conservative part [∇S, ∇H] of the metriplectic field.
Vector metriplectic_conservative_part(const LieAlgebraSpec& alg, const ScalarField& H,
                                      const ScalarField& S, const Vector& xi);

/// Dissipative part -s[∇H, [∇H, ∇S]]; κ(∇S, ·) = s‖[∇H,∇S]‖²_κ ≥ 0 and κ(∇H, ·) = 0.
Vector metriplectic_dissipative_part(const LieAlgebraSpec& alg, const ScalarField& H,
                                     const ScalarField& S, const Vector& xi);

/// Sum of the two parts. For so(3) with the dot product:
/// Π̇ = ∇S×∇H − ∇H×(∇H×∇S).
Vector metriplectic_field(const LieAlgebraSpec& alg, const ScalarField& H, const ScalarField& S,
                          const Vector& xi);

/// ⟨v1, v2⟩ on the adjoint orbit through L, with v = [L, X] and X^L the
/// minimum-norm representative under the positive form s·κ.
/// Throws std::domain_error if a tangent vector is not in range(ad_L)
/// (residual > 1e-8) or if s·κ is not positive definite.
double normal_metric_pairing(const LieAlgebraSpec& alg, const Vector& L, const Vector& v1,
                             const Vector& v2);

}  // namespace metriflow::lie
