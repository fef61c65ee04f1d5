#pragma once

// Toda lattice: physical chain, Flaschka's tridiagonal Lax matrix, the double
// bracket form, the full symmetric flow and its chopping Casimirs.
//
// Sign conventions. With a_k = L(k,k+1) and b_k = L(k,k), the Lax equation
// L̇ = [B, L] with B(k,k+1) = a_k, B(k+1,k) = -a_k reproduces
//
//   ȧ_k = a_k (b_{k+1} - b_k),   ḃ_k = 2 (a_k² - a_{k-1}²).
//
// The choice B := [N, L] with N = diag(1..n) is the negative of that matrix,
// and with it [B, L] = [L, [L, N]]: the double bracket flow is the Toda flow
// run backwards in time. The double bracket flow increases tr(LN) and sorts
// the diagonal into ascending order.
//
// For full symmetric L, π_s L = U - Uᵀ with U the strictly upper part; on
// tridiagonal L this is the displayed B, so L̇ = [π_s L, L] extends the Toda flow.

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <vector>

namespace metriflow::toda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct PhysicalState {
  Vector x;  // positions
  Vector y;  // momenta
};

/// (ẋ, ẏ) with ẋ_k = y_k, ẏ_k = e^{x_{k-1}-x_k} - e^{x_k-x_{k+1}} and free ends.
/// Overflowing exponentials produce non-finite entries, which the adaptive
/// integrator treats as a rejected step.
PhysicalState physical_field(const PhysicalState& s);

/// Packed form [x; y] for the generic integrators.
Vector pack(const PhysicalState& s);
PhysicalState unpack(const Vector& xy);
Vector physical_field_packed(const Vector& xy);

/// Tridiagonal L with a_k = ½e^{(x_k - x_{k+1})/2}, b_k = -½y_k.
Matrix flaschka(const PhysicalState& s);

/// Derivative of the Flaschka map applied to (ẋ, ẏ).
Matrix flaschka_pushforward(const PhysicalState& s, const PhysicalState& velocity);

enum class LaxConvention {
  displayed,     // B(k,k+1) = a_k
  n_commutator,  // B = [N, L], N = diag(1..n)
};

/// Antisymmetric tridiagonal B for the chosen convention.
Matrix lax_B(const Matrix& L, LaxConvention convention = LaxConvention::displayed);

/// [B, L]. Throws std::invalid_argument for non-tridiagonal or non-symmetric L.
Matrix lax_field(const Matrix& L, LaxConvention convention = LaxConvention::displayed);

/// diag(1, 2, ..., n).
Matrix default_N(int n);

/// [L, [L, N]].
Matrix double_bracket_field(const Matrix& L, const Matrix& N);
Matrix double_bracket_field(const Matrix& L);

/// π_s M = U - Uᵀ, U the strictly upper triangular part of M.
Matrix pi_s(const Matrix& M);

/// [π_s L, L].
Matrix full_toda_field(const Matrix& L);

/// Coefficients E_{rk}, r = 0..n-2k, of det(L - λ)_k = Σ E_{rk} λ^{n-2k-r},
/// where (·)_k deletes the first k rows and the last k columns.
std::vector<double> chopping_coefficients(const Matrix& L, int k);
double chopping_invariant(const Matrix& L, int r, int k);

/// I_{1k} = E_{1k}/E_{0k}; empty when |E_{0k}| ≤ 1e-12.
std::optional<double> casimir_I1k(const Matrix& L, int k);

/// Symmetric gradient of I_{1k} under ⟨A,B⟩ = tr(AB), from Jacobi's formula.
std::optional<Matrix> casimir_I1k_gradient(const Matrix& L, int k);

/// Central-difference gradient (step 1e-6, symmetric perturbations); cross-check.
std::optional<Matrix> casimir_I1k_gradient_fd(const Matrix& L, int k, double step = 1e-6);

/// [π_s L, L] + [L, [L, ∇I_{1k}]]. Throws std::domain_error when I_{1k} is undefined.
Matrix dissipative_full_toda_field(const Matrix& L, int k);

// ---- diagnostics ---------------------------------------------------------------

bool is_symmetric(const Matrix& L, double tol = 1e-12);
bool is_tridiagonal(const Matrix& L, double tol = 1e-12);
Vector sorted_eigenvalues(const Matrix& L);
double energy(const Matrix& L);              // ½ tr L²
double trace_power(const Matrix& L, int k);  // tr L^k
double off_diagonal_norm(const Matrix& L);   // Frobenius norm of L - diag(L)

/// Random symmetric tridiagonal with a_k ∈ [0.2, 1], b_k ∈ [-1, 1].
Matrix random_tridiagonal(int n, std::mt19937_64& rng);
/// Random full symmetric with entries in [-1, 1].
Matrix random_symmetric(int n, std::mt19937_64& rng);

}  // namespace metriflow::toda
