#pragma once

// Real periodic functions on the circle, stored as truncated Fourier series
//
//   u(θ) = Σ_{n=-N}^{N} û(n) e^{inθ},   û(n) = (1/2π) ∫_{-π}^{π} u(θ) e^{-inθ} dθ,
//
// together with the diagonal Fourier multipliers used throughout the flows
// (d/dθ, its zero-mean inverse, the Hilbert transform, |n|, n²) and the
// three invariant inner products on zero-mean fields:
//
//   b (u,v) = Σ û(n) conj v̂(n)          = (1/2π)∫ u v        (induced)
//   b₁(u,v) = Σ n² û(n) conj v̂(n)       = ⟨u', v'⟩           (normal)
//   b₂(u,v) = Σ |n| û(n) conj v̂(n)      = ⟨u, ℋv'⟩           (Kähler)
//
// Only the modes n = 0..N are stored; û(-n) = conj û(n) holds by
// construction and û(0) is real.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace metriflow::circle {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class PeriodicField {
 public:
  PeriodicField() = default;

  /// Zero field with modes 0..order.
  explicit PeriodicField(int order);

  /// Non-negative modes n = 0..N. The imaginary part of the zero mode is dropped.
  static PeriodicField from_coefficients(std::vector<Complex> nonnegative_modes);

  /// Full spectrum n = -N..N (size 2N+1). Throws if û(-n) != conj û(n) beyond 1e-14 (relative).
  static PeriodicField from_full_spectrum(std::span<const Complex> modes);

  /// cos(nθ) scaled by amplitude, sin(nθ) likewise.
  static PeriodicField cosine(int order, int n, double amplitude = 1.0);
  static PeriodicField sine(int order, int n, double amplitude = 1.0);
  static PeriodicField constant(int order, double value);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool empty() const { return coeffs_.empty(); }

  /// û(n) for any integer n; zero beyond the truncation.
  Complex coeff(int n) const;
  void set_coeff(int n, Complex value);

  std::span<const Complex> coefficients() const { return coeffs_; }

  double mean() const { return coeffs_.empty() ? 0.0 : coeffs_[0].real(); }
  double value_at(double theta) const;
  double max_abs_coeff() const;
  bool is_finite() const;

  /// Same field at a different truncation order (padding with zeros or cutting modes).
  PeriodicField resized(int order) const;

  PeriodicField& operator+=(const PeriodicField& other);
  PeriodicField& operator-=(const PeriodicField& other);
  PeriodicField& operator*=(double s);

  friend PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
  friend PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
  friend PeriodicField operator*(double s, PeriodicField a) { return a *= s; }
  friend PeriodicField operator*(PeriodicField a, double s) { return a *= s; }
  friend PeriodicField operator-(PeriodicField a) { return a *= -1.0; }

 private:
  std::vector<Complex> coeffs_;
};

/// Largest |û(n)| over all modes; the norm used by step-size control.
double max_abs(const PeriodicField& u);

// ---- spectral multipliers -------------------------------------------------

enum class SpectralOperator {
  identity,
  derivative,      // in
  antiderivative,  // 1/(in) for n != 0, 0 at n = 0 (zero-mean primitive)
  hilbert,         // -i sign(n)
  sqrt_laplacian,  // |n|
  A,               // |n|
  A_squared,       // n²
};

Complex multiplier(SpectralOperator op, int n);
PeriodicField apply(SpectralOperator op, const PeriodicField& u);

/// Per-mode multiplier table m(n), n = 0..N; m(-n) = conj m(n) for real operators.
using ModeMultiplier = std::vector<Complex>;

PeriodicField apply(const ModeMultiplier& m, const PeriodicField& u);

PeriodicField hilbert(const PeriodicField& u);
PeriodicField derivative(const PeriodicField& u);
PeriodicField sqrt_laplacian(const PeriodicField& u);

/// ∫₀^θ u(φ) dφ. Requires û(0) = 0 (checked to 1e-12 relative); throws std::domain_error otherwise.
PeriodicField antiderivative(const PeriodicField& u);

/// The periodic primitive with zero mean. Same precondition as antiderivative().
PeriodicField zero_mean_antiderivative(const PeriodicField& u);

/// u with its mean removed.
PeriodicField zero_mean_part(const PeriodicField& u);

// ---- inner products (carry the 1/2π normalization) ------------------------

double b_induced(const PeriodicField& u, const PeriodicField& v);
double b_normal(const PeriodicField& u, const PeriodicField& v);
double b_kahler(const PeriodicField& u, const PeriodicField& v);

/// ω(u,v) = ⟨u', v⟩.
double cocycle_omega(const PeriodicField& u, const PeriodicField& v);

/// σ(u₁,u₂) = ⟨∫₀^θ u₁, u₂⟩; u₁ must have zero mean.
double zf_form_sigma(const PeriodicField& u1, const PeriodicField& u2);

// ---- plain integrals ∫_{-π}^{π} dθ --------------------------------------

double integral(const PeriodicField& u);
double integral_of_product(const PeriodicField& u, const PeriodicField& v);

// ---- grid transforms ------------------------------------------------------

/// Uniform grid θ_j = -π + 2πj/M, j = 0..M-1.
std::vector<double> grid(std::size_t size);

/// Default number of grid points for a field of the given order: 2(N+1).
std::size_t default_grid_size(int order);

/// Grid size used for alias-free products up to cubic terms: 4(N+1).
std::size_t padded_grid_size(int order);

/// Samples of u on the uniform grid of the given size (size ≥ 2N+1).
std::vector<double> synthesize(const PeriodicField& u, std::size_t size);
std::vector<double> synthesize(const PeriodicField& u);

/// Fourier analysis of uniform-grid samples. order < 0 selects the largest
/// order resolved by the grid, floor((M-1)/2).
PeriodicField transform(std::span<const double> samples, int order = -1);

/// Dealiased product: computed on the padded grid, truncated to
/// max(order(u), order(v)).
PeriodicField pointwise_product(const PeriodicField& u, const PeriodicField& v);

/// (1/2π)∫ u v w, exact for band-limited inputs.
double mean_of_triple_product(const PeriodicField& u, const PeriodicField& v,
                              const PeriodicField& w);

// ---- serialization --------------------------------------------------------

/// JSON text: [[n, re, im], ...] for n = -N..N.
std::string to_json(const PeriodicField& u);
PeriodicField from_json(const std::string& text);

/// CSV with header "theta,u" on the given grid size.
std::string to_grid_csv(const PeriodicField& u, std::size_t size);

}  // namespace metriflow::circle
