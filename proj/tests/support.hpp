#pragma once
// Independent oracles shared by the test binaries: direct Fourier sums,
// trapezoid quadrature and random band-limited fields.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "metriflow/circle_field.hpp"

namespace testing {

using metriflow::circle::Complex;
using metriflow::circle::PeriodicField;
inline constexpr double kPi = 3.14159265358979323846;

/// Random field with decaying modes 1..order (and a mean unless zero_mean).
inline PeriodicField random_field(int order, std::mt19937_64& rng, bool zero_mean = true,
                                  int band = -1) {
  std::normal_distribution<double> g;
  if (band < 0) band = order;
  std::vector<Complex> c(static_cast<std::size_t>(order) + 1);
  c[0] = zero_mean ? 0.0 : g(rng);
  for (int n = 1; n <= band; ++n) {
    c[static_cast<std::size_t>(n)] = Complex(g(rng), g(rng)) / (1.0 + n * n / 4.0);
  }
  return PeriodicField::from_coefficients(c);
}

/// u(θ) by direct summation of the stored coefficients.
inline double eval(const PeriodicField& u, double theta) {
  double s = u.coeff(0).real();
  for (int n = 1; n <= u.order(); ++n) {
    s += 2.0 * (u.coeff(n) * std::polar(1.0, n * theta)).real();
  }
  return s;
}

/// ∫_{-π}^{π} f dθ by the trapezoid rule, exact for trigonometric
/// polynomials of degree < m.
inline double quad(const std::function<double(double)>& f, int m = 1024) {
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += f(-kPi + 2.0 * kPi * j / m);
  return s * 2.0 * kPi / m;
}

inline double max_coeff_diff(const PeriodicField& a, const PeriodicField& b) {
  const int n = std::max(a.order(), b.order());
  double d = 0.0;
  for (int k = 0; k <= n; ++k) d = std::max(d, std::abs(a.coeff(k) - b.coeff(k)));
  return d;
}

inline double sup_diff(const PeriodicField& u, const std::function<double(double)>& f,
                       int m = 512) {
  double d = 0.0;
  for (int j = 0; j < m; ++j) {
    const double t = -kPi + 2.0 * kPi * j / m;
    d = std::max(d, std::abs(eval(u, t) - f(t)));
  }
  return d;
}

/// Functional values by long double quadrature on direct Fourier sums, used
/// as the finite-difference oracle for D H(u)·v. The perturbation u ± h v is
/// formed pointwise in long double so the oracle is not limited by double
/// rounding of H (roundoff ~ |H|·1e-19/h).
class LongDoubleFunctional {
 public:
  LongDoubleFunctional(std::string name, int points = 256) : name_(std::move(name)), m_(points) {}

  /// (H(u + h v) - H(u - h v)) / 2h
  long double directional(const PeriodicField& u, const PeriodicField& v, long double h = 1e-6L) const {
    const auto su = samples(u), sv = samples(v);
    Samples p = su, m = su;
    for (std::size_t c = 0; c < su.size(); ++c) {
      for (std::size_t j = 0; j < su[c].size(); ++j) {
        p[c][j] += h * sv[c][j];
        m[c][j] -= h * sv[c][j];
      }
    }
    return (value(p) - value(m)) / (2 * h);
  }

  long double value(const PeriodicField& u) const { return value(samples(u)); }

 private:
  // rows: u, u', ℋu'
  using Samples = std::vector<std::vector<long double>>;

  Samples samples(const PeriodicField& u) const {
    const long double pi = 3.141592653589793238462643383279502884L;
    Samples s(3, std::vector<long double>(static_cast<std::size_t>(m_), 0.0L));
    for (int j = 0; j < m_; ++j) {
      const long double t = -pi + 2 * pi * j / m_;
      long double x = u.coeff(0).real(), dx = 0.0L, hdx = 0.0L;
      for (int n = 1; n <= u.order(); ++n) {
        const long double re = u.coeff(n).real(), im = u.coeff(n).imag();
        const long double c = std::cos(static_cast<long double>(n) * t);
        const long double sn = std::sin(static_cast<long double>(n) * t);
        x += 2 * (re * c - im * sn);
        dx += 2 * n * (-re * sn - im * c);
        hdx += 2 * n * (re * c - im * sn);  // ℋ∂ has multiplier |n|
      }
      s[0][static_cast<std::size_t>(j)] = x;
      s[1][static_cast<std::size_t>(j)] = dx;
      s[2][static_cast<std::size_t>(j)] = hdx;
    }
    return s;
  }

  long double value(const Samples& s) const {
    const long double pi = 3.141592653589793238462643383279502884L;
    long double acc = 0.0L;
    for (std::size_t j = 0; j < s[0].size(); ++j) {
      const long double x = s[0][j], dx = s[1][j], hdx = s[2][j];
      if (name_ == "H0") acc += x;
      else if (name_ == "H2") acc += x * x / 2;
      else if (name_ == "H1") acc += dx * dx / 2;
      else if (name_ == "H_KdV") acc += x * x * x + dx * dx / 2;
      else if (name_ == "H_BO") acc += x * hdx / 2 + x * x * x / 3;
      else throw std::invalid_argument("LongDoubleFunctional: unknown " + name_);
    }
    return acc * 2 * pi / m_;
  }

  std::string name_;
  int m_;
};

}  // namespace testing
