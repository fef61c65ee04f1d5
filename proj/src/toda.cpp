#include "metriflow/toda.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace metriflow::toda {

namespace {

constexpr double kUndefinedTol = 1e-12;

void require_square(const Matrix& L, const char* what) {
  if (L.rows() != L.cols() || L.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": expected a nonempty square matrix");
  }
}

void require_symmetric(const Matrix& L, const char* what) {
  require_square(L, what);
  if (!is_symmetric(L)) {
    std::ostringstream msg;
    msg << what << ": matrix is not symmetric (max |L - Lᵀ| = "
        << (L - L.transpose()).cwiseAbs().maxCoeff() << ")";
    throw std::invalid_argument(msg.str());
  }
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// (L - λI) with the first k rows and the last k columns removed.
Matrix chopped(const Matrix& L, int k, double lambda) {
  const int n = static_cast<int>(L.rows());
  const int m = n - k;
  Matrix c = L.block(k, 0, m, m);
  for (int i = 0; i < m; ++i) {
    // row i of c is row i+k of L; diagonal entry (i+k, i+k) sits in column i+k
    if (i + k < m) c(i, i + k) -= lambda;
  }
  return c;
}

Matrix adjugate(const Matrix& c) {
  const int m = static_cast<int>(c.rows());
  Matrix adj(m, m);
  if (m == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  Matrix minor(m - 1, m - 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int r = 0, rr = 0; r < m; ++r) {
        if (r == i) continue;
        for (int s = 0, ss = 0; s < m; ++s) {
          if (s == j) continue;
          minor(rr, ss++) = c(r, s);
        }
        ++rr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * minor.determinant();
    }
  }
  return adj;
}

// Sample points 0, 1, -1, 2, -2, ... and the inverse Vandermonde matrix that
// maps samples p(λ_m) to power-basis coefficients c_j of λ^j.
struct Interpolation {
  std::vector<double> nodes;
  Matrix inverse_vandermonde;
};

Interpolation interpolation(int degree) {
  Interpolation in;
  for (int m = 0; m <= degree; ++m) {
    const int step = (m + 1) / 2;
    in.nodes.push_back(m % 2 == 1 ? step : -step);
  }
  Matrix v(degree + 1, degree + 1);
  for (int m = 0; m <= degree; ++m) {
    for (int j = 0; j <= degree; ++j) v(m, j) = std::pow(in.nodes[static_cast<std::size_t>(m)], j);
  }
  in.inverse_vandermonde = v.inverse();
  return in;
}

void require_k(const Matrix& L, int k) {
  const int n = static_cast<int>(L.rows());
  if (k < 0 || 2 * k > n) {
    throw std::invalid_argument("chopping: k = " + std::to_string(k) + " outside 0..floor(n/2)");
  }
}

void require_casimir_k(const Matrix& L, int k) {
  require_k(L, k);
  if (static_cast<int>(L.rows()) - 2 * k < 1) {
    throw std::invalid_argument("casimir_I1k: needs n - 2k >= 1");
  }
}

}  // namespace

// ---- physical chain ------------------------------------------------------------

PhysicalState physical_field(const PhysicalState& s) {
  const auto n = s.x.size();
  if (n < 2 || s.y.size() != n) {
    throw std::invalid_argument("physical_field: need n >= 2 positions and matching momenta");
  }
  PhysicalState d{s.y, Vector::Zero(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const double left = (k > 0) ? std::exp(s.x[k - 1] - s.x[k]) : 0.0;
    const double right = (k + 1 < n) ? std::exp(s.x[k] - s.x[k + 1]) : 0.0;
    d.y[k] = left - right;
  }
  return d;
}

Vector pack(const PhysicalState& s) {
  Vector xy(s.x.size() + s.y.size());
  xy << s.x, s.y;
  return xy;
}

PhysicalState unpack(const Vector& xy) {
  if (xy.size() % 2 != 0) throw std::invalid_argument("unpack: odd length");
  const auto n = xy.size() / 2;
  return {xy.head(n), xy.tail(n)};
}

Vector physical_field_packed(const Vector& xy) { return pack(physical_field(unpack(xy))); }

Matrix flaschka(const PhysicalState& s) {
  const auto n = s.x.size();
  if (n < 2 || s.y.size() != n) throw std::invalid_argument("flaschka: need n >= 2");
  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    L(k, k) = -0.5 * s.y[k];
    if (k + 1 < n) {
      L(k, k + 1) = L(k + 1, k) = 0.5 * std::exp(0.5 * (s.x[k] - s.x[k + 1]));
    }
  }
  return L;
}

Matrix flaschka_pushforward(const PhysicalState& s, const PhysicalState& v) {
  const auto n = s.x.size();
  const Matrix L = flaschka(s);
  Matrix dL = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    dL(k, k) = -0.5 * v.y[k];
    if (k + 1 < n) dL(k, k + 1) = dL(k + 1, k) = 0.5 * L(k, k + 1) * (v.x[k] - v.x[k + 1]);
  }
  return dL;
}

// ---- Lax and double bracket -------------------------------------------------------

Matrix lax_B(const Matrix& L, LaxConvention convention) {
  require_square(L, "lax_B");
  const auto n = L.rows();
  const double sign = convention == LaxConvention::displayed ? 1.0 : -1.0;
  Matrix B = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    B(k, k + 1) = sign * L(k, k + 1);
    B(k + 1, k) = -sign * L(k, k + 1);
  }
  return B;
}

Matrix lax_field(const Matrix& L, LaxConvention convention) {
  require_symmetric(L, "lax_field");
  if (!is_tridiagonal(L)) throw std::invalid_argument("lax_field: matrix is not tridiagonal");
  return commutator(lax_B(L, convention), L);
}

Matrix default_N(int n) {
  return Vector::LinSpaced(n, 1.0, static_cast<double>(n)).asDiagonal();
}

Matrix double_bracket_field(const Matrix& L, const Matrix& N) {
  require_symmetric(L, "double_bracket_field");
  if (N.rows() != L.rows() || N.cols() != L.cols()) {
    throw std::invalid_argument("double_bracket_field: N has the wrong shape");
  }
  return commutator(L, commutator(L, N));
}

Matrix double_bracket_field(const Matrix& L) {
  return double_bracket_field(L, default_N(static_cast<int>(L.rows())));
}

Matrix pi_s(const Matrix& M) {
  require_square(M, "pi_s");
  const Matrix U = M.triangularView<Eigen::StrictlyUpper>();
  return U - U.transpose();
}

Matrix full_toda_field(const Matrix& L) {
  require_symmetric(L, "full_toda_field");
  return commutator(pi_s(L), L);
}

// ---- chopping invariants ----------------------------------------------------------

std::vector<double> chopping_coefficients(const Matrix& L, int k) {
  require_square(L, "chopping_coefficients");
  require_k(L, k);
  const int n = static_cast<int>(L.rows());
  const int degree = n - 2 * k;
  if (n - k == 0) return {1.0};
  const Interpolation in = interpolation(degree);
  Vector samples(degree + 1);
  for (int m = 0; m <= degree; ++m) {
    samples[m] = chopped(L, k, in.nodes[static_cast<std::size_t>(m)]).determinant();
  }
  const Vector power = in.inverse_vandermonde * samples;
  std::vector<double> e(static_cast<std::size_t>(degree) + 1);
  for (int r = 0; r <= degree; ++r) e[static_cast<std::size_t>(r)] = power[degree - r];
  return e;
}

double chopping_invariant(const Matrix& L, int r, int k) {
  const auto e = chopping_coefficients(L, k);
  if (r < 0 || r >= static_cast<int>(e.size())) {
    throw std::invalid_argument("chopping_invariant: r = " + std::to_string(r) + " outside 0..n-2k");
  }
  return e[static_cast<std::size_t>(r)];
}

std::optional<double> casimir_I1k(const Matrix& L, int k) {
  require_casimir_k(L, k);
  const auto e = chopping_coefficients(L, k);
  if (std::abs(e[0]) <= kUndefinedTol) return std::nullopt;
  return e[1] / e[0];
}

std::optional<Matrix> casimir_I1k_gradient(const Matrix& L, int k) {
  require_symmetric(L, "casimir_I1k_gradient");
  require_casimir_k(L, k);
  const int n = static_cast<int>(L.rows());
  const int m = n - k;
  const int degree = n - 2 * k;
  const Interpolation in = interpolation(degree);

  Vector samples(degree + 1);
  std::vector<Matrix> sample_grads;
  for (int s = 0; s <= degree; ++s) {
    const Matrix c = chopped(L, k, in.nodes[static_cast<std::size_t>(s)]);
    samples[s] = c.determinant();
    // d det C = tr(adj(C) dC), and dC(i, j) = dL(i + k, j).
    const Matrix adj = adjugate(c);
    Matrix D = Matrix::Zero(n, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) D(i + k, j) = adj(j, i);
    }
    sample_grads.emplace_back(0.5 * (D + D.transpose()));
  }
  const Vector power = in.inverse_vandermonde * samples;
  const double e0 = power[degree];
  const double e1 = power[degree - 1];
  if (std::abs(e0) <= kUndefinedTol) return std::nullopt;

  Matrix g0 = Matrix::Zero(n, n);
  Matrix g1 = Matrix::Zero(n, n);
  for (int s = 0; s <= degree; ++s) {
    g0 += in.inverse_vandermonde(degree, s) * sample_grads[static_cast<std::size_t>(s)];
    g1 += in.inverse_vandermonde(degree - 1, s) * sample_grads[static_cast<std::size_t>(s)];
  }
  return Matrix((g1 * e0 - e1 * g0) / (e0 * e0));
}

std::optional<Matrix> casimir_I1k_gradient_fd(const Matrix& L, int k, double step) {
  require_symmetric(L, "casimir_I1k_gradient_fd");
  const auto n = L.rows();
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Matrix E = Matrix::Zero(n, n);
      E(i, j) = E(j, i) = 1.0;
      const auto plus = casimir_I1k(L + step * E, k);
      const auto minus = casimir_I1k(L - step * E, k);
      if (!plus || !minus) return std::nullopt;
      const double d = (*plus - *minus) / (2.0 * step);
      // tr(G E) = 2 G(i,j) off the diagonal, G(i,i) on it
      g(i, j) = g(j, i) = (i == j) ? d : 0.5 * d;
    }
  }
  return g;
}

Matrix dissipative_full_toda_field(const Matrix& L, int k) {
  const auto grad = casimir_I1k_gradient(L, k);
  if (!grad) {
    throw std::domain_error("dissipative_full_toda_field: I_1" + std::to_string(k) +
                            " undefined at this L (E_0k vanishes; non-generic orbit)");
  }
  return full_toda_field(L) + commutator(L, commutator(L, *grad));
}

// ---- diagnostics ---------------------------------------------------------------

bool is_symmetric(const Matrix& L, double tol) {
  return L.rows() == L.cols() && (L - L.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool is_tridiagonal(const Matrix& L, double tol) {
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    for (Eigen::Index j = 0; j < L.cols(); ++j) {
      if (std::abs(i - j) > 1 && std::abs(L(i, j)) > tol) return false;
    }
  }
  return true;
}

Vector sorted_eigenvalues(const Matrix& L) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (L + L.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double energy(const Matrix& L) { return 0.5 * (L * L).trace(); }

double trace_power(const Matrix& L, int k) {
  Matrix p = Matrix::Identity(L.rows(), L.cols());
  for (int i = 0; i < k; ++i) p = p * L;
  return p.trace();
}

double off_diagonal_norm(const Matrix& L) {
  Matrix off = L;
  off.diagonal().setZero();
  return off.norm();
}

Matrix random_tridiagonal(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0.2, 1.0);
  std::uniform_real_distribution<double> b(-1.0, 1.0);
  Matrix L = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    L(k, k) = b(rng);
    if (k + 1 < n) L(k, k + 1) = L(k + 1, k) = a(rng);
  }
  return L;
}

Matrix random_symmetric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix L(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) L(i, j) = L(j, i) = u(rng);
  }
  return L;
}

}  // namespace metriflow::toda
