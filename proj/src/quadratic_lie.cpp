#include "metriflow/quadratic_lie.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace metriflow::lie {

namespace {

constexpr double kStructureTol = 1e-12;
constexpr double kRangeTol = 1e-8;

void check_dim(const LieAlgebraSpec& alg, const Vector& x, const char* what) {
  if (x.size() != alg.dim()) {
    std::ostringstream msg;
    msg << what << ": element has length " << x.size() << ", algebra dimension is " << alg.dim();
    throw std::invalid_argument(msg.str());
  }
}

double max_abs_entry(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

int detect_symmetric_sign(const LieAlgebraSpec& alg) {
  const int n = alg.dim();
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  bool pos = false;
  bool neg = false;
  auto sample = [&](const Vector& a, const Vector& b) {
    const Vector ab = bracket(alg, a, b);
    const double q = pairing(alg, ab, ab);
    const double scale = std::max(1e-300, ab.squaredNorm() * alg.form().norm());
    if (q > 1e-12 * scale) pos = true;
    if (q < -1e-12 * scale) neg = true;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) sample(Vector::Unit(n, i), Vector::Unit(n, j));
  }
  for (int trial = 0; trial < 64; ++trial) {
    Vector a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng);
    }
    sample(a, b);
  }
  if (pos && neg) return 0;
  return neg ? -1 : 1;
}

int require_sign(const LieAlgebraSpec& alg, const char* what) {
  const int s = alg.symmetric_sign();
  if (s == 0) {
    throw std::domain_error(std::string(what) + ": form on algebra '" + alg.name() +
                            "' is indefinite on brackets; no semidefinite symmetric bracket");
  }
  return s;
}

}  // namespace

// ---- LieAlgebraSpec ------------------------------------------------------------

LieAlgebraSpec::LieAlgebraSpec(int dim, std::vector<double> structure_constants, Matrix form,
                               std::string name)
    : dim_(dim), c_(std::move(structure_constants)), form_(std::move(form)), name_(std::move(name)) {
  if (dim_ <= 0) throw std::invalid_argument("LieAlgebraSpec: dimension must be positive");
  const auto expected = static_cast<std::size_t>(dim_) * dim_ * dim_;
  if (c_.size() != expected) {
    throw std::invalid_argument("LieAlgebraSpec: expected " + std::to_string(expected) +
                                " structure constants, got " + std::to_string(c_.size()));
  }
  if (form_.rows() != dim_ || form_.cols() != dim_) {
    throw std::invalid_argument("LieAlgebraSpec: form must be dim x dim");
  }
  if ((form_ - form_.transpose()).cwiseAbs().maxCoeff() > kStructureTol) {
    throw std::invalid_argument("LieAlgebraSpec: form is not symmetric");
  }
  const double cscale = std::max(1.0, max_abs_entry(c_));
  const double fscale = std::max(1.0, form_.cwiseAbs().maxCoeff());
  if (antisymmetry_residual() > kStructureTol * cscale) {
    throw std::invalid_argument("LieAlgebraSpec: structure constants are not antisymmetric");
  }
  if (jacobi_residual() > kStructureTol * cscale * cscale) {
    throw std::invalid_argument("LieAlgebraSpec: Jacobi identity fails (residual " +
                                std::to_string(jacobi_residual()) + ")");
  }
  if (invariance_residual() > kStructureTol * cscale * fscale) {
    throw std::invalid_argument("LieAlgebraSpec: form is not ad-invariant (residual " +
                                std::to_string(invariance_residual()) + ")");
  }
  const double det = form_.determinant();
  if (std::abs(det) <= 1e-12 * std::pow(fscale, dim_)) {
    throw std::invalid_argument("LieAlgebraSpec: form is degenerate (det " + std::to_string(det) +
                                ")");
  }
  form_inverse_ = form_.inverse();
  symmetric_sign_ = detect_symmetric_sign(*this);
}

LieAlgebraSpec LieAlgebraSpec::with_killing_form(int dim, std::vector<double> structure_constants,
                                                 std::string name) {
  Matrix k = killing_form(dim, structure_constants);
  return LieAlgebraSpec(dim, std::move(structure_constants), std::move(k), std::move(name));
}

Matrix LieAlgebraSpec::ad(const Vector& x) const {
  Matrix m = Matrix::Zero(dim_, dim_);
  for (int p = 0; p < dim_; ++p) {
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) m(p, j) += c(p, i, j) * x[i];
    }
  }
  return m;
}

double LieAlgebraSpec::antisymmetry_residual() const {
  double r = 0.0;
  for (int p = 0; p < dim_; ++p) {
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) r = std::max(r, std::abs(c(p, i, j) + c(p, j, i)));
    }
  }
  return r;
}

double LieAlgebraSpec::jacobi_residual() const {
  double r = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        for (int q = 0; q < dim_; ++q) {
          double s = 0.0;
          for (int m = 0; m < dim_; ++m) {
            s += c(m, i, j) * c(q, m, k) + c(m, j, k) * c(q, m, i) + c(m, k, i) * c(q, m, j);
          }
          r = std::max(r, std::abs(s));
        }
      }
    }
  }
  return r;
}

double LieAlgebraSpec::invariance_residual() const {
  // κ([e_i, e_j], e_k) - κ(e_i, [e_j, e_k])
  double r = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        double lhs = 0.0;
        double rhs = 0.0;
        for (int p = 0; p < dim_; ++p) {
          lhs += c(p, i, j) * form_(p, k);
          rhs += form_(i, p) * c(p, j, k);
        }
        r = std::max(r, std::abs(lhs - rhs));
      }
    }
  }
  return r;
}

Matrix killing_form(int dim, const std::vector<double>& c) {
  auto at = [&](int p, int i, int j) { return c[static_cast<std::size_t>((p * dim + i) * dim + j)]; };
  Matrix k = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) s += at(p, i, q) * at(q, j, p);
      }
      k(i, j) = s;
    }
  }
  return k;
}

LieAlgebraSpec so3_preset() {
  std::vector<double> eps(27, 0.0);
  auto set = [&](int p, int i, int j, double v) { eps[static_cast<std::size_t>((p * 3 + i) * 3 + j)] = v; };
  // [e_i, e_j] = ε_{ijp} e_p
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int p = (i + 2) % 3;
    set(p, i, j, 1.0);
    set(p, j, i, -1.0);
  }
  return LieAlgebraSpec(3, std::move(eps), Matrix::Identity(3, 3), "so3");
}

// ---- scalar fields ---------------------------------------------------------------

Vector ScalarField::euclidean_differential(const Vector& xi) const {
  if (differential) return differential(xi);
  const double h = 1e-6 * (1.0 + xi.norm());
  Vector d(xi.size());
  Vector probe = xi;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    probe[i] = xi[i] + h;
    const double fp = value(probe);
    probe[i] = xi[i] - h;
    const double fm = value(probe);
    probe[i] = xi[i];
    d[i] = (fp - fm) / (2.0 * h);
  }
  return d;
}

ScalarField constant_field(double c) {
  return {"constant", [c](const Vector&) { return c; },
          [](const Vector& xi) { return Vector(Vector::Zero(xi.size())); }};
}

ScalarField linear_field(const Vector& c) {
  return {"linear", [c](const Vector& xi) { return c.dot(xi); }, [c](const Vector&) { return c; }};
}

ScalarField coordinate_field(int dim, int i) {
  ScalarField f = linear_field(Vector::Unit(dim, i));
  f.name = "xi" + std::to_string(i + 1);
  return f;
}

ScalarField quadratic_field(const Matrix& q, std::string name) {
  const Matrix sym = 0.5 * (q + q.transpose());
  return {std::move(name), [sym](const Vector& xi) { return 0.5 * xi.dot(sym * xi); },
          [sym](const Vector& xi) { return Vector(sym * xi); }};
}

ScalarField casimir_c2(const LieAlgebraSpec& alg) { return quadratic_field(alg.form(), "C2"); }

ScalarField rigid_body_energy(const Vector& inertia) {
  if ((inertia.array() <= 0.0).any()) {
    throw std::invalid_argument("rigid_body_energy: moments of inertia must be positive");
  }
  const Vector inv = inertia.cwiseInverse();
  return {"rigid_body_H",
          [inv](const Vector& p) { return 0.5 * p.dot(inv.cwiseProduct(p)); },
          [inv](const Vector& p) { return Vector(inv.cwiseProduct(p)); }};
}

ScalarField product(const ScalarField& f, const ScalarField& g) {
  return {f.name + "*" + g.name,
          [f, g](const Vector& xi) { return f(xi) * g(xi); },
          [f, g](const Vector& xi) {
            return Vector(f(xi) * g.euclidean_differential(xi) + g(xi) * f.euclidean_differential(xi));
          }};
}

ScalarField finite_difference_only(ScalarField f) {
  f.differential = nullptr;
  return f;
}

// ---- brackets and fields ---------------------------------------------------------

Vector bracket(const LieAlgebraSpec& alg, const Vector& x, const Vector& y) {
  check_dim(alg, x, "bracket");
  check_dim(alg, y, "bracket");
  const int n = alg.dim();
  Vector out = Vector::Zero(n);
  for (int p = 0; p < n; ++p) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (x[i] == 0.0) continue;
      for (int j = 0; j < n; ++j) s += alg.c(p, i, j) * x[i] * y[j];
    }
    out[p] = s;
  }
  return out;
}

double pairing(const LieAlgebraSpec& alg, const Vector& x, const Vector& y) {
  check_dim(alg, x, "pairing");
  check_dim(alg, y, "pairing");
  return x.dot(alg.form() * y);
}

Vector metric_gradient(const LieAlgebraSpec& alg, const ScalarField& f, const Vector& xi) {
  check_dim(alg, xi, "metric_gradient");
  return alg.form_inverse() * f.euclidean_differential(xi);
}

double triple_bracket(const LieAlgebraSpec& alg, const ScalarField& f, const ScalarField& g,
                      const ScalarField& h, const Vector& xi) {
  return pairing(alg, metric_gradient(alg, f, xi),
                 bracket(alg, metric_gradient(alg, g, xi), metric_gradient(alg, h, xi)));
}

Vector pair_vector_field(const LieAlgebraSpec& alg, const ScalarField& f, const ScalarField& g,
                         const Vector& xi) {
  return bracket(alg, metric_gradient(alg, f, xi), metric_gradient(alg, g, xi));
}

double lie_poisson_bracket(const LieAlgebraSpec& alg, const ScalarField& f, const ScalarField& g,
                           int sign, const Vector& xi) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("lie_poisson_bracket: sign must be ±1");
  return sign * pairing(alg, xi, pair_vector_field(alg, f, g, xi));
}

Vector lie_poisson_field(const LieAlgebraSpec& alg, const ScalarField& h, int sign,
                         const Vector& xi) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("lie_poisson_field: sign must be ±1");
  return -sign * bracket(alg, xi, metric_gradient(alg, h, xi));
}

Vector double_bracket_gradient_field(const LieAlgebraSpec& alg, const ScalarField& H,
                                     const Vector& L) {
  return bracket(alg, L, bracket(alg, L, metric_gradient(alg, H, L)));
}

Vector normal_metric_gradient(const LieAlgebraSpec& alg, const ScalarField& H, const Vector& L) {
  const int s = require_sign(alg, "normal_metric_gradient");
  return -s * double_bracket_gradient_field(alg, H, L);
}

double symmetric_bracket(const LieAlgebraSpec& alg, const ScalarField& f, const ScalarField& g,
                         const ScalarField& h, const Vector& xi) {
  const int s = require_sign(alg, "symmetric_bracket");
  return s * pairing(alg, pair_vector_field(alg, h, f, xi), pair_vector_field(alg, h, g, xi));
}

Vector metriplectic_conservative_part(const LieAlgebraSpec& alg, const ScalarField& H,
                                      const ScalarField& S, const Vector& xi) {
  return pair_vector_field(alg, S, H, xi);
}

Vector metriplectic_dissipative_part(const LieAlgebraSpec& alg, const ScalarField& H,
                                     const ScalarField& S, const Vector& xi) {
  const int s = require_sign(alg, "metriplectic_dissipative_part");
  const Vector gh = metric_gradient(alg, H, xi);
  const Vector gs = metric_gradient(alg, S, xi);
  return -s * bracket(alg, gh, bracket(alg, gh, gs));
}

Vector metriplectic_field(const LieAlgebraSpec& alg, const ScalarField& H, const ScalarField& S,
                          const Vector& xi) {
  return metriplectic_conservative_part(alg, H, S, xi) +
         metriplectic_dissipative_part(alg, H, S, xi);
}

double normal_metric_pairing(const LieAlgebraSpec& alg, const Vector& L, const Vector& v1,
                             const Vector& v2) {
  check_dim(alg, L, "normal_metric_pairing");
  check_dim(alg, v1, "normal_metric_pairing");
  check_dim(alg, v2, "normal_metric_pairing");
  const int s = require_sign(alg, "normal_metric_pairing");
  const Matrix positive = s * alg.form();
  Eigen::LLT<Matrix> chol(positive);
  if (chol.info() != Eigen::Success) {
    throw std::domain_error("normal_metric_pairing: s·κ is not positive definite on '" +
                            alg.name() + "'");
  }
  // In coordinates Z = R X with s·κ = RᵀR the metric is Euclidean, so the
  // minimum-norm solution of (ad_L R⁻¹) Z = v is the orthogonal representative.
  const Matrix R = chol.matrixU();
  const Matrix Rinv = R.inverse();
  const Matrix A = alg.ad(L) * Rinv;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  auto solve = [&](const Vector& v) {
    Vector z = cod.solve(v);
    const double residual = (A * z - v).norm();
    if (residual > kRangeTol * std::max(1.0, v.norm())) {
      std::ostringstream msg;
      msg << "normal_metric_pairing: tangent vector not in range(ad_L), residual " << residual;
      throw std::domain_error(msg.str());
    }
    return z;
  };
  return solve(v1).dot(solve(v2));
}

}  // namespace metriflow::lie
