#include "metriflow/circle_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace metriflow::circle {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per grid size under a lock and shared afterwards.
class PlanCache {
 public:
  struct Plans {
    fftw_plan forward = nullptr;   // r2c
    fftw_plan backward = nullptr;  // c2r
  };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  const Plans& get(std::size_t size) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(size);
    if (it != plans_.end()) return it->second;

    const int n = static_cast<int>(size);
    std::vector<double> real(size);
    std::vector<fftw_complex> spec(size / 2 + 1);
    Plans p;
    p.forward = fftw_plan_dft_r2c_1d(n, real.data(), spec.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft_c2r_1d(n, spec.data(), real.data(),
                                      FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    if (p.forward == nullptr || p.backward == nullptr) {
      throw std::runtime_error("FFTW plan creation failed for grid size " + std::to_string(size));
    }
    return plans_.emplace(size, p).first->second;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [size, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<std::size_t, Plans> plans_;
};

double alternating_sign(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

void require_zero_mean(const PeriodicField& u, const char* what) {
  const double scale = std::max(1.0, u.max_abs_coeff());
  if (std::abs(u.mean()) > 1e-12 * scale) {
    std::ostringstream msg;
    msg << what << ": field has nonzero mean " << std::setprecision(17) << u.mean()
        << " (result would not be periodic)";
    throw std::domain_error(msg.str());
  }
}

// Σ_{n=-N}^{N} w(n) û(n) conj v̂(n), with w even in n.
template <class Weight>
double weighted_pairing(const PeriodicField& u, const PeriodicField& v, Weight w) {
  const int order = std::min(u.order(), v.order());
  double total = 0.0;
  for (int n = 0; n <= order; ++n) {
    const double term = w(n) * (u.coeff(n) * std::conj(v.coeff(n))).real();
    total += (n == 0) ? term : 2.0 * term;
  }
  return total;
}

}  // namespace

// ---- PeriodicField ----------------------------------------------------------

PeriodicField::PeriodicField(int order) {
  if (order < 0) throw std::invalid_argument("PeriodicField: order must be non-negative");
  coeffs_.assign(static_cast<std::size_t>(order) + 1, Complex{});
}

PeriodicField PeriodicField::from_coefficients(std::vector<Complex> nonnegative_modes) {
  if (nonnegative_modes.empty()) {
    throw std::invalid_argument("PeriodicField: need at least the zero mode");
  }
  PeriodicField u;
  u.coeffs_ = std::move(nonnegative_modes);
  u.coeffs_[0] = Complex(u.coeffs_[0].real(), 0.0);
  return u;
}

PeriodicField PeriodicField::from_full_spectrum(std::span<const Complex> modes) {
  if (modes.size() % 2 == 0) {
    throw std::invalid_argument("PeriodicField: full spectrum must have odd length 2N+1");
  }
  const int order = static_cast<int>(modes.size() / 2);
  double scale = 1.0;
  for (const auto& c : modes) scale = std::max(scale, std::abs(c));
  PeriodicField u(order);
  for (int n = 0; n <= order; ++n) {
    const Complex pos = modes[static_cast<std::size_t>(order + n)];
    const Complex neg = modes[static_cast<std::size_t>(order - n)];
    if (std::abs(pos - std::conj(neg)) > 1e-14 * scale) {
      throw std::invalid_argument("PeriodicField: spectrum is not Hermitian at n = " +
                                  std::to_string(n) + " (field would not be real)");
    }
    u.coeffs_[static_cast<std::size_t>(n)] = pos;
  }
  u.coeffs_[0] = Complex(u.coeffs_[0].real(), 0.0);
  return u;
}

PeriodicField PeriodicField::cosine(int order, int n, double amplitude) {
  PeriodicField u(order);
  if (n == 0) {
    u.set_coeff(0, amplitude);
  } else {
    u.set_coeff(n, 0.5 * amplitude);
  }
  return u;
}

PeriodicField PeriodicField::sine(int order, int n, double amplitude) {
  PeriodicField u(order);
  // sin nθ = (e^{inθ} - e^{-inθ}) / 2i
  if (n != 0) u.set_coeff(n, Complex(0.0, -0.5 * amplitude));
  return u;
}

PeriodicField PeriodicField::constant(int order, double value) {
  PeriodicField u(order);
  u.set_coeff(0, value);
  return u;
}

Complex PeriodicField::coeff(int n) const {
  const int m = std::abs(n);
  if (m > order()) return {};
  const Complex c = coeffs_[static_cast<std::size_t>(m)];
  return n >= 0 ? c : std::conj(c);
}

void PeriodicField::set_coeff(int n, Complex value) {
  const int m = std::abs(n);
  if (m > order()) {
    throw std::out_of_range("PeriodicField::set_coeff: mode " + std::to_string(n) +
                            " beyond order " + std::to_string(order()));
  }
  if (m == 0) {
    coeffs_[0] = Complex(value.real(), 0.0);
  } else {
    coeffs_[static_cast<std::size_t>(m)] = n > 0 ? value : std::conj(value);
  }
}

double PeriodicField::value_at(double theta) const {
  double total = mean();
  for (int n = 1; n <= order(); ++n) {
    total += 2.0 * (coeffs_[static_cast<std::size_t>(n)] * std::polar(1.0, n * theta)).real();
  }
  return total;
}

double PeriodicField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool PeriodicField::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

PeriodicField PeriodicField::resized(int new_order) const {
  PeriodicField out(new_order);
  const int common = std::min(new_order, order());
  for (int n = 0; n <= common; ++n) {
    out.coeffs_[static_cast<std::size_t>(n)] = coeffs_[static_cast<std::size_t>(n)];
  }
  return out;
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t n = 0; n < other.coeffs_.size(); ++n) coeffs_[n] += other.coeffs_[n];
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t n = 0; n < other.coeffs_.size(); ++n) coeffs_[n] -= other.coeffs_[n];
  return *this;
}

PeriodicField& PeriodicField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

double max_abs(const PeriodicField& u) { return u.max_abs_coeff(); }

// ---- multipliers --------------------------------------------------------------

Complex multiplier(SpectralOperator op, int n) {
  const double dn = static_cast<double>(n);
  const double sign = (n > 0) - (n < 0);
  switch (op) {
    case SpectralOperator::identity:
      return 1.0;
    case SpectralOperator::derivative:
      return {0.0, dn};
    case SpectralOperator::antiderivative:
      return n == 0 ? Complex{} : Complex(0.0, -1.0 / dn);
    case SpectralOperator::hilbert:
      return {0.0, -sign};
    case SpectralOperator::sqrt_laplacian:
    case SpectralOperator::A:
      return std::abs(dn);
    case SpectralOperator::A_squared:
      return dn * dn;
  }
  return {};
}

PeriodicField apply(SpectralOperator op, const PeriodicField& u) {
  PeriodicField out(u.order());
  for (int n = 0; n <= u.order(); ++n) out.set_coeff(n, multiplier(op, n) * u.coeff(n));
  return out;
}

PeriodicField apply(const ModeMultiplier& m, const PeriodicField& u) {
  if (m.size() != static_cast<std::size_t>(u.order()) + 1) {
    throw std::invalid_argument("apply: multiplier table size does not match field order");
  }
  PeriodicField out(u.order());
  for (int n = 0; n <= u.order(); ++n) {
    out.set_coeff(n, m[static_cast<std::size_t>(n)] * u.coeff(n));
  }
  return out;
}

PeriodicField hilbert(const PeriodicField& u) { return apply(SpectralOperator::hilbert, u); }
PeriodicField derivative(const PeriodicField& u) { return apply(SpectralOperator::derivative, u); }
PeriodicField sqrt_laplacian(const PeriodicField& u) {
  return apply(SpectralOperator::sqrt_laplacian, u);
}

PeriodicField zero_mean_antiderivative(const PeriodicField& u) {
  require_zero_mean(u, "antiderivative");
  return apply(SpectralOperator::antiderivative, u);
}

PeriodicField antiderivative(const PeriodicField& u) {
  PeriodicField out = zero_mean_antiderivative(u);
  out.set_coeff(0, -out.value_at(0.0));
  return out;
}

PeriodicField zero_mean_part(const PeriodicField& u) {
  PeriodicField out = u;
  if (!out.empty()) out.set_coeff(0, 0.0);
  return out;
}

// ---- inner products -------------------------------------------------------------

double b_induced(const PeriodicField& u, const PeriodicField& v) {
  return weighted_pairing(u, v, [](int) { return 1.0; });
}

double b_normal(const PeriodicField& u, const PeriodicField& v) {
  return weighted_pairing(u, v, [](int n) { return static_cast<double>(n) * n; });
}

double b_kahler(const PeriodicField& u, const PeriodicField& v) {
  return weighted_pairing(u, v, [](int n) { return static_cast<double>(n); });
}

double cocycle_omega(const PeriodicField& u, const PeriodicField& v) {
  return b_induced(derivative(u), v);
}

double zf_form_sigma(const PeriodicField& u1, const PeriodicField& u2) {
  return b_induced(antiderivative(u1), u2);
}

double integral(const PeriodicField& u) { return kTwoPi * u.mean(); }

double integral_of_product(const PeriodicField& u, const PeriodicField& v) {
  return kTwoPi * b_induced(u, v);
}

// ---- transforms -----------------------------------------------------------------

std::vector<double> grid(std::size_t size) {
  std::vector<double> theta(size);
  for (std::size_t j = 0; j < size; ++j) {
    theta[j] = -kPi + kTwoPi * static_cast<double>(j) / static_cast<double>(size);
  }
  return theta;
}

std::size_t default_grid_size(int order) { return 2 * (static_cast<std::size_t>(order) + 1); }

std::size_t padded_grid_size(int order) { return 4 * (static_cast<std::size_t>(order) + 1); }

std::vector<double> synthesize(const PeriodicField& u, std::size_t size) {
  if (size < 2 * static_cast<std::size_t>(u.order()) + 1) {
    throw std::invalid_argument("synthesize: grid of " + std::to_string(size) +
                                " points cannot resolve order " + std::to_string(u.order()));
  }
  const auto& plans = PlanCache::instance().get(size);
  std::vector<fftw_complex> spec(size / 2 + 1);
  for (auto& c : spec) c[0] = c[1] = 0.0;
  for (int n = 0; n <= u.order(); ++n) {
    // e^{inθ_j} = (-1)^n e^{2πinj/M} on the grid starting at -π
    const Complex c = alternating_sign(n) * u.coeff(n);
    spec[static_cast<std::size_t>(n)][0] = c.real();
    spec[static_cast<std::size_t>(n)][1] = c.imag();
  }
  std::vector<double> samples(size);
  fftw_execute_dft_c2r(plans.backward, spec.data(), samples.data());
  return samples;
}

std::vector<double> synthesize(const PeriodicField& u) {
  return synthesize(u, default_grid_size(u.order()));
}

PeriodicField transform(std::span<const double> samples, int order) {
  const std::size_t size = samples.size();
  if (size == 0) throw std::invalid_argument("transform: no samples");
  const int max_order = static_cast<int>((size - 1) / 2);
  if (order < 0) order = max_order;
  if (order > max_order) {
    throw std::invalid_argument("transform: order " + std::to_string(order) +
                                " not resolved by " + std::to_string(size) + " samples");
  }
  const auto& plans = PlanCache::instance().get(size);
  std::vector<double> input(samples.begin(), samples.end());
  std::vector<fftw_complex> spec(size / 2 + 1);
  fftw_execute_dft_r2c(plans.forward, input.data(), spec.data());

  PeriodicField u(order);
  const double scale = 1.0 / static_cast<double>(size);
  for (int n = 0; n <= order; ++n) {
    const auto& c = spec[static_cast<std::size_t>(n)];
    u.set_coeff(n, alternating_sign(n) * scale * Complex(c[0], c[1]));
  }
  return u;
}

PeriodicField pointwise_product(const PeriodicField& u, const PeriodicField& v) {
  const int order = std::max(u.order(), v.order());
  const std::size_t size = padded_grid_size(order);
  const auto us = synthesize(u, size);
  const auto vs = synthesize(v, size);
  std::vector<double> prod(size);
  for (std::size_t j = 0; j < size; ++j) prod[j] = us[j] * vs[j];
  return transform(prod, order);
}

double mean_of_triple_product(const PeriodicField& u, const PeriodicField& v,
                              const PeriodicField& w) {
  const int order = std::max({u.order(), v.order(), w.order()});
  const std::size_t size = padded_grid_size(order);
  const auto us = synthesize(u, size);
  const auto vs = synthesize(v, size);
  const auto ws = synthesize(w, size);
  double total = 0.0;
  for (std::size_t j = 0; j < size; ++j) total += us[j] * vs[j] * ws[j];
  return total / static_cast<double>(size);
}

// ---- serialization ---------------------------------------------------------------

std::string to_json(const PeriodicField& u) {
  nlohmann::json modes = nlohmann::json::array();
  for (int n = -u.order(); n <= u.order(); ++n) {
    const Complex c = u.coeff(n);
    modes.push_back({n, c.real(), c.imag()});
  }
  return modes.dump();
}

PeriodicField from_json(const std::string& text) {
  const auto modes = nlohmann::json::parse(text);
  if (!modes.is_array()) throw std::invalid_argument("from_json: expected an array of [n, re, im]");
  int order = 0;
  for (const auto& m : modes) order = std::max(order, std::abs(m.at(0).get<int>()));
  std::vector<Complex> full(2 * static_cast<std::size_t>(order) + 1);
  std::vector<bool> seen(full.size(), false);
  for (const auto& m : modes) {
    const int n = m.at(0).get<int>();
    const auto idx = static_cast<std::size_t>(order + n);
    full[idx] = Complex(m.at(1).get<double>(), m.at(2).get<double>());
    seen[idx] = true;
  }
  // Half spectra (n >= 0 only) are completed by conjugation.
  for (int n = 1; n <= order; ++n) {
    const auto pos = static_cast<std::size_t>(order + n);
    const auto neg = static_cast<std::size_t>(order - n);
    if (seen[pos] && !seen[neg]) full[neg] = std::conj(full[pos]);
    if (seen[neg] && !seen[pos]) full[pos] = std::conj(full[neg]);
  }
  return PeriodicField::from_full_spectrum(full);
}

std::string to_grid_csv(const PeriodicField& u, std::size_t size) {
  const auto theta = grid(size);
  const auto values = synthesize(u, size);
  std::ostringstream out;
  out << "theta,u\n" << std::setprecision(17);
  for (std::size_t j = 0; j < size; ++j) out << theta[j] << ',' << values[j] << '\n';
  return out.str();
}

}  // namespace metriflow::circle
