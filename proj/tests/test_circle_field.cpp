#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "metriflow/circle_field.hpp"
#include "support.hpp"

using namespace metriflow::circle;
using testing::eval;
using testing::max_coeff_diff;
using testing::quad;
using testing::random_field;

namespace {

std::vector<double> samples_of(const std::function<double(double)>& f, std::size_t m) {
  std::vector<double> s(m);
  for (std::size_t j = 0; j < m; ++j) s[j] = f(-kPi + 2.0 * kPi * static_cast<double>(j) / m);
  return s;
}

// (1/2π)∫uv by quadrature on the direct Fourier sums.
double mean_product(const PeriodicField& u, const PeriodicField& v) {
  return quad([&](double t) { return eval(u, t) * eval(v, t); }) / kTwoPi;
}

}  // namespace

TEST_CASE("transform of cos and constant samples") {
  const auto c = transform(samples_of([](double t) { return std::cos(t); }, 16), 7);
  CHECK(std::abs(c.coeff(1) - Complex(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(c.coeff(-1) - Complex(0.5, 0.0)) < 1e-14);
  for (int n : {0, 2, 3, 4, 5, 6, 7}) CHECK(std::abs(c.coeff(n)) < 1e-14);

  const auto one = transform(samples_of([](double) { return 1.0; }, 9));
  CHECK(one.order() == 4);
  CHECK(std::abs(one.coeff(0) - 1.0) < 1e-14);
  CHECK(one.max_abs_coeff() == doctest::Approx(1.0));
}

TEST_CASE("round trip synthesize/transform on band-limited fields") {
  std::mt19937_64 rng(11);
  for (int order : {1, 7, 32, 128}) {
    const auto u = random_field(order, rng, false);
    for (std::size_t m : {default_grid_size(order), padded_grid_size(order),
                          static_cast<std::size_t>(2 * order + 1)}) {
      const auto back = transform(synthesize(u, m), order);
      CHECK(max_coeff_diff(u, back) < 1e-12);
    }
    // samples agree with the direct Fourier sum
    const auto s = synthesize(u);
    const auto g = grid(s.size());
    double err = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) err = std::max(err, std::abs(s[j] - eval(u, g[j])));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("reality of stored spectra") {
  std::mt19937_64 rng(3);
  const auto u = random_field(9, rng, false);
  for (int n = 1; n <= 9; ++n) CHECK(u.coeff(-n) == std::conj(u.coeff(n)));
  CHECK(u.coeff(0).imag() == 0.0);
  CHECK(u.coeff(10) == Complex(0.0));

  std::vector<Complex> bad = {Complex(0, 1), 0.0, Complex(1, 0)};
  CHECK_THROWS_AS(PeriodicField::from_full_spectrum(bad), std::invalid_argument);
  std::vector<Complex> good = {Complex(1, -2), 3.0, Complex(1, 2)};
  const auto f = PeriodicField::from_full_spectrum(good);
  CHECK(f.coeff(1) == Complex(1, 2));
}

TEST_CASE("hilbert transform examples") {
  const int N = 16;
  CHECK(max_coeff_diff(hilbert(PeriodicField::cosine(N, 1)), PeriodicField::sine(N, 1)) < 1e-15);
  CHECK(hilbert(PeriodicField::constant(N, 3.0)).max_abs_coeff() == 0.0);
  std::mt19937_64 rng(5);
  const auto u = random_field(N, rng, false);
  const auto hh = hilbert(hilbert(u));
  CHECK(max_coeff_diff(hh, -u + PeriodicField::constant(N, u.mean())) < 1e-14);
  CHECK(std::abs(hilbert(u).mean()) == 0.0);
}

TEST_CASE("hilbert identities at N = 128") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_field(128, rng, false);
    const auto v = random_field(128, rng, false);
    const auto hu = hilbert(u);
    const auto hv = hilbert(v);
    CHECK(std::abs(b_induced(hu, v) + b_induced(u, hv)) < 1e-12);
    CHECK(std::abs(b_induced(u, hu)) < 1e-12);
    CHECK(std::abs(b_induced(u, u) - u.mean() * u.mean() - b_induced(hu, hu)) < 1e-12);
    CHECK(max_coeff_diff(hilbert(derivative(u)), derivative(hu)) < 1e-13);
  }
}

TEST_CASE("derivative and antiderivative") {
  const int N = 8;
  CHECK(max_coeff_diff(antiderivative(PeriodicField::cosine(N, 1)), PeriodicField::sine(N, 1)) <
        1e-15);
  const auto a = antiderivative(PeriodicField::sine(N, 1));
  CHECK(testing::sup_diff(a, [](double t) { return 1.0 - std::cos(t); }) < 1e-14);
  CHECK(std::abs(a.value_at(0.0)) < 1e-15);

  std::mt19937_64 rng(2);
  const auto u = random_field(32, rng);
  CHECK(max_coeff_diff(derivative(antiderivative(u)), u) < 1e-12);
  CHECK(max_coeff_diff(derivative(zero_mean_antiderivative(u)), u) < 1e-12);
  CHECK(std::abs(zero_mean_antiderivative(u).mean()) == 0.0);
  CHECK(std::abs(antiderivative(u).value_at(0.0)) < 1e-13);

  // ∫₀^θ u by quadrature at a few points
  for (double theta : {-2.5, -0.3, 1.0, 3.0}) {
    const int m = 4000;
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double t0 = theta * j / m, t1 = theta * (j + 1) / m;
      s += (eval(u, t0) + 4 * eval(u, 0.5 * (t0 + t1)) + eval(u, t1)) * (t1 - t0) / 6.0;
    }
    CHECK(std::abs(eval(antiderivative(u), theta) - s) < 1e-9);
  }

  CHECK_THROWS_AS(antiderivative(PeriodicField::constant(N, 1.0)), std::domain_error);
  CHECK_THROWS_AS(zero_mean_antiderivative(PeriodicField::constant(N, 0.5)), std::domain_error);
}

TEST_CASE("sqrt laplacian") {
  const int N = 16;
  CHECK(max_coeff_diff(sqrt_laplacian(PeriodicField::cosine(N, 1)), PeriodicField::cosine(N, 1)) <
        1e-15);
  std::mt19937_64 rng(8);
  const auto u = random_field(N, rng);
  CHECK(max_coeff_diff(sqrt_laplacian(sqrt_laplacian(u)), -derivative(derivative(u))) < 1e-12);
  CHECK(max_coeff_diff(sqrt_laplacian(u), hilbert(derivative(u))) < 1e-14);
  CHECK(max_coeff_diff(apply(SpectralOperator::A, u), sqrt_laplacian(u)) == 0.0);
  CHECK(max_coeff_diff(apply(SpectralOperator::A_squared, u), -derivative(derivative(u))) < 1e-12);
}

TEST_CASE("inner products: examples and quadrature oracle") {
  const int N = 8;
  const auto c1 = PeriodicField::cosine(N, 1);
  CHECK(b_induced(c1, c1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b_normal(c1, c1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b_kahler(c1, c1) == doctest::Approx(0.5).epsilon(1e-15));
  const auto c2 = PeriodicField::cosine(N, 2);
  CHECK(b_induced(c2, c2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b_normal(c2, c2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b_kahler(c2, c2) == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_field(24, rng);
    const auto v = random_field(24, rng);
    CHECK(std::abs(b_induced(u, v) - mean_product(u, v)) < 1e-12);
    CHECK(std::abs(b_normal(u, v) - mean_product(derivative(u), derivative(v))) < 1e-11);
    CHECK(std::abs(b_kahler(u, v) - mean_product(u, hilbert(derivative(v)))) < 1e-12);
    // The weights relate through 𝒜 acting on the induced metric.
    CHECK(std::abs(b_kahler(u, v) - b_induced(apply(SpectralOperator::A, u), v)) < 1e-12);
    CHECK(std::abs(b_normal(u, v) - b_induced(apply(SpectralOperator::A_squared, u), v)) < 1e-11);
    CHECK(std::abs(b_induced(u, v) - b_normal(apply(SpectralOperator::antiderivative, u),
                                              apply(SpectralOperator::antiderivative, v))) < 1e-12);
    CHECK(std::abs(b_kahler(u, v) - b_kahler(v, u)) < 1e-13);
    CHECK(b_normal(u, u) > 0.0);
    CHECK(b_kahler(u, u) > 0.0);
  }
}

TEST_CASE("cocycle and ZF form") {
  const int N = 8;
  const auto c = PeriodicField::cosine(N, 1);
  const auto s = PeriodicField::sine(N, 1);
  CHECK(cocycle_omega(c, s) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(zf_form_sigma(c, s) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(zf_form_sigma(PeriodicField::constant(N, 1.0), s), std::domain_error);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_field(20, rng);
    const auto v = random_field(20, rng);
    CHECK(std::abs(cocycle_omega(u, u)) < 1e-14);
    CHECK(std::abs(cocycle_omega(u, v) + cocycle_omega(v, u)) < 1e-13);
    CHECK(std::abs(cocycle_omega(u, v) - mean_product(derivative(u), v)) < 1e-12);
    // ω(u,v) = b₂(u,ℋv) = -b₂(ℋu,v)
    CHECK(std::abs(cocycle_omega(u, v) - b_kahler(u, hilbert(v))) < 1e-12);
    CHECK(std::abs(cocycle_omega(u, v) + b_kahler(hilbert(u), v)) < 1e-12);
    CHECK(std::abs(zf_form_sigma(u, u)) < 1e-13);
    CHECK(std::abs(zf_form_sigma(u, v) + zf_form_sigma(v, u)) < 1e-12);
    CHECK(std::abs(zf_form_sigma(derivative(derivative(u)), v) - cocycle_omega(u, v)) < 1e-10);
  }
}

TEST_CASE("dealiased products") {
  const int N = 16;
  std::mt19937_64 rng(6);
  const auto u = random_field(N, rng, false);
  CHECK(max_coeff_diff(pointwise_product(u, PeriodicField::constant(N, 1.0)), u) < 1e-14);
  const auto c = PeriodicField::cosine(N, 1);
  const auto cc = pointwise_product(c, c);
  CHECK(max_coeff_diff(cc, PeriodicField::constant(N, 0.5) + PeriodicField::cosine(N, 2, 0.5)) <
        1e-15);

  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_field(N, rng, false);
    const auto b = random_field(N, rng, false);
    CHECK(std::abs(integral_of_product(a, b) - kTwoPi * b_induced(a, b)) < 1e-12);
    CHECK(std::abs(integral_of_product(a, b) -
                   quad([&](double t) { return eval(a, t) * eval(b, t); })) < 1e-12);
    // exact band-limited product: coefficients of ab up to N by direct convolution
    const auto p = pointwise_product(a, b);
    for (int n = 0; n <= N; ++n) {
      Complex s = 0.0;
      for (int k = -N; k <= N; ++k) s += a.coeff(k) * b.coeff(n - k);
      CHECK(std::abs(p.coeff(n) - s) < 1e-13);
    }
    const auto w = random_field(N, rng, false);
    const double cubic =
        quad([&](double t) { return eval(a, t) * eval(b, t) * eval(w, t); }) / kTwoPi;
    CHECK(std::abs(mean_of_triple_product(a, b, w) - cubic) < 1e-12);
    CHECK(std::abs(integral(a) - kTwoPi * a.mean()) < 1e-14);
  }
}

TEST_CASE("identities are resolution independent") {
  std::mt19937_64 rng(9);
  const auto u = random_field(12, rng);
  const auto v = random_field(12, rng);
  for (int order : {12, 31, 64, 200}) {
    const auto U = u.resized(order);
    const auto V = v.resized(order);
    CHECK(std::abs(b_kahler(U, V) - b_kahler(u, v)) < 1e-13);
    CHECK(std::abs(cocycle_omega(U, V) - b_kahler(U, hilbert(V))) < 1e-12);
    CHECK(max_coeff_diff(pointwise_product(U, V).resized(12), pointwise_product(u, v)) <
          1e-13);
  }
}

TEST_CASE("serialization") {
  std::mt19937_64 rng(1);
  const auto u = random_field(5, rng, false);
  const auto back = from_json(to_json(u));
  CHECK(max_coeff_diff(u, back) == 0.0);
  const auto csv = to_grid_csv(PeriodicField::cosine(2, 1), 5);
  CHECK(csv.rfind("theta,u\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK_THROWS(from_json("[[0, 1]]"));
}

TEST_CASE("arithmetic and resizing") {
  const auto a = PeriodicField::cosine(4, 2, 2.0);
  const auto b = PeriodicField::sine(6, 1);
  const auto s = a + b;
  CHECK(s.order() == 6);
  CHECK(s.coeff(2) == Complex(1.0, 0.0));
  CHECK(s.coeff(1) == Complex(0.0, -0.5));
  CHECK(a.resized(1).coeff(2) == Complex(0.0));
  CHECK(max_abs(-2.0 * a) == doctest::Approx(2.0));
}
