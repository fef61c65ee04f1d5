#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <thread>

#include "metriflow/integrators.hpp"
#include "metriflow/pde_flows.hpp"
#include "metriflow/quadratic_lie.hpp"
#include "support.hpp"

using namespace metriflow::integrate;
using metriflow::circle::Complex;
using metriflow::circle::ModeMultiplier;
using metriflow::circle::PeriodicField;
using Eigen::VectorXd;
namespace pde = metriflow::pde;
namespace lie = metriflow::lie;

namespace {

VectorXd v3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

Field<VectorXd> rigid_body() {
  return [](const VectorXd& p) {
    const VectorXd w = p.cwiseQuotient(v3(1, 2, 3));
    return VectorXd(v3(p(1) * w(2) - p(2) * w(1), p(2) * w(0) - p(0) * w(2), p(0) * w(1) - p(1) * w(0)));
  };
}

StiffSplit linear_split(std::function<Complex(int)> lambda) {
  StiffSplit s;
  s.linear = [lambda](const PeriodicField& u) {
    ModeMultiplier m(static_cast<std::size_t>(u.order()) + 1);
    for (int n = 0; n <= u.order(); ++n) m[static_cast<std::size_t>(n)] = lambda(n);
    return m;
  };
  s.field = [lambda](const PeriodicField& u) {
    PeriodicField out(u.order());
    for (int n = 0; n <= u.order(); ++n) out.set_coeff(n, lambda(n) * u.coeff(n));
    return out;
  };
  return s;
}

StiffSplit kdv_split() {
  StiffSplit s;
  s.field = [](const PeriodicField& u) { return pde::hybrid_field(pde::kdv_spec(), u); };
  s.linear = [](const PeriodicField& u) {
    ModeMultiplier m(static_cast<std::size_t>(u.order()) + 1);
    for (int n = 0; n <= u.order(); ++n) m[static_cast<std::size_t>(n)] = Complex(0, double(n) * n * n);
    return m;
  };
  return s;
}

}  // namespace

TEST_CASE("config validation and method names") {
  IntegratorConfig c;
  CHECK_NOTHROW(validate(c));
  c.dt = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.dt = 2;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = IntegratorConfig{};
  c.observer_stride = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = IntegratorConfig{};
  c.abs_tol = -1;
  CHECK_NOTHROW(validate(c));  // tolerances only matter for the adaptive method
  c.method = Method::rk45_adaptive;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  for (auto m : {Method::rk4, Method::rk45_adaptive, Method::integrating_factor_rk4}) {
    CHECK(method_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(method_from_string("euler"), std::invalid_argument);
  CHECK(std::string(to_string(Status::step_underflow)) == "step_underflow");
}

TEST_CASE("fixed-step sampling") {
  IntegratorConfig c;
  c.dt = 0.03;
  c.t_max = 1.0;
  c.observer_stride = 5;
  const Field<VectorXd> f = [](const VectorXd& y) { return VectorXd(-y); };
  std::vector<Diagnostic<VectorXd>> d = {{"y", [](const VectorXd& y) { return y(0); }}};
  const auto tr = integrate_rk4(f, VectorXd(VectorXd::Ones(1)), c, d);
  CHECK(tr.accepted_steps == 34);
  CHECK(tr.times.back() == 1.0);
  CHECK(tr.times.size() == tr.series("y").size());
  CHECK(tr.states.size() == tr.times.size());
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
  CHECK(tr.times.size() == 1 + 6 + 1);
  CHECK(tr.last_good(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
  CHECK_THROWS_AS(tr.series("z"), std::out_of_range);

  c.keep_states = false;
  CHECK(integrate_rk4(f, VectorXd(VectorXd::Ones(1)), c).states.empty());
  c.method = Method::integrating_factor_rk4;
  CHECK_THROWS_AS(integrate(f, VectorXd(VectorXd::Ones(1)), c), std::invalid_argument);
}

TEST_CASE("adaptive step respects tolerance") {
  const Field<VectorXd> f = [](const VectorXd& y) {
    VectorXd d(2);
    d << y(1), -y(0);
    return d;
  };
  for (double tol : {1e-6, 1e-9, 1e-12}) {
    IntegratorConfig c;
    c.method = Method::rk45_adaptive;
    c.abs_tol = c.rel_tol = tol;
    c.dt = 0.1;
    c.t_max = 10.0;
    const auto tr = integrate(f, VectorXd(VectorXd::Unit(2, 0)), c);
    REQUIRE(tr.status == Status::ok);
    CHECK(tr.times.back() == 10.0);
    const double err = std::max(std::abs(tr.last_good(0) - std::cos(10.0)),
                                std::abs(tr.last_good(1) + std::sin(10.0)));
    CHECK(err <= 100 * tol);
  }
}

TEST_CASE("adaptive and fixed-step answers agree on the rigid body") {
  IntegratorConfig a;
  a.method = Method::rk45_adaptive;
  a.abs_tol = a.rel_tol = 1e-10;
  a.t_max = 10.0;
  IntegratorConfig r;
  r.dt = 1e-3;
  r.t_max = 10.0;
  const VectorXd p0 = v3(1, 0.5, 0.2);
  const auto ta = integrate(rigid_body(), p0, a);
  const auto tr = integrate(rigid_body(), p0, r);
  CHECK((ta.last_good - tr.last_good).cwiseAbs().maxCoeff() <= 10 * 1e-10 * 10);
}

TEST_CASE("rigid body conservation over t in [0, 50]") {
  IntegratorConfig c;
  c.dt = 1e-3;
  c.t_max = 50.0;
  c.observer_stride = 100;
  std::vector<Diagnostic<VectorXd>> d = {
      {"C2", [](const VectorXd& p) { return p.squaredNorm(); }},
      {"H", [](const VectorXd& p) { return 0.5 * p.cwiseAbs2().cwiseQuotient(v3(1, 2, 3)).sum(); }}};
  const auto tr = integrate(rigid_body(), v3(1, 0.5, 0.2), c, d);
  for (const auto& s : tr.diagnostics) {
    for (double x : s) CHECK(std::abs(x - s.front()) <= 1e-8);
  }
}

TEST_CASE("failure modes") {
  const Field<VectorXd> blow = [](const VectorXd& y) { return VectorXd(y.cwiseAbs2()); };
  IntegratorConfig c;
  c.dt = 1e-2;
  c.t_max = 2.0;
  const auto tr = integrate(blow, VectorXd(VectorXd::Ones(1)), c);
  CHECK(tr.status == Status::nan_detected);
  CHECK(std::isfinite(tr.last_good(0)));
  CHECK(tr.last_good_time > 0.9);
  CHECK(tr.last_good_time < 1.1);

  c.method = Method::rk45_adaptive;
  const auto ta = integrate(blow, VectorXd(VectorXd::Ones(1)), c);
  CHECK(ta.status == Status::step_underflow);
  CHECK(ta.last_good_time == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(ta.rejected_steps > 0);
}

TEST_CASE("integrating factor: linear problems are solved exactly") {
  IntegratorConfig c;
  c.method = Method::integrating_factor_rk4;
  c.dt = 1e-2;
  c.t_max = 0.1;
  const auto heat = linear_split([](int n) { return Complex(-double(n) * n, 0); });
  const auto tr = integrate(heat, PeriodicField::cosine(16, 2), c);
  const auto exact = PeriodicField::cosine(16, 2, std::exp(-0.4));
  CHECK(testing::max_coeff_diff(tr.last_good, exact) <= 1e-6 * exact.max_abs_coeff());
  CHECK(testing::max_coeff_diff(tr.last_good, exact) <= 1e-15);

  c.t_max = 1.0;
  const auto trans = linear_split([](int n) { return Complex(0, -n); });
  const auto tt = integrate(trans, PeriodicField::cosine(16, 1), c);
  CHECK(testing::sup_diff(tt.last_good, [](double s) { return std::cos(s - 1); }) <= 1e-6);

  // the remainder defaults to field - Λu and vanishes here
  CHECK(testing::max_coeff_diff(if_rk4_step(heat, tt.last_good, 0.3),
                                [&] {
                                  PeriodicField out(16);
                                  for (int n = 0; n <= 16; ++n)
                                    out.set_coeff(n, std::exp(-0.3 * n * n) * tt.last_good.coeff(n));
                                  return out;
                                }()) < 1e-15);
}

TEST_CASE("integrating factor agrees with fine RK4 on nonlinear flows") {
  const auto u0 = PeriodicField::cosine(16, 1, 0.5);
  IntegratorConfig c;
  c.method = Method::integrating_factor_rk4;
  c.dt = 1e-3;
  c.t_max = 0.2;
  const auto a = integrate(kdv_split(), u0, c);
  IntegratorConfig r;
  r.dt = 2e-5;
  r.t_max = 0.2;
  r.keep_states = false;
  const auto b = integrate_rk4<PeriodicField>(kdv_split().field, u0, r);
  CHECK(testing::max_coeff_diff(a.last_good, b.last_good) < 1e-8);

  // frozen-coefficient split for the Gardner metriplectic equation
  StiffSplit g;
  g.field = pde::gardner_metriplectic_field;
  g.linear = [](const PeriodicField& u) {
    const double S = pde::gd3_S(u);
    ModeMultiplier m(static_cast<std::size_t>(u.order()) + 1);
    for (int n = 0; n <= u.order(); ++n) m[static_cast<std::size_t>(n)] = Complex(-S * n * n, n);
    return m;
  };
  const auto v0 = PeriodicField::constant(16, 0.1) + PeriodicField::cosine(16, 1, 0.5);
  const auto ga = integrate(g, v0, c);
  const auto gb = integrate_rk4<PeriodicField>(g.field, v0, r);
  CHECK(testing::max_coeff_diff(ga.last_good, gb.last_good) < 1e-8);
}

TEST_CASE("convergence study") {
  SUBCASE("rigid body order 4") {
    const auto rep = convergence_study<VectorXd>(rigid_body(), v3(1, 0.5, 0.2), 5.0,
                                                 {0.1, 0.05, 0.025, 0.0125});
    CHECK(rep.reliable);
    CHECK(rep.observed_order == doctest::Approx(4.0).epsilon(0.075));
  }
  SUBCASE("translation flow order at least 4") {
    const Field<PeriodicField> f = [](const PeriodicField& u) {
      return pde::kahler_hamiltonian_field(pde::H1(), u);
    };
    const auto rep = convergence_study<PeriodicField>(f, PeriodicField::cosine(8, 3), 1.0,
                                                      {0.2, 0.1, 0.05, 0.025});
    CHECK(rep.observed_order >= 3.7);
  }
  SUBCASE("linear heat with the integrating factor is exact") {
    const auto heat = linear_split([](int n) { return Complex(-double(n) * n, 0); });
    const auto rep = convergence_study(heat, PeriodicField::cosine(8, 2), 0.1, {0.05, 0.025, 0.0125});
    CHECK(rep.roundoff_limited);
    CHECK_FALSE(rep.reliable);
    for (double d : rep.differences) CHECK(d < 1e-15);
  }
  SUBCASE("inconsistent orders are flagged") {
    const auto rep = convergence_from_differences({0.1, 0.05, 0.025, 0.0125}, {1e-2, 1e-3, 1e-6}, 1.0);
    CHECK_FALSE(rep.reliable);
    CHECK_FALSE(rep.note.empty());
    CHECK_THROWS_AS(convergence_from_differences({0.1, 0.05}, {1e-3}, 1.0), std::invalid_argument);
  }
  SUBCASE("non-smooth field is flagged unreliable") {
    // y' = |y - 0.77| - 0.5 has a kink the solution crosses near t = 0.62
    const Field<VectorXd> f = [](const VectorXd& y) {
      VectorXd d(1);
      d << std::abs(y(0) - 0.77) - 0.5;
      return d;
    };
    for (const std::vector<double>& dts :
         {std::vector<double>{0.3, 0.15, 0.075, 0.0375}, std::vector<double>{0.1, 0.05, 0.025, 0.0125},
          std::vector<double>{0.07, 0.035, 0.0175, 0.00875}}) {
      const auto rep = convergence_study<VectorXd>(f, VectorXd(VectorXd::Ones(1)), 3.0, dts);
      CHECK_FALSE(rep.reliable);
      CHECK_FALSE(rep.note.empty());
    }
  }
}

TEST_CASE("concurrent runs are independent") {
  const auto u0 = PeriodicField::cosine(64, 1, 0.5);
  IntegratorConfig c;
  c.method = Method::integrating_factor_rk4;
  c.dt = 1e-3;
  c.t_max = 0.05;
  c.keep_states = false;
  const auto ref = integrate(kdv_split(), u0, c).last_good;
  std::vector<PeriodicField> out(4);
  std::vector<std::thread> pool;
  for (int i = 0; i < 4; ++i) {
    pool.emplace_back([&, i] {
      auto local = c;
      out[static_cast<std::size_t>(i)] = integrate(kdv_split(), u0.resized(64 + 8 * (i % 2)), local).last_good;
    });
  }
  for (auto& t : pool) t.join();
  CHECK(testing::max_coeff_diff(out[0], ref) == 0.0);
  CHECK(testing::max_coeff_diff(out[2], ref) == 0.0);
  CHECK(testing::max_coeff_diff(out[1], ref) < 1e-12);
}
