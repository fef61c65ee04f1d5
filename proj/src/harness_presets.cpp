#include <cmath>
#include <random>
#include <sstream>

#include "harness_internal.hpp"
#include "metriflow/pde_flows.hpp"
#include "metriflow/quadratic_lie.hpp"
#include "metriflow/toda.hpp"

namespace metriflow::harness {

using circle::Complex;
using circle::ModeMultiplier;
using circle::PeriodicField;
using Eigen::MatrixXd;
using Eigen::VectorXd;

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"kdv", StateKind::field, "periodic KdV u_t = 6uu' - u''' (Gardner bracket, H_KdV)",
       "Gardner bracket / KdV Hamiltonian"},
      {"kdv_linear_damping", StateKind::field, "KdV minus normal-metric gradient of H1: ... - u",
       "hybrid flow (i)"},
      {"kdv_viscous", StateKind::field, "KdV minus induced-metric gradient of H1: ... + u''",
       "hybrid flow (ii)"},
      {"kdv_landau", StateKind::field, "KdV minus Kahler gradient of H1: ... - H(u')",
       "hybrid flow (iii), Ott-Sudan"},
      {"advection_landau", StateKind::field, "u_t = -u' - H(u'): Kahler flow of H1 plus damping",
       "advection with Landau damping"},
      {"heat", StateKind::field, "u_t = u'' from the symmetric bracket (F,G)_{H0} with G = -H2",
       "heat equation from the Gardner symmetric bracket"},
      {"gardner_metriplectic", StateKind::field,
       "u_t = u' + S u'' + Q, S = int u, Q = int u'^2 (conserves H2, produces S)",
       "Gardner-triple metriplectic equation"},
      {"benjamin_ono", StateKind::field, "u_t = H(u'') + 2uu' (Gardner bracket, H_BO)",
       "Benjamin-Ono Hamiltonian"},
      {"translation", StateKind::field, "u_t = -u': Kahler Hamiltonian flow of H1, exact shift",
       "Kahler Hamiltonian flow of H1"},
      {"rigid_body", StateKind::vector, "Euler equations Pi' = Pi x Omega, Omega_i = Pi_i/I_i",
       "rigid body Lie-Poisson bracket"},
      {"rigid_body_metriplectic", StateKind::vector,
       "Pi' = grad S x grad H - grad H x (grad H x grad S), H rigid body, S = |Pi|^2/2",
       "so(3) metriplectic double-cross equation"},
      {"so3_ex1", StateKind::vector, "Pi' = c x Pi - Pi x (Pi x c): H = |Pi|^2/2, S = c.Pi",
       "so(3) metriplectic example 1"},
      {"so3_ex2", StateKind::vector, "Pi' = Pi x c - c x (c x Pi): H = c.Pi, S = |Pi|^2/2",
       "so(3) metriplectic example 2"},
      {"double_bracket_so3", StateKind::vector, "L' = [L,[L,N]] on so(3), N = c",
       "double bracket flow on an adjoint orbit"},
      {"toda_lax", StateKind::matrix, "tridiagonal Toda lattice L' = [B, L]",
       "Flaschka variables, Lax equation"},
      {"toda_double_bracket", StateKind::matrix, "L' = [L,[L,N]], N = diag(1..n); sorts the spectrum",
       "Toda as a double bracket flow"},
      {"full_toda", StateKind::matrix, "full symmetric Toda L' = [pi_s L, L]",
       "full Toda flow, chopping Casimirs"},
      {"full_toda_dissipative", StateKind::matrix,
       "L' = [pi_s L, L] + [L,[L,grad I_1k]]: conserves tr L^2/2, produces I_1k",
       "dissipative full Toda (metriplectic)"},
  };
  return catalog;
}

const PresetInfo& find_preset(const std::string& name) {
  for (const auto& p : preset_catalog()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + name + "' (see `metriflow list`)");
}

std::string list_presets() {
  std::ostringstream out;
  for (const auto& p : preset_catalog()) {
    const char* kind = p.kind == StateKind::field ? "field" : p.kind == StateKind::vector ? "so3" : "matrix";
    out << p.name << "  [" << kind << "]  " << p.description << "  (" << p.anchor << ")\n";
  }
  return out.str();
}

// ---- stiff splits -------------------------------------------------------------

namespace {

using MultiplierFn = std::function<Complex(int)>;

integrate::StiffSplit split_from(const pde::FlowSpec& spec, MultiplierFn lambda,
                                 integrate::Field<PeriodicField> remainder) {
  integrate::StiffSplit s;
  s.field = [spec](const PeriodicField& u) { return pde::hybrid_field(spec, u); };
  s.linear = [lambda](const PeriodicField& u) {
    ModeMultiplier m(static_cast<std::size_t>(u.order()) + 1);
    for (int n = 0; n <= u.order(); ++n) m[static_cast<std::size_t>(n)] = lambda(n);
    return m;
  };
  s.remainder = std::move(remainder);
  return s;
}

PeriodicField kdv_nonlinear(const PeriodicField& u) {
  return 3.0 * circle::derivative(circle::pointwise_product(u, u));
}

PeriodicField bo_nonlinear(const PeriodicField& u) {
  return circle::derivative(circle::pointwise_product(u, u));
}

PeriodicField zero_like(const PeriodicField& u) { return PeriodicField(u.order()); }

Complex i_n3(int n) { return {0.0, static_cast<double>(n) * n * n}; }

}  // namespace

integrate::StiffSplit field_preset_split(const std::string& name) {
  if (name == "kdv") return split_from(pde::kdv_spec(), i_n3, kdv_nonlinear);
  if (name == "kdv_linear_damping") {
    return split_from(pde::kdv_linear_damping_spec(),
                      [](int n) { return n == 0 ? Complex{} : i_n3(n) - 1.0; }, kdv_nonlinear);
  }
  if (name == "kdv_viscous") {
    return split_from(pde::kdv_viscous_spec(),
                      [](int n) { return i_n3(n) - static_cast<double>(n) * n; }, kdv_nonlinear);
  }
  if (name == "kdv_landau") {
    return split_from(pde::kdv_landau_spec(),
                      [](int n) { return i_n3(n) - static_cast<double>(std::abs(n)); }, kdv_nonlinear);
  }
  if (name == "advection_landau") {
    return split_from(pde::advection_landau_spec(),
                      [](int n) { return Complex(-static_cast<double>(std::abs(n)), -static_cast<double>(n)); },
                      zero_like);
  }
  if (name == "translation") {
    return split_from(pde::translation_spec(),
                      [](int n) { return Complex(0.0, -static_cast<double>(n)); }, zero_like);
  }
  if (name == "heat") {
    return split_from(pde::heat_spec(), [](int n) { return Complex(-static_cast<double>(n) * n); },
                      zero_like);
  }
  if (name == "benjamin_ono") {
    return split_from(pde::benjamin_ono_spec(),
                      [](int n) { return Complex(0.0, static_cast<double>(n) * std::abs(n)); },
                      bo_nonlinear);
  }
  if (name == "gardner_metriplectic") {
    integrate::StiffSplit s;
    s.field = pde::gardner_metriplectic_field;
    // S frozen at the start of the step; the rest is handled explicitly.
    s.linear = [](const PeriodicField& u) {
      const double S = pde::gd3_S(u);
      ModeMultiplier m(static_cast<std::size_t>(u.order()) + 1);
      for (int n = 0; n <= u.order(); ++n) {
        m[static_cast<std::size_t>(n)] = Complex(-S * n * n, static_cast<double>(n));
      }
      return m;
    };
    return s;
  }
  throw ConfigError("preset '" + name + "' is not a spectral field preset");
}

// ---- experiment builders ----------------------------------------------------------

namespace detail {

namespace {

PeriodicField initial_field(const ExperimentConfig& cfg, int order, std::uint64_t seed,
                            const std::map<std::string, std::string>& defaults) {
  auto section = defaults;
  for (const auto& [k, v] : cfg.initial) section[k] = v;
  const std::string generator = get(section, "generator", "modes");
  PeriodicField u(order);
  if (generator == "modes") {
    u.set_coeff(0, to_double(get(section, "mean", "0"), "[initial] mean"));
    auto add = [&](const std::string& key, bool cosine) {
      for (const auto& item : split_list(get(section, key, ""))) {
        const auto parts = split_list(item, ':');
        if (parts.size() != 2) {
          throw ConfigError("[initial] " + key + ": expected n:amplitude, got '" + item + "'");
        }
        const int n = to_int(parts[0], "[initial] " + key + " mode");
        const double a = to_double(parts[1], "[initial] " + key + " amplitude");
        if (n < 1 || n > order) {
          throw ConfigError("[initial] " + key + ": mode " + std::to_string(n) +
                            " outside 1..order (" + std::to_string(order) + ")");
        }
        u += cosine ? PeriodicField::cosine(order, n, a) : PeriodicField::sine(order, n, a);
      }
    };
    add("cos", true);
    add("sin", false);
  } else if (generator == "random_modes") {
    const int count = to_int(get(section, "count", "4"), "[initial] count");
    const double amp = to_double(get(section, "amplitude", "0.5"), "[initial] amplitude");
    if (count < 1 || count > order) throw ConfigError("[initial] count must be in 1..order");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    u.set_coeff(0, to_double(get(section, "mean", "0"), "[initial] mean"));
    for (int n = 1; n <= count; ++n) {
      const double re = normal(rng);
      const double im = normal(rng);
      u.set_coeff(n, amp * Complex(re, im) / static_cast<double>(n * n));
    }
  } else {
    throw ConfigError("[initial] generator '" + generator +
                      "' not available for field presets (modes, random_modes)");
  }
  return u;
}

VectorXd initial_vector(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& dflt) {
  const std::string generator = get(cfg.initial, "generator", "values");
  if (generator == "values") {
    const auto v = to_doubles(get(cfg.initial, "values", dflt), "[initial] values");
    if (v.size() != 3) throw ConfigError("[initial] values: expected 3 components");
    return Eigen::Map<const VectorXd>(v.data(), 3);
  }
  if (generator == "random") {
    const double amp = to_double(get(cfg.initial, "amplitude", "1"), "[initial] amplitude");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = amp * normal(rng);
    return v;
  }
  throw ConfigError("[initial] generator '" + generator +
                    "' not available for so(3) presets (values, random)");
}

MatrixXd initial_matrix(const ExperimentConfig& cfg, int n, std::uint64_t seed,
                        const std::string& default_generator) {
  const std::string generator = get(cfg.initial, "generator", default_generator);
  std::mt19937_64 rng(seed);
  if (generator == "tridiagonal_random") return toda::random_tridiagonal(n, rng);
  if (generator == "symmetric_random") return toda::random_symmetric(n, rng);
  if (generator == "flaschka_random") {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    toda::PhysicalState s{VectorXd(n), VectorXd(n)};
    for (int k = 0; k < n; ++k) {
      s.x[k] = 2.0 * k + u(rng);
      s.y[k] = u(rng);
    }
    return toda::flaschka(s);
  }
  if (generator == "values") {
    const auto v = to_doubles(get(cfg.initial, "values", ""), "[initial] values");
    if (static_cast<int>(v.size()) != n * n) {
      throw ConfigError("[initial] values: expected n*n = " + std::to_string(n * n) + " entries");
    }
    MatrixXd L(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) L(i, j) = v[static_cast<std::size_t>(i * n + j)];
    }
    if (!toda::is_symmetric(L)) throw ConfigError("[initial] values: matrix is not symmetric");
    return L;
  }
  throw ConfigError("[initial] generator '" + generator +
                    "' not available for Toda presets (tridiagonal_random, symmetric_random, "
                    "flaschka_random, values)");
}

VectorXd vector3(const ExperimentConfig& cfg, const std::string& key, const std::string& dflt) {
  const auto v = to_doubles(get(cfg.system, key, dflt), "[system] " + key);
  if (v.size() != 3) throw ConfigError("[system] " + key + ": expected 3 components");
  return Eigen::Map<const VectorXd>(v.data(), 3);
}

double nan_if_empty(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

FieldExperiment build_field_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string& name = cfg.preset;
  const int order = to_int(get(cfg.system, "order", "128"), "[system] order");
  if (order < 4) throw ConfigError("[system] order must be at least 4");

  FieldExperiment ex;
  ex.split = field_preset_split(name);
  ex.field = ex.split.field;
  ex.states_in_csv = false;
  ex.parameters["order"] = std::to_string(order);
  ex.integrator.method = integrate::Method::integrating_factor_rk4;
  ex.integrator.dt = 1e-3;
  ex.integrator.t_max = 1.0;
  ex.integrator.observer_stride = 10;

  std::map<std::string, std::string> init{{"cos", "1:0.5"}};
  const auto M0 = std::pair{std::string("M0"),
                            std::function<double(const PeriodicField&)>(circle::integral)};
  const auto M1 = std::pair{std::string("M1"), std::function<double(const PeriodicField&)>(
                                                   [](const PeriodicField& u) {
                                                     return circle::integral_of_product(u, u);
                                                   })};
  auto functional_diag = [](const pde::Functional& f) {
    return std::pair{f.name, std::function<double(const PeriodicField&)>(f.value)};
  };

  if (name == "kdv" || name == "benjamin_ono") {
    const auto H = name == "kdv" ? pde::H_KdV() : pde::H_BO();
    ex.diagnostics = {functional_diag(H), M0, M1};
    ex.thresholds.drift = {{H.name, 1e-6}, {"M0", 1e-6}, {"M1", 1e-6}};
    if (name == "kdv") {
      ex.integrator.dt = 1e-4;
      ex.integrator.observer_stride = 100;
    } else {
      init = {{"cos", "1:0.3"}};
    }
  } else if (name == "kdv_linear_damping" || name == "kdv_viscous" || name == "kdv_landau") {
    ex.diagnostics = {functional_diag(pde::H_KdV()), M0, M1};
    ex.thresholds.drift = {{"M0", 1e-10}};
    ex.thresholds.decreasing = {"M1"};
    ex.integrator.dt = 1e-4;
    ex.integrator.observer_stride = 100;
  } else if (name == "advection_landau") {
    init = {{"cos", "1:1,3:0.2"}};
    ex.diagnostics = {M0, M1};
    ex.thresholds.drift = {{"M0", 1e-10}};
    ex.thresholds.decreasing = {"M1"};
  } else if (name == "translation") {
    init = {{"cos", "1:1"}};
    ex.diagnostics = {M0, M1, functional_diag(pde::H1())};
    ex.thresholds.drift = {{"M0", 1e-10}, {"M1", 1e-8}, {"H1", 1e-8}};
    ex.integrator.method = integrate::Method::rk4;
  } else if (name == "heat") {
    init = {{"cos", "2:1"}};
    ex.diagnostics = {M0, M1};
    ex.thresholds.drift = {{"M0", 1e-12}};
    ex.thresholds.decreasing = {"M1"};
    ex.integrator.t_max = 0.1;
    ex.integrator.dt = 1e-3;
    ex.integrator.observer_stride = 1;
  } else if (name == "gardner_metriplectic") {
    init = {{"mean", "1"}, {"cos", "1:0.5"}};
    ex.diagnostics = {functional_diag(pde::H2()),
                      {"S", pde::gd3_S},
                      {"Q", pde::gd3_Q}};
    ex.thresholds.drift = {{"H2", 1e-6}};
    ex.thresholds.increasing = {"S"};
  } else {
    throw ConfigError("preset '" + name + "' is not a spectral field preset");
  }
  ex.initial = initial_field(cfg, order, seed, init);
  ex.state_columns.push_back("u_re_0");
  for (int n = 1; n <= order; ++n) {
    ex.state_columns.push_back("u_re_" + std::to_string(n));
    ex.state_columns.push_back("u_im_" + std::to_string(n));
  }
  apply_integrator_section(cfg, ex.integrator);
  apply_threshold_section(cfg, ex.thresholds);
  return ex;
}

Experiment<VectorXd> build_vector_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string& name = cfg.preset;
  const auto so3 = lie::so3_preset();
  Experiment<VectorXd> ex;
  ex.integrator.method = integrate::Method::rk4;
  ex.integrator.dt = 1e-3;
  ex.integrator.t_max = 50.0;
  ex.integrator.observer_stride = 100;
  ex.state_columns = {"Pi_1", "Pi_2", "Pi_3"};
  const auto C2 = lie::casimir_c2(so3);
  std::string default_init = "1,1,1";

  auto diag = [](std::string n, const lie::ScalarField& f) {
    return std::pair{std::move(n), std::function<double(const VectorXd&)>(f.value)};
  };

  if (name == "rigid_body" || name == "rigid_body_metriplectic") {
    const VectorXd inertia = vector3(cfg, "inertia", "1,2,3");
    lie::ScalarField H;
    try {
      H = lie::rigid_body_energy(inertia);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[system] inertia: ") + e.what());
    }
    std::ostringstream ps;
    ps << inertia.transpose();
    ex.parameters["inertia"] = ps.str();
    if (name == "rigid_body") {
      ex.field = [so3, H](const VectorXd& p) { return lie::lie_poisson_field(so3, H, -1, p); };
      ex.diagnostics = {diag("H", H), diag("C2", C2)};
      ex.thresholds.drift = {{"H", 1e-8}, {"C2", 1e-8}};
    } else {
      ex.field = [so3, H, C2](const VectorXd& p) { return lie::metriplectic_field(so3, H, C2, p); };
      ex.diagnostics = {diag("H", H), diag("S", C2),
                        {"alignment", [so3, H](const VectorXd& p) {
                           return lie::bracket(so3, p, lie::metric_gradient(so3, H, p)).norm();
                         }}};
      ex.thresholds.drift = {{"H", 1e-8}};
      ex.thresholds.increasing = {"S"};
      ex.thresholds.final_max = {{"alignment", 1e-6}};
      default_init = "1,0.5,0.2";
    }
  } else if (name == "so3_ex1" || name == "so3_ex2" || name == "double_bracket_so3") {
    const VectorXd c = vector3(cfg, "c", "0,0,1");
    const auto lin = lie::linear_field(c);
    if (name == "double_bracket_so3") {
      ex.field = [so3, lin](const VectorXd& L) {
        return lie::double_bracket_gradient_field(so3, lin, L);
      };
      ex.diagnostics = {diag("C2", C2), diag("H", lin)};
      ex.thresholds.drift = {{"C2", 1e-8}};
      ex.thresholds.decreasing = {"H"};
      ex.integrator.t_max = 20.0;
      default_init = "1,0.5,0.2";
    } else {
      const bool ex1 = name == "so3_ex1";
      const auto H = ex1 ? C2 : lin;
      const auto S = ex1 ? lin : C2;
      ex.field = [so3, H, S](const VectorXd& p) { return lie::metriplectic_field(so3, H, S, p); };
      ex.diagnostics = {diag("H", H), diag("S", S)};
      ex.thresholds.drift = {{"H", 1e-8}};
      ex.thresholds.increasing = {"S"};
      ex.integrator.t_max = 5.0;
      default_init = "1,0.5,0.2";
    }
  } else {
    throw ConfigError("preset '" + name + "' is not an so(3) preset");
  }
  ex.initial = initial_vector(cfg, seed, default_init);
  apply_integrator_section(cfg, ex.integrator);
  if (ex.integrator.method == integrate::Method::integrating_factor_rk4) {
    throw ConfigError("[integrator] integrating_factor_rk4 applies to spectral field presets only");
  }
  apply_threshold_section(cfg, ex.thresholds);
  return ex;
}

Experiment<MatrixXd> build_matrix_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string& name = cfg.preset;
  const int n = to_int(get(cfg.system, "n", "4"), "[system] n");
  if (n < 2 || n > 12) throw ConfigError("[system] n must be in 2..12");
  Experiment<MatrixXd> ex;
  ex.integrator.method = integrate::Method::rk4;
  ex.integrator.dt = 1e-3;
  ex.integrator.t_max = 20.0;
  ex.integrator.observer_stride = 100;
  ex.parameters["n"] = std::to_string(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ex.state_columns.push_back("L_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  auto add_eigen_diags = [&ex, n](bool conserved) {
    for (int i = 0; i < n; ++i) {
      const std::string label = "eig_" + std::to_string(i + 1);
      ex.diagnostics.push_back(
          {label, [i](const MatrixXd& L) { return toda::sorted_eigenvalues(L)[i]; }});
      if (conserved) ex.thresholds.drift[label] = 1e-8;
    }
  };
  const std::pair<std::string, std::function<double(const MatrixXd&)>> energy{"energy",
                                                                              toda::energy};
  const std::pair<std::string, std::function<double(const MatrixXd&)>> offdiag{
      "off_diagonal", toda::off_diagonal_norm};
  auto casimir = [](int k) {
    return std::pair<std::string, std::function<double(const MatrixXd&)>>{
        "I1" + std::to_string(k),
        [k](const MatrixXd& L) { return nan_if_empty(toda::casimir_I1k(L, k)); }};
  };

  std::string generator = "tridiagonal_random";
  if (name == "toda_lax") {
    ex.field = [](const MatrixXd& L) { return toda::lax_field(L); };
    add_eigen_diags(true);
    ex.diagnostics.push_back(energy);
    ex.diagnostics.push_back(offdiag);
  } else if (name == "toda_double_bracket") {
    const MatrixXd N = toda::default_N(n);
    ex.field = [N](const MatrixXd& L) { return toda::double_bracket_field(L, N); };
    add_eigen_diags(true);
    ex.diagnostics.push_back(offdiag);
    ex.diagnostics.push_back({"trLN", [N](const MatrixXd& L) { return (L * N).trace(); }});
    ex.thresholds.increasing = {"trLN"};
    ex.thresholds.final_max = {{"off_diagonal", 1e-6}};
    ex.integrator.t_max = 50.0;
  } else if (name == "full_toda") {
    generator = "symmetric_random";
    ex.field = [](const MatrixXd& L) { return toda::full_toda_field(L); };
    ex.integrator.t_max = 10.0;
    add_eigen_diags(true);
    ex.diagnostics.push_back(energy);
    for (int k = 0; 2 * k < n; ++k) {
      ex.diagnostics.push_back(casimir(k));
      ex.thresholds.drift["I1" + std::to_string(k)] = 1e-8;
    }
  } else if (name == "full_toda_dissipative") {
    generator = "symmetric_random";
    const int k = to_int(get(cfg.system, "k", "1"), "[system] k");
    if (k < 0 || n - 2 * k < 1) throw ConfigError("[system] k must satisfy 0 <= k and n - 2k >= 1");
    ex.parameters["k"] = std::to_string(k);
    ex.field = [k](const MatrixXd& L) { return toda::dissipative_full_toda_field(L, k); };
    add_eigen_diags(false);
    ex.diagnostics.push_back(energy);
    ex.diagnostics.push_back(casimir(k));
    ex.thresholds.drift = {{"energy", 1e-8}};
    ex.thresholds.increasing = {"I1" + std::to_string(k)};
    // Ascent of I_1k can reach the E_0k = 0 stratum in finite time (I_1k -> +inf);
    // for the default seed this happens near t = 0.65.
    ex.integrator.t_max = 0.5;
    ex.integrator.observer_stride = 10;
  } else {
    throw ConfigError("preset '" + name + "' is not a Toda preset");
  }
  ex.initial = initial_matrix(cfg, n, seed, generator);
  if (name == "toda_lax" && !toda::is_tridiagonal(ex.initial)) {
    throw ConfigError("toda_lax needs a tridiagonal initial matrix");
  }
  apply_integrator_section(cfg, ex.integrator);
  if (ex.integrator.method == integrate::Method::integrating_factor_rk4) {
    throw ConfigError("[integrator] integrating_factor_rk4 applies to spectral field presets only");
  }
  apply_threshold_section(cfg, ex.thresholds);
  return ex;
}

}  // namespace detail

}  // namespace metriflow::harness
