#include <doctest.h>

#include <cmath>

#include "testutil.hpp"
#include "tmboson/bethe.hpp"
#include "tmboson/oracle.hpp"
#include "tmboson/qes.hpp"

using namespace tmb;

TEST_CASE("normal form splits the second-order operator") {
  SUBCASE("first-order case") {
    ModelParams m{1, 1, 0.4, -0.2, 0.8, 0.4, 0.1, 0.6};
    const BlockLabel label{3, 0, 0};
    const NormalForm nf = normal_form(build_diff_operator(m, label));
    const auto t = case_coefficients(m, label);
    const double l = to_double(l_of(m, label));
    CHECK(nf.P.coeff(2) == doctest::Approx(t.at("A11")).epsilon(1e-13));
    CHECK(nf.Q.coeff(2) == doctest::Approx(-m.g).epsilon(1e-13));
    CHECK(nf.Q.coeff(1) == doctest::Approx(t.at("B11") - t.at("A11")).epsilon(1e-12));
    CHECK(nf.Q.coeff(0) == doctest::Approx(m.g).epsilon(1e-13));
    CHECK(nf.R.coeff(1) == doctest::Approx(2.0 * (l - 1.0) * m.g).epsilon(1e-12));
    CHECK(nf.R.coeff(0) == doctest::Approx(t.at("D11")).epsilon(1e-12));
  }
  SUBCASE("quadratic-linear case") {
    ModelParams m{2, 1, 0.4, -0.2, 0.5, 0.2, 0.1, 0.6};
    const NormalForm nf = normal_form(build_diff_operator(m, {2, 0, 0}));
    const auto t = case_coefficients(m, {2, 0, 0});
    CHECK(nf.P.coeff(2) == doctest::Approx(t.at("A21")).epsilon(1e-12));
    CHECK(nf.P.coeff(1) == doctest::Approx(4.0 * m.g).epsilon(1e-13));
    const double q1 = to_double(q1_of(m, {2, 0, 0}));
    CHECK(nf.Q.coeff(0) == doctest::Approx(2.0 * m.g * (4.0 * q1 - 1.0)).epsilon(1e-12));
  }
  SUBCASE("third-order operators have no normal form") {
    ModelParams m{3, 3, 0.4, -0.2, 0.5, 0.2, 0.1, 0.6};
    CHECK_THROWS_AS(normal_form(build_diff_operator(m, {2, 0, 0})), UnsupportedCaseError);
    CHECK_THROWS_AS(PotentialMap(m, {2, 0, 0}), UnsupportedCaseError);
  }
}

TEST_CASE("change of variable") {
  SUBCASE("first-order case: x = ln z / sqrt(A11)") {
    ModelParams m{1, 1, 0.4, -0.2, 0.7, 0.4, 0.05, 0.6};  // A11 = 1.0
    PotentialMap map(m, {2, 0, 0});
    REQUIRE(map.potential_case() == PotentialCase::kCoshI);
    CHECK(map.x_of_z(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(map.x_of_z(1.0) == doctest::Approx(0.0));
    CHECK(map.z_of_x(1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  }
  SUBCASE("sextic limit: z = g x^2") {
    ModelParams m{2, 1, 0.4, -0.3, 0.0, 0.0, 0.0, 0.7};
    PotentialMap map(m, {2, 0, 0});
    REQUIRE(map.potential_case() == PotentialCase::kSexticII);
    CHECK(map.x_of_z(0.7 * 2.25) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(map.z_of_x(2.0) == doctest::Approx(0.7 * 4.0).epsilon(1e-12));
  }
  SUBCASE("quadrature agrees with the closed form") {
    ModelParams m{1, 1, 0.4, -0.2, 0.7, 0.4, 0.05, 0.6};
    PotentialMap closed(m, {2, 0, 0});
    // drive the generic integrator over the same P by anchoring at z = 1
    const NormalForm nf = normal_form(build_diff_operator(m, {2, 0, 0}));
    auto integrand = [&nf](double y) { return 1.0 / std::sqrt(nf.P(y)); };
    for (double z : {0.3, 0.8, 1.7, 3.1}) {
      const double quad = integrate(integrand, 1.0, z);
      CHECK(std::abs(quad - closed.x_of_z(z)) <= 1e-8);
    }
  }
  SUBCASE("branch sign flips the axis") {
    ModelParams m{1, 1, 0.4, -0.2, 0.7, 0.4, 0.05, 0.6};
    PotentialMap plus(m, {2, 0, 0}, +1);
    PotentialMap minus(m, {2, 0, 0}, -1);
    CHECK(minus.x_of_z(2.0) == doctest::Approx(-plus.x_of_z(2.0)).epsilon(1e-13));
    CHECK(minus.closed_form_v(-1.3) == doctest::Approx(plus.closed_form_v(1.3)).epsilon(1e-12));
  }
  SUBCASE("P <= 0 on the interval is a domain error") {
    ModelParams m{1, 1, 0.4, -0.2, 0.7, 0.4, 0.05, 0.6};
    PotentialMap map(m, {2, 0, 0});
    CHECK_THROWS_AS(map.x_of_z(-1.0), std::domain_error);
  }
}

TEST_CASE("closed-form potentials agree with the generic formula") {
  SUBCASE("cosh case") {
    ModelParams m{1, 1, 0.4, -0.2, 0.8, 0.4, 0.1, 0.6};
    PotentialMap map(m, {3, 0, 0});
    REQUIRE(map.potential_case() == PotentialCase::kCoshI);
    CHECK(map.constants().at("cosh2_coeff") ==
          doctest::Approx(m.g * m.g / (2.0 * map.constants().at("A11"))));
    for (double z = 0.25; z <= 3.5; z += 0.125) {
      CHECK(std::abs(map.closed_form_v(map.x_of_z(z)) - map.v_of_z(z)) <= 1e-8);
    }
  }
  SUBCASE("hyperbolic case, both allowed q1") {
    ModelParams m{2, 1, 0.4, -0.2, 0.5, 0.2, 0.1, 0.6};
    for (int d1 : {0, 1}) {
      PotentialMap map(m, {3, d1, 0});
      REQUIRE(map.potential_case() == PotentialCase::kHyperbolicII);
      for (double z = 0.15; z <= 3.0; z += 0.11) {
        CHECK(std::abs(map.closed_form_v(map.x_of_z(z)) - map.v_of_z(z)) <= 1e-8);
      }
    }
  }
  SUBCASE("sextic case emits the printed coefficients") {
    ModelParams m{2, 1, 0.4, -0.3, 0.0, 0.0, 0.0, 0.7};
    PotentialMap map(m, {2, 0, 0});
    REQUIRE(map.potential_case() == PotentialCase::kSexticII);
    const double b = map.constants().at("B21");
    const double d = map.constants().at("D21");
    const double l = to_double(l_of(m, {2, 0, 0}));
    const double q1 = to_double(q1_of(m, {2, 0, 0}));
    CHECK(map.constants().at("x6") == doctest::Approx(std::pow(m.g, 4) / 16.0));
    CHECK(map.constants().at("x4") == doctest::Approx(-m.g * m.g * b / 8.0));
    CHECK(map.constants().at("x2") ==
          doctest::Approx((b * b + 8.0 * m.g * m.g * (1.0 - 4.0 * l)) / 16.0));
    CHECK(map.constants().at("v_const") == doctest::Approx(q1 * b - d));
    for (double z = 0.1; z <= 3.0; z += 0.07) {
      CHECK(std::abs(map.closed_form_v(map.x_of_z(z)) - map.v_of_z(z)) <= 1e-8);
    }
  }
  SUBCASE("parametric case records the elliptic invariants") {
    ModelParams m{2, 2, 0.4, -0.3, 0.5, 0.1, 0.2, 0.8};
    PotentialMap map(m, {2, 0, 0});
    REQUIRE(map.potential_case() == PotentialCase::kWeierstrassIII);
    REQUIRE(map.weierstrass_invariants());
    const double a22 = m.w11 + m.w22 - 2.0 * m.w12;
    const double cbrt_g = std::cbrt(m.g);
    CHECK(map.weierstrass_invariants()->first ==
          doctest::Approx(4.0 / 3.0 * cbrt_g * cbrt_g * (a22 * a22 / (m.g * m.g) - 3.0)));
    CHECK(map.weierstrass_invariants()->second ==
          doctest::Approx(4.0 / 27.0 * a22 * (9.0 - 2.0 * a22 * a22 / (m.g * m.g))));
    CHECK(!map.has_closed_form_v());
  }
}

TEST_CASE("sampling validates monotonicity and produces finite potentials") {
  ModelParams m{2, 2, 0.4, -0.3, 0.5, 0.1, 0.2, 0.8};
  PotentialMap map(m, {3, 0, 1});
  const SampledPotential pot = gauge_and_potential(map, 0.2, 2.4, 101);
  CHECK(pot.case_tag == "III");
  REQUIRE(pot.x.size() == 101);
  for (size_t i = 0; i + 1 < pot.x.size(); ++i) CHECK(pot.x[i] < pot.x[i + 1]);
  for (double v : pot.v) CHECK(std::isfinite(v));
  // x(z) from change_of_variable matches the sampled x
  const auto xs = change_of_variable(map, 0.2, 2.4, 101);
  for (size_t i = 0; i < xs.size(); ++i) CHECK(xs[i] == doctest::Approx(pot.x[i]).epsilon(1e-12));
}

TEST_CASE("finite-difference box") {
  SUBCASE("harmonic sanity: eigenvalues 1, 3, 5") {
    const auto evs = fd_eigenvalues([](double x) { return x * x; }, 8.0, 2000, 3);
    REQUIRE(evs.size() == 3);
    CHECK(std::abs(evs[0] - 1.0) <= 1e-3);
    CHECK(std::abs(evs[1] - 3.0) <= 1e-3);
    CHECK(std::abs(evs[2] - 5.0) <= 1e-3);
  }
  SUBCASE("window query matches the low end of the spectrum") {
    auto well = [](double x) { return x * x; };
    const auto low = fd_eigenvalues(well, 8.0, 1200, 4);
    const auto window = fd_eigenvalues_between(well, 8.0, 1200, 0.0, 6.5);
    REQUIRE(window.size() == 3);
    for (int k = 0; k < 3; ++k) {
      CHECK(window[static_cast<size_t>(k)] ==
            doctest::Approx(low[static_cast<size_t>(k)]).epsilon(1e-10));
    }
  }
  SUBCASE("grid refinement shrinks the error quadratically") {
    auto well = [](double x) { return x * x; };
    const double e1 = fd_eigenvalues(well, 8.0, 1000, 1)[0] - 1.0;
    const double e2 = fd_eigenvalues(well, 8.0, 2000, 1)[0] - 1.0;
    CHECK(std::abs(e1 / e2) > 3.0);
    CHECK(std::abs(e1 / e2) < 5.0);
  }
}

TEST_CASE("spectral equivalence of the sextic block") {
  ModelParams m{2, 1, 0.4, -0.3, 0.0, 0.0, 0.0, 0.7};
  for (int mdeg : {2, 3}) {
    const BlockLabel label{mdeg, 0, 0};
    PotentialMap map(m, label);
    REQUIRE(map.potential_case() == PotentialCase::kSexticII);
    std::vector<double> energies;
    for (const auto& state : oracle_states(m, label)) energies.push_back(state.energy);
    const auto report = verify_spectral_equivalence(
        [&map](double x) { return map.closed_form_v(x); }, energies, {});
    CHECK(report.checkable);
    CHECK(report.all_matched);
    CHECK(report.max_rel_error <= 1e-3);
  }
}

TEST_CASE("non-confining potentials are reported, not failed") {
  const auto report =
      verify_spectral_equivalence([](double x) { return -x * x; }, {1.0}, {5.0, 500, 1e-3, 10.0});
  CHECK(!report.checkable);
  CHECK(!report.note.empty());
}

TEST_CASE("gauge identity: transformed states solve the Schroedinger equation") {
  SUBCASE("cosh case") {
    ModelParams m{1, 1, 0.4, -0.2, 0.8, 0.4, 0.1, 0.6};
    const BlockLabel label{2, 0, 0};
    PotentialMap map(m, label);
    const BetheSolveResult sol = solve_bae(m, label, {});
    REQUIRE(!sol.states.empty());
    const double x_lo = map.x_of_z(0.4);
    const double x_hi = map.x_of_z(2.5);
    for (const auto& state : sol.states) {
      const Polynomial psi(state.monomial_coeffs);
      const double r1 = schrodinger_residual(map, psi, state.energy, x_lo, x_hi, 160);
      const double r2 = schrodinger_residual(map, psi, state.energy, x_lo, x_hi, 320);
      const double r4 = schrodinger_residual(map, psi, state.energy, x_lo, x_hi, 640);
      CHECK(r1 / r2 > 3.0);
      CHECK(r1 / r2 < 5.0);
      CHECK(r2 / r4 > 3.0);
      CHECK(r2 / r4 < 5.0);
    }
  }
  SUBCASE("hyperbolic case with quadrature gauge") {
    ModelParams m{2, 1, 0.4, -0.2, 0.5, 0.2, 0.1, 0.6};
    const BlockLabel label{2, 1, 0};
    PotentialMap map(m, label);
    map.set_anchor(1.0);
    const BetheSolveResult sol = solve_bae(m, label, {});
    REQUIRE(!sol.states.empty());
    const double x_lo = map.x_of_z(0.3);
    const double x_hi = map.x_of_z(2.6);
    const Polynomial psi(sol.states.front().monomial_coeffs);
    const double e = sol.states.front().energy;
    const double r1 = schrodinger_residual(map, psi, e, x_lo, x_hi, 200);
    const double r2 = schrodinger_residual(map, psi, e, x_lo, x_hi, 400);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);
  }
}

TEST_CASE("psi_tilde sampling uses the gauge convention") {
  ModelParams m{2, 1, 0.4, -0.3, 0.0, 0.0, 0.0, 0.7};
  const BlockLabel label{2, 0, 0};
  PotentialMap map(m, label);
  const Polynomial one = Polynomial::constant(1.0);
  const std::vector<double> grid = {0.5, 1.0, 2.0};
  const auto values = psi_tilde_values(map, one, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(values[i] == doctest::Approx(std::exp(-map.w_of_z(grid[i]))).epsilon(1e-13));
  }
}
