#include <doctest.h>

#include <cmath>

#include "testutil.hpp"
#include "tmboson/algebra.hpp"

using namespace tmb;

TEST_CASE("one-mode structure polynomial reduces to the oscillator and su(1,1)") {
  // k = 1: phi(x) = -x - 1, so [Q+,Q-] = phi(Q0) - phi(Q0-1) = -1
  CHECK(structure_poly(1, Rational(0)) == Rational(-1));
  CHECK(structure_poly(1, Rational(3)) == Rational(-4));
  for (int n = 0; n < 5; ++n) {
    const Rational x(n);
    CHECK(structure_poly(1, x) - structure_poly(1, x - 1) == Rational(-1));
  }
  // k = 2: phi(x) = -x^2 - x, so the difference is -2 Q0
  for (int n = -3; n < 4; ++n) {
    const Rational x(n);
    CHECK(structure_poly(2, x) == -x * x - x);
    CHECK(structure_poly(2, x) - structure_poly(2, x - 1) == -2 * x);
  }
}

TEST_CASE("Casimir constant matches the lowest-weight evaluation") {
  CHECK(casimir_constant(2) == Rational(3, 16));
  // C = phi(q - 1) at every allowed lowest weight
  for (int k = 1; k <= 4; ++k) {
    for (const Rational& q : allowed_q(k)) {
      CHECK(structure_poly(k, q - 1) == casimir_constant(k));
    }
  }
  // and the double overload agrees
  CHECK(structure_poly(2, -0.25) == doctest::Approx(3.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("su11_matrix_elements ladder values") {
  const LadderElements osc = su11_matrix_elements(1, Rational(1), 3);
  CHECK(osc.diag == doctest::Approx(4.0));
  CHECK(osc.up == doctest::Approx(2.0));
  CHECK(osc.down == doctest::Approx(std::sqrt(3.0)));

  // lowest weight annihilated, exactly, for every allowed label
  for (int k = 1; k <= 4; ++k) {
    for (const Rational& q : allowed_q(k)) {
      CHECK(su11_matrix_elements(k, q, 0).down == 0.0);
    }
  }

  const LadderElements k2 = su11_matrix_elements(2, Rational(3, 4), 2);
  CHECK(k2.up == doctest::Approx(std::sqrt(3.0 * 3.5)).epsilon(1e-15));

  CHECK_THROWS_AS(su11_matrix_elements(2, Rational(1, 2), 0), std::invalid_argument);
}

TEST_CASE("su11 radicands stay nonnegative far up the ladder") {
  for (int k = 1; k <= 3; ++k) {
    for (const Rational& q : allowed_q(k)) {
      for (int n = 0; n <= 200; ++n) {
        const LadderElements e = su11_matrix_elements(k, q, n);
        CHECK(std::isfinite(e.up));
        CHECK(std::isfinite(e.down));
        CHECK(e.up >= 0.0);
        CHECK(e.down >= 0.0);
      }
    }
  }
}

TEST_CASE("one-mode ladder matrices close the deformed algebra") {
  // Truncate the infinite representation; the last level corrupts only the
  // final diagonal entry of the commutator, so check interior rows.
  constexpr int dim = 12;
  for (int k : {1, 2, 3}) {
    for (const Rational& q : allowed_q(k)) {
      Eigen::MatrixXd q0 = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::MatrixXd qp = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::MatrixXd qm = Eigen::MatrixXd::Zero(dim, dim);
      for (int n = 0; n < dim; ++n) {
        const LadderElements e = su11_matrix_elements(k, q, n);
        q0(n, n) = e.diag;
        if (n + 1 < dim) qp(n + 1, n) = e.up;
        if (n > 0) qm(n - 1, n) = e.down;
        // unitarity ties the two square-root products together
        if (n > 0) {
          CHECK(e.down == doctest::Approx(su11_matrix_elements(k, q, n - 1).up).epsilon(1e-14));
        }
      }
      const Eigen::MatrixXd ladder = q0 * qp - qp * q0 - qp;
      CHECK(ladder.cwiseAbs().maxCoeff() <= 1e-12);
      const Eigen::MatrixXd comm = qp * qm - qm * qp;
      for (int n = 0; n + 1 < dim; ++n) {
        const double expected =
            structure_poly(k, q0(n, n)) - structure_poly(k, q0(n, n) - 1.0);
        CHECK(comm(n, n) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("block matrices: worked doublet and structural exactness") {
  ModelParams m{1, 1, 1.0, 0.0, 0.0, 0.0, 0.0, 0.5};
  const RepMatrices mats = build_block_matrices(m, {1, 0, 0});
  CHECK(mats.h(0, 0) == 0.0);
  CHECK(mats.h(1, 1) == 1.0);
  CHECK(mats.h(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mats.h(0, 1) == mats.h(1, 0));

  testutil::Rng rng(11);
  testutil::for_each_block(3, 6, [&](int s, int r, const BlockLabel& label) {
    const ModelParams model = rng.model(s, r);
    const RepMatrices b = build_block_matrices(model, label);
    CHECK((b.qm - b.qp.transpose()).cwiseAbs().maxCoeff() == 0.0);  // exact transpose
    CHECK((b.h - b.h.transpose()).cwiseAbs().maxCoeff() == 0.0);    // exact symmetry
  });
}

TEST_CASE("g = 0 leaves the block Hamiltonian diagonal") {
  ModelParams m{2, 2, 0.7, -0.3, 0.4, 0.2, 0.1, 0.0};
  const RepMatrices mats = build_block_matrices(m, {3, 1, 0});
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(mats.h(i, j) == 0.0);
    }
  }
  const auto states = block_states(m, {3, 1, 0});
  for (int n = 0; n < 4; ++n) {
    const double n1 = static_cast<double>(states[static_cast<size_t>(n)].first);
    const double n2 = static_cast<double>(states[static_cast<size_t>(n)].second);
    const double expected = m.w1 * n1 + m.w2 * n2 + m.w11 * n1 * n1 + m.w22 * n2 * n2 +
                            2.0 * m.w12 * n1 * n2;
    CHECK(mats.h(n, n) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("raising element matches the bosonic matrix element") {
  // <2,0| a1^dag^2 a2 |0,1> = sqrt(2!) * sqrt(1) = sqrt(2)
  ModelParams m{2, 1, 0, 0, 0, 0, 0, 1.0};
  const RepMatrices mats = build_block_matrices(m, {1, 0, 0});
  const double power = std::sqrt(4.0);  // sqrt(s^s r^r) = 2
  CHECK(power * mats.qp(1, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("commutator relations close on every desk-scale block") {
  testutil::Rng rng(23);
  double worst = 0.0;
  testutil::for_each_block(3, 8, [&](int s, int r, const BlockLabel& label) {
    const ModelParams model = rng.model(s, r);
    const RepMatrices b = build_block_matrices(model, label);
    const CommutatorReport report = commutator_check(b, model, label);
    worst = std::max(worst, report.max_deviation());
    CHECK(report.pass(1e-10));
  });
  CHECK(worst <= 1e-10);
}

TEST_CASE("a sign flip in the lowering generator breaks the closure check") {
  ModelParams m{2, 2, 0.3, 0.1, -0.2, 0.5, 0.2, 0.9};
  RepMatrices mats = build_block_matrices(m, {4, 0, 0});
  mats.qm = -mats.qm;
  CHECK(!commutator_check(mats, m, {4, 0, 0}).pass(1e-10));
}
