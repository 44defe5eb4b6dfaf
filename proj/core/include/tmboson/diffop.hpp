#ifndef TMBOSON_DIFFOP_HPP
#define TMBOSON_DIFFOP_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmboson/model.hpp"
#include "tmboson/polynomial.hpp"

namespace tmb {

struct UnsupportedCaseError : std::domain_error {
  using std::domain_error::domain_error;
};

/// H = sum_{i=1..order} p[i](z) d^i/dz^i + p[0](z), order = max{s, r, 2}.
struct DiffOperator {
  int order = 0;
  std::vector<Polynomial> p;  // size order + 1, p[i] multiplies d^i/dz^i
};

/// Expansion coefficient of (z d/dz)^k = sum_i L(k,i) z^i d^i/dz^i,
/// computed from the combinatorial sum over increasing tuples; equals the
/// Stirling number of the second kind S(k, i).
std::int64_t stirling_second_kind(int k, int i);

/// Coefficients c_0..c_m with
///   prod_{j=1..m}(z d/dz + a_j) = c_0 + sum_{i=1..m} c_i z^i d^i/dz^i,
/// i.e. c_0 = prod a_j and c_i = sum_{k=i..m} e_{m-k}(a) L(k,i).
/// Exact for rational inputs. Throws std::invalid_argument on empty input.
std::vector<Rational> expand_euler_product(const std::vector<Rational>& a);
std::vector<double> expand_euler_product(const std::vector<double>& a);

/// Shift values of the two Euler-operator products realizing the interaction:
/// lowering a_j = q1 - ((j-1)s + 1)/s^2 (their product is exactly 0), raising
/// b_j = -(2l - q1 - ((j-1)r + 1)/r^2).
std::vector<Rational> lowering_shift_values(const ModelParams& model, const BlockLabel& label);
std::vector<Rational> raising_shift_values(const ModelParams& model, const BlockLabel& label);

/// Leading coefficient of the image of z^m: H z^m = closure * z^{m+1} + lower
/// order, with closure = g * prod_{j=1..r} r (2l - q1 - ((j-1)r+1)/r^2 - m).
/// The rational product part vanishes identically at m = M.
Rational closure_product(const ModelParams& model, const BlockLabel& label, int m);

/// Assembles the block differential operator from the Euler-product expansion
/// plus the diagonal number-operator part.
DiffOperator build_diff_operator(const ModelParams& model, const BlockLabel& label);

/// Closed-form coefficient table for the special cases
/// (s,r) in {(1,1), (2,1), (2,2), (3,3)}; keys like "A11", "B21", "S33".
struct CaseCoefficients {
  std::string tag;  // "11", "21", "22", "33"
  std::map<std::string, double> values;

  double at(const std::string& name) const;
};

/// Throws UnsupportedCaseError for any other (s, r).
CaseCoefficients case_coefficients(const ModelParams& model, const BlockLabel& label);

/// The operator assembled from the closed-form table (regression reference).
DiffOperator case_operator(const ModelParams& model, const BlockLabel& label);

Polynomial apply_diffop(const DiffOperator& op, const Polynomial& poly);

/// (M+1) x (M+1) matrix of the operator on the monomial basis {z^n},
/// conjugated by diag(1/sqrt(N1(n)! N2(n)!)) so it matches the Fock-basis
/// Hamiltonian of the block.
Eigen::MatrixXd diffop_block_matrix(const ModelParams& model, const BlockLabel& label);

/// Compares the z^{m+1} coefficient of H z^m against closure_product for
/// m = 0..M and checks exact closure at m = M.
struct LeadingTermReport {
  std::vector<double> relative_error;  // per m = 0..M
  double closure_coefficient = 0.0;    // |z^{M+1} coefficient of H z^M|
  bool closure_exact = false;          // rational product at m = M is exactly 0

  bool pass(double tol = 1e-12) const;
};

LeadingTermReport leading_term_check(const ModelParams& model, const BlockLabel& label);

}  // namespace tmb

#endif
