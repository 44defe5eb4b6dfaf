#ifndef TMBOSON_ALGEBRA_HPP
#define TMBOSON_ALGEBRA_HPP

#include <Eigen/Dense>

#include "tmboson/model.hpp"

namespace tmb {

/// Dense matrices of the block representation, indexed by n = 0..M.
/// q0, n1, n2 are diagonal; qp raises n (lower off-diagonal); qm = qp^T.
struct RepMatrices {
  Eigen::MatrixXd q0;
  Eigen::MatrixXd qp;
  Eigen::MatrixXd qm;
  Eigen::MatrixXd n1;
  Eigen::MatrixXd n2;
  Eigen::MatrixXd h;
};

/// Structure polynomial of the one-mode deformed algebra,
///   phi_k(x) = -prod_{i=1..k}(x + i/k - 1/k^2) + prod_{i=1..k}((i-k)/k - 1/k^2),
/// so that [Q+, Q-] = phi_k(Q0) - phi_k(Q0 - 1).
Rational structure_poly(int k, const Rational& x);
double structure_poly(int k, double x);

/// Casimir constant of the one-mode boson realization,
/// prod_{i=1..k}((i-k)/k - 1/k^2).
Rational casimir_constant(int k);

/// Structure polynomial of the paired algebra built from degrees (s, r):
///   -prod_{i=1..s}(l + x + i/s - 1/s^2) * prod_{j=1..r}(l - x - 1 + j/r - 1/r^2).
/// [Qp, Qm] = pair_structure_poly(s,r,Q0,l) - pair_structure_poly(s,r,Q0-1,l)
/// on a block with central value l.
Rational pair_structure_poly(int s, int r, const Rational& x, const Rational& l);

/// Ladder data of the one-mode algebra at level n:
///   diag: Q0 eigenvalue q + n,
///   up:   coefficient of |q, n+1> in Q+|q, n>,
///   down: coefficient of |q, n-1> in Q-|q, n> (exactly 0 at n = 0).
struct LadderElements {
  double diag = 0.0;
  double up = 0.0;
  double down = 0.0;
};

/// Throws std::invalid_argument when q is not an allowed weight for k.
LadderElements su11_matrix_elements(int k, const Rational& q, int n);

/// Block matrices of Q0, Q+-, N1, N2 and the Hamiltonian
///   H = diag(w.N + w.NN) + g sqrt(s^s r^r) (Q+ + Q-).
/// Entries come from exact rational products under a single square root;
/// qm is the transpose of qp by construction and h is exactly symmetric.
RepMatrices build_block_matrices(const ModelParams& model, const BlockLabel& label);

/// Max-abs deviations of the commutation relations on one block.
struct CommutatorReport {
  double ladder_plus = 0.0;   // ||[Q0,Q+] - Q+||_inf
  double ladder_minus = 0.0;  // ||[Q0,Q-] + Q-||_inf
  double structure = 0.0;     // ||[Q+,Q-] - (phi(Q0) - phi(Q0-1))||_inf

  double max_deviation() const;
  bool pass(double tol = 1e-10) const { return max_deviation() <= tol; }
};

CommutatorReport commutator_check(const RepMatrices& mats, const ModelParams& model,
                                  const BlockLabel& label);

}  // namespace tmb

#endif
