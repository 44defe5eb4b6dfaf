#ifndef TMBOSON_ORACLE_HPP
#define TMBOSON_ORACLE_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

#include "tmboson/model.hpp"
#include "tmboson/polynomial.hpp"

namespace tmb {

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One exact-diagonalization eigenstate of a block.
struct OracleState {
  double energy = 0.0;
  Eigen::VectorXd fock_vector;           // unit norm, first nonzero component > 0
  Polynomial monomial;                   // Bargmann polynomial, monic unless deficient
  std::vector<std::complex<double>> roots;  // empty when leading_deficient
  bool leading_deficient = false;        // |leading coeff| below threshold
};

/// Direct Fock-basis Hamiltonian of the block: diagonal from the number
/// operators, off-diagonal g sqrt((N1+s)!/N1!) sqrt(N2!/(N2-r)!) via
/// log-gamma differences. Throws CapacityError when an occupation exceeds
/// occupation_cap.
Eigen::MatrixXd build_fock_hamiltonian(const ModelParams& model, const BlockLabel& label,
                                       long long occupation_cap = 170);

/// Dense symmetric eigendecomposition, energies ascending, eigenvectors with
/// first nonzero component positive. Throws std::invalid_argument when the
/// input is not symmetric.
std::vector<std::pair<double, Eigen::VectorXd>> diagonalize_block(const Eigen::MatrixXd& h);

/// Bargmann polynomial of an eigenvector: coefficient of z^n is
/// v(n)/sqrt(N1(n)! N2(n)!), rescaled monic unless the leading coefficient is
/// below deficiency_tol * max|coeff| (then *deficient is set).
Polynomial eigenvector_to_polynomial(const Eigen::VectorXd& fock_vector,
                                     const ModelParams& model, const BlockLabel& label,
                                     bool* deficient = nullptr,
                                     double deficiency_tol = 1e-10);

/// Companion-matrix roots of a polynomial of degree >= 1, sorted by (Re, Im).
/// Degree-0 input yields an empty list.
std::vector<std::complex<double>> polynomial_roots(const Polynomial& poly);

/// Full per-block ground truth: diagonalize and convert each eigenvector.
std::vector<OracleState> oracle_states(const ModelParams& model, const BlockLabel& label,
                                       long long occupation_cap = 170);

/// Cross-validation of the root-based formulas against the oracle states.
struct OracleBetheReport {
  struct Entry {
    int state_index = 0;
    double residual = 0.0;      // scaled max BAE residual of the extracted roots
    double energy_error = 0.0;  // |E_formula - E_oracle| / (1 + |E_oracle|)
    bool deficient = false;     // skipped: polynomial degree < M
    bool degenerate = false;    // skipped: repeated roots break the simple-pole form
  };
  std::vector<Entry> entries;
  double max_residual = 0.0;
  double max_energy_error = 0.0;
  bool skipped_exactly_solvable = false;  // g == 0: diagonal spectrum, no roots
};

OracleBetheReport oracle_bethe_check(const ModelParams& model, const BlockLabel& label);

}  // namespace tmb

#endif
