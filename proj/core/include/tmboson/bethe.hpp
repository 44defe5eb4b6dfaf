#ifndef TMBOSON_BETHE_HPP
#define TMBOSON_BETHE_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmboson/diffop.hpp"
#include "tmboson/model.hpp"
#include "tmboson/polynomial.hpp"

namespace tmb {

using Complex = std::complex<double>;

struct DegenerateRootsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconsistentRootsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Multistart damped-Newton settings. starts < 0 means 40 * (M + 1).
struct SolverConfig {
  double tol = 1e-10;             // scaled-residual convergence threshold
  int max_iters = 100;
  int starts = -1;
  std::uint64_t seed = 0x7d0f33u;
  bool oracle_seeding = true;
  double dedup_tol = 1e-6;        // distinctness of accepted root multisets
  double degenerate_tol = 1e-7;   // simple-pole guard, relative to root scale
  double eigen_tol = 1e-8;        // coefficientwise ||H psi - E psi|| gate
  int perturb_retries = 3;
  double divergence_factor = 1e6;
  int max_halvings = 30;
  long long occupation_cap = 170;
};

/// One accepted Bethe state.
struct BetheState {
  std::vector<Complex> roots;          // sorted by (Re, Im), conjugation-closed
  double energy = 0.0;
  double residual_norm = 0.0;          // scaled max |BAE residual|
  std::vector<double> monomial_coeffs; // psi(z) = prod (z - alpha_i), monic
  int pairing_index = -1;              // matched oracle state, -1 if unmatched
  bool near_zero_root = false;         // some |alpha_i| within 1e-10 of 0
};

struct BetheSolveResult {
  std::vector<BetheState> states;  // ascending energy, at most M+1
  std::vector<std::string> warnings;
};

/// Residual and Jacobian evaluation of the root equations
///   P_1(a_p) + sum_{i=2..d} i! P_i(a_p) e_{i-1}(1/(a_p - a_j), j != p) = 0.
/// Precomputes the operator once per block.
class BaeSystem {
 public:
  BaeSystem(const ModelParams& model, const BlockLabel& label);

  int num_roots() const { return m_; }
  const DiffOperator& op() const { return op_; }
  double root_scale() const { return root_scale_; }

  /// Throws DegenerateRootsError when two roots are closer than
  /// degenerate_tol * root_scale.
  Eigen::VectorXcd residuals(const std::vector<Complex>& roots,
                             double degenerate_tol = 1e-12) const;
  Eigen::MatrixXcd jacobian(const std::vector<Complex>& roots,
                            double degenerate_tol = 1e-12) const;
  /// max_p |residual_p| / scale_p with scale_p = 1 + sum of term magnitudes.
  double residual_norm(const std::vector<Complex>& roots,
                       double degenerate_tol = 1e-12) const;

 private:
  int m_;
  DiffOperator op_;
  double root_scale_;
};

Eigen::VectorXcd bae_residuals(const std::vector<Complex>& roots, const ModelParams& model,
                               const BlockLabel& label, double degenerate_tol = 1e-12);
Eigen::MatrixXcd bae_jacobian(const std::vector<Complex>& roots, const ModelParams& model,
                              const BlockLabel& label, double degenerate_tol = 1e-12);

/// Energy from the z^M matching:
///   E = w11 a^2 + w22 d2^2 + 2 w12 a d2 + w1 a + w2 d2 - g ((r+d2)!/d2!) sum(alpha),
/// with a = s*M + delta1, d2 = delta2. Throws InconsistentRootsError when the
/// imaginary part of the root sum is above tolerance.
double energy_from_roots(const std::vector<Complex>& roots, const ModelParams& model,
                         const BlockLabel& label, double imag_tol = 1e-8);

/// Integer prefactor (r + delta2)!/delta2! of the root sum in the energy.
long long energy_root_prefactor(const ModelParams& model, const BlockLabel& label);

/// Monic wavefunction psi(z) = prod (z - alpha_i). Throws
/// std::invalid_argument when the root set is not conjugation-closed.
Polynomial wavefunction_from_roots(const std::vector<Complex>& roots,
                                   double conj_tol = 1e-8);

/// Multistart damped Newton (plus optional oracle-seeded refinement).
/// Throws std::invalid_argument at g == 0; use the oracle path there.
BetheSolveResult solve_bae(const ModelParams& model, const BlockLabel& label,
                           const SolverConfig& config = {});

/// Greedy minimum-|dE| pairing between two energy lists.
struct PairingReport {
  struct Pair {
    int bethe_index = 0;
    int oracle_index = 0;
    double abs_de = 0.0;
  };
  std::vector<Pair> pairs;           // sorted by oracle index
  std::vector<int> unmatched_bethe;
  std::vector<int> unmatched_oracle;
  double max_abs_de = 0.0;
};

PairingReport match_spectrum(const std::vector<double>& bethe_energies,
                             const std::vector<double>& oracle_energies);

}  // namespace tmb

#endif
