#ifndef TMBOSON_MODEL_HPP
#define TMBOSON_MODEL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "tmboson/rational.hpp"

namespace tmb {

/// Couplings and mode degrees of the two-mode Hamiltonian
///   H = sum_i w_i N_i + sum_ij w_ij N_i N_j
///       + g (a1^dag^s a2^r + a1^s a2^dag^r),   w12 == w21.
struct ModelParams {
  int s = 1;
  int r = 1;
  double w1 = 0.0;
  double w2 = 0.0;
  double w11 = 0.0;
  double w22 = 0.0;
  double w12 = 0.0;
  double g = 0.0;

  /// Throws std::invalid_argument unless s,r >= 1 and all couplings finite.
  void validate() const;
};

/// One invariant Fock block, labelled by integers. The interaction term
/// changes (N1, N2) by (+-s, -+r), so delta1 = N1 mod s and delta2 = N2 mod r
/// are conserved along with the block size M+1.
struct BlockLabel {
  int M = 0;       // polynomial degree of the block; dimension is M+1
  int delta1 = 0;  // mode-1 lowest-weight offset, in [0, s)
  int delta2 = 0;  // mode-2 lowest-weight offset, in [0, r)
};

/// Throws std::invalid_argument on M < 0 or offsets outside [0, s) x [0, r).
void validate_label(const ModelParams& model, const BlockLabel& label);

/// Allowed lowest-weight labels q = (j*k + 1)/k^2, j = 0..k-1, ascending.
std::vector<Rational> allowed_q(int k);

/// Derived exact labels of a block.
Rational q1_of(const ModelParams& model, const BlockLabel& label);
Rational q2_of(const ModelParams& model, const BlockLabel& label);
/// Central-element constant l = (M + q1 + q2) / 2.
Rational l_of(const ModelParams& model, const BlockLabel& label);

/// Occupations at block index n: N1 = s*n + delta1, N2 = r*(M-n) + delta2.
std::pair<long long, long long> occupations(const ModelParams& model,
                                            const BlockLabel& label, int n);

/// Conserved charge K = r*N1 + s*N2, constant across the block.
long long block_charge(const ModelParams& model, const BlockLabel& label);

/// All (N1, N2) pairs of the block, index order n = 0..M.
std::vector<std::pair<long long, long long>> block_states(const ModelParams& model,
                                                          const BlockLabel& label);

/// Inverts the occupation map: the block containing Fock state |n1, n2> and
/// the index of that state within the block.
std::pair<BlockLabel, int> block_from_quanta(const ModelParams& model,
                                             long long n1, long long n2);

/// Every block with conserved charge K (at most s*r of them), M ascending.
std::vector<BlockLabel> blocks_for_charge(const ModelParams& model, long long K);

}  // namespace tmb

#endif
