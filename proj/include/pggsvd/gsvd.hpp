#pragma once

#include <utility>

#include "pggsvd/types.hpp"

namespace pggsvd {

/// Bob's and Eve's channels plus their receiver noise variances.
struct WiretapChannel {
  CMatrix h_bob;  // N_r x N_t
  CMatrix h_eve;  // N_e x N_t
  double noise_bob = 1.0;
  double noise_eve = 1.0;

  int nt() const { return static_cast<int>(h_bob.cols()); }
  int nr() const { return static_cast<int>(h_bob.rows()); }
  int ne() const { return static_cast<int>(h_eve.rows()); }

  /// Throws std::invalid_argument on mismatched column counts, non-positive
  /// noise or non-finite entries.
  void validate() const;
};

/// Dimensions of the jointly visible subspaces: k is the rank of the stacked
/// channel, r the dimension seen only by Bob, s the dimension seen by both.
/// The Eve-only dimension is k - r - s.
struct SubspaceDims {
  int k = 0;
  int r = 0;
  int s = 0;
  friend bool operator==(const SubspaceDims&, const SubspaceDims&) = default;
};

/// Generalized SVD of the pair (H_ba, H_ea):
///
///   H_ba = U_ba Sigma_ba [Omega^-1 0] U_a^H,   H_ea = U_ea Sigma_ea [Omega^-1 0] U_a^H
///
/// Columns of Sigma_* are grouped (k-r-s | s | r). Sigma_ba has zero rows on
/// top, then diag(b), then I_r; Sigma_ea has I_{k-r-s}, then diag(e), then zero
/// rows. b is ascending, e descending, b_p^2 + e_p^2 = 1. Omega is lower
/// triangular and non-singular.
struct GsvdDecomposition {
  CMatrix u_a;
  CMatrix u_bob;
  CMatrix u_eve;
  CMatrix omega;
  CMatrix omega_inv;
  CMatrix sigma_bob;
  CMatrix sigma_eve;
  RVector b;
  RVector e;
  int k = 0;
  int r = 0;
  int s = 0;
  int nt = 0;
  int nr = 0;
  int ne = 0;

  int eve_only() const { return k - r - s; }
  SubspaceDims dims() const { return {k, r, s}; }
};

/// Relative rank tolerance actually used for a channel when the caller passes
/// tol (0 selects 1e-10 * max(N_t, N_r + N_e)).
double resolve_rank_tolerance(const WiretapChannel& channel, double tol);

/// Number of singular values above tol_rel * sigma_max. Throws
/// RankAmbiguityError if a singular value lies within two decades of the cutoff.
int numerical_rank(const CMatrix& m, double tol_rel);

SubspaceDims subspace_dims(const WiretapChannel& channel, double tol = 0.0);

GsvdDecomposition gsvd(const WiretapChannel& channel, double tol = 0.0);

/// Multiplies the factors back together: (H_ba, H_ea).
std::pair<CMatrix, CMatrix> reconstruct(const GsvdDecomposition& d);

}  // namespace pggsvd
