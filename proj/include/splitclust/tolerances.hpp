#pragma once

namespace splitclust {

// All numeric tolerances used across the library, in one record so a run
// can be described by a single set of constants.
struct Tolerances {
  double symmetry = 1e-12;             // max-abs asymmetry allowed in symmetric inputs
  double basis_orthonormality = 1e-10; // ||U^T U - I|| for cluster bases
  double svd_reconstruction = 1e-8;    // relative Frobenius reconstruction error
  double projection = 1e-10;           // idempotence / orthogonality slack
  double validity = 1e-3;              // entrywise rounding tolerance for cluster matrices
  double certificate_equality = 1e-8;  // residual allowed on by-construction equalities
  double series = 1e-10;               // alternating-series term cutoff (Frobenius)
  double feasibility = 1e-5;           // max-abs constraint violation after rounding
  double nuclear_identity_rel = 1e-6;  // |nuclear(K) - n| <= rel * n on valid outputs
  double objective_recheck = 1e-5;     // relative slack when re-checking a rounded solution
};

inline constexpr Tolerances kTol{};

}  // namespace splitclust
