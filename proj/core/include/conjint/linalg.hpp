#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace conjint {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Thrown when a structural precondition on inputs does not hold.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a partial-map completion cannot meet its residual contract
/// (dependent constraints that disagree beyond tolerance).
struct CompletionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Residual, eigenvalue-clustering and rank thresholds shared by all routines.
struct Tolerances {
  double residual = 1e-9;
  double cluster = 1e-7;
  double rank = 1e-9;

  /// All thresholds strictly positive, cluster >= residual.
  void validate() const;
};

/// Inner product, linear in the first argument: <u,v> = sum_i u_i conj(v_i).
inline Complex inner(const CVector& u, const CVector& v) { return v.dot(u); }

bool all_finite(const CMatrix& a);
bool all_finite(const CVector& v);

/// Columns side by side. `dim` is only consulted when `vs` is empty.
CMatrix stack_columns(const std::vector<CVector>& vs, Eigen::Index dim = 0);
std::vector<CVector> split_columns(const CMatrix& m);

struct OrthonormalBasis {
  std::vector<CVector> basis;
  int rank = 0;
};

/// Orthonormalizes `vectors` in order, dropping entries whose residual after
/// projection falls below tol.rank times the largest input column norm.
/// The first `orthonormal_prefix` vectors must already be orthonormal and are
/// copied through verbatim.
OrthonormalBasis qr_orthonormalize(const std::vector<CVector>& vectors,
                                   const Tolerances& tol,
                                   int orthonormal_prefix = 0);

struct HermitianEig {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, one column per eigenvalue
};

HermitianEig hermitian_eig(const CMatrix& a, const Tolerances& tol);

/// Moore-Penrose pseudoinverse; singular values below tol.rank * sigma_max
/// are treated as zero.
CMatrix pinv(const CMatrix& a, const Tolerances& tol);

/// Rank-one operator x (x) y acting as h -> <h,y> x.
CMatrix rank_one(const CVector& x, const CVector& y);

/// Unitary polar factor of a (via SVD).
CMatrix polar_unitary(const CMatrix& a);

/// Orthonormal basis of the orthogonal complement of span(basis) in C^dim.
/// `basis` must be orthonormal.
std::vector<CVector> orthonormal_complement(const std::vector<CVector>& basis,
                                            Eigen::Index dim,
                                            const Tolerances& tol);

/// Unitary H with H v = ||v|| e1 (phase pinned so the result is deterministic).
CMatrix householder_to_e1(const CVector& v);

/// Unitary mapping `from` onto `to`, assuming ||from|| == ||to||; identity when
/// both vanish. Built from two pinned Householder reflections.
CMatrix unitary_mapping(const CVector& from, const CVector& to);

}  // namespace conjint
