#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conjint/antilinear.hpp"
#include "conjint/linalg.hpp"

namespace conjint {

struct SpectralAtom {
  Complex eigenvalue;
  std::vector<CVector> basis;  // orthonormal basis of the eigenspace

  int dim() const { return static_cast<int>(basis.size()); }
};

/// Eigenvalue atoms of a single normal matrix. Bases are jointly orthonormal
/// and complete; atoms are pairwise separated by more than tol.cluster.
struct SpectralDecomp {
  std::vector<SpectralAtom> atoms;
  int source_dim = 0;

  CMatrix basis_matrix(size_t atom) const;
  CMatrix atom_projection(size_t atom) const;
};

struct JointAtom {
  std::vector<Complex> tuple;  // one eigenvalue per family member
  std::vector<CVector> basis;

  int dim() const { return static_cast<int>(basis.size()); }
};

/// Joint eigenvalue atoms of a commuting normal family, obtained by recursive
/// refinement of the single-matrix decomposition.
struct JointSpectralDecomp {
  int family_size = 0;
  std::vector<JointAtom> atoms;
  int source_dim = 0;

  CMatrix basis_matrix(size_t atom) const;
  CMatrix atom_projection(size_t atom) const;
};

/// Atomic stand-in for a Borel subset: the set of selected atom indices.
struct BorelSelector {
  std::vector<int> indices;

  static BorelSelector all(size_t atom_count);
};

/// ||n n^* - n^* n||_F.
double check_normal(const CMatrix& n);

SpectralDecomp decompose(const CMatrix& n, const Tolerances& tol);

JointSpectralDecomp joint_decompose(const std::vector<CMatrix>& family,
                                    Eigen::Index dim, const Tolerances& tol);

/// Convenience overload for a non-empty family.
JointSpectralDecomp joint_decompose(const std::vector<CMatrix>& family,
                                    const Tolerances& tol);

CMatrix projection(const SpectralDecomp& d, const BorelSelector& sel);
CMatrix projection(const JointSpectralDecomp& d, const BorelSelector& sel);

/// Orthonormal basis of span{ Q_a x : atoms a, seeds x } -- the smallest
/// subspace containing the seeds that reduces every family member. When the
/// seeds are pairwise orthogonal, their normalizations are kept verbatim as
/// the leading basis vectors.
std::vector<CVector> orbit_subspace(const JointSpectralDecomp& d,
                                    const std::vector<CVector>& seeds,
                                    const Tolerances& tol);

/// Atom dimension per eigenvalue, in atom order.
std::vector<std::pair<Complex, int>> multiplicity_map(const SpectralDecomp& d);

struct SkewSymmetryDecision {
  bool skew_symmetric = false;
  std::optional<Conjugation> witness;  // C with C n C == -n^* when true

  struct Violation {
    Complex eigenvalue{0.0, 0.0};
    int multiplicity = 0;
    int negated_multiplicity = 0;
  };
  std::optional<Violation> violation;  // first multiplicity mismatch when false
};

/// Multiplicity-symmetry test mult(lambda) == mult(-lambda) for every atom
/// away from zero; on success the witness pairs the eigenbases of lambda and
/// -lambda and conjugates entrywise on the kernel eigenbasis.
SkewSymmetryDecision is_skew_symmetric_normal(const CMatrix& n, const Tolerances& tol);

/// Orthonormal basis of the largest reducing subspace on which t is normal:
/// the intersection of ker(t^{*n} t^m - t^m t^{*n}) over 1 <= n,m <= dim.
std::vector<CVector> normal_part(const CMatrix& t, const Tolerances& tol);

}  // namespace conjint
