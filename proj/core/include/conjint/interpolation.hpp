#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conjint/antilinear.hpp"
#include "conjint/spectral.hpp"

namespace conjint {

enum class Mode { symmetric, skew };

/// Conjugation interpolation instance: find C with C x_i = y_i and
/// C N_k C = N_k^* (symmetric) or C N C = -N^* (skew, single operator).
struct InterpolationProblem {
  std::vector<CMatrix> operators;
  std::vector<CVector> xs;
  std::vector<CVector> ys;
  Mode mode = Mode::symmetric;
  Tolerances tol;

  Eigen::Index dimension() const;
  /// Throws InvariantError unless operators form a commuting normal family of
  /// consistent dimension and xs / ys are pairwise-orthogonal nonzero sets.
  void validate() const;
};

struct FeasibilityViolation {
  std::string kind;  // "norm", "atom_xx", "atom_xy", "complement_not_skew"
  int atom = -1;     // atom index when applicable
  int i = -1;
  int j = -1;
  Complex lhs{0.0, 0.0};
  Complex rhs{0.0, 0.0};
  double magnitude = 0.0;
};

struct Feasibility {
  bool feasible = false;
  std::vector<FeasibilityViolation> violations;
};

/// Verifiable output of a construction: the conjugation plus every residual a
/// third party needs to re-check it, or the structured violations.
struct Certificate {
  bool feasible = false;
  std::optional<Conjugation> conjugation;
  std::map<std::string, double> residuals;
  std::vector<FeasibilityViolation> violations;
};

/// Per-joint-atom conditions <Q x_i, x_j> == <Q y_j, y_i> and
/// <Q x_i, y_j> == <Q x_j, y_i>.
Feasibility feasibility_symmetric(const InterpolationProblem& p);

/// Atom conditions with the spectrally negated partner,
/// <P_l x_i, x_j> == <P_{-l} y_j, y_i> and <P_l x_i, y_j> == <P_{-l} x_j, y_i>,
/// plus skew-symmetry of the restriction to the orbit complement.
Feasibility feasibility_skew(const InterpolationProblem& p);

/// Constructs the certificate when feasible; otherwise returns the violation
/// list. Throws CompletionError if a feasible instance cannot be completed
/// within tolerance (a feasibility/numerics conflict, never papered over).
Certificate construct_symmetric(const InterpolationProblem& p);
Certificate construct_skew(const InterpolationProblem& p);

/// Re-derives every certificate residual from scratch for an externally
/// supplied conjugation; used by independent verification paths.
std::map<std::string, double> recompute_residuals(const InterpolationProblem& p,
                                                  const Conjugation& c);

/// Residual threshold below which a certificate for this problem is accepted;
/// construction and independent verification share it.
double certificate_gate(const InterpolationProblem& p);

/// Single-pair feasibility ||Q x|| == ||Q y|| per joint atom.
Feasibility feasibility_single(const std::vector<CMatrix>& family, const CVector& x,
                               const CVector& y, const Tolerances& tol);

/// Unitary U with U N_k = N_k U and U x = y, assembled atom by atom from
/// pinned reflections. Requires feasibility_single to hold.
CMatrix unitary_commutant_witness(const std::vector<CMatrix>& family, const CVector& x,
                                  const CVector& y, const Tolerances& tol);

struct PerturbationSample {
  Complex lambda{0.0, 0.0};
  double residual = 0.0;
};

struct PerturbationReport {
  std::vector<PerturbationSample> samples;
  double max_residual = 0.0;
  bool pass = false;
};

/// For a feasible single-pair certificate: residual of the defining relation
/// for N_k + lambda x(x)y (symmetric mode) or N + lambda (x(x)x - y(x)y)
/// (skew mode, x and y linearly independent) at each sampled lambda.
PerturbationReport perturbation_suite(const Certificate& c, const InterpolationProblem& p,
                                      const std::vector<Complex>& samples);

/// True iff span(m_basis) is a sum of eigenspace atoms of the normal matrix n.
bool is_hyperinvariant(const CMatrix& n, const std::vector<CVector>& m_basis,
                       const Tolerances& tol);

/// Searches for a conjugation C with C n C = n^* mapping some unit vector of
/// M outside M; such a C exists exactly when M is not hyperinvariant.
std::optional<Conjugation> hyperinvariance_falsifier(const CMatrix& n,
                                                     const std::vector<CVector>& m_basis,
                                                     int trials, const Tolerances& tol,
                                                     uint64_t seed = 0);

/// Antilinear partial isometry supported on the orbit subspace of xs and ys:
/// the restriction of a feasible certificate's conjugation.
struct PartialIsometryWitness {
  AntilinearMap v;
  std::vector<CVector> domain_basis;
};

PartialIsometryWitness partial_isometry_witness(const Certificate& c,
                                                const InterpolationProblem& p);

}  // namespace conjint
