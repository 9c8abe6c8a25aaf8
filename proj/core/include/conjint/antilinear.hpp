#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conjint/linalg.hpp"

namespace conjint {

/// General antilinear map h -> m * conj(h).
struct AntilinearMap {
  CMatrix m;
};

/// Conjugation, i.e. an involutive antilinear isometry. Stored through its
/// symmetric unitary factor: the map is h -> s * conj(h).
struct Conjugation {
  CMatrix s;

  AntilinearMap as_antilinear() const { return {s}; }
};

CVector apply(const AntilinearMap& a, const CVector& h);
CVector apply(const Conjugation& c, const CVector& h);

/// Antilinear adjoint-like companion: <apply(a,h),k> == <apply(sharp(a),k),h>.
AntilinearMap sharp(const AntilinearMap& a);

struct ConjugationReport {
  double symmetry = 0.0;   // ||m - m^T||_F
  double isometry = 0.0;   // ||m m^* - I||_F
  bool pass = false;
};

ConjugationReport verify_conjugation(const AntilinearMap& a, const Tolerances& tol);
ConjugationReport verify_conjugation(const Conjugation& c, const Tolerances& tol);

struct RelationResiduals {
  double sym = 0.0;      // ||C T C - T^*||_F
  double skew = 0.0;     // ||C T C + T^*||_F
  double cnormal = 0.0;  // ||C T T^* C - T^* T||_F
};

/// Residuals of the symmetry / skew-symmetry / conjugate-normality relations
/// of t with respect to c. Throws if c fails verify_conjugation.
RelationResiduals relation_residuals(const Conjugation& c, const CMatrix& t,
                                     const Tolerances& tol);

struct ZhuLiResult {
  bool feasible = false;
  std::optional<Conjugation> conjugation;
  // (i, j) with <x_i,y_j> != <x_j,y_i> when infeasible
  std::optional<std::pair<int, int>> violation;
  Complex lhs{0.0, 0.0};
  Complex rhs{0.0, 0.0};
};

/// Interpolation C x_i = y_i with no operator constraints. Inputs must be
/// pairwise-orthogonal nonzero sets with matching norms per pair; feasibility
/// is the pairwise Gram test <x_i,y_j> == <x_j,y_i>.
ZhuLiResult zhu_li_interpolate(const std::vector<CVector>& xs,
                               const std::vector<CVector>& ys,
                               const Tolerances& tol);

/// Symmetric unitary acting on span(domain + images) that realizes the
/// swap-closed constraints g -> h, h -> g; zero on the orthogonal complement
/// of that span. `span_basis` is an orthonormal basis of the constraint span.
struct PartialConjugation {
  CMatrix s_partial;
  std::vector<CVector> span_basis;
};

/// Least-squares fit of the constraint pairs (the swap closure is appended
/// internally), followed by symmetrization and re-unitarization restricted to
/// the constraint span. Requires the swap-closed Gram condition
/// <g_l,h_m> == <g_m,h_l>; throws CompletionError when dependent constraints
/// disagree beyond tolerance.
PartialConjugation fit_partial_conjugation(const std::vector<CVector>& domain,
                                           const std::vector<CVector>& images,
                                           const Tolerances& tol);

/// fit_partial_conjugation extended to the whole space: on the orthogonal
/// complement of the constraint span the map acts as entrywise conjugation in
/// a computed orthonormal basis of the complement.
Conjugation complete_partial_conjugation(const std::vector<CVector>& domain,
                                         const std::vector<CVector>& images,
                                         const Tolerances& tol);

/// Orthonormal basis {z_r} with apply(c, z_r) == z_r; coefficients of any
/// vector in this basis are conjugated entrywise by c.
std::vector<CVector> fixed_point_basis(const Conjugation& c, const Tolerances& tol);

}  // namespace conjint
