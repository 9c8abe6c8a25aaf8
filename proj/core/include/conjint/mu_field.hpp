#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conjint/linalg.hpp"

namespace conjint {

struct MeasureAtom {
  Complex z{0.0, 0.0};
  double weight = 0.0;
};

/// Atomic measure on the complex plane: distinct points with positive weights.
struct DiscreteMeasure {
  std::vector<MeasureAtom> atoms;

  void validate(const Tolerances& tol) const;
  /// Index of the atom at -z_i (self for the origin atom), or -1.
  int parity_partner(size_t i, const Tolerances& tol) const;
};

/// Values of n scalar functions sampled at the atoms of a measure: one row per
/// atom, one column per function index.
struct FunctionTable {
  CMatrix values;

  Eigen::Index atom_count() const { return values.rows(); }
  Eigen::Index n() const { return values.cols(); }
  CVector at_atom(Eigen::Index i) const { return values.row(i).transpose(); }
};

/// Pointwise n x n matrix field over the atoms of a measure.
struct UField {
  std::vector<CMatrix> blocks;
};

struct UFieldResult {
  bool feasible = false;
  UField field;
  std::optional<int> infeasible_atom;
};

/// Pointwise unitary solution of U(z) f(z) = g(z); feasible exactly when the
/// squared row norms of f and g agree at every atom.
UFieldResult solve_ufield(const DiscreteMeasure& mu, const FunctionTable& f,
                          const FunctionTable& g, const Tolerances& tol);

/// True iff the atoms come in (z, -z) pairs of equal weight, the origin atom
/// being self-paired.
bool is_symmetric_measure(const DiscreteMeasure& mu, const Tolerances& tol);

struct SUFieldWitness {
  int atom = -1;
  std::string condition;  // "norm" or "parity"
  Complex lhs{0.0, 0.0};
  Complex rhs{0.0, 0.0};
};

struct SUFieldResult {
  bool feasible = false;
  UField field;
  std::optional<SUFieldWitness> witness;
};

/// Pointwise unitary solution with the transpose parity U(-z) = U(z)^T,
/// obtained by solving the skew conjugation problem for the block
/// multiplication operator and composing with the parity-conjugation map.
SUFieldResult solve_sufield(const DiscreteMeasure& mu, const FunctionTable& f,
                            const FunctionTable& g, const Tolerances& tol);

struct UFieldReport {
  double equation = 0.0;    // max over atoms of ||U(z) f(z) - g(z)||
  double unitarity = 0.0;   // max over atoms of ||U(z) U(z)^* - I||
  double parity = 0.0;      // max over atoms of ||U(z) - U(-z)^T|| (symmetric only)
  bool pass = false;
};

UFieldReport verify_ufield(const DiscreteMeasure& mu, const FunctionTable& f,
                           const FunctionTable& g, const UField& field, bool symmetric,
                           const Tolerances& tol);

}  // namespace conjint
