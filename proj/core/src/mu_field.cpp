#include "conjint/mu_field.hpp"

#include <algorithm>
#include <cmath>

#include "conjint/interpolation.hpp"

namespace conjint {

void DiscreteMeasure::validate(const Tolerances& tol) const {
  tol.validate();
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].weight > 0.0) || !std::isfinite(atoms[i].weight))
      throw InvariantError("measure: atom weights must be positive and finite");
    if (!std::isfinite(atoms[i].z.real()) || !std::isfinite(atoms[i].z.imag()))
      throw InvariantError("measure: non-finite atom point");
    for (size_t j = 0; j < i; ++j)
      if (std::abs(atoms[i].z - atoms[j].z) <= tol.cluster)
        throw InvariantError("measure: atoms " + std::to_string(j) + " and " +
                             std::to_string(i) + " coincide");
  }
}

int DiscreteMeasure::parity_partner(size_t i, const Tolerances& tol) const {
  if (std::abs(atoms[i].z) <= tol.cluster) return static_cast<int>(i);
  for (size_t j = 0; j < atoms.size(); ++j)
    if (std::abs(atoms[j].z + atoms[i].z) <= tol.cluster) return static_cast<int>(j);
  return -1;
}

namespace {

void check_shapes(const DiscreteMeasure& mu, const FunctionTable& f, const FunctionTable& g) {
  const Eigen::Index m = static_cast<Eigen::Index>(mu.atoms.size());
  if (f.atom_count() != m || g.atom_count() != m)
    throw InvariantError("field: table row count must equal the atom count");
  if (f.n() != g.n() || f.n() < 1)
    throw InvariantError("field: tables must share a positive function count");
  if (!all_finite(f.values) || !all_finite(g.values))
    throw InvariantError("field: non-finite table entry");
}

}  // namespace

UFieldResult solve_ufield(const DiscreteMeasure& mu, const FunctionTable& f,
                          const FunctionTable& g, const Tolerances& tol) {
  mu.validate(tol);
  check_shapes(mu, f, g);

  UFieldResult res;
  for (Eigen::Index i = 0; i < f.atom_count(); ++i) {
    const CVector fv = f.at_atom(i);
    const CVector gv = g.at_atom(i);
    const double scale = 1.0 + fv.squaredNorm();
    if (std::abs(fv.squaredNorm() - gv.squaredNorm()) > tol.residual * scale) {
      res.feasible = false;
      res.infeasible_atom = static_cast<int>(i);
      return res;
    }
  }
  for (Eigen::Index i = 0; i < f.atom_count(); ++i)
    res.field.blocks.push_back(unitary_mapping(f.at_atom(i), g.at_atom(i)));
  res.feasible = true;
  return res;
}

bool is_symmetric_measure(const DiscreteMeasure& mu, const Tolerances& tol) {
  mu.validate(tol);
  double wmax = 0.0;
  for (const auto& a : mu.atoms) wmax = std::max(wmax, a.weight);
  std::vector<bool> done(mu.atoms.size(), false);
  for (size_t i = 0; i < mu.atoms.size(); ++i) {
    if (done[i]) continue;
    const int j = mu.parity_partner(i, tol);
    if (j < 0) return false;
    done[i] = true;
    done[static_cast<size_t>(j)] = true;
    if (std::abs(mu.atoms[i].weight - mu.atoms[static_cast<size_t>(j)].weight) >
        tol.residual * (1.0 + wmax))
      return false;
  }
  return true;
}

SUFieldResult solve_sufield(const DiscreteMeasure& mu, const FunctionTable& f,
                            const FunctionTable& g, const Tolerances& tol) {
  mu.validate(tol);
  check_shapes(mu, f, g);
  if (!is_symmetric_measure(mu, tol))
    throw InvariantError("solve_sufield: measure is not symmetric");

  const Eigen::Index m = static_cast<Eigen::Index>(mu.atoms.size());
  const Eigen::Index n = f.n();

  std::vector<int> par(static_cast<size_t>(m), -1);
  for (Eigen::Index i = 0; i < m; ++i)
    par[static_cast<size_t>(i)] = mu.parity_partner(static_cast<size_t>(i), tol);

  SUFieldResult res;
  for (Eigen::Index i = 0; i < m; ++i) {
    const CVector fz = f.at_atom(i);
    const CVector gz = g.at_atom(i);
    const Eigen::Index ip = par[static_cast<size_t>(i)];
    const CVector fpz = f.at_atom(ip);
    const CVector gpz = g.at_atom(ip);
    const double scale = 1.0 + fz.squaredNorm() + fpz.squaredNorm();

    const double lhs_norm = fz.squaredNorm();
    const double rhs_norm = gz.squaredNorm();
    if (std::abs(lhs_norm - rhs_norm) > tol.residual * scale) {
      res.feasible = false;
      res.witness = SUFieldWitness{static_cast<int>(i), "norm", lhs_norm, rhs_norm};
      return res;
    }
    // sum_k f_k(z) g_k(-z) == sum_k f_k(-z) g_k(z)
    const Complex lhs = (fz.array() * gpz.array()).sum();
    const Complex rhs = (fpz.array() * gz.array()).sum();
    if (std::abs(lhs - rhs) > tol.residual * scale) {
      res.feasible = false;
      res.witness = SUFieldWitness{static_cast<int>(i), "parity", lhs, rhs};
      return res;
    }
  }

  // block space: coordinate (atom a, component k) -> a*n + k, scaled by
  // sqrt(weight) so the weighted L2 inner product becomes the euclidean one
  const Eigen::Index dim = m * n;
  CVector fvec(dim), gvec(dim);
  CMatrix mult = CMatrix::Zero(dim, dim);
  Eigen::VectorXi parity_index(dim);
  for (Eigen::Index a = 0; a < m; ++a) {
    const double sw = std::sqrt(mu.atoms[static_cast<size_t>(a)].weight);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index row = a * n + k;
      fvec(row) = sw * f.values(a, k);
      gvec(row) = sw * g.values(a, k);
      mult(row, row) = mu.atoms[static_cast<size_t>(a)].z;
      parity_index(row) = static_cast<int>(par[static_cast<size_t>(a)]) * static_cast<int>(n) +
                          static_cast<int>(k);
    }
  }
  CMatrix parity = CMatrix::Zero(dim, dim);
  for (Eigen::Index row = 0; row < dim; ++row) parity(parity_index(row), row) = 1.0;

  // the parity-time map h -> parity * conj(h) is a conjugation J with
  // J M J = -M^*; the field is U = J C for a conjugation C with
  // C M C = -M^* and C F = J G
  const CVector gtilde = parity * gvec.conjugate();

  CMatrix u;
  if (fvec.norm() <= tol.rank && gtilde.norm() <= tol.rank) {
    u = CMatrix::Identity(dim, dim);
  } else {
    InterpolationProblem p;
    p.operators = {mult};
    p.xs = {fvec};
    p.ys = {gtilde};
    p.mode = Mode::skew;
    p.tol = tol;
    const Certificate cert = construct_skew(p);
    if (!cert.feasible || !cert.conjugation)
      throw CompletionError("solve_sufield: scalar conditions passed but the conjugation "
                            "problem is infeasible");
    u = parity * cert.conjugation->s.conjugate();
  }

  res.field.blocks.clear();
  CMatrix block_diag = CMatrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < m; ++a) {
    res.field.blocks.push_back(u.block(a * n, a * n, n, n));
    block_diag.block(a * n, a * n, n, n) = res.field.blocks.back();
  }
  const double off_block = (u - block_diag).norm();
  if (off_block > 1e3 * tol.residual * (1.0 + std::sqrt(static_cast<double>(dim))))
    throw CompletionError("solve_sufield: field is not block diagonal (off-block mass " +
                          std::to_string(off_block) + "); atom points may coincide");
  res.feasible = true;
  return res;
}

UFieldReport verify_ufield(const DiscreteMeasure& mu, const FunctionTable& f,
                           const FunctionTable& g, const UField& field, bool symmetric,
                           const Tolerances& tol) {
  mu.validate(tol);
  check_shapes(mu, f, g);
  const Eigen::Index m = static_cast<Eigen::Index>(mu.atoms.size());
  const Eigen::Index n = f.n();
  if (static_cast<Eigen::Index>(field.blocks.size()) != m)
    throw InvariantError("verify_ufield: one block per atom required");

  UFieldReport rep;
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const CMatrix& u = field.blocks[static_cast<size_t>(i)];
    if (u.rows() != n || u.cols() != n)
      throw InvariantError("verify_ufield: block dimension mismatch");
    const CVector fv = f.at_atom(i);
    rep.equation = std::max(rep.equation, (u * fv - g.at_atom(i)).norm());
    rep.unitarity = std::max(rep.unitarity, (u * u.adjoint() - CMatrix::Identity(n, n)).norm());
    scale = std::max(scale, 1.0 + fv.norm());
    if (symmetric) {
      const int ip = mu.parity_partner(static_cast<size_t>(i), tol);
      if (ip < 0) throw InvariantError("verify_ufield: measure is not symmetric");
      const CMatrix& up = field.blocks[static_cast<size_t>(ip)];
      rep.parity = std::max(rep.parity, (u - up.transpose()).norm());
    }
  }
  rep.pass = rep.equation <= tol.residual * scale && rep.unitarity <= tol.residual &&
             rep.parity <= tol.residual;
  return rep;
}

}  // namespace conjint
