#include "conjint/spectral.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace conjint {

CMatrix SpectralDecomp::basis_matrix(size_t atom) const {
  return stack_columns(atoms.at(atom).basis, source_dim);
}

CMatrix SpectralDecomp::atom_projection(size_t atom) const {
  const CMatrix v = basis_matrix(atom);
  return v * v.adjoint();
}

CMatrix JointSpectralDecomp::basis_matrix(size_t atom) const {
  return stack_columns(atoms.at(atom).basis, source_dim);
}

CMatrix JointSpectralDecomp::atom_projection(size_t atom) const {
  const CMatrix v = basis_matrix(atom);
  return v * v.adjoint();
}

BorelSelector BorelSelector::all(size_t atom_count) {
  BorelSelector s;
  s.indices.resize(atom_count);
  std::iota(s.indices.begin(), s.indices.end(), 0);
  return s;
}

double check_normal(const CMatrix& n) {
  if (n.rows() != n.cols()) throw InvariantError("check_normal: matrix not square");
  return (n * n.adjoint() - n.adjoint() * n).norm();
}

namespace {

std::vector<std::pair<int, int>> cluster_ranges(const RVector& vals, double threshold) {
  std::vector<std::pair<int, int>> ranges;
  const int n = static_cast<int>(vals.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || vals(i) - vals(i - 1) > threshold) {
      ranges.emplace_back(start, i);
      start = i;
    }
  }
  return ranges;
}

// eigenspaces of a (nearly) normal matrix through its commuting hermitian
// parts: diagonalize (n + n^*)/2, then refine each eigenspace by the
// compression of (n - n^*)/(2i)
std::vector<std::pair<Complex, CMatrix>> normal_eigenspaces(const CMatrix& n,
                                                            const Tolerances& tol) {
  const Eigen::Index d = n.rows();
  std::vector<std::pair<Complex, CMatrix>> out;
  if (d == 0) return out;
  const CMatrix re = (n + n.adjoint()) / 2.0;
  const CMatrix im = (n - n.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> esr(re);
  if (esr.info() != Eigen::Success) throw InvariantError("decompose: eigensolver failed");
  for (const auto& [lo, hi] : cluster_ranges(esr.eigenvalues(), tol.cluster)) {
    const CMatrix vr = esr.eigenvectors().middleCols(lo, hi - lo);
    const CMatrix imc = vr.adjoint() * im * vr;
    Eigen::SelfAdjointEigenSolver<CMatrix> esi((imc + imc.adjoint()) / 2.0);
    if (esi.info() != Eigen::Success) throw InvariantError("decompose: eigensolver failed");
    for (const auto& [blo, bhi] : cluster_ranges(esi.eigenvalues(), tol.cluster)) {
      CMatrix v = vr * esi.eigenvectors().middleCols(blo, bhi - blo);
      const Eigen::Index m = v.cols();
      const Complex lambda = (v.adjoint() * n * v).trace() / static_cast<double>(m);
      out.emplace_back(lambda, std::move(v));
    }
  }
  return out;
}

bool tuple_less(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  for (size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
    if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
  }
  return a.size() < b.size();
}

}  // namespace

SpectralDecomp decompose(const CMatrix& n, const Tolerances& tol) {
  tol.validate();
  if (n.rows() != n.cols()) throw InvariantError("decompose: matrix not square");
  if (!all_finite(n)) throw InvariantError("decompose: non-finite entry");
  const double nr = check_normal(n);
  if (nr > tol.residual * (1.0 + n.norm() * n.norm()))
    throw InvariantError("decompose: matrix not normal, residual " + std::to_string(nr));

  SpectralDecomp d;
  d.source_dim = static_cast<int>(n.rows());
  for (auto& [lambda, v] : normal_eigenspaces(n, tol))
    d.atoms.push_back({lambda, split_columns(v)});
  std::sort(d.atoms.begin(), d.atoms.end(), [](const SpectralAtom& a, const SpectralAtom& b) {
    return tuple_less({a.eigenvalue}, {b.eigenvalue});
  });
  return d;
}

JointSpectralDecomp joint_decompose(const std::vector<CMatrix>& family,
                                    Eigen::Index dim, const Tolerances& tol) {
  tol.validate();
  for (const auto& nk : family) {
    if (nk.rows() != nk.cols() || nk.rows() != dim)
      throw InvariantError("joint_decompose: dimension mismatch");
    if (!all_finite(nk)) throw InvariantError("joint_decompose: non-finite entry");
    const double nr = check_normal(nk);
    if (nr > tol.residual * (1.0 + nk.norm() * nk.norm()))
      throw InvariantError("joint_decompose: non-normal family member, residual " +
                           std::to_string(nr));
  }
  for (size_t k = 0; k < family.size(); ++k)
    for (size_t l = 0; l < k; ++l) {
      const double cr = (family[k] * family[l] - family[l] * family[k]).norm();
      if (cr > tol.residual * (1.0 + family[k].norm() * family[l].norm()))
        throw InvariantError("joint_decompose: family members " + std::to_string(l) + " and " +
                             std::to_string(k) + " do not commute, residual " +
                             std::to_string(cr));
    }

  JointSpectralDecomp d;
  d.family_size = static_cast<int>(family.size());
  d.source_dim = static_cast<int>(dim);

  std::vector<JointAtom> atoms;
  atoms.push_back({{}, split_columns(CMatrix::Identity(dim, dim))});

  for (const auto& nk : family) {
    std::vector<JointAtom> refined;
    for (const auto& atom : atoms) {
      const CMatrix v = stack_columns(atom.basis, dim);
      const CMatrix comp = v.adjoint() * nk * v;
      for (auto& [lambda, w] : normal_eigenspaces(comp, tol)) {
        JointAtom sub;
        sub.tuple = atom.tuple;
        sub.tuple.push_back(lambda);
        sub.basis = split_columns(v * w);
        refined.push_back(std::move(sub));
      }
    }
    atoms = std::move(refined);
  }

  std::sort(atoms.begin(), atoms.end(),
            [](const JointAtom& a, const JointAtom& b) { return tuple_less(a.tuple, b.tuple); });
  d.atoms = std::move(atoms);
  return d;
}

JointSpectralDecomp joint_decompose(const std::vector<CMatrix>& family, const Tolerances& tol) {
  if (family.empty()) throw InvariantError("joint_decompose: empty family needs a dimension");
  return joint_decompose(family, family.front().rows(), tol);
}

namespace {

template <typename Decomp>
CMatrix projection_impl(const Decomp& d, const BorelSelector& sel) {
  CMatrix p = CMatrix::Zero(d.source_dim, d.source_dim);
  std::vector<bool> seen(d.atoms.size(), false);
  for (int idx : sel.indices) {
    if (idx < 0 || idx >= static_cast<int>(d.atoms.size()))
      throw InvariantError("projection: selector index out of range");
    if (seen[static_cast<size_t>(idx)]) continue;
    seen[static_cast<size_t>(idx)] = true;
    p += d.atom_projection(static_cast<size_t>(idx));
  }
  return p;
}

}  // namespace

CMatrix projection(const SpectralDecomp& d, const BorelSelector& sel) {
  return projection_impl(d, sel);
}

CMatrix projection(const JointSpectralDecomp& d, const BorelSelector& sel) {
  return projection_impl(d, sel);
}

std::vector<CVector> orbit_subspace(const JointSpectralDecomp& d,
                                    const std::vector<CVector>& seeds,
                                    const Tolerances& tol) {
  tol.validate();
  for (const auto& s : seeds) {
    if (s.size() != d.source_dim) throw InvariantError("orbit_subspace: dimension mismatch");
    if (s.norm() <= tol.rank) throw InvariantError("orbit_subspace: zero seed");
  }

  bool orthogonal = true;
  for (size_t i = 0; i < seeds.size() && orthogonal; ++i)
    for (size_t j = 0; j < i && orthogonal; ++j)
      if (std::abs(inner(seeds[i], seeds[j])) >
          1e2 * tol.residual * seeds[i].norm() * seeds[j].norm())
        orthogonal = false;

  std::vector<CVector> candidates;
  int prefix = 0;
  if (orthogonal) {
    for (const auto& s : seeds) candidates.push_back(s / s.norm());
    prefix = static_cast<int>(seeds.size());
  }
  for (size_t a = 0; a < d.atoms.size(); ++a) {
    const CMatrix v = d.basis_matrix(a);
    for (const auto& s : seeds) candidates.push_back(v * (v.adjoint() * s));
  }
  return qr_orthonormalize(candidates, tol, prefix).basis;
}

std::vector<std::pair<Complex, int>> multiplicity_map(const SpectralDecomp& d) {
  std::vector<std::pair<Complex, int>> m;
  m.reserve(d.atoms.size());
  for (const auto& a : d.atoms) m.emplace_back(a.eigenvalue, a.dim());
  return m;
}

SkewSymmetryDecision is_skew_symmetric_normal(const CMatrix& n, const Tolerances& tol) {
  const SpectralDecomp d = decompose(n, tol);
  const Eigen::Index dim = n.rows();

  SkewSymmetryDecision res;
  CMatrix s = CMatrix::Zero(dim, dim);
  std::vector<bool> done(d.atoms.size(), false);
  for (size_t i = 0; i < d.atoms.size(); ++i) {
    if (done[i]) continue;
    done[i] = true;
    const Complex lambda = d.atoms[i].eigenvalue;
    if (std::abs(lambda) <= tol.cluster) {
      const CMatrix k = d.basis_matrix(i);
      s += k * k.transpose();
      continue;
    }
    int partner = -1;
    for (size_t j = 0; j < d.atoms.size(); ++j) {
      if (j == i || done[j]) continue;
      if (std::abs(d.atoms[j].eigenvalue + lambda) <= tol.cluster) {
        partner = static_cast<int>(j);
        break;
      }
    }
    if (partner < 0) {
      res.skew_symmetric = false;
      res.violation = SkewSymmetryDecision::Violation{lambda, d.atoms[i].dim(), 0};
      return res;
    }
    done[static_cast<size_t>(partner)] = true;
    if (d.atoms[i].dim() != d.atoms[static_cast<size_t>(partner)].dim()) {
      res.skew_symmetric = false;
      res.violation = SkewSymmetryDecision::Violation{
          lambda, d.atoms[i].dim(), d.atoms[static_cast<size_t>(partner)].dim()};
      return res;
    }
    const CMatrix a = d.basis_matrix(i);
    const CMatrix b = d.basis_matrix(static_cast<size_t>(partner));
    s += b * a.transpose() + a * b.transpose();
  }
  res.skew_symmetric = true;
  res.witness = Conjugation{std::move(s)};
  return res;
}

std::vector<CVector> normal_part(const CMatrix& t, const Tolerances& tol) {
  tol.validate();
  if (t.rows() != t.cols()) throw InvariantError("normal_part: matrix not square");
  const Eigen::Index d = t.rows();
  if (d == 0) return {};

  std::vector<CMatrix> powers;
  powers.reserve(static_cast<size_t>(d));
  CMatrix p = t;
  for (Eigen::Index m = 1; m <= d; ++m) {
    powers.push_back(p);
    if (m < d) p = p * t;
  }

  CMatrix w = CMatrix::Identity(d, d);  // columns span the running intersection
  for (Eigen::Index nn = 0; nn < d && w.cols() > 0; ++nn) {
    for (Eigen::Index mm = 0; mm < d && w.cols() > 0; ++mm) {
      const CMatrix& pn = powers[static_cast<size_t>(nn)];
      const CMatrix& pm = powers[static_cast<size_t>(mm)];
      const CMatrix comm = pn.adjoint() * pm - pm * pn.adjoint();
      const CMatrix restricted = comm * w;
      Eigen::JacobiSVD<CMatrix> svd(restricted, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      // the cutoff is relative to the magnitude of the products forming the
      // commutator, so an exactly-normal restriction keeps its full kernel
      const double cutoff = tol.rank * std::max(pn.norm() * pm.norm(), 1e-300);
      Eigen::Index kernel_start = 0;
      while (kernel_start < sv.size() && sv(kernel_start) > cutoff) ++kernel_start;
      w = w * svd.matrixV().rightCols(svd.matrixV().cols() - kernel_start);
    }
  }
  return split_columns(w);
}

}  // namespace conjint
