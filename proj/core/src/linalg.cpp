#include "conjint/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace conjint {

void Tolerances::validate() const {
  if (!(residual > 0.0) || !(cluster > 0.0) || !(rank > 0.0))
    throw InvariantError("tolerances must be strictly positive");
  if (cluster < residual)
    throw InvariantError("cluster tolerance must be >= residual tolerance");
}

bool all_finite(const CMatrix& a) { return a.allFinite(); }
bool all_finite(const CVector& v) { return v.allFinite(); }

CMatrix stack_columns(const std::vector<CVector>& vs, Eigen::Index dim) {
  if (vs.empty()) return CMatrix::Zero(dim, 0);
  CMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (vs[static_cast<size_t>(j)].size() != m.rows())
      throw InvariantError("stack_columns: dimension mismatch");
    m.col(j) = vs[static_cast<size_t>(j)];
  }
  return m;
}

std::vector<CVector> split_columns(const CMatrix& m) {
  std::vector<CVector> vs;
  vs.reserve(static_cast<size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) vs.push_back(m.col(j));
  return vs;
}

OrthonormalBasis qr_orthonormalize(const std::vector<CVector>& vectors,
                                   const Tolerances& tol,
                                   int orthonormal_prefix) {
  tol.validate();
  OrthonormalBasis out;
  if (vectors.empty()) return out;

  const Eigen::Index dim = vectors.front().size();
  double maxnorm = 0.0;
  for (const auto& v : vectors) {
    if (v.size() != dim) throw InvariantError("qr_orthonormalize: dimension mismatch");
    if (!all_finite(v)) throw InvariantError("qr_orthonormalize: non-finite entry");
    maxnorm = std::max(maxnorm, v.norm());
  }
  if (orthonormal_prefix < 0 || orthonormal_prefix > static_cast<int>(vectors.size()))
    throw InvariantError("qr_orthonormalize: prefix out of range");

  for (int i = 0; i < orthonormal_prefix; ++i) {
    for (int j = 0; j <= i; ++j) {
      const Complex g = inner(vectors[static_cast<size_t>(i)], vectors[static_cast<size_t>(j)]);
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - expect) > 1e2 * tol.residual)
        throw InvariantError("qr_orthonormalize: designated prefix is not orthonormal");
    }
    out.basis.push_back(vectors[static_cast<size_t>(i)]);
  }

  const double drop = tol.rank * maxnorm;
  for (size_t i = static_cast<size_t>(orthonormal_prefix); i < vectors.size(); ++i) {
    CVector u = vectors[i];
    // two orthogonalization passes keep the result orthonormal near machine precision
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : out.basis) u -= b * inner(u, b);
    const double n = u.norm();
    if (n > drop) out.basis.push_back(u / n);
  }
  out.rank = static_cast<int>(out.basis.size());
  return out;
}

HermitianEig hermitian_eig(const CMatrix& a, const Tolerances& tol) {
  tol.validate();
  if (a.rows() != a.cols()) throw InvariantError("hermitian_eig: matrix not square");
  if (!all_finite(a)) throw InvariantError("hermitian_eig: non-finite entry");
  const double herm = (a - a.adjoint()).norm();
  if (herm > tol.residual * (1.0 + a.norm()))
    throw InvariantError("hermitian_eig: input not hermitian, residual " + std::to_string(herm));
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw InvariantError("hermitian_eig: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

CMatrix pinv(const CMatrix& a, const Tolerances& tol) {
  tol.validate();
  if (a.size() == 0) return CMatrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol.rank * (sv.size() > 0 ? sv(0) : 0.0);
  RVector inv = RVector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

CMatrix rank_one(const CVector& x, const CVector& y) {
  if (x.size() != y.size()) throw InvariantError("rank_one: dimension mismatch");
  return x * y.adjoint();
}

CMatrix polar_unitary(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

std::vector<CVector> orthonormal_complement(const std::vector<CVector>& basis,
                                            Eigen::Index dim,
                                            const Tolerances& tol) {
  const Eigen::Index r = static_cast<Eigen::Index>(basis.size());
  if (r == 0) return split_columns(CMatrix::Identity(dim, dim));
  if (r > dim) throw InvariantError("orthonormal_complement: basis larger than space");
  const CMatrix b = stack_columns(basis, dim);
  if (b.rows() != dim) throw InvariantError("orthonormal_complement: dimension mismatch");
  Eigen::HouseholderQR<CMatrix> qr(b);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  std::vector<CVector> comp = split_columns(q.rightCols(dim - r));
  // guard against a rank-deficient "orthonormal" input
  for (const auto& c : comp)
    for (const auto& v : basis)
      if (std::abs(inner(c, v)) > 1e3 * tol.residual)
        throw InvariantError("orthonormal_complement: input basis not orthonormal");
  return comp;
}

CMatrix householder_to_e1(const CVector& v) {
  const Eigen::Index n = v.size();
  CMatrix h = CMatrix::Identity(n, n);
  const double nv = v.norm();
  if (nv == 0.0) return h;
  Complex alpha(1.0, 0.0);
  if (std::abs(v(0)) > 0.0) alpha = v(0) / std::abs(v(0));
  CVector w = v;
  w(0) += alpha * nv;
  const double nw2 = w.squaredNorm();
  if (nw2 > 0.0) h -= (2.0 / nw2) * (w * w.adjoint());
  // h * v == -alpha*||v||*e1; fold the phase into the first row
  h.row(0) *= -std::conj(alpha);
  return h;
}

CMatrix unitary_mapping(const CVector& from, const CVector& to) {
  if (from.size() != to.size()) throw InvariantError("unitary_mapping: dimension mismatch");
  const double nf = from.norm();
  const double nt = to.norm();
  const Eigen::Index n = from.size();
  if (nf == 0.0 || nt == 0.0) return CMatrix::Identity(n, n);
  const CMatrix hf = householder_to_e1(from);
  const CMatrix ht = householder_to_e1(to);
  return ht.adjoint() * hf;
}

}  // namespace conjint
