#include "conjint/antilinear.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace conjint {

CVector apply(const AntilinearMap& a, const CVector& h) {
  if (a.m.cols() != h.size()) throw InvariantError("apply: dimension mismatch");
  return a.m * h.conjugate();
}

CVector apply(const Conjugation& c, const CVector& h) {
  if (c.s.cols() != h.size()) throw InvariantError("apply: dimension mismatch");
  return c.s * h.conjugate();
}

AntilinearMap sharp(const AntilinearMap& a) {
  if (a.m.rows() != a.m.cols()) throw InvariantError("sharp: matrix not square");
  return {a.m.transpose()};
}

ConjugationReport verify_conjugation(const AntilinearMap& a, const Tolerances& tol) {
  tol.validate();
  if (a.m.rows() != a.m.cols()) throw InvariantError("verify_conjugation: matrix not square");
  ConjugationReport r;
  r.symmetry = (a.m - a.m.transpose()).norm();
  r.isometry = (a.m * a.m.adjoint() - CMatrix::Identity(a.m.rows(), a.m.cols())).norm();
  r.pass = r.symmetry <= tol.residual && r.isometry <= tol.residual;
  return r;
}

ConjugationReport verify_conjugation(const Conjugation& c, const Tolerances& tol) {
  return verify_conjugation(c.as_antilinear(), tol);
}

RelationResiduals relation_residuals(const Conjugation& c, const CMatrix& t,
                                     const Tolerances& tol) {
  if (!verify_conjugation(c, tol).pass)
    throw InvariantError("relation_residuals: not a conjugation");
  if (t.rows() != t.cols() || t.rows() != c.s.rows())
    throw InvariantError("relation_residuals: dimension mismatch");
  const CMatrix ctc = c.s * t.conjugate() * c.s.adjoint();
  const CMatrix ctt = c.s * (t * t.adjoint()).conjugate() * c.s.adjoint();
  RelationResiduals r;
  r.sym = (ctc - t.adjoint()).norm();
  r.skew = (ctc + t.adjoint()).norm();
  r.cnormal = (ctt - t.adjoint() * t).norm();
  return r;
}

namespace {

void check_orthogonal_nonzero(const std::vector<CVector>& vs, const Tolerances& tol,
                              const char* what) {
  for (size_t i = 0; i < vs.size(); ++i) {
    const double ni = vs[i].norm();
    if (ni <= tol.rank) throw InvariantError(std::string(what) + ": zero vector");
    for (size_t j = 0; j < i; ++j) {
      const double nj = vs[j].norm();
      if (std::abs(inner(vs[i], vs[j])) > 1e2 * tol.residual * ni * nj)
        throw InvariantError(std::string(what) + ": vectors not pairwise orthogonal");
    }
  }
}

}  // namespace

ZhuLiResult zhu_li_interpolate(const std::vector<CVector>& xs,
                               const std::vector<CVector>& ys,
                               const Tolerances& tol) {
  tol.validate();
  if (xs.size() != ys.size()) throw InvariantError("zhu_li_interpolate: list sizes differ");
  check_orthogonal_nonzero(xs, tol, "zhu_li_interpolate xs");
  check_orthogonal_nonzero(ys, tol, "zhu_li_interpolate ys");

  std::vector<CVector> xn, yn;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double nx = xs[i].norm();
    const double ny = ys[i].norm();
    if (std::abs(nx - ny) > 1e2 * tol.residual * std::max(1.0, nx))
      throw InvariantError("zhu_li_interpolate: norm mismatch in pair " + std::to_string(i));
    xn.push_back(xs[i] / nx);
    yn.push_back(ys[i] / ny);
  }

  ZhuLiResult res;
  for (size_t i = 0; i < xn.size(); ++i)
    for (size_t j = 0; j < i; ++j) {
      const Complex lhs = inner(xn[i], yn[j]);
      const Complex rhs = inner(xn[j], yn[i]);
      if (std::abs(lhs - rhs) > tol.residual) {
        res.feasible = false;
        res.violation = {static_cast<int>(j), static_cast<int>(i)};
        res.lhs = inner(xn[j], yn[i]);
        res.rhs = inner(xn[i], yn[j]);
        return res;
      }
    }

  res.feasible = true;
  res.conjugation = complete_partial_conjugation(xn, yn, tol);
  return res;
}

PartialConjugation fit_partial_conjugation(const std::vector<CVector>& domain,
                                           const std::vector<CVector>& images,
                                           const Tolerances& tol) {
  tol.validate();
  if (domain.size() != images.size())
    throw InvariantError("fit_partial_conjugation: list sizes differ");
  if (domain.empty()) return {CMatrix(), {}};

  const Eigen::Index dim = domain.front().size();
  std::vector<CVector> g = domain;
  std::vector<CVector> h = images;
  // swap closure: each pair (g,h) is accompanied by (h,g)
  for (size_t i = 0; i < domain.size(); ++i) {
    g.push_back(images[i]);
    h.push_back(domain[i]);
  }
  double maxnorm = 0.0;
  for (const auto& v : g) {
    if (v.size() != dim) throw InvariantError("fit_partial_conjugation: dimension mismatch");
    if (v.norm() <= tol.rank) throw InvariantError("fit_partial_conjugation: zero constraint vector");
    maxnorm = std::max(maxnorm, v.norm());
  }

  for (size_t l = 0; l < g.size(); ++l)
    for (size_t m = 0; m <= l; ++m) {
      const Complex lhs = inner(g[l], h[m]);
      const Complex rhs = inner(g[m], h[l]);
      if (std::abs(lhs - rhs) > 1e2 * tol.residual * maxnorm * maxnorm)
        throw InvariantError("fit_partial_conjugation: Gram condition violated at pair (" +
                             std::to_string(m) + "," + std::to_string(l) + ")");
    }

  const CMatrix gm = stack_columns(g, dim);
  const CMatrix hm = stack_columns(h, dim);
  const CMatrix e = gm.conjugate();
  CMatrix s0 = hm * pinv(e, tol);

  const double scale = std::sqrt(static_cast<double>(g.size())) * (1.0 + maxnorm);
  const double fit_residual = (s0 * e - hm).norm();
  if (fit_residual > 1e3 * tol.residual * scale)
    throw CompletionError("fit_partial_conjugation: inconsistent constraints, residual " +
                          std::to_string(fit_residual));

  s0 = (s0 + s0.transpose().eval()) / 2.0;

  OrthonormalBasis span = qr_orthonormalize(g, tol);
  const CMatrix q = stack_columns(span.basis, dim);
  // restricted polar factor; the compression of a symmetrized s0 onto the
  // (span, conj(span)) block is complex symmetric, and so is its polar factor
  const CMatrix small = q.adjoint() * s0 * q.conjugate();
  const CMatrix p = polar_unitary(small);
  CMatrix s = q * p * q.transpose();

  double worst = 0.0;
  for (size_t l = 0; l < g.size(); ++l)
    worst = std::max(worst, (s * g[l].conjugate() - h[l]).norm());
  if (worst > 1e3 * tol.residual * scale)
    throw CompletionError("fit_partial_conjugation: completion misses a constraint by " +
                          std::to_string(worst));

  return {std::move(s), std::move(span.basis)};
}

Conjugation complete_partial_conjugation(const std::vector<CVector>& domain,
                                         const std::vector<CVector>& images,
                                         const Tolerances& tol) {
  if (domain.empty()) throw InvariantError("complete_partial_conjugation: empty constraint set");
  const Eigen::Index dim = domain.front().size();
  PartialConjugation part = fit_partial_conjugation(domain, images, tol);
  CMatrix s = part.s_partial;
  const std::vector<CVector> comp = orthonormal_complement(part.span_basis, dim, tol);
  if (!comp.empty()) {
    const CMatrix b = stack_columns(comp, dim);
    s += b * b.transpose();
  }
  return {std::move(s)};
}

namespace {

// clusters of indices of an ascending real sequence, split at gaps > threshold
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

std::vector<CVector> fixed_point_basis_deflation(const Conjugation& c, const Tolerances& tol) {
  const Eigen::Index d = c.s.rows();
  std::vector<CVector> zs;
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int guard = 0;
  while (static_cast<Eigen::Index>(zs.size()) < d) {
    CVector h(d);
    if (guard < d) {
      h = CVector::Unit(d, guard);
    } else {
      for (Eigen::Index i = 0; i < d; ++i) h(i) = Complex(gauss(rng), gauss(rng));
    }
    ++guard;
    if (guard > 16 * d)
      throw CompletionError("fixed_point_basis: deflation failed to converge");
    for (const auto& z : zs) h -= z * inner(h, z);
    CVector cand = h + conjint::apply(c, h);
    if (cand.norm() <= tol.rank * (1.0 + h.norm()))
      cand = Complex(0.0, 1.0) * (h - conjint::apply(c, h));
    const double n = cand.norm();
    if (n <= 1e3 * tol.rank * (1.0 + h.norm())) continue;
    zs.push_back(cand / n);
  }
  return zs;
}

}  // namespace

std::vector<CVector> fixed_point_basis(const Conjugation& c, const Tolerances& tol) {
  tol.validate();
  if (!verify_conjugation(c, tol).pass)
    throw InvariantError("fixed_point_basis: not a conjugation");
  const Eigen::Index d = c.s.rows();

  // s = a + i b with a, b commuting real symmetric; a joint real eigenbasis
  // diagonalizes s with unimodular eigenvalues, and scaling each real
  // eigenvector by the half-phase of its eigenvalue lands in the fixed set.
  const RMatrix a = c.s.real();
  const RMatrix b = c.s.imag();
  Eigen::SelfAdjointEigenSolver<RMatrix> esa((a + a.transpose()) / 2.0);
  if (esa.info() != Eigen::Success) throw InvariantError("fixed_point_basis: eigensolver failed");

  std::vector<CVector> zs;
  for (const auto& [lo, hi] : cluster_ranges(esa.eigenvalues(), tol.cluster)) {
    const RMatrix va = esa.eigenvectors().middleCols(lo, hi - lo);
    const RMatrix bc = va.transpose() * ((b + b.transpose()) / 2.0) * va;
    Eigen::SelfAdjointEigenSolver<RMatrix> esb((bc + bc.transpose()) / 2.0);
    if (esb.info() != Eigen::Success) throw InvariantError("fixed_point_basis: eigensolver failed");
    for (const auto& [blo, bhi] : cluster_ranges(esb.eigenvalues(), tol.cluster)) {
      const RMatrix o = va * esb.eigenvectors().middleCols(blo, bhi - blo);
      Complex lambda(esa.eigenvalues().segment(lo, hi - lo).mean(),
                     esb.eigenvalues().segment(blo, bhi - blo).mean());
      if (std::abs(lambda) > 0.0) lambda /= std::abs(lambda);
      const Complex half = std::sqrt(lambda);
      for (Eigen::Index j = 0; j < o.cols(); ++j)
        zs.push_back(half * o.col(j).cast<Complex>());
    }
  }

  if (static_cast<Eigen::Index>(zs.size()) == d) {
    double worst = 0.0;
    for (const auto& z : zs) worst = std::max(worst, (conjint::apply(c, z) - z).norm());
    if (worst <= d * std::max(tol.cluster, 1e3 * tol.residual)) return zs;
  }
  return fixed_point_basis_deflation(c, tol);
}

}  // namespace conjint
