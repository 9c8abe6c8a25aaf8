#include "conjint/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace conjint {

Eigen::Index InterpolationProblem::dimension() const {
  if (!operators.empty()) return operators.front().rows();
  if (!xs.empty()) return xs.front().size();
  return 0;
}

void InterpolationProblem::validate() const {
  tol.validate();
  const Eigen::Index d = dimension();
  if (d == 0) throw InvariantError("problem: cannot infer dimension");
  if (mode == Mode::skew && operators.size() != 1)
    throw InvariantError("problem: skew mode takes exactly one operator");
  for (const auto& n : operators) {
    if (n.rows() != d || n.cols() != d) throw InvariantError("problem: operator dimension mismatch");
    if (!all_finite(n)) throw InvariantError("problem: non-finite operator entry");
    const double nr = check_normal(n);
    if (nr > tol.residual * (1.0 + n.norm() * n.norm()))
      throw InvariantError("problem: operator not normal, residual " + std::to_string(nr));
  }
  for (size_t k = 0; k < operators.size(); ++k)
    for (size_t l = 0; l < k; ++l) {
      const double cr = (operators[k] * operators[l] - operators[l] * operators[k]).norm();
      if (cr > tol.residual * (1.0 + operators[k].norm() * operators[l].norm()))
        throw InvariantError("problem: operators do not commute, residual " + std::to_string(cr));
    }
  if (xs.size() != ys.size()) throw InvariantError("problem: xs and ys differ in length");
  auto check_set = [&](const std::vector<CVector>& vs, const char* name) {
    for (size_t i = 0; i < vs.size(); ++i) {
      if (vs[i].size() != d) throw InvariantError(std::string("problem: ") + name + " dimension mismatch");
      if (!all_finite(vs[i])) throw InvariantError(std::string("problem: non-finite entry in ") + name);
      if (vs[i].norm() <= tol.rank) throw InvariantError(std::string("problem: zero vector in ") + name);
      for (size_t j = 0; j < i; ++j)
        if (std::abs(inner(vs[i], vs[j])) > 1e2 * tol.residual * vs[i].norm() * vs[j].norm())
          throw InvariantError(std::string("problem: ") + name + " not pairwise orthogonal");
    }
  };
  check_set(xs, "xs");
  check_set(ys, "ys");
}

namespace {

struct AtomData {
  std::vector<CMatrix> bases;              // per atom, d x m_a
  std::vector<int> partner;                // sigma(a); -1 when the partner atom is absent
  std::vector<std::vector<CVector>> cx;    // cx[a][i] = V_a^* x_i
  std::vector<std::vector<CVector>> cy;
};

AtomData prepare_atoms(const JointSpectralDecomp& jd, Mode mode,
                       const std::vector<CVector>& xn, const std::vector<CVector>& yn,
                       const Tolerances& tol) {
  AtomData ad;
  const size_t na = jd.atoms.size();
  ad.bases.reserve(na);
  for (size_t a = 0; a < na; ++a) ad.bases.push_back(jd.basis_matrix(a));

  ad.partner.assign(na, -1);
  if (mode == Mode::symmetric) {
    for (size_t a = 0; a < na; ++a) ad.partner[a] = static_cast<int>(a);
  } else {
    for (size_t a = 0; a < na; ++a) {
      const Complex lambda = jd.atoms[a].tuple.at(0);
      if (std::abs(lambda) <= tol.cluster) {
        ad.partner[a] = static_cast<int>(a);
        continue;
      }
      for (size_t b = 0; b < na; ++b)
        if (std::abs(jd.atoms[b].tuple.at(0) + lambda) <= tol.cluster) {
          ad.partner[a] = static_cast<int>(b);
          break;
        }
    }
  }

  ad.cx.resize(na);
  ad.cy.resize(na);
  for (size_t a = 0; a < na; ++a) {
    for (const auto& x : xn) ad.cx[a].push_back(ad.bases[a].adjoint() * x);
    for (const auto& y : yn) ad.cy[a].push_back(ad.bases[a].adjoint() * y);
  }
  return ad;
}

void normalize_pairs(const InterpolationProblem& p, std::vector<CVector>& xn,
                     std::vector<CVector>& yn, std::vector<FeasibilityViolation>& violations) {
  for (size_t i = 0; i < p.xs.size(); ++i) {
    const double nx = p.xs[i].norm();
    const double ny = p.ys[i].norm();
    if (std::abs(nx - ny) > p.tol.residual * std::max(1.0, nx)) {
      FeasibilityViolation v;
      v.kind = "norm";
      v.i = v.j = static_cast<int>(i);
      v.lhs = nx;
      v.rhs = ny;
      v.magnitude = std::abs(nx - ny);
      violations.push_back(v);
    }
    xn.push_back(p.xs[i] / nx);
    yn.push_back(p.ys[i] / ny);
  }
}

void atom_conditions(const AtomData& ad, size_t pair_count, double tol_residual,
                     std::vector<FeasibilityViolation>& violations) {
  const size_t na = ad.bases.size();
  auto dotc = [](const CVector& u, const CVector& v) { return v.dot(u); };  // <u,v>
  for (size_t a = 0; a < na; ++a) {
    const int s = ad.partner[a];
    for (size_t i = 0; i < pair_count; ++i)
      for (size_t j = 0; j < pair_count; ++j) {
        const Complex lhs_xx = dotc(ad.cx[a][i], ad.cx[a][j]);
        const Complex rhs_xx = s >= 0 ? dotc(ad.cy[static_cast<size_t>(s)][j],
                                             ad.cy[static_cast<size_t>(s)][i])
                                      : Complex(0.0, 0.0);
        if (std::abs(lhs_xx - rhs_xx) > tol_residual) {
          FeasibilityViolation v;
          v.kind = "atom_xx";
          v.atom = static_cast<int>(a);
          v.i = static_cast<int>(i);
          v.j = static_cast<int>(j);
          v.lhs = lhs_xx;
          v.rhs = rhs_xx;
          v.magnitude = std::abs(lhs_xx - rhs_xx);
          violations.push_back(v);
        }
        const Complex lhs_xy = dotc(ad.cx[a][i], ad.cy[a][j]);
        const Complex rhs_xy = s >= 0 ? dotc(ad.cx[static_cast<size_t>(s)][j],
                                             ad.cy[static_cast<size_t>(s)][i])
                                      : Complex(0.0, 0.0);
        if (std::abs(lhs_xy - rhs_xy) > tol_residual) {
          FeasibilityViolation v;
          v.kind = "atom_xy";
          v.atom = static_cast<int>(a);
          v.i = static_cast<int>(i);
          v.j = static_cast<int>(j);
          v.lhs = lhs_xy;
          v.rhs = rhs_xy;
          v.magnitude = std::abs(lhs_xy - rhs_xy);
          violations.push_back(v);
        }
      }
  }
}

std::vector<CVector> concat(const std::vector<CVector>& a, const std::vector<CVector>& b) {
  std::vector<CVector> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Feasibility feasibility_impl(const InterpolationProblem& p) {
  p.validate();
  Feasibility f;
  std::vector<CVector> xn, yn;
  normalize_pairs(p, xn, yn, f.violations);

  const JointSpectralDecomp jd = joint_decompose(p.operators, p.dimension(), p.tol);
  const AtomData ad = prepare_atoms(jd, p.mode, xn, yn, p.tol);
  atom_conditions(ad, xn.size(), p.tol.residual, f.violations);

  if (p.mode == Mode::skew) {
    const std::vector<CVector> basis_l = orbit_subspace(jd, concat(xn, yn), p.tol);
    const std::vector<CVector> comp = orthonormal_complement(basis_l, p.dimension(), p.tol);
    if (!comp.empty()) {
      const CMatrix bc = stack_columns(comp, p.dimension());
      const CMatrix restricted = bc.adjoint() * p.operators.front() * bc;
      const SkewSymmetryDecision ssd = is_skew_symmetric_normal(restricted, p.tol);
      if (!ssd.skew_symmetric) {
        FeasibilityViolation v;
        v.kind = "complement_not_skew";
        if (ssd.violation) {
          v.lhs = ssd.violation->eigenvalue;
          v.i = ssd.violation->multiplicity;
          v.j = ssd.violation->negated_multiplicity;
          v.magnitude = static_cast<double>(
              std::abs(ssd.violation->multiplicity - ssd.violation->negated_multiplicity));
        }
        f.violations.push_back(v);
      }
    }
  }

  f.feasible = f.violations.empty();
  return f;
}

Certificate construct_impl(const InterpolationProblem& p) {
  Feasibility feas = feasibility_impl(p);
  if (!feas.feasible) {
    Certificate c;
    c.feasible = false;
    c.violations = std::move(feas.violations);
    return c;
  }

  const Eigen::Index d = p.dimension();
  std::vector<CVector> xn, yn;
  {
    std::vector<FeasibilityViolation> dummy;
    normalize_pairs(p, xn, yn, dummy);
  }

  const JointSpectralDecomp jd = joint_decompose(p.operators, d, p.tol);
  const AtomData ad = prepare_atoms(jd, p.mode, xn, yn, p.tol);
  const size_t na = jd.atoms.size();
  const size_t npairs = xn.size();

  // orthonormal basis of the orbit subspace of the xs, xs kept verbatim
  std::vector<CVector> lx_candidates = xn;
  for (size_t a = 0; a < na; ++a)
    for (size_t i = 0; i < npairs; ++i) lx_candidates.push_back(ad.bases[a] * ad.cx[a][i]);
  const OrthonormalBasis lx = qr_orthonormalize(lx_candidates, p.tol, static_cast<int>(npairs));

  // spanning columns Q_a x_i of the orbit, with their sigma-mapped images
  std::vector<CVector> span_cols;
  std::vector<CVector> image_cols;
  for (size_t a = 0; a < na; ++a) {
    const int s = ad.partner[a];
    for (size_t i = 0; i < npairs; ++i) {
      const CVector qx = ad.bases[a] * ad.cx[a][i];
      if (qx.norm() <= p.tol.rank) continue;
      CVector qy = CVector::Zero(d);
      if (s >= 0) {
        const size_t su = static_cast<size_t>(s);
        qy = ad.bases[su] * ad.cy[su][i];
      }
      span_cols.push_back(qx);
      image_cols.push_back(qy);
    }
  }

  // antilinear image of each basis vector: expand over the spanning columns,
  // conjugate the coefficients and swap in the image columns
  std::vector<CVector> fs;
  if (!lx.basis.empty()) {
    const CMatrix a = stack_columns(span_cols, d);
    const CMatrix ap = pinv(a, p.tol);
    const CMatrix b = stack_columns(image_cols, d);
    for (size_t j = 0; j < lx.basis.size(); ++j) {
      if (j < npairs) {
        fs.push_back(yn[j]);
        continue;
      }
      const CVector coeff = ap * lx.basis[j];
      fs.push_back(b * coeff.conjugate());
    }
  }

  CMatrix s = CMatrix::Zero(d, d);
  std::vector<CVector> span_basis;
  if (!lx.basis.empty()) {
    PartialConjugation part = fit_partial_conjugation(lx.basis, fs, p.tol);
    s = part.s_partial;
    span_basis = std::move(part.span_basis);
  }

  const std::vector<CVector> comp = orthonormal_complement(span_basis, d, p.tol);
  if (!comp.empty()) {
    const CMatrix bc = stack_columns(comp, d);
    if (p.mode == Mode::symmetric) {
      std::vector<CMatrix> restricted;
      restricted.reserve(p.operators.size());
      for (const auto& nk : p.operators) restricted.push_back(bc.adjoint() * nk * bc);
      const JointSpectralDecomp jdc = joint_decompose(restricted, bc.cols(), p.tol);
      std::vector<CVector> eigvecs;
      for (size_t a = 0; a < jdc.atoms.size(); ++a)
        for (const auto& v : jdc.atoms[a].basis) eigvecs.push_back(v);
      const CMatrix vc = stack_columns(eigvecs, bc.cols());
      const CMatrix bprime = bc * vc;
      s += bprime * bprime.transpose();
    } else {
      const CMatrix restricted = bc.adjoint() * p.operators.front() * bc;
      const SkewSymmetryDecision ssd = is_skew_symmetric_normal(restricted, p.tol);
      if (!ssd.skew_symmetric || !ssd.witness)
        throw CompletionError("construct: complement lost skew-symmetry after restriction");
      s += bc * ssd.witness->s * bc.transpose();
    }
  }

  Certificate cert;
  cert.feasible = true;
  cert.conjugation = Conjugation{std::move(s)};
  cert.residuals = recompute_residuals(p, *cert.conjugation);

  double worst = 0.0;
  for (const auto& [k, v] : cert.residuals) worst = std::max(worst, v);
  const double gate = certificate_gate(p);
  if (worst > gate)
    throw CompletionError("construct: certificate residual " + std::to_string(worst) +
                          " exceeds feasibility gate " + std::to_string(gate));
  return cert;
}

}  // namespace

double certificate_gate(const InterpolationProblem& p) {
  double scale = 1.0;
  for (const auto& nk : p.operators) scale = std::max(scale, nk.norm());
  for (const auto& x : p.xs) scale = std::max(scale, x.norm());
  for (const auto& y : p.ys) scale = std::max(scale, y.norm());
  return p.tol.residual * (10.0 + static_cast<double>(p.dimension())) * (1.0 + scale);
}

Feasibility feasibility_symmetric(const InterpolationProblem& p) {
  if (p.mode != Mode::symmetric) throw InvariantError("feasibility_symmetric: wrong mode");
  return feasibility_impl(p);
}

Feasibility feasibility_skew(const InterpolationProblem& p) {
  if (p.mode != Mode::skew) throw InvariantError("feasibility_skew: wrong mode");
  return feasibility_impl(p);
}

Certificate construct_symmetric(const InterpolationProblem& p) {
  if (p.mode != Mode::symmetric) throw InvariantError("construct_symmetric: wrong mode");
  return construct_impl(p);
}

Certificate construct_skew(const InterpolationProblem& p) {
  if (p.mode != Mode::skew) throw InvariantError("construct_skew: wrong mode");
  return construct_impl(p);
}

std::map<std::string, double> recompute_residuals(const InterpolationProblem& p,
                                                  const Conjugation& c) {
  std::map<std::string, double> r;
  const Eigen::Index d = c.s.rows();
  r["conjugation_symmetry"] = (c.s - c.s.transpose()).norm();
  r["conjugation_unitarity"] = (c.s * c.s.adjoint() - CMatrix::Identity(d, d)).norm();
  for (size_t k = 0; k < p.operators.size(); ++k) {
    const CMatrix& t = p.operators[k];
    const CMatrix ctc = c.s * t.conjugate() * c.s.adjoint();
    const double res = p.mode == Mode::symmetric ? (ctc - t.adjoint()).norm()
                                                 : (ctc + t.adjoint()).norm();
    r["relation_" + std::to_string(k)] = res;
  }
  for (size_t i = 0; i < p.xs.size(); ++i)
    r["interpolation_" + std::to_string(i)] = (conjint::apply(c, p.xs[i]) - p.ys[i]).norm();
  return r;
}

Feasibility feasibility_single(const std::vector<CMatrix>& family, const CVector& x,
                               const CVector& y, const Tolerances& tol) {
  tol.validate();
  if (x.size() != y.size()) throw InvariantError("feasibility_single: dimension mismatch");
  if (x.norm() <= tol.rank || y.norm() <= tol.rank)
    throw InvariantError("feasibility_single: zero vector");
  const JointSpectralDecomp jd = joint_decompose(family, x.size(), tol);
  Feasibility f;
  for (size_t a = 0; a < jd.atoms.size(); ++a) {
    const CMatrix v = jd.basis_matrix(a);
    const double nx = (v.adjoint() * x).norm();
    const double ny = (v.adjoint() * y).norm();
    if (std::abs(nx - ny) > tol.residual * std::max(1.0, x.norm())) {
      FeasibilityViolation viol;
      viol.kind = "atom_norm";
      viol.atom = static_cast<int>(a);
      viol.lhs = nx;
      viol.rhs = ny;
      viol.magnitude = std::abs(nx - ny);
      f.violations.push_back(viol);
    }
  }
  f.feasible = f.violations.empty();
  return f;
}

CMatrix unitary_commutant_witness(const std::vector<CMatrix>& family, const CVector& x,
                                  const CVector& y, const Tolerances& tol) {
  const Feasibility f = feasibility_single(family, x, y, tol);
  if (!f.feasible)
    throw InvariantError("unitary_commutant_witness: infeasible pair");
  const Eigen::Index d = x.size();
  const JointSpectralDecomp jd = joint_decompose(family, d, tol);
  CMatrix u = CMatrix::Zero(d, d);
  for (size_t a = 0; a < jd.atoms.size(); ++a) {
    const CMatrix v = jd.basis_matrix(a);
    const CMatrix block = unitary_mapping(v.adjoint() * x, v.adjoint() * y);
    u += v * block * v.adjoint();
  }
  return u;
}

PerturbationReport perturbation_suite(const Certificate& c, const InterpolationProblem& p,
                                      const std::vector<Complex>& samples) {
  if (!c.feasible || !c.conjugation)
    throw InvariantError("perturbation_suite: certificate not feasible");
  if (p.xs.size() != 1) throw InvariantError("perturbation_suite: needs a single pair");
  const CVector& x = p.xs.front();
  const CVector& y = p.ys.front();
  if (p.mode == Mode::skew) {
    const double gram = x.squaredNorm() * y.squaredNorm() - std::norm(inner(x, y));
    if (gram <= 1e2 * p.tol.residual * std::pow(x.norm() * y.norm(), 2))
      throw InvariantError("perturbation_suite: x and y are collinear");
  }

  PerturbationReport rep;
  double scale = 1.0 + x.norm() * y.norm();
  for (const Complex lambda : samples) {
    double worst = 0.0;
    if (p.mode == Mode::symmetric) {
      const CMatrix bump = rank_one(x, y);
      for (const auto& nk : p.operators)
        worst = std::max(worst,
                         relation_residuals(*c.conjugation, nk + lambda * bump, p.tol).sym);
    } else {
      const CMatrix bump = rank_one(x, x) - rank_one(y, y);
      worst = relation_residuals(*c.conjugation, p.operators.front() + lambda * bump, p.tol).skew;
    }
    rep.samples.push_back({lambda, worst});
    rep.max_residual = std::max(rep.max_residual, worst);
    scale = std::max(scale, (1.0 + std::abs(lambda)) * (1.0 + x.norm() * y.norm()));
  }
  rep.pass = rep.max_residual <= 1e2 * p.tol.residual * scale;
  return rep;
}

bool is_hyperinvariant(const CMatrix& n, const std::vector<CVector>& m_basis,
                       const Tolerances& tol) {
  tol.validate();
  const SpectralDecomp d = decompose(n, tol);
  const OrthonormalBasis q = qr_orthonormalize(m_basis, tol);
  CMatrix pm = CMatrix::Zero(n.rows(), n.cols());
  for (const auto& b : q.basis) pm += b * b.adjoint();
  for (size_t a = 0; a < d.atoms.size(); ++a) {
    const CMatrix v = d.basis_matrix(a);
    const CMatrix pv = pm * v;
    const double r = std::min(pv.norm(), (pv - v).norm());
    if (r > 1e3 * tol.residual) return false;
  }
  return true;
}

namespace {

CMatrix haar_unitary(Eigen::Index m, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(m, m);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j) {
    const Complex rj = r(j, j);
    if (std::abs(rj) > 0.0) q.col(j) *= rj / std::abs(rj);
  }
  return q;
}

}  // namespace

std::optional<Conjugation> hyperinvariance_falsifier(const CMatrix& n,
                                                     const std::vector<CVector>& m_basis,
                                                     int trials, const Tolerances& tol,
                                                     uint64_t seed) {
  tol.validate();
  const SpectralDecomp sd = decompose(n, tol);
  const OrthonormalBasis q = qr_orthonormalize(m_basis, tol);
  if (q.basis.empty()) return std::nullopt;
  const Eigen::Index d = n.rows();
  CMatrix pm = CMatrix::Zero(d, d);
  for (const auto& b : q.basis) pm += b * b.adjoint();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int t = 0; t < trials; ++t) {
    CVector x = CVector::Zero(d);
    for (const auto& b : q.basis) x += Complex(gauss(rng), gauss(rng)) * b;
    if (x.norm() <= tol.rank) continue;
    x /= x.norm();

    CVector y = CVector::Zero(d);
    for (size_t a = 0; a < sd.atoms.size(); ++a) {
      const CMatrix v = sd.basis_matrix(a);
      const CMatrix r = haar_unitary(v.cols(), rng);
      y += v * (r * (v.adjoint() * x));
    }

    InterpolationProblem p;
    p.operators = {n};
    p.xs = {x};
    p.ys = {y};
    p.mode = Mode::symmetric;
    p.tol = tol;
    Certificate cert = construct_symmetric(p);
    if (!cert.feasible || !cert.conjugation) continue;

    double escape = 0.0;
    for (const auto& b : q.basis) {
      const CVector img = conjint::apply(*cert.conjugation, b);
      escape = std::max(escape, (img - pm * img).norm());
    }
    if (escape > 1e3 * tol.residual) return cert.conjugation;
  }
  return std::nullopt;
}

PartialIsometryWitness partial_isometry_witness(const Certificate& c,
                                                const InterpolationProblem& p) {
  if (!c.feasible || !c.conjugation)
    throw InvariantError("partial_isometry_witness: certificate not feasible");
  const Eigen::Index d = p.dimension();
  std::vector<CVector> xn, yn;
  {
    std::vector<FeasibilityViolation> dummy;
    normalize_pairs(p, xn, yn, dummy);
  }
  const JointSpectralDecomp jd = joint_decompose(p.operators, d, p.tol);
  std::vector<CVector> seeds = xn;
  seeds.insert(seeds.end(), yn.begin(), yn.end());
  std::vector<CVector> basis_l = orbit_subspace(jd, seeds, p.tol);
  CMatrix pl = CMatrix::Zero(d, d);
  for (const auto& b : basis_l) pl += b * b.adjoint();
  PartialIsometryWitness w;
  w.v = AntilinearMap{c.conjugation->s * pl.conjugate()};
  w.domain_basis = std::move(basis_l);
  return w;
}

}  // namespace conjint
