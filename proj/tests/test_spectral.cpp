#include "doctest.h"

#include <cmath>

#include "conjint/spectral.hpp"
#include "test_helpers.hpp"

using namespace conjint;
using conjint::testing::Rng;

namespace {

CMatrix diag3(Complex a, Complex b, Complex c) {
  CVector d(3);
  d << a, b, c;
  return d.asDiagonal();
}

CMatrix diag2(Complex a, Complex b) {
  CVector d(2);
  d << a, b;
  return d.asDiagonal();
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("check_normal values") {
  CHECK(check_normal(diag2(1, Complex(0, 1))) == doctest::Approx(0.0));
  CMatrix nil(2, 2);
  nil << 0, 1, 0, 0;
  CHECK(check_normal(nil) == doctest::Approx(std::sqrt(2.0)));  // direct 2x2 computation
  Rng rng(3);
  CHECK(check_normal(conjint::testing::random_unitary(4, rng)) < 1e-13);
}

TEST_CASE("decompose groups repeated eigenvalues") {
  Tolerances tol;
  const auto d = decompose(diag3(1, 1, 2), tol);
  REQUIRE(d.atoms.size() == 2);
  CHECK(std::abs(d.atoms[0].eigenvalue - Complex(1, 0)) < 1e-12);
  CHECK(d.atoms[0].dim() == 2);
  CHECK(std::abs(d.atoms[1].eigenvalue - Complex(2, 0)) < 1e-12);
  CHECK(d.atoms[1].dim() == 1);
}

TEST_CASE("decompose merges eigenvalues within the cluster tolerance") {
  Tolerances tol;
  const auto d = decompose(diag2(1.0, 1.0 + tol.cluster / 10.0), tol);
  REQUIRE(d.atoms.size() == 1);
  CHECK(d.atoms[0].dim() == 2);
}

TEST_CASE("decompose splits a rotation into its complex eigenvalues") {
  // 2x2 eigenproblem by hand: eigenvalues are i and -i
  Tolerances tol;
  CMatrix rot(2, 2);
  rot << 0, -1, 1, 0;
  const auto d = decompose(rot, tol);
  REQUIRE(d.atoms.size() == 2);
  CHECK(std::abs(d.atoms[0].eigenvalue - Complex(0, -1)) < 1e-12);
  CHECK(std::abs(d.atoms[1].eigenvalue - Complex(0, 1)) < 1e-12);
}

TEST_CASE("decompose rejects non-normal input") {
  Tolerances tol;
  CMatrix nil(2, 2);
  nil << 0, 1, 0, 0;
  CHECK_THROWS_AS(decompose(nil, tol), InvariantError);
}

TEST_CASE("decompose invariants on random normal matrices") {
  Tolerances tol;
  Rng rng(19);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index dim = 3 + trial % 6;
    const CMatrix u = conjint::testing::random_unitary(dim, rng);
    CVector ev(dim);
    std::uniform_int_distribution<int> pick(0, 3);
    for (Eigen::Index i = 0; i < dim; ++i) ev(i) = Complex(pick(rng), pick(rng) - 1);
    const CMatrix n = u * ev.asDiagonal() * u.adjoint();
    const auto d = decompose(n, tol);

    CMatrix sum = CMatrix::Zero(dim, dim);
    int total = 0;
    for (size_t a = 0; a < d.atoms.size(); ++a) {
      const CMatrix p = d.atom_projection(a);
      sum += p;
      total += d.atoms[a].dim();
      CHECK((n * p - d.atoms[a].eigenvalue * p).norm() < 1e-9 * (1 + n.norm()));
      CHECK((p * p - p).norm() < 1e-11);
      CHECK((p - p.adjoint()).norm() < 1e-11);
    }
    CHECK(total == dim);
    CHECK((sum - CMatrix::Identity(dim, dim)).norm() < 1e-10 * static_cast<double>(dim));
    for (size_t a = 0; a < d.atoms.size(); ++a)
      for (size_t b = 0; b < a; ++b)
        CHECK(std::abs(d.atoms[a].eigenvalue - d.atoms[b].eigenvalue) > tol.cluster);
  }
}

TEST_CASE("joint_decompose refines sequentially") {
  Tolerances tol;
  const auto jd = joint_decompose({diag3(1, 1, 2), diag3(3, 4, 5)}, tol);
  REQUIRE(jd.atoms.size() == 3);
  CHECK(jd.atoms[0].dim() == 1);
  CHECK(std::abs(jd.atoms[0].tuple[0] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(jd.atoms[0].tuple[1] - Complex(3, 0)) < 1e-12);
  CHECK(std::abs(jd.atoms[1].tuple[0] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(jd.atoms[1].tuple[1] - Complex(4, 0)) < 1e-12);
  CHECK(std::abs(jd.atoms[2].tuple[0] - Complex(2, 0)) < 1e-12);
  CHECK(std::abs(jd.atoms[2].tuple[1] - Complex(5, 0)) < 1e-12);
}

TEST_CASE("joint_decompose of the identity is a single atom") {
  Tolerances tol;
  const auto jd = joint_decompose({CMatrix::Identity(4, 4)}, tol);
  REQUIRE(jd.atoms.size() == 1);
  CHECK(jd.atoms[0].dim() == 4);
}

TEST_CASE("joint tuples respect the functional calculus") {
  Tolerances tol;
  Rng rng(29);
  for (int trial = 0; trial < 15; ++trial) {
    const Eigen::Index dim = 3 + trial % 5;
    const CMatrix u = conjint::testing::random_unitary(dim, rng);
    CVector ev(dim);
    std::uniform_int_distribution<int> pick(0, 2);
    for (Eigen::Index i = 0; i < dim; ++i) ev(i) = Complex(pick(rng), pick(rng));
    const CMatrix n = u * ev.asDiagonal() * u.adjoint();
    const auto jd = joint_decompose({n, n * n}, tol);
    for (const auto& atom : jd.atoms)
      CHECK(std::abs(atom.tuple[1] - atom.tuple[0] * atom.tuple[0]) < 1e-8);
  }
}

TEST_CASE("joint_decompose rejects non-commuting families") {
  Tolerances tol;
  CMatrix a(2, 2), b(2, 2);
  a << 1, 0, 0, -1;
  b << 0, 1, 1, 0;
  CHECK_THROWS_AS(joint_decompose({a, b}, tol), InvariantError);
}

TEST_CASE("projection selects atoms") {
  Tolerances tol;
  const auto d = decompose(diag2(1, 2), tol);
  CHECK((projection(d, BorelSelector::all(d.atoms.size())) - CMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(projection(d, BorelSelector{}).norm() == 0.0);
  CHECK((projection(d, BorelSelector{{0}}) - diag2(1, 0)).norm() < 1e-12);
  CHECK_THROWS_AS(projection(d, BorelSelector{{5}}), InvariantError);
}

TEST_CASE("projections multiply like set intersection") {
  Tolerances tol;
  Rng rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    const Eigen::Index dim = 4 + trial % 4;
    const CMatrix u = conjint::testing::random_unitary(dim, rng);
    CVector ev(dim);
    std::uniform_int_distribution<int> pick(0, 2);
    for (Eigen::Index i = 0; i < dim; ++i) ev(i) = Complex(pick(rng), 0);
    const auto d = decompose(u * ev.asDiagonal() * u.adjoint(), tol);
    const int na = static_cast<int>(d.atoms.size());
    std::uniform_int_distribution<int> mask(0, (1 << na) - 1);
    const int m1 = mask(rng);
    const int m2 = mask(rng);
    BorelSelector s1, s2, s12;
    for (int a = 0; a < na; ++a) {
      if (m1 & (1 << a)) s1.indices.push_back(a);
      if (m2 & (1 << a)) s2.indices.push_back(a);
      if ((m1 & m2) & (1 << a)) s12.indices.push_back(a);
    }
    CHECK((projection(d, s1) * projection(d, s2) - projection(d, s12)).norm() < 1e-10);
  }
}

TEST_CASE("joint projections multiply like set intersection") {
  Tolerances tol;
  Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const auto fam = conjint::testing::make_commuting_family(6, 4, 2, 3, rng);
    const auto jd = joint_decompose(fam.ops, tol);
    const int na = static_cast<int>(jd.atoms.size());
    std::uniform_int_distribution<int> mask(0, (1 << na) - 1);
    const int m1 = mask(rng);
    const int m2 = mask(rng);
    BorelSelector s1, s2, s12;
    for (int a = 0; a < na; ++a) {
      if (m1 & (1 << a)) s1.indices.push_back(a);
      if (m2 & (1 << a)) s2.indices.push_back(a);
      if ((m1 & m2) & (1 << a)) s12.indices.push_back(a);
    }
    CHECK((projection(jd, s1) * projection(jd, s2) - projection(jd, s12)).norm() < 1e-10);
    CHECK((projection(jd, BorelSelector::all(jd.atoms.size())) - CMatrix::Identity(6, 6)).norm() <
          1e-10);
  }
}

TEST_CASE("orbit_subspace of an eigenvector stays put") {
  Tolerances tol;
  const auto jd = joint_decompose({diag2(1, 2)}, tol);
  const auto basis = orbit_subspace(jd, {CVector::Unit(2, 0)}, tol);
  REQUIRE(basis.size() == 1);
  CHECK((basis[0] - CVector::Unit(2, 0)).norm() < 1e-14);
}

TEST_CASE("orbit_subspace of a mixed seed fills the space") {
  Tolerances tol;
  const auto jd = joint_decompose({diag2(1, 2)}, tol);
  CVector seed(2);
  seed << 1, 1;
  seed /= seed.norm();
  CHECK(orbit_subspace(jd, {seed}, tol).size() == 2);
}

TEST_CASE("orbit_subspace under the identity is the seed span") {
  Tolerances tol;
  Rng rng(37);
  const auto jd = joint_decompose({CMatrix::Identity(4, 4)}, tol);
  const CVector x = conjint::testing::random_vector(4, rng);
  const auto basis = orbit_subspace(jd, {x}, tol);
  REQUIRE(basis.size() == 1);
  CHECK(std::abs(std::abs(inner(basis[0], x / x.norm())) - 1.0) < 1e-12);
}

TEST_CASE("orbit_subspace reduces every family member") {
  Tolerances tol;
  Rng rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    const auto fam = conjint::testing::make_commuting_family(6, 3, 2, 3, rng);
    const auto jd = joint_decompose(fam.ops, tol);
    std::vector<CVector> seeds;
    for (int s = 0; s < 2; ++s) seeds.push_back(conjint::testing::random_vector(6, rng));
    const auto basis = orbit_subspace(jd, seeds, tol);
    CMatrix pl = CMatrix::Zero(6, 6);
    for (const auto& b : basis) pl += b * b.adjoint();
    for (const auto& nk : fam.ops) {
      CHECK(((CMatrix::Identity(6, 6) - pl) * nk * pl).norm() < 1e-9 * (1 + nk.norm()));
      CHECK(((CMatrix::Identity(6, 6) - pl) * nk.adjoint() * pl).norm() < 1e-9 * (1 + nk.norm()));
    }
  }
}

TEST_CASE("orbit_subspace rejects zero seeds") {
  Tolerances tol;
  const auto jd = joint_decompose({CMatrix::Identity(2, 2)}, tol);
  CHECK_THROWS_AS(orbit_subspace(jd, {CVector::Zero(2)}, tol), InvariantError);
}

TEST_CASE("multiplicity_map reads atom dimensions") {
  Tolerances tol;
  const auto m1 = multiplicity_map(decompose(diag3(1, 1, 2), tol));
  REQUIRE(m1.size() == 2);
  CHECK(m1[0].second == 2);
  CHECK(m1[1].second == 1);
  const auto m2 = multiplicity_map(decompose(CMatrix::Identity(4, 4), tol));
  REQUIRE(m2.size() == 1);
  CHECK(m2[0].second == 4);
  const auto m3 = multiplicity_map(decompose(diag2(1, -1), tol));
  CHECK(m3.size() == 2);
}

TEST_CASE("is_skew_symmetric_normal on the paired two-by-two") {
  Tolerances tol;
  const auto r = is_skew_symmetric_normal(diag2(1, -1), tol);
  REQUIRE(r.skew_symmetric);
  CMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK((r.witness->s - swap).norm() < 1e-12);
  CHECK(relation_residuals(*r.witness, diag2(1, -1), tol).skew < 1e-12);
}

TEST_CASE("is_skew_symmetric_normal detects multiplicity mismatch") {
  Tolerances tol;
  const auto r = is_skew_symmetric_normal(diag3(1, -1, -1), tol);
  REQUIRE_FALSE(r.skew_symmetric);
  REQUIRE(r.violation.has_value());
  CHECK(r.violation->multiplicity != r.violation->negated_multiplicity);
}

TEST_CASE("the zero matrix is skew-symmetric through its kernel") {
  Tolerances tol;
  const auto r = is_skew_symmetric_normal(CMatrix::Zero(3, 3), tol);
  REQUIRE(r.skew_symmetric);
  CHECK(relation_residuals(*r.witness, CMatrix::Zero(3, 3), tol).skew < 1e-12);
}

TEST_CASE("skew decision is symmetric under negation and direct sums") {
  Tolerances tol;
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> pick(0, 2);
    std::vector<std::pair<Complex, int>> mults;
    for (int v = 0; v < 3; ++v) {
      const int m = pick(rng);
      if (m > 0) mults.push_back({Complex(v - 1, pick(rng) - 1), m});
    }
    if (mults.empty()) mults.push_back({Complex(1, 0), 1});
    const CMatrix n = conjint::testing::normal_with_spectrum(mults, rng);
    const auto rn = is_skew_symmetric_normal(n, tol);
    const auto rneg = is_skew_symmetric_normal(CMatrix(-n), tol);
    CHECK(rn.skew_symmetric == rneg.skew_symmetric);

    // direct sum with a planted skew-symmetric block preserves the decision
    conjint::testing::PlantedInstance skew = conjint::testing::planted_skew_instance(2, 1, 1, rng);
    const CMatrix& ns = skew.problem.operators.front();
    CMatrix sum = CMatrix::Zero(n.rows() + ns.rows(), n.cols() + ns.cols());
    sum.topLeftCorner(ns.rows(), ns.cols()) = ns;
    sum.bottomRightCorner(n.rows(), n.cols()) = n;
    const auto rsum = is_skew_symmetric_normal(sum, tol);
    CHECK(rsum.skew_symmetric == rn.skew_symmetric);
  }
}

TEST_CASE("skew witnesses satisfy the defining relation") {
  Tolerances tol;
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = conjint::testing::planted_skew_instance(1 + trial % 3, trial % 2, 1, rng);
    const CMatrix& n = inst.problem.operators.front();
    const auto r = is_skew_symmetric_normal(n, tol);
    REQUIRE(r.skew_symmetric);
    CHECK(verify_conjugation(*r.witness, tol).pass);
    CHECK(relation_residuals(*r.witness, n, tol).skew < 1e-9 * (1 + n.norm()));
  }
}

TEST_CASE("normal_part of a nilpotent block is empty") {
  Tolerances tol;
  CMatrix nil(2, 2);
  nil << 0, 1, 0, 0;
  CHECK(normal_part(nil, tol).empty());
}

TEST_CASE("normal_part of a normal matrix is everything") {
  Tolerances tol;
  Rng rng(53);
  const CMatrix u = conjint::testing::random_unitary(4, rng);
  CVector ev(4);
  ev << Complex(1, 1), Complex(2, 0), Complex(2, 0), Complex(0, -1);
  const CMatrix n = u * ev.asDiagonal() * u.adjoint();
  CHECK(normal_part(n, tol).size() == 4);
}

TEST_CASE("normal_part of a block sum finds the normal summand") {
  Tolerances tol;
  CMatrix t = CMatrix::Zero(4, 4);
  t(0, 0) = Complex(1, 2);
  t(1, 1) = Complex(3, 0);
  t(2, 3) = 1.0;  // nilpotent corner
  const auto basis = normal_part(t, tol);
  REQUIRE(basis.size() == 2);
  CMatrix p = CMatrix::Zero(4, 4);
  for (const auto& b : basis) p += b * b.adjoint();
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 1;
  expected(1, 1) = 1;
  CHECK((p - expected).norm() < 1e-9);
  // the found span reduces t and the restriction is normal
  const CMatrix w = stack_columns(basis, 4);
  CHECK(check_normal(w.adjoint() * t * w) < 1e-10);
}

TEST_CASE("intertwiners carry spectral projections across") {
  Tolerances tol;
  Rng rng(59);
  for (int variant = 0; variant < 4; ++variant) {
    const bool antilinear = variant % 2 == 1;
    const bool flip = variant / 2 == 1;
    for (int trial = 0; trial < 12; ++trial) {
      const auto tr = conjint::testing::make_intertwined(4 + trial % 3, antilinear, flip, rng);
      // construction guarantee
      const CMatrix lhs = antilinear ? CMatrix(tr.t * tr.n.conjugate()) : CMatrix(tr.t * tr.n);
      const CMatrix rhs = antilinear ? CMatrix((flip ? -1.0 : 1.0) * tr.m.adjoint() * tr.t)
                                     : CMatrix((flip ? -1.0 : 1.0) * tr.m * tr.t);
      REQUIRE((lhs - rhs).norm() < 1e-11 * (1 + tr.t.norm()));

      const auto dn = decompose(tr.n, tol);
      const auto dm = decompose(tr.m, tol);
      for (size_t a = 0; a < dn.atoms.size(); ++a) {
        const Complex target = flip ? -dn.atoms[a].eigenvalue : dn.atoms[a].eigenvalue;
        CMatrix pm = CMatrix::Zero(tr.m.rows(), tr.m.cols());
        for (size_t b = 0; b < dm.atoms.size(); ++b)
          if (std::abs(dm.atoms[b].eigenvalue - target) <= tol.cluster)
            pm += dm.atom_projection(b);
        const CMatrix pn = dn.atom_projection(a);
        const CMatrix left = antilinear ? CMatrix(tr.t * pn.conjugate()) : CMatrix(tr.t * pn);
        CHECK((left - pm * tr.t).norm() < 1e-8 * (1 + tr.t.norm()));
      }
    }
  }
}

}  // TEST_SUITE
