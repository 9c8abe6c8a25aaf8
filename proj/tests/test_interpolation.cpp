#include "doctest.h"

#include <cmath>

#include "conjint/interpolation.hpp"
#include "test_helpers.hpp"

using namespace conjint;
using conjint::testing::Rng;

namespace {

CMatrix diag(std::initializer_list<Complex> vals) {
  CVector d(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (const Complex v : vals) d(i++) = v;
  return d.asDiagonal();
}

CVector unit(Eigen::Index d, Eigen::Index i) { return CVector::Unit(d, i); }

InterpolationProblem make_problem(std::vector<CMatrix> ops, std::vector<CVector> xs,
                                  std::vector<CVector> ys, Mode mode) {
  InterpolationProblem p;
  p.operators = std::move(ops);
  p.xs = std::move(xs);
  p.ys = std::move(ys);
  p.mode = mode;
  return p;
}

const CVector kX = [] {
  CVector x(3);
  x << 0.6, 0.0, 0.8;
  return x;
}();
const CVector kY = [] {
  CVector y(3);
  y << 0.0, 0.6, 0.8;
  return y;
}();

bool certificate_ok(const InterpolationProblem& p, const Certificate& c, double bound) {
  if (!c.feasible || !c.conjugation) return false;
  if (!verify_conjugation(*c.conjugation, p.tol).pass) return false;
  for (const auto& [k, v] : recompute_residuals(p, *c.conjugation))
    if (v > bound) return false;
  return true;
}

}  // namespace

TEST_SUITE("interpolation") {

TEST_CASE("feasibility_symmetric over the identity reduces to the Gram test") {
  Rng rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index d = 3 + trial % 5;
    const int k = 1 + trial % 3;
    const auto xs = conjint::testing::random_orthonormal_set(d, k, rng);
    const auto ys = conjint::testing::random_orthonormal_set(d, k, rng);
    auto p = make_problem({CMatrix::Identity(d, d)}, xs, ys, Mode::symmetric);
    bool gram = true;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (std::abs(inner(xs[static_cast<size_t>(i)], ys[static_cast<size_t>(j)]) -
                     inner(xs[static_cast<size_t>(j)], ys[static_cast<size_t>(i)])) > 1e-9)
          gram = false;
    CHECK(feasibility_symmetric(p).feasible == gram);
  }
}

TEST_CASE("feasibility_symmetric separates eigenvectors of distinct atoms") {
  auto p = make_problem({diag({1, 2})}, {unit(2, 0)}, {unit(2, 1)}, Mode::symmetric);
  const auto f = feasibility_symmetric(p);
  REQUIRE_FALSE(f.feasible);
  REQUIRE_FALSE(f.violations.empty());
  CHECK(f.violations.front().kind == "atom_xx");
  CHECK(f.violations.front().atom == 0);
}

TEST_CASE("feasibility_symmetric accepts the split-weights instance") {
  // per-atom inner products by hand: 9/25 on the first atom, 16/25 on the second
  auto p = make_problem({diag({1, 1, 2})}, {kX}, {kY}, Mode::symmetric);
  CHECK(feasibility_symmetric(p).feasible);
}

TEST_CASE("construct_symmetric over the identity produces a swap certificate") {
  auto p = make_problem({CMatrix::Identity(2, 2)}, {unit(2, 0)}, {unit(2, 1)}, Mode::symmetric);
  const auto c = construct_symmetric(p);
  REQUIRE(c.feasible);
  CMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK((c.conjugation->s - swap).norm() < 1e-12);
  for (const auto& [k, v] : c.residuals) CHECK(v < 1e-12);
}

TEST_CASE("construct_symmetric on the split-weights instance") {
  auto p = make_problem({diag({1, 1, 2})}, {kX}, {kY}, Mode::symmetric);
  CHECK(certificate_ok(p, construct_symmetric(p), 1e-9));
}

TEST_CASE("construct_symmetric returns the violation list when infeasible") {
  auto p = make_problem({diag({1, 2})}, {unit(2, 0)}, {unit(2, 1)}, Mode::symmetric);
  const auto c = construct_symmetric(p);
  CHECK_FALSE(c.feasible);
  CHECK_FALSE(c.violations.empty());
  CHECK_FALSE(c.conjugation.has_value());
}

TEST_CASE("construct_symmetric handles the empty index set") {
  auto p = make_problem({diag({1, Complex(0, 1), 2})}, {}, {}, Mode::symmetric);
  const auto c = construct_symmetric(p);
  REQUIRE(c.feasible);
  CHECK(relation_residuals(*c.conjugation, p.operators.front(), p.tol).sym < 1e-10);
}

TEST_CASE("planted symmetric instances verify end to end") {
  Rng rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = conjint::testing::planted_symmetric_instance(4 + trial % 5, 1 + trial % 3,
                                                             1 + trial % 2, 3, rng);
    const auto c = construct_symmetric(inst.problem);
    CHECK(certificate_ok(inst.problem, c, 1e-9));
  }
}

TEST_CASE("feasibility_single equals the symmetric singleton conditions") {
  Rng rng(71);
  for (int trial = 0; trial < 25; ++trial) {
    const auto fam = conjint::testing::make_commuting_family(5, 3, 2, 3, rng);
    CVector x = conjint::testing::random_vector(5, rng);
    CVector y = conjint::testing::random_vector(5, rng);
    x /= x.norm();
    y /= y.norm();
    if (trial % 2 == 0) {
      // make it feasible through a commuting unitary rotation
      const auto jd = joint_decompose(fam.ops, Tolerances{});
      y = CVector::Zero(5);
      for (size_t a = 0; a < jd.atoms.size(); ++a) {
        const CMatrix v = jd.basis_matrix(a);
        y += v * (conjint::testing::random_unitary(v.cols(), rng) * (v.adjoint() * x));
      }
    }
    Tolerances tol;
    const bool single = feasibility_single(fam.ops, x, y, tol).feasible;
    auto p = make_problem(fam.ops, {x}, {y}, Mode::symmetric);
    CHECK(single == feasibility_symmetric(p).feasible);
  }
}

TEST_CASE("feasibility_single examples") {
  Tolerances tol;
  Rng rng(73);
  const CVector x = conjint::testing::random_vector(3, rng);
  CHECK(feasibility_single({diag({1, 2, 3})}, x, x, tol).feasible);
  CVector mix(2);
  mix << 1, 1;
  mix /= std::sqrt(2.0);
  CHECK_FALSE(feasibility_single({diag({1, 2})}, unit(2, 0), mix, tol).feasible);
  CHECK(feasibility_single({diag({1, 1, 2})}, kX, kY, tol).feasible);
  CHECK_THROWS_AS(feasibility_single({diag({1, 2})}, CVector::Zero(2), unit(2, 0), tol),
                  InvariantError);
}

TEST_CASE("unitary_commutant_witness maps x to y inside the commutant") {
  Tolerances tol;
  SUBCASE("x equals y") {
    Rng rng(79);
    const CVector x = conjint::testing::random_vector(4, rng);
    const CMatrix u = unitary_commutant_witness({diag({1, 2, 2, 3})}, x, x, tol);
    CHECK((u * x - x).norm() < 1e-10);
  }
  SUBCASE("identity operator") {
    const CMatrix u = unitary_commutant_witness({CMatrix::Identity(2, 2)}, unit(2, 0), unit(2, 1), tol);
    CHECK((u * unit(2, 0) - unit(2, 1)).norm() < 1e-12);
    CHECK((u * u.adjoint() - CMatrix::Identity(2, 2)).norm() < 1e-12);
  }
  SUBCASE("split-weights instance") {
    const CMatrix n = diag({1, 1, 2});
    const CMatrix u = unitary_commutant_witness({n}, kX, kY, tol);
    CHECK((u * kX - kY).norm() < 1e-11);
    CHECK((u * n - n * u).norm() < 1e-11);
    CHECK((u * u.adjoint() - CMatrix::Identity(3, 3)).norm() < 1e-11);
  }
  SUBCASE("infeasible input is rejected") {
    CVector mix(2);
    mix << 1, 1;
    mix /= std::sqrt(2.0);
    CHECK_THROWS_AS(unitary_commutant_witness({diag({1, 2})}, unit(2, 0), mix, tol),
                    InvariantError);
  }
}

TEST_CASE("feasibility_skew accepts the paired eigenvector instance") {
  auto p = make_problem({diag({1, -1})}, {unit(2, 0)}, {unit(2, 1)}, Mode::skew);
  CHECK(feasibility_skew(p).feasible);
}

TEST_CASE("feasibility_skew rejects when the orbit complement is not skew") {
  // restriction to the complement is the 1x1 block [1]: multiplicities 1 vs 0
  auto p = make_problem({diag({1, 1, -1})}, {unit(3, 0)}, {unit(3, 2)}, Mode::skew);
  const auto f = feasibility_skew(p);
  REQUIRE_FALSE(f.feasible);
  REQUIRE(f.violations.size() == 1);
  CHECK(f.violations.front().kind == "complement_not_skew");
  CHECK(f.violations.front().i == 1);
  CHECK(f.violations.front().j == 0);
}

TEST_CASE("feasibility_skew for the zero operator reduces to the Gram test") {
  Rng rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 3 + trial % 4;
    const auto xs = conjint::testing::random_orthonormal_set(d, 2, rng);
    const auto ys = conjint::testing::random_orthonormal_set(d, 2, rng);
    auto p = make_problem({CMatrix::Zero(d, d)}, xs, ys, Mode::skew);
    const auto zl = zhu_li_interpolate(xs, ys, p.tol);
    CHECK(feasibility_skew(p).feasible == zl.feasible);
  }
}

TEST_CASE("construct_skew on the paired two-by-two gives the swap factor") {
  auto p = make_problem({diag({1, -1})}, {unit(2, 0)}, {unit(2, 1)}, Mode::skew);
  const auto c = construct_skew(p);
  REQUIRE(c.feasible);
  CMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK((c.conjugation->s - swap).norm() < 1e-12);
  CHECK(relation_residuals(*c.conjugation, p.operators.front(), p.tol).skew < 1e-12);
}

TEST_CASE("construct_skew for the zero operator matches plain interpolation") {
  auto p = make_problem({CMatrix::Zero(2, 2)}, {unit(2, 0)}, {unit(2, 1)}, Mode::skew);
  const auto c = construct_skew(p);
  REQUIRE(c.feasible);
  CHECK((conjint::apply(*c.conjugation, unit(2, 0)) - unit(2, 1)).norm() < 1e-11);
}

TEST_CASE("planted skew instances verify end to end") {
  Rng rng(89);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = conjint::testing::planted_skew_instance(1 + trial % 3, trial % 3, 1 + trial % 2, rng);
    const auto c = construct_skew(inst.problem);
    CHECK(certificate_ok(inst.problem, c, 1e-9));
    if (c.feasible && c.conjugation)
      CHECK(relation_residuals(*c.conjugation, inst.problem.operators.front(), inst.problem.tol)
                .skew < 1e-9);
    // when the operator itself is skew-symmetric and the atom conditions hold,
    // the orbit-complement restriction can never be the blocker
    const auto f = feasibility_skew(inst.problem);
    REQUIRE(f.feasible);
    for (const auto& v : f.violations) CHECK(v.kind != "complement_not_skew");
  }
}

TEST_CASE("feasibility_skew rejects y-mass on an atom with no negated partner") {
  // the norm match plus the paired atom conditions force every unpaired atom
  // to carry no mass on either side
  auto p = make_problem({diag({1, -1, 2})}, {unit(3, 0)}, {}, Mode::skew);
  CVector y(3);
  y << 0.0, std::sqrt(3.0) / 2.0, 0.5;  // unit norm, mass 1/4 on the unpaired atom
  p.ys = {y};
  const auto f = feasibility_skew(p);
  REQUIRE_FALSE(f.feasible);
  bool atom_violation = false;
  for (const auto& v : f.violations) atom_violation |= v.kind == "atom_xx";
  CHECK(atom_violation);

  // even with the mass moved back, the unpaired atom leaves the orbit
  // complement non-skew, so the instance stays infeasible
  p.ys = {unit(3, 1)};
  const auto f2 = feasibility_skew(p);
  REQUIRE_FALSE(f2.feasible);
  CHECK(f2.violations.front().kind == "complement_not_skew");

  // replacing the unpaired eigenvalue by a kernel atom makes it feasible
  auto ok = make_problem({diag({1, -1, 0})}, {unit(3, 0)}, {unit(3, 1)}, Mode::skew);
  CHECK(feasibility_skew(ok).feasible);
}

TEST_CASE("skew mode with an empty index set decides plain skew-symmetry") {
  Tolerances tol;
  auto yes = make_problem({diag({1, -1, 0})}, {}, {}, Mode::skew);
  CHECK(feasibility_skew(yes).feasible);
  const auto c = construct_skew(yes);
  REQUIRE(c.feasible);
  CHECK(relation_residuals(*c.conjugation, yes.operators.front(), tol).skew < 1e-10);

  auto no = make_problem({diag({1, -1, -1})}, {}, {}, Mode::skew);
  const auto f = feasibility_skew(no);
  REQUIRE_FALSE(f.feasible);
  CHECK(f.violations.front().kind == "complement_not_skew");
}

TEST_CASE("per-atom feasibility agrees with the brute-force selector oracle") {
  Tolerances tol;
  Rng rng(97);
  int feasible_seen = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index d = 4 + trial % 3;
    const auto fam = conjint::testing::make_commuting_family(d, 2 + trial % 3, 1 + trial % 2, 3, rng);
    std::vector<CVector> xs, ys;
    if (trial % 2 == 0) {
      auto inst = conjint::testing::planted_symmetric_instance(d, 1, 1, 3, rng);
      xs = inst.problem.xs;
      ys = inst.problem.ys;
      auto p = make_problem(inst.problem.operators, xs, ys, Mode::symmetric);
      const bool mine = feasibility_symmetric(p).feasible;
      const bool oracle =
          conjint::testing::oracle_feasible_symmetric(inst.problem.operators, xs, ys, 1e-8, tol);
      CHECK(mine == oracle);
      if (mine) ++feasible_seen;
    } else {
      xs = conjint::testing::random_orthonormal_set(d, 2, rng);
      ys = conjint::testing::random_orthonormal_set(d, 2, rng);
      auto p = make_problem(fam.ops, xs, ys, Mode::symmetric);
      const bool mine = feasibility_symmetric(p).feasible;
      const bool oracle = conjint::testing::oracle_feasible_symmetric(fam.ops, xs, ys, 1e-8, tol);
      CHECK(mine == oracle);
    }
  }
  CHECK(feasible_seen > 0);
}

TEST_CASE("perturbation residuals stay flat across sampled couplings") {
  Rng rng(101);
  SUBCASE("symmetric") {
    auto inst = conjint::testing::planted_symmetric_instance(5, 2, 1, 3, rng);
    const auto c = construct_symmetric(inst.problem);
    REQUIRE(c.feasible);
    const auto rep = perturbation_suite(c, inst.problem,
                                        {Complex(0, 0), Complex(1, 0), Complex(0, 1), Complex(1, 2),
                                         Complex(-3, 0)});
    CHECK(rep.max_residual < 1e-9);
    CHECK(rep.pass);
  }
  SUBCASE("skew") {
    auto p = make_problem({diag({1, -1})}, {unit(2, 0)}, {unit(2, 1)}, Mode::skew);
    const auto c = construct_skew(p);
    REQUIRE(c.feasible);
    const auto rep = perturbation_suite(c, p, {Complex(0, 0), Complex(0, 1), Complex(2, -1)});
    CHECK(rep.max_residual < 1e-10);
  }
  SUBCASE("skew rejects collinear pairs") {
    auto p = make_problem({CMatrix::Zero(2, 2)}, {unit(2, 0)}, {unit(2, 0)}, Mode::skew);
    const auto c = construct_skew(p);
    REQUIRE(c.feasible);
    CHECK_THROWS_AS(perturbation_suite(c, p, {Complex(1, 0)}), InvariantError);
  }
}

TEST_CASE("self pairs always interpolate on normal matrices") {
  Rng rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 3 + trial % 4;
    const CMatrix u = conjint::testing::random_unitary(d, rng);
    CVector ev(d);
    std::uniform_int_distribution<int> pick(0, 2);
    for (Eigen::Index i = 0; i < d; ++i) ev(i) = Complex(pick(rng), pick(rng));
    const CMatrix n = u * ev.asDiagonal() * u.adjoint();
    CVector x = conjint::testing::random_vector(d, rng);
    x /= x.norm();
    auto p = make_problem({n}, {x}, {x}, Mode::symmetric);
    const auto c = construct_symmetric(p);
    REQUIRE(c.feasible);
    const auto rr = relation_residuals(*c.conjugation, n, p.tol);
    CHECK(rr.sym < 1e-9 * (1 + n.norm()));
    CHECK(rr.cnormal < 1e-9 * (1 + n.norm() * n.norm()));
    CHECK((conjint::apply(*c.conjugation, x) - x).norm() < 1e-10);
  }
}

TEST_CASE("partial isometry witness acts on the orbit subspace") {
  Rng rng(107);
  for (int trial = 0; trial < 12; ++trial) {
    auto inst = conjint::testing::planted_symmetric_instance(5, 1, 2, 3, rng);
    const auto c = construct_symmetric(inst.problem);
    REQUIRE(c.feasible);
    const auto w = partial_isometry_witness(c, inst.problem);
    const Eigen::Index d = inst.problem.dimension();
    CMatrix pl = CMatrix::Zero(d, d);
    for (const auto& b : w.domain_basis) pl += b * b.adjoint();

    for (const auto& b : w.domain_basis) {
      CHECK(std::abs(conjint::apply(w.v, b).norm() - 1.0) < 1e-9);
    }
    const CVector outside = conjint::testing::random_vector(d, rng);
    CHECK(conjint::apply(w.v, CVector((CMatrix::Identity(d, d) - pl) * outside)).norm() < 1e-9);
    for (size_t i = 0; i < inst.problem.xs.size(); ++i) {
      CHECK((conjint::apply(w.v, inst.problem.xs[i]) - inst.problem.ys[i]).norm() < 1e-9);
      CHECK((conjint::apply(w.v, inst.problem.ys[i]) - inst.problem.xs[i]).norm() < 1e-9);
    }
    // V N = N^* V on the matrix level for the antilinear witness
    const CMatrix& n = inst.problem.operators.front();
    CHECK((w.v.m * n.conjugate() - n.adjoint() * w.v.m).norm() < 1e-8 * (1 + n.norm()));
  }
}

TEST_CASE("hyperinvariance matches the spectral-subspace characterization") {
  Tolerances tol;
  const CMatrix n = diag({1, 1, 2});
  CHECK(is_hyperinvariant(n, {unit(3, 2)}, tol));
  CHECK_FALSE(is_hyperinvariant(n, {unit(3, 0)}, tol));
  CHECK(is_hyperinvariant(n, {}, tol));
  CHECK(is_hyperinvariant(n, {unit(3, 0), unit(3, 1), unit(3, 2)}, tol));
  CHECK(is_hyperinvariant(n, {unit(3, 0), unit(3, 1)}, tol));
  CVector mixed(3);
  mixed << 1, 0, 1;
  mixed /= std::sqrt(2.0);
  CHECK_FALSE(is_hyperinvariant(n, {mixed}, tol));
}

TEST_CASE("is_hyperinvariant requires a normal matrix") {
  // rank-two counterexample shape: x(x)x + i (x+y)(x)(x+y) is not normal
  Tolerances tol;
  Rng rng(109);
  const auto on = conjint::testing::random_orthonormal_set(4, 2, rng);
  const CVector x = on[0];
  const CVector y = on[1];
  const CMatrix t = rank_one(x, x) + Complex(0, 1) * rank_one(x + y, x + y);
  CHECK(check_normal(t) > 1e-3);
  CHECK_THROWS_AS(is_hyperinvariant(t, {x}, tol), InvariantError);
}

TEST_CASE("hyperinvariance falsifier finds escapes exactly when they exist") {
  Tolerances tol;
  const CMatrix n = diag({1, 1, 2});
  CHECK_FALSE(hyperinvariance_falsifier(n, {unit(3, 2)}, 25, tol, 0).has_value());
  const auto c = hyperinvariance_falsifier(n, {unit(3, 0)}, 50, tol, 0);
  REQUIRE(c.has_value());
  CHECK(verify_conjugation(*c, tol).pass);
  CHECK(relation_residuals(*c, n, tol).sym < 1e-9);
  const CVector img = conjint::apply(*c, unit(3, 0));
  CHECK((img - unit(3, 0) * inner(img, unit(3, 0))).norm() > 1e-3);
}

TEST_CASE("falsifier agrees with the decision on random spectral and non-spectral subspaces") {
  Tolerances tol;
  Rng rng(113);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<Complex, int>> mults = {{Complex(1, 0), 2}, {Complex(0, 1), 1},
                                                  {Complex(2, 0), 1}};
    const CMatrix n = conjint::testing::normal_with_spectrum(mults, rng);
    const auto dec = decompose(n, tol);
    size_t wide = 0;
    while (dec.atoms[wide].dim() < 2) ++wide;
    std::vector<CVector> sub;
    bool expect = true;
    if (trial % 2 == 0) {
      sub = dec.atoms[wide].basis;  // a full atom: hyperinvariant
    } else {
      sub = {dec.atoms[wide].basis[0]};  // half of a two-dimensional atom
      expect = false;
    }
    CHECK(is_hyperinvariant(n, sub, tol) == expect);
    const auto c = hyperinvariance_falsifier(n, sub, 50, tol, trial);
    CHECK(c.has_value() == !expect);
  }
}

}  // TEST_SUITE
