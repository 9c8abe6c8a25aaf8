#include "conjint/commands.hpp"

#include <cmath>
#include <sstream>

namespace conjint {

namespace {

Tolerances effective_tol(const ProblemFile& pf, const CliOptions& opt) {
  Tolerances t = pf.tol;
  if (opt.tol_residual) t.residual = *opt.tol_residual;
  if (opt.tol_cluster) t.cluster = *opt.tol_cluster;
  t.validate();
  return t;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << v;
  return ss.str();
}

std::string fmt(const Complex& z) {
  std::ostringstream ss;
  ss.precision(6);
  ss << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return ss.str();
}

void describe_violations(std::ostringstream& out, const std::vector<FeasibilityViolation>& vs) {
  for (const auto& v : vs) {
    out << "violation: " << v.kind;
    if (v.atom >= 0) out << " at atom " << v.atom;
    if (v.i >= 0) out << ", pair (" << v.i << "," << v.j << ")";
    if (v.kind == "complement_not_skew")
      out << ": multiplicity " << v.i << " vs " << v.j << " at eigenvalue " << fmt(v.lhs);
    else
      out << ": " << fmt(v.lhs) << " vs " << fmt(v.rhs);
    out << " (magnitude " << fmt(v.magnitude) << ")\n";
  }
}

template <typename Fn>
CommandResult guarded(Fn&& fn) {
  std::ostringstream out;
  try {
    const int code = fn(out);
    return {code, out.str()};
  } catch (const ParseError& e) {
    out << "parse error: " << e.what() << "\n";
    return {kExitParse, out.str()};
  } catch (const DigestError& e) {
    out << "digest error: " << e.what() << "\n";
    return {kExitDigest, out.str()};
  } catch (const InvariantError& e) {
    out << "invariant violation: " << e.what() << "\n";
    return {kExitInvariant, out.str()};
  } catch (const CompletionError& e) {
    out << "completion error: " << e.what() << "\n";
    return {kExitInvariant, out.str()};
  }
}

int check_interpolation(std::ostringstream& out, const ProblemFile& pf, const Tolerances& tol) {
  int bad = 0;
  if (pf.mode == "skew" && pf.operators.size() != 1) {
    out << "violation: skew mode takes exactly one operator, got " << pf.operators.size() << "\n";
    ++bad;
  }
  for (const auto& [name, m] : pf.operators) {
    const double nr = check_normal(m);
    if (nr > tol.residual * (1.0 + m.norm() * m.norm())) {
      out << "violation: operator " << name << " is not normal (residual " << fmt(nr) << ")\n";
      ++bad;
    } else {
      out << "ok: operator " << name << " normal (residual " << fmt(nr) << ")\n";
    }
  }
  for (size_t k = 0; k < pf.operators.size(); ++k)
    for (size_t l = 0; l < k; ++l) {
      const double cr = (pf.operators[k].second * pf.operators[l].second -
                         pf.operators[l].second * pf.operators[k].second)
                            .norm();
      if (cr > tol.residual * (1.0 + pf.operators[k].second.norm() * pf.operators[l].second.norm())) {
        out << "violation: operators " << pf.operators[l].first << " and "
            << pf.operators[k].first << " do not commute (residual " << fmt(cr) << ")\n";
        ++bad;
      }
    }
  auto check_set = [&](const std::vector<CVector>& vs, const char* name) {
    for (size_t i = 0; i < vs.size(); ++i) {
      if (vs[i].norm() <= tol.rank) {
        out << "violation: " << name << "[" << i << "] is zero\n";
        ++bad;
      }
      for (size_t j = 0; j < i; ++j) {
        const double ip = std::abs(inner(vs[i], vs[j]));
        if (ip > 1e2 * tol.residual * vs[i].norm() * vs[j].norm()) {
          out << "violation: " << name << "[" << j << "] and " << name << "[" << i
              << "] are not orthogonal (|<.,.>| " << fmt(ip) << ")\n";
          ++bad;
        }
      }
    }
  };
  check_set(pf.xs, "xs");
  check_set(pf.ys, "ys");
  for (size_t i = 0; i < pf.xs.size() && i < pf.ys.size(); ++i) {
    const double nx = pf.xs[i].norm();
    const double ny = pf.ys[i].norm();
    if (std::abs(nx - ny) > tol.residual * std::max(1.0, nx)) {
      out << "violation: pair " << i << " norms differ (" << fmt(nx) << " vs " << fmt(ny) << ")\n";
      ++bad;
    }
  }
  return bad;
}

int check_field(std::ostringstream& out, const ProblemFile& pf, const Tolerances& tol) {
  int bad = 0;
  try {
    pf.measure.validate(tol);
    out << "ok: measure atoms distinct with positive weights\n";
  } catch (const InvariantError& e) {
    out << "violation: " << e.what() << "\n";
    ++bad;
  }
  if (pf.mode == "sufield" && !is_symmetric_measure(pf.measure, tol)) {
    out << "violation: measure is not symmetric under z -> -z\n";
    ++bad;
  }
  return bad;
}

int check_hyperinvariant(std::ostringstream& out, const ProblemFile& pf, const Tolerances& tol) {
  int bad = 0;
  if (pf.operators.size() != 1) {
    out << "violation: hyperinvariant mode takes exactly one operator\n";
    ++bad;
  }
  for (const auto& [name, m] : pf.operators) {
    const double nr = check_normal(m);
    if (nr > tol.residual * (1.0 + m.norm() * m.norm())) {
      out << "violation: operator " << name << " is not normal (residual " << fmt(nr) << ")\n";
      ++bad;
    }
  }
  for (size_t i = 0; i < pf.subspace.size(); ++i)
    if (pf.subspace[i].norm() <= tol.rank) {
      out << "violation: subspace[" << i << "] is zero\n";
      ++bad;
    }
  return bad;
}

}  // namespace

CommandResult run_check(const std::string& problem_path, const CliOptions& opt) {
  return guarded([&](std::ostringstream& out) {
    const std::string text = read_file(problem_path);
    const ProblemFile pf = parse_problem_text(text);
    const Tolerances tol = effective_tol(pf, opt);
    out << "mode: " << pf.mode << "\n";
    int bad = 0;
    if (pf.interpolation_mode())
      bad = check_interpolation(out, pf, tol);
    else if (pf.field_mode())
      bad = check_field(out, pf, tol);
    else
      bad = check_hyperinvariant(out, pf, tol);
    if (bad > 0) {
      out << "structural check failed with " << bad << " violation(s)\n";
      return kExitInvariant;
    }
    out << "structural check passed\n";
    return kExitFeasible;
  });
}

CommandResult run_interpolate(const std::string& problem_path, const std::string& out_path,
                              const CliOptions& opt) {
  return guarded([&](std::ostringstream& out) {
    const std::string text = read_file(problem_path);
    const ProblemFile pf = parse_problem_text(text);
    if (!pf.interpolation_mode())
      throw InvariantError("interpolate requires mode 'symmetric' or 'skew'");
    InterpolationProblem p = pf.to_interpolation_problem();
    p.tol = effective_tol(pf, opt);
    const Certificate cert =
        p.mode == Mode::symmetric ? construct_symmetric(p) : construct_skew(p);

    const std::string digest = canonical_digest(text);
    const std::string payload = interpolation_certificate_json(pf, digest, cert);
    if (out_path == "-") {
      out << payload;
      return cert.feasible ? kExitFeasible : kExitInfeasible;
    }
    write_file_atomic(out_path, payload);

    out << "mode: " << pf.mode << "\n";
    out << "feasible: " << (cert.feasible ? "yes" : "no") << "\n";
    for (const auto& [k, v] : cert.residuals) out << "residual " << k << ": " << fmt(v) << "\n";
    describe_violations(out, cert.violations);
    out << "certificate written: " << out_path << "\n";
    return cert.feasible ? kExitFeasible : kExitInfeasible;
  });
}

CommandResult run_field(const std::string& problem_path, const std::string& out_path,
                        const CliOptions& opt) {
  return guarded([&](std::ostringstream& out) {
    const std::string text = read_file(problem_path);
    const ProblemFile pf = parse_problem_text(text);
    if (!pf.field_mode()) throw InvariantError("field requires mode 'ufield' or 'sufield'");
    const Tolerances tol = effective_tol(pf, opt);

    bool feasible = false;
    UField field;
    std::optional<int> infeasible_atom;
    std::optional<SUFieldWitness> witness;
    std::map<std::string, double> residuals;
    if (pf.mode == "ufield") {
      UFieldResult r = solve_ufield(pf.measure, pf.f, pf.g, tol);
      feasible = r.feasible;
      field = std::move(r.field);
      infeasible_atom = r.infeasible_atom;
    } else {
      SUFieldResult r = solve_sufield(pf.measure, pf.f, pf.g, tol);
      feasible = r.feasible;
      field = std::move(r.field);
      witness = r.witness;
    }
    if (feasible) {
      const UFieldReport rep =
          verify_ufield(pf.measure, pf.f, pf.g, field, pf.mode == "sufield", tol);
      residuals["equation"] = rep.equation;
      residuals["unitarity"] = rep.unitarity;
      if (pf.mode == "sufield") residuals["parity"] = rep.parity;
    }

    const std::string digest = canonical_digest(text);
    const std::string payload =
        field_certificate_json(pf, digest, feasible, field, infeasible_atom, witness, residuals);
    if (out_path == "-") {
      out << payload;
      return feasible ? kExitFeasible : kExitInfeasible;
    }
    write_file_atomic(out_path, payload);

    out << "mode: " << pf.mode << "\n";
    out << "feasible: " << (feasible ? "yes" : "no") << "\n";
    for (const auto& [k, v] : residuals) out << "residual " << k << ": " << fmt(v) << "\n";
    if (infeasible_atom) out << "violation: norm condition fails at atom " << *infeasible_atom << "\n";
    if (witness)
      out << "violation: " << witness->condition << " condition fails at atom " << witness->atom
          << ": " << fmt(witness->lhs) << " vs " << fmt(witness->rhs) << "\n";
    out << "certificate written: " << out_path << "\n";
    return feasible ? kExitFeasible : kExitInfeasible;
  });
}

namespace {

int verify_interpolation(std::ostringstream& out, const ProblemFile& pf,
                         const CertificateFile& cf, const Tolerances& tol) {
  InterpolationProblem p = pf.to_interpolation_problem();
  p.tol = tol;
  if (!cf.feasible) {
    const Feasibility f =
        p.mode == Mode::symmetric ? feasibility_symmetric(p) : feasibility_skew(p);
    out << "certificate claims infeasible; recomputed feasibility: "
        << (f.feasible ? "feasible" : "infeasible") << "\n";
    return f.feasible ? kExitInfeasible : kExitFeasible;
  }
  if (!cf.conjugation_s) throw ParseError("certificate: feasible but no 'conjugation_S'");
  if (cf.conjugation_s->rows() != pf.dimension)
    throw ParseError("certificate: conjugation dimension mismatch");
  const Conjugation c{*cf.conjugation_s};
  const std::map<std::string, double> res = recompute_residuals(p, c);
  const double gate = certificate_gate(p);
  double worst = 0.0;
  for (const auto& [k, v] : res) {
    out << "residual " << k << ": " << fmt(v) << "\n";
    worst = std::max(worst, v);
  }
  out << "gate: " << fmt(gate) << "\n";
  const bool pass = worst <= gate;
  out << "verification: " << (pass ? "pass" : "fail") << "\n";
  return pass ? kExitFeasible : kExitInfeasible;
}

int verify_field(std::ostringstream& out, const ProblemFile& pf, const CertificateFile& cf,
                 const Tolerances& tol) {
  const bool symmetric = pf.mode == "sufield";
  if (!cf.feasible) {
    bool recomputed;
    if (pf.mode == "ufield") {
      recomputed = solve_ufield(pf.measure, pf.f, pf.g, tol).feasible;
    } else {
      recomputed = solve_sufield(pf.measure, pf.f, pf.g, tol).feasible;
    }
    out << "certificate claims infeasible; recomputed feasibility: "
        << (recomputed ? "feasible" : "infeasible") << "\n";
    return recomputed ? kExitInfeasible : kExitFeasible;
  }
  UField field;
  field.blocks = cf.field_blocks;
  const UFieldReport rep = verify_ufield(pf.measure, pf.f, pf.g, field, symmetric, tol);
  out << "residual equation: " << fmt(rep.equation) << "\n";
  out << "residual unitarity: " << fmt(rep.unitarity) << "\n";
  if (symmetric) out << "residual parity: " << fmt(rep.parity) << "\n";
  out << "verification: " << (rep.pass ? "pass" : "fail") << "\n";
  return rep.pass ? kExitFeasible : kExitInfeasible;
}

}  // namespace

CommandResult run_verify(const std::string& problem_path, const std::string& certificate_path,
                         const CliOptions& opt) {
  return guarded([&](std::ostringstream& out) {
    const std::string problem_text = read_file(problem_path);
    const std::string cert_text = read_file(certificate_path);
    const ProblemFile pf = parse_problem_text(problem_text);
    const CertificateFile cf = parse_certificate_text(cert_text);
    const Tolerances tol = effective_tol(pf, opt);

    const std::string digest = canonical_digest(problem_text);
    if (digest != cf.input_digest)
      throw DigestError("certificate digest " + cf.input_digest +
                        " does not match the problem file digest " + digest);
    if (cf.mode != pf.mode)
      throw InvariantError("certificate mode '" + cf.mode + "' does not match problem mode '" +
                           pf.mode + "'");

    if (pf.interpolation_mode()) return verify_interpolation(out, pf, cf, tol);
    if (pf.field_mode()) return verify_field(out, pf, cf, tol);
    throw InvariantError("verify supports interpolation and field certificates only");
  });
}

CommandResult run_hyperinvariant(const std::string& problem_path, const CliOptions& opt) {
  return guarded([&](std::ostringstream& out) {
    const std::string text = read_file(problem_path);
    const ProblemFile pf = parse_problem_text(text);
    if (pf.mode != "hyperinvariant")
      throw InvariantError("hyperinvariant requires mode 'hyperinvariant'");
    if (pf.operators.size() != 1)
      throw InvariantError("hyperinvariant mode takes exactly one operator");
    const Tolerances tol = effective_tol(pf, opt);
    const CMatrix& n = pf.operators.front().second;

    const bool hyper = is_hyperinvariant(n, pf.subspace, tol);
    out << "hyperinvariant: " << (hyper ? "true" : "false") << "\n";
    if (hyper) return kExitFeasible;

    const std::optional<Conjugation> c =
        hyperinvariance_falsifier(n, pf.subspace, 50, tol, opt.seed);
    if (c) {
      out << "falsifying conjugation (symmetric unitary factor):\n";
      for (Eigen::Index r = 0; r < c->s.rows(); ++r) {
        out << "  ";
        for (Eigen::Index cc = 0; cc < c->s.cols(); ++cc) {
          out << fmt(c->s(r, cc));
          if (cc + 1 < c->s.cols()) out << ", ";
        }
        out << "\n";
      }
    } else {
      out << "no falsifying conjugation found within 50 trials\n";
    }
    return kExitInfeasible;
  });
}

}  // namespace conjint
