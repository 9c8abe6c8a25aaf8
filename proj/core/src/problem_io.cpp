#include "conjint/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "conjint/sha256.hpp"
#include "json.hpp"

namespace conjint {

using nlohmann::json;

namespace {

double parse_finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite number");
  return v;
}

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(where + ": complex scalar must be a two-element array [re, im]");
  return {parse_finite_number(j[0], where + "[0]"), parse_finite_number(j[1], where + "[1]")};
}

CVector parse_vector(const json& j, int dim, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  if (dim >= 0 && static_cast<int>(j.size()) != dim)
    throw ParseError(where + ": expected " + std::to_string(dim) + " entries, got " +
                     std::to_string(j.size()));
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

CMatrix parse_matrix(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ParseError(where + ": expected " + std::to_string(dim) + " rows");
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const CVector row = parse_vector(j[static_cast<size_t>(r)], dim,
                                     where + "[" + std::to_string(r) + "]");
    m.row(r) = row.transpose();
  }
  return m;
}

std::vector<CVector> parse_vector_list(const json& j, int dim, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of vectors");
  std::vector<CVector> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_vector(j[i], dim, where + "[" + std::to_string(i) + "]"));
  return out;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

void require_keys(const json& j, const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
  for (const auto& key : required)
    if (!j.contains(key)) throw ParseError("missing required field '" + key + "'");
  for (const auto& [key, _] : j.items())
    if (!required.count(key) && !optional.count(key))
      throw ParseError("field '" + key + "' is not part of this mode");
}

}  // namespace

InterpolationProblem ProblemFile::to_interpolation_problem() const {
  InterpolationProblem p;
  for (const auto& [_, m] : operators) p.operators.push_back(m);
  p.xs = xs;
  p.ys = ys;
  p.mode = mode == "skew" ? Mode::skew : Mode::symmetric;
  p.tol = tol;
  return p;
}

ProblemFile parse_problem_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("problem file must be a JSON object");

  ProblemFile pf;
  if (!j.contains("mode") || !j["mode"].is_string())
    throw ParseError("missing or malformed 'mode'");
  pf.mode = j["mode"].get<std::string>();
  const std::set<std::string> modes = {"symmetric", "skew", "hyperinvariant", "ufield",
                                       "sufield"};
  if (!modes.count(pf.mode)) throw ParseError("unknown mode '" + pf.mode + "'");

  if (!j.contains("schema_version") || !j["schema_version"].is_string())
    throw ParseError("missing or malformed 'schema_version'");
  pf.schema_version = j["schema_version"].get<std::string>();
  if (pf.schema_version != kSchemaVersion)
    throw ParseError("unsupported schema_version '" + pf.schema_version + "'");

  if (pf.interpolation_mode()) {
    require_keys(j, {"schema_version", "mode", "dimension", "operators", "xs", "ys"}, {"tolerances"});
  } else if (pf.mode == "hyperinvariant") {
    require_keys(j, {"schema_version", "mode", "dimension", "operators", "subspace"}, {"tolerances"});
  } else {
    require_keys(j, {"schema_version", "mode", "measure", "n", "f", "g"}, {"tolerances"});
  }

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw ParseError("'tolerances' must be an object");
    for (const auto& [key, val] : t.items()) {
      const double v = parse_finite_number(val, "tolerances." + key);
      if (key == "residual")
        pf.tol.residual = v;
      else if (key == "cluster")
        pf.tol.cluster = v;
      else if (key == "rank")
        pf.tol.rank = v;
      else
        throw ParseError("unknown tolerance '" + key + "'");
    }
  }

  if (pf.interpolation_mode() || pf.mode == "hyperinvariant") {
    if (!j["dimension"].is_number_integer())
      throw ParseError("'dimension' must be an integer");
    pf.dimension = j["dimension"].get<int>();
    if (pf.dimension < 1) throw ParseError("'dimension' must be positive");
    if (!j["operators"].is_object()) throw ParseError("'operators' must be an object");
    for (const auto& [name, mat] : j["operators"].items())
      pf.operators.emplace_back(name, parse_matrix(mat, pf.dimension, "operators." + name));
  }
  if (pf.interpolation_mode()) {
    pf.xs = parse_vector_list(j["xs"], pf.dimension, "xs");
    pf.ys = parse_vector_list(j["ys"], pf.dimension, "ys");
    if (pf.xs.size() != pf.ys.size()) throw ParseError("'xs' and 'ys' must have equal length");
  }
  if (pf.mode == "hyperinvariant")
    pf.subspace = parse_vector_list(j["subspace"], pf.dimension, "subspace");

  if (pf.field_mode()) {
    if (!j["measure"].is_array()) throw ParseError("'measure' must be an array of atoms");
    for (size_t i = 0; i < j["measure"].size(); ++i) {
      const json& a = j["measure"][i];
      const std::string where = "measure[" + std::to_string(i) + "]";
      if (!a.is_object() || !a.contains("z") || !a.contains("weight"))
        throw ParseError(where + ": atom must be an object with 'z' and 'weight'");
      for (const auto& [key, _] : a.items())
        if (key != "z" && key != "weight") throw ParseError(where + ": unknown field '" + key + "'");
      MeasureAtom atom;
      atom.z = parse_complex(a["z"], where + ".z");
      atom.weight = parse_finite_number(a["weight"], where + ".weight");
      if (!(atom.weight > 0.0)) throw ParseError(where + ": weight must be positive");
      pf.measure.atoms.push_back(atom);
    }
    if (!j["n"].is_number_integer() || j["n"].get<int>() < 1)
      throw ParseError("'n' must be a positive integer");
    pf.n = j["n"].get<int>();
    const int rows = static_cast<int>(pf.measure.atoms.size());
    auto parse_table = [&](const char* key) {
      const json& t = j[key];
      if (!t.is_array() || static_cast<int>(t.size()) != rows)
        throw ParseError(std::string("'") + key + "' must have one row per measure atom");
      CMatrix values(rows, pf.n);
      for (int r = 0; r < rows; ++r) {
        const CVector row = parse_vector(t[static_cast<size_t>(r)], pf.n,
                                         std::string(key) + "[" + std::to_string(r) + "]");
        values.row(r) = row.transpose();
      }
      return FunctionTable{values};
    };
    pf.f = parse_table("f");
    pf.g = parse_table("g");
  }

  return pf;
}

std::string canonical_digest(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return sha256_hex(j.dump());
}

CertificateFile parse_certificate_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid certificate JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("certificate must be a JSON object");
  CertificateFile cf;
  for (const char* key : {"schema_version", "tool_version", "input_digest", "mode"}) {
    if (!j.contains(key) || !j[key].is_string())
      throw ParseError(std::string("certificate: missing string field '") + key + "'");
  }
  cf.schema_version = j["schema_version"].get<std::string>();
  cf.tool_version = j["tool_version"].get<std::string>();
  cf.input_digest = j["input_digest"].get<std::string>();
  cf.mode = j["mode"].get<std::string>();
  if (!j.contains("feasible") || !j["feasible"].is_boolean())
    throw ParseError("certificate: missing boolean field 'feasible'");
  cf.feasible = j["feasible"].get<bool>();

  if (j.contains("conjugation_S")) {
    const json& s = j["conjugation_S"];
    if (!s.is_array() || s.empty()) throw ParseError("certificate: malformed 'conjugation_S'");
    const int d = static_cast<int>(s.size());
    cf.conjugation_s = parse_matrix(s, d, "conjugation_S");
  }
  if (j.contains("field_blocks")) {
    const json& b = j["field_blocks"];
    if (!b.is_array()) throw ParseError("certificate: malformed 'field_blocks'");
    for (size_t i = 0; i < b.size(); ++i) {
      if (!b[i].is_array() || b[i].empty())
        throw ParseError("certificate: malformed field block " + std::to_string(i));
      const int n = static_cast<int>(b[i].size());
      cf.field_blocks.push_back(parse_matrix(b[i], n, "field_blocks[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("residuals")) {
    if (!j["residuals"].is_object()) throw ParseError("certificate: malformed 'residuals'");
    for (const auto& [key, val] : j["residuals"].items())
      cf.residuals[key] = parse_finite_number(val, "residuals." + key);
  }
  return cf;
}

namespace {

json violation_json(const FeasibilityViolation& v) {
  json o;
  o["kind"] = v.kind;
  o["atom"] = v.atom;
  o["i"] = v.i;
  o["j"] = v.j;
  o["lhs"] = complex_json(v.lhs);
  o["rhs"] = complex_json(v.rhs);
  o["magnitude"] = v.magnitude;
  return o;
}

}  // namespace

std::string interpolation_certificate_json(const ProblemFile& pf, const std::string& digest,
                                           const Certificate& cert) {
  json o;
  o["schema_version"] = kSchemaVersion;
  o["tool_version"] = kToolVersion;
  o["input_digest"] = digest;
  o["mode"] = pf.mode;
  o["feasible"] = cert.feasible;
  if (cert.feasible && cert.conjugation) o["conjugation_S"] = matrix_json(cert.conjugation->s);
  json res = json::object();
  for (const auto& [k, v] : cert.residuals) res[k] = v;
  o["residuals"] = res;
  json viols = json::array();
  for (const auto& v : cert.violations) viols.push_back(violation_json(v));
  o["violations"] = viols;
  return o.dump(2) + "\n";
}

std::string field_certificate_json(const ProblemFile& pf, const std::string& digest,
                                   bool feasible, const UField& field,
                                   const std::optional<int>& infeasible_atom,
                                   const std::optional<SUFieldWitness>& witness,
                                   const std::map<std::string, double>& residuals) {
  json o;
  o["schema_version"] = kSchemaVersion;
  o["tool_version"] = kToolVersion;
  o["input_digest"] = digest;
  o["mode"] = pf.mode;
  o["feasible"] = feasible;
  if (feasible) {
    json blocks = json::array();
    for (const auto& b : field.blocks) blocks.push_back(matrix_json(b));
    o["field_blocks"] = blocks;
  }
  json res = json::object();
  for (const auto& [k, v] : residuals) res[k] = v;
  o["residuals"] = res;
  json viols = json::array();
  if (infeasible_atom) {
    json v;
    v["kind"] = "norm";
    v["atom"] = *infeasible_atom;
    viols.push_back(v);
  }
  if (witness) {
    json v;
    v["kind"] = witness->condition;
    v["atom"] = witness->atom;
    v["lhs"] = complex_json(witness->lhs);
    v["rhs"] = complex_json(witness->rhs);
    viols.push_back(v);
  }
  o["violations"] = viols;
  return o.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace conjint
