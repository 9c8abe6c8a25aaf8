#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conjint/interpolation.hpp"
#include "conjint/mu_field.hpp"

namespace conjint {

/// Malformed input file (bad JSON, bad shapes, bad scalars).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Certificate does not belong to the presented problem file.
struct DigestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "conjint 0.1.0";

/// Parsed problem file. Complex scalars are encoded as [re, im]; matrices as
/// row-major nested arrays of complex scalars.
struct ProblemFile {
  std::string schema_version;
  std::string mode;  // symmetric | skew | hyperinvariant | ufield | sufield
  int dimension = 0;
  std::vector<std::pair<std::string, CMatrix>> operators;  // name order as serialized
  std::vector<CVector> xs;
  std::vector<CVector> ys;
  std::vector<CVector> subspace;
  DiscreteMeasure measure;
  int n = 0;
  FunctionTable f;
  FunctionTable g;
  Tolerances tol;

  bool interpolation_mode() const { return mode == "symmetric" || mode == "skew"; }
  bool field_mode() const { return mode == "ufield" || mode == "sufield"; }

  InterpolationProblem to_interpolation_problem() const;
};

ProblemFile parse_problem_text(const std::string& text);

/// SHA-256 of the canonicalized problem bytes (parsed and re-serialized with
/// sorted keys and compact separators).
std::string canonical_digest(const std::string& text);

struct CertificateFile {
  std::string schema_version;
  std::string tool_version;
  std::string input_digest;
  std::string mode;
  bool feasible = false;
  std::optional<CMatrix> conjugation_s;
  std::vector<CMatrix> field_blocks;
  std::map<std::string, double> residuals;
};

CertificateFile parse_certificate_text(const std::string& text);

std::string interpolation_certificate_json(const ProblemFile& pf, const std::string& digest,
                                           const Certificate& cert);
std::string field_certificate_json(const ProblemFile& pf, const std::string& digest,
                                   bool feasible, const UField& field,
                                   const std::optional<int>& infeasible_atom,
                                   const std::optional<SUFieldWitness>& witness,
                                   const std::map<std::string, double>& residuals);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace conjint
