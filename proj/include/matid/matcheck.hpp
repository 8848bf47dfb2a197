#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "matid/circuit.hpp"
#include "matid/matrix.hpp"
#include "matid/poly.hpp"

namespace matid {

enum class Verdict { Identity, NotIdentity, Probable };
enum class CheckMethod { Symbolic, MatrixUnits, Random };

struct CheckStats {
  std::uint64_t entries_checked = 0;
  std::uint64_t monomials_expanded = 0;
  std::uint64_t assignments = 0;
  std::uint64_t trials = 0;
};

/// Outcome of an identity check on Mat_d(F).
///
/// NotIdentity carries a witness whenever one was found; the only exception
/// is a prime-field symbolic check whose entry polynomials are nonzero but
/// where no functional witness turned up (`caveat` explains). Probable is
/// only produced by random evaluation and never upgraded to Identity.
struct IdentityVerdict {
  Verdict verdict = Verdict::Probable;
  CheckMethod method = CheckMethod::Symbolic;
  std::size_t dim = 0;
  Field field;
  std::optional<Rational> failure_bound;
  std::optional<MatrixAssignment> witness;
  std::optional<Matrix> witness_value;
  bool heuristic = false;
  std::string caveat;
  CheckStats stats;
};

struct SymbolicOptions {
  /// Refuse when the estimated number of commutative monomials produced
  /// across all d^2 entries exceeds this.
  std::uint64_t monomial_cap = 10'000'000;
  std::uint64_t witness_seed = 1;
  unsigned witness_attempts = 200;
};

/// Substitutes generic matrices of commuting entry variables and multiplies
/// out; Identity iff every entry is the zero polynomial. Throws CapExceeded
/// when the estimate passes the cap (use random_check instead).
IdentityVerdict symbolic_check(const NcPoly& f, std::size_t d, const SymbolicOptions& opts = {});

/// Multilinear inputs only: evaluates f on every assignment of matrix units
/// in lexicographic order (x with the smallest index most significant, E_jk
/// ordered row-major) and returns the first failing assignment.
IdentityVerdict matrix_unit_check(const NcPoly& f, std::size_t d, unsigned threads = 1);

struct RandomOptions {
  std::uint64_t p = 1'000'003;
  std::uint64_t trials = 20;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Evaluates on uniformly random matrices over GF(p). A nonzero value gives
/// NotIdentity with that assignment as witness; otherwise Probable with
/// failure bound (deg/p)^trials. Flagged heuristic when p <= 2*deg*d or when
/// reducing coefficients mod p changes the polynomial.
IdentityVerdict random_check(const NcPoly& f, std::size_t d, const RandomOptions& opts);
IdentityVerdict random_check(const Circuit& c, std::size_t d, const RandomOptions& opts);

/// Upper bound on the degree of the polynomial computed by `root`.
int formal_degree(const Circuit& c, GateId root);

struct AlReport {
  std::size_t d = 0;
  IdentityVerdict upper;  // S_{2d}
  IdentityVerdict lower;  // S_{2d-1}
  bool consistent() const;
};

/// S_{2d} is an identity of Mat_d (symbolic for d <= 3, random for d = 4)
/// and S_{2d-1} is not (matrix-unit witness). Supports 1 <= d <= 4.
AlReport al_suite(std::size_t d, std::uint64_t seed = 0, unsigned threads = 1);

std::string verdict_name(Verdict v);
std::string method_name(CheckMethod m);
nlohmann::json to_json(const IdentityVerdict& v);
nlohmann::json to_json(const AlReport& r);
nlohmann::json to_json(const MatrixAssignment& a);

}  // namespace matid
