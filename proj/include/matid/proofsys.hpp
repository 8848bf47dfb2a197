#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "matid/circuit.hpp"
#include "matid/ideals.hpp"
#include "matid/poly.hpp"

namespace matid {

enum class SystemVariant { PC, PMatd, PCBool };

struct BasisElement {
  std::string name;
  std::string text;  // as declared, in the polynomial grammar
  NcPoly poly;
  /// Reference circuit (one output) that basis lines are compared against
  /// after substitution.
  Circuit circuit;
};

enum class AxiomKind {
  Identity,
  ProductCommutativity,
  AdditionCommutativity,
  AddAssociativity,
  MulAssociativity,
  LeftDistributivity,
  RightDistributivity,
  AddZero,
  MulZero,
  Unit,
  FieldAddition,
  FieldMultiplication,
  CircuitAxiom,
  BasisAxiom,
  BooleanAxiom,
};

enum class RuleKind { Symmetry, Transitivity, AddCompat, MulCompat };

struct SystemSpec {
  SystemVariant variant = SystemVariant::PC;
  Field field;
  std::size_t d = 0;  // PMatd only
  std::vector<BasisElement> basis;

  static SystemSpec pc(Field field = Field::rationals());
  static SystemSpec pc_bool();
  /// P_Mat2 with the built-in basis "drensky2": s4 = S_4(x1..x4) and
  /// hall = [[x1,x2]^2,x3].
  static SystemSpec pmat2(Field field = Field::rationals());
  /// User basis; each element is checked to be an identity of Mat_d
  /// (symbolically, or by random evaluation past the symbolic cap), and
  /// PreconditionError is thrown otherwise.
  static SystemSpec pmatd(std::size_t d, const std::vector<std::pair<std::string, std::string>>& basis,
                          Field field = Field::rationals());

  bool has(AxiomKind kind) const;
  const BasisElement* find(const std::string& name) const;
  std::string name() const;
};

/// The built-in drensky2 basis as (name, text) pairs. The reference
/// circuits are built from the text, so its shape is what basis lines must
/// reproduce.
std::vector<std::pair<std::string, std::string>> drensky2_basis();

struct AxiomInstance {
  AxiomKind kind = AxiomKind::Identity;
  /// Optional named components (F, G, H) the line must use.
  std::map<std::string, GateId> params;
  /// BasisAxiom only.
  std::string element;
  std::map<VarRef, GateId> substitution;
};

struct RuleApplication {
  RuleKind kind = RuleKind::Symmetry;
  std::vector<std::size_t> premises;  // 0-based line indices
};

struct ProofLine {
  GateId lhs = 0;
  GateId rhs = 0;
  std::variant<AxiomInstance, RuleApplication> just;
};

struct Equation {
  GateId lhs = 0;
  GateId rhs = 0;
};

/// Every line and goal points into the shared gate table `gates`.
struct ProofScript {
  SystemSpec system;
  Circuit gates;
  std::vector<ProofLine> lines;
  std::vector<Equation> goals;
};

enum class RejectReason {
  EmptyScript,
  BadPremise,
  AxiomNotInSystem,
  AxiomMismatch,
  FieldIdentityFalse,
  UnknownBasisElement,
  BasisMismatch,
  RuleShape,
  GoalMissing,
};

struct Rejection {
  std::size_t line = 0;  // 0-based; lines.size() for a missing goal
  RejectReason reason = RejectReason::AxiomMismatch;
  std::string detail;
};

struct ProofCheck {
  bool accepted = false;
  std::size_t line_count = 0;
  std::optional<Rejection> rejection;
};

/// Validates the lines in order and stops at the first failure. Throws
/// PreconditionError when the gate table and the system disagree on the
/// field.
ProofCheck check_proof(const ProofScript& script);

std::size_t count_lines(const ProofScript& script);

struct SpotcheckReport {
  std::size_t trials = 0;
  std::size_t lines = 0;
  std::size_t d = 0;
  std::uint64_t p = 0;
  std::uint64_t seed = 0;
  /// (line, trial) pairs where lhs - rhs evaluated nonzero, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> discrepancies;
};

/// Evaluates both sides of every line on random d x d matrices over GF(p),
/// one assignment per trial derived from `seed`. PCBool scripts are
/// evaluated on random 0/1 values (d = 1, p = 2).
SpotcheckReport soundness_spotcheck(const ProofScript& script, std::size_t d, std::uint64_t p, std::size_t trials,
                                    std::uint64_t seed, unsigned threads = 1);

struct LineBound {
  std::size_t lines = 0;
  /// Instances of a verified certificate for the goal (lhs - rhs); an upper
  /// bound on Q, reported beside the line count.
  std::optional<std::size_t> certificate_instances;
};

/// Throws PreconditionError unless the certificate verifies and its target
/// is the polynomial of the first goal.
LineBound lines_against_certificate(const ProofScript& script, const GenerationCertificate& cert);

// ------------------------------------------------------------- documents

/// {system?, gates: [...], lines: [{lhs, rhs, just}], goal?}. Circuit refs
/// are gate ids of the table or polynomial text; premises are 1-based.
/// `just` is {axiom, params?, element?, substitution?} or {rule, premises}.
/// `system` is {variant: pc|pcbool|pmat2|pmatd, field?, d?, basis?}; the
/// `override_system` argument replaces it.
ProofScript proof_from_json(const nlohmann::json& doc, const std::optional<SystemSpec>& override_system = {});
nlohmann::json proof_to_json(const ProofScript& script);
SystemSpec system_from_json(const nlohmann::json& doc);
nlohmann::json system_to_json(const SystemSpec& system);
/// {elements: [{name, poly}]} or {name: poly, ...}.
std::vector<std::pair<std::string, std::string>> basis_from_json(const nlohmann::json& doc);

std::string axiom_name(AxiomKind kind);
std::string rule_name(RuleKind kind);
std::string reason_name(RejectReason reason);
nlohmann::json to_json(const ProofCheck& check);
nlohmann::json to_json(const SpotcheckReport& report);

}  // namespace matid
