#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "matid/matrix.hpp"
#include "matid/parse.hpp"
#include "matid/poly.hpp"

namespace matid {

using GateId = std::uint32_t;

enum class GateOp : std::uint8_t { Var, Const, Add, Mul };

struct Gate {
  GateOp op = GateOp::Const;
  VarRef var;           // Var
  Scalar value;         // Const
  GateId left = 0;      // Add, Mul
  GateId right = 0;     // Add, Mul
};

/// Non-commutative arithmetic circuit: a DAG stored in topological order
/// (children always have smaller ids) with designated outputs. Mul children
/// are ordered. Variable and constant leaves are shared; inner gates are not
/// hash-consed, so the gate table mirrors how the circuit was written.
class Circuit {
 public:
  explicit Circuit(Field field = Field::rationals()) : field_(field) {}

  GateId var(VarRef v);
  GateId constant(const Scalar& c);
  GateId constant(const Rational& c) { return constant(Scalar(field_, c)); }
  GateId add(GateId a, GateId b);
  GateId mul(GateId a, GateId b);
  /// a + (-1)*b.
  GateId sub(GateId a, GateId b);
  /// Copies the subcircuit of `other` rooted at `root`; `memo` maps gate ids
  /// of `other` already copied.
  GateId import(const Circuit& other, GateId root, std::unordered_map<GateId, GateId>& memo);
  GateId import(const Circuit& other, GateId root);

  void add_output(GateId g);
  void set_outputs(std::vector<GateId> outs);

  Field field() const { return field_; }
  std::size_t size() const { return gates_.size(); }
  const Gate& gate(GateId g) const { return gates_.at(g); }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<GateId>& outputs() const { return outputs_; }
  GateId output(std::size_t i = 0) const { return outputs_.at(i); }
  /// Number of gates reachable from `root`.
  std::size_t cone_size(GateId root) const;

 private:
  GateId push(Gate g);
  void check_id(GateId g) const;

  Field field_;
  std::vector<Gate> gates_;
  std::vector<GateId> outputs_;
  std::unordered_map<VarRef, GateId> var_index_;
  std::unordered_map<std::string, GateId> const_index_;
};

// ------------------------------------------------------------ documents

/// Adds the gates of an expression tree; returns the root.
GateId build_expr(Circuit& c, const Expr& e);

/// Accepts the structured JSON document or polynomial text.
Circuit parse_circuit(std::string_view text, Field field = Field::rationals());
/// JSON document {field, gates: [{id, op, payload}], outputs}. Gates may
/// arrive in any order with any distinct non-negative ids; they are relabeled
/// densely in topological order. Unknown ids and cycles are rejected.
Circuit circuit_from_json(const nlohmann::json& doc);
/// Like circuit_from_json, but also reports the old-id to new-id relabeling.
Circuit circuit_from_json(const nlohmann::json& doc, std::map<std::int64_t, GateId>& relabel);
nlohmann::json circuit_to_json(const Circuit& c);
/// Canonical serialization: gates sorted by id, ids dense from 0.
std::string print_circuit(const Circuit& c);

/// Sum-of-products circuit for a polynomial (one output).
Circuit poly_to_circuit(const NcPoly& f);

/// Human-readable formula unwinding of `root` (exponential for heavily
/// shared DAGs; throws CapExceeded past `max_chars`).
std::string formula_str(const Circuit& c, GateId root, std::size_t max_chars = 1u << 20);

/// Same op table and wiring from the outputs, up to relabeling of gates.
bool isomorphic(const Circuit& a, GateId ra, const Circuit& b, GateId rb);

// ------------------------------------------------------------ semantics

inline constexpr std::size_t kDefaultMonomialCap = 1'000'000;

/// Polynomial computed by `root`. Memoized bottom-up over the cone; throws
/// CapExceeded naming the first gate whose expansion passes `cap` monomials.
NcPoly expand(const Circuit& c, GateId root, std::size_t cap = kDefaultMonomialCap);
/// One polynomial per output.
std::vector<NcPoly> expand(const Circuit& c, std::size_t cap = kDefaultMonomialCap);

/// True iff the formula unwindings of the two gates are syntactically
/// identical. Memoized over gate pairs, so polynomial in the circuit sizes.
bool formula_equal(const Circuit& a, GateId ra, const Circuit& b, GateId rb);
bool formula_equal(const Circuit& a, const Circuit& b);

/// The entry-wise translation: every X-variable x_i becomes the d x d grid of
/// Entry variables e_{i,j,k}. All entries share one gate table. For output o,
/// entry (j,k) (1-based) is `entries[o][(j-1)*d + (k-1)]`, which are also the
/// outputs of `circuit` in that order.
///
/// Per source gate the pass emits at most 2d^3 gates (a general product: d^3
/// multiplications and d^2(d-1) additions in balanced trees), so
/// size <= kLoweringSizeConstant * d^3 * size(source).
struct LoweredFamily {
  std::size_t dim = 0;
  Circuit circuit;
  std::vector<std::vector<GateId>> entries;

  GateId entry(std::size_t j, std::size_t k, std::size_t output = 0) const {
    return entries.at(output).at((j - 1) * dim + (k - 1));
  }
};

inline constexpr std::size_t kLoweringSizeConstant = 2;

LoweredFamily matrix_expand(const Circuit& c, std::size_t d);

/// Same circuit with every constant re-read in `target` (rationals reduce
/// mod p). Gate ids may shift when constants coincide after reduction.
Circuit circuit_to_field(const Circuit& c, Field target);

/// Bottom-up matrix evaluation; one matrix per output.
std::vector<Matrix> eval_on_matrices(const Circuit& c, const MatrixAssignment& assignment, std::size_t dim);
/// Scalar evaluation of every output; every variable must be bound.
std::vector<Scalar> eval_scalars(const Circuit& c, const std::map<VarRef, Scalar>& assignment);

}  // namespace matid
