#include "matid/proofsys.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "matid/errors.hpp"
#include "matid/matcheck.hpp"
#include "matid/matrix.hpp"
#include "matid/parallel.hpp"
#include "matid/parse.hpp"

namespace matid {

using nlohmann::json;

namespace {

const std::vector<std::pair<AxiomKind, std::string>>& axiom_table() {
  static const std::vector<std::pair<AxiomKind, std::string>> table = {
      {AxiomKind::Identity, "identity"},
      {AxiomKind::ProductCommutativity, "prod_comm"},
      {AxiomKind::AdditionCommutativity, "add_comm"},
      {AxiomKind::AddAssociativity, "add_assoc"},
      {AxiomKind::MulAssociativity, "mul_assoc"},
      {AxiomKind::LeftDistributivity, "dist_left"},
      {AxiomKind::RightDistributivity, "dist_right"},
      {AxiomKind::AddZero, "add_zero"},
      {AxiomKind::MulZero, "mul_zero"},
      {AxiomKind::Unit, "unit"},
      {AxiomKind::FieldAddition, "field_add"},
      {AxiomKind::FieldMultiplication, "field_mul"},
      {AxiomKind::CircuitAxiom, "circuit"},
      {AxiomKind::BasisAxiom, "basis"},
      {AxiomKind::BooleanAxiom, "boolean"},
  };
  return table;
}

const std::vector<std::pair<RuleKind, std::string>>& rule_table() {
  static const std::vector<std::pair<RuleKind, std::string>> table = {
      {RuleKind::Symmetry, "symmetry"},
      {RuleKind::Transitivity, "transitivity"},
      {RuleKind::AddCompat, "add_compat"},
      {RuleKind::MulCompat, "mul_compat"},
  };
  return table;
}

BasisElement make_element(const std::string& name, const std::string& text, Field field) {
  BasisElement e;
  e.name = name;
  e.text = text;
  e.poly = parse_poly(text, field);
  e.circuit = parse_circuit(text, field);
  return e;
}

std::string variant_name(SystemVariant v) {
  switch (v) {
    case SystemVariant::PC:
      return "pc";
    case SystemVariant::PMatd:
      return "pmatd";
    case SystemVariant::PCBool:
      return "pcbool";
  }
  return "?";
}

// Line validation against the shared gate table. Every check returns an
// empty string on success and a human-readable mismatch otherwise.
class LineChecker {
 public:
  explicit LineChecker(const ProofScript& s) : s_(s), c_(s.gates) {}

  std::optional<Rejection> check(std::size_t index) {
    const ProofLine& line = s_.lines[index];
    if (const auto* ax = std::get_if<AxiomInstance>(&line.just)) return check_axiom(index, line, *ax);
    return check_rule(index, line, std::get<RuleApplication>(line.just));
  }

  bool same(GateId a, GateId b) const { return a == b || isomorphic(c_, a, c_, b); }

  std::string show(GateId g) const {
    try {
      return formula_str(c_, g, 200);
    } catch (const CapExceeded&) {
      return "<gate " + std::to_string(g) + ", formula over 200 chars>";
    }
  }

 private:
  using Parts = std::map<std::string, GateId>;

  const Gate& gate(GateId g) const { return c_.gate(g); }
  bool is(GateId g, GateOp op) const { return gate(g).op == op; }
  bool is_const(GateId g, int value) const {
    return is(g, GateOp::Const) && gate(g).value == Scalar(c_.field(), Rational(value));
  }

  std::string want(const std::string& what, GateId g) const { return "expected " + what + ", got " + show(g); }
  std::string differ(const std::string& name, GateId a, GateId b) const {
    return name + " differs: " + show(a) + " vs " + show(b);
  }

  // lhs = op(F, G), rhs = op(G, F).
  std::string swap_shape(GateOp op, const ProofLine& l, Parts& parts) const {
    const char* sym = op == GateOp::Add ? "+" : "*";
    if (!is(l.lhs, op)) return "lhs: " + want(std::string("F ") + sym + " G", l.lhs);
    if (!is(l.rhs, op)) return "rhs: " + want(std::string("G ") + sym + " F", l.rhs);
    const Gate &a = gate(l.lhs), &b = gate(l.rhs);
    if (!same(a.left, b.right)) return differ("F", a.left, b.right);
    if (!same(a.right, b.left)) return differ("G", a.right, b.left);
    parts = {{"F", a.left}, {"G", a.right}};
    return {};
  }

  // lhs = op(F, op(G, H)), rhs = op(op(F, G), H).
  std::string assoc_shape(GateOp op, const ProofLine& l, Parts& parts) const {
    if (!is(l.lhs, op) || !is(gate(l.lhs).right, op)) return "lhs: " + want("F op (G op H)", l.lhs);
    if (!is(l.rhs, op) || !is(gate(l.rhs).left, op)) return "rhs: " + want("(F op G) op H", l.rhs);
    const Gate &a = gate(l.lhs), &ar = gate(a.right), &b = gate(l.rhs), &bl = gate(b.left);
    if (!same(a.left, bl.left)) return differ("F", a.left, bl.left);
    if (!same(ar.left, bl.right)) return differ("G", ar.left, bl.right);
    if (!same(ar.right, b.right)) return differ("H", ar.right, b.right);
    parts = {{"F", a.left}, {"G", ar.left}, {"H", ar.right}};
    return {};
  }

  // F*(G+H) = F*G + F*H, or (G+H)*F = G*F + H*F when `right`.
  std::string dist_shape(bool right, const ProofLine& l, Parts& parts) const {
    if (!is(l.lhs, GateOp::Mul)) return "lhs: " + want("a product", l.lhs);
    const Gate& a = gate(l.lhs);
    GateId f = right ? a.right : a.left;
    GateId sum = right ? a.left : a.right;
    if (!is(sum, GateOp::Add)) return "lhs: " + want(right ? "(G + H) * F" : "F * (G + H)", l.lhs);
    GateId g = gate(sum).left, h = gate(sum).right;
    if (!is(l.rhs, GateOp::Add) || !is(gate(l.rhs).left, GateOp::Mul) || !is(gate(l.rhs).right, GateOp::Mul)) {
      return "rhs: " + want(right ? "G * F + H * F" : "F * G + F * H", l.rhs);
    }
    const Gate &p = gate(gate(l.rhs).left), &q = gate(gate(l.rhs).right);
    GateId f1 = right ? p.right : p.left, g1 = right ? p.left : p.right;
    GateId f2 = right ? q.right : q.left, h1 = right ? q.left : q.right;
    if (!same(f, f1)) return differ("F", f, f1);
    if (!same(f, f2)) return differ("F", f, f2);
    if (!same(g, g1)) return differ("G", g, g1);
    if (!same(h, h1)) return differ("H", h, h1);
    parts = {{"F", f}, {"G", g}, {"H", h}};
    return {};
  }

  std::string match(AxiomKind kind, const ProofLine& l, Parts& parts) const {
    switch (kind) {
      case AxiomKind::Identity:
        if (!same(l.lhs, l.rhs)) return differ("F", l.lhs, l.rhs);
        parts = {{"F", l.lhs}};
        return {};
      case AxiomKind::ProductCommutativity:
        return swap_shape(GateOp::Mul, l, parts);
      case AxiomKind::AdditionCommutativity:
        return swap_shape(GateOp::Add, l, parts);
      case AxiomKind::AddAssociativity:
        return assoc_shape(GateOp::Add, l, parts);
      case AxiomKind::MulAssociativity:
        return assoc_shape(GateOp::Mul, l, parts);
      case AxiomKind::LeftDistributivity:
        return dist_shape(false, l, parts);
      case AxiomKind::RightDistributivity:
        return dist_shape(true, l, parts);
      case AxiomKind::AddZero:
        if (!is(l.lhs, GateOp::Add) || !is_const(gate(l.lhs).right, 0)) return "lhs: " + want("F + 0", l.lhs);
        if (!same(gate(l.lhs).left, l.rhs)) return differ("F", gate(l.lhs).left, l.rhs);
        parts = {{"F", l.rhs}};
        return {};
      case AxiomKind::MulZero:
        if (!is(l.lhs, GateOp::Mul) || !is_const(gate(l.lhs).right, 0)) return "lhs: " + want("F * 0", l.lhs);
        if (!is_const(l.rhs, 0)) return "rhs: " + want("0", l.rhs);
        parts = {{"F", gate(l.lhs).left}};
        return {};
      case AxiomKind::Unit:
        if (!is(l.lhs, GateOp::Mul) || !is_const(gate(l.lhs).right, 1)) return "lhs: " + want("F * 1", l.lhs);
        if (!same(gate(l.lhs).left, l.rhs)) return differ("F", gate(l.lhs).left, l.rhs);
        parts = {{"F", l.rhs}};
        return {};
      case AxiomKind::FieldAddition:
      case AxiomKind::FieldMultiplication: {
        GateOp op = kind == AxiomKind::FieldAddition ? GateOp::Add : GateOp::Mul;
        if (!is(l.lhs, GateOp::Const)) return "lhs: " + want("a constant", l.lhs);
        if (!is(l.rhs, op) || !is(gate(l.rhs).left, GateOp::Const) || !is(gate(l.rhs).right, GateOp::Const)) {
          return "rhs: " + want(op == GateOp::Add ? "a + b with constants" : "a * b with constants", l.rhs);
        }
        const Scalar& a = gate(gate(l.rhs).left).value;
        const Scalar& b = gate(gate(l.rhs).right).value;
        Scalar value = op == GateOp::Add ? a + b : a * b;
        if (value != gate(l.lhs).value) {
          return "field arithmetic fails: " + show(l.rhs) + " is " + value.str() + ", not " + gate(l.lhs).value.str();
        }
        return {};
      }
      case AxiomKind::CircuitAxiom:
        if (!formula_equal(c_, l.lhs, c_, l.rhs)) return "formulas differ: " + show(l.lhs) + " vs " + show(l.rhs);
        return {};
      case AxiomKind::BooleanAxiom: {
        const std::string shape = "x * x + x with x a variable";
        if (!is(l.lhs, GateOp::Add)) return "lhs: " + want(shape, l.lhs);
        GateId sq = gate(l.lhs).left, v = gate(l.lhs).right;
        if (!is(v, GateOp::Var) || !is(sq, GateOp::Mul)) return "lhs: " + want(shape, l.lhs);
        const Gate& m = gate(sq);
        if (!is(m.left, GateOp::Var) || !is(m.right, GateOp::Var) || gate(m.left).var != gate(v).var ||
            gate(m.right).var != gate(v).var) {
          return "lhs: " + want(shape, l.lhs);
        }
        if (!is_const(l.rhs, 0)) return "rhs: " + want("0", l.rhs);
        parts = {{"x", v}};
        return {};
      }
      case AxiomKind::BasisAxiom:
        break;
    }
    return "unsupported axiom";
  }

  std::optional<Rejection> check_basis(std::size_t index, const ProofLine& l, const AxiomInstance& ax) const {
    const BasisElement* e = s_.system.find(ax.element);
    if (!e) {
      return Rejection{index, RejectReason::UnknownBasisElement,
                       "no basis element '" + ax.element + "' in " + s_.system.name()};
    }
    if (!is_const(l.rhs, 0)) return Rejection{index, RejectReason::BasisMismatch, "rhs: " + want("0", l.rhs)};
    std::set<VarRef> slots;
    for (const Gate& g : e->circuit.gates()) {
      if (g.op == GateOp::Var) slots.insert(g.var);
    }
    // Reference circuit: the element with every slot replaced, gate for
    // gate, by a copy of its substitution circuit.
    Circuit ref(c_.field());
    std::unordered_map<GateId, GateId> memo;
    std::map<VarRef, GateId> images;
    for (const auto& [slot, root] : ax.substitution) {
      if (!slots.count(slot)) {
        return Rejection{index, RejectReason::BasisMismatch,
                         slot.str() + " is not a variable of basis element '" + e->name + "'"};
      }
      images[slot] = ref.import(c_, root, memo);
    }
    std::vector<GateId> map(e->circuit.size());
    for (GateId g = 0; g < e->circuit.size(); ++g) {
      const Gate& gt = e->circuit.gate(g);
      switch (gt.op) {
        case GateOp::Var: {
          auto it = images.find(gt.var);
          map[g] = it != images.end() ? it->second : ref.var(gt.var);
          break;
        }
        case GateOp::Const:
          map[g] = ref.constant(gt.value);
          break;
        case GateOp::Add:
          map[g] = ref.add(map[gt.left], map[gt.right]);
          break;
        case GateOp::Mul:
          map[g] = ref.mul(map[gt.left], map[gt.right]);
          break;
      }
    }
    GateId root = map[e->circuit.output()];
    if (!formula_equal(ref, root, c_, l.lhs)) {
      std::string expected;
      try {
        expected = formula_str(ref, root, 200);
      } catch (const CapExceeded&) {
        expected = "<formula over 200 chars>";
      }
      return Rejection{index, RejectReason::BasisMismatch,
                       "lhs does not unwind to the substituted element: expected " + expected + ", got " +
                           show(l.lhs)};
    }
    return std::nullopt;
  }

  std::optional<Rejection> check_axiom(std::size_t index, const ProofLine& l, const AxiomInstance& ax) const {
    if (!s_.system.has(ax.kind)) {
      return Rejection{index, RejectReason::AxiomNotInSystem,
                       "axiom " + axiom_name(ax.kind) + " is not part of " + s_.system.name()};
    }
    if (ax.kind == AxiomKind::BasisAxiom) return check_basis(index, l, ax);
    Parts parts;
    std::string err = match(ax.kind, l, parts);
    if (!err.empty()) {
      RejectReason reason = RejectReason::AxiomMismatch;
      if (err.rfind("field arithmetic", 0) == 0) reason = RejectReason::FieldIdentityFalse;
      return Rejection{index, reason, axiom_name(ax.kind) + ": " + err};
    }
    for (const auto& [name, g] : ax.params) {
      auto it = parts.find(name);
      if (it == parts.end()) {
        return Rejection{index, RejectReason::AxiomMismatch,
                         axiom_name(ax.kind) + ": no component named '" + name + "'"};
      }
      if (!same(it->second, g)) {
        return Rejection{index, RejectReason::AxiomMismatch,
                         axiom_name(ax.kind) + ": parameter " + differ(name, g, it->second)};
      }
    }
    return std::nullopt;
  }

  std::optional<Rejection> check_rule(std::size_t index, const ProofLine& l, const RuleApplication& r) const {
    const std::size_t arity = r.kind == RuleKind::Symmetry ? 1 : 2;
    if (r.premises.size() != arity) {
      return Rejection{index, RejectReason::BadPremise,
                       rule_name(r.kind) + " takes " + std::to_string(arity) + " premise(s), got " +
                           std::to_string(r.premises.size())};
    }
    for (std::size_t p : r.premises) {
      if (p >= index) {
        return Rejection{index, RejectReason::BadPremise,
                         rule_name(r.kind) + ": premise must be an earlier line"};
      }
    }
    const ProofLine& p = s_.lines[r.premises[0]];
    auto fail = [&](const std::string& what) {
      return Rejection{index, RejectReason::RuleShape, rule_name(r.kind) + ": " + what};
    };
    switch (r.kind) {
      case RuleKind::Symmetry:
        if (!same(l.lhs, p.rhs)) return fail("lhs " + differ("from premise rhs", l.lhs, p.rhs));
        if (!same(l.rhs, p.lhs)) return fail("rhs " + differ("from premise lhs", l.rhs, p.lhs));
        return std::nullopt;
      case RuleKind::Transitivity: {
        const ProofLine& q = s_.lines[r.premises[1]];
        if (!same(p.rhs, q.lhs)) return fail("premises do not chain: " + differ("middle term", p.rhs, q.lhs));
        if (!same(l.lhs, p.lhs)) return fail("lhs " + differ("from first premise lhs", l.lhs, p.lhs));
        if (!same(l.rhs, q.rhs)) return fail("rhs " + differ("from second premise rhs", l.rhs, q.rhs));
        return std::nullopt;
      }
      case RuleKind::AddCompat:
      case RuleKind::MulCompat: {
        GateOp op = r.kind == RuleKind::AddCompat ? GateOp::Add : GateOp::Mul;
        const ProofLine& q = s_.lines[r.premises[1]];
        const char* shape = op == GateOp::Add ? "a sum" : "a product";
        if (!is(l.lhs, op)) return fail("lhs: " + want(shape, l.lhs));
        if (!is(l.rhs, op)) return fail("rhs: " + want(shape, l.rhs));
        const Gate &a = gate(l.lhs), &b = gate(l.rhs);
        if (!same(a.left, p.lhs)) return fail(differ("left factor of lhs", a.left, p.lhs));
        if (!same(a.right, q.lhs)) return fail(differ("right factor of lhs", a.right, q.lhs));
        if (!same(b.left, p.rhs)) return fail(differ("left factor of rhs", b.left, p.rhs));
        if (!same(b.right, q.rhs)) return fail(differ("right factor of rhs", b.right, q.rhs));
        return std::nullopt;
      }
    }
    return fail("unsupported rule");
  }

  const ProofScript& s_;
  const Circuit& c_;
};

GateId read_ref(const json& j, Circuit& c, const std::map<std::int64_t, GateId>& relabel) {
  if (j.is_number_integer()) {
    auto it = relabel.find(j.get<std::int64_t>());
    if (it == relabel.end()) throw ParseError("reference to unknown gate " + j.dump());
    return it->second;
  }
  if (j.is_string()) return build_expr(c, parse_expr(j.get<std::string>()));
  throw ParseError("circuit reference must be a gate id or polynomial text, got " + j.dump());
}

json gate_ref(GateId g) { return static_cast<std::int64_t>(g); }

}  // namespace

// ------------------------------------------------------------ systems

std::vector<std::pair<std::string, std::string>> drensky2_basis() {
  std::vector<VarRef> vars = x_vars(4);
  return {{"s4", standard_poly(vars).str()}, {"hall", "[[x1,x2]^2,x3]"}};
}

SystemSpec SystemSpec::pc(Field field) {
  SystemSpec s;
  s.variant = SystemVariant::PC;
  s.field = field;
  return s;
}

SystemSpec SystemSpec::pc_bool() {
  SystemSpec s;
  s.variant = SystemVariant::PCBool;
  s.field = Field::prime(2);
  return s;
}

SystemSpec SystemSpec::pmat2(Field field) {
  SystemSpec s;
  s.variant = SystemVariant::PMatd;
  s.field = field;
  s.d = 2;
  for (const auto& [name, text] : drensky2_basis()) s.basis.push_back(make_element(name, text, field));
  return s;
}

SystemSpec SystemSpec::pmatd(std::size_t d, const std::vector<std::pair<std::string, std::string>>& basis,
                             Field field) {
  if (d == 0) throw PreconditionError("P_Matd needs d >= 1");
  SystemSpec s;
  s.variant = SystemVariant::PMatd;
  s.field = field;
  s.d = d;
  std::set<std::string> names;
  for (const auto& [name, text] : basis) {
    if (!names.insert(name).second) throw PreconditionError("duplicate basis element '" + name + "'");
    BasisElement e = make_element(name, text, field);
    IdentityVerdict v;
    try {
      v = symbolic_check(e.poly, d);
    } catch (const CapExceeded&) {
      RandomOptions opts;
      opts.seed = 1;
      v = random_check(e.poly, d, opts);
    }
    if (v.verdict == Verdict::NotIdentity) {
      throw PreconditionError("basis element '" + name + "' is not an identity of Mat_" + std::to_string(d));
    }
    s.basis.push_back(std::move(e));
  }
  return s;
}

bool SystemSpec::has(AxiomKind kind) const {
  switch (kind) {
    case AxiomKind::ProductCommutativity:
      return variant != SystemVariant::PMatd;
    case AxiomKind::RightDistributivity:
    case AxiomKind::BasisAxiom:
      return variant == SystemVariant::PMatd;
    case AxiomKind::BooleanAxiom:
      return variant == SystemVariant::PCBool;
    default:
      return true;
  }
}

const BasisElement* SystemSpec::find(const std::string& name) const {
  for (const BasisElement& e : basis) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::string SystemSpec::name() const {
  switch (variant) {
    case SystemVariant::PC:
      return "PC(" + field.name() + ")";
    case SystemVariant::PCBool:
      return "PC(GF(2)) + Boolean axioms";
    case SystemVariant::PMatd:
      return "P_Mat" + std::to_string(d) + "(" + field.name() + ")";
  }
  return "?";
}

// ------------------------------------------------------------ checking

ProofCheck check_proof(const ProofScript& script) {
  if (script.gates.field() != script.system.field) {
    throw PreconditionError("gate table is over " + script.gates.field().name() + " but the system is over " +
                            script.system.field.name());
  }
  ProofCheck out;
  out.line_count = script.lines.size();
  if (script.lines.empty()) {
    out.rejection = Rejection{0, RejectReason::EmptyScript, "a proof needs at least one line"};
    return out;
  }
  LineChecker checker(script);
  for (std::size_t i = 0; i < script.lines.size(); ++i) {
    if (auto r = checker.check(i)) {
      out.rejection = std::move(r);
      return out;
    }
  }
  for (std::size_t k = 0; k < script.goals.size(); ++k) {
    const Equation& goal = script.goals[k];
    bool found = std::any_of(script.lines.begin(), script.lines.end(), [&](const ProofLine& l) {
      return checker.same(l.lhs, goal.lhs) && checker.same(l.rhs, goal.rhs);
    });
    if (!found) {
      out.rejection = Rejection{script.lines.size(), RejectReason::GoalMissing,
                                "goal " + checker.show(goal.lhs) + " = " + checker.show(goal.rhs) +
                                    " is not a proof line"};
      return out;
    }
  }
  out.accepted = true;
  return out;
}

std::size_t count_lines(const ProofScript& script) { return script.lines.size(); }

SpotcheckReport soundness_spotcheck(const ProofScript& script, std::size_t d, std::uint64_t p, std::size_t trials,
                                    std::uint64_t seed, unsigned threads) {
  const bool boolean = script.system.variant == SystemVariant::PCBool;
  if (boolean) {
    d = 1;
    p = 2;
  }
  if (d == 0) throw PreconditionError("spotcheck needs d >= 1");
  Field gf = Field::prime(p);
  const Circuit& c = script.gates;
  if (!c.field().is_rational() && c.field() != gf) {
    throw PreconditionError("cannot evaluate a proof over " + c.field().name() + " in " + gf.name());
  }
  std::vector<Scalar> consts(c.size());
  std::set<VarRef> vars;
  for (GateId g = 0; g < c.size(); ++g) {
    const Gate& gt = c.gate(g);
    if (gt.op == GateOp::Const) consts[g] = gt.value.to_field(gf);
    if (gt.op == GateOp::Var) vars.insert(gt.var);
  }

  SpotcheckReport report;
  report.trials = trials;
  report.lines = script.lines.size();
  report.d = d;
  report.p = p;
  report.seed = seed;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t t = next.fetch_add(1);
      if (t >= trials) return;
      std::mt19937_64 rng(mix_seed(seed, t));
      std::uniform_int_distribution<std::uint64_t> draw(0, boolean ? 1 : p - 1);
      std::map<VarRef, Matrix> assign;
      for (VarRef v : vars) {
        Matrix m(gf, d);
        for (std::size_t r = 0; r < d; ++r) {
          for (std::size_t k = 0; k < d; ++k) m.at(r, k) = Scalar::from_residue(gf, draw(rng));
        }
        assign.emplace(v, std::move(m));
      }
      std::vector<Matrix> val(c.size());
      for (GateId g = 0; g < c.size(); ++g) {
        const Gate& gt = c.gate(g);
        switch (gt.op) {
          case GateOp::Var:
            val[g] = assign.at(gt.var);
            break;
          case GateOp::Const:
            val[g] = Matrix::scalar(consts[g], d);
            break;
          case GateOp::Add:
            val[g] = val[gt.left] + val[gt.right];
            break;
          case GateOp::Mul:
            val[g] = val[gt.left] * val[gt.right];
            break;
        }
      }
      std::vector<std::pair<std::size_t, std::size_t>> bad;
      for (std::size_t i = 0; i < script.lines.size(); ++i) {
        if (val[script.lines[i].lhs] != val[script.lines[i].rhs]) bad.emplace_back(i, t);
      }
      if (!bad.empty()) {
        std::lock_guard<std::mutex> lock(mu);
        report.discrepancies.insert(report.discrepancies.end(), bad.begin(), bad.end());
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(report.discrepancies.begin(), report.discrepancies.end());
  return report;
}

LineBound lines_against_certificate(const ProofScript& script, const GenerationCertificate& cert) {
  if (script.goals.empty()) throw PreconditionError("the proof declares no goal");
  const Equation& goal = script.goals.front();
  NcPoly target = expand(script.gates, goal.lhs) - expand(script.gates, goal.rhs);
  CertificateCheck check = verify_certificate(cert);
  if (!check.valid) throw PreconditionError("certificate does not verify");
  if (cert.target != target) {
    throw PreconditionError("certificate target " + cert.target.str() + " is not the goal polynomial " +
                            target.str());
  }
  return LineBound{script.lines.size(), check.instance_count};
}

// ------------------------------------------------------------ documents

std::vector<std::pair<std::string, std::string>> basis_from_json(const json& doc) {
  std::vector<std::pair<std::string, std::string>> out;
  try {
    if (doc.is_object() && doc.contains("elements")) {
      for (const json& e : doc.at("elements")) out.emplace_back(e.at("name").get<std::string>(), e.at("poly").get<std::string>());
    } else if (doc.is_array()) {
      for (const json& e : doc) out.emplace_back(e.at("name").get<std::string>(), e.at("poly").get<std::string>());
    } else if (doc.is_object()) {
      for (const auto& [name, text] : doc.items()) out.emplace_back(name, text.get<std::string>());
    } else {
      throw ParseError("basis document must be an object or an array");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed basis document: ") + e.what());
  }
  if (out.empty()) throw ParseError("basis document lists no elements");
  return out;
}

SystemSpec system_from_json(const json& doc) {
  try {
    if (doc.is_string()) return system_from_json(json{{"variant", doc}});
    std::string variant = doc.at("variant").get<std::string>();
    Field field = doc.contains("field") ? Field::parse(doc.at("field").get<std::string>()) : Field::rationals();
    if (variant == "pc") return SystemSpec::pc(field);
    if (variant == "pcbool") {
      if (doc.contains("field") && field != Field::prime(2)) throw ParseError("pcbool is over GF(2)");
      return SystemSpec::pc_bool();
    }
    if (variant == "pmat2") return SystemSpec::pmat2(field);
    if (variant == "pmatd") {
      std::size_t d = doc.at("d").get<std::size_t>();
      const json& basis = doc.at("basis");
      if (basis.is_string()) {
        if (basis.get<std::string>() != "drensky2") throw ParseError("unknown built-in basis " + basis.dump());
        if (d != 2) throw ParseError("drensky2 is a basis for d = 2");
        return SystemSpec::pmat2(field);
      }
      return SystemSpec::pmatd(d, basis_from_json(basis), field);
    }
    throw ParseError("unknown proof system '" + variant + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed system description: ") + e.what());
  }
}

json system_to_json(const SystemSpec& s) {
  json doc = {{"variant", variant_name(s.variant)}, {"field", s.field.name()}};
  if (s.variant == SystemVariant::PMatd) {
    doc["d"] = s.d;
    json basis = json::array();
    for (const BasisElement& e : s.basis) basis.push_back({{"name", e.name}, {"poly", e.text}});
    doc["basis"] = basis;
  }
  return doc;
}

ProofScript proof_from_json(const json& doc, const std::optional<SystemSpec>& override_system) {
  try {
    if (!doc.is_object()) throw ParseError("proof document must be an object");
    ProofScript s;
    if (override_system) {
      s.system = *override_system;
    } else if (doc.contains("system")) {
      s.system = system_from_json(doc.at("system"));
    } else {
      throw ParseError("proof document names no system");
    }
    std::map<std::int64_t, GateId> relabel;
    json table = {{"field", s.system.field.name()}, {"gates", doc.value("gates", json::array())}};
    s.gates = circuit_from_json(table, relabel);
    Circuit& c = s.gates;

    for (const json& jl : doc.at("lines")) {
      ProofLine line;
      line.lhs = read_ref(jl.at("lhs"), c, relabel);
      line.rhs = read_ref(jl.at("rhs"), c, relabel);
      const json& just = jl.at("just");
      if (just.contains("axiom")) {
        AxiomInstance ax;
        std::string name = just.at("axiom").get<std::string>();
        auto it = std::find_if(axiom_table().begin(), axiom_table().end(),
                               [&](const auto& e) { return e.second == name; });
        if (it == axiom_table().end()) throw ParseError("unknown axiom '" + name + "'");
        ax.kind = it->first;
        if (just.contains("params")) {
          for (const auto& [k, v] : just.at("params").items()) ax.params[k] = read_ref(v, c, relabel);
        }
        ax.element = just.value("element", std::string());
        if (just.contains("substitution")) {
          for (const auto& [k, v] : just.at("substitution").items()) {
            ax.substitution[VarRef::parse(k)] = read_ref(v, c, relabel);
          }
        }
        line.just = std::move(ax);
      } else if (just.contains("rule")) {
        RuleApplication r;
        std::string name = just.at("rule").get<std::string>();
        auto it = std::find_if(rule_table().begin(), rule_table().end(),
                               [&](const auto& e) { return e.second == name; });
        if (it == rule_table().end()) throw ParseError("unknown rule '" + name + "'");
        r.kind = it->first;
        for (const json& p : just.at("premises")) {
          std::int64_t k = p.get<std::int64_t>();
          r.premises.push_back(k >= 1 ? static_cast<std::size_t>(k - 1) : std::numeric_limits<std::size_t>::max());
        }
        line.just = std::move(r);
      } else {
        throw ParseError("justification needs 'axiom' or 'rule'");
      }
      s.lines.push_back(std::move(line));
    }
    if (doc.contains("goal")) {
      const json& g = doc.at("goal");
      auto one = [&](const json& e) { s.goals.push_back({read_ref(e.at("lhs"), c, relabel), read_ref(e.at("rhs"), c, relabel)}); };
      if (g.is_array()) {
        for (const json& e : g) one(e);
      } else {
        one(g);
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed proof document: ") + e.what());
  }
}

json proof_to_json(const ProofScript& s) {
  json doc;
  doc["system"] = system_to_json(s.system);
  doc["gates"] = circuit_to_json(s.gates).at("gates");
  json lines = json::array();
  for (const ProofLine& l : s.lines) {
    json jl = {{"lhs", gate_ref(l.lhs)}, {"rhs", gate_ref(l.rhs)}};
    if (const auto* ax = std::get_if<AxiomInstance>(&l.just)) {
      json just = {{"axiom", axiom_name(ax->kind)}};
      if (!ax->params.empty()) {
        json params = json::object();
        for (const auto& [k, g] : ax->params) params[k] = gate_ref(g);
        just["params"] = params;
      }
      if (ax->kind == AxiomKind::BasisAxiom) {
        just["element"] = ax->element;
        json sub = json::object();
        for (const auto& [v, g] : ax->substitution) sub[v.str()] = gate_ref(g);
        just["substitution"] = sub;
      }
      jl["just"] = just;
    } else {
      const auto& r = std::get<RuleApplication>(l.just);
      json premises = json::array();
      for (std::size_t p : r.premises) {
        premises.push_back(p == std::numeric_limits<std::size_t>::max() ? json(0) : json(p + 1));
      }
      jl["just"] = {{"rule", rule_name(r.kind)}, {"premises", premises}};
    }
    lines.push_back(jl);
  }
  doc["lines"] = lines;
  if (!s.goals.empty()) {
    json goals = json::array();
    for (const Equation& g : s.goals) goals.push_back({{"lhs", gate_ref(g.lhs)}, {"rhs", gate_ref(g.rhs)}});
    doc["goal"] = goals;
  }
  return doc;
}

std::string axiom_name(AxiomKind kind) {
  for (const auto& [k, name] : axiom_table()) {
    if (k == kind) return name;
  }
  return "?";
}

std::string rule_name(RuleKind kind) {
  for (const auto& [k, name] : rule_table()) {
    if (k == kind) return name;
  }
  return "?";
}

std::string reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::EmptyScript:
      return "empty_script";
    case RejectReason::BadPremise:
      return "bad_premise";
    case RejectReason::AxiomNotInSystem:
      return "axiom_not_in_system";
    case RejectReason::AxiomMismatch:
      return "axiom_mismatch";
    case RejectReason::FieldIdentityFalse:
      return "field_identity_false";
    case RejectReason::UnknownBasisElement:
      return "unknown_basis_element";
    case RejectReason::BasisMismatch:
      return "basis_mismatch";
    case RejectReason::RuleShape:
      return "rule_shape";
    case RejectReason::GoalMissing:
      return "goal_missing";
  }
  return "?";
}

json to_json(const ProofCheck& check) {
  json doc = {{"accepted", check.accepted}, {"lines", check.line_count}};
  if (check.rejection) {
    doc["rejection"] = {{"line", check.rejection->line + 1},
                        {"reason", reason_name(check.rejection->reason)},
                        {"detail", check.rejection->detail}};
  }
  return doc;
}

json to_json(const SpotcheckReport& r) {
  json bad = json::array();
  for (const auto& [line, trial] : r.discrepancies) bad.push_back({{"line", line + 1}, {"trial", trial}});
  return {{"trials", r.trials}, {"lines", r.lines}, {"d", r.d}, {"p", r.p}, {"seed", r.seed}, {"discrepancies", bad}};
}

}  // namespace matid
