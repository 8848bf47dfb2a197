#include "matid/circuit.hpp"

#include <algorithm>
#include <unordered_set>

namespace matid {

using nlohmann::json;

// ------------------------------------------------------------- builder

void Circuit::check_id(GateId g) const {
  if (g >= gates_.size()) throw PreconditionError("gate id " + std::to_string(g) + " does not exist");
}

GateId Circuit::push(Gate g) {
  if (gates_.size() >= std::numeric_limits<GateId>::max()) throw CapExceeded("circuit gate table is full");
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

GateId Circuit::var(VarRef v) {
  auto it = var_index_.find(v);
  if (it != var_index_.end()) return it->second;
  Gate g;
  g.op = GateOp::Var;
  g.var = v;
  GateId id = push(std::move(g));
  var_index_.emplace(v, id);
  return id;
}

GateId Circuit::constant(const Scalar& c) {
  if (c.field() != field_) throw FieldMismatch("constant over " + c.field().name() + " in a circuit over " + field_.name());
  std::string key = c.str();
  auto it = const_index_.find(key);
  if (it != const_index_.end()) return it->second;
  Gate g;
  g.op = GateOp::Const;
  g.value = c;
  GateId id = push(std::move(g));
  const_index_.emplace(std::move(key), id);
  return id;
}

GateId Circuit::add(GateId a, GateId b) {
  check_id(a);
  check_id(b);
  Gate g;
  g.op = GateOp::Add;
  g.left = a;
  g.right = b;
  return push(std::move(g));
}

GateId Circuit::mul(GateId a, GateId b) {
  check_id(a);
  check_id(b);
  Gate g;
  g.op = GateOp::Mul;
  g.left = a;
  g.right = b;
  return push(std::move(g));
}

GateId Circuit::sub(GateId a, GateId b) { return add(a, mul(constant(Rational(-1)), b)); }

GateId Circuit::import(const Circuit& other, GateId root, std::unordered_map<GateId, GateId>& memo) {
  if (other.field_ != field_) throw FieldMismatch("importing a circuit over " + other.field_.name());
  other.check_id(root);
  // Children precede parents, so one ascending pass over the cone suffices.
  std::vector<char> in_cone(root + 1, 0);
  in_cone[root] = 1;
  for (GateId g = root + 1; g-- > 0;) {
    if (!in_cone[g] || memo.count(g)) continue;
    const Gate& gate = other.gates_[g];
    if (gate.op == GateOp::Add || gate.op == GateOp::Mul) {
      in_cone[gate.left] = 1;
      in_cone[gate.right] = 1;
    }
  }
  for (GateId g = 0; g <= root; ++g) {
    if (!in_cone[g] || memo.count(g)) continue;
    const Gate& gate = other.gates_[g];
    GateId id = 0;
    switch (gate.op) {
      case GateOp::Var:
        id = var(gate.var);
        break;
      case GateOp::Const:
        id = constant(gate.value);
        break;
      case GateOp::Add:
        id = add(memo.at(gate.left), memo.at(gate.right));
        break;
      case GateOp::Mul:
        id = mul(memo.at(gate.left), memo.at(gate.right));
        break;
    }
    memo.emplace(g, id);
  }
  return memo.at(root);
}

GateId Circuit::import(const Circuit& other, GateId root) {
  std::unordered_map<GateId, GateId> memo;
  return import(other, root, memo);
}

void Circuit::add_output(GateId g) {
  check_id(g);
  outputs_.push_back(g);
}

void Circuit::set_outputs(std::vector<GateId> outs) {
  for (GateId g : outs) check_id(g);
  outputs_ = std::move(outs);
}

std::size_t Circuit::cone_size(GateId root) const {
  check_id(root);
  std::vector<char> seen(root + 1, 0);
  seen[root] = 1;
  std::size_t n = 0;
  for (GateId g = root + 1; g-- > 0;) {
    if (!seen[g]) continue;
    ++n;
    const Gate& gate = gates_[g];
    if (gate.op == GateOp::Add || gate.op == GateOp::Mul) {
      seen[gate.left] = 1;
      seen[gate.right] = 1;
    }
  }
  return n;
}

namespace {

std::vector<char> cone_mask(const Circuit& c, const std::vector<GateId>& roots) {
  std::vector<char> mask(c.size(), 0);
  for (GateId r : roots) mask.at(r) = 1;
  for (std::size_t g = c.size(); g-- > 0;) {
    if (!mask[g]) continue;
    const Gate& gate = c.gate(static_cast<GateId>(g));
    if (gate.op == GateOp::Add || gate.op == GateOp::Mul) {
      mask[gate.left] = 1;
      mask[gate.right] = 1;
    }
  }
  return mask;
}

}  // namespace

// ------------------------------------------------------------ documents

GateId build_expr(Circuit& c, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var:
      return c.var(e.var);
    case Expr::Kind::Const:
      return c.constant(e.value);
    case Expr::Kind::Sum: {
      GateId acc = 0;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        GateId t = build_expr(c, e.children[i]);
        if (e.negated[i]) t = c.mul(c.constant(Rational(-1)), t);
        acc = i == 0 ? t : c.add(acc, t);
      }
      return acc;
    }
    case Expr::Kind::Product: {
      // Numeric items fold into one leading coefficient.
      Scalar coeff = Scalar::one(c.field());
      bool have_factor = false;
      GateId acc = 0;
      for (const Expr& item : e.children) {
        if (item.kind == Expr::Kind::Const) {
          coeff *= Scalar(c.field(), item.value);
          continue;
        }
        GateId t = build_expr(c, item);
        acc = have_factor ? c.mul(acc, t) : t;
        have_factor = true;
      }
      if (!have_factor) return c.constant(coeff);
      if (coeff.is_one()) return acc;
      return c.mul(c.constant(coeff), acc);
    }
    case Expr::Kind::Commutator: {
      GateId acc = build_expr(c, e.children[0]);
      for (std::size_t i = 1; i < e.children.size(); ++i) {
        GateId b = build_expr(c, e.children[i]);
        acc = c.sub(c.mul(acc, b), c.mul(b, acc));
      }
      return acc;
    }
    case Expr::Kind::Power: {
      if (e.exponent == 0) return c.constant(Rational(1));
      GateId base = build_expr(c, e.children[0]);
      GateId acc = base;
      for (unsigned i = 1; i < e.exponent; ++i) acc = c.mul(acc, base);
      return acc;
    }
  }
  return 0;
}

Circuit parse_circuit(std::string_view text, Field field) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& err) {
      throw ParseError(std::string("malformed circuit document: ") + err.what(), err.byte ? err.byte - 1 : 0);
    }
    return circuit_from_json(doc);
  }
  Circuit c(field);
  c.add_output(build_expr(c, parse_expr(text)));
  return c;
}

Circuit circuit_from_json(const json& doc) {
  std::map<std::int64_t, GateId> relabel;
  return circuit_from_json(doc, relabel);
}

namespace {

Circuit circuit_from_json_impl(const json& doc, std::map<std::int64_t, GateId>& relabel) {
  if (!doc.is_object()) throw ParseError("circuit document must be an object");
  Field field = doc.contains("field") ? Field::parse(doc.at("field").get<std::string>()) : Field::rationals();
  if (!doc.contains("gates") || !doc.at("gates").is_array()) throw ParseError("circuit document needs a 'gates' array");

  struct Raw {
    GateOp op;
    std::string payload;
    std::int64_t left = -1, right = -1;
  };
  std::map<std::int64_t, Raw> raw;
  for (const json& g : doc.at("gates")) {
    if (!g.is_object() || !g.contains("id") || !g.contains("op")) throw ParseError("gate record needs 'id' and 'op'");
    std::int64_t id = g.at("id").get<std::int64_t>();
    if (id < 0) throw ParseError("negative gate id " + std::to_string(id));
    std::string op = g.at("op").get<std::string>();
    Raw r{};
    const json payload = g.value("payload", json());
    if (op == "var" || op == "const") {
      r.op = op == "var" ? GateOp::Var : GateOp::Const;
      if (payload.is_string()) {
        r.payload = payload.get<std::string>();
      } else if (payload.is_number_integer()) {
        r.payload = std::to_string(payload.get<std::int64_t>());
      } else {
        throw ParseError("gate " + std::to_string(id) + ": payload must be a string");
      }
    } else if (op == "add" || op == "mul") {
      r.op = op == "add" ? GateOp::Add : GateOp::Mul;
      if (!payload.is_array() || payload.size() != 2) {
        throw ParseError("gate " + std::to_string(id) + ": payload must be [left, right]");
      }
      r.left = payload[0].get<std::int64_t>();
      r.right = payload[1].get<std::int64_t>();
    } else {
      throw ParseError("gate " + std::to_string(id) + ": unknown op '" + op + "'");
    }
    if (!raw.emplace(id, std::move(r)).second) throw ParseError("duplicate gate id " + std::to_string(id));
  }
  for (const auto& [id, r] : raw) {
    if (r.op != GateOp::Add && r.op != GateOp::Mul) continue;
    for (std::int64_t child : {r.left, r.right}) {
      if (!raw.count(child)) {
        throw ParseError("gate " + std::to_string(id) + " references unknown gate " + std::to_string(child));
      }
    }
  }

  // Iterative DFS post-order from ascending ids gives a deterministic
  // topological relabeling (identity on documents that are already dense
  // and topologically ordered).
  std::map<std::int64_t, int> state;  // 1 = on stack, 2 = done
  std::vector<Gate> out_gates;
  for (const auto& [start, unused] : raw) {
    if (state[start] == 2) continue;
    std::vector<std::pair<std::int64_t, int>> stack{{start, 0}};
    state[start] = 1;
    while (!stack.empty()) {
      auto& [id, stage] = stack.back();
      const Raw& r = raw.at(id);
      bool inner = r.op == GateOp::Add || r.op == GateOp::Mul;
      if (inner && stage < 2) {
        std::int64_t child = stage == 0 ? r.left : r.right;
        ++stage;
        int s = state[child];
        if (s == 1) throw ParseError("cycle through gate " + std::to_string(child));
        if (s == 0) {
          state[child] = 1;
          stack.push_back({child, 0});
        }
        continue;
      }
      Gate g;
      g.op = r.op;
      if (r.op == GateOp::Var) {
        g.var = VarRef::parse(r.payload);
      } else if (r.op == GateOp::Const) {
        g.value = Scalar(field, Rational::parse(r.payload));
      } else {
        g.left = relabel.at(r.left);
        g.right = relabel.at(r.right);
      }
      relabel[id] = static_cast<GateId>(out_gates.size());
      out_gates.push_back(std::move(g));
      state[id] = 2;
      stack.pop_back();
    }
  }
  // Repeated identical leaves in a document are merged; shared leaves unwind
  // to the same formula, so semantics and formula equality are unchanged.
  Circuit built(field);
  std::vector<GateId> ids;
  ids.reserve(out_gates.size());
  for (const Gate& g : out_gates) {
    switch (g.op) {
      case GateOp::Var:
        ids.push_back(built.var(g.var));
        break;
      case GateOp::Const:
        ids.push_back(built.constant(g.value));
        break;
      case GateOp::Add:
        ids.push_back(built.add(ids[g.left], ids[g.right]));
        break;
      case GateOp::Mul:
        ids.push_back(built.mul(ids[g.left], ids[g.right]));
        break;
    }
  }
  for (auto& [old_id, new_id] : relabel) new_id = ids[new_id];

  if (doc.contains("outputs")) {
    for (const json& o : doc.at("outputs")) {
      std::int64_t id = o.get<std::int64_t>();
      auto it = relabel.find(id);
      if (it == relabel.end()) throw ParseError("output references unknown gate " + std::to_string(id));
      built.add_output(it->second);
    }
  }
  return built;
}

}  // namespace

Circuit circuit_from_json(const json& doc, std::map<std::int64_t, GateId>& relabel) {
  try {
    return circuit_from_json_impl(doc, relabel);
  } catch (const json::exception& err) {
    throw ParseError(std::string("malformed circuit document: ") + err.what());
  }
}

json circuit_to_json(const Circuit& c) {
  json gates = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gate(static_cast<GateId>(i));
    json rec = {{"id", i}};
    switch (g.op) {
      case GateOp::Var:
        rec["op"] = "var";
        rec["payload"] = g.var.str();
        break;
      case GateOp::Const:
        rec["op"] = "const";
        rec["payload"] = g.value.str();
        break;
      case GateOp::Add:
        rec["op"] = "add";
        rec["payload"] = {g.left, g.right};
        break;
      case GateOp::Mul:
        rec["op"] = "mul";
        rec["payload"] = {g.left, g.right};
        break;
    }
    gates.push_back(std::move(rec));
  }
  return json{{"field", c.field().name()}, {"gates", std::move(gates)}, {"outputs", c.outputs()}};
}

std::string print_circuit(const Circuit& c) { return circuit_to_json(c).dump(); }

Circuit poly_to_circuit(const NcPoly& f) {
  Circuit c(f.field());
  if (f.is_zero()) {
    c.add_output(c.constant(Scalar::zero(f.field())));
    return c;
  }
  GateId acc = 0;
  bool first = true;
  for (const Term& t : f.terms()) {
    GateId m = 0;
    if (t.word.empty()) {
      m = c.constant(t.coeff);
    } else {
      m = c.var(t.word[0]);
      for (std::size_t i = 1; i < t.word.size(); ++i) m = c.mul(m, c.var(t.word[i]));
      if (!t.coeff.is_one()) m = c.mul(c.constant(t.coeff), m);
    }
    acc = first ? m : c.add(acc, m);
    first = false;
  }
  c.add_output(acc);
  return c;
}

std::string formula_str(const Circuit& c, GateId root, std::size_t max_chars) {
  std::string out;
  // Precedence: 0 = sum context, 1 = product context.
  auto emit = [&](auto&& self, GateId g, int ctx) -> void {
    if (out.size() > max_chars) throw CapExceeded("formula text exceeds " + std::to_string(max_chars) + " characters");
    const Gate& gate = c.gate(g);
    switch (gate.op) {
      case GateOp::Var:
        out += gate.var.str();
        return;
      case GateOp::Const: {
        std::string s = gate.value.str();
        if (ctx > 0 && s[0] == '-') {
          out += "(" + s + ")";
        } else {
          out += s;
        }
        return;
      }
      case GateOp::Add: {
        if (ctx > 0) out += "(";
        self(self, gate.left, 0);
        const Gate& r = c.gate(gate.right);
        bool minus = r.op == GateOp::Mul && c.gate(r.left).op == GateOp::Const &&
                     c.gate(r.left).value == -Scalar::one(c.field());
        if (minus) {
          out += " - ";
          const Gate& rr = c.gate(r.right);
          bool wrap = rr.op == GateOp::Add;
          if (wrap) out += "(";
          self(self, r.right, wrap ? 0 : 1);
          if (wrap) out += ")";
        } else {
          out += " + ";
          self(self, gate.right, 0);
        }
        if (ctx > 0) out += ")";
        return;
      }
      case GateOp::Mul:
        self(self, gate.left, 1);
        out += "*";
        self(self, gate.right, 1);
        return;
    }
  };
  emit(emit, root, 0);
  return out;
}

bool isomorphic(const Circuit& a, GateId ra, const Circuit& b, GateId rb) {
  if (a.field() != b.field()) return false;
  std::unordered_map<GateId, GateId> fwd, bwd;
  std::vector<std::pair<GateId, GateId>> stack{{ra, rb}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    auto f = fwd.find(x);
    auto r = bwd.find(y);
    if (f != fwd.end() || r != bwd.end()) {
      if (f == fwd.end() || r == bwd.end() || f->second != y || r->second != x) return false;
      continue;
    }
    const Gate& gx = a.gate(x);
    const Gate& gy = b.gate(y);
    if (gx.op != gy.op) return false;
    if (gx.op == GateOp::Var && gx.var != gy.var) return false;
    if (gx.op == GateOp::Const && gx.value != gy.value) return false;
    fwd.emplace(x, y);
    bwd.emplace(y, x);
    if (gx.op == GateOp::Add || gx.op == GateOp::Mul) {
      stack.push_back({gx.right, gy.right});
      stack.push_back({gx.left, gy.left});
    }
  }
  return true;
}

// ------------------------------------------------------------ semantics

NcPoly expand(const Circuit& c, GateId root, std::size_t cap) {
  if (cap == 0) throw PreconditionError("monomial cap must be at least 1");
  std::vector<char> mask = cone_mask(c, {root});
  std::vector<NcPoly> val(root + 1);
  for (GateId g = 0; g <= root; ++g) {
    if (!mask[g]) continue;
    const Gate& gate = c.gate(g);
    switch (gate.op) {
      case GateOp::Var:
        val[g] = NcPoly::variable(gate.var, c.field());
        break;
      case GateOp::Const:
        val[g] = NcPoly::constant(gate.value);
        break;
      case GateOp::Add:
        val[g] = val[gate.left] + val[gate.right];
        break;
      case GateOp::Mul:
        val[g] = val[gate.left] * val[gate.right];
        break;
    }
    if (val[g].size() > cap) {
      throw CapExceeded("expansion of gate " + std::to_string(g) + " has " + std::to_string(val[g].size()) +
                        " monomials, above the cap of " + std::to_string(cap));
    }
  }
  return val[root];
}

std::vector<NcPoly> expand(const Circuit& c, std::size_t cap) {
  std::vector<NcPoly> out;
  out.reserve(c.outputs().size());
  for (GateId o : c.outputs()) out.push_back(expand(c, o, cap));
  return out;
}

bool formula_equal(const Circuit& a, GateId ra, const Circuit& b, GateId rb) {
  if (a.field() != b.field()) return false;
  const bool same_table = &a == &b;
  std::unordered_map<std::uint64_t, bool> memo;
  auto key = [](GateId x, GateId y) { return (static_cast<std::uint64_t>(x) << 32) | y; };
  // Post-order over gate pairs; a pair is pushed twice, once to schedule its
  // children and once to combine their answers.
  std::vector<std::pair<GateId, GateId>> stack{{ra, rb}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    std::uint64_t k = key(x, y);
    if (memo.count(k)) {
      stack.pop_back();
      continue;
    }
    if (same_table && x == y) {
      memo[k] = true;
      stack.pop_back();
      continue;
    }
    const Gate& gx = a.gate(x);
    const Gate& gy = b.gate(y);
    if (gx.op != gy.op) {
      memo[k] = false;
      stack.pop_back();
      continue;
    }
    if (gx.op == GateOp::Var || gx.op == GateOp::Const) {
      memo[k] = gx.op == GateOp::Var ? gx.var == gy.var : gx.value == gy.value;
      stack.pop_back();
      continue;
    }
    auto lk = memo.find(key(gx.left, gy.left));
    if (lk != memo.end() && !lk->second) {
      memo[k] = false;
      stack.pop_back();
      continue;
    }
    auto rk = memo.find(key(gx.right, gy.right));
    if (lk != memo.end() && rk != memo.end()) {
      memo[k] = rk->second;
      stack.pop_back();
      continue;
    }
    if (lk == memo.end()) {
      stack.push_back({gx.left, gy.left});
    } else {
      stack.push_back({gx.right, gy.right});
    }
  }
  return memo.at(key(ra, rb));
}

bool formula_equal(const Circuit& a, const Circuit& b) {
  if (a.outputs().size() != 1 || b.outputs().size() != 1) {
    throw PreconditionError("formula_equal expects single-output circuits");
  }
  return formula_equal(a, a.output(), b, b.output());
}

namespace {

GateId balanced_sum(Circuit& out, const std::vector<GateId>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return terms[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  GateId l = balanced_sum(out, terms, lo, mid);
  GateId r = balanced_sum(out, terms, mid, hi);
  return out.add(l, r);
}

}  // namespace

LoweredFamily matrix_expand(const Circuit& c, std::size_t d) {
  if (d == 0) throw PreconditionError("matrix dimension must be at least 1");
  if (d > VarRef::kMaxEntry) throw PreconditionError("matrix dimension too large");
  LoweredFamily fam;
  fam.dim = d;
  fam.circuit = Circuit(c.field());
  Circuit& out = fam.circuit;
  const std::size_t d2 = d * d;
  std::vector<char> mask = cone_mask(c, c.outputs());
  std::vector<std::vector<GateId>> grid(c.size());
  std::vector<GateId> terms(d);
  for (GateId g = 0; g < c.size(); ++g) {
    if (!mask[g]) continue;
    const Gate& gate = c.gate(g);
    std::vector<GateId>& m = grid[g];
    m.resize(d2);
    switch (gate.op) {
      case GateOp::Var: {
        if (gate.var.kind() != VarKind::X) {
          throw PreconditionError("matrix lowering expects X variables, found " + gate.var.str());
        }
        for (std::size_t j = 0; j < d; ++j) {
          for (std::size_t k = 0; k < d; ++k) {
            m[j * d + k] = out.var(VarRef::entry(gate.var.index(), static_cast<std::uint32_t>(j + 1),
                                                 static_cast<std::uint32_t>(k + 1)));
          }
        }
        break;
      }
      case GateOp::Const: {
        GateId diag = out.constant(gate.value);
        GateId off = d > 1 ? out.constant(Scalar::zero(c.field())) : diag;
        for (std::size_t j = 0; j < d; ++j) {
          for (std::size_t k = 0; k < d; ++k) m[j * d + k] = j == k ? diag : off;
        }
        break;
      }
      case GateOp::Add:
        for (std::size_t e = 0; e < d2; ++e) m[e] = out.add(grid[gate.left][e], grid[gate.right][e]);
        break;
      case GateOp::Mul: {
        const Gate& l = c.gate(gate.left);
        const Gate& r = c.gate(gate.right);
        // Scalar times matrix needs no row-column sums.
        if (l.op == GateOp::Const) {
          GateId s = out.constant(l.value);
          for (std::size_t e = 0; e < d2; ++e) m[e] = out.mul(s, grid[gate.right][e]);
        } else if (r.op == GateOp::Const) {
          GateId s = out.constant(r.value);
          for (std::size_t e = 0; e < d2; ++e) m[e] = out.mul(grid[gate.left][e], s);
        } else {
          const auto& A = grid[gate.left];
          const auto& B = grid[gate.right];
          for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < d; ++k) {
              for (std::size_t t = 0; t < d; ++t) terms[t] = out.mul(A[j * d + t], B[t * d + k]);
              m[j * d + k] = balanced_sum(out, terms, 0, d);
            }
          }
        }
        break;
      }
    }
  }
  for (GateId o : c.outputs()) {
    fam.entries.push_back(grid[o]);
    for (GateId e : grid[o]) out.add_output(e);
  }
  return fam;
}

Circuit circuit_to_field(const Circuit& c, Field target) {
  Circuit out(target);
  std::vector<GateId> map(c.size());
  for (GateId g = 0; g < c.size(); ++g) {
    const Gate& gate = c.gate(g);
    switch (gate.op) {
      case GateOp::Var:
        map[g] = out.var(gate.var);
        break;
      case GateOp::Const:
        map[g] = out.constant(gate.value.to_field(target));
        break;
      case GateOp::Add:
        map[g] = out.add(map[gate.left], map[gate.right]);
        break;
      case GateOp::Mul:
        map[g] = out.mul(map[gate.left], map[gate.right]);
        break;
    }
  }
  for (GateId o : c.outputs()) out.add_output(map[o]);
  return out;
}

std::vector<Matrix> eval_on_matrices(const Circuit& c, const MatrixAssignment& assignment, std::size_t dim) {
  for (const auto& [v, m] : assignment) {
    if (m.dim() != dim) throw PreconditionError("matrix for " + v.str() + " has dimension " + std::to_string(m.dim()));
    if (m.field() != c.field()) throw FieldMismatch("matrix for " + v.str() + " over " + m.field().name());
  }
  std::vector<char> mask = cone_mask(c, c.outputs());
  std::vector<Matrix> val(c.size());
  for (GateId g = 0; g < c.size(); ++g) {
    if (!mask[g]) continue;
    const Gate& gate = c.gate(g);
    switch (gate.op) {
      case GateOp::Var: {
        auto it = assignment.find(gate.var);
        if (it == assignment.end()) throw PreconditionError("no matrix assigned to " + gate.var.str());
        val[g] = it->second;
        break;
      }
      case GateOp::Const:
        val[g] = Matrix::scalar(gate.value, dim);
        break;
      case GateOp::Add:
        val[g] = val[gate.left] + val[gate.right];
        break;
      case GateOp::Mul:
        val[g] = val[gate.left] * val[gate.right];
        break;
    }
  }
  std::vector<Matrix> out;
  for (GateId o : c.outputs()) out.push_back(val[o]);
  return out;
}

std::vector<Scalar> eval_scalars(const Circuit& c, const std::map<VarRef, Scalar>& assignment) {
  std::vector<char> mask = cone_mask(c, c.outputs());
  std::vector<Scalar> val(c.size());
  for (GateId g = 0; g < c.size(); ++g) {
    if (!mask[g]) continue;
    const Gate& gate = c.gate(g);
    switch (gate.op) {
      case GateOp::Var: {
        auto it = assignment.find(gate.var);
        if (it == assignment.end()) throw PreconditionError("no value assigned to " + gate.var.str());
        if (it->second.field() != c.field()) throw FieldMismatch("value for " + gate.var.str());
        val[g] = it->second;
        break;
      }
      case GateOp::Const:
        val[g] = gate.value;
        break;
      case GateOp::Add:
        val[g] = val[gate.left] + val[gate.right];
        break;
      case GateOp::Mul:
        val[g] = val[gate.left] * val[gate.right];
        break;
    }
  }
  std::vector<Scalar> out;
  for (GateId o : c.outputs()) out.push_back(val[o]);
  return out;
}

}  // namespace matid
