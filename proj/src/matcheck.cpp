#include "matid/matcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "matid/parallel.hpp"

namespace matid {

using nlohmann::json;

namespace {

// Prefix tree over the words of a polynomial, with variables renamed to
// dense slots 0..n-1 in VarRef order.
struct WordTrie {
  struct Node {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> kids;  // (slot, node)
    std::optional<Scalar> coeff;
  };
  std::vector<VarRef> vars;
  std::vector<Node> nodes;

  explicit WordTrie(const NcPoly& f) : vars(f.variables()), nodes(1) {
    for (const Term& t : f.terms()) {
      std::uint32_t at = 0;
      for (const VarRef& v : t.word) {
        auto slot = static_cast<std::uint32_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
        auto& kids = nodes[at].kids;
        auto it = std::find_if(kids.begin(), kids.end(), [&](const auto& k) { return k.first == slot; });
        if (it == kids.end()) {
          nodes.emplace_back();
          nodes[at].kids.emplace_back(slot, static_cast<std::uint32_t>(nodes.size() - 1));
          at = static_cast<std::uint32_t>(nodes.size() - 1);
        } else {
          at = it->second;
        }
      }
      nodes[at].coeff = t.coeff;
    }
  }
};

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) { return a > UINT64_MAX - b ? UINT64_MAX : a + b; }

Matrix random_matrix(std::mt19937_64& rng, Field field, std::size_t d, std::int64_t range) {
  Matrix m(field, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      std::int64_t v = field.is_rational()
                           ? static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * range + 1)) - range
                           : static_cast<std::int64_t>(rng() % field.modulus());
      m.at(r, c) = Scalar(field, Rational(v));
    }
  }
  return m;
}

// Looks for an assignment on which f is functionally nonzero.
std::optional<MatrixAssignment> find_witness(const NcPoly& f, std::size_t d, const SymbolicOptions& opts,
                                             Matrix& value) {
  std::mt19937_64 rng(opts.witness_seed);
  const std::vector<VarRef> vars = f.variables();
  for (unsigned attempt = 0; attempt < opts.witness_attempts; ++attempt) {
    std::int64_t range = attempt < 20 ? 2 : attempt < 60 ? 50 : 100000;
    MatrixAssignment a;
    for (const VarRef& v : vars) a[v] = random_matrix(rng, f.field(), d, range);
    Matrix m = evaluate(f, a, d);
    if (!m.is_zero()) {
      value = std::move(m);
      return a;
    }
  }
  return std::nullopt;
}

}  // namespace

IdentityVerdict symbolic_check(const NcPoly& f, std::size_t d, const SymbolicOptions& opts) {
  if (d == 0) throw PreconditionError("matrix dimension must be at least 1");
  WordTrie trie(f);
  const std::size_t n = trie.vars.size();
  if (n * d * d >= 65536) throw CapExceeded("too many entry variables for symbolic expansion");

  std::uint64_t estimate = 0;
  for (const Term& t : f.terms()) estimate = saturating_add(estimate, saturating_pow(d, t.word.size() + 1));
  if (estimate > opts.monomial_cap) {
    throw CapExceeded("symbolic expansion would produce about " + std::to_string(estimate) +
                      " monomials, above the cap of " + std::to_string(opts.monomial_cap) + "; use random_check");
  }

  IdentityVerdict out;
  out.method = CheckMethod::Symbolic;
  out.dim = d;
  out.field = f.field();

  // Entry (a, b) of f(X_1..X_n) is the sum over words and row paths
  // a = r_0, r_1, ..., r_k = b of coeff * prod e_{v_t, r_{t-1}, r_t}. Entry
  // variables commute, so each product is keyed by its sorted letters.
  using Acc = std::unordered_map<std::u16string, Scalar>;
  std::vector<Acc> acc(d);
  std::u16string letters;
  std::u16string key;
  std::uint64_t produced = 0;
  auto dfs = [&](auto&& self, std::uint32_t node, std::size_t row) -> void {
    const WordTrie::Node& nd = trie.nodes[node];
    if (nd.coeff) {
      key = letters;
      std::sort(key.begin(), key.end());
      auto [it, fresh] = acc[row].try_emplace(key, *nd.coeff);
      if (!fresh) it->second += *nd.coeff;
      ++produced;
    }
    for (const auto& [slot, child] : nd.kids) {
      for (std::size_t col = 0; col < d; ++col) {
        letters.push_back(static_cast<char16_t>(slot * d * d + row * d + col));
        self(self, child, col);
        letters.pop_back();
      }
    }
  };

  bool nonzero = false;
  for (std::size_t a = 0; a < d && !nonzero; ++a) {
    for (Acc& m : acc) m.clear();
    dfs(dfs, 0, a);
    for (std::size_t b = 0; b < d; ++b) {
      ++out.stats.entries_checked;
      for (const auto& [k, c] : acc[b]) {
        if (!c.is_zero()) {
          nonzero = true;
          break;
        }
      }
      if (nonzero) break;
    }
  }
  out.stats.monomials_expanded = produced;

  if (!nonzero) {
    out.verdict = Verdict::Identity;
    return out;
  }
  out.verdict = Verdict::NotIdentity;
  Matrix value;
  if (auto w = find_witness(f, d, opts, value)) {
    out.witness = std::move(*w);
    out.witness_value = std::move(value);
  } else if (!f.field().is_rational()) {
    out.caveat =
        "entry polynomials are nonzero but no assignment over " + f.field().name() +
        " was found on which f is nonzero; over a prime field symbolic and functional vanishing can differ";
  } else {
    // Practically unreachable: random integer points of growing range miss a
    // nonzero rational polynomial with vanishing probability.
    out.caveat = "entry polynomials are nonzero; random witness search was exhausted";
  }
  return out;
}

IdentityVerdict matrix_unit_check(const NcPoly& f, std::size_t d, unsigned threads) {
  if (d == 0) throw PreconditionError("matrix dimension must be at least 1");
  WordTrie trie(f);
  const std::size_t n = trie.vars.size();
  if (!is_multilinear(f, trie.vars)) {
    throw PreconditionError("matrix-unit evaluation is only sound for multilinear polynomials");
  }
  const std::uint64_t units = d * d;
  const std::uint64_t count = saturating_pow(units, n);
  if (count > (UINT64_C(1) << 32)) {
    throw CapExceeded("matrix-unit enumeration of " + std::to_string(n) + " variables on Mat_" + std::to_string(d) +
                      " exceeds 2^32 assignments");
  }

  IdentityVerdict out;
  out.method = CheckMethod::MatrixUnits;
  out.dim = d;
  out.field = f.field();

  auto decode = [&](std::uint64_t index, std::vector<std::uint32_t>& row, std::vector<std::uint32_t>& col) {
    for (std::size_t s = n; s-- > 0;) {
      std::uint64_t u = index % units;
      index /= units;
      row[s] = static_cast<std::uint32_t>(u / d);
      col[s] = static_cast<std::uint32_t>(u % d);
    }
  };

  // Result of evaluating f at the units (row[s], col[s]); entries indexed a*d+b.
  auto eval_units = [&](const std::vector<std::uint32_t>& row, const std::vector<std::uint32_t>& col,
                        std::vector<Scalar>& result) {
    result.assign(d * d, Scalar::zero(f.field()));
    if (trie.nodes[0].coeff) {
      for (std::size_t a = 0; a < d; ++a) result[a * d + a] += *trie.nodes[0].coeff;
    }
    auto dfs = [&](auto&& self, std::uint32_t node, std::uint32_t start, std::uint32_t at) -> void {
      for (const auto& [slot, child] : trie.nodes[node].kids) {
        if (row[slot] != at) continue;
        const WordTrie::Node& c = trie.nodes[child];
        if (c.coeff) result[start * d + col[slot]] += *c.coeff;
        self(self, child, start, col[slot]);
      }
    };
    for (const auto& [slot, child] : trie.nodes[0].kids) {
      const WordTrie::Node& c = trie.nodes[child];
      if (c.coeff) result[row[slot] * d + col[slot]] += *c.coeff;
      dfs(dfs, child, row[slot], col[slot]);
    }
  };

  std::atomic<std::uint64_t> evaluated{0};
  auto hit = [&](std::uint64_t index) {
    std::vector<std::uint32_t> row(n), col(n);
    decode(index, row, col);
    // Every word uses each unit once, so a nonzero product needs the units to
    // form a directed Euler trail: degrees differ by at most one, at most one
    // source and one sink.
    if (n > 0) {
      std::vector<int> balance(d, 0);
      for (std::size_t s = 0; s < n; ++s) {
        ++balance[row[s]];
        --balance[col[s]];
      }
      int sources = 0, sinks = 0;
      for (int b : balance) {
        if (b > 1 || b < -1) return false;
        sources += b == 1;
        sinks += b == -1;
      }
      if (sources > 1 || sinks > 1) return false;
    }
    evaluated.fetch_add(1, std::memory_order_relaxed);
    std::vector<Scalar> result;
    eval_units(row, col, result);
    return std::any_of(result.begin(), result.end(), [](const Scalar& s) { return !s.is_zero(); });
  };

  std::optional<std::uint64_t> first = parallel_first_hit(count, threads, hit);
  out.stats.assignments = first ? *first + 1 : count;
  out.stats.entries_checked = evaluated.load();
  if (!first) {
    out.verdict = Verdict::Identity;
    return out;
  }
  out.verdict = Verdict::NotIdentity;
  std::vector<std::uint32_t> row(n), col(n);
  decode(*first, row, col);
  MatrixAssignment w;
  for (std::size_t s = 0; s < n; ++s) w[trie.vars[s]] = Matrix::unit(f.field(), d, row[s] + 1, col[s] + 1);
  out.witness_value = evaluate(f, w, d);
  out.witness = std::move(w);
  return out;
}

// ------------------------------------------------------------ random

namespace {

// Dense d x d matrix of residues mod p.
struct ModMat {
  std::size_t d = 0;
  std::vector<std::uint64_t> a;
  ModMat() = default;
  explicit ModMat(std::size_t dim) : d(dim), a(dim * dim, 0) {}
  static ModMat identity(std::size_t dim) {
    ModMat m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.a[i * dim + i] = 1;
    return m;
  }
  bool is_zero() const {
    return std::all_of(a.begin(), a.end(), [](std::uint64_t v) { return v == 0; });
  }
};

void mod_mul(const ModMat& x, const ModMat& y, ModMat& out, std::uint64_t p) {
  const std::size_t d = x.d;
  out.d = d;
  out.a.assign(d * d, 0);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t t = 0; t < d; ++t) {
      std::uint64_t v = x.a[r * d + t];
      if (!v) continue;
      for (std::size_t c = 0; c < d; ++c) {
        std::uint64_t s = out.a[r * d + c] + mul_mod(v, y.a[t * d + c], p);
        out.a[r * d + c] = s >= p ? s - p : s;
      }
    }
  }
}

void mod_axpy(std::uint64_t c, const ModMat& x, ModMat& acc, std::uint64_t p) {
  for (std::size_t i = 0; i < x.a.size(); ++i) {
    std::uint64_t s = acc.a[i] + mul_mod(c, x.a[i], p);
    acc.a[i] = s >= p ? s - p : s;
  }
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t p) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % p;
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % p;
  }
}

std::vector<ModMat> trial_matrices(std::uint64_t seed, std::uint64_t trial, std::size_t nvars, std::size_t d,
                                   std::uint64_t p) {
  std::mt19937_64 rng(mix_seed(seed, trial));
  std::vector<ModMat> ms(nvars, ModMat(d));
  for (ModMat& m : ms)
    for (auto& v : m.a) v = uniform_below(rng, p);
  return ms;
}

MatrixAssignment to_assignment(const std::vector<VarRef>& vars, const std::vector<ModMat>& ms, Field field) {
  MatrixAssignment a;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    Matrix m(field, ms[i].d);
    for (std::size_t r = 0; r < ms[i].d; ++r)
      for (std::size_t c = 0; c < ms[i].d; ++c) m.at(r, c) = Scalar::from_residue(field, ms[i].a[r * ms[i].d + c]);
    a[vars[i]] = std::move(m);
  }
  return a;
}

void finish_probable(IdentityVerdict& out, int degree, std::size_t d, const RandomOptions& opts) {
  out.verdict = Verdict::Probable;
  // A nonzero entry polynomial of degree <= deg vanishes at a uniform point
  // with probability <= deg/p; trials are independent.
  Rational per_trial(std::max(degree, 0));
  per_trial = per_trial / Rational(static_cast<std::int64_t>(opts.p));
  if (Rational(1) < per_trial) per_trial = Rational(1);
  mpq_class bound = 1;
  mpq_class base = per_trial.to_mpq();
  for (std::uint64_t t = 0; t < opts.trials; ++t) bound *= base;
  out.failure_bound = Rational(bound);
  if (opts.p <= 2ull * static_cast<std::uint64_t>(std::max(degree, 0)) * d) out.heuristic = true;
}

void check_random_options(std::size_t d, const RandomOptions& opts) {
  if (d == 0) throw PreconditionError("matrix dimension must be at least 1");
  if (opts.trials == 0) throw PreconditionError("random check needs at least one trial");
  if (!is_prime_u64(opts.p) || opts.p >= (UINT64_C(1) << 61)) {
    throw PreconditionError("random check modulus " + std::to_string(opts.p) + " is not a prime below 2^61");
  }
}

}  // namespace

IdentityVerdict random_check(const NcPoly& f, std::size_t d, const RandomOptions& opts) {
  check_random_options(d, opts);
  const Field gf = Field::prime(opts.p);
  if (!f.field().is_rational() && f.field() != gf) {
    throw FieldMismatch("polynomial over " + f.field().name() + " checked over " + gf.name());
  }
  const NcPoly g = f.to_field(gf);
  IdentityVerdict out;
  out.method = CheckMethod::Random;
  out.dim = d;
  out.field = gf;
  if (g.size() != f.size()) {
    out.heuristic = true;
    out.caveat = "some coefficients vanish mod " + std::to_string(opts.p) + "; the check is about f mod p";
  }

  WordTrie trie(g);
  const std::size_t n = trie.vars.size();
  const std::uint64_t p = opts.p;
  auto value_at = [&](const std::vector<ModMat>& ms) {
    ModMat acc(d);
    std::vector<ModMat> prefix(static_cast<std::size_t>(std::max(g.degree(), 0)) + 1);
    prefix[0] = ModMat::identity(d);
    auto dfs = [&](auto&& self, std::uint32_t node, std::size_t depth) -> void {
      const WordTrie::Node& nd = trie.nodes[node];
      if (nd.coeff) mod_axpy(nd.coeff->residue(), prefix[depth], acc, p);
      for (const auto& [slot, child] : nd.kids) {
        mod_mul(prefix[depth], ms[slot], prefix[depth + 1], p);
        self(self, child, depth + 1);
      }
    };
    dfs(dfs, 0, 0);
    return acc;
  };

  std::atomic<std::uint64_t> ran{0};
  auto hit = [&](std::uint64_t trial) {
    ran.fetch_add(1, std::memory_order_relaxed);
    return !value_at(trial_matrices(opts.seed, trial, n, d, p)).is_zero();
  };
  std::optional<std::uint64_t> first = parallel_first_hit(opts.trials, opts.threads, hit, 1);
  out.stats.trials = first ? *first + 1 : opts.trials;
  out.stats.monomials_expanded = g.size();
  if (!first) {
    finish_probable(out, g.degree(), d, opts);
    return out;
  }
  out.verdict = Verdict::NotIdentity;
  MatrixAssignment w = to_assignment(trie.vars, trial_matrices(opts.seed, *first, n, d, p), gf);
  out.witness_value = evaluate(g, w, d);
  out.witness = std::move(w);
  return out;
}

int formal_degree(const Circuit& c, GateId root) {
  std::vector<int> deg(root + 1, 0);
  for (GateId g = 0; g <= root; ++g) {
    const Gate& gate = c.gate(g);
    switch (gate.op) {
      case GateOp::Var:
        deg[g] = 1;
        break;
      case GateOp::Const:
        deg[g] = 0;
        break;
      case GateOp::Add:
        deg[g] = std::max(deg[gate.left], deg[gate.right]);
        break;
      case GateOp::Mul:
        deg[g] = deg[gate.left] + deg[gate.right];
        break;
    }
  }
  return deg[root];
}

IdentityVerdict random_check(const Circuit& c, std::size_t d, const RandomOptions& opts) {
  check_random_options(d, opts);
  if (c.outputs().size() != 1) throw PreconditionError("random check expects a single-output circuit");
  const Field gf = Field::prime(opts.p);
  if (!c.field().is_rational() && c.field() != gf) {
    throw FieldMismatch("circuit over " + c.field().name() + " checked over " + gf.name());
  }
  const GateId root = c.output();
  IdentityVerdict out;
  out.method = CheckMethod::Random;
  out.dim = d;
  out.field = gf;

  std::vector<VarRef> vars;
  std::vector<std::uint64_t> consts(c.size(), 0);
  for (GateId g = 0; g <= root; ++g) {
    const Gate& gate = c.gate(g);
    if (gate.op == GateOp::Var) vars.push_back(gate.var);
    if (gate.op == GateOp::Const) {
      Scalar s = gate.value.to_field(gf);
      if (s.is_zero() != gate.value.is_zero()) {
        out.heuristic = true;
        out.caveat = "some constants vanish mod " + std::to_string(opts.p) + "; the check is about the reduced circuit";
      }
      consts[g] = s.residue();
    }
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  const std::uint64_t p = opts.p;

  auto value_at = [&](const std::vector<ModMat>& ms) {
    std::vector<ModMat> val(root + 1);
    for (GateId g = 0; g <= root; ++g) {
      const Gate& gate = c.gate(g);
      switch (gate.op) {
        case GateOp::Var:
          val[g] = ms[std::lower_bound(vars.begin(), vars.end(), gate.var) - vars.begin()];
          break;
        case GateOp::Const:
          val[g] = ModMat(d);
          for (std::size_t i = 0; i < d; ++i) val[g].a[i * d + i] = consts[g];
          break;
        case GateOp::Add:
          val[g] = val[gate.left];
          mod_axpy(1, val[gate.right], val[g], p);
          break;
        case GateOp::Mul:
          mod_mul(val[gate.left], val[gate.right], val[g], p);
          break;
      }
    }
    return val[root];
  };

  auto hit = [&](std::uint64_t trial) { return !value_at(trial_matrices(opts.seed, trial, vars.size(), d, p)).is_zero(); };
  std::optional<std::uint64_t> first = parallel_first_hit(opts.trials, opts.threads, hit, 1);
  out.stats.trials = first ? *first + 1 : opts.trials;
  if (!first) {
    finish_probable(out, formal_degree(c, root), d, opts);
    return out;
  }
  out.verdict = Verdict::NotIdentity;
  MatrixAssignment w = to_assignment(vars, trial_matrices(opts.seed, *first, vars.size(), d, p), gf);
  Circuit reduced = circuit_to_field(c, gf);
  out.witness_value = eval_on_matrices(reduced, w, d).at(0);
  out.witness = std::move(w);
  return out;
}

// ------------------------------------------------------------ A-L suite

bool AlReport::consistent() const {
  return upper.verdict != Verdict::NotIdentity && lower.verdict == Verdict::NotIdentity;
}

AlReport al_suite(std::size_t d, std::uint64_t seed, unsigned threads) {
  if (d < 1 || d > 4) throw PreconditionError("al_suite supports 1 <= d <= 4");
  AlReport r;
  r.d = d;
  auto vars = x_vars(static_cast<std::uint32_t>(2 * d));
  NcPoly s2d = standard_poly(vars);
  if (d <= 3) {
    r.upper = symbolic_check(s2d, d);
  } else {
    RandomOptions opts;
    opts.p = 1'000'003;
    opts.trials = 20;
    opts.seed = seed;
    opts.threads = threads;
    r.upper = random_check(s2d, d, opts);
  }
  std::span<const VarRef> lower_vars(vars.data(), 2 * d - 1);
  r.lower = matrix_unit_check(standard_poly(lower_vars), d, threads);
  return r;
}

// ------------------------------------------------------------ reports

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Identity:
      return "identity";
    case Verdict::NotIdentity:
      return "not_identity";
    case Verdict::Probable:
      return "probable";
  }
  return "?";
}

std::string method_name(CheckMethod m) {
  switch (m) {
    case CheckMethod::Symbolic:
      return "symbolic";
    case CheckMethod::MatrixUnits:
      return "units";
    case CheckMethod::Random:
      return "random";
  }
  return "?";
}

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(m.at(r, c).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

double log10_of(const Rational& q) {
  if (q.is_zero()) return -INFINITY;
  auto lg = [](const mpz_class& z) {
    long exp = 0;
    double m = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log10(std::fabs(m)) + static_cast<double>(exp) * std::log10(2.0);
  };
  return lg(q.numerator()) - lg(q.denominator());
}

}  // namespace

json to_json(const MatrixAssignment& a) {
  json out = json::object();
  for (const auto& [v, m] : a) out[v.str()] = matrix_json(m);
  return out;
}

json to_json(const IdentityVerdict& v) {
  json out = {{"verdict", verdict_name(v.verdict)},
              {"method", method_name(v.method)},
              {"d", v.dim},
              {"field", v.field.name()},
              {"heuristic", v.heuristic},
              {"stats",
               {{"entries_checked", v.stats.entries_checked},
                {"monomials_expanded", v.stats.monomials_expanded},
                {"assignments", v.stats.assignments},
                {"trials", v.stats.trials}}}};
  if (v.failure_bound) {
    out["failure_bound"] = v.failure_bound->str();
    out["failure_bound_log10"] = log10_of(*v.failure_bound);
  }
  if (v.witness) out["witness"] = to_json(*v.witness);
  if (v.witness_value) out["witness_value"] = matrix_json(*v.witness_value);
  if (!v.caveat.empty()) out["caveat"] = v.caveat;
  return out;
}

json to_json(const AlReport& r) {
  return json{{"d", r.d},
              {"upper", {{"poly", "S_" + std::to_string(2 * r.d)}, {"result", to_json(r.upper)}}},
              {"lower", {{"poly", "S_" + std::to_string(2 * r.d - 1)}, {"result", to_json(r.lower)}}},
              {"consistent", r.consistent()}};
}

}  // namespace matid
