#include "suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "matid/circuit.hpp"
#include "matid/ideals.hpp"
#include "matid/matcheck.hpp"
#include "matid/parallel.hpp"
#include "matid/parse.hpp"
#include "matid/proofsys.hpp"
#include "matid/spoly.hpp"

#ifndef MATID_CORPUS_DIR
#define MATID_CORPUS_DIR "corpus"
#endif

namespace matid::suite {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Thrown by `require`; the message becomes the failure detail.
struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failed(what);
}

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Failed("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Failed(path.string() + ": " + e.what());
  }
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << v;
  return ss.str();
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scalar small(Field f, std::mt19937_64& rng, int lo, int hi) {
  return Scalar(f, Rational(lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1))));
}

NcPoly rand_poly(std::mt19937_64& rng, std::uint32_t nvars, std::size_t max_deg, std::size_t max_terms,
                 bool with_z = false) {
  const Field q = Field::rationals();
  std::vector<Term> terms;
  std::size_t n = 1 + rng() % max_terms;
  for (std::size_t t = 0; t < n; ++t) {
    Word w;
    std::size_t len = rng() % (max_deg + 1);
    for (std::size_t i = 0; i < len; ++i) {
      auto idx = static_cast<std::uint32_t>(1 + rng() % nvars);
      w.push_back(with_z && rng() % 3 == 0 ? VarRef::z(idx) : VarRef::x(idx));
    }
    terms.push_back({w, small(q, rng, -4, 4)});
  }
  return NcPoly::from_terms(q, terms);
}

Circuit rand_circuit(std::mt19937_64& rng, std::uint32_t nvars, std::size_t max_gates, Field f) {
  Circuit c(f);
  std::size_t leaves = 1 + rng() % 4;
  for (std::size_t i = 0; i < leaves; ++i) {
    if (rng() % 5 == 0) {
      c.constant(small(f, rng, -3, 3));
    } else {
      c.var(VarRef::x(static_cast<std::uint32_t>(1 + rng() % nvars)));
    }
  }
  std::size_t target = c.size() + rng() % (max_gates - c.size() + 1);
  while (c.size() < target) {
    auto a = static_cast<GateId>(rng() % c.size());
    auto b = static_cast<GateId>(rng() % c.size());
    switch (rng() % 5) {
      case 0:
        c.var(VarRef::x(static_cast<std::uint32_t>(1 + rng() % nvars)));
        break;
      case 1:
      case 2:
        c.add(a, b);
        break;
      default:
        c.mul(a, b);
        break;
    }
  }
  c.add_output(static_cast<GateId>(c.size() - 1));
  return c;
}

// Rank over Q by plain elimination; independent of the library's solvers.
std::size_t rational_rank(std::vector<std::vector<Rational>> m) {
  std::size_t rank = 0;
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && m[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m[r][c].is_zero()) continue;
      Rational f = m[r][c] / m[rank][c];
      for (std::size_t k = 0; k < cols; ++k) m[r][k] = m[r][k] - f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

GateId swapped_copy(Circuit& c, GateId root, GateId target) {
  std::unordered_map<GateId, GateId> memo;
  std::function<GateId(GateId)> go = [&](GateId g) -> GateId {
    if (auto it = memo.find(g); it != memo.end()) return it->second;
    const Gate gate = c.gate(g);
    GateId out = g;
    if (gate.op == GateOp::Add || gate.op == GateOp::Mul) {
      GateId l = go(gate.left), r = go(gate.right);
      if (g == target) std::swap(l, r);
      out = gate.op == GateOp::Add ? c.add(l, r) : c.mul(l, r);
    }
    memo.emplace(g, out);
    return out;
  };
  return go(root);
}

std::vector<GateId> inner_gates(const Circuit& c, GateId root) {
  std::vector<char> seen(c.size());
  std::vector<GateId> stack{root}, out;
  while (!stack.empty()) {
    GateId g = stack.back();
    stack.pop_back();
    if (seen[g]) continue;
    seen[g] = 1;
    const Gate& gate = c.gate(g);
    if (gate.op == GateOp::Add || gate.op == GateOp::Mul) {
      out.push_back(g);
      stack.push_back(gate.left);
      stack.push_back(gate.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

NcPoly identity_input(const json& item) {
  if (item.contains("standard")) return standard_poly(x_vars(item.at("standard").get<std::uint32_t>()));
  return parse_poly(item.at("poly").get<std::string>());
}

// ------------------------------------------------------------ criteria

std::string c1_amitsur_levitzki(const Options& o) {
  json doc = load_json(fs::path(o.corpus_dir) / "identities.json");
  std::ostringstream out;
  int checked = 0;
  for (const json& item : doc.at("identities")) {
    if (!item.contains("standard")) continue;
    const std::string name = item.at("name").get<std::string>();
    const NcPoly f = identity_input(item);
    const std::size_t d = item.at("d").get<std::size_t>();
    const bool expect_identity = item.at("expect").get<std::string>() == "identity";
    auto t0 = std::chrono::steady_clock::now();
    IdentityVerdict v = expect_identity ? symbolic_check(f, d) : matrix_unit_check(f, d, o.threads);
    double secs = since(t0);
    if (expect_identity) {
      require(v.verdict == Verdict::Identity, name + ": symbolic check did not confirm the identity");
      if (item.contains("max_seconds")) {
        require(secs < item.at("max_seconds").get<double>(), name + " took " + fmt(secs) + " s");
      }
      out << name << " identity (" << fmt(secs, 2) << " s); ";
    } else {
      require(v.verdict == Verdict::NotIdentity && v.witness, name + ": no matrix-unit witness");
      Matrix value = evaluate(f, *v.witness, d);
      require(!value.is_zero(), name + ": witness evaluates to zero");
      std::string w;
      for (const auto& [var, m] : *v.witness) {
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t k = 0; k < d; ++k)
            if (m.at(j, k).is_one()) w += (w.empty() ? "" : ",") + var.str() + "=E" + std::to_string(j + 1) + std::to_string(k + 1);
      }
      out << name << " witness " << w << "; ";
    }
    ++checked;
  }
  require(checked == 6, "expected six standard-polynomial fixtures, found " + std::to_string(checked));
  std::string s = out.str();
  return s.substr(0, s.size() - 2);
}

std::string c2_entry_example(const Options& o) {
  const json e = load_json(fs::path(o.corpus_dir) / "worked_examples.json").at("entry");
  Circuit c = parse_circuit(e.at("poly").get<std::string>());
  LoweredFamily fam = matrix_expand(c, e.at("d").get<std::size_t>());
  GateId g = fam.entry(e.at("row").get<std::size_t>(), e.at("col").get<std::size_t>());
  const std::string formula = formula_str(fam.circuit, g);
  require(formula == e.at("formula").get<std::string>(), "entry formula is " + formula);
  require(expand(fam.circuit, g) == parse_poly(e.at("expansion").get<std::string>()), "entry expansion differs");
  return "entry (1,1) = " + formula;
}

std::string c3_commutator_q(const Options& o) {
  const json items = load_json(fs::path(o.corpus_dir) / "worked_examples.json").at("commutator_q");
  std::ostringstream out;
  for (const json& item : items) {
    const std::string text = item.at("poly").get<std::string>();
    const NcPoly f = parse_poly(text);
    CommutatorQ q = q_commutator_exact(f);
    CertificateCheck ck = verify_certificate(q.certificate);
    require(ck.valid && ck.instance_count == q.q, text + ": certificate does not verify with q instances");
    // Oracle: half the rank of the coefficient matrix.
    std::vector<VarRef> vars = f.variables();
    std::vector<std::vector<Rational>> a(vars.size(), std::vector<Rational>(vars.size(), Rational(0)));
    for (std::size_t i = 0; i < vars.size(); ++i)
      for (std::size_t j = 0; j < vars.size(); ++j) a[i][j] = f.coeff(Word{vars[i], vars[j]}).value();
    std::size_t oracle = rational_rank(a) / 2;
    std::size_t expected = item.at("q").get<std::size_t>();
    require(q.q == expected && oracle == expected,
            text + ": q = " + std::to_string(q.q) + ", rank oracle " + std::to_string(oracle) + ", fixture " +
                std::to_string(expected));
    out << "Q(" << text << ") = " << q.q << "; ";
  }
  std::string s = out.str();
  return s.substr(0, s.size() - 2);
}

std::string c4_counterexample(const Options& o) {
  const json e = load_json(fs::path(o.corpus_dir) / "worked_examples.json").at("counterexample");
  const NcPoly f = parse_poly(e.at("poly").get<std::string>());
  IdentityVerdict v = symbolic_check(f, e.at("d").get<std::size_t>());
  require(v.verdict == Verdict::Identity, "not an identity of Mat_2");
  std::vector<NcPoly> gens;
  for (const json& g : e.at("generators")) gens.push_back(parse_poly(g.get<std::string>()));
  require(gens.size() == 1 && gens[0] == standard_poly(x_vars(4)), "generator fixture is not S_4");
  auto t0 = std::chrono::steady_clock::now();
  MembershipResult m = multilinear_membership(f, gens, x_vars(e.at("vars").get<std::uint32_t>()));
  double secs = since(t0);
  require(m.member == e.at("member").get<bool>(), "membership verdict differs from the fixture");
  require(m.dimension == e.at("dimension").get<std::size_t>(), "dimension " + std::to_string(m.dimension));
  require(m.rank_with_target == m.span_rank + 1, "rank does not grow when f is adjoined");
  require(secs < e.at("max_seconds").get<double>(), "membership took " + fmt(secs) + " s");
  Scalar pairing = Scalar::zero(f.field());
  for (const Term& t : f.terms()) pairing += m.dual_witness.coeff(t.word) * t.coeff;
  require(!pairing.is_zero(), "dual witness does not separate f");
  return "identity of Mat_2; non-member of the S_4 ideal (dimension " + std::to_string(m.dimension) + ", span rank " +
         std::to_string(m.span_rank) + ", " + fmt(secs, 2) + " s)";
}

std::string c5_lowering(const Options& o) {
  std::mt19937_64 rng(mix_seed(o.seed, 5));
  const Field f = Field::prime(101);
  std::size_t worst_gates = 0;
  double worst_ratio = 0;
  for (int i = 0; i < 100; ++i) {
    Circuit c = rand_circuit(rng, 3, 60, f);
    std::size_t d = 1 + i % 3;
    LoweredFamily fam = matrix_expand(c, d);
    double ratio = static_cast<double>(fam.circuit.size()) / static_cast<double>(d * d * d * c.size());
    worst_ratio = std::max(worst_ratio, ratio);
    worst_gates = std::max(worst_gates, c.size());
    require(fam.circuit.size() <= kLoweringSizeConstant * d * d * d * c.size(),
            "sample " + std::to_string(i) + " exceeds the size bound");
    MatrixAssignment a;
    std::map<VarRef, Scalar> entries;
    for (std::uint32_t v = 1; v <= 3; ++v) {
      Matrix m(f, d);
      for (std::uint32_t j = 1; j <= d; ++j)
        for (std::uint32_t k = 1; k <= d; ++k) {
          m.at(j - 1, k - 1) = Scalar::from_residue(f, rng() % 101);
          entries[VarRef::entry(v, j, k)] = m.at(j - 1, k - 1);
        }
      a[VarRef::x(v)] = m;
    }
    Matrix direct = eval_on_matrices(c, a, d).at(0);
    std::vector<Scalar> lowered = eval_scalars(fam.circuit, entries);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        require(direct.at(j, k) == lowered[j * d + k], "sample " + std::to_string(i) + " disagrees");
  }
  return "100/100 agree; max size/(d^3 size) = " + fmt(worst_ratio) + " <= c = " +
         std::to_string(kLoweringSizeConstant) + "; largest source " + std::to_string(worst_gates) + " gates";
}

std::string c6_rank_bridge(const Options& o) {
  std::mt19937_64 rng(mix_seed(o.seed, 6));
  const Field q = Field::rationals();
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng() % 3, r = 1 + rng() % 5;
    RankDecomposition d{q, 3, n, {}};
    for (std::size_t i = 0; i < r; ++i) {
      SimpleTensor s;
      for (int k = 0; k < 3; ++k) {
        std::vector<Scalar> v;
        for (std::size_t m = 0; m < n; ++m) v.push_back(small(q, rng, -2, 2));
        s.vectors.push_back(v);
      }
      d.terms.push_back(s);
    }
    std::set<std::string> shared;
    for (const GenerationCertificate& c : cert_from_decomposition(d)) {
      CertificateCheck ck = verify_certificate(c);
      require(ck.valid && ck.instance_count <= r, "decomposition " + std::to_string(trial) + " certificate");
      for (const Summand& s : c.summands) shared.insert(s.instance.expansion().str());
    }
    require(shared.size() <= r, "decomposition " + std::to_string(trial) + " uses more than R instances");
  }
  const Field gf2 = Field::prime(2);
  std::string ranks;
  for (int trial = 0; trial < 10; ++trial) {
    Tensor t(gf2, 3, 2);
    for (std::size_t pos = 0; pos < t.entries(); ++pos) t.set(t.unflatten(pos), Scalar::from_residue(gf2, rng() % 2));
    RankSearch r = tensor_rank_bruteforce(t, gf2, 4);
    require(r.found && r.witness.sum() == t, "GF(2) tensor " + std::to_string(trial) + ": no witness");
    std::set<std::string> used;
    for (const GenerationCertificate& c : cert_from_decomposition(r.witness)) {
      CertificateCheck ck = verify_certificate(c);
      require(ck.valid && ck.instance_count <= r.rank, "GF(2) tensor " + std::to_string(trial));
      for (const Summand& s : c.summands) {
        if (!s.instance.expansion().is_zero()) used.insert(s.instance.expansion().str());
      }
    }
    require(used.size() <= r.rank, "GF(2) tensor " + std::to_string(trial) + ": instances exceed rank");
    ranks += std::to_string(r.rank);
  }
  return "50 rational decompositions certified within R; GF(2) ranks " + ranks + " bound their certificates";
}

std::vector<fs::path> proof_files(const std::string& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".proof") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string c7_proofs(const Options& o) {
  std::vector<fs::path> files = proof_files(o.corpus_dir);
  std::map<SystemVariant, int> systems;
  std::vector<ProofScript> scripts;
  for (const fs::path& p : files) {
    ProofScript s = proof_from_json(load_json(p));
    ProofCheck r = check_proof(s);
    require(r.accepted, p.filename().string() + " rejected at line " +
                            std::to_string(r.rejection ? r.rejection->line + 1 : 0) + ": " +
                            (r.rejection ? r.rejection->detail : ""));
    std::size_t d = s.system.variant == SystemVariant::PMatd ? s.system.d : 1;
    SpotcheckReport sc = soundness_spotcheck(s, d, 10007, 50, mix_seed(o.seed, 70), o.threads);
    require(sc.discrepancies.empty(), p.filename().string() + ": spotcheck found a nonzero line");
    ++systems[s.system.variant];
    scripts.push_back(std::move(s));
  }
  require(scripts.size() >= 5, "fewer than five corpus proofs");
  require(systems[SystemVariant::PMatd] >= 3 && systems[SystemVariant::PC] >= 1 && systems[SystemVariant::PCBool] >= 1,
          "corpus does not span PC, P_Mat2 (three proofs) and PCBool");

  std::mt19937_64 rng(mix_seed(o.seed, 7));
  int rejected = 0, iso = 0;
  for (int trial = 0; trial < 100;) {
    ProofScript s = scripts[rng() % scripts.size()];
    std::size_t k = rng() % s.lines.size();
    std::vector<GateId> inner = inner_gates(s.gates, s.lines[k].rhs);
    if (inner.empty()) continue;
    ++trial;
    GateId old_rhs = s.lines[k].rhs;
    s.lines[k].rhs = swapped_copy(s.gates, old_rhs, inner[rng() % inner.size()]);
    bool same = isomorphic(s.gates, old_rhs, s.gates, s.lines[k].rhs);
    ProofCheck r = check_proof(s);
    if (same) {
      ++iso;
      continue;
    }
    require(!r.accepted, "a mutation of line " + std::to_string(k + 1) + " was accepted");
    ++rejected;
  }

  std::string comm;
  for (const SystemSpec& sys : {SystemSpec::pc(), SystemSpec::pmat2()}) {
    ProofScript s;
    s.system = sys;
    s.gates = Circuit(sys.field);
    GateId x = s.gates.var(VarRef::x(1)), y = s.gates.var(VarRef::x(2));
    s.lines.push_back({s.gates.mul(x, y), s.gates.mul(y, x), AxiomInstance{AxiomKind::ProductCommutativity, {}, {}, {}}});
    bool ok = check_proof(s).accepted;
    require(ok == (sys.variant == SystemVariant::PC), "x*y = y*x verdict wrong in " + sys.name());
  }
  return std::to_string(scripts.size()) + " proofs accepted and spot-checked (50 trials each); mutations: " +
         std::to_string(rejected) + " rejected, " + std::to_string(iso) +
         " gate-isomorphic; x*y = y*x accepted by PC, rejected by P_Mat2";
}

std::string c8_lemmas(const Options& o) {
  std::mt19937_64 rng(mix_seed(o.seed, 8));
  const Field q = Field::rationals();
  for (int i = 0; i < 100; ++i) {
    std::size_t d = 1 + i % 3;
    std::vector<NcPoly> args;
    for (std::size_t k = 0; k < 2 * d; ++k) args.push_back(rand_poly(rng, 3, 1, 2));
    args[rng() % args.size()] = NcPoly::constant(small(q, rng, 1, 9));
    require(standard_poly(args).is_zero(), "S_2d with a constant argument is nonzero (case " + std::to_string(i) + ")");
  }
  for (int i = 0; i < 100; ++i) {
    NcPoly f = rand_poly(rng, 3, 4, 6, true), g = rand_poly(rng, 3, 4, 6, true);
    Scalar a = small(q, rng, -5, 5);
    require(bracket_map(f.scaled(a) + g) == bracket_map(f).scaled(a) + bracket_map(g), "bracket map not linear");
    for (int j : {0, 2, 3}) {
      require(bracket_map(homogeneous_part(f, j, Grading::ZDegree)).is_zero(), "bracket map does not annihilate");
    }
  }
  for (int i = 0; i < 100; ++i) {
    std::uint32_t n = 2 + rng() % 5;
    auto xs = x_vars(n);
    CommutatorPolynomial f(q);
    std::size_t terms = 1 + rng() % 3;
    for (std::size_t t = 0; t < terms; ++t) {
      std::vector<VarRef> perm = xs;
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<std::vector<VarRef>> factors;
      std::size_t at = 0;
      while (at < n) {
        std::size_t left = n - at;
        std::size_t len = left <= 3 ? left : 2 + rng() % (left - 3);
        factors.emplace_back(perm.begin() + at, perm.begin() + at + len);
        at += len;
      }
      f.add(small(q, rng, -4, 4), std::move(factors));
    }
    VarRef v = xs[rng() % n];
    Scalar c = small(q, rng, -10, 10);
    require(collapse_check(f, v, c), "collapse_check failed");
    require(substitute(f.expand(), {{v, NcPoly::constant(c)}}).is_zero(), "collapse oracle failed");
  }
  const NcPoly s2 = standard_poly(x_vars(2));
  for (int i = 0; i < 100; ++i) {
    Substitution s;
    for (const VarRef& v : x_vars(2)) s[v] = rand_poly(rng, 3, 2, 3);
    SubstitutionInstance in = SubstitutionInstance::of(s2, s);
    auto red = linear_reduce({in});
    NcPoly top = homogeneous_part(in.expansion(), 2);
    require((red.empty() ? NcPoly(q) : red[0].expansion()) == top, "linear_reduce lost the degree-2 part");
  }
  for (int i = 0; i < 100; ++i) {
    std::size_t k = 1 + rng() % 2;
    std::vector<NcPoly> fs, gs;
    for (std::size_t t = 0; t < k; ++t) {
      fs.push_back(rand_poly(rng, 3, 2, 2, true));
      gs.push_back(rand_poly(rng, 3, 2, 2, true));
    }
    std::vector<NcPoly> ps{rand_poly(rng, 3, 3, 3, true), rand_poly(rng, 3, 2, 3, true)};
    std::size_t j = rng() % 2;
    GenerationCertificate c = transfer_witness(fs, gs, ps, j);
    CertificateCheck ck = verify_certificate(c);
    require(ck.valid && ck.instance_count <= 1, "transfer witness does not verify (case " + std::to_string(i) + ")");
    std::vector<NcPoly> args;
    for (std::size_t t = 0; t < ps.size(); ++t) {
      args.push_back(homogeneous_part(ps[t], t == j ? 1 : 0, Grading::ZDegree));
    }
    NcPoly lhs(q);
    for (std::size_t t = 0; t < k; ++t) {
      lhs += homogeneous_part(fs[t], 0, Grading::ZDegree) * standard_poly(args) *
             homogeneous_part(gs[t], 0, Grading::ZDegree);
    }
    require(c.target == bracket_map(lhs), "transfer witness target differs (case " + std::to_string(i) + ")");
  }
  return "5 x 100 cases: constant-argument S_2d (d <= 3), bracket map, collapse, linear_reduce, transfer";
}

std::string c9_counting_bound(const Options&) {
  // 28 ln 2 / (3 ln 6), evaluated with mpmath at 30 digits.
  const long double reference = 3.610626200856L;
  CountingBound b = counting_bound(8, 1);
  require(std::fabs(static_cast<double>(b.value - reference)) < 5e-5, "counting_bound(8,1) = " + b.decimal);
  for (auto [n, d] : {std::pair{1u, 1u}, std::pair{3u, 2u}, std::pair{5u, 3u}}) {
    CountingBound z = counting_bound(n, d);
    require(z.value == 0 && z.decimal == "0", "counting_bound(" + std::to_string(n) + "," + std::to_string(d) + ") != 0");
  }
  return "counting_bound(8,1) = " + b.decimal + " (reference 3.610626200856, 4 decimals: 3.6106); zero for n < 2d";
}

std::string c10_phi(const Options& o) {
  std::mt19937_64 rng(mix_seed(o.seed, 10));
  const Field q = Field::rationals();
  const std::uint32_t n = 4, d = 1, l = 2;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Scalar> flat;
    for (std::uint32_t i = 0; i < (2 * d + 1) * n * l; ++i) flat.push_back(small(q, rng, -3, 3));
    PhiParams params = PhiParams::from_flat(q, n, d, l, flat);
    PhiImage img = phi_map(params, q);
    for (std::uint32_t i = 0; i < n; ++i) {
      NcPoly expanded(q);
      for (std::uint32_t k = 0; k < l; ++k) {
        std::vector<NcPoly> args;
        for (std::uint32_t t = 0; t < 2 * d; ++t) {
          NcPoly lin(q);
          for (std::uint32_t m = 0; m < n; ++m) lin += NcPoly::variable(VarRef::x(m + 1), q).scaled(params.a[k][t][m]);
          args.push_back(lin);
        }
        expanded += standard_poly(args).scaled(params.c[i][k]);
      }
      for (std::size_t t = 0; t < img.tuples.size(); ++t) {
        Word w;
        for (std::uint32_t j : img.tuples[t]) w.push_back(VarRef::x(j));
        require(img.coeffs[i][t] == expanded.coeff(w), "draw " + std::to_string(trial) + " differs");
      }
    }
  }
  return "50/50 draws match the free-algebra expansion";
}

// ------------------------------------------------------------ fixtures

std::string f_identities(const Options& o) {
  json doc = load_json(fs::path(o.corpus_dir) / "identities.json");
  int n = 0;
  for (const json& item : doc.at("identities")) {
    const std::string name = item.at("name").get<std::string>();
    const NcPoly f = identity_input(item);
    const std::size_t d = item.at("d").get<std::size_t>();
    const bool expect_identity = item.at("expect").get<std::string>() == "identity";
    IdentityVerdict v = symbolic_check(f, d);
    require((v.verdict == Verdict::Identity) == expect_identity, name + ": verdict " + verdict_name(v.verdict));
    ++n;
  }
  return std::to_string(n) + " identity fixtures agree";
}

std::string f_certificates(const Options& o) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(fs::path(o.corpus_dir) / "certificates")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  require(files.size() >= 2, "fewer than two composed-certificate fixtures");
  std::string out;
  for (const fs::path& p : files) {
    json doc = load_json(p);
    GenerationCertificate outer = certificate_from_json(doc.at("outer"));
    InnerCertificates inner;
    std::size_t inner_max = 0;
    for (const json& j : doc.at("inner")) {
      GenerationCertificate c = certificate_from_json(j);
      CertificateCheck ck = verify_certificate(c);
      require(ck.valid, p.filename().string() + ": inner certificate does not verify");
      inner_max = std::max(inner_max, ck.instance_count);
      inner[c.target.str()] = c;
    }
    CertificateCheck outer_ck = verify_certificate(outer);
    require(outer_ck.valid, p.filename().string() + ": outer certificate does not verify");
    GenerationCertificate composed = compose_certificates(outer, inner);
    CertificateCheck ck = verify_certificate(composed);
    require(ck.valid && composed.target == outer.target, p.filename().string() + ": composition does not verify");
    require(ck.instance_count <= inner_max * outer_ck.instance_count, p.filename().string() + ": bound violated");
    require(ck.instance_count <= doc.at("max_instances").get<std::size_t>(), p.filename().string() + ": over fixture bound");
    out += (out.empty() ? "" : "; ") + p.stem().string() + " " + std::to_string(outer_ck.instance_count) + " x " +
           std::to_string(inner_max) + " -> " + std::to_string(ck.instance_count);
  }
  return out;
}

std::string f_tensors(const Options& o) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(fs::path(o.corpus_dir) / "tensors")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  require(files.size() >= 5, "fewer than five tensor fixtures");
  std::string out;
  for (const fs::path& p : files) {
    json doc = load_json(p);
    const std::string name = p.stem().string();
    Tensor t = tensor_from_json(doc.at("tensor"));
    if (t.order() % 2 == 1) {
      std::vector<NcPoly> polys = poly_from_tensor(t);
      require(polys.size() == t.side(), name + ": wrong number of polynomials");
      for (const NcPoly& f : polys) {
        if (f.is_zero() || t.order() > 5) continue;
        IdentityVerdict v = symbolic_check(f, (t.order() - 1) / 2);
        require(v.verdict == Verdict::Identity, name + ": corresponding polynomial is not a matrix identity");
      }
    }
    std::string note = name;
    if (doc.contains("decomposition")) {
      RankDecomposition d = decomposition_from_json(doc.at("decomposition"));
      require(d.sum() == t, name + ": decomposition does not sum to the tensor");
      for (const GenerationCertificate& c : cert_from_decomposition(d)) {
        CertificateCheck ck = verify_certificate(c);
        require(ck.valid && ck.instance_count <= d.terms.size(), name + ": certificate");
      }
      note += " certified by " + std::to_string(d.terms.size());
    }
    if (doc.contains("rank")) {
      RankSearch r = tensor_rank_bruteforce(t, t.field(), 4);
      require(r.found && r.rank == doc.at("rank").get<std::size_t>(),
              name + ": brute-force rank " + (r.found ? std::to_string(r.rank) : std::string(">4")));
      note += " rank " + std::to_string(r.rank);
    }
    out += (out.empty() ? "" : "; ") + note;
  }
  return out;
}

struct Job {
  std::string id, title;
  std::function<std::string(const Options&)> run;
};

std::vector<Check> run_jobs(const std::vector<Job>& jobs, const Options& o) {
  auto one = [&o](const Job& j) {
    Check c{j.id, j.title, false, {}, 0};
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.detail = j.run(o);
      c.pass = true;
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    c.seconds = since(t0);
    return c;
  };
  std::vector<Check> out(jobs.size());
  if (o.threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = one(jobs[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(o.threads, jobs.size()); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) out[i] = one(jobs[i]);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace

std::string default_corpus_dir() {
  if (const char* env = std::getenv("MATID_CORPUS")) return env;
  return MATID_CORPUS_DIR;
}

std::vector<Check> acceptance(const Options& opts) {
  return run_jobs({{"1", "Amitsur-Levitzki", c1_amitsur_levitzki},
                   {"2", "entry-wise example", c2_entry_example},
                   {"3", "commutator Q examples", c3_commutator_q},
                   {"4", "d=2 counterexample", c4_counterexample},
                   {"5", "lowering soundness", c5_lowering},
                   {"6", "Q <= rank bridge", c6_rank_bridge},
                   {"7", "proof checker", c7_proofs},
                   {"8", "lemma suites", c8_lemmas},
                   {"9", "counting bound", c9_counting_bound},
                   {"10", "phi map", c10_phi}},
                  opts);
}

std::vector<Check> fixtures(const Options& opts) {
  return run_jobs({{"identities", "identity fixtures", f_identities},
                   {"certificates", "composed certificates", f_certificates},
                   {"tensors", "tensor fixtures", f_tensors}},
                  opts);
}

}  // namespace matid::suite
