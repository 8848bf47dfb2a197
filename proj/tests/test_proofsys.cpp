#include <random>

#include <gtest/gtest.h>

#include "matid/errors.hpp"
#include "matid/matcheck.hpp"
#include "matid/parse.hpp"
#include "matid/proofsys.hpp"
#include "support.hpp"

using namespace matid;

namespace {

const std::vector<std::string> kCorpus = {
    "s4_instance.proof",   "right_distributivity.proof",    "hall_closure.proof", "s4_sum.proof",
    "pc_commutator.proof", "pc_right_distributivity.proof", "pcbool_idempotent.proof",
};

ProofScript load(const std::string& name, const std::optional<SystemSpec>& system = {}) {
  auto doc = nlohmann::json::parse(testing_support::read_file(std::string(MATID_CORPUS_DIR) + "/" + name));
  return proof_from_json(doc, system);
}

ProofScript parse_script(const std::string& text) { return proof_from_json(nlohmann::json::parse(text)); }

GateId text(ProofScript& s, const std::string& t) { return build_expr(s.gates, parse_expr(t)); }

void add_axiom(ProofScript& s, GateId lhs, GateId rhs, AxiomKind kind) {
  s.lines.push_back({lhs, rhs, AxiomInstance{kind, {}, {}, {}}});
}

void add_rule(ProofScript& s, GateId lhs, GateId rhs, RuleKind kind, std::vector<std::size_t> premises) {
  s.lines.push_back({lhs, rhs, RuleApplication{kind, std::move(premises)}});
}

ProofScript empty_script(const SystemSpec& system) {
  ProofScript s;
  s.system = system;
  s.gates = Circuit(system.field);
  return s;
}

}  // namespace

TEST(ProofCheck, IdentityLine) {
  ProofScript s = empty_script(SystemSpec::pc());
  GateId f = text(s, "(x1 + 2x2)x3");
  add_axiom(s, f, f, AxiomKind::Identity);
  ProofCheck r = check_proof(s);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.line_count, 1u);
  EXPECT_EQ(count_lines(s), 1u);
}

TEST(ProofCheck, S4InstanceInPMat2NotInPC) {
  ProofCheck in_pmat2 = check_proof(load("s4_instance.proof"));
  EXPECT_TRUE(in_pmat2.accepted);
  EXPECT_EQ(in_pmat2.line_count, 1u);

  ProofCheck in_pc = check_proof(load("s4_instance.proof", SystemSpec::pc()));
  ASSERT_FALSE(in_pc.accepted);
  EXPECT_EQ(in_pc.rejection->line, 0u);
  EXPECT_EQ(in_pc.rejection->reason, RejectReason::AxiomNotInSystem);
}

TEST(ProofCheck, DrenskyBasisIsMat2Identities) {
  for (const auto& [name, t] : drensky2_basis()) {
    EXPECT_EQ(symbolic_check(parse_poly(t), 2).verdict, Verdict::Identity) << name;
    EXPECT_EQ(symbolic_check(parse_poly(t), 1).verdict, Verdict::Identity) << name;
  }
  EXPECT_EQ(parse_poly(drensky2_basis()[0].second), standard_poly(x_vars(4)));
}

TEST(ProofCheck, CommutativityAxiomSeparatesSystems) {
  for (const SystemSpec& sys : {SystemSpec::pc(), SystemSpec::pmat2(), SystemSpec::pc_bool()}) {
    ProofScript s = empty_script(sys);
    add_axiom(s, text(s, "x1x2"), text(s, "x2x1"), AxiomKind::ProductCommutativity);
    ProofCheck r = check_proof(s);
    EXPECT_EQ(r.accepted, sys.variant != SystemVariant::PMatd) << sys.name();
    if (!r.accepted) EXPECT_EQ(r.rejection->reason, RejectReason::AxiomNotInSystem);
  }
}

TEST(ProofCheck, BooleanAxiomOnlyInPCBool) {
  for (const SystemSpec& sys : {SystemSpec::pc_bool(), SystemSpec::pc(Field::prime(2))}) {
    ProofScript s = empty_script(sys);
    add_axiom(s, text(s, "x3x3 + x3"), text(s, "0"), AxiomKind::BooleanAxiom);
    EXPECT_EQ(check_proof(s).accepted, sys.variant == SystemVariant::PCBool) << sys.name();
  }
  ProofScript s = empty_script(SystemSpec::pc_bool());
  add_axiom(s, text(s, "x3x2 + x3"), text(s, "0"), AxiomKind::BooleanAxiom);
  EXPECT_EQ(check_proof(s).rejection->reason, RejectReason::AxiomMismatch);
}

TEST(ProofCheck, RightDistributivityOnlyInPMatd) {
  for (const SystemSpec& sys : {SystemSpec::pmat2(), SystemSpec::pc()}) {
    ProofScript s = empty_script(sys);
    add_axiom(s, text(s, "(x1 + x2)x3"), text(s, "x1x3 + x2x3"), AxiomKind::RightDistributivity);
    EXPECT_EQ(check_proof(s).accepted, sys.variant == SystemVariant::PMatd);
  }
}

TEST(ProofCheck, CorpusAccepted) {
  std::map<std::string, std::size_t> lines = {
      {"s4_instance.proof", 1},   {"right_distributivity.proof", 1},    {"hall_closure.proof", 5},
      {"s4_sum.proof", 6},        {"pc_commutator.proof", 22},          {"pc_right_distributivity.proof", 7},
      {"pcbool_idempotent.proof", 5},
  };
  for (const std::string& name : kCorpus) {
    ProofScript s = load(name);
    ProofCheck r = check_proof(s);
    EXPECT_TRUE(r.accepted) << name << ": " << (r.rejection ? r.rejection->detail : "");
    EXPECT_EQ(r.line_count, lines.at(name)) << name;
  }
}

TEST(ProofCheck, CorpusSpansSystems) {
  std::map<SystemVariant, int> seen;
  for (const std::string& name : kCorpus) ++seen[load(name).system.variant];
  EXPECT_GE(seen[SystemVariant::PMatd], 3);
  EXPECT_GE(seen[SystemVariant::PC], 1);
  EXPECT_GE(seen[SystemVariant::PCBool], 1);
}

TEST(ProofCheck, SingleMutationsRejected) {
  std::mt19937_64 rng(7);
  int rejected = 0, isomorphic_cases = 0;
  for (int trial = 0; trial < 100;) {
    ProofScript s = load(kCorpus[rng() % kCorpus.size()]);
    std::size_t k = rng() % s.lines.size();
    std::vector<GateId> inner = testing_support::inner_gates(s.gates, s.lines[k].rhs);
    if (inner.empty()) continue;
    ++trial;
    GateId target = inner[rng() % inner.size()];
    GateId old_rhs = s.lines[k].rhs;
    s.lines[k].rhs = testing_support::swapped_copy(s.gates, old_rhs, target);
    ProofCheck r = check_proof(s);
    if (isomorphic(s.gates, old_rhs, s.gates, s.lines[k].rhs)) {
      ++isomorphic_cases;
      EXPECT_TRUE(r.accepted);
      continue;
    }
    ASSERT_FALSE(r.accepted) << "line " << k;
    EXPECT_GE(r.rejection->line, k);
    ++rejected;
  }
  EXPECT_EQ(rejected + isomorphic_cases, 100);
  EXPECT_GT(rejected, 50);
}

TEST(ProofCheck, Rejections) {
  {
    ProofScript s = empty_script(SystemSpec::pc());
    GateId rhs = s.gates.add(s.gates.constant(Rational(1)), s.gates.constant(Rational(1)));
    add_axiom(s, s.gates.constant(Rational(3)), rhs, AxiomKind::FieldAddition);
    EXPECT_EQ(check_proof(s).rejection->reason, RejectReason::FieldIdentityFalse);
  }
  {
    ProofScript s = empty_script(SystemSpec::pc(Field::prime(2)));
    GateId one = s.gates.constant(Rational(1));
    add_axiom(s, s.gates.constant(Rational(0)), s.gates.add(one, one), AxiomKind::FieldAddition);
    EXPECT_TRUE(check_proof(s).accepted);
  }
  {
    ProofScript s = empty_script(SystemSpec::pc());
    GateId f = text(s, "x1");
    add_rule(s, f, f, RuleKind::Symmetry, {0});
    EXPECT_EQ(check_proof(s).rejection->reason, RejectReason::BadPremise);
  }
  {
    ProofScript s = empty_script(SystemSpec::pc());
    GateId a = text(s, "x1x2"), b = text(s, "x2x1");
    add_axiom(s, a, b, AxiomKind::ProductCommutativity);
    add_rule(s, a, b, RuleKind::Symmetry, {0});
    ProofCheck r = check_proof(s);
    EXPECT_EQ(r.rejection->line, 1u);
    EXPECT_EQ(r.rejection->reason, RejectReason::RuleShape);
  }
  {
    ProofScript s = empty_script(SystemSpec::pc());
    add_axiom(s, text(s, "x1"), text(s, "x1"), AxiomKind::Identity);
    s.goals.push_back({text(s, "x2"), text(s, "x2")});
    ProofCheck r = check_proof(s);
    EXPECT_EQ(r.rejection->reason, RejectReason::GoalMissing);
    EXPECT_EQ(r.rejection->line, 1u);
  }
  {
    ProofScript s = empty_script(SystemSpec::pc());
    EXPECT_EQ(check_proof(s).rejection->reason, RejectReason::EmptyScript);
  }
  {
    ProofScript s = empty_script(SystemSpec::pc(Field::prime(5)));
    s.system = SystemSpec::pc();
    add_axiom(s, text(s, "x1"), text(s, "x1"), AxiomKind::Identity);
    EXPECT_THROW(check_proof(s), PreconditionError);
  }
}

TEST(ProofCheck, BasisLineMismatches) {
  const std::string s4 = drensky2_basis()[0].second;
  auto line = [&](const std::string& lhs, const std::string& element, const std::string& subst) {
    return parse_script(R"({"system": "pmat2", "lines": [{"lhs": ")" + lhs + R"(", "rhs": "0",
        "just": {"axiom": "basis", "element": ")" + element + R"(", "substitution": )" + subst + "}}]}");
  };
  EXPECT_TRUE(check_proof(line(s4, "s4", "{}")).accepted);
  EXPECT_EQ(check_proof(line(s4, "s4", R"({"x1": "x2", "x2": "x1"})")).rejection->reason,
            RejectReason::BasisMismatch);
  EXPECT_EQ(check_proof(line(s4, "s4", R"({"x5": "x1"})")).rejection->reason, RejectReason::BasisMismatch);
  EXPECT_EQ(check_proof(line(s4, "s5", "{}")).rejection->reason, RejectReason::UnknownBasisElement);
  // Same polynomial, different formula: basis lines match formulas, not values.
  EXPECT_EQ(check_proof(line(parse_poly("[[x1,x2]^2,x3]").str(), "hall", "{}")).rejection->reason,
            RejectReason::BasisMismatch);
  // Sharing is invisible to formula unwinding.
  EXPECT_TRUE(check_proof(line("[[x1,x2][x1,x2],x3]", "hall", "{}")).accepted);
  EXPECT_TRUE(check_proof(line("[[x1,x2]^2,x3]", "hall", "{}")).accepted);
  EXPECT_TRUE(check_proof(line("[[x2,x1]^2,x1x3]", "hall", R"({"x1": "x2", "x2": "x1", "x3": "x1x3"})")).accepted);
}

TEST(ProofCheck, AxiomParameters) {
  auto doc = [](const std::string& params) {
    return parse_script(R"J({"system": "pc", "lines": [{"lhs": "x1(x2 + x3)", "rhs": "x1x2 + x1x3",
        "just": {"axiom": "dist_left", "params": )J" + params + "}}]}");
  };
  EXPECT_TRUE(check_proof(doc(R"({"F": "x1", "G": "x2", "H": "x3"})")).accepted);
  EXPECT_FALSE(check_proof(doc(R"({"F": "x2"})")).accepted);
  EXPECT_FALSE(check_proof(doc(R"({"K": "x1"})")).accepted);
}

TEST(ProofCheck, UserBasis) {
  SystemSpec p1 = SystemSpec::pmatd(1, {{"comm", "[x1,x2]"}});
  ProofScript s = empty_script(p1);
  s.lines.push_back({text(s, "[x3x3,x1]"), text(s, "0"),
                     AxiomInstance{AxiomKind::BasisAxiom, {}, "comm",
                                   {{VarRef::x(1), text(s, "x3x3")}, {VarRef::x(2), text(s, "x1")}}}});
  EXPECT_TRUE(check_proof(s).accepted);
  EXPECT_THROW(SystemSpec::pmatd(2, {{"comm", "[x1,x2]"}}), PreconditionError);
  EXPECT_THROW(SystemSpec::pmatd(2, {{"a", "[x1,x2]^2"}, {"a", "x1"}}), PreconditionError);
  EXPECT_NO_THROW(SystemSpec::pmatd(2, drensky2_basis()));
}

TEST(ProofCheck, DeterministicAndRoundTrips) {
  for (const std::string& name : kCorpus) {
    ProofScript s = load(name);
    nlohmann::json a = to_json(check_proof(s));
    EXPECT_EQ(a, to_json(check_proof(load(name))));
    nlohmann::json doc = proof_to_json(s);
    ProofScript back = proof_from_json(doc);
    EXPECT_EQ(to_json(check_proof(back)), a) << name;
    EXPECT_EQ(proof_to_json(back), doc) << name;
  }
}

TEST(ProofCheck, MalformedDocuments) {
  EXPECT_THROW(parse_script(R"({"lines": []})"), ParseError);
  EXPECT_THROW(parse_script(R"({"system": "pc", "lines": [{"lhs": 4, "rhs": "x1", "just": {"axiom": "identity"}}]})"),
               ParseError);
  EXPECT_THROW(parse_script(R"({"system": "pc", "lines": [{"lhs": "x1", "rhs": "x1", "just": {"axiom": "magic"}}]})"),
               ParseError);
  EXPECT_THROW(parse_script(R"J({"system": {"variant": "pcbool", "field": "GF(3)"}, "lines": []})J"), ParseError);
}

// Random P_Mat2 derivations: every accepted line must be an equation of
// polynomials, checked by expanding both sides.
TEST(ProofCheck, RandomDerivationsAreSound) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    ProofScript s = empty_script(SystemSpec::pmat2());
    Circuit& c = s.gates;
    auto rand_gate = [&] {
      Circuit r = testing_support::random_circuit(rng, 3, 6);
      return c.import(r, r.output());
    };
    GateId zero = c.constant(Rational(0)), one = c.constant(Rational(1));
    for (int step = 0; step < 12; ++step) {
      GateId f = rand_gate(), g = rand_gate(), h = rand_gate();
      std::size_t n = s.lines.size();
      switch (rng() % 11) {
        case 0:
          add_axiom(s, f, f, AxiomKind::Identity);
          break;
        case 1:
          add_axiom(s, c.add(f, g), c.add(g, f), AxiomKind::AdditionCommutativity);
          break;
        case 2:
          add_axiom(s, c.mul(f, c.mul(g, h)), c.mul(c.mul(f, g), h), AxiomKind::MulAssociativity);
          break;
        case 3:
          add_axiom(s, c.add(f, c.add(g, h)), c.add(c.add(f, g), h), AxiomKind::AddAssociativity);
          break;
        case 4:
          add_axiom(s, c.mul(f, c.add(g, h)), c.add(c.mul(f, g), c.mul(f, h)), AxiomKind::LeftDistributivity);
          break;
        case 5:
          add_axiom(s, c.mul(c.add(g, h), f), c.add(c.mul(g, f), c.mul(h, f)), AxiomKind::RightDistributivity);
          break;
        case 6:
          add_axiom(s, c.mul(f, one), f, AxiomKind::Unit);
          break;
        case 7:
          if (n == 0) break;
          add_rule(s, s.lines[n - 1].rhs, s.lines[n - 1].lhs, RuleKind::Symmetry, {n - 1});
          break;
        case 8:
        case 9: {
          if (n < 2) break;
          std::size_t i = rng() % n, j = rng() % n;
          bool add = rng() % 2;
          GateId l = add ? c.add(s.lines[i].lhs, s.lines[j].lhs) : c.mul(s.lines[i].lhs, s.lines[j].lhs);
          GateId r = add ? c.add(s.lines[i].rhs, s.lines[j].rhs) : c.mul(s.lines[i].rhs, s.lines[j].rhs);
          add_rule(s, l, r, add ? RuleKind::AddCompat : RuleKind::MulCompat, {i, j});
          break;
        }
        case 10:
          if (n == 0) break;
          add_axiom(s, s.lines[n - 1].rhs, s.lines[n - 1].rhs, AxiomKind::Identity);
          add_rule(s, s.lines[n - 1].lhs, s.lines[n - 1].rhs, RuleKind::Transitivity, {n - 1, n});
          add_axiom(s, c.mul(f, zero), zero, AxiomKind::MulZero);
          break;
      }
    }
    if (s.lines.empty()) continue;
    ProofCheck r = check_proof(s);
    ASSERT_TRUE(r.accepted) << "trial " << trial << ": " << r.rejection->detail;
    for (const ProofLine& l : s.lines) EXPECT_EQ(expand(c, l.lhs), expand(c, l.rhs));
  }
}

TEST(Spotcheck, CorpusVanishes) {
  for (const std::string& name : kCorpus) {
    ProofScript s = load(name);
    std::size_t d = s.system.variant == SystemVariant::PMatd ? 2 : 1;
    SpotcheckReport r = soundness_spotcheck(s, d, 10007, 50, 3, 2);
    EXPECT_TRUE(r.discrepancies.empty()) << name;
    EXPECT_EQ(r.trials, 50u);
  }
}

TEST(Spotcheck, DetectsCorruptedLines) {
  ProofScript s = load("s4_instance.proof");
  s.lines[0].rhs = s.gates.var(VarRef::x(1));
  SpotcheckReport r = soundness_spotcheck(s, 2, 10007, 10, 1);
  EXPECT_EQ(r.discrepancies.size(), 10u);

  // PC proofs are sound for commutative values only.
  ProofScript pc = load("pc_commutator.proof");
  EXPECT_TRUE(soundness_spotcheck(pc, 1, 101, 20, 5).discrepancies.empty());
  SpotcheckReport on_mat2 = soundness_spotcheck(pc, 2, 101, 20, 5);
  ASSERT_FALSE(on_mat2.discrepancies.empty());
  EXPECT_EQ(on_mat2.discrepancies.front().first, 0u);
}

TEST(Spotcheck, ReproducibleFromSeed) {
  ProofScript pc = load("pc_right_distributivity.proof");
  auto a = soundness_spotcheck(pc, 2, 101, 30, 9, 1).discrepancies;
  auto b = soundness_spotcheck(pc, 2, 101, 30, 9, 4).discrepancies;
  EXPECT_EQ(a, b);
}

TEST(LineCount, AgainstCertificate) {
  ProofScript s = load("s4_instance.proof");
  GenerationCertificate cert;
  cert.target = standard_poly(x_vars(4));
  NcPoly one = NcPoly::constant(Field::rationals(), 1);
  cert.summands.push_back({one, SubstitutionInstance::of(cert.target, {}), one});
  LineBound b = lines_against_certificate(s, cert);
  EXPECT_EQ(b.lines, 1u);
  EXPECT_EQ(b.certificate_instances, 1u);
  cert.target = cert.target.scaled(Scalar(Field::rationals(), Rational(2)));
  EXPECT_THROW(lines_against_certificate(s, cert), PreconditionError);
}
