#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "matid/errors.hpp"
#include "matid/ideals.hpp"
#include "matid/matrix.hpp"
#include "matid/parse.hpp"
#include "support.hpp"

using namespace matid;

namespace {

NcPoly P(std::string_view s, Field f = Field::rationals()) { return parse_poly(s, f); }
NcPoly one() { return NcPoly::constant(Field::rationals(), Rational(1)); }

NcPoly S(std::uint32_t n) {
  auto v = x_vars(n);
  return standard_poly(v);
}

SubstitutionInstance inst(const NcPoly& basis, std::map<std::string, std::string> sigma) {
  Substitution s;
  for (const auto& [k, v] : sigma) s[VarRef::parse(k)] = P(v);
  return SubstitutionInstance::of(basis, s);
}

const char* kCounterexample = "[[x1,x2][x3,x4]+[x3,x4][x1,x2],x5]";

// Exact rank by plain Gaussian elimination, written independently of the
// library's elimination.
std::size_t rank_of(std::vector<std::vector<Rational>> m) {
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

Scalar pair(const NcPoly& functional, const NcPoly& f) {
  Scalar s = Scalar::zero(f.field());
  for (const Term& t : f.terms()) s += functional.coeff(t.word) * t.coeff;
  return s;
}

}  // namespace

TEST(Certificate, VerifyExamples) {
  GenerationCertificate c1{P("x1x3 - x3x1 + x2x3 - x3x2"), {{one(), inst(P("[x1,x2]"), {{"x1", "x1+x2"}, {"x2", "x3"}}), one()}}};
  CertificateCheck ck = verify_certificate(c1);
  EXPECT_TRUE(ck.valid);
  EXPECT_EQ(ck.instance_count, 1u);

  CertificateCheck empty = verify_certificate({P("0"), {}});
  EXPECT_TRUE(empty.valid);
  EXPECT_EQ(empty.instance_count, 0u);

  GenerationCertificate bad{P("x1x2"), {{one(), inst(P("[x1,x2]"), {}), one()}}};
  CertificateCheck b = verify_certificate(bad);
  EXPECT_FALSE(b.valid);
  EXPECT_EQ(b.residual, P("x2x1"));
}

TEST(Certificate, CountsDistinctExpansions) {
  SubstitutionInstance a = inst(P("[x1,x2]"), {});
  SubstitutionInstance b = inst(P("[x1,x2]"), {{"x1", "x2"}, {"x2", "x1"}});
  // a and b are scalar multiples: they count apart. Repeating a does not.
  GenerationCertificate c{P("[x1,x2]x3 + x3[x1,x2] + [x2,x1]"), {{one(), a, P("x3")}, {P("x3"), a, one()}, {one(), b, one()}}};
  CertificateCheck ck = verify_certificate(c);
  EXPECT_TRUE(ck.valid);
  EXPECT_EQ(ck.instance_count, 2u);
}

TEST(Certificate, InstanceRejectsStraySubstitution) {
  EXPECT_THROW(SubstitutionInstance(P("[x1,x2]"), {VarRef::x(1)}, {}), PreconditionError);
  EXPECT_THROW(SubstitutionInstance(P("[x1,x2]"), {VarRef::x(1), VarRef::x(2)}, {{VarRef::x(3), P("x1")}}),
               PreconditionError);
}

TEST(Certificate, JsonRoundTrip) {
  GenerationCertificate c{P("x1x3 - x3x1 + x2x3 - x3x2"), {{one(), inst(P("[x1,x2]"), {{"x1", "x1+x2"}, {"x2", "x3"}}), one()}}};
  GenerationCertificate back = certificate_from_json(certificate_to_json(c));
  EXPECT_EQ(back.target, c.target);
  ASSERT_EQ(back.summands.size(), 1u);
  EXPECT_EQ(back.summands[0].instance.expansion(), c.summands[0].instance.expansion());
  EXPECT_TRUE(verify_certificate(back).valid);
  EXPECT_THROW(certificate_from_json(nlohmann::json::parse(R"({"summands": []})")), ParseError);
}

TEST(Certificate, SoundOnMatricesWhenBasisIsIdentity) {
  // Instances of S_4 vanish on Mat_2, so every certificate target does too.
  std::mt19937_64 rng(11);
  const Field gf = Field::prime(10007);
  for (int trial = 0; trial < 20; ++trial) {
    GenerationCertificate c;
    c.target = NcPoly(Field::rationals());
    for (int k = 0; k < 2; ++k) {
      Substitution s;
      for (const VarRef& v : x_vars(4)) s[v] = testing_support::random_poly(rng, 3, 2, 2);
      Summand sm{testing_support::random_poly(rng, 3, 1, 2), SubstitutionInstance::of(S(4), s),
                 testing_support::random_poly(rng, 3, 1, 2)};
      c.target += sm.h * sm.instance.expansion() * sm.ell;
      c.summands.push_back(std::move(sm));
    }
    ASSERT_TRUE(verify_certificate(c).valid);
    MatrixAssignment a;
    for (const VarRef& v : x_vars(3)) a[v] = testing_support::random_matrix(rng, gf, 2);
    EXPECT_TRUE(evaluate(c.target.to_field(gf), a, 2).is_zero());
  }
}

TEST(Compose, TripleCommutatorThroughCommutator) {
  const NcPoly triple = P("[x1,x2,x3]");
  GenerationCertificate in{triple, {{one(), inst(P("[x1,x2]"), {}), P("x3")}, {P("-x3"), inst(P("[x1,x2]"), {}), one()}}};
  ASSERT_TRUE(verify_certificate(in).valid);
  ASSERT_EQ(verify_certificate(in).instance_count, 1u);

  SubstitutionInstance t1 = inst(triple, {});
  SubstitutionInstance t2 = inst(triple, {{"x1", "x4"}, {"x2", "x1x2"}, {"x3", "x3+x4"}});
  GenerationCertificate outer{P("x5") * t1.expansion() + t2.expansion() * P("x2 - 1"), {{P("x5"), t1, one()}, {one(), t2, P("x2 - 1")}}};
  ASSERT_TRUE(verify_certificate(outer).valid);

  GenerationCertificate composed = compose_certificates(outer, {{triple.str(), in}});
  CertificateCheck ck = verify_certificate(composed);
  EXPECT_TRUE(ck.valid);
  EXPECT_LE(ck.instance_count, 2u);
  EXPECT_EQ(composed.target, outer.target);

  // Outer count 1, inner count 1.
  GenerationCertificate single{t1.expansion(), {{one(), t1, one()}}};
  EXPECT_LE(verify_certificate(compose_certificates(single, {{triple.str(), in}})).instance_count, 1u);

  EXPECT_THROW(compose_certificates(outer, {}), PreconditionError);
}

TEST(Compose, RandomCompositionsRespectBound) {
  std::mt19937_64 rng(5);
  const NcPoly triple = P("[x1,x2,x3]");
  // Inner certificate of the triple commutator from S_2 = [x1,x2] with two
  // extra (redundant) summands that cancel.
  GenerationCertificate in{triple,
                           {{one(), inst(P("[x1,x2]"), {}), P("x3")},
                            {P("-x3"), inst(P("[x1,x2]"), {}), one()},
                            {P("x4"), inst(P("[x1,x2]"), {{"x1", "x3"}}), one()},
                            {P("-x4"), inst(P("[x1,x2]"), {{"x1", "x3"}}), one()}}};
  ASSERT_TRUE(verify_certificate(in).valid);
  const std::size_t r = verify_certificate(in).instance_count;
  for (int trial = 0; trial < 30; ++trial) {
    GenerationCertificate outer;
    outer.target = NcPoly(Field::rationals());
    std::size_t k = 1 + rng() % 3;
    for (std::size_t i = 0; i < k; ++i) {
      Substitution s;
      for (const VarRef& v : x_vars(3)) s[v] = testing_support::random_poly(rng, 4, 2, 2);
      Summand sm{testing_support::random_poly(rng, 4, 1, 2), SubstitutionInstance::of(triple, s),
                 testing_support::random_poly(rng, 4, 1, 2)};
      outer.target += sm.h * sm.instance.expansion() * sm.ell;
      outer.summands.push_back(std::move(sm));
    }
    GenerationCertificate c = compose_certificates(outer, {{triple.str(), in}});
    CertificateCheck ck = verify_certificate(c);
    EXPECT_TRUE(ck.valid);
    EXPECT_LE(ck.instance_count, r * instance_count(outer));
  }
}

TEST(Membership, Examples) {
  auto vars5 = x_vars(5);
  NcPoly s4 = S(4);
  MembershipResult m = multilinear_membership(P("x5") * s4 - s4 * P("x5"), {s4}, vars5);
  EXPECT_TRUE(m.member);
  EXPECT_TRUE(verify_certificate(m.combination).valid);

  MembershipResult z = multilinear_membership(NcPoly(), {s4}, vars5);
  EXPECT_TRUE(z.member);
  EXPECT_TRUE(z.combination.summands.empty());

  EXPECT_THROW(multilinear_membership(P("x1x1"), {s4}, x_vars(2)), PreconditionError);
  EXPECT_THROW(multilinear_membership(NcPoly(), {s4}, x_vars(7)), PreconditionError);
}

TEST(Membership, CounterexampleIsNotGeneratedByS4) {
  auto t0 = std::chrono::steady_clock::now();
  const NcPoly f = P(kCounterexample);
  const NcPoly s4 = S(4);
  MembershipResult m = multilinear_membership(f, {s4}, x_vars(5));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_FALSE(m.member);
  EXPECT_EQ(m.dimension, 120u);
  EXPECT_EQ(m.rank_with_target, m.span_rank + 1);
  EXPECT_LT(secs, 30.0);

  // Independent check of the dual witness: it annihilates u*S_4(w1..w4)*v
  // for every multilinear placement, enumerated here by brute force over
  // all 5-letter orderings and all segmentations.
  ASSERT_FALSE(pair(m.dual_witness, f).is_zero());
  auto xs = x_vars(5);
  std::vector<VarRef> perm = xs;
  std::size_t checked = 0;
  do {
    for (std::size_t a = 0; a <= 1; ++a) {
      for (std::size_t b = a + 4; b <= 5; ++b) {
        // letters [a, b) go to the 4 slots; one slot may take two letters.
        std::size_t len = b - a;
        for (std::size_t wide = 0; wide < 4; ++wide) {
          if (len == 4 && wide > 0) break;
          Substitution s;
          std::size_t at = a;
          for (std::size_t k = 0; k < 4; ++k) {
            std::size_t take = (len == 5 && k == wide) ? 2 : 1;
            Word w(perm.begin() + at, perm.begin() + at + take);
            s[xs[k]] = NcPoly::monomial(w, Scalar::one(Field::rationals()));
            at += take;
          }
          NcPoly v = NcPoly::monomial(Word(perm.begin(), perm.begin() + a), Scalar::one(Field::rationals())) *
                     substitute(s4, s) * NcPoly::monomial(Word(perm.begin() + b, perm.end()), Scalar::one(Field::rationals()));
          ASSERT_TRUE(pair(m.dual_witness, v).is_zero());
          ++checked;
        }
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(checked, 120u * 6u);
}

TEST(Membership, StableUnderGeneratorOrder) {
  const NcPoly f = P(kCounterexample);
  const NcPoly s4 = S(4);
  const NcPoly other = P("[x1,x2,x3,x4]");
  MembershipResult a = multilinear_membership(f, {s4, other}, x_vars(5));
  MembershipResult b = multilinear_membership(f, {other, s4}, x_vars(5));
  EXPECT_EQ(a.member, b.member);
  EXPECT_EQ(a.span_rank, b.span_rank);
  EXPECT_TRUE(a.member ? verify_certificate(a.combination).valid : !pair(a.dual_witness, f).is_zero());
}

TEST(Membership, RandomInstancesAreMembers) {
  std::mt19937_64 rng(3);
  const NcPoly comm = P("[x1,x2]");
  auto xs = x_vars(4);
  for (int trial = 0; trial < 20; ++trial) {
    // A random combination of u [w1, w2] v over x1..x4.
    NcPoly f(Field::rationals());
    for (int k = 0; k < 3; ++k) {
      std::vector<VarRef> perm = xs;
      std::shuffle(perm.begin(), perm.end(), rng);
      std::size_t a = rng() % 3;
      std::size_t b = a + 2 + rng() % (3 - a);
      std::size_t mid = a + 1 + rng() % (b - a - 1);
      Substitution s{{xs[0], NcPoly::monomial(Word(perm.begin() + a, perm.begin() + mid), Scalar::one(Field::rationals()))},
                     {xs[1], NcPoly::monomial(Word(perm.begin() + mid, perm.begin() + b), Scalar::one(Field::rationals()))}};
      Scalar c(Field::rationals(), Rational(static_cast<std::int64_t>(rng() % 7) - 3));
      f += (NcPoly::monomial(Word(perm.begin(), perm.begin() + a), c) * substitute(comm, s) *
            NcPoly::monomial(Word(perm.begin() + b, perm.end()), Scalar::one(Field::rationals())));
    }
    MembershipResult m = multilinear_membership(f, {comm}, xs);
    EXPECT_TRUE(m.member);
    EXPECT_TRUE(verify_certificate(m.combination).valid);
  }
  // The commutator ideal misses x1x2x3x4 (coefficient sum is a witness).
  MembershipResult m = multilinear_membership(P("x1x2x3x4"), {comm}, xs);
  EXPECT_FALSE(m.member);
  EXPECT_EQ(m.span_rank, 23u);
}

TEST(Membership, NonMultilinearGeneratorIsLinearized) {
  // The Hall polynomial has degree 2 in x1, x2; its linearization reaches
  // multilinear consequences in 5 variables.
  std::vector<NcPoly> lin = linearize(P("[[x1,x2]^2,x3]"));
  ASSERT_EQ(lin.size(), 1u);
  EXPECT_EQ(lin[0].degree(), 5);
  EXPECT_TRUE(is_multilinear(lin[0], lin[0].variables()));
  MembershipResult m = multilinear_membership(lin[0], {P("[[x1,x2]^2,x3]")}, lin[0].variables());
  EXPECT_TRUE(m.member);
  EXPECT_THROW(multilinear_membership(NcPoly(Field::prime(7)), {P("x1x1", Field::prime(7))}, x_vars(2)), PreconditionError);
}

TEST(CommutatorQ, WorkedExamples) {
  for (const char* s : {"x1x2 - x2x1", "x1x3 - x3x1 + x2x3 - x3x2"}) {
    CommutatorQ q = q_commutator_exact(P(s));
    EXPECT_EQ(q.q, 1u) << s;
    CertificateCheck ck = verify_certificate(q.certificate);
    EXPECT_TRUE(ck.valid);
    EXPECT_EQ(ck.instance_count, 1u);
  }
  CommutatorQ q = q_commutator_exact(P("[x1,x2] + [x3,x4]"));
  EXPECT_EQ(q.q, 2u);
  EXPECT_TRUE(verify_certificate(q.certificate).valid);
  EXPECT_EQ(q_commutator_exact(NcPoly()).q, 0u);
  EXPECT_THROW(q_commutator_exact(P("x1x2")), PreconditionError);
  EXPECT_THROW(q_commutator_exact(P("x1x1")), PreconditionError);
}

TEST(CommutatorQ, RandomAgainstRankOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::uint32_t n = 2 + rng() % 5;
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, Rational(0)));
    NcPoly f(Field::rationals());
    // Low-rank antisymmetric matrices are produced as sums of a few
    // commutators of random linear forms.
    std::size_t k = rng() % 3;
    for (std::size_t t = 0; t < k; ++t) {
      std::vector<Rational> u(n), v(n);
      for (auto& x : u) x = Rational(static_cast<std::int64_t>(rng() % 5) - 2);
      for (auto& x : v) x = Rational(static_cast<std::int64_t>(rng() % 5) - 2);
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j) a[i][j] = a[i][j] + u[i] * v[j] - u[j] * v[i];
    }
    std::vector<Term> ts;
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j)
        if (!a[i][j].is_zero()) ts.push_back({Word{VarRef::x(i + 1), VarRef::x(j + 1)}, Scalar(Field::rationals(), a[i][j])});
    f = NcPoly::from_terms(Field::rationals(), ts);
    CommutatorQ q = q_commutator_exact(f);
    EXPECT_EQ(2 * q.q, rank_of(a));
    CertificateCheck ck = verify_certificate(q.certificate);
    EXPECT_TRUE(ck.valid);
    EXPECT_EQ(ck.instance_count, q.q);
  }
}

TEST(LinearReduce, Examples) {
  const NcPoly s2 = S(2);
  auto r = linear_reduce({inst(s2, {{"x1", "x1 + 1"}})});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].expansion(), P("[x1,x2]"));
  EXPECT_EQ(inst(s2, {{"x1", "x1 + 1"}}).expansion(), r[0].expansion());

  auto r2 = linear_reduce({inst(s2, {{"x1", "x1 + x1x3"}})});
  ASSERT_EQ(r2.size(), 1u);
  EXPECT_EQ(r2[0].expansion(), P("[x1,x2]"));
  EXPECT_EQ(homogeneous_part(inst(s2, {{"x1", "x1 + x1x3"}}).expansion(), 2), r2[0].expansion());

  EXPECT_TRUE(linear_reduce({inst(s2, {{"x1", "5"}})}).empty());
  EXPECT_THROW(linear_reduce({inst(P("x1x2"), {})}), PreconditionError);
}

TEST(LinearReduce, PreservesTopPartAndMapsCertificates) {
  std::mt19937_64 rng(23);
  const NcPoly s2 = S(2);
  for (int trial = 0; trial < 100; ++trial) {
    GenerationCertificate c;
    c.target = NcPoly(Field::rationals());
    std::vector<SubstitutionInstance> insts;
    std::size_t k = 1 + rng() % 3;
    for (std::size_t i = 0; i < k; ++i) {
      Substitution s;
      for (const VarRef& v : x_vars(2)) s[v] = testing_support::random_poly(rng, 3, 2, 3);
      SubstitutionInstance in = SubstitutionInstance::of(s2, s);
      Summand sm{testing_support::random_poly(rng, 3, 1, 2), in, testing_support::random_poly(rng, 3, 1, 2)};
      c.target += sm.h * in.expansion() * sm.ell;
      c.summands.push_back(std::move(sm));
      insts.push_back(in);

      auto red = linear_reduce({in});
      NcPoly top = homogeneous_part(in.expansion(), 2);
      EXPECT_EQ(red.empty() ? NcPoly() : red[0].expansion(), top);
    }
    // The degree-2 part of the target is a combination of the reduced
    // instances with constant coefficients (AB)^(0).
    GenerationCertificate mapped;
    mapped.target = homogeneous_part(c.target, 2);
    for (const Summand& sm : c.summands) {
      auto red = linear_reduce({sm.instance});
      if (red.empty()) continue;
      Scalar coeff = sm.h.constant_term() * sm.ell.constant_term();
      if (coeff.is_zero()) continue;
      mapped.summands.push_back({NcPoly::constant(coeff), red[0], one()});
    }
    CertificateCheck ck = verify_certificate(mapped);
    EXPECT_TRUE(ck.valid) << ck.residual.str();
    EXPECT_LE(ck.instance_count, instance_count(c));
  }
}

TEST(Transfer, SignFixedByExpansion) {
  const NcPoly lhs = bracket_map(P("x3") * standard_poly(std::vector<NcPoly>{P("z1x1"), P("x2")}));
  EXPECT_EQ(lhs, -(P("z1x1") * standard_poly(std::vector<NcPoly>{P("x3"), P("x2")})));

  GenerationCertificate c = transfer_witness({P("x3")}, {one()}, {P("z1x1"), P("x2")}, 0);
  EXPECT_EQ(c.target, lhs);
  CertificateCheck ck = verify_certificate(c);
  EXPECT_TRUE(ck.valid);
  EXPECT_EQ(ck.instance_count, 1u);

  GenerationCertificate e = transfer_witness({one()}, {one()}, {P("z1x1"), P("x2")}, 0);
  EXPECT_TRUE(e.target.is_zero());
  EXPECT_TRUE(e.summands.empty());

  EXPECT_THROW(transfer_witness({one()}, {one()}, {P("x1"), P("x2"), P("x3")}, 0), PreconditionError);
}

TEST(Transfer, RandomTwoSlotInstancesVerify) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t k = 1 + rng() % 2;
    std::vector<NcPoly> fs, gs;
    for (std::size_t i = 0; i < k; ++i) {
      fs.push_back(testing_support::random_poly(rng, 3, 2, 2, true));
      gs.push_back(testing_support::random_poly(rng, 3, 2, 2, true));
    }
    std::vector<NcPoly> ps{testing_support::random_poly(rng, 3, 3, 3, true), testing_support::random_poly(rng, 3, 2, 3, true)};
    std::size_t j = rng() % 2;
    GenerationCertificate c = transfer_witness(fs, gs, ps, j);
    CertificateCheck ck = verify_certificate(c);
    EXPECT_TRUE(ck.valid);
    EXPECT_LE(ck.instance_count, 1u);
  }
  // Four slots: the lemma is stated for every even n.
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<NcPoly> ps;
    for (int i = 0; i < 4; ++i) ps.push_back(testing_support::random_poly(rng, 3, 2, 2, true));
    GenerationCertificate c = transfer_witness({testing_support::random_poly(rng, 3, 1, 2)},
                                               {testing_support::random_poly(rng, 3, 1, 2)}, ps, rng() % 4);
    EXPECT_TRUE(verify_certificate(c).valid);
  }
}

TEST(Collapse, Examples) {
  const Field q = Field::rationals();
  CommutatorPolynomial a(q);
  a.add(Scalar::one(q), {{VarRef::x(1), VarRef::x(2)}});
  EXPECT_TRUE(collapse_check(a, VarRef::x(1), Scalar(q, Rational(7))));

  CommutatorPolynomial b(q);
  b.add(Scalar::one(q), {{VarRef::x(1), VarRef::x(2)}, {VarRef::x(3), VarRef::x(4)}});
  EXPECT_TRUE(collapse_check(b, VarRef::x(3), Scalar(q, Rational(2))));

  CommutatorPolynomial bad(q);
  bad.add(Scalar::one(q), {{VarRef::x(1), VarRef::x(2)}});
  bad.add(Scalar::one(q), {{VarRef::x(1), VarRef::x(3)}});
  EXPECT_THROW(collapse_check(bad, VarRef::x(1), Scalar::one(q)), PreconditionError);
  EXPECT_THROW(CommutatorPolynomial(q).add(Scalar::one(q), {{VarRef::x(1)}}), PreconditionError);
}

TEST(Collapse, RandomMultilinearCommutatorPolynomials) {
  std::mt19937_64 rng(31);
  const Field q = Field::rationals();
  for (int trial = 0; trial < 100; ++trial) {
    std::uint32_t n = 2 + rng() % 5;
    auto xs = x_vars(n);
    CommutatorPolynomial f(q);
    std::size_t terms = 1 + rng() % 3;
    for (std::size_t t = 0; t < terms; ++t) {
      // Shuffle the variables and cut them into commutators of length >= 2.
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
      f.add(Scalar(q, Rational(static_cast<std::int64_t>(rng() % 9) - 4)), std::move(factors));
    }
    ASSERT_TRUE(f.is_multilinear());
    VarRef v = xs[rng() % n];
    Scalar c(q, Rational(static_cast<std::int64_t>(rng() % 21) - 10, 1 + static_cast<std::int64_t>(rng() % 3)));
    EXPECT_TRUE(collapse_check(f, v, c));
  }
}
