#include <random>

#include <gtest/gtest.h>

#include "matid/circuit.hpp"
#include "support.hpp"

using namespace matid;

namespace {

Circuit C(std::string_view s, Field f = Field::rationals()) { return parse_circuit(s, f); }

// Rename x_i to e_{i,1,1}.
NcPoly rename_to_entries(const NcPoly& f) {
  Substitution s;
  for (const VarRef& v : f.variables()) s[v] = NcPoly::variable(VarRef::entry(v.index(), 1, 1), f.field());
  return substitute(f, s);
}

}  // namespace

TEST(CircuitParse, CommutatorHasSevenGates) {
  Circuit c = C("x1*x2 - x2*x1");
  EXPECT_EQ(c.size(), 7u);
  EXPECT_EQ(c.outputs().size(), 1u);
  EXPECT_EQ(expand(c, c.output()).str(), "x1x2 - x2x1");
}

TEST(CircuitParse, SyntaxErrorOffset) {
  try {
    C("x1*(");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(CircuitParse, DocumentRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    Circuit c = testing_support::random_circuit(rng, 4, 40);
    std::string text = print_circuit(c);
    Circuit back = parse_circuit(text);
    ASSERT_EQ(back.size(), c.size());
    ASSERT_TRUE(isomorphic(c, c.output(), back, back.output()));
    ASSERT_EQ(print_circuit(back), text);
  }
}

TEST(CircuitParse, RelabelsAndRejects) {
  // Out of order, sparse ids.
  Circuit c = parse_circuit(R"({"field":"Q","gates":[
      {"id":10,"op":"mul","payload":[7,3]},
      {"id":3,"op":"var","payload":"x2"},
      {"id":7,"op":"var","payload":"x1"}],"outputs":[10]})");
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(expand(c, c.output()).str(), "x1x2");
  EXPECT_THROW(parse_circuit(R"({"gates":[{"id":0,"op":"add","payload":[1,1]},
      {"id":1,"op":"mul","payload":[0,0]}],"outputs":[0]})"), ParseError);
  EXPECT_THROW(parse_circuit(R"({"gates":[{"id":0,"op":"add","payload":[0,5]}],"outputs":[0]})"), ParseError);
  EXPECT_THROW(parse_circuit(R"({"gates":[{"id":0,"op":"var","payload":"x1"}],"outputs":[4]})"), ParseError);
  EXPECT_THROW(parse_circuit(R"({"gates":[{"id":0,"op":"pow","payload":"x1"}]})"), ParseError);
  EXPECT_THROW(parse_circuit(R"({"gates":[{"id":0,"op":"var","payload":"x1"})"), ParseError);
}

TEST(Expand, SquareAndSharing) {
  Circuit tree = C("(x1+x2)*(x1+x2)");
  Circuit shared;
  GateId g = shared.add(shared.var(VarRef::x(1)), shared.var(VarRef::x(2)));
  shared.add_output(shared.mul(g, g));
  NcPoly expected = parse_poly("x1x1 + x1x2 + x2x1 + x2x2");
  EXPECT_EQ(expand(tree, tree.output()), expected);
  EXPECT_EQ(expand(shared, shared.output()), expected);
  EXPECT_EQ(expand(shared, shared.output()).size(), 4u);
  EXPECT_THROW(expand(shared, shared.output(), 2), CapExceeded);
  try {
    expand(shared, shared.output(), 2);
  } catch (const CapExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("gate 3"), std::string::npos) << e.what();
  }
}

TEST(FormulaEqual, Examples) {
  EXPECT_FALSE(formula_equal(C("(x1+x2)+x3"), C("x1+(x2+x3)")));
  EXPECT_FALSE(formula_equal(C("x1*x2"), C("x2*x1")));
  Circuit shared;
  GateId g = shared.add(shared.var(VarRef::x(1)), shared.var(VarRef::x(2)));
  shared.add_output(shared.mul(g, g));
  EXPECT_TRUE(formula_equal(C("(x1+x2)*(x1+x2)"), shared));
}

TEST(FormulaEqual, EquivalenceRelationOnRandomSamples) {
  std::mt19937_64 rng(4);
  std::vector<Circuit> pool;
  for (int i = 0; i < 40; ++i) pool.push_back(testing_support::random_circuit(rng, 2, 8));
  for (const Circuit& a : pool) {
    ASSERT_TRUE(formula_equal(a, a));
    // Re-import gives a different table with the same unwinding.
    Circuit copy;
    copy.constant(Rational(42));
    copy.add_output(copy.import(a, a.output()));
    ASSERT_TRUE(formula_equal(a, copy));
    for (const Circuit& b : pool) {
      ASSERT_EQ(formula_equal(a, b), formula_equal(b, a));
      if (!formula_equal(a, b)) continue;
      for (const Circuit& c : pool) {
        if (formula_equal(b, c)) ASSERT_TRUE(formula_equal(a, c));
      }
    }
  }
}

TEST(FormulaEqual, ExponentialUnwindingStaysCheap) {
  // Depth-60 squaring chain: the unwinding has ~2^60 leaves.
  Circuit a, b;
  GateId ga = a.var(VarRef::x(1));
  GateId gb = b.var(VarRef::x(1));
  for (int i = 0; i < 60; ++i) {
    ga = a.mul(ga, ga);
    GateId copy = b.mul(gb, gb);
    gb = b.mul(copy, b.add(gb, b.constant(Rational(0))));
  }
  a.add_output(ga);
  b.add_output(gb);
  EXPECT_FALSE(formula_equal(a, b));
  EXPECT_TRUE(formula_equal(a, a.output(), a, a.output()));
}

TEST(MatrixExpand, CommutatorEntryExample) {
  Circuit c = C("x1*x2 - x2*x1");
  LoweredFamily fam = matrix_expand(c, 2);
  NcPoly e11 = expand(fam.circuit, fam.entry(1, 1));
  EXPECT_EQ(e11, parse_poly("(e1_1_1e2_1_1 + e1_1_2e2_2_1) - (e2_1_1e1_1_1 + e2_1_2e1_2_1)"));
  EXPECT_EQ(formula_str(fam.circuit, fam.entry(1, 1)),
            "e1_1_1*e2_1_1 + e1_1_2*e2_2_1 - (e2_1_1*e1_1_1 + e2_1_2*e1_2_1)");
}

TEST(MatrixExpand, DimensionOneIsRenaming) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    Circuit c = testing_support::random_circuit(rng, 3, 20);
    LoweredFamily fam = matrix_expand(c, 1);
    ASSERT_EQ(fam.circuit.outputs().size(), 1u);
    ASSERT_EQ(expand(fam.circuit, fam.entry(1, 1)), rename_to_entries(expand(c, c.output())));
  }
  EXPECT_THROW(matrix_expand(C("x1"), 0), PreconditionError);
  EXPECT_THROW(matrix_expand(C("z1"), 2), PreconditionError);
}

TEST(MatrixExpand, SoundnessAndSizeBound) {
  std::mt19937_64 rng(17);
  Field f = Field::prime(101);
  for (int i = 0; i < 100; ++i) {
    Circuit c = testing_support::random_circuit(rng, 3, 60, f);
    std::size_t d = 1 + rng() % 3;
    LoweredFamily fam = matrix_expand(c, d);
    ASSERT_LE(fam.circuit.size(), kLoweringSizeConstant * d * d * d * c.size());
    MatrixAssignment a;
    std::map<VarRef, Scalar> entries;
    for (std::uint32_t v = 1; v <= 3; ++v) {
      Matrix m = testing_support::random_matrix(rng, f, d);
      a[VarRef::x(v)] = m;
      for (std::uint32_t j = 1; j <= d; ++j)
        for (std::uint32_t k = 1; k <= d; ++k) entries[VarRef::entry(v, j, k)] = m.at(j - 1, k - 1);
    }
    Matrix direct = eval_on_matrices(c, a, d).at(0);
    std::vector<Scalar> lowered = eval_scalars(fam.circuit, entries);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) ASSERT_EQ(direct.at(j, k), lowered[j * d + k]);
  }
}

TEST(EvalOnMatrices, Examples) {
  Field q = Field::rationals();
  MatrixAssignment ids{{VarRef::x(1), Matrix::identity(q, 2)}, {VarRef::x(2), Matrix::identity(q, 2)}};
  EXPECT_TRUE(eval_on_matrices(C("x1*x2 - x2*x1"), ids, 2).at(0).is_zero());
  MatrixAssignment units{{VarRef::x(1), Matrix::unit(q, 2, 1, 1)}, {VarRef::x(2), Matrix::unit(q, 2, 1, 2)}};
  EXPECT_EQ(eval_on_matrices(C("x1*x2"), units, 2).at(0), Matrix::unit(q, 2, 1, 2));
  EXPECT_THROW(eval_on_matrices(C("x1*x3"), units, 2), PreconditionError);
  EXPECT_THROW(eval_on_matrices(C("x1*x2"), units, 3), PreconditionError);
}

TEST(EvalOnMatrices, AgreesWithPolynomialEvaluation) {
  std::mt19937_64 rng(8);
  Field f = Field::prime(101);
  for (int i = 0; i < 50; ++i) {
    Circuit c = testing_support::random_circuit(rng, 3, 25, f);
    NcPoly p;
    try {
      p = expand(c, c.output(), 20000);
    } catch (const CapExceeded&) {
      continue;
    }
    std::size_t d = 1 + rng() % 3;
    MatrixAssignment a;
    for (std::uint32_t v = 1; v <= 3; ++v) a[VarRef::x(v)] = testing_support::random_matrix(rng, f, d);
    ASSERT_EQ(eval_on_matrices(c, a, d).at(0), evaluate(p, a, d));
  }
}
