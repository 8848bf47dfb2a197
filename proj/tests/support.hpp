#pragma once

// Random generators shared by the test binaries.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "matid/circuit.hpp"
#include "matid/matrix.hpp"
#include "matid/poly.hpp"

namespace testing_support {

inline matid::NcPoly random_poly(std::mt19937_64& rng, std::uint32_t nvars, std::size_t max_deg, std::size_t max_terms,
                                 bool with_z = false, matid::Field field = matid::Field::rationals()) {
  std::vector<matid::Term> terms;
  std::size_t n = 1 + rng() % max_terms;
  for (std::size_t t = 0; t < n; ++t) {
    matid::Word w;
    std::size_t len = rng() % (max_deg + 1);
    for (std::size_t i = 0; i < len; ++i) {
      auto idx = static_cast<std::uint32_t>(1 + rng() % nvars);
      w.push_back(with_z && rng() % 3 == 0 ? matid::VarRef::z(idx) : matid::VarRef::x(idx));
    }
    auto c = static_cast<std::int64_t>(rng() % 9) - 4;
    terms.push_back({w, matid::Scalar(field, matid::Rational(c))});
  }
  return matid::NcPoly::from_terms(field, terms);
}

/// Random single-output circuit with at most `max_gates` gates over x1..x_nvars.
inline matid::Circuit random_circuit(std::mt19937_64& rng, std::uint32_t nvars, std::size_t max_gates,
                                     matid::Field field = matid::Field::rationals()) {
  matid::Circuit c(field);
  std::size_t leaves = 1 + rng() % 4;
  for (std::size_t i = 0; i < leaves; ++i) {
    if (rng() % 5 == 0) {
      c.constant(matid::Scalar(field, matid::Rational(static_cast<std::int64_t>(rng() % 7) - 3)));
    } else {
      c.var(matid::VarRef::x(static_cast<std::uint32_t>(1 + rng() % nvars)));
    }
  }
  std::size_t target = c.size() + rng() % (max_gates - c.size() + 1);
  while (c.size() < target) {
    auto a = static_cast<matid::GateId>(rng() % c.size());
    auto b = static_cast<matid::GateId>(rng() % c.size());
    switch (rng() % 5) {
      case 0:
        c.var(matid::VarRef::x(static_cast<std::uint32_t>(1 + rng() % nvars)));
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
  c.add_output(static_cast<matid::GateId>(c.size() - 1));
  return c;
}

inline matid::Matrix random_matrix(std::mt19937_64& rng, matid::Field field, std::size_t d) {
  matid::Matrix m(field, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t k = 0; k < d; ++k) {
      std::uint64_t bound = field.is_rational() ? 11 : field.modulus();
      auto v = static_cast<std::int64_t>(rng() % bound) - (field.is_rational() ? 5 : 0);
      m.at(r, k) = matid::Scalar(field, matid::Rational(v));
    }
  return m;
}

/// Copies the cone of `root` into `c`, swapping the children of `target`.
inline matid::GateId swapped_copy(matid::Circuit& c, matid::GateId root, matid::GateId target) {
  std::unordered_map<matid::GateId, matid::GateId> memo;
  std::function<matid::GateId(matid::GateId)> go = [&](matid::GateId g) -> matid::GateId {
    if (auto it = memo.find(g); it != memo.end()) return it->second;
    const matid::Gate gate = c.gate(g);
    matid::GateId out = g;
    if (gate.op == matid::GateOp::Add || gate.op == matid::GateOp::Mul) {
      matid::GateId l = go(gate.left), r = go(gate.right);
      if (g == target) std::swap(l, r);
      out = gate.op == matid::GateOp::Add ? c.add(l, r) : c.mul(l, r);
    }
    memo.emplace(g, out);
    return out;
  };
  return go(root);
}

/// Inner gates in the cone of `root`, ascending.
inline std::vector<matid::GateId> inner_gates(const matid::Circuit& c, matid::GateId root) {
  std::vector<char> seen(c.size());
  std::vector<matid::GateId> stack{root}, out;
  while (!stack.empty()) {
    matid::GateId g = stack.back();
    stack.pop_back();
    if (seen[g]) continue;
    seen[g] = 1;
    const matid::Gate& gate = c.gate(g);
    if (gate.op == matid::GateOp::Add || gate.op == matid::GateOp::Mul) {
      out.push_back(g);
      stack.push_back(gate.left);
      stack.push_back(gate.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support
