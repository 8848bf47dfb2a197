#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "matid/scalar.hpp"

namespace matid {

enum class VarKind : std::uint8_t { X = 0, Z = 1, Entry = 2 };

/// A variable of the free algebra: x_i, z_i, or an entry variable e_{i,j,k}
/// (entry (j,k) of the matrix substituted for variable i).
///
/// Ordered kind-major, then by (i, j, k) lexicographically.
class VarRef {
 public:
  static constexpr std::uint32_t kMaxIndex = (1u << 22) - 1;
  static constexpr std::uint32_t kMaxEntry = (1u << 20) - 1;

  VarRef() = default;
  static VarRef x(std::uint32_t i);
  static VarRef z(std::uint32_t i);
  static VarRef entry(std::uint32_t i, std::uint32_t j, std::uint32_t k);
  /// "x3", "z1", "e2_1_2".
  static VarRef parse(std::string_view text);

  VarKind kind() const { return static_cast<VarKind>(key_ >> 62); }
  std::uint32_t index() const { return static_cast<std::uint32_t>((key_ >> 40) & kMaxIndex); }
  std::uint32_t row() const { return static_cast<std::uint32_t>((key_ >> 20) & kMaxEntry); }
  std::uint32_t col() const { return static_cast<std::uint32_t>(key_ & kMaxEntry); }
  std::uint64_t key() const { return key_; }

  std::string str() const;

  auto operator<=>(const VarRef&) const = default;

 private:
  explicit VarRef(std::uint64_t key) : key_(key) {}
  std::uint64_t key_ = 0;
};

/// Ordered product of variables; the empty word is the unit.
using Word = std::vector<VarRef>;

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

/// Degree first, then lexicographic over the VarRef order.
bool word_less(const Word& a, const Word& b);
std::string word_str(const Word& w);

struct Term {
  Word word;
  Scalar coeff;
};

/// Sparse element of the free algebra F<X>: nonzero coefficients on words,
/// kept sorted by `word_less`. Two polynomials are equal iff their term
/// lists are identical.
class NcPoly {
 public:
  NcPoly() = default;
  explicit NcPoly(Field field) : field_(field) {}

  static NcPoly constant(const Scalar& c);
  static NcPoly constant(Field field, const Rational& c) { return constant(Scalar(field, c)); }
  static NcPoly variable(VarRef v, Field field = Field::rationals());
  static NcPoly monomial(Word word, const Scalar& c);
  /// Combines repeated words, drops zero coefficients and sorts.
  static NcPoly from_terms(Field field, std::vector<Term> terms);

  Field field() const { return field_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].word.empty()); }

  /// Total degree; -1 stands for the degree of the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.back().word.size()); }
  Scalar coeff(const Word& w) const;
  Scalar constant_term() const { return coeff(Word{}); }
  /// Sorted, duplicate-free list of the variables that occur.
  std::vector<VarRef> variables() const;

  NcPoly operator-() const;
  NcPoly operator+(const NcPoly& o) const;
  NcPoly operator-(const NcPoly& o) const;
  NcPoly operator*(const NcPoly& o) const;
  NcPoly& operator+=(const NcPoly& o) { return *this = *this + o; }
  NcPoly& operator-=(const NcPoly& o) { return *this = *this - o; }
  NcPoly& operator*=(const NcPoly& o) { return *this = *this * o; }
  NcPoly scaled(const Scalar& c) const;

  bool operator==(const NcPoly& o) const;
  bool operator!=(const NcPoly& o) const { return !(*this == o); }

  /// Re-reads every coefficient in another field (rationals reduce mod p).
  NcPoly to_field(Field target) const;

  /// Canonical text in the polynomial grammar, e.g. "x1x2 - x2x1", "0".
  std::string str() const;

 private:
  void check_same(const NcPoly& o) const;

  Field field_;
  std::vector<Term> terms_;
};

/// Hash-map accumulator for building polynomials term by term.
class PolyAccumulator {
 public:
  explicit PolyAccumulator(Field field) : field_(field) {}
  void add(const Word& w, const Scalar& c);
  void add(Word&& w, const Scalar& c);
  void add(const NcPoly& p, const Scalar& scale);
  std::size_t size() const { return map_.size(); }
  NcPoly finish();

 private:
  Field field_;
  std::unordered_map<Word, Scalar, WordHash> map_;
};

// ------------------------------------------------------------------------
// Free-algebra operations.

enum class RingOp { Add, Sub, Mul };
NcPoly ring_op(const NcPoly& f, const NcPoly& g, RingOp which);

/// Simultaneous substitution; variables missing from `sigma` map to themselves.
using Substitution = std::map<VarRef, NcPoly>;
NcPoly substitute(const NcPoly& f, const Substitution& sigma);

enum class Grading { Total, ZDegree };
NcPoly homogeneous_part(const NcPoly& f, int j, Grading grading = Grading::Total);
/// Number of Z-kind letters in a word.
int z_degree(const Word& w);

inline constexpr std::size_t kDefaultStandardCap = 8;

/// S_n(v_1..v_n) = sum over permutations of sgn(s) v_s(1)...v_s(n).
NcPoly standard_poly(std::span<const VarRef> vars, std::size_t cap = kDefaultStandardCap,
                     Field field = Field::rationals());
/// S_n evaluated at polynomial arguments, expanded exactly.
NcPoly standard_poly(std::span<const NcPoly> args, std::size_t cap = kDefaultStandardCap);

/// Left-nested [[f1,f2],...,fn]; needs at least two arguments.
NcPoly gen_commutator(std::span<const NcPoly> args);
NcPoly commutator(const NcPoly& a, const NcPoly& b);

/// Linear map sending M1 z M2 (exactly one Z letter) to z M2 M1 and every
/// monomial of Z-degree != 1 to zero.
NcPoly bracket_map(const NcPoly& f);

/// sum_i z_i P_i with fresh z_1..z_n; inputs must be Z-free.
NcPoly combine(std::span<const NcPoly> polys);

/// True iff every monomial contains each listed variable exactly once and
/// nothing else. The zero polynomial qualifies vacuously.
bool is_multilinear(const NcPoly& f, std::span<const VarRef> vars);

/// x_1..x_n as VarRefs.
std::vector<VarRef> x_vars(std::uint32_t n);

}  // namespace matid

template <>
struct std::hash<matid::VarRef> {
  std::size_t operator()(const matid::VarRef& v) const noexcept { return std::hash<std::uint64_t>{}(v.key()); }
};
