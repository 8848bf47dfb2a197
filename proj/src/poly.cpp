#include "matid/poly.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <unordered_map>

namespace matid {

namespace {

constexpr std::uint64_t pack(VarKind kind, std::uint64_t i, std::uint64_t j, std::uint64_t k) {
  return (static_cast<std::uint64_t>(kind) << 62) | (i << 40) | (j << 20) | k;
}

void check_index(std::uint32_t i, std::uint32_t limit, const char* what) {
  if (i == 0 || i > limit) throw PreconditionError(std::string("variable ") + what + " out of range");
}

std::uint32_t read_uint(std::string_view text, std::size_t& pos) {
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
  if (ec != std::errc() || ptr == text.data() + pos) throw ParseError("expected integer", pos);
  pos = static_cast<std::size_t>(ptr - text.data());
  return value;
}

}  // namespace

VarRef VarRef::x(std::uint32_t i) {
  check_index(i, kMaxIndex, "index");
  return VarRef(pack(VarKind::X, i, 0, 0));
}

VarRef VarRef::z(std::uint32_t i) {
  check_index(i, kMaxIndex, "index");
  return VarRef(pack(VarKind::Z, i, 0, 0));
}

VarRef VarRef::entry(std::uint32_t i, std::uint32_t j, std::uint32_t k) {
  check_index(i, kMaxIndex, "index");
  check_index(j, kMaxEntry, "row");
  check_index(k, kMaxEntry, "column");
  return VarRef(pack(VarKind::Entry, i, j, k));
}

VarRef VarRef::parse(std::string_view text) {
  if (text.empty()) throw ParseError("empty variable name", 0);
  std::size_t pos = 1;
  VarRef v;
  switch (text[0]) {
    case 'x':
      v = x(read_uint(text, pos));
      break;
    case 'z':
      v = z(read_uint(text, pos));
      break;
    case 'e': {
      std::uint32_t i = read_uint(text, pos);
      if (pos >= text.size() || text[pos] != '_') throw ParseError("expected '_'", pos);
      ++pos;
      std::uint32_t j = read_uint(text, pos);
      if (pos >= text.size() || text[pos] != '_') throw ParseError("expected '_'", pos);
      ++pos;
      v = entry(i, j, read_uint(text, pos));
      break;
    }
    default:
      throw ParseError("unknown variable kind", 0);
  }
  if (pos != text.size()) throw ParseError("trailing characters in variable", pos);
  return v;
}

std::string VarRef::str() const {
  switch (kind()) {
    case VarKind::X:
      return "x" + std::to_string(index());
    case VarKind::Z:
      return "z" + std::to_string(index());
    case VarKind::Entry:
      return "e" + std::to_string(index()) + "_" + std::to_string(row()) + "_" + std::to_string(col());
  }
  return "?";
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ w.size();
  for (const VarRef& v : w) {
    h ^= v.key() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string word_str(const Word& w) {
  std::string out;
  for (const VarRef& v : w) out += v.str();
  return out;
}

// ---------------------------------------------------------------- NcPoly

NcPoly NcPoly::constant(const Scalar& c) {
  NcPoly p(c.field());
  if (!c.is_zero()) p.terms_.push_back({Word{}, c});
  return p;
}

NcPoly NcPoly::variable(VarRef v, Field field) { return monomial(Word{v}, Scalar::one(field)); }

NcPoly NcPoly::monomial(Word word, const Scalar& c) {
  NcPoly p(c.field());
  if (!c.is_zero()) p.terms_.push_back({std::move(word), c});
  return p;
}

NcPoly NcPoly::from_terms(Field field, std::vector<Term> terms) {
  for (const Term& t : terms) {
    if (t.coeff.field() != field) throw FieldMismatch("term coefficient over " + t.coeff.field().name());
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return word_less(a.word, b.word); });
  NcPoly p(field);
  for (Term& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().word == t.word) {
      p.terms_.back().coeff += t.coeff;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coeff.is_zero()) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coeff.is_zero()) p.terms_.pop_back();
  return p;
}

Scalar NcPoly::coeff(const Word& w) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), w,
                             [](const Term& t, const Word& key) { return word_less(t.word, key); });
  if (it != terms_.end() && it->word == w) return it->coeff;
  return Scalar::zero(field_);
}

std::vector<VarRef> NcPoly::variables() const {
  std::vector<VarRef> vars;
  for (const Term& t : terms_) vars.insert(vars.end(), t.word.begin(), t.word.end());
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

void NcPoly::check_same(const NcPoly& o) const {
  if (field_ != o.field_) throw FieldMismatch("polynomials over " + field_.name() + " and " + o.field_.name());
}

NcPoly NcPoly::operator-() const {
  NcPoly p = *this;
  for (Term& t : p.terms_) t.coeff = -t.coeff;
  return p;
}

NcPoly NcPoly::operator+(const NcPoly& o) const {
  check_same(o);
  NcPoly out(field_);
  out.terms_.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && word_less(a->word, b->word))) {
      out.terms_.push_back(*a++);
    } else if (a == terms_.end() || word_less(b->word, a->word)) {
      out.terms_.push_back(*b++);
    } else {
      Scalar c = a->coeff + b->coeff;
      if (!c.is_zero()) out.terms_.push_back({a->word, c});
      ++a;
      ++b;
    }
  }
  return out;
}

NcPoly NcPoly::operator-(const NcPoly& o) const { return *this + (-o); }

NcPoly NcPoly::operator*(const NcPoly& o) const {
  check_same(o);
  if (is_zero() || o.is_zero()) return NcPoly(field_);
  PolyAccumulator acc(field_);
  Word w;
  for (const Term& a : terms_) {
    for (const Term& b : o.terms_) {
      w.clear();
      w.reserve(a.word.size() + b.word.size());
      w.insert(w.end(), a.word.begin(), a.word.end());
      w.insert(w.end(), b.word.begin(), b.word.end());
      acc.add(w, a.coeff * b.coeff);
    }
  }
  return acc.finish();
}

NcPoly NcPoly::scaled(const Scalar& c) const {
  if (c.field() != field_) throw FieldMismatch("scaling by an element of " + c.field().name());
  if (c.is_zero()) return NcPoly(field_);
  NcPoly p = *this;
  for (Term& t : p.terms_) t.coeff *= c;
  return p;
}

bool NcPoly::operator==(const NcPoly& o) const {
  if (field_ != o.field_ || terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].word != o.terms_[i].word || terms_[i].coeff != o.terms_[i].coeff) return false;
  }
  return true;
}

NcPoly NcPoly::to_field(Field target) const {
  if (target == field_) return *this;
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const Term& t : terms_) terms.push_back({t.word, t.coeff.to_field(target)});
  return from_terms(target, std::move(terms));
}

std::string NcPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const Term& t : terms_) {
    // Over GF(p) residues are printed as-is, so there is never a sign.
    bool negative = field_.is_rational() && t.coeff.value().sign() < 0;
    Scalar mag = negative ? -t.coeff : t.coeff;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    if (t.word.empty()) {
      out += mag.str();
    } else {
      if (!mag.is_one()) out += mag.str() + "*";
      out += word_str(t.word);
    }
  }
  return out;
}

// ------------------------------------------------------- PolyAccumulator

void PolyAccumulator::add(const Word& w, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = map_.try_emplace(w, c);
  if (!inserted) it->second += c;
}

void PolyAccumulator::add(Word&& w, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = map_.try_emplace(std::move(w), c);
  if (!inserted) it->second += c;
}

void PolyAccumulator::add(const NcPoly& p, const Scalar& scale) {
  if (scale.is_zero()) return;
  for (const Term& t : p.terms()) add(t.word, t.coeff * scale);
}

NcPoly PolyAccumulator::finish() {
  std::vector<Term> terms;
  terms.reserve(map_.size());
  for (auto& [w, c] : map_) {
    if (!c.is_zero()) terms.push_back({w, c});
  }
  map_.clear();
  return NcPoly::from_terms(field_, std::move(terms));
}

// ------------------------------------------------------------ operations

NcPoly ring_op(const NcPoly& f, const NcPoly& g, RingOp which) {
  switch (which) {
    case RingOp::Add:
      return f + g;
    case RingOp::Sub:
      return f - g;
    case RingOp::Mul:
      return f * g;
  }
  return f;
}

NcPoly substitute(const NcPoly& f, const Substitution& sigma) {
  for (const auto& [v, img] : sigma) {
    if (img.field() != f.field()) throw FieldMismatch("substitution image for " + v.str() + " over " + img.field().name());
  }
  const Field field = f.field();
  PolyAccumulator acc(field);
  std::vector<Term> cur, next;
  for (const Term& t : f.terms()) {
    cur.assign(1, Term{Word{}, t.coeff});
    for (const VarRef& v : t.word) {
      auto it = sigma.find(v);
      if (it == sigma.end()) {
        for (Term& c : cur) c.word.push_back(v);
        continue;
      }
      const NcPoly& img = it->second;
      if (img.is_zero()) {
        cur.clear();
        break;
      }
      next.clear();
      next.reserve(cur.size() * img.size());
      for (const Term& c : cur) {
        for (const Term& m : img.terms()) {
          Word w = c.word;
          w.insert(w.end(), m.word.begin(), m.word.end());
          next.push_back({std::move(w), c.coeff * m.coeff});
        }
      }
      std::swap(cur, next);
    }
    for (Term& c : cur) acc.add(std::move(c.word), c.coeff);
  }
  return acc.finish();
}

int z_degree(const Word& w) {
  return static_cast<int>(std::count_if(w.begin(), w.end(), [](const VarRef& v) { return v.kind() == VarKind::Z; }));
}

NcPoly homogeneous_part(const NcPoly& f, int j, Grading grading) {
  std::vector<Term> kept;
  for (const Term& t : f.terms()) {
    int deg = grading == Grading::Total ? static_cast<int>(t.word.size()) : z_degree(t.word);
    if (deg == j) kept.push_back(t);
  }
  return NcPoly::from_terms(f.field(), std::move(kept));
}

namespace {

void check_standard_size(std::size_t n, std::size_t cap) {
  if (n == 0) throw PreconditionError("standard polynomial needs at least one argument");
  if (n > cap) {
    throw CapExceeded("standard polynomial of " + std::to_string(n) + " arguments exceeds cap " + std::to_string(cap));
  }
}

}  // namespace

NcPoly standard_poly(std::span<const VarRef> vars, std::size_t cap, Field field) {
  std::vector<NcPoly> args;
  args.reserve(vars.size());
  for (const VarRef& v : vars) args.push_back(NcPoly::variable(v, field));
  return standard_poly(std::span<const NcPoly>(args), cap);
}

// Expansion along the first position: S(A) = sum_i (-1)^(rank of i in A) a_i S(A \ {i}),
// memoized over subsets, so the cost is 2^n * n products instead of n! products.
NcPoly standard_poly(std::span<const NcPoly> args, std::size_t cap) {
  const std::size_t n = args.size();
  check_standard_size(n, cap);
  const Field field = args[0].field();
  for (const NcPoly& a : args) {
    if (a.field() != field) throw FieldMismatch("standard polynomial arguments over different fields");
  }
  const std::uint32_t full = (1u << n) - 1;
  std::vector<NcPoly> memo(static_cast<std::size_t>(full) + 1, NcPoly(field));
  memo[0] = NcPoly::constant(Scalar::one(field));
  // Subsets in order of increasing size so every smaller subset is ready.
  std::vector<std::uint32_t> order(full);
  for (std::uint32_t s = 1; s <= full; ++s) order[s - 1] = s;
  std::stable_sort(order.begin(), order.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  for (std::uint32_t s : order) {
    NcPoly acc(field);
    int rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(s & (1u << i))) continue;
      NcPoly term = args[i] * memo[s & ~(1u << i)];
      acc = rank % 2 == 0 ? acc + term : acc - term;
      ++rank;
    }
    memo[s] = std::move(acc);
  }
  return memo[full];
}

NcPoly commutator(const NcPoly& a, const NcPoly& b) { return a * b - b * a; }

NcPoly gen_commutator(std::span<const NcPoly> args) {
  if (args.size() < 2) throw PreconditionError("generalized commutator needs at least two arguments");
  NcPoly acc = args[0];
  for (std::size_t i = 1; i < args.size(); ++i) acc = commutator(acc, args[i]);
  return acc;
}

NcPoly bracket_map(const NcPoly& f) {
  PolyAccumulator acc(f.field());
  for (const Term& t : f.terms()) {
    if (z_degree(t.word) != 1) continue;
    auto zpos = std::find_if(t.word.begin(), t.word.end(), [](const VarRef& v) { return v.kind() == VarKind::Z; });
    Word w;
    w.reserve(t.word.size());
    w.push_back(*zpos);
    w.insert(w.end(), zpos + 1, t.word.end());
    w.insert(w.end(), t.word.begin(), zpos);
    acc.add(std::move(w), t.coeff);
  }
  return acc.finish();
}

NcPoly combine(std::span<const NcPoly> polys) {
  if (polys.empty()) return NcPoly();
  const Field field = polys[0].field();
  NcPoly out(field);
  for (std::size_t i = 0; i < polys.size(); ++i) {
    for (const Term& t : polys[i].terms()) {
      if (z_degree(t.word) != 0) throw PreconditionError("combine input " + std::to_string(i + 1) + " contains Z variables");
    }
    out += NcPoly::variable(VarRef::z(static_cast<std::uint32_t>(i + 1)), field) * polys[i];
  }
  return out;
}

bool is_multilinear(const NcPoly& f, std::span<const VarRef> vars) {
  std::vector<VarRef> want(vars.begin(), vars.end());
  std::sort(want.begin(), want.end());
  if (std::adjacent_find(want.begin(), want.end()) != want.end()) return false;
  Word sorted;
  for (const Term& t : f.terms()) {
    sorted = t.word;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != want) return false;
  }
  return true;
}

std::vector<VarRef> x_vars(std::uint32_t n) {
  std::vector<VarRef> out;
  out.reserve(n);
  for (std::uint32_t i = 1; i <= n; ++i) out.push_back(VarRef::x(i));
  return out;
}

}  // namespace matid
