#include "matid/ideals.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "matid/errors.hpp"
#include "matid/parse.hpp"

namespace matid {

// ---------------------------------------------------------------- instances

SubstitutionInstance::SubstitutionInstance(NcPoly basis, std::vector<VarRef> slots, Substitution substitution)
    : basis_(std::move(basis)), slots_(std::move(slots)), substitution_(std::move(substitution)) {
  std::set<VarRef> slot_set(slots_.begin(), slots_.end());
  if (slot_set.size() != slots_.size()) throw PreconditionError("repeated slot variable");
  for (const VarRef& v : basis_.variables()) {
    if (!slot_set.count(v)) throw PreconditionError("basis variable " + v.str() + " is not a slot");
  }
  for (const auto& [v, img] : substitution_) {
    if (!slot_set.count(v)) throw PreconditionError("substitution for non-slot variable " + v.str());
    if (img.field() != basis_.field()) throw FieldMismatch("substitution image for " + v.str());
  }
  expansion_ = substitute(basis_, substitution_);
}

SubstitutionInstance SubstitutionInstance::of(NcPoly basis, Substitution substitution) {
  std::vector<VarRef> slots = basis.variables();
  return SubstitutionInstance(std::move(basis), std::move(slots), std::move(substitution));
}

NcPoly SubstitutionInstance::image(std::size_t i) const {
  const VarRef v = slots_.at(i);
  auto it = substitution_.find(v);
  return it == substitution_.end() ? NcPoly::variable(v, basis_.field()) : it->second;
}

std::size_t instance_count(const GenerationCertificate& cert) {
  std::set<std::string> seen;
  for (const Summand& s : cert.summands) {
    if (!s.instance.expansion().is_zero()) seen.insert(s.instance.expansion().str());
  }
  return seen.size();
}

CertificateCheck verify_certificate(const GenerationCertificate& cert) {
  PolyAccumulator acc(cert.target.field());
  for (const Summand& s : cert.summands) acc.add(s.h * s.instance.expansion() * s.ell, Scalar::one(cert.target.field()));
  CertificateCheck out;
  out.residual = cert.target - acc.finish();
  out.valid = out.residual.is_zero();
  out.instance_count = instance_count(cert);
  return out;
}

GenerationCertificate compose_certificates(const GenerationCertificate& outer, const InnerCertificates& inner) {
  std::size_t r = 0;
  for (const Summand& s : outer.summands) {
    auto it = inner.find(s.instance.basis().str());
    if (it == inner.end()) throw PreconditionError("no inner certificate for " + s.instance.basis().str());
    const GenerationCertificate& in = it->second;
    if (in.target != s.instance.basis()) throw PreconditionError("inner certificate target differs from " + it->first);
    CertificateCheck ck = verify_certificate(in);
    if (!ck.valid) throw PreconditionError("inner certificate for " + it->first + " does not verify");
    r = std::max(r, ck.instance_count);
  }

  GenerationCertificate out;
  out.target = outer.target;
  // Summands whose instances expand alike are rewritten through one
  // representative substitution, so the composed count stays within r*q.
  std::map<std::string, const SubstitutionInstance*> representative;
  for (const Summand& s : outer.summands) {
    if (s.instance.expansion().is_zero()) continue;
    const SubstitutionInstance& rep = *representative.emplace(s.instance.expansion().str(), &s.instance).first->second;
    const GenerationCertificate& in = inner.at(rep.basis().str());
    Substitution sigma;
    for (std::size_t i = 0; i < rep.slots().size(); ++i) sigma[rep.slots()[i]] = rep.image(i);
    for (const Summand& t : in.summands) {
      Substitution composed;
      for (std::size_t i = 0; i < t.instance.slots().size(); ++i) {
        composed[t.instance.slots()[i]] = substitute(t.instance.image(i), sigma);
      }
      out.summands.push_back({s.h * substitute(t.h, sigma),
                              SubstitutionInstance(t.instance.basis(), t.instance.slots(), std::move(composed)),
                              substitute(t.ell, sigma) * s.ell});
    }
  }

  CertificateCheck ck = verify_certificate(out);
  if (!ck.valid) throw Error("composed certificate does not verify: residual " + ck.residual.str());
  if (ck.instance_count > r * instance_count(outer)) {
    throw Error("composed certificate uses " + std::to_string(ck.instance_count) + " instances, above r*q");
  }
  return out;
}

// --------------------------------------------------------------- membership

namespace {

using Multidegree = std::map<VarRef, int>;

Multidegree multidegree(const Word& w) {
  Multidegree m;
  for (const VarRef& v : w) ++m[v];
  return m;
}

std::uint32_t max_x_index(const NcPoly& g) {
  std::uint32_t top = 0;
  for (const VarRef& v : g.variables()) {
    if (v.kind() == VarKind::X) top = std::max(top, v.index());
  }
  return top;
}

// Every way of relabeling the occurrences of each repeated variable by its
// copies bijectively; appends the resulting words of `w` to `out`.
void relabel_occurrences(const Word& w, const std::map<VarRef, std::vector<VarRef>>& copies, const Scalar& c,
                         std::vector<Term>& out) {
  std::vector<std::pair<VarRef, std::vector<std::size_t>>> positions;
  for (const auto& [v, cs] : copies) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] == v) pos.push_back(i);
    }
    positions.push_back({v, std::move(pos)});
  }
  Word cur = w;
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == positions.size()) {
      out.push_back({cur, c});
      return;
    }
    const auto& [v, pos] = positions[k];
    std::vector<VarRef> perm = copies.at(v);
    std::sort(perm.begin(), perm.end());
    do {
      for (std::size_t i = 0; i < pos.size(); ++i) cur[pos[i]] = perm[i];
      self(self, k + 1);
    } while (std::next_permutation(perm.begin(), perm.end()));
  };
  rec(rec, 0);
}

// Prime for the modular pre-pass.
constexpr std::uint64_t kFilterPrime = (1ULL << 61) - 1;

struct SpanVector {
  std::size_t generator = 0;
  Word u, v;
  std::vector<Word> slot_words;
  NcPoly value;
};

// Dense exact row reduction. Pivot rows are kept reduced against earlier
// pivots' columns, with the combination of input rows they represent.
class ExactEchelon {
 public:
  ExactEchelon(Field field, std::size_t dim) : field_(field), dim_(dim) {}

  // Reduces `row` (with combination `combo`) against the pivots.
  void reduce(std::vector<Scalar>& row, std::vector<Scalar>& combo) const {
    for (std::size_t i = 0; i < pivots_.size(); ++i) {
      const Scalar f = row[cols_[i]];
      if (f.is_zero()) continue;
      const auto& p = pivots_[i];
      for (std::size_t c = 0; c < dim_; ++c) {
        if (!p[c].is_zero()) row[c] -= f * p[c];
      }
      const auto& pc = combos_[i];
      for (std::size_t c = 0; c < pc.size(); ++c) {
        if (!pc[c].is_zero()) combo[c] -= f * pc[c];
      }
    }
  }

  // Returns true when the row was independent and became a pivot. With
  // input_count 0 no combinations are tracked.
  bool insert(std::vector<Scalar> row, std::size_t input_index, std::size_t input_count) {
    std::vector<Scalar> combo(input_count, Scalar::zero(field_));
    if (input_index < input_count) combo[input_index] = Scalar::one(field_);
    reduce(row, combo);
    std::size_t c = 0;
    while (c < dim_ && row[c].is_zero()) ++c;
    if (c == dim_) return false;
    const Scalar inv = row[c].inverse();
    for (auto& x : row) x *= inv;
    for (auto& x : combo) x *= inv;
    pivots_.push_back(std::move(row));
    combos_.push_back(std::move(combo));
    cols_.push_back(c);
    return true;
  }

  std::size_t rank() const { return pivots_.size(); }
  const std::vector<std::vector<Scalar>>& pivots() const { return pivots_; }
  const std::vector<std::size_t>& cols() const { return cols_; }

 private:
  Field field_;
  std::size_t dim_;
  std::vector<std::vector<Scalar>> pivots_;
  std::vector<std::vector<Scalar>> combos_;
  std::vector<std::size_t> cols_;
};

}  // namespace

std::vector<NcPoly> linearize(const NcPoly& g) {
  std::map<Multidegree, std::vector<Term>> parts;
  for (const Term& t : g.terms()) parts[multidegree(t.word)].push_back(t);

  std::uint32_t next = max_x_index(g);
  std::vector<NcPoly> out;
  for (auto& [md, terms] : parts) {
    std::map<VarRef, std::vector<VarRef>> copies;
    for (const auto& [v, k] : md) {
      if (k < 2) continue;
      std::vector<VarRef> cs{v};
      for (int i = 1; i < k; ++i) cs.push_back(VarRef::x(++next));
      copies[v] = std::move(cs);
    }
    if (copies.empty()) {
      out.push_back(NcPoly::from_terms(g.field(), terms));
      continue;
    }
    std::vector<Term> lin;
    for (const Term& t : terms) relabel_occurrences(t.word, copies, t.coeff, lin);
    NcPoly p = NcPoly::from_terms(g.field(), std::move(lin));
    if (!p.is_zero()) out.push_back(std::move(p));
  }
  return out;
}

MembershipResult multilinear_membership(const NcPoly& f, const std::vector<NcPoly>& generators,
                                        const std::vector<VarRef>& vars) {
  const std::size_t n = vars.size();
  if (n > kMaxMembershipVars) {
    throw PreconditionError("membership supports at most " + std::to_string(kMaxMembershipVars) + " variables");
  }
  std::vector<VarRef> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw PreconditionError("repeated variable");
  if (!is_multilinear(f, sorted)) throw PreconditionError("target is not multilinear over the variable set");
  const Field field = f.field();

  // Word basis: all orderings of the variables.
  std::vector<Word> words;
  std::unordered_map<Word, std::size_t, WordHash> index;
  {
    Word w = sorted;
    do {
      index.emplace(w, words.size());
      words.push_back(w);
    } while (std::next_permutation(w.begin(), w.end()));
  }
  const std::size_t dim = words.size();

  // Linearized generators with their slots.
  std::vector<NcPoly> lins;
  for (const NcPoly& g : generators) {
    if (g.field() != field) throw FieldMismatch("generator over " + g.field().name());
    bool multilinear = true;
    for (const Term& t : g.terms()) {
      for (const auto& [v, k] : multidegree(t.word)) multilinear = multilinear && k == 1;
    }
    if (!multilinear && !field.is_rational()) {
      throw PreconditionError("linearization of non-multilinear generators needs characteristic zero");
    }
    for (NcPoly& p : linearize(g)) lins.push_back(std::move(p));
  }

  // Spanning set, deduplicated up to scalar multiples.
  std::vector<SpanVector> span;
  std::set<std::string> seen;
  for (std::size_t gi = 0; gi < lins.size(); ++gi) {
    const NcPoly& L = lins[gi];
    const std::vector<VarRef> slots = L.variables();
    const std::size_t m = slots.size();
    if (m > n || L.degree() != static_cast<int>(m)) continue;
    Word perm = sorted;
    do {
      // Cut perm into u | w_1 .. w_m | v with every w_k nonempty.
      std::vector<std::size_t> cuts(m + 1);
      auto place = [&](auto&& self, std::size_t k, std::size_t from) -> void {
        if (k == m + 1) {
          SpanVector sv;
          sv.generator = gi;
          sv.u.assign(perm.begin(), perm.begin() + cuts[0]);
          sv.v.assign(perm.begin() + cuts[m], perm.end());
          Substitution sigma;
          for (std::size_t s = 0; s < m; ++s) {
            Word w(perm.begin() + cuts[s], perm.begin() + cuts[s + 1]);
            sigma[slots[s]] = NcPoly::monomial(w, Scalar::one(field));
            sv.slot_words.push_back(std::move(w));
          }
          sv.value = NcPoly::monomial(sv.u, Scalar::one(field)) * substitute(L, sigma) *
                     NcPoly::monomial(sv.v, Scalar::one(field));
          if (sv.value.is_zero()) return;
          std::string key = sv.value.scaled(sv.value.terms().front().coeff.inverse()).str();
          if (seen.insert(std::move(key)).second) span.push_back(std::move(sv));
          return;
        }
        // cuts[k] is where piece k+1 starts; slot pieces need length >= 1.
        const std::size_t lo = k == 0 ? 0 : from + 1;
        const std::size_t remaining_slots = m - k;
        for (std::size_t c = lo; c + remaining_slots <= n; ++c) {
          cuts[k] = c;
          self(self, k + 1, c);
        }
      };
      place(place, 0, 0);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  auto dense = [&](const NcPoly& p) {
    std::vector<Scalar> row(dim, Scalar::zero(field));
    for (const Term& t : p.terms()) row[index.at(t.word)] = t.coeff;
    return row;
  };

  // Modular pre-pass: rows independent mod p are independent over Q, so
  // they go first and the exact pass mostly confirms dependencies.
  std::vector<std::size_t> order(span.size());
  std::iota(order.begin(), order.end(), 0);
  if (field.is_rational() && !span.empty()) {
    const Field fp = Field::prime(kFilterPrime);
    std::vector<std::vector<std::uint64_t>> piv;
    std::vector<std::size_t> piv_col;
    std::vector<char> independent(span.size(), 0);
    for (std::size_t i = 0; i < span.size() && piv.size() < dim; ++i) {
      std::vector<std::uint64_t> row(dim, 0);
      bool ok = true;
      for (const Term& t : span[i].value.terms()) {
        try {
          row[index.at(t.word)] = t.coeff.to_field(fp).residue();
        } catch (const Error&) {
          ok = false;
        }
      }
      if (!ok) continue;
      for (std::size_t k = 0; k < piv.size(); ++k) {
        std::uint64_t a = row[piv_col[k]];
        if (a == 0) continue;
        for (std::size_t c = 0; c < dim; ++c) {
          if (piv[k][c]) row[c] = (row[c] + kFilterPrime - mul_mod(a, piv[k][c], kFilterPrime)) % kFilterPrime;
        }
      }
      std::size_t c = 0;
      while (c < dim && row[c] == 0) ++c;
      if (c == dim) continue;
      std::uint64_t inv = inv_mod(row[c], kFilterPrime);
      for (auto& x : row) x = mul_mod(x, inv, kFilterPrime);
      piv.push_back(std::move(row));
      piv_col.push_back(c);
      independent[i] = 1;
    }
    std::stable_partition(order.begin(), order.end(), [&](std::size_t i) { return independent[i] != 0; });
  }

  ExactEchelon ech(field, dim);
  std::vector<std::size_t> pivot_input;  // span index of each pivot
  for (std::size_t i : order) {
    if (ech.insert(dense(span[i].value), pivot_input.size(), 0)) pivot_input.push_back(i);
  }
  // Re-run with combinations tracked over the pivot inputs only.
  ExactEchelon basis(field, dim);
  for (std::size_t k = 0; k < pivot_input.size(); ++k) basis.insert(dense(span[pivot_input[k]].value), k, pivot_input.size());

  MembershipResult out;
  out.dimension = dim;
  out.spanning_vectors = span.size();
  out.span_rank = basis.rank();

  std::vector<Scalar> row = dense(f);
  std::vector<Scalar> combo(pivot_input.size(), Scalar::zero(field));
  basis.reduce(row, combo);
  const bool member = std::all_of(row.begin(), row.end(), [](const Scalar& s) { return s.is_zero(); });
  out.member = member;
  out.rank_with_target = out.span_rank + (member ? 0 : 1);
  out.combination.target = f;
  if (!member) {
    // Row is zero on every pivot column; pick a free column c where it is
    // not and solve lambda = e_c - sum alpha_i e_{col_i} against the pivots.
    const auto& piv = basis.pivots();
    const auto& cols = basis.cols();
    std::size_t c = 0;
    while (row[c].is_zero()) ++c;
    std::vector<Scalar> alpha(piv.size(), Scalar::zero(field));
    for (std::size_t i = piv.size(); i-- > 0;) {
      Scalar a = piv[i][c];
      for (std::size_t k = i + 1; k < piv.size(); ++k) a -= alpha[k] * piv[i][cols[k]];
      alpha[i] = a;
    }
    std::vector<Term> lambda{{words[c], Scalar::one(field)}};
    for (std::size_t i = 0; i < piv.size(); ++i) lambda.push_back({words[cols[i]], -alpha[i]});
    out.dual_witness = NcPoly::from_terms(field, std::move(lambda));
    return out;
  }

  // f - sum(combo_k * pivot_input_k) = 0 after reduction, so f = -sum(...).
  for (std::size_t k = 0; k < combo.size(); ++k) {
    if (combo[k].is_zero()) continue;
    const SpanVector& sv = span[pivot_input[k]];
    const NcPoly& L = lins[sv.generator];
    Substitution sigma;
    const std::vector<VarRef> slots = L.variables();
    for (std::size_t s = 0; s < slots.size(); ++s) sigma[slots[s]] = NcPoly::monomial(sv.slot_words[s], Scalar::one(field));
    out.combination.summands.push_back({NcPoly::monomial(sv.u, -combo[k]), SubstitutionInstance(L, slots, std::move(sigma)),
                                        NcPoly::monomial(sv.v, Scalar::one(field))});
  }
  if (!verify_certificate(out.combination).valid) throw Error("membership combination does not verify");
  return out;
}

// ------------------------------------------------------------ commutator Q

CommutatorQ q_commutator_exact(const NcPoly& f) {
  const Field field = f.field();
  const std::vector<VarRef> vars = f.variables();
  const std::size_t n = vars.size();
  std::map<VarRef, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos[vars[i]] = i;

  std::vector<std::vector<Scalar>> a(n, std::vector<Scalar>(n, Scalar::zero(field)));
  for (const Term& t : f.terms()) {
    if (t.word.size() != 2 || t.word[0] == t.word[1]) {
      throw PreconditionError("q_commutator_exact needs a combination of commutators [x_i,x_j]; found " + word_str(t.word));
    }
    a[pos[t.word[0]]][pos[t.word[1]]] = t.coeff;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i][j] != -a[j][i]) throw PreconditionError("coefficient matrix is not antisymmetric");
    }
  }

  // Peel off rank-2 pieces u v^T - v u^T with u = column i, v = column j / a_ij.
  const VarRef s1 = VarRef::x(1), s2 = VarRef::x(2);
  const NcPoly comm = commutator(NcPoly::variable(s1, field), NcPoly::variable(s2, field));
  CommutatorQ out;
  out.certificate.target = f;
  for (;;) {
    std::size_t pi = n, pj = n;
    for (std::size_t i = 0; i < n && pi == n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!a[i][j].is_zero()) {
          pi = i;
          pj = j;
          break;
        }
      }
    }
    if (pi == n) break;
    const Scalar inv = a[pi][pj].inverse();
    std::vector<Scalar> u(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
      u[k] = a[k][pi];
      v[k] = a[k][pj] * inv;
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < n; ++l) a[k][l] -= u[k] * v[l] - v[k] * u[l];
    }
    auto linear_form = [&](const std::vector<Scalar>& c) {
      std::vector<Term> ts;
      for (std::size_t k = 0; k < n; ++k) {
        if (!c[k].is_zero()) ts.push_back({Word{vars[k]}, c[k]});
      }
      return NcPoly::from_terms(field, std::move(ts));
    };
    out.certificate.summands.push_back({NcPoly::constant(Scalar::one(field)),
                                        SubstitutionInstance(comm, {s1, s2}, {{s1, linear_form(u)}, {s2, linear_form(v)}}),
                                        NcPoly::constant(Scalar::one(field))});
    ++out.q;
  }
  CertificateCheck ck = verify_certificate(out.certificate);
  if (!ck.valid || ck.instance_count != out.q) throw Error("commutator certificate does not verify");
  return out;
}

// ------------------------------------------------------------- lemma tools

std::vector<SubstitutionInstance> linear_reduce(const std::vector<SubstitutionInstance>& instances) {
  std::vector<SubstitutionInstance> out;
  for (const SubstitutionInstance& inst : instances) {
    if (inst.basis() != standard_poly(inst.slots(), kDefaultStandardCap, inst.basis().field())) {
      throw PreconditionError("linear_reduce expects instances of a standard polynomial in its slots");
    }
    Substitution reduced;
    bool vanishes = false;
    for (std::size_t i = 0; i < inst.slots().size(); ++i) {
      NcPoly lin = homogeneous_part(inst.image(i), 1);
      vanishes = vanishes || lin.is_zero();
      reduced[inst.slots()[i]] = std::move(lin);
    }
    if (!vanishes) out.emplace_back(inst.basis(), inst.slots(), std::move(reduced));
  }
  return out;
}

GenerationCertificate transfer_witness(const std::vector<NcPoly>& Fs, const std::vector<NcPoly>& Gs,
                                       const std::vector<NcPoly>& Ps, std::size_t j) {
  const std::size_t n = Ps.size();
  if (n == 0 || n % 2 != 0) throw PreconditionError("transfer_witness needs an even number of polynomials");
  if (j >= n) throw PreconditionError("slot index out of range");
  if (Fs.size() != Gs.size()) throw PreconditionError("F and G lists differ in length");
  const Field field = Ps[0].field();

  auto z0 = [](const NcPoly& p) { return homogeneous_part(p, 0, Grading::ZDegree); };
  std::vector<NcPoly> args;
  for (const NcPoly& p : Ps) args.push_back(z0(p));
  const NcPoly pj1 = homogeneous_part(Ps[j], 1, Grading::ZDegree);

  std::vector<NcPoly> lifted = args;
  lifted[j] = pj1;
  const NcPoly s_lifted = standard_poly(lifted);
  NcPoly inner(field), gf(field);
  for (std::size_t i = 0; i < Fs.size(); ++i) {
    inner += z0(Fs[i]) * s_lifted * z0(Gs[i]);
    gf += z0(Gs[i]) * z0(Fs[i]);
  }

  GenerationCertificate cert;
  cert.target = bracket_map(inner);

  const std::vector<VarRef> slots = x_vars(static_cast<std::uint32_t>(n));
  Substitution sigma;
  for (std::size_t t = 0; t < n; ++t) sigma[slots[t]] = t == j ? gf : args[t];
  SubstitutionInstance inst(standard_poly(slots, kDefaultStandardCap, field), slots, std::move(sigma));
  if (!inst.expansion().is_zero()) {
    for (const Term& t : pj1.terms()) {
      auto zpos = std::find_if(t.word.begin(), t.word.end(), [](const VarRef& v) { return v.kind() == VarKind::Z; });
      Word zv(zpos, t.word.end());
      Word u(t.word.begin(), zpos);
      cert.summands.push_back({NcPoly::monomial(std::move(zv), -t.coeff), inst, NcPoly::monomial(std::move(u), Scalar::one(field))});
    }
  }
  CertificateCheck ck = verify_certificate(cert);
  if (!ck.valid) throw Error("transfer certificate does not verify: residual " + ck.residual.str());
  return cert;
}

CommutatorPolynomial& CommutatorPolynomial::add(const Scalar& coeff, std::vector<std::vector<VarRef>> factors) {
  if (coeff.field() != field_) throw FieldMismatch("commutator polynomial coefficient over " + coeff.field().name());
  for (const auto& f : factors) {
    if (f.size() < 2) throw PreconditionError("a generalized commutator needs at least two arguments");
  }
  products_.push_back({coeff, std::move(factors)});
  return *this;
}

NcPoly CommutatorPolynomial::expand() const {
  NcPoly out(field_);
  for (const Product& p : products_) {
    NcPoly prod = NcPoly::constant(p.coeff);
    for (const auto& factor : p.factors) {
      std::vector<NcPoly> args;
      for (const VarRef& v : factor) args.push_back(NcPoly::variable(v, field_));
      prod *= gen_commutator(args);
    }
    out += prod;
  }
  return out;
}

std::vector<VarRef> CommutatorPolynomial::variables() const {
  std::set<VarRef> vs;
  for (const Product& p : products_) {
    for (const auto& f : p.factors) vs.insert(f.begin(), f.end());
  }
  return {vs.begin(), vs.end()};
}

bool CommutatorPolynomial::is_multilinear() const {
  const std::vector<VarRef> all = variables();
  for (const Product& p : products_) {
    std::vector<VarRef> used;
    for (const auto& f : p.factors) used.insert(used.end(), f.begin(), f.end());
    std::sort(used.begin(), used.end());
    if (used != all) return false;
  }
  return true;
}

bool collapse_check(const CommutatorPolynomial& f, VarRef var, const Scalar& c) {
  if (!f.is_multilinear()) throw PreconditionError("collapse_check needs a multilinear commutator polynomial");
  return substitute(f.expand(), {{var, NcPoly::constant(c)}}).is_zero();
}

// -------------------------------------------------------------- documents

GenerationCertificate certificate_from_json(const nlohmann::json& doc) {
  try {
    const Field field = Field::parse(doc.value("field", std::string("Q")));
    auto poly = [&](const nlohmann::json& j) { return parse_poly(j.get<std::string>(), field); };
    GenerationCertificate cert;
    cert.target = poly(doc.at("target"));
    for (const auto& s : doc.value("summands", nlohmann::json::array())) {
      NcPoly basis = poly(s.at("basis_element"));
      std::vector<VarRef> slots;
      if (s.contains("slots")) {
        for (const auto& v : s.at("slots")) slots.push_back(VarRef::parse(v.get<std::string>()));
      } else {
        slots = basis.variables();
      }
      Substitution sigma;
      const nlohmann::json subst = s.value("substitution", nlohmann::json::object());
      for (const auto& [k, v] : subst.items()) sigma[VarRef::parse(k)] = poly(v);
      cert.summands.push_back({s.contains("h") ? poly(s.at("h")) : NcPoly::constant(Scalar::one(field)),
                               SubstitutionInstance(std::move(basis), std::move(slots), std::move(sigma)),
                               s.contains("ell") ? poly(s.at("ell")) : NcPoly::constant(Scalar::one(field))});
    }
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("certificate document: ") + e.what());
  }
}

nlohmann::json certificate_to_json(const GenerationCertificate& cert) {
  nlohmann::json doc;
  doc["field"] = cert.target.field().name();
  doc["target"] = cert.target.str();
  doc["summands"] = nlohmann::json::array();
  for (const Summand& s : cert.summands) {
    nlohmann::json j;
    j["h"] = s.h.str();
    j["basis_element"] = s.instance.basis().str();
    j["slots"] = nlohmann::json::array();
    for (const VarRef& v : s.instance.slots()) j["slots"].push_back(v.str());
    j["substitution"] = nlohmann::json::object();
    for (const auto& [v, img] : s.instance.substitution()) j["substitution"][v.str()] = img.str();
    j["ell"] = s.ell.str();
    doc["summands"].push_back(std::move(j));
  }
  return doc;
}

}  // namespace matid
