#include "matid/spoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "matid/errors.hpp"

namespace matid {

// ------------------------------------------------------------------ tensors

Tensor::Tensor(Field field, std::size_t order, std::size_t side) : field_(field), order_(order), side_(side) {
  if (order < 2) throw PreconditionError("tensor order must be at least 2");
  if (side < 1) throw PreconditionError("tensor side must be positive");
  std::size_t total = 1;
  for (std::size_t i = 0; i < order; ++i) {
    if (total > (std::size_t{1} << 24) / side) throw CapExceeded("tensor has too many entries");
    total *= side;
  }
  values_.assign(total, Scalar::zero(field));
}

std::size_t Tensor::flat(const std::vector<std::size_t>& index) const {
  if (index.size() != order_) throw PreconditionError("tensor index has wrong length");
  std::size_t pos = 0;
  for (std::size_t i : index) {
    if (i < 1 || i > side_) throw PreconditionError("tensor index out of range");
    pos = pos * side_ + (i - 1);
  }
  return pos;
}

std::vector<std::size_t> Tensor::unflatten(std::size_t pos) const {
  std::vector<std::size_t> idx(order_);
  for (std::size_t k = order_; k-- > 0;) {
    idx[k] = pos % side_ + 1;
    pos /= side_;
  }
  return idx;
}

void Tensor::set(const std::vector<std::size_t>& index, const Scalar& v) {
  if (v.field() != field_) throw FieldMismatch("tensor entry over " + v.field().name());
  values_[flat(index)] = v;
}

bool Tensor::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](const Scalar& s) { return s.is_zero(); });
}

Tensor Tensor::operator+(const Tensor& o) const {
  if (o.order_ != order_ || o.side_ != side_) throw PreconditionError("tensor shapes differ");
  Tensor out = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] += o.values_[i];
  return out;
}

bool Tensor::operator==(const Tensor& o) const {
  return field_ == o.field_ && order_ == o.order_ && side_ == o.side_ && values_ == o.values_;
}

Tensor SimpleTensor::expand(Field field) const {
  if (vectors.size() < 2) throw PreconditionError("simple tensor needs at least two vectors");
  const std::size_t n = vectors[0].size();
  for (const auto& v : vectors) {
    if (v.size() != n) throw PreconditionError("simple tensor vectors differ in length");
  }
  Tensor t(field, vectors.size(), n);
  for (std::size_t pos = 0; pos < t.entries(); ++pos) {
    auto idx = t.unflatten(pos);
    Scalar v = Scalar::one(field);
    for (std::size_t k = 0; k < idx.size() && !v.is_zero(); ++k) v *= vectors[k][idx[k] - 1];
    t.set(idx, v);
  }
  return t;
}

Tensor RankDecomposition::sum() const {
  Tensor out(field, order, side);
  for (const SimpleTensor& s : terms) {
    if (s.vectors.size() != order) throw PreconditionError("simple tensor has the wrong order");
    for (const auto& v : s.vectors) {
      if (v.size() != side) throw PreconditionError("simple tensor vector has the wrong length");
    }
    out = out + s.expand(field);
  }
  return out;
}

// ------------------------------------------------------------ s-polynomials

namespace {

// S_2d(x_J) obtained by renaming x_1..x_2d in the cached S_2d(x_1..x_2d).
NcPoly standard_at(const NcPoly& base, const std::vector<std::uint32_t>& tuple) {
  Substitution s;
  for (std::size_t t = 0; t < tuple.size(); ++t) {
    s[VarRef::x(static_cast<std::uint32_t>(t + 1))] = NcPoly::variable(VarRef::x(tuple[t]), base.field());
  }
  return substitute(base, s);
}

NcPoly base_standard(std::uint32_t k, Field field) {
  auto v = x_vars(k);
  return standard_poly(v, kDefaultStandardCap, field);
}

std::vector<std::vector<std::uint32_t>> increasing_tuples(std::uint32_t n, std::uint32_t k) {
  std::vector<std::vector<std::uint32_t>> out;
  if (k > n) return out;
  std::vector<std::uint32_t> cur(k);
  for (std::uint32_t i = 0; i < k; ++i) cur[i] = i + 1;
  for (;;) {
    out.push_back(cur);
    std::int64_t i = static_cast<std::int64_t>(k) - 1;
    while (i >= 0 && cur[i] == n - k + static_cast<std::uint32_t>(i) + 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (std::uint32_t j = static_cast<std::uint32_t>(i) + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

Scalar determinant(std::vector<std::vector<Scalar>> m, Field field) {
  const std::size_t n = m.size();
  Scalar det = Scalar::one(field);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c].is_zero()) ++p;
    if (p == n) return Scalar::zero(field);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    const Scalar inv = m[c][c].inverse();
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c].is_zero()) continue;
      const Scalar f = m[r][c] * inv;
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

}  // namespace

NcPoly make_s_poly(const std::map<std::vector<std::uint32_t>, int>& coeffs, std::uint32_t n, std::uint32_t d, Field field) {
  if (d == 0 || 2 * d > n) throw PreconditionError("s-polynomial needs 1 <= 2d <= n");
  const NcPoly base = base_standard(2 * d, field);
  NcPoly out(field);
  for (const auto& [tuple, c] : coeffs) {
    if (tuple.size() != 2 * d) throw PreconditionError("index tuple must have length 2d");
    for (std::size_t t = 0; t < tuple.size(); ++t) {
      if (tuple[t] < 1 || tuple[t] > n) throw PreconditionError("index out of range");
      if (t > 0 && tuple[t] <= tuple[t - 1]) throw PreconditionError("index tuple must be increasing");
    }
    if (c != 0 && c != 1) throw PreconditionError("s-polynomial coefficients are 0 or 1");
    if (c == 1) out += standard_at(base, tuple);
  }
  return out;
}

std::vector<NcPoly> poly_from_tensor(const Tensor& a) {
  if (a.order() < 3 || a.order() % 2 == 0) throw PreconditionError("corresponding polynomials need order 2d+1");
  const std::size_t r = a.order() - 1;
  if (r > kDefaultStandardCap) throw CapExceeded("S_" + std::to_string(r) + " exceeds the standard-polynomial cap");
  const Field field = a.field();
  const auto n = static_cast<std::uint32_t>(a.side());

  // Collect sum_pi sgn(pi) A(j0, pi(J)) per increasing tuple J.
  std::vector<std::map<std::vector<std::uint32_t>, Scalar>> coeff(n);
  for (std::size_t pos = 0; pos < a.entries(); ++pos) {
    const Scalar& v = a.values()[pos];
    if (v.is_zero()) continue;
    auto idx = a.unflatten(pos);
    std::vector<std::uint32_t> rest(idx.begin() + 1, idx.end());
    bool odd = false;
    for (std::size_t i = 0; i < rest.size(); ++i)
      for (std::size_t j = i + 1; j < rest.size(); ++j) odd ^= rest[i] > rest[j];
    std::sort(rest.begin(), rest.end());
    if (std::adjacent_find(rest.begin(), rest.end()) != rest.end()) continue;
    auto [it, fresh] = coeff[idx[0] - 1].emplace(rest, Scalar::zero(field));
    it->second += odd ? -v : v;
  }

  const NcPoly base = base_standard(static_cast<std::uint32_t>(r), field);
  std::vector<NcPoly> out;
  for (std::uint32_t j0 = 0; j0 < n; ++j0) {
    PolyAccumulator acc(field);
    for (const auto& [tuple, c] : coeff[j0]) {
      if (!c.is_zero()) acc.add(standard_at(base, tuple), c);
    }
    out.push_back(acc.finish());
  }
  return out;
}

std::vector<GenerationCertificate> cert_from_decomposition(const RankDecomposition& d) {
  if (d.order < 3 || d.order % 2 == 0) throw PreconditionError("decomposition order must be 2d+1");
  const Field field = d.field;
  const std::vector<NcPoly> targets = poly_from_tensor(d.sum());
  const auto r = static_cast<std::uint32_t>(d.order - 1);
  const std::vector<VarRef> slots = x_vars(r);
  const NcPoly base = standard_poly(slots, kDefaultStandardCap, field);

  std::vector<SubstitutionInstance> instances;
  for (const SimpleTensor& s : d.terms) {
    Substitution sigma;
    for (std::uint32_t t = 1; t <= r; ++t) {
      std::vector<Term> lin;
      for (std::size_t j = 0; j < d.side; ++j) lin.push_back({Word{VarRef::x(static_cast<std::uint32_t>(j + 1))}, s.vectors[t][j]});
      sigma[slots[t - 1]] = NcPoly::from_terms(field, std::move(lin));
    }
    instances.emplace_back(base, slots, std::move(sigma));
  }

  std::vector<GenerationCertificate> out;
  for (std::size_t j0 = 0; j0 < d.side; ++j0) {
    GenerationCertificate cert;
    cert.target = targets[j0];
    for (std::size_t i = 0; i < d.terms.size(); ++i) {
      const Scalar& a0 = d.terms[i].vectors[0][j0];
      if (a0.is_zero()) continue;
      cert.summands.push_back({NcPoly::constant(a0), instances[i], NcPoly::constant(Scalar::one(field))});
    }
    if (!verify_certificate(cert).valid) throw Error("decomposition certificate does not verify");
    out.push_back(std::move(cert));
  }
  return out;
}

// --------------------------------------------------------------------- rank

RankSearch tensor_rank_bruteforce(const Tensor& a, Field field, std::size_t max_rank, std::size_t cap) {
  if (field.is_rational() || field.modulus() >= 256) throw PreconditionError("brute-force rank needs a prime field below 256");
  const std::uint64_t p = field.modulus();
  const std::size_t n = a.side(), order = a.order(), total = a.entries();

  auto key_of = [&](const Tensor& t) {
    std::string k(total, '\0');
    for (std::size_t i = 0; i < total; ++i) k[i] = static_cast<char>(t.values()[i].to_field(field).residue());
    return k;
  };
  const std::string target = key_of(a);

  RankSearch out;
  out.witness.field = field;
  out.witness.order = order;
  out.witness.side = n;
  if (std::all_of(target.begin(), target.end(), [](char c) { return c == 0; })) {
    out.found = true;
    return out;
  }

  // Nonzero vectors; the normalized ones have leading nonzero entry 1.
  std::vector<std::vector<std::uint8_t>> all_vecs, norm_vecs;
  {
    std::vector<std::uint8_t> v(n, 0);
    for (;;) {
      std::size_t i = 0;
      while (i < n && v[i] == p - 1) v[i++] = 0;
      if (i == n) break;
      ++v[i];
      all_vecs.push_back(v);
      auto lead = std::find_if(v.begin(), v.end(), [](std::uint8_t x) { return x != 0; });
      if (*lead == 1) norm_vecs.push_back(v);
    }
  }
  double simple_count = static_cast<double>(all_vecs.size());
  for (std::size_t k = 1; k < order; ++k) simple_count *= static_cast<double>(norm_vecs.size());
  if (simple_count > static_cast<double>(cap)) throw CapExceeded("too many simple tensors to enumerate");

  // Simple tensors as keys, deduplicated, with their factor vectors.
  std::vector<std::string> simples;
  std::vector<std::vector<const std::vector<std::uint8_t>*>> factors;
  {
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::size_t> choice(order, 0);
    for (;;) {
      std::string k(total, '\0');
      for (std::size_t pos = 0; pos < total; ++pos) {
        std::size_t rem = pos;
        std::uint64_t v = 1;
        for (std::size_t m = order; m-- > 0 && v;) {
          const auto& vec = m == 0 ? all_vecs[choice[0]] : norm_vecs[choice[m]];
          v = v * vec[rem % n] % p;
          rem /= n;
        }
        k[pos] = static_cast<char>(v);
      }
      if (seen.emplace(k, simples.size()).second) {
        simples.push_back(k);
        std::vector<const std::vector<std::uint8_t>*> f;
        for (std::size_t m = 0; m < order; ++m) f.push_back(m == 0 ? &all_vecs[choice[0]] : &norm_vecs[choice[m]]);
        factors.push_back(std::move(f));
      }
      std::size_t m = 0;
      while (m < order && ++choice[m] == (m == 0 ? all_vecs.size() : norm_vecs.size())) choice[m++] = 0;
      if (m == order) break;
    }
  }

  auto add = [&](const std::string& x, const std::string& y, bool subtract) {
    std::string z(total, '\0');
    for (std::size_t i = 0; i < total; ++i) {
      std::uint64_t a1 = static_cast<std::uint8_t>(x[i]), b1 = static_cast<std::uint8_t>(y[i]);
      z[i] = static_cast<char>(subtract ? (a1 + p - b1) % p : (a1 + b1) % p);
    }
    return z;
  };

  // Node 0 is the zero tensor; level_end[j] bounds the ids of rank <= j.
  std::vector<std::string> keys{std::string(total, '\0')};
  std::vector<std::size_t> parent{0}, via{0};
  std::unordered_map<std::string, std::size_t> index{{keys[0], 0}};
  std::vector<std::size_t> level_end{1};
  auto grow_to = [&](std::size_t j) {
    while (level_end.size() <= j) {
      const std::size_t from = level_end.size() >= 2 ? level_end[level_end.size() - 2] : 0;
      const std::size_t to = level_end.back();
      for (std::size_t id = from; id < to; ++id) {
        for (std::size_t s = 0; s < simples.size(); ++s) {
          std::string z = add(keys[id], simples[s], false);
          if (index.count(z)) continue;
          if (keys.size() >= cap) throw CapExceeded("rank search stored " + std::to_string(cap) + " tensors");
          index.emplace(z, keys.size());
          keys.push_back(std::move(z));
          parent.push_back(id);
          via.push_back(s);
        }
      }
      level_end.push_back(keys.size());
    }
  };
  auto path = [&](std::size_t id, RankDecomposition& d) {
    for (; id != 0; id = parent[id]) {
      SimpleTensor st;
      for (const auto* vec : factors[via[id]]) {
        std::vector<Scalar> v;
        for (std::uint8_t x : *vec) v.push_back(Scalar::from_residue(field, x));
        st.vectors.push_back(std::move(v));
      }
      d.terms.push_back(std::move(st));
    }
  };

  for (std::size_t k = 1; k <= max_rank; ++k) {
    const std::size_t hi = (k + 1) / 2, lo = k / 2;
    grow_to(hi);
    for (std::size_t id = 0; id < level_end[lo]; ++id) {
      auto it = index.find(add(target, keys[id], true));
      if (it == index.end() || it->second >= level_end[hi]) continue;
      out.found = true;
      out.rank = k;
      path(id, out.witness);
      path(it->second, out.witness);
      out.searched = keys.size();
      return out;
    }
  }
  out.searched = keys.size();
  return out;
}

// ---------------------------------------------------------------------- phi

PhiParams PhiParams::from_flat(Field field, std::uint32_t n, std::uint32_t d, std::uint32_t l,
                               const std::vector<Scalar>& values) {
  const std::size_t need = static_cast<std::size_t>(2 * d + 1) * n * l;
  if (values.size() != need) {
    throw PreconditionError("phi parameters: expected " + std::to_string(need) + " values, got " + std::to_string(values.size()));
  }
  PhiParams p;
  p.n = n;
  p.d = d;
  p.l = l;
  std::size_t at = 0;
  p.c.assign(n, std::vector<Scalar>(l, Scalar::zero(field)));
  for (auto& row : p.c)
    for (auto& x : row) x = values[at++];
  p.a.assign(l, std::vector<std::vector<Scalar>>(2 * d, std::vector<Scalar>(n, Scalar::zero(field))));
  for (auto& k : p.a)
    for (auto& t : k)
      for (auto& x : t) x = values[at++];
  return p;
}

PhiImage phi_map(const PhiParams& params, Field field) {
  const std::uint32_t n = params.n, r = 2 * params.d, l = params.l;
  if (params.d == 0) throw PreconditionError("phi_map needs d >= 1");
  if (params.c.size() != n || params.a.size() != l) throw PreconditionError("phi parameter shape mismatch");
  for (const auto& row : params.c) {
    if (row.size() != l) throw PreconditionError("phi parameter shape mismatch");
  }
  for (const auto& k : params.a) {
    if (k.size() != r) throw PreconditionError("phi parameter shape mismatch");
    for (const auto& t : k) {
      if (t.size() != n) throw PreconditionError("phi parameter shape mismatch");
    }
  }

  PhiImage out;
  out.tuples = increasing_tuples(n, r);
  // det(a_k restricted to the columns J), per k and J.
  std::vector<std::vector<Scalar>> minors(l);
  for (std::uint32_t k = 0; k < l; ++k) {
    for (const auto& tuple : out.tuples) {
      std::vector<std::vector<Scalar>> m(r, std::vector<Scalar>(r, Scalar::zero(field)));
      for (std::uint32_t t = 0; t < r; ++t)
        for (std::uint32_t s = 0; s < r; ++s) m[t][s] = params.a[k][t][tuple[s] - 1];
      minors[k].push_back(determinant(std::move(m), field));
    }
  }
  out.coeffs.assign(n, std::vector<Scalar>(out.tuples.size(), Scalar::zero(field)));
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < out.tuples.size(); ++t)
      for (std::uint32_t k = 0; k < l; ++k) out.coeffs[i][t] += params.c[i][k] * minors[k][t];
  return out;
}

// ----------------------------------------------------------- counting bound

CountingBound counting_bound(std::uint32_t n, std::uint32_t d) {
  if (d == 0) throw PreconditionError("counting_bound needs d >= 1");
  CountingBound out;
  out.n = n;
  out.d = d;
  if (n < 2 * d) {
    out.binomial = 0;
    out.decimal = "0";
    return out;
  }
  mpz_bin_uiui(out.binomial.get_mpz_t(), n, 2 * d);
  const long double b = std::stold(out.binomial.get_str());
  out.value = b * std::log(2.0L) / (static_cast<long double>(2 * d + 1) * std::log(static_cast<long double>(4 * d + 2)));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15Lg", out.value);
  out.decimal = buf;
  return out;
}

// ---------------------------------------------------------------- documents

namespace {

Scalar scalar_from_json(const nlohmann::json& j, Field field) {
  if (j.is_number_integer()) return Scalar(field, Rational(j.get<std::int64_t>()));
  return Scalar(field, Rational::parse(j.get<std::string>()));
}

nlohmann::json scalar_to_json(const Scalar& s) {
  if (s.value().is_small() && s.value().is_integer()) return s.value().small_numerator();
  return s.str();
}

}  // namespace

Tensor tensor_from_json(const nlohmann::json& doc) {
  try {
    const Field field = Field::parse(doc.value("field", std::string("Q")));
    Tensor t(field, doc.at("order").get<std::size_t>(), doc.at("side").get<std::size_t>());
    for (const auto& e : doc.value("entries", nlohmann::json::array())) {
      if (!e.is_array() || e.size() != t.order() + 1) throw ParseError("tensor entry must list order indices and a value");
      std::vector<std::size_t> idx;
      for (std::size_t k = 0; k < t.order(); ++k) idx.push_back(e[k].get<std::size_t>());
      t.set(idx, t.at(idx) + scalar_from_json(e[t.order()], field));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tensor document: ") + e.what());
  }
}

nlohmann::json tensor_to_json(const Tensor& t) {
  nlohmann::json doc;
  doc["field"] = t.field().name();
  doc["order"] = t.order();
  doc["side"] = t.side();
  doc["entries"] = nlohmann::json::array();
  for (std::size_t pos = 0; pos < t.entries(); ++pos) {
    if (t.values()[pos].is_zero()) continue;
    nlohmann::json e = t.unflatten(pos);
    e.push_back(scalar_to_json(t.values()[pos]));
    doc["entries"].push_back(std::move(e));
  }
  return doc;
}

RankDecomposition decomposition_from_json(const nlohmann::json& doc) {
  try {
    RankDecomposition d;
    d.field = Field::parse(doc.value("field", std::string("Q")));
    d.order = doc.at("order").get<std::size_t>();
    d.side = doc.at("side").get<std::size_t>();
    for (const auto& term : doc.value("terms", nlohmann::json::array())) {
      SimpleTensor s;
      for (const auto& vec : term) {
        std::vector<Scalar> v;
        for (const auto& x : vec) v.push_back(scalar_from_json(x, d.field));
        s.vectors.push_back(std::move(v));
      }
      d.terms.push_back(std::move(s));
    }
    d.sum();  // shape check
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("decomposition document: ") + e.what());
  }
}

nlohmann::json decomposition_to_json(const RankDecomposition& d) {
  nlohmann::json doc;
  doc["field"] = d.field.name();
  doc["order"] = d.order;
  doc["side"] = d.side;
  doc["terms"] = nlohmann::json::array();
  for (const SimpleTensor& s : d.terms) {
    nlohmann::json term = nlohmann::json::array();
    for (const auto& v : s.vectors) {
      nlohmann::json vec = nlohmann::json::array();
      for (const Scalar& x : v) vec.push_back(scalar_to_json(x));
      term.push_back(std::move(vec));
    }
    doc["terms"].push_back(std::move(term));
  }
  return doc;
}

}  // namespace matid
