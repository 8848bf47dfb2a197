#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "matid/ideals.hpp"
#include "matid/poly.hpp"

namespace matid {

/// Dense tensor [n]^order -> F. Indices are 1-based; the first index is the
/// most significant in the flat layout.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Field field, std::size_t order, std::size_t side);

  Field field() const { return field_; }
  std::size_t order() const { return order_; }
  std::size_t side() const { return side_; }
  std::size_t entries() const { return values_.size(); }

  const Scalar& at(const std::vector<std::size_t>& index) const { return values_[flat(index)]; }
  void set(const std::vector<std::size_t>& index, const Scalar& v);
  const std::vector<Scalar>& values() const { return values_; }
  /// 1-based multi-index of a flat position.
  std::vector<std::size_t> unflatten(std::size_t pos) const;
  bool is_zero() const;

  Tensor operator+(const Tensor& o) const;
  bool operator==(const Tensor& o) const;

 private:
  std::size_t flat(const std::vector<std::size_t>& index) const;

  Field field_;
  std::size_t order_ = 0;
  std::size_t side_ = 0;
  std::vector<Scalar> values_;
};

/// a_0 (x) a_1 (x) ... (x) a_{r}; all vectors of the same length.
struct SimpleTensor {
  std::vector<std::vector<Scalar>> vectors;
  Tensor expand(Field field) const;
};

struct RankDecomposition {
  Field field;
  std::size_t order = 0;
  std::size_t side = 0;
  std::vector<SimpleTensor> terms;

  /// Sum of the simple tensors; throws PreconditionError when a term has
  /// the wrong shape.
  Tensor sum() const;
};

/// sum over listed increasing 2d-tuples J of c_J * S_2d(x_J); every
/// coefficient must be 0 or 1.
NcPoly make_s_poly(const std::map<std::vector<std::uint32_t>, int>& coeffs, std::uint32_t n, std::uint32_t d,
                   Field field = Field::rationals());

/// f_j0 = sum A(j0, j1..j2d) S_2d(x_j1..x_j2d) for j0 = 1..n; the order must
/// be odd (2d + 1) and 2d at most the standard-polynomial cap.
std::vector<NcPoly> poly_from_tensor(const Tensor& a);

/// One certificate per j0 for the corresponding polynomials of sum(D), all
/// sharing the instances S_2d(sum_j a_1(j) x_j, ..., sum_j a_2d(j) x_j),
/// one per simple tensor. Each certificate is verified before returning.
std::vector<GenerationCertificate> cert_from_decomposition(const RankDecomposition& d);

struct RankSearch {
  bool found = false;
  std::size_t rank = 0;       // when found
  RankDecomposition witness;  // when found: rank simple tensors summing to A
  std::size_t searched = 0;   // tensors stored across the search levels
};

inline constexpr std::size_t kRankSearchCap = 20'000'000;

/// Minimal number of simple tensors summing to A over GF(p), p < 256, by
/// meet-in-the-middle over the sets of tensors of rank <= j. Simple tensors
/// are enumerated once up to rescaling. Throws CapExceeded past `cap`
/// stored tensors.
RankSearch tensor_rank_bruteforce(const Tensor& a, Field field, std::size_t max_rank,
                                  std::size_t cap = kRankSearchCap);

/// Parameters of the counting map: c[i][k] for i in [n], k in [l] and
/// a[k][t][m] for k in [l], t in [2d], m in [n].
struct PhiParams {
  std::uint32_t n = 0, d = 0, l = 0;
  std::vector<std::vector<Scalar>> c;
  std::vector<std::vector<std::vector<Scalar>>> a;

  /// (2d+1)*n*l values: all c (i-major), then all a (k, t, m order).
  static PhiParams from_flat(Field field, std::uint32_t n, std::uint32_t d, std::uint32_t l,
                             const std::vector<Scalar>& values);
};

struct PhiImage {
  /// Increasing 2d-tuples in lexicographic order.
  std::vector<std::vector<std::uint32_t>> tuples;
  /// coeffs[i][t]: coefficient of S_2d(x_{tuples[t]}) in the i-th combination.
  std::vector<std::vector<Scalar>> coeffs;
};

/// sum_k c[i][k] S_2d(sum_m a[k][1][m] x_m, ...) written in the basis
/// S_2d(x_J): the coefficient at J is sum_k c[i][k] det(a[k][.][J]).
PhiImage phi_map(const PhiParams& params, Field field = Field::rationals());

struct CountingBound {
  mpz_class binomial;        // C(n, 2d)
  std::uint32_t n = 0, d = 0;
  long double value = 0;
  std::string decimal;       // 15 significant digits
};

/// C(n,2d) ln 2 / ((2d+1) ln(4d+2)); zero for n < 2d.
CountingBound counting_bound(std::uint32_t n, std::uint32_t d);

// ------------------------------------------------------------- documents

/// {field?, order, side, entries: [[i0, ..., i_r, value], ...]} (sparse).
Tensor tensor_from_json(const nlohmann::json& doc);
nlohmann::json tensor_to_json(const Tensor& t);
/// {field?, order, side, terms: [[vec_0, ..., vec_r], ...]}.
RankDecomposition decomposition_from_json(const nlohmann::json& doc);
nlohmann::json decomposition_to_json(const RankDecomposition& d);

}  // namespace matid
