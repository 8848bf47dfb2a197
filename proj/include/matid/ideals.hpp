#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "matid/poly.hpp"

namespace matid {

/// basis(slots <- substitution), with the expansion cached at construction.
/// Slots missing from the substitution map to themselves.
class SubstitutionInstance {
 public:
  SubstitutionInstance() = default;
  SubstitutionInstance(NcPoly basis, std::vector<VarRef> slots, Substitution substitution);
  /// Slots default to the variables of `basis` in sorted order.
  static SubstitutionInstance of(NcPoly basis, Substitution substitution);

  const NcPoly& basis() const { return basis_; }
  const std::vector<VarRef>& slots() const { return slots_; }
  const Substitution& substitution() const { return substitution_; }
  const NcPoly& expansion() const { return expansion_; }
  /// Image of slot `i` (0-based) under the substitution.
  NcPoly image(std::size_t i) const;

 private:
  NcPoly basis_;
  std::vector<VarRef> slots_;
  Substitution substitution_;
  NcPoly expansion_;
};

struct Summand {
  NcPoly h;
  SubstitutionInstance instance;
  NcPoly ell;
};

/// Claims target = sum h_i * instance_i * ell_i.
struct GenerationCertificate {
  NcPoly target;
  std::vector<Summand> summands;
};

/// Number of distinct nonzero instance expansions (scalar multiples count
/// apart; an instance expanding to zero contributes nothing).
std::size_t instance_count(const GenerationCertificate& cert);

struct CertificateCheck {
  bool valid = false;
  std::size_t instance_count = 0;
  /// target - sum; zero exactly when valid.
  NcPoly residual;
};

CertificateCheck verify_certificate(const GenerationCertificate& cert);

/// Inner certificates are keyed by the canonical text of the basis element
/// they generate (NcPoly::str()); their target must be that element.
using InnerCertificates = std::map<std::string, GenerationCertificate>;

/// Rewrites every outer instance B1(sigma) through the inner certificate
/// B1 = sum h' B0(tau) l' as sum sigma(h') B0(sigma o tau) sigma(l'). The
/// result is re-verified and its count checked against
/// max(inner counts) * count(outer); PreconditionError on a missing or
/// invalid inner certificate.
GenerationCertificate compose_certificates(const GenerationCertificate& outer, const InnerCertificates& inner);

// ---------------------------------------------------------------- membership

struct MembershipResult {
  bool member = false;
  /// Set when member: a combination of instances reproducing f.
  GenerationCertificate combination;
  std::size_t dimension = 0;        // |vars|!, the multilinear word space
  std::size_t spanning_vectors = 0;
  std::size_t span_rank = 0;        // rank of the spanning set
  std::size_t rank_with_target = 0; // rank after adjoining f
  /// Set when not a member: coefficients of a linear functional on words
  /// that vanishes on every spanning vector but not on f.
  NcPoly dual_witness;
};

inline constexpr std::size_t kMaxMembershipVars = 6;

/// Decides whether f lies in the multilinear component, over `vars`, of the
/// T-ideal generated by `generators`. The spanning set is every u*g(w)*v
/// that is multilinear over `vars`, for u, v words and w a substitution of
/// words into the slots of a linearized generator; the system is solved
/// exactly over the rationals. Generators that are not multilinear are
/// split into multi-homogeneous parts and fully linearized first, which is
/// complete in characteristic zero (PreconditionError over GF(p)).
MembershipResult multilinear_membership(const NcPoly& f, const std::vector<NcPoly>& generators,
                                        const std::vector<VarRef>& vars);

/// Multi-homogeneous components of g, each replaced by its full
/// linearization (a variable of degree k becomes k fresh variables).
std::vector<NcPoly> linearize(const NcPoly& g);

// ---------------------------------------------------------- commutator case

struct CommutatorQ {
  std::size_t q = 0;
  /// Exactly q instances of [x1,x2] at linear forms; verifies.
  GenerationCertificate certificate;
};

/// Q over the basis {[x1,x2]} for a degree-2 antisymmetric f: half the rank
/// of the coefficient matrix A[i][j] = coeff(v_i v_j).
CommutatorQ q_commutator_exact(const NcPoly& f);

// ------------------------------------------------------------ lemma tools

/// Replaces each image by its degree-1 part; instances with a zero linear
/// part are dropped. Basis elements must be standard polynomials.
std::vector<SubstitutionInstance> linear_reduce(const std::vector<SubstitutionInstance>& instances);

/// Certificate that bracket_map(sum F_i S_n(P | slot j <- Z-degree-1 part of
/// P_j) G_i) lies in the ideal of S_n(P | slot j <- sum G_i F_i), where F, G
/// and the other slots are read at Z-degree 0. One instance; summands
/// -c*z*V . S_n(...) . U for each term c*U z V of the Z-degree-1 part.
/// `j` is 0-based; n = |Ps| must be even.
GenerationCertificate transfer_witness(const std::vector<NcPoly>& Fs, const std::vector<NcPoly>& Gs,
                                       const std::vector<NcPoly>& Ps, std::size_t j);

/// Linear combination of products of generalized commutators of variables.
class CommutatorPolynomial {
 public:
  struct Product {
    Scalar coeff;
    /// Each factor is [v1, v2, ..., vk] with k >= 2, left-nested.
    std::vector<std::vector<VarRef>> factors;
  };

  explicit CommutatorPolynomial(Field field = Field::rationals()) : field_(field) {}
  CommutatorPolynomial& add(const Scalar& coeff, std::vector<std::vector<VarRef>> factors);

  Field field() const { return field_; }
  const std::vector<Product>& products() const { return products_; }
  NcPoly expand() const;
  /// Every product uses each of `variables()` exactly once.
  bool is_multilinear() const;
  std::vector<VarRef> variables() const;

 private:
  Field field_;
  std::vector<Product> products_;
};

/// True iff f(var <- c) is the zero polynomial. f must be multilinear.
bool collapse_check(const CommutatorPolynomial& f, VarRef var, const Scalar& c);

// ------------------------------------------------------------- documents

/// {field, target, summands: [{h, basis_element, slots?, substitution: {slot: poly}, ell}]},
/// polynomials in the text grammar.
GenerationCertificate certificate_from_json(const nlohmann::json& doc);
nlohmann::json certificate_to_json(const GenerationCertificate& cert);

}  // namespace matid
