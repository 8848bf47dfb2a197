// Command-line front end. Every subcommand builds a JSON result and a short
// text rendering; --output picks one. Exit codes: 0 success, 1 a check or
// verification came out negative, 2 usage, parse or input errors.
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "matid/circuit.hpp"
#include "matid/errors.hpp"
#include "matid/ideals.hpp"
#include "matid/matcheck.hpp"
#include "matid/parse.hpp"
#include "matid/proofsys.hpp"
#include "matid/spoly.hpp"
#include "suite.hpp"

namespace {

using nlohmann::json;
using namespace matid;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Result {
  json doc;
  std::string text;
  int code = 0;
};

struct Globals {
  std::string output = "text";
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

// "-" reads stdin.
std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_input(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// A polynomial argument is literal text when --expr is set, else a file.
NcPoly read_poly(const std::string& arg, bool literal, Field field = Field::rationals()) {
  return parse_poly(literal ? arg : read_input(arg), field);
}

std::string matrix_text(const Matrix& m) {
  std::size_t hits = 0, row = 0, col = 0;
  for (std::size_t j = 0; j < m.dim(); ++j)
    for (std::size_t k = 0; k < m.dim(); ++k)
      if (!m.at(j, k).is_zero()) {
        ++hits;
        row = j, col = k;
      }
  if (hits == 1 && m.at(row, col).is_one()) return "E" + std::to_string(row + 1) + std::to_string(col + 1);
  return m.str();
}

std::string witness_text(const MatrixAssignment& w) {
  std::string out;
  for (const auto& [v, m] : w) out += (out.empty() ? "" : ", ") + v.str() + "=" + matrix_text(m);
  return out;
}

std::string verdict_text(const IdentityVerdict& v) {
  std::ostringstream out;
  const std::string mat = "Mat_" + std::to_string(v.dim) + "(" + v.field.name() + ")";
  switch (v.verdict) {
    case Verdict::Identity:
      out << "identity of " << mat;
      break;
    case Verdict::NotIdentity:
      out << "not an identity of " << mat;
      if (v.witness) out << "\nwitness: " << witness_text(*v.witness);
      if (v.witness_value) out << "\nvalue: " << v.witness_value->str();
      break;
    case Verdict::Probable:
      out << "probably an identity of " << mat;
      if (v.failure_bound) out << "\nfailure probability <= " << v.failure_bound->str();
      break;
  }
  out << " [" << method_name(v.method) << (v.heuristic ? ", heuristic" : "") << "]";
  if (!v.caveat.empty()) out << "\nnote: " << v.caveat;
  return out.str();
}

// ------------------------------------------------------------ commands

Result cmd_poly(const std::string& input, bool literal) {
  NcPoly f = read_poly(input, literal);
  json vars = json::array();
  for (const VarRef& v : f.variables()) vars.push_back(v.str());
  Result r;
  r.doc = {{"poly", f.str()}, {"terms", f.size()}, {"degree", f.degree()}, {"variables", vars}};
  r.text = f.str() + "\n" + std::to_string(f.size()) + " terms, degree " + std::to_string(f.degree());
  return r;
}

Result cmd_identity(const Globals& g, const std::string& input, bool literal, std::size_t d, const std::string& method,
                    std::uint64_t p, std::uint64_t trials) {
  NcPoly f = read_poly(input, literal);
  IdentityVerdict v;
  if (method == "symbolic") {
    v = symbolic_check(f, d);
  } else if (method == "units") {
    v = matrix_unit_check(f, d, g.threads);
  } else {
    v = random_check(f, d, RandomOptions{p, trials, g.seed, g.threads});
  }
  Result r{to_json(v), verdict_text(v), v.verdict == Verdict::NotIdentity ? 1 : 0};
  r.doc["poly"] = f.str();
  return r;
}

Result cmd_al(const Globals& g, std::size_t d) {
  AlReport rep = al_suite(d, g.seed, g.threads);
  std::ostringstream out;
  out << "S_" << 2 * d << " identity of Mat_" << d << ": "
      << (rep.upper.verdict == Verdict::Identity   ? "yes"
          : rep.upper.verdict == Verdict::Probable ? "probably"
                                                   : "no")
      << "; S_" << 2 * d - 1 << ": " << (rep.lower.verdict == Verdict::NotIdentity ? "no" : "yes");
  if (rep.lower.witness) out << " (witness " << witness_text(*rep.lower.witness) << ")";
  return {to_json(rep), out.str(), rep.consistent() ? 0 : 1};
}

Result cmd_lower(const std::string& input, bool literal, std::size_t d, bool formulas) {
  Circuit c = parse_circuit(literal ? input : read_input(input));
  LoweredFamily fam = matrix_expand(c, d);
  Result r;
  r.doc = {{"d", d},
           {"source_size", c.size()},
           {"size", fam.circuit.size()},
           {"bound", kLoweringSizeConstant * d * d * d * c.size()},
           {"circuit", circuit_to_json(fam.circuit)}};
  std::ostringstream out;
  out << "lowered to " << fam.circuit.size() << " gates from " << c.size() << " (bound "
      << kLoweringSizeConstant * d * d * d * c.size() << ")";
  if (formulas) {
    json entries = json::array();
    for (std::size_t o = 0; o < fam.entries.size(); ++o)
      for (std::size_t j = 1; j <= d; ++j)
        for (std::size_t k = 1; k <= d; ++k) {
          std::string f = formula_str(fam.circuit, fam.entry(j, k, o));
          entries.push_back({{"output", o}, {"row", j}, {"col", k}, {"formula", f}});
          out << "\n[" << o << "](" << j << "," << k << ") = " << f;
        }
    r.doc["entries"] = entries;
  }
  r.text = out.str();
  return r;
}

struct ProofArgs {
  std::string file, system, basis, field, certificate;
  std::size_t d = 0;
  std::size_t spotcheck = 0;
  std::uint64_t p = 10007;
};

std::optional<SystemSpec> system_override(const ProofArgs& a) {
  if (a.system.empty()) {
    if (!a.basis.empty() || a.d || !a.field.empty()) throw UsageError("--basis, --d and --field need --system");
    return std::nullopt;
  }
  Field field = a.field.empty() ? Field::rationals() : Field::parse(a.field);
  if (a.system == "pc") return SystemSpec::pc(field);
  if (a.system == "pcbool") return SystemSpec::pc_bool();
  if (a.system == "pmat2" && a.basis.empty()) return SystemSpec::pmat2(field);
  std::size_t d = a.system == "pmat2" ? 2 : a.d;
  if (d == 0) throw UsageError("--system pmatd needs --d");
  if (a.basis.empty()) {
    if (d != 2) throw UsageError("--system pmatd with d != 2 needs --basis");
    return SystemSpec::pmatd(2, drensky2_basis(), field);
  }
  return SystemSpec::pmatd(d, basis_from_json(read_json(a.basis)), field);
}

Result cmd_proof(const Globals& g, const ProofArgs& a) {
  ProofScript s = proof_from_json(read_json(a.file), system_override(a));
  ProofCheck check = check_proof(s);
  Result r{to_json(check), {}, check.accepted ? 0 : 1};
  r.doc["system"] = s.system.name();
  std::ostringstream out;
  if (check.accepted) {
    out << "accepted in " << s.system.name() << " (" << check.line_count
        << (check.line_count == 1 ? " line)" : " lines)");
  } else {
    const Rejection& rej = *check.rejection;
    out << "rejected in " << s.system.name() << " at line " << rej.line + 1 << " (" << reason_name(rej.reason)
        << "): " << rej.detail;
  }
  if (a.spotcheck > 0) {
    std::size_t d = s.system.variant == SystemVariant::PMatd ? s.system.d : 1;
    SpotcheckReport rep = soundness_spotcheck(s, d, a.p, a.spotcheck, g.seed, g.threads);
    r.doc["spotcheck"] = to_json(rep);
    out << "\nspotcheck: " << rep.trials << " trials, d=" << rep.d << ", p=" << rep.p << ", "
        << rep.discrepancies.size() << " discrepancies";
    for (const auto& [line, trial] : rep.discrepancies) out << "\n  line " << line + 1 << " trial " << trial;
    if (!rep.discrepancies.empty()) r.code = 1;
  }
  if (!a.certificate.empty()) {
    LineBound b = lines_against_certificate(s, certificate_from_json(read_json(a.certificate)));
    r.doc["certificate_instances"] = *b.certificate_instances;
    out << "\nlines " << b.lines << " vs certificate instances " << *b.certificate_instances;
  }
  r.text = out.str();
  return r;
}

Result cmd_cert_verify(const std::string& file) {
  GenerationCertificate c = certificate_from_json(read_json(file));
  CertificateCheck ck = verify_certificate(c);
  Result r{{{"valid", ck.valid}, {"instances", ck.instance_count}, {"residual", ck.residual.str()}}, {}, ck.valid ? 0 : 1};
  r.text = ck.valid ? "valid, " + std::to_string(ck.instance_count) + " instances"
                    : "invalid; residual " + ck.residual.str();
  return r;
}

Result cmd_cert_compose(const std::string& outer_file, const std::vector<std::string>& inner_files) {
  GenerationCertificate outer = certificate_from_json(read_json(outer_file));
  InnerCertificates inner;
  for (const std::string& f : inner_files) {
    json doc = read_json(f);
    for (const json& j : doc.is_array() ? doc : json::array({doc})) {
      GenerationCertificate c = certificate_from_json(j);
      inner[c.target.str()] = c;
    }
  }
  GenerationCertificate composed = compose_certificates(outer, inner);
  std::size_t n = instance_count(composed);
  Result r{{{"instances", n}, {"certificate", certificate_to_json(composed)}}, {}, 0};
  r.text = "composed certificate for " + composed.target.str() + ": " + std::to_string(n) + " instances, " +
           std::to_string(composed.summands.size()) + " summands";
  return r;
}

Result cmd_q(const std::string& input, bool literal) {
  NcPoly f = read_poly(input, literal);
  CommutatorQ q = q_commutator_exact(f);
  Result r{{{"poly", f.str()}, {"q", q.q}, {"certificate", certificate_to_json(q.certificate)}}, {}, 0};
  std::ostringstream out;
  out << "Q = " << q.q;
  for (const Summand& s : q.certificate.summands) {
    out << "\n  " << s.h.str() << " * [" << s.instance.image(0).str() << ", " << s.instance.image(1).str() << "]";
  }
  r.text = out.str();
  return r;
}

Result cmd_membership(const std::string& input, bool literal, const std::vector<std::string>& gens_text,
                      const std::string& gens_file, std::uint32_t nvars) {
  NcPoly f = read_poly(input, literal);
  std::vector<NcPoly> gens;
  for (const std::string& t : gens_text) gens.push_back(parse_poly(t));
  if (!gens_file.empty()) {
    json doc = read_json(gens_file);
    if (!doc.is_array()) throw UsageError(gens_file + ": expected an array of polynomials");
    for (const json& j : doc) gens.push_back(parse_poly(j.get<std::string>()));
  }
  if (gens.empty()) throw UsageError("no generators given");
  MembershipResult m = multilinear_membership(f, gens, x_vars(nvars));
  Result r{{{"member", m.member},
            {"dimension", m.dimension},
            {"spanning_vectors", m.spanning_vectors},
            {"span_rank", m.span_rank},
            {"rank_with_target", m.rank_with_target}},
           {},
           m.member ? 0 : 1};
  if (m.member) {
    r.doc["combination"] = certificate_to_json(m.combination);
  } else {
    r.doc["dual_witness"] = m.dual_witness.str();
  }
  r.text = std::string(m.member ? "member" : "not a member") + " (dimension " + std::to_string(m.dimension) +
           ", span rank " + std::to_string(m.span_rank) + ")";
  return r;
}

Result cmd_tensor(const std::string& action, const std::string& file, const std::string& field_text,
                  std::size_t max_rank) {
  json doc = read_json(file);
  Result r;
  if (action == "to-poly") {
    std::vector<NcPoly> polys = poly_from_tensor(tensor_from_json(doc.contains("tensor") ? doc["tensor"] : doc));
    json arr = json::array();
    for (const NcPoly& f : polys) {
      arr.push_back(f.str());
      r.text += (r.text.empty() ? "" : "\n") + f.str();
    }
    r.doc = {{"polys", arr}};
  } else if (action == "to-cert") {
    RankDecomposition d = decomposition_from_json(doc.contains("decomposition") ? doc["decomposition"] : doc);
    json arr = json::array();
    std::size_t worst = 0;
    for (const GenerationCertificate& c : cert_from_decomposition(d)) {
      arr.push_back(certificate_to_json(c));
      worst = std::max(worst, instance_count(c));
    }
    r.doc = {{"certificates", arr}, {"max_instances", worst}};
    r.text = std::to_string(arr.size()) + " certificates, at most " + std::to_string(worst) + " instances each";
  } else {
    Tensor t = tensor_from_json(doc.contains("tensor") ? doc["tensor"] : doc);
    Field field = field_text.empty() ? t.field() : Field::parse(field_text);
    RankSearch s = tensor_rank_bruteforce(t, field, max_rank);
    r.doc = {{"found", s.found}, {"searched", s.searched}, {"max_rank", max_rank}};
    if (s.found) {
      r.doc["rank"] = s.rank;
      r.doc["decomposition"] = decomposition_to_json(s.witness);
      r.text = "rank " + std::to_string(s.rank) + " over " + field.name();
    } else {
      r.text = "rank exceeds " + std::to_string(max_rank) + " over " + field.name();
      r.code = 1;
    }
  }
  return r;
}

Result cmd_bound(std::uint32_t n, std::uint32_t d) {
  CountingBound b = counting_bound(n, d);
  return {{{"n", n}, {"d", d}, {"binomial", b.binomial.get_str()}, {"value", b.decimal}},
          "C(" + std::to_string(n) + "," + std::to_string(2 * d) + ") = " + b.binomial.get_str() + "; bound " +
              b.decimal,
          0};
}

Result cmd_corpus(const Globals& g, const std::string& dir) {
  suite::Options o{dir.empty() ? suite::default_corpus_dir() : dir, g.seed, g.threads};
  Result r;
  r.doc = json::array();
  auto all = suite::fixtures(o);
  for (auto& c : suite::acceptance(o)) all.push_back(std::move(c));
  for (const auto& c : all) {
    r.doc.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"detail", c.detail}, {"seconds", c.seconds}});
    r.text += (r.text.empty() ? "" : "\n") + std::string(c.pass ? "PASS " : "FAIL ") + c.id + " " + c.title + ": " +
              c.detail;
    if (!c.pass) r.code = 1;
  }
  r.doc = {{"checks", r.doc}};
  return r;
}

void emit(const Globals& g, Result r) {
  if (g.output == "json") {
    json out = {{"seed", g.seed}, {"result", std::move(r.doc)}, {"exit", r.code}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << r.text << "\nseed " << g.seed << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  CLI::App app("matid: polynomial identities of matrix algebras");
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.add_option("--output", g.output, "json or text")->envname("MATID_OUTPUT")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", g.seed, "seed for randomized steps")->envname("MATID_SEED");
  app.add_option("--threads", g.threads, "worker threads")->envname("MATID_THREADS")->check(CLI::PositiveNumber);

  std::function<Result()> run;
  std::string input;
  bool literal = false;
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("input", input, "file ('-' for stdin), or text with --expr")->required();
    sub->add_flag("-e,--expr", literal, "treat the input as literal text");
  };

  CLI::App* poly = app.add_subcommand("poly", "normalize a polynomial");
  add_input(poly);
  poly->callback([&] { run = [&] { return cmd_poly(input, literal); }; });

  CLI::App* identity = app.add_subcommand("identity", "identity checks on Mat_d");
  identity->require_subcommand(1);
  CLI::App* icheck = identity->add_subcommand("check", "decide whether f vanishes on Mat_d");
  std::size_t d = 0;
  std::string method = "symbolic";
  std::uint64_t p = 1'000'003, trials = 20;
  add_input(icheck);
  icheck->add_option("--d", d, "matrix size")->required()->check(CLI::PositiveNumber);
  icheck->add_option("--method", method, "symbolic, units or random")
      ->check(CLI::IsMember({"symbolic", "units", "random"}));
  icheck->add_option("--p", p, "prime for random evaluation");
  icheck->add_option("--trials", trials, "random trials");
  icheck->callback([&] { run = [&] { return cmd_identity(g, input, literal, d, method, p, trials); }; });

  CLI::App* al = app.add_subcommand("al", "S_2d and S_2d-1 on Mat_d");
  al->add_option("--d", d, "matrix size (1..4)")->required()->check(CLI::Range(1, 4));
  al->callback([&] { run = [&] { return cmd_al(g, d); }; });

  CLI::App* lower = app.add_subcommand("lower", "entry-wise lowering of a circuit");
  bool formulas = false;
  add_input(lower);
  lower->add_option("--d", d, "matrix size")->required()->check(CLI::PositiveNumber);
  lower->add_flag("--formulas", formulas, "print the formula of every entry");
  lower->callback([&] { run = [&] { return cmd_lower(input, literal, d, formulas); }; });

  CLI::App* proof = app.add_subcommand("proof", "proof scripts");
  proof->require_subcommand(1);
  CLI::App* pcheck = proof->add_subcommand("check", "check a proof script");
  ProofArgs pa;
  pcheck->add_option("proof", pa.file, "proof document")->required();
  pcheck->add_option("--system", pa.system, "override the document's system")
      ->check(CLI::IsMember({"pc", "pmat2", "pmatd", "pcbool"}));
  pcheck->add_option("--d", pa.d, "matrix size for pmatd");
  pcheck->add_option("--basis", pa.basis, "basis document for pmatd");
  pcheck->add_option("--field", pa.field, "Q or GF(p)");
  pcheck->add_option("--spotcheck", pa.spotcheck, "random evaluation trials per line");
  pcheck->add_option("--p", pa.p, "prime for the spot check");
  pcheck->add_option("--certificate", pa.certificate, "certificate for the first goal");
  pcheck->callback([&] { run = [&] { return cmd_proof(g, pa); }; });

  CLI::App* cert = app.add_subcommand("cert", "generation certificates");
  cert->require_subcommand(1);
  std::string cert_file;
  std::vector<std::string> inner_files;
  CLI::App* cverify = cert->add_subcommand("verify", "verify a certificate");
  cverify->add_option("certificate", cert_file)->required();
  cverify->callback([&] { run = [&] { return cmd_cert_verify(cert_file); }; });
  CLI::App* ccompose = cert->add_subcommand("compose", "compose an outer certificate with inner ones");
  ccompose->add_option("outer", cert_file)->required();
  ccompose->add_option("--inner", inner_files, "inner certificate documents")->required();
  ccompose->callback([&] { run = [&] { return cmd_cert_compose(cert_file, inner_files); }; });

  CLI::App* q = app.add_subcommand("q", "instance counts");
  q->require_subcommand(1);
  CLI::App* qcomm = q->add_subcommand("exact-commutator", "exact count over the commutator basis");
  add_input(qcomm);
  qcomm->callback([&] { run = [&] { return cmd_q(input, literal); }; });

  CLI::App* member = app.add_subcommand("membership", "multilinear T-ideal membership");
  std::vector<std::string> gens;
  std::string gens_file;
  std::uint32_t nvars = 0;
  add_input(member);
  member->add_option("-g,--generator", gens, "generator as text");
  member->add_option("--generators", gens_file, "JSON array of generators");
  member->add_option("--vars", nvars, "multilinear in x1..xn")->required()->check(CLI::Range(1, 6));
  member->callback([&] { run = [&] { return cmd_membership(input, literal, gens, gens_file, nvars); }; });

  CLI::App* tensor = app.add_subcommand("tensor", "tensors and S-polynomials");
  std::string action, tfield;
  std::size_t max_rank = 4;
  tensor->add_option("action", action)->required()->check(CLI::IsMember({"to-poly", "to-cert", "rank"}));
  tensor->add_option("file", cert_file)->required();
  tensor->add_option("--field", tfield, "field for rank search");
  tensor->add_option("--max-rank", max_rank, "search limit");
  tensor->callback([&] { run = [&] { return cmd_tensor(action, cert_file, tfield, max_rank); }; });

  CLI::App* bound = app.add_subcommand("bound", "counting lower bound");
  std::uint32_t bn = 0, bd = 0;
  bound->add_option("--n", bn)->required();
  bound->add_option("--d", bd)->required()->check(CLI::PositiveNumber);
  bound->callback([&] { run = [&] { return cmd_bound(bn, bd); }; });

  CLI::App* corpus = app.add_subcommand("corpus", "run corpus fixtures and acceptance criteria");
  std::string dir;
  corpus->add_option("--dir", dir, "corpus directory");
  corpus->callback([&] { run = [&] { return cmd_corpus(g, dir); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    Result r = run();
    int code = r.code;
    emit(g, std::move(r));
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
