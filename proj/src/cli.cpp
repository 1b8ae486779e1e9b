#include "sclforge/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sclforge/diagram.hpp"
#include "sclforge/rc.hpp"
#include "sclforge/scl.hpp"

namespace sclforge::cli {

namespace {

/// Input problems that map to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

std::string slurp(const std::string& path, Io& io) {
  std::stringstream buf;
  if (path == "-") {
    buf << io.in.rdbuf();
    return buf.str();
  }
  std::ifstream f(path);
  if (!f) throw InputError("cannot open '" + path + "'");
  buf << f.rdbuf();
  return buf.str();
}

/// Writes to `path`, or to stdout for "" and "-".
void emit(const std::string& path, const std::string& text, Io& io) {
  if (path.empty() || path == "-") {
    io.out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

template <class F>
auto with_file(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Presentation load_presentation(const std::string& path, Io& io) {
  const std::string text = slurp(path, io);
  return with_file(path, [&] { return parse_presentation(text); });
}

void log_header(Io& io, const std::optional<BigInt>& l_override) {
  io.err << "sclforge " << SCLFORGE_VERSION << " (l_override: " << (l_override ? l_override->get_str() : "none")
         << ")\n";
}

std::optional<BigInt> override_of(const Presentation& pres) {
  if (const FamilyInfo* fam = pres.family()) return fam->l_override;
  return std::nullopt;
}

std::vector<BigInt> parse_list(const std::string& text, const std::string& what) {
  std::vector<BigInt> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_bigint(item));
    } catch (const std::invalid_argument&) {
      throw InputError(what + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw InputError(what + " is empty");
  return out;
}

Rational rational_arg(const std::string& text, const std::string& what) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw InputError(what + ": '" + text + "' is not a rational");
  }
}

std::optional<BigInt> override_arg(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto v = parse_list(text, "--l-override");
  if (v.size() != 1 || v[0] < 1) throw InputError("--l-override must be one positive integer");
  return v[0];
}

Presentation family_from_lists(const std::string& m, const std::string& n, std::uint64_t k,
                               const std::optional<BigInt>& l_override, std::optional<Rational> limit) {
  auto ms = parse_list(m, "--m"), ns = parse_list(n, "--n");
  if (ms.size() != ns.size()) throw InputError("--m and --n have different lengths");
  if (ms.size() < k) throw InputError("--k exceeds the list length");
  Presentation pres = family_presentation(SeqPair::from_lists(ms, ns, std::move(limit)), l_override);
  pres.family()->seq.prefix(k);  // validate the pairs up front
  return pres;
}

ValidatedDiagram load_diagram(const std::string& path, const Presentation& pres, Io& io, bool quiet = false) {
  const std::string text = slurp(path, io);
  SurfaceDiagram diag = with_file(path, [&] { return parse_diagram(text, pres.alphabet()); });
  ValidationResult res = validate(diag, pres);
  if (!quiet)
    for (const auto& n : res.notes) io.err << "note: " << n.message << "\n";
  if (!res.ok()) {
    std::string msg = path + ": invalid diagram";
    for (const auto& e : res.errors) msg += "\n  " + e.kind + ": " + e.message;
    throw DiagramError(msg);
  }
  return std::move(*res.diagram);
}

std::string pair_row(std::uint64_t i, const BigInt& m, const BigInt& n) {
  const Rational v = make_rational(m, n);
  return std::to_string(i) + "\t" + m.get_str() + "\t" + n.get_str() + "\t" + to_decimal(v) + "\t" + to_string(v) + "\n";
}

std::string opt_str(const std::optional<Rational>& v) { return v ? to_string(*v) : "-"; }
std::string opt_str(const std::optional<BigInt>& v) { return v ? v->get_str() : "-"; }

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Io io{in, out, err};
  CLI::App app{"Small-cancellation presentations, van Kampen diagrams and scl certificates", "sclforge"};
  app.set_version_flag("--version", SCLFORGE_VERSION);
  app.require_subcommand(1);
  int code = 0;

  // gen
  struct {
    std::string m, n, l_override, output;
    std::uint64_t k = 0;
  } gen;
  auto* gen_cmd = app.add_subcommand("gen", "Emit a family presentation file");
  gen_cmd->add_option("--m", gen.m, "comma-separated m_i")->required();
  gen_cmd->add_option("--n", gen.n, "comma-separated n_i")->required();
  gen_cmd->add_option("--k", gen.k, "prefix length")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--l-override", gen.l_override, "replace l (testing only)");
  gen_cmd->add_option("-o,--output", gen.output, "output path (default stdout)");
  gen_cmd->callback([&] {
    auto lo = override_arg(gen.l_override);
    log_header(io, lo);
    Presentation pres = family_from_lists(gen.m, gen.n, gen.k, lo, std::nullopt);
    emit(gen.output, print_presentation(pres, gen.k), io);
  });

  // check-c16
  struct {
    std::string pres, lambda = "1/6";
    std::uint64_t k = 0;
  } c16;
  auto* c16_cmd = app.add_subcommand("check-c16", "Check C'(lambda) on a relator prefix");
  c16_cmd->add_option("pres", c16.pres, "presentation file")->required();
  c16_cmd->add_option("--k", c16.k, "prefix length (default: from the file)");
  c16_cmd->add_option("--lambda", c16.lambda, "lambda (default 1/6)");
  c16_cmd->callback([&] {
    Presentation pres = load_presentation(c16.pres, io);
    log_header(io, override_of(pres));
    std::uint64_t k = c16.k;
    if (k == 0) {
      if (auto hint = pres.prefix_hint()) k = *hint;
      else throw InputError("--k is required for this presentation");
    }
    PiecesReport rep = check_c_prime(pres, k, rational_arg(c16.lambda, "--lambda"));
    out << "i\tj\tkind\tpiece\tratio\n";
    for (const auto& e : rep.entries)
      out << e.i << '\t' << e.j << '\t' << to_string(e.kind) << '\t' << e.piece.get_str() << '\t' << to_string(e.ratio)
          << '\n';
    out << "C'(" << to_string(rep.lambda) << ") " << (rep.pass ? "pass" : "FAIL")
        << ", worst piece ratio " << to_string(rep.worst_ratio) << "\n";
    code = rep.pass ? 0 : 1;
  });

  // rc
  struct {
    std::string set = "evens";
    std::uint64_t k = 20;
  } rc;
  auto* rc_cmd = app.add_subcommand("rc", "Right-computable approximation streams (TSV)");
  rc_cmd->require_subcommand(1);
  auto add_rc = [&](const std::string& name, const std::string& help) {
    auto* c = rc_cmd->add_subcommand(name, help);
    c->add_option("--set", rc.set, "empty|all|evens|odds|squares|primes");
    c->add_option("--k", rc.k, "number of terms")->check(CLI::PositiveNumber);
    return c;
  };
  auto rc_set = [&]() {
    try {
      return builtin_set(rc.set);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  };
  add_rc("specker", "Partial sums of the Specker series")->callback([&] {
    log_header(io, std::nullopt);
    auto A = rc_set();
    for (std::uint64_t i = 1; i <= rc.k; ++i) {
      Rational v = specker_partial(A, i);
      out << pair_row(i, v.get_num(), v.get_den());
    }
    if (auto lim = builtin_specker_limit(rc.set)) err << "limit " << to_string(*lim) << "\n";
  });
  add_rc("cut", "Upper cut enumeration of the Specker number")->callback([&] {
    log_header(io, std::nullopt);
    CutEnumerator cut = specker_cut(rc_set(), builtin_specker_limit(rc.set));
    for (std::uint64_t i = 1; i <= rc.k; ++i) {
      Rational v = cut.produce(i);
      out << pair_row(i, v.get_num(), v.get_den());
    }
  });
  add_rc("monotone", "Monotone pair stream from the upper cut")->callback([&] {
    log_header(io, std::nullopt);
    MonotonePrefix p = cut_to_monotone(specker_cut(rc_set(), builtin_specker_limit(rc.set)), rc.k);
    for (std::size_t i = 0; i < p.pairs.size(); ++i) out << pair_row(i + 1, p.pairs[i].m, p.pairs[i].n);
    if (p.nonpositive) {
      err << "error: the cut reached a value <= 0\n";
      code = 1;
    }
  });

  // diagram
  struct {
    std::string file, pres;
  } dg;
  auto* dg_cmd = app.add_subcommand("diagram", "Analyse a van Kampen diagram");
  dg_cmd->require_subcommand(1);
  auto add_dg = [&](const std::string& name, const std::string& help) {
    auto* c = dg_cmd->add_subcommand(name, help);
    c->add_option("file", dg.file, "diagram file")->required();
    c->add_option("--pres", dg.pres, "presentation file")->required();
    return c;
  };
  add_dg("verify", "Validate and check Gauss-Bonnet")->callback([&] {
    Presentation pres = load_presentation(dg.pres, io);
    log_header(io, override_of(pres));
    const std::string text = slurp(dg.file, io);
    SurfaceDiagram diag = with_file(dg.file, [&] { return parse_diagram(text, pres.alphabet()); });
    ValidationResult res = validate(diag, pres);
    for (const auto& n : res.notes) err << "note: " << n.message << "\n";
    if (!res.ok()) {
      out << "invalid\n";
      for (const auto& e : res.errors) out << e.kind << "\t" << e.message << "\n";
      code = 1;
      return;
    }
    GaussBonnet gb = gauss_bonnet_check(*res.diagram);
    out << "valid, χ=" << gb.chi << ", Σκ=" << to_string(gb.total_kappa) << "\n";
    code = gb.equal ? 0 : 1;
  });
  add_dg("chi", "Euler characteristic per component")->callback([&] {
    Presentation pres = load_presentation(dg.pres, io);
    log_header(io, override_of(pres));
    ValidatedDiagram vd = load_diagram(dg.file, pres, io);
    out << "component\tV\tE\tF\tboundary_cycles\tchi\n";
    const auto& comps = vd.components();
    for (std::size_t c = 0; c < comps.size(); ++c)
      out << c << '\t' << comps[c].vertices << '\t' << comps[c].edges << '\t' << comps[c].faces << '\t'
          << comps[c].boundary_cycles << '\t' << comps[c].chi() << '\n';
    out << "chi\t" << euler_characteristic(vd) << "\nchi_minus\t" << chi_minus(vd) << "\n";
  });
  add_dg("curvature", "Curvature, beta and mu per disk")->callback([&] {
    Presentation pres = load_presentation(dg.pres, io);
    log_header(io, override_of(pres));
    ValidatedDiagram vd = load_diagram(dg.file, pres, io);
    CurvatureReport rep = curvature_report(vd);
    out << "disk\tsign\trelator\tkappa\tbeta\tmu\tn\tm\tbranch_bound\n";
    for (const auto& d : rep.disks)
      out << d.disk << '\t' << (d.sign > 0 ? "+1" : "-1") << '\t' << d.relator << '\t' << to_string(d.kappa) << '\t'
          << to_string(d.beta) << '\t' << opt_str(d.mu) << '\t' << opt_str(d.n) << '\t' << opt_str(d.m) << '\t'
          << (d.branch_bound ? "ok" : "VIOLATED") << '\n';
    out << "total_kappa\t" << to_string(rep.total_kappa) << "\nchi\t" << rep.chi << "\nchi_minus\t" << rep.chi_minus
        << "\nV/E/F\t" << rep.vertices << '/' << rep.edges << '/' << rep.faces << "\nnormalized V/E\t"
        << rep.normalized_vertices << '/' << rep.normalized_edges << "\nnormalized_total_kappa\t"
        << to_string(rep.normalized_total_kappa) << "\ngauss_bonnet\t" << (rep.gauss_bonnet ? "ok" : "FAIL") << "\n";
    bool ok = rep.gauss_bonnet;
    for (const auto& d : rep.disks) ok = ok && d.branch_bound;
    code = ok ? 0 : 1;
  });
  add_dg("claims", "Check the four curvature claims on family disks")->callback([&] {
    Presentation pres = load_presentation(dg.pres, io);
    log_header(io, override_of(pres));
    ValidatedDiagram vd = load_diagram(dg.file, pres, io);
    ClaimsReport rep = claims_check(vd);
    for (const ClaimResult* c : {&rep.c1, &rep.c2, &rep.c3, &rep.c4}) {
      out << c->name << '\t' << (c->pass ? "pass" : "FAIL") << '\t' << c->checked << " checked\n";
      for (const auto& f : c->failures) out << "  " << f << "\n";
    }
    out << "degree\t" << to_string(rep.c4_degree) << "\nbound\t" << to_string(rep.c4_bound) << "\n";
    if (rep.outside_hypotheses) {
      out << "outside hypotheses\n";
      for (const auto& n : rep.hypothesis_notes) out << "  " << n << "\n";
    }
    code = rep.all_pass() ? 0 : 1;
  });
  add_dg("bound", "scl upper bound -chi^-/(2n) from the diagram")->callback([&] {
    Presentation pres = load_presentation(dg.pres, io);
    log_header(io, override_of(pres));
    ValidatedDiagram vd = load_diagram(dg.file, pres, io);
    Rational b = diagram_scl_upper(vd);
    out << "chi_minus\t" << chi_minus(vd) << "\nn\t" << boundary_degree(vd).get_str() << "\nscl_upper\t"
        << to_string(b) << '\t' << to_decimal(b) << "\n";
  });

  // cert
  struct {
    std::string file, pres;
  } ct;
  auto* cert_cmd = app.add_subcommand("cert", "Commutator certificates");
  cert_cmd->require_subcommand(1);
  auto* cert_verify = cert_cmd->add_subcommand("verify", "Verify a certificate by free reduction");
  cert_verify->add_option("file", ct.file, "certificate file")->required();
  cert_verify->add_option("--pres", ct.pres, "presentation file")->required();
  cert_verify->callback([&] {
    Presentation pres = load_presentation(ct.pres, io);
    log_header(io, override_of(pres));
    const std::string text = slurp(ct.file, io);
    CommutatorCertificate cert = with_file(ct.file, [&] { return parse_certificate(text, pres.alphabet()); });
    VerifyResult r = verify_certificate(cert, pres);
    if (r.pass) {
      out << "pass: " << cert.commutators.size() << " commutators, " << cert.relators.size() << " relator factors\n";
    } else {
      out << "FAIL: residue " << format_word(r.residue, pres.alphabet()) << "\n";
      code = 1;
    }
  });

  // bound
  struct {
    std::string expr, cert_out, l_override;
    bool cl_half = false;
    std::uint64_t m = 0, n = 0, N = 1;
  } bd;
  auto* bound_cmd = app.add_subcommand("bound", "scl bound calculus");
  bound_cmd->require_subcommand(1);
  auto* bound_derive = bound_cmd->add_subcommand("derive", "Derive a bound from an expression tree");
  bound_derive->add_option("--expr", bd.expr, "comm | cl(k) | atom(x,p/q) | prod(..) | pow(e,k) | root(e,k) | inv(e) | hom(e)")
      ->required();
  bound_derive->add_flag("--cl-half", bd.cl_half, "allow scl <= cl - 1/2");
  bound_derive->callback([&] {
    log_header(io, std::nullopt);
    BoundExpr e = with_file("--expr", [&] { return parse_bound_expr(bd.expr); });
    BoundDerivation d = derive_bound(e, bd.cl_half);
    out << format_derivation(d) << "bound\t" << to_string(d.bound) << '\t' << to_decimal(d.bound) << "\n";
  });
  auto* bound_family = bound_cmd->add_subcommand("family", "Bound for t from r_{m,n,N}");
  bound_family->add_option("-m", bd.m, "m")->required()->check(CLI::PositiveNumber);
  bound_family->add_option("-n", bd.n, "n")->required()->check(CLI::PositiveNumber);
  bound_family->add_option("-N", bd.N, "relator index N")->check(CLI::PositiveNumber);
  bound_family->add_flag("--cl-half", bd.cl_half, "allow scl <= cl - 1/2");
  bound_family->add_option("--cert", bd.cert_out, "write the certificate for t^n here");
  bound_family->add_option("--l-override", bd.l_override, "replace l (testing only)");
  bound_family->callback([&] {
    const auto lo = override_arg(bd.l_override);
    log_header(io, lo);
    std::vector<CyclicWord> rels;
    for (std::uint64_t i = 1; i <= bd.N; ++i) rels.push_back(build_r(bd.m, bd.n, i, lo));
    Presentation pres = Presentation::finite(family_alphabet(), std::move(rels));
    CommutatorCertificate cert = family_upper_certificate(bd.m, bd.n, bd.N, pres, lo);
    const bool verified = verify_certificate(cert, pres).pass;
    BoundDerivation d = derive_bound(family_bound_expr(bd.m, bd.n), bd.cl_half);
    out << format_derivation(d) << "certificate\t" << (verified ? "verified" : "FAILED") << '\t'
        << cert.commutators.size() << " commutators\nbound\t" << to_string(d.bound) << '\t' << to_decimal(d.bound)
        << "\n";
    if (!bd.cert_out.empty()) emit(bd.cert_out, print_certificate(cert, pres.alphabet()), io);
    code = verified ? 0 : 1;
  });

  // cl-search
  struct {
    std::string pres, word, q = "0", output, power = "1";
    SearchConfig cfg;
  } cs;
  cs.cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::uint64_t> cs_budget;
  auto* cs_cmd = app.add_subcommand("cl-search", "Search for cl(g^N) <= floor(qN)");
  cs_cmd->add_option("--pres", cs.pres, "presentation file")->required();
  cs_cmd->add_option("--word", cs.word, "g")->required();
  cs_cmd->add_option("--power", cs.power, "N (default 1)");
  cs_cmd->add_option("--q", cs.q, "q (rational)")->required();
  cs_cmd->add_option("--max-len", cs.cfg.max_len, "letters per word (default 2)")->check(CLI::PositiveNumber);
  cs_cmd->add_option("--max-comm", cs.cfg.max_commutators, "cap on commutators (default 8)")
      ->check(CLI::PositiveNumber);
  cs_cmd->add_option("--max-relfac", cs.cfg.max_relator_factors, "relator factors (default 2)");
  cs_cmd->add_option("--max-relidx", cs.cfg.max_relator_index, "highest relator index (default 1)")
      ->check(CLI::PositiveNumber);
  cs_cmd->add_option("--workers", cs.cfg.workers, "threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
  cs_cmd->add_option("--budget", cs_budget, "candidate budget (default 1e6 or SCLFORGE_BUDGET)")
      ->check(CLI::PositiveNumber);
  cs_cmd->add_option("-o,--output", cs.output, "witness certificate path (default stdout)");
  cs_cmd->callback([&] {
    Presentation pres = load_presentation(cs.pres, io);
    log_header(io, override_of(pres));
    cs.cfg.budget = cs_budget ? *cs_budget : default_budget();
    PowerWord g = with_file("--word", [&] { return parse_word(cs.word, pres.alphabet()); });
    BigInt N;
    try {
      N = parse_bigint(cs.power);
    } catch (const std::invalid_argument&) {
      throw InputError("--power: '" + cs.power + "' is not an integer");
    }
    SearchResult r = cl_search(pres, g, N, rational_arg(cs.q, "--q"), cs.cfg);
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    if (r.status == SearchResult::Status::Halt) {
      err << "HALT after " << r.candidates << " candidates (floor(qN) = " << r.q_prime << ")\n";
      if (cs.output.empty() || cs.output == "-") out << "HALT\n";
      emit(cs.output, print_certificate(*r.witness, pres.alphabet()), io);
      if (!cs.output.empty() && cs.output != "-") out << "HALT\n";
    } else {
      out << "BUDGET_EXHAUSTED\n";
      err << r.candidates << " candidates"
          << (r.space_exhausted ? "; the configured search space is exhausted" : "; budget reached") << "\n";
      code = 1;
    }
  });

  // report
  struct {
    std::string pres, m, n, l_override, limit;
    std::uint64_t k = 0;
    std::vector<std::string> fixtures;
  } rp;
  auto* rp_cmd = app.add_subcommand("report", "Certified upper bounds along a family prefix (TSV)");
  rp_cmd->add_option("--pres", rp.pres, "family presentation file");
  rp_cmd->add_option("--m", rp.m, "comma-separated m_i");
  rp_cmd->add_option("--n", rp.n, "comma-separated n_i");
  rp_cmd->add_option("--limit", rp.limit, "declared limit of m_i/n_i");
  rp_cmd->add_option("--l-override", rp.l_override, "replace l (testing only)");
  rp_cmd->add_option("--k", rp.k, "prefix length")->check(CLI::PositiveNumber);
  rp_cmd->add_option("--fixture", rp.fixtures, "diagram.vkd:presentation.pres, repeatable");
  rp_cmd->callback([&] {
    std::optional<Presentation> fam;
    std::uint64_t k = rp.k;
    if (!rp.pres.empty()) {
      if (!rp.m.empty() || !rp.n.empty()) throw InputError("give either --pres or --m/--n");
      fam = load_presentation(rp.pres, io);
      if (!fam->family()) throw InputError(rp.pres + " has no family line");
      if (k == 0) k = fam->prefix_hint().value_or(0);
    } else {
      if (rp.m.empty() || rp.n.empty() || k == 0) throw InputError("--m, --n and --k are required without --pres");
      std::optional<Rational> limit;
      if (!rp.limit.empty()) limit = rational_arg(rp.limit, "--limit");
      fam = family_from_lists(rp.m, rp.n, k, override_arg(rp.l_override), limit);
    }
    if (k == 0) throw InputError("--k is required");
    log_header(io, override_of(*fam));
    std::vector<std::pair<std::string, ValidatedDiagram>> fixtures;
    for (const auto& spec : rp.fixtures) {
      auto colon = spec.rfind(':');
      if (colon == std::string::npos) throw InputError("--fixture expects diagram:presentation");
      Presentation p = load_presentation(spec.substr(colon + 1), io);
      fixtures.emplace_back(spec.substr(0, colon), load_diagram(spec.substr(0, colon), p, io, true));
    }
    SclReport rep = scl_report(*fam, k, fixtures);
    out << format_report_tsv(rep);
    bool ok = true;
    for (const auto& row : rep.rows) ok = ok && row.certificate_verified;
    code = ok ? 0 : 1;
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DiagramError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}

}  // namespace sclforge::cli
