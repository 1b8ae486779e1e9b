#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sclforge/cli.hpp"
#include "sclforge/diagram.hpp"
#include "sclforge/rc.hpp"
#include "sclforge/scl.hpp"

namespace py = pybind11;
using namespace sclforge;

namespace {

py::object fraction(const Rational& r) { return py::module_::import("fractions").attr("Fraction")(to_string(r)); }

BigInt big(const py::int_& v) { return BigInt(py::str(v).cast<std::string>()); }

std::vector<BigInt> bigs(const std::vector<py::int_>& v) {
  std::vector<BigInt> out;
  for (const auto& x : v) out.push_back(big(x));
  return out;
}

Rational rational_of(const py::handle& v) { return parse_rational(py::str(v).cast<std::string>()); }

}  // namespace

PYBIND11_MODULE(_sclforge, m) {
  m.doc() = "Exact small-cancellation and scl toolkit";
  m.attr("__version__") = SCLFORGE_VERSION;

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<SequenceError>(m, "SequenceError", PyExc_ValueError);
  py::register_exception<CertificateError>(m, "CertificateError", PyExc_ValueError);
  py::register_exception<DiagramError>(m, "DiagramError", PyExc_ValueError);

  py::class_<Presentation>(m, "Presentation")
      .def_static("parse", &parse_presentation, py::arg("text"))
      .def_static(
          "family",
          [](const std::vector<py::int_>& ms, const std::vector<py::int_>& ns, std::optional<py::int_> l_override) {
            std::optional<BigInt> lo;
            if (l_override) lo = big(*l_override);
            return family_presentation(SeqPair::from_lists(bigs(ms), bigs(ns)), lo);
          },
          py::arg("m"), py::arg("n"), py::arg("l_override") = py::none())
      .def("generators", [](const Presentation& p) {
        std::vector<std::string> names;
        for (const auto& g : p.alphabet().generators()) names.push_back(g.name);
        return names;
      })
      .def("relator", [](const Presentation& p, std::uint64_t i) { return format_word(p.relator(i), p.alphabet()); },
           py::arg("i"))
      .def("relator_length", [](const Presentation& p, std::uint64_t i) {
        return py::int_(py::str(p.relator(i).word().letter_length().get_str()));
      }, py::arg("i"))
      .def("to_text", &print_presentation, py::arg("k"));

  m.def(
      "check_c_prime",
      [](const Presentation& p, std::uint64_t k, py::object lambda) {
        PiecesReport rep = check_c_prime(p, k, lambda.is_none() ? Rational(1, 6) : rational_of(lambda));
        py::dict d;
        d["pass"] = rep.pass;
        d["worst_ratio"] = fraction(rep.worst_ratio);
        d["pairs"] = rep.entries.size();
        return d;
      },
      py::arg("pres"), py::arg("k"), py::arg("lam") = py::none());

  m.def(
      "verify_certificate",
      [](const std::string& text, const Presentation& p) {
        return verify_certificate(parse_certificate(text, p.alphabet()), p).pass;
      },
      py::arg("text"), py::arg("pres"));
  m.def(
      "family_certificate",
      [](std::uint64_t mm, std::uint64_t n, std::uint64_t N, const Presentation& p) {
        return print_certificate(family_upper_certificate(mm, n, N, p), p.alphabet());
      },
      py::arg("m"), py::arg("n"), py::arg("N"), py::arg("pres"));

  m.def(
      "derive_bound",
      [](const std::string& expr, bool cl_half) { return fraction(derive_bound(parse_bound_expr(expr), cl_half).bound); },
      py::arg("expr"), py::arg("cl_half") = false);
  m.def(
      "family_bound",
      [](std::uint64_t mm, std::uint64_t n, bool cl_half) {
        return fraction(derive_bound(family_bound_expr(mm, n), cl_half).bound);
      },
      py::arg("m"), py::arg("n"), py::arg("cl_half") = false);

  m.def(
      "cl_search",
      [](const Presentation& p, const std::string& word, const py::int_& power, py::object q, std::uint64_t max_len,
         std::uint64_t max_relfac, std::uint64_t max_relidx, unsigned workers, std::uint64_t budget) {
        SearchConfig cfg;
        cfg.max_len = max_len;
        cfg.max_relator_factors = max_relfac;
        cfg.max_relator_index = max_relidx;
        cfg.workers = workers;
        cfg.budget = budget;
        const PowerWord g = parse_word(word, p.alphabet());
        const BigInt n = big(power);
        const Rational qq = rational_of(q);
        SearchResult r;
        {
          py::gil_scoped_release release;
          r = cl_search(p, g, n, qq, cfg);
        }
        py::dict d;
        d["status"] = r.status == SearchResult::Status::Halt ? "HALT" : "BUDGET_EXHAUSTED";
        d["candidates"] = r.candidates;
        d["space_exhausted"] = r.space_exhausted;
        d["certificate"] = r.witness ? py::object(py::str(print_certificate(*r.witness, p.alphabet()))) : py::none();
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("pres"), py::arg("word"), py::arg("power"), py::arg("q"), py::arg("max_len") = 2,
      py::arg("max_relfac") = 2, py::arg("max_relidx") = 1, py::arg("workers") = 1, py::arg("budget") = 1'000'000);

  m.def(
      "diagram_summary",
      [](const std::string& text, const Presentation& p) {
        ValidationResult res = validate(parse_diagram(text, p.alphabet()), p);
        py::dict d;
        d["valid"] = res.ok();
        std::vector<std::string> errors;
        for (const auto& e : res.errors) errors.push_back(e.kind + ": " + e.message);
        d["errors"] = errors;
        if (res.ok()) {
          GaussBonnet gb = gauss_bonnet_check(*res.diagram);
          d["chi"] = gb.chi;
          d["total_kappa"] = fraction(gb.total_kappa);
          d["chi_minus"] = chi_minus(*res.diagram);
        }
        return d;
      },
      py::arg("text"), py::arg("pres"));

  m.def(
      "specker_partial",
      [](const std::string& set, std::uint64_t k) { return fraction(specker_partial(builtin_set(set), k)); },
      py::arg("set"), py::arg("k"));
  m.def(
      "monotone_prefix",
      [](const std::string& set, std::uint64_t k) {
        MonotonePrefix p = cut_to_monotone(specker_cut(builtin_set(set)), k);
        std::vector<std::pair<py::int_, py::int_>> out;
        for (const auto& pv : p.pairs)
          out.emplace_back(py::int_(py::str(pv.m.get_str())), py::int_(py::str(pv.n.get_str())));
        return out;
      },
      py::arg("set"), py::arg("k"));

  m.def(
      "report_tsv",
      [](const std::vector<py::int_>& ms, const std::vector<py::int_>& ns, std::uint64_t k) {
        return format_report_tsv(scl_report(family_presentation(SeqPair::from_lists(bigs(ms), bigs(ns))), k));
      },
      py::arg("m"), py::arg("n"), py::arg("k"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::istringstream in;
        std::ostringstream out, err;
        int code = cli::run(args, in, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
