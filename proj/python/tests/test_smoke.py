import os
from fractions import Fraction
from pathlib import Path

import pytest

import sclforge

FIXTURES = Path(os.environ.get("SCLFORGE_FIXTURES", Path(__file__).resolve().parents[2] / "fixtures"))
FREE2 = sclforge.Presentation.parse("gens: a b\n")
TORUS = sclforge.Presentation.parse("gens: a b\nrel: a b a^-1 b^-1\n")


def test_version():
    assert sclforge.__version__ == "0.1.0"


def test_family_presentation():
    p = sclforge.Presentation.family([1, 1], [1, 2])
    assert p.generators()[:4] == ["t", "a", "b", "c"]
    assert p.relator_length(1) == 1 + 12 + 18 * 2310
    assert sclforge.check_c_prime(p, 2)["pass"]
    broken = sclforge.Presentation.family([1], [1], l_override=1)
    assert not sclforge.check_c_prime(broken, 1)["pass"]
    assert broken.relator(1).startswith("t ")


def test_parse_error_is_value_error():
    with pytest.raises(ValueError):
        sclforge.Presentation.parse("gens: a\nrel: b\n")


def test_certificates_and_bounds():
    p = sclforge.Presentation.family([1, 2], [1, 5])
    cert = sclforge.family_certificate(2, 5, 2, p)
    assert sclforge.verify_certificate(cert, p)
    assert sclforge.family_bound(2, 5, cl_half=True) == Fraction(1)
    assert sclforge.family_bound(2, 5) == Fraction(11, 10)
    assert sclforge.derive_bound("root(pow(comm, 4), 2)") == Fraction(1)
    with pytest.raises(sclforge.CertificateError):
        sclforge.derive_bound("atom(g)")


def test_cl_search():
    r = sclforge.cl_search(FREE2, "a b a^-1 b^-1", 1, Fraction(1), workers=2)
    assert r["status"] == "HALT"
    assert sclforge.verify_certificate(r["certificate"], FREE2)
    t = sclforge.cl_search(TORUS, "a b a^-1 b^-1", 5, 0, max_relfac=5)
    assert t["certificate"].count("relfac") == 5
    e = sclforge.cl_search(FREE2, "a", 1, 1, budget=50)
    assert e["status"] == "BUDGET_EXHAUSTED"
    assert e["certificate"] is None


def test_diagram_summary():
    pres = sclforge.Presentation.parse((FIXTURES / "torus.pres").read_text())
    s = sclforge.diagram_summary((FIXTURES / "torus.vkd").read_text(), pres)
    assert s["valid"] and s["chi"] == 0 and s["total_kappa"] == 0


def test_rc():
    assert sclforge.specker_partial("evens", 2) == Fraction(1, 2)
    pairs = sclforge.monotone_prefix("evens", 20)
    ns = [n for _, n in pairs]
    assert all(a < b for a, b in zip(ns, ns[1:]))
    values = [Fraction(m, n) for m, n in pairs]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_report_and_cli():
    tsv = sclforge.report_tsv([1, 1, 1, 1], [1, 2, 3, 4], 4)
    assert "\t4/3\t" in tsv
    code, out, _ = sclforge.run_cli(["bound", "derive", "--expr", "comm"])
    assert code == 0 and "1/2" in out
    assert sclforge.run_cli(["bogus"])[0] == 2
