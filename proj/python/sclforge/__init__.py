"""Exact small-cancellation presentations, van Kampen diagrams and scl bounds."""

from ._sclforge import (
    CertificateError,
    DiagramError,
    ParseError,
    Presentation,
    SequenceError,
    __version__,
    check_c_prime,
    cl_search,
    derive_bound,
    diagram_summary,
    family_bound,
    family_certificate,
    monotone_prefix,
    report_tsv,
    run_cli,
    specker_partial,
    verify_certificate,
)

__all__ = [
    "CertificateError",
    "DiagramError",
    "ParseError",
    "Presentation",
    "SequenceError",
    "__version__",
    "check_c_prime",
    "cl_search",
    "derive_bound",
    "diagram_summary",
    "family_bound",
    "family_certificate",
    "monotone_prefix",
    "report_tsv",
    "run_cli",
    "specker_partial",
    "verify_certificate",
]
