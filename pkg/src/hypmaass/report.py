"""Structured verification records shared by the library and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class VerificationReport:
    """One named identity check: parameters, residual, tolerance, verdict.

    params must suffice to reproduce the run (including any random seed);
    passed is residual <= tolerance by construction.
    """

    check_name: str
    params: dict
    residual: float
    tolerance: float
    passed: bool
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "params": _plain(self.params),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "notes": self.notes,
        }


def make_report(check_name: str, params: dict, residual: float, tolerance: float,
                notes: str = "") -> VerificationReport:
    return VerificationReport(
        check_name=check_name,
        params=params,
        residual=float(residual),
        tolerance=float(tolerance),
        passed=bool(residual <= tolerance),
        notes=notes,
    )


def _plain(value):
    """JSON-safe copy: complex values become [re, im] pairs."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value
