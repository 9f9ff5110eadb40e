"""Result record shared by every verifier."""
from __future__ import annotations

from dataclasses import dataclass, field

from .series import TruncatedSeries, first_mismatch

PASS = "pass"
MISMATCH = "mismatch"
REJECTED = "rejected"
NON_TRUNCATING = "non-truncating"


@dataclass
class VerificationReport:
    name: str
    order: int
    outcome: str
    seed: int | None = None
    env: dict[str, str] = field(default_factory=dict)
    mismatch_index: int | None = None
    lhs_coeff: str | None = None
    rhs_coeff: str | None = None
    detail: str | None = None
    elapsed_ms: float | None = None
    # (label, first mismatch index or None) for multi-part checks
    subchecks: list[tuple[str, int | None]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.outcome == PASS

    def sort_key(self):
        return (self.name, -1 if self.seed is None else self.seed)


def compare(name: str, lhs: TruncatedSeries, rhs: TruncatedSeries, order: int, **kw) -> VerificationReport:
    """Exact coefficientwise comparison of two sides to ``order``."""
    k = first_mismatch(lhs, rhs, order)
    if k is None:
        return VerificationReport(name, order, PASS, **kw)
    return VerificationReport(
        name,
        order,
        MISMATCH,
        mismatch_index=k,
        lhs_coeff=str(lhs[k]),
        rhs_coeff=str(rhs[k]),
        **kw,
    )
