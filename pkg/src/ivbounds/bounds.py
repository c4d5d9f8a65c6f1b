"""Closed-form ACE bounds for a binary treatment, binary outcome and K-level instrument.

``g(i, j)`` is the tightest upper bound on P(Y(x_i) = j). It is a minimum over
K single-arm terms and K(K-1) ordered cross-arm terms. The marginal intervals
follow directly, and because the two marginals are variation independent, the
ACE interval is the difference of the two marginal intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import NamedTuple, Optional

from .law import LawError, ObservedLaw, Scalar, format_scalar, require_valid

PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


class Interval(NamedTuple):
    lower: Scalar
    upper: Scalar

    @property
    def width(self) -> Scalar:
        return self.upper - self.lower

    @property
    def empty(self) -> bool:
        return self.lower > self.upper

    def contains(self, other: "Interval", tol=0) -> bool:
        return self.lower <= other.lower + tol and other.upper <= self.upper + tol

    def to_json(self) -> list:
        return [format_scalar(self.lower), format_scalar(self.upper)]


def single_arm_term(law: ObservedLaw, i: int, j: int, z: int) -> Scalar:
    return law.p(z, i, j) + law.px(z, 1 - i)


def cross_arm_term(law: ObservedLaw, i: int, j: int, z: int, zt: int) -> Scalar:
    return law.p(z, i, j) + law.p(z, 1 - i, 0) + law.p(zt, i, j) + law.p(zt, 1 - i, 1)


def _branches(K: int, single_only: bool):
    # lexicographic: (1,) < (1, 2) < (1, 3) < (2,) < (2, 1) ...
    out = [(z,) for z in range(1, K + 1)]
    if not single_only:
        out += list(permutations(range(1, K + 1), 2))
    return sorted(out)


def _envelope(law: ObservedLaw, i: int, j: int, single_only: bool):
    best, arg = None, None
    for br in _branches(law.K, single_only):
        v = single_arm_term(law, i, j, *br) if len(br) == 1 else cross_arm_term(law, i, j, *br)
        if best is None or v < best:
            best, arg = v, br
    return best, arg


def g_value(law: ObservedLaw, i: int, j: int) -> tuple[Scalar, tuple]:
    """Upper bound on P(Y(x_i) = j) and the branch attaining it.

    The branch is ``(z,)`` for a single-arm term or ``(z, zt)`` for a cross-arm
    term; ties go to the lexicographically first branch.
    """
    require_valid(law)
    return _envelope(law, i, j, single_only=False)


def natural_g(law: ObservedLaw, i: int, j: int) -> tuple[Scalar, tuple]:
    """``g`` restricted to the single-arm branch (within-arm information only)."""
    require_valid(law)
    return _envelope(law, i, j, single_only=True)


def _ace_from(g) -> Interval:
    return Interval(1 - g[(1, 0)] - g[(0, 1)], g[(0, 0)] + g[(1, 1)] - 1)


def natural_bounds(law: ObservedLaw) -> Interval:
    """Natural (within-arm) ACE interval [L1 - U0, U1 - L0]."""
    g = {ij: natural_g(law, *ij)[0] for ij in PAIRS}
    return _ace_from(g)


def sharp_ace(law: ObservedLaw) -> Interval:
    g = {ij: g_value(law, *ij)[0] for ij in PAIRS}
    return _ace_from(g)


@dataclass(frozen=True)
class BoundsReport:
    g: dict
    argmin: dict
    marginal_x0: Interval
    marginal_x1: Interval
    ace_sharp: Interval
    ace_natural: Interval
    compatible: bool
    exact: bool

    def to_json(self) -> dict:
        out = {
            "g": {f"{i}{j}": format_scalar(v) for (i, j), v in self.g.items()},
            "marginal_x0": self.marginal_x0.to_json(),
            "marginal_x1": self.marginal_x1.to_json(),
            "ace_sharp": self.ace_sharp.to_json(),
            "ace_natural": self.ace_natural.to_json(),
            "compatible": self.compatible,
            "argmin": {
                f"{i}{j}": {"branch": "arm" if len(b) == 1 else "pair", "z": list(b)}
                for (i, j), b in self.argmin.items()
            },
            "exact": self.exact,
        }
        if self.exact:
            out["float"] = {
                k: [float(v) for v in getattr(self, k)]
                for k in ("marginal_x0", "marginal_x1", "ace_sharp", "ace_natural")
            }
            out["float"]["g"] = {f"{i}{j}": float(v) for (i, j), v in self.g.items()}
        return out


def sharp_report(law: ObservedLaw, compatible: Optional[bool] = None) -> BoundsReport:
    """Assemble g values, marginal and ACE intervals, and the compatibility flag."""
    from .feasibility import iv_compatible

    require_valid(law)
    g, argmin = {}, {}
    for ij in PAIRS:
        g[ij], argmin[ij] = g_value(law, *ij)
    if compatible is None:
        compatible = iv_compatible(law)
    return BoundsReport(
        g=g,
        argmin=argmin,
        marginal_x0=Interval(1 - g[(0, 0)], g[(0, 1)]),
        marginal_x1=Interval(1 - g[(1, 0)], g[(1, 1)]),
        ace_sharp=_ace_from(g),
        ace_natural=natural_bounds(law),
        compatible=compatible,
        exact=law.exact,
    )


def balke_pearl_k2(law: ObservedLaw) -> Interval:
    """Classical two-arm ACE bounds written out term by term.

    Kept deliberately separate from :func:`g_value` as a redundancy check.
    """
    if law.K != 2:
        raise LawError(f"two-arm bounds need K = 2, got K = {law.K}")
    require_valid(law)

    def p(y, x, z):  # P(Y=y, X=x | Z=z), z in {0, 1}
        return law.p(z + 1, x, y)

    lower = max(
        p(1, 1, 1) + p(0, 0, 0) - 1,
        p(1, 1, 0) + p(0, 0, 1) - 1,
        p(1, 1, 0) - p(1, 1, 1) - p(1, 0, 1) - p(0, 1, 0) - p(1, 0, 0),
        p(1, 1, 1) - p(1, 1, 0) - p(1, 0, 0) - p(0, 1, 1) - p(1, 0, 1),
        -p(0, 1, 1) - p(1, 0, 1),
        -p(0, 1, 0) - p(1, 0, 0),
        p(0, 0, 1) - p(0, 1, 1) - p(1, 0, 1) - p(0, 1, 0) - p(0, 0, 0),
        p(0, 0, 0) - p(0, 1, 0) - p(1, 0, 0) - p(0, 1, 1) - p(0, 0, 1),
    )
    upper = min(
        1 - p(0, 1, 1) - p(1, 0, 0),
        1 - p(0, 1, 0) - p(1, 0, 1),
        -p(0, 1, 0) + p(0, 1, 1) + p(0, 0, 1) + p(1, 1, 0) + p(0, 0, 0),
        -p(0, 1, 1) + p(1, 1, 1) + p(0, 0, 1) + p(0, 1, 0) + p(0, 0, 0),
        p(1, 1, 1) + p(0, 0, 1),
        p(1, 1, 0) + p(0, 0, 0),
        -p(1, 0, 1) + p(1, 1, 1) + p(0, 0, 1) + p(1, 1, 0) + p(1, 0, 0),
        -p(1, 0, 0) + p(1, 1, 0) + p(0, 0, 0) + p(1, 1, 1) + p(1, 0, 1),
    )
    return Interval(lower, upper)
