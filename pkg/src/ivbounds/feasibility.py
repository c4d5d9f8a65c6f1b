"""Compatibility of an observed law with the IV model via the 8K inequalities.

A joint ``pi`` over (Y(x0), Y(x1)) is admissible for a law when, in every arm z,

    P(Y(x_i) = y)            <= P(Y=y, X=i | z) + P(X=1-i | z)
    P(Y(x0) = y, Y(x1) = yt) <= P(Y=y, X=0 | z) + P(Y=yt, X=1 | z)

and the law is compatible iff some admissible ``pi`` exists. The feasibility
problem lives on the 4-entry simplex of ``pi`` and never touches response types.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bounds import Interval, g_value
from .law import CELLS, CounterfactualJoint, LawError, ObservedLaw, Scalar, format_scalar, require_valid
from .simplex import LinearProgram, simplex_solve

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class InequalityRecord:
    kind: str  # "marginal" or "joint"
    z: int
    a: int  # y for both kinds
    b: int  # i for marginal, yt for joint
    lhs: Scalar
    rhs: Scalar
    satisfied: bool

    def to_json(self) -> dict:
        out = {"kind": self.kind, "z": self.z, "y": self.a}
        out["i" if self.kind == "marginal" else "yt"] = self.b
        out.update(lhs=format_scalar(self.lhs), rhs=format_scalar(self.rhs), ok=self.satisfied)
        return out


def _coeffs(kind: str, a: int, b: int) -> list[int]:
    """Coefficients on (pi00, pi01, pi10, pi11) for the left-hand side."""
    if kind == "joint":
        return [1 if c == (a, b) else 0 for c in CELLS]
    y, i = a, b
    # P(Y(x_i) = y): component i of the pair equals y
    return [1 if c[i] == y else 0 for c in CELLS]


def _rhs(law: ObservedLaw, kind: str, z: int, a: int, b: int) -> Scalar:
    if kind == "joint":
        return law.p(z, 0, a) + law.p(z, 1, b)
    y, i = a, b
    return law.p(z, i, y) + law.px(z, 1 - i)


def _inequalities(K: int):
    for z in range(1, K + 1):
        for y in (0, 1):
            for i in (0, 1):
                yield "marginal", z, y, i
        for y, yt in CELLS:
            yield "joint", z, y, yt


def check_joint(law: ObservedLaw, joint: CounterfactualJoint, tol: Scalar = None) -> list[InequalityRecord]:
    """Evaluate all 8K inequalities for ``joint`` against ``law``."""
    require_valid(law)
    problems = joint.validate()
    if problems:
        raise LawError("invalid joint: " + "; ".join(problems))
    if tol is None:
        tol = law.tol
    pis = [joint.pi[c] for c in CELLS]
    records = []
    for kind, z, a, b in _inequalities(law.K):
        lhs = sum(c * p for c, p in zip(_coeffs(kind, a, b), pis))
        rhs = _rhs(law, kind, z, a, b)
        records.append(InequalityRecord(kind, z, a, b, lhs, rhs, lhs <= rhs + tol))
    return records


def _joint_lp(law: ObservedLaw, marginals: Optional[tuple], objective=(0, 0, 0, 0), maximize=False):
    exact = law.exact
    one = Fraction(1) if exact else 1.0
    A_ub, b_ub = [], []
    for kind, z, a, b in _inequalities(law.K):
        A_ub.append(_coeffs(kind, a, b))
        b_ub.append(_rhs(law, kind, z, a, b))
    A_eq, b_eq = [[1, 1, 1, 1]], [one]
    if marginals is not None:
        a, b = marginals
        if not (0 <= a <= 1 and 0 <= b <= 1):
            raise ValueError(f"pinned marginals must lie in [0, 1], got {marginals}")
        if exact:
            a, b = Fraction(a), Fraction(b)
        A_eq.append(_coeffs("marginal", 1, 0))
        b_eq.append(a)
        A_eq.append(_coeffs("marginal", 1, 1))
        b_eq.append(b)
    lp = LinearProgram(list(objective), A_eq, b_eq, A_ub, b_ub, maximize=maximize)
    return simplex_solve(lp, exact=exact and all(isinstance(v, Fraction) for v in b_eq))


def joint_feasible(
    law: ObservedLaw, marginals: Optional[tuple] = None
) -> tuple[bool, Optional[CounterfactualJoint]]:
    """Find an admissible joint, optionally with P(Y(x0)=1)=a and P(Y(x1)=1)=b pinned."""
    require_valid(law)
    res = _joint_lp(law, marginals)
    if not res.optimal:
        return False, None
    return True, CounterfactualJoint(dict(zip(CELLS, res.x)))


def joint_ace_bounds(law: ObservedLaw) -> Optional[Interval]:
    """Range of ACE = pi01 - pi10 over admissible joints; None if there are none."""
    require_valid(law)
    ace = (0, 1, -1, 0)
    lo = _joint_lp(law, None, ace)
    if not lo.optimal:
        return None
    hi = _joint_lp(law, None, ace, maximize=True)
    return Interval(lo.value, hi.value)


def marginal_intervals_nonempty(law: ObservedLaw) -> bool:
    tol = law.tol
    for i in (0, 1):
        if g_value(law, i, 0)[0] + g_value(law, i, 1)[0] < 1 - tol:
            return False
    return True


def iv_compatible(law: ObservedLaw) -> bool:
    """True iff some joint satisfies every inequality; short-circuits on an empty marginal interval."""
    require_valid(law)
    if not marginal_intervals_nonempty(law):
        return False
    return joint_feasible(law)[0]


def grid(lo: Scalar, hi: Scalar, n: int) -> list:
    return [lo + (hi - lo) * Fraction(k, n - 1) if isinstance(lo, Fraction) else lo + (hi - lo) * k / (n - 1)
            for k in range(n)]


def variation_independence_probe(law: ObservedLaw, grid_n: int = 5) -> bool:
    """Check every point of a closed grid over the two marginal intervals is attainable."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if not iv_compatible(law):
        raise LawError("no feasible rectangle: law is not IV-compatible")
    g = {(i, j): g_value(law, i, j)[0] for i in (0, 1) for j in (0, 1)}
    a_pts = grid(1 - g[(0, 0)], g[(0, 1)], grid_n)
    b_pts = grid(1 - g[(1, 0)], g[(1, 1)], grid_n)
    return all(joint_feasible(law, (a, b))[0] for a in a_pts for b in b_pts)
