"""Brute-force certification over canonical response types.

A response type fixes (Y(x0), Y(x1)) and the whole treatment response z -> X(z).
Under full instrument independence the observed law is a linear image of a
distribution over the 4 * 2**K types, so ACE extrema and model compatibility are
small linear programs. Nothing here uses the closed-form bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .bounds import Interval
from .law import CELLS, LawError, ObservedLaw, Scalar, format_scalar, require_valid
from .simplex import LinearProgram, simplex_solve

MAX_K = 12


@dataclass(frozen=True, order=True)
class ResponseType:
    """``y_type = (Y(x0), Y(x1))``; ``x_func[k]`` is X(z_{k+1})."""

    y_type: tuple
    x_func: tuple

    @property
    def K(self) -> int:
        return len(self.x_func)

    def x(self, z: int) -> int:
        return self.x_func[z - 1]

    @property
    def effect(self) -> int:
        return self.y_type[1] - self.y_type[0]

    @property
    def label(self) -> str:
        return f"y{self.y_type[0]}{self.y_type[1]}|x{''.join(map(str, self.x_func))}"

    @classmethod
    def from_label(cls, label: str) -> "ResponseType":
        y, x = label.split("|")
        return cls((int(y[1]), int(y[2])), tuple(int(c) for c in x[1:]))


def treatment_words(K: int, monotone: bool = False) -> list[tuple]:
    """All K-bit treatment responses, or the K+1 nondecreasing ones."""
    if monotone:
        return [tuple([0] * (K - t) + [1] * t) for t in range(K + 1)]
    return [tuple((w >> (K - 1 - k)) & 1 for k in range(K)) for w in range(2**K)]


def response_types(K: int, monotone: bool = False, order: Optional[Sequence[int]] = None) -> list[ResponseType]:
    """Enumerate types; with ``monotone``, X(z) is nondecreasing along ``order``.

    ``order`` lists arm indices (1-based) from lowest to highest.
    """
    words = treatment_words(K, monotone)
    if monotone and order is not None:
        order = list(order)
        if sorted(order) != list(range(1, K + 1)):
            raise LawError(f"ordering must be a permutation of arms 1..{K}, got {order}")
        remapped = []
        for w in words:
            x = [0] * K
            for pos, z in enumerate(order):
                x[z - 1] = w[pos]
            remapped.append(tuple(x))
        words = remapped
    return [ResponseType(yt, w) for yt in CELLS for w in words]


@dataclass(frozen=True)
class ResponseTypeDistribution:
    weights: Mapping[ResponseType, Scalar] = field(default_factory=dict)

    @property
    def K(self) -> int:
        return next(iter(self.weights)).K

    @property
    def ace(self) -> Scalar:
        return sum(w * t.effect for t, w in self.weights.items())

    def validate(self) -> list[str]:
        problems = [f"negative weight on {t.label}" for t, w in self.weights.items() if w < 0]
        total = sum(self.weights.values())
        exact = all(isinstance(w, Fraction) for w in self.weights.values())
        if abs(total - 1) > (0 if exact else 1e-9):
            problems.append(f"weights sum to {total}")
        if len({t.K for t in self.weights}) > 1:
            problems.append("types of differing K")
        return problems

    def to_json(self) -> dict:
        return {t.label: format_scalar(w) for t, w in sorted(self.weights.items()) if w != 0}


def implied_law(d: ResponseTypeDistribution, labels: Sequence[str] = ()) -> ObservedLaw:
    """Observed law induced by ``d`` when Z is independent of all types."""
    K = d.K
    zero = 0.0 if any(isinstance(w, float) for w in d.weights.values()) else Fraction(0)
    cells = {(z, x, y): zero for z in range(1, K + 1) for x, y in CELLS}
    for t, w in d.weights.items():
        for z in range(1, K + 1):
            x = t.x(z)
            cells[(z, x, t.y_type[x])] += w
    return ObservedLaw(K, cells, tuple(labels))


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    ace: Optional[Interval]
    monotone: bool
    witness_min: Optional[ResponseTypeDistribution] = None
    witness_max: Optional[ResponseTypeDistribution] = None

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "ace": self.ace.to_json() if self.ace else None,
            "monotone": self.monotone,
            "witness_min": self.witness_min.to_json() if self.witness_min else None,
            "witness_max": self.witness_max.to_json() if self.witness_max else None,
        }


def _type_lp(law: ObservedLaw, types: list[ResponseType], maximize: bool) -> LinearProgram:
    # per arm, cell (1, 1) is implied by the other three plus the total
    rows, rhs = [], []
    for z in law.arms:
        for x, y in CELLS[:-1]:
            rows.append([1 if (t.x(z) == x and t.y_type[x] == y) else 0 for t in types])
            rhs.append(law.p(z, x, y))
    rows.append([1] * len(types))
    rhs.append(1 if law.exact else 1.0)
    return LinearProgram([t.effect for t in types], rows, rhs, maximize=maximize)


def oracle_ace_bounds(
    law: ObservedLaw, monotone: bool = False, order: Optional[Sequence] = None
) -> OracleResult:
    """Min and max ACE over type distributions reproducing ``law`` exactly.

    With ``monotone`` the treatment response must be nondecreasing along
    ``order`` (arm labels or 1-based indices, lowest first); no default order.
    """
    require_valid(law)
    if law.K > MAX_K:
        raise LawError(f"oracle size guard: K = {law.K} exceeds {MAX_K}")
    idx_order = None
    if monotone:
        if order is None:
            raise LawError("monotone oracle needs an explicit arm ordering")
        idx_order = [o if isinstance(o, int) else law.index_of(o) for o in order]
    types = response_types(law.K, monotone, idx_order)

    lo = simplex_solve(_type_lp(law, types, maximize=False))
    if lo.status == "infeasible":
        return OracleResult(False, None, monotone)
    hi = simplex_solve(_type_lp(law, types, maximize=True))

    def witness(res):
        return ResponseTypeDistribution(dict(zip(types, res.x)))

    return OracleResult(
        True, Interval(lo.value, hi.value), monotone, witness(lo), witness(hi)
    )


def oracle_compatible(law: ObservedLaw) -> bool:
    require_valid(law)
    types = response_types(law.K)
    return simplex_solve(_type_lp(law, types, maximize=False)).status != "infeasible"
