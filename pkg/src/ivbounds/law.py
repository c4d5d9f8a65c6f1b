"""Observed laws P(X, Y | Z=z) and counterfactual joints P(Y(x0), Y(x1)).

A law is either exact (every cell a ``Fraction``, built from integer counts or
``"num/den"`` strings) or floating (built from decimal probabilities). The mode
is decided at ingestion and carried through every downstream computation.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Iterable, Mapping, Union

Scalar = Union[Fraction, float]

FLOAT_TOL = 1e-9
CELLS = ((0, 0), (0, 1), (1, 0), (1, 1))


class LawError(ValueError):
    """Malformed input or a law that fails validation."""


def is_exact(values: Iterable) -> bool:
    return all(isinstance(v, Rational) for v in values)


def parse_scalar(value) -> Scalar:
    """``"3/8"`` or an int gives a Fraction; anything else is coerced to float."""
    if isinstance(value, bool):
        raise LawError(f"not a probability: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value) if "/" in value else float(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise LawError(f"not a number: {value!r}") from exc
    if isinstance(value, float):
        return value
    raise LawError(f"not a number: {value!r}")


def format_scalar(value: Scalar):
    if isinstance(value, Rational):
        value = Fraction(value)
        return f"{value.numerator}/{value.denominator}"
    return float(value)


@dataclass(frozen=True)
class ObservedLaw:
    """Conditional law of (X, Y) given each of K instrument arms.

    ``cells`` maps ``(z, x, y)`` with ``z`` in ``1..K`` to a probability.
    Probability invariants are not enforced here; see :func:`validate_law`.
    """

    K: int
    cells: Mapping[tuple, Scalar]
    arm_labels: tuple = ()

    def __post_init__(self):
        if self.K < 1:
            raise LawError("need at least one instrument arm")
        labels = tuple(self.arm_labels) or tuple(str(z) for z in range(1, self.K + 1))
        if len(labels) != self.K or len(set(labels)) != self.K:
            raise LawError(f"need {self.K} distinct arm labels, got {labels!r}")
        object.__setattr__(self, "arm_labels", labels)
        expected = {(z, x, y) for z in range(1, self.K + 1) for x, y in CELLS}
        if set(self.cells) != expected:
            raise LawError("cells must cover every (z, x, y) with z in 1..K and x, y in {0, 1}")
        object.__setattr__(self, "cells", dict(self.cells))

    def p(self, z: int, x: int, y: int) -> Scalar:
        """P(X=x, Y=y | Z=z)."""
        return self.cells[(z, x, y)]

    def px(self, z: int, x: int) -> Scalar:
        """P(X=x | Z=z)."""
        return self.cells[(z, x, 0)] + self.cells[(z, x, 1)]

    def arm(self, z: int) -> dict:
        return {(x, y): self.cells[(z, x, y)] for x, y in CELLS}

    @property
    def arms(self) -> range:
        return range(1, self.K + 1)

    @property
    def exact(self) -> bool:
        return is_exact(self.cells.values())

    @property
    def tol(self) -> Scalar:
        return Fraction(0) if self.exact else FLOAT_TOL

    def index_of(self, label: str) -> int:
        try:
            return self.arm_labels.index(label) + 1
        except ValueError:
            raise LawError(f"unknown instrument arm {label!r}") from None

    def subset(self, zs: Iterable[int]) -> "ObservedLaw":
        """Sub-law on the listed arms, re-indexed in the given order."""
        zs = list(zs)
        cells = {
            (k, x, y): self.cells[(z, x, y)] for k, z in enumerate(zs, 1) for x, y in CELLS
        }
        return ObservedLaw(len(zs), cells, tuple(self.arm_labels[z - 1] for z in zs))

    def to_float(self) -> "ObservedLaw":
        return ObservedLaw(self.K, {k: float(v) for k, v in self.cells.items()}, self.arm_labels)

    def to_exact(self) -> "ObservedLaw":
        """Exact copy; floats are read through their shortest decimal repr."""
        cells = {k: Fraction(repr(v)) if isinstance(v, float) else Fraction(v) for k, v in self.cells.items()}
        return ObservedLaw(self.K, cells, self.arm_labels)


def law_from_pmfs(pmfs: Iterable[Mapping], labels: Iterable[str] = ()) -> ObservedLaw:
    """Build a law from per-arm pmfs keyed ``(x, y)`` or ``"xy"``."""
    cells = {}
    pmfs = list(pmfs)
    for z, pmf in enumerate(pmfs, 1):
        for x, y in CELLS:
            v = pmf.get((x, y), pmf.get(f"{x}{y}", 0))
            cells[(z, x, y)] = parse_scalar(v)
    if not is_exact(cells.values()):
        cells = {k: float(v) for k, v in cells.items()}
    return ObservedLaw(len(pmfs), cells, tuple(labels))


def law_from_counts(rows: Iterable[tuple]) -> ObservedLaw:
    """Normalize ``(z_label, x, y, count)`` rows into an exact law.

    Arms are indexed by first appearance; missing cells count as zero.
    """
    totals: dict[str, dict] = {}
    for z_label, x, y, count in rows:
        if x not in (0, 1) or y not in (0, 1):
            raise LawError(f"x and y must be 0 or 1, got x={x!r}, y={y!r}")
        if not isinstance(count, int) or isinstance(count, bool):
            raise LawError(f"count must be an integer, got {count!r}")
        if count < 0:
            raise LawError(f"negative count {count} for arm {z_label!r}")
        arm = totals.setdefault(str(z_label), {c: 0 for c in CELLS})
        arm[(x, y)] += count
    if not totals:
        raise LawError("no rows")
    cells = {}
    for z, (label, arm) in enumerate(totals.items(), 1):
        n = sum(arm.values())
        if n == 0:
            raise LawError(f"empty instrument arm {label!r}")
        for c, k in arm.items():
            cells[(z, *c)] = Fraction(k, n)
    return ObservedLaw(len(totals), cells, tuple(totals))


def validate_law(law: ObservedLaw, tol: Scalar = None) -> list[str]:
    """List every violated probability invariant; empty means valid."""
    if tol is None:
        tol = law.tol
    problems = []
    for z in law.arms:
        label = law.arm_labels[z - 1]
        for (x, y), v in law.arm(z).items():
            if v < 0:
                problems.append(f"negative probability {v} at arm {label!r} cell x={x}, y={y}")
            elif v > 1:
                problems.append(f"probability {v} > 1 at arm {label!r} cell x={x}, y={y}")
        total = sum(law.arm(z).values())
        if abs(total - 1) > tol:
            problems.append(f"arm {label!r} sums to {total} (off by {total - 1})")
    return problems


def require_valid(law: ObservedLaw) -> None:
    problems = validate_law(law)
    if problems:
        raise LawError("invalid law: " + "; ".join(problems))


@dataclass(frozen=True)
class CounterfactualJoint:
    """``pi[(y, yt)] = P(Y(x0)=y, Y(x1)=yt)``."""

    pi: Mapping[tuple, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        pi = {c: self.pi.get(c, 0) for c in CELLS}
        object.__setattr__(self, "pi", pi)

    def p_y0(self, y: int) -> Scalar:
        """P(Y(x0) = y)."""
        return self.pi[(y, 0)] + self.pi[(y, 1)]

    def p_y1(self, y: int) -> Scalar:
        """P(Y(x1) = y)."""
        return self.pi[(0, y)] + self.pi[(1, y)]

    def marginal(self, i: int, y: int) -> Scalar:
        return self.p_y0(y) if i == 0 else self.p_y1(y)

    @property
    def ace(self) -> Scalar:
        return self.p_y1(1) - self.p_y0(1)

    def validate(self, tol=FLOAT_TOL) -> list[str]:
        problems = [f"negative entry at {c}" for c, v in self.pi.items() if v < 0]
        total = sum(self.pi.values())
        if abs(total - 1) > (0 if is_exact(self.pi.values()) else tol):
            problems.append(f"entries sum to {total}")
        return problems

    def to_json(self) -> dict:
        return {f"{a}{b}": format_scalar(v) for (a, b), v in self.pi.items()}

    @classmethod
    def from_json(cls, data: Mapping) -> "CounterfactualJoint":
        data = data.get("pi", data)
        pi = {}
        for key, v in data.items():
            if len(key) != 2 or not set(key) <= {"0", "1"}:
                raise LawError(f"joint keys must be '00', '01', '10', '11', got {key!r}")
            pi[(int(key[0]), int(key[1]))] = parse_scalar(v)
        if not is_exact(pi.values()):
            pi = {k: float(v) for k, v in pi.items()}
        return cls(pi)


# serialization


def law_to_json(law: ObservedLaw) -> dict:
    return {
        "arms": [
            {
                "label": law.arm_labels[z - 1],
                "pmf": {f"{x}{y}": format_scalar(v) for (x, y), v in law.arm(z).items()},
            }
            for z in law.arms
        ]
    }


def law_from_json(data: Mapping) -> ObservedLaw:
    try:
        arms = data["arms"]
        labels = [str(a["label"]) for a in arms]
        pmfs = [a["pmf"] for a in arms]
    except (KeyError, TypeError) as exc:
        raise LawError(f"law JSON needs arms[].label and arms[].pmf: {exc}") from exc
    for pmf in pmfs:
        bad = set(pmf) - {"00", "01", "10", "11"}
        if bad:
            raise LawError(f"pmf keys must be 'xy' digit pairs, got {sorted(bad)}")
    if not arms:
        raise LawError("law JSON has no arms")
    return law_from_pmfs(pmfs, labels)


def read_counts_csv(source: Union[str, Path, io.TextIOBase]) -> ObservedLaw:
    """Read a ``z,x,y,count`` CSV into an exact law."""
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_counts_csv(fh)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["z", "x", "y", "count"]:
        raise LawError(f"counts CSV header must be z,x,y,count, got {reader.fieldnames}")
    rows = []
    for lineno, rec in enumerate(reader, 2):
        rec = {k.strip(): (v or "").strip() for k, v in rec.items() if k is not None}
        try:
            rows.append((rec["z"], int(rec["x"]), int(rec["y"]), int(rec["count"])))
        except (KeyError, ValueError) as exc:
            raise LawError(f"line {lineno}: bad row {rec}") from exc
    return law_from_counts(rows)


def write_counts_csv(counts: Mapping[tuple, int]) -> str:
    """Inverse of :func:`read_counts_csv` for ``{(label, x, y): count}``."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["z", "x", "y", "count"])
    for (label, x, y), n in counts.items():
        w.writerow([label, x, y, n])
    return out.getvalue()


def read_law(path: Union[str, Path], fmt: str = None) -> ObservedLaw:
    """Load counts CSV or law JSON, by extension unless ``fmt`` is given."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "csv":
        return read_counts_csv(path)
    if fmt == "json":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise LawError(f"{path}: {exc}") from exc
        return law_from_json(data)
    raise LawError(f"unknown format {fmt!r}")
