"""Dense two-phase simplex with Bland's rule, exact or floating.

Small problems only (tens of rows, a few thousand columns at most). When every
coefficient is an ``int`` or ``Fraction`` the solve is exact: arithmetic runs on
``gmpy2.mpq`` internally and results come back as ``Fraction``. Otherwise the
tableau is in doubles and a fixed pivot tolerance is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence

import gmpy2

FLOAT_TOL = 1e-9


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class LinearProgram:
    """min/max ``objective @ x`` s.t. ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= 0``."""

    objective: Sequence
    A_eq: Sequence[Sequence] = ()
    b_eq: Sequence = ()
    A_ub: Sequence[Sequence] = ()
    b_ub: Sequence = ()
    maximize: bool = False

    @property
    def n(self) -> int:
        return len(self.objective)

    def check(self) -> None:
        if len(self.A_eq) != len(self.b_eq):
            raise DimensionError(f"A_eq has {len(self.A_eq)} rows but b_eq has {len(self.b_eq)}")
        if len(self.A_ub) != len(self.b_ub):
            raise DimensionError(f"A_ub has {len(self.A_ub)} rows but b_ub has {len(self.b_ub)}")
        for name, rows in (("A_eq", self.A_eq), ("A_ub", self.A_ub)):
            for r, row in enumerate(rows):
                if len(row) != self.n:
                    raise DimensionError(f"{name} row {r} has {len(row)} entries, expected {self.n}")

    @property
    def exact(self) -> bool:
        vals = [*self.objective, *self.b_eq, *self.b_ub]
        vals += [v for row in self.A_eq for v in row]
        vals += [v for row in self.A_ub for v in row]
        return all(isinstance(v, Rational) for v in vals)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: object = None
    x: Optional[tuple] = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    """Row-major tableau; last entry of each row is the right-hand side."""

    def __init__(self, rows, basis, zero, one, tol):
        self.rows = rows
        self.basis = basis
        self.zero = zero
        self.one = one
        self.tol = tol

    def pivot(self, r: int, c: int, cost: list) -> None:
        prow = self.rows[r]
        piv = prow[c]
        if piv != self.one:
            prow = [v / piv for v in prow]
            self.rows[r] = prow
        nz = [j for j, v in enumerate(prow) if v != 0]
        for k, row in enumerate(self.rows):
            if k == r:
                continue
            f = row[c]
            if f != 0:
                for j in nz:
                    row[j] -= f * prow[j]
        f = cost[c]
        if f != 0:
            for j in nz:
                cost[j] -= f * prow[j]
        self.basis[r] = c

    def reduced_costs(self, c_full: list) -> list:
        """``c_j - c_B B^-1 A_j`` with the negated objective value in the last slot."""
        cost = list(c_full) + [self.zero]
        for row, b in zip(self.rows, self.basis):
            f = c_full[b]
            if f != 0:
                for j, v in enumerate(row):
                    if v != 0:
                        cost[j] -= f * v
        return cost

    def optimize(self, cost: list, allowed: int) -> str:
        """Bland's rule on columns ``< allowed``; returns "optimal" or "unbounded"."""
        tol = self.tol
        while True:
            enter = -1
            for j in range(allowed):
                if cost[j] < -tol:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            best_r = -1
            best_ratio = None
            for r, row in enumerate(self.rows):
                a = row[enter]
                if a > tol:
                    ratio = row[-1] / a
                    if (
                        best_r < 0
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[r] < self.basis[best_r])
                    ):
                        best_r, best_ratio = r, ratio
            if best_r < 0:
                return "unbounded"
            self.pivot(best_r, enter, cost)


def simplex_solve(lp: LinearProgram, exact: Optional[bool] = None) -> LPResult:
    """Solve ``lp``; ``exact=None`` picks exact arithmetic iff all data are rational."""
    lp.check()
    if exact is None:
        exact = lp.exact
    conv = gmpy2.mpq if exact else float
    zero, one = conv(0), conv(1)
    tol = zero if exact else FLOAT_TOL

    n = lp.n
    m_eq, m_ub = len(lp.A_eq), len(lp.A_ub)
    m = m_eq + m_ub
    n_struct = n + m_ub  # structural + slack columns

    rows = []
    basis = []
    needs_art = []
    for r in range(m_eq):
        row = [conv(v) for v in lp.A_eq[r]] + [zero] * m_ub + [conv(lp.b_eq[r])]
        rows.append(row)
    for r in range(m_ub):
        row = [conv(v) for v in lp.A_ub[r]] + [zero] * m_ub + [conv(lp.b_ub[r])]
        row[n + r] = one
        rows.append(row)
    for r, row in enumerate(rows):
        if row[-1] < 0:
            rows[r] = row = [-v for v in row]
        if r >= m_eq and row[n + (r - m_eq)] == one:
            basis.append(n + (r - m_eq))
            needs_art.append(False)
        else:
            basis.append(-1)
            needs_art.append(True)

    arts = [r for r in range(m) if needs_art[r]]
    n_art = len(arts)
    width = n_struct + n_art
    for r, row in enumerate(rows):
        rhs = row.pop()
        row.extend([zero] * n_art)
        row.append(rhs)
    for a, r in enumerate(arts):
        rows[r][n_struct + a] = one
        basis[r] = n_struct + a

    tab = _Tableau(rows, basis, zero, one, tol)

    if n_art:
        c1 = [zero] * n_struct + [one] * n_art
        cost = tab.reduced_costs(c1)
        tab.optimize(cost, width)
        if -cost[-1] > tol:
            return LPResult("infeasible")
        # drive remaining artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= n_struct:
                row = tab.rows[r]
                col = next((j for j in range(n_struct) if abs(row[j]) > tol), -1)
                if col < 0:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, col, [zero] * (width + 1))
            r += 1
        for k, row in enumerate(tab.rows):
            rhs = row[-1]
            del row[n_struct:]
            row.append(rhs)

    sign = -1 if lp.maximize else 1
    c2 = [conv(v) * sign for v in lp.objective] + [zero] * m_ub
    cost = tab.reduced_costs(c2)
    status = tab.optimize(cost, n_struct)
    if status == "unbounded":
        return LPResult("unbounded")

    x = [zero] * n_struct
    for row, b in zip(tab.rows, tab.basis):
        x[b] = row[-1]
    x = x[:n]
    value = sum((conv(c) * v for c, v in zip(lp.objective, x)), zero)
    if exact:
        x = tuple(Fraction(int(v.numerator), int(v.denominator)) for v in x)
        value = Fraction(int(value.numerator), int(value.denominator))
    else:
        x = tuple(float(v) for v in x)
        value = float(value)
    return LPResult("optimal", value, x)
