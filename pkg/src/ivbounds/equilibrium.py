"""Consumers / Suppliers / Merchants difference equations and their time averages.

Within a unit interval of length one, split into ``1/delta`` steps, with
disturbances held fixed::

    q_d[k+1] = alpha_d + beta_d * p[k] + eps_d
    q_s[k+1] = alpha_s + beta_s * p[k] + eps_s
    p[k+1]   = p[k] + lam * (q_d[k] - q_s[k])

Everything is in log price and log quantity. The observed variables are
left-endpoint averages of the trajectory over the interval. When the intra-interval
process settles quickly, those averages satisfy the static demand and supply
equations with Q^d = Q^s.

Substituting the lagged quantities gives the second-order price recursion
``p[k+1] = p[k] + m p[k-1] + c`` with ``m = lam * (beta_d - beta_s)``. It settles
iff both roots of ``r**2 - r - m`` lie inside the unit circle, i.e. ``-1 < m < 0``.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Mapping, NamedTuple, Optional, Union

import numpy as np

DIVERGENCE_BOUND = 1e12


class MarketError(ValueError):
    pass


class DivergedError(MarketError):
    pass


class UnstableMarketError(MarketError):
    pass


@dataclass(frozen=True)
class MarketConfig:
    alpha_d: float
    beta_d: float
    alpha_s: float
    beta_s: float
    lam: float
    delta: float = 1e-3
    p_init: float = 0.0

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise MarketError(f"delta must lie in (0, 1], got {self.delta}")
        n = round(1 / self.delta)
        if abs(n * self.delta - 1) > 1e-9:
            raise MarketError(f"1/delta must be an integer, got delta={self.delta}")
        for name, v in asdict(self).items():
            if not math.isfinite(v):
                raise MarketError(f"{name} must be finite, got {v}")

    @property
    def n_steps(self) -> int:
        return round(1 / self.delta)

    def demand(self, p: float, eps_d: float = 0.0) -> float:
        return self.alpha_d + self.beta_d * p + eps_d

    def supply(self, p: float, eps_s: float = 0.0) -> float:
        return self.alpha_s + self.beta_s * p + eps_s

    def replace(self, **kw) -> "MarketConfig":
        return MarketConfig(**{**asdict(self), **kw})

    def to_json(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_json(cls, data: Mapping) -> "MarketConfig":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        required = {"alpha_d", "beta_d", "alpha_s", "beta_s", "lam"}
        missing = required - set(data)
        unknown = set(data) - required - {"delta", "p_init"}
        if missing or unknown:
            raise MarketError(f"bad market config: missing {sorted(missing)}, unknown {sorted(unknown)}")
        try:
            return cls(**{k: float(v) for k, v in data.items()})
        except (TypeError, ValueError) as exc:
            raise MarketError(f"bad market config: {exc}") from exc


@dataclass(frozen=True)
class MarketState:
    k: int
    p: float
    q_d: float
    q_s: float

    @property
    def excess_demand(self) -> float:
        return self.q_d - self.q_s


def initial_state(cfg: MarketConfig, eps_d: float = 0.0, eps_s: float = 0.0, p: Optional[float] = None) -> MarketState:
    """Price ``p`` (default ``cfg.p_init``) with quantities on its demand and supply lines."""
    p = cfg.p_init if p is None else p
    return MarketState(0, p, cfg.demand(p, eps_d), cfg.supply(p, eps_s))


def step(state: MarketState, cfg: MarketConfig, eps_d: float = 0.0, eps_s: float = 0.0) -> MarketState:
    """Advance one sub-step of length delta."""
    if not all(math.isfinite(v) for v in (state.p, state.q_d, state.q_s)):
        raise DivergedError(f"diverged at step {state.k}: {state}")
    return MarketState(
        state.k + 1,
        state.p + cfg.lam * (state.q_d - state.q_s),
        cfg.demand(state.p, eps_d),
        cfg.supply(state.p, eps_s),
    )


def equilibrium_point(cfg: MarketConfig, eps_d: float = 0.0, eps_s: float = 0.0) -> tuple[float, float]:
    """Price and quantity that clear the market."""
    if cfg.beta_d == cfg.beta_s:
        raise MarketError("no unique equilibrium: demand and supply slopes are equal")
    p = (cfg.alpha_s - cfg.alpha_d + eps_s - eps_d) / (cfg.beta_d - cfg.beta_s)
    return p, cfg.demand(p, eps_d)


class Stability(NamedTuple):
    contraction: float
    spectral_radius: float
    stable: bool


def stability(cfg: MarketConfig) -> Stability:
    """Settling verdict for the lagged price recursion.

    ``contraction`` is ``|1 + lam (beta_d - beta_s)|``, the one-step factor of the
    price map when quantities respond instantly. The verdict uses the spectral
    radius of the lagged recursion, which is what the simulation actually runs.
    The two agree whenever ``contraction >= 1`` (both unstable).
    """
    m = cfg.lam * (cfg.beta_d - cfg.beta_s)
    disc = cmath.sqrt(1 + 4 * m)
    radius = max(abs((1 + disc) / 2), abs((1 - disc) / 2))
    return Stability(abs(1 + m), radius, radius < 1)


@dataclass(frozen=True)
class IntervalAverages:
    q_d_bar: float
    q_s_bar: float
    p_bar: float
    converged: bool
    contraction: float
    spectral_radius: float
    end_state: Optional[MarketState] = None
    diverged: bool = False

    @property
    def residual(self) -> float:
        """Excess demand at the end of the interval."""
        return self.end_state.excess_demand if self.end_state else math.nan


def simulate_interval(
    cfg: MarketConfig,
    eps_d: float = 0.0,
    eps_s: float = 0.0,
    p_init: Optional[float] = None,
    tol: float = 1e-9,
) -> IntervalAverages:
    """Run ``1/delta`` steps and average the trajectory (left endpoints)."""
    stab = stability(cfg)
    start = initial_state(cfg, eps_d, eps_s, p_init)
    p, q_d, q_s = start.p, start.q_d, start.q_s
    # same recursion as step(), unrolled for speed
    a_d, b_d = cfg.alpha_d, cfg.beta_d
    a_s, b_s = cfg.alpha_s, cfg.beta_s
    lam = cfg.lam
    n = cfg.n_steps
    sp = sd = ss = 0.0
    for k in range(n):
        sp += p
        sd += q_d
        ss += q_s
        p, q_d, q_s = p + lam * (q_d - q_s), a_d + b_d * p + eps_d, a_s + b_s * p + eps_s
        if abs(p) > DIVERGENCE_BOUND or abs(q_d) > DIVERGENCE_BOUND or abs(q_s) > DIVERGENCE_BOUND:
            nan = math.nan
            end = MarketState(k + 1, p, q_d, q_s)
            return IntervalAverages(nan, nan, nan, False, stab.contraction, stab.spectral_radius, end, True)
    end = MarketState(n, p, q_d, q_s)
    d = cfg.delta
    converged = stab.stable and abs(end.excess_demand) < tol
    return IntervalAverages(sd * d, ss * d, sp * d, converged, stab.contraction, stab.spectral_radius, end)


class PanelRow(NamedTuple):
    t: int
    p_bar: float
    q_bar: float
    eps_d: float
    eps_s: float


def run_panel(
    cfg: MarketConfig,
    T: int,
    noise_sd_d: float = 1.0,
    noise_sd_s: float = 1.0,
    seed: Union[int, np.random.Generator] = 0,
    carry_price: bool = True,
) -> list[PanelRow]:
    """Simulate ``T`` unit intervals with fresh Gaussian disturbances in each.

    Each interval starts from the previous interval's final price unless
    ``carry_price`` is off, in which case every interval starts at ``cfg.p_init``.
    """
    if T < 1:
        raise MarketError("T must be at least 1")
    if not stability(cfg).stable:
        raise UnstableMarketError("will not equilibrate within the unit interval")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rows = []
    p = cfg.p_init
    for t in range(1, T + 1):
        eps_d = float(rng.normal(0.0, noise_sd_d)) if noise_sd_d > 0 else 0.0
        eps_s = float(rng.normal(0.0, noise_sd_s)) if noise_sd_s > 0 else 0.0
        avg = simulate_interval(cfg, eps_d, eps_s, p_init=p if carry_price else None)
        rows.append(PanelRow(t, avg.p_bar, avg.q_d_bar, eps_d, eps_s))
        if carry_price:
            p = avg.end_state.p
    return rows


def panel_to_csv(rows: list[PanelRow]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(PanelRow._fields)
    for r in rows:
        w.writerow([r.t, repr(r.p_bar), repr(r.q_bar), repr(r.eps_d), repr(r.eps_s)])
    return out.getvalue()


def structural_residuals(cfg: MarketConfig, row: PanelRow) -> tuple[float, float]:
    """Demand and supply equation residuals of a panel row, given its true disturbances."""
    return (
        row.q_bar - cfg.demand(row.p_bar, row.eps_d),
        row.q_bar - cfg.supply(row.p_bar, row.eps_s),
    )
