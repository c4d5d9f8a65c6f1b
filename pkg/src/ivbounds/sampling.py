"""Random laws for property tests and experiment scripts.

Compatible laws come from forward-simulating a random response-type
distribution, so they are IV-compatible by construction. Corrupted laws mix a
compatible law with a conflicting pattern and may or may not stay compatible;
callers decide ground truth with the oracle.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .law import CELLS, ObservedLaw
from .oracle import ResponseTypeDistribution, implied_law, response_types


def random_distribution(
    rng: random.Random,
    K: int,
    monotone: bool = False,
    exact: bool = True,
    sparsity: float = 0.5,
    max_weight: int = 20,
) -> ResponseTypeDistribution:
    """Sparse Dirichlet-like weights over types; exact weights have small denominators."""
    types = response_types(K, monotone)
    while True:
        raw = [0 if rng.random() < sparsity else rng.randint(1, max_weight) for _ in types]
        total = sum(raw)
        if total:
            break
    ws = [Fraction(r, total) for r in raw] if exact else [r / total for r in raw]
    return ResponseTypeDistribution(dict(zip(types, ws)))


def random_compatible_law(rng: random.Random, K: int, monotone: bool = False, exact: bool = True) -> ObservedLaw:
    return implied_law(random_distribution(rng, K, monotone, exact))


def random_pmf(rng: random.Random, sparsity: float = 0.4, max_weight: int = 10) -> dict:
    raw = [0 if rng.random() < sparsity else rng.randint(1, max_weight) for _ in CELLS]
    if not any(raw):
        raw[rng.randrange(4)] = 1
    return {c: Fraction(r, sum(raw)) for c, r in zip(CELLS, raw)}


def random_arbitrary_law(rng: random.Random, K: int) -> ObservedLaw:
    """Independent random pmf per arm; often incompatible for K >= 2."""
    cells = {}
    for z in range(1, K + 1):
        for (x, y), v in random_pmf(rng).items():
            cells[(z, x, y)] = v
    return ObservedLaw(K, cells)


def corrupt(law: ObservedLaw, rng: random.Random) -> ObservedLaw:
    """Pull two arms toward point masses that disagree about the same stratum.

    Arm ``z`` moves toward (x, y) and arm ``zt`` toward (x, 1-y); with enough
    weight no single Y(x) can explain both.
    """
    K = law.K
    if K < 2:
        return law
    z, zt = rng.sample(range(1, K + 1), 2)
    x, y = rng.randint(0, 1), rng.randint(0, 1)
    w = Fraction(rng.randint(3, 10), 10)
    cells = dict(law.cells)
    for arm, target in ((z, (x, y)), (zt, (x, 1 - y))):
        for c in CELLS:
            cells[(arm, *c)] = (1 - w) * cells[(arm, *c)] + (w if c == target else 0)
    return ObservedLaw(K, cells, law.arm_labels)
