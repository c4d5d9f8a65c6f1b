"""Sweep delta and report how far interval averages sit from the static equilibrium."""

import argparse
import json

from ivbounds.equilibrium import MarketConfig, equilibrium_point, simulate_interval, stability


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", help="market JSON, e.g. data/market_reference.json")
    ap.add_argument("--deltas", default="1e-1,5e-2,1e-2,5e-3,1e-3,5e-4,1e-4")
    args = ap.parse_args()
    with open(args.config, encoding="utf-8") as fh:
        base = MarketConfig.from_json(json.load(fh))
    p_star, _ = equilibrium_point(base)
    st = stability(base)
    print(f"p* = {p_star:g}, contraction {st.contraction:g}, spectral radius {st.spectral_radius:.4g}")
    print(f"{'delta':>8} {'|p_bar-p*|':>12} {'/delta':>8} {'|qd-qs|':>12} {'/delta':>8}")
    for d in map(float, args.deltas.split(",")):
        avg = simulate_interval(base.replace(delta=d))
        ep, eq = abs(avg.p_bar - p_star), abs(avg.q_d_bar - avg.q_s_bar)
        print(f"{d:8.0e} {ep:12.4e} {ep / d:8.3f} {eq:12.4e} {eq / d:8.3f}")


if __name__ == "__main__":
    main()
