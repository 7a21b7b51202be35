"""How often AIC puts the true AR(2) order in the top 3 of a p<=4, q<=2 grid.

Optionally cross-checks every AIC against statsmodels (slow).
"""
import argparse

import numpy as np

from rollcast import selection
from rollcast.sarimax import ModelOrder, SarimaxParams, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--n", type=int, default=1500)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--check", action="store_true", help="compare AIC with statsmodels")
    args = ap.parse_args()

    truth = ModelOrder(2, 0, 0)
    spec = selection.GridSpec(range(5), range(3), d=0)
    top1 = top3 = 0
    worst_gap = 0.0
    for seed in range(args.seeds):
        y = simulate(args.n, truth, params=SarimaxParams(phi=[0.75, -0.25]), rng=np.random.default_rng(seed))
        ranked = selection.grid_search(y, spec, jobs=args.jobs)
        orders = [c.order for c in ranked]
        top1 += orders[0] == truth
        top3 += truth in orders[:3]
        if args.check:
            from statsmodels.tsa.arima.model import ARIMA
            ref = ARIMA(y, order=tuple(truth)).fit().aic
            ours = next(c.aic for c in ranked if c.order == truth)
            worst_gap = max(worst_gap, abs(ref - ours))
        print(f"seed {seed:3d}  rank of truth {orders.index(truth) + 1:2d}  best {tuple(orders[0])}")
    print(f"top-1 {top1}/{args.seeds}  top-3 {top3}/{args.seeds}")
    if args.check:
        print(f"max |AIC - statsmodels| at the true order: {worst_gap:.2e}")


if __name__ == "__main__":
    main()
