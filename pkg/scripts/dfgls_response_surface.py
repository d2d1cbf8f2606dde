"""Simulate DF-GLS (lag 0) quantiles and fit cv(T) = b0 + b1/T + b2/T**2 + b3/T**3.

Writes the coefficient table that ``cumbreak.econometrics.tables.DFGLS_SURFACE``
embeds. ``T`` is the length of the tested series. Run:

    python scripts/dfgls_response_surface.py --reps 200000
"""
import argparse

import numpy as np

SIZES = (20, 25, 30, 40, 50, 60, 80, 100, 150, 200, 300, 500, 1000, 2000)
QUANTILES = (0.01, 0.05, 0.10)
CBAR = {"constant": -7.0, "constant_and_trend": -13.5}


def simulate(trend, T, reps, rng, chunk=20000):
    out = []
    alpha = 1.0 + CBAR[trend] / T
    if trend == "constant":
        z = np.ones((T, 1))
    else:
        z = np.column_stack((np.ones(T), np.arange(1.0, T + 1)))
    zq = np.vstack((z[:1], z[1:] - alpha * z[:-1]))
    proj = np.linalg.solve(zq.T @ zq, zq.T)
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        y = np.cumsum(rng.standard_normal((m, T)), axis=1)
        yq = np.concatenate((y[:, :1], y[:, 1:] - alpha * y[:, :-1]), axis=1)
        beta = yq @ proj.T
        yd = y - beta @ z.T
        lag = yd[:, :-1]
        dy = np.diff(yd, axis=1)
        sxx = np.einsum("ij,ij->i", lag, lag)
        rho = np.einsum("ij,ij->i", lag, dy) / sxx
        resid = dy - rho[:, None] * lag
        s2 = np.einsum("ij,ij->i", resid, resid) / (T - 2)
        out.append(rho / np.sqrt(s2 / sxx))
        done += m
    return np.concatenate(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=200000)
    ap.add_argument("--seed", type=int, default=19960701)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    for trend in CBAR:
        q = np.array([np.quantile(simulate(trend, T, args.reps, rng), QUANTILES) for T in SIZES])
        inv = 1.0 / np.array(SIZES, dtype=float)
        X = np.column_stack((np.ones_like(inv), inv, inv**2, inv**3))
        # weight by sqrt(T): larger samples have less finite-sample curvature noise
        w = np.sqrt(np.array(SIZES, dtype=float))
        print(f'    "{trend}": (')
        for j, level in enumerate(("1%", "5%", "10%")):
            coef = np.linalg.lstsq(X * w[:, None], q[:, j] * w, rcond=None)[0]
            print("        (" + ", ".join(f"{c:.5f}" for c in coef) + f"),  # {level}")
        print("    ),")


if __name__ == "__main__":
    main()
