"""Regenerate the bundled case-study fixture (estimates.csv).

The fixture mimics a survival-model simulation study: 3 methods
(1 = exponential, 2 = Weibull, 3 = Cox) x 2 data-generating mechanisms x
1600 repetitions, with true log hazard ratio -0.50. Per-stratum summary
statistics (mean estimate, SD, root-mean-square SE, coverage count at the
nominal 95% level) are calibrated to fixed targets, so the expected
4-digit performance table is known exactly in advance; the script asserts
that before writing.

Deterministic: a fixed seed and exact standardization, so the emitted CSV
is byte-stable across runs.

Usage: python tests/data/make_estimates.py [out.csv]
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

TRUTH = -0.5
N_REPS = 1600
Z975 = 1.9599639845400536  # normal 97.5% quantile

# (dgm, method) -> (bias, empirical SD, RMS of SEs, covering repetitions)
TARGETS = {
    ("1", "1"): (0.0002, 0.1488, 0.1490, 1523),
    ("1", "2"): (0.0011, 0.1511, 0.1500, 1518),
    ("1", "3"): (0.0014, 0.1509, 0.1501, 1520),
    ("2", "1"): (0.0494, 0.1381, 0.1539, 1536),
    ("2", "2"): (0.0048, 0.1516, 0.1541, 1529),
    ("2", "3"): (0.0062, 0.1511, 0.1542, 1532),
}

# Target MCSE of the model SE is 0.0001, which pins sd(SE^2):
# sd(SE^2) = mcse * 2 * sqrt(n) * modse.
MODSE_MCSE = 0.0001


def _standardized(values: np.ndarray) -> np.ndarray:
    return (values - values.mean()) / values.std(ddof=1)


def _covers(est: np.ndarray, se: np.ndarray) -> np.ndarray:
    # Same float arithmetic as the analysis pipeline's normal intervals.
    lo = est - Z975 * se
    hi = est + Z975 * se
    return (lo <= TRUTH) & (TRUTH <= hi)


def _adjust_coverage(est: np.ndarray, q: np.ndarray, k_target: int) -> np.ndarray:
    """Transfer squared-SE mass between repetitions until exactly k_target
    intervals cover the truth. Pairwise transfers keep sum(q) unchanged, so
    the model SE is untouched; flips happen at the coverage boundary, so the
    spread of q moves little."""
    margin = 1e-3
    dev = np.abs(est - TRUTH)
    for _ in range(200):
        se = np.sqrt(q)
        covers = _covers(est, se)
        k = int(covers.sum())
        if k == k_target:
            return q
        z = dev / se
        if k < k_target:
            # grow the closest non-covering interval; shrink the slackest cover
            i = int(np.where(covers, np.inf, z).argmin())
            need = (dev[i] * (1.0 + margin) / Z975) ** 2 - q[i]
            floors = (dev * (1.0 + margin) / Z975) ** 2
            avail = np.where(covers, q - floors, -np.inf)
            j = int(avail.argmax())
            assert avail[j] > need > 0.0
            q[i] += need
            q[j] -= need
        else:
            # shrink the cover closest to the boundary; grow the most
            # significant miss (it stays a miss)
            i = int(np.where(covers, z, -np.inf).argmax())
            release = q[i] - (dev[i] * (1.0 - margin) / Z975) ** 2
            head = np.where(~covers, (dev * (1.0 - margin) / Z975) ** 2 - q, -np.inf)
            j = int(head.argmax())
            assert head[j] > release > 0.0
            q[i] -= release
            q[j] += release
    raise AssertionError("coverage adjustment did not converge")


def build() -> list[tuple[str, str, str, float, float]]:
    rng = np.random.default_rng(20240817)
    rows = []
    for dgm in ("1", "2"):
        shock = rng.standard_normal(N_REPS)
        eps_shared = rng.standard_normal(N_REPS)
        for method in ("1", "2", "3"):
            bias_t, empse_t, modse_t, k_t = TARGETS[(dgm, method)]
            # method 1 (misspecified under dgm 2) decorrelates from 2 and 3
            if method == "1":
                rho, eps = (0.72 if dgm == "2" else 0.90), rng.standard_normal(N_REPS)
            else:
                own = rng.standard_normal(N_REPS)
                eps = 0.93 * eps_shared + np.sqrt(1.0 - 0.93**2) * own
                rho = 0.92
            raw = rho * shock + np.sqrt(1.0 - rho * rho) * eps
            est = (TRUTH + bias_t) + empse_t * _standardized(raw)

            sd_q = MODSE_MCSE * 2.0 * np.sqrt(N_REPS) * modse_t
            q = modse_t**2 + sd_q * _standardized(rng.standard_normal(N_REPS))
            assert q.min() > 0.0
            q = _adjust_coverage(est, q, k_t)
            se = np.sqrt(q)

            for rep in range(N_REPS):
                rows.append((str(rep + 1), dgm, method,
                             float(est[rep]), float(se[rep])))
    return rows


def verify(rows) -> None:
    """Recompute every calibrated summary and compare with the targets."""
    from collections import defaultdict

    by_stratum = defaultdict(list)
    for rep, dgm, method, b, se in rows:
        by_stratum[(dgm, method)].append((b, se))
    for (dgm, method), pairs in by_stratum.items():
        bias_t, empse_t, modse_t, k_t = TARGETS[(dgm, method)]
        est = np.array([p[0] for p in pairs])
        se = np.array([p[1] for p in pairs])
        assert len(est) == N_REPS
        assert abs((est.mean() - TRUTH) - bias_t) < 1e-12
        assert abs(est.std(ddof=1) - empse_t) < 1e-12
        assert abs(np.sqrt(np.mean(se**2)) - modse_t) < 1e-12
        assert int(_covers(est, se).sum()) == k_t
        mcse_modse = np.sqrt(np.var(se**2, ddof=1) / (4 * N_REPS * np.mean(se**2)))
        assert 0.00006 < mcse_modse < 0.00014, mcse_modse


def main(out_path: str) -> None:
    rows = build()
    verify(rows)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dataset", "dgm", "model", "b", "se"])
        for rep, dgm, method, b, se in rows:
            writer.writerow([rep, dgm, method, repr(b), repr(se)])
    print(f"wrote {len(rows)} rows to {out_path}")


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else str(
        Path(__file__).with_name("estimates.csv"))
    main(target)
