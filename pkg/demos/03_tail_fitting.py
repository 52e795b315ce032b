"""Fit the extreme-value model and read the tail it found.

Jitter-like data has a finite upper bound (negative shape); round-trip
delays have a heavy upper tail (positive shape).  The fit reports both
the parameters and the regime caveats that apply to them.

Run:  python3 demos/03_tail_fitting.py
"""

from voipqos.evt import GevParams, fit_gev_mle, gev_quantile, gev_sample

CASES = [
    ("access-network jitter (ms)", GevParams(xi=-0.32, sigma=2.46, mu=6.85)),
    ("end-to-end delay (ms)", GevParams(xi=0.21, sigma=12.07, mu=123.95)),
    ("congested-path delay (ms)", GevParams(xi=1.58, sigma=21.01, mu=139.01)),
]


def main() -> None:
    for label, truth in CASES:
        data = gev_sample(truth, 10_000, seed=3)
        fit = fit_gev_mle(data)
        p = fit.params
        print(f"{label}:")
        print(f"  truth   xi={truth.xi:+.3f} sigma={truth.sigma:7.3f} "
              f"mu={truth.mu:8.3f}")
        print(f"  fitted  xi={p.xi:+.3f} sigma={p.sigma:7.3f} "
              f"mu={p.mu:8.3f}   ({fit.iterations} iterations)")
        print(f"  tail    {fit.tail.value} / regime {fit.regime.value}, "
              f"KS distance {fit.e_max:.4f}")
        if p.xi < 0:
            bound = p.mu - p.sigma / p.xi
            print(f"  the fitted tail is bounded: values cannot exceed "
                  f"{bound:.1f}")
        else:
            p999 = float(gev_quantile(p, 0.999))
            print(f"  the fitted tail is unbounded: 99.9th percentile "
                  f"{p999:.1f}")
        for note in fit.notes():
            print(f"  note: {note}")
        print()


if __name__ == "__main__":
    main()
