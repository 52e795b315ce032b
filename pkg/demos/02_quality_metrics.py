"""Compute the per-call quality metrics from a decoded session.

Covers the full metric set: jitter and its moving deviation, bandwidth,
packet loss, round-trip time, R-factor, signal level, and the two SIP
delays (call setup, session disconnect).

Run:  python3 demos/02_quality_metrics.py
"""

import statistics

from voipqos.cli import load_scenario
from voipqos.cli.synth import generate_records
from voipqos.ingest import assemble_sessions
from voipqos.metrics import (
    bandwidth_series,
    jitter_series,
    loss_summary,
    moving_std,
    r_factor,
    rtt_series,
    sip_delays,
    xr_metric_series,
)

SCENARIO = {
    "codec": "G711-A",
    "duration": 30.0,
    "interval": 0.02,
    "seed": 22,
    "loss_probability": 0.015,
    "jitter_model": {"xi": -0.13, "sigma": 1.8, "mu": 7.3},
    "rtt_model": {"xi": 0.21, "sigma": 12.1, "mu": 123.9},
    "xr_interval": 0.25,
    "call_id": "metrics-demo",
}


def describe(series, digits=2):
    vals = series.values()
    return (f"n={len(vals):4d}  mean={statistics.fmean(vals):8.{digits}f}  "
            f"max={max(vals):8.{digits}f} {series.unit}")


def main() -> None:
    records = generate_records(load_scenario(SCENARIO))
    session = assemble_sessions(records).sessions[0]
    stream = session.rtp_fwd

    jitter = jitter_series(stream, clock_rate=session.clock_rate)
    sigma_j = moving_std(jitter, window=1.0)
    bandwidth = bandwidth_series(stream, window=1.0)
    print("media plane:")
    print(f"  jitter     {describe(jitter)}")
    print(f"  sigma_j    {describe(sigma_j)}   (1s moving deviation)")
    print(f"  bandwidth  {describe(bandwidth)}  (payload+RTP+IP/UDP)")

    loss = loss_summary(stream)
    print(f"  loss       {loss.received}/{loss.expected} received "
          f"-> {loss.loss_pct:.2f}% lost (sequence-number based)")

    rtt = rtt_series(session.xr_blocks)
    rf = xr_metric_series(session.xr_blocks, "r_factor")
    sl = xr_metric_series(session.xr_blocks, "signal_level")
    print("\nreported by the far end (RTCP-XR):")
    print(f"  rtt          {describe(rtt)}")
    print(f"  r_factor     {describe(rf, digits=0)}")
    print(f"  signal       {describe(sl, digits=0)}")
    print(f"  sigma_sl     {describe(moving_std(sl, window=1.0))}")

    # E-model combination for captures without XR: start from the default
    # transmission rating and subtract the impairment terms
    computed = r_factor(93.2, is_=1.4, id_=7.1, ieff=2.0 * loss.loss_pct, a=0.0)
    print(f"  r (E-model)  {computed:.1f} (computed from impairments)")

    d = sip_delays(session.sip_dialog)
    print("\nsignalling plane:")
    print(f"  call setup delay      {d.csd:.4f} s  (INVITE -> 180 Ringing)")
    print(f"  session disconnect    {d.sdd:.4f} s  (BYE -> 200 OK)")


if __name__ == "__main__":
    main()
