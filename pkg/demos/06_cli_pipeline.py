"""The full command-line pipeline: synth -> analyze -> report.

Each step prints the equivalent shell command before running it through
the same entry point the `voipqos` console script uses, so the demo
doubles as CLI documentation.

Run:  python3 demos/06_cli_pipeline.py
"""

import json
import shlex
import tempfile
from pathlib import Path

from voipqos.cli import entrypoint


def run(argv) -> None:
    print(f"$ voipqos {shlex.join(argv)}")
    rc = entrypoint(argv)
    assert rc == 0, f"exit code {rc}"
    print()


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp_str:
        tmp = Path(tmp_str)
        for tag, call_id, seed, loss in (("wired", "wired-1", 1, 0.005),
                                         ("wifi", "wifi-1", 2, 0.03)):
            scn = tmp / f"{call_id}.json"
            scn.write_text(json.dumps({
                "codec": "G711-A",
                "duration": 20.0,
                "interval": 0.02,
                "seed": seed,
                "loss_probability": loss,
                "jitter_model": {"xi": -0.13, "sigma": 1.8, "mu": 7.3},
                "rtt_model": {"xi": 0.21, "sigma": 12.1, "mu": 123.9},
                "xr_interval": 0.5,
                "scenario_tag": tag,
                "call_id": call_id,
            }, indent=2))
            cap = tmp / f"{call_id}.pcap"
            run(["synth", "--scenario", str(scn), "--out", str(cap)])
            run(["analyze", "--input", str(cap), "--out", str(tmp / "out"),
                 "--scenario", tag, "--candidates", "GEV,Gumbel,Normal"])

        merged_path = tmp / "comparison.json"
        run(["report", "--input", str(tmp / "out"),
             "--out", str(merged_path)])

        merged = json.loads(merged_path.read_text())
        print("scenario comparison:")
        for tag, agg in sorted(merged["by_scenario"].items()):
            print(f"  {tag:<6} loss={agg['mean_loss_pct']:.2f}%  "
                  f"jitter={agg['mean_jitter_ms']:.2f}ms  "
                  f"rtt={agg['mean_rtt_ms']:.1f}ms")
        for row in merged["sessions"]:
            print(f"  session {row['id']}: rtt tail shape "
                  f"xi={row['rtt_xi']:+.3f} (heavy when positive)")


if __name__ == "__main__":
    main()
