"""End-to-end tests for the command line: synth -> analyze -> report.

Everything runs through entrypoint() so exit codes and stderr diagnostics
are exercised exactly as a shell user would see them.
"""

import json
import math
from pathlib import Path

import jsonschema
import pytest

from voipqos.cli import entrypoint, load_scenario, synth_to_file
from voipqos.errors import BadSpec, VoipQosError
from voipqos.evt import GevParams, gev_sample
from voipqos.ingest import parse_pcap, write_jsonl, write_pcap

from .gev_models import JITTER_MODELS, RTT_MODELS

SCHEMA = json.loads(
    (Path(__file__).parent.parent / "src" / "voipqos" / "schemas"
     / "session_report.schema.json").read_text()
)


def base_scenario(**overrides):
    spec = {
        "codec": "G711-A",
        "duration": 10.0,
        "interval": 0.02,
        "seed": 7,
        "loss_probability": 0.01,
        "jitter_model": {"xi": -0.125761, "sigma": 1.84636, "mu": 7.27644},
        "rtt_model": {"xi": 0.2077, "sigma": 12.0708, "mu": 123.9454},
        "xr_interval": 0.5,
        "scenario_tag": "lab",
        "call_id": "call-1",
    }
    spec.update(overrides)
    return spec


def write_scenario(tmp_path, name="scn.json", **overrides):
    path = tmp_path / name
    path.write_text(json.dumps(base_scenario(**overrides)))
    return path


class TestSynth:
    def test_writes_pcap_by_extension(self, tmp_path, capsys):
        scn = write_scenario(tmp_path)
        out = tmp_path / "cap.pcap"
        assert entrypoint(["synth", "--scenario", str(scn), "--out", str(out)]) == 0
        data = out.read_bytes()
        assert data[:4] == bytes.fromhex("d4c3b2a1")
        assert "records" in capsys.readouterr().out

    def test_writes_jsonl_by_extension(self, tmp_path):
        scn = write_scenario(tmp_path)
        out = tmp_path / "cap.jsonl"
        assert entrypoint(["synth", "--scenario", str(scn), "--out", str(out)]) == 0
        first = json.loads(out.read_text().splitlines()[0])
        assert {"ts", "src", "sport", "dst", "dport", "proto", "payload_hex"} \
            <= set(first)

    def test_deterministic_bytes_for_same_seed(self, tmp_path):
        scn = write_scenario(tmp_path)
        a, b = tmp_path / "a.pcap", tmp_path / "b.pcap"
        entrypoint(["synth", "--scenario", str(scn), "--out", str(a)])
        entrypoint(["synth", "--scenario", str(scn), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_seed_flag_overrides_scenario(self, tmp_path):
        scn = write_scenario(tmp_path)
        a, b = tmp_path / "a.pcap", tmp_path / "b.pcap"
        entrypoint(["synth", "--scenario", str(scn), "--out", str(a)])
        entrypoint(["synth", "--scenario", str(scn), "--out", str(b),
                    "--seed", "99"])
        assert a.read_bytes() != b.read_bytes()

    def test_record_budget(self, tmp_path):
        # 10 s / 20 ms = 500 RTP slots at 1% loss, 20 XR blocks, 5 SIP messages
        scn = write_scenario(tmp_path)
        out = tmp_path / "cap.pcap"
        entrypoint(["synth", "--scenario", str(scn), "--out", str(out)])
        records = parse_pcap(out.read_bytes())
        assert 500 + 20 + 5 - 15 <= len(records) <= 525

    def test_unknown_codec_rejected(self, tmp_path, capsys):
        scn = write_scenario(tmp_path, codec="PCMA")
        rc = entrypoint(["synth", "--scenario", str(scn),
                         "--out", str(tmp_path / "x.pcap")])
        assert rc == 1
        assert "PCMA" in capsys.readouterr().err

    def test_unknown_key_rejected(self, tmp_path, capsys):
        scn = write_scenario(tmp_path, bogus=1)
        rc = entrypoint(["synth", "--scenario", str(scn),
                         "--out", str(tmp_path / "x.pcap")])
        assert rc == 1
        assert "bogus" in capsys.readouterr().err

    def test_load_scenario_validates(self, tmp_path):
        with pytest.raises(BadSpec):
            load_scenario(base_scenario(duration=-1.0))
        with pytest.raises(BadSpec):
            load_scenario(base_scenario(loss_probability=1.5))
        with pytest.raises(BadSpec):
            load_scenario(base_scenario(jitter_model={"xi": 0.1}))
        with pytest.raises(BadSpec):
            load_scenario({"codec": "G711-A"})

    def test_vbr_codec_needs_payload_bytes(self, tmp_path):
        # variable-bitrate codec: packet size and payload type must be given
        bare = load_scenario(base_scenario(codec="OPUS", interval=0.02))
        with pytest.raises(BadSpec):
            bare.resolved_payload_bytes()
        with pytest.raises(BadSpec):
            bare.resolved_payload_type()
        rc = entrypoint(["synth", "--scenario", str(write_scenario(
            tmp_path, codec="OPUS")), "--out", str(tmp_path / "x.pcap")])
        assert rc == 1
        spec = load_scenario(base_scenario(codec="OPUS", interval=0.02,
                                           payload_bytes=80,
                                           payload_type=111))
        assert spec.resolved_payload_bytes() == 80
        assert spec.resolved_payload_type() == 111


@pytest.fixture(scope="module")
def capture(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cap")
    scn = write_scenario(tmp)
    out = tmp / "cap.pcap"
    assert entrypoint(["synth", "--scenario", str(scn), "--out", str(out)]) == 0
    return out


@pytest.fixture(scope="module")
def out_dir(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sessions")
    for tag, call, seed in (("wired", "w-1", 1), ("wired", "w-2", 2),
                            ("wifi", "f-1", 3)):
        scn = write_scenario(tmp, f"{call}.json", call_id=call, seed=seed,
                             scenario_tag=tag)
        cap = tmp / f"{call}.pcap"
        assert entrypoint(["synth", "--scenario", str(scn),
                           "--out", str(cap)]) == 0
        assert entrypoint(["analyze", "--input", str(cap),
                           "--out", str(tmp / "out"),
                           "--scenario", tag]) == 0
    return tmp / "out"


class TestAnalyze:
    def test_report_tree(self, capture, tmp_path, capsys):
        rc = entrypoint(["analyze", "--input", str(capture),
                         "--out", str(tmp_path / "out"), "--scenario", "lab"])
        assert rc == 0
        report_path = tmp_path / "out" / "call-1" / "report.json"
        report = json.loads(report_path.read_text())
        assert report["session"]["codec"] == "G711-A"
        assert report["session"]["scenario"] == "lab"
        assert report["loss"]["expected"] == 500
        # every advertised export exists on disk
        session_dir = report_path.parent
        for name in report["exports"]["series_csv"].values():
            assert (session_dir / name).exists()
        out = capsys.readouterr().out
        assert "1 session report(s)" in out

    def test_report_matches_schema(self, capture, tmp_path):
        entrypoint(["analyze", "--input", str(capture),
                    "--out", str(tmp_path / "out")])
        report = json.loads(
            (tmp_path / "out" / "call-1" / "report.json").read_text())
        jsonschema.validate(report, SCHEMA)

    def test_reruns_are_byte_identical(self, capture, tmp_path):
        for d in ("a", "b"):
            entrypoint(["analyze", "--input", str(capture),
                        "--out", str(tmp_path / d), "--scenario", "lab"])
        a = tmp_path / "a" / "call-1"
        b = tmp_path / "b" / "call-1"
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_csv_header(self, capture, tmp_path):
        entrypoint(["analyze", "--input", str(capture),
                    "--out", str(tmp_path / "out")])
        for csv in (tmp_path / "out" / "call-1").glob("*.csv"):
            if csv.name == "bandwidth_sigma_hist.csv":
                continue
            assert csv.read_text().splitlines()[0] == "t,value,unit", csv.name

    def test_candidates_add_ranking(self, capture, tmp_path):
        entrypoint(["analyze", "--input", str(capture),
                    "--out", str(tmp_path / "out"),
                    "--candidates", "GEV,Normal,Exponential"])
        report = json.loads(
            (tmp_path / "out" / "call-1" / "report.json").read_text())
        ranking = report["fits"]["jitter"]["ranking"]
        assert {f["family"] for f in ranking} == {"GEV", "Normal", "Exponential"}
        bics = [f["bic"] for f in ranking]
        assert bics == sorted(bics)
        jsonschema.validate(report, SCHEMA)

    def test_unknown_candidate_fails(self, capture, tmp_path, capsys):
        rc = entrypoint(["analyze", "--input", str(capture),
                         "--out", str(tmp_path / "out"),
                         "--candidates", "GEV,Zipf"])
        assert rc == 1
        assert "Zipf" in capsys.readouterr().err

    def test_empty_capture_warns_and_exits_zero(self, tmp_path, capsys):
        empty = tmp_path / "empty.pcap"
        empty.write_bytes(write_pcap([]))
        rc = entrypoint(["analyze", "--input", str(empty),
                         "--out", str(tmp_path / "out")])
        assert rc == 0
        assert "no call sessions" in capsys.readouterr().err

    def test_corrupt_magic_fails(self, tmp_path, capsys):
        bad = tmp_path / "bad.pcap"
        bad.write_bytes(b"\x00" * 64)
        rc = entrypoint(["analyze", "--input", str(bad),
                         "--out", str(tmp_path / "out")])
        assert rc == 1
        assert "magic" in capsys.readouterr().err

    def test_residue_returns_two(self, capture, tmp_path, capsys):
        records = parse_pcap(capture.read_bytes())
        junk = tmp_path / "junk.jsonl"
        junk.write_text(
            write_jsonl(records)
            + json.dumps({"ts": 50.0, "src": "10.0.0.9", "sport": 1,
                          "dst": "10.0.0.1", "dport": 2, "proto": "udp",
                          "payload_hex": "00ff00ff"}) + "\n")
        rc = entrypoint(["analyze", "--input", str(junk),
                         "--out", str(tmp_path / "out")])
        assert rc == 2
        assert "not parseable" in capsys.readouterr().err

    def test_format_flag_beats_extension(self, capture, tmp_path):
        records = parse_pcap(capture.read_bytes())
        odd = tmp_path / "capture.dat"
        odd.write_text(write_jsonl(records))
        rc = entrypoint(["analyze", "--input", str(odd), "--format", "jsonl",
                         "--out", str(tmp_path / "out")])
        assert rc == 0
        assert (tmp_path / "out" / "call-1" / "report.json").exists()

    def test_unknown_extension_needs_format(self, capture, tmp_path, capsys):
        odd = tmp_path / "capture.dat"
        odd.write_bytes(capture.read_bytes())
        rc = entrypoint(["analyze", "--input", str(odd),
                         "--out", str(tmp_path / "out")])
        assert rc == 1
        assert "--format" in capsys.readouterr().err

    def test_two_sessions_two_directories(self, tmp_path):
        scn1 = write_scenario(tmp_path, "s1.json", call_id="alpha")
        scn2 = write_scenario(tmp_path, "s2.json", call_id="beta", seed=8)
        c1, c2 = tmp_path / "c1.pcap", tmp_path / "c2.pcap"
        entrypoint(["synth", "--scenario", str(scn1), "--out", str(c1)])
        entrypoint(["synth", "--scenario", str(scn2), "--out", str(c2)])
        rc = entrypoint(["analyze", "--input", str(c1), str(c2),
                         "--out", str(tmp_path / "out")])
        assert rc == 0
        dirs = sorted(p.name for p in (tmp_path / "out").iterdir())
        assert dirs == ["alpha", "beta"]


class TestFit:
    def test_gev_data_ranks_gev_first(self, tmp_path, capsys):
        p = GevParams(*JITTER_MODELS["G722"][:3])
        vals = gev_sample(p, 2000, seed=42)
        path = tmp_path / "vals.txt"
        path.write_text("".join(f"{float(v)!r}\n" for v in vals))
        out = tmp_path / "fit.json"
        rc = entrypoint(["fit", "--input", str(path), "--target", "jitter",
                         "--out", str(out)])
        assert rc == 0
        result = json.loads(out.read_text())
        assert result["target"] == "jitter"
        assert result["n"] == 2000
        assert result["ranking"][0]["family"] == "GEV"
        assert result["gev"]["xi"] < 0  # bounded-tail jitter model
        assert result["gev"]["xi"] == pytest.approx(p.xi, abs=0.05)

    def test_rtt_data_has_heavy_tail(self, tmp_path):
        p = GevParams(*RTT_MODELS["G729"][:3])
        vals = gev_sample(p, 2000, seed=43)
        path = tmp_path / "vals.txt"
        path.write_text("".join(f"{float(v)!r}\n" for v in vals))
        out = tmp_path / "fit.json"
        rc = entrypoint(["fit", "--input", str(path), "--target", "rtt",
                         "--out", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["gev"]["xi"] > 0

    def test_stdout_when_no_out(self, tmp_path, capsys):
        vals = gev_sample(GevParams(0.0, 1.0, 0.0), 100, seed=1)
        path = tmp_path / "vals.txt"
        path.write_text("".join(f"{float(v)!r}\n" for v in vals))
        assert entrypoint(["fit", "--input", str(path)]) == 0
        parsed = json.loads(capsys.readouterr().out)
        assert set(parsed) == {"target", "n", "ranking", "gev"}

    def test_candidate_restriction(self, tmp_path, capsys):
        # location 10 keeps draws positive so the Exponential family fits too
        vals = gev_sample(GevParams(0.0, 1.0, 10.0), 200, seed=2)
        path = tmp_path / "vals.txt"
        path.write_text("".join(f"{float(v)!r}\n" for v in vals))
        assert entrypoint(["fit", "--input", str(path),
                           "--candidates", "Normal,Exponential"]) == 0
        parsed = json.loads(capsys.readouterr().out)
        assert {f["family"] for f in parsed["ranking"]} == \
            {"Normal", "Exponential"}

    def test_unparsable_line_names_line_number(self, tmp_path, capsys):
        path = tmp_path / "vals.txt"
        path.write_text("1.0\n2.0\nnot-a-number\n4.0\n")
        assert entrypoint(["fit", "--input", str(path)]) == 1
        err = capsys.readouterr().err
        assert ":3:" in err and "not-a-number" in err

    def test_too_few_values_fails(self, tmp_path, capsys):
        path = tmp_path / "vals.txt"
        path.write_text("".join(f"{v}\n" for v in range(5)))
        assert entrypoint(["fit", "--input", str(path)]) == 1
        assert "20" in capsys.readouterr().err

    def test_missing_file_fails(self, tmp_path, capsys):
        assert entrypoint(["fit", "--input", str(tmp_path / "nope.txt")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_blank_lines_skipped(self, tmp_path, capsys):
        vals = gev_sample(GevParams(0.0, 1.0, 0.0), 30, seed=3)
        path = tmp_path / "vals.txt"
        path.write_text("\n".join(f"{float(v)!r}" for v in vals) + "\n\n\n")
        assert entrypoint(["fit", "--input", str(path)]) == 0
        assert json.loads(capsys.readouterr().out)["n"] == 30


class TestReport:
    def test_merges_directory_tree(self, out_dir, tmp_path):
        out = tmp_path / "merged.json"
        rc = entrypoint(["report", "--input", str(out_dir),
                         "--out", str(out)])
        assert rc == 0
        merged = json.loads(out.read_text())
        assert [r["id"] for r in merged["sessions"]] == ["f-1", "w-1", "w-2"]
        assert set(merged["by_scenario"]) == {"wired", "wifi"}
        assert merged["by_scenario"]["wired"]["sessions"] == ["w-1", "w-2"]

    def test_scenario_aggregates(self, out_dir, tmp_path):
        out = tmp_path / "merged.json"
        entrypoint(["report", "--input", str(out_dir), "--out", str(out)])
        merged = json.loads(out.read_text())
        wired = merged["by_scenario"]["wired"]
        assert wired["csd_boxplot"]["median"] == pytest.approx(1.392)
        assert 0.0 <= wired["mean_loss_pct"] <= 5.0
        assert wired["mean_rtt_ms"] > 100  # model mu is 123.9
        for row in merged["sessions"]:
            assert math.isfinite(row["mean_jitter_ms"])

    def test_cross_session_pca(self, out_dir, tmp_path):
        out = tmp_path / "merged.json"
        entrypoint(["report", "--input", str(out_dir), "--out", str(out)])
        merged = json.loads(out.read_text())
        pca = merged["pca"]
        assert pca is not None
        assert pca["sessions"] == ["f-1", "w-1", "w-2"]
        assert len(pca["explained"]) == len(pca["components"])

    def test_accepts_explicit_report_files(self, out_dir, capsys):
        files = sorted(str(p) for p in out_dir.rglob("report.json"))
        assert entrypoint(["report", "--input", *files]) == 0
        merged = json.loads(capsys.readouterr().out)
        assert len(merged["sessions"]) == 3

    def test_no_reports_fails(self, tmp_path, capsys):
        assert entrypoint(["report", "--input", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_non_report_json_fails(self, tmp_path, capsys):
        bad = tmp_path / "report.json"
        bad.write_text(json.dumps({"hello": 1}))
        assert entrypoint(["report", "--input", str(bad)]) == 1
        assert "error:" in capsys.readouterr().err


class TestScenarioSpec:
    def test_sip_defaults(self):
        spec = load_scenario(base_scenario())
        times = spec.sip_times()
        assert times.invite == 1.0
        assert times.ringing == 2.392
        assert times.answer == 3.0
        assert times.bye == pytest.approx(3.0 + 10.0 + 1.0)
        assert times.bye_ok == pytest.approx(times.bye + 0.1981)

    def test_explicit_sip_times(self):
        spec = load_scenario(base_scenario(
            sip={"invite": 0.0, "ringing": 1.0, "answer": 2.0,
                 "bye": 30.0, "bye_ok": 30.5}))
        assert spec.sip_times().invite == 0.0
        assert spec.sip_times().bye_ok == 30.5

    def test_sip_times_must_increase(self):
        with pytest.raises(BadSpec):
            load_scenario(base_scenario(
                sip={"invite": 5.0, "ringing": 1.0, "answer": 2.0,
                     "bye": 30.0, "bye_ok": 30.5}))

    def test_synth_to_file_api(self, tmp_path):
        spec = load_scenario(base_scenario())
        n = synth_to_file(spec, tmp_path / "cap.jsonl", "jsonl")
        assert n == len((tmp_path / "cap.jsonl").read_text().splitlines())

    def test_bad_format_rejected(self, tmp_path):
        spec = load_scenario(base_scenario())
        with pytest.raises(VoipQosError):
            synth_to_file(spec, tmp_path / "cap.bin", "xml")
