import json
import subprocess
import sys

import numpy as np
import pytest

from finosc.cli import main
from finosc.sigio import load_signals_csv, load_signals_json


def run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_not_a_prime(capsys):
    code, _, err = run(["generate", "--prime", "8", "--family", "split"], capsys)
    assert code == 2
    assert "8 is not an odd prime" in err


def test_prime_too_large(capsys):
    code, _, err = run(["generate", "--prime", "101", "--family", "split"], capsys)
    assert code == 2


def test_unknown_family(capsys):
    # argparse rejects the choice itself
    code, _, err = run(["generate", "--prime", "7", "--family", "nope"], capsys)
    assert code == 2


def test_generate_split7(tmp_path, capsys):
    out = tmp_path / "s7.json"
    code, _, _ = run(
        ["generate", "--prime", "7", "--family", "split", "--out", str(out)], capsys
    )
    assert code == 0
    sys7 = load_signals_json(out)
    assert sys7.signals.shape == (140, 7)  # (p-2)p(p+1)/2 at p=7


def test_generate_reruns_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(
            ["generate", "--prime", "5", "--family", "oscillator", "--out", str(path)],
            capsys,
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_csv_format(tmp_path, capsys):
    out = tmp_path / "n5.csv"
    code, _, _ = run(
        [
            "generate",
            "--prime",
            "5",
            "--family",
            "nonsplit",
            "--out",
            str(out),
            "--format",
            "csv",
        ],
        capsys,
    )
    assert code == 0
    ids, arr = load_signals_csv(out)
    assert arr.shape == (50, 5)


def test_generate_extended_refuses_large(capsys):
    # 169 * 2015 signals is far past the materialization cap
    code, _, err = run(["generate", "--prime", "13", "--family", "extended"], capsys)
    assert code == 2
    assert "extended" in err.lower() or "materia" in err.lower()


def test_verify_bundle_and_exit_codes(tmp_path, capsys):
    stem = tmp_path / "rep"
    code, out, _ = run(
        ["verify", "--prime", "5", "--family", "nonsplit", "--out", str(stem)], capsys
    )
    assert code == 0
    assert (tmp_path / "rep.json").exists()
    assert (tmp_path / "rep.csv").exists()
    png = tmp_path / "rep.png"
    assert png.exists() and png.stat().st_size > 0
    doc = json.loads((tmp_path / "rep.json").read_text())
    assert doc["report"]["passed"] is True


def test_verify_failure_exit_1(tmp_path, capsys):
    # split family at p=7 exceeds the asymptotic auto bound: honest exit 1
    code, out, _ = run(
        ["verify", "--prime", "7", "--family", "split", "--out", str(tmp_path / "r")],
        capsys,
    )
    assert code == 1


def test_verify_no_figures(tmp_path, capsys):
    stem = tmp_path / "nf"
    code, _, _ = run(
        [
            "verify",
            "--prime",
            "5",
            "--family",
            "nonsplit",
            "--out",
            str(stem),
            "--no-figures",
        ],
        capsys,
    )
    assert code == 0
    assert (tmp_path / "nf.json").exists()
    assert not (tmp_path / "nf.png").exists()


def test_verify_without_out_prints_summary(capsys):
    code, out, _ = run(["verify", "--prime", "5", "--family", "heisenberg"], capsys)
    assert code == 0
    assert "auto" in out and "cross" in out


def test_ambiguity_signal_id(tmp_path, capsys):
    stem = tmp_path / "amb"
    code, _, _ = run(
        [
            "ambiguity",
            "--prime",
            "5",
            "--family",
            "split",
            "--signal-id",
            "spl-t000-c01",
            "--out",
            str(stem),
        ],
        capsys,
    )
    assert code == 0
    assert (tmp_path / "amb.json").exists()
    assert (tmp_path / "amb.csv").exists()


def test_ambiguity_unknown_id(capsys):
    code, _, err = run(
        [
            "ambiguity",
            "--prime",
            "5",
            "--family",
            "split",
            "--signal-id",
            "definitely-not-there",
        ],
        capsys,
    )
    assert code == 2


def test_fourier_check(tmp_path, capsys):
    code, out, _ = run(
        ["fourier-check", "--prime", "5", "--family", "split"], capsys
    )
    assert code == 0


def test_fourier_check_rejects_heisenberg(capsys):
    code, _, err = run(
        ["fourier-check", "--prime", "5", "--family", "heisenberg"], capsys
    )
    assert code == 2


def test_radar_sim(tmp_path, capsys):
    stem = tmp_path / "radar"
    code, out, _ = run(
        [
            "radar-sim",
            "--prime",
            "5",
            "--n-signals",
            "3",
            "--out",
            str(stem),
        ],
        capsys,
    )
    assert code == 0
    doc = json.loads((tmp_path / "radar.json").read_text())
    assert doc["report"]["success_rate"] == 1.0


def test_cdma_sim_with_baseline(capsys):
    code, out, _ = run(
        [
            "cdma-sim",
            "--prime",
            "7",
            "--users",
            "2",
            "--trials",
            "50",
            "--baseline",
        ],
        capsys,
    )
    assert code == 0
    assert "random" in out  # paired comparison line


def test_export_round_trip(tmp_path, capsys):
    out = tmp_path / "h5.csv"
    code, _, _ = run(
        ["export", "--prime", "5", "--family", "heisenberg", "--out", str(out)], capsys
    )
    assert code == 0
    ids, arr = load_signals_csv(out)
    from finosc.heisenberg import heisenberg_system

    sys5 = heisenberg_system(5)
    assert ids == sys5.ids
    assert np.array_equal(arr, sys5.signals)


def test_entry_point_runs():
    # one end-to-end spawn of the installed console script path
    proc = subprocess.run(
        [sys.executable, "-m", "finosc.cli", "verify", "--prime", "3", "--family", "heisenberg"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0


def test_bad_tolerance(capsys):
    code, _, err = run(
        ["verify", "--prime", "5", "--family", "split", "--tolerance", "-1"], capsys
    )
    assert code == 2
