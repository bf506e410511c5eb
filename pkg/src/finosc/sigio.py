"""File formats: signal sets, ambiguity tables, and analysis reports.

Two interchange formats for signal sets:

  JSON: self-describing document with a conventions header (prime, family,
      primitive root, shift phase, operator normalization) and one record per
      signal holding its id, provenance, and samples as [re, im] pairs.
      Floats are written with shortest round-trip precision, so loading
      reproduces the arrays bit for bit.
  CSV: one row per signal, an id column then columns t0..t{p-1} holding
      "re+imj" textual complex values parseable by Python's complex().
      Cell text comes from repr, so this round-trips bit for bit too.

Reports serialize to JSON via a generic dataclass walker, and to flat CSV
records (documented per writer) for spreadsheet use.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

import numpy as np

from .field import primitive_root
from .systems import Provenance, SignalSystem

FORMAT_VERSION = 1


def format_complex(z: complex) -> str:
    """Exact textual form of a complex number, accepted back by complex()."""
    return repr(complex(z)).strip("()")


def parse_complex(s: str) -> complex:
    return complex(s.strip().strip("()"))


def conventions_header(p: int, family: str) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "p": p,
        "family": family,
        "primitive_root": primitive_root(p),
        "additive_character": "exp(2*pi*i*t/p) evaluated on residues mod p",
        "shift_phase": "time-frequency shift (tau, w, z) acts as "
        "exp(2*pi*i*(h*tau*w + z + w*t)/p) * x(t + tau) with h = (p+1)//2",
        "operator_normalization": "composed factor operators carry no auxiliary scalar",
        "inner_product": "sum_t x(t)*conj(y(t)), linear in the first slot",
    }


def _prov_dict(prov: Provenance) -> dict:
    d = dataclasses.asdict(prov)
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}


def _prov_from_dict(d: dict) -> Provenance:
    return Provenance(
        family=d["family"],
        group=d["group"],
        char=d["char"],
        origin=tuple(d["origin"]) if d.get("origin") is not None else None,
        translate=tuple(d["translate"]) if d.get("translate") is not None else None,
        parent=d.get("parent"),
    )


def save_signals_json(system: SignalSystem, path: str | Path) -> None:
    doc = {
        "conventions": conventions_header(system.p, system.family),
        "signals": [
            {
                "id": system.ids[i],
                "provenance": _prov_dict(system.provenance[i]),
                "samples": [[float(z.real), float(z.imag)] for z in system.signals[i]],
            }
            for i in range(len(system))
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_signals_json(path: str | Path) -> SignalSystem:
    doc = json.loads(Path(path).read_text())
    header = doc["conventions"]
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {header.get('format_version')!r}")
    p = header["p"]
    records = doc["signals"]
    signals = np.array(
        [[complex(re, im) for re, im in rec["samples"]] for rec in records],
        dtype=np.complex128,
    ).reshape(len(records), p)
    provs = [_prov_from_dict(rec["provenance"]) for rec in records]
    system = SignalSystem(p=p, family=header["family"], signals=signals, provenance=provs)
    if system.ids != [rec["id"] for rec in records]:
        raise ValueError("signal ids in file disagree with their provenance records")
    return system


def save_signals_csv(system: SignalSystem, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"t{t}" for t in range(system.p)])
        for i in range(len(system)):
            writer.writerow([system.ids[i]] + [format_complex(z) for z in system.signals[i]])


def load_signals_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """(ids, signal rows); provenance is not stored in this format."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["id"]:
        raise ValueError("not a signal CSV: missing id header")
    p = len(rows[0]) - 1
    ids = [row[0] for row in rows[1:]]
    signals = np.array(
        [[parse_complex(cell) for cell in row[1:]] for row in rows[1:]], dtype=np.complex128
    ).reshape(len(ids), p)
    return ids, signals


def save_ambiguity_csv(values: np.ndarray, path: str | Path, owner: str | None = None) -> None:
    """Full complex table, rows tau = 0..p-1, columns w = 0..p-1."""
    p = values.shape[0]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        head = ["tau\\w"] + [str(w) for w in range(p)]
        if owner:
            writer.writerow([f"# signal {owner}"])
        writer.writerow(head)
        for tau in range(p):
            writer.writerow([tau] + [format_complex(z) for z in values[tau]])


def jsonable(obj):
    """Recursively convert dataclasses / numpy / complex into JSON-safe values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, float) and obj != obj:  # NaN has no JSON spelling
        return None
    return obj


def save_report_json(report, path: str | Path, kind: str | None = None) -> None:
    doc = {"kind": kind or type(report).__name__, "report": jsonable(report)}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def write_records_csv(records: list[dict], path: str | Path) -> None:
    """Flat record rows; the union of keys, in first-seen order, forms the header."""
    fields: list[str] = []
    for rec in records:
        for k in rec:
            if k not in fields:
                fields.append(k)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, restval="")
        writer.writeheader()
        writer.writerows(records)


def bound_report_records(report) -> list[dict]:
    """One row per (check, subject): per-signal auto/sup/papr, worst pairs, summary.

    Columns: check, subject, value, bound, passed.  Aggregate rows use the
    subject "ALL"; pair rows join the two signal ids with "|".
    """
    rows: list[dict] = []

    def row(check, subject, value, bound=None, passed=None):
        rows.append(
            {
                "check": check,
                "subject": subject,
                "value": value,
                "bound": "" if bound is None else bound,
                "passed": "" if passed is None else passed,
            }
        )

    row("auto_offpeak_max", "ALL", report.auto_max, report.auto_bound, report.auto_pass)
    row("sup_max", "ALL", report.sup_max, report.sup_bound, report.sup_pass)
    row("cross_max", "ALL", report.cross.max_value, report.cross_bound, report.cross_pass)
    for name, q in report.cross.quantiles.items():
        row(f"cross_{name}", "ALL", q)
    row("pairs_checked", "ALL", report.cross.n_checked)
    row("pairs_total", "ALL", report.cross.n_total)
    row("pairs_sampled", "ALL", report.cross.sampled)
    for a, b, v in report.cross.worst:
        row("cross_pair", f"{a}|{b}", v, report.cross_bound, v <= report.cross_bound + report.tolerance)
    row("overall", "ALL", report.passed, None, report.passed)
    return rows


def bound_report_signal_records(report, ids: list[str]) -> list[dict]:
    """Per-signal metric rows to append after the aggregate records."""
    rows = []
    for i, ident in enumerate(ids):
        rows.append(
            {
                "check": "auto_offpeak",
                "subject": ident,
                "value": float(report.auto_per_signal[i]),
                "bound": report.auto_bound,
                "passed": bool(report.auto_per_signal[i] <= report.auto_bound + report.tolerance),
            }
        )
        rows.append(
            {
                "check": "sup",
                "subject": ident,
                "value": float(report.sup_per_signal[i]),
                "bound": report.sup_bound,
                "passed": "",
            }
        )
        rows.append(
            {
                "check": "papr",
                "subject": ident,
                "value": float(report.papr_per_signal[i]),
                "bound": "",
                "passed": "",
            }
        )
    return rows
