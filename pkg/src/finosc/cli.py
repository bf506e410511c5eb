"""Command-line front end.

Subcommands: generate, verify, ambiguity, fourier-check, radar-sim, cdma-sim,
export.  Exit codes: 0 on success (and on passing checks), 1 when a bound or
closure check fails, 2 for usage errors (bad prime, unknown signal id,
malformed flags).

Report-producing commands write a bundle next to --out: the JSON report, a
flat CSV of the same numbers, and a PNG figure (suppress with --no-figures).
All randomness flows from --seed, default 0; runs never consult the clock.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import plots, sigio
from .applications import (
    CdmaScenario,
    RadarScenario,
    cdma_simulate,
    radar_simulate,
    random_codebook,
)
from .correlation import (
    DEFAULT_PAIR_BUDGET,
    DEFAULT_TOL,
    cross_ambiguity,
    verify_bounds,
    verify_extended,
)
from .field import is_odd_prime
from .heisenberg import heisenberg_system
from .oscillator import (
    extended_system,
    fourier_closure_check,
    nonsplit_system,
    oscillator_system,
    split_system,
)

MAX_PRIME = 97

FAMILIES = ("heisenberg", "split", "nonsplit", "oscillator", "extended")

_BUILDERS = {
    "heisenberg": heisenberg_system,
    "split": split_system,
    "nonsplit": nonsplit_system,
    "oscillator": oscillator_system,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    prime: int
    family: str
    out: Path
    fmt: str
    seed: int
    tolerance: float
    pair_budget: int
    figures: bool

    def __post_init__(self):
        if not is_odd_prime(self.prime):
            raise UsageError(f"{self.prime} is not an odd prime")
        if not 3 <= self.prime <= MAX_PRIME:
            raise UsageError(f"prime must lie in 3..{MAX_PRIME}, got {self.prime}")
        if self.family not in FAMILIES:
            raise UsageError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.tolerance <= 0:
            raise UsageError("tolerance must be positive")
        if self.pair_budget < 1:
            raise UsageError("pair budget must be at least 1")


def _config(args, default_stem: str, default_tol: float = DEFAULT_TOL) -> RunConfig:
    out = Path(args.out) if args.out else Path(f"{default_stem}.{args.format}")
    return RunConfig(
        prime=args.prime,
        family=getattr(args, "family", "oscillator"),
        out=out,
        fmt=args.format,
        seed=args.seed,
        tolerance=args.tolerance if args.tolerance is not None else default_tol,
        pair_budget=args.pair_budget,
        figures=not args.no_figures,
    )


def _build(family: str, p: int):
    if family == "extended":
        raise UsageError("the extended family is lazy; use generate/verify which handle it")
    return _BUILDERS[family](p)


def _bundle_paths(out: Path) -> tuple[Path, Path, Path]:
    stem = out.with_suffix("")
    return stem.with_suffix(".json"), stem.with_suffix(".csv"), stem.with_suffix(".png")


def _emit(lines) -> None:
    for line in lines:
        print(line)


def cmd_generate(args) -> int:
    cfg = _config(args, f"signals-{args.family}-p{args.prime}")
    if cfg.family == "extended":
        base = oscillator_system(cfg.prime)
        ext = extended_system(base)
        try:
            system = ext.materialize()
        except ValueError as e:
            raise UsageError(str(e)) from None
    else:
        system = _build(cfg.family, cfg.prime)
    if cfg.fmt == "json":
        sigio.save_signals_json(system, cfg.out)
    else:
        sigio.save_signals_csv(system, cfg.out)
    print(f"wrote {len(system)} {cfg.family} signals for p={cfg.prime} to {cfg.out}")
    return 0


def cmd_verify(args) -> int:
    cfg = _config(args, f"verify-{args.family}-p{args.prime}")
    jpath, cpath, ppath = _bundle_paths(cfg.out)
    if cfg.family == "extended":
        base = oscillator_system(cfg.prime)
        report = verify_extended(
            extended_system(base),
            n_pairs=min(cfg.pair_budget, 100_000),
            tolerance=cfg.tolerance,
            seed=cfg.seed,
        )
        sigio.save_report_json(report, jpath, kind="extended-pair-bounds")
        records = [
            {"check": "pair_max", "subject": "ALL", "value": report.max_value,
             "bound": report.bound, "passed": report.passed},
            {"check": "pairs_checked", "subject": "ALL", "value": report.n_pairs,
             "bound": "", "passed": ""},
        ] + [
            {"check": f"pair_{name}", "subject": "ALL", "value": q, "bound": "", "passed": ""}
            for name, q in report.quantiles.items()
        ]
        sigio.write_records_csv(records, cpath)
        print(f"extended pairs: max {report.max_value:.6f} vs {report.bound:.6f} "
              f"over {report.n_pairs} sampled pairs: {'pass' if report.passed else 'FAIL'}")
        print(f"wrote {jpath} and {cpath}")
        return 0 if report.passed else 1

    system = _build(cfg.family, cfg.prime)
    report = verify_bounds(
        system, pair_budget=cfg.pair_budget, tolerance=cfg.tolerance, seed=cfg.seed
    )
    sigio.save_report_json(report, jpath, kind="bound-report")
    records = sigio.bound_report_records(report)
    records += sigio.bound_report_signal_records(report, system.ids)
    sigio.write_records_csv(records, cpath)
    _emit(report.summary_lines())
    written = [str(jpath), str(cpath)]
    if cfg.figures:
        plots.bound_panels(report, ppath)
        written.append(str(ppath))
    print("wrote " + ", ".join(written))
    return 0 if report.passed else 1


def cmd_ambiguity(args) -> int:
    cfg = _config(args, f"ambiguity-p{args.prime}")
    system = _build(cfg.family, cfg.prime)
    ident = args.signal_id if args.signal_id is not None else system.ids[0]
    try:
        idx = system.index_of(ident)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    table = cross_ambiguity(system.signals[idx], system.signals[idx], cfg.prime)
    jpath, cpath, ppath = _bundle_paths(cfg.out)
    doc = {
        "p": cfg.prime,
        "family": cfg.family,
        "signal": system.ids[idx],
        "values": sigio.jsonable(table),
    }
    jpath.write_text(json.dumps(doc, indent=1) + "\n")
    sigio.save_ambiguity_csv(table, cpath, owner=system.ids[idx])
    written = [str(jpath), str(cpath)]
    if cfg.figures:
        plots.ambiguity_heatmap(table, ppath, label=system.ids[idx])
        written.append(str(ppath))
    offpeak = np.abs(table).copy()
    offpeak[0, 0] = 0.0
    print(f"table for {system.ids[idx]}: peak {abs(table[0, 0]):.6f}, "
          f"off-peak max {offpeak.max():.6f}")
    print("wrote " + ", ".join(written))
    return 0


def cmd_fourier_check(args) -> int:
    cfg = _config(args, f"fourier-check-{args.family}-p{args.prime}", default_tol=1e-6)
    if cfg.family not in ("split", "nonsplit", "oscillator"):
        raise UsageError("fourier-check needs a torus-indexed family: split, nonsplit, oscillator")
    system = _build(cfg.family, cfg.prime)
    report = fourier_closure_check(system, tol=cfg.tolerance)
    jpath, cpath, ppath = _bundle_paths(cfg.out)
    sigio.save_report_json(report, jpath, kind="closure-report")
    records = [
        {"signal": m.signal, "matched": m.matched or "", "target_group": m.target_group,
         "overlap": m.overlap}
        for m in report.matches
    ]
    sigio.write_records_csv(records, cpath)
    written = [str(jpath), str(cpath)]
    if cfg.figures:
        plots.closure_overlap_hist(report, ppath)
        written.append(str(ppath))
    print(f"closure: {report.n_matched}/{report.n_signals} matched, "
          f"min overlap {report.min_overlap:.9f}: {'pass' if report.all_matched else 'FAIL'}")
    print("wrote " + ", ".join(written))
    return 0 if report.all_matched else 1


def cmd_radar_sim(args) -> int:
    cfg = _config(args, f"radar-p{args.prime}")
    shift = None
    if args.tau is not None or args.doppler is not None:
        shift = (args.tau or 0, args.doppler or 0)
    scenario = RadarScenario(
        p=cfg.prime,
        signal_id=args.signal_id,
        n_signals=args.n_signals,
        shift=shift,
        snr_db=args.snr_db,
        trials=args.trials,
        seed=cfg.seed,
    )
    try:
        report = radar_simulate(scenario)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    jpath, cpath, ppath = _bundle_paths(cfg.out)
    sigio.save_report_json(report, jpath, kind="radar-report")
    records = [
        {"signal": ident, "recovery_rate": rate} for ident, rate in report.per_signal
    ]
    records.append({"signal": "ALL", "recovery_rate": report.success_rate})
    sigio.write_records_csv(records, cpath)
    written = [str(jpath), str(cpath)]
    if cfg.figures:
        plots.radar_panel(report, ppath)
        written.append(str(ppath))
    _emit(report.summary_lines())
    print("wrote " + ", ".join(written))
    return 0


def cmd_cdma_sim(args) -> int:
    cfg = _config(args, f"cdma-p{args.prime}")
    scenario = CdmaScenario(
        p=cfg.prime,
        n_users=args.users,
        scenario=args.scenario,
        snr_db=args.snr_db,
        trials=args.trials,
        blind=args.blind,
        seed=cfg.seed,
    )
    try:
        report = cdma_simulate(scenario)
    except ValueError as e:
        raise UsageError(str(e)) from None
    reports = {"oscillator": report}
    if args.baseline:
        book = random_codebook(cfg.prime, args.users, seed=cfg.seed)
        reports["random"] = cdma_simulate(scenario, codebook=book, codebook_label="random")
    jpath, cpath, ppath = _bundle_paths(cfg.out)
    doc = {k: sigio.jsonable(r) for k, r in reports.items()}
    jpath.write_text(json.dumps({"kind": "cdma-report", "report": doc}, indent=1) + "\n")
    records = []
    for label, rep in reports.items():
        for ident, ser in zip(rep.user_ids, rep.per_user_ser):
            records.append({"codebook": label, "user": ident, "ser": ser})
        records.append({"codebook": label, "user": "ALL", "ser": rep.ser})
    sigio.write_records_csv(records, cpath)
    written = [str(jpath), str(cpath)]
    if cfg.figures:
        plots.cdma_panel(report, ppath)
        written.append(str(ppath))
    for rep in reports.values():
        _emit(rep.summary_lines())
    if args.baseline:
        osc, rnd = reports["oscillator"].ser, reports["random"].ser
        verdict = "below" if osc < rnd else "NOT below"
        print(f"oscillator SER {osc:.5f} is {verdict} random-codebook SER {rnd:.5f}")
    print("wrote " + ", ".join(written))
    return 0


def cmd_export(args) -> int:
    cfg = _config(args, f"export-{args.family}-p{args.prime}")
    system = _build(cfg.family, cfg.prime)
    out = cfg.out if cfg.out.suffix else cfg.out.with_suffix(".csv")
    sigio.save_signals_csv(system, out)
    print(f"wrote {len(system)} rows of complex samples to {out}")
    return 0


def _add_common(sub, family=True, fmt_default="json"):
    sub.add_argument("--prime", type=int, required=True, help="odd prime length, 3..97")
    if family:
        sub.add_argument("--family", choices=FAMILIES, default="oscillator")
    sub.add_argument("--out", default=None, help="output path (bundle stem for reports)")
    sub.add_argument("--format", choices=("json", "csv"), default=fmt_default)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tolerance", type=float, default=None, help="bound slack override")
    sub.add_argument("--pair-budget", type=int, default=DEFAULT_PAIR_BUDGET)
    sub.add_argument("--no-figures", action="store_true", help="skip PNG rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finosc",
        description="Generate, check, and exercise low-correlation signal sets on F_p.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("generate", help="emit a signal set file (json or csv)")
    _add_common(s)

    s = subs.add_parser("verify", help="check the correlation bounds, exit 1 on failure")
    _add_common(s)

    s = subs.add_parser("ambiguity", help="full table for one signal")
    _add_common(s)
    s.add_argument("--signal-id", default=None, help="signal id or integer index")

    s = subs.add_parser("fourier-check", help="spectral closure of a torus-indexed family")
    _add_common(s)

    s = subs.add_parser("radar-sim", help="shift recovery simulation")
    _add_common(s, family=False)
    s.add_argument("--signal-id", default=None)
    s.add_argument("--n-signals", type=int, default=10)
    s.add_argument("--tau", type=int, default=None, help="pin the true time shift")
    s.add_argument("--doppler", type=int, default=None, help="pin the true phase shift")
    s.add_argument("--snr-db", type=float, default=None, help="omit for noiseless")
    s.add_argument("--trials", type=int, default=1, help="noise redraws per shift")

    s = subs.add_parser("cdma-sim", help="multi-user despreading simulation")
    _add_common(s, family=False)
    s.add_argument("--users", type=int, default=4)
    s.add_argument("--scenario", choices=("sync", "async", "phase", "full"), default="sync")
    s.add_argument("--snr-db", type=float, default=None, help="omit for noiseless")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--blind", action="store_true", help="search offsets instead of being told")
    s.add_argument("--baseline", action="store_true", help="also run a random codebook")

    s = subs.add_parser("export", help="CSV of complex samples")
    _add_common(s, fmt_default="csv")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    handlers = {
        "generate": cmd_generate,
        "verify": cmd_verify,
        "ambiguity": cmd_ambiguity,
        "fourier-check": cmd_fourier_check,
        "radar-sim": cmd_radar_sim,
        "cdma-sim": cmd_cdma_sim,
        "export": cmd_export,
    }
    try:
        return handlers[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
