"""Command-line front end.

    twoway-teleport channel [--full] [--format f]
    twoway-teleport run (--a0 .. --b1 | --random) [--seed S] [--forced A,B]
                        [--table paper|derived] [--dump-density] [--format f]
    twoway-teleport branches --seed S [--table ...] [--format f]
    twoway-teleport metrics [--schemes FILE] [--format f]
    twoway-teleport sample --shots N --seed S [--format f]

JSON is the canonical output; CSV and Markdown are for reading.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import protocol as proto
from . import reports
from .protocol import BellOutcomePair, InputCoefficients

ETA_TOL = 0.005
EXIT_OK, EXIT_ROW_ERRORS, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class RunConfig:
    coefficients: InputCoefficients
    coefficient_source: str  # explicit | random
    seed: int | None
    forced: BellOutcomePair | None
    table: str
    fmt: str
    shots: int = 0
    dump_density: bool = False


@dataclass
class SchemeRow:
    label: str
    qibt: int
    qr: int
    cr: int
    aq: int
    claimed_eta: float | None = None
    bqt: str = ""

    def __post_init__(self):
        for name in ("qibt", "qr", "cr", "aq"):
            if int(getattr(self, name)) < 0:
                raise ValueError(f"{self.label}: {name} must be >= 0")


def default_schemes_path() -> Path:
    return Path(str(resources.files("twoway_teleport") / "data" / "bqt_schemes.json"))


def load_schemes(path: str | Path) -> list[SchemeRow]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if isinstance(raw, dict):
        raw = raw.get("schemes", [])
    rows = []
    for i, entry in enumerate(raw):
        missing = {"label", "qibt", "qr", "cr", "aq"} - set(entry)
        if missing:
            raise ValueError(f"scheme row {i} is missing {sorted(missing)}")
        rows.append(SchemeRow(**{k: entry.get(k) for k in
                                 ("label", "qibt", "qr", "cr", "aq", "claimed_eta") if k in entry},
                              bqt=entry.get("bqt", "")))
    return rows


def evaluate_schemes(rows: Sequence[SchemeRow]) -> list[dict[str, Any]]:
    out = []
    for row in rows:
        entry: dict[str, Any] = {"label": row.label, "bqt": row.bqt, "qibt": row.qibt, "qr": row.qr,
                                 "cr": row.cr, "aq": row.aq, "claimed_eta": row.claimed_eta}
        try:
            eta = proto.intrinsic_efficiency(row.qibt, row.qr, row.aq, row.cr)
        except (ZeroDivisionError, ValueError) as exc:
            entry.update(eta=None, matches_claim=None, error=str(exc))
        else:
            matches = None if row.claimed_eta is None else abs(eta - row.claimed_eta) <= ETA_TOL
            entry.update(eta=eta, matches_claim=matches, error=None)
        out.append(entry)
    return out


# ---------------------------------------------------------------------------


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", default="json", choices=reports.FORMATS)


def _add_coefficients(p: argparse.ArgumentParser) -> None:
    for name in ("a0", "a1", "b0", "b1"):
        p.add_argument(f"--{name}", type=str, default=None,
                       help="complex amplitude, e.g. 0.6 or 0.5+0.5j")
    p.add_argument("--random", action="store_true", help="draw coefficients from --seed")


def _add_table(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", default="derived", choices=("paper", "derived"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twoway-teleport",
                                     description="Two-way teleportation over a six-qubit cluster channel.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channel", help="amplitudes of the six-qubit channel")
    p.add_argument("--full", action="store_true", help="list all 64 basis states")
    _add_format(p)

    p = sub.add_parser("run", help="one protocol execution")
    _add_coefficients(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--forced", default=None, help="outcome pair, e.g. psi+,phi+")
    _add_table(p)
    p.add_argument("--dump-density", action="store_true", help="include the four density matrices")
    _add_format(p)

    p = sub.add_parser("branches", help="all 16 branches plus the correction-table audit")
    _add_coefficients(p)
    p.add_argument("--seed", type=int, default=None)
    _add_table(p)
    _add_format(p)

    p = sub.add_parser("metrics", help="intrinsic-efficiency comparison")
    p.add_argument("--schemes", default=None, help="JSON list of scheme rows (default: bundled table)")
    _add_format(p)

    p = sub.add_parser("sample", help="seeded outcome histogram and chi-square uniformity test")
    _add_coefficients(p)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    _add_format(p)
    return parser


def _parse_complex(flag: str, text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(flag, f"cannot parse {text!r} as a complex number") from None


def _coefficients(args: argparse.Namespace, random_by_default: bool) -> tuple[InputCoefficients, str]:
    given = {n: getattr(args, n) for n in ("a0", "a1", "b0", "b1") if getattr(args, n) is not None}
    if given and args.random:
        raise ConfigError("--random", "cannot be combined with explicit --a0/--a1/--b0/--b1")
    if given:
        missing = [n for n in ("a0", "a1", "b0", "b1") if n not in given]
        if missing:
            raise ConfigError(f"--{missing[0]}", "all four coefficients are required when any is given")
        vals = {n: _parse_complex(f"--{n}", v) for n, v in given.items()}
        for pair in ("a", "b"):
            norm = abs(vals[pair + "0"]) ** 2 + abs(vals[pair + "1"]) ** 2
            if abs(norm - 1) > 1e-9:
                raise ConfigError(f"--{pair}0", f"|{pair}0|^2 + |{pair}1|^2 = {norm:.12g}, must be 1")
        return InputCoefficients(**vals), "explicit"
    if not (args.random or random_by_default):
        raise ConfigError("--random", "give either --random or all of --a0 --a1 --b0 --b1")
    if args.seed is None:
        raise ConfigError("--seed", "required when coefficients are random")
    return InputCoefficients.random(np.random.default_rng(args.seed)), "random"


def config_from_args(args: argparse.Namespace) -> RunConfig:
    random_default = args.command in ("branches", "sample")
    coeffs, source = _coefficients(args, random_by_default=random_default)
    forced = None
    if getattr(args, "forced", None):
        try:
            forced = BellOutcomePair.parse(args.forced)
        except ValueError as exc:
            raise ConfigError("--forced", str(exc)) from None
    if args.command == "run" and forced is None and args.seed is None:
        raise ConfigError("--seed", "required when outcomes are sampled (or pass --forced)")
    shots = getattr(args, "shots", 0) or 0
    if args.command == "sample" and shots < 16:
        raise ConfigError("--shots", f"must be >= 16, got {shots}")
    return RunConfig(coefficients=coeffs, coefficient_source=source, seed=args.seed, forced=forced,
                     table=getattr(args, "table", "derived"), fmt=args.format, shots=shots,
                     dump_density=getattr(args, "dump_density", False))


# ---------------------------------------------------------------------------


def cmd_channel(full: bool = False, fmt: str = "json") -> tuple[str, int]:
    state = proto.build_channel()
    rows = reports.amplitudes(state, nonzero_only=not full)
    doc = reports.document("channel", {"qubits": list(state.labels), "amplitudes": rows})
    return reports.render(doc, [("amplitudes", rows)], fmt), EXIT_OK


def cmd_run(cfg: RunConfig) -> tuple[str, int]:
    report = proto.run_protocol(cfg.coefficients, seed=cfg.seed, forced=cfg.forced, table=cfg.table)
    result = reports.protocol_report(report, dump_density=cfg.dump_density)
    result["coefficient_source"] = cfg.coefficient_source
    result["forced"] = cfg.forced is not None
    doc = reports.document("run", result, seed=cfg.seed, table=report.table_provenance)
    summary = [{
        "alice": report.outcome.alice.slug, "bob": report.outcome.bob.slug,
        "probability": report.probability,
        "bob_correction": " ".join(report.bob_correction),
        "alice_correction": " ".join(report.alice_correction),
        "fidelity_a": report.fidelity_a, "fidelity_b": report.fidelity_b,
    }]
    sections = [("run", summary)]
    if cfg.dump_density:
        for name in ("rho_a", "rho_b", "sigma_a", "sigma_b"):
            m = getattr(report, name).entries
            sections.append((f"{name} (re, im)", [
                {f"c{j}": f"{m[i, j].real + 0.0:.12g}{m[i, j].imag + 0.0:+.12g}j" for j in range(m.shape[1])}
                for i in range(m.shape[0])]))
    return reports.render(doc, sections, cfg.fmt), EXIT_OK


def cmd_branches(cfg: RunConfig) -> tuple[str, int]:
    table = proto.resolve_table(cfg.table)
    branches = proto.enumerate_branches(cfg.coefficients, table)
    audit = proto.compare_tables(proto.paper_correction_table(), proto.default_derived_table(),
                                 coeffs=cfg.coefficients if cfg.coefficients.is_generic() else None)
    rows = [reports.branch_row(b) for b in branches]
    audit_rows = reports.audit_rows(audit)
    result = {
        "coefficients": reports.coefficients(cfg.coefficients),
        "branches": rows,
        "probability_sum": float(sum(b.probability for b in branches)),
        "successful_branches": sum(b.successful for b in branches),
        "success_probability": proto.branch_success_probability(branches),
        "audit": {
            "rows": audit_rows,
            "verdict_counts": {v: sum(r["verdict"] == v for r in audit_rows)
                               for v in ("match", "phase-equivalent", "mismatch")},
            "published_prefactor": audit.published_prefactor,
            "simulated_branch_amplitude": audit.simulated_branch_amplitude,
            "prefactor_consistent": audit.prefactor_consistent,
        },
    }
    doc = reports.document("branches", result, seed=cfg.seed, table=table.provenance)
    return reports.render(doc, [("branches", rows), ("table audit", audit_rows)], cfg.fmt), EXIT_OK


def cmd_metrics(rows: Sequence[SchemeRow], fmt: str = "json") -> tuple[str, int]:
    evaluated = evaluate_schemes(rows)
    errors = [r for r in evaluated if r["error"]]
    flagged = [r["label"] for r in evaluated if r["matches_claim"] is False]
    result = {"tolerance": ETA_TOL, "rows": evaluated, "flagged": flagged, "errors": len(errors)}
    doc = reports.document("metrics", result)
    return reports.render(doc, [("efficiency", evaluated)], fmt), EXIT_ROW_ERRORS if errors else EXIT_OK


def cmd_sample(cfg: RunConfig) -> tuple[str, int]:
    outcomes = proto.sample_outcomes(cfg.coefficients, cfg.shots, cfg.seed)
    counts = proto.outcome_counts(outcomes)
    stat, dof, p = proto.chi_square_uniform(list(counts.values()))
    rows = [{"alice": o.alice.slug, "bob": o.bob.slug, "count": n} for o, n in counts.items()]
    result = {"coefficients": reports.coefficients(cfg.coefficients), "shots": cfg.shots,
              "counts": rows, "chi_square": stat, "dof": dof, "p_value": p}
    doc = reports.document("sample", result, seed=cfg.seed)
    stats = [{"shots": cfg.shots, "chi_square": stat, "dof": dof, "p_value": p}]
    return reports.render(doc, [("counts", rows), ("chi-square vs uniform", stats)], cfg.fmt), EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "channel":
            text, code = cmd_channel(args.full, args.format)
        elif args.command == "metrics":
            try:
                rows = load_schemes(args.schemes or default_schemes_path())
            except (OSError, ValueError, TypeError) as exc:
                raise ConfigError("--schemes", str(exc)) from None
            text, code = cmd_metrics(rows, args.format)
        else:
            cfg = config_from_args(args)
            text, code = {"run": cmd_run, "branches": cmd_branches, "sample": cmd_sample}[args.command](cfg)
    except ConfigError as exc:
        print(f"twoway-teleport {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
