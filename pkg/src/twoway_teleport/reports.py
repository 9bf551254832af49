"""Plain-data views of protocol results and their JSON / CSV / Markdown forms."""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Sequence

import numpy as np

from . import __version__
from .protocol import AuditReport, BranchResult, InputCoefficients, PauliCorrection, ProtocolReport
from .statevec import DensityMatrix, PureState

FORMATS = ("json", "csv", "markdown")

Section = tuple[str, list[dict[str, Any]]]


def cnum(z: complex) -> dict[str, float]:
    z = complex(z)
    # -0.0 prints differently from 0.0; normalise so reports diff cleanly
    return {"re": z.real + 0.0, "im": z.imag + 0.0}


def matrix(m: DensityMatrix | np.ndarray) -> dict[str, Any]:
    labels = None
    if isinstance(m, DensityMatrix):
        labels, m = list(m.labels), m.entries
    out = {"re": (np.real(m) + 0.0).tolist(), "im": (np.imag(m) + 0.0).tolist()}
    if labels is not None:
        out["qubits"] = labels
    return out


def coefficients(c: InputCoefficients) -> dict[str, Any]:
    return {"a0": cnum(c.a0), "a1": cnum(c.a1), "b0": cnum(c.b0), "b1": cnum(c.b1)}


def correction(pc: PauliCorrection, qubits: Sequence[str]) -> dict[str, str]:
    return dict(zip(qubits, pc))


def amplitudes(state: PureState, nonzero_only: bool = False, tol: float = 1e-12,
               digits: int = 15) -> list[dict[str, Any]]:
    """Basis-ket amplitude rows, rounded to ``digits`` decimals for display."""
    n = state.num_qubits
    rows = []
    for i, a in enumerate(state.amplitudes):
        if nonzero_only and abs(a) <= tol:
            continue
        rows.append({"basis": format(i, f"0{n}b"), **cnum(complex(round(a.real, digits), round(a.imag, digits)))})
    return rows


def protocol_report(r: ProtocolReport, dump_density: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {
        "coefficients": coefficients(r.coefficients),
        "outcome": {"alice": r.outcome.alice.slug, "bob": r.outcome.bob.slug},
        "probability": r.probability,
        "bob_correction": correction(r.bob_correction, ("q3", "q5")),
        "alice_correction": correction(r.alice_correction, ("q4", "q6")),
        "fidelity_a": r.fidelity_a,
        "fidelity_b": r.fidelity_b,
    }
    if dump_density:
        out["density"] = {
            "rho_a": matrix(r.rho_a),
            "rho_b": matrix(r.rho_b),
            "sigma_a": matrix(r.sigma_a),
            "sigma_b": matrix(r.sigma_b),
        }
    return out


def branch_row(b: BranchResult) -> dict[str, Any]:
    return {
        "alice": b.outcome.alice.slug,
        "bob": b.outcome.bob.slug,
        "probability": b.probability,
        "bob_correction": " ".join(b.bob_correction),
        "alice_correction": " ".join(b.alice_correction),
        "fidelity_a": b.fidelity_a,
        "fidelity_b": b.fidelity_b,
        "successful": b.successful,
    }


def audit_rows(report: AuditReport) -> list[dict[str, Any]]:
    return [{
        "alice": r.outcome.alice.slug,
        "bob": r.outcome.bob.slug,
        "verdict": r.verdict,
        "paper_bob": " ".join(r.paper_bob),
        "paper_alice": " ".join(r.paper_alice),
        "derived_bob": " ".join(r.derived_bob),
        "derived_alice": " ".join(r.derived_alice),
        "paper_fidelity_a": r.paper_fidelity_a,
        "paper_fidelity_b": r.paper_fidelity_b,
        "published_residual_overlap": r.residual_overlap,
        "published_collapsed_overlap": r.collapsed_overlap,
        "published_residual_agrees": r.residual_agrees,
        "published_collapsed_agrees": r.collapsed_agrees,
    } for r in report.rows]


def document(command: str, result: dict[str, Any], seed: int | None = None,
             table: str | None = None) -> dict[str, Any]:
    return {"meta": {"command": command, "seed": seed, "table": table, "version": __version__},
            "result": result}


def _cell(v: Any) -> str:
    # JSON keeps full precision; the tabular forms are for reading
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, bool):
        return str(v).lower()
    if v is None:
        return ""
    return str(v)


def to_csv(sections: Sequence[Section], meta: dict[str, Any]) -> str:
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={_cell(v)}" for k, v in meta.items()) + "\n")
    for i, (title, rows) in enumerate(sections):
        if i:
            buf.write("\n")
        buf.write(f"# {title}\n")
        if not rows:
            continue
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def to_markdown(sections: Sequence[Section], meta: dict[str, Any]) -> str:
    lines = [" | ".join(f"**{k}**: {_cell(v)}" for k, v in meta.items()), ""]
    for title, rows in sections:
        lines.append(f"### {title}")
        lines.append("")
        if rows:
            keys = list(rows[0])
            lines.append("| " + " | ".join(keys) + " |")
            lines.append("|" + "---|" * len(keys))
            for row in rows:
                lines.append("| " + " | ".join(_cell(row[k]) for k in keys) + " |")
        lines.append("")
    return "\n".join(lines)


def render(doc: dict[str, Any], sections: Sequence[Section], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        return to_csv(sections, doc["meta"])
    if fmt == "markdown":
        return to_markdown(sections, doc["meta"])
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
