"""Verdict rendering: human-readable text, JSON, and exit codes."""

from __future__ import annotations

import json

from .driver import RunConfig, Verdict
from .symex import Counterexample

EXIT_SUCCESS = 0
EXIT_FAILURE_FOUND = 1
EXIT_UNKNOWN = 2


def exit_code(verdict: Verdict) -> int:
    if verdict.kind == "failed":
        return EXIT_FAILURE_FOUND
    if verdict.kind in ("successful", "safe-within-bound"):
        return EXIT_SUCCESS
    return EXIT_UNKNOWN


def _trace_text(cex: Counterexample) -> list[str]:
    lines = ["Counterexample:"]
    lines.append("  inputs: " + (cex.input_summary() or "(none)"))
    lines.append("  trace:")
    for s in cex.steps:
        lines.append(f"    [{s.pos}] {s.symbol} = {s.value}")
    v = cex.violated
    lines.append(f"  violated property: {v.property_class.value} at {v.pos}: {v.message}")
    return lines


def render_text(verdict: Verdict, config: RunConfig) -> str:
    lines: list[str] = []
    for row in verdict.obligations:
        lines.append(f"[{row.property_class}] {row.pos}: {row.message}: {row.status.upper()}")
    if verdict.unknown_calls:
        lines.append("unknown calls (results havocked):")
        for c in verdict.unknown_calls:
            lines.append(f"  {c}")
    for note in verdict.notes:
        lines.append(f"note: {note}")
    if verdict.kind == "failed":
        assert verdict.counterexample is not None
        lines.extend(_trace_text(verdict.counterexample))
        lines.append("VERIFICATION FAILED")
    elif verdict.kind == "successful":
        lines.append("VERIFICATION SUCCESSFUL")
    elif verdict.kind == "safe-within-bound":
        lines.append(
            f"VERIFICATION SUCCESSFUL (no violation within unwind bound {verdict.bound}; "
            "not a full proof)"
        )
    else:
        lines.append(f"VERIFICATION UNKNOWN: {verdict.reason}")
    return "\n".join(lines)


def render_json(verdict: Verdict, config: RunConfig) -> str:
    doc: dict = {
        "verdict": verdict.kind,
        "strategy": config.strategy,
        "bound": verdict.bound,
        "reason": verdict.reason,
        "notes": verdict.notes,
        "unknown_calls": verdict.unknown_calls,
        "times": verdict.times,
        "obligations": [
            {
                "class": o.property_class,
                "position": o.pos,
                "message": o.message,
                "status": o.status,
            }
            for o in verdict.obligations
        ],
    }
    cex = verdict.counterexample
    if cex is not None:
        doc["counterexample"] = {
            "entry": cex.entry,
            "bound": cex.bound,
            "violated": {
                "class": cex.violated.property_class.value,
                "position": str(cex.violated.pos),
                "message": cex.violated.message,
            },
            "inputs": [
                {
                    "name": iv.display,
                    "kind": iv.kind,
                    "value": iv.value,
                    "is_null": iv.is_null,
                    "fields": iv.fields,
                    "length": iv.length,
                    "elements": {str(k): v for k, v in iv.elements.items()},
                    "default": iv.elem_default,
                }
                for iv in cex.inputs
            ],
            "trace": [
                {"position": str(s.pos), "symbol": s.symbol, "value": s.value}
                for s in cex.steps
            ],
        }
    return json.dumps(doc, indent=2)


def report(verdict: Verdict, config: RunConfig) -> tuple[int, str]:
    """Exit code and rendered output for a finished verification run."""
    text = render_json(verdict, config) if config.json_output else render_text(verdict, config)
    return exit_code(verdict), text
