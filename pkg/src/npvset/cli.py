"""Command-line surface: parse, run the pipeline, emit deterministic reports.

Exit codes: 0 success, 1 verification counterexample, 2 input error, 3 cap
exhaustion left unresolved leaves (results are then lower bounds).  JSON
output is canonical: sorted keys, exact scalars as strings, stable ordering
everywhere, so identical configurations produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .algebra import MapPair, Scalar, normalize_monic
from .classify import classify
from .errors import EngineError, ParseError, PreconditionFailed
from .expansion import Caps, ExpansionNode, curve_branches, expansion_tree
from .oracle import DEFAULT_RADII, DEFAULT_SEED, DEFAULT_TOL, branch_limit_sample, properness_probe
from .parsing import (
    format_branch,
    format_poly,
    format_series,
    format_unipoly,
    parse_map,
    parse_series,
)
from .puiseux import leading_data
from .valueset import (
    CheckReport,
    dicritical_series,
    nonproper_value_set,
    run_all_checks,
)

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_INPUT = 2
EXIT_UNRESOLVED = 3

VERIFY_CHOICES = [
    "theorem1",
    "theorem2",
    "lemma2",
    "lemma3",
    "lemma4",
    "eq4",
    "eq9",
    "section5",
    "factorization",
    "all",
]


@dataclass
class RunConfig:
    map_text: str
    command: str
    series_text: Optional[str] = None
    which: str = "P"
    what: str = "all"
    depth_k: int = 8
    caps: Caps = field(default_factory=Caps)
    radii: Tuple[float, ...] = DEFAULT_RADII
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    samples: int = 64
    fmt: str = "text"


def _add_shared(ap: argparse.ArgumentParser, suppress: bool) -> None:
    # shared options are accepted before or after the subcommand; the
    # subcommand copies default to SUPPRESS so they only override when given
    def dflt(value):
        return argparse.SUPPRESS if suppress else value

    ap.add_argument("--format", choices=["json", "text"], default=dflt("text"))
    ap.add_argument("--max-mult", type=int, default=dflt(Caps.max_mult))
    ap.add_argument("--max-k", type=int, default=dflt(Caps.max_k))
    ap.add_argument("--max-depth", type=int, default=dflt(Caps.max_depth))
    ap.add_argument(
        "--radii", default=dflt(",".join(str(r) for r in DEFAULT_RADII))
    )
    ap.add_argument("--tol", type=float, default=dflt(DEFAULT_TOL))
    ap.add_argument("--seed", type=int, default=dflt(None))


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="npvset",
        description="Exact analysis of polynomial plane maps at infinity: "
        "branches, window trees, dicritical series, non-proper value sets, "
        "and the built-in verification suite.",
    )
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--map", help="the two components, e.g. 'x+y; x*y+y^2'")
    src.add_argument("--map-file", help="file containing the same")
    _add_shared(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def subparser(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _add_shared(p, suppress=True)
        return p

    p_branches = subparser("branches", "Newton-Puiseux roots at infinity")
    p_branches.add_argument("--which", choices=["P", "Q"], default="P")
    p_branches.add_argument("--depth", type=int, default=8)
    subparser("tree", "window expansion tree")
    p_classify = subparser("classify", "leading data and flags of a series")
    p_classify.add_argument("--series", required=True, help="e.g. '-x + s*x^(-1)'")
    subparser("valueset", "non-proper value set components")
    p_verify = subparser("verify", "run the verification suite")
    p_verify.add_argument("--what", choices=VERIFY_CHOICES, default="all")
    p_oracle = subparser("oracle", "floating-point cross-validation")
    p_oracle.add_argument("--samples", type=int, default=64)
    return ap


def config_from_args(argv: Sequence[str]) -> RunConfig:
    ns = _build_parser().parse_args(argv)
    if ns.map is not None:
        map_text = ns.map
    else:
        with open(ns.map_file, "r", encoding="utf-8") as fh:
            map_text = fh.read()
    radii = tuple(float(r) for r in ns.radii.split(","))
    if list(radii) != sorted(radii) or any(r <= 0 for r in radii):
        raise PreconditionFailed("radii must be positive and increasing")
    caps = Caps(ns.max_mult, ns.max_k, ns.max_depth)
    if min(caps.max_mult, caps.max_k, caps.max_depth) <= 0:
        raise PreconditionFailed("caps must be positive")
    seed = ns.seed
    if seed is None:
        seed = int(os.environ.get("NPV_SEED", DEFAULT_SEED))
    cfg = RunConfig(
        map_text=map_text,
        command=ns.command,
        caps=caps,
        radii=radii,
        tol=ns.tol,
        seed=seed,
        fmt=ns.format,
    )
    if ns.command == "branches":
        cfg.which = ns.which
        cfg.depth_k = ns.depth
    elif ns.command == "classify":
        cfg.series_text = ns.series
    elif ns.command == "verify":
        cfg.what = ns.what
    elif ns.command == "oracle":
        cfg.samples = ns.samples
    return cfg


# ---------------------------------------------------------------------------
# JSON rendering helpers
# ---------------------------------------------------------------------------


def _lead_json(lead) -> dict:
    return {
        "p_lead": format_unipoly(lead.p_lead),
        "p_exp": lead.p_exp,
        "q_lead": format_unipoly(lead.q_lead),
        "q_exp": lead.q_exp,
        "jac_lead": format_unipoly(lead.jac_lead),
        "jac_exp": lead.jac_exp,
        "mult": lead.mult,
    }


def _node_json(node: ExpansionNode) -> dict:
    return {
        "series": format_series(node.series),
        "chosen_c": str(node.chosen_c) if node.chosen_c is not None else None,
        "status": node.status,
        "lead": _lead_json(node.lead),
        "note": node.note,
        "children": [_node_json(ch) for ch in node.children],
    }


def _check_json(rep: CheckReport) -> dict:
    return {
        "name": rep.name,
        "status": rep.status,
        "data": _plain(rep.data),
        "items": _plain(rep.items),
    }


def _plain(obj):
    """Recursively coerce report payloads into JSON-stable primitives."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def run(config: RunConfig) -> Tuple[int, dict]:
    """Execute one command; returns (exit code, canonical report dict)."""
    try:
        p_raw, q_raw = parse_map(config.map_text)
        f = normalize_monic(p_raw, q_raw)
    except (ParseError, PreconditionFailed) as exc:
        return EXIT_INPUT, _error_report(config, str(exc))
    report = {
        "map": {"P": format_poly(f.p), "Q": format_poly(f.q), "shear": f.shear},
        "command": config.command,
        "result": None,
        "checks": [],
        "signs": {"sigma": 1, "sigma_prime": 1},
        "unresolved": [],
    }
    code = EXIT_OK
    try:
        if config.command == "branches":
            g = f.p if config.which == "P" else f.q
            branches = curve_branches(g, config.depth_k)
            report["result"] = {
                "which": config.which,
                "branches": [
                    {
                        "series": format_branch(b),
                        "mult": b.mult,
                        "truncation_k": b.truncation_k,
                    }
                    for b in branches
                ],
            }
        elif config.command == "tree":
            tree = expansion_tree(f, config.caps)
            report["result"] = _node_json(tree)
            report["unresolved"] = [
                {"status": n.status, "note": n.note}
                for n in tree.walk()
                if n.status in ("depth_capped", "extension_required")
            ]
        elif config.command == "classify":
            phi = parse_series(config.series_text or "")
            lead = leading_data(f, phi)
            flags = classify(lead)
            report["result"] = {
                "series": format_series(phi),
                "lead": _lead_json(lead),
                "flags": {
                    "horizontal_P": flags.horizontal_p,
                    "horizontal_Q": flags.horizontal_q,
                    "dicritical": flags.dicritical,
                    "singular": flags.singular,
                },
            }
        elif config.command == "valueset":
            vs = nonproper_value_set(f, config.caps)
            report["result"] = {
                "components": [
                    {
                        "u": format_unipoly(c.u),
                        "v": format_unipoly(c.v),
                        "source": format_series(c.source),
                        "u_is_limit_zero": c.u_is_limit_zero,
                        "v_is_limit_zero": c.v_is_limit_zero,
                    }
                    for c in vs.components
                ],
                "lower_bound_only": bool(vs.unresolved),
            }
            report["unresolved"] = _plain(vs.unresolved)
            if vs.unresolved:
                code = EXIT_UNRESOLVED
        elif config.command == "verify":
            vr = run_all_checks(f, config.caps, config.what)
            report["checks"] = [_check_json(c) for c in vr.checks]
            report["signs"] = _plain(vr.signs)
            report["unresolved"] = _plain(vr.unresolved)
            report["result"] = {
                "counterexample": vr.counterexample(),
                "statuses": {c.name: c.status for c in vr.checks},
            }
            if vr.counterexample():
                code = EXIT_COUNTEREXAMPLE
            elif vr.unresolved:
                code = EXIT_UNRESOLVED
        elif config.command == "oracle":
            report["result"] = _run_oracle(f, config)
    except ParseError as exc:
        return EXIT_INPUT, _error_report(config, str(exc))
    return code, report


def _run_oracle(f: MapPair, config: RunConfig) -> dict:
    vs = nonproper_value_set(f, config.caps)
    samples = []
    sample_params = [Scalar.of(k) for k in (0, 1, 2, -1, 3)]
    for comp in vs.components:
        for c in sample_params:
            target = (comp.u.evaluate(c).to_complex(), comp.v.evaluate(c).to_complex())
            rep = branch_limit_sample(
                f, comp.source, c, target, config.radii, config.tol
            )
            samples.append(
                {
                    "component": format_unipoly(comp.u) + format_unipoly(comp.v),
                    "c": str(c),
                    "errors": rep.errors,
                    "converged": rep.converged,
                }
            )
    aligned = [(comp.source, Scalar.of(1)) for comp in vs.components]
    probe = properness_probe(
        f, config.samples, config.radii[-1], aligned, seed=config.seed
    )
    consistent = bool(probe.clusters) == bool(vs.components)
    return {
        "samples": samples,
        "probe": {
            "bounded_fraction": probe.bounded_fraction,
            "cluster_count": len(probe.clusters),
            "consistent_with_exact": consistent,
        },
    }


def _error_report(config: RunConfig, message: str) -> dict:
    return {
        "map": None,
        "command": config.command,
        "result": None,
        "checks": [],
        "signs": {"sigma": 1, "sigma_prime": 1},
        "unresolved": [],
        "error": message,
    }


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    return _render_text(report)


def _render_text(report: dict) -> str:
    lines: List[str] = []
    if report.get("error"):
        lines.append(f"error: {report['error']}")
        return "\n".join(lines)
    m = report["map"]
    lines.append(f"map: P = {m['P']}; Q = {m['Q']} (shear {m['shear']})")
    result = report.get("result")
    cmd = report["command"]
    if cmd == "branches" and result:
        lines.append(f"branches of {result['which']}:")
        for b in result["branches"]:
            lines.append(f"  y = {b['series']}  [mult {b['mult']}]")
    elif cmd == "tree" and result:
        _render_node(result, lines, 0)
    elif cmd == "classify" and result:
        lines.append(f"series: {result['series']}")
        lead = result["lead"]
        lines.append(
            f"  P lead {lead['p_lead']} @ {lead['p_exp']}/{lead['mult']}; "
            f"Q lead {lead['q_lead']} @ {lead['q_exp']}/{lead['mult']}; "
            f"J lead {lead['jac_lead']} @ {lead['jac_exp']}/{lead['mult']}"
        )
        flags = result["flags"]
        lines.append(
            "  flags: "
            + ", ".join(k for k, v in sorted(flags.items()) if v)
        )
    elif cmd == "valueset" and result:
        if not result["components"]:
            lines.append("non-proper value set: empty (map is proper)")
        for comp in result["components"]:
            lines.append(
                f"  component u = {comp['u']}, v = {comp['v']} "
                f"(from window {comp['source']})"
            )
        if result["lower_bound_only"]:
            lines.append("  warning: unresolved leaves, list is a lower bound")
    elif cmd == "verify":
        for check in report["checks"]:
            lines.append(f"  {check['name']}: {check['status']}")
        lines.append(
            f"signs: sigma={report['signs']['sigma']} "
            f"sigma'={report['signs']['sigma_prime']}"
        )
    elif cmd == "oracle" and result:
        for s in result["samples"]:
            lines.append(
                f"  sample c={s['c']}: errors {s['errors']} "
                f"converged={s['converged']}"
            )
        probe = result["probe"]
        lines.append(
            f"  probe: bounded fraction {probe['bounded_fraction']:.3f}, "
            f"clusters {probe['cluster_count']}, "
            f"consistent={probe['consistent_with_exact']}"
        )
    if report.get("unresolved"):
        lines.append(f"unresolved: {report['unresolved']}")
    return "\n".join(lines)


def _render_node(node: dict, lines: List[str], depth: int) -> None:
    pad = "  " * depth
    lines.append(f"{pad}[{node['status']}] {node['series']}")
    for ch in node["children"]:
        _render_node(ch, lines, depth + 1)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        config = config_from_args(argv)
    except (ParseError, PreconditionFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        code, report = run(config)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(render(report, config.fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
