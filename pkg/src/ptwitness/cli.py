"""Command-line front end.

Exit codes: 0 command completed (whatever the verdict), 2 malformed input,
3 inadequate Fock truncation, 4 oracle requested for a bare moment table.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import criteria
from .errors import DegreeError, SpecError, TruncationError
from .moments import MomentTable
from .opalg import enumerate_indices
from .states import StateSpec, build, min_eigenvalue, partial_transpose

SCHEMA = "v1"
COMMANDS = ("moments", "scan", "minors", "criteria", "oracle")
ORACLE_TOL = 1e-9
DUAN_RS = np.concatenate([-np.geomspace(0.1, 10.0, 41), np.geomspace(0.1, 10.0, 41)])


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def load_input(path, allow_truncation=False):
    """Return ``(table, state_or_None, label)`` for a state spec or moment-table file."""
    try:
        with open(path) as fh:
            text = fh.read()
        doc = json.loads(text)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", 2) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON: {exc}", 2) from exc
    try:
        if isinstance(doc, dict) and "kind" in doc:
            spec = StateSpec.from_dict(doc)
            state = build(spec, allow_truncation=allow_truncation)
            return MomentTable.from_state(state), state, spec.kind
        if isinstance(doc, list) or (isinstance(doc, dict) and "moments" in doc):
            table = MomentTable.from_json(text)
            return table, None, table.label
    except TruncationError as exc:
        raise CliError(str(exc), 3) from exc
    except (SpecError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", 2) from exc
    raise CliError(f"{path}: neither a state spec nor a moment table", 2)


def _c(z):
    return [float(z.real), float(z.imag)]


def cmd_moments(table, state, cfg):
    count = cfg.nmax
    rows = []
    for u in enumerate_indices(count):
        rows.append({"index": list(u), "value": _c(table.moment(u)), "pt_value": _c(table.pt_moment(u))})
    return {"command": "moments", "count": count, "moments": rows}


def _scan_payload(scan, cfg):
    v = scan.verdict
    return {
        "command": "scan",
        "n_max": cfg.nmax,
        "tolerance": cfg.tol,
        "determinants": [
            {"N": n, "index": list(u), "value": d, "scale": s, "normalized": d / s}
            for n, (u, d, s) in enumerate(zip(scan.indices, scan.determinants, scan.scales), start=1)
        ],
        "verdict": _verdict_payload(v),
    }


def _verdict_payload(v):
    return {
        "kind": v.kind,
        "order_reached": v.order_reached,
        "witness_indices": [list(u) for u in v.witness[0]] if v.witness else [],
        "witness_value": v.witness[1] if v.witness else None,
    }


def cmd_scan(table, state, cfg):
    return _scan_payload(criteria.hierarchy_scan(table, cfg.nmax, cfg.tol), cfg)


def _pool(table, nmax):
    return [u for u in enumerate_indices(nmax) if 2 * u.degree <= table.max_degree]


def cmd_minors(table, state, cfg):
    pool = _pool(table, cfg.nmax)
    res = criteria.principal_minor_search(table, pool, cfg.max_size)
    return {
        "command": "minors",
        "pool": [list(u) for u in pool],
        "max_size": cfg.max_size,
        "exhaustive": res.exhaustive,
        "value": res.value,
        "normalized": res.normalized,
        "indices": [list(u) for u in res.indices],
        "verdict": _verdict_payload(res.verdict(cfg.tol)),
    }


def _safe(name, fn, basis_label="", witness=None):
    try:
        return criteria.criterion_report(name, fn(), 0.0, witness, basis_label)
    except DegreeError as exc:
        return {
            "schema": SCHEMA,
            "criterion": name,
            "value": None,
            "threshold": 0.0,
            "verdict": criteria.INCONCLUSIVE,
            "witness_indices": [],
            "basis_label": basis_label,
            "note": str(exc),
        }


def cmd_criteria(table, state, cfg):
    reports = [
        _safe("simon", lambda: criteria.simon_S(table), "quadratures"),
        _safe("duan", lambda: min(criteria.duan(table, r) for r in DUAN_RS), "|r| in [0.1, 10], both signs"),
        _safe("duan_min", lambda: criteria.duan_min(table), "product form"),
        _safe("d", lambda: criteria.det_d(table), criteria.D_BASIS.label, [(0, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1)]),
        _safe("s", lambda: criteria.det_s(table), criteria.S_BASIS.label, [(0, 0, 0, 0), (0, 0, 0, 1), (0, 1, 0, 1)]),
    ]
    pool = _pool(table, cfg.nmax)
    for i, u in enumerate(pool):
        for v in pool[i + 1:]:
            reports.append(
                _safe("two_term", lambda u=u, v=v: criteria.two_term_condition(table, u, v), "two-term", [u, v])
            )
    return {"command": "criteria", "reports": reports}


def cmd_oracle(table, state, cfg):
    if state is None:
        raise CliError("the oracle needs a full state; a moment table is not enough", 4)
    eig = min_eigenvalue(partial_transpose(state))
    scan = criteria.hierarchy_scan(table, cfg.nmax, cfg.tol)
    npt_oracle = eig < -ORACLE_TOL
    return {
        "command": "oracle",
        "min_eigenvalue": eig,
        "oracle_npt": npt_oracle,
        "scan_verdict": _verdict_payload(scan.verdict),
        "agreement": not (scan.verdict.npt and not npt_oracle),
    }


HANDLERS = {
    "moments": cmd_moments,
    "scan": cmd_scan,
    "minors": cmd_minors,
    "criteria": cmd_criteria,
    "oracle": cmd_oracle,
}


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, list):
        return " ".join(_fmt(v) for v in x)
    return str(x)


def to_csv(payload):
    cmd = payload["command"]
    lines = []
    if cmd == "moments":
        lines.append("index,re,im,pt_re,pt_im")
        for r in payload["moments"]:
            lines.append(",".join([_fmt(r["index"]), *map(_fmt, r["value"]), *map(_fmt, r["pt_value"])]))
    elif cmd == "scan":
        lines.append("N,index,D_N,scale,normalized")
        for r in payload["determinants"]:
            lines.append(",".join(_fmt(r[k]) for k in ("N", "index", "value", "scale", "normalized")))
    elif cmd == "criteria":
        lines.append("criterion,value,threshold,verdict,witness_indices")
        for r in payload["reports"]:
            wit = ";".join(_fmt(u) for u in r["witness_indices"])
            lines.append(",".join([r["criterion"], _fmt(r["value"]), _fmt(r["threshold"]), r["verdict"], wit]))
    elif cmd == "minors":
        lines.append("value,normalized,indices,verdict")
        lines.append(
            ",".join([_fmt(payload["value"]), _fmt(payload["normalized"]),
                      ";".join(_fmt(u) for u in payload["indices"]), payload["verdict"]["kind"]])
        )
    else:
        lines.append("min_eigenvalue,oracle_npt,scan_verdict,agreement")
        lines.append(
            ",".join([_fmt(payload["min_eigenvalue"]), str(payload["oracle_npt"]).lower(),
                      payload["scan_verdict"]["kind"], str(payload["agreement"]).lower()])
        )
    return "\n".join(lines) + "\n"


def to_text(payload):
    cmd = payload["command"]
    out = [f"# {cmd} ({payload['input']})"]
    if cmd == "moments":
        for r in payload["moments"]:
            out.append(f"{tuple(r['index'])}: {complex(*r['value'])}  PT: {complex(*r['pt_value'])}")
    elif cmd == "scan":
        for r in payload["determinants"]:
            out.append(f"D_{r['N']:<3d} = {r['value']: .6e}   (normalized {r['normalized']: .3e})")
        out.append(f"verdict: {payload['verdict']['kind']} (order {payload['verdict']['order_reached']})")
    elif cmd == "criteria":
        for r in payload["reports"]:
            val = "n/a" if r["value"] is None else f"{r['value']: .6e}"
            wit = f"  {r['witness_indices']}" if r["criterion"] == "two_term" else ""
            out.append(f"{r['criterion']:<9s} {val}  {r['verdict']}{wit}")
    elif cmd == "minors":
        out.append(f"most negative minor {payload['value']: .6e} on {payload['indices']}")
        out.append(f"verdict: {payload['verdict']['kind']}")
    else:
        out.append(f"min eigenvalue of PT: {payload['min_eigenvalue']: .6e}")
        out.append(f"scan verdict: {payload['scan_verdict']['kind']}; agreement: {payload['agreement']}")
    return "\n".join(out) + "\n"


def render(payload, fmt):
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        return to_csv(payload)
    return to_text(payload)


def make_parser():
    p = argparse.ArgumentParser(prog="ptwitness", description=__doc__.splitlines()[0])
    p.add_argument("--input", required=True, help="state spec JSON or moment-table JSON")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--nmax", type=int, default=10, help="hierarchy order / number of moments / pool size")
    p.add_argument("--tol", type=float, default=1e-8, help="relative tolerance for negative determinants")
    p.add_argument("--format", default="json", choices=("json", "csv", "text"))
    p.add_argument("--allow-truncation", action="store_true", help="build states despite a large tail mass")
    p.add_argument("--max-size", type=int, default=3, help="largest principal minor for 'minors'")
    return p


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    cfg = make_parser().parse_args(argv)
    if cfg.nmax < 1 or not cfg.tol > 0 or cfg.max_size < 1:
        print("error: --nmax and --max-size must be >= 1 and --tol > 0", file=stderr)
        return 2
    try:
        table, state, label = load_input(cfg.input, cfg.allow_truncation)
        payload = HANDLERS[cfg.command](table, state, cfg)
    except CliError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.code
    except DegreeError as exc:
        print(f"error: {exc}", file=stderr)
        return 3
    payload = {"schema": SCHEMA, "input": label, **payload}
    stdout.write(render(payload, cfg.format))
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
