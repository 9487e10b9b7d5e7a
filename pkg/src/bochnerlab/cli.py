"""Batch command-line harness.

Commands: verify (Bochner identity on a map, per-node CSV + JSON
summary), flow (heat flow with trace CSV), report (pinching report
JSON), scan (parameter sweep, one report per CSV row), consistency
(falsification table over the harmonic catalog).

Exit codes: 0 all enabled assertions pass, 1 assertion failure,
2 usage error, 3 numerical error.  All floats are written with 17
significant digits so identical configs and seeds reproduce identical
bytes.  The environment variable BRL_THREADS caps worker threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bochner import compute_bochner, integral_identity_residual, pinching_bound_fields
from .catalog import parse_descriptor, parse_domain, parse_target
from .domains import ricci_min
from .errors import NumericalError, UsageError
from .flow import FlowParams, run_flow
from .io_utils import dump_json, json_dumps, write_csv
from .maps import catalog_map, load_map, save_map, total_energy
from .rigidity import (
    build_report,
    equality_diagnostics,
    grid_h,
    theorem_consistency_scan,
)
from .targets import sec_max_over_region

MIN_RESOLUTION = 8
VERIFY_RES_COEFF = 100.0  # residual band C h^2, calibrated on the catalog
PATH_AGREEMENT_TOL = 1e-8
RATIO_BAND = (3.0, 5.0)

CONSISTENCY_CATALOG = (
    ("constant", "sphere:r=1", "constant"),
    ("identity_sphere", "sphere:r=1", "identity"),
    ("radial_scaling(0.5)", "sphere:r=0.5", "scaling"),
    ("radial_scaling(1)", "sphere:r=1", "scaling"),
    ("radial_scaling(2)", "sphere:r=2", "scaling"),
    ("holomorphic_degree_2", "sphere:r=1", "holomorphic:k=2"),
    ("holomorphic_degree_3", "sphere:r=1", "holomorphic:k=3"),
)


def apply_thread_cap(env=os.environ):
    """Honor BRL_THREADS by capping the BLAS/OpenMP thread pools."""
    raw = env.get("BRL_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"BRL_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError("BRL_THREADS must be at least 1")
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        env.setdefault(var, str(n))
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(n)
    except ImportError:
        pass
    return n


def _resolution(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"resolution must be an integer: {text!r}")
    if n < MIN_RESOLUTION:
        raise argparse.ArgumentTypeError(
            f"resolution {n} below the minimum of {MIN_RESOLUTION} per axis"
        )
    return n


def _dt(text):
    if text == "auto":
        return "auto"
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--dt takes 'auto' or a number: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError("--dt must be positive")
    return v


def _add_common(sub):
    sub.add_argument("--domain", default="sphere:r=1", help="domain descriptor")
    sub.add_argument("--target", default="sphere:r=1", help="target descriptor")
    sub.add_argument(
        "--resolution",
        type=_resolution,
        default=64,
        help=f"latitude nodes n1 (>= {MIN_RESOLUTION}); n2 follows the domain kind",
    )
    sub.add_argument("--seed", type=int, default=0, help="seed for sampled extremizers")
    sub.add_argument("--json", default=None, help="write the JSON summary here")
    sub.add_argument("--config", default=None, help="JSON config file; flags override")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bochnerlab", description=__doc__.splitlines()[0]
    )
    subs = parser.add_subparsers(dest="command", required=True)
    registry = {}

    p = registry["verify"] = subs.add_parser(
        "verify", help="check the Bochner identity on a map"
    )
    _add_common(p)
    p.add_argument("--map", default=None, help="catalog map descriptor")
    p.add_argument("--load", default=None, help="saved-map path")
    p.add_argument("--refine", type=int, default=1, help="number of doubling levels")
    p.add_argument("--csv", default=None, help="write the per-node CSV here")

    p = registry["flow"] = subs.add_parser("flow", help="run the heat flow")
    _add_common(p)
    p.add_argument("--init", default=None, help="catalog map descriptor")
    p.add_argument("--load", default=None, help="saved-map path")
    p.add_argument("--dt", type=_dt, default="auto", help="'auto' or a step size")
    p.add_argument("--steps", type=int, default=10000, help="step budget")
    p.add_argument("--tol", type=float, default=1e-6, help="tension stopping tolerance")
    p.add_argument(
        "--collapse-tol", type=float, default=1e-3, help="diameter collapse tolerance"
    )
    p.add_argument("--save", default=None, help="write the final map here")
    p.add_argument("--trace", default=None, help="write the step trace CSV here")
    p.add_argument(
        "--trace-stride", type=int, default=1, help="record every k-th step"
    )

    p = registry["report"] = subs.add_parser("report", help="build a pinching report")
    _add_common(p)
    p.add_argument("--map", default=None, help="catalog map descriptor")
    p.add_argument("--load", default=None, help="saved-map path")
    p.add_argument(
        "--global-sample",
        type=int,
        default=0,
        help="also extremize curvature over this many whole-target samples",
    )

    p = registry["scan"] = subs.add_parser(
        "scan", help="sweep a target parameter, one report per row"
    )
    _add_common(p)
    p.add_argument("--map", default=None, help="catalog map descriptor")
    p.add_argument(
        "--param",
        required=True,
        help="sweep grammar key=start:stop:step over the target descriptor",
    )
    p.add_argument("--csv", default=None, help="write the sweep table here")

    p = registry["consistency"] = subs.add_parser(
        "consistency", help="falsification scan over the harmonic catalog"
    )
    _add_common(p)

    return parser, registry


def parse_config(argv):
    """Parse flags, merging in a JSON config file if one is named."""
    parser, registry = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        try:
            with open(ns.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        sub = registry[ns.command]
        known = {a.dest for a in sub._actions} - {"help", "config"}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        sub.set_defaults(**cfg)
        ns = parser.parse_args(argv)  # explicit flags override file values
    return ns


def _build_map(ns, attr="map"):
    name = getattr(ns, attr, None)
    path = getattr(ns, "load", None)
    if name and path:
        raise UsageError("give either a catalog map or a saved map, not both")
    if path:
        return load_map(path)
    if not name:
        raise UsageError("a map source is required (catalog name or saved map)")
    dom = parse_domain(ns.domain, ns.resolution)
    tgt = parse_target(ns.target)
    return catalog_map(name, dom, tgt)


def _provenance(ns):
    keys = ("command", "domain", "target", "resolution", "seed")
    return {k: getattr(ns, k) for k in keys if hasattr(ns, k)}


def _emit(ns, payload):
    text = json_dumps(payload)
    if ns.json:
        with open(ns.json, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verify_level(f, seed):
    dom = f.domain
    h = grid_h(dom)
    data = compute_bochner(f)
    tol = VERIFY_RES_COEFF * h * h
    harmonic = data.sup_tension <= 30.0 * h * h
    vol = dom.volume()
    return data, {
        "resolution": [dom.n1, dom.n2],
        "h": h,
        "sup_residual": data.sup_residual,
        "sup_tension": data.sup_tension,
        "path_disagreement": data.path_disagreement,
        "residual_tol": tol,
        "harmonic": harmonic,
        "energy": total_energy(f),
        "integral_identity_residual": integral_identity_residual(f, data),
        "volume": vol,
        "constraint_residual": f.max_constraint_residual(),
    }


def cmd_verify(ns):
    if ns.refine < 1:
        raise UsageError("--refine must be at least 1")
    if ns.load and ns.refine > 1:
        raise UsageError("refinement levels need a catalog map, not a saved map")
    f = _build_map(ns)
    levels = []
    data = None
    for lev in range(ns.refine):
        if lev:
            dom = f.domain.with_resolution(2 * f.domain.n1)
            f = catalog_map(ns.map, dom, f.target)
        data, summary = _verify_level(f, ns.seed)
        levels.append(summary)

    ratios = [
        levels[i]["sup_residual"] / max(levels[i + 1]["sup_residual"], 1e-300)
        for i in range(len(levels) - 1)
    ]
    checks = {}
    checks["constraint"] = all(s["constraint_residual"] <= 1e-8 for s in levels)
    checks["path_agreement"] = all(
        s["path_disagreement"] <= PATH_AGREEMENT_TOL for s in levels
    )
    harmonic = all(s["harmonic"] for s in levels)
    if harmonic:
        checks["residual_band"] = all(
            s["sup_residual"] <= s["residual_tol"] for s in levels
        )
        if ratios:
            checks["refinement_ratio"] = all(
                RATIO_BAND[0] <= r <= RATIO_BAND[1] for r in ratios
            )
    passed = all(checks.values())

    if ns.csv:
        _write_node_csv(ns, f, data)

    payload = {
        "provenance": _provenance(ns),
        "map": ns.map or ns.load,
        "levels": levels,
        "residual_ratios": ratios,
        "ratio_band": list(RATIO_BAND),
        "harmonic": harmonic,
        "checks": checks,
        "passed": passed,
    }
    _emit(ns, payload)
    return 0 if passed else 1


def _write_node_csv(ns, f, data):
    dom, tgt = f.domain, f.target
    rmin, _ = ricci_min(dom)
    sec_max, _ = sec_max_over_region(
        tgt, f.values.reshape(-1, tgt.m)[:: max(1, f.values.shape[0] * f.values.shape[1] // 2048)],
        seed=ns.seed,
    )
    sec_max = max(float(sec_max), 0.0)
    _, _, slack = pinching_bound_fields(f, rmin, sec_max, data)
    n = dom.n
    header = (
        ["i", "j", "e"]
        + [f"lam{k + 1}" for k in range(n)]
        + ["ricci_term", "target_term", "Q", "hess", "lap", "residual", "slack"]
    )
    rows = []
    for i in range(dom.n1):
        for j in range(dom.n2):
            rows.append(
                [i, j, data.e[i, j]]
                + [data.lam[i, j, k] for k in range(n)]
                + [
                    data.ricci[i, j],
                    data.target[i, j],
                    data.Q[i, j],
                    data.hess[i, j],
                    data.lap[i, j],
                    data.residual[i, j],
                    slack[i, j],
                ]
            )
    write_csv(ns.csv, header, rows)


def cmd_flow(ns):
    f0 = _build_map(ns, attr="init")
    params = FlowParams(
        dt=None if ns.dt == "auto" else ns.dt,
        max_steps=ns.steps,
        tension_tol=ns.tol,
        collapse_tol=ns.collapse_tol,
        snapshot_stride=ns.trace_stride if ns.trace else 0,
    )
    f, summary = run_flow(f0, params)
    if ns.save:
        save_map(f, ns.save)
    if ns.trace:
        write_csv(
            ns.trace,
            ["step", "energy", "sup_tension", "image_diameter", "e_max"],
            summary.trace,
        )
    energies = np.asarray(summary.energies)
    monotone = bool(np.all(np.diff(energies) <= 1e-10))
    passed = monotone and summary.outcome != "max_steps"
    payload = {
        "provenance": _provenance(ns),
        "init": ns.init or ns.load,
        "dt": summary.dt,
        "steps": summary.steps,
        "outcome": summary.outcome,
        "final_tension": summary.final_tension,
        "final_diameter": summary.final_diameter,
        "energy_initial": float(energies[0]),
        "energy_final": float(energies[-1]),
        "energy_monotone": monotone,
        "passed": passed,
    }
    _emit(ns, payload)
    return 0 if passed else 1


def cmd_report(ns):
    f = _build_map(ns)
    rep = build_report(f, seed=ns.seed, global_sample=ns.global_sample)
    payload = {"provenance": _provenance(ns), "report": rep.to_dict()}
    if rep.classification == "equality" and not rep.is_constant:
        diag = equality_diagnostics(f, rep)
        payload["equality_diagnostics"] = {
            "hess_sup": diag.hess_sup,
            "lambda_spread": diag.lambda_spread,
            "energy_density_variation": diag.energy_density_variation,
            "homothety_factor": diag.homothety_factor,
            "affine_fit_residual": diag.affine_fit_residual,
            "tol": diag.tol,
            "ok": diag.ok,
        }
    _emit(ns, payload)
    return 0


def _sweep_values(spec):
    key, sep, rng = spec.partition("=")
    if not sep:
        raise UsageError(f"--param needs key=start:stop:step, got {spec!r}")
    parts = rng.split(":")
    if len(parts) != 3:
        raise UsageError(f"--param needs key=start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError as exc:
        raise UsageError(f"non-numeric sweep bound in {spec!r}") from exc
    if step <= 0 or stop < start:
        raise UsageError("sweep needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return key.strip(), [start + i * step for i in range(count)]


_SCAN_COLUMNS = (
    "classification",
    "margin",
    "tol",
    "ric_min",
    "sec_max_image",
    "S0",
    "e_max",
    "threshold_S0",
    "threshold_e",
    "sup_tension",
    "harmonic",
    "is_constant",
    "hess_sup",
    "lambda_spread",
    "homothety_factor",
    "seed",
)


def cmd_scan(ns):
    if not ns.map:
        raise UsageError("scan needs a catalog map")
    key, values = _sweep_values(ns.param)
    kind, params = parse_descriptor(ns.target)
    rows = []
    reports = []
    ok = True
    for v in values:
        params[key] = v
        desc = kind + ":" + ",".join(f"{k}={params[k]!r}" for k in sorted(params))
        dom = parse_domain(ns.domain, ns.resolution)
        tgt = parse_target(desc)
        f = catalog_map(ns.map, dom, tgt)
        rep = build_report(f, seed=ns.seed)
        d = rep.to_dict()
        d["sweep_key"] = key
        d["sweep_value"] = v
        reports.append(d)
        rows.append([v, rep.domain, rep.target] + [d[c] for c in _SCAN_COLUMNS])
        if rep.harmonic and not rep.is_constant and rep.margin > rep.tol:
            ok = False
    if ns.csv:
        write_csv(ns.csv, [key, "domain", "target"] + list(_SCAN_COLUMNS), rows)
    payload = {
        "provenance": _provenance(ns),
        "map": ns.map,
        "sweep": {"key": key, "values": values},
        "reports": reports,
        "passed": ok,
    }
    _emit(ns, payload)
    return 0 if ok else 1


def cmd_consistency(ns):
    entries = []
    for name, tgt_desc, map_name in CONSISTENCY_CATALOG:
        dom = parse_domain(ns.domain, ns.resolution)
        tgt = parse_target(tgt_desc)
        entries.append((name, catalog_map(map_name, dom, tgt)))
    result = theorem_consistency_scan(entries, seed=ns.seed)
    sys.stdout.write(result.table() + "\n")
    payload = {
        "provenance": _provenance(ns),
        "rows": [vars(r) for r in result.rows],
        "passed": result.ok,
    }
    if ns.json:
        dump_json(payload, ns.json)
    return 0 if result.ok else 1


_COMMANDS = {
    "verify": cmd_verify,
    "flow": cmd_flow,
    "report": cmd_report,
    "scan": cmd_scan,
    "consistency": cmd_consistency,
}


def run(ns):
    return _COMMANDS[ns.command](ns)


def main(argv=None):
    try:
        apply_thread_cap()
        ns = parse_config(sys.argv[1:] if argv is None else argv)
        return run(ns)
    except UsageError as exc:
        sys.stderr.write(json_dumps({"error": "usage", "message": str(exc)}))
        return 2
    except NumericalError as exc:
        sys.stderr.write(
            json_dumps({"error": type(exc).__name__, "message": str(exc)})
        )
        return 3


if __name__ == "__main__":
    sys.exit(main())
