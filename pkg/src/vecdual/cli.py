"""Command-line scenario runner.

Subcommands::

    vecdual run   --scenario FILE [--out DIR] [--seed N] [--probe-res N] [--quiet]
    vecdual check --scenario FILE
    vecdual p1    [--out DIR] [--probe-res N] [--quiet]

Exit codes: 0 success, 2 a checked invariant failed, 3 I/O or schema error
(a one-line JSON diagnostic is written to stderr).  Reports are sorted-key
JSON without timestamps, so identical inputs give byte-identical files.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from vecdual import __version__
from vecdual.io import (SchemaError, emit_front_csv, load_scenario, map_values, parse_cone,
                        parse_grid, tolerances, write_json)

__all__ = ["main", "run_scenario", "EXIT_OK", "EXIT_ASSERT", "EXIT_IO"]

EXIT_OK, EXIT_ASSERT, EXIT_IO = 0, 2, 3

P1_SCENARIO = {"name": "example_p1", "task": "example_p1", "seed": 0,
               "grids": {"x_step": 1e-3, "z_step": 0.05, "op_step": 0.1}}


def _log(quiet, msg):
    if not quiet:
        print(msg, file=sys.stderr)


def _cone_constrained(inst):
    """Build a perturbation problem ``Phi(x, z) = F(x) + B z`` on ``G(x) + z in -S``."""
    from vecdual.perturbation import build_cone_constrained, operator_grid

    K = parse_cone(inst["K"], "$.instance.K")
    S = parse_cone(inst["S"], "$.instance.S")
    X = parse_grid(inst["x_grid"], "$.instance.x_grid")
    Z = parse_grid(inst["z_grid"], "$.instance.z_grid", dim=S.dim)
    F = map_values(inst["F"], X, K.dim, "$.instance.F")
    G = map_values(inst["G"], X, S.dim, "$.instance.G")
    B = np.asarray(inst.get("B", np.zeros((K.dim, S.dim))), dtype=float)
    if B.size != K.dim * S.dim:
        raise SchemaError("$.instance.B", f"expected a {K.dim}x{S.dim} matrix")
    ops = ()
    if "operator_grid" in inst:
        og = inst["operator_grid"]
        vals = parse_grid(og.get("values", [0.0]), "$.instance.operator_grid.values")
        ops = operator_grid((K.dim, S.dim), np.ravel(vals))
    try:
        return build_cone_constrained(X, Z, F, G, B, K, S, ops, name=inst.get("name", "instance"))
    except ValueError as exc:
        raise SchemaError("$.instance", str(exc)) from None


def _window(spec, default):
    if spec is None:
        return np.asarray(default, dtype=float)
    return np.asarray(spec, dtype=float).reshape(-1, 2)


def _probe_step(window, res):
    W = np.asarray(window, dtype=float)
    span = float(np.max(W[:, 1] - W[:, 0]))
    return span / max(res - 1, 1) if span > 0 else 1.0


def _task_example_p1(sc, out, res, quiet):
    from vecdual.perturbation import (P1_WINDOW, example_p1, p1_filters, p1_front_distance)

    g = sc.get("grids", {})
    tol = sc.get("tolerances", {})
    t0 = time.perf_counter()
    P, rep = example_p1(x_step=g.get("x_step", 1e-3), z_step=g.get("z_step", 0.05),
                        op_step=g.get("op_step", 0.1))
    adm_ok, pos_ok, n_adm, n_pos = p1_filters(P)
    dist = p1_front_distance(rep.primal_front)
    _log(quiet, f"example_p1: {time.perf_counter() - t0:.1f} s")
    h_tol = tol.get("hausdorff", 2e-3)
    checks = {"weak_duality": rep.weak_duality_ok, "dual_filter_matches": adm_ok,
              "loose_filter_matches": pos_ok, "primal_front_hausdorff_ok": dist <= h_tol}
    step = _probe_step(P1_WINDOW, res)
    n = emit_front_csv(rep.primal_front, P1_WINDOW, step, os.path.join(out, "p1_primal_front.csv"))
    emit_front_csv(rep.dual_front, P1_WINDOW, step, os.path.join(out, "p1_dual_front.csv"))
    emit_front_csv(rep.loose_dual_front, P1_WINDOW, step, os.path.join(out, "p1_loose_dual_front.csv"))
    body = {"report": rep.to_dict(), "n_admissible": n_adm, "n_positive": n_pos,
            "primal_front_hausdorff": dist, "hausdorff_tolerance": h_tol, "csv_rows": n,
            "probe_step": step}
    return checks, body


def _task_primal_dual(sc, out, res, quiet, task):
    from vecdual.perturbation import primal_value, strong_duality_check

    P = _cone_constrained(sc["instance"])
    if task == "primal":
        front = primal_value(P)
        window = _window(sc.get("window"), _pad_window(front.generators))
        emit_front_csv(front, window, _probe_step(window, res), os.path.join(out, "primal_front.csv"))
        return {"primal_front_finite": front.is_finite}, {"grid_id": P.grid_id,
                                                          "primal_front": front.to_dict(),
                                                          "window": window}
    rep = strong_duality_check(P, None, tolerance=sc.get("tolerances", {}).get("gap", 1e-6),
                               window=sc.get("window"))
    window = np.asarray(rep.window)
    step = _probe_step(window, res)
    emit_front_csv(rep.primal_front, window, step, os.path.join(out, "primal_front.csv"))
    if rep.dual_front.is_finite:
        emit_front_csv(rep.dual_front, window, step, os.path.join(out, "dual_front.csv"))
    return {"weak_duality": rep.weak_duality_ok}, {"report": rep.to_dict()}


def _pad_window(G, pad=1.0):
    return np.column_stack([G.min(axis=0) - pad, G.max(axis=0) + pad])


def _L_and_y(sc, P):
    g = sc.get("grids", {})
    m, n = P.dim, P.x_samples.shape[1]
    L_grid = [np.asarray(L, dtype=float).reshape(m, n) for L in g.get("L", [np.zeros((m, n)).tolist()])]
    y_grid = parse_grid(g["y"], "$.grids.y", dim=m) if "y" in g else None
    if y_grid is None:
        raise SchemaError("$.grids.y", "missing probe grid")
    return L_grid, y_grid.reshape(-1, m)


def _task_farkas(sc, out, res, quiet, task):
    from vecdual.farkas import check_farkas_equivalence, verify_M_representation

    P = _cone_constrained(sc["instance"])
    L_grid, y_grid = _L_and_y(sc, P)
    mode = sc.get("mode", "M")
    alpha = sc.get("alpha", "samples")
    if task == "farkas":
        rep = check_farkas_equivalence(P, L_grid, y_grid, mode=mode, alpha=alpha)
        checks = {"soundness": rep.soundness_violations == 0, "gamma_implies_beta": rep.gamma_without_beta == 0}
    else:
        rep = verify_M_representation(P, L_grid, y_grid, mode=mode, alpha=alpha)
        checks = {"no_superset_violation": rep.superset_violations == 0}
    return checks, {"grid_id": P.grid_id, "report": rep.to_dict()}


def _task_a2(sc, out, res, quiet):
    from vecdual.scalar_fl import (DUAL_VARIANTS, ScalarInstance, build_scalar_dual,
                                   scalar_crosscheck, scalar_primal, slater_point, verify_A2)

    try:
        inst = ScalarInstance.from_dict(sc["instance"])
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaError("$.instance", str(exc)) from None
    rng = np.random.default_rng(sc["seed"])
    probes = sc.get("probes")
    if probes is None:
        xs = rng.integers(-4, 5, (sc.get("n_probes", 20), inst.n)) / 2.0
        rs = rng.integers(-4, 5, len(xs)) / 2.0
        probes = [(x, r) for x, r in zip(xs, rs)]
    else:
        probes = [(np.asarray(p[0], dtype=float), float(p[1])) for p in probes]
    a2 = verify_A2(inst, probes)
    primal = scalar_primal(inst).value
    duals = {v: build_scalar_dual(inst, v) for v in DUAL_VARIANTS}
    tol = sc.get("tolerances", {}).get("value", 1e-6)
    slater = slater_point(inst) is not None
    weak = all(d[0] <= primal + 1e-8 for d in duals.values())
    chain = all(duals[v + "l"][0] <= duals[v][0] + 1e-8 for v in ("CCD1", "CCD2", "CCD3"))
    checks = {"rhs_subset_lhs": a2.rhs_not_lhs == 0, "weak_duality": weak, "variant_chain": chain}
    if slater:
        checks["a2_agreement"] = a2.all_agree
        checks["strong_duality"] = all(abs(d[0] - primal) <= tol for d in duals.values())
    try:
        cc = scalar_crosscheck(inst, [p[0] for p in probes], tol=tol)
        checks["crosscheck"] = cc
    except ValueError as exc:
        _log(quiet, f"crosscheck skipped: {exc}")
    body = {"slater": slater, "primal_value": primal,
            "duals": {v: {"value": d[0], "multipliers": d[1]} for v, d in duals.items()},
            "a2": a2.to_dict()}
    return checks, body


def _task_properties(sc, out, res, quiet):
    from vecdual.properties import bridge_suite, weak_sets_suite

    g = sc.get("grids", {})
    seed = sc["seed"]
    ws = weak_sets_suite(n2=g.get("n2", 100), n3=g.get("n3", 50), seed=seed,
                         res2=g.get("res2", 101), res3=g.get("res3", 41))
    br = bridge_suite(n_maps=g.get("n_maps", 100), seed=seed)
    return {"weak_sets": ws.ok, "bridge": br.ok}, {"weak_sets": ws.to_dict(), "bridge": br.to_dict()}


def run_scenario(sc, out, probe_res=None, quiet=False):
    """Run a validated scenario dictionary; returns ``(exit_code, report)``."""
    task = sc["task"]
    res = probe_res or sc.get("probe_res", 81)
    os.makedirs(out, exist_ok=True)
    if task == "example_p1":
        checks, body = _task_example_p1(sc, out, res, quiet)
    elif task in ("primal", "dual"):
        checks, body = _task_primal_dual(sc, out, res, quiet, task)
    elif task in ("farkas", "representation"):
        checks, body = _task_farkas(sc, out, res, quiet, task)
    elif task == "a2":
        checks, body = _task_a2(sc, out, res, quiet)
    else:
        checks, body = _task_properties(sc, out, res, quiet)
    checks = {k: bool(v) for k, v in checks.items()}
    report = {"scenario": sc["name"], "task": task, "seed": sc["seed"], "version": __version__,
              "tolerances": {**tolerances(), **sc.get("tolerances", {})},
              "grids": sc.get("grids", {}), "probe_res": res,
              "sampling": "sampled relaxation: quantifiers range over the stored sample grids",
              "checks": checks, "passed": all(checks.values()), **body}
    write_json(report, os.path.join(out, f"{sc['name']}_report.json"))
    for name, ok in sorted(checks.items()):
        _log(quiet, f"{'PASS' if ok else 'FAIL'} {name}")
    return (EXIT_OK if report["passed"] else EXIT_ASSERT), report


def _io_error(exc):
    if isinstance(exc, json.JSONDecodeError):
        diag = {"error": "malformed JSON", "message": exc.msg, "line": exc.lineno, "column": exc.colno}
    elif isinstance(exc, SchemaError):
        diag = exc.to_dict()
    else:
        diag = {"error": "io", "message": str(exc)}
    print(json.dumps(diag, sort_keys=True), file=sys.stderr)
    return EXIT_IO


def _parser():
    ap = argparse.ArgumentParser(prog="vecdual", description="Perturbation duality scenario runner")
    ap.add_argument("--version", action="version", version=f"vecdual {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("run", "check", "p1"):
        p = sub.add_parser(name)
        if name != "p1":
            p.add_argument("--scenario", required=True, help="scenario JSON file")
        if name != "check":
            p.add_argument("--out", default="out", help="output directory")
            p.add_argument("--probe-res", type=int, default=None, help="probe points per axis in CSVs")
        if name == "run":
            p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--quiet", action="store_true")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    quiet = getattr(args, "quiet", False)
    if args.command == "p1":
        sc = dict(P1_SCENARIO)
    else:
        try:
            sc = load_scenario(args.scenario)
        except (OSError, json.JSONDecodeError, SchemaError) as exc:
            return _io_error(exc)
        if args.command == "check":
            _log(quiet, f"scenario {sc['name']!r} ({sc['task']}) is valid")
            return EXIT_OK
        if args.seed is not None:
            if args.seed < 0:
                return _io_error(SchemaError("--seed", "seed must be nonnegative"))
            sc["seed"] = args.seed
    sc.setdefault("seed", 0)
    try:
        code, _ = run_scenario(sc, args.out, args.probe_res, quiet)
    except (OSError, SchemaError) as exc:
        return _io_error(exc)
    return code


if __name__ == "__main__":
    sys.exit(main())
