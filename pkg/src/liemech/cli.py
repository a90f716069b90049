"""Scenario-driven command line: configure a group/model/connection from a
JSON file, run the simulation or boundary-value solve, and emit a CSV time
series plus a JSON summary. `verify` runs the named property suites.

Exit codes: 0 success; 2 schema/usage error (with a pointer to the offending
field); 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import bundle as bd
from . import euler_poincare as ep
from . import ostrogradsky as og
from .algebra import Chirality, Inertia, get_algebra
from .errors import DimensionError, LieMechError
from .models import hamiltonian_counterpart, quadratic_k3, rigid_body, spline2
from .solvers import IntegratorConfig, ShootingProblem, shoot_spline
from .verify import run_suite

SCHEMA_VERSION = 1

_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_VECTOR = {"type": "array", "items": {"type": "number"}}
_MATRIX_OR_DIAG = {"anyOf": [_VECTOR, _MATRIX]}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {
            "enum": ["ep", "olp", "wong", "wong2", "lp2", "ohp", "spline_bvp", "verify"]
        },
        "name": {"type": "string"},
        "group": {
            "type": "object",
            "additionalProperties": False,
            "required": ["name"],
            "properties": {
                "name": {"enum": ["so3", "se3", "so2", "rn", "trivial"]},
                "dim": {"type": "integer", "minimum": 0},
            },
        },
        "chirality": {"enum": ["left", "right"]},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "k": {"enum": [1, 2, 3]},
                "inertia": _MATRIX_OR_DIAG,
                "tau": {"type": "number"},
                "bi_invariant": {"type": "boolean"},
            },
        },
        "connection": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["zero", "constant", "abelian_symmetric_gauge"]},
                "matrix": _MATRIX,
                "field": {"type": "number"},
            },
        },
        "base": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dim"],
            "properties": {"dim": {"type": "integer", "minimum": 0}, "metric": _MATRIX_OR_DIAG},
        },
        "kappa": _MATRIX_OR_DIAG,
        "lambda1": {"type": "number", "exclusiveMinimum": 0},
        "lambda2": {"type": "number", "exclusiveMinimum": 0},
        "lp2": {
            "type": "object",
            "additionalProperties": False,
            "required": ["P1", "P2", "K0", "K1"],
            "properties": {"P1": _MATRIX, "P2": _MATRIX, "K0": _MATRIX, "K1": _MATRIX},
        },
        "k": {"enum": [1, 2]},
        "initial": {"type": "object"},
        "boundary": {
            "type": "object",
            "additionalProperties": False,
            "required": ["g1_coords"],
            "properties": {
                "g0_coords": _VECTOR,
                "g1_coords": _VECTOR,
                "v0": _VECTOR,
                "v1": _VECTOR,
            },
        },
        "T": {"type": "number", "exclusiveMinimum": 0},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
        "suite": {"enum": ["algebra", "ep", "olp", "bundle", "solvers", "all"]},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "g0_coords": _VECTOR,
    },
    "allOf": [
        {
            "if": {"properties": {"kind": {"enum": ["ep", "olp"]}}},
            "then": {"required": ["group", "model", "initial", "T"]},
        },
        {
            "if": {"properties": {"kind": {"const": "wong"}}},
            "then": {"required": ["group", "base", "kappa", "connection", "initial", "T"]},
        },
        {
            "if": {"properties": {"kind": {"const": "wong2"}}},
            "then": {
                "required": [
                    "group", "base", "kappa", "connection", "lambda1", "lambda2",
                    "initial", "T",
                ]
            },
        },
        {
            "if": {"properties": {"kind": {"const": "lp2"}}},
            "then": {"required": ["group", "lp2", "connection", "initial", "T"]},
        },
        {
            "if": {"properties": {"kind": {"const": "ohp"}}},
            "then": {"required": ["group", "k", "connection", "initial", "T"]},
        },
        {
            "if": {"properties": {"kind": {"const": "spline_bvp"}}},
            "then": {"required": ["group", "model", "boundary", "T"]},
        },
        {
            "if": {"properties": {"kind": {"const": "verify"}}},
            "then": {"required": ["suite"]},
        },
    ],
}

_DEFAULTS = {"chirality": "left", "dt": 1e-3, "seed": 42}


class ScenarioError(Exception):
    """Schema or build failure; mapped to exit code 2."""


def normalize_scenario(raw: dict, dt=None, T=None) -> dict:
    """Validate against the schema, fill defaults, apply CLI overrides."""
    cfg = json.loads(json.dumps(raw))  # deep copy, JSON-typed
    if dt is not None:
        cfg["dt"] = dt
    if T is not None:
        cfg["T"] = T
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: e.json_path)
    if errors:
        e = errors[0]
        raise ScenarioError(f"scenario invalid at {e.json_path}: {e.message}")
    for key, val in _DEFAULTS.items():
        cfg.setdefault(key, val)
    cfg.setdefault("name", cfg["kind"])
    return cfg


def _algebra(cfg):
    group = cfg["group"]
    return get_algebra(group["name"], group.get("dim"))


def _chirality(cfg):
    return Chirality.LEFT if cfg["chirality"] == "left" else Chirality.RIGHT


def _as_inertia(spec, dim, what):
    M = np.asarray(spec, dtype=float)
    if M.ndim == 1:
        M = np.diag(M)
    if M.shape != (dim, dim):
        raise DimensionError(f"{what} has shape {M.shape}, expected ({dim},{dim})")
    return Inertia(M)


def _model(cfg, algebra):
    spec = cfg.get("model", {})
    k = spec.get("k", 2)
    I = _as_inertia(spec.get("inertia", np.ones(algebra.dim)), algebra.dim, "inertia")
    chir = _chirality(cfg)
    if k == 1:
        return rigid_body(algebra, I, chir)
    if k == 2:
        return spline2(
            algebra, I, chir, tau=spec.get("tau", 0.0),
            bi_invariant=spec.get("bi_invariant", False),
        )
    return quadratic_k3(algebra, I, chir)


def _connection(cfg, algebra, base_dim):
    spec = cfg["connection"]
    chir = _chirality(cfg)
    if spec["type"] == "zero":
        return bd.zero_connection(algebra, base_dim, chir)
    if spec["type"] == "constant":
        return bd.constant_connection(algebra, np.asarray(spec["matrix"], dtype=float), chir)
    return bd.abelian_symmetric_gauge(algebra, spec.get("field", 1.0), chir)


def _initial_vec(initial, key, dim):
    if key not in initial:
        raise ScenarioError(f"scenario invalid at $.initial.{key}: missing")
    v = np.asarray(initial[key], dtype=float)
    if v.shape != (dim,):
        raise ScenarioError(f"scenario invalid at $.initial.{key}: expected {dim} numbers")
    return v


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _vec_cols(prefix, dim):
    return [f"{prefix}_{i}" for i in range(dim)]


# -- runners ----------------------------------------------------------------------


def _run_ep(cfg, outdir: Path):
    algebra = _algebra(cfg)
    model = _model(cfg, algebra)
    k, d = model.order, algebra.dim
    jet = np.asarray(cfg["initial"].get("jet", []), dtype=float)
    if jet.shape != (2 * k - 1, d):
        raise ScenarioError(
            f"scenario invalid at $.initial.jet: expected {2 * k - 1} rows of {d} numbers"
        )
    g0 = algebra.exp(np.asarray(cfg["g0_coords"], dtype=float)) if "g0_coords" in cfg \
        else algebra.identity()
    state0 = ep.ep_state_from_jet(model, jet, g0=g0)
    traj = ep.integrate_ep(model, state0, cfg["T"], IntegratorConfig(dt=cfg["dt"]))
    noether = traj.noether_series()
    ndrift = np.abs(noether - noether[0]).max(axis=1)
    energy = traj.energy_series()
    gd = algebra.group_dim
    header = (
        ["t"] + [f"g_{r}{c}" for r in range(gd) for c in range(gd)]
        + [c for j in range(k) for c in _vec_cols(f"xi{j}", d)]
        + _vec_cols("m", d) + ["noether_drift"]
    )
    if k == 2:
        header.append("xidd_norm")
    rows = []
    for i in range(len(traj.ts)):
        row = [traj.ts[i]] + list(traj.gs[i].ravel()) + list(traj.jets[i].ravel()) + list(
            traj.ms[i]
        ) + [ndrift[i]]
        if k == 2:
            row.append(np.linalg.norm(model.accel(traj.jets[i], traj.ms[i], traj.extras[i])))
        rows.append(row)
    csv_path = outdir / f"{cfg['name']}.csv"
    _write_csv(csv_path, header, rows)
    summary = {
        "monitors": {
            "noether_drift": float(ndrift.max()),
            "energy_drift": float(np.abs(energy - energy[0]).max()),
            "group_defect_max": float(traj.group_defect_max()),
        },
        "final_state": {
            "t": float(traj.ts[-1]),
            "g": traj.gs[-1].tolist(),
            "jet": traj.jets[-1].tolist(),
            "m": traj.ms[-1].tolist(),
        },
    }
    return csv_path, summary


def _run_olp(cfg, outdir: Path):
    algebra = _algebra(cfg)
    model = _model(cfg, algebra)
    h = hamiltonian_counterpart(model)
    k, d = model.order, algebra.dim
    jet = np.asarray(cfg["initial"].get("jet", []), dtype=float)
    if jet.shape != (2 * k - 1, d):
        raise ScenarioError(
            f"scenario invalid at $.initial.jet: expected {2 * k - 1} rows of {d} numbers"
        )
    state0 = og.legendre(model, jet)
    traj = og.integrate_olp(h, state0, cfg["T"], IntegratorConfig(dt=cfg["dt"]))
    hs = traj.h_series()
    cas = traj.casimir_series()
    header = (
        ["t"] + [c for j in range(k - 1) for c in _vec_cols(f"xi{j}", d)]
        + [c for j in range(1, k) for c in _vec_cols(f"pi{j}", d)]
        + _vec_cols("pi0", d) + ["h", "casimir"]
    )
    rows = [
        [traj.ts[i]] + list(traj.states[i].xi_jet.ravel()) + list(traj.states[i].pis.ravel())
        + list(traj.states[i].pi0) + [hs[i], cas[i]]
        for i in range(len(traj.ts))
    ]
    csv_path = outdir / f"{cfg['name']}.csv"
    _write_csv(csv_path, header, rows)
    summary = {
        "monitors": {
            "h_drift": float(np.abs(hs - hs[0]).max()),
            "casimir_drift": float(np.abs(cas - cas[0]).max()),
        },
        "final_state": {
            "t": float(traj.ts[-1]),
            "xi_jet": traj.states[-1].xi_jet.tolist(),
            "pis": traj.states[-1].pis.tolist(),
            "pi0": traj.states[-1].pi0.tolist(),
        },
    }
    return csv_path, summary


def _base_metric(cfg):
    base = cfg["base"]
    m = base["dim"]
    return bd.BaseMetric(
        np.diag(np.asarray(base.get("metric", np.ones(m)), dtype=float))
        if np.asarray(base.get("metric", np.ones(m))).ndim == 1
        else np.asarray(base["metric"], dtype=float)
    )


def _run_wong(cfg, outdir: Path):
    algebra = _algebra(cfg)
    gamma = _base_metric(cfg)
    kappa = _as_inertia(cfg["kappa"], algebra.dim, "kappa")
    conn = _connection(cfg, algebra, gamma.dim)
    init = cfg["initial"]
    state0 = bd.WongState(
        _initial_vec(init, "rho", gamma.dim),
        _initial_vec(init, "rhodot", gamma.dim),
        _initial_vec(init, "mubar", algebra.dim),
    )
    ts, states = bd.integrate_wong(
        gamma, kappa, conn, state0, cfg["T"], IntegratorConfig(dt=cfg["dt"])
    )
    energies = np.array([bd.wong_energy(gamma, kappa, s) for s in states])
    charges = np.array([np.sqrt(float(s.mubar @ kappa.inverse @ s.mubar)) for s in states])
    header = (
        ["t"] + _vec_cols("rho", gamma.dim) + _vec_cols("rhodot", gamma.dim)
        + _vec_cols("mubar", algebra.dim) + ["energy", "charge_norm"]
    )
    rows = [
        [ts[i]] + list(states[i].rho) + list(states[i].rhodot) + list(states[i].mubar)
        + [energies[i], charges[i]]
        for i in range(len(ts))
    ]
    csv_path = outdir / f"{cfg['name']}.csv"
    _write_csv(csv_path, header, rows)
    summary = {
        "monitors": {
            "energy_drift": float(np.abs(energies - energies[0]).max()),
            "charge_norm_drift": float(np.abs(charges - charges[0]).max()),
        },
        "final_state": {
            "t": float(ts[-1]),
            "rho": states[-1].rho.tolist(),
            "rhodot": states[-1].rhodot.tolist(),
            "mubar": states[-1].mubar.tolist(),
        },
    }
    return csv_path, summary


def _wong2_state(init, m, d):
    return bd.Wong2State(
        _initial_vec(init, "rho", m), _initial_vec(init, "rhodot", m),
        _initial_vec(init, "rhoddot", m), _initial_vec(init, "rhodddot", m),
        _initial_vec(init, "sigma", d), _initial_vec(init, "pi1", d),
        _initial_vec(init, "pi0", d),
    )


def _run_lp2_like(cfg, outdir: Path, model: bd.Lp2Model):
    algebra = model.algebra
    conn = _connection(cfg, algebra, model.base_dim)
    state0 = _wong2_state(cfg["initial"], model.base_dim, algebra.dim)
    ts, states = bd.integrate_lp2(
        model, conn, state0, cfg["T"], IntegratorConfig(dt=cfg["dt"])
    )
    energies = np.array([bd.lp2_energy(model, s) for s in states])
    m, d = model.base_dim, algebra.dim
    header = (
        ["t"] + _vec_cols("rho", m) + _vec_cols("rhodot", m) + _vec_cols("rhoddot", m)
        + _vec_cols("rhodddot", m) + _vec_cols("sigma", d) + _vec_cols("pi1", d)
        + _vec_cols("pi0", d) + ["energy"]
    )
    rows = [[ts[i]] + list(states[i].flatten()) + [energies[i]] for i in range(len(ts))]
    csv_path = outdir / f"{cfg['name']}.csv"
    _write_csv(csv_path, header, rows)
    summary = {
        "monitors": {"energy_drift": float(np.abs(energies - energies[0]).max())},
        "final_state": {"t": float(ts[-1]), "state": states[-1].flatten().tolist()},
    }
    return csv_path, summary


def _run_wong2(cfg, outdir: Path):
    algebra = _algebra(cfg)
    gamma = _base_metric(cfg)
    kappa = _as_inertia(cfg["kappa"], algebra.dim, "kappa")
    model = bd.Lp2Model.kaluza_klein(algebra, gamma, kappa, cfg["lambda1"], cfg["lambda2"])
    return _run_lp2_like(cfg, outdir, model)


def _run_lp2(cfg, outdir: Path):
    algebra = _algebra(cfg)
    spec = cfg["lp2"]
    model = bd.Lp2Model(
        algebra,
        np.asarray(spec["P1"], dtype=float), np.asarray(spec["P2"], dtype=float),
        np.asarray(spec["K0"], dtype=float), np.asarray(spec["K1"], dtype=float),
    )
    return _run_lp2_like(cfg, outdir, model)


def _run_ohp(cfg, outdir: Path):
    algebra = _algebra(cfg)
    k = cfg["k"]
    init = cfg["initial"]
    if k == 1:
        gamma = _base_metric(cfg)
        kappa = _as_inertia(cfg["kappa"], algebra.dim, "kappa")
        h = bd.kk1_hamiltonian(algebra, gamma, kappa)
        m, d = gamma.dim, algebra.dim
        state0 = bd.OHPState(
            rhos=_initial_vec(init, "rho", m)[None, :],
            gammas=_initial_vec(init, "gamma0", m)[None, :],
            sigmas=np.zeros((0, d)), pis=np.zeros((0, d)),
            pi0=_initial_vec(init, "pi0", d),
        )
    else:
        if "lp2" in cfg:
            spec = cfg["lp2"]
            model = bd.Lp2Model(
                algebra,
                np.asarray(spec["P1"], dtype=float), np.asarray(spec["P2"], dtype=float),
                np.asarray(spec["K0"], dtype=float), np.asarray(spec["K1"], dtype=float),
            )
        else:
            model = bd.Lp2Model.kaluza_klein(
                algebra, _base_metric(cfg),
                _as_inertia(cfg["kappa"], algebra.dim, "kappa"),
                cfg["lambda1"], cfg["lambda2"],
            )
        h = bd.lp2_hamiltonian(model)
        m, d = model.base_dim, algebra.dim
        state0 = bd.OHPState(
            rhos=np.stack([_initial_vec(init, "rho", m), _initial_vec(init, "rhodot", m)]),
            gammas=np.stack([_initial_vec(init, "gamma0", m), _initial_vec(init, "gamma1", m)]),
            sigmas=_initial_vec(init, "sigma", d)[None, :],
            pis=_initial_vec(init, "pi1", d)[None, :],
            pi0=_initial_vec(init, "pi0", d),
        )
    conn = _connection(cfg, algebra, m)
    ts, states = bd.integrate_ohp(h, conn, state0, cfg["T"], IntegratorConfig(dt=cfg["dt"]))
    hs = np.array([h.eval_h(s) for s in states])
    header = (
        ["t"] + [c for j in range(k) for c in _vec_cols(f"rho{j}", m)]
        + [c for j in range(k) for c in _vec_cols(f"gamma{j}", m)]
        + [c for j in range(k - 1) for c in _vec_cols(f"sigma{j}", d)]
        + [c for j in range(1, k) for c in _vec_cols(f"pi{j}", d)]
        + _vec_cols("pi0", d) + ["h"]
    )
    rows = [[ts[i]] + list(states[i].flatten()) + [hs[i]] for i in range(len(ts))]
    csv_path = outdir / f"{cfg['name']}.csv"
    _write_csv(csv_path, header, rows)
    summary = {
        "monitors": {"h_drift": float(np.abs(hs - hs[0]).max())},
        "final_state": {"t": float(ts[-1]), "state": states[-1].flatten().tolist()},
    }
    return csv_path, summary


def _run_spline_bvp(cfg, outdir: Path):
    algebra = _algebra(cfg)
    model = _model(cfg, algebra)
    if model.order != 2:
        raise ScenarioError("scenario invalid at $.model.k: spline_bvp needs k = 2")
    b = cfg["boundary"]
    d = algebra.dim
    g0 = algebra.exp(np.asarray(b.get("g0_coords", np.zeros(d)), dtype=float))
    g1 = algebra.exp(np.asarray(b["g1_coords"], dtype=float))
    v0 = np.asarray(b.get("v0", np.zeros(d)), dtype=float)
    v1 = np.asarray(b.get("v1", np.zeros(d)), dtype=float)
    problem = ShootingProblem(
        model, g0, g1, v0, v1, cfg["T"], tol=cfg.get("tol", 1e-8),
        max_iter=cfg.get("max_iter", 50), config=IntegratorConfig(dt=cfg["dt"]),
    )
    jet0, traj, info = shoot_spline(problem)
    gd = algebra.group_dim
    header = (
        ["t"] + [f"g_{r}{c}" for r in range(gd) for c in range(gd)]
        + [c for j in range(2) for c in _vec_cols(f"xi{j}", d)] + _vec_cols("m", d)
    )
    rows = [
        [traj.ts[i]] + list(traj.gs[i].ravel()) + list(traj.jets[i].ravel())
        + list(traj.ms[i])
        for i in range(len(traj.ts))
    ]
    csv_path = outdir / f"{cfg['name']}.csv"
    _write_csv(csv_path, header, rows)
    summary = {
        "monitors": {
            "residual": float(info["residual"]),
            "iterations": int(info["iterations"]),
        },
        "initial_jet": jet0.tolist(),
        "final_state": {"t": float(traj.ts[-1]), "g": traj.gs[-1].tolist()},
    }
    return csv_path, summary


_RUNNERS = {
    "ep": _run_ep,
    "olp": _run_olp,
    "wong": _run_wong,
    "wong2": _run_wong2,
    "lp2": _run_lp2,
    "ohp": _run_ohp,
    "spline_bvp": _run_spline_bvp,
}


def run_scenario(cfg: dict, outdir: Path):
    """Execute a normalized scenario; returns (csv_path or None, summary)."""
    outdir.mkdir(parents=True, exist_ok=True)
    if cfg["kind"] == "verify":
        results = run_suite(cfg["suite"], cfg["seed"])
        for r in results:
            print(r.line())
        summary = {
            "checks": [
                {"name": f"{r.suite}/{r.name}", "value": r.value, "tol": r.tol,
                 "passed": r.passed}
                for r in results
            ],
            "all_passed": all(r.passed for r in results),
        }
        return None, summary
    return _RUNNERS[cfg["kind"]](cfg, outdir)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="liemech",
        description="Reduced Lie-group and bundle dynamics: simulate scenarios, "
        "solve spline boundary-value problems, run verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    prun = sub.add_parser("run", help="run a JSON scenario file")
    prun.add_argument("scenario", help="path to the scenario JSON file")
    prun.add_argument("--output", default="out", help="output directory (default: ./out)")
    prun.add_argument("--dt", type=float, default=None, help="override the scenario dt")
    prun.add_argument("--T", type=float, default=None, help="override the horizon")
    prun.add_argument(
        "--dump-config", action="store_true",
        help="print the normalized scenario JSON and exit without running",
    )
    pver = sub.add_parser("verify", help="run a property suite")
    pver.add_argument(
        "suite", choices=["algebra", "ep", "olp", "bundle", "solvers", "all"]
    )
    pver.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)

    if args.command == "verify":
        try:
            results = run_suite(args.suite, args.seed)
        except KeyError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        for r in results:
            print(r.line())
        n_fail = sum(not r.passed for r in results)
        print(f"{len(results) - n_fail}/{len(results)} checks passed")
        return 0 if n_fail == 0 else 1

    try:
        with open(args.scenario) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = normalize_scenario(raw, dt=args.dt, T=args.T)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.dump_config:
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return 0
    try:
        csv_path, summary = run_scenario(cfg, Path(args.output))
    except (ScenarioError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LieMechError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    summary_full = {
        "schema_version": SCHEMA_VERSION,
        "kind": cfg["kind"],
        "scenario": cfg,
        "output_csv": str(csv_path) if csv_path else None,
        **summary,
    }
    out_path = Path(args.output) / f"{cfg['name']}_summary.json"
    with open(out_path, "w") as fh:
        json.dump(summary_full, fh, indent=2, sort_keys=True)
    print(json.dumps(summary_full, indent=2, sort_keys=True))
    if cfg["kind"] == "verify" and not summary["all_passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
