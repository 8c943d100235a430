"""Scenario configs, the end-to-end runner, and plot-data emission.

A scenario is one JSON file: model block, initial measure, output times,
resolutions, tolerances.  Running it produces machine-readable artifacts
(spectrum JSON, fixation CSV, evolution CSV plus per-time profiles, summary
JSON, optionally a cross-solver verdict) in one output directory, so a single
config reproduces every figure.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import evolution, fd
from .fixation import fixation_profile
from .model import CoefficientModel, make_kimura
from .spectral import build_basis, eigenvalue_growth, flux_identity_residuals

SCHEMA_VERSION = 1

DEFAULTS = {"modes": 64, "grid": 2048, "cells": 1024, "dt": None, "s": 1.0}
DEFAULT_TOLERANCES = {
    "mass_drift": 1e-5,
    "psi_mass_drift": 1e-5,
    "route_agreement": 1e-5,
    "positivity": 1e-8,
    "fd_l1": 1e-3,
    "fd_ab": 1e-3,
}


class ConfigError(ValueError):
    """Malformed scenario configuration; message carries the field path."""


@dataclass
class Scenario:
    name: str
    model: CoefficientModel
    initial: evolution.InitialMeasure
    times: tuple
    modes: int
    grid: int
    cells: int
    dt: float
    s: float
    tolerances: dict
    out_dir: Path


def _fail(path, msg):
    raise ConfigError(f"config field '{path}': {msg}")


def _model_from_config(block):
    if not isinstance(block, dict):
        _fail("model", "expected an object")
    if block.get("preset") == "kimura":
        try:
            return make_kimura(float(block.get("eta", 0.0)), float(block.get("beta", 0.0)))
        except (TypeError, ValueError) as exc:
            _fail("model", str(exc))
    if "psi" in block and "pi" in block:
        try:
            return CoefficientModel(tuple(block["psi"]), tuple(block["pi"]))
        except (TypeError, ValueError) as exc:
            _fail("model.psi/pi", str(exc))
    _fail("model", 'needs {"preset": "kimura", ...} or {"psi": [...], "pi": [...]}')


def _initial_from_config(block):
    if not isinstance(block, dict):
        _fail("initial", "expected an object")
    density = block.get("density")
    if isinstance(density, dict):
        if "x" not in density or "values" not in density:
            _fail("initial.density", "sampled density needs 'x' and 'values'")
        density = (np.asarray(density["x"], float), np.asarray(density["values"], float))
    atoms = block.get("atoms", [])
    try:
        return evolution.InitialMeasure(
            a0=block.get("a0", 0.0),
            b0=block.get("b0", 0.0),
            density=density,
            atoms=tuple((x, m) for x, m in atoms),
        )
    except (TypeError, ValueError) as exc:
        _fail("initial", str(exc))


def load_scenario(config, out_dir=None, overrides=None):
    """Parse and validate a scenario from a JSON path or a dict."""
    if isinstance(config, (str, Path)):
        path = Path(config)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
        default_name = path.stem
    else:
        raw = dict(config)
        default_name = "scenario"
    if raw.get("schema") != SCHEMA_VERSION:
        _fail("schema", f"expected {SCHEMA_VERSION}, got {raw.get('schema')!r}")

    merged = dict(DEFAULTS)
    for key in DEFAULTS:
        if key in raw and raw[key] is not None:
            merged[key] = raw[key]
        if overrides and overrides.get(key) is not None:
            merged[key] = overrides[key]

    model = _model_from_config(raw.get("model", {}))
    initial = _initial_from_config(raw.get("initial", {}))

    times = raw.get("times", [])
    if not times:
        _fail("times", "at least one output time is required")
    times = tuple(float(t) for t in times)
    if any(t < 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
        _fail("times", "times must be nonnegative and strictly increasing")
    if any(t == 0.0 for t in times[1:]):
        _fail("times", "only the first time may be 0")
    if times[-1] <= 0.0:
        _fail("times", "at least one positive output time is required")

    modes = int(merged["modes"])
    grid = int(merged["grid"])
    cells = int(merged["cells"])
    if grid < 64:
        _fail("grid", "must be at least 64")
    if not 1 <= modes <= grid // 8:
        _fail("modes", f"must lie in [1, grid/8] = [1, {grid // 8}]")
    if cells < 128:
        _fail("cells", "must be at least 128")
    dt = merged["dt"]
    dt = None if dt is None else float(dt)
    if dt is not None and dt > 1.0 / cells:
        _fail("dt", f"must not exceed the cell width 1/{cells}")

    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(raw.get("tolerances", {}))
    if overrides:
        for key, val in overrides.get("tolerances", {}).items():
            if val is not None:
                tolerances[key] = val

    out = Path(out_dir) if out_dir else Path(raw.get("out", "kimdiff-results"))
    return Scenario(
        name=raw.get("name", default_name),
        model=model,
        initial=initial,
        times=times,
        modes=modes,
        grid=grid,
        cells=cells,
        dt=dt,
        s=float(merged["s"]),
        tolerances=tolerances,
        out_dir=out,
    )


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _spectrum_payload(scenario, basis):
    ident = flux_identity_residuals(scenario.model, basis)
    k_est = None
    if basis.n_modes >= 16:
        k_est, _ = eigenvalue_growth(basis)
    return {
        "lambda": basis.eigenvalues.tolist(),
        "K_estimate": k_est,
        "Q": basis.mode_masses.tolist(),
        "identity_residuals": ident.tolist(),
    }


def compute_pipeline(scenario):
    """Run the spectral pipeline for a scenario; returns a dict of pieces."""
    model = scenario.model
    profile = fixation_profile(model, scenario.grid + 1)
    basis = build_basis(model, scenario.modes, scenario.grid)
    coeffs = evolution.project_initial(model, basis, scenario.initial)
    sols = [
        evolution.solution_at(model, basis, coeffs, scenario.initial, t)
        for t in scenario.times
    ]
    limits = evolution.limit_masses(model, profile, scenario.initial)
    positive_times = [t for t in scenario.times if t > 0]
    route = [
        evolution.mass_cross_check(model, basis, coeffs, profile, scenario.initial, t)
        for t in positive_times
    ]
    # conservation is measured over positive times: a t=0 snapshot cannot
    # carry interior point masses (the solution triple has no atom slot)
    positive_sols = [s for s in sols if s.t > 0]
    report = evolution.conservation_residuals(
        model, profile, scenario.initial,
        positive_sols if len(positive_sols) >= 2 else sols,
    )
    decay = None
    if len(positive_times) >= 2 and abs(coeffs.values[0]) > 0:
        decay = evolution.decay_diagnostics(basis, coeffs, positive_times)
    weak = None
    if positive_times:
        t_lo, t_hi = positive_times[0], positive_times[-1]
        if t_hi > t_lo:
            dense = np.linspace(t_lo, t_hi, 129)
            dense_sols = [
                evolution.solution_at(model, basis, coeffs, scenario.initial, t)
                for t in dense
            ]
            weak = evolution.verify_weak_form(model, dense_sols, profile)
    return {
        "profile": profile,
        "basis": basis,
        "coeffs": coeffs,
        "solutions": sols,
        "limits": limits,
        "route": route,
        "report": report,
        "decay": decay,
        "weak": weak,
    }


def _gate(scenario, pieces):
    tol = scenario.tolerances
    mass0 = scenario.initial.total_mass()
    violations = []
    report = pieces["report"]
    if report.mass_span > tol["mass_drift"] * mass0:
        violations.append(
            f"mass conservation span {report.mass_span:.3e} exceeds "
            f"{tol['mass_drift']:.1e} x initial mass"
        )
    if report.psi_mass_span > tol["psi_mass_drift"] * mass0:
        violations.append(
            f"fixation-moment span {report.psi_mass_span:.3e} exceeds "
            f"{tol['psi_mass_drift']:.1e} x initial mass"
        )
    if pieces["route"]:
        worst = max(r[2] for r in pieces["route"])
        if worst > tol["route_agreement"]:
            violations.append(
                f"boundary-mass route disagreement {worst:.3e} exceeds "
                f"{tol['route_agreement']:.1e}"
            )
    floor = -tol["positivity"] * mass0
    for sol in pieces["solutions"]:
        if sol.t > 0 and float(np.min(sol.density)) < floor:
            violations.append(
                f"density at t={sol.t:g} dips to {float(np.min(sol.density)):.3e}, "
                f"below the positivity slack {floor:.1e}"
            )
            break
    return violations


def run_scenario(config, out_dir=None, overrides=None):
    """Run a scenario config and write all artifacts.

    Returns 0 on success and 2 when an invariant tolerance is violated
    (artifacts are still written, with the violations recorded in the
    summary).  Config errors raise ConfigError, which the CLI maps to exit 1.
    """
    scenario = config if isinstance(config, Scenario) else load_scenario(
        config, out_dir=out_dir, overrides=overrides
    )
    out = scenario.out_dir
    out.mkdir(parents=True, exist_ok=True)
    pieces = compute_pipeline(scenario)

    _write_json(out / "spectrum.json", _spectrum_payload(scenario, pieces["basis"]))
    profile = pieces["profile"]
    _write_csv(
        out / "fixation.csv", ["x", "psi"], zip(profile.grid, profile.values)
    )

    limits = pieces["limits"]
    lam0 = pieces["basis"].eigenvalues[0]
    rows = []
    profiles_dir = out / "profiles"
    profiles_dir.mkdir(exist_ok=True)
    for sol in pieces["solutions"]:
        l1 = sol.density_l1()
        mass = sol.a + sol.b + float(np.trapezoid(sol.density, sol.grid))
        psi_mass = sol.b + float(
            np.trapezoid(profile(sol.grid) * sol.density, sol.grid)
        )
        radon = evolution.radon_distance_to_limit(sol, limits)
        rows.append(
            [sol.t, sol.a, sol.b, l1, mass, psi_mass, radon, sol.trunc_error]
        )
        _write_csv(
            profiles_dir / f"q_t{sol.t:g}.csv", ["x", "q"], zip(sol.grid, sol.density)
        )
    _write_csv(
        out / "evolution.csv",
        ["t", "a", "b", "q_l1", "mass_total", "psi_mass", "radon_to_limit",
         "trunc_error"],
        rows,
    )

    violations = _gate(scenario, pieces)
    report = pieces["report"]
    decay = pieces["decay"]
    if scenario.s > 0:
        c0s, c0s_tail = evolution.radon_bound_constant(pieces["basis"], scenario.s)
    else:
        c0s = c0s_tail = None
    summary = {
        "schema": SCHEMA_VERSION,
        "name": scenario.name,
        "lambda0": float(lam0),
        "a_inf": limits[0],
        "b_inf": limits[1],
        "C_inf": None if decay is None else decay.c_inf,
        "slope": None if decay is None else decay.slope,
        "smoothness": {
            "s": scenario.s,
            "initial_norm": evolution.ds_norm(pieces["coeffs"], pieces["basis"],
                                              scenario.s),
            "decay_bound_constant": c0s,
            "decay_bound_tail": c0s_tail,
        },
        "residuals": {
            "mass_drift": report.mass_drift,
            "psi_mass_drift": report.psi_mass_drift,
            "mass_span": report.mass_span,
            "psi_mass_span": report.psi_mass_span,
            "route_agreement_max": max((r[2] for r in pieces["route"]), default=None),
            "weak_form_max": None
            if pieces["weak"] is None
            else max(pieces["weak"].values()),
        },
        "tolerances": scenario.tolerances,
        "violations": violations,
    }
    _write_json(out / "summary.json", summary)
    return 2 if violations else 0


def run_verify(config, out_dir=None, overrides=None):
    """Paired spectral / finite-difference run with a JSON verdict.

    Gates on the cross-solver gaps and the spectral invariants; exit status 2
    on any violation, 0 otherwise."""
    scenario = config if isinstance(config, Scenario) else load_scenario(
        config, out_dir=out_dir, overrides=overrides
    )
    out = scenario.out_dir
    out.mkdir(parents=True, exist_ok=True)
    pieces = compute_pipeline(scenario)
    positive_times = [t for t in scenario.times if t > 0]
    fd_states = fd.evolve_fd(
        scenario.model,
        scenario.initial,
        positive_times[-1],
        scenario.cells,
        dt=scenario.dt,
        output_times=positive_times,
    )
    spectral_sols = [s for s in pieces["solutions"] if s.t > 0]
    comparison = fd.compare_with_spectral(fd_states, spectral_sols)
    mass0 = scenario.initial.total_mass()
    fd_drift = max(abs(st.total_mass() - mass0) for st in fd_states)

    tol = scenario.tolerances
    violations = _gate(scenario, pieces)
    for row in comparison:
        if row.q_l1_diff > tol["fd_l1"]:
            violations.append(
                f"spectral vs FD density gap {row.q_l1_diff:.3e} at t={row.t:g} "
                f"exceeds {tol['fd_l1']:.1e}"
            )
        if max(row.a_diff, row.b_diff) > tol["fd_ab"]:
            violations.append(
                f"spectral vs FD boundary-mass gap {max(row.a_diff, row.b_diff):.3e} "
                f"at t={row.t:g} exceeds {tol['fd_ab']:.1e}"
            )

    verdict = {
        "schema": SCHEMA_VERSION,
        "name": scenario.name,
        "comparison": [
            {"t": r.t, "q_l1_diff": r.q_l1_diff, "a_diff": r.a_diff, "b_diff": r.b_diff}
            for r in comparison
        ],
        "fd_mass_drift": fd_drift,
        "spectral_residuals": {
            "mass_span": pieces["report"].mass_span,
            "psi_mass_span": pieces["report"].psi_mass_span,
            "route_agreement_max": max(
                (r[2] for r in pieces["route"]), default=None
            ),
        },
        "tolerances": scenario.tolerances,
        "violations": violations,
        "pass": not violations,
    }
    _write_json(out / "verify.json", verdict)
    return 2 if violations else 0


# plot emission

def _svg_line_chart(path, xs, ys, title, ylabel):
    """Tiny static SVG line chart; no plotting dependency."""
    width, height = 640, 400
    ml, mr, mt, mb = 70, 20, 40, 50
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + max(abs(y0), 1.0) * 1e-3
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr)

    def py(y):
        return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb)

    points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    ticks = []
    for frac in (0.0, 0.5, 1.0):
        tx = x0 + frac * (x1 - x0)
        ty = y0 + frac * (y1 - y0)
        ticks.append(
            f'<text x="{px(tx):.1f}" y="{height - mb + 18}" font-size="11" '
            f'text-anchor="middle">{tx:.3g}</text>'
        )
        ticks.append(
            f'<text x="{ml - 8}" y="{py(ty) + 4:.1f}" font-size="11" '
            f'text-anchor="end">{ty:.3g}</text>'
        )
    svg = f"""<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">
<rect width="{width}" height="{height}" fill="white"/>
<text x="{width / 2}" y="24" font-size="14" text-anchor="middle">{title}</text>
<rect x="{ml}" y="{mt}" width="{width - ml - mr}" height="{height - mt - mb}"
 fill="none" stroke="#888"/>
{''.join(ticks)}
<text x="{width / 2}" y="{height - 12}" font-size="12" text-anchor="middle">t</text>
<text x="18" y="{height / 2}" font-size="12" text-anchor="middle"
 transform="rotate(-90 18 {height / 2})">{ylabel}</text>
<polyline fill="none" stroke="#1f6fb2" stroke-width="1.5" points="{points}"/>
</svg>
"""
    Path(path).write_text(svg)


def emit_plot_data(results_dir):
    """Turn a results directory into plot-ready files.

    Reads evolution.csv and spectrum.json, writes a long-format series CSV
    and one SVG line chart per series (endpoint masses, interior L1 norm,
    and the exponentially rescaled L1 norm)."""
    results = Path(results_dir)
    evo_path = results / "evolution.csv"
    spec_path = results / "spectrum.json"
    if not evo_path.exists():
        raise FileNotFoundError(f"missing {evo_path}; run a scenario first")
    if not spec_path.exists():
        raise FileNotFoundError(f"missing {spec_path}; run a scenario first")
    lam0 = json.loads(spec_path.read_text())["lambda"][0]
    with open(evo_path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{evo_path} has no data rows")
    t = np.array([float(r["t"]) for r in rows])
    series = {
        "a": np.array([float(r["a"]) for r in rows]),
        "b": np.array([float(r["b"]) for r in rows]),
        "q_l1": np.array([float(r["q_l1"]) for r in rows]),
    }
    series["scaled_q_l1"] = series["q_l1"] * np.exp(lam0 * t)

    plots = results / "plots"
    plots.mkdir(exist_ok=True)
    long_rows = []
    for name, vals in series.items():
        long_rows.extend([name, tv, vv] for tv, vv in zip(t, vals))
        _svg_line_chart(
            plots / f"{name}.svg", t, vals, f"{name} vs t", name.replace("_", " ")
        )
    _write_csv(plots / "series.csv", ["series", "t", "value"], long_rows)
    return plots
