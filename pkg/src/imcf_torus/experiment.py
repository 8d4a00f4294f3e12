"""Run orchestration: config schema, single runs, output directories, sweeps.

A config is a flat key-value file, for example::

    scenario.R = 3
    scenario.r = 1
    scenario.n = 512
    scenario.coeffs = 2:0.05, 3:0.01:0.5   # mode:amplitude[:phase]
    flow.cfl = 0.25
    run.sample_every = 0.01
    band.a = 0.5
    rescale.x0 = 0.1

A sweep config adds comma-separated grids ``sweep.R``, ``sweep.r`` and
``sweep.coeffs`` (coefficient sets separated by ``|``, ``none`` for the
round torus).
"""

from __future__ import annotations

import itertools
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from . import flow
from . import geometry as geo
from . import io
from . import rescale as rs
from . import scenarios

log = logging.getLogger(__name__)

# regression thresholds on non-pinching and bounded curvature
U_MIN_FRACTION = 0.25
A_GROWTH = 10.0  # bound on max|A| over the run relative to t = 0
H_DECAY_SLACK = 1.05
AREA_LAW_TOL = 1e-3
AREA_LAW_WINDOW = 0.8
GAUSS_BONNET_TOL = 0.05
NU_E2_CEILING = -0.01
LIMIT_SNAPSHOTS = 5


def _parse_coeffs(text):
    text = text.strip()
    if text.lower() in ("", "none", "0"):
        return ()
    out = []
    for item in text.split(","):
        parts = item.strip().split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"coefficient {item.strip()!r} is not mode:amplitude[:phase]")
        m = int(parts[0])
        out.append((m, *map(float, parts[1:])))
    return tuple(out)


def _format_coeffs(coeffs):
    if not coeffs:
        return "none"
    # shortest repr round-trips exactly and keeps "2:0.05" readable
    return ", ".join(":".join(repr(v) for v in c) for c in coeffs)


def _optional_float(text):
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


def _float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _coeff_sets(text):
    return tuple(_parse_coeffs(part) for part in text.split("|"))


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one run."""

    R: float = 3.0
    r: float = 1.0
    coeffs: tuple = ()
    n: int = 512
    cfl: float = 0.25
    dt_max: float = 1e-3
    eps_H: float | None = None
    eps_u: float | None = None
    remesh_every: int = 50
    max_steps: int = 20_000_000
    sample_every: float = 0.01
    t_end: float = math.inf
    band_a: float | None = None
    x0: float | None = None
    sweep_R: tuple = ()
    sweep_r: tuple = ()
    sweep_coeffs: tuple = ()

    def step_control(self):
        return flow.StepControl(
            cfl=self.cfl,
            dt_max=self.dt_max,
            eps_H=self.eps_H,
            eps_u=self.eps_u,
            remesh_every=self.remesh_every,
            max_steps=self.max_steps,
        )

    def initial_curve(self):
        return scenarios.make_perturbed_torus(self.R, self.r, self.coeffs, self.n)

    def items(self):
        """Config as ``section.key`` pairs (inverse of :func:`parse_config`)."""
        out = []
        for key, (attr, _) in _SCHEMA.items():
            if key.startswith("sweep."):
                continue
            v = getattr(self, attr)
            if attr == "coeffs":
                v = _format_coeffs(v)
            elif v is None:
                v = "auto"
            out.append((key, v))
        return out


# config key -> (RunConfig attribute, parser)
_SCHEMA = {
    "scenario.R": ("R", float),
    "scenario.r": ("r", float),
    "scenario.coeffs": ("coeffs", _parse_coeffs),
    "scenario.n": ("n", int),
    "flow.cfl": ("cfl", float),
    "flow.dt_max": ("dt_max", float),
    "flow.eps_H": ("eps_H", _optional_float),
    "flow.eps_u": ("eps_u", _optional_float),
    "flow.remesh_every": ("remesh_every", int),
    "flow.max_steps": ("max_steps", int),
    "run.sample_every": ("sample_every", float),
    "run.t_end": ("t_end", float),
    "band.a": ("band_a", _optional_float),
    "rescale.x0": ("x0", _optional_float),
    "sweep.R": ("sweep_R", _float_list),
    "sweep.r": ("sweep_r", _float_list),
    "sweep.coeffs": ("sweep_coeffs", _coeff_sets),
}


def parse_config(kv, source=None):
    """Build a :class:`RunConfig` from :func:`io.parse_keyvalue` output."""
    values = {}
    for key, (text, line) in kv.items():
        if key not in _SCHEMA:
            raise io.ConfigError("unknown key", source, line, key)
        attr, conv = _SCHEMA[key]
        try:
            values[attr] = conv(text)
        except ValueError as exc:
            raise io.ConfigError(f"cannot parse {text!r}: {exc}", source, line, key) from None
    try:
        cfg = RunConfig(**values)
        cfg.step_control()
    except (TypeError, ValueError) as exc:
        raise io.ConfigError(str(exc), source) from None
    if cfg.sample_every <= 0.0:
        raise io.ConfigError("must be positive", source, kv["run.sample_every"][1], "run.sample_every")
    return cfg


def load_config(path):
    return parse_config(io.read_keyvalue(path), str(path))


@dataclass(eq=False)
class RunResult:
    config: RunConfig
    initial: geo.GeneratingCurve
    ref: diag.ReferenceData
    state: flow.FlowState
    records: list
    limit: diag.LimitReport | None
    rescaled: list = field(default_factory=list)
    seconds: float = 0.0


def execute(cfg):
    """Run the flow for ``cfg``; scenario errors propagate as ``CurveError``."""
    initial = cfg.initial_curve()
    t0 = time.perf_counter()
    state, records = flow.run(
        initial,
        cfg.step_control(),
        sample_every=cfg.sample_every,
        band_a=cfg.band_a,
        t_end=cfg.t_end,
    )
    seconds = time.perf_counter() - t0
    ref = diag.reference_data(initial, cfg.band_a)
    limit = None
    late = limit_snapshots(records)
    if len(late) >= 3:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            limit = diag.limit_curve_monitor([records[i].curve for i in late])
    rescaled = []
    for rec in records:
        if rec.band is None:
            continue
        rb = rs.rescale_band(rec.band, rec.curve)
        rescaled.append((rec.t, rb))
    return RunResult(cfg, initial, ref, state, records, limit, rescaled, seconds)


def limit_snapshots(records, count=LIMIT_SNAPSHOTS):
    """Indices of the last ``count`` samples on the ``H_min`` halving ladder."""
    return diag.h_level_indices(records)[-count:]


def _min_margin(records, value, bound):
    return min(getattr(r, bound) - getattr(r, value) for r in records)


def summarize(res):
    """Manifest entries: stop reason, singular-time bracket, margins."""
    recs = res.records
    st = res.state
    ref = res.ref
    lo, hi = st.t_max_bracket
    t_win = AREA_LAW_WINDOW * st.t
    h0 = recs[0].h_max
    out = {
        "stop": st.stop.value,
        "t_stop": st.t,
        "t_max_lo": lo,
        "t_max_hi": hi,
        "steps": st.step_count,
        "rejections": st.rejections,
        "remeshes": st.mesh_id,
        "seconds": round(res.seconds, 3),
        "n_samples": len(recs),
        "area_law_deviation": diag.area_law_check(recs, t_win) if len(recs) > 1 else 0.0,
        "h_decay_margin": min(
            H_DECAY_SLACK * math.exp(-r.t / 2.0) * h0 - r.h_max for r in recs
        ),
        "gauss_bonnet_max": max(r.gauss_bonnet_residual for r in recs),
        "band_integral_max": max(r.band_integral for r in recs),
        "eps_hat_min": min(r.eps_hat for r in recs),
        "willmore_margin": _min_margin(recs, "willmore", "willmore_bound"),
        "l2a_margin": _min_margin(recs, "l2a", "l2a_bound"),
        "u_min_initial": recs[0].u_min,
        "u_min_final": recs[-1].u_min,
        "a_max_ratio": math.sqrt(max(r.a2_max for r in recs) / recs[0].a2_max),
    }
    bands = [r.band for r in recs if r.band is not None]
    if bands:
        out["boundary_slope_max"] = max(b.boundary_slope for b in bands)
        out["nu_e2_boundary_max"] = max(b.nu_e2_boundary for b in bands)
    out["slope_bound"] = ref.slope_bound
    if res.limit is not None:
        out["limit_ratio"] = res.limit.ratio
        out["limit_decreasing"] = res.limit.decreasing
        out["limit_embedded"] = res.limit.embedded
        out["limit_decomposes"] = res.limit.decomposes
    if res.rescaled:
        t, rb = res.rescaled[-1]
        x0 = res.config.x0 if res.config.x0 is not None else rb.default_window
        x0 = min(x0, rb.a_tilde)
        dev = rs.catenary_deviation(rb, x0)
        out["rescale_x0"] = x0
        out["catenary_deviation_last"] = dev.w
        out["catenary_gamma_last"] = dev.gamma
        out["contradiction_last"] = rs.contradiction_integral(rb.x, rb.w_tilde, x0)
    for f in fields(ref):
        out[f"ref.{f.name}"] = getattr(ref, f.name)
    for k, v in res.config.items():
        out[f"config.{k}"] = v
    return out


def write_run(out, res):
    """Write series, snapshots, rescaled graphs and the manifest to ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_series(out / io.SERIES_FILE, res.records)
    limit = res.limit.limit if res.limit is not None else None
    io.write_snapshots(out, res.records, limit)
    rdir = out / io.RESCALED_DIR
    rdir.mkdir(exist_ok=True)
    for t, rb in res.rescaled:
        h = rs.graph_mean_curvature(rb.x, rb.w_tilde)
        io.write_rescaled(rdir / f"{io.time_tag(t)}.csv", rb, h)
    summary = summarize(res)
    io.write_keyvalue(out / io.MANIFEST_FILE, summary, header=["imcf_torus run manifest"])
    return summary


def reference_from_manifest(man):
    kw = {f.name: man[f"ref.{f.name}"] for f in fields(diag.ReferenceData)}
    kw["chi"] = int(kw["chi"])
    return diag.ReferenceData(**kw)


def config_from_manifest(man):
    kv = {k[len("config.") :]: (io.fmt(v), 0) for k, v in man.items() if k.startswith("config.")}
    return parse_config(kv)


# ---------------------------------------------------------------- sweeps

SWEEP_COLUMNS = (
    "cell",
    "R",
    "r",
    "coeffs",
    "status",
    "stop",
    "t_max_lo",
    "t_max_hi",
    "u_min_final",
    "u_min_ratio",
    "eps_hat_min",
    "willmore_margin",
    "l2a_margin",
    "a_max_ratio",
    "message",
)


def sweep_cells(cfg):
    """Cartesian grid of run configs (falls back to the scenario values)."""
    Rs = cfg.sweep_R or (cfg.R,)
    rs_ = cfg.sweep_r or (cfg.r,)
    cs = cfg.sweep_coeffs or (cfg.coeffs,)
    return [replace(cfg, R=R, r=r, coeffs=c) for R, r, c in itertools.product(Rs, rs_, cs)]


def run_cell(job):
    """Run one sweep cell; failures become rows instead of exceptions."""
    idx, cfg, out = job
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(cell=idx, R=cfg.R, r=cfg.r, coeffs=_format_coeffs(cfg.coeffs))
    try:
        res = execute(cfg)
    except geo.CurveError as exc:
        row.update(status="rejected", message=str(exc))
        return row
    except Exception as exc:  # a failing child must not stop the sweep
        row.update(status="error", message=f"{type(exc).__name__}: {exc}")
        return row
    if out is not None:
        s = write_run(Path(out) / f"cell_{idx:03d}", res)
    else:
        s = summarize(res)
    row.update(
        status="ok",
        stop=s["stop"],
        t_max_lo=s["t_max_lo"],
        t_max_hi=s["t_max_hi"],
        u_min_final=s["u_min_final"],
        u_min_ratio=s["u_min_final"] / s["u_min_initial"],
        eps_hat_min=s["eps_hat_min"],
        willmore_margin=s["willmore_margin"],
        l2a_margin=s["l2a_margin"],
        a_max_ratio=s["a_max_ratio"],
    )
    return row


def sweep(cfg, out=None, workers=None):
    """Run every grid cell in parallel; returns rows in grid order."""
    jobs = [(i, c, out) for i, c in enumerate(sweep_cells(cfg))]
    workers = min(len(jobs), io.env_threads(workers))
    if workers <= 1:
        rows = [run_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(run_cell, jobs))
    if out is not None:
        io.write_table(
            Path(out) / "sweep.csv", SWEEP_COLUMNS, ([r[c] for c in SWEEP_COLUMNS] for r in rows)
        )
    return rows
