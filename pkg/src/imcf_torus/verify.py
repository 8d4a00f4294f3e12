"""Re-check a finished run from its output directory alone.

Records are recomputed from the stored snapshots and the reference data in
the manifest, compared with ``series.csv``, and every invariant of the run is
evaluated again.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from . import experiment as ex
from . import flow
from . import geometry as geo
from . import io

STORAGE_RTOL = 1e-12


class MissingArtifact(FileNotFoundError):
    pass


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass(eq=False)
class StoredRun:
    manifest: dict
    ref: diag.ReferenceData
    series: list
    curves: list
    limit: geo.GeneratingCurve | None


def load_run(out):
    """Read manifest, series and snapshots; raises :class:`MissingArtifact`."""
    out = Path(out)
    man_path = out / io.MANIFEST_FILE
    series_path = out / io.SERIES_FILE
    for p in (man_path, series_path):
        if not p.is_file():
            raise MissingArtifact(f"missing {p}")
    snaps = io.list_snapshots(out)
    if not snaps:
        raise MissingArtifact(f"no snapshots in {out / io.SNAPSHOT_DIR}")
    man = io.read_manifest(man_path)
    try:
        ref = ex.reference_from_manifest(man)
    except KeyError as exc:
        raise MissingArtifact(f"manifest lacks {exc.args[0]}") from None
    series = io.read_series(series_path)
    curves = [io.read_curve(p) for _, p in snaps]
    lim_path = out / io.SNAPSHOT_DIR / io.LIMIT_FILE
    limit = io.read_curve(lim_path) if lim_path.is_file() else None
    return StoredRun(man, ref, series, curves, limit)


def _close(a, b, rtol=STORAGE_RTOL):
    return abs(a - b) <= rtol * max(abs(a), abs(b)) or a == b


def recompute(run):
    """Records rebuilt from the snapshots at the series' sample times."""
    out = []
    prev = None
    for row, curve in zip(run.series, run.curves):
        out.append(diag.sample_record(curve, row.t, run.ref, prev))
        prev = curve
    return out


def check_storage(run, recs):
    if len(run.series) != len(run.curves):
        return Check(
            "storage",
            False,
            f"{len(run.series)} series rows vs {len(run.curves)} snapshots",
        )
    worst, where = 0.0, ""
    for row, rec in zip(run.series, recs):
        for name in diag.SERIES_COLUMNS:
            a, b = getattr(row, name), getattr(rec, name)
            if not _close(a, b):
                rel = abs(a - b) / max(abs(a), abs(b))
                if rel > worst:
                    worst, where = rel, f"{name} at t={row.t:.6g}"
    ok = worst == 0.0
    detail = "series matches snapshots" if ok else f"max rel. mismatch {worst:.3g} ({where})"
    return Check("storage", ok, detail)


def run_checks(run, recs):
    """Every per-run criterion on recomputed records (list of :class:`Check`)."""
    man = run.manifest
    ref = run.ref
    series = run.series
    checks = [check_storage(run, recs)]

    t_stop = float(man["t_stop"])
    try:
        dev = diag.area_law_check(series, ex.AREA_LAW_WINDOW * t_stop)
    except ValueError:
        dev = math.inf
    checks.append(
        Check("area_law", dev < ex.AREA_LAW_TOL, f"max deviation {dev:.3e} < {ex.AREA_LAW_TOL:g}")
    )

    h0 = series[0].h_max
    ratio = max(r.h_max / (math.exp(-r.t / 2.0) * h0) for r in series)
    checks.append(
        Check("h_decay", ratio <= ex.H_DECAY_SLACK, f"max H / (e^(-t/2) max H0) = {ratio:.4f}")
    )

    gb = max(r.gauss_bonnet_residual for r in series)
    checks.append(
        Check("gauss_bonnet", gb < ex.GAUSS_BONNET_TOL, f"max |int K| = {gb:.3e}")
    )

    bmax = max(r.band_integral for r in series)
    eps = 1.0 - bmax / diag.FOUR_PI
    checks.append(
        Check("band_estimate", bmax < diag.FOUR_PI and eps > 0.0, f"max band integral {bmax:.6f}, eps_hat {eps:.4f}")
    )

    slope = max(r.band.boundary_slope for r in recs)
    nu2 = max(r.band.nu_e2_boundary for r in recs)
    checks.append(
        Check(
            "band_boundary",
            slope <= ref.slope_bound and nu2 <= ex.NU_E2_CEILING,
            f"max slope {slope:.4f} <= {ref.slope_bound:.4f}, max <nu,e2> {nu2:.4f}",
        )
    )

    wm = min(r.willmore_bound - r.willmore for r in series)
    lm = min(r.l2a_bound - r.l2a for r in series)
    checks.append(
        Check("energy_bounds", wm > 0.0 and lm > 0.0, f"margins willmore {wm:.4f}, l2a {lm:.4f}")
    )

    u0, uf = series[0].u_min, series[-1].u_min
    stop = str(man["stop"])
    checks.append(
        Check(
            "non_pinching",
            stop == flow.Stop.H_MIN_REACHED.value and uf > ex.U_MIN_FRACTION * u0,
            f"stop {stop}, u_min {uf:.4f} / {u0:.4f} = {uf / u0:.4f}",
        )
    )

    growth = math.sqrt(max(r.a2_max for r in series) / series[0].a2_max)
    checks.append(
        Check("curvature_bound", growth <= ex.A_GROWTH, f"max |A| growth {growth:.4f} <= {ex.A_GROWTH:g}")
    )

    checks.append(check_structure(run.curves))
    late = ex.limit_snapshots(series)
    checks.append(check_limit([run.curves[i] for i in late], run.limit))
    return checks


def check_structure(curves):
    bad = []
    worst = -math.inf
    for i, c in enumerate(curves):
        ok, _ = geo.is_embedded(c)
        if not ok:
            bad.append(f"not embedded at sample {i}")
        try:
            geo.decompose_graphs(c)
        except geo.GraphStructureError as exc:
            bad.append(f"sample {i}: {exc}")
    for i, (a, b) in enumerate(zip(curves[:-1], curves[1:])):
        if not flow.nesting_check(a, b):
            bad.append(f"nesting fails between samples {i} and {i + 1}")
        try:
            ok, w = flow.graphs_monotone(a, b)
        except geo.GraphStructureError:
            continue
        worst = max(worst, w)
        if not ok:
            bad.append(f"graphs not monotone between samples {i} and {i + 1}")
    detail = "; ".join(bad[:3]) if bad else f"{len(curves)} samples, worst graph change {worst:.3e}"
    return Check("structure", not bad, detail)


def check_limit(curves, stored_limit=None):
    """Cauchy test and limit extrapolation on the late ``H_min``-ladder samples."""
    if len(curves) < 3:
        return Check("limit_curve", False, "fewer than three snapshots")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = diag.limit_curve_monitor(curves)
    ok = rep.decreasing and rep.embedded and rep.decomposes
    if stored_limit is not None and rep.limit is not None:
        gap = geo.hausdorff_distance(stored_limit, rep.limit)
        ok = ok and gap <= 1e-12 * float(np.ptp(stored_limit.nodes[:, 0]))
    d = ", ".join(f"{x:.3e}" for x in rep.distances)
    return Check(
        "limit_curve",
        ok,
        f"distances [{d}], embedded {rep.embedded}, two graphs {rep.decomposes}",
    )


def verify_dir(out):
    run = load_run(out)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        recs = recompute(run)
    return run_checks(run, recs)
