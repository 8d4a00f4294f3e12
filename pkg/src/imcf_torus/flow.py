"""Explicit time stepping of inverse mean curvature flow on the profile curve.

Every node moves along its outward normal with speed ``1/H``. The explicit
scheme is limited by the effective diffusivity ``1/H^2`` of the linearized
flow, so ``dt = min(dt_max, cfl * min(ds)^2 * H_min^2)``. Nodes are
redistributed to uniform arc length every ``remesh_every`` accepted steps.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from . import diagnostics as diag
from . import geometry as geo

log = logging.getLogger(__name__)


class Stop(str, enum.Enum):
    RUNNING = "running"
    H_MIN_REACHED = "h_min_reached"
    PINCH_DETECTED = "pinch_detected"
    STRUCTURE_VIOLATED = "structure_violated"
    MAX_STEPS = "max_steps"
    T_END = "t_end_reached"


_STATUS = {
    _kernels.H_MIN_REACHED: Stop.H_MIN_REACHED,
    _kernels.PINCH_DETECTED: Stop.PINCH_DETECTED,
    _kernels.STRUCTURE_VIOLATED: Stop.STRUCTURE_VIOLATED,
}


class NotMeanConvexError(geo.CurveError):
    """Initial data with H <= 0 somewhere."""


@dataclass(frozen=True)
class StepControl:
    """Time-step and stopping parameters.

    ``eps_H`` and ``eps_u`` default (``None``) to ``1e-3 * max H(0)`` and
    ``1e-3 * u_min(0)``; :meth:`resolve` fills them in from a curve.
    """

    cfl: float = 0.25
    dt_max: float = 1e-3
    eps_H: float | None = None
    eps_u: float | None = None
    remesh_every: int = 50
    max_steps: int = 20_000_000

    def __post_init__(self):
        if not 0.0 < self.cfl <= 0.5:
            raise ValueError(f"cfl must lie in (0, 0.5], got {self.cfl}")
        if self.dt_max <= 0.0:
            raise ValueError("dt_max must be positive")
        if self.eps_H is not None and self.eps_H <= 0.0:
            raise ValueError("eps_H must be positive")
        if self.eps_u is not None and self.eps_u <= 0.0:
            raise ValueError("eps_u must be positive")
        if self.remesh_every < 1:
            raise ValueError("remesh_every must be >= 1")

    def resolve(self, curve):
        fld = geo.curvature_field(curve)
        return replace(
            self,
            eps_H=1e-3 * fld.H_max if self.eps_H is None else self.eps_H,
            eps_u=1e-3 * curve.u_min if self.eps_u is None else self.eps_u,
        )


@dataclass(frozen=True, eq=False)
class FlowState:
    """Snapshot of a run. ``mesh_id`` changes whenever nodes are remeshed."""

    t: float
    curve: geo.GeneratingCurve
    step_count: int = 0
    dt_last: float = 0.0
    stop: Stop = Stop.RUNNING
    mesh_id: int = 0
    rejections: int = 0

    @property
    def t_max_bracket(self):
        return (self.t, self.t + self.dt_last)


def euler_step(curve, dt):
    """One explicit step with a prescribed ``dt`` (no CFL, no remeshing)."""
    fld = geo.curvature_field(curve)
    return geo.GeneratingCurve(curve.nodes + (dt / fld.H)[:, None] * fld.nu)


def remesh(curve):
    """Redistribute nodes to uniform arc length on the periodic spline.

    Node 0 stays put and the node count is unchanged; new nodes lie on the
    chord-parametrized periodic cubic spline through the old ones.

    Raises
    ------
    PinchError
        If a new node lands on or below the axis.
    """
    n = len(curve)
    pts, _ = geo.spline_arclength_points(curve, fractions=np.arange(n) / n)
    pts[0] = curve.nodes[0]
    if np.any(pts[:, 1] <= 0.0):
        raise geo.PinchError("remeshing produced a node on the axis")
    return geo.GeneratingCurve(pts)


def _advance(state, ctl, max_steps, t_sample=math.inf, h_level=-math.inf):
    x, t, steps, dt_last, status, rej = _kernels.advance(
        state.curve.nodes,
        state.t,
        ctl.cfl,
        ctl.dt_max,
        ctl.eps_H,
        ctl.eps_u,
        max_steps,
        t_sample,
        h_level,
    )
    curve = geo.GeneratingCurve(x) if steps else state.curve
    return (
        replace(
            state,
            t=t,
            curve=curve,
            step_count=state.step_count + steps,
            dt_last=dt_last if steps else state.dt_last,
            rejections=state.rejections + rej,
        ),
        status,
    )


def _maybe_remesh(state, ctl):
    if state.step_count % ctl.remesh_every or state.stop is not Stop.RUNNING:
        return state
    try:
        curve = remesh(state.curve)
    except geo.PinchError:
        return replace(state, stop=Stop.PINCH_DETECTED)
    ok, _ = geo.is_embedded(curve)
    if not ok:
        return replace(state, stop=Stop.STRUCTURE_VIOLATED)
    return replace(state, curve=curve, mesh_id=state.mesh_id + 1)


def step(state, ctl):
    """Advance one accepted step (or record why the flow stops).

    ``ctl`` must be resolved (see :meth:`StepControl.resolve`). A step whose
    result self-intersects is retried with half the time step up to eight
    times before the run is declared ``structure_violated``.
    """
    if state.stop is not Stop.RUNNING:
        raise ValueError(f"flow already stopped: {state.stop.value}")
    if ctl.eps_H is None or ctl.eps_u is None:
        raise ValueError("StepControl is not resolved")
    new, status = _advance(state, ctl, 1)
    if status in _STATUS:
        return replace(new, stop=_STATUS[status])
    return _maybe_remesh(new, ctl)


def validate_initial(curve):
    fld = geo.curvature_field(curve)
    if fld.H_min <= 0.0:
        i = int(np.argmin(fld.H))
        raise NotMeanConvexError(f"not mean-convex: H = {fld.H[i]:.6g} <= 0 at node {i}")
    ok, pair = geo.is_embedded(curve)
    if not ok:
        raise geo.CurveError(f"initial curve is not embedded (edges {pair} intersect)")
    return fld


def run(
    initial,
    ctl=None,
    sample_every=0.01,
    band_a=None,
    h_levels=True,
    t_end=math.inf,
    callback=None,
):
    """Evolve until the flow stops and sample diagnostics along the way.

    Parameters
    ----------
    initial : GeneratingCurve
        Embedded profile with ``H > 0`` everywhere.
    ctl : StepControl, optional
    sample_every : float
        Flow-time spacing of regular samples (the first at ``t = 0``).
    band_a : float, optional
        Band half-width; by default half the smaller distance from the lowest
        point to the extreme x1 values of the initial curve.
    h_levels : bool
        Also sample whenever ``H_min`` first drops below
        ``H_min(0) * 2**-j``, which resolves the approach to the singular
        time where regular samples are too coarse.
    t_end : float
        Stop early (reason ``t_end_reached``) at this flow time.
    callback : callable, optional
        Called as ``callback(state, record)`` after every sample.

    Returns
    -------
    state : FlowState
        Final state; ``state.stop`` gives the reason and
        ``state.t_max_bracket`` the singular-time bracket.
    records : list of DiagnosticsRecord
    """
    fld0 = validate_initial(initial)
    ctl = (ctl or StepControl()).resolve(initial)
    if sample_every <= 0.0:
        raise ValueError("sample_every must be positive")
    ref = diag.reference_data(initial, band_a)
    state = FlowState(t=0.0, curve=initial)
    records = []

    def sample(state):
        prev = records[-1].curve if records else None
        rec = diag.sample_record(state.curve, state.t, ref, prev)
        records.append(rec)
        if callback is not None:
            callback(state, rec)

    sample(state)
    n_sample = 1
    t_sample = min(sample_every, t_end)
    h_level = 0.5 * fld0.H_min if h_levels else -math.inf
    while True:
        chunk = ctl.remesh_every - state.step_count % ctl.remesh_every
        chunk = min(chunk, ctl.max_steps - state.step_count)
        state, status = _advance(state, ctl, chunk, t_sample, h_level)
        if status in _STATUS:
            state = replace(state, stop=_STATUS[status])
        elif status == _kernels.SAMPLE_TIME:
            if state.t >= t_end:
                state = replace(state, stop=Stop.T_END)
            else:
                sample(state)
                n_sample += 1
                t_sample = min(n_sample * sample_every, t_end)
                continue
        elif status == _kernels.H_LEVEL:
            sample(state)
            h_min = records[-1].h_min
            while h_level >= h_min:
                h_level *= 0.5
            continue
        elif state.step_count >= ctl.max_steps:
            state = replace(state, stop=Stop.MAX_STEPS)
        else:
            state = _maybe_remesh(state, ctl)
        if state.stop is not Stop.RUNNING:
            break
    try:
        sample(state)
    except (geo.GraphStructureError, diag.BandError) as exc:
        log.warning("final sample failed: %s", exc)
        if state.stop is Stop.H_MIN_REACHED:
            state = replace(state, stop=Stop.STRUCTURE_VIOLATED)
    log.info(
        "stop=%s t=%.9g steps=%d rejections=%d",
        state.stop.value,
        state.t,
        state.step_count,
        state.rejections,
    )
    return state, records


def nesting_check(prev, next, refine_factor=32, tol=None):
    """True iff every node of ``prev`` lies inside the region bounded by ``next``.

    ``next`` is upsampled on its periodic spline before the winding test so
    that chord sag does not mask displacements smaller than the node spacing.
    Nodes within ``tol`` (default ``1e-9 * diameter``) of the boundary count
    as inside.
    """
    ref = geo.refine(next, refine_factor)
    if tol is None:
        span = ref.nodes.max(axis=0) - ref.nodes.min(axis=0)
        tol = 1e-9 * float(np.hypot(*span))
    inside = geo.winding_numbers(ref, prev.nodes) != 0
    if inside.all():
        return True
    d, _ = geo.distance_to_polyline(ref, prev.nodes[~inside])
    return bool(np.all(d <= tol))


def graphs_monotone(prev, next, refine_factor=32, tol=None):
    """Check ``w_next <= w_prev`` and ``v_next >= v_prev`` on a shared grid.

    Returns ``(ok, worst)`` where ``worst`` is the largest violation (negative
    when both inequalities hold with margin).
    """
    rp = geo.refine(prev, refine_factor)
    rn = geo.refine(next, refine_factor)
    dp = geo.decompose_graphs(rp)
    dn = geo.decompose_graphs(rn)
    if tol is None:
        span = rn.nodes.max(axis=0) - rn.nodes.min(axis=0)
        tol = 1e-9 * float(np.hypot(*span))
    grid = np.linspace(max(dp.a, dn.a), min(dp.b, dn.b), len(prev) + 2)[1:-1]
    xp, xn = rp.nodes, rn.nodes
    w_p = np.interp(grid, xp[dp.bottom_path, 0], xp[dp.bottom_path, 1])
    v_p = np.interp(grid, xp[dp.top_path, 0], xp[dp.top_path, 1])
    w_n = np.interp(grid, xn[dn.bottom_path, 0], xn[dn.bottom_path, 1])
    v_n = np.interp(grid, xn[dn.top_path, 0], xn[dn.top_path, 1])
    worst = float(max(np.max(w_n - w_p), np.max(v_p - v_n)))
    return worst <= tol, worst
