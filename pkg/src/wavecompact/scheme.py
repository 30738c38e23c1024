"""The three-level compact time integrator and its error measurement.

With A = mass - sigma tau^2 a^2 laplacian, the main recurrence advances

    A (v^{m+1} - 2 v^m + v^{m-1}) / tau^2 = a^2 laplacian v^m + f_h^m,

and the first level comes from the two-level implicit initial condition

    A (v^1 - v^0) / tau = (tau/2) a^2 laplacian v^0 + u1h + (tau/2) f_h^0,

which involves no derivatives of the data and is what keeps the scheme
applicable to rough initial velocities.  v^0 is taken as node samples of u0
by default, with a hat-average alternative for data that has no meaningful
point values.

Error reports compare a run against a reference solution in two modes:

    node_sampled   errors r^m = u(x_i, t_m) - v^m enter every norm; the
                   energy field is the full two-level scheme energy norm.
    q2h_filtered   the time-difference part is measured on the filtered error
                   q_2h u - v while the space-difference part stays on u - v;
                   the energy field is then max_m of
                   ||dt(q_2h u - v)^m||_l2 + ||dx(u - v)^m||_diff_l2.
                   (The full energy norm is not finite-order for rough data,
                   which is exactly the regime this mode exists for.)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol

import numpy as np

from . import data as data_mod
from .errors import ContractViolation, InvariantError
from .grid import (GridFn, MeshSpec, Trajectory, check_stable, energy_norm_pair,
                   require_dirichlet, space_norm, time_aggregate)
from .operators import apply_implicit, solve_implicit, stencil

V0_MODES = ("node_samples", "qh_average")
ERROR_MODES = ("node_sampled", "q2h_filtered")

#: defining-equation residual contract, relative to max(1, |rhs|_inf)
RESIDUAL_RTOL = 1e-11


@dataclass(frozen=True)
class SchemeRun:
    """One integrator run: mesh, configuration, trajectory, diagnostics."""

    mesh: MeshSpec
    u1_variant: str
    v0_mode: str
    trajectory: Trajectory | None
    residual_max: np.ndarray  # residual_max[m-1] belongs to the step producing v^m


@dataclass(frozen=True)
class ErrorReport:
    max_energy_error: float
    max_dx_error: float
    l1_spacetime_error: float
    l1_spacetime_dx_error: float
    mode: str


class SliceReference(Protocol):
    """Reference solution evaluated slice by slice on a fixed mesh."""

    mesh: MeshSpec

    def slice_values(self, m: int) -> GridFn: ...

    def qh_slice_values(self, m: int) -> GridFn: ...


def _step_residual(mesh: MeshSpec, lhs_fn: GridFn, rhs: GridFn) -> float:
    res = float(np.max(np.abs(lhs_fn[1:-1] - rhs[1:-1])))
    scale = max(1.0, float(np.max(np.abs(rhs))))
    if res > RESIDUAL_RTOL * scale:
        raise InvariantError(f"defining-equation residual {res:.3e} exceeds "
                             f"{RESIDUAL_RTOL:.0e} * {scale:.3e}")
    return res


def initial_step(mesh: MeshSpec, v0, u1h, fh0=None,
                 check_residual: bool = True) -> GridFn:
    """First time level from the implicit two-level initial condition."""
    check_stable(mesh)
    v0 = require_dirichlet(v0, mesh, "v0")
    u1h = require_dirichlet(u1h, mesh, "u1h")
    tau, a = mesh.tau, mesh.a
    rhs = 0.5 * tau * a ** 2 * stencil("laplacian", v0, mesh) + u1h
    if fh0 is not None:
        rhs = rhs + 0.5 * tau * require_dirichlet(fh0, mesh, "fh0")
    dt0 = solve_implicit(rhs, mesh)
    if check_residual:
        _step_residual(mesh, apply_implicit(dt0, mesh), rhs)
    return v0 + tau * dt0


def time_step(mesh: MeshSpec, v_prev, v_curr, fh_m=None,
              check_residual: bool = True) -> GridFn:
    """Advance one level of the main recurrence."""
    check_stable(mesh)
    v_prev = require_dirichlet(v_prev, mesh, "v_prev")
    v_curr = require_dirichlet(v_curr, mesh, "v_curr")
    tau, a = mesh.tau, mesh.a
    rhs = a ** 2 * stencil("laplacian", v_curr, mesh)
    if fh_m is not None:
        rhs = rhs + require_dirichlet(fh_m, mesh, "fh_m")
    lam_t = solve_implicit(rhs, mesh)
    if check_residual:
        _step_residual(mesh, apply_implicit(lam_t, mesh), rhs)
    return tau ** 2 * lam_t + 2.0 * v_curr - v_prev


def iterate_slices(mesh: MeshSpec, v0, u1h, fh=None,
                   check_residuals: bool = True,
                   residual_out: list | None = None) -> Iterator[GridFn]:
    """Yield v^0 .. v^M one slice at a time (streaming form of evolve)."""
    check_stable(mesh)
    v0 = require_dirichlet(np.array(v0, dtype=float), mesh, "v0")
    fh0 = None if fh is None else fh[0]
    yield v0
    tau, a = mesh.tau, mesh.a
    rhs = 0.5 * tau * a ** 2 * stencil("laplacian", v0, mesh) + u1h
    if fh0 is not None:
        rhs = rhs + 0.5 * tau * fh0
    dt0 = solve_implicit(rhs, mesh)
    if check_residuals or residual_out is not None:
        r = _step_residual(mesh, apply_implicit(dt0, mesh), rhs)
        if residual_out is not None:
            residual_out.append(r)
    v_prev, v_curr = v0, v0 + tau * dt0
    yield v_curr
    for m in range(1, mesh.M):
        rhs = a ** 2 * stencil("laplacian", v_curr, mesh)
        if fh is not None:
            rhs = rhs + fh[m]
        lam_t = solve_implicit(rhs, mesh)
        if check_residuals or residual_out is not None:
            r = _step_residual(mesh, apply_implicit(lam_t, mesh), rhs)
            if residual_out is not None:
                residual_out.append(r)
        v_next = tau ** 2 * lam_t + 2.0 * v_curr - v_prev
        v_prev, v_curr = v_curr, v_next
        yield v_curr


def prepare_inputs(mesh: MeshSpec, data: data_mod.DataSpec, variant: str,
                   v0_mode: str):
    """Assemble (v0, u1h, fh) grid data from the descriptors."""
    if v0_mode not in V0_MODES:
        raise ContractViolation(f"unknown v0 mode {v0_mode!r}; expected one of {V0_MODES}")
    if v0_mode == "node_samples":
        v0 = data_mod.sample_nodes(data.u0, mesh)
        v0[0] = v0[-1] = 0.0
    else:
        v0 = data_mod.average_qh(data.u0, mesh)
    u1h = data_mod.build_u1h(variant, data.u1, mesh)
    fh = data_mod.build_fh(data.f, mesh) if data.f is not None else None
    return v0, u1h, fh


def evolve(mesh: MeshSpec, data: data_mod.DataSpec, variant: str = "v2",
           v0_mode: str = "node_samples", store: bool = True,
           check_residuals: bool = True) -> SchemeRun:
    """Run the integrator over the whole time mesh.

    store=False drops the trajectory (two-slice streaming); use
    iterate_slices directly when the slices are consumed on the fly.
    """
    v0, u1h, fh = prepare_inputs(mesh, data, variant, v0_mode)
    residuals: list[float] = []
    slices = iterate_slices(mesh, v0, u1h, fh, check_residuals=check_residuals,
                            residual_out=residuals)
    if store:
        arr = np.empty((mesh.M + 1, mesh.N + 1))
        for m, v in enumerate(slices):
            arr[m] = v
        trajectory = Trajectory(slices=arr, mesh=mesh)
    else:
        for _ in slices:
            pass
        trajectory = None
    return SchemeRun(mesh=mesh, u1_variant=variant, v0_mode=v0_mode,
                     trajectory=trajectory, residual_max=np.asarray(residuals))


def measure_error(mesh: MeshSpec, slices: Iterable[GridFn],
                  reference: SliceReference, mode: str = "node_sampled") -> ErrorReport:
    """Accumulate the error norms of a slice stream against a reference."""
    if mode not in ERROR_MODES:
        raise ContractViolation(f"unknown error mode {mode!r}; expected one of {ERROR_MODES}")
    tau = mesh.tau
    h = mesh.h
    max_energy = 0.0
    max_dx = 0.0
    l1_series = np.empty(mesh.M + 1)
    l1_dx_series = np.empty(mesh.M + 1)
    prev_err = None
    prev_filt = None
    count = 0
    for m, v in enumerate(slices):
        err = reference.slice_values(m) - v
        err[0] = err[-1] = 0.0
        l1_series[m] = space_norm(err, "l1", mesh)
        l1_dx_series[m] = float(np.sum(np.abs(np.diff(err) / h)) * h)
        dx_norm = space_norm(err, "diff_l2", mesh)
        max_dx = max(max_dx, dx_norm)
        if mode == "q2h_filtered":
            filt = data_mod.q2h_from_qh(reference.qh_slice_values(m), mesh) - v
            filt[0] = filt[-1] = 0.0
            if m >= 1:
                dt_norm = space_norm((filt - prev_filt) / tau, "l2", mesh)
                max_energy = max(max_energy, dt_norm + dx_norm)
            prev_filt = filt
        else:
            if m >= 1:
                max_energy = max(max_energy, energy_norm_pair(prev_err, err, mesh))
            prev_err = err
        count += 1
    if count != mesh.M + 1:
        raise ContractViolation(f"expected {mesh.M + 1} slices, got {count}")
    return ErrorReport(
        max_energy_error=max_energy,
        max_dx_error=max_dx,
        l1_spacetime_error=time_aggregate(l1_series, "l1", mesh),
        l1_spacetime_dx_error=time_aggregate(l1_dx_series, "l1", mesh),
        mode=mode,
    )


def error_report(run: SchemeRun, reference: SliceReference,
                 mode: str = "node_sampled") -> ErrorReport:
    """Error norms of a stored run against a reference solution."""
    if run.trajectory is None:
        raise ContractViolation("error_report needs a stored trajectory; "
                                "use measure_error with iterate_slices for streaming runs")
    return measure_error(run.mesh, run.trajectory.slices, reference, mode)
