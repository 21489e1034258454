"""Continuity-method solver and a-priori-estimate diagnostics.

The Dirichlet problem f(lambda(chi + dd-bar u)) = psi is driven from the
subsolution's own equation to the target along the interpolated family

    psi_t = (1 - t) f(lambda(g[u_sub])) + t psi,        t: 0 -> 1,

each stage solved by a damped Newton iteration on the discrete system.
Damping keeps every node's eigenvalues inside the cone and the sup-norm
residual decreasing; continuation halves its step when a stage fails and
stalls loudly below the minimum step.  The same driver covers the real
(cylinder) variant, where the complex Hessian is replaced by the real one.

Diagnostics implement the measured forms of the boundary estimates: the
harmonic majorant / comparison sandwich, sup-norm and Hessian reports with
one-sided boundary stencils, the boundary-ratio and tangential-normal
quotients, and a local barrier field whose discrete ellipticity defect can
be inspected near a boundary point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cones
from .geometry import ScalarField
from .linsolve import LinearSolveError, solve_dirichlet
from .operators import (
    AdmissibilityError,
    apply_second_order,
    boundary_complex_hessian,
    boundary_real_hessian,
    coefficient_tensor,
    complex_laplacian,
    eigen_field,
    first_derivative_centered,
    form_field,
    gradient_boundary,
    gradient_interior,
    linearize,
)

__all__ = [
    "SolverConfig",
    "ContinuityState",
    "StageRecord",
    "SolveReport",
    "BarrierSpec",
    "BarrierReport",
    "SubsolutionError",
    "ContinuationError",
    "newton_step",
    "continuity_solve",
    "solve_riemannian",
    "harmonic_majorant",
    "comparison_check",
    "estimate_report",
    "barrier_eval",
    "degenerate_sweep",
    "comparison_tolerance",
    "newton_tail_ratios",
]

BOUNDARY_MATCH_ATOL = 1e-10
SUBSOLUTION_SLACK = 1e-12


class SubsolutionError(ValueError):
    """The supplied subsolution violates a precondition."""


class ContinuationError(RuntimeError):
    """The continuity path stalled before t = 1."""

    def __init__(self, t, residual, message):
        self.t = t
        self.residual = residual
        super().__init__(message)


class _StageFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-8
    dt0: float = 0.1
    dt_min: float = 1e-4
    max_newton: int = 30
    lin_rtol: float = 1e-10
    max_halvings: int = 10  # damping factors 1, 1/2, ..., 2**-max_halvings


@dataclass
class StageRecord:
    t: float
    residuals: list
    dampings: list


@dataclass
class ContinuityState:
    t: float
    u: ScalarField
    psi_t: np.ndarray  # interior target of the current stage
    history: list = field(default_factory=list)


@dataclass
class SolveReport:
    """Norms, boundary-estimate ratios, and solve statistics."""

    label: str = ""
    resolution: int = 0
    converged: bool = False
    t_final: float = 0.0
    final_residual: float = np.nan
    sup_u: float = np.nan
    sup_grad_interior: float = np.nan
    sup_grad_boundary: float = np.nan
    sup_ddbar_interior: float = np.nan
    sup_ddbar_boundary: float = np.nan
    boundary_ratio: float = np.nan
    tangential_normal_ratio: float = np.nan
    global_second_ratio: float = np.nan
    comparison_violations: int = -1
    newton_iterations: int = 0
    continuity_stages: int = 0
    min_dt_used: float = np.nan
    boundary_tangential_min: float = np.nan
    stage_history: list = field(default_factory=list)

    CSV_FIELDS = (
        "label,resolution,converged,t_final,final_residual,sup_u,"
        "sup_grad_interior,sup_grad_boundary,sup_ddbar_interior,"
        "sup_ddbar_boundary,boundary_ratio,tangential_normal_ratio,"
        "global_second_ratio,comparison_violations,newton_iterations,"
        "continuity_stages,min_dt_used"
    )

    def csv_row(self) -> str:
        vals = [
            self.label,
            str(self.resolution),
            str(int(self.converged)),
            repr(float(self.t_final)),
            repr(float(self.final_residual)),
            repr(float(self.sup_u)),
            repr(float(self.sup_grad_interior)),
            repr(float(self.sup_grad_boundary)),
            repr(float(self.sup_ddbar_interior)),
            repr(float(self.sup_ddbar_boundary)),
            repr(float(self.boundary_ratio)),
            repr(float(self.tangential_normal_ratio)),
            repr(float(self.global_second_ratio)),
            str(self.comparison_violations),
            str(self.newton_iterations),
            str(self.continuity_stages),
            repr(float(self.min_dt_used)),
        ]
        return ",".join(vals)


def comparison_tolerance(geom) -> float:
    return 10.0 * geom.h * geom.h + 1e-8


def newton_tail_ratios(stage_history, count: int = 2) -> list:
    """Residual reduction factors of the last accepted Newton iterations,
    newest first, walking stages backwards (stages that converged without
    iterating contribute nothing)."""
    ratios = []
    for stage in reversed(stage_history):
        r = stage.residuals
        for i in range(len(r) - 1, 0, -1):
            ratios.append(r[i - 1] / r[i])
            if len(ratios) == count:
                return ratios
    return ratios


def _interior_values(geom, f):
    return f.values[geom.interior] if isinstance(f, ScalarField) else np.asarray(f)


def _residual_and_mask(u, fun, chi, psi_t_interior):
    lam = eigen_field(form_field(u, chi))
    e = cones.elem_sym(lam, fun.cone_order)
    ok = np.all(e[..., 1:] > 0.0, axis=-1)
    if not np.all(ok):
        return None, None
    vals = cones.f_many(fun, lam)
    r = vals - psi_t_interior
    return r, float(np.abs(r).max())


def newton_step(state: ContinuityState, fun, chi, config: SolverConfig) -> ContinuityState:
    """One damped Newton update of the current stage.

    Solves the linearized system with homogeneous Dirichlet data for the
    update, then applies the largest damping factor in 1, 1/2, ...,
    2**-max_halvings that keeps every node admissible and reduces the
    sup-norm residual.  Raises when no factor qualifies.
    """
    geom = state.u.geom
    r, rn = _residual_and_mask(state.u, fun, chi, state.psi_t)
    if r is None:
        raise AdmissibilityError((-1,), "current iterate inadmissible")
    if rn <= config.tolerance:
        return state
    F = linearize(state.u, fun, chi)
    C = coefficient_tensor(F)
    delta = solve_dirichlet(C, geom, -r, rtol=config.lin_rtol)
    for k in range(config.max_halvings + 1):
        theta = 0.5**k
        trial = ScalarField(geom=geom, values=state.u.values + theta * delta)
        r_trial, rn_trial = _residual_and_mask(trial, fun, chi, state.psi_t)
        if r_trial is None or not rn_trial < rn:
            continue
        state.u = trial
        state.history.append(("newton", state.t, rn_trial, theta))
        return state
    raise _StageFailure("no admissible damping factor reduced the residual")


def _newton_solve(u0, fun, chi, psi_t, config, t_label):
    geom = u0.geom
    u = u0.copy()
    r, rn = _residual_and_mask(u, fun, chi, psi_t)
    if r is None:
        raise _StageFailure("stage start inadmissible")
    residuals = [rn]
    dampings = []
    while rn > config.tolerance:
        if len(residuals) > config.max_newton:
            raise _StageFailure("newton iteration budget exhausted")
        F = linearize(u, fun, chi)
        C = coefficient_tensor(F)
        try:
            delta = solve_dirichlet(C, geom, -r, rtol=config.lin_rtol)
        except LinearSolveError as exc:
            raise _StageFailure(str(exc))
        for k in range(config.max_halvings + 1):
            theta = 0.5**k
            trial = ScalarField(geom=geom, values=u.values + theta * delta)
            r_t, rn_t = _residual_and_mask(trial, fun, chi, psi_t)
            if r_t is None or not rn_t < rn:
                continue
            u, r, rn = trial, r_t, rn_t
            residuals.append(rn)
            dampings.append(theta)
            break
        else:
            raise _StageFailure("no admissible damping factor reduced the residual")
    return u, StageRecord(t=t_label, residuals=residuals, dampings=dampings)


def _check_subsolution(u_sub, phi, fun, chi, psi_interior):
    geom = u_sub.geom
    for face in (0, 1):
        sl = geom.boundary_slicer(face)
        if np.abs(u_sub.values[sl] - phi.values[sl]).max() > BOUNDARY_MATCH_ATOL:
            raise SubsolutionError("subsolution does not match the boundary data")
    lam = eigen_field(form_field(u_sub, chi))
    e = cones.elem_sym(lam, fun.cone_order)
    if not np.all(e[..., 1:] > 0.0):
        raise SubsolutionError("subsolution not admissible at every node")
    psi0 = cones.f_many(fun, lam)
    if np.any(psi0 < psi_interior - SUBSOLUTION_SLACK):
        worst = float((psi_interior - psi0).max())
        raise SubsolutionError(
            f"subsolution inequality violated by {worst!r} at some node"
        )
    return psi0


def continuity_solve(fun, chi, psi, phi, u_sub, config: SolverConfig | None = None):
    """Drive the interpolated family from the subsolution to the target.

    Returns (u, SolveReport).  The adaptive step starts at config.dt0,
    halves on stage failure, and stalls (raising ContinuationError) below
    config.dt_min.
    """
    config = config or SolverConfig()
    geom = u_sub.geom
    psi_interior = _interior_values(geom, psi)
    psi0 = _check_subsolution(u_sub, phi, fun, chi, psi_interior)

    u = ScalarField(geom=geom, values=u_sub.values.copy())
    for face in (0, 1):
        sl = geom.boundary_slicer(face)
        u.values[sl] = phi.values[sl]

    t = 0.0
    dt = config.dt0
    min_dt = dt
    stages = []
    last_rn = np.nan
    while t < 1.0:
        t_target = min(1.0, t + dt)
        psi_t = (1.0 - t_target) * psi0 + t_target * psi_interior
        try:
            u_new, record = _newton_solve(u, fun, chi, psi_t, config, t_target)
        except _StageFailure as exc:
            dt *= 0.5
            if dt < config.dt_min:
                raise ContinuationError(
                    t, last_rn, f"path stalled at t={t!r}: {exc}"
                )
            continue
        u = u_new
        t = t_target
        min_dt = min(min_dt, dt)
        stages.append(record)
        last_rn = record.residuals[-1]
        dt = min(config.dt0, 2.0 * dt)

    report = estimate_report(u)
    report.label = fun.label
    report.resolution = geom.resolution
    report.converged = True
    report.t_final = t
    report.final_residual = last_rn
    report.newton_iterations = sum(len(s.dampings) for s in stages)
    report.continuity_stages = len(stages)
    report.min_dt_used = min_dt
    report.stage_history = stages

    w = harmonic_majorant(chi, phi, geom)
    report.comparison_violations = comparison_check(u, u_sub, w)
    return u, report


def solve_riemannian(fun, chi_sym, psi, phi, u_sub, config: SolverConfig | None = None):
    """Real-Hessian variant on the flat cylinder.

    Identical driver (the discrete Hessian switches to the real one via
    the geometry).  Additionally records the minimum tangential eigenvalue
    of g - g_sub over the boundary faces, which must exceed -10 h^2.
    """
    if u_sub.geom.is_complex:
        raise ValueError("solve_riemannian expects a cylinder geometry")
    u, report = continuity_solve(fun, chi_sym, psi, phi, u_sub, config)
    geom = u.geom
    diff = ScalarField(geom=geom, values=u.values - u_sub.values)
    worst = np.inf
    for face_h in boundary_real_hessian(diff):
        tang = np.delete(
            np.delete(face_h, geom.dirichlet_axis, axis=-1),
            geom.dirichlet_axis,
            axis=-2,
        )
        worst = min(worst, float(np.linalg.eigvalsh(tang).min()))
    report.boundary_tangential_min = worst
    if worst < -10.0 * geom.h * geom.h:
        raise ArithmeticError(
            f"tangential boundary monotonicity violated: {worst!r}"
        )
    return u, report


def harmonic_majorant(chi, phi, geom) -> ScalarField:
    """Solve trace-Laplacian w = -trace(chi), w = phi on the faces.

    On the complex model the trace Laplacian is sum_i w_{i ibar} (a
    quarter of the flat Laplacian); on the cylinder it is the full one.
    """
    r = geom.real_dims
    scale = 0.25 if geom.is_complex else 1.0
    C = np.zeros(geom.interior_shape + (r, r))
    for a in range(r):
        C[..., a, a] = scale
    dim = geom.n if geom.is_complex else r
    chi_arr = np.asarray(chi) if chi is not None else np.zeros((dim, dim))
    if chi_arr.shape == (dim, dim):
        tr = float(np.trace(chi_arr).real) * np.ones(geom.interior_shape)
    else:
        sl = geom.interior if chi_arr.shape[:-2] == geom.shape else tuple()
        tr = np.real(np.trace(chi_arr[sl], axis1=-2, axis2=-1))
    values = solve_dirichlet(C, geom, -tr, boundary_values=phi.values)
    return ScalarField(geom=geom, values=values)


def comparison_check(u, u_sub, w) -> int:
    """Count nodes violating u_sub - tol <= u <= w + tol."""
    tol = comparison_tolerance(u.geom)
    below = u.values < u_sub.values - tol
    above = u.values > w.values + tol
    return int(np.count_nonzero(below | above))


def estimate_report(u) -> SolveReport:
    """Norms and measured boundary-estimate ratios of a solved field.

    Boundary derivatives use second-order one-sided stencils along the
    normal direction; everything else is centered.  On real geometries the
    'ddbar' entries hold the real-Hessian norms instead.
    """
    geom = u.geom
    report = SolveReport(resolution=geom.resolution)
    report.sup_u = u.sup()

    gi = gradient_interior(u)
    report.sup_grad_interior = float(np.sqrt((gi**2).sum(axis=-1)).max())
    gb = gradient_boundary(u)
    report.sup_grad_boundary = float(
        max(np.sqrt((g**2).sum(axis=-1)).max() for g in gb)
    )
    sup_grad = max(report.sup_grad_interior, report.sup_grad_boundary)

    if geom.is_complex:
        h_int = eigen_field(form_field(u, None))
        faces = boundary_complex_hessian(u)
        n = geom.n
        tn = max(float(np.abs(f[..., : n - 1, n - 1]).max()) for f in faces)
    else:
        h_int = np.linalg.eigvalsh(form_field(u, None).values)
        faces = boundary_real_hessian(u)
        d = geom.real_dims
        tn = max(float(np.abs(f[..., : d - 1, d - 1]).max()) for f in faces)
    report.sup_ddbar_interior = float(np.abs(h_int).max()) if h_int.size else 0.0
    report.sup_ddbar_boundary = max(
        float(np.abs(np.linalg.eigvalsh(f)).max()) for f in faces
    )
    report.boundary_ratio = report.sup_ddbar_boundary / (1.0 + sup_grad**2)
    report.tangential_normal_ratio = tn / (1.0 + sup_grad)
    sup_dd_all = max(report.sup_ddbar_interior, report.sup_ddbar_boundary)
    report.global_second_ratio = sup_dd_all / (
        1.0 + sup_grad**2 + report.sup_ddbar_boundary
    )
    return report


@dataclass(frozen=True)
class BarrierSpec:
    """Constants of the local boundary barrier; requires N*delta <= t."""

    A1: float
    A2: float
    A3: float
    N: float
    t_barrier: float
    delta: float

    def __post_init__(self):
        for name in ("A1", "A2", "A3", "N", "t_barrier", "delta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.N * self.delta - self.t_barrier > 0:
            raise ValueError("need N*delta - t <= 0")
        if self.delta > 0.5:
            raise ValueError("delta exceeds half the domain thickness")


@dataclass
class BarrierReport:
    psi_tilde: ScalarField
    b1: float
    min_L_interior: float
    max_on_ring: float
    omega_nodes: int


def _complex_tangential_squares(values, geom):
    """sum over tangential complex directions of |d(v)/dz_tau|^2, interior."""
    total = np.zeros(geom.interior_shape)
    for tau in range(geom.n - 1):
        xa, ya = geom.complex_axes(tau)
        dx = first_derivative_centered(values, geom, xa)
        dy = first_derivative_centered(values, geom, ya)
        total += 0.25 * (dx**2 + dy**2)  # |(dx - i dy)/2|^2
    return total


def _face_tangential_squares(face_vals, geom, h):
    total = np.zeros(face_vals.shape)
    for tau in range(geom.n - 1):
        xa, ya = geom.complex_axes(tau)
        fx = (np.roll(face_vals, -1, xa) - np.roll(face_vals, 1, xa)) / (2 * h)
        fy = (np.roll(face_vals, -1, ya) - np.roll(face_vals, 1, ya)) / (2 * h)
        total += 0.25 * (fx**2 + fy**2)
    return total


def barrier_eval(u, u_sub, phi, fun, chi, spec: BarrierSpec, p0_index, direction):
    """Evaluate the local barrier near a boundary point and its discrete
    ellipticity defect.

    ``direction`` is (real_axis, sign) with the axis tangential and not in
    the normal complex direction; the barrier is

        A1 sqrt(b1) (u_sub - u) - A2 sqrt(b1) rho^2
        + A3 sqrt(b1) (N sigma^2 - t sigma)
        + (1/sqrt(b1)) sum_tau |(u - phi)_tau|^2 + D(u - phi),

    with b1 = 1 + sup|grad(u - phi)|^2 + sup|grad phi|^2.  Reported are
    the minimum of L(barrier) over the interior of the rho < delta
    neighborhood and the maximum of the barrier over its discrete edge
    (including the boundary-face part).
    """
    geom = u.geom
    if not geom.is_complex:
        raise ValueError("barrier_eval needs the complex geometry")
    axis, sign = direction
    if axis >= 2 * (geom.n - 1) or sign not in (-1, 1):
        raise ValueError("direction must be a signed tangential real axis")
    da = geom.dirichlet_axis
    if p0_index[da] not in (0, geom.shape[da] - 1):
        raise ValueError("p0 must lie on a boundary face")

    diff = u.values - phi.values
    gd = gradient_interior(ScalarField(geom=geom, values=diff))
    gp = gradient_interior(phi)
    b1 = float(
        1.0 + (gd**2).sum(axis=-1).max() + (gp**2).sum(axis=-1).max()
    )
    sq = np.sqrt(b1)

    sigma = geom.boundary_distance()
    rho = geom.distance_to(tuple(p0_index))

    psi_tilde = np.zeros(geom.shape)
    inside = geom.interior
    psi_tilde[inside] = (
        spec.A1 * sq * (u_sub.values - u.values)[inside]
        - spec.A2 * sq * rho[inside] ** 2
        + spec.A3 * sq * (spec.N * sigma[inside] ** 2 - spec.t_barrier * sigma[inside])
        + _complex_tangential_squares(diff, geom) / sq
        + sign * first_derivative_centered(diff, geom, axis)
    )
    for face in (0, 1):
        sl = geom.boundary_slicer(face)
        fv = diff[sl]
        fx = _face_tangential_squares(fv, geom, geom.h) / sq
        # tangential D on the face (the direction axis is tangential)
        pos = axis if axis < da else axis - 1
        dfv = sign * (np.roll(fv, -1, pos) - np.roll(fv, 1, pos)) / (2 * geom.h)
        psi_tilde[sl] = -spec.A2 * sq * rho[sl] ** 2 + fx + dfv

    omega = rho < spec.delta
    omega_int = omega.copy()
    for face in (0, 1):
        omega_int[geom.boundary_slicer(face)] = False

    F = linearize(u, fun, chi)
    C = coefficient_tensor(F)
    L_psi = apply_second_order(C, psi_tilde, geom)
    mask_int = omega_int[inside]
    min_L = float(L_psi[mask_int].min()) if mask_int.any() else np.nan

    # discrete edge: interior Omega nodes with a neighbor outside, plus the
    # boundary-face part of the closed neighborhood
    eroded = omega_int.copy()
    for a in range(geom.real_dims):
        eroded &= np.roll(omega, 1, axis=a) & np.roll(omega, -1, axis=a)
    ring = omega_int & ~eroded
    edge_vals = [psi_tilde[ring]] if ring.any() else []
    for face in (0, 1):
        sl = geom.boundary_slicer(face)
        face_mask = rho[sl] <= spec.delta
        if face_mask.any():
            edge_vals.append(psi_tilde[sl][face_mask])
    max_ring = float(np.concatenate(edge_vals).max()) if edge_vals else np.nan

    return BarrierReport(
        psi_tilde=ScalarField(geom=geom, values=psi_tilde),
        b1=b1,
        min_L_interior=min_L,
        max_on_ring=max_ring,
        omega_nodes=int(np.count_nonzero(omega_int)),
    )


def degenerate_sweep(fun, chi, psi, phi, u_sub, eps_list, config=None):
    """Solve the shifted problems psi + eps for each eps; per-eps rows.

    Requires a strictly admissible subsolution (positive gap); individual
    failures are recorded and the sweep continues.
    """
    config = config or SolverConfig()
    geom = u_sub.geom
    eps_list = list(eps_list)
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    psi_interior = _interior_values(geom, psi)
    psi0 = _check_subsolution(u_sub, phi, fun, chi, psi_interior)
    delta0 = float((psi0 - psi_interior).min())
    if delta0 <= 0:
        raise SubsolutionError("need a strict subsolution for the sweep")
    rows = []
    for eps in eps_list:
        row = {"eps": eps, "delta0": delta0, "converged": False,
               "final_residual": np.nan, "sup_u": np.nan,
               "sup_grad": np.nan, "sup_lap": np.nan, "error": ""}
        shifted = ScalarField(geom=geom, values=psi.values + eps)
        try:
            u, rep = continuity_solve(fun, chi, shifted, phi, u_sub, config)
        except (SubsolutionError, ContinuationError, AdmissibilityError) as exc:
            row["error"] = type(exc).__name__
            rows.append(row)
            continue
        row["converged"] = True
        row["final_residual"] = rep.final_residual
        row["sup_u"] = rep.sup_u
        row["sup_grad"] = max(rep.sup_grad_interior, rep.sup_grad_boundary)
        lap = complex_laplacian(u) if geom.is_complex else np.trace(
            form_field(u, None).values, axis1=-2, axis2=-1
        )
        row["sup_lap"] = float(np.abs(lap).max())
        rows.append(row)
    return rows
