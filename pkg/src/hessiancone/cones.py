"""Concave symmetric eigenvalue functions on Garding cones.

Three families are shipped, all homogeneous of degree one, positive and
concave on their cone, with positive partial derivatives:

* ``sigma_k_root``:   f = sigma_k(lambda)^(1/k)       on Gamma_k,
* ``monge_ampere``:   f = sigma_n(lambda)^(1/n)       on Gamma_n,
* ``hessian_quotient``: f = (sigma_l/sigma_k)^(1/(l-k)), k < l, on Gamma_l,

where sigma_j is the j-th elementary symmetric polynomial and
Gamma_k = {lambda : sigma_j(lambda) > 0 for j = 1..k}.  The limit of f at
the cone boundary is 0 for each family, so the degeneracy gap of a
right-hand side psi is simply ``min(psi)``.

Evaluation goes through the elementary-symmetric recursion rather than
polynomial expansion.  Most functions accept stacked inputs with the
eigenvalue axis last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "SymmetricFunction",
    "sigma_k_root",
    "monge_ampere",
    "hessian_quotient",
    "parse_kind",
    "LevelSetPoint",
    "SubsolutionGapSpec",
    "GapResult",
    "elem_sym",
    "elem_sym_grad",
    "in_cone",
    "f_eval",
    "f_grad",
    "fd_grad",
    "check_concavity",
    "euler_positivity",
    "ray_intersect",
    "make_level_set_point",
    "write_level_set_csv",
    "read_level_set_csv",
    "check_fi_sum_bound",
    "subsolution_gap",
    "default_beta",
    "delta_nondegeneracy",
    "kappa_lower_bound",
]

CONCAVITY_MARGIN = 1e-10
EULER_RTOL = 1e-9
RAY_RTOL = 1e-10
LEVEL_RTOL = 1e-9
NORMAL_ATOL = 1e-12

# Quotient gradients switch from the analytic log-derivative to rejection
# when sigma_k degenerates; points this close to the cone boundary are
# treated as outside the numerically safe cone.
_QUOTIENT_FLOOR = 1e-12


class ConeError(ValueError):
    """Input lies outside the admissible cone of the function."""


@dataclass(frozen=True)
class SymmetricFunction:
    """A shipped symmetric function: ``kind`` selects the family, ``n`` the
    dimension, ``k``/``l`` the family parameters (quotient uses both)."""

    kind: str
    n: int
    k: int = 0
    l: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if self.kind == "sigma_k_root":
            if not 1 <= self.k <= self.n:
                raise ValueError("need 1 <= k <= n")
        elif self.kind == "monge_ampere":
            object.__setattr__(self, "k", self.n)
        elif self.kind == "hessian_quotient":
            if not 0 < self.k < self.l <= self.n:
                raise ValueError("need 0 < k < l <= n")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def cone_order(self) -> int:
        """Gamma_m with m = cone_order is the domain of the function."""
        if self.kind == "hessian_quotient":
            return self.l
        return self.k

    @property
    def sup_boundary(self) -> float:
        """Limit superior of f at the cone boundary (0 for all families)."""
        return 0.0

    @property
    def label(self) -> str:
        if self.kind == "monge_ampere":
            return "ma"
        if self.kind == "sigma_k_root":
            return "sigma1" if self.k == 1 else f"sigmaK:{self.k}"
        return f"quotient:{self.k}:{self.l}"


def sigma_k_root(n: int, k: int) -> SymmetricFunction:
    return SymmetricFunction(kind="sigma_k_root", n=n, k=k)


def monge_ampere(n: int) -> SymmetricFunction:
    return SymmetricFunction(kind="monge_ampere", n=n, k=n)


def hessian_quotient(n: int, k: int, l: int) -> SymmetricFunction:
    return SymmetricFunction(kind="hessian_quotient", n=n, k=k, l=l)


def parse_kind(name: str, n: int) -> SymmetricFunction:
    """Parse a CLI kind name: sigma1 | sigmaK:k | ma | quotient:k:l."""
    name = name.strip()
    if name == "sigma1":
        return sigma_k_root(n, 1)
    if name == "ma":
        return monge_ampere(n)
    if name.startswith("sigmaK:"):
        return sigma_k_root(n, int(name.split(":")[1]))
    if name.startswith("quotient:"):
        _, k, l = name.split(":")
        return hessian_quotient(n, int(k), int(l))
    raise ValueError(f"unknown function kind {name!r}")


def elem_sym(vals: np.ndarray, kmax: int) -> np.ndarray:
    """Elementary symmetric polynomials e_0..e_kmax along the last axis."""
    vals = np.asarray(vals, dtype=float)
    n = vals.shape[-1]
    e = np.zeros(vals.shape[:-1] + (kmax + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        x = vals[..., i]
        for j in range(min(kmax, i + 1), 0, -1):
            e[..., j] += x * e[..., j - 1]
    return e


def elem_sym_grad(vals: np.ndarray, k: int) -> np.ndarray:
    """d e_k / d lambda_i = e_{k-1} of the other entries, per entry."""
    vals = np.asarray(vals, dtype=float)
    n = vals.shape[-1]
    out = np.zeros_like(vals)
    for i in range(n):
        rest = np.delete(vals, i, axis=-1)
        out[..., i] = elem_sym(rest, k - 1)[..., k - 1]
    return out


def in_cone(fun: SymmetricFunction, lam) -> np.ndarray | bool:
    """True where lambda lies in the open cone Gamma_{cone_order}."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] != fun.n:
        raise ValueError(f"expected dimension {fun.n}, got {lam.shape[-1]}")
    e = elem_sym(lam, fun.cone_order)
    ok = np.all(e[..., 1:] > 0.0, axis=-1)
    if lam.ndim == 1:
        return bool(ok)
    return ok


def _require_in_cone(fun, lam):
    ok = in_cone(fun, lam)
    if not np.all(ok):
        raise ConeError(f"point outside Gamma_{fun.cone_order}")


def f_many(fun: SymmetricFunction, lam: np.ndarray) -> np.ndarray:
    """Function values on stacked points (no cone validation)."""
    lam = np.asarray(lam, dtype=float)
    if fun.kind == "hessian_quotient":
        e = elem_sym(lam, fun.l)
        return (e[..., fun.l] / e[..., fun.k]) ** (1.0 / (fun.l - fun.k))
    e = elem_sym(lam, fun.k)
    return e[..., fun.k] ** (1.0 / fun.k)


def grad_many(fun: SymmetricFunction, lam: np.ndarray) -> np.ndarray:
    """Gradients on stacked points (no cone validation)."""
    lam = np.asarray(lam, dtype=float)
    f = f_many(fun, lam)
    if fun.kind == "hessian_quotient":
        e = elem_sym(lam, fun.l)
        gl = elem_sym_grad(lam, fun.l)
        gk = elem_sym_grad(lam, fun.k)
        logderiv = gl / e[..., fun.l : fun.l + 1] - gk / e[..., fun.k : fun.k + 1]
        return f[..., None] * logderiv / (fun.l - fun.k)
    e = elem_sym(lam, fun.k)
    gk = elem_sym_grad(lam, fun.k)
    return f[..., None] * gk / (fun.k * e[..., fun.k : fun.k + 1])


def f_eval(fun: SymmetricFunction, lam) -> float:
    """Value at one cone point; rejects points outside the cone."""
    lam = np.asarray(lam, dtype=float)
    _require_in_cone(fun, lam)
    if fun.kind == "hessian_quotient":
        e = elem_sym(lam, fun.l)
        if e[..., fun.k] < _QUOTIENT_FLOOR * (1.0 + np.abs(lam).max() ** fun.k):
            raise ConeError("sigma_k too close to zero for a stable quotient")
    return float(f_many(fun, lam))


def f_grad(fun: SymmetricFunction, lam) -> np.ndarray:
    """Gradient at one cone point, strictly positive componentwise."""
    lam = np.asarray(lam, dtype=float)
    _require_in_cone(fun, lam)
    g = grad_many(fun, lam)
    if not np.all(g > 0.0):
        raise ArithmeticError("gradient not positive inside the cone")
    return g


def fd_grad(fun: SymmetricFunction, lam, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient (independent check)."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    for i in range(lam.size):
        hi = lam.copy()
        lo = lam.copy()
        hi[i] += step
        lo[i] -= step
        out[i] = (f_many(fun, hi) - f_many(fun, lo)) / (2.0 * step)
    return out


def check_concavity(fun: SymmetricFunction, lam, mu) -> bool:
    """Midpoint and gradient-form concavity inequalities with margin."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    _require_in_cone(fun, lam)
    _require_in_cone(fun, mu)
    f_lam = f_eval(fun, lam)
    f_mu = f_eval(fun, mu)
    mid = f_many(fun, 0.5 * (lam + mu))
    midpoint_ok = mid >= 0.5 * (f_lam + f_mu) - CONCAVITY_MARGIN
    g = f_grad(fun, lam)
    gradient_ok = float(g @ (mu - lam)) >= f_mu - f_lam - CONCAVITY_MARGIN
    return bool(midpoint_ok and gradient_ok)


def euler_positivity(fun: SymmetricFunction, lam) -> float:
    """Return ``sum_i f_i(lambda) * lambda_i``; positive in the cone, and
    equal to f(lambda) for these degree-one families."""
    lam = np.asarray(lam, dtype=float)
    g = f_grad(fun, lam)
    s = float(g @ lam)
    if s <= 0.0:
        raise ArithmeticError("sum f_i * lambda_i not positive in the cone")
    f = f_eval(fun, lam)
    if abs(s - f) > EULER_RTOL * (1.0 + abs(f)):
        raise ArithmeticError(
            f"Euler identity violated for degree-one family: {s!r} vs {f!r}"
        )
    return s


def ray_intersect(fun: SymmetricFunction, lam, sigma: float) -> float:
    """Unique t > 0 with f(t * lambda) = sigma.

    The map t -> f(t lambda) is strictly increasing in the cone, so a
    power-of-two bracket followed by root finding succeeds for every
    sigma in (0, sup f); a bracketing failure would indicate a family
    violating the growth assumption and is raised loudly.
    """
    lam = np.asarray(lam, dtype=float)
    _require_in_cone(fun, lam)
    if not sigma > fun.sup_boundary:
        raise ValueError(f"sigma={sigma!r} not above the boundary sup 0")
    lo = hi = 1.0
    for _ in range(200):
        if f_many(fun, hi * lam) >= sigma:
            break
        hi *= 2.0
    else:
        raise ArithmeticError("bracketing failure: f(t*lambda) stays below sigma")
    for _ in range(200):
        if f_many(fun, lo * lam) <= sigma:
            break
        lo /= 2.0
    else:
        raise ArithmeticError("bracketing failure: f(t*lambda) stays above sigma")
    if lo == hi:
        t = lo
    else:
        t = brentq(
            lambda s: f_many(fun, s * lam) - sigma, lo, hi, xtol=1e-30, rtol=8.9e-16
        )
    # Newton polish: d/dt f(t lambda) = sum f_i(t lambda) lambda_i
    for _ in range(3):
        resid = f_many(fun, t * lam) - sigma
        if abs(resid) <= RAY_RTOL * (1.0 + abs(sigma)):
            break
        slope = float(grad_many(fun, t * lam) @ lam)
        t -= resid / slope
    resid = float(f_many(fun, t * lam) - sigma)
    if abs(resid) > RAY_RTOL * (1.0 + abs(sigma)):
        raise ArithmeticError(f"ray solve residual {resid!r} above tolerance")
    return float(t)


@dataclass(frozen=True)
class LevelSetPoint:
    """A point on the level set {f = sigma} with its unit normal."""

    lam: np.ndarray
    sigma: float
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=float))
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float))
        if abs(np.linalg.norm(self.normal) - 1.0) > NORMAL_ATOL:
            raise ValueError("normal must be a unit vector")


def make_level_set_point(
    fun: SymmetricFunction, direction, sigma: float
) -> LevelSetPoint:
    """Scale a cone direction onto the level set {f = sigma}."""
    direction = np.asarray(direction, dtype=float)
    t = ray_intersect(fun, direction, sigma)
    lam = t * direction
    f = f_eval(fun, lam)
    if abs(f - sigma) > LEVEL_RTOL * (1.0 + abs(sigma)):
        raise ArithmeticError("level-set point off its level")
    g = f_grad(fun, lam)
    return LevelSetPoint(lam=lam, sigma=sigma, normal=g / np.linalg.norm(g))


def check_fi_sum_bound(fun: SymmetricFunction, point: LevelSetPoint, t: float) -> bool:
    """Level-set gradient-sum bound: sum f_i > (f(t*1) - sigma)/t."""
    if t <= 0:
        raise ValueError("t must be positive")
    g = f_grad(fun, point.lam)
    rhs = (f_eval(fun, t * np.ones(fun.n)) - point.sigma) / t
    return bool(g.sum() > rhs - CONCAVITY_MARGIN)


@dataclass(frozen=True)
class SubsolutionGapSpec:
    """Normal-separation constant ``beta`` and the reference gap ``epsilon``
    against which measured gaps are compared."""

    beta: float
    epsilon: float = 0.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")


def default_beta(fun: SymmetricFunction, reference_points) -> float:
    """Half the minimal distance of the reference unit normals to the
    boundary of the positive orthant (= half the smallest component)."""
    best = np.inf
    for lam in np.atleast_2d(np.asarray(reference_points, dtype=float)):
        g = f_grad(fun, lam)
        nu = g / np.linalg.norm(g)
        best = min(best, float(nu.min()))
    if not best > 0:
        raise ArithmeticError("reference normal touches the orthant boundary")
    return 0.5 * best


@dataclass(frozen=True)
class GapResult:
    """Outcome of the two-branch subsolution gap test."""

    branch: str  # "normal-near" | "normal-far"
    normal_distance: float
    eps_prime: float | None  # far branch: largest valid gap constant
    min_component_ratio: float | None  # near branch: min_i f_i / sum_j f_j
    passed: bool


def subsolution_gap(
    fun: SymmetricFunction, lam_sub, lam, spec: SubsolutionGapSpec
) -> GapResult:
    """Dichotomy at ``lam`` relative to the reference ``lam_sub``.

    If the level-set normals differ by at least ``beta``, the concavity
    gap inequality
        sum f_i(lam) (lam_sub_i - lam_i) >= f(lam_sub) - f(lam)
                                            + eps (1 + sum f_i(lam))
    holds for some eps > 0; the largest such eps is returned (the bound is
    linear in eps, so the maximiser is explicit).  Otherwise every
    component satisfies f_i >= (beta/sqrt(n)) sum_j f_j.
    """
    lam_sub = np.asarray(lam_sub, dtype=float)
    lam = np.asarray(lam, dtype=float)
    g_sub = f_grad(fun, lam_sub)
    g = f_grad(fun, lam)
    nu_sub = g_sub / np.linalg.norm(g_sub)
    nu = g / np.linalg.norm(g)
    dist = float(np.linalg.norm(nu - nu_sub))
    gsum = float(g.sum())
    if dist < spec.beta:
        ratio = float(g.min()) / gsum
        return GapResult(
            branch="normal-near",
            normal_distance=dist,
            eps_prime=None,
            min_component_ratio=ratio,
            passed=ratio >= spec.beta / np.sqrt(fun.n) - CONCAVITY_MARGIN,
        )
    lhs = float(g @ (lam_sub - lam))
    gap = lhs - (f_eval(fun, lam_sub) - f_eval(fun, lam))
    eps_prime = gap / (1.0 + gsum)
    return GapResult(
        branch="normal-far",
        normal_distance=dist,
        eps_prime=eps_prime,
        min_component_ratio=None,
        passed=eps_prime > 0.0 and eps_prime >= spec.epsilon,
    )


def write_level_set_csv(path, points) -> None:
    """Serialize level-set samples as ``lambda_1..lambda_n,sigma`` rows."""
    points = list(points)
    if not points:
        raise ValueError("no points to write")
    n = points[0].lam.size
    with open(path, "w") as fh:
        fh.write(",".join(f"lambda_{i + 1}" for i in range(n)) + ",sigma\n")
        for p in points:
            fh.write(
                ",".join(repr(float(v)) for v in p.lam)
                + f",{p.sigma!r}\n"
            )


def read_level_set_csv(path, fun: SymmetricFunction) -> list:
    """Rebuild LevelSetPoints (normals recomputed from the function)."""
    out = []
    with open(path) as fh:
        next(fh)
        for line in fh:
            *lam, sigma = (float(x) for x in line.split(","))
            lam = np.asarray(lam)
            g = f_grad(fun, lam)
            out.append(
                LevelSetPoint(lam=lam, sigma=sigma, normal=g / np.linalg.norm(g))
            )
    return out


def delta_nondegeneracy(fun: SymmetricFunction, psi_values) -> float:
    """min(psi) minus the boundary sup of f (0 here); zero marks the
    degenerate regime."""
    psi_values = np.asarray(psi_values, dtype=float)
    if psi_values.size == 0:
        raise ValueError("psi_values must be nonempty")
    return float(psi_values.min() - fun.sup_boundary)


def kappa_lower_bound(fun: SymmetricFunction, sup_psi: float) -> float:
    """Uniform positive lower bound for sum f_i along {f = psi} levels:
    kappa = (f((1+c0)*1) - sup_psi)/(1+c0) with f(c0*1) = sup_psi."""
    ones = np.ones(fun.n)
    c0 = ray_intersect(fun, ones, sup_psi)
    kappa = (f_eval(fun, (1.0 + c0) * ones) - sup_psi) / (1.0 + c0)
    if not kappa > 0:
        raise ArithmeticError("kappa must be positive")
    return float(kappa)
