"""Hermitian arrowhead matrices and quantitative eigenvalue concentration.

An arrowhead matrix is diagonal except for its last row and column.  When
the corner entry satisfies an explicit quadratic growth condition in terms
of the border weight ``sum |a_i|^2`` and the diagonal entries, the small
eigenvalues concentrate within ``eps`` of the diagonal entries and the top
eigenvalue sits within ``(n-1)*eps`` above the corner.  This module
evaluates the growth thresholds, verifies the concentration bounds against
a dense eigensolver, deflates repeated diagonal entries exactly, and runs
randomized sweeps over spec families.

All functions are pure; sweeps are deterministic for a fixed seed and
chunk their trials identically regardless of worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArrowheadSpec",
    "Spectrum",
    "ConcentrationReport",
    "SweepSummary",
    "assemble",
    "eigenvalues",
    "threshold_strong",
    "threshold_weak",
    "threshold_distinct",
    "check_concentration_strong",
    "check_concentration_weak",
    "check_concentration_distinct",
    "deflate_repeated",
    "sweep_below_threshold",
    "sweep_at_threshold",
    "SWEEP_CSV_HEADER",
]

# Strict inequalities of the exact-arithmetic statements are tested
# non-strictly with this margin to absorb floating-point error.
MARGIN = 1e-9

# Relative tolerance of the trace identity sum(lambda) = sum(d) + corner.
TRACE_RTOL = 1e-10

SWEEP_CSV_HEADER = "n,eps,corner_fraction,max_dev,max_excess,violations"

# Sweep trials are processed in fixed-size chunks with per-chunk RNG
# streams, so results do not depend on the worker count.
_CHUNK = 512


@dataclass(frozen=True)
class ArrowheadSpec:
    """Bordered-diagonal Hermitian matrix: diagonal ``d``, last column
    ``a_off``, real corner entry."""

    d: np.ndarray
    a_off: np.ndarray
    corner: float

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        a = np.asarray(self.a_off, dtype=complex)
        if d.ndim != 1 or a.ndim != 1:
            raise ValueError("d and a_off must be one-dimensional")
        if d.size != a.size:
            raise ValueError(
                f"dimension mismatch: len(d)={d.size}, len(a_off)={a.size}"
            )
        if d.size < 1:
            raise ValueError("need n >= 2, i.e. at least one diagonal entry")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(a))):
            raise ValueError("entries must be finite")
        if not np.isfinite(self.corner):
            raise ValueError("corner must be finite")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "a_off", a)
        object.__setattr__(self, "corner", float(self.corner))

    @property
    def n(self) -> int:
        return self.d.size + 1

    def to_line(self) -> str:
        """Serialize as ``n; d...; re(a) im(a)...; corner``."""
        dpart = " ".join(repr(float(x)) for x in self.d)
        apart = " ".join(
            f"{float(z.real)!r} {float(z.imag)!r}" for z in self.a_off
        )
        return f"{self.n}; {dpart}; {apart}; {self.corner!r}"

    @classmethod
    def from_line(cls, line: str) -> "ArrowheadSpec":
        parts = [p.strip() for p in line.split(";")]
        if len(parts) != 4:
            raise ValueError("expected 'n; d...; re im ...; corner'")
        n = int(parts[0])
        d = np.array([float(x) for x in parts[1].split()], dtype=float)
        nums = [float(x) for x in parts[2].split()]
        if len(nums) != 2 * (n - 1):
            raise ValueError("a_off needs re/im pairs for n-1 entries")
        a = np.array(nums[0::2], dtype=float) + 1j * np.array(nums[1::2])
        spec = cls(d=d, a_off=a, corner=float(parts[3]))
        if spec.n != n:
            raise ValueError(f"declared n={n} but got {spec.n} from entries")
        return spec


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted ascending, with the trace identity and the
    corner-domination inequality validated at construction."""

    values: np.ndarray

    @classmethod
    def from_spec(cls, spec: ArrowheadSpec, values: np.ndarray) -> "Spectrum":
        values = np.sort(np.asarray(values, dtype=float))
        trace = float(np.sum(spec.d) + spec.corner)
        if abs(values.sum() - trace) > TRACE_RTOL * (1.0 + abs(trace)):
            raise ArithmeticError(
                f"trace identity violated: sum(eig)={values.sum()!r}, trace={trace!r}"
            )
        if values[-1] < spec.corner - MARGIN * (1.0 + abs(spec.corner)):
            raise ArithmeticError("largest eigenvalue below the corner entry")
        return cls(values=values)


@dataclass(frozen=True)
class ConcentrationReport:
    """Outcome of one concentration check.

    ``deviations`` holds ``|d_alpha - lambda_alpha|`` (sorted-index pairing
    for the strong/distinct checks, nearest-match for the weak check),
    ``corner_excess`` is ``lambda_n - corner``, and the pass flags are the
    asserted bounds evaluated with the floating-point margin.
    """

    mode: str
    epsilon: float
    threshold: float
    deviations: np.ndarray
    corner_excess: float
    deviation_ok: np.ndarray
    excess_ok: bool
    matched_indices: np.ndarray | None = field(default=None)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.deviation_ok)) and self.excess_ok


def assemble(spec: ArrowheadSpec) -> np.ndarray:
    """Dense Hermitian matrix with zeros off the arrow pattern."""
    n = spec.n
    m = np.zeros((n, n), dtype=complex)
    m[np.arange(n - 1), np.arange(n - 1)] = spec.d
    m[: n - 1, n - 1] = spec.a_off
    m[n - 1, : n - 1] = np.conj(spec.a_off)
    m[n - 1, n - 1] = spec.corner
    return m


def eigenvalues(spec: ArrowheadSpec) -> Spectrum:
    """Ascending eigenvalues via the dense Hermitian solver.

    Solver failures propagate as ``numpy.linalg.LinAlgError``; invariant
    violations (trace, corner domination) raise ``ArithmeticError``.
    """
    vals = np.linalg.eigvalsh(assemble(spec))
    return Spectrum.from_spec(spec, vals)


def _weights(d, a_off):
    d = np.asarray(d, dtype=float)
    a = np.asarray(a_off, dtype=complex)
    return d, np.sum(np.abs(a) ** 2, axis=-1)


def threshold_strong(d, a_off, eps: float) -> float:
    """Corner growth bound ``(2n-3)/eps * sum|a|^2 + (n-1) * sum|d|
    + (n-2) * eps / (2n-3)`` valid for every positive eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    d, asq = _weights(d, a_off)
    n = d.shape[-1] + 1
    return (
        (2 * n - 3) / eps * asq
        + (n - 1) * np.sum(np.abs(d), axis=-1)
        + (n - 2) * eps / (2 * n - 3)
    )


def threshold_weak(d, a_off, eps: float) -> float:
    """Corner growth bound ``sum|a|^2/eps + sum(d_i + (n-2)|d_i|)
    + (n-2) * eps`` for the nearest-match concentration bound."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    d, asq = _weights(d, a_off)
    n = d.shape[-1] + 1
    return (
        asq / eps
        + np.sum(d + (n - 2) * np.abs(d), axis=-1)
        + (n - 2) * eps
    )


def threshold_distinct(d, a_off, eps: float) -> float:
    """Corner growth bound ``sum|a|^2/eps + (n-1) * sum|d| + (n-2) * eps``
    used when the diagonal entries are pairwise distinct."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    d, asq = _weights(d, a_off)
    n = d.shape[-1] + 1
    return asq / eps + (n - 1) * np.sum(np.abs(d), axis=-1) + (n - 2) * eps


def _require_at_threshold(spec: ArrowheadSpec, threshold: float):
    if spec.corner < threshold - MARGIN * (1.0 + abs(threshold)):
        raise ValueError(
            f"below threshold: corner={spec.corner!r} < {threshold!r}"
        )


def check_concentration_strong(spec: ArrowheadSpec, eps: float) -> ConcentrationReport:
    """Per-index bounds ``|d_(alpha) - lambda_alpha| < eps`` (both sorted)
    and ``0 <= lambda_n - corner < (n-1) eps``, requiring the strong
    growth condition on the corner."""
    thr = float(threshold_strong(spec.d, spec.a_off, eps))
    _require_at_threshold(spec, thr)
    lam = eigenvalues(spec).values
    n = spec.n
    dev = np.abs(np.sort(spec.d) - lam[: n - 1])
    excess = float(lam[-1] - spec.corner)
    return ConcentrationReport(
        mode="strong",
        epsilon=eps,
        threshold=thr,
        deviations=dev,
        corner_excess=excess,
        deviation_ok=dev < eps + MARGIN,
        excess_ok=(excess >= -MARGIN) and (excess < (n - 1) * eps + MARGIN),
    )


def check_concentration_weak(spec: ArrowheadSpec, eps: float) -> ConcentrationReport:
    """Each small eigenvalue is within ``eps`` of *some* diagonal entry,
    and the corner excess is below ``(n-1) eps + |sum(d) - sum(d_matched)|``.

    Nearest-match ties are broken toward the smaller index.
    """
    thr = float(threshold_weak(spec.d, spec.a_off, eps))
    _require_at_threshold(spec, thr)
    lam = eigenvalues(spec).values
    n = spec.n
    small = lam[: n - 1]
    dist = np.abs(small[:, None] - spec.d[None, :])
    matched = np.argmin(dist, axis=1)  # argmin takes the first minimum
    dev = dist[np.arange(n - 1), matched]
    excess = float(lam[-1] - spec.corner)
    bound = (n - 1) * eps + abs(float(np.sum(spec.d) - np.sum(spec.d[matched])))
    return ConcentrationReport(
        mode="weak",
        epsilon=eps,
        threshold=thr,
        deviations=dev,
        corner_excess=excess,
        deviation_ok=dev < eps + MARGIN,
        excess_ok=(excess >= -MARGIN) and (excess < bound + MARGIN),
        matched_indices=matched,
    )


def check_concentration_distinct(spec: ArrowheadSpec, eps: float) -> ConcentrationReport:
    """Per-index bounds under pairwise-distinct diagonal entries.

    Requires ``0 < eps <= min gap / 2`` (vacuous when n = 2) and the
    distinct-case growth condition on the corner.
    """
    d = spec.d
    if d.size >= 2:
        gaps = np.abs(d[:, None] - d[None, :])[np.triu_indices(d.size, k=1)]
        min_gap = float(gaps.min())
        if min_gap == 0.0:
            raise ValueError("diagonal entries must be pairwise distinct")
        if eps > 0.5 * min_gap:
            raise ValueError(
                f"eps={eps!r} exceeds half the minimal diagonal gap {min_gap!r}"
            )
    if eps <= 0:
        raise ValueError("eps must be positive")
    thr = float(threshold_distinct(d, spec.a_off, eps))
    _require_at_threshold(spec, thr)
    lam = eigenvalues(spec).values
    n = spec.n
    dev = np.abs(np.sort(d) - lam[: n - 1])
    excess = float(lam[-1] - spec.corner)
    return ConcentrationReport(
        mode="distinct",
        epsilon=eps,
        threshold=thr,
        deviations=dev,
        corner_excess=excess,
        deviation_ok=dev < eps + MARGIN,
        excess_ok=(excess >= -MARGIN) and (excess < (n - 1) * eps + MARGIN),
    )


def deflate_repeated(spec: ArrowheadSpec) -> tuple[float, ArrowheadSpec]:
    """Split off one exact eigenvalue at a repeated diagonal entry.

    For the first pair ``i0 < j0`` with ``d[i0] == d[j0]``, ``d[i0]`` is an
    eigenvalue for every corner value; the remaining spectrum is that of
    the (n-1) x (n-1) arrowhead obtained by deleting row ``i0`` and merging
    the border weights: the entry at ``j0`` becomes
    ``sqrt(|a[j0]|^2 + |a[i0]|^2)``.
    """
    d, a = spec.d, spec.a_off
    pair = None
    for i in range(d.size):
        for j in range(i + 1, d.size):
            if d[i] == d[j]:
                pair = (i, j)
                break
        if pair:
            break
    if pair is None:
        raise ValueError("no repeated diagonal entries")
    i0, j0 = pair
    d_red = np.delete(d, i0)
    a_red = np.delete(a, i0).astype(complex)
    a_red[j0 - 1] = np.sqrt(np.abs(a[j0]) ** 2 + np.abs(a[i0]) ** 2)
    return float(d[i0]), ArrowheadSpec(d=d_red, a_off=a_red, corner=spec.corner)


@dataclass(frozen=True)
class SweepSummary:
    """Aggregate of a randomized spec sweep; ``violations`` counts trials
    breaking the concentration bounds at the sweep's epsilon."""

    mode: str
    n: int
    eps: float
    corner_fraction: float
    trials: int
    seed: int
    max_dev: float
    max_excess: float
    violations: int

    def csv_row(self) -> str:
        return (
            f"{self.n},{self.eps!r},{self.corner_fraction!r},"
            f"{self.max_dev!r},{self.max_excess!r},{self.violations}"
        )


def _draw_specs(n: int, trials: int, rng: np.random.Generator):
    """Diagonal entries uniform in [-10, 10]; border entries with uniform
    modulus in [0, 10] and uniform phase."""
    d = rng.uniform(-10.0, 10.0, size=(trials, n - 1))
    mod = rng.uniform(0.0, 10.0, size=(trials, n - 1))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(trials, n - 1))
    a = mod * np.exp(1j * phase)
    return d, a


def _batch_eigenvalues(d, a, corner):
    trials, nm1 = d.shape
    n = nm1 + 1
    mats = np.zeros((trials, n, n), dtype=complex)
    idx = np.arange(nm1)
    mats[:, idx, idx] = d
    mats[:, : n - 1, n - 1] = a
    mats[:, n - 1, : n - 1] = np.conj(a)
    mats[:, n - 1, n - 1] = corner
    return np.linalg.eigvalsh(mats)


def _chunk_stats(mode, n, eps, corner_fraction, seed, chunk_id, count):
    rng = np.random.default_rng([seed, chunk_id])
    d, a = _draw_specs(n, count, rng)
    asq = np.sum(np.abs(a) ** 2, axis=-1)
    abs_d = np.sum(np.abs(d), axis=-1)
    if mode == "strong":
        thr = (2 * n - 3) / eps * asq + (n - 1) * abs_d + (n - 2) * eps / (2 * n - 3)
        eps_used = np.full(count, eps)
    elif mode == "weak":
        thr = asq / eps + np.sum(d + (n - 2) * np.abs(d), axis=-1) + (n - 2) * eps
        eps_used = np.full(count, eps)
    elif mode == "distinct":
        if n >= 3:
            gaps = np.abs(d[:, :, None] - d[:, None, :])
            iu = np.triu_indices(n - 1, k=1)
            min_gap = gaps[:, iu[0], iu[1]].min(axis=1)
            eps_used = np.minimum(eps, 0.5 * min_gap)
        else:
            eps_used = np.full(count, eps)
        thr = asq / eps_used + (n - 1) * abs_d + (n - 2) * eps_used
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")
    corner = corner_fraction * thr
    lam = _batch_eigenvalues(d, a, corner)
    small = lam[:, : n - 1]
    if mode == "weak":
        dist = np.abs(small[:, :, None] - d[:, None, :])
        matched = np.argmin(dist, axis=2)
        dev = np.take_along_axis(dist, matched[:, :, None], axis=2)[:, :, 0]
        d_matched = np.take_along_axis(d, matched, axis=1)
        excess_bound = (n - 1) * eps + np.abs(d.sum(axis=1) - d_matched.sum(axis=1))
    else:
        dev = np.abs(np.sort(d, axis=1) - small)
        excess_bound = (n - 1) * eps_used
    excess = lam[:, -1] - corner
    dev_bad = np.any(dev >= eps_used[:, None] + MARGIN, axis=1)
    exc_bad = (excess < -MARGIN) | (excess >= excess_bound + MARGIN)
    return (
        float(dev.max()),
        float(excess.max()),
        int(np.count_nonzero(dev_bad | exc_bad)),
    )


def _run_sweep(mode, n, eps, trials, seed, corner_fraction, workers):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    chunks = [
        (cid, min(_CHUNK, trials - cid * _CHUNK))
        for cid in range((trials + _CHUNK - 1) // _CHUNK)
    ]
    args = [
        (mode, n, eps, corner_fraction, seed, cid, count) for cid, count in chunks
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: _chunk_stats(*t), args))
    else:
        results = [_chunk_stats(*t) for t in args]
    max_dev = max(r[0] for r in results)
    max_excess = max(r[1] for r in results)
    violations = sum(r[2] for r in results)
    return SweepSummary(
        mode=mode,
        n=n,
        eps=eps,
        corner_fraction=corner_fraction,
        trials=trials,
        seed=seed,
        max_dev=max_dev,
        max_excess=max_excess,
        violations=violations,
    )


def sweep_below_threshold(
    n: int,
    eps: float,
    trials: int,
    seed: int,
    corner_fraction: float = 0.5,
    workers: int = 1,
) -> SweepSummary:
    """Observe deviations for random specs with the corner set to a
    fraction of the strong threshold.  No bound is claimed below the
    threshold; the summary reports what was seen."""
    return _run_sweep("strong", n, eps, trials, seed, corner_fraction, workers)


def sweep_at_threshold(
    mode: str,
    n: int,
    eps: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SweepSummary:
    """Randomized verification sweep with the corner exactly at the
    growth threshold of the chosen check (strong / weak / distinct).

    For the distinct check the per-trial epsilon is capped at half the
    minimal diagonal gap, as the per-index bound requires.
    """
    return _run_sweep(mode, n, eps, trials, seed, 1.0, workers)
