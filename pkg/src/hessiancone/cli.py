"""Batch front-end: sweeps, cone checks, solves, scaling and degenerate
studies, all emitting CSV with a provenance header.

Subcommands: lemma-sweep, cone-check, solve, boundary-scaling, degenerate.
Every output begins with ``# hessiancone=<version> seed=<seed>
config_sha256=<hash>``; identical config and seed give byte-identical
files.  Exit status is 0 iff every enabled assertion passed.  The
environment variable HESSIANCONE_THREADS caps sweep workers.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, arrowhead, cones
from .geometry import CylinderGeometry, GridGeometry, write_field_csv, write_field_raw
from .presets import build_problem
from .solve import (
    ContinuationError,
    SolveReport,
    SolverConfig,
    SubsolutionError,
    continuity_solve,
    degenerate_sweep,
    solve_riemannian,
)

FAST, FULL = "fast", "full"


def _read_config(path):
    if path is None:
        return {}, b""
    raw = Path(path).read_bytes()
    text = raw.decode()
    parser = configparser.ConfigParser()
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    parser.read_string(text)
    merged = {}
    for section in parser.sections():
        merged.update(dict(parser.items(section)))
    return merged, raw


def _workers():
    env = os.environ.get("HESSIANCONE_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _floats(text):
    return [float(x) for x in str(text).replace(",", " ").split()]


def _ints(text):
    return [int(x) for x in str(text).replace(",", " ").split()]


class _Writer:
    """CSV writer with the provenance header."""

    def __init__(self, outdir, seed, confhash):
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.prefix = (
            f"# hessiancone={__version__} seed={seed} config_sha256={confhash}\n"
        )

    def write(self, name, header, rows):
        path = self.outdir / name
        with open(path, "w") as fh:
            fh.write(self.prefix)
            fh.write(header + "\n")
            for row in rows:
                fh.write(row + "\n")
        return path


def cmd_lemma_sweep(cfg, writer, seed, profile):
    ns = _ints(cfg.get("ns", "2 3 4" if profile == FAST else "2 3 4 5 6 7 8"))
    eps_list = _floats(cfg.get("eps", "0.05 0.2 1.0"))
    trials = int(cfg.get("trials", 1000 if profile == FAST else 10000))
    fractions = _floats(cfg.get("corner_fractions", "1.0"))
    workers = _workers()
    failures = 0
    for mode in ("strong", "weak", "distinct"):
        rows = []
        for n in ns:
            for eps in eps_list:
                if trials >= 1:
                    s = arrowhead.sweep_at_threshold(
                        mode, n, eps, trials, seed, workers=workers
                    )
                    rows.append(s.csv_row())
                    failures += s.violations
        writer.write(f"lemma_{mode}.csv", arrowhead.SWEEP_CSV_HEADER, rows)
    below = []
    for frac in fractions:
        if frac >= 1.0:
            continue
        for n in ns:
            for eps in eps_list:
                if trials >= 1:
                    s = arrowhead.sweep_below_threshold(
                        n, eps, trials, seed, corner_fraction=frac, workers=workers
                    )
                    below.append(s.csv_row())
    if below:
        writer.write("below_threshold.csv", arrowhead.SWEEP_CSV_HEADER, below)
    return failures


def _cone_rows(fun, samples, rng):
    def draw():
        while True:
            lam = rng.uniform(-3.0, 3.0, fun.n) + 1.0
            if cones.in_cone(fun, lam):
                return lam

    rows = []
    fails = {k: 0 for k in (
        "gradient_positivity", "concavity_midpoint", "concavity_gradient",
        "euler_identity", "fd_gradient", "ray_unique", "fi_sum_bound",
    )}
    eps_primes = []
    beta = cones.default_beta(fun, [np.ones(fun.n)])
    spec = cones.SubsolutionGapSpec(beta=beta)
    min_margin = np.inf
    max_fd_err = 0.0
    for _ in range(samples):
        lam = draw()
        mu = draw()
        g = cones.f_grad(fun, lam)
        if not np.all(g > 0):
            fails["gradient_positivity"] += 1
        f_lam = cones.f_eval(fun, lam)
        f_mu = cones.f_eval(fun, mu)
        mid = cones.f_many(fun, 0.5 * (lam + mu))
        if not mid >= 0.5 * (f_lam + f_mu) - cones.CONCAVITY_MARGIN:
            fails["concavity_midpoint"] += 1
        if not float(g @ (mu - lam)) >= f_mu - f_lam - cones.CONCAVITY_MARGIN:
            fails["concavity_gradient"] += 1
        s = float(g @ lam)
        if abs(s - f_lam) > 1e-9 * (1 + abs(f_lam)) or s <= 0:
            fails["euler_identity"] += 1
        fd = cones.fd_grad(fun, lam)
        err = float(np.abs(fd - g).max() / np.abs(g).max())
        max_fd_err = max(max_fd_err, err)
        if err > 1e-5:
            fails["fd_gradient"] += 1
        res = cones.subsolution_gap(fun, np.ones(fun.n), lam, spec)
        if res.branch == "normal-far":
            eps_primes.append(res.eps_prime)
    # level-set samples: ray solve, uniqueness, and the gradient-sum bound
    levels = max(1, samples // 10)
    for _ in range(levels):
        lam = draw()
        sigma = float(rng.uniform(0.2, 4.0))
        try:
            t = cones.ray_intersect(fun, lam, sigma)
        except ArithmeticError:
            fails["ray_unique"] += 1
            continue
        ts = np.geomspace(t / 64.0, t * 64.0, 41)
        signs = np.sign([cones.f_many(fun, s * lam) - sigma for s in ts])
        signs = signs[signs != 0]
        if np.count_nonzero(np.diff(signs) != 0) != 1:
            fails["ray_unique"] += 1
        point = cones.make_level_set_point(fun, lam, sigma)
        c0 = cones.ray_intersect(fun, np.ones(fun.n), sigma)
        for tt in (0.5, 1.0, 2.0, 1.0 + c0):
            gsum = cones.f_grad(fun, point.lam).sum()
            rhs = (cones.f_eval(fun, tt * np.ones(fun.n)) - sigma) / tt
            min_margin = min(min_margin, gsum - rhs)
            if not cones.check_fi_sum_bound(fun, point, tt):
                fails["fi_sum_bound"] += 1
    stat = {
        "gradient_positivity": "", "concavity_midpoint": "",
        "concavity_gradient": "", "euler_identity": "",
        "fd_gradient": repr(max_fd_err),
        "ray_unique": "", "fi_sum_bound": repr(float(min_margin)),
    }
    for check, cnt in fails.items():
        rows.append(f"{fun.label},{check},{samples},{cnt},{stat[check]}")
    if eps_primes:
        arr = np.sort(np.asarray(eps_primes))
        for tag, val in (
            ("gap_epsprime_min", float(arr[0])),
            ("gap_epsprime_median", float(arr[arr.size // 2])),
            ("gap_epsprime_max", float(arr[-1])),
        ):
            bad = int(np.count_nonzero(arr <= 0.0))
            rows.append(f"{fun.label},{tag},{arr.size},{bad},{val!r}")
            fails[tag] = bad
    return rows, sum(fails.values())


def cmd_cone_check(cfg, writer, seed, profile):
    n = int(cfg.get("n", 3))
    kinds = str(cfg.get("kinds", "sigma1,sigmaK:2,ma,quotient:1:2")).split(",")
    samples = int(cfg.get("samples", 1000))
    rng = np.random.default_rng(seed)
    rows, failures = [], 0
    for name in kinds:
        fun = cones.parse_kind(name.strip(), n)
        r, f = _cone_rows(fun, samples, rng)
        rows.extend(r)
        failures += f
    writer.write("cone_check.csv", "kind,check,samples,failures,stat", rows)
    return failures


def _solver_config(cfg):
    return SolverConfig(
        tolerance=float(cfg.get("tolerance", 1e-8)),
        dt0=float(cfg.get("dt0", 0.1)),
        dt_min=float(cfg.get("dt_min", 1e-4)),
        max_newton=int(cfg.get("max_newton", 30)),
        lin_rtol=float(cfg.get("lin_rtol", 1e-10)),
    )


def _geometry(cfg, profile):
    res = int(cfg.get("resolution", 16 if profile == FAST else 32))
    if str(cfg.get("geometry", "complex")) == "riemannian":
        return CylinderGeometry(d=int(cfg.get("d", 3)), resolution=res)
    return GridGeometry(n=int(cfg.get("n", 2)), resolution=res)


def cmd_solve(cfg, writer, seed, profile):
    geom = _geometry(cfg, profile)
    fun = cones.parse_kind(
        str(cfg.get("kind", "ma")), geom.n if geom.is_complex else geom.real_dims
    )
    prob = build_problem(
        geom,
        fun,
        str(cfg.get("psi", "manufactured")),
        str(cfg.get("phi", "zero")),
        str(cfg.get("subsolution", "star-bump")),
        scale=float(cfg.get("scale", 1.0)),
    )
    solver = continuity_solve if geom.is_complex else solve_riemannian
    try:
        u, report = solver(fun, prob.chi, prob.psi, prob.phi, prob.u_sub,
                           _solver_config(cfg))
    except (SubsolutionError, ContinuationError) as exc:
        writer.write("report.csv", SolveReport.CSV_FIELDS,
                     [f"{fun.label},{geom.resolution},0,,,,,,,,,,,,,,"])
        print(f"solve failed: {exc}", file=sys.stderr)
        return 1
    rows = [report.csv_row()]
    writer.write("report.csv", SolveReport.CSV_FIELDS, rows)
    if prob.u_star is not None:
        err = float(np.abs(u.values - prob.u_star.values).max())
        writer.write("error.csv", "resolution,sup_error",
                     [f"{geom.resolution},{err!r}"])
    dump = str(cfg.get("dump_fields", "none"))
    if "csv" in dump:
        write_field_csv(writer.outdir / "u.csv", u)
    if "raw" in dump:
        write_field_raw(writer.outdir / "u.raw", u)
    bad = 0 if (report.converged and report.comparison_violations == 0) else 1
    return bad


def cmd_boundary_scaling(cfg, writer, seed, profile):
    # the ratio study is resolution-stable at 16 per direction; config may
    # override, the profile does not
    geom = _geometry(cfg, FAST)
    fun = cones.parse_kind(str(cfg.get("kind", "ma")), geom.n)
    scales = _floats(cfg.get("scales", "1 2 4 8"))
    config = _solver_config(cfg)
    rows, ratios, failures = [], [], 0
    for s in scales:
        prob = build_problem(geom, fun, "one", "scaled-cos", "scaled-cos", scale=s)
        try:
            u, rep = continuity_solve(fun, prob.chi, prob.psi, prob.phi,
                                      prob.u_sub, config)
        except (SubsolutionError, ContinuationError):
            failures += 1
            rows.append(f"{s!r},,,")
            continue
        grad = max(rep.sup_grad_interior, rep.sup_grad_boundary)
        rows.append(
            f"{s!r},{grad!r},{rep.sup_ddbar_boundary!r},{rep.boundary_ratio!r}"
        )
        if rep.boundary_ratio > 0:
            ratios.append(rep.boundary_ratio)
        failures += rep.comparison_violations
    writer.write("boundary_scaling.csv",
                 "s,sup_grad,sup_ddbar_boundary,ratio", rows)
    if ratios and max(ratios) / min(ratios) > 10.0:
        failures += 1
    return failures


def cmd_degenerate(cfg, writer, seed, profile):
    geom = _geometry(cfg, FAST)
    fun = cones.parse_kind(str(cfg.get("kind", "ma")), geom.n)
    eps_list = _floats(cfg.get("eps_list", "0.1 0.01 0.001"))
    prob = build_problem(geom, fun, "degenerate-cos", "zero", "zero")
    rows_data = degenerate_sweep(fun, prob.chi, prob.psi, prob.phi, prob.u_sub,
                                 eps_list, _solver_config(cfg))
    rows = []
    failures = 0
    laps = []
    for r in rows_data:
        rows.append(
            f"{r['eps']!r},{int(r['converged'])},{r['final_residual']!r},"
            f"{r['sup_grad']!r},{r['sup_lap']!r},{r['error']}"
        )
        if not r["converged"]:
            failures += 1
        else:
            laps.append(r["sup_lap"])
    writer.write("degenerate.csv",
                 "eps,converged,final_residual,sup_grad,sup_lap,error", rows)
    if laps and max(laps) / min(laps) > 2.0:
        failures += 1
    return failures


COMMANDS = {
    "lemma-sweep": cmd_lemma_sweep,
    "cone-check": cmd_cone_check,
    "solve": cmd_solve,
    "boundary-scaling": cmd_boundary_scaling,
    "degenerate": cmd_degenerate,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hessiancone",
        description="Eigenvalue-concentration sweeps, cone checks, and "
        "continuity-method solves on the flat model manifold.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--profile", choices=(FAST, FULL), default=FAST)
    args = parser.parse_args(argv)

    cfg, raw = _read_config(args.config)
    confhash = hashlib.sha256(raw).hexdigest()
    writer = _Writer(args.out, args.seed, confhash)
    failures = COMMANDS[args.command](cfg, writer, args.seed, args.profile)
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
