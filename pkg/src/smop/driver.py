"""Constrained-problem drivers: single solves and solution paths.

``smop_solve`` finds ``lam*`` with ``phi(lam*) = rho`` by the chosen root
finder ("smop" secant hybrid, "bmop" bisection, "nmop" Newton hybrid) and
returns the matching solution of the regularized problem. Every phi
evaluation is a regularized solve; with sieving enabled the first solve
starts from the empty index set and every later one is seeded with the
support of the previous solution, which keeps the subproblems small along
the root-finding trajectory and along rho paths.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .inner import InnerConfig, phi_eval
from .problem import ProblemData
from .regularizers import Regularizer, lambda_inf
from .rootfind import (
    BracketError,
    RootConfig,
    RootState,
    bisection_solve,
    bracket_init,
    hybrid_secant_solve,
    newton_hybrid_solve,
)
from .sieving import SieveConfig

log = logging.getLogger("smop")

METHODS = ("smop", "bmop", "nmop")


@dataclass
class SmopConfig:
    stoptol: float = 1e-6
    method: str = "smop"
    sieving: bool = True
    root: RootConfig = field(default_factory=RootConfig)
    sieve: SieveConfig = field(default_factory=SieveConfig)
    inner: InnerConfig = field(default_factory=InnerConfig)
    keep_solutions: bool = False   # retain x per evaluation (diagnostics)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.stoptol <= 0:
            raise ValueError("stoptol must be positive")


@dataclass
class EvalRecord:
    index: int
    lam: float
    phi: float
    inner_iters: int
    support: int
    x: np.ndarray | None = None
    trace: list | None = None


@dataclass
class SmopResult:
    lambda_star: float
    x: np.ndarray
    phi: float
    eta: float
    n_subproblems: int
    inner_iters_total: int
    wall_ms: float
    nnz: int
    method: str
    converged: bool
    bracket: tuple
    root_state: RootState
    evals: list[EvalRecord]

    def to_doc(self) -> dict:
        """JSON-ready summary; solution stored sparsely."""
        idx = np.flatnonzero(self.x)
        return {
            "method": self.method,
            "lambda_star": float(self.lambda_star),
            "phi": float(self.phi),
            "eta": float(self.eta),
            "nnz": int(self.nnz),
            "n_subproblems": int(self.n_subproblems),
            "inner_iters_total": int(self.inner_iters_total),
            "wall_ms": float(self.wall_ms),
            "converged": bool(self.converged),
            "n": int(self.x.size),
            "solution_indices": [int(i) for i in idx],
            "solution_values": [float(v) for v in self.x[idx]],
        }


def nnz(x) -> int:
    """Number of entries needed to capture 99.9% of the l1 mass."""
    ax = np.sort(np.abs(np.asarray(x, dtype=np.float64)))[::-1]
    total = ax.sum()
    if total == 0.0:
        return 0
    return int(np.searchsorted(np.cumsum(ax), 0.999 * total) + 1)


def eta(phi_tilde: float, rho: float) -> float:
    """Relative constraint residual ``|phi - rho| / max(1, rho)``."""
    return abs(phi_tilde - rho) / max(1.0, rho)


class _PhiOracle:
    """Counting, caching, warm-starting phi evaluator shared by the solvers."""

    def __init__(self, data, reg, inner_cfg, sieve_cfg, x_warm=None, keep_x=False):
        self.data = data
        self.reg = reg
        self.inner_cfg = inner_cfg
        self.sieve_cfg = sieve_cfg
        self.x_warm = x_warm
        self.keep_x = keep_x
        self.cache = {}
        self.evals = []
        self.n_solves = 0
        self.inner_iters = 0

    def _warm_start(self, lam):
        """Interpolate the two nearest cached solutions around ``lam``.

        The solution path is piecewise affine in the penalty strength for
        these polyhedral gauges, so interpolation is exact away from the
        kinks and a strong start elsewhere.
        """
        below = above = None
        for l0 in self.cache:
            if l0 < lam and (below is None or l0 > below):
                below = l0
            elif l0 > lam and (above is None or l0 < above):
                above = l0
        if below is not None and above is not None:
            w = (lam - below) / (above - below)
            return (1.0 - w) * self.cache[below][1] + w * self.cache[above][1]
        if below is not None or above is not None:
            return self.cache[below if below is not None else above][1]
        return self.x_warm

    def __call__(self, lam):
        if lam in self.cache:
            phi_val, x = self.cache[lam]
            return phi_val, x
        res = phi_eval(
            self.data,
            self.reg,
            lam,
            x0=self._warm_start(lam),
            cfg=self.inner_cfg,
            sieve_cfg=self.sieve_cfg,
        )
        self.n_solves += 1
        self.inner_iters += res.iters
        self.x_warm = res.x
        self.cache[lam] = (res.phi, res.x)
        self.evals.append(
            EvalRecord(
                index=self.n_solves,
                lam=lam,
                phi=res.phi,
                inner_iters=res.iters,
                support=int(np.count_nonzero(res.x)),
                x=res.x.copy() if self.keep_x else None,
                trace=res.trace if self.inner_cfg.keep_trace else None,
            )
        )
        log.debug("phi(%0.6g) = %0.6g, support %d", lam, res.phi, np.count_nonzero(res.x))
        return res.phi, res.x


def _expand_bracket(oracle, rho, lo, hi, lam_top):
    """Repair a warm-start bracket so that phi(lo) < rho < phi(hi)."""
    hi = min(hi, lam_top)
    for _ in range(60):
        p_hi, _ = oracle(hi)
        if p_hi > rho:
            break
        if hi >= lam_top:
            raise BracketError("require 0 < rho < ||b||")
        hi = min(2.0 * hi, lam_top)
    else:
        raise BracketError("could not find an upper bracket end")
    for _ in range(13):
        p_lo, _ = oracle(lo)
        if p_lo < rho:
            return lo, hi
        lo = lo / 10.0
    raise BracketError("rho too small for numeric range")


def smop_solve(
    data: ProblemData,
    reg: Regularizer,
    cfg: SmopConfig | None = None,
    warm_bracket=None,
    warm_x=None,
) -> SmopResult:
    """Solve ``min p(x) s.t. ||A x - b|| <= rho`` by level-set root finding."""
    cfg = cfg or SmopConfig()
    if data.rho is None:
        raise ValueError("data.rho must be set")
    rho = data.rho
    if cfg.method == "nmop" and reg.kind != "l1":
        raise ValueError("NMOP supports l1 only")
    t0 = time.perf_counter()
    lam_top = lambda_inf(reg, data.A, data.b)
    eff_tol = min(cfg.inner.kkt_tol, 0.01 * cfg.stoptol * max(1.0, rho))
    inner_cfg = replace(cfg.inner, kkt_tol=eff_tol)
    sieve_cfg = replace(cfg.sieve, eps=eff_tol) if cfg.sieving else None
    oracle = _PhiOracle(
        data, reg, inner_cfg, sieve_cfg, x_warm=warm_x, keep_x=cfg.keep_solutions
    )
    root_cfg = replace(cfg.root, stoptol=cfg.stoptol)

    if warm_bracket is not None:
        lo, hi = _expand_bracket(oracle, rho, warm_bracket[0], warm_bracket[1], lam_top)
    else:
        lo, hi = bracket_init(oracle, rho, lam_top)

    if cfg.method == "smop":
        lam_star, x_star, state = hybrid_secant_solve(oracle, rho, lo, hi, root_cfg)
    elif cfg.method == "bmop":
        lam_star, x_star, state = bisection_solve(oracle, rho, lo, hi, root_cfg)
    else:
        lam_star, x_star, state = newton_hybrid_solve(oracle, rho, lo, hi, root_cfg, data.A)

    phi_star = oracle.cache[lam_star][0]
    wall_ms = 1000.0 * (time.perf_counter() - t0)
    result = SmopResult(
        lambda_star=lam_star,
        x=x_star,
        phi=phi_star,
        eta=eta(phi_star, rho),
        n_subproblems=oracle.n_solves,
        inner_iters_total=oracle.inner_iters,
        wall_ms=wall_ms,
        nnz=nnz(x_star),
        method=cfg.method,
        converged=state.converged,
        bracket=(lo, hi),
        root_state=state,
        evals=oracle.evals,
    )
    log.info(
        "%s: lambda*=%.8g eta=%.2e solves=%d wall=%.1fms",
        cfg.method, lam_star, result.eta, result.n_subproblems, wall_ms,
    )
    return result


def write_iterates_csv(path, result: SmopResult) -> None:
    """Per-outer-iteration log joined with inner-solve statistics."""
    by_lam = {rec.lam: rec for rec in result.evals}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "lambda", "phi", "eta", "step", "inner_iters", "support"])
        for rec in result.root_state.history:
            ev = by_lam.get(rec.lam)
            w.writerow([
                rec.k, rec.lam, rec.phi, rec.eta, rec.step,
                ev.inner_iters if ev else "", ev.support if ev else "",
            ])


@dataclass
class PathSpec:
    """Schedule of constraint levels ``rho_i = c_i * base_c * ||b||``."""

    base_c: float
    count: int = 100
    multipliers: tuple = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.multipliers is None:
            denom = max(self.count - 1, 1)
            self.multipliers = tuple(1.5 - 0.5 * i / denom for i in range(self.count))
        if len(self.multipliers) != self.count:
            raise ValueError("need one multiplier per path step")

    def rhos(self, bnorm: float) -> np.ndarray:
        r = np.asarray([c * self.base_c * bnorm for c in self.multipliers])
        if np.any(r <= 0) or np.any(r >= bnorm):
            raise ValueError("every rho_i must lie in (0, ||b||)")
        return r


@dataclass
class PathStep:
    rho: float
    result: SmopResult


@dataclass
class PathResult:
    steps: list[PathStep]
    failures: int

    def summary(self) -> dict:
        solves = [s.result.n_subproblems for s in self.steps]
        return {
            "steps": len(self.steps),
            "failures": self.failures,
            "mean_subproblems": float(np.mean(solves)) if solves else 0.0,
            "total_subproblems": int(np.sum(solves)) if solves else 0,
            "total_wall_ms": float(sum(s.result.wall_ms for s in self.steps)),
        }


def solve_path(
    data: ProblemData,
    reg: Regularizer,
    spec: PathSpec,
    cfg: SmopConfig | None = None,
) -> PathResult:
    """Solve the constrained problem along a decreasing rho schedule.

    Each step seeds its bracket and sieving support from the previous
    solution; a failed step is recorded and the path continues from the last
    successful one.
    """
    cfg = cfg or SmopConfig()
    rhos = spec.rhos(data.bnorm)
    lam_top = lambda_inf(reg, data.A, data.b)
    steps = []
    failures = 0
    prev = None
    lam_lo_glob = None
    for rho_i in rhos:
        data_i = data.with_rho(float(rho_i))
        try:
            if prev is None:
                res = smop_solve(data_i, reg, cfg)
                lam_lo_glob = res.bracket[0]
            else:
                wb = (
                    max(lam_lo_glob, 0.5 * prev.lambda_star),
                    min(lam_top, 1.5 * prev.lambda_star),
                )
                res = smop_solve(data_i, reg, cfg, warm_bracket=wb, warm_x=prev.x)
        except BracketError as exc:
            log.warning("path step rho=%.6g failed: %s", rho_i, exc)
            failures += 1
            continue
        steps.append(PathStep(rho=float(rho_i), result=res))
        if not res.converged:
            failures += 1
        else:
            prev = res
    return PathResult(steps=steps, failures=failures)
