"""
Numerical spectrum from roots of the truncated Frobenius series

For fixed alpha the roots beta^(N) of c_N(beta) = 0 are followed across an
increasing schedule of truncation orders N; chains that settle inside
(0, 2|alpha|/sqrt(27)) are bound states. Setting beta = 0 and scanning alpha
instead gives the critical couplings where a new state binds.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
from scipy.optimize import brentq

from .model import ModelContext, Parity, check_v0
from .precision import NATIVE_BITS, PrecisionBackend, default_precision_bits, recommended_bits
from .recurrence import evaluate_c_N, recurrence_table
from .utils.logging import get_logger, setup_logging
from .utils.timing import log_step

log = get_logger(__name__)

DEFAULT_SCHEDULE = tuple(range(10, 61, 5))
CRITICAL_PRECISION_FLOOR = 128
_EXP_CLIP = 700.0


class ChainStatus(StrEnum):
    CONVERGED = "converged"
    UNCONVERGED = "unconverged"
    SPURIOUS = "spurious"


@dataclass(frozen=True)
class ScanConfig:
    """Knobs of the root scan. precision_bits=None defers to HYPERWELL_PRECISION_BITS."""

    n_schedule: tuple[int, ...] = DEFAULT_SCHEDULE
    grid_points: int = 2000
    root_tol: float = 1e-12
    conv_tol: float = 1e-9
    stable_steps: int = 3
    match_radius_cells: float = 10.0
    precision_bits: int | None = None
    auto_precision: bool = True
    refine_points: int = 64
    persist_tol: float = 1e-4

    def __post_init__(self) -> None:
        schedule = tuple(int(n) for n in self.n_schedule)
        object.__setattr__(self, "n_schedule", schedule)
        if not schedule or schedule[0] < 1:
            raise ValueError(f"n_schedule must be non-empty with orders >= 1, got {schedule}")
        if any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise ValueError(f"n_schedule must be strictly increasing, got {schedule}")
        if self.grid_points < 2:
            raise ValueError(f"grid_points must be >= 2, got {self.grid_points}")
        for name in ("root_tol", "conv_tol", "match_radius_cells", "persist_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.stable_steps < 1:
            raise ValueError(f"stable_steps must be >= 1, got {self.stable_steps}")
        if self.refine_points < 4:
            raise ValueError(f"refine_points must be >= 4, got {self.refine_points}")
        if self.precision_bits is not None and self.precision_bits < NATIVE_BITS:
            raise ValueError(f"precision_bits must be >= {NATIVE_BITS}, got {self.precision_bits}")

    @property
    def n_final(self) -> int:
        return self.n_schedule[-1]

    def with_max_order(self, n_max: int, step: int = 5) -> ScanConfig:
        start = min(self.n_schedule[0], n_max)
        schedule = list(range(start, n_max + 1, step))
        if schedule[-1] != n_max:
            schedule.append(n_max)
        return dataclasses.replace(self, n_schedule=tuple(schedule))

    def backend_for(self, alpha: float, floor: int = NATIVE_BITS) -> PrecisionBackend:
        bits = self.precision_bits if self.precision_bits is not None else default_precision_bits()
        if self.auto_precision:
            bits = max(bits, recommended_bits(alpha, floor=floor))
        return PrecisionBackend(bits)


@dataclass(frozen=True)
class Eigenvalue:
    parity: Parity
    nu: int
    beta: float
    epsilon: float
    N_final: int
    drift: float
    status: ChainStatus
    history: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class CriticalValue:
    K: int
    parity: Parity
    alpha_K: float
    v0_K: float
    N_final: int
    drift: float
    status: ChainStatus


@dataclass(frozen=True)
class RootChain:
    """Positions of one root followed across orders, oldest first."""

    positions: tuple[tuple[int, float], ...]
    status: ChainStatus

    @property
    def value(self) -> float:
        return self.positions[-1][1]

    @property
    def N_final(self) -> int:
        return self.positions[-1][0]

    @property
    def drift(self) -> float:
        if len(self.positions) < 2:
            return math.inf
        return abs(self.positions[-1][1] - self.positions[-2][1])


@dataclass(frozen=True)
class ScanResult:
    """Every chain found by one parity scan, with the diagnostics behind the verdicts."""

    gamma: Parity
    alpha: float
    variable: str
    lower: float
    upper: float
    config: ScanConfig
    precision_bits: int
    chains: tuple[RootChain, ...]
    close_pairs: int = 0

    def by_status(self, status: ChainStatus) -> list[RootChain]:
        return [c for c in self.chains if c.status == status]

    def eigenvalues(self) -> list[Eigenvalue]:
        """Converged chains as states, deepest first, with provisional nu = 2 rank + gamma."""
        converged = sorted(self.by_status(ChainStatus.CONVERGED), key=lambda c: -c.value)
        return [
            Eigenvalue(
                parity=self.gamma,
                nu=2 * rank + int(self.gamma),
                beta=c.value,
                epsilon=-c.value * c.value,
                N_final=c.N_final,
                drift=c.drift,
                status=c.status,
                history=c.positions,
            )
            for rank, c in enumerate(converged)
        ]

    def diagnostics(self) -> dict[str, Any]:
        return {
            "gamma": int(self.gamma),
            "n_schedule": list(self.config.n_schedule),
            "precision_bits": self.precision_bits,
            "converged": len(self.by_status(ChainStatus.CONVERGED)),
            "unconverged": [
                {"value": c.value, "N_final": c.N_final, "drift": c.drift}
                for c in self.by_status(ChainStatus.UNCONVERGED)
            ],
            "spurious": len(self.by_status(ChainStatus.SPURIOUS)),
            "close_pairs": self.close_pairs,
        }


# ---- scanning machinery -----------------------------------------------------


def _open_grid(lo: float, hi: float, points: int) -> np.ndarray:
    """Interior points only: the interval ends are never sampled."""
    return lo + (hi - lo) * np.arange(1, points + 1) / (points + 1)


def _brackets(x: np.ndarray, signs: np.ndarray) -> list[tuple[float, float]]:
    out = [(float(x[i]), float(x[i])) for i in np.flatnonzero(signs == 0)]
    change = np.flatnonzero(signs[:-1].astype(np.int64) * signs[1:] < 0)
    out.extend((float(x[i]), float(x[i + 1])) for i in change)
    return sorted(out)


class _Objective:
    """c_N as a smooth float function of the scanned variable (beta or alpha)."""

    def __init__(self, gamma: Parity, variable: str, fixed: float, N: int, backend: PrecisionBackend):
        self.gamma = gamma
        self.variable = variable
        self.fixed = fixed
        self.N = N
        self.backend = backend

    def sign_log(self, x: float) -> tuple[int, float]:
        if self.variable == "beta":
            return evaluate_c_N(self.gamma, self.fixed, x, self.N, self.backend)
        return evaluate_c_N(self.gamma, x, self.fixed, self.N, self.backend)

    def refine(self, a: float, b: float, tol: float) -> float:
        if a == b:
            return a
        sa, ref = self.sign_log(a)
        sb, _ = self.sign_log(b)
        if sa == 0:
            return a
        if sb == 0:
            return b
        if sa * sb > 0:
            log.debug("scan.bracket_lost", N=self.N, a=a, b=b)
            return 0.5 * (a + b)

        def f(x: float) -> float:
            s, lm = self.sign_log(x)
            return s * math.exp(min(max(lm - ref, -_EXP_CLIP), _EXP_CLIP))

        return float(brentq(f, a, b, xtol=tol, maxiter=200))

    def local_roots(self, lo: float, hi: float, points: int, tol: float) -> list[float]:
        xs = np.linspace(lo, hi, points + 1)
        signs = np.array([self.sign_log(float(x))[0] for x in xs], dtype=np.int8)
        return [self.refine(a, b, tol) for a, b in _brackets(xs, signs)]


def _dedupe(values: list[float], tol: float) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def _track(
    roots_by_order: dict[int, list[float]], orders: Sequence[int], radius: float
) -> list[list[tuple[int, int]]]:
    """Greedy nearest-neighbour association of roots between consecutive orders.

    Returns chains as lists of (order index, root index).
    """
    chains: list[list[tuple[int, int]]] = []
    active: list[int] = []
    for k, N in enumerate(orders):
        roots = roots_by_order[N]
        candidates = []
        for ci in active:
            kk, ri = chains[ci][-1]
            tip = roots_by_order[orders[kk]][ri]
            for rj, r in enumerate(roots):
                d = abs(r - tip)
                if d <= radius:
                    candidates.append((d, ci, rj))
        candidates.sort()
        used_chains: set[int] = set()
        used_roots: set[int] = set()
        for _, ci, rj in candidates:
            if ci in used_chains or rj in used_roots:
                continue
            chains[ci].append((k, rj))
            used_chains.add(ci)
            used_roots.add(rj)
        for rj in range(len(roots)):
            if rj not in used_roots:
                chains.append([(k, rj)])
                used_chains.add(len(chains) - 1)
        active = sorted(used_chains)
    return chains


def _classify(
    positions: list[tuple[int, float]],
    orders: Sequence[int],
    cfg: ScanConfig,
    lower: float,
    spacing: float,
) -> ChainStatus:
    n_final = orders[-1]
    tail = orders[-(cfg.stable_steps + 1) :]
    present = [N for N, _ in positions]
    values = [x for _, x in positions]
    if present[-1] != n_final:
        # weakly bound roots can leave through beta -> 0 as N grows
        if abs(values[-1] - lower) <= 2 * spacing and len(values) >= 2:
            return ChainStatus.UNCONVERGED
        return ChainStatus.SPURIOUS
    drifts = [abs(b - a) for a, b in zip(values, values[1:])]
    if present[-len(tail) :] == list(tail) and len(values) >= len(tail):
        if all(d <= cfg.conv_tol for d in drifts[-cfg.stable_steps :]):
            return ChainStatus.CONVERGED
    if len(drifts) >= 2 and drifts[-1] <= drifts[-2]:
        return ChainStatus.UNCONVERGED
    return ChainStatus.SPURIOUS


def _scan(
    gamma: Parity,
    variable: str,
    fixed: float,
    lower: float,
    upper: float,
    cfg: ScanConfig,
    backend: PrecisionBackend,
) -> tuple[tuple[RootChain, ...], int]:
    orders = cfg.n_schedule
    grid = _open_grid(lower, upper, cfg.grid_points)
    spacing = (upper - lower) / (cfg.grid_points + 1)
    if variable == "beta":
        table = recurrence_table(gamma, fixed, grid, orders, backend)
    else:
        table = recurrence_table(gamma, grid, fixed, orders, backend)

    brackets = {N: _brackets(grid, table.row(N)[0]) for N in orders}
    mids = {N: [0.5 * (a + b) for a, b in brackets[N]] for N in orders}
    raw = _track(mids, orders, cfg.match_radius_cells * spacing)

    tail = set(orders[-(cfg.stable_steps + 1) :])
    objectives = {N: _Objective(gamma, variable, fixed, N, backend) for N in tail}
    close_pairs = 0
    chains: list[RootChain] = []
    for members in raw:
        positions: list[tuple[int, float]] = []
        for k, ri in members:
            N = orders[k]
            a, b = brackets[N][ri]
            x = objectives[N].refine(a, b, cfg.root_tol) if N in tail else 0.5 * (a + b)
            positions.append((N, x))
        chains.append(RootChain(tuple(positions), _classify(positions, orders, cfg, lower, spacing)))

    # adjacent sign changes may hide further roots in the same cells
    finals = sorted((c.value, i) for i, c in enumerate(chains) if c.N_final == orders[-1])
    extra: list[float] = []
    objective = objectives[orders[-1]]
    for (x1, _), (x2, _) in zip(finals, finals[1:]):
        if x2 - x1 < 1.5 * spacing:
            close_pairs += 1
            log.warning("scan.close_roots", variable=variable, x1=x1, x2=x2, spacing=spacing, N=orders[-1])
            lo, hi = max(lower, x1 - spacing), min(upper, x2 + spacing)
            found = objective.local_roots(lo, hi, cfg.refine_points, cfg.root_tol)
            known = [x for x, _ in finals]
            extra.extend(r for r in found if min(abs(r - k) for k in known) > 10 * spacing / cfg.refine_points)
    for r in _dedupe(extra, 10 * cfg.root_tol):
        log.warning("scan.extra_root", variable=variable, value=r, N=orders[-1])
        chains.append(RootChain(((orders[-1], r),), ChainStatus.SPURIOUS))

    return tuple(chains), close_pairs


# ---- public operations ------------------------------------------------------


def beta_roots_at_order(ctx: ModelContext, N: int, cfg: ScanConfig | None = None) -> list[float]:
    """Bracketed and refined roots of c_N(beta) on the open interval (0, beta_max), ascending."""
    cfg = cfg or ScanConfig()
    backend = cfg.backend_for(ctx.alpha)
    grid = _open_grid(0.0, ctx.beta_max, cfg.grid_points)
    spacing = ctx.beta_max / (cfg.grid_points + 1)
    table = recurrence_table(ctx.gamma, ctx.alpha, grid, (N,), backend)
    objective = _Objective(ctx.gamma, "beta", ctx.alpha, N, backend)
    roots = [objective.refine(a, b, cfg.root_tol) for a, b in _brackets(grid, table.signs[0])]
    extra: list[float] = []
    for x1, x2 in zip(roots, roots[1:]):
        if x2 - x1 < spacing:
            log.warning("scan.close_roots", variable="beta", x1=x1, x2=x2, spacing=spacing, N=N)
            lo, hi = max(0.0, x1 - spacing), min(ctx.beta_max, x2 + spacing)
            extra.extend(objective.local_roots(lo, hi, cfg.refine_points, cfg.root_tol))
    merged = _dedupe(roots + extra, 10 * cfg.root_tol)
    return [r for r in merged if 0.0 < r < ctx.beta_max]


@log_step("spectrum.scan")
def scan_eigenvalues(ctx: ModelContext, cfg: ScanConfig | None = None) -> ScanResult:
    """Follow c_N(beta) roots over the order schedule and classify every chain."""
    cfg = cfg or ScanConfig()
    backend = cfg.backend_for(ctx.alpha)
    chains, close_pairs = _scan(ctx.gamma, "beta", ctx.alpha, 0.0, ctx.beta_max, cfg, backend)
    result = ScanResult(
        gamma=ctx.gamma,
        alpha=ctx.alpha,
        variable="beta",
        lower=0.0,
        upper=ctx.beta_max,
        config=cfg,
        precision_bits=backend.bits,
        chains=chains,
        close_pairs=close_pairs,
    )
    for c in result.by_status(ChainStatus.UNCONVERGED):
        log.warning(
            "chain.unconverged", gamma=int(ctx.gamma), v0=ctx.v0, beta=c.value, drift=c.drift, N_final=c.N_final
        )
    log.debug(
        "spectrum.scanned",
        gamma=int(ctx.gamma),
        v0=ctx.v0,
        bits=backend.bits,
        converged=len(result.by_status(ChainStatus.CONVERGED)),
        chains=len(chains),
    )
    return result


def eigenvalues(ctx: ModelContext, cfg: ScanConfig | None = None) -> list[Eigenvalue]:
    """Converged bound states of one parity, deepest first."""
    return scan_eigenvalues(ctx, cfg).eigenvalues()


@dataclass(frozen=True)
class SpectrumReport:
    v0: float
    states: tuple[Eigenvalue, ...]
    scans: tuple[ScanResult, ...]
    alternation_ok: bool
    parities: tuple[Parity, ...] = field(default=(Parity.EVEN, Parity.ODD))

    @property
    def unconverged(self) -> int:
        return sum(len(s.by_status(ChainStatus.UNCONVERGED)) for s in self.scans)


def _alternates(states: Sequence[Eigenvalue]) -> bool:
    return all(int(s.parity) == k % 2 for k, s in enumerate(states))


def spectrum_report(
    v0: float, cfg: ScanConfig | None = None, parities: Iterable[int | Parity] = (0, 1)
) -> SpectrumReport:
    """Both parity scans merged and ordered by energy, with global indices nu."""
    v0 = check_v0(v0)
    cfg = cfg or ScanConfig()
    chosen = tuple(sorted({Parity.parse(p) for p in parities}))
    scans = tuple(scan_eigenvalues(ModelContext.from_v0(v0, p), cfg) for p in chosen)
    merged = sorted((e for s in scans for e in s.eigenvalues()), key=lambda e: e.epsilon)
    if len(chosen) == 2:
        states = tuple(dataclasses.replace(e, nu=k) for k, e in enumerate(merged))
        ok = _alternates(states)
        if not ok:
            log.error(
                "spectrum.parity_alternation",
                v0=v0,
                parities=[int(s.parity) for s in states],
            )
    else:
        states = tuple(merged)
        ok = True
    return SpectrumReport(v0=v0, states=states, scans=scans, alternation_ok=ok, parities=chosen)


def spectrum(v0: float, cfg: ScanConfig | None = None) -> list[Eigenvalue]:
    """All converged bound states for v0, sorted by energy, nu = 0, 1, 2, ..."""
    return list(spectrum_report(v0, cfg).states)


def _init_worker(level: str) -> None:
    setup_logging(level=level)


def _report_for(args: tuple[float, ScanConfig, tuple[int, ...]]) -> SpectrumReport:
    v0, cfg, parities = args
    return spectrum_report(v0, cfg, parities)


def spectrum_sweep(
    v0_values: Sequence[float],
    cfg: ScanConfig | None = None,
    parities: Iterable[int | Parity] = (0, 1),
    jobs: int = 1,
    log_level: str = "WARNING",
) -> list[SpectrumReport]:
    """spectrum_report over many v0, in input order (process pool when jobs > 1)."""
    cfg = cfg or ScanConfig()
    chosen = tuple(int(Parity.parse(p)) for p in parities)
    work = [(check_v0(v), cfg, chosen) for v in v0_values]
    if jobs <= 1 or len(work) <= 1:
        return [_report_for(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(log_level,)) as pool:
        return list(pool.map(_report_for, work))


# ---- critical couplings -----------------------------------------------------


def critical_search_interval(k_max: int) -> tuple[float, float]:
    return -(4.0 * k_max + 8.0), -0.5


@log_step("spectrum.critical")
def critical_alpha(
    gamma: int | Parity, K_list: Sequence[int], cfg: ScanConfig | None = None
) -> list[CriticalValue]:
    """
    Critical couplings alpha_K from c_N(alpha) = 0 at beta = 0.

    Persistent chains (converged, or still present at the last order with
    drift below persist_tol |alpha|) are ranked by |alpha|; rank r maps to
    K = 2r + 2 for even states and K = 2r + 1 for odd states.
    """
    gamma = Parity.parse(gamma)
    cfg = cfg or ScanConfig()
    ks = sorted({int(k) for k in K_list})
    if not ks:
        raise ValueError("K_list must be non-empty")
    for k in ks:
        if k < 1 or k % 2 != int(gamma):
            raise ValueError(f"K={k} does not belong to parity {gamma.label} (odd K <-> odd states)")
    k_max = ks[-1]
    lower, upper = critical_search_interval(k_max)
    floor = CRITICAL_PRECISION_FLOOR if k_max >= 6 else NATIVE_BITS
    backend = cfg.backend_for(lower, floor=floor)
    chains, _ = _scan(gamma, "alpha", 0.0, lower, upper, cfg, backend)

    persistent = [
        c
        for c in chains
        if c.N_final == cfg.n_final
        and (c.status == ChainStatus.CONVERGED or c.drift <= cfg.persist_tol * abs(c.value))
    ]
    persistent.sort(key=lambda c: abs(c.value))
    offset = 2 if gamma == Parity.EVEN else 1
    found: dict[int, CriticalValue] = {}
    for rank, c in enumerate(persistent):
        K = 2 * rank + offset
        if K > k_max:
            break
        status = c.status if c.status == ChainStatus.CONVERGED else ChainStatus.UNCONVERGED
        if status != ChainStatus.CONVERGED:
            log.warning("critical.unconverged", K=K, alpha=c.value, drift=c.drift, N_final=c.N_final)
        found[K] = CriticalValue(
            K=K,
            parity=gamma,
            alpha_K=c.value,
            v0_K=c.value * c.value,
            N_final=c.N_final,
            drift=c.drift,
            status=status,
        )
    missing = [k for k in ks if k not in found]
    if missing:
        log.warning("critical.missing", parity=gamma.label, K=missing, bits=backend.bits)
    return [found[k] for k in ks if k in found]


def critical_table(k_max: int, cfg: ScanConfig | None = None) -> list[CriticalValue]:
    """alpha_1 .. alpha_{k_max}, both parities, ordered by K."""
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    out: list[CriticalValue] = []
    for gamma in (Parity.ODD, Parity.EVEN):
        ks = [k for k in range(1, k_max + 1) if k % 2 == int(gamma)]
        if ks:
            out.extend(critical_alpha(gamma, ks, cfg))
    return sorted(out, key=lambda c: c.K)


def bound_state_count(
    v0: float,
    cfg: ScanConfig | None = None,
    critical: Sequence[CriticalValue] | None = None,
    rel_tol: float = 1e-3,
) -> int:
    """
    Number of converged bound states at v0.

    With a critical table the count is cross-checked against 1 + #{K : v0_K < v0};
    inputs within rel_tol of a threshold are rejected as ambiguous.
    """
    v0 = check_v0(v0)
    if critical:
        for c in critical:
            if abs(v0 - c.v0_K) <= rel_tol * c.v0_K:
                raise ValueError(f"v0={v0} is within {rel_tol:g} of the threshold v0_{c.K}={c.v0_K}")
    count = len(spectrum(v0, cfg))
    if critical:
        expected = 1 + sum(1 for c in critical if c.v0_K < v0)
        if expected != count:
            log.warning("count.critical_mismatch", v0=v0, count=count, expected=expected)
    return count