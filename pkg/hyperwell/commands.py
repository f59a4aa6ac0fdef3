"""
Sub-command handlers: parse nothing, compute nothing, only wire library calls to output

Every handler takes the parsed arguments and the loaded configuration and
returns the process exit code (0 ok, 1 non-convergence or failed audit).
"""

from __future__ import annotations

import argparse
import sys
from time import perf_counter
from typing import Any

import numpy as np

from .asymptotics import harmonic_asymptote, hellmann_feynman_check
from .config import oracle_config_from, scan_config_from
from .display import audit_table, note, results_table, section, summary_table, warn
from .exact import enumerate_solutions, solve_truncation
from .model import ModelContext, Parity
from .oracle import OracleConfig, fd_solve, richardson_levels, suggest_half_width
from .output import OutputRecord, write_svg
from .spectrum import (
    ChainStatus,
    SpectrumReport,
    critical_alpha,
    spectrum_report,
    spectrum_sweep,
)
from .ui.progress import progress_manager
from .utils.logging import get_logger
from .wavefunction import (
    count_nodes,
    normalize,
    to_rows,
    wavefunction_from_eigenvalue,
    wavefunction_from_solution,
)

log = get_logger(__name__)

HF_REL_TOL = 1e-4
ORACLE_ABS_TOL = 1e-6


def _parities(choice: str) -> tuple[Parity, ...]:
    if choice == "both":
        return (Parity.EVEN, Parity.ODD)
    return (Parity.parse(choice),)


def _jobs(config: dict[str, Any]) -> int:
    return int(config.get("max_parallel_jobs", 1)) if config.get("parallel_processing") else 1


def emit(record: OutputRecord, args: argparse.Namespace, title: str = "") -> None:
    """Write the record in the requested format; tables go to the terminal."""
    if args.json:
        sys.stdout.write(record.to_json(args.digits))
    elif args.csv:
        sys.stdout.write(record.to_csv(args.digits))
    else:
        results_table(record.results, title=title, digits=args.digits)
        for message in record.diagnostics.get("warnings", []):
            warn(message)


# ---- spectrum ---------------------------------------------------------------


def _spectrum_record(report: SpectrumReport, command: str, config_echo: dict[str, Any]) -> OutputRecord:
    record = OutputRecord(
        command=command,
        columns=("nu", "parity", "beta", "epsilon", "N_final", "drift"),
        config=config_echo,
    )
    for e in report.states:
        record.add(nu=e.nu, parity=e.parity.label, beta=e.beta, epsilon=e.epsilon, N_final=e.N_final, drift=e.drift)
    record.diagnostics = {
        "alternation_ok": report.alternation_ok,
        "scans": [s.diagnostics() for s in report.scans],
    }
    for s in report.scans:
        for c in s.by_status(ChainStatus.UNCONVERGED):
            record.warn(f"unconverged {s.gamma.label} root beta={c.value:.6g} (drift {c.drift:.2g}, N={c.N_final})")
    if not report.alternation_ok:
        record.warn("parity alternation violated")
    return record


def spectrum_command(args: argparse.Namespace, config: dict[str, Any]) -> int:
    cfg = scan_config_from(config, args.precision)
    parities = _parities(args.parity)
    start = perf_counter()
    report = spectrum_report(args.v0, cfg, parities)
    record = _spectrum_record(
        report,
        "spectrum",
        {"v0": args.v0, "parity": args.parity, "n_schedule": list(cfg.n_schedule), "precision_bits": args.precision},
    )
    emit(record, args, title=f"Bound states at v0 = {args.v0:g}")
    if not args.json and not args.csv:
        note(f"{len(report.states)} states")
        summary_table({"states": len(report.states), "unconverged": report.unconverged}, perf_counter() - start)

    even_missing = Parity.EVEN in parities and not any(e.parity == Parity.EVEN for e in report.states)
    if even_missing:
        log.error("spectrum.no_ground_state", v0=args.v0)
    return 1 if even_missing or not report.alternation_ok else 0


# ---- exact ------------------------------------------------------------------


def exact_command(args: argparse.Namespace, config: dict[str, Any]) -> int:
    columns = ["n", "i", "parity", "alpha", "v0", "beta", "epsilon", "accepted"]
    if args.all_roots:
        columns += ["lower", "upper"]
    record = OutputRecord(
        command="exact",
        columns=tuple(columns),
        config={"n": args.n, "parity": args.parity, "all_roots": args.all_roots},
    )
    diagnostics: list[dict[str, Any]] = []
    for gamma in _parities(args.parity):
        report = solve_truncation(gamma, args.n)
        accepted_rank = 0
        for verdict in report.verdicts:
            alpha = verdict.root.value
            if verdict.accepted:
                accepted_rank += 1
                sol = report.solutions[accepted_rank - 1]
                row = {
                    "i": sol.i,
                    "alpha": alpha,
                    "v0": sol.v0,
                    "beta": sol.beta,
                    "epsilon": sol.epsilon,
                }
            else:
                row = {"i": None, "alpha": alpha, "v0": alpha * alpha, "beta": verdict.beta, "epsilon": None}
            row.update(n=args.n, parity=gamma.label, accepted=verdict.accepted)
            if args.all_roots:
                row.update(lower=verdict.lower, upper=verdict.upper)
            record.add(**row)
        diagnostics.append(
            {
                "parity": gamma.label,
                "degree": report.degree,
                "real_roots": report.real_count,
                "complex_roots": report.degree - report.real_count,
            }
        )
        if report.degree != report.real_count:
            record.warn(f"{gamma.label} n={args.n}: {report.degree - report.real_count} complex roots")
    record.diagnostics["truncation"] = diagnostics
    emit(record, args, title=f"Truncation roots, n = {args.n}")
    return 0


# ---- critical ---------------------------------------------------------------


def critical_command(args: argparse.Namespace, config: dict[str, Any]) -> int:
    cfg = scan_config_from(config, args.precision).with_max_order(args.n_max)
    wanted = [k for k in range(1, args.k_max + 1) if k % 2 in {int(p) for p in _parities(args.parity)}]
    found = []
    for gamma in _parities(args.parity):
        ks = [k for k in wanted if k % 2 == int(gamma)]
        if ks:
            found.extend(critical_alpha(gamma, ks, cfg))
    found.sort(key=lambda c: c.K)

    record = OutputRecord(
        command="critical",
        columns=("K", "parity", "alpha_K", "v0_K", "N_final", "drift", "status"),
        config={"k_max": args.k_max, "parity": args.parity, "n_max": args.n_max, "precision_bits": args.precision},
    )
    for c in found:
        record.add(
            K=c.K,
            parity=c.parity.label,
            alpha_K=c.alpha_K,
            v0_K=c.v0_K,
            N_final=c.N_final,
            drift=c.drift,
            status=str(c.status),
        )
    missing = sorted(set(wanted) - {c.K for c in found})
    record.diagnostics["missing"] = missing
    if missing:
        record.warn(f"no persistent root for K = {missing}")
    emit(record, args, title="Critical couplings (beta = 0)")
    return 1 if missing else 0


# ---- scan -------------------------------------------------------------------


def scan_command(args: argparse.Namespace, config: dict[str, Any]) -> int:
    cfg = scan_config_from(config, args.precision)
    if args.steps == 1:
        v0_values = [args.v0_from]
    else:
        v0_values = [float(v) for v in np.linspace(args.v0_from, args.v0_to, args.steps)]

    jobs = _jobs(config)
    if jobs > 1:
        reports = spectrum_sweep(v0_values, cfg, jobs=jobs)
    else:
        reports = []
        for v0 in progress_manager.track(v0_values, "v0 scan", label=lambda v: f"v0={v:g}"):
            reports.extend(spectrum_sweep([v0], cfg))

    record = OutputRecord(
        command="scan",
        columns=("kind", "v0", "nu", "parity", "epsilon", "asymptote"),
        config={
            "v0_from": args.v0_from,
            "v0_to": args.v0_to,
            "steps": args.steps,
            "nu": args.nu,
            "with_asymptote": args.with_asymptote,
            "with_exact_overlay": args.with_exact_overlay,
            "n_max": args.n_max,
        },
    )
    unbound: list[float] = []
    for report in reports:
        states = [s for s in report.states if args.nu is None or s.nu == args.nu]
        if not states:
            unbound.append(report.v0)
        for s in states:
            asym = harmonic_asymptote(report.v0, s.nu) if args.with_asymptote else None
            record.add(kind="numeric", v0=report.v0, nu=s.nu, parity=s.parity.label, epsilon=s.epsilon, asymptote=asym)

    overlay = enumerate_solutions((0, 1), args.n_max) if args.with_exact_overlay else []
    for sol in overlay:
        record.add(kind="exact", v0=sol.v0, nu=None, parity=sol.gamma.label, epsilon=sol.epsilon, asymptote=None)
    record.diagnostics["unbound_v0"] = unbound
    record.diagnostics["unconverged"] = sum(r.unconverged for r in reports)

    if args.svg:
        series: dict[str, tuple[list[float], list[float]]] = {}
        for row in record.results:
            if row["kind"] == "numeric":
                label = f"nu={row['nu']}"
                xs, ys = series.setdefault(label, ([], []))
                xs.append(row["v0"])
                ys.append(row["epsilon"])
                if args.with_asymptote:
                    xa, ya = series.setdefault(f"asymptote nu={row['nu']}", ([], []))
                    xa.append(row["v0"])
                    ya.append(row["asymptote"])
        if overlay:
            series["exact"] = ([s.v0 for s in overlay], [s.epsilon for s in overlay])
        write_svg(args.svg, series, xlabel="v0", ylabel="epsilon", scatter=frozenset({"exact"}))

    emit(record, args, title="Spectrum scan")
    return 0


# ---- oracle -----------------------------------------------------------------


def oracle_command(args: argparse.Namespace, config: dict[str, Any]) -> int:
    base = oracle_config_from(config)
    cfg = OracleConfig(
        L=args.L if args.L is not None else base.L,
        M=args.M if args.M is not None else base.M,
        k=args.k if args.k is not None else base.k,
    )
    solution = fd_solve(args.v0, cfg)
    record = OutputRecord(
        command="oracle",
        columns=("index", "parity", "epsilon", "nodes", "contaminated"),
        config={"v0": args.v0, "L": cfg.L, "M": cfg.M, "k": cfg.k},
    )
    for idx, (level, dirty) in enumerate(zip(solution.levels, solution.contaminated)):
        record.add(index=idx, parity=level.parity.label, epsilon=level.epsilon, nodes=level.nodes, contaminated=dirty)
        if dirty:
            record.warn(f"level {idx} touches the box wall (L={cfg.L:g}); widen --L")
    record.diagnostics["h"] = cfg.h
    emit(record, args, title=f"Finite-difference levels at v0 = {args.v0:g}")
    if not args.json and not args.csv:
        note(f"{len(solution.levels)} negative eigenvalue(s)")
    return 0


# ---- check ------------------------------------------------------------------


def check_command(args: argparse.Namespace, config: dict[str, Any]) -> int:
    """Cross-branch audit: oracle agreement, Hellmann-Feynman, node counts."""
    cfg = scan_config_from(config, args.precision)
    checks: list[tuple[str, bool, str]] = []
    report = spectrum_report(args.v0, cfg)
    states = report.states
    checks.append(("parity alternation", report.alternation_ok, f"{len(states)} states"))
    if not states:
        checks.append(("ground state", False, "no converged even state"))

    if states:
        section("Finite-difference oracle")
        L = suggest_half_width(min(s.beta for s in states))
        ocfg = OracleConfig.for_half_width(L, k=len(states) + 4)
        levels = richardson_levels(args.v0, ocfg)
        checks.append(("state count", len(levels) == len(states), f"series {len(states)}, oracle {len(levels)}"))
        for s, lv in zip(states, levels):
            tol = max(ORACLE_ABS_TOL, abs(lv.error_estimate))
            diff = abs(s.epsilon - lv.extrapolated)
            checks.append((f"oracle nu={s.nu}", diff <= tol and s.parity == lv.parity, f"|d eps| {diff:.2e} <= {tol:.1e}"))

        nu = args.nu if args.nu is not None else 0
        section("Hellmann-Feynman")
        if nu < len(states):
            hf = hellmann_feynman_check(args.v0, nu, cfg=cfg)
            ok = hf.abs_diff <= HF_REL_TOL * abs(hf.rhs)
            checks.append((f"hellmann-feynman nu={nu}", ok, f"lhs {hf.lhs:.8g} rhs {hf.rhs:.8g} ({hf.scheme})"))
        else:
            checks.append((f"hellmann-feynman nu={nu}", False, "state not bound"))

        section("Node audit")
        for s in states:
            ctx = ModelContext.from_v0(args.v0, s.parity)
            nodes = count_nodes(normalize(wavefunction_from_eigenvalue(ctx, s)))
            checks.append((f"nodes nu={s.nu}", nodes == s.nu, f"{nodes} node(s)"))

    record = OutputRecord(
        command="check",
        columns=("check", "ok", "detail"),
        config={"v0": args.v0, "nu": args.nu},
    )
    for name, ok, detail in checks:
        record.add(check=name, ok=ok, detail=detail)
    failed = sum(1 for _, ok, _ in checks if not ok)
    record.diagnostics["failed"] = failed
    if args.json or args.csv:
        emit(record, args)
    else:
        audit_table(checks)
    return 1 if failed else 0


# ---- wavefunction -----------------------------------------------------------


def wavefunction_command(args: argparse.Namespace, config: dict[str, Any]) -> int:
    if args.n is not None:
        gamma = Parity.parse(args.parity)
        solutions = solve_truncation(gamma, args.n).solutions
        if not 1 <= args.i <= len(solutions):
            raise ValueError(f"n={args.n} ({gamma.label}) has {len(solutions)} accepted roots, asked for i={args.i}")
        w = wavefunction_from_solution(solutions[args.i - 1], h=args.h)
        label = {"n": args.n, "i": args.i, "parity": gamma.label}
    else:
        if args.v0 is None:
            raise ValueError("give --v0 (numeric state) or --n (exact polynomial state)")
        cfg = scan_config_from(config, args.precision)
        report = spectrum_report(args.v0, cfg)
        if args.nu >= len(report.states):
            raise ValueError(f"state nu={args.nu} is not bound at v0={args.v0} ({len(report.states)} states)")
        state = report.states[args.nu]
        w = wavefunction_from_eigenvalue(ModelContext.from_v0(args.v0, state.parity), state, h=args.h)
        label = {"v0": args.v0, "nu": args.nu, "parity": state.parity.label}

    w = normalize(w)
    record = OutputRecord(command="wavefunction", columns=("z", "phi"), config={**label, "h": args.h})
    record.results = to_rows(w)
    record.diagnostics = {"source": str(w.source), "epsilon": w.epsilon, "nodes": count_nodes(w), "order": w.order}
    if args.json:
        sys.stdout.write(record.to_json(args.digits))
    else:
        # (z, phi) pairs are only useful as a file
        sys.stdout.write(record.to_csv(args.digits))
    return 0
