"""
Campaign Service - seeded verification runs
Runs independent trials (optionally in worker processes), retries a trial with doubled
precision when the working N turns out too small, and folds per-trial checks into a summary.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from typing import Dict, List, Optional, Tuple

from iwasawa_sha.core.config import settings
from iwasawa_sha.core.errors import PrecisionExhausted
from iwasawa_sha.models.report import CheckResult, TableRow, TrialRecord
from iwasawa_sha.models.sim import FormalGroupConfig, SimConfig
from iwasawa_sha.services import formal_group as fgs
from iwasawa_sha.services.padic import PadicScalar, val_p
from iwasawa_sha.services.series import series_dump
from iwasawa_sha.services.theorem import (
    check_recursion,
    default_precision,
    e_n,
    mtt_consistency,
    q_n,
    simulate,
    verify_exact_sequence,
    verify_invariants,
    verify_order,
    verify_structure_ap0,
)
from iwasawa_sha.utils.helpers import trial_rng

logger = logging.getLogger(__name__)

MAX_LISTED_FAILURES = 5


@dataclass
class TrialOutcome:
    trial: int
    precision: int
    records: List[TrialRecord]
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _attempt(config: SimConfig, trial: int, N: int) -> TrialOutcome:
    trace = simulate(config, trial_rng(config.seed, trial), N)
    deficient = [r.n for r in trace.records if not r.profile.is_finite]
    if deficient:
        raise PrecisionExhausted(f"rank deficit mod {config.p}^{N} at levels {deficient}")

    structured = config.a_p == 0
    checks = [check_recursion(trace)]
    records = []
    for n, rec in enumerate(trace.records):
        checks.append(verify_invariants(trace, n))
        checks.extend(verify_order(trace, n))
        if n >= 1:
            checks.extend(verify_exact_sequence(trace, n))
        structure = None
        if structured:
            structure = verify_structure_ap0(trace, n)
            checks.append(CheckResult(
                name=f"structure[n={n}]",
                passed=structure.passed,
                detail=None if structure.passed else structure.model_dump_json(),
            ))
        records.append(TrialRecord(
            trial=trial,
            p=config.p,
            a_p=config.a_p,
            n=n,
            seed=config.seed,
            precision=N,
            mu=rec.invariants.mu,
            lambda_=rec.invariants.lambda_,
            q_n=q_n(config.p, n),
            order_exponent=rec.profile.order_exponent,
            e_n=e_n(config.p, n),
            structure=list(rec.profile.structure),
            char_valuation=str(rec.char_valuation),
            structure_checks=structure,
        ))
    return TrialOutcome(trial, N, records, checks)


def run_trial(config: SimConfig, trial: int) -> TrialOutcome:
    """One trial; the same random stream is replayed at each doubled precision."""
    N = config.precision or default_precision(config.p, config.n_max)
    attempt = 0
    while True:
        try:
            return _attempt(config, trial, N)
        except PrecisionExhausted as e:
            if attempt >= settings.max_precision_doublings:
                raise
            logger.warning(f"trial {trial}: {e.detail}; retrying with N = {2 * N}")
            N *= 2
            attempt += 1


def run_campaign(config: SimConfig) -> List[TrialOutcome]:
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(run_trial, repeat(config), range(config.trials)))
        for outcome in outcomes:
            _log_outcome(outcome, config.trials)
    else:
        outcomes = []
        for trial in range(config.trials):
            outcome = run_trial(config, trial)
            _log_outcome(outcome, config.trials)
            outcomes.append(outcome)
    return sorted(outcomes, key=lambda o: o.trial)


def _log_outcome(outcome: TrialOutcome, total: int):
    if outcome.passed:
        logger.info(f"trial {outcome.trial + 1}/{total} passed (N = {outcome.precision})")
    else:
        failed = [c.name for c in outcome.checks if not c.passed]
        logger.error(f"trial {outcome.trial + 1}/{total} failed: {', '.join(failed)}")


def _family(name: str) -> str:
    return name.split("[", 1)[0]


def summarize(outcomes: List[TrialOutcome], config: SimConfig) -> List[CheckResult]:
    """One verdict per check family across every trial and level."""
    families: Dict[str, List[Tuple[int, CheckResult]]] = {}
    for outcome in outcomes:
        for check in outcome.checks:
            families.setdefault(_family(check.name), []).append((outcome.trial, check))

    summary = []
    for family, entries in families.items():
        failures = [(trial, c) for trial, c in entries if not c.passed]
        detail = None
        if failures:
            listed = [
                f"trial {trial} {c.name}: expected {c.expected}, got {c.actual}"
                + (f" ({c.detail})" if c.detail else "")
                for trial, c in failures[:MAX_LISTED_FAILURES]
            ]
            detail = "; ".join(listed)
        summary.append(CheckResult(
            name=family,
            passed=not failures,
            expected=len(entries),
            actual=len(entries) - len(failures),
            detail=detail,
        ))

    if config.a_p == 0:
        omega = [mtt_consistency(config.p, n) for n in range(config.n_max + 1)]
        failing = [c.name for c in omega if not c.passed]
        summary.append(CheckResult(
            name="omega_order",
            passed=not failing,
            expected=len(omega),
            actual=len(omega) - len(failing),
            detail=", ".join(failing) or None,
        ))
    return summary


def growth_table(p: int, n_max: int) -> List[TableRow]:
    return [
        TableRow(
            n=n,
            q_n=q_n(p, n),
            e_n=e_n(p, n),
            e_prev_plus_q=(e_n(p, n - 1) if n else 0) + q_n(p, n),
        )
        for n in range(n_max + 1)
    ]


@dataclass
class FormalGroupOutcome:
    precision: int
    checks: List[CheckResult]
    epsilon: PadicScalar
    residual: int
    unit: PadicScalar
    dump: Optional[List[dict]] = None


def _agreement_check(name: str, precision: Optional[int], target: int) -> CheckResult:
    if precision is not None and precision < target:
        raise PrecisionExhausted(f"{name} only verified mod p^{precision}")
    return CheckResult(
        name=name,
        passed=precision is not None,
        expected=f"0 mod p^{target}",
        actual="0" if precision is not None else "nonzero",
    )


def run_formal_group(config: FormalGroupConfig, dump: bool = False) -> FormalGroupOutcome:
    """Integrality, group-law identities, ε and the trace unit, with precision doubling."""
    p, a_p, target = config.p, config.a_p, config.target
    precision = target + settings.series_headroom_per_degree * config.degree
    for attempt in range(settings.max_precision_doublings + 1):
        try:
            fg = fgs.build_formal_group(p, a_p, config.degree, precision)
            checks = [
                CheckResult(name="integrality", passed=True, expected="all valuations >= 0", actual="ok"),
                _agreement_check("identity", fgs.identity_defect(fg), target),
                _agreement_check("symmetry", fgs.symmetry_defect(fg), target),
                _agreement_check("log_additivity", fgs.log_additivity_defect(fg), target),
                _agreement_check("associativity", fgs.associativity_defect(fg, config.assoc_degree), target),
            ]
            break
        except PrecisionExhausted as e:
            if attempt == settings.max_precision_doublings:
                raise
            logger.warning(f"formal group: {e.detail}; retrying at precision {2 * precision}")
            precision *= 2

    epsilon = fgs.solve_epsilon(p, a_p, target)
    residual = fgs.epsilon_residual(p, a_p, epsilon, target)
    t = fgs.epsilon_target(p, a_p, target)
    checks.append(CheckResult(name="epsilon_residual", passed=residual == 0, expected=0, actual=residual))
    checks.append(CheckResult(
        name="epsilon_valuation",
        passed=val_p(epsilon) == 1,
        expected=1,
        actual=str(val_p(epsilon)),
    ))
    checks.append(CheckResult(
        name="epsilon_congruence",
        passed=(epsilon.value - t) % p ** min(2, target) == 0,
        expected=f"ε ≡ {t % p ** 2} mod {p}^2",
        actual=epsilon.value % p ** 2,
    ))
    unit = fgs.trace_unit_u(p, a_p, target)
    checks.append(CheckResult(name="trace_unit", passed=unit.is_unit(), expected="unit", actual=str(unit)))
    return FormalGroupOutcome(
        precision=precision,
        checks=checks,
        epsilon=epsilon,
        residual=residual,
        unit=unit,
        dump=series_dump(fg.law) if dump else None,
    )
