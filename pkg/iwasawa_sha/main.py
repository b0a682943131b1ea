"""
Command line surface
stdout carries the JSON/CSV payload, stderr carries progress; exit codes follow core.errors.
"""
import logging
import time
from enum import Enum
from typing import Callable, Optional

import typer
from pydantic import ValidationError

from iwasawa_sha.core.config import settings
from iwasawa_sha.core.errors import EXIT_CHECK_FAILURE, EXIT_OK, EXIT_USAGE, ShaCheckError, UsageError
from iwasawa_sha.core.log import configure_logging
from iwasawa_sha.models import CheckResult, FormalGroupConfig, RunReport, SimConfig
from iwasawa_sha.services.algebra import AlgebraElement, invariants
from iwasawa_sha.services.campaign import growth_table, run_campaign, run_formal_group, summarize
from iwasawa_sha.services.lattice import quotient_profile
from iwasawa_sha.services.padic import require_odd_prime
from iwasawa_sha.services.tower import char_eval, eisenstein_valuation
from iwasawa_sha.utils.helpers import serialize
from iwasawa_sha.utils.reports import render_csv, render_json

logger = logging.getLogger(__name__)

app = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
    help="Growth of ± Tate-Shafarevich presentations along the cyclotomic Z_p-tower.",
)


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"


class UnitMode(str, Enum):
    random = "random"
    honda = "honda"


@app.callback()
def main(log_level: str = typer.Option(settings.log_level, "--log-level", help="Logging level on stderr")):
    configure_logging(log_level)


def _guarded(body: Callable[[], RunReport], fmt: OutputFormat = OutputFormat.json, csv_rows=None):
    """Run a command body; domain errors become their exit code, anything else exits 1."""
    try:
        report = body()
    except ValidationError as e:
        logger.error(f"invalid arguments: {e.errors(include_url=False)}")
        raise typer.Exit(EXIT_USAGE)
    except ShaCheckError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        raise typer.Exit(e.exit_code)
    except Exception as e:
        logger.exception(f"unexpected failure: {e}")
        raise typer.Exit(EXIT_CHECK_FAILURE)

    if fmt == OutputFormat.csv:
        rows = csv_rows(report) if csv_rows else report.records
        typer.echo(render_csv(rows), nl=False)
    else:
        typer.echo(render_json(report))
    raise typer.Exit(report.exit_code)


def _finish(report: RunReport, started: float) -> RunReport:
    report.passed = all(c.passed for c in report.checks)
    report.exit_code = EXIT_OK if report.passed else EXIT_CHECK_FAILURE
    report.timing = {"wall_seconds": round(time.perf_counter() - started, 6)}
    return report


@app.command()
def table(
    p: int = typer.Option(..., "--p", help="Odd prime"),
    nmax: int = typer.Option(6, "--nmax", min=0),
    fmt: OutputFormat = typer.Option(OutputFormat.json, "--format"),
):
    """Closed forms q_n, e_n and the recursion e_(n-1) + q_n."""

    def body() -> RunReport:
        started = time.perf_counter()
        require_odd_prime(p)
        rows = growth_table(p, nmax)
        checks = [
            CheckResult(name=f"recursion[n={r.n}]", passed=r.e_n == r.e_prev_plus_q, expected=r.e_n, actual=r.e_prev_plus_q)
            for r in rows
        ]
        report = RunReport(
            command="table",
            config={"p": p, "n_max": nmax},
            checks=checks,
            records=[r.model_dump() for r in rows],
        )
        return _finish(report, started)

    _guarded(body, fmt)


@app.command()
def verify(
    p: int = typer.Option(..., "--p", help="Odd prime"),
    ap: int = typer.Option(0, "--ap", help="a_p, decimal, divisible by p"),
    nmax: int = typer.Option(4, "--nmax", min=0),
    trials: int = typer.Option(settings.default_trials, "--trials"),
    seed: int = typer.Option(settings.default_seed, "--seed"),
    precision: Optional[int] = typer.Option(None, "--precision", help="Override the automatic N"),
    jobs: int = typer.Option(settings.default_jobs, "--jobs"),
    unit_mode: UnitMode = typer.Option(UnitMode.random, "--unit-mode"),
    fmt: OutputFormat = typer.Option(OutputFormat.json, "--format"),
):
    """Seeded campaign over random admissible sequences P_n."""

    def body() -> RunReport:
        started = time.perf_counter()
        config = SimConfig(
            p=p, a_p=ap, n_max=nmax, precision=precision, seed=seed,
            trials=trials, jobs=jobs, unit_mode=unit_mode.value,
        )
        logger.info(f"verify p={p} a_p={ap} n_max={nmax}: {trials} trials, seed {seed}")
        outcomes = run_campaign(config)
        report = RunReport(
            command="verify",
            config=config.model_dump(mode="json"),
            checks=summarize(outcomes, config),
            records=[r.model_dump(mode="json", by_alias=True) for o in outcomes for r in o.records],
            values={"precisions": sorted({o.precision for o in outcomes})},
        )
        return _finish(report, started)

    _guarded(body, fmt)


@app.command("fg")
def formal_group(
    p: int = typer.Option(..., "--p", help="Odd prime"),
    ap: int = typer.Option(0, "--ap", help="a_p, decimal, divisible by p"),
    deg: int = typer.Option(20, "--deg", help="Truncation degree of the group law"),
    target: int = typer.Option(10, "--target", help="Verify identities mod p^target"),
    assoc_deg: int = typer.Option(10, "--assoc-deg", help="Degree for the associativity check"),
    dump: bool = typer.Option(False, "--dump", help="Include the group law coefficients"),
    fmt: OutputFormat = typer.Option(OutputFormat.json, "--format"),
):
    """Honda formal group: integrality, group-law identities, ε and the trace unit."""

    def body() -> RunReport:
        started = time.perf_counter()
        config = FormalGroupConfig(p=p, a_p=ap, degree=deg, target=target, assoc_degree=assoc_deg)
        outcome = run_formal_group(config, dump=dump)
        report = RunReport(
            command="fg",
            config=config.model_dump(mode="json"),
            checks=outcome.checks,
            records=outcome.dump or [],
            values={
                "epsilon": str(outcome.epsilon),
                "residual": outcome.residual,
                "trace_unit": str(outcome.unit),
                "working_precision": outcome.precision,
            },
        )
        return _finish(report, started)

    _guarded(body, fmt, csv_rows=lambda report: [c.model_dump() for c in report.checks])


@app.command()
def inspect(
    element: str = typer.Argument(..., help='Coefficients as a JSON list, or "level n; [...] mod p^N"'),
    p: Optional[int] = typer.Option(None, "--p", help="Prime, when the element is a bare JSON list"),
    precision: int = typer.Option(20, "--precision", help="N, when the element is a bare JSON list"),
):
    """μ, λ, character valuations and quotient profile of one group ring element."""

    def body() -> RunReport:
        started = time.perf_counter()
        try:
            if element.lstrip().startswith("level"):
                f = AlgebraElement.from_text(element)
                require_odd_prime(f.p)
            elif p is None:
                raise UsageError("--p is required for a bare JSON list")
            else:
                f = AlgebraElement.from_json(require_odd_prime(p), precision, element)
        except ValueError as e:
            raise UsageError(str(e))
        inv = invariants(f)
        valuations = {}
        for m in range(f.level + 1):
            value = char_eval(f, m)
            valuations[str(m)] = str(eisenstein_valuation(value)) if any(value.values) else None
        report = RunReport(
            command="inspect",
            config={"p": f.p, "precision": f.N, "level": f.level},
            values={
                "element": f.to_text(),
                "invariants": serialize(inv),
                "char_valuations": valuations,
                "principal_quotient": serialize(quotient_profile([f])),
            },
        )
        return _finish(report, started)

    _guarded(body)


if __name__ == "__main__":
    app()
