"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 resource or
coverage error (including malformed pi caches).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import estimator, harness, pairs
from .errors import CacheFormatError, DomainError, ResourceLimitError
from .prime_engine import (
    DEFAULT_LIMIT,
    DEFAULT_SEGMENT_SIZE,
    PrimeEngine,
    load_pi_cache,
    save_pi_cache,
)

EXIT_USAGE, EXIT_DOMAIN, EXIT_RESOURCE = 1, 2, 3
PI_CACHE_ENV = "GOLDBACH_PI_CACHE"

U64 = click.IntRange(0, 2**64 - 1)
RANGE = click.Choice(["full", "reduced"], case_sensitive=False)


@dataclass
class CliConfig:
    sieve_limit: int = DEFAULT_LIMIT
    segment_size: int = DEFAULT_SEGMENT_SIZE
    workers: int = 1
    pi_cache_path: Path | None = None
    twin_constant_mode: str = "paper"
    reduced_convention: str = pairs.DEFAULT_REDUCED_CONVENTION
    extended: bool = False

    def __post_init__(self):
        if self.workers < 1:
            raise click.BadParameter("workers must be >= 1")
        if self.sieve_limit < 2:
            raise click.BadParameter("sieve limit must be >= 2")


class Context:
    def __init__(self, config: CliConfig):
        self.config = config
        index = None
        if config.pi_cache_path is not None and config.pi_cache_path.exists():
            index = load_pi_cache(config.pi_cache_path)
        self.engine = PrimeEngine(
            limit=config.sieve_limit,
            segment_size=config.segment_size,
            workers=config.workers,
            pi_index=index,
        )
        self.estimate_config = estimator.EstimateConfig.for_mode(config.twin_constant_mode)

    def within(self, x: int, what: str) -> None:
        if x > self.config.sieve_limit and self.engine.pi_index.get(x) is None:
            raise ResourceLimitError(f"{what} needs primes up to {x}, beyond --sieve-limit {self.config.sieve_limit}")

    def close(self):
        if self.config.pi_cache_path is not None:
            save_pi_cache(self.engine.pi_index, self.config.pi_cache_path)


@click.group()
@click.option("--workers", default=1, show_default=True, type=click.IntRange(min=1))
@click.option("--sieve-limit", default=DEFAULT_LIMIT, show_default=True, type=click.IntRange(min=2))
@click.option("--segment-size", default=DEFAULT_SEGMENT_SIZE, show_default=True, type=click.IntRange(min=2))
@click.option(
    "--pi-cache",
    type=click.Path(dir_okay=False, path_type=Path),
    envvar=PI_CACHE_ENV,
    help=f"Pi checkpoint file, read at start and rewritten at exit (env {PI_CACHE_ENV}).",
)
@click.option(
    "--twin-constant",
    type=click.Choice(list(estimator.TWIN_CONSTANTS)),
    default="paper",
    show_default=True,
    help="paper = 0.66016; full_precision = 0.6601618158...",
)
@click.option(
    "--reduced-convention",
    type=click.Choice(list(pairs.REDUCED_CONVENTIONS)),
    default=pairs.DEFAULT_REDUCED_CONVENTION,
    show_default=True,
)
@click.option("--extended", is_flag=True, help="Allow extended-scale (multi-minute) totals.")
@click.pass_context
def cli(ctx, workers, sieve_limit, segment_size, pi_cache, twin_constant, reduced_convention, extended):
    """Exact Goldbach-pair counts and their analytic estimates."""
    config = CliConfig(
        sieve_limit, segment_size, workers, pi_cache, twin_constant, reduced_convention, extended
    )
    ctx.obj = Context(config)
    ctx.call_on_close(ctx.obj.close)


@cli.command()
@click.argument("n", type=U64)
@click.option("--range", "kind", type=RANGE, default="full", show_default=True)
@click.pass_obj
def count(obj: Context, n, kind):
    """Exact number of Goldbach pairs for N."""
    obj.within(2 * n, "count")
    click.echo(pairs.count_pairs(n, kind, obj.engine, convention=obj.config.reduced_convention))


@cli.command()
@click.argument("n", type=U64)
@click.option("--range", "kind", type=RANGE, default="full", show_default=True)
@click.option("--corrected", is_flag=True, help="Apply the U(N)^(3/2) correction.")
@click.pass_obj
def estimate(obj: Context, n, kind, corrected):
    """Estimated number of Goldbach pairs for N, rounded."""
    if corrected:
        obj.within(2 * n, "estimate --corrected")
    value = estimator.estimate(n, kind, corrected, obj.engine, obj.estimate_config)
    click.echo(estimator.round_half_away(value))


@cli.command()
@click.argument("m", type=U64)
@click.option("--approx", is_flag=True, help="Print the continuous g_tot(M) instead.")
@click.pass_obj
def gtot(obj: Context, m, approx):
    """Number of odd-prime pairs p1 <= p2 with p1 + p2 <= M."""
    if approx:
        click.echo(f"{estimator.g_tot(m, obj.estimate_config):.1f}")
        return
    obj.within(m, "gtot")
    click.echo(pairs.total_pairs(m, obj.engine))


@cli.command()
@click.argument("n", type=U64)
@click.pass_obj
def ndf(obj: Context, n):
    """Divisor factor of N, 4 decimals."""
    click.echo(str(estimator.ndf(n)))


@cli.command("ndf-average")
@click.argument("start", type=U64)
@click.argument("count", type=click.IntRange(min=1))
@click.pass_obj
def ndf_average(obj: Context, start, count):
    """Mean divisor factor over [START, START + COUNT)."""
    click.echo(f"{estimator.ndf_average(start, count, obj.config.workers):.6f}")


@cli.command()
@click.argument("n", type=U64)
@click.option("--range", "kind", type=RANGE, default="full", show_default=True)
@click.pass_obj
def unbalance(obj: Context, n, kind):
    """U(N) and U(N)^(3/2), tab separated."""
    obj.within(2 * n, "unbalance")
    uv = estimator.unbalance(n, kind, obj.engine, obj.estimate_config)
    click.echo(f"{uv.u:.4f}\t{uv.correction:.4f}")


@cli.command()
@click.option("--start", "start_n", type=U64, required=True)
@click.option("--count", "count_", type=click.IntRange(min=1), required=True)
@click.option("--range", "kind", type=RANGE, default="full", show_default=True)
@click.option("--corrected", is_flag=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "markdown"]), default="csv", show_default=True)
@click.option("--out", default="-", show_default=True, help="Destination path; - for stdout.")
@click.pass_obj
def table(obj: Context, start_n, count_, kind, corrected, fmt, out):
    """Exact counts against estimates for consecutive N."""
    obj.within(2 * (start_n + count_), "table")
    rows = harness.build_table(
        start_n, count_, kind, corrected, obj.engine, obj.estimate_config,
        workers=obj.config.workers, convention=obj.config.reduced_convention,
    )
    harness.emit_report(rows, fmt, out)


@cli.command()
@click.argument("bounds", type=U64, nargs=-1, required=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "markdown"]), default="csv", show_default=True)
@click.option("--out", default="-", show_default=True)
@click.pass_obj
def totals(obj: Context, bounds, fmt, out):
    """Cumulative pair totals for each sum bound, with U powers."""
    obj.within(max(bounds), "totals")
    rows = harness.build_totals(bounds, obj.engine, extended=obj.config.extended)
    harness.emit_report(rows, fmt, out)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="goldbach-lab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DOMAIN
    except (ResourceLimitError, CacheFormatError, MemoryError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_RESOURCE
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_RESOURCE
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
