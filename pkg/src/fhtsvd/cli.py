"""Command line driver: ``fhtsvd periods|eigs|oracle|compare|eigenfunctions|selftest``."""

from __future__ import annotations

import functools
import sys
import tempfile
from pathlib import Path

import click

from .reports import (EIGS_HEADER, FN_HEADER, ORACLE_HEADER, ConfigError, MissingInputError,
                      Pipeline, RunConfig, dump_json, fmt, read_csv, strip_timestamps, write_csv)
from .spectrum import SpectrumError
from .surface import GeometryError

EXIT_OK, EXIT_VALIDATION, EXIT_PARTIAL, EXIT_MISSING = 0, 2, 3, 4


def _endpoints(ctx, param, value):
    if value is None:
        return None
    try:
        return tuple(float(s) for s in value.split(",") if s.strip())
    except ValueError:
        raise click.BadParameter("expected comma-separated reals") from None


def run_options(fn):
    """Flags shared by every subcommand; unset flags fall back to the config file, then defaults."""
    options = [
        click.option("--config", "config_file", type=click.Path(dir_okay=False),
                     help="JSON file with RunConfig fields; flags take precedence."),
        click.option("--endpoints", callback=_endpoints, help="a1,a2,...,a_{2g+2}"),
        click.option("--n-max", type=int),
        click.option("--quad-order", type=int),
        click.option("--theta-eps", type=float),
        click.option("--kappa-min", type=float),
        click.option("--kappa-max", type=float),
        click.option("--out", type=click.Path(file_okay=False)),
        click.option("--samples", type=int),
        click.option("--margin", type=float),
    ]
    for opt in reversed(options):
        fn = opt(fn)

    @functools.wraps(fn)
    def wrapper(config_file, **kwargs):
        flags = {k: kwargs.pop(k) for k in list(kwargs) if k in RunConfig.__dataclass_fields__}
        try:
            config = RunConfig.from_sources(config_file, **flags)
            config.out_dir.mkdir(parents=True, exist_ok=True)
            code = fn(config, **kwargs)
        except (ConfigError, GeometryError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except MissingInputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_MISSING)
        sys.exit(code or EXIT_OK)

    return wrapper


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Singular-value asymptotics of the finite Hilbert transform on several intervals."""


# ------------------------------------------------------------------ writers

def write_periods(config: RunConfig, pipe: Pipeline | None = None) -> Path:
    pipe = pipe or Pipeline(config)
    path = config.out_dir / "periods.json"
    path.write_text(dump_json(pipe.periods_document()))
    return path


def write_eigs(config: RunConfig, pipe: Pipeline | None = None) -> tuple[Path, int]:
    pipe = pipe or Pipeline(config)
    rows, failures = pipe.eigs_rows()
    path = config.out_dir / "eigs.csv"
    write_csv(path, EIGS_HEADER, [(n, *map(fmt, rest)) for n, *rest in rows])
    return path, failures


def write_oracle(config: RunConfig, pipe: Pipeline | None = None) -> Path:
    pipe = pipe or Pipeline(config)
    path = config.out_dir / "oracle.csv"
    write_csv(path, ORACLE_HEADER, [(n, *map(fmt, rest)) for n, *rest in pipe.oracle_rows()])
    return path


def write_report(config: RunConfig, pipe: Pipeline | None = None) -> Path:
    pipe = pipe or Pipeline(config)
    eigs = read_csv(config.out_dir / "eigs.csv", EIGS_HEADER)
    oracle = read_csv(config.out_dir / "oracle.csv", ORACLE_HEADER)
    path = config.out_dir / "report.json"
    path.write_text(dump_json(pipe.compare_document(eigs, oracle)))
    return path


def write_eigenfunctions(config: RunConfig, n: int, pipe: Pipeline | None = None) -> Path:
    pipe = pipe or Pipeline(config)
    _, z, f, h, fo = pipe.eigenfunction_table(n)
    path = config.out_dir / f"fn_{n}.csv"
    write_csv(path, FN_HEADER, [tuple(map(fmt, row)) for row in zip(z, f, h, fo)])
    return path


# ------------------------------------------------------------------ commands

@main.command()
@run_options
def periods(config):
    """Period matrix, Abel data and jump constants as JSON."""
    click.echo(write_periods(config))


@main.command()
@run_options
def eigs(config):
    """Approximate eigenvalues from the theta-divisor crossings."""
    path, failures = write_eigs(config)
    click.echo(path)
    if failures:
        click.echo(f"warning: {failures} indices failed and were written as NaN", err=True)
        return EXIT_PARTIAL


@main.command()
@run_options
def oracle(config):
    """Exact singular values from the Nystrom discretization."""
    click.echo(write_oracle(config))


@main.command()
@run_options
def compare(config):
    """Match eigs.csv against oracle.csv and fit the exponential decay rate."""
    click.echo(write_report(config))


@main.command()
@run_options
@click.option("--n", "n", type=int, required=True, help="Index (number of sign changes of f_n).")
def eigenfunctions(config, n):
    """Asymptotic and exact singular functions on the sample grid."""
    if n < 1:
        raise ConfigError("--n must be at least 1")
    try:
        click.echo(write_eigenfunctions(config, n))
    except SpectrumError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_PARTIAL


@main.command()
@run_options
def selftest(config):
    """Run the numerical suites and check that reports are reproducible."""
    from . import checks

    ok = True
    for k, check in checks.SUITES.items():
        result = check()
        click.echo(result.line())
        ok &= result.passed
    same = reports_are_deterministic(config)
    click.echo(f"[{'PASS' if same else 'FAIL'}] reruns of eigs/oracle/compare are byte-identical")
    ok &= same
    return EXIT_OK if ok else EXIT_PARTIAL


def reports_are_deterministic(config: RunConfig) -> bool:
    """Build the report files twice in fresh pipelines and compare them modulo timestamps."""
    texts = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            run = RunConfig(**{**config.__dict__, "out": tmp})
            pipe = Pipeline(run)
            files = [write_eigs(run, pipe)[0], write_oracle(run, pipe), write_report(run, pipe)]
            texts.append([strip_timestamps(p.read_text()) for p in files])
    return texts[0] == texts[1]


if __name__ == "__main__":
    main()
