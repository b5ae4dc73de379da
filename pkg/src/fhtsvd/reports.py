"""Report builders shared by the command line and the self test.

Everything here is a pure function of a :class:`RunConfig`; the only
time-dependent value is the ``generated_at`` stamp in JSON metadata.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from functools import cached_property
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import scipy
from scipy.interpolate import BarycentricInterpolator

from . import __version__
from .abel import AbelMap
from .gfunctions import GFunctions
from .oracle import OracleSpectrum, exact_spectrum
from .spectrum import SpectrumError, SpectrumSolver
from .surface import IntervalSystem, PeriodData, build_period_data
from .theta import ThetaContext

EIGS_HEADER = ("n", "kappa_approx", "lambda_approx", "two_lambda", "divisor_residual")
ORACLE_HEADER = ("n", "kappa_exact", "lambda_exact", "gap_to_next")
FN_HEADER = ("z", "f_asym", "h_asym", "f_oracle_interp")
MAIN_EXAMPLE = (-5.0, -3.3, -2.0, 0.1, 1.0, 2.0)
TIMESTAMP_KEY = "generated_at"


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


class MissingInputError(FileNotFoundError):
    """A file needed by a command is absent (exit code 4)."""


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all subcommands."""

    endpoints: tuple = MAIN_EXAMPLE
    n_max: int = 22
    quad_order: int = 256
    theta_eps: float = 1e-12
    kappa_min: float = 1.0
    kappa_max: float | None = None
    out: str = "."
    samples: int = 2000
    margin: float = 0.01
    fit_range: tuple = (5, 22)

    def __post_init__(self):
        object.__setattr__(self, "endpoints", tuple(float(a) for a in self.endpoints))
        object.__setattr__(self, "fit_range", tuple(int(v) for v in self.fit_range))
        if self.n_max < 1:
            raise ConfigError("n_max must be at least 1")
        if not 1e-14 < self.theta_eps < 1e-4:
            raise ConfigError("theta_eps must lie in (1e-14, 1e-4)")
        if self.quad_order < 16:
            raise ConfigError("quad_order must be at least 16")
        if self.samples < 10:
            raise ConfigError("samples must be at least 10")
        if not 0 <= self.margin < 0.5:
            raise ConfigError("margin must lie in [0, 0.5)")
        if self.kappa_min < 1:
            raise ConfigError("kappa_min must be at least 1")
        if self.kappa_max is not None and self.kappa_max <= self.kappa_min:
            raise ConfigError("kappa_max must exceed kappa_min")
        try:
            IntervalSystem(self.endpoints)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_sources(cls, config_file: str | None = None, **overrides) -> "RunConfig":
        """Defaults, then a JSON config file, then explicit overrides."""
        values = {}
        if config_file:
            path = Path(config_file)
            if not path.exists():
                raise MissingInputError(f"config file missing: {config_file}")
            try:
                values.update(json.loads(path.read_text()))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc.msg}") from None
            unknown = set(values) - set(cls.__dataclass_fields__)
            if unknown:
                raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def out_dir(self) -> Path:
        return Path(self.out)


def fmt(x) -> str:
    """17 significant digits in scientific notation; NaN stays 'nan'."""
    x = float(x)
    return "nan" if math.isnan(x) else f"{x:.16e}"


def _json_number(x):
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


def versions() -> dict:
    return {"fhtsvd": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def load_schema(name: str) -> dict:
    text = resources.files("fhtsvd").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate_document(doc: dict, name: str) -> None:
    jsonschema.validate(doc, load_schema(name))


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def read_csv(path: Path, header) -> list[dict]:
    if not path.exists():
        raise MissingInputError(f"{path.name.split('.')[0]} file missing")
    with path.open() as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if tuple(got or ()) != tuple(header):
            raise ConfigError(f"{path.name} has an unexpected header")
        return [{k: (int(v) if k == "n" else float(v)) for k, v in zip(header, row)} for row in reader]


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


# ---------------------------------------------------------------- pipeline


class Pipeline:
    """Lazily built objects for one configuration."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.system = IntervalSystem(config.endpoints)

    @cached_property
    def pd(self) -> PeriodData:
        return build_period_data(self.system)

    @cached_property
    def solver(self) -> SpectrumSolver:
        abel = AbelMap(self.pd)
        return SpectrumSolver(self.pd, theta_eps=self.config.theta_eps, abel=abel,
                              gfun=GFunctions(self.pd, abel),
                              theta=ThetaContext(self.pd.tau, eps=self.config.theta_eps))

    def oracle(self, n_max: int | None = None) -> OracleSpectrum:
        n_max = self.config.n_max if n_max is None else n_max
        key = ("oracle", n_max)
        if key not in self.__dict__:
            self.__dict__[key] = exact_spectrum(self.system, n_max, order=self.config.quad_order)
        return self.__dict__[key]

    # ------------------------------------------------------------ periods

    def periods_document(self) -> dict:
        pd, sp = self.pd, self.solver
        g = sp.gfun
        abel = sp.abel
        doc = pd.to_dict()
        doc.update({
            "tau11_direct": [pd.tau11_direct.real, pd.tau11_direct.imag],
            "slope": sp.slope,
            "Omega": g.Omega.tolist(),
            "delta": g.delta.tolist(),
            "g_inf": g.g_inf,
            "d_inf": [g.d_inf.real, g.d_inf.imag],
            "C0": [sp.C0.real, sp.C0.imag],
            "u_infinity": abel.u_infinity.tolist(),
            "W0_re": abel.W0.real.tolist(),
            "W0_im": abel.W0.imag.tolist(),
            "K_riemann_re": abel.riemann_constants().real.tolist(),
            "K_riemann_im": abel.riemann_constants().imag.tolist(),
            "versions": versions(),
            TIMESTAMP_KEY: timestamp(),
        })
        validate_document(doc, "periods")
        return doc

    # ------------------------------------------------------------ approximate

    def approximate_roots(self):
        """(n, kappa) for every root with index 1..n_max inside the kappa window."""
        cfg, sp = self.config, self.solver
        hi = cfg.kappa_max
        if hi is None:
            hi = cfg.kappa_min + (cfg.n_max + 3) * sp.period
            while True:
                n, k = sp.find_eigenvalues(cfg.kappa_min, hi)
                if n.size and n[-1] >= cfg.n_max:
                    break
                hi += 2 * sp.period
        else:
            n, k = sp.find_eigenvalues(cfg.kappa_min, hi)
        keep = (n >= 1) & (n <= cfg.n_max)
        return n[keep], k[keep]

    def eigs_rows(self):
        """Rows of eigs.csv and the number of failed indices."""
        n_found, kappas = self.approximate_roots()
        by_n = dict(zip(n_found.tolist(), kappas.tolist()))
        rows, failures = [], 0
        seed = None
        for n in range(1, self.config.n_max + 1):
            kappa = by_n.get(n, math.nan)
            resid = math.nan
            if not math.isnan(kappa):
                try:
                    div = self.solver.solve_divisor(kappa, seed=seed)
                    seed, resid = div.params, div.residual
                except SpectrumError:
                    failures += 1
            else:
                failures += 1
            lam = math.exp(-kappa) if not math.isnan(kappa) else math.nan
            rows.append((n, kappa, lam, 2 * lam, resid))
        return rows, failures

    # ------------------------------------------------------------ oracle

    def oracle_rows(self):
        spec = self.oracle()
        gaps = spec.gap_to_next()
        return [(int(n), spec.kappas[n], spec.lambdas[n], gaps[n])
                for n in range(1, self.config.n_max + 1)]

    # ------------------------------------------------------------ eigenfunctions

    def sample_grid(self) -> np.ndarray:
        """Equispaced interior samples on every main arc, about ``samples`` in total."""
        cfg = self.config
        arcs = [self.system.arc(j) for j in range(1, self.system.genus + 2)]
        lengths = np.array([hi - lo for lo, hi in arcs])
        counts = np.maximum(2, np.round(cfg.samples * lengths / lengths.sum()).astype(int))
        counts[-1] = max(2, cfg.samples - counts[:-1].sum())
        parts = [np.linspace(lo + cfg.margin * (hi - lo), hi - cfg.margin * (hi - lo), m)
                 for (lo, hi), m in zip(arcs, counts)]
        return np.concatenate(parts)

    def interpolate_oracle_f(self, n: int, z: np.ndarray) -> np.ndarray:
        """Oracle f_n barycentrically interpolated from the Gauss nodes of each inner arc."""
        spec = self.oracle(max(self.config.n_max, n))
        out = np.full(z.shape, np.nan)
        order = spec.order
        for k, (lo, hi) in enumerate(self.system.inner_arcs):
            nodes = spec.nodes_i[k * order:(k + 1) * order]
            vals = spec.f[k * order:(k + 1) * order, n]
            pick = (z >= lo) & (z <= hi)
            if np.any(pick):
                out[pick] = BarycentricInterpolator(nodes, vals)(z[pick])
        return out

    def eigenfunction_table(self, n: int):
        """Columns z, f_asym, h_asym, f_oracle_interp for the index n.

        The oracle is flipped when needed so both sides share the sign of
        the asymptotic function.
        """
        z = self.sample_grid()
        n_found, kappas = self.solver.find_eigenvalues(self.config.kappa_min,
                                                       self.config.kappa_min + (n + 3) * self.solver.period)
        hit = np.flatnonzero(n_found == n)
        if hit.size == 0:
            raise SpectrumError(f"no approximate root with index {n} above kappa_min")
        kappa = kappas[hit[0]]
        f, h = self.solver.asymptotic_singular_functions(kappa, z, margin=self.config.margin)
        fo = self.interpolate_oracle_f(n, z)
        inner = ~np.isnan(f)
        if np.nansum(f[inner] * fo[inner]) < 0:
            fo = -fo
        return kappa, z, f, h, fo

    # ------------------------------------------------------------ compare

    def compare_document(self, eigs: list[dict], oracle: list[dict]) -> dict:
        cfg = self.config
        ne = [r["n"] for r in eigs]
        no = [r["n"] for r in oracle]
        if ne != no:
            raise ConfigError("n_max mismatch between eigs.csv and oracle.csv")
        n = np.array(ne)
        ka = np.array([r["kappa_approx"] for r in eigs])
        ke = np.array([r["kappa_exact"] for r in oracle])
        shift = optimal_shift(n, ka, ke)
        lo, hi = cfg.fit_range
        sel = (n >= lo) & (n <= hi) & np.isfinite(ke)
        if np.count_nonzero(sel) < 2:
            raise ConfigError("fewer than two oracle values inside the fit range")
        slope, intercept = np.polyfit(n[sel], -ke[sel], 1)
        predicted = -self.solver.period
        rows = []
        exact_by_n = dict(zip(n.tolist(), ke.tolist()))
        for r in eigs:
            kx = exact_by_n.get(r["n"] + shift, math.nan)
            gap = abs(kx - r["kappa_approx"]) if not math.isnan(kx) and not math.isnan(r["kappa_approx"]) else math.nan
            rows.append({
                "n": r["n"],
                "kappa_approx": _json_number(r["kappa_approx"]),
                "lambda_approx": _json_number(r["lambda_approx"]),
                "two_lambda": _json_number(r["two_lambda"]),
                "kappa_exact": _json_number(kx),
                "lambda_exact": _json_number(math.exp(-kx) if not math.isnan(kx) else math.nan),
                "abs_gap": _json_number(gap),
                "divisor_residual": _json_number(r["divisor_residual"]),
            })
        doc = {
            "metadata": {
                "endpoints": list(cfg.endpoints),
                "genus": self.system.genus,
                "tau11_im": float(self.pd.tau11.imag),
                "slope": predicted,
                "intercept_fit": float(intercept),
                "quad_order": cfg.quad_order,
                "theta_eps": cfg.theta_eps,
                "versions": versions(),
                TIMESTAMP_KEY: timestamp(),
            },
            "fit": {
                "n_min": int(lo),
                "n_max": int(hi),
                "slope_fit": float(slope),
                "intercept_fit": float(intercept),
                "slope_predicted": predicted,
                "relative_slope_error": float(abs(slope - predicted) / abs(predicted)),
            },
            "index_shift": int(shift),
            "rows": rows,
        }
        validate_document(doc, "report")
        return doc


def optimal_shift(n, kappa_approx, kappa_exact, window: int = 3) -> int:
    """Integer s minimizing the median of |kappa_exact[n + s] - kappa_approx[n]|."""
    exact = dict(zip(np.asarray(n).tolist(), np.asarray(kappa_exact, float).tolist()))
    best, best_val = 0, math.inf
    for s in sorted(range(-window, window + 1), key=abs):
        gaps = [abs(exact[m + s] - k) for m, k in zip(np.asarray(n).tolist(), kappa_approx)
                if (m + s) in exact and np.isfinite(k) and np.isfinite(exact[m + s])]
        if len(gaps) >= 2:
            val = float(np.median(gaps))
            if val < best_val:
                best, best_val = s, val
    return best


def strip_timestamps(text: str) -> str:
    """Drop the ISO timestamp lines so reruns can be compared byte for byte."""
    return "\n".join(line for line in text.splitlines() if f'"{TIMESTAMP_KEY}"' not in line)


def config_dict(config: RunConfig) -> dict:
    return asdict(config)


__all__ = [
    "RunConfig", "Pipeline", "ConfigError", "MissingInputError", "fmt", "write_csv", "read_csv",
    "dump_json", "optimal_shift", "strip_timestamps", "EIGS_HEADER", "ORACLE_HEADER", "FN_HEADER",
    "MAIN_EXAMPLE", "replace", "field",
]
