"""Parameter sweeps producing outage curves as CSV or JSON tables.

A sweep varies one axis (``snr_db``, ``rate`` or ``n_t``) of a base
configuration and evaluates every requested scheme with every requested
method. Scheme names are ``type-i``, ``cc``, ``ir`` and ``no-harq`` (a
single round of Type-I); a suffix ``@<dB>`` pins the scheme to its own SNR,
e.g. ``type-i@11.5``.

Rows are ordered by grid, scheme, method. ``wall_time_ms`` is only filled
when timing is requested, so that seeded runs serialize byte-identically.
"""

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, fields
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import asymptotic, coding_gain, diversity_order
from .core import SchemeTag, SystemConfig
from .montecarlo import CCVariant, RngSpec, simulate
from .outage import outage_exact

AXES = ("snr_db", "rate", "n_t")
METHODS = ("exact", "asymptotic", "monte-carlo", "coding-gain")
SCHEMES = ("type-i", "cc", "ir", "no-harq")
COLUMNS = ("axis_name", "axis", "scheme", "method", "value", "stderr", "diversity_order",
           "wall_time_ms", "error")
FORMATS = ("csv", "json")


def _parse_scheme(name):
    base, _, snr = str(name).partition("@")
    if base not in SCHEMES:
        raise ValueError(f"unknown scheme {name!r}")
    return base, (float(snr.removesuffix("dB")) if snr else None)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a base link, an axis and what to evaluate along it.

    Parameters
    ----------
    base : SystemConfig
        Values of the non-swept parameters.
    axis : {"snr_db", "rate", "n_t"}
    grid : sequence of float
        Strictly increasing axis values (integers for ``n_t``).
    methods : sequence of str
        Subset of ``exact``, ``asymptotic``, ``monte-carlo``, ``coding-gain``.
    schemes : sequence of str
    trials : int
        Monte Carlo trials per grid point.
    seed : int
    out : str, optional
        Output path; ``None`` writes nothing.
    fmt : {"csv", "json"}
    """

    base: SystemConfig
    axis: str
    grid: Tuple[float, ...]
    methods: Tuple[str, ...] = ("exact", "asymptotic", "monte-carlo")
    schemes: Tuple[str, ...] = SCHEMES
    trials: int = 100_000
    seed: int = RngSpec.seed
    out: Optional[str] = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        grid = np.asarray(self.grid, dtype=float).ravel()
        if grid.size == 0 or not np.all(np.isfinite(grid)):
            raise ValueError("grid must be a non-empty sequence of finite numbers")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.axis == "n_t":
            if np.any(grid != np.round(grid)) or grid[0] < 1:
                raise ValueError("n_t grid must hold positive integers")
            grid = tuple(int(g) for g in grid)
        else:
            grid = tuple(float(g) for g in grid)
        object.__setattr__(self, "grid", grid)
        methods = tuple(self.methods)
        if not methods:
            raise ValueError("methods must be non-empty")
        for m in methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        object.__setattr__(self, "methods", methods)
        schemes = tuple(self.schemes)
        if not schemes:
            raise ValueError("schemes must be non-empty")
        for s in schemes:
            _parse_scheme(s)
        object.__setattr__(self, "schemes", schemes)
        if int(self.trials) < 1000:
            raise ValueError("trials must be at least 1000")
        RngSpec(int(self.seed))
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")

    def config_at(self, value) -> SystemConfig:
        """The base configuration moved to grid point ``value``."""
        if self.axis == "snr_db":
            return self.base.with_snr_db(value)
        if self.axis == "rate":
            return self.base.replace(rate=value)
        return self.base.replace(n_t=int(value))


@dataclass
class ResultRow:
    axis_name: str
    axis: float
    scheme: str
    method: str
    value: Optional[float] = None
    stderr: Optional[float] = None
    diversity_order: Optional[int] = None
    wall_time_ms: Optional[float] = None
    error: Optional[str] = None


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _scheme_config(config, base, snr_db):
    if snr_db is not None:
        config = config.with_snr_db(snr_db)
    if base == "no-harq":
        config = SystemConfig(config.n_t, config.n_r, 1, config.snr_per_round[:1], config.rate)
    return config


def _engine_tag(base):
    return SchemeTag.TYPE_I if base == "no-harq" else SchemeTag(base)


def _cell_seed(seed, *index):
    # independent, reproducible seed per (grid point, scheme group)
    words = np.random.SeedSequence([int(seed), *index]).generate_state(2, np.uint32)
    return int(words[0]) | (int(words[1]) << 32)


def _timed(fn):
    t0 = time.perf_counter()
    try:
        return fn(), None, (time.perf_counter() - t0) * 1e3
    except Exception as exc:  # recorded per cell, the sweep goes on
        return None, f"{type(exc).__name__}: {exc}", (time.perf_counter() - t0) * 1e3


def _analytic_rows(spec, axis_value, name, cfg, timing):
    base, _ = _parse_scheme(name)
    tag = _engine_tag(base)
    rows = []
    for method in spec.methods:
        if method == "monte-carlo":
            continue
        if method == "exact":
            fn = lambda: outage_exact(cfg, tag)
        elif method == "asymptotic":
            fn = lambda: asymptotic(cfg, tag).as_estimate()
        else:
            fn = lambda: coding_gain(cfg, tag)
        res, err, ms = _timed(fn)
        row = ResultRow(spec.axis, axis_value, name, method,
                        diversity_order=diversity_order(cfg), error=err,
                        wall_time_ms=ms if timing else None)
        if res is not None and method == "coding-gain":
            row.value = float(res)
        elif res is not None:
            row.value = res.value
            row.method = res.method.value
        rows.append(row)
    return rows


def _mc_rows(spec, axis_value, index, groups, timing):
    # schemes sharing a configuration are simulated on common draws
    rows = {}
    for j, (cfg, members) in enumerate(groups):
        keys = []
        for name in members:
            tag = _engine_tag(_parse_scheme(name)[0])
            if tag is SchemeTag.CC:
                keys += [(tag, CCVariant.TRUE), (tag, CCVariant.LEMMA_BOUND)]
            else:
                keys.append((tag, None))
        rng = RngSpec(_cell_seed(spec.seed, index, j))
        res, err, ms = _timed(lambda: simulate(cfg, keys, spec.trials, rng))
        for name in members:
            tag = _engine_tag(_parse_scheme(name)[0])
            variants = [(CCVariant.TRUE, "monte-carlo"), (CCVariant.LEMMA_BOUND, "monte-carlo-bound")] \
                if tag is SchemeTag.CC else [(None, "monte-carlo")]
            out = []
            for variant, label in variants:
                row = ResultRow(spec.axis, axis_value, name, label,
                                diversity_order=diversity_order(cfg), error=err,
                                wall_time_ms=ms if timing else None)
                if res is not None:
                    est = res[(tag, variant)]
                    row.value, row.stderr = est.value, est.stderr
                out.append(row)
            rows[name] = out
    return rows


def run_sweep(spec: SweepSpec, timing=False) -> List[ResultRow]:
    """Evaluate ``spec`` cell by cell.

    Failures of individual cells land in the ``error`` column and leave
    ``value`` empty. Monte Carlo rows are deterministic given ``spec.seed``.

    Returns
    -------
    list of ResultRow
        Ordered by grid point, then scheme, then method.
    """
    rows = []
    for index, axis_value in enumerate(spec.grid):
        try:
            config = spec.config_at(axis_value)
        except ValueError as exc:
            for name in spec.schemes:
                rows.append(ResultRow(spec.axis, axis_value, name, "-",
                                      error=f"{type(exc).__name__}: {exc}"))
            continue
        per_scheme = {}
        groups = {}
        for name in spec.schemes:
            base, snr_db = _parse_scheme(name)
            cfg = _scheme_config(config, base, snr_db)
            per_scheme[name] = _analytic_rows(spec, axis_value, name, cfg, timing)
            groups.setdefault(cfg, []).append(name)
        if "monte-carlo" in spec.methods:
            mc = _mc_rows(spec, axis_value, index, list(groups.items()), timing)
        else:
            mc = {}
        for name in spec.schemes:
            rows += per_scheme[name] + mc.get(name, [])
    return rows


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _db_grid(start, stop, step):
    return tuple(np.round(np.arange(start, stop + step / 2, step), 10))


def preset(name, trials=100_000, seed=RngSpec.seed) -> SweepSpec:
    """Sweeps behind the published outage and coding-gain curves.

    ``fig2``-``fig4``: outage versus SNR (0 to 40 dB) for ``(2, 2)``,
    ``(3, 2)`` and ``(2, 3)`` antennas, ``K = 3``, ``R = 3``.
    ``fig5``: outage versus rate at 5 dB, ``N_T = N_R = 2``, ``K = 3``.
    ``fig6``: modulation-and-coding gain versus rate, ``N = 2``, ``K = 3``.
    ``fig7``: outage versus ``N_T`` (2 to 1024) at 5 dB, with Type-I also
    at 11.5 dB, ``N_R = 2``, ``K = 3``, ``R = 3``.
    """
    all_methods = ("exact", "asymptotic", "monte-carlo")
    antennas = {"fig2": (2, 2), "fig3": (3, 2), "fig4": (2, 3)}
    if name in antennas:
        n_t, n_r = antennas[name]
        return SweepSpec(SystemConfig.from_db(n_t, n_r, 3, 0.0, 3.0), "snr_db",
                         _db_grid(0.0, 40.0, 2.0), all_methods, SCHEMES, trials, seed)
    if name == "fig5":
        return SweepSpec(SystemConfig.from_db(2, 2, 3, 5.0, 3.0), "rate",
                         _db_grid(0.5, 8.0, 0.5), all_methods, SCHEMES, trials, seed)
    if name == "fig6":
        return SweepSpec(SystemConfig.from_db(2, 2, 3, 5.0, 3.0), "rate",
                         _db_grid(0.5, 8.0, 0.5), ("coding-gain",), ("type-i", "cc", "ir"),
                         trials, seed)
    if name == "fig7":
        return SweepSpec(SystemConfig.from_db(2, 2, 3, 5.0, 3.0), "n_t",
                         tuple(2 ** i for i in range(1, 11)), ("exact", "monte-carlo"),
                         ("type-i", "type-i@11.5", "cc", "ir"), trials, seed)
    raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")


PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("unexpected boolean cell")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    # one physical line per record, no control characters
    return "".join(c if c.isprintable() else " " for c in str(v))


def to_csv(rows: Sequence[ResultRow]) -> str:
    """CSV text with a header row; empty cells for missing values."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def to_json(rows: Sequence[ResultRow]) -> str:
    """JSON array of row objects, ``null`` for missing values."""
    return json.dumps([asdict(r) for r in rows], indent=1) + "\n"


def _typed(name, text):
    if text == "":
        return None
    if name in ("scheme", "method", "axis_name", "error"):
        return text
    if name == "diversity_order":
        return int(text)
    return float(text)


def from_csv(text: str) -> List[ResultRow]:
    """Inverse of :func:`to_csv`; integer ``n_t`` axes come back as ints."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected header {header!r}")
    rows = []
    for rec in reader:
        row = ResultRow(**{c: _typed(c, t) for c, t in zip(COLUMNS, rec)})
        if row.axis_name == "n_t":
            row.axis = int(row.axis)
        rows.append(row)
    return rows


def from_json(text: str) -> List[ResultRow]:
    names = {f.name for f in fields(ResultRow)}
    return [ResultRow(**{k: v for k, v in obj.items() if k in names}) for obj in json.loads(text)]


def write_rows(rows, path, fmt="csv"):
    text = to_csv(rows) if fmt == "csv" else to_json(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text
