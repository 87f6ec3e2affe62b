"""Run configuration: INI-style text files describing a full simulation.

The format is flat key/value pairs under three section headers:

    [scenario]    geometry and noise-correlation parameters
    [simulation]  constellation, detector list, SNR sweep, stop targets, seed
    [output]      file names for the CSV, summary table and plot script

``parse_config`` validates everything up front and reports *all* problems at
once — syntax errors with line numbers, unknown sections or keys, and
semantic violations by name — instead of failing on the first.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass

import numpy as np

from .constellation import make_constellation
from .detection import LgsdConfig
from .harness import DetectorSpec, ExperimentPlan
from .scenario import Scenario

__all__ = [
    "ConfigError",
    "DetectorToken",
    "RunConfig",
    "parse_config",
    "serialize_config",
    "build_plan",
]


class ConfigError(ValueError):
    """Raised on invalid configuration text; ``errors`` lists every problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n" +
                         "\n".join(f"  - {e}" for e in self.errors))


_TOKEN_RE = re.compile(
    r"^(jml|lgsd)@(mrc|wiener-hopf)(?:\((\d+)/(\d+)/(\d+)\))?$")


@dataclass(frozen=True)
class DetectorToken:
    """One entry of the ``detectors`` list, e.g. ``lgsd@mrc(2/3/2)``.

    ``iters`` is the (overall/branch/global) iteration triple; it is required
    for ``lgsd`` and forbidden for ``jml``.
    """

    algorithm: str
    preprocessor: str
    iters: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "iters",
                           None if self.iters is None else tuple(self.iters))
        if self.algorithm not in ("jml", "lgsd"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.preprocessor not in ("mrc", "wiener-hopf"):
            raise ValueError(f"unknown preprocessor {self.preprocessor!r}")
        if self.algorithm == "jml" and self.iters is not None:
            raise ValueError("jml takes no iteration triple")
        if self.algorithm == "lgsd":
            if self.iters is None or len(self.iters) != 3:
                raise ValueError("lgsd needs an (overall/branch/global) triple")
            if any(int(q) < 1 for q in self.iters):
                raise ValueError("iteration counts must be positive")

    @property
    def token(self) -> str:
        if self.iters is None:
            return f"{self.algorithm}@{self.preprocessor}"
        q, t, p = self.iters
        return f"{self.algorithm}@{self.preprocessor}({q}/{t}/{p})"


def _parse_token(text: str) -> DetectorToken:
    m = _TOKEN_RE.match(text.strip())
    if not m:
        raise ValueError(
            f"bad detector token {text.strip()!r}; expected forms like "
            "'jml@wiener-hopf' or 'lgsd@mrc(2/3/2)'")
    algo, pre, q, t, p = m.groups()
    iters = None if q is None else (int(q), int(t), int(p))
    return DetectorToken(algo, pre, iters)


@dataclass(frozen=True)
class RunConfig:
    """A fully validated simulation description (plain values only)."""

    satellite_angles_deg: tuple
    lnb_boresight_deg: tuple
    lnb_offset_wavelengths: tuple
    constellation: str
    detectors: tuple
    snr_start_db: float
    snr_stop_db: float
    snr_step_db: float
    dish_diameter_m: float = 0.35
    carrier_frequency_hz: float = 11.7e9
    noise_correlation: tuple | None = None
    list_len: int | None = None
    group_sizes: tuple | None = None
    min_symbols: int = 10_000
    max_bit_errors: int = 100
    max_symbols: int = 10_000_000
    seed: int | None = None
    results_csv: str = "results.csv"
    summary_txt: str = "summary.txt"
    plot_script: str = "plot_results.py"

    @property
    def snr_points(self) -> tuple:
        n = int(math.floor(
            (self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9))
        return tuple(self.snr_start_db + i * self.snr_step_db
                     for i in range(n + 1))

    def to_scenario(self) -> Scenario:
        k = (None if self.noise_correlation is None
             else np.array(self.noise_correlation, dtype=np.float64))
        return Scenario(
            satellite_angles=np.array(self.satellite_angles_deg),
            lnb_boresights=np.array(self.lnb_boresight_deg),
            lnb_offsets=np.array(self.lnb_offset_wavelengths),
            dish_diameter=self.dish_diameter_m,
            carrier_frequency=self.carrier_frequency_hz,
            noise_correlation=k)


# schema: section -> key -> reader name; every key not listed here is
# rejected.  Readers are small parsers collecting per-key errors.
_SCHEMA = {
    "scenario": {
        "satellite_angles_deg": "floats",
        "lnb_boresight_deg": "floats",
        "lnb_offset_wavelengths": "floats",
        "dish_diameter_m": "float",
        "carrier_frequency_hz": "float",
        "noise_correlation": "matrix",
    },
    "simulation": {
        "constellation": "str",
        "detectors": "tokens",
        "list_len": "int",
        "group_sizes": "ints",
        "snr_start_db": "float",
        "snr_stop_db": "float",
        "snr_step_db": "float",
        "min_symbols": "int",
        "max_bit_errors": "int",
        "max_symbols": "int",
        "seed": "int",
    },
    "output": {
        "results_csv": "str",
        "summary_txt": "str",
        "plot_script": "str",
    },
}

_REQUIRED = {
    "scenario": ("satellite_angles_deg", "lnb_boresight_deg",
                 "lnb_offset_wavelengths"),
    "simulation": ("constellation", "detectors", "snr_start_db",
                   "snr_stop_db", "snr_step_db"),
    "output": (),
}

# INI key -> RunConfig field (identity except where sections disambiguate)
_FIELD = {key: key for sec in _SCHEMA.values() for key in sec}


def _read_floats(text: str) -> tuple:
    vals = tuple(float(v) for v in text.replace(",", " ").split())
    if not vals:
        raise ValueError("expected at least one number")
    return vals


def _read_ints(text: str) -> tuple:
    vals = tuple(int(v) for v in text.replace(",", " ").split())
    if not vals:
        raise ValueError("expected at least one integer")
    return vals


def _read_matrix(text: str) -> tuple:
    rows = [r for r in (row.strip() for row in text.split(";")) if r]
    if not rows:
        raise ValueError("expected semicolon-separated matrix rows")
    parsed = tuple(_read_floats(r) for r in rows)
    if len({len(r) for r in parsed}) != 1:
        raise ValueError("matrix rows must have equal length")
    return parsed


def _read_tokens(text: str) -> tuple:
    parts = [p for p in (t.strip() for t in text.split(",")) if p]
    if not parts:
        raise ValueError("expected at least one detector token")
    return tuple(_parse_token(p) for p in parts)


_READERS = {
    "floats": _read_floats,
    "ints": _read_ints,
    "matrix": _read_matrix,
    "tokens": _read_tokens,
    "float": float,
    "int": int,
    "str": lambda s: s.strip(),
}


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate configuration text.

    Raises :class:`ConfigError` carrying the complete list of problems:
    syntax errors with line numbers, unknown sections/keys, per-key parse
    failures, and semantic violations named after the broken invariant.
    """
    parser = configparser.ConfigParser(
        interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError([f"line {exc.lineno}: key/value before any "
                           "section header"]) from None
    except configparser.ParsingError as exc:
        errors = []
        for lineno, line in getattr(exc, "errors", []):
            errors.append(f"line {lineno}: syntax error: {line}")
        if not errors:
            lineno = getattr(exc, "lineno", None)
            where = f"line {lineno}: " if lineno else ""
            errors.append(f"{where}{exc.message.splitlines()[0]}")
        raise ConfigError(errors) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError([f"line {exc.lineno}: duplicate key "
                           f"{exc.option!r} in [{exc.section}]"]) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError([f"line {exc.lineno}: duplicate section "
                           f"[{exc.section}]"]) from None

    errors = []
    values = {}

    for section in parser.sections():
        if section not in _SCHEMA:
            errors.append(f"unknown section [{section}]")
            continue
        for key, raw in parser.items(section):
            kind = _SCHEMA[section].get(key)
            if kind is None:
                errors.append(f"unknown key {key!r} in [{section}]")
                continue
            try:
                values[_FIELD[key]] = _READERS[kind](raw)
            except ValueError as exc:
                errors.append(f"[{section}] {key}: {exc}")

    for section, keys in _REQUIRED.items():
        if section not in parser and keys:
            errors.append(f"missing section [{section}]")
            continue
        for key in keys:
            if section in parser and key not in parser[section]:
                errors.append(f"missing key {key!r} in [{section}]")

    errors.extend(_semantic_errors(values))
    if errors:
        raise ConfigError(errors)
    return RunConfig(**values)


def _default(field_name: str):
    return RunConfig.__dataclass_fields__[field_name].default


def _semantic_errors(values: dict) -> list:
    """Cross-field checks on whatever parsed cleanly (partial dicts OK)."""
    errors = []

    def get(key):
        return values.get(key, _default(key))

    scenario = None
    if all(k in values for k in _REQUIRED["scenario"]):
        try:
            k = get("noise_correlation")
            scenario = Scenario(
                satellite_angles=np.array(values["satellite_angles_deg"]),
                lnb_boresights=np.array(values["lnb_boresight_deg"]),
                lnb_offsets=np.array(values["lnb_offset_wavelengths"]),
                dish_diameter=get("dish_diameter_m"),
                carrier_frequency=get("carrier_frequency_hz"),
                noise_correlation=(None if k is None
                                   else np.array(k, dtype=np.float64)))
        except ValueError as exc:
            errors.append(f"[scenario] {exc}")

    if "constellation" in values:
        try:
            make_constellation(values["constellation"])
        except ValueError as exc:
            errors.append(f"[simulation] constellation: {exc}")

    if values.get("snr_step_db", 1.0) <= 0:
        errors.append("[simulation] snr_step_db: step must be positive")
    if values.get("snr_stop_db", 0.0) < values.get("snr_start_db", 0.0):
        errors.append("[simulation] snr sweep: stop must be >= start")
    if get("min_symbols") < 1_000:
        errors.append("[simulation] min_symbols: must be at least 1000")
    if get("max_symbols") < get("min_symbols"):
        errors.append("[simulation] max_symbols: must be >= min_symbols")
    if get("max_bit_errors") < 1:
        errors.append("[simulation] max_bit_errors: must be positive")
    seed = values.get("seed")
    if seed is not None and not 0 <= seed < 2 ** 63:
        errors.append("[simulation] seed: must be a non-negative integer")
    list_len = values.get("list_len")
    if list_len is not None and list_len < 1:
        errors.append("[simulation] list_len: must be positive")

    n = scenario.num_satellites if scenario is not None else None
    group_sizes = values.get("group_sizes")
    if group_sizes is not None:
        if any(g < 1 for g in group_sizes):
            errors.append("[simulation] group_sizes: sizes must be positive")
        elif n is not None and sum(group_sizes) != n:
            errors.append(
                f"[simulation] group_sizes: group sizes must sum to N "
                f"(got {'+'.join(map(str, group_sizes))}="
                f"{sum(group_sizes)}, N={n})")

    detectors = values.get("detectors", ())
    if n is not None:
        for tok in detectors:
            if tok.algorithm != "lgsd":
                continue
            try:
                LgsdConfig(
                    list_len=list_len if list_len is not None else 4 * n,
                    overall_iters=tok.iters[0], ble_iters=tok.iters[1],
                    glo_iters=tok.iters[2],
                    group_sizes=(group_sizes if group_sizes is not None
                                 else (n,)))
            except ValueError as exc:
                errors.append(f"[simulation] detectors: {tok.token}: {exc}")

    tokens = [t.token for t in detectors]
    if len(set(tokens)) != len(tokens):
        errors.append(f"[simulation] detectors: duplicate entries {tokens}")
    return errors


def _lgsd_config(cfg: RunConfig, tok: DetectorToken, n: int) -> LgsdConfig:
    q, t, p = tok.iters
    return LgsdConfig(
        list_len=cfg.list_len if cfg.list_len is not None else 4 * n,
        overall_iters=q, ble_iters=t, glo_iters=p,
        group_sizes=(cfg.group_sizes if cfg.group_sizes is not None
                     else (n,)))


def serialize_config(cfg: RunConfig) -> str:
    """Render a RunConfig back to configuration text (parse round-trips)."""
    out = []

    def kv(key, value):
        out.append(f"{key} = {value}")

    out.append("[scenario]")
    kv("satellite_angles_deg", ", ".join(repr(v) for v in
                                         cfg.satellite_angles_deg))
    kv("lnb_boresight_deg", ", ".join(repr(v) for v in cfg.lnb_boresight_deg))
    kv("lnb_offset_wavelengths",
       ", ".join(repr(v) for v in cfg.lnb_offset_wavelengths))
    kv("dish_diameter_m", repr(cfg.dish_diameter_m))
    kv("carrier_frequency_hz", repr(cfg.carrier_frequency_hz))
    if cfg.noise_correlation is not None:
        kv("noise_correlation",
           "; ".join(" ".join(repr(v) for v in row)
                     for row in cfg.noise_correlation))
    out.append("")
    out.append("[simulation]")
    kv("constellation", cfg.constellation)
    kv("detectors", ", ".join(t.token for t in cfg.detectors))
    if cfg.list_len is not None:
        kv("list_len", cfg.list_len)
    if cfg.group_sizes is not None:
        kv("group_sizes", ", ".join(str(g) for g in cfg.group_sizes))
    kv("snr_start_db", repr(cfg.snr_start_db))
    kv("snr_stop_db", repr(cfg.snr_stop_db))
    kv("snr_step_db", repr(cfg.snr_step_db))
    kv("min_symbols", cfg.min_symbols)
    kv("max_bit_errors", cfg.max_bit_errors)
    kv("max_symbols", cfg.max_symbols)
    if cfg.seed is not None:
        kv("seed", cfg.seed)
    out.append("")
    out.append("[output]")
    kv("results_csv", cfg.results_csv)
    kv("summary_txt", cfg.summary_txt)
    kv("plot_script", cfg.plot_script)
    out.append("")
    return "\n".join(out)


def build_plan(cfg: RunConfig, seed: int | None = None) -> ExperimentPlan:
    """Turn a RunConfig into an ExperimentPlan.

    ``seed`` overrides the config seed; with neither present this raises,
    because nothing here may ever fall back to wall-clock seeding.
    """
    if seed is None:
        seed = cfg.seed
    if seed is None:
        raise ConfigError(
            ["no seed: set 'seed' in [simulation] or pass --seed"])
    scenario = cfg.to_scenario()
    n = scenario.num_satellites
    specs = []
    for tok in cfg.detectors:
        if tok.algorithm == "jml":
            specs.append(DetectorSpec("jml", tok.preprocessor))
        else:
            specs.append(DetectorSpec("lgsd", tok.preprocessor,
                                      _lgsd_config(cfg, tok, n)))
    return ExperimentPlan(
        scenario=scenario, constellation=cfg.constellation,
        detectors=tuple(specs), snr_points=cfg.snr_points,
        min_symbols=cfg.min_symbols, max_bit_errors=cfg.max_bit_errors,
        max_symbols=cfg.max_symbols, master_seed=int(seed))
