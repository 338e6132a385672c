"""Experiment configuration: dataclasses plus an INI reader and writer.

Schema (every key except ``[experiment] L`` is optional)::

    [experiment]
    L = 256                 ; filter length (required)
    iterations = 10000
    runs = 100
    base_seed = 0
    msd_window = 1000       ; default: iterations // 10

    [input]
    kind = ar1              ; white | ar1
    theta = 0.9

    [noise]
    sigma_s_sq = 0.01
    p = 0.001
    sigma_I_sq = 1000

    [system]                ; target system
    active = 16             ; default: L // 16
    seed = 7                ; omit to draw a fresh system in every run
    clustered = false
    path = system.txt       ; load from a file instead (relative to the config)

    [switch]                ; optional: replace the system mid-run
    iteration = 5000        ; required inside this section
    active = 64             ; default: L // 4
    clustered = true
    seed = 8
    path = other.txt

    [filter.<label>]        ; one section per filter; label names CSV columns
    variant = ipmcc         ; lms | mcc | pmcc | ipmcc (default: the label)
    mu = 0.00097
    sigma = 1.25
    alpha = 0
    epsilon_p = 0.01

Without any ``[filter.*]`` section the experiment compares ``ipmcc`` and
``mcc`` at the default parameters.  Unknown sections and keys are rejected.
"""

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..exceptions import ConfigError
from ..filters import FilterParams, Variant
from ..signals import InputKind, InputModel, NoiseModel, gen_sparse_system, load_system

DEFAULT_MU = 0.00097


@dataclass(frozen=True)
class FilterSpec:
    label: str
    variant: Variant
    params: FilterParams

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not re.fullmatch(r"[A-Za-z0-9_\-]+", self.label):
            raise ConfigError(f"filter label {self.label!r} must be alphanumeric/_/-")


@dataclass(frozen=True)
class SystemSource:
    """Where a target system comes from.

    ``path`` wins over generation.  With ``seed=None`` a new system is drawn
    from each run's own stream; otherwise one fixed system is shared by all
    runs.  ``active=None`` defers the active-tap count to the caller.
    """

    active: int = None
    seed: int = None
    clustered: bool = False
    path: str = None

    def realize(self, n_taps, rng, default_active):
        if self.path is not None:
            system = load_system(self.path)
            if system.n_taps != n_taps:
                raise ConfigError(
                    f"{self.path}: system has {system.n_taps} taps, experiment uses L={n_taps}"
                )
            return system
        active = self.active if self.active is not None else default_active
        seed = self.seed if self.seed is not None else rng
        return gen_sparse_system(n_taps, active, seed, clustered=self.clustered)

    @property
    def is_fixed(self):
        return self.path is not None or self.seed is not None


@dataclass(frozen=True)
class Switch:
    iteration: int
    system: SystemSource = field(default_factory=lambda: SystemSource(clustered=True))


def _default_filters():
    return (
        FilterSpec("ipmcc", Variant.IPMCC, FilterParams(DEFAULT_MU)),
        FilterSpec("mcc", Variant.MCC, FilterParams(DEFAULT_MU)),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    n_taps: int
    filters: tuple = field(default_factory=_default_filters)
    input: InputModel = field(default_factory=InputModel)
    noise: NoiseModel = field(default_factory=NoiseModel)
    system: SystemSource = field(default_factory=SystemSource)
    iterations: int = 10_000
    runs: int = 100
    base_seed: int = 0
    switch: Switch = None
    msd_window: int = None

    def __post_init__(self):
        object.__setattr__(self, "filters", tuple(self.filters))
        if self.msd_window is None:
            object.__setattr__(self, "msd_window", max(1, self.iterations // 10))
        if self.n_taps < 1:
            raise ConfigError("L must be a positive integer")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if not 1 <= self.msd_window < self.iterations:
            raise ConfigError(
                f"msd_window must satisfy 1 <= msd_window < iterations "
                f"(got {self.msd_window} and {self.iterations})"
            )
        if not self.filters:
            raise ConfigError("at least one filter is required")
        labels = [f.label for f in self.filters]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate filter labels in {labels}")
        if self.switch is not None and not 0 < self.switch.iteration < self.iterations:
            raise ConfigError(
                f"switch iteration must lie strictly inside (0, {self.iterations})"
            )

    @property
    def default_active(self):
        return max(1, self.n_taps // 16)

    @property
    def default_switch_active(self):
        return max(1, self.n_taps // 4)


# --------------------------------------------------------------------------
# INI reading

_SCHEMA = {
    "experiment": {
        "l": int,
        "iterations": int,
        "runs": int,
        "base_seed": int,
        "msd_window": int,
    },
    "input": {"kind": str, "theta": float},
    "noise": {"sigma_s_sq": float, "p": float, "sigma_i_sq": float},
    "system": {"active": int, "seed": int, "clustered": bool, "path": str},
    "switch": {"iteration": int, "active": int, "seed": int, "clustered": bool, "path": str},
    "filter": {"variant": str, "mu": float, "sigma": float, "alpha": float, "epsilon_p": float},
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _key_lines(text):
    """Map ``(section, key)`` to 1-based line numbers for error messages."""
    where = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            where[(section, None)] = lineno
            continue
        m = re.match(r"([^=:;#\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            where[(section, m.group(1).strip().lower())] = lineno
    return where


class _Reader:
    def __init__(self, text, source):
        self.source = source
        self.lines = _key_lines(text)
        self.parser = configparser.ConfigParser(
            interpolation=None,
            inline_comment_prefixes=(";", "#"),
            default_section="\x00unused",
        )
        try:
            self.parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}".replace("\n", " ")) from None

    def where(self, section, key=None):
        line = self.lines.get((section, key)) or self.lines.get((section, None))
        return f"{self.source}:{line}" if line else self.source

    def fail(self, section, key, message):
        target = f"[{section}] {key}" if key else f"[{section}]"
        raise ConfigError(f"{self.where(section, key)}: {target}: {message}")

    def section(self, name, kind):
        """Validated ``{key: value}`` for one section."""
        schema = _SCHEMA[kind]
        out = {}
        for key, raw in self.parser.items(name):
            if key not in schema:
                self.fail(name, key, f"unknown key (allowed: {', '.join(sorted(schema))})")
            out[key] = self.convert(name, key, raw, schema[key])
        return out

    def convert(self, section, key, raw, typ):
        raw = raw.strip()
        if typ is str:
            if not raw:
                self.fail(section, key, "empty value")
            return raw
        if typ is bool:
            if raw.lower() in _TRUE:
                return True
            if raw.lower() in _FALSE:
                return False
            self.fail(section, key, f"expected a boolean, got {raw!r}")
        try:
            return typ(raw)
        except ValueError:
            name = "an integer" if typ is int else "a number"
            self.fail(section, key, f"expected {name}, got {raw!r}")


def _system_source(values, base_dir, clustered_default):
    path = values.get("path")
    if path is not None and base_dir is not None and not Path(path).is_absolute():
        path = str((base_dir / path).resolve())
    return SystemSource(
        active=values.get("active"),
        seed=values.get("seed"),
        clustered=values.get("clustered", clustered_default),
        path=path,
    )


def loads_config(text, source="<config>", base_dir=None):
    """Parse configuration text; see the module docstring for the schema."""
    rd = _Reader(text, source)
    sections = rd.parser.sections()
    for name in sections:
        kind = "filter" if name.startswith("filter.") else name
        if kind not in _SCHEMA:
            rd.fail(name, None, "unknown section")
    if "experiment" not in sections:
        raise ConfigError(f"{source}: missing section [experiment] (required key 'L')")

    exp = rd.section("experiment", "experiment")
    if "l" not in exp:
        rd.fail("experiment", None, "missing required key 'L'")

    def build(section, ctor, **kwargs):
        try:
            return ctor(**kwargs)
        except (ValueError, TypeError) as exc:
            rd.fail(section, None, str(exc))

    inp = rd.section("input", "input") if "input" in sections else {}
    input_model = build(
        "input",
        InputModel,
        kind=inp.get("kind", InputKind.AR1.value).lower(),
        theta=inp.get("theta", 0.9),
    )
    nz = rd.section("noise", "noise") if "noise" in sections else {}
    noise = build(
        "noise",
        NoiseModel,
        sigma_s_sq=nz.get("sigma_s_sq", 0.01),
        p=nz.get("p", 0.001),
        sigma_I_sq=nz.get("sigma_i_sq", 1000.0),
    )
    sysvals = rd.section("system", "system") if "system" in sections else {}
    system = _system_source(sysvals, base_dir, False)

    switch = None
    if "switch" in sections:
        sw = rd.section("switch", "switch")
        if "iteration" not in sw:
            rd.fail("switch", None, "missing required key 'iteration'")
        switch = Switch(sw["iteration"], _system_source(sw, base_dir, True))

    filters = []
    for name in sections:
        if not name.startswith("filter."):
            continue
        label = name[len("filter."):]
        fv = rd.section(name, "filter")
        variant = fv.get("variant", label).lower()
        if variant not in {v.value for v in Variant}:
            rd.fail(name, "variant", f"unknown filter variant {variant!r}")
        params = build(
            name,
            FilterParams,
            mu=fv.get("mu", DEFAULT_MU),
            sigma=fv.get("sigma", 1.25),
            alpha=fv.get("alpha", 0.0),
            epsilon_p=fv.get("epsilon_p", 0.01),
        )
        filters.append(build(name, FilterSpec, label=label, variant=variant, params=params))

    kwargs = dict(
        n_taps=exp["l"],
        input=input_model,
        noise=noise,
        system=system,
        iterations=exp.get("iterations", 10_000),
        runs=exp.get("runs", 100),
        base_seed=exp.get("base_seed", 0),
        switch=switch,
        msd_window=exp.get("msd_window"),
    )
    if filters:
        kwargs["filters"] = tuple(filters)
    return build("experiment", ExperimentConfig, **kwargs)


def parse_config(path):
    """Read an experiment configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return loads_config(text, source=str(path), base_dir=path.parent)


def reference_config(name):
    """Path of a configuration shipped with the package (e.g. ``"experiment1"``)."""
    path = resources.files("ipmcc") / "configs" / f"{name}.ini"
    if not path.is_file():
        raise ConfigError(f"no shipped config named {name!r}")
    return Path(str(path))


# --------------------------------------------------------------------------
# INI writing


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _source_lines(src):
    lines = []
    for key in ("active", "seed", "path"):
        value = getattr(src, key)
        if value is not None:
            lines.append(f"{key} = {_fmt(value)}")
    lines.append(f"clustered = {_fmt(src.clustered)}")
    return lines


def dumps_config(config):
    """Serialize ``config`` so that ``loads_config(dumps_config(c)) == c``."""
    out = [
        "[experiment]",
        f"L = {config.n_taps}",
        f"iterations = {config.iterations}",
        f"runs = {config.runs}",
        f"base_seed = {config.base_seed}",
        f"msd_window = {config.msd_window}",
        "",
        "[input]",
        f"kind = {config.input.kind.value}",
        f"theta = {_fmt(float(config.input.theta))}",
        "",
        "[noise]",
        f"sigma_s_sq = {_fmt(float(config.noise.sigma_s_sq))}",
        f"p = {_fmt(float(config.noise.p))}",
        f"sigma_I_sq = {_fmt(float(config.noise.sigma_I_sq))}",
        "",
        "[system]",
        *_source_lines(config.system),
        "",
    ]
    if config.switch is not None:
        out += [
            "[switch]",
            f"iteration = {config.switch.iteration}",
            *_source_lines(config.switch.system),
            "",
        ]
    for spec in config.filters:
        p = spec.params
        out += [
            f"[filter.{spec.label}]",
            f"variant = {spec.variant.value}",
            f"mu = {_fmt(float(p.mu))}",
            f"sigma = {_fmt(float(p.sigma))}",
            f"alpha = {_fmt(float(p.alpha))}",
            f"epsilon_p = {_fmt(float(p.epsilon_p))}",
            "",
        ]
    return "\n".join(out)


def emit_config(config, path):
    Path(path).write_text(dumps_config(config))
