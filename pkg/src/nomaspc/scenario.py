"""Scenario files: a sectioned key-value (INI) description of one study.

Every key has a default taken from the reference parameter set (80-bit
packets in 100 channel uses, path-loss exponent 2.5 at 5 m, power split
0.7/0.3, reliability targets 1e-7 and 1e-6), so an empty file reproduces
the baseline setup.  SNR is given in dB and converted to linear internally.

An optional [variants] section defines labelled overrides of the [system]
section, producing one curve family per variant in sweep outputs.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .bler import DispersionMode, PacketSpec, PowerSplit
from .blocklength import ReliabilityTargets
from .errors import ScenarioError
from .montecarlo import SimPlan
from .scheme_params import Diversity, SelectionMethod, SystemConfig

__all__ = ["SweepAxis", "Scenario", "load_scenario", "materialize_point"]

SWEEP_PARAMETERS = ("gamma0_db", "alpha_l", "m", "blocklength")
TIERS = ("closed", "quadrature", "riemann", "asymptotic", "mc")

_SYSTEM_INT_KEYS = ("k_s", "k_h", "k_l", "users_h", "users_l", "m_h", "m_l")
_SYSTEM_FLOAT_KEYS = ("d_sh", "d_sl", "theta")


@dataclass(frozen=True)
class SweepAxis:
    parameter: str
    grid: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ScenarioError(
                f"sweep.parameter: {self.parameter!r} is not one of {SWEEP_PARAMETERS}"
            )
        if len(self.grid) == 0:
            raise ScenarioError("sweep.grid: sweep grid must be non-empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ScenarioError("sweep.grid: grid must be strictly increasing")


@dataclass(frozen=True)
class Scenario:
    """Fully-resolved study description."""

    system: SystemConfig
    pkt_h: PacketSpec
    pkt_l: PacketSpec
    split: PowerSplit
    targets: ReliabilityTargets
    methods: tuple[SelectionMethod, ...]
    diversities: tuple[Diversity, ...]
    sweep: SweepAxis
    plan: SimPlan
    tiers: tuple[str, ...]
    variants: tuple[tuple[str, dict], ...] = ()
    plot_user: str = "both"  # which user the emitted plot script shows
    name: str = "scenario"

    def variant_labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.variants) or ("base",)

    def system_for(self, label: str) -> SystemConfig:
        for name, overrides in self.variants:
            if name == label:
                return replace(self.system, **overrides)
        if label == "base":
            return self.system
        raise ScenarioError(f"unknown variant {label!r}")


def _parse_grid(text: str, *, section: str = "sweep", key: str = "grid") -> tuple[float, ...]:
    text = text.strip()
    where = f"{section}.{key}"
    try:
        if ":" in text:
            parts = [float(tok) for tok in text.split(":")]
            if len(parts) != 3:
                raise ValueError("range form is start:stop:step")
            start, stop, step = parts
            if step <= 0:
                raise ValueError("step must be positive")
            grid, val, i = [], start, 0
            while val <= stop + 1e-12 * max(1.0, abs(stop)):
                grid.append(round(val, 12))
                i += 1
                val = start + i * step
            return tuple(grid)
        return tuple(float(tok) for tok in text.replace(",", " ").split())
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _get(parser, section, key, convert, default, *, check=None):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        value = convert(raw)
    except ValueError as exc:
        raise ScenarioError(f"{section}.{key}: cannot parse {raw!r}: {exc}") from exc
    if check is not None and not check(value):
        raise ScenarioError(f"{section}.{key}: invalid value {raw!r}")
    return value


def _parse_enum_list(raw: str, enum_cls, section: str, key: str):
    out = []
    for tok in raw.replace(",", " ").split():
        try:
            out.append(enum_cls(tok.strip().lower()))
        except ValueError as exc:
            valid = ", ".join(e.value for e in enum_cls)
            raise ScenarioError(
                f"{section}.{key}: unknown value {tok!r} (expected one of: {valid})"
            ) from exc
    if not out:
        raise ScenarioError(f"{section}.{key}: list must be non-empty")
    return tuple(out)


def _parse_variants(parser) -> tuple[tuple[str, dict], ...]:
    if not parser.has_section("variants"):
        return ()
    variants = []
    allowed = set(_SYSTEM_INT_KEYS) | set(_SYSTEM_FLOAT_KEYS)
    for label, raw in parser.items("variants"):
        overrides: dict = {}
        for assignment in raw.replace(",", " ").split():
            if "=" not in assignment:
                raise ScenarioError(
                    f"variants.{label}: expected key=value, got {assignment!r}"
                )
            k, v = assignment.split("=", 1)
            k = k.strip().lower()
            if k not in allowed:
                raise ScenarioError(
                    f"variants.{label}: {k!r} is not an overridable system key"
                )
            try:
                overrides[k] = int(v) if k in _SYSTEM_INT_KEYS else float(v)
            except ValueError as exc:
                raise ScenarioError(f"variants.{label}: bad value {v!r} for {k}") from exc
        variants.append((label, overrides))
    return tuple(variants)


def _packaged_scenario(name: str):
    candidate = name if name.endswith(".ini") else f"{name}.ini"
    ref = resources.files("nomaspc").joinpath("scenarios", candidate)
    return ref if ref.is_file() else None


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a file path or a shipped scenario name
    (e.g. 'fig2')."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    packaged = _packaged_scenario(str(source))
    if packaged is not None:
        text = packaged.read_text(encoding="utf-8")
        name = Path(str(source)).stem
    else:
        path = Path(source)
        if not path.is_file():
            raise ScenarioError(f"scenario {source!r}: no such file or shipped scenario")
        text = path.read_text(encoding="utf-8")
        name = path.stem
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"scenario {source!r}: {exc}") from exc

    for section in parser.sections():
        if section not in (
            "system", "packet", "power", "targets", "selection",
            "sweep", "montecarlo", "tiers", "variants", "plot",
        ):
            raise ScenarioError(f"unknown section [{section}]")

    sys_kwargs = {}
    for key in _SYSTEM_INT_KEYS:
        sys_kwargs[key] = _get(parser, "system", key, int, None)
    for key in _SYSTEM_FLOAT_KEYS:
        sys_kwargs[key] = _get(parser, "system", key, float, None)
    sys_kwargs = {k: v for k, v in sys_kwargs.items() if v is not None}
    gamma0_db = _get(parser, "system", "gamma0_db", float, 20.0)
    try:
        system = SystemConfig(gamma0=10.0 ** (gamma0_db / 10.0), **sys_kwargs)
    except ValueError as exc:
        raise ScenarioError(f"system: {exc}") from exc

    try:
        pkt_h = PacketSpec(
            _get(parser, "packet", "n_bits_h", int, 80),
            _get(parser, "packet", "blocklength_h", float, 100.0),
        )
        pkt_l = PacketSpec(
            _get(parser, "packet", "n_bits_l", int, 80),
            _get(parser, "packet", "blocklength_l", float, 100.0),
        )
    except ValueError as exc:
        raise ScenarioError(f"packet: {exc}") from exc

    try:
        split = PowerSplit.from_alpha_l(_get(parser, "power", "alpha_l", float, 0.3))
    except ValueError as exc:
        raise ScenarioError(f"power.alpha_l: {exc}") from exc

    try:
        targets = ReliabilityTargets(
            _get(parser, "targets", "eps_h", float, 1e-7),
            _get(parser, "targets", "eps_l", float, 1e-6),
        )
    except ValueError as exc:
        raise ScenarioError(f"targets: {exc}") from exc

    methods = (
        _parse_enum_list(parser.get("selection", "methods"), SelectionMethod,
                         "selection", "methods")
        if parser.has_option("selection", "methods")
        else (SelectionMethod.HCS, SelectionMethod.LCS)
    )
    diversities = (
        _parse_enum_list(parser.get("selection", "diversities"), Diversity,
                         "selection", "diversities")
        if parser.has_option("selection", "diversities")
        else (Diversity.TAS_SC, Diversity.TAS_MRC)
    )

    parameter = _get(parser, "sweep", "parameter", str, "gamma0_db").strip().lower()
    grid = (
        _parse_grid(parser.get("sweep", "grid"))
        if parser.has_option("sweep", "grid")
        else _parse_grid("0:40:5")
    )
    sweep = SweepAxis(parameter, grid)
    if parameter == "m" and any(g != int(g) or g < 1 for g in grid):
        raise ScenarioError("sweep.grid: fading-shape grid must be integers >= 1")

    dispersion_raw = _get(parser, "montecarlo", "dispersion", str, "paper").strip().lower()
    try:
        dispersion = DispersionMode(dispersion_raw)
    except ValueError as exc:
        raise ScenarioError(
            f"montecarlo.dispersion: {dispersion_raw!r} (expected paper or standard)"
        ) from exc
    trials = _get(parser, "montecarlo", "trials", int, 10**6)
    try:
        plan = SimPlan(
            trials=trials,
            seed=_get(parser, "montecarlo", "seed", int, 1),
            batch=min(_get(parser, "montecarlo", "batch", int, 10**4), trials),
            dispersion=dispersion,
        )
    except ValueError as exc:
        raise ScenarioError(f"montecarlo: {exc}") from exc

    tiers = tuple(
        _get(parser, "tiers", "tiers", str, "closed").replace(",", " ").lower().split()
    )
    for tier in tiers:
        if tier not in TIERS:
            raise ScenarioError(f"tiers.tiers: unknown tier {tier!r} (expected {TIERS})")

    plot_user = _get(parser, "plot", "user", str, "both").strip().lower()
    if plot_user not in ("h", "l", "both"):
        raise ScenarioError("plot.user: must be h, l, or both")

    return Scenario(
        system=system,
        pkt_h=pkt_h,
        pkt_l=pkt_l,
        split=split,
        targets=targets,
        methods=methods,
        diversities=diversities,
        sweep=sweep,
        plan=plan,
        tiers=tiers,
        variants=_parse_variants(parser),
        plot_user=plot_user,
        name=name,
    )


def materialize_point(
    scenario: Scenario, variant: str, value: float
) -> tuple[SystemConfig, PowerSplit, PacketSpec, PacketSpec]:
    """Apply one variant and one sweep-axis value, returning the concrete
    (system, split, pkt_h, pkt_l) tuple for that grid point."""
    system = scenario.system_for(variant)
    split, pkt_h, pkt_l = scenario.split, scenario.pkt_h, scenario.pkt_l
    param = scenario.sweep.parameter
    if param == "gamma0_db":
        system = system.with_gamma0(10.0 ** (value / 10.0))
    elif param == "alpha_l":
        split = PowerSplit.from_alpha_l(value)
    elif param == "m":
        system = replace(system, m_h=int(value), m_l=int(value))
    elif param == "blocklength":
        pkt_h = PacketSpec(pkt_h.n_bits, value)
        pkt_l = PacketSpec(pkt_l.n_bits, value)
    return system, split, pkt_h, pkt_l
