"""Plain-text run configuration: sections of key = value pairs.

Example::

    [device]
    r_ch = 10e-9
    L_ch = 10e-9

    [circuit]
    rs = 3.4e3
    cp = 1e-12
    vdc = 1.2

    [grids]
    i_points = 400

    [output]
    out_dir = results
    formats = csv,json

Unknown sections or keys are rejected; device keys are exactly the
material/geometry symbols (c_p, dh_tr, kappa, rho_met, rho_ins, dT,
r_ch, L_ch).  Values are strict SI.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .device import DeviceParams, device_preset
from .errors import ConfigError
from .pa_circuit import CircuitParams

_DEVICE_KEYS = ("c_p", "dh_tr", "kappa", "rho_met", "rho_ins", "dT",
                "r_ch", "L_ch")
_CIRCUIT_KEYS = ("rs", "cp", "vdc")
_GRID_KEYS = ("x_min", "x_max", "x_points", "i_min", "i_max", "i_points",
              "f_min", "f_max", "f_points")
_OUTPUT_KEYS = ("out_dir", "formats")
_FORMATS = ("csv", "json", "svg")


@dataclass(frozen=True)
class GridSpecs:
    """Default sampling grids for loci, sweeps and maps."""

    x_min: float = 1e-6
    x_max: float = 1.0 - 1e-6
    x_points: int = 4000
    i_min: float = 1e-6
    i_max: float = 2e-3
    i_points: int = 400
    f_min: float = 1e6
    f_max: float = 1e12
    f_points: int = 400


@dataclass(frozen=True)
class OutputSpec:
    out_dir: str = "."
    formats: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams = field(default_factory=DeviceParams)
    circuit: CircuitParams = field(
        default_factory=lambda: CircuitParams(rs=3.4e3, cp=1e-12, vdc=1.2))
    grids: GridSpecs = field(default_factory=GridSpecs)
    output: OutputSpec = field(default_factory=OutputSpec)


def _parse_sections(text: str) -> dict[str, dict[str, str]]:
    sections: dict[str, dict[str, str]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in ("device", "circuit", "grids", "output"):
                raise ConfigError(
                    f"line {lineno}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(
                f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigError(
                f"line {lineno}: key outside of any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in sections[current]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        sections[current][key] = value
    return sections


def _float(section: str, key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(
            f"[{section}] {key}: cannot parse {value!r} as a number"
        ) from None


def parse_config(path: str | None = None, *,
                 device: str = "default",
                 text: str | None = None,
                 overrides: dict | None = None) -> RunConfig:
    """Merge defaults, preset, file content and flag overrides.

    Precedence (lowest to highest): built-in defaults, ``device`` preset,
    file, ``overrides`` (flat dict keyed 'section.key').
    """
    dev = device_preset(device)
    circ_kwargs = {"rs": 3.4e3, "cp": 1e-12, "vdc": 1.2}
    grid_kwargs: dict = {}
    out_kwargs: dict = {}

    sections: dict[str, dict[str, str]] = {}
    if text is not None:
        sections = _parse_sections(text)
    elif path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                sections = _parse_sections(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc

    flat: dict[str, str] = {}
    for section, pairs in sections.items():
        for key, value in pairs.items():
            flat[f"{section}.{key}"] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            flat[key] = str(value)

    for dotted, value in flat.items():
        section, key = dotted.split(".", 1)
        if section == "device":
            if key not in _DEVICE_KEYS:
                raise ConfigError(f"[device] unknown key {key!r}; "
                                  f"expected one of {_DEVICE_KEYS}")
            dev = replace(dev, **{key: _float(section, key, value)})
        elif section == "circuit":
            if key not in _CIRCUIT_KEYS:
                raise ConfigError(f"[circuit] unknown key {key!r}")
            circ_kwargs[key] = _float(section, key, value)
        elif section == "grids":
            if key not in _GRID_KEYS:
                raise ConfigError(f"[grids] unknown key {key!r}")
            val = _float(section, key, value)
            grid_kwargs[key] = int(val) if key.endswith("points") else val
        elif section == "output":
            if key not in _OUTPUT_KEYS:
                raise ConfigError(f"[output] unknown key {key!r}")
            if key == "formats":
                formats = tuple(f.strip() for f in value.split(",")
                                if f.strip())
                bad = [f for f in formats if f not in _FORMATS]
                if bad:
                    raise ConfigError(f"[output] unknown formats {bad}")
                out_kwargs["formats"] = formats
            else:
                out_kwargs[key] = value
        else:
            raise ConfigError(f"unknown section {section!r}")

    # DeviceParams/CircuitParams validate physical invariants on build.
    dev = DeviceParams(**{f.name: getattr(dev, f.name)
                          for f in fields(DeviceParams)})
    return RunConfig(device=dev, circuit=CircuitParams(**circ_kwargs),
                     grids=GridSpecs(**grid_kwargs),
                     output=OutputSpec(**out_kwargs))
