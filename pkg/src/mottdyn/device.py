"""Device parameters and derived model coefficients for a VO2 Mott memristor.

The electro-thermal compact model is parameterized by eight physical
quantities (material properties plus conduction-channel geometry).  Five
derived coefficients fully determine the model equations:

    A = pi * r_ch**2 / (rho_ins * L_ch)      conductance scale      (S)
    B = rho_ins / rho_met - 1                resistivity contrast   (-)
    C = 2 * pi * L_ch * kappa * dT           thermal power scale    (W)
    D = pi * L_ch * r_ch**2 * c_p * dT       enthalpy scale         (J)
    E = 2 * dh_tr / (c_p * dT)               latent-heat ratio      (-)

B and E are dimensionless and independent of the channel geometry.  All
quantities are strict SI internally.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import pi

from .errors import InvalidParameterError

# Sanity band for channel geometry: 0.1 nm .. 10 um.
_GEOM_MIN = 1e-10
_GEOM_MAX = 1e-5


@dataclass(frozen=True)
class DeviceParams:
    """Material properties and channel geometry of one device.

    Attributes
    ----------
    c_p : float
        Volumetric heat capacity (J m^-3 K^-1).
    dh_tr : float
        Volumetric enthalpy change of the insulator-metal transition (J m^-3).
    kappa : float
        Thermal conductivity of the insulating phase (W m^-1 K^-1).
    rho_met : float
        Electrical resistivity of the metallic phase (ohm m).
    rho_ins : float
        Electrical resistivity of the insulating phase (ohm m).
    dT : float
        Temperature rise required for the transition (K).
    r_ch : float
        Radius of the conduction channel (m).
    L_ch : float
        Length of the conduction channel (m).
    T0 : float
        Ambient temperature (K); display and temperature profile only.
    Tc : float
        Transition temperature (K); display and temperature profile only.
    """

    c_p: float = 3.30e6
    dh_tr: float = 2.35e8
    kappa: float = 3.5
    rho_met: float = 3.00e-6
    rho_ins: float = 1.00e-2
    dT: float = 43.0
    r_ch: float = 36e-9
    L_ch: float = 50e-9
    T0: float = 297.0
    Tc: float = 340.0

    def __post_init__(self):
        for name in ("c_p", "dh_tr", "kappa", "rho_met", "rho_ins",
                     "dT", "r_ch", "L_ch", "T0", "Tc"):
            value = getattr(self, name)
            if not (value > 0.0):
                raise InvalidParameterError(
                    f"device parameter {name} must be strictly positive, "
                    f"got {value!r}")
        if not self.rho_ins > self.rho_met:
            raise InvalidParameterError(
                "rho_ins must exceed rho_met "
                f"(got rho_ins={self.rho_ins}, rho_met={self.rho_met})")
        for name in ("r_ch", "L_ch"):
            value = getattr(self, name)
            if not (_GEOM_MIN < value < _GEOM_MAX):
                raise InvalidParameterError(
                    f"{name}={value} m is outside the sanity band "
                    f"({_GEOM_MIN}, {_GEOM_MAX}) m")

    def with_size(self, r_ch: float, L_ch: float) -> "DeviceParams":
        """Same material stack with a different channel geometry."""
        return replace(self, r_ch=r_ch, L_ch=L_ch)


@dataclass(frozen=True)
class ModelCoefficients:
    """Derived constants of the compact model (see module docstring).

    B = 0 is tolerated only for the degenerate rho_ins == rho_met case used
    in tests; everything else must be strictly positive.
    """

    A: float
    B: float
    C: float
    D: float
    E: float

    def __post_init__(self):
        for name in ("A", "C", "D", "E"):
            if not (getattr(self, name) > 0.0):
                raise InvalidParameterError(
                    f"coefficient {name} must be strictly positive")
        if self.B < 0.0:
            raise InvalidParameterError("coefficient B must be >= 0")


def derive_coefficients(params: DeviceParams) -> ModelCoefficients:
    """Compute the five model coefficients from device parameters."""
    area = pi * params.r_ch ** 2
    return ModelCoefficients(
        A=area / (params.rho_ins * params.L_ch),
        B=params.rho_ins / params.rho_met - 1.0,
        C=2.0 * pi * params.L_ch * params.kappa * params.dT,
        D=area * params.L_ch * params.c_p * params.dT,
        E=2.0 * params.dh_tr / (params.c_p * params.dT),
    )


#: Built-in device sizes (r_ch, L_ch) in meters.  "default" is the 36 nm /
#: 50 nm device used throughout unless stated otherwise.
DEVICE_PRESETS: dict[str, tuple[float, float]] = {
    "default": (36e-9, 50e-9),
    "10x10": (10e-9, 10e-9),
    "36x50": (36e-9, 50e-9),
    "56x100": (56e-9, 100e-9),
}


def device_preset(name: str = "default") -> DeviceParams:
    """Device parameters for one of the built-in sizes."""
    try:
        r_ch, L_ch = DEVICE_PRESETS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown device preset {name!r}; "
            f"choose from {sorted(DEVICE_PRESETS)}") from None
    return DeviceParams(r_ch=r_ch, L_ch=L_ch)


def default_coefficients() -> ModelCoefficients:
    """Coefficients of the default 36 nm / 50 nm device."""
    return derive_coefficients(device_preset("default"))
