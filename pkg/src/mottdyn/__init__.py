"""Physics-based VO2 Mott memristor model and nonlinear-dynamics toolkit.

The package covers, at desk scale:

* the electro-thermal compact model of the device (state kinetics under
  current or voltage drive, radial temperature profile),
* DC fixed-point loci, their critical currents, and the voltage-driven
  saddle-node bifurcation,
* small-signal linearization, virtual-element equivalent circuit,
  pole-zero local-activity classification, impedance frequency response
  and its complexity map, device-size scaling of the active band,
* local analysis of the relaxation-oscillator circuit (transfer poles,
  Jacobian, trace-determinant classes, nullclines, critical parameters,
  Hopf-theorem conditions),
* adaptive ODE integration with limit-cycle detection, phase portraits
  and numerical bifurcation diagrams.

See the ``mottdyn`` command-line tool for the file-emitting front end.
"""

from .device import (DEVICE_PRESETS, DeviceParams, ModelCoefficients,
                     default_coefficients, derive_coefficients,
                     device_preset)
from .errors import (ConfigError, DegenerateOperatingPointError,
                     InvalidParameterError, MottDynError, RenderError,
                     ResolutionError, SolverError, StateDomainError,
                     StiffnessError)
from .model import (enthalpy_derivative, kinetic_current, kinetic_voltage,
                    memristance, temperature_profile, thermal_power)
from .pa_circuit import (CircuitOperatingPoint, CircuitParams,
                         classify_trdet, cp_star_power_law,
                         critical_parameter, hopf_conditions, jacobian_at,
                         nullclines, pa_fixed_points, transfer_poles,
                         trdet_sweep)
from .small_signal import (LinearCoeffs, PoleZero, VirtualElements,
                           impedance, imz_peak_frequency, linearize,
                           max_active_frequency, pole_zero, rez_map,
                           scaling_study, virtual_elements)
from .steady_state import (DcLocus, FixedPoint1D, SaddleNodeResult,
                           critical_currents, dc_current_at_state,
                           dc_locus, dc_voltage_at_state,
                           fixed_point_at_state,
                           fixed_points_const_voltage, saddle_node_voltage,
                           state_at_current)
from .dynamics import (BifurcationDiagram, FixedPointVerdict, LimitCycle,
                       Trajectory, bifurcation_sweep, detect_limit_cycle,
                       integrate, phase_portrait, portrait_grid)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
