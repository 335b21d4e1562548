"""Exception hierarchy with stable machine-readable error names."""

from __future__ import annotations


class RTQError(ValueError):
    """Base class for domain errors raised by the library.

    Every subclass carries a ``code`` attribute: a stable, machine-readable
    identifier used by the command-line front end when reporting failures.
    """

    code = "rtq_error"


class NonPhysicalStateError(RTQError):
    code = "non_physical_state"


class DimensionMismatchError(RTQError):
    code = "dimension_mismatch"


class IdentityViolationError(RTQError):
    code = "identity_violation"


class NoEnergyTransferError(RTQError):
    code = "no_energy_transfer"


class FirstOrderInapplicableError(RTQError):
    code = "first_order_inapplicable"


class PerturbativeHierarchyError(RTQError):
    code = "perturbative_hierarchy_violated"


class DenominatorOscillationZeroError(RTQError):
    code = "denominator_oscillation_zero"


class ZeroTemperatureError(RTQError):
    code = "zero_temperature_unsupported"


class NonResonantError(RTQError):
    code = "non_resonant_pair"


class OracleBudgetError(RTQError):
    code = "oracle_budget_exceeded"


class OracleUnconvergedError(RTQError):
    code = "oracle_unconverged"


class PerturbativeValidityWarning(UserWarning):
    """Emitted when a smallness condition of the perturbative regime is not met."""
