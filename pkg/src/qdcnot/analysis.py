"""Closed-form CNOT fidelity, the balanced-coupling condition and fidelity sweeps.

The closed forms hold at gamma = 0.1 kappa on resonance with |r| = |t0|.
The simulated fidelity runs the leaky protocol and compares each detected
branch to the ideal CNOT output; it is reported next to the closed form,
not fitted to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cavity import SignConvention, resonant_amplitudes
from .protocol import Leaky, apply_cnot, cnot
from .statevec import Kind, QuantumState, RegisterLayout, Spin, fidelity, make_basis_state

DEFAULT_GAMMA = 0.1


class DomainError(ValueError):
    """No real coupling satisfies the balanced condition at this leakage."""


def fidelity_formula_x(x: float) -> float:
    """Fidelity as a function of kappa_s/kappa on the balanced curve."""
    if x < 0:
        raise ValueError("kappa_s/kappa must be non-negative")
    x2 = x * x
    return (x2 * x2 + 16) / (x2 * x2 + 16 * x2 + 16)


def fidelity_formula_g(y: float) -> float:
    """Fidelity as a function of g/kappa on the balanced curve."""
    if y <= 0:
        raise ValueError("g/kappa must be positive")
    y4 = y**4
    return (200 * y4 + 1) / (200 * y4 + 3)


def balanced_coupling(x: float, gamma: float = DEFAULT_GAMMA) -> float:
    """g/kappa at which the hot-cavity reflection matches the cold transmission.

    From |r| = |t0| on resonance, g^2 = gamma (1/x - x/4); at gamma = 0.1 this
    is 1/(10x) - x/40.
    """
    if not 0 < x < 2:
        raise DomainError(f"balanced coupling needs 0 < kappa_s/kappa < 2, got {x}")
    return math.sqrt(gamma / x - gamma * x / 4)


def balanced_leakage(y: float, gamma: float = DEFAULT_GAMMA) -> float:
    """Inverse of :func:`balanced_coupling`: kappa_s/kappa for a given g/kappa."""
    if y <= 0:
        raise DomainError(f"balanced leakage needs g/kappa > 0, got {y}")
    y2 = y * y
    # Positive root of (gamma/4) x^2 + y^2 x - gamma = 0, written to avoid cancellation.
    return 2 * gamma / (y2 + math.sqrt(y2 * y2 + gamma * gamma))


def dephasing_adjustment(F: float, tau: float, T2: float) -> float:
    """Fidelity after exciton dephasing: reduced by ``F * (1 - exp(-tau/T2))``."""
    if not 0 <= F <= 1:
        raise ValueError("fidelity must lie in [0, 1]")
    if tau < 0 or T2 <= 0:
        raise ValueError("need tau >= 0 and T2 > 0")
    return F * math.exp(-tau / T2)


@dataclass(frozen=True)
class OperatingPoint:
    kappa_s_over_kappa: float
    g_over_kappa: float
    gamma_over_kappa: float = DEFAULT_GAMMA

    @classmethod
    def balanced(cls, x: float, gamma: float = DEFAULT_GAMMA) -> OperatingPoint:
        return cls(x, balanced_coupling(x, gamma), gamma)

    def leaky(self, convention=SignConvention.FORMULA, heralded_loss=True) -> Leaky:
        amps = resonant_amplitudes(self.kappa_s_over_kappa, self.gamma_over_kappa, self.g_over_kappa)
        return Leaky(amps, convention, heralded_loss)


TWO_SPINS = RegisterLayout.of(Kind.SPIN, Kind.SPIN)


def _superposed_control(target: Spin) -> QuantumState:
    amps = np.zeros(4, dtype=complex)
    amps[[int(target), 2 + int(target)]] = 1 / math.sqrt(2)
    return QuantumState(TWO_SPINS, amps)


def ensemble_states(ensemble: str | Sequence[QuantumState] = "default") -> list[QuantumState]:
    """Input states to average over.

    ``four-basis`` is the computational basis, ``uniform-superposition`` the
    control in (up+down)/sqrt2 with each target basis state, ``default`` both.
    A sequence of two-spin states is used as given.
    """
    if not isinstance(ensemble, str):
        return list(ensemble)
    basis = [make_basis_state(TWO_SPINS, [a, b]) for a in Spin for b in Spin]
    superposed = [_superposed_control(t) for t in Spin]
    try:
        return {
            "four-basis": basis,
            "uniform-superposition": superposed,
            "default": basis + superposed,
        }[ensemble]
    except KeyError:
        raise ValueError(f"unknown ensemble {ensemble!r}") from None


def simulate_cnot_fidelity(
    point: OperatingPoint,
    ensemble: str | Sequence[QuantumState] = "default",
    convention: SignConvention = SignConvention.FORMULA,
    heralded_loss: bool = True,
) -> tuple[float, float]:
    """Return ``(F_sim, success_probability)`` averaged over the ensemble.

    For each input, F is the probability-weighted mean fidelity of the
    detected branches against the ideal CNOT output, conditioned on
    detection; success is the total detected probability.
    """
    leaky = point.leaky(convention, heralded_loss)
    fids, successes = [], []
    for psi in ensemble_states(ensemble):
        ideal = apply_cnot(psi, 0, 1)
        records = cnot(psi, 0, 1, leaky)
        p = sum(r.branch_probability for r in records)
        f = sum(r.branch_probability * fidelity(r.final_state, ideal) for r in records)
        fids.append(f / p if p > 0 else 0.0)
        successes.append(p)
    return float(np.mean(fids)), float(np.mean(successes))


@dataclass(frozen=True)
class SweepRow:
    x: float
    g_over_kappa: float
    F_formula: float
    F_sim: float
    success_probability: float
    kappa_s_over_kappa: float = math.nan
    error: str = ""

    @property
    def in_domain(self) -> bool:
        return not self.error


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid; empty when ``stop < start``."""
    if step <= 0:
        raise ValueError("step must be positive")
    if stop < start:
        return []
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def sweep_point(
    axis: str,
    value: float,
    gamma: float = DEFAULT_GAMMA,
    ensemble: str | Sequence[QuantumState] = "default",
    convention: SignConvention = SignConvention.FORMULA,
    heralded_loss: bool = True,
) -> SweepRow:
    nan = math.nan
    try:
        if axis == "kappa_s":
            x, g = value, balanced_coupling(value, gamma)
            f_formula = fidelity_formula_x(x)
        elif axis == "g":
            x, g = balanced_leakage(value, gamma), value
            f_formula = fidelity_formula_g(g)
        else:
            raise ValueError(f"unknown sweep axis {axis!r}")
    except DomainError as exc:
        f_formula = fidelity_formula_x(value) if axis == "kappa_s" and value >= 0 else nan
        return SweepRow(value, nan, f_formula, nan, nan, value if axis == "kappa_s" else nan, str(exc))
    f_sim, success = simulate_cnot_fidelity(
        OperatingPoint(x, g, gamma), ensemble, convention, heralded_loss
    )
    return SweepRow(value, g, f_formula, f_sim, success, x)


def sweep(
    axis: str,
    values: Iterable[float],
    gamma: float = DEFAULT_GAMMA,
    ensemble: str | Sequence[QuantumState] = "default",
    convention: SignConvention = SignConvention.FORMULA,
    heralded_loss: bool = True,
) -> list[SweepRow]:
    """Evaluate the closed form and the simulation at each swept value.

    ``axis`` is ``"kappa_s"`` (x = kappa_s/kappa) or ``"g"`` (x = g/kappa);
    the other ratio follows from the balanced condition.  Out-of-domain
    points come back as rows with ``error`` set and NaN simulation columns.
    """
    values = sorted(float(v) for v in values)
    if not values:
        raise ValueError("empty sweep range")
    return [sweep_point(axis, v, gamma, ensemble, convention, heralded_loss) for v in values]
