"""Photon scattering off a spin-loaded double-sided cavity.

All rates and frequencies are in units of the cavity field decay rate, so
``kappa`` defaults to 1.  A photon/spin configuration is *hot* when the
photon's s_z matches the spin's dipole transition (s_z=+1 with spin up, s_z=-1
with spin down); hot configurations see the coupled coefficients ``t, r``,
cold ones the bare-cavity coefficients ``t0, r0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .statevec import Kind, Photon, QuantumState, Spin, apply_local_map


class SingularInput(ValueError):
    """The scattering denominator vanishes (lossless dipole, exact resonance, g=0)."""


@dataclass(frozen=True)
class CavityParams:
    g: float = 0.0
    kappa: float = 1.0
    kappa_s: float = 0.0
    gamma: float = 0.1
    omega: float = 0.0
    omega_c: float = 0.0
    omega_x: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa", "kappa_s", "gamma", "omega", "omega_c", "omega_x"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.g < 0 or self.kappa_s < 0 or self.gamma < 0:
            raise ValueError("g, kappa_s and gamma must be non-negative")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")

    @classmethod
    def resonant(cls, kappa_s: float, g: float, gamma: float = 0.1) -> CavityParams:
        return cls(g=g, kappa_s=kappa_s, gamma=gamma)


@dataclass(frozen=True)
class ScatteringAmplitudes:
    t0: complex
    r0: complex
    t: complex
    r: complex

    @classmethod
    def ideal(cls) -> ScatteringAmplitudes:
        """Lossless strong-coupling limit: cold transmits with a pi phase, hot reflects."""
        return cls(t0=-1.0, r0=0.0, t=0.0, r=1.0)


class SignConvention(enum.Enum):
    """FORMULA uses the complex coefficients; MAGNITUDES uses |r|, |t| on hot
    rows and -|t0|, -|r0| on cold rows."""

    FORMULA = "formula"
    MAGNITUDES = "magnitudes"


def _transmission(p: CavityParams, g: float) -> complex:
    dipole = 1j * (p.omega_x - p.omega) + p.gamma / 2
    cavity = 1j * (p.omega_c - p.omega) + p.kappa + p.kappa_s / 2
    denom = dipole * cavity + g**2
    if denom == 0:
        raise SingularInput(f"scattering denominator vanishes for {p}")
    return -p.kappa * dipole / denom


def compute_amplitudes(params: CavityParams) -> ScatteringAmplitudes:
    # The bare-cavity coefficient has the dipole factor cancel; evaluate it
    # directly so that gamma=0 on resonance is still well defined for g>0.
    cavity = 1j * (params.omega_c - params.omega) + params.kappa + params.kappa_s / 2
    dipole = 1j * (params.omega_x - params.omega) + params.gamma / 2
    if params.g == 0 and dipole == 0:
        raise SingularInput(f"scattering denominator vanishes for {params}")
    t0 = -params.kappa / cavity
    t = _transmission(params, params.g)
    return ScatteringAmplitudes(t0=t0, r0=1 + t0, t=t, r=1 + t)


def resonant_amplitudes(kappa_s: float, gamma: float, g: float) -> ScatteringAmplitudes:
    """Closed-form coefficients at omega = omega_c = omega_X (rates over kappa)."""
    for name, v in (("kappa_s", kappa_s), ("gamma", gamma), ("g", g)):
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"{name} must be finite and non-negative, got {v}")
    leak = 1 + kappa_s / 2
    t0 = -1 / leak
    r0 = (kappa_s / 2) / leak
    denom = gamma / 2 * leak + g**2
    if denom == 0:
        raise SingularInput("gamma = g = 0 leaves the hot-cavity coefficient undefined")
    t = -(gamma / 2) / denom
    return ScatteringAmplitudes(t0=complex(t0), r0=complex(r0), t=complex(t), r=complex(1 + t))


def is_hot(photon: Photon, spin: Spin) -> bool:
    return (photon.s_z == 1) == (spin is Spin.UP)


def interaction_matrix(
    amps: ScatteringAmplitudes, convention: SignConvention = SignConvention.FORMULA
) -> np.ndarray:
    """8x8 map on photon (x) spin, photon index slow.  Spin labels are conserved."""
    if convention is SignConvention.FORMULA:
        hot = (amps.r, amps.t)
        cold = (amps.r0, amps.t0)
    elif convention is SignConvention.MAGNITUDES:
        hot = (abs(amps.r), abs(amps.t))
        cold = (-abs(amps.r0), -abs(amps.t0))
    else:
        raise ValueError(f"unknown sign convention {convention!r}")

    m = np.zeros((8, 8), dtype=complex)
    for photon in Photon:
        for spin in Spin:
            flip, keep = hot if is_hot(photon, spin) else cold
            col = 2 * photon + spin
            m[2 * photon.flipped() + spin, col] += flip
            m[col, col] += keep
    return m


IDEAL_MATRIX = interaction_matrix(ScatteringAmplitudes.ideal())


def _check_pair(state: QuantumState, photon: int, spin: int) -> None:
    if state.layout[photon] is not Kind.PHOTON:
        raise TypeError(f"subsystem {photon} is not a photon")
    if state.layout[spin] is not Kind.SPIN:
        raise TypeError(f"subsystem {spin} is not a spin")


def ideal_interaction(state: QuantumState, photon: int, spin: int) -> QuantumState:
    _check_pair(state, photon, spin)
    return apply_local_map(state, [photon, spin], IDEAL_MATRIX)


def leaky_interaction(
    state: QuantumState,
    photon: int,
    spin: int,
    amps: ScatteringAmplitudes,
    convention: SignConvention = SignConvention.FORMULA,
) -> QuantumState:
    _check_pair(state, photon, spin)
    return apply_local_map(state, [photon, spin], interaction_matrix(amps, convention))
