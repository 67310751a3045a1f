"""Parity-check gate, feed-forward CNOT and Bell-state analyzer on cavity spins.

Every protocol runs in branch-enumeration mode by default and returns one
record per measurement branch.  Passing a ``numpy.random.Generator`` as
``rng`` samples a single branch instead; in leaky mode the photon may then be
lost, in which case no record is returned.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .cavity import (
    CavityParams,
    ScatteringAmplitudes,
    SignConvention,
    compute_amplitudes,
    ideal_interaction,
    leaky_interaction,
)
from .statevec import (
    HADAMARD,
    SIGMA_X,
    SIGMA_Z,
    Kind,
    Photon,
    Pol,
    QuantumState,
    Spin,
    apply_local_map,
    make_basis_state,
    measure_subsystem,
    project_out,
    RegisterLayout,
)

PROBES = (Photon.R_DOWN, Photon.L_UP)

# Detector that fires for each output polarization, keyed by probe.
DETECTORS = {
    Photon.R_DOWN: {Pol.R: "D2", Pol.L: "D1"},
    Photon.L_UP: {Pol.R: "D4", Pol.L: "D3"},
}


@dataclass(frozen=True)
class Leaky:
    """Leaky-cavity mode.

    ``heralded_loss`` drops photon amplitude that leaves a cavity with the
    wrong s_z (a port with no detector on the probe's path); otherwise that
    amplitude is detected by polarization like any other.
    """

    amps: ScatteringAmplitudes
    convention: SignConvention = SignConvention.FORMULA
    heralded_loss: bool = True

    @classmethod
    def from_params(cls, params: CavityParams, **kwargs) -> Leaky:
        return cls(compute_amplitudes(params), **kwargs)


@dataclass(frozen=True)
class PcgOutcome:
    polarization: Pol
    detector: str
    sign_branch: int


@dataclass(frozen=True, eq=False)
class ProtocolRecord:
    outcomes: tuple[tuple[str, object], ...]
    branch_probability: float
    final_state: QuantumState
    applied_feedforward: tuple[str, str] | None = None


class Op(enum.Enum):
    IDENTITY = "I"
    SIGMA_X = "X"
    SIGMA_Z = "Z"
    MINUS_SIGMA_Z = "-Z"

    @property
    def matrix(self) -> np.ndarray:
        return {
            Op.IDENTITY: np.eye(2, dtype=complex),
            Op.SIGMA_X: SIGMA_X,
            Op.SIGMA_Z: SIGMA_Z,
            Op.MINUS_SIGMA_Z: -SIGMA_Z,
        }[self]


I, X, Z, MZ = Op.IDENTITY, Op.SIGMA_X, Op.SIGMA_Z, Op.MINUS_SIGMA_Z

# (PCG1 polarization, PCG2 polarization, ancilla) -> (control op, target op)
FEED_FORWARD = {
    (Pol.R, Pol.L, Spin.UP): (I, I),
    (Pol.R, Pol.L, Spin.DOWN): (I, X),
    (Pol.R, Pol.R, Spin.UP): (MZ, I),
    (Pol.R, Pol.R, Spin.DOWN): (Z, X),
    (Pol.L, Pol.L, Spin.UP): (I, X),
    (Pol.L, Pol.L, Spin.DOWN): (I, I),
    (Pol.L, Pol.R, Spin.UP): (MZ, X),
    (Pol.L, Pol.R, Spin.DOWN): (Z, I),
}


# Global phase of each ideal-mode branch output relative to CNOT applied
# directly: the table as given leaves -1 on both branches where the two
# parity checks flip the probe.
BRANCH_PHASE = {key: -1 if key[:2] == (Pol.L, Pol.L) else 1 for key in FEED_FORWARD}


def feed_forward(key: tuple[Pol, Pol, Spin]) -> tuple[Op, Op]:
    try:
        return FEED_FORWARD[tuple(key)]
    except (KeyError, TypeError):
        raise KeyError(f"no feed-forward rule for {key!r}") from None


def _check_spin(state: QuantumState, index: int) -> None:
    if not 0 <= index < len(state.layout):
        raise IndexError(f"no subsystem {index}")
    if state.layout[index] is not Kind.SPIN:
        raise TypeError(f"subsystem {index} is not a spin")


def hadamard_spin(state: QuantumState, spin: int) -> QuantumState:
    _check_spin(state, spin)
    return apply_local_map(state, [spin], HADAMARD)


def _interact(state, photon, spin, leaky):
    if leaky is None:
        return ideal_interaction(state, photon, spin)
    return leaky_interaction(state, photon, spin, leaky.amps, leaky.convention)


def pcg_scatter(
    state: QuantumState,
    probe: Photon,
    spin_a: int,
    spin_b: int,
    leaky: Leaky | None = None,
) -> QuantumState:
    """Joint spin-photon state after the probe has met both cavities, before detection.

    The photon is the last subsystem of the returned register.
    """
    photon = len(state.layout)
    psi = state.tensor(make_basis_state(RegisterLayout.of(Kind.PHOTON), [probe]))
    psi = _interact(psi, photon, spin_a, leaky)
    return _interact(psi, photon, spin_b, leaky)


def pcg(
    state: QuantumState,
    probe: Photon,
    spin_a: int,
    spin_b: int,
    leaky: Leaky | None = None,
    rng: np.random.Generator | None = None,
    name: str = "PCG",
) -> list[tuple[PcgOutcome, ProtocolRecord]]:
    """Send one probe photon through the cavities of ``spin_a`` then ``spin_b``.

    The photon is appended to the register, scattered once off each cavity,
    detected and discarded.  Returned records hold the spin state conditioned
    on the click (renormalized) and its absolute probability.
    """
    if probe not in PROBES:
        raise ValueError(f"probe must be one of {[str(p) for p in PROBES]}, got {probe}")
    _check_spin(state, spin_a)
    _check_spin(state, spin_b)
    if spin_a == spin_b:
        raise ValueError("parity check needs two distinct spins")

    photon = len(state.layout)
    psi = pcg_scatter(state, probe, spin_a, spin_b, leaky)

    # Which-port resolution: the detector sees polarization and direction.
    branches = measure_subsystem(psi, photon, "computational")
    if leaky is None or leaky.heralded_loss:
        branches = [b for b in branches if b.outcome.s_z == probe.s_z]
    if rng is not None:
        branches = _sample(branches, rng)

    out = []
    for b in branches:
        pol = b.outcome.pol
        outcome = PcgOutcome(pol, DETECTORS[probe][pol], 1 if pol is probe.pol else -1)
        post = project_out(b.state, photon, b.outcome)
        record = ProtocolRecord(
            outcomes=((name, outcome),),
            branch_probability=b.probability,
            final_state=post,
        )
        out.append((outcome, record))
    return out


def _sample(branches, rng):
    # Absolute probabilities; any weight beyond their sum is a lost photon.
    u = rng.random()
    acc = 0.0
    for b in branches:
        acc += b.probability
        if u < acc:
            return [b]
    return []


def _merge(first: ProtocolRecord, second: ProtocolRecord) -> ProtocolRecord:
    return replace(
        second,
        outcomes=first.outcomes + second.outcomes,
        branch_probability=first.branch_probability * second.branch_probability,
    )


def cnot_matrix() -> np.ndarray:
    """CNOT on (control, target): flips the target when the control is down."""
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )


def apply_cnot(state: QuantumState, control: int, target: int) -> QuantumState:
    return apply_local_map(state, [control, target], cnot_matrix())


def cnot(
    state: QuantumState,
    control: int,
    target: int,
    leaky: Leaky | CavityParams | None = None,
    rng: np.random.Generator | None = None,
) -> list[ProtocolRecord]:
    """CNOT from two parity checks, an ancilla readout and Pauli feed-forward."""
    _check_spin(state, control)
    _check_spin(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    if isinstance(leaky, CavityParams):
        leaky = Leaky.from_params(leaky)

    ancilla = len(state.layout)
    plus = QuantumState(RegisterLayout.of(Kind.SPIN), np.array([1, 1]) / np.sqrt(2))
    psi = state.tensor(plus)

    records = []
    for out1, rec1 in pcg(psi, Photon.R_DOWN, control, ancilla, leaky, rng, "PCG1"):
        mid = hadamard_spin(hadamard_spin(rec1.final_state, ancilla), target)
        for out2, rec2 in pcg(mid, Photon.L_UP, ancilla, target, leaky, rng, "PCG2"):
            post = hadamard_spin(hadamard_spin(rec2.final_state, ancilla), target)
            rec12 = _merge(rec1, rec2)
            for b in measure_subsystem(post, ancilla, "computational", rng):
                ctrl_op, tgt_op = feed_forward((out1.polarization, out2.polarization, b.outcome))
                final = project_out(b.state, ancilla, b.outcome)
                final = apply_local_map(final, [control], ctrl_op.matrix)
                final = apply_local_map(final, [target], tgt_op.matrix)
                records.append(
                    ProtocolRecord(
                        outcomes=rec12.outcomes + (("ancilla", b.outcome),),
                        branch_probability=rec12.branch_probability * b.probability,
                        final_state=final,
                        applied_feedforward=(ctrl_op.value, tgt_op.value),
                    )
                )
    return records


class Bell(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"


def prepare_bell(label: Bell) -> QuantumState:
    s = 1 / np.sqrt(2)
    amps = {
        Bell.PSI_PLUS: [s, 0, 0, s],
        Bell.PSI_MINUS: [s, 0, 0, -s],
        Bell.PHI_PLUS: [0, s, s, 0],
        Bell.PHI_MINUS: [0, s, -s, 0],
    }[Bell(label)]
    return QuantumState(RegisterLayout.of(Kind.SPIN, Kind.SPIN), amps)


_BSA_TABLE = {
    (Pol.R, Pol.R): Bell.PSI_PLUS,
    (Pol.R, Pol.L): Bell.PSI_MINUS,
    (Pol.L, Pol.R): Bell.PHI_PLUS,
    (Pol.L, Pol.L): Bell.PHI_MINUS,
}


def bsa(
    state: QuantumState,
    spin1: int,
    spin2: int,
    leaky: Leaky | None = None,
    rng: np.random.Generator | None = None,
) -> list[tuple[Bell, ProtocolRecord]]:
    """Complete Bell-state analysis: parity check, H on both spins, parity check.

    The first click separates the parallel (psi) from the antiparallel (phi)
    group; the second separates "+" from "-".  An exact Bell-state input in
    ideal mode yields a single branch of probability one.
    """
    results = []
    for out1, rec1 in pcg(state, Photon.R_DOWN, spin1, spin2, leaky, rng, "PCG1"):
        mid = hadamard_spin(hadamard_spin(rec1.final_state, spin1), spin2)
        for out2, rec2 in pcg(mid, Photon.R_DOWN, spin1, spin2, leaky, rng, "PCG2"):
            label = _BSA_TABLE[(out1.polarization, out2.polarization)]
            results.append((label, _merge(rec1, rec2)))
    return results
