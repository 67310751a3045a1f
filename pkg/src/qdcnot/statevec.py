"""Dense state vectors over a register of one photon (dim 4) and spins (dim 2).

Basis index convention is big-endian: subsystem 0 varies slowest.  States are
immutable; every operation returns a new :class:`QuantumState`.  Leaky cavity
maps are contractions, so sub-normalized states are legal values and their
squared norm is read as the surviving probability.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

EPS = 1e-12


class Kind(enum.Enum):
    PHOTON = 4
    SPIN = 2

    @property
    def dim(self) -> int:
        return self.value


class Pol(enum.Enum):
    R = "R"
    L = "L"

    def flipped(self) -> Pol:
        return Pol.L if self is Pol.R else Pol.R


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"

    def flipped(self) -> Direction:
        return Direction.DOWN if self is Direction.UP else Direction.UP


class Photon(enum.IntEnum):
    """Photon basis label: circular polarization and propagation direction along z."""

    R_UP = 0
    R_DOWN = 1
    L_UP = 2
    L_DOWN = 3

    @classmethod
    def of(cls, pol: Pol, direction: Direction) -> Photon:
        return cls(2 * (pol is Pol.L) + (direction is Direction.DOWN))

    @property
    def pol(self) -> Pol:
        return Pol.R if self < 2 else Pol.L

    @property
    def direction(self) -> Direction:
        return Direction.DOWN if self % 2 else Direction.UP

    @property
    def s_z(self) -> int:
        """Photon spin along the cavity axis: +1 for R-up and L-down."""
        return 1 if self in (Photon.R_UP, Photon.L_DOWN) else -1

    def flipped(self) -> Photon:
        """Reflection off a hot cavity: polarization and direction both flip."""
        return Photon.of(self.pol.flipped(), self.direction.flipped())

    def __str__(self) -> str:
        return f"{self.pol.value},{self.direction.value}"


class Spin(enum.IntEnum):
    UP = 0
    DOWN = 1

    def __str__(self) -> str:
        return self.name.lower()


_LABEL_TYPE = {Kind.PHOTON: Photon, Kind.SPIN: Spin}


@dataclass(frozen=True)
class RegisterLayout:
    subsystems: tuple[Kind, ...]

    def __post_init__(self):
        object.__setattr__(self, "subsystems", tuple(self.subsystems))

    @classmethod
    def of(cls, *kinds: Kind) -> RegisterLayout:
        return cls(tuple(kinds))

    def __len__(self) -> int:
        return len(self.subsystems)

    def __getitem__(self, i: int) -> Kind:
        return self.subsystems[i]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(k.dim for k in self.subsystems)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int))

    def appended(self, kind: Kind) -> RegisterLayout:
        return RegisterLayout(self.subsystems + (kind,))

    def without(self, index: int) -> RegisterLayout:
        return RegisterLayout(self.subsystems[:index] + self.subsystems[index + 1:])

    def index_of(self, labels: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(int(l) for l in labels), self.dims))

    def labels_of(self, index: int) -> tuple:
        digits = np.unravel_index(index, self.dims)
        return tuple(_LABEL_TYPE[k](int(d)) for k, d in zip(self.subsystems, digits))


@dataclass(frozen=True, eq=False)
class QuantumState:
    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.layout.dim:
            raise ValueError(
                f"{amps.size} amplitudes for a register of dimension {self.layout.dim}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> QuantumState:
        n = np.sqrt(self.norm2)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return QuantumState(self.layout, self.amplitudes / n)

    def scaled(self, factor: complex) -> QuantumState:
        return QuantumState(self.layout, self.amplitudes * factor)

    def tensor(self, other: QuantumState) -> QuantumState:
        layout = RegisterLayout(self.layout.subsystems + other.layout.subsystems)
        return QuantumState(layout, np.kron(self.amplitudes, other.amplitudes))

    def allclose(self, other: QuantumState, atol: float = EPS) -> bool:
        return self.layout == other.layout and bool(
            np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol)
        )

    def support(self, atol: float = EPS) -> dict[tuple, complex]:
        """Non-negligible amplitudes keyed by their basis labels."""
        return {
            self.layout.labels_of(i): complex(a)
            for i, a in enumerate(self.amplitudes)
            if abs(a) > atol
        }

    def __repr__(self) -> str:
        terms = " ".join(
            f"{a.real:+.6g}{a.imag:+.6g}j|{';'.join(map(str, labels))}>"
            for labels, a in self.support(1e-9).items()
        )
        return f"QuantumState({terms or '0'})"


def _check_labels(layout: RegisterLayout, labels: Sequence) -> None:
    if len(labels) != len(layout):
        raise ValueError(f"expected {len(layout)} labels, got {len(labels)}")
    for i, (kind, label) in enumerate(zip(layout.subsystems, labels)):
        if not isinstance(label, _LABEL_TYPE[kind]):
            raise TypeError(f"subsystem {i} is a {kind.name.lower()}, got label {label!r}")


def make_basis_state(layout: RegisterLayout, labels: Sequence) -> QuantumState:
    _check_labels(layout, labels)
    amps = np.zeros(layout.dim, dtype=complex)
    amps[layout.index_of(labels)] = 1.0
    return QuantumState(layout, amps)


def product_state(vectors: Sequence[tuple[Kind, np.ndarray]]) -> QuantumState:
    """Tensor product of local vectors, given as ``(kind, vector)`` pairs."""
    layout = RegisterLayout(tuple(k for k, _ in vectors))
    for k, v in vectors:
        if len(v) != k.dim:
            raise ValueError(f"{k.name.lower()} vector must have length {k.dim}")
    amps = reduce(np.kron, (np.asarray(v, dtype=complex) for _, v in vectors), np.ones(1))
    return QuantumState(layout, amps)


def apply_local_map(state: QuantumState, targets: Sequence[int], matrix) -> QuantumState:
    """Act with ``matrix`` on the tensor factor spanned by ``targets`` (in that order)."""
    targets = [int(t) for t in targets]
    n = len(state.layout)
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated target index in {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise IndexError(f"target out of range for {n} subsystems: {targets}")
    dims = state.layout.dims
    d = int(np.prod([dims[t] for t in targets], dtype=int))
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (d, d):
        raise ValueError(f"matrix shape {matrix.shape} does not match target dimension {d}")

    rest = [i for i in range(n) if i not in targets]
    psi = np.transpose(state.amplitudes.reshape(dims), targets + rest).reshape(d, -1)
    psi = (matrix @ psi).reshape([dims[i] for i in targets + rest])
    psi = np.transpose(psi, np.argsort(targets + rest))
    return QuantumState(state.layout, psi.reshape(-1))


@dataclass(frozen=True, eq=False)
class Branch:
    outcome: object
    probability: float
    state: QuantumState


def _projectors(kind: Kind, basis: str) -> list[tuple[object, list[int]]]:
    if basis == "computational":
        return [(label, [int(label)]) for label in _LABEL_TYPE[kind]]
    if basis == "polarization":
        if kind is not Kind.PHOTON:
            raise ValueError("polarization basis requires a photon subsystem")
        return [(p, [int(Photon.of(p, d)) for d in Direction]) for p in Pol]
    raise ValueError(f"unknown measurement basis {basis!r}")


def measure_subsystem(
    state: QuantumState,
    target: int,
    basis: str = "computational",
    rng: np.random.Generator | None = None,
) -> list[Branch]:
    """Projective measurement of one subsystem.

    Without ``rng`` every outcome of nonzero probability is returned.  With
    ``rng`` one outcome is drawn; for a sub-normalized input the missing weight
    ``1 - norm2`` is a no-click event and the returned list is empty.
    Probabilities are absolute: they sum to ``state.norm2``.
    """
    if not 0 <= target < len(state.layout):
        raise IndexError(f"no subsystem {target}")
    dims = state.layout.dims
    psi = np.moveaxis(state.amplitudes.reshape(dims), target, 0)

    branches = []
    for outcome, indices in _projectors(state.layout[target], basis):
        projected = np.zeros_like(psi)
        projected[indices] = psi[indices]
        p = float(np.vdot(projected, projected).real)
        if p <= EPS**2:
            continue
        amps = np.moveaxis(projected, 0, target).reshape(-1) / np.sqrt(p)
        branches.append(Branch(outcome, p, QuantumState(state.layout, amps)))

    if rng is None:
        return branches
    u = rng.random()
    acc = 0.0
    for b in branches:
        acc += b.probability
        if u < acc:
            return [b]
    return []


def project_out(state: QuantumState, target: int, label) -> QuantumState:
    """Slice out a subsystem at a fixed basis label; the result is unnormalized."""
    if not isinstance(label, _LABEL_TYPE[state.layout[target]]):
        raise TypeError(f"label {label!r} does not match subsystem {target}")
    psi = np.take(state.amplitudes.reshape(state.layout.dims), int(label), axis=target)
    return QuantumState(state.layout.without(target), psi.reshape(-1))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """Squared overlap of the normalized states, ``|<a|b>|^2 / (|a|^2 |b|^2)``."""
    if a.layout != b.layout:
        raise ValueError("fidelity between states on different registers")
    denom = a.norm2 * b.norm2
    if denom == 0:
        raise ValueError("fidelity with a zero vector")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 / denom
    return float(min(max(f, 0.0), 1.0))


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
