"""Brute-force reference implementations, independent of the package's engine.

Operators are assembled as explicit full-register matrices by looping over
basis indices; nothing here calls ``apply_local_map`` or the protocol code.
"""
import itertools

import numpy as np


def embed(op: np.ndarray, targets, dims) -> np.ndarray:
    """Full-register matrix of ``op`` acting on ``targets`` (big-endian indices)."""
    dims = list(dims)
    n = len(dims)
    full = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    tdims = [dims[t] for t in targets]
    for col_digits in itertools.product(*[range(d) for d in dims]):
        col = int(np.ravel_multi_index(col_digits, dims))
        sub_col = int(np.ravel_multi_index([col_digits[t] for t in targets], tdims))
        for sub_row in range(op.shape[0]):
            amp = op[sub_row, sub_col]
            if amp == 0:
                continue
            row_digits = list(col_digits)
            for t, d in zip(targets, np.unravel_index(sub_row, tdims)):
                row_digits[t] = int(d)
            full[int(np.ravel_multi_index(row_digits, dims)), col] += amp
    return full


# Photon index: (R,up)=0, (R,down)=1, (L,up)=2, (L,down)=3.
S_Z = [+1, -1, -1, +1]
FLIP = [3, 2, 1, 0]  # R,up <-> L,down and R,down <-> L,up


def cavity_matrix(t0, r0, t, r) -> np.ndarray:
    m = np.zeros((8, 8), dtype=complex)
    for p in range(4):
        for s in range(2):
            hot = (S_Z[p] == 1 and s == 0) or (S_Z[p] == -1 and s == 1)
            flip, keep = (r, t) if hot else (r0, t0)
            m[FLIP[p] * 2 + s, p * 2 + s] += flip
            m[p * 2 + s, p * 2 + s] += keep
    return m


H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
I2 = np.eye(2, dtype=complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

TABLE = {  # (pcg1 pol, pcg2 pol, ancilla) -> (control op, target op)
    ("R", "L", 0): (I2, I2), ("R", "L", 1): (I2, X),
    ("R", "R", 0): (-Z, I2), ("R", "R", 1): (Z, X),
    ("L", "L", 0): (I2, X), ("L", "L", 1): (I2, I2),
    ("L", "R", 0): (-Z, X), ("L", "R", 1): (Z, I2),
}


def cnot_branches(psi_ct: np.ndarray, amps=(-1, 0, 0, 1)):
    """All branches of the feed-forward CNOT on a (control, target) vector.

    Register: control, ancilla, target spins then one photon.  Vectors are
    never renormalized, so the squared norm at the end of a branch is its
    absolute probability.  Returns a list of (key, probability, normalized
    2-spin output).
    """
    dims = [2, 2, 2, 4]
    cav = cavity_matrix(*amps)
    ancilla = np.array([1, 1], dtype=complex) / np.sqrt(2)
    spins = np.einsum("ct,a->cat", psi_ct.reshape(2, 2), ancilla).reshape(-1)

    def scatter(state, spin_a, spin_b):
        # spin index k in register -> photon is subsystem 3
        u_a = embed(cav, [3, spin_a], dims)
        u_b = embed(cav, [3, spin_b], dims)
        return u_b @ (u_a @ state)

    def detect(state):
        out = []
        psi = state.reshape(8, 4)
        for p, pol in ((1, "R"), (2, "L")):  # s_z = -1 ports only
            v = psi[:, p]
            prob = float(np.vdot(v, v).real)
            if prob > 1e-24:
                out.append((pol, prob, v))
        return out

    h_at = embed(H, [1], [2, 2, 2]) @ embed(H, [2], [2, 2, 2])
    branches = []
    probe1 = np.zeros(4, dtype=complex); probe1[1] = 1  # R,down
    probe2 = np.zeros(4, dtype=complex); probe2[2] = 1  # L,up
    for pol1, _, v1 in detect(scatter(np.kron(spins, probe1), 0, 1)):
        mid = h_at @ v1
        for pol2, _, v2 in detect(scatter(np.kron(mid, probe2), 1, 2)):
            post = (h_at @ v2).reshape(2, 2, 2)
            for a in (0, 1):
                out = post[:, a, :].reshape(-1)
                prob = float(np.vdot(out, out).real)
                if prob < 1e-24:
                    continue
                cop, top = TABLE[(pol1, pol2, a)]
                out = np.kron(cop, top) @ out
                branches.append(((pol1, pol2, a), prob, out / np.linalg.norm(out)))
    return branches
