#!/usr/bin/env python3
"""Print the ideal parity-check table and the per-branch feed-forward of the CNOT."""
import numpy as np

from qdcnot.cli import describe_state
from qdcnot.protocol import BRANCH_PHASE, apply_cnot, cnot, pcg, PROBES
from qdcnot.statevec import Kind, QuantumState, RegisterLayout, Spin, make_basis_state

TWO = RegisterLayout.of(Kind.SPIN, Kind.SPIN)

print("probe    spins      click  sign")
for probe in PROBES:
    for a in Spin:
        for b in Spin:
            (out, rec), = pcg(make_basis_state(TWO, [a, b]), probe, 0, 1)
            print(f"{str(probe):8} {str(a)+','+str(b):10} {out.detector}({out.polarization.value})  {out.sign_branch:+d}")

psi = QuantumState(TWO, np.array([0.6, 0, 0.8j, 0]))
ideal = apply_cnot(psi, 0, 1)
print("\nPCG1 PCG2 ancilla  ctrl tgt   phase vs CNOT")
for rec in cnot(psi, 0, 1):
    (_, o1), (_, o2), (_, anc) = rec.outcomes
    phase = np.vdot(ideal.amplitudes, rec.final_state.amplitudes)
    key = (o1.polarization, o2.polarization, anc)
    print(f"{o1.polarization.value:4} {o2.polarization.value:4} {str(anc):8} {rec.applied_feedforward[0]:4} "
          f"{rec.applied_feedforward[1]:4}  {phase.real:+.0f} (table {BRANCH_PHASE[key]:+d})")
print(f"\nideal output: {describe_state(ideal)}")
