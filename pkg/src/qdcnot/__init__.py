"""State-vector simulation of a CNOT gate on quantum-dot spins in double-sided cavities."""

from .analysis import (
    OperatingPoint,
    SweepRow,
    balanced_coupling,
    dephasing_adjustment,
    fidelity_formula_g,
    fidelity_formula_x,
    simulate_cnot_fidelity,
    sweep,
)
from .cavity import (
    CavityParams,
    ScatteringAmplitudes,
    SignConvention,
    compute_amplitudes,
    ideal_interaction,
    leaky_interaction,
    resonant_amplitudes,
)
from .protocol import Bell, Leaky, ProtocolRecord, bsa, cnot, feed_forward, hadamard_spin, pcg, prepare_bell
from .statevec import (
    Kind,
    Photon,
    Pol,
    QuantumState,
    RegisterLayout,
    Spin,
    apply_local_map,
    fidelity,
    make_basis_state,
    measure_subsystem,
)

__version__ = "0.1.0"
