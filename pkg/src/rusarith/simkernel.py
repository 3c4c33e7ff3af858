"""Dense statevector simulation with mid-circuit measurement.

Qubit 0 is the most significant bit of the basis index, so the amplitude of
``|q0 q1 ... q_{n-1}>`` sits at index ``sum(q_i << (n - 1 - i))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

MAX_QUBITS = 14
# Branches less likely than this are refused rather than renormalized.
MIN_BRANCH_PROB = 1e-15


class SimulationError(ValueError):
    """Raised for invalid registers, indices or impossible branches."""


class StateVector:
    """Amplitudes of an ``n_qubits`` register (unit norm)."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, n_qubits: int | None = None):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        if n_qubits is None:
            n_qubits = int(round(np.log2(amps.size))) if amps.size else 0
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise SimulationError(f"register too large or empty: {n_qubits} qubits")
        if amps.size != 2 ** n_qubits:
            raise SimulationError(
                f"{amps.size} amplitudes do not describe {n_qubits} qubits")
        self.n_qubits = n_qubits
        self.amplitudes = amps

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """View as an n-dimensional (2, 2, ..., 2) array indexed by qubit."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def new_state(n: int) -> StateVector:
    """|0...0> on ``n`` qubits."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise SimulationError(f"register needs at least one qubit, got {n}")
    if n > MAX_QUBITS:
        raise SimulationError(f"register too large: {n} > {MAX_QUBITS} qubits")
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps, n)


def product_state(single_qubit_states: Sequence[np.ndarray]) -> StateVector:
    """Kronecker product of one-qubit states, first entry is qubit 0."""
    amps = np.ones(1, dtype=complex)
    for s in single_qubit_states:
        amps = np.kron(amps, np.asarray(s, dtype=complex))
    return StateVector(amps / np.linalg.norm(amps), len(single_qubit_states))


# gates

@dataclass(frozen=True)
class RotX:
    """exp(-i angle X) on one qubit."""
    qubit: int
    angle: float


@dataclass(frozen=True)
class Hadamard:
    qubit: int


@dataclass(frozen=True)
class PauliZ:
    qubit: int


@dataclass(frozen=True)
class PauliX:
    qubit: int


@dataclass(frozen=True)
class PhaseS:
    """diag(1, i); ``dagger`` gives diag(1, -i)."""
    qubit: int
    dagger: bool = False


@dataclass(frozen=True)
class CNot:
    control: int
    target: int


@dataclass(frozen=True)
class MultiControlledIX:
    """Apply ``i**phase_exponent * X`` to target when all controls are 1."""
    controls: tuple
    target: int
    phase_exponent: int = 0

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "phase_exponent", int(self.phase_exponent) % 4)


@dataclass(frozen=True)
class ZeroReflection:
    """Diagonal that is +1 when every listed qubit reads 0 and -1 otherwise."""
    qubits: tuple

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))


GateOp = Union[RotX, Hadamard, PauliZ, PauliX, PhaseS, CNot, MultiControlledIX,
               ZeroReflection]

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)


def rotx_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -1j * s], [-1j * s, c]])


def gate_qubits(g: GateOp) -> tuple:
    if isinstance(g, CNot):
        return (g.control, g.target)
    if isinstance(g, MultiControlledIX):
        return g.controls + (g.target,)
    if isinstance(g, ZeroReflection):
        return g.qubits
    return (g.qubit,)


def single_qubit_matrix(g: GateOp) -> np.ndarray | None:
    if isinstance(g, RotX):
        return rotx_matrix(g.angle)
    if isinstance(g, Hadamard):
        return _H
    if isinstance(g, PauliZ):
        return _Z
    if isinstance(g, PauliX):
        return _X
    if isinstance(g, PhaseS):
        return np.diag([1, -1j if g.dagger else 1j])
    return None


def _check_indices(qubits, n):
    if len(set(qubits)) != len(qubits):
        raise SimulationError(f"repeated qubit index in {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise SimulationError(f"qubit index {q} outside register of {n}")


def _apply_1q(amps: np.ndarray, n: int, q: int, m: np.ndarray) -> np.ndarray:
    # works on a trailing-qubit layout; a leading batch axis is allowed
    lead = amps.shape[:-1]
    t = amps.reshape(lead + (2 ** q, 2, 2 ** (n - q - 1)))
    out = np.einsum("ij,...ajb->...aib", m, t)
    return out.reshape(amps.shape)


def _bit(n: int, q: int) -> np.ndarray:
    return (np.arange(2 ** n) >> (n - 1 - q)) & 1


def _apply_mcx(amps, n, controls, target, phase_exponent):
    idx = np.arange(2 ** n)
    active = np.ones(2 ** n, dtype=bool)
    for c in controls:
        active &= _bit(n, c) == 1
    # partner index differs in the target bit
    src = idx.copy()
    src[active] = idx[active] ^ (1 << (n - 1 - target))
    out = amps[..., src]
    if phase_exponent:
        out = out.copy()
        out[..., active] *= 1j ** phase_exponent
    return out


def apply_gate(state: StateVector, g: GateOp) -> StateVector:
    """Return a new state with ``g`` applied."""
    n = state.n_qubits
    qubits = gate_qubits(g)
    _check_indices(qubits, n)
    return StateVector(_apply_raw(state.amplitudes, n, g), n)


def _apply_raw(amps: np.ndarray, n: int, g: GateOp) -> np.ndarray:
    m = single_qubit_matrix(g)
    if m is not None:
        return _apply_1q(amps, n, g.qubit, m)
    if isinstance(g, CNot):
        return _apply_mcx(amps, n, (g.control,), g.target, 0)
    if isinstance(g, MultiControlledIX):
        return _apply_mcx(amps, n, g.controls, g.target, g.phase_exponent)
    if isinstance(g, ZeroReflection):
        zero = np.ones(2 ** n, dtype=bool)
        for q in g.qubits:
            zero &= _bit(n, q) == 0
        return np.where(zero, amps, -amps)
    raise SimulationError(f"unknown gate {g!r}")


def apply_gates(state: StateVector, gates) -> StateVector:
    for g in gates:
        state = apply_gate(state, g)
    return state


def inverse_gate(g: GateOp) -> GateOp:
    """Adjoint of a gate (all supported gates are closed under inversion)."""
    if isinstance(g, RotX):
        return RotX(g.qubit, -g.angle)
    if isinstance(g, PhaseS):
        return PhaseS(g.qubit, not g.dagger)
    if isinstance(g, MultiControlledIX):
        # (i^e X)^dagger = (-i)^e X
        return MultiControlledIX(g.controls, g.target, -g.phase_exponent)
    return g


def ghz_inverse_gates(qubits: Sequence[int]) -> list:
    """CNOTs from the first listed qubit to the rest, then H on the first."""
    qubits = list(qubits)
    if not qubits:
        raise SimulationError("GHZ measurement needs at least one qubit")
    gates = [CNot(qubits[0], q) for q in qubits[1:]]
    gates.append(Hadamard(qubits[0]))
    return gates


def apply_ghz_inverse(state: StateVector, qubits: Sequence[int]) -> StateVector:
    _check_indices(list(qubits), state.n_qubits)
    return apply_gates(state, ghz_inverse_gates(qubits))


def gate_matrix(g: GateOp, n: int) -> np.ndarray:
    """Dense 2^n x 2^n unitary, built column by column through the kernel."""
    return _apply_raw(np.eye(2 ** n, dtype=complex), n, g).T


# measurement

class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``."""

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def random(self, size=None):
        return self.generator.random(size)

    def spawn(self, stream_id: int) -> "RngStream":
        """Independent stream sharing this seed."""
        return RngStream(self.seed, stream_id)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def prob_zero(state: StateVector, qubit: int) -> float:
    _check_indices([qubit], state.n_qubits)
    t = np.moveaxis(state.tensor(), qubit, 0)
    return float(np.sum(np.abs(t[0]) ** 2))


def outcome_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Joint Born distribution of ``qubits``; entry index is the bit string
    read with the first listed qubit as most significant."""
    qubits = list(qubits)
    _check_indices(qubits, state.n_qubits)
    p = np.abs(state.tensor()) ** 2
    rest = tuple(q for q in range(state.n_qubits) if q not in qubits)
    marg = p.sum(axis=rest) if rest else p
    # marg axes follow ascending qubit order; reorder to the requested order
    order = np.argsort(np.argsort(qubits))
    marg = np.transpose(marg, axes=tuple(order)) if len(qubits) > 1 else marg
    return marg.ravel()


def project(state: StateVector, qubit: int, bit: int) -> tuple:
    """Project ``qubit`` onto ``bit``; returns (probability, normalized state)."""
    _check_indices([qubit], state.n_qubits)
    mask = _bit(state.n_qubits, qubit) == bit
    amps = np.where(mask, state.amplitudes, 0)
    p = float(np.sum(np.abs(amps) ** 2))
    if p < MIN_BRANCH_PROB:
        raise SimulationError(
            f"branch qubit {qubit} = {bit} has probability {p:.3g}")
    return p, StateVector(amps / np.sqrt(p), state.n_qubits)


def measure(state: StateVector, qubit: int, rng: RngStream) -> tuple:
    """Sample a computational-basis measurement of one qubit."""
    p0 = prob_zero(state, qubit)
    bit = 0 if rng.random() < p0 else 1
    # a branch of (numerically) zero weight is never selected
    if bit == 0 and p0 < MIN_BRANCH_PROB:
        bit = 1
    elif bit == 1 and 1 - p0 < MIN_BRANCH_PROB:
        bit = 0
    _, post = project(state, qubit, bit)
    return bit, post


def measure_many(state: StateVector, qubits: Sequence[int], rng: RngStream) -> tuple:
    bits = []
    for q in qubits:
        b, state = measure(state, q, rng)
        bits.append(b)
    return tuple(bits), state


def reset(state: StateVector, qubits: Sequence[int], bits: Sequence[int]) -> StateVector:
    """Return measured qubits to |0> with classically controlled X gates."""
    for q, b in zip(qubits, bits):
        if b:
            state = apply_gate(state, PauliX(q))
    return state


def overlap(s1: StateVector, s2: StateVector) -> complex:
    """<s1|s2>."""
    if s1.amplitudes.shape != s2.amplitudes.shape:
        raise SimulationError("dimension mismatch in overlap")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def qubit_state(state: StateVector, qubit: int) -> np.ndarray:
    """Pure state of one qubit that is in a product with the rest.

    Raises when the qubit is entangled (reduced state not pure)."""
    t = np.moveaxis(state.tensor(), qubit, 0).reshape(2, -1)
    rho = t @ t.conj().T
    w, v = np.linalg.eigh(rho)
    if w[0] > 1e-9:
        raise SimulationError(f"qubit {qubit} is entangled with the register")
    return v[:, 1]


def sample_outcomes(probs: np.ndarray, rng: RngStream, shots: int) -> np.ndarray:
    """Draw ``shots`` outcome indices from a Born distribution."""
    p = np.clip(np.asarray(probs, dtype=float), 0, None)
    return rng.generator.choice(p.size, size=shots, p=p / p.sum())
