"""Gearbox (GB) and generalized PAR primitives.

Analytic angle maps and success probabilities, gate-level circuits, and
repeat-until-success drivers that run those circuits on the statevector
simulator.  All rotations are ``exp(-i angle X)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import simkernel as sk
from .simkernel import (CNot, Hadamard, MultiControlledIX, PauliZ, PhaseS, RotX,
                        RngStream, StateVector, ZeroReflection)

DEFAULT_MAX_ATTEMPTS = 10_000


def _angles(phis) -> np.ndarray:
    a = np.atleast_1d(np.asarray(phis, dtype=float))
    if a.ndim != 1 or a.size == 0:
        raise ValueError("expected a nonempty list of angles")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"angles must be finite, got {a}")
    return a


# analytic maps

def gb_angle(phis) -> float:
    """arctan(tan^2(arcsin(prod |sin phi|)))."""
    s2 = float(np.prod(np.sin(_angles(phis)) ** 2))
    # tan^2(arcsin(s)) = s^2 / (1 - s^2)
    return float(np.arctan2(s2, 1.0 - s2))


def gb_success_prob(phis) -> float:
    s2 = float(np.prod(np.sin(_angles(phis)) ** 2))
    return (1.0 - s2) ** 2 + s2 ** 2


def par_angle(phis) -> float:
    """arctan(prod tan phi), the GHZ+ branch angle."""
    a = _angles(phis)
    c = np.cos(a)
    if np.any(np.abs(c) < 1e-15):
        raise ValueError("PAR input at a pole (odd multiple of pi/2)")
    return float(np.arctan(np.prod(np.tan(a))))


def par_success_prob(phis) -> float:
    """Combined probability of the two GHZ outcomes."""
    a = _angles(phis)
    return float(np.prod(np.cos(a) ** 2) + np.prod(np.sin(a) ** 2))


def correction_angle_next(phi: float) -> float:
    """Angle whose single-input gearbox rotation doubles that of ``phi``."""
    g = gb_angle([phi])
    if not 0 <= 2 * g < np.pi / 2:
        raise ValueError(f"doubling GB({phi}) = {g} leaves the range of tan")
    return float(np.arctan(np.sqrt(np.tan(2 * g))))


def correction_sequence(phi: float, length: int) -> list:
    out = [float(phi)]
    for _ in range(length - 1):
        out.append(correction_angle_next(out[-1]))
    return out


# bookkeeping

class CorrectionKind(enum.Enum):
    NONE = "none"
    CLIFFORD_EXP_I_PI4_X = "clifford_exp_i_pi4_x"
    IDENTITY = "identity"
    REVERSE_ROTATION = "reverse_rotation"


@dataclass
class RunTrace:
    attempts: int = 0
    leaf_rotations: int = 0
    outcome_angle: float = 0.0
    corrections: int = 0
    success: bool = False
    records: list = field(default_factory=list)
    kinds: list = field(default_factory=list)


class ExhaustedError(RuntimeError):
    """No success within ``max_attempts``; carries the partial trace."""

    def __init__(self, trace: RunTrace, max_attempts: int):
        super().__init__(f"no success after {max_attempts} attempts")
        self.trace = trace


# circuits

def gb_gates(phis, ancillas, target, sign: int = 1) -> list:
    """Gearbox circuit; ``sign=-1`` uses iX and rotates the other way."""
    phis = _angles(phis)
    gates = [RotX(a, p) for a, p in zip(ancillas, phis)]
    gates.append(MultiControlledIX(tuple(ancillas), target, 3 if sign > 0 else 1))
    gates += [RotX(a, -p) for a, p in zip(ancillas, phis)]
    return gates


def par_gates(phis, ancillas, target, phase_fix: bool = False) -> list:
    """Generalized PAR circuit up to (not including) measurement.

    With ``phase_fix`` an S gate on the first ancilla makes the relative
    phase between a measurement record and its complement imaginary for even
    input counts, which the amplitude-amplified version relies on.  The
    GHZ-branch action is unchanged.
    """
    phis = _angles(phis)
    k = len(phis)
    gates = [RotX(a, p) for a, p in zip(ancillas, phis)]
    exponent = k - 1
    if phase_fix and k % 2 == 0:
        gates.append(PhaseS(ancillas[0]))
        exponent = k - 2
    gates.append(MultiControlledIX(tuple(ancillas), target, exponent))
    gates += sk.ghz_inverse_gates(ancillas)
    return gates


def oaa_par_gates(phis, flag, ancillas, target) -> list:
    """Three-application amplitude amplification of PAR.

    U' = H(flag) x PAR.  The sequence applied is -U' R_in U'^dag R_good U',
    where R_good reflects about flag = first ancilla = 0 and R_in about the
    flag and all ancillas being 0 (the state U' started from).
    """
    u = [Hadamard(flag)] + par_gates(phis, ancillas, target, phase_fix=True)
    u_dag = [sk.inverse_gate(g) for g in reversed(u)]
    r_good = ZeroReflection((flag, ancillas[0]))
    r_in = ZeroReflection((flag,) + tuple(ancillas))
    # the overall -1 is a global phase and is dropped
    return u + [r_good] + u_dag + [r_in] + u


def nonrus_gb_gates(phi, a, b, target) -> list:
    """Gearbox variant whose rotations can all be prepared offline."""
    return [RotX(a, phi), RotX(b, phi), MultiControlledIX((b,), target, 3),
            CNot(a, b), Hadamard(a)]


# register helpers

def _as_state(target_state) -> StateVector:
    if target_state is None:
        return sk.new_state(1)
    if isinstance(target_state, StateVector):
        return target_state
    v = np.asarray(target_state, dtype=complex)
    return StateVector(v / np.linalg.norm(v))


def _with_ancillas(state: StateVector, m: int) -> StateVector:
    anc = np.zeros(2 ** m, dtype=complex)
    anc[0] = 1
    return StateVector(np.kron(state.amplitudes, anc), state.n_qubits + m)


def _drop_ancillas(state: StateVector, m: int) -> StateVector:
    """Remove trailing ancillas that are back in |0...0>."""
    t = state.amplitudes.reshape(-1, 2 ** m)
    if np.linalg.norm(t[:, 1:]) > 1e-9:
        raise sk.SimulationError("ancillas were not returned to |0>")
    return StateVector(t[:, 0], state.n_qubits - m)


# repeat-until-success drivers

def run_gb(phis, target_state=None, target_qubit: int = 0, rng: RngStream | None = None,
           max_attempts: int = DEFAULT_MAX_ATTEMPTS, sign: int = 1):
    """Repeat the gearbox circuit until every ancilla reads 0.

    A failed attempt applies exp(+-i pi X/4) to the target regardless of the
    inputs; it is undone before the next attempt.  Any nonzero record counts
    as one failure.
    """
    phis = _angles(phis)
    rng = rng or RngStream()
    base = _as_state(target_state)
    k = len(phis)
    n0 = base.n_qubits
    anc = list(range(n0, n0 + k))
    state = _with_ancillas(base, k)
    gates = gb_gates(phis, anc, target_qubit, sign)
    trace = RunTrace(outcome_angle=sign * gb_angle(phis))
    for _ in range(max_attempts):
        trace.attempts += 1
        trace.leaf_rotations += 2 * k
        state = sk.apply_gates(state, gates)
        bits, state = sk.measure_many(state, anc, rng)
        state = sk.reset(state, anc, bits)
        trace.records.append(bits)
        if not any(bits):
            trace.success = True
            trace.kinds.append(CorrectionKind.NONE)
            return _drop_ancillas(state, k), trace
        trace.corrections += 1
        trace.kinds.append(CorrectionKind.CLIFFORD_EXP_I_PI4_X)
        state = sk.apply_gate(state, RotX(target_qubit, sign * np.pi / 4))
    raise ExhaustedError(trace, max_attempts)


def par_once(phis, target_state=None, target_qubit: int = 0, rng: RngStream | None = None):
    """One shot of the PAR circuit.

    Returns (label, state, record) with label 'plus' (rotation by
    +par_angle), 'minus' (rotation by -par_angle) or 'identity'.
    """
    phis = _angles(phis)
    rng = rng or RngStream()
    base = _as_state(target_state)
    k = len(phis)
    anc = list(range(base.n_qubits, base.n_qubits + k))
    state = sk.apply_gates(_with_ancillas(base, k), par_gates(phis, anc, target_qubit))
    bits, state = sk.measure_many(state, anc, rng)
    state = _drop_ancillas(sk.reset(state, anc, bits), k)
    return par_record_label(bits), state, bits


def par_record_label(bits) -> str:
    if not any(bits):
        return "plus"
    if bits[0] == 1 and not any(bits[1:]):
        return "minus"
    return "identity"


def run_par_on_zero(phis, rng: RngStream | None = None,
                    max_attempts: int = DEFAULT_MAX_ATTEMPTS, sign: int = 1):
    """PAR acting on a fresh |0>; the wrong-sign GHZ outcome is fixed by Z."""
    phis = _angles(phis)
    rng = rng or RngStream()
    k = len(phis)
    trace = RunTrace(outcome_angle=sign * par_angle(phis))
    for _ in range(max_attempts):
        trace.attempts += 1
        trace.leaf_rotations += k
        label, state, bits = par_once(phis, None, 0, rng)
        trace.records.append(bits)
        if label == "identity":
            trace.kinds.append(CorrectionKind.IDENTITY)
            continue
        # Z exp(-iaX)|0> = exp(iaX)|0> up to phase
        if (label == "minus") == (sign > 0):
            state = sk.apply_gate(state, PauliZ(0))
            trace.corrections += 1
        trace.kinds.append(CorrectionKind.NONE)
        trace.success = True
        return state, trace
    raise ExhaustedError(trace, max_attempts)


def run_par_oaa(phis, target_state=None, target_qubit: int = 0,
                rng: RngStream | None = None, max_attempts: int = DEFAULT_MAX_ATTEMPTS):
    """Amplitude-amplified PAR on an arbitrary target.

    Each attempt applies the three-application circuit and measures the
    flag and every ancilla; all zeros means exp(-i par_angle X) was applied,
    anything else leaves the target unchanged.
    """
    phis = _angles(phis)
    rng = rng or RngStream()
    base = _as_state(target_state)
    k = len(phis)
    n0 = base.n_qubits
    flag, anc = n0, list(range(n0 + 1, n0 + 1 + k))
    measured = [flag] + anc
    gates = oaa_par_gates(phis, flag, anc, target_qubit)
    state = _with_ancillas(base, k + 1)
    trace = RunTrace(outcome_angle=par_angle(phis))
    for _ in range(max_attempts):
        trace.attempts += 1
        trace.leaf_rotations += 3 * k
        state = sk.apply_gates(state, gates)
        bits, state = sk.measure_many(state, measured, rng)
        state = sk.reset(state, measured, bits)
        trace.records.append(bits)
        if not any(bits):
            trace.success = True
            trace.kinds.append(CorrectionKind.NONE)
            return _drop_ancillas(state, k + 1), trace
        trace.kinds.append(CorrectionKind.IDENTITY)
    raise ExhaustedError(trace, max_attempts)


NONRUS_LABELS = {(1, 0): "success", (0, 0): "reverse_rotation",
                 (0, 1): "clifford", (1, 1): "clifford"}


def nonrus_gb_success_prob(phi: float) -> float:
    return 0.5 * (np.cos(phi) ** 4 + np.sin(phi) ** 4)


def run_nonrus_gb(phi: float, rng: RngStream | None = None, target_state=None):
    """One shot of the offline-rotation gearbox.

    Returns (label, trace, state) where label is 'success',
    'reverse_rotation' or 'clifford'.
    """
    rng = rng or RngStream()
    base = _as_state(target_state)
    n0 = base.n_qubits
    a, b = n0, n0 + 1
    state = sk.apply_gates(_with_ancillas(base, 2), nonrus_gb_gates(phi, a, b, 0))
    bits, state = sk.measure_many(state, [a, b], rng)
    state = _drop_ancillas(sk.reset(state, [a, b], bits), 2)
    label = NONRUS_LABELS[bits]
    kind = {"success": CorrectionKind.NONE,
            "reverse_rotation": CorrectionKind.REVERSE_ROTATION,
            "clifford": CorrectionKind.CLIFFORD_EXP_I_PI4_X}[label]
    g = gb_angle([phi])
    trace = RunTrace(attempts=1, leaf_rotations=0, success=label == "success",
                     outcome_angle={"success": g, "reverse_rotation": -g}.get(label, 0.0),
                     corrections=int(label != "success"), records=[bits], kinds=[kind])
    return label, trace, state


# exact per-attempt outcome distributions from the simulator

def attempt_distribution(kind: str, phis, target_state=None) -> tuple:
    """(measured-record probabilities, success mask) for one attempt.

    ``kind`` is 'gb', 'par' (either GHZ outcome accepted, as on |0>),
    'par_plus' (only GHZ+), 'oaa' or 'nonrus'.
    """
    phis = _angles(phis)
    base = _as_state(target_state)
    n0 = base.n_qubits
    k = len(phis)
    if kind == "gb":
        anc = list(range(n0, n0 + k))
        gates = gb_gates(phis, anc, 0)
        measured, extra = anc, k
    elif kind in ("par", "par_plus"):
        anc = list(range(n0, n0 + k))
        gates = par_gates(phis, anc, 0)
        measured, extra = anc, k
    elif kind == "oaa":
        flag, anc = n0, list(range(n0 + 1, n0 + 1 + k))
        gates = oaa_par_gates(phis, flag, anc, 0)
        measured, extra = [flag] + anc, k + 1
    elif kind == "nonrus":
        gates = nonrus_gb_gates(phis[0], n0, n0 + 1, 0)
        measured, extra = [n0, n0 + 1], 2
    else:
        raise ValueError(f"unknown primitive {kind!r}")
    state = sk.apply_gates(_with_ancillas(base, extra), gates)
    probs = sk.outcome_probabilities(state, measured)
    m = len(measured)
    records = [tuple((i >> (m - 1 - j)) & 1 for j in range(m)) for i in range(2 ** m)]
    if kind == "gb" or kind == "oaa" or kind == "par_plus":
        ok = [not any(r) for r in records]
    elif kind == "par":
        ok = [par_record_label(r) != "identity" for r in records]
    else:
        ok = [NONRUS_LABELS[r] == "success" for r in records]
    return probs, np.array(ok)


def sample_attempts(kind: str, phis, rng: RngStream, trials: int,
                    max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> np.ndarray:
    """Attempts-until-success for many independent runs.

    Every attempt draws a full measurement record from the simulator's Born
    distribution; a run stops at its first accepted record.
    """
    probs, ok = attempt_distribution(kind, phis)
    attempts = np.zeros(trials, dtype=np.int64)
    alive = np.arange(trials)
    for _ in range(max_attempts):
        if alive.size == 0:
            break
        attempts[alive] += 1
        rec = sk.sample_outcomes(probs, rng, alive.size)
        alive = alive[~ok[rec]]
    if alive.size:
        raise ExhaustedError(RunTrace(attempts=max_attempts), max_attempts)
    return attempts


def rotations_per_attempt(kind: str, k: int) -> int:
    return {"gb": 2 * k, "par": k, "par_plus": k, "oaa": 3 * k, "nonrus": 2 * k}[kind]
