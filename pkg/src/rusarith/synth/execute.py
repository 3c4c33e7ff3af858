"""Gate-level execution of expression trees on the state-vector simulator.

Each node applies exp(-i s f X) to a target qubit, with s = +-1.  Children
act on freshly appended ancillas and are themselves executed recursively,
so failed attempts, corrections and leaf rotations are all real simulator
events rather than sampled from closed forms.  PAR nodes whose target is
not known to be |0> run the amplitude-amplified three-application form.
"""

from __future__ import annotations

import numpy as np

from .. import primitives as prim
from .. import simkernel as sk
from ..simkernel import (Hadamard, MultiControlledIX, PauliZ, PhaseS, RngStream, RotX,
                         StateVector, ZeroReflection)
from . import expr as E


class _Child:
    __slots__ = ("node", "sign", "qubit", "fresh")

    def __init__(self, node, sign, qubit, fresh):
        self.node, self.sign, self.qubit, self.fresh = node, sign, qubit, fresh

    def inverse(self):
        return _Child(self.node, -self.sign, self.qubit, False)


def _invert(ops) -> list:
    return [op.inverse() if isinstance(op, _Child) else sk.inverse_gate(op) for op in reversed(ops)]


class Executor:
    def __init__(self, inputs, rng: RngStream, max_attempts: int):
        self.inputs = list(inputs)
        self.rng = rng
        self.max_attempts = max_attempts
        self.trace = prim.RunTrace()

    def _ops(self, state, ops):
        for op in ops:
            if isinstance(op, _Child):
                state = self.apply(op.node, state, op.qubit, op.sign, op.fresh)
            else:
                state = sk.apply_gate(state, op)
        return state

    def apply(self, node, state: StateVector, target: int, sign: int = 1,
              fresh: bool = False) -> StateVector:
        if isinstance(node, E.Const):
            self.trace.leaf_rotations += 1
            return sk.apply_gate(state, RotX(target, sign * node.value))
        if isinstance(node, E.Affine):
            self.trace.leaf_rotations += 1
            angle = node.scale * self.inputs[node.index] + node.offset
            return sk.apply_gate(state, RotX(target, sign * angle))
        if isinstance(node, E.Neg):
            return self.apply(node.child, state, target, -sign, fresh)
        if isinstance(node, E.Sum):
            for i, c in enumerate(node.children):
                state = self.apply(c, state, target, sign, fresh and i == 0)
            return state
        if isinstance(node, E.GB):
            return self._gb(node, state, target, sign)
        if isinstance(node, E.PAR):
            if fresh:
                return self._par_fresh(node, state, target, sign)
            return self._par_oaa(node, state, target, sign)
        raise TypeError(f"not an expression node: {node!r}")

    def _repeat(self, state, ops, measured, on_fail):
        """Run ``ops`` and measure until the record is accepted.

        ``on_fail(state, bits)`` returns (accepted, state)."""
        m = len(measured)
        n0 = state.n_qubits - m
        for _ in range(self.max_attempts):
            self.trace.attempts += 1
            state = self._ops(state, ops)
            bits, state = sk.measure_many(state, measured, self.rng)
            state = sk.reset(state, measured, bits)
            self.trace.records.append(bits)
            done, state = on_fail(state, bits)
            if done:
                return prim._drop_ancillas(state, m)
        raise prim.ExhaustedError(self.trace, self.max_attempts)

    def _gb(self, node, state, target, sign):
        k = len(node.children)
        n0 = state.n_qubits
        anc = list(range(n0, n0 + k))
        prep = [_Child(c, 1, a, True) for c, a in zip(node.children, anc)]
        ops = prep + [MultiControlledIX(tuple(anc), target, 3 if sign > 0 else 1)] + _invert(prep)

        def check(st, bits):
            if not any(bits):
                return True, st
            self.trace.corrections += 1
            return False, sk.apply_gate(st, RotX(target, sign * np.pi / 4))

        return self._repeat(prim._with_ancillas(state, k), ops, anc, check)

    def _par_core(self, node, anc, target, sign, phase_fix):
        k = len(node.children)
        ops = [_Child(c, sign if i == 0 else 1, a, True)
               for i, (c, a) in enumerate(zip(node.children, anc))]
        exponent = k - 1
        if phase_fix and k % 2 == 0:
            ops.append(PhaseS(anc[0]))
            exponent = k - 2
        ops.append(MultiControlledIX(tuple(anc), target, exponent))
        return ops + sk.ghz_inverse_gates(anc)

    def _par_fresh(self, node, state, target, sign):
        k = len(node.children)
        n0 = state.n_qubits
        anc = list(range(n0, n0 + k))
        ops = self._par_core(node, anc, target, sign, False)

        def check(st, bits):
            label = prim.par_record_label(bits)
            if label == "identity":
                return False, st
            if label == "minus":
                # target started in |0>, so Z flips the sign of the rotation
                self.trace.corrections += 1
                st = sk.apply_gate(st, PauliZ(target))
            return True, st

        return self._repeat(prim._with_ancillas(state, k), ops, anc, check)

    def _par_oaa(self, node, state, target, sign):
        k = len(node.children)
        n0 = state.n_qubits
        flag, anc = n0, list(range(n0 + 1, n0 + 1 + k))
        u = [Hadamard(flag)] + self._par_core(node, anc, target, sign, True)
        ops = (u + [ZeroReflection((flag, anc[0]))] + _invert(u)
               + [ZeroReflection((flag,) + tuple(anc))] + [_Child(op.node, op.sign, op.qubit, False)
                                                           if isinstance(op, _Child) else op for op in u])
        return self._repeat(prim._with_ancillas(state, k + 1), ops, [flag] + anc,
                            lambda st, bits: (not any(bits), st))


def run_expr(expr, inputs=(), target_state=None, target_qubit: int = 0,
             rng: RngStream | None = None, fresh: bool | None = None,
             max_attempts: int = prim.DEFAULT_MAX_ATTEMPTS):
    """Apply exp(-i f X) for the expression's ideal angle f.

    Returns (state, trace).  ``fresh`` defaults to True only when no target
    state is given (the target is then |0>).
    """
    rng = rng or RngStream()
    state = prim._as_state(target_state)
    if fresh is None:
        fresh = target_state is None
    ex = Executor(inputs, rng, max_attempts)
    out = ex.apply(expr, state, target_qubit, 1, fresh)
    ex.trace.success = True
    ex.trace.outcome_angle = E.eval_angle(expr, inputs)
    return out, ex.trace


def rotation_angle(state: StateVector) -> float:
    """theta in [0, pi/2] with state = exp(-i theta X)|0> up to phase."""
    if state.n_qubits != 1:
        raise ValueError("expected a single-qubit state")
    a0, a1 = state.amplitudes
    return float(np.arctan2(abs(a1), abs(a0)))
