"""Cost model for nested RUS circuits and the reversible-circuit baselines.

A "rotation" is one use of a leaf angle (input-dependent or constant).
Mean and variance are propagated with the geometric-repeat rule: if one
attempt consumes children with costs x_j and succeeds with probability P,

    E = sum E(x_j) / P,
    V = sum V(x_j) / P + (1 - P) / P^2 * (sum E(x_j))^2.

PAR nodes acting on a target that is not |0> must be made deterministic
with amplitude amplification, which applies the PAR circuit three times
and adds a reflection.  ``expr_cost`` tracks that freshness down the tree;
``sample_expr_cost`` is the Monte Carlo counterpart that takes per-node
success probabilities from the state-vector simulator instead of the
closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import primitives as prim
from .simkernel import RngStream
from .synth import expr as E

DEFAULT_SEED = 20140519
SYNTHESIS_T_FACTOR = 1.15
TOFFOLI_T = 7
TOFFOLI_T_UP_TO_PHASE = 4


@dataclass(frozen=True)
class CostDist:
    mean: float
    variance: float = 0.0

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be nonnegative")

    def __add__(self, other: "CostDist") -> "CostDist":
        return CostDist(self.mean + other.mean, self.variance + other.variance)

    def scaled(self, copies: int) -> "CostDist":
        """Sum of ``copies`` independent draws."""
        return CostDist(copies * self.mean, copies * self.variance)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


ZERO = CostDist(0.0, 0.0)


class ZeroSuccessError(ArithmeticError):
    """A node can never succeed at the given inputs."""


@dataclass(frozen=True)
class RotationCostModel:
    """Per-leaf rotation cost plus the T cost of one Toffoli-like unit.

    A k-controlled X is charged ``toffoli_t * (k - 1)``.  ``input_value``
    (if set) is the charge for input-dependent leaves; constants always use
    ``value``.
    """
    mode: str
    value: float
    toffoli_t: float = TOFFOLI_T_UP_TO_PHASE
    input_value: float | None = None

    def __post_init__(self):
        if self.mode not in ("constant", "synthesis", "encoded"):
            raise ValueError(f"unknown cost mode {self.mode!r}")
        if self.value < 0 or self.toffoli_t < 0:
            raise ValueError("costs must be nonnegative")

    @classmethod
    def constant(cls, c: float, toffoli_t: float = TOFFOLI_T_UP_TO_PHASE) -> "RotationCostModel":
        if c < 0:
            raise ValueError("rotation cost must be nonnegative")
        return cls("constant", float(c), toffoli_t)

    @classmethod
    def synthesis(cls, eps: float, toffoli_t: float = TOFFOLI_T_UP_TO_PHASE) -> "RotationCostModel":
        if not 0 < eps < 1:
            raise ValueError("synthesis error must lie in (0, 1)")
        return cls("synthesis", synthesis_tcount(eps), toffoli_t)

    @classmethod
    def rotations(cls) -> "RotationCostModel":
        """Counts leaf uses only."""
        return cls("constant", 1.0, 0.0)

    @classmethod
    def encoded(cls, n: int, toffoli_t: float = TOFFOLI_T) -> "RotationCostModel":
        """Inputs prepared from n-bit registers: each input use costs one
        phase encoding; constants are synthesized at its per-rotation error."""
        return cls("encoded", enc_cost(n) / (n + 2), toffoli_t, enc_cost(n))

    def leaf(self, node) -> CostDist:
        if isinstance(node, E.Affine) and self.input_value is not None:
            return CostDist(self.input_value)
        return CostDist(self.value)

    def mcx(self, k: int) -> float:
        return self.toffoli_t * max(k - 1, 0)


def synthesis_tcount(eps: float) -> float:
    return SYNTHESIS_T_FACTOR * math.log2(1 / eps)


# repeat rules

def rus_repeat_cost(child_costs, success_prob: float) -> CostDist:
    """Total cost of repeating an attempt until success."""
    p = float(success_prob)
    if 1 < p <= 1 + 1e-12:      # summed branch probabilities can round above 1
        p = 1.0
    if not 0 < p <= 1:
        raise ValueError(f"success probability must lie in (0, 1], got {p}")
    m = sum(c.mean for c in child_costs)
    v = sum(c.variance for c in child_costs)
    en, vn = 1 / p, (1 - p) / p ** 2
    return CostDist(en * m, en * v + vn * m * m)


def par_tcount(phis, model: RotationCostModel) -> CostDist:
    """PAR on |0> with leaf rotations charged by ``model``."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    k = phis.size
    leaf = CostDist(model.value)
    return rus_repeat_cost([leaf.scaled(k), CostDist(model.mcx(k))], prim.par_success_prob(phis))


def gb_tcount(phis, model: RotationCostModel) -> CostDist:
    """Gearbox: every rotation is applied twice per attempt; success is Q."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    k = phis.size
    leaf = CostDist(model.value)
    return rus_repeat_cost([leaf.scaled(2 * k), CostDist(model.mcx(k))], prim.gb_success_prob(phis))


def oaa_overhead(k: int, model: RotationCostModel) -> float:
    # three PAR controlled-X gates plus the reflection about the all-zero
    # flag/ancilla state (a k-controlled Z)
    return 3 * model.mcx(k) + model.mcx(k)


# expression trees

def _child_angles(node, inputs) -> np.ndarray:
    return np.array([E.eval_angle(c, inputs) for c in node.children])


def expr_cost(expr, model: RotationCostModel, inputs=(), fresh: bool = True) -> CostDist:
    """Analytic cost of an expression tree.

    ``fresh`` says whether the node's target starts in |0>.  Gearbox
    children are applied forward on fresh ancillas and then inverted on
    used ones; PAR children always start fresh; in a Sum only the first
    term sees the fresh target.
    """
    if isinstance(expr, E.LEAVES):
        return model.leaf(expr)
    if isinstance(expr, E.Neg):
        return expr_cost(expr.child, model, inputs, fresh)
    if isinstance(expr, E.Sum):
        total = ZERO
        for i, c in enumerate(expr.children):
            total = total + expr_cost(c, model, inputs, fresh and i == 0)
        return total
    kids = expr.children
    k = len(kids)
    angles = _child_angles(expr, inputs)
    if isinstance(expr, E.GB):
        parts = [expr_cost(c, model, inputs, True) + expr_cost(c, model, inputs, False) for c in kids]
        return rus_repeat_cost(parts + [CostDist(model.mcx(k))], _nonzero(prim.gb_success_prob(angles)))
    if isinstance(expr, E.PAR):
        p = _nonzero(prim.par_success_prob(angles))
        if fresh:
            parts = [expr_cost(c, model, inputs, True) for c in kids]
            return rus_repeat_cost(parts + [CostDist(model.mcx(k))], p)
        parts = [expr_cost(c, model, inputs, True) + expr_cost(c, model, inputs, False).scaled(2)
                 for c in kids]
        return rus_repeat_cost(parts + [CostDist(oaa_overhead(k, model))], p)
    raise TypeError(f"not an expression node: {expr!r}")


def _nonzero(p: float) -> float:
    if not p > 0:
        raise ZeroSuccessError("a node has zero success probability at these inputs")
    return p


class _Sampler:
    """Monte Carlo over attempt counts with simulator success probabilities."""

    def __init__(self, model, inputs, rng: RngStream, max_attempts: int):
        self.model = model
        self.inputs = inputs
        self.gen = rng.generator
        self.max_attempts = max_attempts
        self._p = {}

    def success(self, node, fresh: bool) -> float:
        kind = "gb" if isinstance(node, E.GB) else ("par" if fresh else "oaa")
        key = (id(node), kind)
        if key not in self._p:
            probs, ok = prim.attempt_distribution(kind, _child_angles(node, self.inputs))
            self._p[key] = float(min(probs[ok].sum(), 1.0))
        return self._p[key]

    def draw(self, node, fresh: bool, n: int) -> np.ndarray:
        if isinstance(node, E.LEAVES):
            return np.full(n, self.model.leaf(node).mean)
        if isinstance(node, E.Neg):
            return self.draw(node.child, fresh, n)
        if isinstance(node, E.Sum):
            return sum(self.draw(c, fresh and i == 0, n) for i, c in enumerate(node.children))
        p = _nonzero(self.success(node, fresh))
        attempts = self.gen.geometric(p, size=n)
        if attempts.max(initial=0) > self.max_attempts:
            raise prim.ExhaustedError(prim.RunTrace(attempts=int(attempts.max())), self.max_attempts)
        m = int(attempts.sum())
        k = len(node.children)
        if isinstance(node, E.GB):
            per = np.full(m, float(self.model.mcx(k)))
            for c in node.children:
                per += self.draw(c, True, m) + self.draw(c, False, m)
        elif fresh:
            per = np.full(m, float(self.model.mcx(k)))
            for c in node.children:
                per += self.draw(c, True, m)
        else:
            per = np.full(m, float(oaa_overhead(k, self.model)))
            for c in node.children:
                per += self.draw(c, True, m) + self.draw(c, False, m) + self.draw(c, False, m)
        starts = np.concatenate(([0], np.cumsum(attempts)[:-1]))
        return np.add.reduceat(per, starts) if n else per[:0]


def sample_expr_cost(expr, model: RotationCostModel, inputs, rng: RngStream, trials: int,
                     fresh: bool = True, max_attempts: int = prim.DEFAULT_MAX_ATTEMPTS) -> np.ndarray:
    """Per-trial total costs of executing ``expr`` once."""
    if trials < 1:
        raise ValueError("trials must be positive")
    return _Sampler(model, inputs, rng, max_attempts).draw(expr, fresh, trials)


def primitive_cost_samples(kind: str, phis, model: RotationCostModel, rng: RngStream,
                           trials: int) -> np.ndarray:
    """Costs from attempt counts whose records come from ``sample_attempts``."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    k = phis.size
    attempts = prim.sample_attempts(kind, phis, rng, trials)
    per = model.value * prim.rotations_per_attempt(kind, k) + model.mcx(k)
    return attempts * per


def gbk_expr(k: int):
    node = E.x(0)
    for _ in range(k):
        node = E.GB(node)
    return node


def gbk_expected_rotations(x: float, k: int, rng: RngStream, trials: int = 10_000) -> float:
    """Mean leaf uses of the k-fold composed gearbox at input x."""
    if not 0 <= k <= 8:
        raise ValueError("k must lie in [0, 8]")
    return float(sample_expr_cost(gbk_expr(k), RotationCostModel.rotations(), [x], rng, trials).mean())


# flattened circuits

def _q4(t):
    return np.cos(t) ** 4 + np.sin(t) ** 4


def flattened_gb_success(x):
    """Probability that the three stages of the flattened single-input
    gearbox all succeed."""
    x = np.asarray(x, dtype=float)
    out = _q4(x / 2 + np.pi / 4) ** 2 * _q4(x)
    return out if out.ndim else float(out)


def flattened_par_success(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    par = np.cos(a) ** 2 * np.cos(b) ** 2 + np.sin(a) ** 2 * np.sin(b) ** 2
    out = _q4(a / 2 + np.pi / 4) * _q4(b / 2 + np.pi / 4) * par
    return out if out.ndim else float(out)


# caching through phase estimation

def cache_cost(kappa: float, eps: float, delta: float, n1: float, n2: float) -> tuple:
    """(extra qubits t, rotations 2^t N2 + N1) for caching an inner result."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if not 0 < eps < 1 or not 0 < delta < 1:
        raise ValueError("eps and delta must lie in (0, 1)")
    if n1 < 0 or n2 < 0:
        raise ValueError("rotation counts must be nonnegative")
    t = math.ceil(math.log2(kappa / eps)) + math.ceil(math.log2(2 + 1 / (2 * delta)))
    return t, 2.0 ** t * n2 + n1


# reversible baselines

def enc_cost(n: int) -> float:
    """T-count of encoding the top n+2 bits of a register as a rotation."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return SYNTHESIS_T_FACTOR * (n + 2) * math.log2((n + 2) * 2.0 ** (n + 2))


def multi_cnot_tcount(k: int) -> int:
    """T-count of a k-fold controlled NOT with one ancilla."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return {2: 7, 3: 22, 4: 52}.get(k, 32 * k - 84)


def carry_ripple_tcount(n: int) -> float:
    return 18 * n * n + 18 * n


@dataclass(frozen=True)
class BaselineReport:
    method: str
    n: int
    tcount: float
    qubits: int
    mode: str = "formula"

    def __post_init__(self):
        if not (self.tcount > 0 and self.qubits > 0):
            raise ValueError("tcount and qubits must be positive")

    def row(self) -> dict:
        return {"method": self.method, "n": self.n, "tcount": self.tcount,
                "qubits": self.qubits, "mode": self.mode}


BASELINE_COLUMNS = ("method", "n", "tcount", "qubits", "mode")
BASELINE_METHODS = ("carry_ripple", "table_lookup_mult", "euclid", "newton", "table_lookup_recip")


def _log2n(n: int) -> float:
    return math.log2(n)


def baseline_cost(method: str, n: int, table_mode: bool = False) -> BaselineReport:
    """Reversible-circuit cost followed by phase encoding of the output.

    ``table_mode`` selects the variants that match the published tables
    where they differ from the written formulas (Newton's T-count without
    the iteration log factor, Euclid's qubit count).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    enc = enc_cost(n)
    mode = "table" if table_mode else "formula"
    if method == "carry_ripple":
        return BaselineReport(method, n, 2 * carry_ripple_tcount(n) + enc, 2 * n, mode)
    if method == "table_lookup_mult":
        if n == 2:
            rev = 6656.0
        else:
            rev = 2 * 2.0 ** (2 * n) * (64 * n * n + 44 * n - 168)
        return BaselineReport(method, n, rev + enc, 3, mode)
    if method == "euclid":
        q = 5 * n + _log2n(n) + 1 if table_mode else 5 * n + 4 * _log2n(n) + 1
        return BaselineReport(method, n, 2 * 1890 * n * n + enc, int(round(q)), mode)
    if method == "newton":
        per = 144 * n * n + 200 * n - 28
        t = 2 * per + enc if table_mode else 2 * per * _log2n(n) + enc
        return BaselineReport(method, n, t, int(round((10 * n - 4) * _log2n(n) + 1)), mode)
    if method == "table_lookup_recip":
        if n == 2:
            rev = 8 * 2 * 7
        elif n == 4:
            rev = 2 ** 5 * 5 * 52
        elif n >= 5:
            rev = 2.0 ** (n + 1) * (32 * n * n - 84 * n)
        else:
            raise ValueError("table-lookup reciprocal is tabulated for n = 2, 4 and n >= 5")
        return BaselineReport(method, n, rev + enc, 3, mode)
    raise ValueError(f"unknown baseline {method!r}; choose from {BASELINE_METHODS}")


# RUS multiplier estimate

MULT_INPUT_MAX = 0.5


@dataclass(frozen=True)
class MultiplierEstimate:
    name: str
    n: int
    slices: int
    tcount: float
    tcount_std: float
    qubits: int


def multiplier_slices(expr, n: int, x_max: float = MULT_INPUT_MAX, budget: float = 0.5) -> int:
    """Smallest r such that r^2 copies at x/r keep the worst-case product
    error within ``budget`` of the 2^-(n+1) target."""
    target = budget * 2.0 ** -(n + 1)
    for r in range(1, 100_000):
        y = x_max / r
        if r * r * abs(E.eval_angle(expr, [y, y]) - y * y) <= target:
            return r
    raise ValueError("no slicing meets the error target")


def multiplier_estimate(name: str, n: int, rng: RngStream, trials: int = 2000,
                        x_max: float = MULT_INPUT_MAX) -> MultiplierEstimate:
    """Monte Carlo T-count of an RUS multiplier on n-bit inputs.

    Inputs are worst-case angles ``x_max``.  Half of the 2^-(n+1) error
    budget goes to the product approximation, which fixes the slicing r;
    every input use costs one phase encoding and every Toffoli 7 T.  With
    more than one slice each copy acts on a used target, so every slice is
    run with amplitude amplification and one extra flag qubit.
    """
    from .synth.multiply import multiplier
    expr = multiplier(name)
    r = multiplier_slices(expr, n, x_max)
    model = RotationCostModel.encoded(n)
    y = x_max / r
    per_slice = sample_expr_cost(expr, model, [y, y], rng, trials, fresh=(r == 1))
    slices = r * r
    mean = slices * per_slice.mean()
    std = math.sqrt(slices) * per_slice.std()
    k = len(expr.children)
    qubits = 1 + k + (0 if r == 1 else 1)
    return MultiplierEstimate(name, n, r, float(mean), float(std), qubits)


def multiplier_table(bits=(2, 4, 8, 16), names=("m4", "m6"), seed: int = DEFAULT_SEED,
                     trials: int = 10_000) -> dict:
    """{(name, n): MultiplierEstimate} with one spawned stream per cell."""
    rng = RngStream(seed)
    out = {}
    for name in names:
        for i, n in enumerate(bits):
            stream = rng.spawn(10 * i + (name == "m6"))
            out[name, n] = multiplier_estimate(name, n, stream, trials=min(trials, 20_000))
    return out
