"""RUS expression trees: evaluation and a prefix text format.

Leaves are constants or affine functions of the inputs; ``GB`` and ``PAR``
nodes compose their children's rotations, ``Neg`` flips a sign and ``Sum``
is serial composition on one output qubit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import primitives as prim


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Affine:
    """``scale * inputs[index] + offset``."""
    index: int
    scale: float = 1.0
    offset: float = 0.0


@dataclass(frozen=True)
class GB:
    children: tuple

    def __init__(self, *children):
        object.__setattr__(self, "children", _flatten(children))


@dataclass(frozen=True)
class PAR:
    children: tuple

    def __init__(self, *children):
        object.__setattr__(self, "children", _flatten(children))


@dataclass(frozen=True)
class Neg:
    child: object


@dataclass(frozen=True)
class Sum:
    children: tuple

    def __init__(self, *children):
        object.__setattr__(self, "children", _flatten(children))


def _flatten(children) -> tuple:
    if len(children) == 1 and isinstance(children[0], (list, tuple)):
        children = children[0]
    out = tuple(children)
    if not out:
        raise ValueError("combinator needs at least one child")
    return out


RusExpr = Const | Affine | GB | PAR | Neg | Sum
LEAVES = (Const, Affine)


def x(index: int = 0) -> Affine:
    """The bare input angle ``inputs[index]``."""
    return Affine(index, 1.0, 0.0)


def arity(expr) -> int:
    """One more than the largest input index referenced."""
    if isinstance(expr, Const):
        return 0
    if isinstance(expr, Affine):
        return expr.index + 1
    if isinstance(expr, Neg):
        return arity(expr.child)
    return max(arity(c) for c in expr.children)


def children(expr) -> tuple:
    if isinstance(expr, LEAVES):
        return ()
    if isinstance(expr, Neg):
        return (expr.child,)
    return expr.children


def eval_angle(expr, inputs: Sequence[float] = ()) -> float:
    """Angle the expression rotates by when every sub-circuit succeeds."""
    inputs = [float(v) for v in np.ravel(inputs)]
    if arity(expr) > len(inputs):
        raise ValueError(f"expression needs {arity(expr)} inputs, got {len(inputs)}")
    return _eval(expr, inputs)


def _eval(expr, inputs) -> float:
    if isinstance(expr, Const):
        return float(expr.value)
    if isinstance(expr, Affine):
        return expr.scale * inputs[expr.index] + expr.offset
    if isinstance(expr, Neg):
        return -_eval(expr.child, inputs)
    vals = [_eval(c, inputs) for c in expr.children]
    if isinstance(expr, Sum):
        return float(sum(vals))
    if isinstance(expr, GB):
        return prim.gb_angle(vals)
    if isinstance(expr, PAR):
        return prim.par_angle(vals)
    raise TypeError(f"not an expression node: {expr!r}")


def eval_vec(expr, *inputs):
    """Vectorized ideal evaluation over numpy arrays of inputs."""
    if isinstance(expr, Const):
        return np.broadcast_to(float(expr.value), np.broadcast(*inputs).shape if inputs else ())
    if isinstance(expr, Affine):
        return expr.scale * np.asarray(inputs[expr.index], dtype=float) + expr.offset
    if isinstance(expr, Neg):
        return -eval_vec(expr.child, *inputs)
    vals = [eval_vec(c, *inputs) for c in expr.children]
    if isinstance(expr, Sum):
        return sum(vals)
    if isinstance(expr, GB):
        s2 = np.prod([np.sin(v) ** 2 for v in vals], axis=0)
        return np.arctan2(s2, 1.0 - s2)
    if isinstance(expr, PAR):
        return np.arctan(np.prod([np.tan(v) for v in vals], axis=0))
    raise TypeError(f"not an expression node: {expr!r}")


def leaf_count(expr) -> int:
    if isinstance(expr, LEAVES):
        return 1
    return sum(leaf_count(c) for c in children(expr))


# text format

_NAMES = {"const": Const, "aff": Affine, "gb": GB, "par": PAR, "neg": Neg, "sum": Sum}


class ExprParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def to_prefix(expr) -> str:
    if isinstance(expr, Const):
        return f"const({expr.value!r})"
    if isinstance(expr, Affine):
        return f"aff({expr.index},{expr.scale!r},{expr.offset!r})"
    if isinstance(expr, Neg):
        return f"neg({to_prefix(expr.child)})"
    name = {GB: "GB", PAR: "PAR", Sum: "sum"}[type(expr)]
    return f"{name}(" + ", ".join(to_prefix(c) for c in expr.children) + ")"


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_]+)|(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(?P<sym>[(),]))")


def _tokenize(text: str) -> list:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_expr(text: str):
    """Parse e.g. ``PAR(aff(0,1,0), GB(const(0.6155), aff(0,1,0)))``."""
    tokens = _tokenize(text)
    expr, i = _parse(tokens, 0)
    if tokens[i][0] != "end":
        raise ExprParseError("trailing input", tokens[i][2])
    return expr


def _expect(tokens, i, value):
    kind, tok, pos = tokens[i]
    if tok != value:
        raise ExprParseError(f"expected {value!r}, found {tok or 'end of input'!r}", pos)
    return i + 1


def _parse(tokens, i):
    kind, tok, pos = tokens[i]
    if kind != "name" or tok.lower() not in _NAMES:
        raise ExprParseError(f"expected a node name, found {tok or 'end of input'!r}", pos)
    cls = _NAMES[tok.lower()]
    i = _expect(tokens, i + 1, "(")
    if cls in (Const, Affine):
        nums = []
        while True:
            kind, num, npos = tokens[i]
            if kind != "num":
                raise ExprParseError(f"expected a number, found {num or 'end of input'!r}", npos)
            nums.append(num)
            i += 1
            if tokens[i][1] == ",":
                i += 1
                continue
            break
        i = _expect(tokens, i, ")")
        if cls is Const:
            if len(nums) != 1:
                raise ExprParseError("const takes one number", pos)
            return Const(float(nums[0])), i
        if len(nums) not in (1, 2, 3) or not re.fullmatch(r"\+?\d+", nums[0]):
            raise ExprParseError("aff takes (index[, scale[, offset]])", pos)
        vals = [float(v) for v in nums[1:]]
        return Affine(int(nums[0]), *vals), i
    kids = []
    while True:
        child, i = _parse(tokens, i)
        kids.append(child)
        if tokens[i][1] == ",":
            i += 1
            continue
        break
    i = _expect(tokens, i, ")")
    if cls is Neg:
        if len(kids) != 1:
            raise ExprParseError("neg takes one child", pos)
        return Neg(kids[0]), i
    return cls(*kids), i
