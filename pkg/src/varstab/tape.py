"""Flat postfix tapes compiled from expression trees.

The evaluation kernels (compiled or pure Python) execute tapes rather than
walking trees: a tape is a pair of parallel arrays (opcode, numeric argument)
plus the worst-case stack depth.  Domain violations during tape evaluation
surface as NaN/inf instead of exceptions so that tight integrator loops can
run unguarded; use :func:`varstab.expr.eval2` when diagnostics are needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex

OP_CONST = 0
OP_VARY = 1
OP_VARX = 2
OP_NEG = 3
OP_ADD = 4
OP_SUB = 5
OP_MUL = 6
OP_DIV = 7
OP_POW = 8
OP_SIN = 9
OP_COS = 10
OP_TAN = 11
OP_EXP = 12
OP_LOG = 13
OP_SQRT = 14

_CALL_OPS = {"sin": OP_SIN, "cos": OP_COS, "tan": OP_TAN,
             "exp": OP_EXP, "log": OP_LOG, "sqrt": OP_SQRT}
_BIN_OPS = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}


@dataclass(frozen=True)
class Tape:
    ops: np.ndarray      # int32, one opcode per instruction
    args: np.ndarray     # float64, constant/exponent slot (0 where unused)
    stack_need: int
    uses_x: bool


def compile_tape(e: ex.Expr) -> Tape:
    ops: list[int] = []
    args: list[float] = []
    uses_x = False

    def emit(op, arg=0.0):
        ops.append(op)
        args.append(float(arg))

    def walk(node):
        nonlocal uses_x
        if isinstance(node, ex.Const):
            emit(OP_CONST, node.value)
        elif isinstance(node, ex.Var):
            if node.name == "y":
                emit(OP_VARY)
            elif node.name == "x":
                emit(OP_VARX)
                uses_x = True
            else:
                raise ValueError(f"cannot compile variable {node.name!r}")
        elif isinstance(node, ex.Neg):
            walk(node.arg)
            emit(OP_NEG)
        elif isinstance(node, ex.Call):
            walk(node.arg)
            emit(_CALL_OPS[node.fn])
        elif isinstance(node, ex.Bin):
            walk(node.lhs)
            walk(node.rhs)
            emit(_BIN_OPS[node.op])
        elif isinstance(node, ex.Pow):
            walk(node.base)
            emit(OP_POW, node.exponent)
        else:
            raise TypeError(f"not an Expr: {node!r}")

    walk(e)

    depth = 0
    worst = 0
    for op in ops:
        if op in (OP_CONST, OP_VARY, OP_VARX):
            depth += 1
        elif op in (OP_ADD, OP_SUB, OP_MUL, OP_DIV):
            depth -= 1
        worst = max(worst, depth)
    return Tape(
        ops=np.asarray(ops, dtype=np.int32),
        args=np.asarray(args, dtype=np.float64),
        stack_need=worst,
        uses_x=uses_x,
    )
