"""Pure-Python evaluation kernels.

Reference implementation of the hot loops: tape evaluation (plain values and
order-2 jets), uniform cubic Hermite tables, and the fixed-step RK4
integrators for the reduced and full controlled flows.  The compiled
extension (``_core``) implements the same algorithms instruction for
instruction; ``tests/test_kernels.py`` pins the two together.

Domain violations yield NaN/inf rather than raising, so the integrators can
detect them with a single finiteness check per step.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

STATUS_OK = 0
STATUS_LEFT_INTERVAL = 1
STATUS_NONFINITE = 2

_NAN = float("nan")


class TapeFn:
    """Evaluable compiled expression (see varstab.tape for the encoding)."""

    __slots__ = ("ops", "args", "uses_x")

    def __init__(self, ops, args, uses_x):
        self.ops = [int(o) for o in ops]
        self.args = [float(a) for a in args]
        self.uses_x = bool(uses_x)

    def val(self, y, x=0.0):
        st = []
        push = st.append
        for op, arg in zip(self.ops, self.args):
            if op == 0:
                push(arg)
            elif op == 1:
                push(y)
            elif op == 2:
                push(x)
            elif op == 3:
                st[-1] = -st[-1]
            elif op == 4:
                b = st.pop(); st[-1] += b
            elif op == 5:
                b = st.pop(); st[-1] -= b
            elif op == 6:
                b = st.pop(); st[-1] *= b
            elif op == 7:
                b = st.pop()
                st[-1] = st[-1] / b if b != 0.0 else _NAN
            elif op == 8:
                v = st[-1]
                if v < 0.0 and arg != int(arg):
                    st[-1] = _NAN
                elif v == 0.0 and arg < 0.0:
                    st[-1] = _NAN
                else:
                    st[-1] = v ** arg
            elif op == 9:
                st[-1] = math.sin(st[-1])
            elif op == 10:
                st[-1] = math.cos(st[-1])
            elif op == 11:
                st[-1] = math.tan(st[-1])
            elif op == 12:
                v = st[-1]
                st[-1] = math.exp(v) if v < 709.0 else math.inf
            elif op == 13:
                v = st[-1]
                st[-1] = math.log(v) if v > 0.0 else _NAN
            else:
                v = st[-1]
                st[-1] = math.sqrt(v) if v >= 0.0 else _NAN
        return st[-1]

    def jet(self, y):
        """(value, d/dy, d2/dy2) at y.  Trees using x have no jet."""
        sv, s1, s2 = [], [], []
        for op, arg in zip(self.ops, self.args):
            if op == 0:
                sv.append(arg); s1.append(0.0); s2.append(0.0)
            elif op == 1:
                sv.append(y); s1.append(1.0); s2.append(0.0)
            elif op == 2:
                sv.append(_NAN); s1.append(_NAN); s2.append(_NAN)
            elif op == 3:
                sv[-1] = -sv[-1]; s1[-1] = -s1[-1]; s2[-1] = -s2[-1]
            elif op == 4:
                bv = sv.pop(); b1 = s1.pop(); b2 = s2.pop()
                sv[-1] += bv; s1[-1] += b1; s2[-1] += b2
            elif op == 5:
                bv = sv.pop(); b1 = s1.pop(); b2 = s2.pop()
                sv[-1] -= bv; s1[-1] -= b1; s2[-1] -= b2
            elif op == 6:
                bv = sv.pop(); b1 = s1.pop(); b2 = s2.pop()
                av = sv[-1]; a1 = s1[-1]
                sv[-1] = av * bv
                s1[-1] = a1 * bv + av * b1
                s2[-1] = s2[-1] * bv + 2.0 * a1 * b1 + av * b2
            elif op == 7:
                bv = sv.pop(); b1 = s1.pop(); b2 = s2.pop()
                if bv == 0.0:
                    sv[-1] = _NAN; s1[-1] = _NAN; s2[-1] = _NAN
                else:
                    q = sv[-1] / bv
                    q1 = (s1[-1] - q * b1) / bv
                    sv[-1] = q
                    s1[-1] = q1
                    s2[-1] = (s2[-1] - q * b2 - 2.0 * q1 * b1) / bv
            elif op == 8:
                v = sv[-1]
                c = arg
                if (v < 0.0 and c != int(c)) or (v == 0.0 and c < 2.0 and c not in (0.0, 1.0)):
                    f = f1 = f2 = _NAN
                elif v == 0.0:
                    f = 0.0 if c > 0.0 else 1.0
                    f1 = c * v ** (c - 1.0) if c >= 1.0 else 0.0
                    f2 = c * (c - 1.0) * v ** (c - 2.0) if c >= 2.0 or c in (0.0, 1.0) else 0.0
                else:
                    f = v ** c
                    f1 = c * v ** (c - 1.0)
                    f2 = c * (c - 1.0) * v ** (c - 2.0)
                _apply_chain(sv, s1, s2, f, f1, f2)
            elif op == 9:
                v = sv[-1]
                _apply_chain(sv, s1, s2, math.sin(v), math.cos(v), -math.sin(v))
            elif op == 10:
                v = sv[-1]
                _apply_chain(sv, s1, s2, math.cos(v), -math.sin(v), -math.cos(v))
            elif op == 11:
                t = math.tan(sv[-1])
                d = 1.0 + t * t
                _apply_chain(sv, s1, s2, t, d, 2.0 * t * d)
            elif op == 12:
                v = sv[-1]
                e = math.exp(v) if v < 709.0 else math.inf
                _apply_chain(sv, s1, s2, e, e, e)
            elif op == 13:
                v = sv[-1]
                if v > 0.0:
                    _apply_chain(sv, s1, s2, math.log(v), 1.0 / v, -1.0 / (v * v))
                else:
                    sv[-1] = _NAN; s1[-1] = _NAN; s2[-1] = _NAN
            else:
                v = sv[-1]
                if v > 0.0:
                    s = math.sqrt(v)
                    _apply_chain(sv, s1, s2, s, 0.5 / s, -0.25 / (s * v))
                else:
                    sv[-1] = _NAN; s1[-1] = _NAN; s2[-1] = _NAN
        return sv[-1], s1[-1], s2[-1]


def _apply_chain(sv, s1, s2, f, f1, f2):
    u1 = s1[-1]
    sv[-1], s1[-1], s2[-1] = f, f1 * u1, f2 * u1 * u1 + f1 * s2[-1]


class HTableFn:
    """Cubic Hermite interpolant on a uniform grid (value + derivative nodes)."""

    __slots__ = ("x0", "dx", "vals", "ders", "n")

    def __init__(self, x0, dx, vals, ders):
        self.x0 = float(x0)
        self.dx = float(dx)
        self.vals = [float(v) for v in vals]
        self.ders = [float(v) for v in ders]
        self.n = len(self.vals)
        self.uses_x = False

    uses_x = False

    def _locate(self, y):
        i = int(math.floor((y - self.x0) / self.dx))
        if i < 0:
            i = 0
        elif i > self.n - 2:
            i = self.n - 2
        t = (y - (self.x0 + i * self.dx)) / self.dx
        return i, t

    def val(self, y, x=0.0):
        i, t = self._locate(y)
        v0, v1 = self.vals[i], self.vals[i + 1]
        m0, m1 = self.ders[i] * self.dx, self.ders[i + 1] * self.dx
        t2 = t * t
        t3 = t2 * t
        return ((2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * m0
                + (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * m1)

    def jet(self, y):
        i, t = self._locate(y)
        v0, v1 = self.vals[i], self.vals[i + 1]
        m0, m1 = self.ders[i] * self.dx, self.ders[i + 1] * self.dx
        t2 = t * t
        t3 = t2 * t
        v = ((2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * m0
             + (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * m1)
        d = ((6.0 * t2 - 6.0 * t) * v0 + (3.0 * t2 - 4.0 * t + 1.0) * m0
             + (-6.0 * t2 + 6.0 * t) * v1 + (3.0 * t2 - 2.0 * t) * m1) / self.dx
        dd = ((12.0 * t - 6.0) * v0 + (6.0 * t - 4.0) * m0
              + (-12.0 * t + 6.0) * v1 + (6.0 * t - 2.0) * m1) / (self.dx * self.dx)
        return v, d, dd


def make_tape_fn(ops, args, uses_x):
    return TapeFn(ops, args, uses_x)


def make_htable_fn(x0, dx, vals, ders):
    return HTableFn(x0, dx, vals, ders)


def jet_many(fn, ys):
    out = np.empty((len(ys), 3))
    for k, y in enumerate(ys):
        out[k] = fn.jet(float(y))
    return out


def val_many(fn, ys):
    out = np.empty(len(ys))
    for k, y in enumerate(ys):
        out[k] = fn.val(float(y))
    return out


class U2Context:
    """Everything the full integrator needs to evaluate the extra control
    u2 = f(x, y) * (box*xd + dia*yd) and push it through the inverse metric."""

    __slots__ = ("a11", "fa12", "fa22", "frho2", "ff")

    def __init__(self, a11, fa12, fa22, frho2, ff):
        self.a11 = float(a11)
        self.fa12 = fa12
        self.fa22 = fa22
        self.frho2 = frho2
        self.ff = ff


def make_u2_context(a11, fa12, fa22, frho2, ff):
    return U2Context(a11, fa12, fa22, frho2, ff)


def _u2_accel(ctx, fT, fU, fR, fS, x, y, xd, yd):
    """Return (a11^inv*u2, a12^inv*u2) for the current state."""
    a12 = ctx.fa12.val(y)
    a22 = ctx.fa22.val(y)
    det = ctx.a11 * a22 - a12 * a12
    inv11 = a22 / det
    inv12 = -a12 / det
    uv, u1, _ = fU.jet(y)
    sv, sp, _ = fS.jet(y)
    tv = fT.val(y)
    rv = fR.val(y)
    phi12 = -u1 + sv * tv
    phi22 = -sp + rv * sv
    nu = phi12 / phi22
    rho2 = ctx.frho2.val(y)
    box = inv11 - nu * inv12
    dia = -nu * inv11 + (nu * nu + rho2) * inv12
    u2 = ctx.ff.val(y, x) * (box * xd + dia * yd)
    return inv11 * u2, inv12 * u2, u2


def rk4_full(fT, fU, fR, fS, state0, h, n, ymin, ymax, u2ctx=None):
    """Classical RK4 on (x, y, xd, yd) with optional dissipative control.

    Returns (status, k_done, out) where out[0:k_done+1] are valid samples.
    """
    out = np.empty((n + 1, 4))
    x, y, xd, yd = (float(v) for v in state0)
    out[0] = (x, y, xd, yd)

    def rhs(x, y, xd, yd):
        tv = fT.val(y)
        uv = fU.val(y)
        rv = fR.val(y)
        sv = fS.val(y)
        xdd = tv * yd * yd + uv
        ydd = rv * yd * yd + sv
        if u2ctx is not None:
            ax, ay, _ = _u2_accel(u2ctx, fT, fU, fR, fS, x, y, xd, yd)
            xdd += ax
            ydd += ay
        return xd, yd, xdd, ydd

    for k in range(n):
        k1 = rhs(x, y, xd, yd)
        k2 = rhs(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1],
                 xd + 0.5 * h * k1[2], yd + 0.5 * h * k1[3])
        k3 = rhs(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1],
                 xd + 0.5 * h * k2[2], yd + 0.5 * h * k2[3])
        k4 = rhs(x + h * k3[0], y + h * k3[1], xd + h * k3[2], yd + h * k3[3])
        x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        xd += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        yd += h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        if not (math.isfinite(x) and math.isfinite(y)
                and math.isfinite(xd) and math.isfinite(yd)):
            return STATUS_NONFINITE, k, out
        if y < ymin or y > ymax:
            return STATUS_LEFT_INTERVAL, k, out
        out[k + 1] = (x, y, xd, yd)
    return STATUS_OK, n, out


def rk4_reduced(fT, fU, fR, fS, state0, h, n, ymin, ymax):
    """Classical RK4 on the reduced flow (y, v_y, v_x)."""
    out = np.empty((n + 1, 3))
    y, vy, vx = (float(v) for v in state0)
    out[0] = (y, vy, vx)

    def rhs(y, vy):
        return (vy,
                fR.val(y) * vy * vy + fS.val(y),
                fT.val(y) * vy * vy + fU.val(y))

    for k in range(n):
        k1 = rhs(y, vy)
        k2 = rhs(y + 0.5 * h * k1[0], vy + 0.5 * h * k1[1])
        k3 = rhs(y + 0.5 * h * k2[0], vy + 0.5 * h * k2[1])
        k4 = rhs(y + h * k3[0], vy + h * k3[1])
        y += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        vy += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        vx += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        if not (math.isfinite(y) and math.isfinite(vy) and math.isfinite(vx)):
            return STATUS_NONFINITE, k, out
        if y < ymin or y > ymax:
            return STATUS_LEFT_INTERVAL, k, out
        out[k + 1] = (y, vy, vx)
    return STATUS_OK, n, out
