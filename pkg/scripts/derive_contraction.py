"""Derive the hardcoded contraction matrices in boxreach/models/arch.py.

Builds the Jacobian symbolically, evaluates every entry with outward-rounded
interval arithmetic over the operating box, and prints
``C_ii = sup J_ii`` and ``C_ij = sup |J_ij|`` rounded up to the next float.

    python3 scripts/derive_contraction.py laub-loomis
    python3 scripts/derive_contraction.py arch-quadrotor

Needs sympy (``pip install .[dev]``).
"""
from __future__ import annotations

import argparse
import math

import mpmath
import sympy as sp

from boxreach.models.arch import ARCH_QUAD, ARCH_QUAD_BOX, LAUB_LOOMIS_BOX


def laub_loomis_field():
    x = sp.symbols("x1:8")
    x1, x2, x3, x4, x5, x6, x7 = x
    f = [
        sp.Float(1.4) * x3 - sp.Float(0.9) * x1,
        sp.Float(2.5) * x5 - sp.Float(1.5) * x2,
        sp.Float(0.6) * x7 - sp.Float(0.8) * x2 * x3,
        2 - sp.Float(1.3) * x3 * x4,
        sp.Float(0.7) * x1 - x4 * x5,
        sp.Float(0.3) * x1 - sp.Float(3.1) * x6,
        sp.Float(1.8) * x6 - sp.Float(1.5) * x2 * x7,
    ]
    return x, f


def arch_quadrotor_field():
    x = sp.symbols("x1:13")
    x1, x2, x3, x4, x5, x6, x7, x8, x9, x10, x11, x12 = x
    g, m = ARCH_QUAD["g"], ARCH_QUAD["m"]
    Jx, Jy, Jz = ARCH_QUAD["Jx"], ARCH_QUAD["Jy"], ARCH_QUAD["Jz"]
    s, c = sp.sin, sp.cos
    F = m * g - 10 * (x3 - 1) + 3 * x6
    tau_phi = -x7 - x10
    tau_theta = -x8 - x11
    f = [
        c(x8) * c(x9) * x4 + (s(x7) * s(x8) * c(x9) - c(x7) * s(x9)) * x5
        + (c(x7) * s(x8) * c(x9) + s(x7) * s(x9)) * x6,
        c(x8) * s(x9) * x4 + (s(x7) * s(x8) * s(x9) + c(x7) * c(x9)) * x5
        + (c(x7) * s(x8) * s(x9) - s(x7) * c(x9)) * x6,
        s(x8) * x4 - s(x7) * c(x8) * x5 - c(x7) * c(x8) * x6,
        x12 * x5 - x11 * x6 - g * s(x8),
        x10 * x6 - x12 * x4 + g * c(x8) * s(x7),
        x11 * x4 - x10 * x5 + g * c(x8) * c(x7) - F / m,
        x10 + s(x7) * sp.tan(x8) * x11 + c(x7) * sp.tan(x8) * x12,
        c(x7) * x11 - s(x7) * x12,
        s(x7) / c(x8) * x11 + c(x7) / c(x8) * x12,
        (Jy - Jz) / Jx * x11 * x12 + tau_phi / Jx,
        (Jz - Jx) / Jy * x10 * x12 + tau_theta / Jy,
        (Jx - Jy) / Jz * x10 * x11,
    ]
    return x, f


MODELS = {
    "laub-loomis": (laub_loomis_field, LAUB_LOOMIS_BOX),
    "arch-quadrotor": (arch_quadrotor_field, ARCH_QUAD_BOX),
}


def contraction(field, box):
    iv = mpmath.iv
    x, f = field()
    J = sp.Matrix(f).jacobian(sp.Matrix(x))
    env = [{"sin": iv.sin, "cos": iv.cos, "tan": iv.tan}, "math"]
    args = [iv.mpf([lo, hi]) for lo, hi in zip(*box)]
    n = len(x)
    C = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            expr = J[i, j]
            if expr == 0:
                continue
            val = sp.lambdify(x, expr, modules=env)(*args)
            val = iv.mpf(val)
            if i == j:
                C[i][j] = math.nextafter(float(val.b), math.inf)
            else:
                C[i][j] = math.nextafter(max(abs(float(val.a)), abs(float(val.b))), math.inf)
    return C


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("model", choices=sorted(MODELS))
    args = ap.parse_args()
    field, box = MODELS[args.model]
    C = contraction(field, box)
    print("np.array([")
    for row in C:
        print("    [" + ", ".join(repr(v) for v in row) + "],")
    print("])")


if __name__ == "__main__":
    main()
