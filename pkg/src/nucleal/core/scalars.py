"""Scalar arithmetic dispatched on each instance's scalar kind.

Morphisms from the tensor unit to itself carry the scalar content of a
model; the four kinds in use are booleans, exact rationals, complex
floats, and real floats.  Bool multiplication is conjunction, star is
complex conjugation and the identity elsewhere.
"""

from __future__ import annotations

from fractions import Fraction

BOOL = "bool"
RATIONAL = "rational"
COMPLEX = "complex"
REAL = "real"


def mul(kind: str, x, y):
    if kind == BOOL:
        return bool(x) and bool(y)
    return x * y


def star(kind: str, x):
    if kind == COMPLEX:
        return complex(x).conjugate()
    return x


def eq(kind: str, x, y, tol: float = 0.0) -> bool:
    if kind == BOOL:
        return bool(x) == bool(y)
    if kind == RATIONAL:
        return Fraction(x) == Fraction(y)
    return abs(x - y) <= tol


def render(kind: str, x) -> str:
    if kind == BOOL:
        return "true" if x else "false"
    if kind == RATIONAL:
        f = Fraction(x)
        return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)
    if kind == COMPLEX:
        z = complex(x)
        sign = "+" if z.imag >= 0 else "-"
        return f"{z.real:.12g}{sign}{abs(z.imag):.12g}i"
    return f"{float(x):.12g}"
