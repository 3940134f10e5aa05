# cython: language_level=3
"""Compiled twin of the pure-Python two-qubit kernels.

Must stay bit-for-bit identical to ``_kernels_py.py``: same operation order,
same constants, same branch rule. Complex division is written out
componentwise because Cython's generic complex quotient rounds differently
from CPython's. No fast-math, no FMA (see setup.py).
"""

from libc.math cimport sqrt

from .errors import DegenerateBranchError

INV_SQRT2 = sqrt(0.5)

cdef double _INV = sqrt(0.5)

BELL_AMPS = (
    (0j, complex(INV_SQRT2), complex(INV_SQRT2), 0j),
    (0j, complex(INV_SQRT2), complex(-INV_SQRT2), 0j),
    (complex(INV_SQRT2), 0j, 0j, complex(INV_SQRT2)),
    (complex(INV_SQRT2), 0j, 0j, complex(-INV_SQRT2)),
)


cdef inline double _c_abs2(double complex z):
    return z.real * z.real + z.imag * z.imag


cdef inline double complex _div(double complex z, double s):
    # Componentwise, matching CPython's complex / float; value-exact.
    cdef double re = z.real / s
    cdef double im = z.imag / s
    return re + 1j * im


def norm_sq(amps):
    cdef double complex a0 = amps[0]
    cdef double complex a1 = amps[1]
    cdef double complex a2 = amps[2]
    cdef double complex a3 = amps[3]
    return _c_abs2(a0) + _c_abs2(a1) + _c_abs2(a2) + _c_abs2(a3)


def inner(a, b):
    """<a|b>, conjugate-linear in the first argument."""
    cdef double complex x0 = a[0]
    cdef double complex x1 = a[1]
    cdef double complex x2 = a[2]
    cdef double complex x3 = a[3]
    cdef double complex y0 = b[0]
    cdef double complex y1 = b[1]
    cdef double complex y2 = b[2]
    cdef double complex y3 = b[3]
    return (
        x0.conjugate() * y0
        + x1.conjugate() * y1
        + x2.conjugate() * y2
        + x3.conjugate() * y3
    )


def apply_u(amps, int qubit, int u):
    """Apply one of the four encoding unitaries to a single qubit."""
    cdef double complex a0 = amps[0]
    cdef double complex a1 = amps[1]
    cdef double complex a2 = amps[2]
    cdef double complex a3 = amps[3]
    if qubit == 1:
        if u == 0:
            return (a0, a1, a2, a3)
        if u == 1:
            return (a0, -a1, a2, -a3)
        if u == 2:
            return (a1, a0, a3, a2)
        return (a1, -a0, a3, -a2)
    if u == 0:
        return (a0, a1, a2, a3)
    if u == 1:
        return (a0, a1, -a2, -a3)
    if u == 2:
        return (a2, a3, a0, a1)
    return (a2, a3, -a0, -a1)


def qubit_probs(amps, int qubit, int basis):
    """Born probabilities (p0, p1) for measuring one qubit in Z or X."""
    cdef double complex a0 = amps[0]
    cdef double complex a1 = amps[1]
    cdef double complex a2 = amps[2]
    cdef double complex a3 = amps[3]
    cdef double complex c0, c1, d0, d1
    if basis == 0:
        if qubit == 1:
            return (_c_abs2(a0) + _c_abs2(a2), _c_abs2(a1) + _c_abs2(a3))
        return (_c_abs2(a0) + _c_abs2(a1), _c_abs2(a2) + _c_abs2(a3))
    if qubit == 1:
        c0 = (a0 + a1) * _INV
        c1 = (a2 + a3) * _INV
        d0 = (a0 - a1) * _INV
        d1 = (a2 - a3) * _INV
    else:
        c0 = (a0 + a2) * _INV
        c1 = (a1 + a3) * _INV
        d0 = (a0 - a2) * _INV
        d1 = (a1 - a3) * _INV
    return (_c_abs2(c0) + _c_abs2(c1), _c_abs2(d0) + _c_abs2(d1))


def collapse_qubit(amps, int qubit, int basis, int bit):
    """Renormalized projection onto the (qubit, basis, bit) eigenspace."""
    cdef double complex a0 = amps[0]
    cdef double complex a1 = amps[1]
    cdef double complex a2 = amps[2]
    cdef double complex a3 = amps[3]
    cdef double complex p0, p1, p2, p3, c0, c1
    if basis == 0:
        if qubit == 1:
            if bit == 0:
                p0, p1, p2, p3 = a0, 0, a2, 0
            else:
                p0, p1, p2, p3 = 0, a1, 0, a3
        else:
            if bit == 0:
                p0, p1, p2, p3 = a0, a1, 0, 0
            else:
                p0, p1, p2, p3 = 0, 0, a2, a3
    elif qubit == 1:
        if bit == 0:
            c0 = (a0 + a1) * _INV
            c1 = (a2 + a3) * _INV
            p0, p1, p2, p3 = c0 * _INV, c0 * _INV, c1 * _INV, c1 * _INV
        else:
            c0 = (a0 - a1) * _INV
            c1 = (a2 - a3) * _INV
            p0, p1, p2, p3 = c0 * _INV, -(c0 * _INV), c1 * _INV, -(c1 * _INV)
    else:
        if bit == 0:
            c0 = (a0 + a2) * _INV
            c1 = (a1 + a3) * _INV
            p0, p1, p2, p3 = c0 * _INV, c1 * _INV, c0 * _INV, c1 * _INV
        else:
            c0 = (a0 - a2) * _INV
            c1 = (a1 - a3) * _INV
            p0, p1, p2, p3 = c0 * _INV, c1 * _INV, -(c0 * _INV), -(c1 * _INV)
    cdef double n = _c_abs2(p0) + _c_abs2(p1) + _c_abs2(p2) + _c_abs2(p3)
    if n < 1e-12:
        raise DegenerateBranchError("collapse onto a ~zero-probability branch")
    cdef double s = sqrt(n)
    return (_div(p0, s), _div(p1, s), _div(p2, s), _div(p3, s))


def measure_qubit(amps, int qubit, int basis, double r):
    """Sample one qubit measurement: bit 0 iff r < p0. Returns (bit, amps')."""
    probs = qubit_probs(amps, qubit, basis)
    cdef double p0 = probs[0]
    cdef int bit = 0 if r < p0 else 1
    return bit, collapse_qubit(amps, qubit, basis, bit)


def bell_probs(amps):
    """Born probabilities over Bell outcomes (Psi+, Psi-, Phi+, Phi-)."""
    cdef double complex a0 = amps[0]
    cdef double complex a1 = amps[1]
    cdef double complex a2 = amps[2]
    cdef double complex a3 = amps[3]
    return (
        _c_abs2((a1 + a2) * _INV),
        _c_abs2((a1 - a2) * _INV),
        _c_abs2((a0 + a3) * _INV),
        _c_abs2((a0 - a3) * _INV),
    )


def measure_bell(amps, double r):
    """Sample a Bell-basis measurement. Returns (outcome code, collapsed amps)."""
    probs = bell_probs(amps)
    cdef double p0 = probs[0]
    cdef double p1 = probs[1]
    cdef double p2 = probs[2]
    cdef double p3 = probs[3]
    cdef double acc = p0
    cdef int k
    if r < acc:
        k = 0
    else:
        acc += p1
        if r < acc:
            k = 1
        else:
            acc += p2
            if r < acc:
                k = 2
            else:
                if p3 < 1e-12:
                    raise DegenerateBranchError("Bell measurement fell through to a ~zero branch")
                k = 3
    return k, BELL_AMPS[k]
