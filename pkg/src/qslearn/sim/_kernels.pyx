# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector kernels.

All routines act in place on a contiguous complex128 amplitude buffer using
little-endian qubit order (qubit q is bit q of the amplitude index). The
pure-numpy twin in ``_kernels_py`` exposes identical signatures.
"""
import numpy as np

from libc.math cimport cos, sin

ctypedef double complex cplx


def apply_1q(cplx[::1] psi, cplx u00, cplx u01, cplx u10, cplx u11,
             Py_ssize_t target, Py_ssize_t ctrl_mask=0, Py_ssize_t ctrl_val=0):
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << target
    cdef Py_ssize_t i, j
    cdef cplx a, b
    with nogil:
        for i in range(dim):
            if i & tbit:
                continue
            if (i & ctrl_mask) != ctrl_val:
                continue
            j = i | tbit
            a = psi[i]
            b = psi[j]
            psi[i] = u00 * a + u01 * b
            psi[j] = u10 * a + u11 * b


def apply_matrix(cplx[::1] psi, const cplx[:, ::1] mat, const long long[::1] targets,
                 Py_ssize_t ctrl_mask=0, Py_ssize_t ctrl_val=0):
    """Apply a 2^k x 2^k matrix on ``targets``; bit r of the local index maps to targets[r]."""
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t k = targets.shape[0]
    cdef Py_ssize_t d = (<Py_ssize_t>1) << k
    cdef Py_ssize_t tmask = 0
    cdef Py_ssize_t i, r, c
    cdef cplx acc
    offsets_arr = np.zeros(d, dtype=np.intp)
    buf_arr = np.zeros(d, dtype=np.complex128)
    cdef Py_ssize_t[::1] off = offsets_arr
    cdef cplx[::1] buf = buf_arr
    for r in range(k):
        tmask |= (<Py_ssize_t>1) << targets[r]
    for r in range(d):
        for c in range(k):
            if (r >> c) & 1:
                off[r] |= (<Py_ssize_t>1) << targets[c]
    with nogil:
        for i in range(dim):
            if i & tmask:
                continue
            if (i & ctrl_mask) != ctrl_val:
                continue
            for r in range(d):
                buf[r] = psi[i + off[r]]
            for r in range(d):
                acc = 0
                for c in range(d):
                    acc = acc + mat[r, c] * buf[c]
                psi[i + off[r]] = acc


def apply_multiplexed_ry(cplx[::1] psi, const double[::1] angles, const long long[::1] select,
                         Py_ssize_t target):
    """RY(angles[k]) on ``target`` where k is the integer held by the ``select`` qubits."""
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t ns = select.shape[0]
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << target
    cdef Py_ssize_t i, j, s, key
    cdef double c, sn
    cdef cplx a, b
    with nogil:
        for i in range(dim):
            if i & tbit:
                continue
            key = 0
            for s in range(ns):
                key |= ((i >> select[s]) & 1) << s
            c = cos(0.5 * angles[key])
            sn = sin(0.5 * angles[key])
            j = i | tbit
            a = psi[i]
            b = psi[j]
            psi[i] = c * a - sn * b
            psi[j] = sn * a + c * b


cdef inline void _ry(cplx* psi, Py_ssize_t dim, Py_ssize_t q, double theta) noexcept nogil:
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << q
    cdef Py_ssize_t i, j
    cdef double c = cos(0.5 * theta), s = sin(0.5 * theta)
    cdef cplx a, b
    for i in range(dim):
        if i & tbit:
            continue
        j = i | tbit
        a = psi[i]
        b = psi[j]
        psi[i] = c * a - s * b
        psi[j] = s * a + c * b


cdef inline void _rz(cplx* psi, Py_ssize_t dim, Py_ssize_t q, double theta) noexcept nogil:
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << q
    cdef Py_ssize_t i
    cdef double c = cos(0.5 * theta), s = sin(0.5 * theta)
    cdef cplx lo = c - 1j * s
    cdef cplx hi = c + 1j * s
    for i in range(dim):
        if i & tbit:
            psi[i] = psi[i] * hi
        else:
            psi[i] = psi[i] * lo


cdef inline void _cnot(cplx* psi, Py_ssize_t dim, Py_ssize_t ctrl, Py_ssize_t tgt) noexcept nogil:
    cdef Py_ssize_t cbit = (<Py_ssize_t>1) << ctrl
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << tgt
    cdef Py_ssize_t i, j
    cdef cplx a
    for i in range(dim):
        if (i & cbit) and not (i & tbit):
            j = i | tbit
            a = psi[i]
            psi[i] = psi[j]
            psi[j] = a


def ring_edges(Py_ssize_t n_qubits):
    if n_qubits < 2:
        return []
    if n_qubits == 2:
        return [(0, 1)]
    return [(q, (q + 1) % n_qubits) for q in range(n_qubits)]


def ansatz_forward(cplx[::1] psi, const double[::1] thetas, Py_ssize_t n_qubits, Py_ssize_t layers):
    """Layered RY/RZ + CNOT-ring ansatz, parameters ordered [RY q0..q(n-1), RZ q0..q(n-1)] per layer."""
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t l, q, e, base
    edges = ring_edges(n_qubits)
    cdef Py_ssize_t ne = len(edges)
    ctrl_arr = np.array([a for a, _ in edges], dtype=np.intp)
    tgt_arr = np.array([b for _, b in edges], dtype=np.intp)
    cdef Py_ssize_t[::1] ctrl = ctrl_arr
    cdef Py_ssize_t[::1] tgt = tgt_arr
    cdef cplx* p = &psi[0]
    with nogil:
        for l in range(layers):
            base = 2 * n_qubits * l
            for q in range(n_qubits):
                _ry(p, dim, q, thetas[base + q])
            for q in range(n_qubits):
                _rz(p, dim, q, thetas[base + n_qubits + q])
            for e in range(ne):
                _cnot(p, dim, ctrl[e], tgt[e])


def expectation_z(const cplx[::1] psi, Py_ssize_t qubit):
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << qubit
    cdef Py_ssize_t i
    cdef double acc = 0.0, pr
    with nogil:
        for i in range(dim):
            pr = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
            if i & tbit:
                acc -= pr
            else:
                acc += pr
    return acc
