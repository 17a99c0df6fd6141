"""Pure-numpy statevector kernels.

Drop-in twin of the compiled ``_kernels`` extension: same function names,
same signatures, same in-place semantics on a contiguous complex128 buffer.
"""
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=256)
def _indices(dim, free_mask, ctrl_mask, ctrl_val):
    idx = np.arange(dim, dtype=np.intp)
    keep = ((idx & free_mask) == 0) & ((idx & ctrl_mask) == ctrl_val)
    out = idx[keep]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=256)
def _bit_set(dim, bit):
    mask = (np.arange(dim, dtype=np.intp) >> bit) & 1
    out = mask.astype(bool)
    out.setflags(write=False)
    return out


def apply_1q(psi, u00, u01, u10, u11, target, ctrl_mask=0, ctrl_val=0):
    dim = psi.shape[0]
    tbit = 1 << target
    if ctrl_mask == 0:
        view = psi.reshape(-1, 2, tbit)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = u00 * a + u01 * b
        view[:, 1, :] = u10 * a + u11 * b
        return
    i = _indices(dim, tbit, ctrl_mask, ctrl_val)
    j = i | tbit
    a = psi[i]
    b = psi[j]
    psi[i] = u00 * a + u01 * b
    psi[j] = u10 * a + u11 * b


def _offsets(targets):
    d = 1 << len(targets)
    off = np.zeros(d, dtype=np.intp)
    for c, t in enumerate(targets):
        off[(np.arange(d) >> c) & 1 == 1] |= 1 << int(t)
    return off


def apply_matrix(psi, mat, targets, ctrl_mask=0, ctrl_val=0):
    """Apply a 2^k x 2^k matrix on ``targets``; bit r of the local index maps to targets[r]."""
    dim = psi.shape[0]
    tmask = 0
    for t in targets:
        tmask |= 1 << int(t)
    base = _indices(dim, tmask, ctrl_mask, ctrl_val)
    pos = base[:, None] + _offsets(targets)[None, :]
    psi[pos] = psi[pos] @ np.asarray(mat).T


def apply_multiplexed_ry(psi, angles, select, target):
    """RY(angles[k]) on ``target`` where k is the integer held by the ``select`` qubits."""
    dim = psi.shape[0]
    tbit = 1 << target
    i = _indices(dim, tbit, 0, 0)
    key = np.zeros_like(i)
    for s, q in enumerate(select):
        key |= ((i >> int(q)) & 1) << s
    half = 0.5 * np.asarray(angles)[key]
    c, sn = np.cos(half), np.sin(half)
    j = i | tbit
    a = psi[i]
    b = psi[j]
    psi[i] = c * a - sn * b
    psi[j] = sn * a + c * b


def ring_edges(n_qubits):
    if n_qubits < 2:
        return []
    if n_qubits == 2:
        return [(0, 1)]
    return [(q, (q + 1) % n_qubits) for q in range(n_qubits)]


def ansatz_forward(psi, thetas, n_qubits, layers):
    """Layered RY/RZ + CNOT-ring ansatz, parameters ordered [RY q0..q(n-1), RZ q0..q(n-1)] per layer."""
    dim = psi.shape[0]
    edges = ring_edges(n_qubits)
    for layer in range(layers):
        base = 2 * n_qubits * layer
        for q in range(n_qubits):
            half = 0.5 * thetas[base + q]
            c, s = np.cos(half), np.sin(half)
            apply_1q(psi, c, -s, s, c, q)
        for q in range(n_qubits):
            half = 0.5 * thetas[base + n_qubits + q]
            psi *= np.where(_bit_set(dim, q), np.exp(1j * half), np.exp(-1j * half))
        for ctrl, tgt in edges:
            apply_1q(psi, 0.0, 1.0, 1.0, 0.0, tgt, 1 << ctrl, 1 << ctrl)


def expectation_z(psi, qubit):
    pr = psi.real**2 + psi.imag**2
    sign = np.where(_bit_set(psi.shape[0], qubit), -1.0, 1.0)
    return float(np.dot(pr, sign))
