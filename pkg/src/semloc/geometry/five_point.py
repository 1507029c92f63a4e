"""Minimal five-point essential-matrix solver.

Pipeline: the 4-dimensional nullspace of the 5x9 epipolar constraint matrix
parameterizes E = x*B0 + y*B1 + z*B2 + B3.  The determinant constraint and
the nine entries of 2*E*E^T*E - trace(E*E^T)*E give ten cubic equations in
(x, y, z); their coefficients are assembled numerically over the 20-monomial
basis of degree <= 3.  Eliminating the ten pure cubic monomials yields a
10x10 action matrix for multiplication by z on the degree <= 2 monomial
basis, whose eigenvectors evaluate the solutions.  Candidates are polished
with a few Newton steps on the cubic system and filtered against the
essential-matrix constraints before being returned.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateGeometryError, InsufficientDataError

_CONSTRAINT_TOL = 1e-8

# monomial columns: x3 x2y x2z xy2 xyz xz2 y3 y2z yz2 z3 | x2 xy xz y2 yz z2 x y z 1
_MONO_EXP = [
    (3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1), (1, 0, 2),
    (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3),
    (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2),
    (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0),
]
_MONO_INDEX = {exp: i for i, exp in enumerate(_MONO_EXP)}


def _build_tables() -> tuple[np.ndarray, np.ndarray]:
    """(64, 20) one-hot map from ordered variable triples (m,n,p) to monomials."""
    one_hot = np.zeros((64, 20))
    for m in range(4):
        for n in range(4):
            for p in range(4):
                exp = [0, 0, 0]
                for v in (m, n, p):
                    if v < 3:
                        exp[v] += 1
                one_hot[m * 16 + n * 4 + p, _MONO_INDEX[tuple(exp)]] = 1.0
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k] = 1.0
    for i, j, k in [(0, 2, 1), (2, 1, 0), (1, 0, 2)]:
        eps[i, j, k] = -1.0
    return one_hot, eps


_ONE_HOT, _LEVI_CIVITA = _build_tables()


def _monomials(x: float, y: float, z: float) -> np.ndarray:
    return np.array([x**a * y**b * z**c for a, b, c in _MONO_EXP])


def _monomial_jacobian(x: float, y: float, z: float) -> np.ndarray:
    jac = np.zeros((20, 3))
    for i, (a, b, c) in enumerate(_MONO_EXP):
        if a:
            jac[i, 0] = a * x ** (a - 1) * y**b * z**c
        if b:
            jac[i, 1] = x**a * b * y ** (b - 1) * z**c
        if c:
            jac[i, 2] = x**a * y**b * c * z ** (c - 1)
    return jac


def _constraint_matrix(basis: np.ndarray) -> np.ndarray:
    """(10, 20) coefficients of det(E) and the trace constraint over the monomials."""
    # det(E) as a cubic form over the 4 basis matrices
    det_t = np.einsum(
        "ijk,mi,nj,pk->mnp",
        _LEVI_CIVITA,
        basis[:, 0, :],
        basis[:, 1, :],
        basis[:, 2, :],
    )
    det_row = det_t.reshape(64) @ _ONE_HOT

    # 2 E E^T E - trace(E E^T) E, entry (i, l), cubic form over (m, n, p)
    eet = np.einsum("mij,nkj,pkl->mnpil", basis, basis, basis)
    gram = np.einsum("mij,nij->mn", basis, basis)
    trace_term = np.einsum("mn,pil->mnpil", gram, basis)
    c_t = 2.0 * eet - trace_term
    c_rows = c_t.reshape(64, 9).T @ _ONE_HOT
    return np.vstack([det_row, c_rows])


def _essential_residuals(e: np.ndarray, ha: np.ndarray, hb: np.ndarray) -> tuple[float, float, float]:
    det = abs(float(np.linalg.det(e)))
    trace_c = 2.0 * e @ e.T @ e - np.trace(e @ e.T) * e
    trace_norm = float(np.linalg.norm(trace_c))
    epipolar = float(np.max(np.abs(np.einsum("ij,jk,ik->i", hb, e, ha))))
    return det, trace_norm, epipolar


def five_point_essential(x_a: np.ndarray, x_b: np.ndarray) -> list[np.ndarray]:
    """Essential-matrix candidates for five normalized correspondences.

    x_a, x_b: (n, 2) arrays with n >= 5; exactly the first five rows feed the
    minimal solver.  Returns a list of unit-Frobenius-norm 3x3 candidates,
    each satisfying det(E) = 0, the trace constraint, and the epipolar
    constraint on the five inputs to within 1e-8.  The list may be empty.
    """
    xa = np.atleast_2d(np.asarray(x_a, dtype=float))
    xb = np.atleast_2d(np.asarray(x_b, dtype=float))
    if xa.shape[0] < 5 or xb.shape[0] < 5:
        raise InsufficientDataError("five-point solver needs at least 5 correspondences")
    xa, xb = xa[:5], xb[:5]
    if np.ptp(xa, axis=0).max() < 1e-12 and np.ptp(xb, axis=0).max() < 1e-12:
        raise DegenerateGeometryError("correspondences are coincident")

    ha = np.hstack([xa, np.ones((5, 1))])
    hb = np.hstack([xb, np.ones((5, 1))])
    q = np.einsum("ni,nj->nij", hb, ha).reshape(5, 9)
    _, _, vt = np.linalg.svd(q)
    basis = vt[5:9].reshape(4, 3, 3)

    m = _constraint_matrix(basis)
    m = m / np.linalg.norm(m, axis=1, keepdims=True)

    lead = m[:, :10]
    tail = m[:, 10:]
    try:
        reduced = np.linalg.solve(lead, tail)
    except np.linalg.LinAlgError:
        reduced, *_ = np.linalg.lstsq(lead, tail, rcond=None)

    action = np.zeros((10, 10))
    action[0] = -reduced[2]   # z * x^2 = x^2 z
    action[1] = -reduced[4]   # z * xy  = xyz
    action[2] = -reduced[5]   # z * xz  = xz^2
    action[3] = -reduced[7]   # z * y^2 = y^2 z
    action[4] = -reduced[8]   # z * yz  = yz^2
    action[5] = -reduced[9]   # z * z^2 = z^3
    action[6, 2] = 1.0        # z * x   = xz
    action[7, 4] = 1.0        # z * y   = yz
    action[8, 5] = 1.0        # z * z   = z^2
    action[9, 8] = 1.0        # z * 1   = z

    _, vecs = np.linalg.eig(action)

    candidates: list[np.ndarray] = []
    for col in range(10):
        v = vecs[:, col]
        if abs(v[9]) < 1e-12:
            continue
        sol = v[[6, 7, 8]] / v[9]
        if np.max(np.abs(sol.imag)) > 1e-6 * (1.0 + np.max(np.abs(sol.real))):
            continue
        x, y, z = (float(s) for s in sol.real)
        # Newton polish on the ten cubic equations
        for _ in range(3):
            r = m @ _monomials(x, y, z)
            jac = m @ _monomial_jacobian(x, y, z)
            delta, *_ = np.linalg.lstsq(jac, -r, rcond=None)
            if not np.all(np.isfinite(delta)):
                break
            x, y, z = x + delta[0], y + delta[1], z + delta[2]
            if np.linalg.norm(delta) < 1e-14:
                break
        e = x * basis[0] + y * basis[1] + z * basis[2] + basis[3]
        norm = np.linalg.norm(e)
        if norm < 1e-12:
            continue
        e = e / norm
        det, trace_norm, epipolar = _essential_residuals(e, ha, hb)
        if det > _CONSTRAINT_TOL or trace_norm > _CONSTRAINT_TOL or epipolar > _CONSTRAINT_TOL:
            continue
        flat = e.reshape(9)
        if any(abs(float(np.dot(flat, c.reshape(9)))) > 1.0 - 1e-10 for c in candidates):
            continue
        candidates.append(e)
    return candidates
