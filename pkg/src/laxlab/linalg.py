"""Dense complex linear algebra for small matrices (n <= 16).

Matrices are plain ``numpy`` ``complex128`` arrays.  Characteristic
polynomial coefficients follow the Cayley-Hamilton closure convention used
throughout the package::

    L**n = A[n-1] L**(n-1) + ... + A[1] L + A[0] I

so ``A[i]`` is the *negation* of the usual monic coefficient ``c_i`` of
``det(x I - L) = x**n + c[n-1] x**(n-1) + ... + c[0]``.

All tolerances quoted in this module are max-abs-entry norms.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, MatrixOverflowError

__all__ = [
    "as_cmatrix",
    "max_norm",
    "commutator",
    "anticommutator",
    "mat_trace_power",
    "char_poly",
    "coeffs_from_power_sums",
    "power_sums_from_coeffs",
    "cayley_hamilton_residual",
    "companion_matrix",
    "hessenberg",
    "eigenvalues",
    "canonical_order",
    "mat_exp",
]

EIG_TIE_TOL = 1e-9


def as_cmatrix(a) -> np.ndarray:
    """Validate ``a`` as a finite square complex matrix and return a copy."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def max_norm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


def mat_trace_power(L, k: int) -> complex:
    """Return ``tr(L**k)``; ``k = 0`` gives the dimension exactly."""
    L = np.asarray(L, dtype=np.complex128)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return complex(L.shape[0])
    return complex(np.trace(np.linalg.matrix_power(L, k)))


def char_poly(L) -> np.ndarray:
    """Closure coefficients ``A_0..A_{n-1}`` of ``L`` by Faddeev-LeVerrier.

    The recursion is ``M_k = L M_{k-1} + c_{n-k+1} I`` with
    ``c_{n-k} = -tr(L M_k) / k``; the returned array is ``-c``.
    """
    L = np.asarray(L, dtype=np.complex128)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] == 0:
        raise ValueError("char_poly needs a non-empty square matrix")
    n = L.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    c = np.zeros(n + 1, dtype=np.complex128)
    c[n] = 1.0
    Mk = np.zeros_like(L)
    for k in range(1, n + 1):
        Mk = L @ Mk + c[n - k + 1] * eye
        c[n - k] = -np.trace(L @ Mk) / k
    return -c[:n]


def coeffs_from_power_sums(power_sums) -> np.ndarray:
    """Closure coefficients from ``p_k = tr(L**k)``, ``k = 1..n`` (Newton).

    Uses ``k e_k = sum_{i=1..k} (-1)**(i-1) e_{k-i} p_i`` for the elementary
    symmetric functions, then ``A_{n-k} = (-1)**(k+1) e_k``.
    """
    p = np.asarray(power_sums, dtype=np.complex128).ravel()
    n = p.size
    if n < 1:
        raise ValueError("need at least one power sum")
    e = np.zeros(n + 1, dtype=np.complex128)
    e[0] = 1.0
    for k in range(1, n + 1):
        acc = 0j
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * p[i - 1]
        e[k] = acc / k
    A = np.empty(n, dtype=np.complex128)
    for k in range(1, n + 1):
        A[n - k] = (-1) ** (k + 1) * e[k]
    return A


def power_sums_from_coeffs(coeffs, count: int | None = None) -> np.ndarray:
    """Inverse of :func:`coeffs_from_power_sums`: ``p_1..p_count``.

    Power sums beyond ``n`` follow from the closure ``p_{m} = sum_i A_i p_{m-n+i}``
    with ``p_0 = n``.
    """
    A = np.asarray(coeffs, dtype=np.complex128).ravel()
    n = A.size
    if count is None:
        count = n
    e = np.zeros(n + 1, dtype=np.complex128)
    e[0] = 1.0
    for k in range(1, n + 1):
        e[k] = (-1) ** (k + 1) * A[n - k]
    p = np.zeros(count + 1, dtype=np.complex128)
    p[0] = n
    for m in range(1, count + 1):
        if m <= n:
            acc = (-1) ** (m - 1) * m * e[m]
            for i in range(1, m):
                acc += (-1) ** (i - 1) * e[i] * p[m - i]
            p[m] = acc
        else:
            p[m] = sum(A[i] * p[m - n + i] for i in range(n))
    return p[1:]


def cayley_hamilton_residual(L, coeffs) -> float:
    """``max|L**n - sum_i A_i L**i|``."""
    L = np.asarray(L, dtype=np.complex128)
    n = L.shape[0]
    acc = np.zeros_like(L)
    Lp = np.eye(n, dtype=np.complex128)
    for i in range(n):
        acc += coeffs[i] * Lp
        Lp = Lp @ L
    return max_norm(Lp - acc)


def companion_matrix(coeffs, scale=1.0) -> np.ndarray:
    """Companion matrix with superdiagonal ``scale`` and last row ``scale * A``."""
    A = np.asarray(coeffs, dtype=np.complex128).ravel()
    n = A.size
    C = np.zeros((n, n), dtype=np.complex128)
    for i in range(n - 1):
        C[i, i + 1] = scale
    C[n - 1, :] += scale * A
    return C


def hessenberg(M) -> np.ndarray:
    """Upper Hessenberg form of ``M`` by Householder similarity transforms."""
    H = np.array(M, dtype=np.complex128)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        u = x
        u[0] += phase * alpha
        unorm = np.linalg.norm(u)
        if unorm == 0.0:
            continue
        u /= unorm
        H[k + 1:, :] -= 2.0 * np.outer(u, u.conj() @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ u, u.conj())
        H[k + 2:, k] = 0.0
    return H


def _givens(a: complex, b: complex):
    # rotation G with G^H [a, b]^T = [r, 0]^T
    if b == 0:
        return 1.0, 0j
    if a == 0:
        return 0.0, 1.0 + 0j
    na = abs(a)
    nrm = math.hypot(na, abs(b))
    c = na / nrm
    s = (a / na) * b.conjugate() / nrm
    return c, s


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closest to d
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4 - det + 0j)
    l1 = tr / 2 + disc
    l2 = tr / 2 - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def eigenvalues(M, max_iter: int = 60) -> np.ndarray:
    """Eigenvalues of ``M`` by shifted complex QR on its Hessenberg form.

    Returned in canonical order (see :func:`canonical_order`).  ``max_iter``
    is the per-eigenvalue iteration cap; exceeding it raises
    :class:`ConvergenceError`.
    """
    H = hessenberg(as_cmatrix(M))
    n = H.shape[0]
    eps = np.finfo(float).eps
    vals = np.empty(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    scale = max(max_norm(H), np.finfo(float).tiny)
    while hi >= 0:
        # locate the start of the unreduced block ending at hi
        lo = hi
        while lo > 0:
            sub = abs(H[lo, lo - 1])
            diag = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if sub <= eps * (diag if diag > 0 else scale):
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            vals[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_iter:
            raise ConvergenceError(
                f"QR iteration did not converge for eigenvalue {hi} of {n}"
            )
        if its % 11 == 0:
            # exceptional shift to break cycles
            shift = H[hi, hi] + 0.75 * abs(H[hi, hi - 1]) * (1 + 1j)
        else:
            shift = _wilkinson_shift(H[hi - 1, hi - 1], H[hi - 1, hi],
                                     H[hi, hi - 1], H[hi, hi])
        m = hi - lo + 1
        B = H[lo:hi + 1, lo:hi + 1]
        B -= shift * np.eye(m)
        rots = []
        for k in range(m - 1):
            c, s = _givens(B[k, k], B[k + 1, k])
            rots.append((c, s))
            rk = B[k, k:].copy()
            rk1 = B[k + 1, k:].copy()
            B[k, k:] = c * rk + s * rk1
            B[k + 1, k:] = -s.conjugate() * rk + c * rk1
        for k, (c, s) in enumerate(rots):
            ck = B[:k + 2, k].copy()
            ck1 = B[:k + 2, k + 1].copy()
            B[:k + 2, k] = c * ck + s.conjugate() * ck1
            B[:k + 2, k + 1] = -s * ck + c * ck1
        B += shift * np.eye(m)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("QR iteration produced non-finite eigenvalues")
    return canonical_order(vals)


def canonical_order(values, tol: float = EIG_TIE_TOL) -> np.ndarray:
    """Sort lexicographically by (real, imag); reals within ``tol`` tie."""
    v = np.asarray(values, dtype=np.complex128).ravel()
    by_re = sorted(v, key=lambda z: z.real)
    out = []
    group = []
    for z in by_re:
        if group and z.real - group[-1].real > tol:
            out.extend(sorted(group, key=lambda w: w.imag))
            group = []
        group.append(z)
    out.extend(sorted(group, key=lambda w: w.imag))
    return np.array(out, dtype=np.complex128)


# Pade [13/13] coefficients and the theta_13 bound for scaling-and-squaring
_PADE13 = (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
           1187353796428800.0, 129060195264000.0, 10559470521600.0,
           670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
           960960.0, 16380.0, 182.0, 1.0)
_THETA13 = 5.371920351148152


def mat_exp(M) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a [13/13] Pade approximant."""
    A = as_cmatrix(M)
    n = A.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    norm1 = float(np.max(np.sum(np.abs(A), axis=0)))
    if norm1 == 0.0:
        return eye
    s = max(0, int(math.ceil(math.log2(norm1 / _THETA13))))
    A = A / (2.0 ** s)
    b = _PADE13
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye)
    with np.errstate(over="ignore", invalid="ignore"):
        R = np.linalg.solve(V - U, V + U)
        for _ in range(s):
            R = R @ R
    if not np.all(np.isfinite(R)):
        raise MatrixOverflowError("matrix exponential overflowed")
    return R
