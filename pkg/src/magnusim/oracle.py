"""Dense exact linear algebra: operator realization, exact evolution,
spectral distances, and the matrix-logarithm reference for Magnus generators.

Everything here is the ground truth the compiled circuits are checked
against, so all exponentials go through exact eigendecompositions rather
than series approximations.  Matrices are plain ``numpy`` complex arrays;
basis index bit ``i`` corresponds to lattice site ``i``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .pauli import DROP_TOL, PauliSum, PauliTerm

#: Largest register realizable densely (dim 2**14 = 16384).
N_CAP = 14

_DECOMP_MAP = np.array(
    [
        [[0.5, 0.0], [0.0, 0.5]],      # I
        [[0.0, 0.5], [0.5, 0.0]],      # X
        [[0.0, 0.5j], [-0.5j, 0.0]],   # Y
        [[0.5, 0.0], [0.0, -0.5]],     # Z
    ],
    dtype=complex,
).reshape(4, 4)


def term_action(term: PauliTerm) -> tuple[np.ndarray, np.ndarray]:
    """Column action of a Pauli string: ``P|b> = phases[b] |rows[b]>``.

    The string maps basis state ``b`` to ``b XOR x_mask`` with phase
    ``i**popcount(x&z) * (-1)**popcount(b&z)``.
    """
    dim = 1 << term.n
    b = np.arange(dim, dtype=np.uint64)
    rows = (b ^ np.uint64(term.x_mask)).astype(np.intp)
    par = np.bitwise_count(b & np.uint64(term.z_mask)).astype(np.int64) & 1
    phases = (1.0 - 2.0 * par) * (1j ** ((term.x_mask & term.z_mask).bit_count() % 4))
    return rows, phases.astype(complex)


def dense(a, n: int | None = None) -> np.ndarray:
    """Realize a PauliSum (or anything with ``.as_sum()``) as a dense matrix."""
    s = a.as_sum() if hasattr(a, "as_sum") else a
    if not isinstance(s, PauliSum):
        raise TypeError(f"cannot realize {type(a).__name__} densely")
    n = s.n if n is None else n
    if n != s.n:
        raise ValueError(f"dimension mismatch: sum on {s.n} sites, requested {n}")
    if n > N_CAP:
        raise ValueError(f"register of {n} sites exceeds the dense cap of {N_CAP}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim, dtype=np.intp)
    for term, coeff in s.items():
        rows, phases = term_action(term)
        out[rows, cols] += coeff * phases
    return out


def pauli_decompose(m: np.ndarray, tol: float = DROP_TOL) -> PauliSum:
    """Expand a dense matrix on ``n = log2(dim)`` sites in the Pauli basis.

    Works site by site on paired (row-bit, column-bit) axes, costing
    O(n 4^n) instead of the naive O(8^n) trace loop.  Coefficients with
    magnitude at or below ``tol`` are dropped.
    """
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    if m.shape != (dim, dim) or dim & (dim - 1):
        raise ValueError("matrix must be square with power-of-two dimension")
    n = dim.bit_length() - 1
    if n == 0:
        return PauliSum(0, {PauliTerm(0, 0, 0): complex(m[0, 0])})

    # axes of the reshaped tensor: (r_{n-1}..r_0, c_{n-1}..c_0); interleave to
    # (r_{n-1}, c_{n-1}, ..., r_0, c_0) then fuse each (r, c) pair into one
    # size-4 axis and rotate it into the Pauli basis.
    t = m.reshape((2,) * (2 * n))
    perm = [ax for k in range(n) for ax in (k, n + k)]
    t = np.transpose(t, perm).reshape((4,) * n)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(_DECOMP_MAP, t, axes=([1], [axis])), 0, axis)

    coeffs = t.reshape(-1)
    hits = np.flatnonzero(np.abs(coeffs) > tol)
    terms: dict[PauliTerm, complex] = {}
    for flat in hits:
        x = z = 0
        rem = int(flat)
        for axis in range(n):        # axis 0 holds site n-1
            code = (rem >> (2 * (n - 1 - axis))) & 3
            site = n - 1 - axis
            if code == 1:
                x |= 1 << site
            elif code == 2:
                x |= 1 << site
                z |= 1 << site
            elif code == 3:
                z |= 1 << site
        terms[PauliTerm(x, z, n)] = complex(coeffs[flat])
    return PauliSum(n, terms)


def is_hermitian_matrix(m: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    dim = u.shape[0]
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(dim))) <= tol)


def exact_evolution(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via exact eigendecomposition.

    Fast paths: diagonal matrices exponentiate entrywise, and exactly real
    matrices go through the real-symmetric solver.
    """
    h = np.asarray(h)
    dim = h.shape[0]
    if h.shape != (dim, dim):
        raise ValueError("operator must be square")
    if not is_hermitian_matrix(h, 1e-10):
        raise ValueError("operator is not Hermitian to 1e-10")
    diag = np.diagonal(h)
    if not np.any(h - np.diag(diag)):
        return np.diag(np.exp(-1j * diag.real * t))
    exactly_real = not (np.iscomplexobj(h) and np.any(h.imag))
    if exactly_real:
        hr = h.real if np.iscomplexobj(h) else h
        w, v = scipy.linalg.eigh(hr, driver="evd")
        vc = v.astype(complex)
        return (vc * np.exp(-1j * w * t)) @ vc.T
    w, v = scipy.linalg.eigh((h + h.conj().T) / 2.0, driver="evd")
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def exp_generator(g: np.ndarray) -> np.ndarray:
    """``exp(g)`` for anti-Hermitian ``g`` (the unitary a Magnus generator makes)."""
    g = np.asarray(g, dtype=complex)
    if not is_hermitian_matrix(1j * g, 1e-10):
        raise ValueError("generator is not anti-Hermitian to 1e-10")
    return exact_evolution(1j * g, 1.0)


def top_singular_value(
    matvec,
    rmatvec,
    dim: int,
    tol: float = 1e-8,
    block: int = 8,
    max_iter: int = 3000,
    seed: int = 7,
) -> float:
    """Largest singular value of an implicit operator by power iteration.

    Iterates a block of vectors under ``G = D^dag D`` (``matvec`` applies D,
    ``rmatvec`` applies its adjoint) and reads the top Ritz value each sweep;
    stops when the estimate's relative change is at most ``tol``.
    """
    block = min(block, dim)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((dim, block)) + 1j * rng.standard_normal((dim, block))
    x, _ = np.linalg.qr(x)
    sigma = 0.0
    for _ in range(max_iter):
        y = rmatvec(matvec(x))
        h = x.conj().T @ y
        lam = float(np.linalg.eigvalsh((h + h.conj().T) / 2.0)[-1])
        new_sigma = float(np.sqrt(max(lam, 0.0)))
        if abs(new_sigma - sigma) <= tol * max(new_sigma, 1e-300):
            return new_sigma
        sigma = new_sigma
        if not np.any(y):
            return 0.0
        x, _ = np.linalg.qr(y)
    return sigma


_SVD_CUTOVER = 1024


def spectral_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral norm of ``u - v``: dense SVD up to dim 1024, power iteration above."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    d = u - v
    if d.shape[0] <= _SVD_CUTOVER:
        if not np.any(d):
            return 0.0
        return float(np.linalg.svd(d, compute_uv=False)[0])
    dh = d.conj().T.copy()
    return top_singular_value(lambda x: d @ x, lambda y: dh @ y, d.shape[0])


def magnus_log_reference(a, b, alpha: float, t: float, branch_margin: float = 1e-9) -> np.ndarray:
    """Exact interaction-frame generator: principal log of ``U_A(t)^dag U(t)``.

    ``a`` and ``b`` are PauliSums or LocalHamiltonians; the full evolution
    uses ``H = dense(a) + alpha * dense(b)``.  Eigenphases of the frame
    unitary must stay inside (-pi, pi); a phase at the branch cut raises so
    the caller shrinks ``t`` instead of silently unwrapping.
    """
    a_d = dense(a)
    h = a_d + alpha * dense(b)
    u = exact_evolution(h, t)
    u_a = exact_evolution(a_d, t)
    w = u_a.conj().T @ u
    tri, q = scipy.linalg.schur(w, output="complex")
    phases = np.angle(np.diagonal(tri))
    if np.any(np.abs(phases) >= np.pi - branch_margin):
        raise ValueError(
            "frame-unitary eigenphase at the log branch cut; shrink the step"
        )
    log = (q * (1j * phases)) @ q.conj().T
    return (log - log.conj().T) / 2.0
