"""Independent dense reference for tests.

Deliberately avoids the package's oracle module: operators are realized by
explicit Kronecker products (site 0 = least significant basis bit) and
exponentials go through scipy's Pade-based expm, so the two computation
routes share no code.
"""

import numpy as np
import scipy.linalg

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def term_matrix(term) -> np.ndarray:
    out = np.array([[1.0]], dtype=complex)
    for site in reversed(range(term.n)):
        out = np.kron(out, PAULI_1Q[term.letter_at(site)])
    return out


def sum_matrix(s) -> np.ndarray:
    s = s.as_sum() if hasattr(s, "as_sum") else s
    dim = 2**s.n
    out = np.zeros((dim, dim), dtype=complex)
    for term, coeff in s.items():
        out += coeff * term_matrix(term)
    return out


def expm(m: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(m)


def evolution(h: np.ndarray, t: float) -> np.ndarray:
    return scipy.linalg.expm(-1j * t * h)


def spectral_norm(m: np.ndarray) -> float:
    if not m.any():
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def random_pauli_term(rng, n, cls, max_weight=None):
    """Random Pauli string via the package's constructor (masks only)."""
    x = int(rng.integers(0, 2**n))
    z = int(rng.integers(0, 2**n))
    if max_weight is not None:
        keep = 0
        sites = list(rng.permutation(n)[:max_weight])
        for s in sites:
            keep |= 1 << int(s)
        x &= keep
        z &= keep
    return cls(x, z, n)


def random_pauli_sum(rng, n, terms, sum_cls, term_cls):
    pairs = []
    for _ in range(terms):
        t = random_pauli_term(rng, n, term_cls)
        c = complex(rng.normal(), rng.normal())
        pairs.append((t, c))
    return sum_cls.from_pairs(n, pairs)
