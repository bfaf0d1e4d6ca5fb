"""Classical computation of frame-conjugated perturbation terms and the
truncated, light-cone-restricted Magnus generators (orders 1 and 2).

Per time step the generator is assembled term by term: each perturbation
term is conjugated under the restricted frame Hamiltonian on a small dense
register, decomposed back into Pauli strings, and accumulated through
Gauss-Legendre quadrature.  The second-order piece adds the half-weighted
commutator double integral evaluated on the cached first-order conjugations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import oracle
from .lightcone import restrict
from .model import LocalHamiltonian, LocalTerm
from .pauli import PauliSum, PauliTerm, commutator, is_anti_hermitian, remap_sites

#: Largest union register a frame conjugation may realize densely.
UNION_CAP = 14


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes mapped to [0, 1]; weights sum to 1."""

    nodes: tuple[tuple[float, float], ...]

    @classmethod
    def gauss_legendre(cls, k: int) -> "QuadratureRule":
        if k < 2:
            raise ValueError("quadrature order must be at least 2")
        x, w = np.polynomial.legendre.leggauss(k)
        return cls(tuple(((xi + 1.0) / 2.0, wi / 2.0) for xi, wi in zip(x, w)))

    @property
    def order(self) -> int:
        return len(self.nodes)

    def scaled(self, length: float) -> list[tuple[float, float]]:
        """Nodes and weights for an integral over [0, length]."""
        return [(x * length, w * length) for x, w in self.nodes]


@dataclass(frozen=True)
class MagnusPlan:
    """Per-step truncated generator plus the knobs that produced it."""

    q: int
    R: int
    step: float
    alpha: float
    quad: QuadratureRule
    omega: PauliSum
    diagnostics: dict


def _component_terms(
    terms: tuple[LocalTerm, ...], seed_sites: frozenset[int]
) -> list[LocalTerm]:
    """Frame terms connected to ``seed_sites`` through overlapping supports.

    Dropping the disconnected remainder is exact: it commutes with both the
    kept part and the conjugated operator, so its exponentials cancel.
    """
    remaining = list(terms)
    reach = set(seed_sites)
    out: list[LocalTerm] = []
    grew = True
    while grew:
        grew = False
        rest = []
        for term in remaining:
            if term.support & reach:
                out.append(term)
                reach |= term.support
                grew = True
            else:
                rest.append(term)
        remaining = rest
    return out


def conjugate_in_frame(
    b_term: LocalTerm,
    a_loc: LocalHamiltonian,
    s: float,
    eig_cache: dict | None = None,
) -> PauliSum:
    """``exp(i A_loc s) B exp(-i A_loc s)`` expanded in the Pauli basis.

    Realizes both operators densely on the union support (re-indexed to a
    contiguous register), exponentiates the frame part through a Hermitian
    eigendecomposition, and decomposes the conjugated matrix back onto
    lattice coordinates.  The eigendecomposition may be cached across calls
    that share the same restricted frame Hamiltonian.
    """
    n = a_loc.lattice.n
    comp = _component_terms(a_loc.terms, b_term.support)
    union = set(b_term.support)
    for term in comp:
        union |= term.support
    sites = tuple(sorted(union))
    if len(sites) > UNION_CAP:
        raise ValueError(
            f"union support of {len(sites)} sites exceeds the dense cap of {UNION_CAP}"
        )
    m = len(sites)
    to_local = {site: k for k, site in enumerate(sites)}

    key = (id(a_loc), sites)
    cached = eig_cache.get(key) if eig_cache is not None else None
    if cached is None:
        a_local = PauliSum.zero(m)
        for term in comp:
            a_local = a_local + remap_sites(term.op, to_local, m)
        a_mat = oracle.dense(a_local)
        if not oracle.is_hermitian_matrix(a_mat, 1e-10):
            raise ValueError("frame Hamiltonian is not Hermitian to 1e-10")
        w, v = np.linalg.eigh((a_mat + a_mat.conj().T) / 2.0)
        cached = (w, v)
        if eig_cache is not None:
            eig_cache[key] = cached
    w, v = cached

    b_local = remap_sites(b_term.op, to_local, m)
    b_mat = oracle.dense(b_local)
    # V e^{iws} (V^dag B V) e^{-iws} V^dag
    phases = np.exp(1j * w * s)
    b_tilde = v.conj().T @ b_mat @ v
    conj = v @ (phases[:, None] * b_tilde * np.conj(phases)[None, :]) @ v.conj().T

    local = oracle.pauli_decompose(conj)
    return remap_sites(local, {k: site for site, k in to_local.items()}, n)


def _restricted_frames(
    a: LocalHamiltonian, b: LocalHamiltonian, r: int
) -> list[tuple[LocalTerm, LocalHamiltonian]]:
    """Pair every perturbation term with its light-cone-restricted frame."""
    return [(term, restrict(a, term.support, r).restricted) for term in b.terms]


def _accumulate(n: int, contributions) -> PauliSum:
    acc: dict[PauliTerm, complex] = {}
    for weight, s in contributions:
        for term, coeff in s.items():
            acc[term] = acc.get(term, 0j) + weight * coeff
    return PauliSum(n, acc)


def _warn_if_outside_domain(b: LocalHamiltonian, alpha: float, h: float) -> None:
    budget = alpha * b.as_sum().l1_norm() * h
    if budget > 1.0:
        warnings.warn(
            f"perturbation budget alpha*|B|*h = {budget:.3g} > 1; the generator "
            "series may converge slowly",
            RuntimeWarning,
            stacklevel=3,
        )


def omega1(
    a: LocalHamiltonian,
    b: LocalHamiltonian,
    alpha: float,
    h: float,
    r: int,
    quad: QuadratureRule,
) -> PauliSum:
    """First-order generator: ``-i alpha * integral_0^h of the conjugated B``.

    Each perturbation term is conjugated under the frame restricted to the
    light cone around that term's own support.  Anti-Hermitian by
    construction.
    """
    if quad.order < 2:
        raise ValueError("quadrature order must be at least 2")
    _warn_if_outside_domain(b, alpha, h)
    n = a.lattice.n
    if alpha == 0.0:
        return PauliSum.zero(n)
    eig_cache: dict = {}
    contributions = []
    for b_term, a_loc in _restricted_frames(a, b, r):
        for s, w in quad.scaled(h):
            contributions.append((w, conjugate_in_frame(b_term, a_loc, s, eig_cache)))
    return _accumulate(n, contributions).scale(-1j * alpha)


def omega2(
    a: LocalHamiltonian,
    b: LocalHamiltonian,
    alpha: float,
    h: float,
    r: int,
    quad: QuadratureRule,
) -> PauliSum:
    """Second-order generator: half the ordered double integral of the
    commutator of frame-conjugated perturbations.

    The conjugated perturbation is cached at the outer nodes as a PauliSum;
    the inner integral over [0, tau1] reuses the rule rescaled to the
    subinterval.  Commutators run through the Pauli algebra, where pairs
    with disjoint supports vanish for free.
    """
    if quad.order < 2:
        raise ValueError("quadrature order must be at least 2")
    _warn_if_outside_domain(b, alpha, h)
    n = a.lattice.n
    if alpha == 0.0:
        return PauliSum.zero(n)
    eig_cache: dict = {}
    pairs = _restricted_frames(a, b, r)
    frame_cache: dict[float, PauliSum] = {}

    def conjugated_b(tau: float) -> PauliSum:
        hit = frame_cache.get(tau)
        if hit is None:
            hit = _accumulate(
                n,
                ((1.0, conjugate_in_frame(bt, al, tau, eig_cache)) for bt, al in pairs),
            )
            frame_cache[tau] = hit
        return hit

    contributions = []
    for tau1, w1 in quad.scaled(h):
        outer = conjugated_b(tau1)
        for tau2, w2 in quad.scaled(tau1):
            contributions.append((0.5 * w1 * w2, commutator(outer, conjugated_b(tau2))))
    # the conjugated perturbation enters as -i*alpha*C, so the commutator
    # carries (-i*alpha)^2 = -alpha^2
    return _accumulate(n, contributions).scale(-(alpha**2))


def build_plan(
    a: LocalHamiltonian,
    b: LocalHamiltonian,
    alpha: float,
    h: float,
    q: int,
    r: int,
    quad: QuadratureRule | None = None,
    quad2: QuadratureRule | None = None,
) -> MagnusPlan:
    """Assemble the per-step generator at truncation order ``q`` in {1, 2}."""
    if q not in (1, 2):
        raise ValueError(
            f"generator order q={q} unsupported: only q in {{1, 2}}; higher orders "
            "need the general nested-commutator construction, which this package "
            "does not implement"
        )
    quad = quad or QuadratureRule.gauss_legendre(16)
    quad2 = quad2 or QuadratureRule.gauss_legendre(12)
    omega = omega1(a, b, alpha, h, r, quad)
    if q == 2:
        omega = omega + omega2(a, b, alpha, h, r, quad2)
    if not is_anti_hermitian(omega, 1e-10):
        raise ValueError("assembled generator is not anti-Hermitian to 1e-10")
    diagnostics = {
        "term_count": len(omega),
        "max_support": omega.max_weight(),
        "l1_norm": omega.l1_norm(),
        "quad_k": quad.order,
        "quad2_k": quad2.order if q == 2 else None,
    }
    return MagnusPlan(q, r, h, alpha, quad, omega, diagnostics)
