"""Light-cone restriction of a lattice Hamiltonian around a site set, and the
radius selection rule used when truncating frame conjugations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from . import oracle
from .model import LocalHamiltonian
from .pauli import PauliSum


@dataclass(frozen=True)
class Restriction:
    """A Hamiltonian with every term farther than ``radius`` from ``center`` dropped."""

    base: LocalHamiltonian
    center: frozenset[int]
    radius: int
    restricted: LocalHamiltonian


def restrict(a: LocalHamiltonian, x: Iterable[int], r: int) -> Restriction:
    """Keep exactly the terms of ``a`` whose full support lies within
    lattice distance ``r`` of some site of ``x``.

    A term survives iff its farthest support site is within ``r`` of ``x``.
    Coefficients are never altered.
    """
    center = frozenset(x)
    if not center:
        raise ValueError("restriction center must be nonempty")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    lattice = a.lattice
    kept = tuple(
        term
        for term in a.terms
        if all(min(lattice.distance(s, c) for c in center) <= r for s in term.support)
    )
    return Restriction(a, center, r, LocalHamiltonian(lattice, kept))


def choose_radius(
    chi: int,
    n: int,
    t: float,
    theta: float = 2.0,
    order: int = 1,
    diameter: int | None = None,
) -> int:
    """Truncation radius ``ceil(chi_eff * ln(n t) + theta)``, clamped to the lattice.

    The slope is ``chi`` at first order and ``8 chi`` beyond (the cone decays
    more slowly once commutators enter); ``chi = 0`` frames do not spread, so
    the radius reduces to ``ceil(theta)``.  ``diameter`` defaults to the open
    chain value ``n - 1``.
    """
    if t <= 0:
        raise ValueError("time must be positive")
    if n < 2:
        raise ValueError("need at least 2 sites")
    if chi < 0:
        raise ValueError("interaction range must be nonnegative")
    if diameter is None:
        diameter = n - 1
    chi_eff = chi if order == 1 else 8 * chi
    raw = theta if chi == 0 else chi_eff * math.log(n * t) + theta
    return max(0, min(math.ceil(raw), diameter))


def measure_truncation_error(omega_full: PauliSum, omega_loc: PauliSum) -> float:
    """Dense spectral norm of the difference between a generator and its
    light-cone-truncated version."""
    if omega_full.n != omega_loc.n:
        raise ValueError("dimension mismatch between the generators")
    if omega_full.n > 12:
        raise ValueError("truncation error measurement is dense-only (n <= 12)")
    return oracle.spectral_distance(
        oracle.dense(omega_full), oracle.dense(omega_loc)
    )
