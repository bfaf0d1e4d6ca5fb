"""Symplectic bit-mask algebra for n-qubit Pauli strings and weighted sums.

A Pauli string on ``n`` sites is stored as a pair of integer masks
``(x_mask, z_mask)``; bit ``i`` refers to lattice site ``i``.  Site ``i``
carries X if only its x bit is set, Z if only its z bit, and Y if both.
The operator realized by a term is ``i**popcount(x & z) * X^x * Z^z``,
which makes every stored string Hermitian and phase-free: product phases
are folded into coefficients immediately, so terms are canonical map keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

#: Coefficients at or below this magnitude are dropped from a PauliSum.
DROP_TOL = 1e-12

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)  # i**k for k = 0..3
_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


@dataclass(frozen=True)
class PauliTerm:
    """A single phase-free Pauli string on ``n`` sites."""

    x_mask: int
    z_mask: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative site count")
        mask = (1 << self.n) - 1
        if self.x_mask & ~mask or self.z_mask & ~mask:
            raise ValueError("mask bits set outside the %d-site register" % self.n)

    @classmethod
    def identity(cls, n: int) -> "PauliTerm":
        return cls(0, 0, n)

    @classmethod
    def from_ops(cls, n: int, ops: dict[int, str]) -> "PauliTerm":
        """Build a term from a {site: letter} map, e.g. ``{3: "X", 5: "Z"}``."""
        x = z = 0
        for site, letter in ops.items():
            if not 0 <= site < n:
                raise ValueError(f"site {site} outside register of {n} sites")
            if letter == "X":
                x |= 1 << site
            elif letter == "Y":
                x |= 1 << site
                z |= 1 << site
            elif letter == "Z":
                z |= 1 << site
            elif letter != "I":
                raise ValueError(f"unknown Pauli letter {letter!r}")
        return cls(x, z, n)

    def letter_at(self, site: int) -> str:
        return _LETTERS[((self.x_mask >> site) & 1, (self.z_mask >> site) & 1)]

    def support(self) -> frozenset[int]:
        """Sites where the term acts nontrivially; empty for the identity."""
        mask = self.x_mask | self.z_mask
        return frozenset(i for i in range(self.n) if (mask >> i) & 1)

    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def sort_key(self) -> tuple[int, int]:
        return (self.z_mask, self.x_mask)

    def __str__(self) -> str:
        if self.is_identity():
            return "I"
        mask = self.x_mask | self.z_mask
        return " ".join(
            f"{self.letter_at(i)}{i}" for i in range(self.n) if (mask >> i) & 1
        )


def multiply(p: PauliTerm, q: PauliTerm) -> tuple[complex, PauliTerm]:
    """Operator product ``p q`` as (phase, string) with phase in {1, i, -1, -i}."""
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} != {q.n}")
    x = p.x_mask ^ q.x_mask
    z = p.z_mask ^ q.z_mask
    k = (
        (p.x_mask & p.z_mask).bit_count()
        + (q.x_mask & q.z_mask).bit_count()
        - (x & z).bit_count()
        + 2 * (p.z_mask & q.x_mask).bit_count()
    ) % 4
    return _PHASES[k], PauliTerm(x, z, p.n)


def anticommutes(p: PauliTerm, q: PauliTerm) -> bool:
    """True iff the strings anticommute (odd symplectic form)."""
    return bool(
        ((p.x_mask & q.z_mask).bit_count() + (p.z_mask & q.x_mask).bit_count()) & 1
    )


class PauliSum:
    """Weighted sum of Pauli strings sharing one site count.

    Coefficients are complex; Hermiticity or anti-Hermiticity is a checked
    property, not a type constraint.  Instances are treated as immutable:
    every operation returns a new sum, and coefficients with magnitude at or
    below :data:`DROP_TOL` are pruned on construction.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: dict[PauliTerm, complex] | None = None):
        self.n = n
        pruned: dict[PauliTerm, complex] = {}
        if terms:
            for term, coeff in terms.items():
                if term.n != n:
                    raise ValueError(f"dimension mismatch: term on {term.n} != {n}")
                c = complex(coeff)
                if abs(c) > DROP_TOL:
                    pruned[term] = c
        self._terms = pruned

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls(n)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[PauliTerm, complex]]) -> "PauliSum":
        acc: dict[PauliTerm, complex] = {}
        for term, coeff in pairs:
            acc[term] = acc.get(term, 0j) + complex(coeff)
        return cls(n, acc)

    def items(self) -> list[tuple[PauliTerm, complex]]:
        """Term/coefficient pairs in the canonical (z_mask, x_mask) order."""
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def coeff(self, term: PauliTerm) -> complex:
        return self._terms.get(term, 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[PauliTerm, complex]]:
        return iter(self.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} != {other.n}")
        acc = dict(self._terms)
        for term, coeff in other._terms.items():
            acc[term] = acc.get(term, 0j) + coeff
        return PauliSum(self.n, acc)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scale(-1.0)

    def __mul__(self, c: complex) -> "PauliSum":
        return self.scale(c)

    __rmul__ = __mul__

    def scale(self, c: complex) -> "PauliSum":
        return PauliSum(self.n, {t: v * c for t, v in self._terms.items()})

    def adjoint(self) -> "PauliSum":
        """Hermitian adjoint; conjugates coefficients (strings are Hermitian)."""
        return PauliSum(self.n, {t: v.conjugate() for t, v in self._terms.items()})

    def l1_norm(self) -> float:
        """Sum of coefficient magnitudes; upper-bounds the spectral norm."""
        return float(sum(abs(c) for c in self._terms.values()))

    def support(self) -> frozenset[int]:
        out: set[int] = set()
        for term in self._terms:
            out |= term.support()
        return frozenset(out)

    def max_weight(self) -> int:
        return max((t.weight() for t in self._terms), default=0)

    def __str__(self) -> str:
        if not self._terms:
            return "(empty)"
        return "\n".join(
            f"({c.real:+.12g}{c.imag:+.12g}j) {t}" for t, c in self.items()
        )

    def __repr__(self) -> str:
        return f"PauliSum(n={self.n}, terms={len(self._terms)})"


def add(a: PauliSum, b: PauliSum) -> PauliSum:
    return a + b


def scale(a: PauliSum, c: complex) -> PauliSum:
    return a.scale(c)


def adjoint(a: PauliSum) -> PauliSum:
    return a.adjoint()


def multiply_sums(a: PauliSum, b: PauliSum) -> PauliSum:
    """Full operator product ``a b`` expanded in the Pauli basis."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} != {b.n}")
    acc: dict[PauliTerm, complex] = {}
    for p, cp in a._terms.items():
        for q, cq in b._terms.items():
            phase, r = multiply(p, q)
            acc[r] = acc.get(r, 0j) + cp * cq * phase
    return PauliSum(a.n, acc)


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """Commutator [a, b] = ab - ba.

    Only anticommuting string pairs contribute (then pq - qp = 2pq), so terms
    with disjoint supports are skipped for free.
    """
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} != {b.n}")
    acc: dict[PauliTerm, complex] = {}
    for p, cp in a._terms.items():
        for q, cq in b._terms.items():
            if not anticommutes(p, q):
                continue
            phase, r = multiply(p, q)
            acc[r] = acc.get(r, 0j) + 2.0 * cp * cq * phase
    return PauliSum(a.n, acc)


def is_anti_hermitian(a: PauliSum, tol: float) -> bool:
    """True iff every coefficient's real part is within ``tol`` of zero."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return all(abs(c.real) <= tol for _, c in a.items())


def is_hermitian(a: PauliSum, tol: float) -> bool:
    """True iff every coefficient's imaginary part is within ``tol`` of zero."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return all(abs(c.imag) <= tol for _, c in a.items())


def remap_sites(a: PauliSum, site_map: dict[int, int], n_new: int) -> PauliSum:
    """Relabel the sites of every term through ``site_map``.

    Sites not in the map must be unused by ``a``; masks are rebuilt bit by bit.
    """
    out: dict[PauliTerm, complex] = {}
    for term, coeff in a._terms.items():
        x = z = 0
        for site in range(term.n):
            xb = (term.x_mask >> site) & 1
            zb = (term.z_mask >> site) & 1
            if not (xb or zb):
                continue
            if site not in site_map:
                raise ValueError(f"site {site} used by the sum but absent from the map")
            dest = site_map[site]
            x |= xb << dest
            z |= zb << dest
        key = PauliTerm(x, z, n_new)
        out[key] = out.get(key, 0j) + coeff
    return PauliSum(n_new, out)
