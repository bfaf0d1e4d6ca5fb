"""1D lattices, geometrically local Hamiltonians with explicit term supports,
model builders, and the locality metrics (interaction range, effective degree).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle
from .pauli import PauliSum, PauliTerm, remap_sites


@dataclass(frozen=True)
class Lattice1D:
    """A chain of ``n`` sites, open by default."""

    n: int
    boundary: str = "open"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("lattice needs at least 2 sites")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    def distance(self, i: int, j: int) -> int:
        d = abs(i - j)
        if self.boundary == "periodic":
            return min(d, self.n - d)
        return d

    def diameter(self) -> int:
        return self.n - 1 if self.boundary == "open" else self.n // 2


@dataclass(frozen=True)
class LocalTerm:
    """One local summand: a declared support and an operator living inside it."""

    support: frozenset[int]
    op: PauliSum

    def __post_init__(self):
        support = frozenset(self.support)
        object.__setattr__(self, "support", support)
        if not support:
            raise ValueError("local term needs a nonempty support")
        if not self.op.support() <= support:
            raise ValueError("operator acts outside the declared support")

    def norm(self) -> float:
        """Spectral norm, evaluated densely on the term's own support."""
        sites = sorted(self.support)
        if len(sites) > 12:
            raise ValueError("term support too large for dense norm evaluation")
        local = remap_sites(self.op, {s: k for k, s in enumerate(sites)}, len(sites))
        m = oracle.dense(local)
        if not m.any():
            return 0.0
        return float(np.linalg.norm(m, 2))


@dataclass(frozen=True)
class LocalHamiltonian:
    lattice: Lattice1D
    terms: tuple[LocalTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if term.op.n != self.lattice.n:
                raise ValueError("term register differs from the lattice size")
            if any(s < 0 or s >= self.lattice.n for s in term.support):
                raise ValueError("term support outside the lattice")

    @property
    def n(self) -> int:
        return self.lattice.n

    def as_sum(self) -> PauliSum:
        out = PauliSum.zero(self.lattice.n)
        for term in self.terms:
            out = out + term.op
        return out

    def max_term_norm(self) -> float:
        return max((t.norm() for t in self.terms), default=0.0)


def single_site_term(n: int, site: int, letter: str, coeff: complex) -> LocalTerm:
    op = PauliSum(n, {PauliTerm.from_ops(n, {site: letter}): coeff})
    return LocalTerm(frozenset({site}), op)


def bond_term(n: int, i: int, j: int, letters: str, coeff: complex) -> LocalTerm:
    op = PauliSum(n, {PauliTerm.from_ops(n, {i: letters[0], j: letters[1]}): coeff})
    return LocalTerm(frozenset({i, j}), op)


def build_xy_disordered(
    n: int, seed: int
) -> tuple[LocalHamiltonian, LocalHamiltonian, dict]:
    """Disordered XY chain: uniform Z field plus random couplings.

    The frame part is ``sum_i Z_i`` with unit coefficients.  The perturbation
    is ``sum_i r_i Y_i Y_{i+1} + s_i X_i X_{i+1} - sum_i u_i X_i`` with
    ``r, s, u`` i.i.d. uniform on (-1, 1).  Draws come from a Philox
    counter-based generator keyed by ``seed`` (order: r block, s block,
    u block), so instances are bit-stable across platforms.
    """
    if n < 2:
        raise ValueError("need at least 2 sites")
    rng = np.random.Generator(np.random.Philox(key=seed))
    r = rng.uniform(-1.0, 1.0, n - 1)
    s = rng.uniform(-1.0, 1.0, n - 1)
    u = rng.uniform(-1.0, 1.0, n)

    lattice = Lattice1D(n, "open")
    a_terms = [single_site_term(n, i, "Z", 1.0) for i in range(n)]
    b_terms = (
        [bond_term(n, i, i + 1, "YY", r[i]) for i in range(n - 1)]
        + [bond_term(n, i, i + 1, "XX", s[i]) for i in range(n - 1)]
        + [single_site_term(n, i, "X", -u[i]) for i in range(n)]
    )
    coeffs = {
        "seed": int(seed),
        "generator": "philox",
        "r": [float(v) for v in r],
        "s": [float(v) for v in s],
        "u": [float(v) for v in u],
    }
    return (
        LocalHamiltonian(lattice, tuple(a_terms)),
        LocalHamiltonian(lattice, tuple(b_terms)),
        coeffs,
    )


def interaction_range(h: LocalHamiltonian) -> int:
    """Maximum support diameter over terms (0 for purely single-site)."""
    best = 0
    for term in h.terms:
        sites = sorted(term.support)
        for a in sites:
            for b in sites:
                best = max(best, h.lattice.distance(a, b))
    return best


def effective_degree(b: LocalHamiltonian) -> float:
    """Max over sites of the summed spectral norms of terms touching the site."""
    per_site = np.zeros(b.lattice.n)
    for term in b.terms:
        nrm = term.norm()
        for site in term.support:
            per_site[site] += nrm
    return float(per_site.max()) if b.terms else 0.0


# ---------------------------------------------------------------------------
# Structured-text (JSON) schema:
#   {"n": int, "boundary": "open"|"periodic",
#    "terms": [{"sites": [..], "pauli": "XX", "coeff": {"re": f, "im": f}}]}
# One row per Pauli string; pauli[k] is the letter on sites[k].
# ---------------------------------------------------------------------------


def _string_rows(op: PauliSum) -> list[dict]:
    rows = []
    for term, coeff in op.items():
        sites = sorted(term.support())
        rows.append(
            {
                "sites": sites,
                "pauli": "".join(term.letter_at(s) for s in sites),
                "coeff": {"re": coeff.real, "im": coeff.imag},
            }
        )
    return rows


def hamiltonian_to_doc(h: LocalHamiltonian) -> dict:
    rows = []
    for term in h.terms:
        rows.extend(_string_rows(term.op))
    return {"n": h.lattice.n, "boundary": h.lattice.boundary, "terms": rows}


def pauli_sum_to_doc(s: PauliSum, boundary: str = "open") -> dict:
    """Serialize a bare operator (e.g. a Magnus generator dump) as the same schema."""
    return {"n": s.n, "boundary": boundary, "terms": _string_rows(s)}


def _row_to_pair(n: int, row: dict) -> tuple[PauliTerm, complex]:
    sites = [int(s) for s in row["sites"]]
    letters = row["pauli"]
    if len(sites) != len(letters):
        raise ValueError("sites and pauli length differ in a term row")
    term = PauliTerm.from_ops(n, dict(zip(sites, letters)))
    c = row["coeff"]
    return term, complex(float(c["re"]), float(c["im"]))


def doc_to_hamiltonian(doc: dict) -> LocalHamiltonian:
    """Each schema row becomes one LocalTerm whose support is the string's support."""
    n = int(doc["n"])
    lattice = Lattice1D(n, doc.get("boundary", "open"))
    terms = []
    for row in doc["terms"]:
        term, coeff = _row_to_pair(n, row)
        terms.append(LocalTerm(term.support(), PauliSum(n, {term: coeff})))
    return LocalHamiltonian(lattice, tuple(terms))


def doc_to_pauli_sum(doc: dict) -> PauliSum:
    n = int(doc["n"])
    return PauliSum.from_pairs(n, (_row_to_pair(n, row) for row in doc["terms"]))


def save_hamiltonian(h: LocalHamiltonian, path: str | Path) -> None:
    Path(path).write_text(json.dumps(hamiltonian_to_doc(h), indent=1) + "\n")


def load_hamiltonian(path: str | Path) -> LocalHamiltonian:
    return doc_to_hamiltonian(json.loads(Path(path).read_text()))
