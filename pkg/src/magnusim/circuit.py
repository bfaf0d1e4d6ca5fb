"""Product-formula compilation into a Pauli-rotation circuit IR, step-count
selection, elementary-gate expansion, and appliers that realize the IR on
dense vectors for verification.

IR convention: ``ops`` is stored in matrix order, so the realized unitary is
``M(ops[0]) @ M(ops[1]) @ ...`` (the last entry acts first on a state).
A ``PauliRotation(term, angle)`` realizes ``exp(-i angle term)``; a
``FrameOp(generator, duration)`` realizes ``exp(-i generator duration)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import oracle
from .magnus import MagnusPlan
from .model import LocalHamiltonian, interaction_range
from .pauli import PauliSum, PauliTerm, commutator


@dataclass(frozen=True)
class PauliRotation:
    term: PauliTerm
    angle: float


@dataclass(frozen=True)
class FrameOp:
    generator: LocalHamiltonian
    duration: float
    label: str = "A"


@dataclass(frozen=True)
class CircuitIR:
    n: int
    ops: tuple

    def __post_init__(self):
        for op in self.ops:
            if isinstance(op, PauliRotation):
                if not math.isfinite(op.angle):
                    raise ValueError("rotation angle must be finite")
                if op.term.n != self.n:
                    raise ValueError("rotation register differs from the circuit")
            elif isinstance(op, FrameOp):
                if op.generator.lattice.n != self.n:
                    raise ValueError("frame register differs from the circuit")
            else:
                raise TypeError(f"unknown IR op {type(op).__name__}")

    def __len__(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class GateCount:
    rotations: int
    two_qubit: int
    single_qubit: int

    def __add__(self, other: "GateCount") -> "GateCount":
        return GateCount(
            self.rotations + other.rotations,
            self.two_qubit + other.two_qubit,
            self.single_qubit + other.single_qubit,
        )


_ELIDE_ANGLE = 1e-15


def canonical_order(
    terms: Iterable[tuple[PauliTerm, complex]]
) -> list[tuple[PauliTerm, complex]]:
    """Deterministic (z_mask, x_mask) ordering used for all compilations."""
    return sorted(terms, key=lambda tc: tc[0].sort_key())


def _angles(terms: Sequence[tuple[PauliTerm, complex]], h: float) -> list[tuple[PauliTerm, float]]:
    """Rotation angles so each factor realizes exp(-i h c P) for real c, or
    exp(h c P) for purely imaginary c (the anti-Hermitian generator case)."""
    if not terms:
        return []
    s_re = max(abs(c.real) for _, c in terms)
    s_im = max(abs(c.imag) for _, c in terms)
    tol = 1e-10 * max(1.0, s_re, s_im)
    if s_im <= tol:
        return [(t, h * c.real) for t, c in terms]
    if s_re <= tol:
        return [(t, -h * c.imag) for t, c in terms]
    raise ValueError(
        "terms mix real and imaginary coefficients beyond tolerance; the "
        "generator is neither Hermitian nor anti-Hermitian"
    )


def _emit(n: int, pairs: Iterable[tuple[PauliTerm, float]]) -> CircuitIR:
    ops = tuple(
        PauliRotation(t, a) for t, a in pairs if abs(a) > _ELIDE_ANGLE
    )
    return CircuitIR(n, ops)


def trotter1(terms: Sequence[tuple[PauliTerm, complex]], h: float) -> CircuitIR:
    """First-order product formula: one rotation per term, in the given order."""
    terms = list(terms)
    if not terms:
        raise ValueError("no terms to compile")
    n = terms[0][0].n
    return _emit(n, _angles(terms, h))


def suzuki(terms: Sequence[tuple[PauliTerm, complex]], h: float, p: int) -> CircuitIR:
    """Suzuki product formula of even order ``p`` in {2, 4, 6}.

    Order 2 is the palindrome (forward at h/2, backward at h/2); higher
    orders follow the recursion ``V_p(h) = V_{p-2}(m h)^2 V_{p-2}((1-4m) h)
    V_{p-2}(m h)^2`` with ``m = 1/(4 - 4^(1/(p-1)))``.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("no terms to compile")
    if p not in (2, 4, 6):
        raise ValueError(f"product-formula order p={p} must be one of 2, 4, 6")
    n = terms[0][0].n
    factors = suzuki_factors(p, len(terms))
    base = _angles(terms, 1.0)
    return _emit(n, ((base[j][0], base[j][1] * f * h) for j, f in factors))


def suzuki_factors(p: int, count: int) -> list[tuple[int, float]]:
    """(term index, time fraction) sequence of the order-``p`` formula."""
    if p == 2:
        fwd = [(j, 0.5) for j in range(count)]
        return fwd + fwd[::-1]
    m = 1.0 / (4.0 - 4.0 ** (1.0 / (p - 1)))
    inner = suzuki_factors(p - 2, count)
    seq: list[tuple[int, float]] = []
    for scale in (m, m, 1.0 - 4.0 * m, m, m):
        seq.extend((j, f * scale) for j, f in inner)
    return seq


def trotter2(terms: Sequence[tuple[PauliTerm, complex]], h: float) -> CircuitIR:
    return suzuki(terms, h, 2)


def choose_steps(
    n: int,
    alpha: float,
    t: float,
    d: float | None = None,
    q: int = 1,
    p: int = 1,
    prefactor: float = 1.0,
) -> int:
    """Step count ``ceil(c * max(n^(1/q) (a t)^(1+1/q), n^(1/p) (a t)^(1+1/p)))``.

    ``d`` is accepted as model metadata but does not enter the rule, which
    depends only on the register size and the perturbation budget.  Floors
    at one step.
    """
    if n < 1 or alpha < 0 or t <= 0 or prefactor <= 0:
        raise ValueError("inputs must be positive (alpha may be zero)")
    at = alpha * t
    r = prefactor * max(n ** (1.0 / q) * at ** (1.0 + 1.0 / q),
                        n ** (1.0 / p) * at ** (1.0 + 1.0 / p))
    return max(1, math.ceil(r))


def compile_step(plan: MagnusPlan, a: LocalHamiltonian, p: int) -> CircuitIR:
    """One time step: the frame evolution followed by the product-formula
    decomposition of the generator exponential.

    Matrix order, so the realized unitary is ``exp(-i A h) * PF(exp(omega))``.
    """
    omega_terms = canonical_order(plan.omega.items())
    frame = FrameOp(a, plan.step)
    if not omega_terms:
        return CircuitIR(a.lattice.n, (frame,))
    body = trotter1(omega_terms, 1.0) if p == 1 else suzuki(omega_terms, 1.0, p)
    return CircuitIR(a.lattice.n, (frame,) + body.ops)


def concat(circuits: Sequence[CircuitIR]) -> CircuitIR:
    n = circuits[0].n
    ops: tuple = ()
    for c in circuits:
        if c.n != n:
            raise ValueError("register mismatch between circuits")
        ops = ops + c.ops
    return CircuitIR(n, ops)


def repeat(circuit: CircuitIR, r: int) -> CircuitIR:
    if r < 1:
        raise ValueError("repetition count must be at least 1")
    return CircuitIR(circuit.n, circuit.ops * r)


def expand_elementary(ir: CircuitIR, a_fast_forward: bool = True) -> GateCount:
    """Deterministic elementary-gate count of the IR.

    A weight-w rotation costs one rotation, ``2(w-1)`` two-qubit gates
    (parity ladder), and two basis-change single-qubit gates per non-Z site.
    Frame ops are only countable when fast-forwardable (range-0 generator):
    one single-qubit rotation per generator term.  Range > 0 frames must be
    pre-trotterized first (see :func:`pretrotterize_frames`).
    """
    rotations = two_qubit = single_qubit = 0
    for op in ir.ops:
        if isinstance(op, PauliRotation):
            w = op.term.weight()
            if w == 0:
                continue  # global phase
            rotations += 1
            two_qubit += 2 * (w - 1)
            # X and Y sites need a basis change in and out; Z sites do not
            single_qubit += 2 * op.term.x_mask.bit_count()
        else:
            if not a_fast_forward:
                raise ValueError(
                    "frame op present but counting was requested without "
                    "fast-forwarding; pre-trotterize the frames first"
                )
            if interaction_range(op.generator) != 0:
                raise ValueError(
                    "frame generator has range > 0 and cannot be fast-forwarded; "
                    "pre-trotterize the frames first"
                )
            rotations += len(op.generator.terms)
    return GateCount(rotations, two_qubit, single_qubit)


def pretrotterize_frames(ir: CircuitIR, p: int, r_prime: int) -> CircuitIR:
    """Replace every frame op by ``r_prime`` product-formula blocks over the
    generator's flattened term list (for frames that cannot be fast-forwarded)."""
    if r_prime < 1:
        raise ValueError("subdivision count must be at least 1")
    ops: list = []
    for op in ir.ops:
        if isinstance(op, PauliRotation):
            ops.append(op)
            continue
        terms = canonical_order(op.generator.as_sum().items())
        h = op.duration / r_prime
        block = trotter1(terms, h) if p == 1 else suzuki(terms, h, p)
        ops.extend(block.ops * r_prime)
    return CircuitIR(ir.n, tuple(ops))


# ---------------------------------------------------------------------------
# Realizing the IR on dense vectors
# ---------------------------------------------------------------------------


def _frame_diagonal(gen: LocalHamiltonian) -> np.ndarray | None:
    """Diagonal of a purely-Z generator, or None if it has off-diagonal action."""
    s = gen.as_sum()
    if any(t.x_mask for t, _ in s.items()):
        return None
    dim = 1 << s.n
    diag = np.zeros(dim, dtype=complex)
    b = np.arange(dim, dtype=np.uint64)
    for term, coeff in s.items():
        par = np.bitwise_count(b & np.uint64(term.z_mask)).astype(np.int64) & 1
        diag += coeff * (1.0 - 2.0 * par)
    return diag


def compile_applier(ir: CircuitIR) -> Callable[[np.ndarray, bool], np.ndarray]:
    """Precompute the IR's action and return ``f(block, adjoint=False)``.

    ``block`` has shape (2**n, k); the callable returns ``U @ block`` (or
    ``U^dag @ block``).  Rotations act through index gathers, diagonal frames
    through phase vectors; a non-diagonal frame falls back to its dense
    unitary (small registers only).
    """
    dim = 1 << ir.n
    program: list[tuple] = []
    for op in ir.ops:
        if isinstance(op, PauliRotation):
            rows, phases = oracle.term_action(op.term)
            # exp(-i angle P) x = cos(angle) x + w * x[rows] with
            # w = -i sin(angle) phases[rows]; the adjoint flips w's sign
            w = -1j * math.sin(op.angle) * phases[rows]
            program.append(("rot", rows, math.cos(op.angle), w[:, None]))
        else:
            diag = _frame_diagonal(op.generator)
            if diag is not None:
                program.append(("diag", np.exp(-1j * op.duration * diag.real)[:, None]))
            else:
                u = oracle.exact_evolution(
                    oracle.dense(op.generator), op.duration
                )
                program.append(("mat", u))

    def apply(block: np.ndarray, adjoint: bool = False) -> np.ndarray:
        x = np.array(block, dtype=complex, copy=True)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] != dim:
            raise ValueError("block dimension differs from the circuit register")
        steps = program if adjoint else program[::-1]
        for step in steps:
            kind = step[0]
            if kind == "rot":
                _, rows, c, w = step
                g = x[rows]
                x = c * x
                if adjoint:
                    x -= w * g
                else:
                    x += w * g
            elif kind == "diag":
                ph = step[1]
                x = (np.conj(ph) if adjoint else ph) * x
            else:
                u = step[1]
                x = (u.conj().T if adjoint else u) @ x
        return x

    return apply


def realize(ir: CircuitIR) -> np.ndarray:
    """Dense unitary of the IR (verification-sized registers)."""
    if ir.n > oracle.N_CAP:
        raise ValueError("register too large to realize densely")
    return compile_applier(ir)(np.eye(1 << ir.n, dtype=complex))


# ---------------------------------------------------------------------------
# Two-group commutator bounds used as test assertions
# ---------------------------------------------------------------------------


def trotter_bound_v1(a: LocalHamiltonian, b: LocalHamiltonian, alpha: float, t: float) -> float:
    """Bound on the first-order two-group splitting error: (t^2/2) a |[A,B]|."""
    comm = commutator(a.as_sum(), b.as_sum())
    return 0.5 * t * t * alpha * _spectral(comm)


def trotter_bound_v2(a: LocalHamiltonian, b: LocalHamiltonian, alpha: float, t: float) -> float:
    """Bound on the palindromic two-group splitting error:
    a (t^3/12 |[A,[A,B]]| + a t^3/24 |[B,[B,A]]|)."""
    a_sum = a.as_sum()
    b_sum = b.as_sum()
    aab = commutator(a_sum, commutator(a_sum, b_sum))
    bba = commutator(b_sum, commutator(b_sum, a_sum))
    t3 = t**3
    return alpha * (t3 / 12.0 * _spectral(aab) + alpha * t3 / 24.0 * _spectral(bba))


def _spectral(s: PauliSum) -> float:
    m = oracle.dense(s)
    if not m.any():
        return 0.0
    return float(np.linalg.norm(m, 2))


# ---------------------------------------------------------------------------
# Line-oriented textual export
# ---------------------------------------------------------------------------


def to_text(ir: CircuitIR) -> str:
    """Stable text form: ``ROT <angle> <string>`` / ``FRAME <duration> <label>``.

    Pauli strings are compact (no spaces), e.g. ``X3Z5``; the identity term
    renders as ``I``.
    """
    lines = []
    for op in ir.ops:
        if isinstance(op, PauliRotation):
            lines.append(f"ROT {op.angle!r} {str(op.term).replace(' ', '')}")
        else:
            lines.append(f"FRAME {op.duration!r} {op.label}")
    return "\n".join(lines) + ("\n" if lines else "")
