"""Maps of free Z/p^2-modules: reduction, lifting and the coset L_psi.

``L_psi`` is the set of Z/p^2 matrices whose reduction mod p equals ``psi``.
It is the coset ``phi0 + L0`` where ``L0 = p * Mat(Z/p)`` and ``phi0`` is the
distinguished lift that kills the lifted kernel basis.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

from .field_linalg import (
    KernelCokernelFrame,
    MatrixModP,
    Prime,
    Vector,
    _ModMatrix,
    as_prime,
    coker_frame,
)

DEFAULT_BUDGET = 1 << 24
BUDGET_ENV = "BOCKSTEIN_BUDGET"


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured element budget."""

    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} elements, budget is {budget}")
        self.required = required
        self.budget = budget


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


def check_budget(required: int, budget: int | None = None) -> None:
    if budget is None:
        budget = default_budget()
    if required > budget:
        raise BudgetExceeded(required, budget)


@dataclass(frozen=True)
class MatrixModP2(_ModMatrix):
    """Dense m x n matrix over Z/p^2 (the role of phi)."""

    @classmethod
    def modulus_for(cls, prime: Prime) -> int:
        return prime.square


def reduce_mod_p(phi: MatrixModP2) -> MatrixModP:
    p = phi.p
    return MatrixModP(phi.prime, phi.rows, phi.cols, tuple(x % p for x in phi.entries))


def canonical_lift(psi: MatrixModP) -> MatrixModP2:
    return MatrixModP2(psi.prime, psi.rows, psi.cols, psi.entries)


def lift_vector(v: Sequence[int]) -> Vector:
    return tuple(v)


def reduce_vector(v: Sequence[int], p: int) -> Vector:
    return tuple(x % p for x in v)


def times_p(M: MatrixModP) -> MatrixModP2:
    """The element ``p * M`` of L0."""
    p = M.p
    return MatrixModP2(M.prime, M.rows, M.cols, tuple(p * x for x in M.entries))


def divide_by_p(v: Sequence[int], p: int) -> Vector:
    """Exact quotient of a vector in pW, as representatives in [0, p)."""
    for x in v:
        if x % p:
            raise ArithmeticError(f"{tuple(v)} is not divisible by {p}")
    return tuple(x // p for x in v)


def inverse_mod_p2(S: MatrixModP2) -> MatrixModP2:
    """Inverse of a square Z/p^2 matrix whose reduction mod p is invertible.

    Gauss-Jordan works because a pivot that is nonzero mod p is a unit.
    """
    n, p, q = S.rows, S.p, S.modulus
    if S.cols != n:
        raise ValueError("matrix is not square")
    aug = [list(S.row(i)) + [int(i == j) for j in range(n)] for i in range(n)]
    for c in range(n):
        sel = next((i for i in range(c, n) if aug[i][c] % p), None)
        if sel is None:
            raise ArithmeticError("reduction mod p is singular")
        aug[c], aug[sel] = aug[sel], aug[c]
        inv = pow(aug[c][c], -1, q)
        aug[c] = [x * inv % q for x in aug[c]]
        for i in range(n):
            f = aug[i][c]
            if i != c and f:
                aug[i] = [(a - f * b) % q for a, b in zip(aug[i], aug[c])]
    return MatrixModP2(S.prime, n, n, tuple(x for r in aug for x in r[n:]))


def from_columns(prime: Prime, nrows: int, columns: Sequence[Sequence[int]], cls=None):
    cls = cls or MatrixModP2
    ncols = len(columns)
    return cls(prime, nrows, ncols, tuple(columns[j][i] for i in range(nrows) for j in range(ncols)))


@dataclass(frozen=True)
class LiftedFrame:
    """Lifts of the canonical basis ``{e_i} U {f_j}`` of the source mod p.

    ``f_j`` is the standard vector at the j-th pivot column of ``rref(psi)``.
    """

    frame: KernelCokernelFrame
    lifted_kernel: tuple[Vector, ...]
    lifted_complement: tuple[Vector, ...]

    def basis_matrix(self) -> MatrixModP2:
        """Columns: lifted kernel vectors, then lifted complement vectors."""
        cols = self.lifted_kernel + self.lifted_complement
        return from_columns(self.frame.psi.prime, self.frame.n, cols)


def lifted_frame(frame: KernelCokernelFrame) -> LiftedFrame:
    n = frame.n
    complement = tuple(
        tuple(int(i == c) for i in range(n)) for c in frame.row_reduced.pivot_cols
    )
    return LiftedFrame(
        frame=frame,
        lifted_kernel=tuple(lift_vector(e) for e in frame.kernel_basis),
        lifted_complement=tuple(lift_vector(f) for f in complement),
    )


def map_from_basis_images(lifted: LiftedFrame, kernel_images: Sequence[Sequence[int]],
                          complement_images: Sequence[Sequence[int]]) -> MatrixModP2:
    """The unique Z/p^2 map sending the lifted basis to the given images."""
    frame = lifted.frame
    prime, m = frame.psi.prime, frame.m
    images = from_columns(prime, m, list(kernel_images) + list(complement_images))
    return images.matmul(inverse_mod_p2(lifted.basis_matrix()))


@dataclass(frozen=True)
class Phi0:
    matrix: MatrixModP2


def build_phi0(psi: MatrixModP, lifted: LiftedFrame | None = None) -> Phi0:
    """phi0 kills every lifted kernel vector and sends ``f~_j`` to the lift of ``psi(f_j)``."""
    if lifted is None:
        lifted = lifted_frame(coker_frame(psi))
    m = psi.rows
    kernel_images = [(0,) * m for _ in lifted.lifted_kernel]
    complement_images = [lift_vector(psi.matvec(reduce_vector(f, psi.p))) for f in lifted.lifted_complement]
    phi0 = map_from_basis_images(lifted, kernel_images, complement_images)
    assert reduce_mod_p(phi0) == psi
    return Phi0(phi0)


def l0_size(p: int, m: int, n: int) -> int:
    return p ** (m * n)


def _digits(index: int, p: int, length: int) -> tuple[int, ...]:
    # Most significant digit first, so increasing index is lexicographic order.
    out = [0] * length
    for pos in range(length - 1, -1, -1):
        index, out[pos] = divmod(index, p)
    return tuple(out)


def l0_element(prime: int | Prime, m: int, n: int, index: int) -> MatrixModP2:
    """The ``index``-th element of L0 in lexicographic order of the underlying M."""
    prime = as_prime(prime)
    p = prime.p
    if not 0 <= index < l0_size(p, m, n):
        raise IndexError(index)
    return MatrixModP2(prime, m, n, tuple(p * d for d in _digits(index, p, m * n)))


def enumerate_L0(prime: int | Prime, m: int, n: int, budget: int | None = None,
                 start: int = 0, stop: int | None = None) -> Iterator[MatrixModP2]:
    """Yield ``p * M`` for every M over Z/p, lexicographically in M.

    ``start``/``stop`` select an index range so work can be partitioned.
    """
    prime = as_prime(prime)
    p = prime.p
    total = l0_size(p, m, n)
    check_budget(total, budget)
    stop = total if stop is None else min(stop, total)
    scaled = [p * d for d in range(p)]
    digits_iter = itertools.product(range(p), repeat=m * n)
    for digits in itertools.islice(digits_iter, start, stop):
        yield MatrixModP2(prime, m, n, tuple(scaled[d] for d in digits))


def enumerate_L_psi(psi: MatrixModP, budget: int | None = None, phi0: Phi0 | None = None,
                    start: int = 0, stop: int | None = None) -> Iterator[MatrixModP2]:
    """Yield every phi with ``phi mod p == psi`` as ``phi0 + x`` for x in L0."""
    if phi0 is None:
        phi0 = build_phi0(psi)
    base = phi0.matrix
    for x in enumerate_L0(psi.prime, psi.rows, psi.cols, budget, start, stop):
        yield base + x


def enumerate_mod_p(prime: int | Prime, m: int, n: int, budget: int | None = None) -> Iterator[MatrixModP]:
    """Every m x n matrix over Z/p, lexicographically."""
    prime = as_prime(prime)
    check_budget(l0_size(prime.p, m, n), budget)
    for digits in itertools.product(range(prime.p), repeat=m * n):
        yield MatrixModP(prime, m, n, digits)


def enumerate_mod_p2(prime: int | Prime, m: int, n: int, budget: int | None = None) -> Iterator[MatrixModP2]:
    """Every m x n matrix over Z/p^2, lexicographically."""
    prime = as_prime(prime)
    check_budget(prime.square ** (m * n), budget)
    for digits in itertools.product(range(prime.square), repeat=m * n):
        yield MatrixModP2(prime, m, n, digits)
