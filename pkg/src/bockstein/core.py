"""The connecting homomorphism ``beta_phi: ker psi -> coker psi``.

For a kernel vector ``e`` with lift ``e~``, ``phi(e~)`` reduces to
``psi(e) = 0`` so it equals ``p * w``; ``beta(e)`` is the class of ``w mod p``
in ``coker psi``. ``beta`` is stored as a ``c x k`` matrix in the canonical
frame coordinates (``k = dim ker``, ``c = dim coker``).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

from .field_linalg import (
    KernelCokernelFrame,
    MatrixModP,
    Prime,
    Vector,
    as_prime,
    coker_frame,
    coker_project,
    coker_section,
)
from .module_linalg import (
    LiftedFrame,
    MatrixModP2,
    Phi0,
    build_phi0,
    divide_by_p,
    lift_vector,
    lifted_frame,
    map_from_basis_images,
    reduce_mod_p,
    reduce_vector,
)


class NotInCoset(ValueError):
    """``phi`` does not reduce to the frame's ``psi`` (or to 0 for ``b_map``)."""


@dataclass(frozen=True)
class BocksteinMatrix:
    prime: Prime
    k: int
    c: int
    entries: tuple[int, ...]
    psi_digest: str

    def __post_init__(self) -> None:
        if len(self.entries) != self.c * self.k:
            raise ValueError(f"expected {self.c * self.k} entries, got {len(self.entries)}")
        if any(not 0 <= x < self.prime.p for x in self.entries):
            raise ValueError("entries must lie in [0, p)")

    @property
    def p(self) -> int:
        return self.prime.p

    def column(self, i: int) -> Vector:
        return self.entries[i::self.k] if self.k else ()

    def to_nested(self) -> list[list[int]]:
        k = self.k
        return [list(self.entries[r * k:(r + 1) * k]) for r in range(self.c)]

    @classmethod
    def from_columns(cls, prime: Prime, c: int, columns: Sequence[Sequence[int]], psi_digest: str):
        k = len(columns)
        return cls(prime, k, c, tuple(columns[j][i] for i in range(c) for j in range(k)), psi_digest)

    @classmethod
    def from_nested(cls, p: int | Prime, rows: Sequence[Sequence[int]], k: int, psi_digest: str):
        prime = as_prime(p)
        if any(len(r) != k for r in rows):
            raise ValueError("ragged beta rows")
        return cls(prime, k, len(rows), tuple(int(x) for r in rows for x in r), psi_digest)

    def to_bytes(self) -> bytes:
        """Canonical key: p, c, k, then entries row-major, all little-endian uint32."""
        return struct.pack(f"<3I{len(self.entries)}I", self.p, self.c, self.k, *self.entries)

    @classmethod
    def from_bytes(cls, data: bytes, psi_digest: str) -> "BocksteinMatrix":
        p, c, k = struct.unpack_from("<3I", data)
        entries = struct.unpack_from(f"<{c * k}I", data, 12)
        return cls(Prime(p), k, c, tuple(entries), psi_digest)

    def __add__(self, other: "BocksteinMatrix") -> "BocksteinMatrix":
        if (self.p, self.k, self.c, self.psi_digest) != (other.p, other.k, other.c, other.psi_digest):
            raise ValueError("Bockstein matrices live in different hom-spaces")
        p = self.p
        return BocksteinMatrix(self.prime, self.k, self.c,
                               tuple((a + b) % p for a, b in zip(self.entries, other.entries)),
                               self.psi_digest)

    def scale(self, alpha: int) -> "BocksteinMatrix":
        p = self.p
        return BocksteinMatrix(self.prime, self.k, self.c,
                               tuple(alpha * a % p for a in self.entries), self.psi_digest)

    def is_zero(self) -> bool:
        return not any(self.entries)


@dataclass(frozen=True)
class GammaContext:
    """Everything derived from ``psi`` that the construction needs."""

    psi: MatrixModP
    frame: KernelCokernelFrame
    lifted: LiftedFrame
    phi0: Phi0
    psi_digest: str

    @classmethod
    def from_psi(cls, psi: MatrixModP) -> "GammaContext":
        frame = coker_frame(psi)
        lifted = lifted_frame(frame)
        return cls(psi, frame, lifted, build_phi0(psi, lifted), psi.digest())

    @property
    def prime(self) -> Prime:
        return self.psi.prime

    @property
    def p(self) -> int:
        return self.psi.p

    @property
    def k(self) -> int:
        return self.frame.k

    @property
    def c(self) -> int:
        return self.frame.coker_dim

    @property
    def hom_size(self) -> int:
        return self.p ** (self.k * self.c)

    def zero_beta(self) -> BocksteinMatrix:
        return BocksteinMatrix(self.prime, self.k, self.c, (0,) * (self.k * self.c), self.psi_digest)

    def beta_from_index(self, index: int) -> BocksteinMatrix:
        """The ``index``-th element of the hom-space, row-major base-p digits."""
        p, size = self.p, self.k * self.c
        digits = [0] * size
        for pos in range(size - 1, -1, -1):
            index, digits[pos] = divmod(index, p)
        return BocksteinMatrix(self.prime, self.k, self.c, tuple(digits), self.psi_digest)

    def all_betas(self):
        for i in range(self.hom_size):
            yield self.beta_from_index(i)


def gamma_context(psi: MatrixModP) -> GammaContext:
    return GammaContext.from_psi(psi)


def bockstein_of(ctx: GammaContext, phi: MatrixModP2,
                 kernel_lifts: Sequence[Sequence[int]] | None = None) -> BocksteinMatrix:
    """Compute ``beta_phi`` in frame coordinates.

    ``kernel_lifts`` overrides the canonical lifts of the kernel basis; any
    lifts give the same answer.
    """
    if phi.shape != ctx.psi.shape or phi.p != ctx.p or reduce_mod_p(phi) != ctx.psi:
        raise NotInCoset("phi does not reduce to psi")
    p = ctx.p
    lifts = ctx.lifted.lifted_kernel if kernel_lifts is None else kernel_lifts
    if len(lifts) != ctx.k:
        raise ValueError(f"expected {ctx.k} kernel lifts, got {len(lifts)}")
    columns = []
    for lift, e in zip(lifts, ctx.frame.kernel_basis):
        if reduce_vector(lift, p) != e:
            raise ValueError("kernel lift does not reduce to the kernel basis vector")
        w = divide_by_p(phi.matvec(lift), p)
        columns.append(coker_project(ctx.frame, w))
    return BocksteinMatrix.from_columns(ctx.prime, ctx.c, columns, ctx.psi_digest)


def construct_phi_for(ctx: GammaContext, beta: BocksteinMatrix) -> MatrixModP2:
    """A preimage of ``beta`` in ``L_psi``.

    Kernel lifts go to ``p * w_i`` where ``w_i`` carries column ``i`` of
    ``beta`` at the cokernel rows and zeros at the image pivot rows; the
    complement lifts go to the canonical lift of ``psi(f_j)``.
    """
    if (beta.p, beta.k, beta.c) != (ctx.p, ctx.k, ctx.c):
        raise ValueError(
            f"beta is {beta.c}x{beta.k} over Z/{beta.p}, "
            f"expected {ctx.c}x{ctx.k} over Z/{ctx.p}"
        )
    p, psi = ctx.p, ctx.psi
    kernel_images = [
        tuple(p * x for x in coker_section(ctx.frame, beta.column(i))) for i in range(ctx.k)
    ]
    complement_images = [
        lift_vector(psi.matvec(reduce_vector(f, p))) for f in ctx.lifted.lifted_complement
    ]
    return map_from_basis_images(ctx.lifted, kernel_images, complement_images)


def b_map(ctx: GammaContext, phi_in_L0: MatrixModP2) -> BocksteinMatrix:
    """``Gamma`` precomposed with translation by ``phi0``; defined on L0."""
    if not reduce_mod_p(phi_in_L0).is_zero():
        raise NotInCoset("input does not reduce to zero mod p")
    return bockstein_of(ctx, phi_in_L0 + ctx.phi0.matrix)
