"""Exact linear algebra over the prime field Z/p.

Matrices are stored as immutable row-major tuples of Python ints, always
reduced into ``[0, modulus)``. Everything here is deterministic so that the
kernel and cokernel coordinates chosen for a map are canonical.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_PRIME = 1 << 20

Vector = tuple[int, ...]


@dataclass(frozen=True)
class Prime:
    """A prime ``p`` together with the derived moduli ``p`` and ``p**2``."""

    p: int

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise TypeError(f"prime must be an int, got {type(self.p).__name__}")
        if self.p >= MAX_PRIME:
            raise ValueError(f"prime must be below 2**20, got {self.p}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def square(self) -> int:
        return self.p * self.p

    def __int__(self) -> int:
        return self.p


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def as_prime(p: int | Prime) -> Prime:
    return p if isinstance(p, Prime) else Prime(p)


@dataclass(frozen=True)
class _ModMatrix:
    prime: Prime
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries for a "
                f"{self.rows}x{self.cols} matrix, got {len(self.entries)}"
            )
        q = self.modulus
        for x in self.entries:
            if not 0 <= x < q:
                raise ValueError(f"entry {x} outside [0, {q})")

    @classmethod
    def modulus_for(cls, prime: Prime) -> int:
        raise NotImplementedError

    @property
    def modulus(self) -> int:
        return self.modulus_for(self.prime)

    @property
    def p(self) -> int:
        return self.prime.p

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @classmethod
    def from_rows(cls, p: int | Prime, rows: Sequence[Sequence[int]], cols: int | None = None):
        """Build from nested rows; ``cols`` is needed only when there are no rows."""
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(as_prime(p), len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, p: int | Prime, rows: int, cols: int):
        return cls(as_prime(p), rows, cols, (0,) * (rows * cols))

    @classmethod
    def reduced(cls, p: int | Prime, rows: int, cols: int, values: Iterable[int]):
        """Build from arbitrary integers, reducing each into range."""
        prime = as_prime(p)
        q = cls.modulus_for(prime)
        return cls(prime, rows, cols, tuple(int(x) % q for x in values))

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self):
        vals = [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)]
        return type(self)(self.prime, self.cols, self.rows, tuple(vals))

    def matvec(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for {self.rows}x{self.cols} matrix")
        q = self.modulus
        n = self.cols
        e = self.entries
        return tuple(
            sum(e[i * n + j] * v[j] for j in range(n)) % q for i in range(self.rows)
        )

    def matmul(self, other: "_ModMatrix"):
        if self.cols != other.rows or self.modulus != other.modulus:
            raise ValueError("incompatible matrices")
        q = self.modulus
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                c = other.column(j)
                out.append(sum(a * b for a, b in zip(r, c)) % q)
        return type(self)(self.prime, self.rows, other.cols, tuple(out))

    def __add__(self, other: "_ModMatrix"):
        if type(self) is not type(other) or self.shape != other.shape or self.p != other.p:
            return NotImplemented
        q = self.modulus
        return type(self)(
            self.prime, self.rows, self.cols,
            tuple((a + b) % q for a, b in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "_ModMatrix"):
        if type(self) is not type(other) or self.shape != other.shape or self.p != other.p:
            return NotImplemented
        q = self.modulus
        return type(self)(
            self.prime, self.rows, self.cols,
            tuple((a - b) % q for a, b in zip(self.entries, other.entries)),
        )

    def scale(self, alpha: int):
        q = self.modulus
        return type(self)(self.prime, self.rows, self.cols, tuple(alpha * a % q for a in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def to_bytes(self) -> bytes:
        """Canonical serialization: p, rows, cols, entries as little-endian uint32/uint64."""
        width = 4 if self.modulus <= 1 << 32 else 8
        head = b"".join(x.to_bytes(4, "little") for x in (self.p, self.rows, self.cols))
        return head + b"".join(x.to_bytes(width, "little") for x in self.entries)

    def digest(self) -> str:
        tag = type(self).__name__.encode()
        return hashlib.sha256(tag + b"\0" + self.to_bytes()).hexdigest()


@dataclass(frozen=True)
class MatrixModP(_ModMatrix):
    """Dense m x n matrix over Z/p (the role of psi)."""

    @classmethod
    def modulus_for(cls, prime: Prime) -> int:
        return prime.p


@dataclass(frozen=True)
class RrefResult:
    rref: MatrixModP
    pivot_cols: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)


def _rref_rows(rows: list[list[int]], ncols: int, p: int) -> tuple[list[list[int]], list[int]]:
    # Gauss-Jordan in place; topmost nonzero entry among unused rows wins.
    nrows = len(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        sel = next((i for i in range(r, nrows) if rows[i][c]), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = pow(rows[r][c], -1, p)
        pivot_row = [x * inv % p for x in rows[r]]
        rows[r] = pivot_row
        for i in range(nrows):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], pivot_row)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(mat: MatrixModP) -> RrefResult:
    """Reduced row echelon form over Z/p with deterministic pivoting."""
    rows, pivots = _rref_rows(mat.to_rows(), mat.cols, mat.p)
    out = MatrixModP(mat.prime, mat.rows, mat.cols, tuple(x for r in rows for x in r))
    return RrefResult(out, tuple(pivots))


def rank(mat: MatrixModP) -> int:
    return rref(mat).rank


def _kernel_from_rref(res: RrefResult) -> tuple[Vector, ...]:
    R = res.rref
    p, n = R.p, R.cols
    pivot_set = set(res.pivot_cols)
    basis = []
    for c in range(n):
        if c in pivot_set:
            continue
        v = [0] * n
        v[c] = 1
        for r, pc in enumerate(res.pivot_cols):
            v[pc] = -R[r, c] % p
        basis.append(tuple(v))
    return tuple(basis)


def kernel_basis(psi: MatrixModP) -> tuple[Vector, ...]:
    """Canonical kernel basis, one vector per free column of the rref.

    The vector for free column ``c`` has a 1 at ``c``, the negated rref
    column entries at the pivot positions and zeros elsewhere.
    """
    return _kernel_from_rref(rref(psi))


def free_columns(res: RrefResult) -> tuple[int, ...]:
    pivot_set = set(res.pivot_cols)
    return tuple(c for c in range(res.rref.cols) if c not in pivot_set)


@dataclass(frozen=True)
class KernelCokernelFrame:
    """Concrete coordinates for ``ker psi`` and ``coker psi``.

    ``image_basis`` holds the columns of the reduced column echelon form of
    ``psi``; column ``r`` has a 1 at ``image_pivot_rows[r]`` and zeros at the
    other pivot rows. ``coker_rows`` are the remaining row indices.
    """

    psi: MatrixModP
    row_reduced: RrefResult
    kernel_basis: tuple[Vector, ...]
    image_basis: tuple[Vector, ...]
    image_pivot_rows: tuple[int, ...]
    coker_rows: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.psi.p

    @property
    def m(self) -> int:
        return self.psi.rows

    @property
    def n(self) -> int:
        return self.psi.cols

    @property
    def k(self) -> int:
        return len(self.kernel_basis)

    @property
    def rank(self) -> int:
        return self.row_reduced.rank

    @property
    def coker_dim(self) -> int:
        return len(self.coker_rows)


def coker_frame(psi: MatrixModP) -> KernelCokernelFrame:
    res = rref(psi)
    col_res = rref(psi.transpose())
    image_basis = tuple(col_res.rref.row(r) for r in range(col_res.rank))
    pivot_rows = col_res.pivot_cols
    pivot_set = set(pivot_rows)
    coker_rows = tuple(i for i in range(psi.rows) if i not in pivot_set)
    frame = KernelCokernelFrame(
        psi=psi,
        row_reduced=res,
        kernel_basis=_kernel_from_rref(res),
        image_basis=image_basis,
        image_pivot_rows=pivot_rows,
        coker_rows=coker_rows,
    )
    assert frame.k + frame.rank == psi.cols
    assert len(coker_rows) == psi.rows - psi.cols + frame.k
    return frame


def coker_project(frame: KernelCokernelFrame, w: Sequence[int]) -> Vector:
    """Coordinates of ``w + im psi`` in ``coker psi``; zero iff ``w`` is in the image."""
    if len(w) != frame.m:
        raise ValueError(f"expected a vector of length {frame.m}, got {len(w)}")
    p = frame.p
    red = [x % p for x in w]
    for basis_vec, r in zip(frame.image_basis, frame.image_pivot_rows):
        f = red[r]
        if f:
            red = [(a - f * b) % p for a, b in zip(red, basis_vec)]
    return tuple(red[i] for i in frame.coker_rows)


def coker_section(frame: KernelCokernelFrame, coords: Sequence[int]) -> Vector:
    """The representative with the given cokernel coordinates and zeros at image pivot rows."""
    if len(coords) != frame.coker_dim:
        raise ValueError(f"expected {frame.coker_dim} cokernel coordinates, got {len(coords)}")
    w = [0] * frame.m
    for i, x in zip(frame.coker_rows, coords):
        w[i] = x % frame.p
    return tuple(w)


def coker_projection_matrix(frame: KernelCokernelFrame) -> MatrixModP:
    """The c x m matrix of ``coker_project`` (it is linear)."""
    cols = [coker_project(frame, tuple(int(i == j) for i in range(frame.m))) for j in range(frame.m)]
    c = frame.coker_dim
    return MatrixModP(frame.psi.prime, c, frame.m, tuple(cols[j][i] for i in range(c) for j in range(frame.m)))
