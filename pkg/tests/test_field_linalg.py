import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bockstein.field_linalg import (
    MatrixModP,
    Prime,
    coker_frame,
    coker_project,
    coker_projection_matrix,
    coker_section,
    kernel_basis,
    rank,
    rref,
)

from conftest import all_vectors, brute_image, brute_kernel, random_matrix


def M(p, rows, cols=None):
    return MatrixModP.from_rows(p, rows, cols)


@st.composite
def matrices(draw, primes=(2, 3, 5, 7), max_dim=4):
    p = draw(st.sampled_from(primes))
    m = draw(st.integers(0, max_dim))
    n = draw(st.integers(0, max_dim))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=m * n, max_size=m * n))
    return MatrixModP(Prime(p), m, n, tuple(entries))


def row_space(mat):
    p = mat.p
    rows = [mat.row(i) for i in range(mat.rows)]
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        out.add(tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % p for j in range(mat.cols)))
    return out


class TestPrime:
    def test_rejects_composites_and_large(self):
        for bad in (0, 1, 4, 9, 15):
            with pytest.raises(ValueError):
                Prime(bad)
        with pytest.raises(ValueError):
            Prime(1048583)  # prime, but above 2**20
        assert Prime(1048573).square == 1048573 ** 2

    def test_matrix_validation(self):
        with pytest.raises(ValueError):
            M(2, [[2]])
        with pytest.raises(ValueError):
            MatrixModP(Prime(3), 2, 2, (0, 1, 2))
        assert M(2, [], cols=3).shape == (0, 3)


class TestRref:
    def test_identity(self):
        res = rref(M(2, [[1, 0], [0, 1]]))
        assert res.rref == M(2, [[1, 0], [0, 1]])
        assert res.pivot_cols == (0, 1) and res.rank == 2

    def test_permutation(self):
        res = rref(M(2, [[0, 1], [1, 0]]))
        assert res.rref == M(2, [[1, 0], [0, 1]])
        assert res.rank == 2

    def test_rank_one_mod3(self):
        A = M(3, [[2, 1], [1, 2]])
        res = rref(A)
        assert res.rref == M(3, [[1, 2], [0, 0]])
        assert res.pivot_cols == (0,) and res.rank == 1
        # the nonzero rows span the same row space, checked over all 9 vectors
        assert row_space(res.rref) == row_space(A)
        assert len(row_space(A)) == 3

    def test_empty(self):
        for shape in [(0, 0), (0, 3), (3, 0)]:
            res = rref(MatrixModP.zeros(5, *shape))
            assert res.rank == 0 and res.rref.shape == shape

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_idempotent_random(self, p):
        rng = random.Random(p)
        for _ in range(1000):
            A = random_matrix(rng, p, rng.randrange(0, 6), rng.randrange(0, 6))
            R = rref(A)
            assert rref(R.rref).rref == R.rref
            assert R.rank <= min(A.shape)
            for r, c in enumerate(R.pivot_cols):
                assert R.rref.column(c) == tuple(int(i == r) for i in range(A.rows))

    @given(matrices())
    def test_row_space_preserved(self, A):
        if A.p ** A.rows <= 4096:
            assert row_space(rref(A).rref) == row_space(A)


class TestKernel:
    def test_projection(self):
        assert kernel_basis(M(2, [[1, 0], [0, 0]])) == ((0, 1),)

    def test_zero_map(self):
        assert kernel_basis(M(2, [[0, 0], [0, 0]])) == ((1, 0), (0, 1))

    def test_rank_one_mod3(self):
        psi = M(3, [[1, 2], [2, 1]])
        assert kernel_basis(psi) == ((1, 1),)
        assert brute_kernel(psi) == {(0, 0), (1, 1), (2, 2)}

    def test_full_rank_is_empty(self):
        assert kernel_basis(M(5, [[1, 2], [3, 4], [0, 1]])) == ()

    @given(matrices())
    @settings(max_examples=300)
    def test_rank_nullity_and_canonical(self, psi):
        basis = kernel_basis(psi)
        assert len(basis) + rank(psi) == psi.cols
        for v in basis:
            assert not any(psi.matvec(v))
        free = [c for c in range(psi.cols) if c not in rref(psi).pivot_cols]
        ident = [[v[c] for v in basis] for c in free]
        assert ident == [[int(i == j) for j in range(len(free))] for i in range(len(free))]

    @pytest.mark.parametrize("p,n", [(2, 3), (3, 2)])
    def test_spans_brute_kernel(self, p, n):
        for m in range(0, 3):
            for entries in itertools.product(range(p), repeat=m * n):
                psi = MatrixModP(Prime(p), m, n, entries)
                basis = kernel_basis(psi)
                span = {tuple(sum(c * v[j] for c, v in zip(cs, basis)) % p for j in range(n))
                        for cs in itertools.product(range(p), repeat=len(basis))}
                assert span == brute_kernel(psi)


class TestCokerFrame:
    def test_projection(self):
        frame = coker_frame(M(2, [[1, 0], [0, 0]]))
        assert frame.image_pivot_rows == (0,)
        assert frame.coker_rows == (1,)

    def test_invertible(self):
        frame = coker_frame(M(3, [[1, 2], [0, 1]]))
        assert frame.coker_rows == ()
        assert frame.k == 0

    def test_zero_tall(self):
        frame = coker_frame(MatrixModP.zeros(2, 3, 2))
        assert frame.coker_rows == (0, 1, 2)
        assert frame.k == 2
        assert frame.coker_dim == 3 == frame.m - frame.n + frame.k

    @given(matrices())
    def test_dimensions(self, psi):
        frame = coker_frame(psi)
        assert frame.k + frame.rank == psi.cols
        assert frame.coker_dim == psi.rows - psi.cols + frame.k
        assert set(frame.coker_rows).isdisjoint(frame.image_pivot_rows)
        assert sorted(frame.coker_rows + frame.image_pivot_rows) == list(range(psi.rows))


class TestCokerProject:
    def test_projection_example(self):
        frame = coker_frame(M(2, [[1, 0], [0, 0]]))
        assert coker_project(frame, (1, 1)) == (1,)

    def test_rank_one_mod3(self):
        psi = M(3, [[1, 2], [2, 1]])
        frame = coker_frame(psi)
        assert coker_project(frame, (0, 1)) == (1,)
        assert coker_project(frame, (1, 0)) == (1,)
        # (0,1) - (1,0) = (2,1) lies in the image, so both are the same class
        assert (2, 1) in brute_image(psi)

    def test_image_maps_to_zero(self, rng):
        for _ in range(200):
            psi = random_matrix(rng, 5, 3, 2)
            v = tuple(rng.randrange(5) for _ in range(2))
            assert not any(coker_project(coker_frame(psi), psi.matvec(v)))

    def test_dimension_mismatch(self):
        frame = coker_frame(M(2, [[1, 0], [0, 0]]))
        with pytest.raises(ValueError):
            coker_project(frame, (1, 0, 0))

    @pytest.mark.parametrize("p,max_n", [(2, 3), (3, 2)])
    def test_linear_with_kernel_the_image_exhaustive(self, p, max_n):
        for m in range(1, 4):
            ws = all_vectors(p, m)
            for n in range(0, max_n + 1):
                for entries in itertools.product(range(p), repeat=m * n):
                    psi = MatrixModP(Prime(p), m, n, entries)
                    frame = coker_frame(psi)
                    proj = {w: coker_project(frame, w) for w in ws}
                    assert {w for w in ws if not any(proj[w])} == brute_image(psi)
                    for w1 in ws[:9]:
                        for w2 in ws:
                            s = tuple((a + b) % p for a, b in zip(w1, w2))
                            assert proj[s] == tuple((a + b) % p for a, b in zip(proj[w1], proj[w2]))

    @given(matrices(), st.data())
    def test_section_and_matrix(self, psi, data):
        frame = coker_frame(psi)
        coords = tuple(data.draw(st.integers(0, psi.p - 1)) for _ in range(frame.coker_dim))
        w = coker_section(frame, coords)
        assert coker_project(frame, w) == coords
        P = coker_projection_matrix(frame)
        assert P.matvec(w) == coords
