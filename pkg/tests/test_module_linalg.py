import itertools

import pytest

from bockstein.field_linalg import MatrixModP, Prime, coker_frame, rank
from bockstein.module_linalg import (
    BudgetExceeded,
    MatrixModP2,
    build_phi0,
    canonical_lift,
    enumerate_L0,
    enumerate_L_psi,
    enumerate_mod_p,
    inverse_mod_p2,
    l0_element,
    lifted_frame,
    reduce_mod_p,
    times_p,
)

from conftest import all_vectors, random_matrix


def P(p, rows, cols=None):
    return MatrixModP.from_rows(p, rows, cols)


def P2(p, rows, cols=None):
    return MatrixModP2.from_rows(p, rows, cols)


class TestReduceAndLift:
    def test_reduce(self):
        assert reduce_mod_p(P2(2, [[2]])) == P(2, [[0]])
        assert reduce_mod_p(P2(2, [[3]])) == P(2, [[1]])
        assert reduce_mod_p(P2(3, [[5, 7], [3, 0]])) == P(3, [[2, 1], [0, 0]])

    def test_lift(self):
        assert canonical_lift(P(2, [[1]])) == P2(2, [[1]])
        assert canonical_lift(P(2, [[0]])) == P2(2, [[0]])
        lifted = canonical_lift(P(3, [[2, 1], [0, 2]]))
        assert lifted == P2(3, [[2, 1], [0, 2]]) and lifted.modulus == 9

    def test_lift_then_reduce(self, rng):
        for _ in range(100):
            psi = random_matrix(rng, 7, rng.randrange(4), rng.randrange(4))
            assert reduce_mod_p(canonical_lift(psi)) == psi

    def test_entries_in_range(self):
        with pytest.raises(ValueError):
            P2(2, [[4]])


class TestPhi0:
    def test_invertible(self):
        psi = P(3, [[1, 2], [0, 1]])
        assert build_phi0(psi).matrix == canonical_lift(psi)

    def test_zero(self):
        assert build_phi0(MatrixModP.zeros(5, 2, 3)).matrix.is_zero()

    def test_projection(self):
        psi = P(2, [[1, 0], [0, 0]])
        phi0 = build_phi0(psi).matrix
        assert phi0 == P2(2, [[1, 0], [0, 0]])
        assert phi0.matvec((0, 1)) == (0, 0)
        assert reduce_mod_p(phi0) == psi

    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_invariants_random(self, p, rng):
        for _ in range(100):
            psi = random_matrix(rng, p, rng.randrange(5), rng.randrange(5))
            lifted = lifted_frame(coker_frame(psi))
            phi0 = build_phi0(psi, lifted).matrix
            assert reduce_mod_p(phi0) == psi
            for e in lifted.lifted_kernel:
                assert not any(phi0.matvec(e))
            assert build_phi0(psi).matrix == phi0


class TestLiftedFrame:
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_basis_of_V(self, p, rng):
        for _ in range(100):
            m, n = rng.randrange(1, 5), rng.randrange(1, 5)
            psi = random_matrix(rng, p, m, n)
            lifted = lifted_frame(coker_frame(psi))
            assert tuple(e for e in lifted.lifted_kernel) == coker_frame(psi).kernel_basis
            S = lifted.basis_matrix()
            assert rank(reduce_mod_p(S)) == n
            # every target v is reached: solve S a = v with the inverse and check
            Sinv = inverse_mod_p2(S)
            for _ in range(5):
                v = tuple(rng.randrange(p * p) for _ in range(n))
                assert S.matvec(Sinv.matvec(v)) == v

    def test_complement_is_pivot_columns(self):
        lifted = lifted_frame(coker_frame(P(3, [[1, 2, 0], [0, 0, 1]])))
        assert lifted.lifted_complement == ((1, 0, 0), (0, 0, 1))
        assert lifted.lifted_kernel == ((1, 1, 0),)

    def test_inverse_rejects_singular(self):
        with pytest.raises(ArithmeticError):
            inverse_mod_p2(P2(2, [[2, 0], [0, 1]]))


class TestEnumeration:
    def test_L0_tiny(self):
        assert list(enumerate_L0(2, 1, 1)) == [P2(2, [[0]]), P2(2, [[2]])]

    def test_L0_sizes(self):
        assert len(list(enumerate_L0(2, 2, 2))) == 16
        elems = list(enumerate_L0(3, 1, 2))
        assert len(elems) == 9
        assert all(set(x.entries) <= {0, 3, 6} for x in elems)
        assert all(reduce_mod_p(x).is_zero() for x in elems)

    def test_L0_lexicographic_and_indexable(self):
        elems = list(enumerate_L0(3, 2, 1))
        assert [x.entries for x in elems] == sorted(x.entries for x in elems)
        assert [l0_element(3, 2, 1, i) for i in range(9)] == elems
        assert list(enumerate_L0(3, 2, 1, start=4, stop=7)) == elems[4:7]

    def test_L_psi_tiny(self):
        assert list(enumerate_L_psi(P(2, [[0]]))) == [P2(2, [[0]]), P2(2, [[2]])]
        assert sorted(x.entries for x in enumerate_L_psi(P(2, [[1]]))) == [(1,), (3,)]

    def test_L_psi_counts_2x2(self):
        for psi in enumerate_mod_p(2, 2, 2):
            elems = list(enumerate_L_psi(psi))
            assert len(elems) == 16 == len(set(elems))
            assert all(reduce_mod_p(phi) == psi for phi in elems)

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as exc:
            list(enumerate_L0(2, 5, 5, budget=1000))
        assert exc.value.required == 2 ** 25

    def test_budget_env(self, monkeypatch):
        monkeypatch.setenv("BOCKSTEIN_BUDGET", "8")
        with pytest.raises(BudgetExceeded):
            list(enumerate_L0(2, 2, 2))
        assert len(list(enumerate_L0(2, 1, 3))) == 8


class TestModuleLemmas:
    @pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
    def test_kernel_of_p_is_image(self, p, n):
        q = p * p
        V = all_vectors(q, n)
        for x in V:
            killed = all(p * a % q == 0 for a in x)
            hit = any(tuple(p * b % q for b in y) == x for y in V)
            assert killed == hit

    @pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
    def test_px_to_xbar_isomorphism(self, p, n):
        q = p * p
        V = all_vectors(q, n)
        f = {}
        for x in V:
            px = tuple(p * a % q for a in x)
            xbar = tuple(a % p for a in x)
            assert f.setdefault(px, xbar) == xbar
        assert sorted(f.values()) == all_vectors(p, n)
        for u, v in itertools.product(f, repeat=2):
            uv = tuple((a + b) % q for a, b in zip(u, v))
            assert f[uv] == tuple((a + b) % p for a, b in zip(f[u], f[v]))

    @pytest.mark.parametrize("p", [2, 3])
    def test_L0_scalars_only_matter_mod_p(self, p, rng):
        q = p * p
        for _ in range(50):
            x = times_p(random_matrix(rng, p, 2, 3))
            a = rng.randrange(q)
            b = (a + p * rng.randrange(p)) % q
            assert x.scale(a) == x.scale(b)
