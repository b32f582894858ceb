"""Closed-form counts, exhaustive fiber censuses and seeded sampling.

Census and sampling work is split into index ranges whose partial count
tables are merged by addition, so results do not depend on how the work
was partitioned.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import BocksteinMatrix, GammaContext, bockstein_of, gamma_context
from .field_linalg import MatrixModP, as_prime, coker_projection_matrix
from .module_linalg import (
    MatrixModP2,
    check_budget,
    enumerate_L_psi,
    enumerate_mod_p2,
    l0_size,
    reduce_mod_p,
)
from .rng import SplitMix64, batch_draw, check_seed
from .stats import chi_square_uniform

log = logging.getLogger(__name__)

DEFAULT_TABLE_BUDGET = 1 << 20
_BATCH = 1 << 14


class InfeasibleDimensions(ValueError):
    pass


@dataclass(frozen=True)
class CountReport:
    p: int
    m: int
    n: int
    k: int
    size_L_psi: int
    hom_size: int
    fiber_size: int
    theorem_probability: Fraction

    @property
    def coker_dim(self) -> int:
        return self.m - self.n + self.k


def feasible_k(m: int, n: int, k: int) -> bool:
    # rank n - k must lie in [0, min(m, n)].
    return 0 <= k <= n and n - k <= min(m, n)


def count_report(p: int, m: int, n: int, k: int) -> CountReport:
    """Closed-form sizes of L_psi, the hom-space and each fiber for ``dim ker psi = k``."""
    p = as_prime(p).p
    if m < 0 or n < 0 or not feasible_k(m, n, k):
        raise InfeasibleDimensions(f"no {m}x{n} map has a kernel of dimension {k}")
    c = m - n + k
    size = p ** (m * n)
    hom = p ** (k * c)
    fiber = p ** ((m + k) * (n - k))
    assert size == hom * fiber
    return CountReport(p, m, n, k, size, hom, fiber, Fraction(1, hom))


def _sort_key(key: bytes) -> tuple[int, ...]:
    return tuple(BocksteinMatrix.from_bytes(key, "").entries)


@dataclass(frozen=True)
class FiberCensus:
    psi: MatrixModP
    k: int
    c: int
    counts: dict[bytes, int]
    total: int

    @property
    def p(self) -> int:
        return self.psi.p

    @property
    def psi_digest(self) -> str:
        return self.psi.digest()

    def prediction(self) -> CountReport:
        return count_report(self.p, self.psi.rows, self.psi.cols, self.k)

    def items(self) -> list[tuple[BocksteinMatrix, int]]:
        digest = self.psi_digest
        return [(BocksteinMatrix.from_bytes(key, digest), self.counts[key])
                for key in sorted(self.counts, key=_sort_key)]

    def checks(self) -> dict[str, bool]:
        pred = self.prediction()
        return {
            "total": self.total == pred.size_L_psi,
            "fiber_sizes": all(v == pred.fiber_size for v in self.counts.values()),
            "surjective": len(self.counts) == pred.hom_size,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks().values())


def _census_range(ctx: GammaContext, start: int, stop: int, budget: int | None) -> Counter:
    out: Counter = Counter()
    for phi in enumerate_L_psi(ctx.psi, budget, ctx.phi0, start, stop):
        out[bockstein_of(ctx, phi).to_bytes()] += 1
    return out


def _split(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    bounds = [total * i // parts for i in range(parts + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(parts) if bounds[i] < bounds[i + 1]]


def exhaustive_census(ctx: GammaContext, budget: int | None = None, workers: int = 1) -> FiberCensus:
    """Apply the Bockstein map to every element of ``L_psi`` and tally the results."""
    m, n = ctx.psi.shape
    total = l0_size(ctx.p, m, n)
    check_budget(total, budget)
    counts: Counter = Counter()
    if workers > 1 and total > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_census_range, ctx, a, b, budget) for a, b in _split(total, workers * 4)]
            for fut in futures:
                counts.update(fut.result())
    else:
        counts = _census_range(ctx, 0, total, budget)
    return FiberCensus(ctx.psi, ctx.k, ctx.c, dict(counts), sum(counts.values()))


@dataclass(frozen=True)
class SampleReport:
    psi: MatrixModP
    k: int
    c: int
    trials: int
    seed: int
    counts: dict[bytes, int]
    chi_square: float
    degrees_of_freedom: int
    p_value: float

    @property
    def p(self) -> int:
        return self.psi.p

    @property
    def hom_size(self) -> int:
        return self.p ** (self.k * self.c)

    def items(self) -> list[tuple[BocksteinMatrix, int]]:
        digest = self.psi.digest()
        return [(BocksteinMatrix.from_bytes(key, digest), self.counts[key])
                for key in sorted(self.counts, key=_sort_key)]

    def total_variation(self) -> float:
        """Distance between the empirical distribution and the uniform one on the hom-space."""
        h = self.hom_size
        seen = sum(abs(v / self.trials - 1 / h) for v in self.counts.values())
        return 0.5 * (seen + (h - len(self.counts)) / h)


class _BatchEvaluator:
    """Vectorised Bockstein map for phi = phi0 + p*M, exact in int64.

    Same arithmetic as ``bockstein_of``: multiply by the lifted kernel basis,
    divide by p, then apply the (linear) cokernel projection.
    """

    def __init__(self, ctx: GammaContext):
        p, (m, n) = ctx.p, ctx.psi.shape
        self.ctx = ctx
        self.p = p
        self.q = p * p
        self.phi0 = np.array(ctx.phi0.matrix.to_rows(), dtype=np.int64).reshape(m, n)
        self.psi = np.array(ctx.psi.to_rows(), dtype=np.int64).reshape(m, n)
        self.lifts = np.array(ctx.lifted.lifted_kernel, dtype=np.int64).reshape(ctx.k, n).T
        proj = coker_projection_matrix(ctx.frame)
        self.proj = np.array(proj.to_rows(), dtype=np.int64).reshape(ctx.c, m)
        size = ctx.k * ctx.c
        self.weights = np.array([p ** e for e in range(size - 1, -1, -1)], dtype=np.int64)

    @staticmethod
    def supported(ctx: GammaContext) -> bool:
        p, (m, n) = ctx.p, ctx.psi.shape
        q = p * p
        return (max(n, 1) * (q - 1) * (p - 1) < 1 << 62
                and max(m, 1) * (p - 1) ** 2 < 1 << 62
                and ctx.hom_size < 1 << 62)

    def indices(self, M: np.ndarray) -> np.ndarray:
        """Hom-space index (row-major base-p digits of beta) for each sample."""
        p, q = self.p, self.q
        phi = (self.phi0[None] + p * M) % q
        assert np.array_equal(phi % p, np.broadcast_to(self.psi, phi.shape))
        images = (phi @ self.lifts) % q
        assert not (images % p).any(), "kernel image not divisible by p"
        beta = (self.proj[None] @ (images // p)) % p
        flat = beta.reshape(beta.shape[0], -1)
        return flat @ self.weights if flat.shape[1] else np.zeros(flat.shape[0], dtype=np.int64)


def _conditional_range(ctx: GammaContext, seed: int, start: int, stop: int) -> Counter:
    """Tally hom-space indices for trials ``start .. stop-1``."""
    p, (m, n) = ctx.p, ctx.psi.shape
    out: Counter = Counter()
    if _BatchEvaluator.supported(ctx):
        ev = _BatchEvaluator(ctx)
        for a in range(start, stop, _BATCH):
            b = min(stop, a + _BATCH)
            M = batch_draw(seed, a, b - a, m * n, p).reshape(b - a, m, n)
            idx, cnt = np.unique(ev.indices(M), return_counts=True)
            out.update(dict(zip(idx.tolist(), cnt.tolist())))
        return out
    phi0 = ctx.phi0.matrix
    for t in range(start, stop):
        beta = _sample_one(ctx, phi0, seed, t)
        out[_beta_index(beta)] += 1
    return out


def _beta_index(beta: BocksteinMatrix) -> int:
    idx = 0
    for x in beta.entries:
        idx = idx * beta.p + x
    return idx


def _sample_one(ctx: GammaContext, phi0: MatrixModP2, seed: int, trial: int) -> BocksteinMatrix:
    p, (m, n) = ctx.p, ctx.psi.shape
    draws = SplitMix64.for_trial(seed, trial).draw(m * n, p)
    x = MatrixModP2(ctx.prime, m, n, tuple(p * d for d in draws))
    return bockstein_of(ctx, phi0 + x)


def sample_conditional_scalar(ctx: GammaContext, trials: int, seed: int) -> Counter:
    """Reference path: one ``bockstein_of`` call per trial. Keys are serialized betas."""
    phi0 = ctx.phi0.matrix
    return Counter(_sample_one(ctx, phi0, seed, t).to_bytes() for t in range(trials))


def sample_conditional(ctx: GammaContext, trials: int, seed: int, workers: int = 1,
                       table_budget: int = DEFAULT_TABLE_BUDGET) -> SampleReport:
    """Uniform samples from ``L_psi`` (via ``phi0 + p*M``) with a chi-square test of flatness."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    check_seed(seed)
    check_budget(ctx.hom_size, table_budget)
    by_index: Counter = Counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_conditional_range, ctx, seed, a, b) for a, b in _split(trials, workers)]
            for fut in futures:
                by_index.update(fut.result())
    else:
        by_index = _conditional_range(ctx, seed, 0, trials)
    counts = {ctx.beta_from_index(i).to_bytes(): v for i, v in sorted(by_index.items())}
    stat, dof, pval = chi_square_uniform(list(counts.values()), ctx.hom_size)
    log.debug("sampled %d trials, chi2=%.4f dof=%d p=%.4g", trials, stat, dof, pval)
    return SampleReport(ctx.psi, ctx.k, ctx.c, trials, seed, counts, stat, dof, pval)


@dataclass
class PsiBin:
    psi: MatrixModP
    k: int
    c: int
    counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def hom_size(self) -> int:
        return self.psi.p ** (self.k * self.c)

    def frequencies(self) -> dict[bytes, Fraction]:
        t = self.total
        return {key: Fraction(v, t) for key, v in self.counts.items()}

    def is_flat(self) -> bool:
        """Every element of the hom-space seen equally often."""
        return len(self.counts) == self.hom_size and len(set(self.counts.values())) == 1


@dataclass
class JointTable:
    """Histogram over ``(psi, beta)`` for phi drawn from all of Mat(Z/p^2)."""

    p: int
    m: int
    n: int
    trials: int
    seed: int | None
    bins: dict[str, PsiBin]

    def rank_histogram(self) -> dict[int, int]:
        out: Counter = Counter()
        for b in self.bins.values():
            out[b.k] += b.total
        return dict(sorted(out.items()))


def _tally_joint(bins: dict[str, PsiBin], contexts: dict[str, GammaContext], phi: MatrixModP2) -> None:
    psi = reduce_mod_p(phi)
    digest = psi.digest()
    ctx = contexts.get(digest)
    if ctx is None:
        ctx = contexts[digest] = gamma_context(psi)
        bins[digest] = PsiBin(psi, ctx.k, ctx.c)
    bins[digest].counts[bockstein_of(ctx, phi).to_bytes()] += 1


def sample_unconditional(p: int, m: int, n: int, trials: int, seed: int) -> JointTable:
    """phi with i.i.d. uniform entries in ``[0, p^2)``, binned by its reduction psi."""
    prime = as_prime(p)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    check_seed(seed)
    bins: dict[str, PsiBin] = {}
    contexts: dict[str, GammaContext] = {}
    q = prime.square
    for t in range(trials):
        draws = SplitMix64.for_trial(seed, t).draw(m * n, q)
        _tally_joint(bins, contexts, MatrixModP2(prime, m, n, tuple(draws)))
    return JointTable(prime.p, m, n, trials, seed, dict(sorted(bins.items())))


def joint_census(p: int, m: int, n: int, budget: int | None = None) -> JointTable:
    """Exhaustive version of ``sample_unconditional``: every phi over Z/p^2 exactly once."""
    prime = as_prime(p)
    bins: dict[str, PsiBin] = {}
    contexts: dict[str, GammaContext] = {}
    total = 0
    for phi in enumerate_mod_p2(prime, m, n, budget):
        _tally_joint(bins, contexts, phi)
        total += 1
    return JointTable(prime.p, m, n, total, None, dict(sorted(bins.items())))
