"""Checks of the counting lemmas and the uniformity theorem, plus the sweep
behind ``bockstein verify``.

Each ``check_*`` function returns ``(passed, detail)``. The sweep is
deterministic for a given set of parameters.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import asdict, dataclass, field

from .core import GammaContext, b_map, bockstein_of, construct_phi_for, gamma_context
from .distribution import (
    count_report,
    exhaustive_census,
    feasible_k,
    joint_census,
    sample_conditional,
)
from .field_linalg import MatrixModP, as_prime, coker_project, rank
from .module_linalg import (
    MatrixModP2,
    enumerate_L0,
    enumerate_L_psi,
    enumerate_mod_p,
    reduce_mod_p,
    reduce_vector,
    times_p,
)

ALPHA = 1e-3


def psi_literal(psi: MatrixModP) -> str:
    return ";".join(",".join(str(x) for x in psi.row(i)) for i in range(psi.rows)) or "[]"


def _vectors(q: int, n: int):
    return itertools.product(range(q), repeat=n)


def check_L_psi_count(psi: MatrixModP, budget: int | None = None) -> tuple[bool, str]:
    elems = list(enumerate_L_psi(psi, budget))
    expected = psi.p ** (psi.rows * psi.cols)
    distinct = len(set(elems))
    reduce_ok = all(reduce_mod_p(phi) == psi for phi in elems)
    ok = len(elems) == expected == distinct and reduce_ok
    return ok, f"{len(elems)} elements ({distinct} distinct), expected {expected}"


def check_fiber(ctx: GammaContext, budget: int | None = None) -> tuple[bool, str]:
    census = exhaustive_census(ctx, budget)
    pred = census.prediction()
    sizes = sorted(set(census.counts.values()))
    return census.passed, (
        f"k={ctx.k} fibers {sizes} (expect {pred.fiber_size}), "
        f"{len(census.counts)} betas (expect {pred.hom_size})"
    )


def check_surjective(ctx: GammaContext) -> tuple[bool, str]:
    bad = 0
    for beta in ctx.all_betas():
        phi = construct_phi_for(ctx, beta)
        if reduce_mod_p(phi) != ctx.psi or bockstein_of(ctx, phi) != beta:
            bad += 1
    return bad == 0, f"{ctx.hom_size} betas round-tripped, {bad} failures"


def check_linearity_exhaustive(ctx: GammaContext) -> tuple[bool, str]:
    m, n = ctx.psi.shape
    L0 = list(enumerate_L0(ctx.prime, m, n))
    images = {x: b_map(ctx, x) for x in L0}
    bad = 0
    for x, y in itertools.product(L0, repeat=2):
        if images[x + y] != images[x] + images[y]:
            bad += 1
    for x in L0:
        for alpha in range(ctx.p * ctx.p):
            if b_map(ctx, x.scale(alpha)) != images[x].scale(alpha):
                bad += 1
    return bad == 0, f"{len(L0) ** 2} pairs and {len(L0) * ctx.p ** 2} scalings, {bad} failures"


def random_L0(ctx: GammaContext, rng: random.Random) -> MatrixModP2:
    m, n = ctx.psi.shape
    p = ctx.p
    return times_p(MatrixModP(ctx.prime, m, n, tuple(rng.randrange(p) for _ in range(m * n))))


def random_psi(p: int, m: int, n: int, rng: random.Random, target_rank: int | None = None) -> MatrixModP:
    """Uniform random psi, or a random psi of the requested rank.

    A ranked draw is a product of random m x r and r x n factors, retried until
    the product keeps rank r, so low ranks do not need rejection from the full space.
    """
    prime = as_prime(p)
    if target_rank is None:
        return MatrixModP(prime, m, n, tuple(rng.randrange(prime.p) for _ in range(m * n)))
    if not 0 <= target_rank <= min(m, n):
        raise ValueError(f"rank {target_rank} impossible for a {m}x{n} matrix")
    r = target_rank
    while True:
        a = MatrixModP(prime, m, r, tuple(rng.randrange(prime.p) for _ in range(m * r)))
        b = MatrixModP(prime, r, n, tuple(rng.randrange(prime.p) for _ in range(r * n)))
        psi = a.matmul(b)
        if rank(psi) == r:
            return psi


def check_linearity_random(ctx: GammaContext, trials: int, rng: random.Random) -> tuple[bool, str]:
    bad = 0
    for _ in range(trials):
        x, y = random_L0(ctx, rng), random_L0(ctx, rng)
        alpha = rng.randrange(ctx.p * ctx.p)
        if b_map(ctx, x + y) != b_map(ctx, x) + b_map(ctx, y):
            bad += 1
        if b_map(ctx, x.scale(alpha)) != b_map(ctx, x).scale(alpha):
            bad += 1
    return bad == 0, f"{trials} random triples, {bad} failures"


def check_lift_independence(ctx: GammaContext, trials: int, rng: random.Random) -> tuple[bool, str]:
    p, q = ctx.p, ctx.p * ctx.p
    phi0 = ctx.phi0.matrix
    bad = 0
    for _ in range(trials):
        phi = phi0 + random_L0(ctx, rng)
        lifts = [tuple((x + p * rng.randrange(p)) % q for x in e) for e in ctx.lifted.lifted_kernel]
        if bockstein_of(ctx, phi, lifts) != bockstein_of(ctx, phi):
            bad += 1
    return bad == 0, f"{trials} alternative lifts, {bad} failures"


def check_kernel_is_image(p: int, n: int) -> tuple[bool, str]:
    """Multiplication by p on (Z/p^2)^n has kernel equal to image."""
    q = p * p
    vs = list(_vectors(q, n))
    kernel = {v for v in vs if all(p * x % q == 0 for x in v)}
    image = {tuple(p * x % q for x in v) for v in vs}
    return kernel == image, f"|ker p| = {len(kernel)}, |im p| = {len(image)}"


def check_px_to_xbar(p: int, n: int) -> tuple[bool, str]:
    """``p x -> x mod p`` is a well-defined additive bijection from pV onto V mod p."""
    q = p * p
    assignment: dict[tuple, tuple] = {}
    for x in _vectors(q, n):
        px = tuple(p * a % q for a in x)
        xbar = reduce_vector(x, p)
        if assignment.setdefault(px, xbar) != xbar:
            return False, f"not well-defined at {px}"
    bijective = len(assignment) == p ** n and len(set(assignment.values())) == p ** n
    additive = all(
        assignment[tuple((a + b) % q for a, b in zip(u, v))]
        == tuple((a + b) % p for a, b in zip(assignment[u], assignment[v]))
        for u, v in itertools.product(assignment, repeat=2)
    )
    return bijective and additive, f"{len(assignment)} classes, bijective={bijective}, additive={additive}"


def check_lift_basis(psi: MatrixModP) -> tuple[bool, str]:
    """The lifted frame basis is a basis of (Z/p^2)^n: coefficients -> vectors is bijective."""
    ctx = gamma_context(psi)
    basis = ctx.lifted.basis_matrix()
    q, n = basis.modulus, basis.rows
    invertible = rank(reduce_mod_p(basis)) == n
    reached = {basis.matvec(a) for a in _vectors(q, n)}
    return invertible and len(reached) == q ** n, f"reduction invertible={invertible}, {len(reached)} of {q ** n} vectors reached"


def check_coker_iso(phi: MatrixModP2) -> tuple[bool, str]:
    """``p w + phi(pV) -> class of w mod p`` is a well-defined bijection onto coker psi."""
    p, q = phi.p, phi.modulus
    m, n = phi.shape
    ctx = gamma_context(reduce_mod_p(phi))
    sub = {phi.matvec(tuple(p * a % q for a in v)) for v in _vectors(q, n)}
    classes: dict[frozenset, set] = {}
    for w in _vectors(q, m):
        pw = tuple(p * x % q for x in w)
        coset = frozenset(tuple((a + b) % q for a, b in zip(pw, s)) for s in sub)
        classes.setdefault(coset, set()).add(coker_project(ctx.frame, w))
    well_defined = all(len(v) == 1 for v in classes.values())
    images = {next(iter(v)) for v in classes.values()}
    bijective = len(images) == len(classes) == p ** ctx.c
    return well_defined and bijective, f"{len(classes)} classes onto {len(images)} coker elements"


def check_joint_flat(p: int, m: int, n: int, budget: int | None = None) -> tuple[bool, str]:
    table = joint_census(p, m, n, budget)
    flat = all(b.is_flat() for b in table.bins.values())
    sized = all(b.total == p ** (m * n) for b in table.bins.values())
    return flat and sized and table.trials == p ** (2 * m * n), (
        f"{table.trials} maps in {len(table.bins)} psi-bins, all flat={flat}"
    )


def check_counting_identity(max_dim: int = 8) -> tuple[bool, str]:
    triples = bad = 0
    for m in range(max_dim + 1):
        for n in range(max_dim + 1):
            for k in range(n + 1):
                if not feasible_k(m, n, k):
                    continue
                triples += 1
                if m * n != k * (m - n + k) + (m + k) * (n - k):
                    bad += 1
    return bad == 0, f"{triples} feasible triples, {bad} failures"


def check_conditional_uniformity(ctx: GammaContext, trials: int, seed: int,
                                 alpha: float = ALPHA) -> tuple[bool, str]:
    r = sample_conditional(ctx, trials, seed)
    return r.p_value > alpha, (
        f"chi2={r.chi_square:.4f} dof={r.degrees_of_freedom} p={r.p_value:.4g}"
    )


@dataclass
class CheckResult:
    criterion: str
    subject: str
    passed: bool
    detail: str


@dataclass
class VerifyReport:
    primes: list[int]
    max_dim: int
    trials: int
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, criterion: str, subject: str, result: tuple[bool, str]) -> None:
        self.checks.append(CheckResult(criterion, subject, *result))

    def to_dict(self) -> dict:
        return {
            "kind": "verify_report",
            "primes": self.primes,
            "max_dim": self.max_dim,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }

    def summary(self) -> str:
        cw = max((len(c.criterion) for c in self.checks), default=0)
        width = max((len(c.subject) for c in self.checks), default=0)
        lines = [f"{c.criterion:<{cw}}  {c.subject:<{width}}  {'PASS' if c.passed else 'FAIL'}  {c.detail}"
                 for c in self.checks]
        n_pass = sum(c.passed for c in self.checks)
        lines.append(f"{n_pass}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"


EXHAUSTIVE_PAIR_CAP = 1 << 12
JOINT_CAP = 1 << 16


def run_verify(primes: list[int], max_dim: int, trials: int, seed: int,
               budget: int | None = None) -> VerifyReport:
    report = VerifyReport(sorted(set(primes)), max_dim, trials, seed)
    rng = random.Random(seed)
    dims = [(m, n) for m in range(1, max_dim + 1) for n in range(1, max_dim + 1)]
    for p in report.primes:
        for m, n in dims:
            for psi in enumerate_mod_p(p, m, n, budget):
                subject = f"p={p} {m}x{n} psi={psi_literal(psi)}"
                ctx = gamma_context(psi)
                report.add("L_psi size", subject, check_L_psi_count(psi, budget))
                report.add("fiber size", subject, check_fiber(ctx, budget))
                report.add("surjectivity", subject, check_surjective(ctx))
        for n in range(1, max_dim + 1):
            report.add("p kills = p image", f"p={p} n={n}", check_kernel_is_image(p, n))
            report.add("pV ~ V mod p", f"p={p} n={n}", check_px_to_xbar(p, n))
        m = n = max_dim
        for r in range(min(m, n) + 1):
            psi = random_psi(p, m, n, rng, r)
            ctx = gamma_context(psi)
            subject = f"p={p} {m}x{n} rank {r} psi={psi_literal(psi)}"
            if (p ** (m * n)) ** 2 <= EXHAUSTIVE_PAIR_CAP:
                report.add("B linear", subject, check_linearity_exhaustive(ctx))
            else:
                report.add("B linear", subject, check_linearity_random(ctx, 200, rng))
            report.add("lift independence", subject, check_lift_independence(ctx, 200, rng))
            report.add("lifted basis", subject, check_lift_basis(psi))
            phi = ctx.phi0.matrix + random_L0(ctx, rng)
            if (p * p) ** (m + n) <= JOINT_CAP:
                report.add("pW/phi(pV) ~ coker", subject, check_coker_iso(phi))
            report.add("uniformity", subject, check_conditional_uniformity(ctx, trials, seed))
        for m, n in dims:
            if p ** (2 * m * n) <= JOINT_CAP:
                report.add("joint flatness", f"p={p} {m}x{n}", check_joint_flat(p, m, n, budget))
    report.add("count identity", "m,n <= 8", check_counting_identity(8))
    for p in report.primes:
        for m, n in dims:
            for k in range(n + 1):
                if feasible_k(m, n, k):
                    c = count_report(p, m, n, k)
                    ok = c.size_L_psi == c.hom_size * c.fiber_size
                    report.add("closed forms", f"p={p} {m}x{n} k={k}",
                               (ok, f"|L|={c.size_L_psi} hom={c.hom_size} fiber={c.fiber_size}"))
    return report
