"""Seeded acceptance suite: exactness checks for every construction.

Each criterion builds its own deterministic instances, checks them with the
exact oracles and returns a :class:`CriterionResult`. Failures are reported,
never raised. ``fault_injection`` deletes one star from every contraction
output in the cut and flow criteria, which must then fail; it exists to
show that the checks can fail.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .bipartite import BasicStarSparsifier, bucket_stars, sparsify_cut_contraction, sparsify_flow_contraction
from .cones import caratheodory_decompose, star_cone
from .extensions import (
    plan_vertex_integrity,
    sparsify_vertex_cover,
    sparsify_vertex_integrity,
    split_vertex_cover,
    vertex_integrity_size_bound,
)
from .generators import InstanceSpec, SmallSupport, UniformRational, generate, random_quasi_bipartite, random_star
from .mcf import Demand, flow_factor, star_flow_factor
from .mincut import CutOracle, exhaustive_min_cut, verify_cut_sparsifier
from .network import Network, cut_capacity, induced_subgraph
from .signatures import cut_signature, strong_signature
from .splitting import SplitError, split_demand_detailed
from .treewidth import inflation_blackbox, reduce_detailed

__all__ = [
    "SUITES",
    "CRITERIA",
    "CriterionResult",
    "AcceptanceReport",
    "run_acceptance",
    "NEGATIVE_CONTROL",
]

# weak-equal, strong-unequal stars with a demand that tells them apart
NEGATIVE_CONTROL = (
    (4, 5, 0, 2, 5),
    (4, 4, 1, 0, 2),
)


@dataclass
class CriterionResult:
    """Outcome of one criterion.

    Attributes:
        number: criterion number (1-7).
        name: short name.
        passed: every check held and the run finished within ``budget`` seconds.
        counts: named tallies (instances, demands, ...).
        seconds: wall time.
        budget: time limit in seconds.
        failures: one line per failed check, capped at 20.
    """

    number: int
    name: str
    passed: bool = True
    counts: dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0
    budget: float = 0.0
    failures: list[str] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.passed = False
        if len(self.failures) < 20:
            self.failures.append(message)

    def bump(self, key: str, by: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + by

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        counts = ", ".join(f"{k}={v}" for k, v in self.counts.items())
        return f"[{status}] criterion {self.number} {self.name}: {counts} ({self.seconds:.1f}s / {self.budget:.0f}s)"


@dataclass
class AcceptanceReport:
    results: list[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            out.append(r.line())
            out.extend(f"    {f}" for f in r.failures)
        return out

    def write_summary(self, path: str | Path) -> None:
        """One JSON record per criterion, one per line."""
        with Path(path).open("w") as fh:
            for r in self.results:
                fh.write(json.dumps(asdict(r), sort_keys=True) + "\n")


def _n(count: int, scale: float) -> int:
    return max(1, math.ceil(count * scale))


def _corrupt(h: Network) -> Network:
    """Delete the highest-id non-terminal with at least two neighbors."""
    for v in reversed(h.steiner_vertices()):
        if len(h.neighbors(v)) >= 2:
            return induced_subgraph(h, h.vertices - {v}, h.terminals)
    return h


# -- 1: cut exactness -----------------------------------------------------


def criterion_cut(scale: float = 1.0, fault_injection: bool = False, seed: int = 101) -> CriterionResult:
    res = CriterionResult(1, "cut-exactness", budget=120)
    for k in range(2, 7):
        for i in range(_n(100, scale)):
            rng = random.Random(seed * 1_000_003 + k * 1000 + i)
            g = random_quasi_bipartite(rng, k, rng.randint(1, 200))
            h = sparsify_cut_contraction(g)
            if fault_injection:
                h = _corrupt(h)
            rep = verify_cut_sparsifier(g, h)
            res.bump("instances")
            res.bump("bipartitions", rep.checked)
            for v in rep.violations:
                res.fail(f"k={k} instance {i}: side {sorted(v.side)} kappa_G={v.kappa_g} kappa_H={v.kappa_h}")
    return res


# -- 2: basic stars -------------------------------------------------------


def criterion_basic_stars(scale: float = 1.0, seed: int = 202) -> CriterionResult:
    res = CriterionResult(2, "basic-stars", budget=300)
    for k in (2, 3, 4):
        rng = random.Random(seed * 1_000_003 + k)
        g = random_quasi_bipartite(rng, k, _n(200, scale))
        est = BasicStarSparsifier().fit(g)
        h = est.transform(g)
        res.bump("instances")
        bound = k + 2 ** (k * k)
        if h.n > bound:
            res.fail(f"k={k}: {h.n} vertices exceeds {bound}")
        rep = verify_cut_sparsifier(g, h)
        for v in rep.violations:
            res.fail(f"k={k}: side {sorted(v.side)} kappa_G={v.kappa_g} kappa_H={v.kappa_h}")
        for s in g.steiner_vertices():
            c = g.capacity_vector(s)
            dec = caratheodory_decompose(c)
            cone = star_cone(c)
            res.bump("decompositions")
            if dec.reconstruct(k) != c:
                res.fail(f"k={k} star {s}: decomposition does not reconstruct {c}")
            if len(dec) > k:
                res.fail(f"k={k} star {s}: {len(dec)} terms")
            for ray, _ in dec.terms:
                if not cone.contains(ray.coords):
                    res.fail(f"k={k} star {s}: ray {ray.coords} disagrees with the signature")
    return res


# -- 3: flow exactness ----------------------------------------------------


def _random_demand(rng: random.Random, terminals) -> Demand:
    pairs = list(itertools.combinations(terminals, 2))
    while True:
        d = Demand({p: Fraction(rng.randint(1, 16), rng.randint(1, 4)) for p in pairs if rng.random() < 0.6})
        if not d.is_zero():
            return d


def _star_network(stars, k: int) -> Network:
    edges = [(k + s, t, x) for s, c in enumerate(stars) for t, x in enumerate(c) if x]
    return Network(edges, range(k), range(k + len(stars)))


def negative_control_search(trials: int = 3000, seed: int = 303) -> tuple[Demand, Fraction, Fraction] | None:
    """Search integer demands that fit the merged star but not the two separate stars.

    Returns ``(demand, lambda_separate, lambda_merged)`` for the first hit.
    """
    c1, c2 = NEGATIVE_CONTROL
    k = len(c1)
    g = _star_network([c1, c2], k)
    merged = tuple(a + b for a, b in zip(c1, c2))
    h = _star_network([merged], k)
    rng = random.Random(seed)
    pairs = list(itertools.combinations(range(k), 2))
    for _ in range(trials):
        room = list(merged)
        entries = {}
        rng.shuffle(pairs)
        for i, j in pairs:
            amount = rng.randint(0, min(room[i], room[j]))
            if amount:
                entries[(i, j)] = amount
                room[i] -= amount
                room[j] -= amount
        d = Demand(entries)
        if d.is_zero():
            continue
        lg, lh = flow_factor(g, d).lam, flow_factor(h, d).lam
        if lg != lh:
            return d, lg, lh
    return None


def criterion_flow(scale: float = 1.0, fault_injection: bool = False, seed: int = 303) -> CriterionResult:
    res = CriterionResult(3, "flow-exactness", budget=600)
    for i in range(_n(30, scale)):
        k = 2 + i % 3
        rng = random.Random(seed * 1_000_003 + i)
        g = random_quasi_bipartite(rng, k, rng.randint(1, 30))
        h = sparsify_flow_contraction(g)
        if fault_injection:
            h = _corrupt(h)
        res.bump("instances")
        demands = [_random_demand(rng, g.terminals) for _ in range(50)]
        demands += [Demand({p: 1}) for p in itertools.combinations(g.terminals, 2)]
        for d in demands:
            lg, lh = flow_factor(g, d).lam, flow_factor(h, d).lam
            res.bump("demands")
            if lg != lh:
                res.fail(f"instance {i} (k={k}): demand {d!r} lambda_G={lg} lambda_H={lh}")
    c1, c2 = NEGATIVE_CONTROL
    if cut_signature(c1) != cut_signature(c2) or strong_signature(c1) == strong_signature(c2):
        res.fail("negative control stars are not weak-equal and strong-unequal")
    hit = negative_control_search()
    if hit is None:
        res.fail("negative control: no demand separated the merged star from the pair")
    else:
        res.bump("control_discrepancies")
    return res


# -- 4: demand splitting --------------------------------------------------


def _agreeing_pair(rng: random.Random, k: int) -> tuple[list[Fraction], list[Fraction]]:
    c1 = [Fraction(rng.randint(0, 12), rng.randint(1, 4)) for _ in range(k)]
    if not any(c1):
        c1[0] = Fraction(1)
    if rng.random() < 0.3:
        a = Fraction(rng.randint(1, 9), rng.randint(1, 5))
        return c1, [a * x for x in c1]
    for _ in range(50):
        a = Fraction(rng.randint(1, 5), rng.randint(1, 5))
        c2 = [a * x * Fraction(rng.randint(80, 120), 100) for x in c1]
        if strong_signature(c1) == strong_signature(c2):
            return c1, c2
    return c1, [2 * x for x in c1]


def _tight_demand(rng: random.Random, caps: list[Fraction]) -> Demand:
    """Demand that fills the merged star close to capacity, in three random passes."""
    k = len(caps)
    room = list(caps)
    entries: dict[tuple[int, int], Fraction] = {}
    pairs = list(itertools.combinations(range(k), 2))
    for _ in range(3):
        rng.shuffle(pairs)
        for i, j in pairs:
            amount = min(room[i], room[j]) * Fraction(rng.randint(1, 4), 4)
            if amount:
                entries[(i, j)] = entries.get((i, j), Fraction(0)) + amount
                room[i] -= amount
                room[j] -= amount
    return Demand(entries)


def criterion_splitting(scale: float = 1.0, seed: int = 404) -> CriterionResult:
    res = CriterionResult(4, "demand-splitting", budget=120)
    rng = random.Random(seed)
    runs = _n(500, scale)
    while res.counts.get("pairs", 0) < runs:
        k = rng.randint(2, 5)
        c1, c2 = _agreeing_pair(rng, k)
        d = _tight_demand(rng, [a + b for a, b in zip(c1, c2)])
        if d.is_zero():
            continue
        res.bump("pairs")
        try:
            # pairs in lexicographic order: the greedy fill saturates the
            # first pairs' endpoints in star 1 and blocks later pairs
            out = split_demand_detailed(c1, c2, d, order=sorted(p for p, _ in d.items()), check=True)
        except (SplitError, AssertionError) as exc:
            res.fail(f"k={k} c1={c1} c2={c2} d={d!r}: {exc}")
            continue
        if out.d1 + out.d2 != d:
            res.fail(f"k={k}: d1 + d2 != d")
        if out.rotations:
            res.bump("rotation_runs")
        res.counts["max_iterations"] = max(res.counts.get("max_iterations", 0), out.iterations)
    need = _n(50, scale)
    if res.counts.get("rotation_runs", 0) < need:
        res.fail(f"only {res.counts.get('rotation_runs', 0)} runs used the rotation step (need {need})")
    return res


# -- 5: vertex cover / vertex integrity -----------------------------------


def _caps(i: int):
    return SmallSupport() if i % 2 else UniformRational()


def criterion_extensions(scale: float = 1.0, seed: int = 505) -> CriterionResult:
    res = CriterionResult(5, "vertex-cover-integrity", budget=300)
    count = _n(50, scale)
    for a in (1, 2, 3):
        shrunk = 0
        for i in range(count):
            k = 2 + i % 4
            spec = InstanceSpec("vertex-cover", k, a + k + 12, a=a, capacity=_caps(i), seed=seed + 1000 * a + i)
            inst = generate(spec)
            g = inst.network
            h = sparsify_vertex_cover(g, inst.separator)
            res.bump("vc_instances")
            for v in verify_cut_sparsifier(g, h).violations:
                res.fail(f"vc a={a} seed={spec.seed}: side {sorted(v.side)} {v.kappa_g} vs {v.kappa_h}")
            g_k, g_s = split_vertex_cover(g, inst.separator)
            n_sig = len(set(bucket_stars(g_s).values()))
            stars_in = len(set(g.vertices) - set(g_k.vertices))
            stars_out = h.n - g_k.n
            if h.n > vertex_integrity_size_bound(k, a, 1, n_sig) or n_sig > 2 ** (2**a):
                res.fail(f"vc a={a} seed={spec.seed}: size {h.n} with {n_sig} signatures")
            if isinstance(spec.capacity, SmallSupport) and stars_out < stars_in:
                shrunk += 1
        if not shrunk:
            res.fail(f"vc a={a}: contraction never reduced the number of stars")
    for a, b in itertools.product((1, 2, 3), (1, 2)):
        shrunk = 0
        for i in range(count):
            k = 2 + i % 4
            spec = InstanceSpec(
                "vertex-integrity", k, a + k + 14, a=a, b=b, capacity=_caps(i), seed=seed + 100_000 * a + 1000 * b + i
            )
            inst = generate(spec)
            g = inst.network
            plan = plan_vertex_integrity(g, inst.separator, b)
            h = sparsify_vertex_integrity(g, inst.separator, b)
            res.bump("vi_instances")
            for v in verify_cut_sparsifier(g, h).violations:
                res.fail(f"vi a={a} b={b} seed={spec.seed}: side {sorted(v.side)} {v.kappa_g} vs {v.kappa_h}")
            if h.n > vertex_integrity_size_bound(k, a, b, plan.n_signatures):
                res.fail(f"vi a={a} b={b} seed={spec.seed}: size {h.n} with {plan.n_signatures} signatures")
            if plan.n_signatures > 4 ** (b * (a + b) ** 2):
                res.fail(f"vi a={a} b={b}: {plan.n_signatures} signatures")
            if isinstance(spec.capacity, SmallSupport) and plan.n_signatures < len(plan.instance.components):
                shrunk += 1
        if not shrunk:
            res.fail(f"vi a={a} b={b}: contraction never reduced the number of components")
    return res


# -- 6: treewidth reduction -----------------------------------------------


def criterion_treewidth(scale: float = 1.0, seed: int = 606) -> CriterionResult:
    res = CriterionResult(6, "treewidth-reduction", budget=300)
    for i in range(_n(50, scale)):
        w = 1 + i % 3
        k = 1 + i % 5
        spec = InstanceSpec("bounded-treewidth", k, 12 + i % 10, w=w, seed=seed * 1000 + i)
        inst = generate(spec)
        g, td = inst.network, inst.decomposition
        res.bump("instances")
        out = reduce_detailed(g, td, blackbox="mimick")
        part = out.partition
        tag = f"instance {i} (w={w}, k={k})"
        if len(part.y_set) > 2 * k:
            res.fail(f"{tag}: |Y|={len(part.y_set)}")
        if len(part.regions) > 2 * len(part.y_set):
            res.fail(f"{tag}: {len(part.regions)} regions for |Y|={len(part.y_set)}")
        if any(len(t) > 2 * w for t in out.region_terminals):
            res.fail(f"{tag}: region terminal sets {out.region_terminals}")
        if sum(out.region_edges) + out.y_edges != g.m:
            res.fail(f"{tag}: edge partition {sum(out.region_edges)} + {out.y_edges} != {g.m}")
        for v in verify_cut_sparsifier(g, out.network).violations:
            res.fail(f"{tag} mimick: side {sorted(v.side)} {v.kappa_g} vs {v.kappa_h}")
        inflated = reduce_detailed(g, td, blackbox=inflation_blackbox(2)).network
        for v in verify_cut_sparsifier(g, inflated, 2).violations:
            res.fail(f"{tag} inflation: side {sorted(v.side)} {v.kappa_g} vs {v.kappa_h}")
        res.bump("regions", len(part.regions))
    return res


# -- 7: oracle self-consistency -------------------------------------------


def criterion_oracles(scale: float = 1.0, seed: int = 707) -> CriterionResult:
    res = CriterionResult(7, "oracle-consistency", budget=60)
    rng = random.Random(seed)
    for i in range(_n(200, scale)):
        n = rng.randint(2, 10)
        k = rng.randint(2, n)
        edges = [
            (u, v, Fraction(rng.randint(1, 64), rng.randint(1, 16)))
            for u in range(n)
            for v in range(u + 1, n)
            if rng.random() < 0.4
        ]
        g = Network(edges, rng.sample(range(n), k), range(n))
        side = frozenset(rng.sample(g.terminals, rng.randint(1, k - 1)))
        fast = CutOracle(g).min_cut(side)
        slow = exhaustive_min_cut(g, side)
        res.bump("networks")
        if fast.value != slow.value or cut_capacity(g, fast.witness) != fast.value:
            res.fail(f"network {i}: max-flow {fast.value} vs enumeration {slow.value}")
    for i in range(_n(200, scale)):
        k = rng.randint(1, 5)
        c = random_star(rng, k, UniformRational())
        star = _star_network([c], k)
        d = _random_demand(rng, range(k)) if k >= 2 else Demand()
        res.bump("stars")
        if d.is_zero():
            continue
        lam = flow_factor(star, d).lam
        if lam != star_flow_factor(c, d):
            res.fail(f"star {c} demand {d!r}: LP {lam} vs closed form {star_flow_factor(c, d)}")
    return res


CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: criterion_cut,
    2: criterion_basic_stars,
    3: criterion_flow,
    4: criterion_splitting,
    5: criterion_extensions,
    6: criterion_treewidth,
    7: criterion_oracles,
}

SUITES: dict[str, tuple[int, ...]] = {
    "cut": (1, 7),
    "polyhedral": (2,),
    "flow": (3, 4),
    "extensions": (5,),
    "treewidth": (6,),
    "all": (1, 2, 3, 4, 5, 6, 7),
}

_FAULTABLE = (1, 3)


def run_criterion(number: int, *, scale: float = 1.0, fault_injection: bool = False) -> CriterionResult:
    """Run one criterion, timing it and turning unexpected exceptions into failures."""
    fn = CRITERIA[number]
    kwargs = {"scale": scale}
    if number in _FAULTABLE:
        kwargs["fault_injection"] = fault_injection
    start = time.perf_counter()
    try:
        res = fn(**kwargs)
    except Exception as exc:  # reported, not raised
        res = CriterionResult(number, fn.__name__.removeprefix("criterion_").replace("_", "-"))
        res.fail(f"crashed: {type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - start
    if scale >= 1 and res.seconds > res.budget:
        res.fail(f"took {res.seconds:.1f}s, budget {res.budget:.0f}s")
    return res


def run_acceptance(
    suite: str = "all",
    *,
    scale: float = 1.0,
    fault_injection: bool = False,
    summary_path: str | Path | None = None,
    echo: Callable[[str], None] | None = None,
) -> AcceptanceReport:
    """Run the criteria of ``suite`` and report per-criterion status.

    Args:
        suite: one of :data:`SUITES`.
        scale: multiplies every instance count (1 is the full suite); time
            budgets only apply at full scale.
        fault_injection: corrupt the contraction outputs of the cut and flow
            criteria so that they must fail.
        summary_path: also write one JSON record per criterion there.
        echo: called with each status line as soon as a criterion finishes.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    results = []
    for number in SUITES[suite]:
        res = run_criterion(number, scale=scale, fault_injection=fault_injection)
        results.append(res)
        if echo:
            echo(res.line())
            for f in res.failures:
                echo(f"    {f}")
    report = AcceptanceReport(results)
    if summary_path is not None:
        report.write_summary(summary_path)
    return report
