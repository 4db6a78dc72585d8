"""Maximum concurrent multicommodity flow (the flow factor) solved exactly.

The flow factor of a demand ``d`` in a network is the largest ``lam`` such
that ``lam * d`` is routable. It is computed from an edge-flow linear program
whose optimum is certified in exact rational arithmetic:

* HiGHS solves the program in floating point and reports its optimal basis;
* the basis is re-solved in rationals and handed to the exact simplex
  (:mod:`exactsparse.simplex`), which either confirms optimality or pivots
  (Bland's rule) to an exact optimum;
* without a usable HiGHS basis the exact simplex starts from a spanning-tree
  basis, which is always feasible.

Commodities are grouped by source terminal: for terminals ordered
``t_1 .. t_k``, the pair ``{t_i, t_j}`` (``i < j``) is shipped from ``t_i``.
A single-source flow with prescribed sink amounts decomposes into
source-sink paths, so this is the same program as one commodity per pair,
with fewer variables.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .mincut import INFINITE
from .network import Network
from .simplex import solve_lp
from .validation import as_capacity_vector, as_rational, check_network

try:  # pragma: no cover - exercised implicitly
    import highspy
except ImportError:  # pragma: no cover
    highspy = None

__all__ = [
    "Demand",
    "FlowFactorResult",
    "MAX_LP_TERMINALS",
    "MAX_LP_EDGES",
    "flow_factor",
    "check_flow_witness",
    "routable_in_star",
    "star_flow_factor",
    "FlowViolation",
    "FlowReport",
    "verify_flow_sparsifier",
]

logger = logging.getLogger(__name__)

MAX_LP_TERMINALS = 12
MAX_LP_EDGES = 400


class Demand:
    """Symmetric demand between terminal pairs with exact rational entries.

    Args:
        entries: mapping or iterable of ``((s, t), value)``. ``(s, t)`` and
            ``(t, s)`` name the same unordered pair and may not both appear.
    """

    __slots__ = ("_d",)

    def __init__(self, entries: Mapping | Iterable = ()) -> None:
        items = entries.items() if isinstance(entries, Mapping) else entries
        d: dict[frozenset[int], Fraction] = {}
        for pair, value in items:
            s, t = pair
            if s == t:
                raise ValueError(f"diagonal demand entry ({s}, {t})")
            key = frozenset((s, t))
            if key in d:
                raise ValueError(f"demand pair {{{s}, {t}}} given twice")
            val = as_rational(value, name=f"demand ({s}, {t})", nonnegative=True)
            d[key] = val
        self._d = {key: val for key, val in d.items() if val}

    def __getitem__(self, pair) -> Fraction:
        s, t = pair
        return self._d.get(frozenset((s, t)), Fraction(0))

    def items(self) -> list[tuple[tuple[int, int], Fraction]]:
        """Nonzero entries as ``((s, t), value)`` with ``s < t``, sorted."""
        return sorted((tuple(sorted(key)), val) for key, val in self._d.items())

    @property
    def terminals(self) -> frozenset[int]:
        return frozenset().union(*self._d) if self._d else frozenset()

    def load(self, t: int) -> Fraction:
        """Total demand incident on terminal ``t``."""
        return sum((v for key, v in self._d.items() if t in key), Fraction(0))

    def is_zero(self) -> bool:
        return not self._d

    def scaled(self, factor) -> Demand:
        f = as_rational(factor, name="factor", nonnegative=True)
        return Demand({tuple(key): v * f for key, v in self._d.items()})

    def __add__(self, other: Demand) -> Demand:
        out = dict(self._d)
        for key, v in other._d.items():
            out[key] = out.get(key, Fraction(0)) + v
        return Demand({tuple(key): v for key, v in out.items()})

    def __sub__(self, other: Demand) -> Demand:
        out = dict(self._d)
        for key, v in other._d.items():
            out[key] = out.get(key, Fraction(0)) - v
            if out[key] < 0:
                raise ValueError("demand difference would be negative")
        return Demand({tuple(key): v for key, v in out.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Demand):
            return NotImplemented
        return self._d == other._d

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = ", ".join(f"({s}, {t}): {v}" for (s, t), v in self.items())
        return f"Demand({{{body}}})"


@dataclass
class FlowFactorResult:
    """Exact flow factor with a certifying flow.

    ``flows[s][(u, v)]`` is the flow of the commodity shipped from source
    terminal ``s`` along the arc ``u -> v``. ``lam`` is :data:`INFINITE`
    for the zero demand.
    """

    lam: Fraction | object
    flows: dict[int, dict[tuple[int, int], Fraction]] = field(default_factory=dict)
    sinks: dict[int, dict[int, Fraction]] = field(default_factory=dict)
    simplex_iterations: int = 0
    warm_start: bool = False


def _commodities(terminals: Sequence[int], d: Demand) -> dict[int, dict[int, Fraction]]:
    order = {t: i for i, t in enumerate(terminals)}
    out: dict[int, dict[int, Fraction]] = {}
    for (s, t), val in d.items():
        if order[s] > order[t]:
            s, t = t, s
        out.setdefault(s, {})[t] = val
    return out


def _component(net: Network, s: int) -> list[int]:
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in net.neighbors(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return sorted(seen)


def flow_factor(net: Network, d: Demand, *, use_highs: bool = True) -> FlowFactorResult:
    """Largest ``lam`` such that ``lam * d`` can be routed in ``net``.

    Raises:
        ValueError: if ``d`` involves non-terminals, or the instance exceeds
            :data:`MAX_LP_TERMINALS` terminals or :data:`MAX_LP_EDGES` edges.
    """
    net = check_network(net)
    bad = d.terminals - set(net.terminals)
    if bad:
        raise ValueError(f"demand on non-terminal vertices {sorted(bad)}")
    if net.k > MAX_LP_TERMINALS or net.m > MAX_LP_EDGES:
        raise ValueError(
            f"instance too large for the exact LP (k={net.k}, m={net.m}; "
            f"limits {MAX_LP_TERMINALS} terminals, {MAX_LP_EDGES} edges)"
        )
    if d.is_zero():
        return FlowFactorResult(INFINITE)
    commodities = _commodities(net.terminals, d)

    # variables: 0 = lam, then per commodity one per arc, then one slack per edge
    edges = list(net.edges())
    edge_row = {(u, v): i for i, (u, v, _) in enumerate(edges)}
    n_cap_rows = len(edges)
    columns: list[dict[int, Fraction]] = [{}]
    arcs: list[tuple[int, int, int]] = []  # (source, u, v) per flow column
    row = n_cap_rows
    tree_basis: list[int] = []
    for s, sinks in commodities.items():
        comp = _component(net, s)
        if any(t not in comp for t in sinks):
            return FlowFactorResult(Fraction(0), {}, commodities)
        rows = {v: row + i for i, v in enumerate(x for x in comp if x != s)}
        row += len(rows)
        for t, val in sinks.items():
            columns[0][rows[t]] = val
        first_arc: dict[tuple[int, int], int] = {}
        for u, v, _ in edges:
            if u not in rows and u != s:
                continue
            for a, b_ in ((u, v), (v, u)):
                col: dict[int, Fraction] = {edge_row[(u, v)]: Fraction(1)}
                if a in rows:
                    col[rows[a]] = Fraction(1)
                if b_ in rows:
                    col[rows[b_]] = Fraction(-1)
                first_arc[(a, b_)] = len(columns)
                columns.append(col)
                arcs.append((s, a, b_))
        # spanning tree (BFS from s) gives a basis for this commodity's rows
        parent_arc = _bfs_tree(net, s)
        for v in rows:
            tree_basis.append(first_arc[parent_arc[v]])
    n_rows = row
    n_flow = len(columns)
    for i in range(n_cap_rows):
        columns.append({i: Fraction(1)})
    rhs = [c for _, _, c in edges] + [Fraction(0)] * (n_rows - n_cap_rows)
    cost = [Fraction(1)] + [Fraction(0)] * (len(columns) - 1)
    tree_basis += list(range(n_flow, n_flow + n_cap_rows))

    start = None
    if use_highs and highspy is not None:
        start = _highs_basis(columns, rhs, cost, n_rows)
    res = solve_lp(columns, rhs, cost, start, fallback=tree_basis)
    if res.status != "optimal":  # pragma: no cover - the program is always feasible and bounded
        raise RuntimeError(f"flow LP ended with status {res.status}")
    flows: dict[int, dict[tuple[int, int], Fraction]] = {s: {} for s in commodities}
    for j, (s, a, b_) in enumerate(arcs, start=1):
        if res.x[j]:
            flows[s][(a, b_)] = res.x[j]
    out = FlowFactorResult(res.x[0], flows, commodities, res.iterations, start is not None)
    check_flow_witness(net, d, out)
    return out


def _bfs_tree(net: Network, s: int) -> dict[int, tuple[int, int]]:
    parent: dict[int, tuple[int, int]] = {}
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in sorted(net.neighbors(u)):
            if v not in seen:
                seen.add(v)
                parent[v] = (u, v)
                queue.append(v)
    return parent


def _highs_basis(columns, rhs, cost, n_rows) -> list[int] | None:
    """Optimal basis reported by HiGHS for the floating-point relaxation, if usable."""
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    lp = highspy.HighsLp()
    n = len(columns)
    lp.num_col_ = n
    lp.num_row_ = n_rows
    lp.col_cost_ = [float(c) for c in cost]
    lp.col_lower_ = [0.0] * n
    lp.col_upper_ = [highspy.kHighsInf] * n
    lp.row_lower_ = [float(v) for v in rhs]
    lp.row_upper_ = [float(v) for v in rhs]
    lp.sense_ = highspy.ObjSense.kMaximize
    start, index, value = [0], [], []
    for col in columns:
        for i in sorted(col):
            index.append(i)
            value.append(float(col[i]))
        start.append(len(index))
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = start
    lp.a_matrix_.index_ = index
    lp.a_matrix_.value_ = value
    h.passModel(lp)
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        return None
    basis = h.getBasis()
    basic = [j for j, st in enumerate(basis.col_status) if st == highspy.HighsBasisStatus.kBasic]
    if len(basic) > n_rows:  # pragma: no cover - HiGHS bases never exceed the row count
        return None
    if len(basic) < n_rows:
        logger.debug("HiGHS basis has %d columns for %d rows; completing it", len(basic), n_rows)
    return basic


def check_flow_witness(net: Network, d: Demand, result: FlowFactorResult) -> None:
    """Assert exactly that ``result.flows`` routes ``result.lam * d`` within capacities."""
    if result.lam is INFINITE:
        if not d.is_zero():
            raise AssertionError("infinite flow factor for a nonzero demand")
        return
    lam = result.lam
    load: dict[tuple[int, int], Fraction] = {}
    commodities = _commodities(net.terminals, d)
    for s, sinks in commodities.items():
        flow = result.flows.get(s, {})
        balance: dict[int, Fraction] = {}
        for (u, v), f in flow.items():
            if f < 0:
                raise AssertionError(f"negative flow on arc ({u}, {v})")
            if not net.capacity(u, v):
                raise AssertionError(f"flow on missing edge ({u}, {v})")
            balance[u] = balance.get(u, Fraction(0)) + f
            balance[v] = balance.get(v, Fraction(0)) - f
            key = (min(u, v), max(u, v))
            load[key] = load.get(key, Fraction(0)) + f
        expected = {s: lam * sum(sinks.values(), Fraction(0))}
        for t, val in sinks.items():
            expected[t] = -lam * val
        for v in set(balance) | set(expected):
            if balance.get(v, Fraction(0)) != expected.get(v, Fraction(0)):
                raise AssertionError(f"flow conservation violated at vertex {v} for source {s}")
    for (u, v), f in load.items():
        if f > net.capacity(u, v):
            raise AssertionError(f"capacity exceeded on edge ({u}, {v})")


def routable_in_star(c: Sequence, d: Demand, terminals: Sequence[int] | None = None) -> bool:
    """Whether ``d`` can be routed through one star with leaf capacities ``c``.

    A star routes ``d`` exactly when every leaf's total demand is at most its
    edge capacity. ``terminals`` names the leaves in coordinate order
    (default ``0 .. k-1``).
    """
    c = as_capacity_vector(c)
    terminals = list(range(len(c))) if terminals is None else list(terminals)
    if len(terminals) != len(c):
        raise ValueError("terminals and capacity vector differ in length")
    if d.terminals - set(terminals):
        return False
    return all(d.load(t) <= ci for t, ci in zip(terminals, c))


def star_flow_factor(c: Sequence, d: Demand, terminals: Sequence[int] | None = None):
    """Closed-form flow factor of a single star: ``min_i c(i) / d(i)`` over loaded leaves."""
    c = as_capacity_vector(c)
    terminals = list(range(len(c))) if terminals is None else list(terminals)
    ratios = [ci / d.load(t) for t, ci in zip(terminals, c) if d.load(t)]
    return min(ratios) if ratios else INFINITE


@dataclass(frozen=True)
class FlowViolation:
    demand: Demand
    lam_g: object
    lam_h: object

    def __str__(self) -> str:
        return f"{self.demand!r} lambda_G={self.lam_g} lambda_H={self.lam_h}"


@dataclass
class FlowReport:
    quality: Fraction
    checked: int = 0
    violations: list[FlowViolation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


def _lam_le(a, b) -> bool:
    if b is INFINITE:
        return True
    if a is INFINITE:
        return False
    return a <= b


def verify_flow_sparsifier(g: Network, h: Network, demands: Iterable[Demand], quality=1) -> FlowReport:
    """Check ``lam_G(d) <= lam_H(d) <= quality * lam_G(d)`` for each demand."""
    g, h = check_network(g), check_network(h)
    q = as_rational(quality, name="quality")
    if q < 1:
        raise ValueError("quality must be at least 1")
    if set(g.terminals) - set(h.terminals):
        raise ValueError("terminal mismatch between the network and its sparsifier")
    demands = list(demands)
    if not demands:
        raise ValueError("at least one demand is required")
    report = FlowReport(quality=q)
    for d in demands:
        lg = flow_factor(g, d).lam
        lh = flow_factor(h, d).lam
        report.checked += 1
        upper = lg if lg is INFINITE else q * lg
        if not (_lam_le(lg, lh) and _lam_le(lh, upper)):
            report.violations.append(FlowViolation(d, lg, lh))
    return report
