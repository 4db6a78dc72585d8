"""Plain-text codecs for networks, demands, tree decompositions and separators.

Network files::

    p network <n> <m> <k>
    t <id_1> ... <id_k>
    v <id>                  # optional: an isolated vertex
    e <u> <v> <num>/<den>   # or an integer capacity

Demand files hold ``d <s> <t> <num>/<den>`` lines. Tree decompositions use
the PACE ``.td`` layout (``s td``, ``b`` lines, then tree edges). Separator
sidecars hold ``x <ids>`` and ``b <int>``. ``#`` starts a comment everywhere
except the PACE ``c`` comment lines, which are also skipped.
"""

from __future__ import annotations

import io as _io
import os
from fractions import Fraction
from pathlib import Path
from typing import Iterable, TextIO

from .mcf import Demand
from .network import Network
from .validation import as_rational

__all__ = [
    "FormatError",
    "format_rational",
    "read_network",
    "write_network",
    "parse_network",
    "dump_network",
    "read_demands",
    "write_demands",
    "parse_demands",
    "dump_demands",
    "read_tree_decomposition",
    "write_tree_decomposition",
    "parse_tree_decomposition",
    "dump_tree_decomposition",
    "read_separator",
    "write_separator",
    "parse_separator",
    "dump_separator",
    "parse_id_list",
]


class FormatError(ValueError):
    """Malformed input file; the message names the offending line."""


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"line {no}: expected an integer, got {tok!r}") from None


def _rat(tok: str, no: int) -> Fraction:
    try:
        return as_rational(tok, nonnegative=True)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"line {no}: {exc}") from None


def _read(path) -> str:
    if hasattr(path, "read"):
        return path.read()
    return Path(path).read_text()


def _write(path, text: str) -> None:
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text)


# -- networks -------------------------------------------------------------


def parse_network(text: str) -> Network:
    header = None
    terminals: list[int] | None = None
    isolated: list[int] = []
    edges: list[tuple[int, int, Fraction]] = []
    for no, tok in _lines(text):
        kind = tok[0]
        if kind == "p":
            if header is not None or len(tok) != 5 or tok[1] != "network":
                raise FormatError(f"line {no}: bad header, expected 'p network <n> <m> <k>'")
            header = (_int(tok[2], no), _int(tok[3], no), _int(tok[4], no))
        elif header is None:
            raise FormatError(f"line {no}: content before the 'p network' header")
        elif kind == "t":
            if terminals is not None:
                raise FormatError(f"line {no}: second terminal line")
            terminals = [_int(x, no) for x in tok[1:]]
        elif kind == "v":
            isolated.extend(_int(x, no) for x in tok[1:])
        elif kind == "e":
            if len(tok) != 4:
                raise FormatError(f"line {no}: expected 'e <u> <v> <capacity>'")
            u, v = _int(tok[1], no), _int(tok[2], no)
            if u == v:
                raise FormatError(f"line {no}: self-loop at {u}")
            edges.append((u, v, _rat(tok[3], no)))
        else:
            raise FormatError(f"line {no}: unknown line type {kind!r}")
    if header is None:
        raise FormatError("missing 'p network' header")
    terminals = terminals or []
    n, m, k = header
    if len(terminals) != k:
        raise FormatError(f"header announces {k} terminals, found {len(terminals)}")
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}")
    net = Network(edges, terminals, isolated)
    if net.n != n:
        raise FormatError(f"header announces {n} vertices, found {net.n}")
    return net


def dump_network(net: Network) -> str:
    out = _io.StringIO()
    edges = list(net.edges())
    out.write(f"p network {net.n} {len(edges)} {net.k}\n")
    out.write("t" + "".join(f" {t}" for t in net.terminals) + "\n")
    for v in net.sorted_vertices():
        if not net.neighbors(v) and not net.is_terminal(v):
            out.write(f"v {v}\n")
    for u, v, c in edges:
        out.write(f"e {u} {v} {format_rational(c)}\n")
    return out.getvalue()


def read_network(path: str | os.PathLike | TextIO) -> Network:
    return parse_network(_read(path))


def write_network(net: Network, path: str | os.PathLike | TextIO) -> None:
    _write(path, dump_network(net))


# -- demands --------------------------------------------------------------


def parse_demands(text: str) -> list[Demand]:
    """Parse demand lines. A blank ``%`` line (or ``---``) separates demands."""
    demands: list[Demand] = []
    current: list[tuple[tuple[int, int], Fraction]] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line in ("%", "---"):
            demands.append(_make_demand(current, no))
            current = []
            continue
        if not line:
            continue
        tok = line.split()
        if tok[0] != "d" or len(tok) != 4:
            raise FormatError(f"line {no}: expected 'd <s> <t> <value>'")
        current.append(((_int(tok[1], no), _int(tok[2], no)), _rat(tok[3], no)))
    if current or not demands:
        demands.append(_make_demand(current, None))
    return demands


def _make_demand(entries, no) -> Demand:
    try:
        return Demand(entries)
    except ValueError as exc:
        where = f"line {no}: " if no else ""
        raise FormatError(f"{where}{exc}") from None


def dump_demands(demands: Demand | Iterable[Demand]) -> str:
    if isinstance(demands, Demand):
        demands = [demands]
    blocks = []
    for d in demands:
        blocks.append("".join(f"d {s} {t} {format_rational(v)}\n" for (s, t), v in d.items()))
    return "%\n".join(blocks)


def read_demands(path) -> list[Demand]:
    return parse_demands(_read(path))


def write_demands(demands, path) -> None:
    _write(path, dump_demands(demands))


# -- tree decompositions ----------------------------------------------------


def parse_tree_decomposition(text: str):
    from .treewidth import TreeDecomposition

    header = None
    bags: dict[int, frozenset[int]] = {}
    tree_edges: list[tuple[int, int]] = []
    for no, tok in _lines(text):
        if tok[0] == "c":
            continue
        if tok[0] == "s":
            if len(tok) != 5 or tok[1] != "td":
                raise FormatError(f"line {no}: bad header, expected 's td <bags> <width+1> <n>'")
            header = tuple(_int(x, no) for x in tok[2:])
        elif header is None:
            raise FormatError(f"line {no}: content before the 's td' header")
        elif tok[0] == "b":
            if len(tok) < 2:
                raise FormatError(f"line {no}: bag line without an id")
            bid = _int(tok[1], no)
            if bid in bags:
                raise FormatError(f"line {no}: bag {bid} defined twice")
            bags[bid] = frozenset(_int(x, no) for x in tok[2:])
        else:
            if len(tok) != 2:
                raise FormatError(f"line {no}: expected a tree edge '<i> <j>'")
            tree_edges.append((_int(tok[0], no), _int(tok[1], no)))
    if header is None:
        raise FormatError("missing 's td' header")
    if header[0] != len(bags):
        raise FormatError(f"header announces {header[0]} bags, found {len(bags)}")
    return TreeDecomposition(bags, tree_edges)


def dump_tree_decomposition(td, n: int | None = None) -> str:
    vertices = set().union(*td.bags.values()) if td.bags else set()
    n = len(vertices) if n is None else n
    size = max((len(b) for b in td.bags.values()), default=0)
    out = _io.StringIO()
    out.write(f"s td {len(td.bags)} {size} {n}\n")
    for bid in sorted(td.bags):
        out.write(f"b {bid}" + "".join(f" {v}" for v in sorted(td.bags[bid])) + "\n")
    for i, j in td.tree_edges:
        out.write(f"{i} {j}\n")
    return out.getvalue()


def read_tree_decomposition(path):
    return parse_tree_decomposition(_read(path))


def write_tree_decomposition(td, path, n: int | None = None) -> None:
    _write(path, dump_tree_decomposition(td, n))


# -- separator sidecars ---------------------------------------------------


def parse_separator(text: str) -> tuple[list[int], int | None]:
    """Return ``(separator ids, b)``; ``b`` is None when the file omits it."""
    sep: list[int] = []
    b = None
    for no, tok in _lines(text):
        if tok[0] == "x":
            sep.extend(_int(x, no) for x in tok[1:])
        elif tok[0] == "b" and len(tok) == 2:
            b = _int(tok[1], no)
        else:
            raise FormatError(f"line {no}: expected 'x <ids>' or 'b <int>'")
    return sep, b


def dump_separator(separator: Iterable[int], b: int | None = None) -> str:
    text = "x" + "".join(f" {v}" for v in separator) + "\n"
    if b is not None:
        text += f"b {b}\n"
    return text


def read_separator(path) -> tuple[list[int], int | None]:
    return parse_separator(_read(path))


def write_separator(separator, path, b: int | None = None) -> None:
    _write(path, dump_separator(separator, b))


def parse_id_list(text: str) -> list[int]:
    """Parse ``"1,2,5"`` or ``"1 2 5"`` into vertex ids."""
    toks = text.replace(",", " ").split()
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise FormatError(f"cannot parse vertex id list {text!r}") from None
