"""Tanner graphs, alist interchange, base-graph lifting, and code assembly.

The edge numbering convention used throughout the package: edge ``e`` is the
check-side slot, i.e. edge ids of check ``k`` occupy the contiguous range
``check_ptr[k]:check_ptr[k+1]`` and ``check_vars[e]`` is the variable on that
edge. ``var_edge[s]`` maps a variable-side slot ``s`` (range
``var_ptr[j]:var_ptr[j+1]``) back to the check-side edge id, so message
storage indexed by edge id can be traversed from either side.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class GraphFormatError(ValueError):
    """A graph description file violates its format contract."""


class NoQualifyingCheckError(LookupError):
    """No check touches exactly one punctured variable.

    Callers should fall back to pure priority order.
    """


class TannerGraph:
    """Immutable bipartite code graph with CSR adjacency on both sides."""

    __slots__ = (
        "num_vars",
        "num_checks",
        "check_ptr",
        "check_vars",
        "var_ptr",
        "var_checks",
        "var_edge",
    )

    def __init__(self, num_vars: int, num_checks: int, edges) -> None:
        """Build from an iterable of (check, variable) pairs.

        Raises GraphFormatError on out-of-range indices or duplicate edges.
        """
        if num_vars < 1 or num_checks < 1:
            raise GraphFormatError("graph must have at least one variable and one check")
        edge_list = [(int(c), int(v)) for c, v in edges]
        pairs = np.asarray(sorted(set(edge_list)), dtype=np.int64)
        if pairs.shape[0] != len(edge_list):
            raise GraphFormatError("duplicate (check, variable) edge")
        if pairs.size == 0:
            raise GraphFormatError("graph has no edges")
        checks, vars_ = pairs[:, 0], pairs[:, 1]
        if checks.min() < 0 or checks.max() >= num_checks:
            raise GraphFormatError("check index out of range")
        if vars_.min() < 0 or vars_.max() >= num_vars:
            raise GraphFormatError("variable index out of range")

        e = pairs.shape[0]
        self.num_vars = int(num_vars)
        self.num_checks = int(num_checks)
        self.check_ptr = np.zeros(num_checks + 1, dtype=np.int64)
        np.add.at(self.check_ptr, checks + 1, 1)
        np.cumsum(self.check_ptr, out=self.check_ptr)
        self.check_vars = vars_.astype(np.int32)

        # Variable side, sorted by (variable, check); remember the edge id.
        order = np.lexsort((checks, vars_))
        self.var_ptr = np.zeros(num_vars + 1, dtype=np.int64)
        np.add.at(self.var_ptr, vars_ + 1, 1)
        np.cumsum(self.var_ptr, out=self.var_ptr)
        self.var_checks = checks[order].astype(np.int32)
        self.var_edge = order.astype(np.int64)

        # Treated as immutable after construction; kept writable so they can
        # back typed memoryviews in the compiled core.
        assert self.check_ptr[-1] == e and self.var_ptr[-1] == e

    @property
    def num_edges(self) -> int:
        return int(self.check_ptr[-1])

    def check_degrees(self) -> np.ndarray:
        return np.diff(self.check_ptr).astype(np.int32)

    def var_degrees(self) -> np.ndarray:
        return np.diff(self.var_ptr).astype(np.int32)

    def check_neighbors(self, i: int) -> np.ndarray:
        return self.check_vars[self.check_ptr[i] : self.check_ptr[i + 1]]

    def var_neighbors(self, j: int) -> np.ndarray:
        return self.var_checks[self.var_ptr[j] : self.var_ptr[j + 1]]

    def edges(self):
        """Yield (check, variable) in edge-id order."""
        for k in range(self.num_checks):
            for e in range(self.check_ptr[k], self.check_ptr[k + 1]):
                yield k, int(self.check_vars[e])

    def to_dense(self) -> np.ndarray:
        """Dense parity-check matrix; intended for small graphs and tests."""
        if self.num_vars * self.num_checks > 4_000_000:
            raise ValueError("graph too large for dense conversion")
        h = np.zeros((self.num_checks, self.num_vars), dtype=np.uint8)
        for k, v in self.edges():
            h[k, v] = 1
        return h

    def __eq__(self, other) -> bool:
        if not isinstance(other, TannerGraph):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.num_checks == other.num_checks
            and np.array_equal(self.check_ptr, other.check_ptr)
            and np.array_equal(self.check_vars, other.check_vars)
        )

    def __repr__(self) -> str:
        return f"TannerGraph(N={self.num_vars}, M={self.num_checks}, E={self.num_edges})"


def from_dense(h: np.ndarray) -> TannerGraph:
    """Build a graph from a dense 0/1 parity-check matrix."""
    h = np.asarray(h)
    checks, vars_ = np.nonzero(h)
    return TannerGraph(h.shape[1], h.shape[0], list(zip(checks.tolist(), vars_.tolist())))


def _alist_fail(lineno: int, msg: str) -> GraphFormatError:
    return GraphFormatError(f"alist line {lineno}: {msg}")


def parse_alist(text: str) -> TannerGraph:
    """Parse the standard alist sparse-code interchange format.

    Layout: "N M", "max_var_deg max_check_deg", N variable degrees, M check
    degrees, then one neighbor line per variable (check ids, 1-based, zero
    padding allowed) and one per check. Both adjacency listings are parsed
    and cross-checked.
    """
    lines = text.splitlines()
    rows = [(i + 1, ln.split()) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise GraphFormatError("alist line 1: empty input")

    def ints(idx: int, expect: int | None, what: str) -> tuple[int, list[int]]:
        if idx >= len(rows):
            raise _alist_fail(len(lines) + 1, f"missing {what}")
        lineno, toks = rows[idx]
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise _alist_fail(lineno, f"non-integer token in {what}") from None
        if expect is not None and len(vals) != expect:
            raise _alist_fail(lineno, f"expected {expect} integers for {what}, got {len(vals)}")
        return lineno, vals

    _, header = ints(0, 2, "header")
    n, m = header
    if n < 1 or m < 1:
        raise _alist_fail(rows[0][0], "N and M must be positive")
    ints(1, 2, "max degrees")
    _, var_degs = ints(2, n, "variable degree list")
    _, chk_degs = ints(3, m, "check degree list")

    def neighbor_block(start: int, count: int, degs: list[int], limit: int, side: str):
        adj = []
        for i in range(count):
            lineno, vals = ints(start + i, None, f"{side} {i} neighbor list")
            vals = [v for v in vals if v != 0]
            if len(vals) != degs[i]:
                raise _alist_fail(
                    lineno, f"{side} {i} lists {len(vals)} neighbors, header says {degs[i]}"
                )
            if any(v < 1 or v > limit for v in vals):
                raise _alist_fail(lineno, f"{side} {i} neighbor index out of range")
            if len(set(vals)) != len(vals):
                raise _alist_fail(lineno, f"{side} {i} has a duplicate neighbor")
            adj.append(sorted(v - 1 for v in vals))
        return adj

    var_adj = neighbor_block(4, n, var_degs, m, "variable")
    chk_adj = neighbor_block(4 + n, m, chk_degs, n, "check")

    edges = [(k, v) for k, nbrs in enumerate(chk_adj) for v in nbrs]
    from_vars = set((k, v) for v, nbrs in enumerate(var_adj) for k in nbrs)
    if from_vars != set(edges):
        raise GraphFormatError("alist variable-side and check-side adjacency disagree")
    return TannerGraph(n, m, edges)


def serialize_alist(graph: TannerGraph) -> str:
    """Serialize to alist text with zero padding; round-trips through parse_alist."""
    vd = graph.var_degrees()
    cd = graph.check_degrees()
    out = [f"{graph.num_vars} {graph.num_checks}", f"{vd.max()} {cd.max()}"]
    out.append(" ".join(str(d) for d in vd))
    out.append(" ".join(str(d) for d in cd))
    for j in range(graph.num_vars):
        nbrs = [str(k + 1) for k in graph.var_neighbors(j)]
        nbrs += ["0"] * (int(vd.max()) - len(nbrs))
        out.append(" ".join(nbrs))
    for k in range(graph.num_checks):
        nbrs = [str(v + 1) for v in graph.check_neighbors(k)]
        nbrs += ["0"] * (int(cd.max()) - len(nbrs))
        out.append(" ".join(nbrs))
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class BaseGraph:
    """Protograph with one circulant shift per nonzero entry.

    Shifts may exceed the lifting size; they are reduced modulo Z at
    expansion time.
    """

    rows: int
    cols: int
    entry_rows: np.ndarray
    entry_cols: np.ndarray
    entry_shifts: np.ndarray

    def __post_init__(self):
        er, ec, es = (np.asarray(a, dtype=np.int64) for a in
                      (self.entry_rows, self.entry_cols, self.entry_shifts))
        if not (len(er) == len(ec) == len(es)) or len(er) == 0:
            raise GraphFormatError("base graph needs matching, nonempty entry arrays")
        if er.min() < 0 or er.max() >= self.rows or ec.min() < 0 or ec.max() >= self.cols:
            raise GraphFormatError("base graph entry out of range")
        if es.min() < 0:
            raise GraphFormatError("negative shift (use absence, not -1, for no edge)")
        if len(set(zip(er.tolist(), ec.tolist()))) != len(er):
            raise GraphFormatError("duplicate base graph entry")
        for name, arr in (("entry_rows", er), ("entry_cols", ec), ("entry_shifts", es)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_entries(self) -> int:
        return len(self.entry_rows)

    def drop_tail(self, n_cols: int) -> "BaseGraph":
        """Remove the last n_cols columns and the last n_cols rows.

        Used for parity truncation; every dropped column must only be
        referenced by dropped rows.
        """
        if n_cols == 0:
            return self
        if n_cols < 0 or n_cols >= min(self.rows, self.cols):
            raise ValueError(f"cannot drop {n_cols} trailing columns/rows")
        keep_r, keep_c = self.rows - n_cols, self.cols - n_cols
        kept = self.entry_rows < keep_r
        if np.any(self.entry_cols[kept] >= keep_c):
            raise GraphFormatError("truncated column is referenced by a kept row")
        return BaseGraph(keep_r, keep_c, self.entry_rows[kept].copy(),
                         self.entry_cols[kept].copy(), self.entry_shifts[kept].copy())


def load_base_graph(path) -> BaseGraph:
    """Read a base graph file: header "rows cols", then "row col shift" lines.

    Blank lines and '#' comments are ignored.
    """
    text = Path(path).read_text()
    rows_toks = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())
                 if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows_toks:
        raise GraphFormatError(f"{path}: empty base graph file")
    lineno, header = rows_toks[0]
    if len(header) != 2:
        raise _alist_fail(lineno, "base graph header must be 'rows cols'")
    r, c = int(header[0]), int(header[1])
    er, ec, es = [], [], []
    for lineno, toks in rows_toks[1:]:
        if len(toks) != 3:
            raise _alist_fail(lineno, "expected 'row col shift'")
        er.append(int(toks[0]))
        ec.append(int(toks[1]))
        es.append(int(toks[2]))
    return BaseGraph(r, c, np.array(er), np.array(ec), np.array(es))


@dataclass(frozen=True)
class LayerMap:
    """Partition of checks into base-row layers of equal size."""

    layer_of_check: np.ndarray
    num_layers: int
    layer_size: int

    def __post_init__(self):
        loc = np.asarray(self.layer_of_check, dtype=np.int32)
        counts = np.bincount(loc, minlength=self.num_layers)
        if len(counts) != self.num_layers or not np.all(counts == self.layer_size):
            raise ValueError("layers must partition checks into equal-size groups")
        object.__setattr__(self, "layer_of_check", loc)

    def members(self, layer: int) -> np.ndarray:
        return np.nonzero(self.layer_of_check == layer)[0].astype(np.int32)


def lift_base_graph(base: BaseGraph, z: int) -> tuple[TannerGraph, LayerMap]:
    """Expand each entry (r, c, s) into the Z edges (rZ+k, cZ+((k+s) mod Z))."""
    if z < 1:
        raise ValueError("lifting size must be >= 1")
    k = np.arange(z, dtype=np.int64)
    checks = base.entry_rows[:, None] * z + k
    varix = base.entry_cols[:, None] * z + (k + base.entry_shifts[:, None] % z) % z
    edges = list(zip(checks.ravel().tolist(), varix.ravel().tolist()))
    graph = TannerGraph(base.cols * z, base.rows * z, edges)
    layer_of_check = np.repeat(np.arange(base.rows, dtype=np.int32), z)
    return graph, LayerMap(layer_of_check, base.rows, z)


def first_check_node(graph: TannerGraph, punctured) -> int:
    """Lowest-degree check adjacent to exactly one punctured variable.

    Ties are broken by lowest check index. Raises NoQualifyingCheckError when
    nothing qualifies, in which case pure priority order should be used.
    """
    punct = np.zeros(graph.num_vars, dtype=bool)
    idx = np.asarray(list(punctured), dtype=np.int64)
    if idx.size == 0:
        raise NoQualifyingCheckError("punctured set is empty")
    punct[idx] = True
    best = None
    for k in range(graph.num_checks):
        nbrs = graph.check_neighbors(k)
        if int(punct[nbrs].sum()) == 1:
            cand = (len(nbrs), k)
            if best is None or cand < best:
                best = cand
    if best is None:
        raise NoQualifyingCheckError("no check touches exactly one punctured variable")
    return best[1]


@dataclass(frozen=True)
class CodeSpec:
    """Assembly recipe: base graph, lifting size, and transmission metadata.

    ``punctured_count`` of -1 selects the default of the first 2Z variables.
    ``shortened_count`` removes channel uncertainty from the tail of the
    information region (known zero bits). ``parity_truncation`` drops that
    many trailing variables, in whole lifted columns, together with their
    dedicated checks.
    """

    base_graph: str
    z: int
    punctured_count: int = -1
    shortened_count: int = 0
    parity_truncation: int = 0
    nominal_rate: float | None = None

    def __post_init__(self):
        if self.z < 1:
            raise ValueError("z must be >= 1")
        if self.parity_truncation % self.z != 0:
            raise ValueError("parity_truncation must be a whole number of lifted columns")
        if self.shortened_count < 0 or self.parity_truncation < 0:
            raise ValueError("counts must be non-negative")


@dataclass(frozen=True)
class LiftedCode:
    """A lifted graph plus the per-variable transmission roles."""

    graph: TannerGraph
    layers: LayerMap
    punctured: np.ndarray
    shortened: np.ndarray
    info_len: int
    blocklength: int
    rate: float
    z: int

    @property
    def transmitted(self) -> np.ndarray:
        return ~(self.punctured | self.shortened)


def resolve_base_graph_path(name_or_path) -> Path:
    """Map the builtin asset alias "bg1" (or a filesystem path) to a file."""
    p = Path(name_or_path)
    if p.exists():
        return p
    if str(name_or_path) == "bg1":
        return Path(str(resources.files("ldpcsched").joinpath("assets/bg1.csv")))
    raise FileNotFoundError(f"base graph not found: {name_or_path}")


def build_code(spec: CodeSpec) -> LiftedCode:
    base = load_base_graph(resolve_base_graph_path(spec.base_graph))
    z = spec.z
    n_full = base.cols * z
    info_cols = base.cols - base.rows
    if info_cols < 1:
        raise GraphFormatError("base graph has no information columns")
    base = base.drop_tail(spec.parity_truncation // z)
    graph, layers = lift_base_graph(base, z)
    n = graph.num_vars

    punct_n = 2 * z if spec.punctured_count < 0 else spec.punctured_count
    if punct_n > info_cols * z:
        raise ValueError("cannot puncture past the information region")
    punctured = np.zeros(n, dtype=bool)
    punctured[:punct_n] = True

    shortened = np.zeros(n, dtype=bool)
    info_end = info_cols * z
    if spec.shortened_count > info_end - punct_n:
        raise ValueError("shortening overlaps the punctured region")
    if spec.shortened_count:
        shortened[info_end - spec.shortened_count : info_end] = True

    info_len = info_end - spec.shortened_count
    blocklength = n - punct_n - spec.shortened_count
    assert blocklength == n_full - punct_n - spec.shortened_count - spec.parity_truncation
    return LiftedCode(
        graph=graph,
        layers=layers,
        punctured=punctured,
        shortened=shortened,
        info_len=info_len,
        blocklength=blocklength,
        rate=info_len / blocklength,
        z=z,
    )


def load_code_spec(path) -> CodeSpec:
    """Read a CodeSpec from a TOML config file (see README for the keys)."""
    with open(path, "rb") as f:
        raw = tomllib.load(f)
    known = {"base_graph", "z", "punctured_count", "shortened_count",
             "parity_truncation", "nominal_rate"}
    unknown = set(raw) - known
    if unknown:
        raise GraphFormatError(f"{path}: unknown code spec keys {sorted(unknown)}")
    if "base_graph" not in raw or "z" not in raw:
        raise GraphFormatError(f"{path}: code spec requires base_graph and z")
    bg = raw["base_graph"]
    if bg != "bg1":
        bgp = Path(bg)
        if not bgp.is_absolute():
            bg = str((Path(path).parent / bgp).resolve())
    return CodeSpec(
        base_graph=bg,
        z=int(raw["z"]),
        punctured_count=int(raw.get("punctured_count", -1)),
        shortened_count=int(raw.get("shortened_count", 0)),
        parity_truncation=int(raw.get("parity_truncation", 0)),
        nominal_rate=raw.get("nominal_rate"),
    )
