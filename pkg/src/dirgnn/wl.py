"""Color refinement on directed graphs, in four variants.

Each round a node's new color is an interned signature built from its old
color and the colors around it:

    dwl    (own, multiset of out-neighbor colors, multiset of in-neighbor colors)
    uwl    (own, the two multisets merged)  -- bidirectional edges count twice
    1wl    (own, multiset over the undirected neighbor set)  -- counted once
    outwl  (own, multiset of out-neighbor colors only)

Signatures are interned in a shared table mapping each distinct signature to
a fresh integer, and every round's colors are then renumbered 0..k-1 by first
appearance in node order.  Refinement is monotone: a new color always
determines the old one, so partitions only ever split.  The run stops when
the number of color classes stops growing (at most n rounds).

Two graphs are compared by refining their disjoint union, so both share one
signature table; they are `distinguished` as soon as their per-graph color
histograms differ, which is decided at the stable round (once histograms
differ they stay different).  A `possibly-isomorphic` verdict is exactly
that: the refinement found no certificate, which does not imply isomorphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .graph import DirectedGraph

VARIANTS = ("1wl", "uwl", "dwl", "outwl")
DISTINGUISHED = "distinguished"
POSSIBLY_ISOMORPHIC = "possibly-isomorphic"

# brute-force isomorphism enumerates all n! permutations
_BRUTE_FORCE_MAX_N = 8
_SEARCH_MAX_N = 6


@dataclass
class Coloring:
    """Refinement history: rounds[t] is the coloring after t refinements.

    rounds[0] is the all-zero initial coloring.  Within each round colors are
    consecutive integers from 0 in order of first appearance.  stable_round
    is the index of the first coloring whose class count matches the next
    round's (None if the round cap hit before stabilization).
    """

    rounds: list = field(default_factory=list)
    stable_round: int | None = None

    def num_classes(self, t: int) -> int:
        return len(set(self.rounds[t]))

    def histogram(self, t: int) -> dict:
        hist: dict = {}
        for c in self.rounds[t]:
            hist[c] = hist.get(c, 0) + 1
        return hist

    def stable_coloring(self) -> list:
        t = self.stable_round if self.stable_round is not None else len(self.rounds) - 1
        return self.rounds[t]


def _neighbor_lists(graph: DirectedGraph, variant: str):
    """Per-node neighbor id lists the signature of `variant` will read."""
    n = graph.num_nodes
    outs = [graph.out_neighbors(v).tolist() for v in range(n)]
    ins = [graph.in_neighbors(v).tolist() for v in range(n)]
    if variant == "1wl":
        merged = [sorted(set(outs[v]) | set(ins[v])) for v in range(n)]
        return [("set", merged)]
    if variant == "uwl":
        return [("multi", [outs[v] + ins[v] for v in range(n)])]
    if variant == "dwl":
        return [("multi", outs), ("multi", ins)]
    if variant == "outwl":
        return [("multi", outs)]
    raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _refine_rounds(graph: DirectedGraph, variant: str, max_rounds: int,
                   table: dict) -> Coloring:
    """Run refinement on one graph against a given (possibly shared) table."""
    n = graph.num_nodes
    fields = _neighbor_lists(graph, variant)
    colors = [0] * n
    coloring = Coloring(rounds=[colors])
    if n == 0:
        coloring.stable_round = 0
        return coloring
    for _ in range(max_rounds):
        raw = []
        for v in range(n):
            sig = (colors[v],) + tuple(
                tuple(sorted(colors[u] for u in lists[v])) for _, lists in fields)
            code = table.get(sig)
            if code is None:
                code = len(table)
                table[sig] = code
            raw.append(code)
        remap: dict = {}
        new = []
        for code in raw:
            if code not in remap:
                remap[code] = len(remap)
            new.append(remap[code])
        if len(remap) == len(set(colors)):
            coloring.stable_round = len(coloring.rounds) - 1
            break
        coloring.rounds.append(new)
        colors = new
    return coloring


def refine(graph: DirectedGraph, variant: str, max_rounds: int | None = None) -> Coloring:
    """Refine one graph to stability (or to max_rounds)."""
    if max_rounds is None:
        max_rounds = max(1, graph.num_nodes)
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    return _refine_rounds(graph, variant, max_rounds, table={})


def _disjoint_union(g1: DirectedGraph, g2: DirectedGraph) -> DirectedGraph:
    n = g1.num_nodes + g2.num_nodes
    e1 = g1.edge_array()
    e2 = g2.edge_array() + g1.num_nodes
    return DirectedGraph.from_edge_list(np.concatenate([e1, e2], axis=0), n)


@dataclass
class PairResult:
    """Joint-refinement outcome for a pair of graphs."""

    verdict: str
    distinguishing_round: int | None
    coloring1: Coloring
    coloring2: Coloring


def compare_pair(g1: DirectedGraph, g2: DirectedGraph, variant: str,
                 max_rounds: int | None = None) -> PairResult:
    """Refine both graphs jointly and compare color histograms per round.

    The shared table (via the disjoint union) makes colors comparable across
    the two graphs; g1's nodes precede g2's in the first-appearance order.
    """
    union = _disjoint_union(g1, g2)
    if max_rounds is None:
        max_rounds = max(1, union.num_nodes)
    joint = _refine_rounds(union, variant, max_rounds, table={})
    n1 = g1.num_nodes
    c1 = Coloring(rounds=[r[:n1] for r in joint.rounds], stable_round=joint.stable_round)
    c2 = Coloring(rounds=[r[n1:] for r in joint.rounds], stable_round=joint.stable_round)
    round_differs = None
    for t in range(len(joint.rounds)):
        if c1.histogram(t) != c2.histogram(t):
            round_differs = t
            break
    verdict = DISTINGUISHED if round_differs is not None else POSSIBLY_ISOMORPHIC
    return PairResult(verdict, round_differs, c1, c2)


def distinguishes(g1: DirectedGraph, g2: DirectedGraph, variant: str,
                  max_rounds: int | None = None) -> str:
    """'distinguished' or 'possibly-isomorphic'."""
    return compare_pair(g1, g2, variant, max_rounds).verdict


def refines(p1, p2) -> bool:
    """True iff partition p1 is at least as fine as p2 (same node set).

    Holds when every p1 color class sits inside a single p2 class, i.e. the
    map p1-color -> p2-color is a function.
    """
    p1 = list(p1)
    p2 = list(p2)
    if len(p1) != len(p2):
        raise ValueError("partitions cover different node counts")
    image: dict = {}
    for a, b in zip(p1, p2):
        if a in image:
            if image[a] != b:
                return False
        else:
            image[a] = b
    return True


# -- brute-force isomorphism ----------------------------------------------


def canonical_form(graph: DirectedGraph) -> tuple:
    """Lexicographically minimal edge tuple over all node permutations.

    Exact but factorial; guarded to n <= 8.  Two graphs are isomorphic iff
    their canonical forms are equal.
    """
    n = graph.num_nodes
    if n > _BRUTE_FORCE_MAX_N:
        raise ValueError(f"canonical_form is exhaustive; n must be <= {_BRUTE_FORCE_MAX_N}")
    edges = [tuple(e) for e in graph.edge_array()]
    if not edges:
        return (n, ())
    best = None
    for perm in itertools.permutations(range(n)):
        mapped = tuple(sorted((perm[i], perm[j]) for i, j in edges))
        if best is None or mapped < best:
            best = mapped
    return (n, best)


def are_isomorphic(g1: DirectedGraph, g2: DirectedGraph) -> bool:
    if g1.num_nodes != g2.num_nodes or g1.num_edges != g2.num_edges:
        return False
    return canonical_form(g1) == canonical_form(g2)


def _all_pairs(n: int) -> list:
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def nonisomorphic_digraphs(n: int) -> list:
    """One representative per isomorphism class of simple digraphs on n nodes."""
    pairs = _all_pairs(n)
    reps: dict = {}
    for mask in range(1 << len(pairs)):
        edges = [pairs[b] for b in range(len(pairs)) if mask >> b & 1]
        g = DirectedGraph.from_edge_list(edges, n)
        key = canonical_form(g)
        if key not in reps:
            reps[key] = g
    return list(reps.values())


@dataclass
class GraphPairFixture:
    """A pair of non-isomorphic graphs with refinement verdicts per variant."""

    g1: DirectedGraph
    g2: DirectedGraph
    verdicts: dict
    note: str = ""


def _round1_invariant(graph: DirectedGraph, variant: str) -> tuple:
    """Node-order-independent multiset of first-round signatures.

    Equal stable histograms require equal round-1 histograms, so bucketing
    candidate pairs by this invariant is a sound prefilter.
    """
    fields = _neighbor_lists(graph, variant)
    sigs = []
    for v in range(graph.num_nodes):
        sigs.append(tuple(len(lists[v]) for _, lists in fields))
    return tuple(sorted(sigs))


def search_counterexamples(max_n: int, weak: str, strong: str) -> list:
    """All pairs of non-isomorphic digraphs up to max_n nodes that the weak
    variant cannot separate but the strong variant can.

    Exhaustive over isomorphism classes per node count; pairs of different
    node count never qualify (any variant separates them by size).  Guarded
    to max_n <= 6 and practical to about 4.
    """
    if not 1 <= max_n <= _SEARCH_MAX_N:
        raise ValueError(f"max_n must lie in [1, {_SEARCH_MAX_N}]")
    if weak not in VARIANTS or strong not in VARIANTS:
        raise ValueError(f"variants must be among {VARIANTS}")
    found = []
    for n in range(1, max_n + 1):
        reps = nonisomorphic_digraphs(n)
        buckets: dict = {}
        for g in reps:
            buckets.setdefault(_round1_invariant(g, weak), []).append(g)
        for group in buckets.values():
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    g1, g2 = group[i], group[j]
                    if distinguishes(g1, g2, weak) == POSSIBLY_ISOMORPHIC \
                            and distinguishes(g1, g2, strong) == DISTINGUISHED:
                        found.append(GraphPairFixture(
                            g1, g2,
                            {weak: POSSIBLY_ISOMORPHIC, strong: DISTINGUISHED},
                            note=f"n={n}: {weak} blind, {strong} separates"))
    return found


# -- reference pairs ---------------------------------------------------------


def out_blind_pair() -> GraphPairFixture:
    """Two sources into one sink plus an isolated node, vs two disjoint edges.

    Out-neighborhoods alone cannot tell these apart (every node sees either
    an empty or a one-element out-multiset, two apiece), but the in-direction
    does: only the first graph has a node with two in-edges.
    """
    g1 = DirectedGraph.from_edge_list([(2, 1), (3, 1)], 4)
    g2 = DirectedGraph.from_edge_list([(0, 1), (2, 3)], 4)
    return GraphPairFixture(
        g1, g2,
        {"dwl": DISTINGUISHED, "uwl": DISTINGUISHED,
         "1wl": DISTINGUISHED, "outwl": POSSIBLY_ISOMORPHIC},
        note="in-star plus isolated node vs a perfect matching of two edges")


def direction_blind_pair() -> GraphPairFixture:
    """Directed 3-cycle vs transitive tournament on three nodes.

    Every node has total degree 2, so any variant that merges or symmetrizes
    the two directions sees regular graphs and never splits a class.  Keeping
    the directions separate splits the tournament immediately: it has a
    source, a sink, and a middle node.
    """
    g1 = DirectedGraph.from_edge_list([(0, 1), (1, 2), (2, 0)], 3)
    g2 = DirectedGraph.from_edge_list([(0, 1), (0, 2), (1, 2)], 3)
    return GraphPairFixture(
        g1, g2,
        {"dwl": DISTINGUISHED, "uwl": POSSIBLY_ISOMORPHIC,
         "1wl": POSSIBLY_ISOMORPHIC, "outwl": DISTINGUISHED},
        note="directed 3-cycle vs transitive tournament")
