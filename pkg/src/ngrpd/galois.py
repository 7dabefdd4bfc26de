"""Finite covers of a based graph and their monodromy dictionary.

A finite connected graph with a basepoint and a chosen spanning tree has a
free loop group: one generator per non-tree edge, realized as the loop that
walks the tree out to the edge's source, crosses the edge, and walks the tree
home.  Finite coverings of the graph correspond to finite permutation actions
of that free group on the basepoint fiber; :func:`fiber_functor` reads the
action off a cover by path lifting and :func:`cover_from_action` rebuilds a
cover from an action so that the round trip reproduces the action on the
nose.

The covers of a fixed based graph form a :class:`~ngrpd.fincat.Site`
(:class:`GraphCovSite`): limits are computed fiberwise over the base, so the
whole simplicial machinery — mapping objects, matching maps, horn-filling
certificates — runs over covers unchanged.  :func:`fiber_functor_ngrpd`
transports truncated simplicial objects of covers to equivariant simplicial
objects level by level, and :func:`verify_correspondence_exactness` audits
that transport on finite samples.  Finally :func:`pull_out_action` /
:func:`push_in_action` trade an equivariant simplicial object for a plain one
carrying a recorded level-wise action, and back, bit-identically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .fincat import (
    FinMap,
    FinSetObj,
    FinSetsSite,
    LimitResult,
    Probe,
    PullbackResult,
    Site,
    class_label,
    guard_size,
    pair_label,
    solve_sections,
    tuple_label,
)
from .gset import INVERSE_SUFFIX, FreeGroup, GFinSetsSite, GSet, all_actions_on_carrier, free_group_action
from .simp import SimplicialMorphism, TruncatedSimplicialObject, constant_object

#: Phantom diagram cell used to anchor limits of covers over the base graph.
BASE_CELL = "__base__"

COVER_CLASSES = ("surjective", "finite-covers")


# ---- graphs -------------------------------------------------------------------


class Graph:
    """A finite directed multigraph with flat string labels.

    ``edges`` maps each edge label to its ``(source, target)`` vertex pair.
    Vertex labels and edge labels must all be pairwise distinct: graph parts
    share one label space so that morphisms and limits can be driven by a
    single mapping dict.
    """

    def __init__(self, vertices, edges):
        self.vertices = tuple(sorted(vertices))
        for v in self.vertices:
            if not isinstance(v, str):
                raise ValueError(f"vertex labels must be strings, got {v!r}")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        vset = set(self.vertices)
        self.edges = {}
        for label in sorted(edges):
            s, t = edges[label]
            if not isinstance(label, str):
                raise ValueError(f"edge labels must be strings, got {label!r}")
            if label in vset:
                raise ValueError(f"label {label!r} used for both a vertex and an edge")
            if s not in vset or t not in vset:
                raise ValueError(f"edge {label!r} has endpoints outside the vertex set")
            self.edges[label] = (s, t)
        self.edge_order = tuple(sorted(self.edges))
        out_edges = {v: [] for v in self.vertices}
        in_edges = {v: [] for v in self.vertices}
        for e in self.edge_order:
            s, t = self.edges[e]
            out_edges[s].append(e)
            in_edges[t].append(e)
        self.out_edges = {v: tuple(es) for v, es in out_edges.items()}
        self.in_edges = {v: tuple(es) for v, es in in_edges.items()}

    def source(self, e: str) -> str:
        return self.edges[e][0]

    def target(self, e: str) -> str:
        return self.edges[e][1]

    def components(self):
        """Connected components (edges read both ways), each a sorted vertex
        tuple, ordered by least vertex."""
        seen = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = {v}
            frontier = [v]
            while frontier:
                u = frontier.pop()
                for e in self.out_edges[u]:
                    w = self.edges[e][1]
                    if w not in comp:
                        comp.add(w)
                        frontier.append(w)
                for e in self.in_edges[u]:
                    w = self.edges[e][0]
                    if w not in comp:
                        comp.add(w)
                        frontier.append(w)
            seen |= comp
            comps.append(tuple(sorted(comp)))
        return comps

    def key(self):
        return (self.vertices, tuple((e, self.edges[e]) for e in self.edge_order))

    def __eq__(self, other):
        return isinstance(other, Graph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Graph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def as_dict(self) -> dict:
        return {
            "edges": [
                {"label": e, "s": self.edges[e][0], "t": self.edges[e][1]}
                for e in self.edge_order
            ],
            "vertices": list(self.vertices),
        }

    @staticmethod
    def from_dict(data: dict) -> "Graph":
        edges = {rec["label"]: (rec["s"], rec["t"]) for rec in data["edges"]}
        if len(edges) != len(data["edges"]):
            raise ValueError("duplicate edge labels")
        return Graph(data["vertices"], edges)


class BasedGraph(Graph):
    """A connected graph with a basepoint and a chosen spanning tree.

    The non-tree edges index the generators of the free loop group; the tree
    makes the generator loops, and hence all monodromy data, deterministic.
    """

    def __init__(self, vertices, edges, base, tree):
        super().__init__(vertices, edges)
        if base not in set(self.vertices):
            raise ValueError(f"basepoint {base!r} is not a vertex")
        self.base = base
        tree = tuple(sorted(tree))
        if len(set(tree)) != len(tree):
            raise ValueError("duplicate tree edges")
        for e in tree:
            if e not in self.edges:
                raise ValueError(f"tree edge {e!r} is not an edge")
        self.tree = frozenset(tree)
        if len(self.tree) != len(self.vertices) - 1:
            raise ValueError("a spanning tree needs exactly one edge fewer than vertices")
        self._tree_paths = self._spread_tree()
        if len(self._tree_paths) != len(self.vertices):
            raise ValueError("the chosen tree does not span the graph")
        self.rank = len(self.edges) - len(self.vertices) + 1
        self.loop_generators = tuple(e for e in self.edge_order if e not in self.tree)
        for e in self.loop_generators:
            if e.endswith(INVERSE_SUFFIX):
                raise ValueError(
                    f"non-tree edge label {e!r} would collide with inverse-letter notation"
                )

    def _spread_tree(self):
        adjacency = {v: [] for v in self.vertices}
        for e in sorted(self.tree):
            s, t = self.edges[e]
            adjacency[s].append((t, e, 1))
            adjacency[t].append((s, e, -1))
        paths = {self.base: ()}
        queue = [self.base]
        while queue:
            v = queue.pop(0)
            for w, e, direction in sorted(adjacency[v]):
                if w not in paths:
                    paths[w] = paths[v] + ((e, direction),)
                    queue.append(w)
        return paths

    def tree_path(self, v: str):
        """The unique tree path basepoint -> v as ((edge, +1|-1), ...)."""
        return self._tree_paths[v]

    def generator_loop(self, e: str):
        """The loop for a non-tree edge: tree out to its source, the edge
        itself, then the tree path home from its target."""
        if e in self.tree or e not in self.edges:
            raise ValueError(f"{e!r} is not a non-tree edge")
        s, t = self.edges[e]
        back = tuple((b, -direction) for b, direction in reversed(self.tree_path(t)))
        return self.tree_path(s) + ((e, 1),) + back

    def free_group(self) -> FreeGroup:
        return FreeGroup(self.rank, self.loop_generators)

    def key(self):
        return (super().key(), self.base, tuple(sorted(self.tree)))

    def __eq__(self, other):
        return isinstance(other, BasedGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return (
            f"BasedGraph({len(self.vertices)} vertices, {len(self.edges)} edges, "
            f"base={self.base!r}, rank={self.rank})"
        )

    def as_dict(self) -> dict:
        data = super().as_dict()
        data["base"] = self.base
        data["tree"] = sorted(self.tree)
        return data

    @staticmethod
    def from_dict(data: dict) -> "BasedGraph":
        edges = {rec["label"]: (rec["s"], rec["t"]) for rec in data["edges"]}
        if len(edges) != len(data["edges"]):
            raise ValueError("duplicate edge labels")
        return BasedGraph(data["vertices"], edges, data["base"], data.get("tree", []))


# ---- covers ---------------------------------------------------------------------


class GraphCover:
    """A covering of a based graph: a total graph plus a projection that is a
    bijection on every vertex star.

    The star condition asks, for each total vertex v and each base edge at
    the image of v, for exactly one lifted edge at v on the matching side.
    It forces constant fiber size, unique path lifting, and (for a nonempty
    total graph) surjectivity onto the connected base.  The empty cover is
    admitted so that the site of covers is closed under equalizers.
    """

    def __init__(self, base: BasedGraph, total: Graph, proj_v: dict, proj_e: dict, name: str = ""):
        self.base = base
        self.total = total
        self.name = name
        if set(proj_v) != set(total.vertices):
            raise ValueError("vertex projection must be total on the total graph")
        if set(proj_e) != set(total.edges):
            raise ValueError("edge projection must be total on the total graph")
        for v, image in proj_v.items():
            if image not in set(base.vertices):
                raise ValueError(f"vertex {v!r} projects outside the base")
        self.proj_v = {v: proj_v[v] for v in total.vertices}
        self.proj_e = {e: proj_e[e] for e in total.edge_order}
        lift_out, lift_in = {}, {}
        for e in total.edge_order:
            b = self.proj_e[e]
            if b not in base.edges:
                raise ValueError(f"edge {e!r} projects outside the base")
            s, t = total.edges[e]
            bs, bt = base.edges[b]
            if self.proj_v[s] != bs or self.proj_v[t] != bt:
                raise ValueError(f"edge {e!r} does not project onto the endpoints of {b!r}")
            if (s, b) in lift_out:
                raise ValueError(f"two lifts of {b!r} start at {s!r}")
            lift_out[(s, b)] = e
            if (t, b) in lift_in:
                raise ValueError(f"two lifts of {b!r} end at {t!r}")
            lift_in[(t, b)] = e
        for v in total.vertices:
            p = self.proj_v[v]
            for b in base.out_edges[p]:
                if (v, b) not in lift_out:
                    raise ValueError(f"no lift of {b!r} starts at {v!r}")
            for b in base.in_edges[p]:
                if (v, b) not in lift_in:
                    raise ValueError(f"no lift of {b!r} ends at {v!r}")
        self._lift_out = lift_out
        self._lift_in = lift_in
        if total.vertices and (
            set(self.proj_v.values()) != set(base.vertices)
            or set(self.proj_e.values()) != set(base.edges)
        ):
            raise ValueError("a nonempty total graph must cover the whole base")
        self.fiber = tuple(v for v in total.vertices if self.proj_v[v] == base.base)
        self.degree = len(self.fiber)
        self.element_order = tuple(sorted(total.vertices)) + tuple(sorted(total.edges))

    def lift_step(self, v: str, step):
        """Follow one (edge, direction) step of a base path from total vertex v."""
        edge, direction = step
        if direction == 1:
            lifted = self._lift_out[(v, edge)]
            return self.total.edges[lifted][1], lifted
        lifted = self._lift_in[(v, edge)]
        return self.total.edges[lifted][0], lifted

    def lift_path(self, v: str, steps) -> str:
        """The endpoint of the unique lift of a base path starting at v."""
        for step in steps:
            v, _ = self.lift_step(v, step)
        return v

    def key(self):
        return (
            self.base.key(),
            self.total.key(),
            tuple(sorted(self.proj_v.items())),
            tuple(sorted(self.proj_e.items())),
        )

    def __eq__(self, other):
        return isinstance(other, GraphCover) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        tag = self.name or f"degree {self.degree}"
        return f"GraphCover({tag}, {len(self.total.vertices)} vertices)"

    def as_dict(self) -> dict:
        return {
            "proj_e": dict(self.proj_e),
            "proj_v": dict(self.proj_v),
            "total": self.total.as_dict(),
        }

    @staticmethod
    def from_dict(base: BasedGraph, data: dict, name: str = "") -> "GraphCover":
        return GraphCover(
            base, Graph.from_dict(data["total"]), data["proj_v"], data["proj_e"], name=name
        )


class CoverMorphism:
    """A graph map between covers of the same base, over the base."""

    __slots__ = ("source", "target", "vertex_map", "edge_map", "_mapping")

    def __init__(self, source: GraphCover, target: GraphCover, vertex_map: dict, edge_map: dict):
        if source.base != target.base:
            raise ValueError("cover morphisms need a common base graph")
        if set(vertex_map) != set(source.total.vertices):
            raise ValueError("vertex map must be total on the source")
        if set(edge_map) != set(source.total.edges):
            raise ValueError("edge map must be total on the source")
        tgt_v, tgt_e = set(target.total.vertices), set(target.total.edges)
        for v, w in vertex_map.items():
            if w not in tgt_v:
                raise ValueError(f"vertex {v!r} is sent outside the target")
            if target.proj_v[w] != source.proj_v[v]:
                raise ValueError(f"vertex {v!r} is not mapped over the base")
        for e, image in edge_map.items():
            if image not in tgt_e:
                raise ValueError(f"edge {e!r} is sent outside the target")
            if target.proj_e[image] != source.proj_e[e]:
                raise ValueError(f"edge {e!r} is not mapped over the base")
            s, t = source.total.edges[e]
            if target.total.edges[image] != (vertex_map[s], vertex_map[t]):
                raise ValueError(f"edge {e!r} does not map onto the image endpoints")
        self.source = source
        self.target = target
        self.vertex_map = {v: vertex_map[v] for v in source.total.vertices}
        self.edge_map = {e: edge_map[e] for e in source.total.edge_order}
        self._mapping = {**self.vertex_map, **self.edge_map}

    @property
    def mapping(self) -> dict:
        return self._mapping

    def key(self):
        return (self.source.key(), self.target.key(), tuple(sorted(self._mapping.items())))

    def __eq__(self, other):
        return isinstance(other, CoverMorphism) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"CoverMorphism({len(self.vertex_map)}v/{len(self.edge_map)}e)"


# ---- the site of covers -----------------------------------------------------------


class GraphCovSite(Site):
    """Covers of a fixed based graph with two selectable cover classes.

    ``"surjective"`` takes all surjective cover morphisms; ``"finite-covers"``
    additionally demands a globally constant fiber size over the target (a
    surjective cover morphism between covers is automatically a covering map
    of the total graphs, but its sheet count may vary across the target's
    components — the stricter class rules that out).  Limits are computed
    fiberwise: every diagram is anchored over the base graph by a phantom
    cell, so sections group into limit vertices over a common base vertex and
    limit edges over a common base edge.
    """

    kind = "graphcov"

    def __init__(self, base: BasedGraph, covers: str = "surjective"):
        if covers not in COVER_CLASSES:
            raise ValueError(f"unknown cover class {covers!r}")
        self.base = base
        self.covers = covers
        self._terminal = None

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "base": self.base.as_dict()}
        if self.covers != "surjective":
            d["covers"] = self.covers
        return d

    def __eq__(self, other):
        return (
            isinstance(other, GraphCovSite)
            and self.base == other.base
            and self.covers == other.covers
        )

    def __hash__(self):
        return hash((self.kind, self.base, self.covers))

    # ---- representation hooks ----------------------------------------------
    def elements(self, A: GraphCover):
        return A.element_order

    def mapping(self, f: CoverMorphism):
        return f.mapping

    def morphism_from_mapping(self, A, B, mapping):
        if set(mapping) != set(A.element_order):
            raise ValueError("mapping must be total on the source parts")
        vm = {v: mapping[v] for v in A.total.vertices}
        em = {e: mapping[e] for e in A.total.edge_order}
        return CoverMorphism(A, B, vm, em)

    def terminal(self) -> GraphCover:
        if self._terminal is None:
            base = self.base
            total = Graph(base.vertices, dict(base.edges))
            self._terminal = GraphCover(
                base,
                total,
                {v: v for v in base.vertices},
                {e: e for e in base.edges},
                name="base",
            )
        return self._terminal

    def terminal_map(self, A: GraphCover) -> CoverMorphism:
        return CoverMorphism(A, self.terminal(), dict(A.proj_v), dict(A.proj_e))

    def is_cover(self, f: CoverMorphism) -> bool:
        surjective = set(f.vertex_map.values()) == set(f.target.total.vertices) and set(
            f.edge_map.values()
        ) == set(f.target.total.edges)
        if self.covers == "surjective" or not surjective:
            return surjective
        sizes = {
            w: sum(1 for v in f.source.total.vertices if f.vertex_map[v] == w)
            for w in f.target.total.vertices
        }
        return len(set(sizes.values())) <= 1

    def target_candidates(self, A: GraphCover, B: GraphCover, x) -> tuple:
        # morphisms of covers live over the base: x can only land on parts of
        # the same kind with the same projection
        if x in A.total.edges:
            cell = A.proj_e[x]
            return tuple(e for e in B.total.edge_order if B.proj_e[e] == cell)
        cell = A.proj_v[x]
        return tuple(v for v in B.total.vertices if B.proj_v[v] == cell)

    # ---- morphism enumeration ------------------------------------------------
    def all_morphisms(self, A: GraphCover, B: GraphCover):
        """Every morphism A -> B; one choice per component of A determines the
        rest by unique lifting."""
        reps = [comp[0] for comp in A.total.components()]
        if not reps:
            return [CoverMorphism(A, B, {}, {})]
        candidates = {
            rep: [w for w in B.total.vertices if B.proj_v[w] == A.proj_v[rep]]
            for rep in reps
        }
        bound = 1
        for rep in reps:
            bound *= max(len(candidates[rep]), 1)
        guard_size(bound, "cover morphism enumeration")
        results = []

        def extend(i, vertex_map, edge_map):
            if i == len(reps):
                results.append(CoverMorphism(A, B, vertex_map, edge_map))
                return
            rep = reps[i]
            if rep in vertex_map:
                extend(i + 1, vertex_map, edge_map)
                return
            for w in candidates[rep]:
                vm, em = dict(vertex_map), dict(edge_map)
                vm[rep] = w
                if _spread_cover_map(A, B, vm, em, rep):
                    extend(i + 1, vm, em)

        extend(0, {}, {})
        return results

    # ---- limits and colimits ---------------------------------------------------
    def pullback(self, f: CoverMorphism, g: CoverMorphism) -> PullbackResult:
        if f.target != g.target:
            raise ValueError("pullback needs a shared target")
        A, B = f.source, g.source
        vertices, edges, pairs = {}, {}, {}
        for a in A.total.vertices:
            for b in B.total.vertices:
                if f.vertex_map[a] == g.vertex_map[b]:
                    lab = pair_label(a, b)
                    vertices[lab] = (a, b)
                    pairs[lab] = (a, b)
        for ea in A.total.edge_order:
            for eb in B.total.edge_order:
                if f.edge_map[ea] == g.edge_map[eb]:
                    lab = pair_label(ea, eb)
                    sa, ta = A.total.edges[ea]
                    sb, tb = B.total.edges[eb]
                    edges[lab] = (pair_label(sa, sb), pair_label(ta, tb))
                    pairs[lab] = (ea, eb)
        guard_size(len(pairs), "cover pullback apex")
        total = Graph(vertices.keys(), edges)
        apex = GraphCover(
            self.base,
            total,
            {lab: A.proj_v[ab[0]] for lab, ab in vertices.items()},
            {lab: A.proj_e[pairs[lab][0]] for lab in edges},
        )
        p1 = CoverMorphism(
            apex,
            A,
            {lab: ab[0] for lab, ab in vertices.items()},
            {lab: pairs[lab][0] for lab in edges},
        )
        p2 = CoverMorphism(
            apex,
            B,
            {lab: ab[1] for lab, ab in vertices.items()},
            {lab: pairs[lab][1] for lab in edges},
        )
        return PullbackResult(self, f, g, apex, p1, p2, pairs)

    def equalizer(self, f: CoverMorphism, g: CoverMorphism):
        if f.source != g.source or f.target != g.target:
            raise ValueError("equalizer needs a parallel pair")
        A = f.source
        kept_v = [v for v in A.total.vertices if f.vertex_map[v] == g.vertex_map[v]]
        kept_e = {
            e: A.total.edges[e]
            for e in A.total.edge_order
            if f.edge_map[e] == g.edge_map[e]
        }
        kept_set = set(kept_v)
        for e, (s, t) in kept_e.items():
            if s not in kept_set or t not in kept_set:
                raise AssertionError("equalizer subgraph is not star-closed")
        sub = GraphCover(
            self.base,
            Graph(kept_v, kept_e),
            {v: A.proj_v[v] for v in kept_v},
            {e: A.proj_e[e] for e in kept_e},
        )
        incl = CoverMorphism(sub, A, {v: v for v in kept_v}, {e: e for e in kept_e})
        return sub, incl

    def coequalizer(self, f: CoverMorphism, g: CoverMorphism):
        if f.source != g.source or f.target != g.target:
            raise ValueError("coequalizer needs a parallel pair")
        B = f.target
        parent = {x: x for x in B.element_order}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
                return True
            return False

        for x in f.source.element_order:
            union(f.mapping[x], g.mapping[x])
        # Close up so the quotient is again a cover: identified edges force
        # identified endpoints, and identified vertices force identified
        # lifts of every base edge at their common image.
        changed = True
        while changed:
            changed = False
            classes = {}
            for e in B.total.edge_order:
                classes.setdefault(find(e), []).append(e)
            for members in classes.values():
                anchor = members[0]
                for e in members[1:]:
                    changed |= union(B.total.edges[anchor][0], B.total.edges[e][0])
                    changed |= union(B.total.edges[anchor][1], B.total.edges[e][1])
            vclasses = {}
            for v in B.total.vertices:
                vclasses.setdefault(find(v), []).append(v)
            for members in vclasses.values():
                anchor = members[0]
                p = B.proj_v[anchor]
                for v in members[1:]:
                    for b in self.base.out_edges[p]:
                        changed |= union(B._lift_out[(anchor, b)], B._lift_out[(v, b)])
                    for b in self.base.in_edges[p]:
                        changed |= union(B._lift_in[(anchor, b)], B._lift_in[(v, b)])
        vclasses, eclasses = {}, {}
        for v in B.total.vertices:
            vclasses.setdefault(find(v), []).append(v)
        for e in B.total.edge_order:
            eclasses.setdefault(find(e), []).append(e)
        vlabels = {root: class_label(members) for root, members in vclasses.items()}
        elabels = {root: class_label(members) for root, members in eclasses.items()}
        edges = {
            lab: (
                vlabels[find(B.total.edges[eclasses[root][0]][0])],
                vlabels[find(B.total.edges[eclasses[root][0]][1])],
            )
            for root, lab in elabels.items()
        }
        quotient = GraphCover(
            self.base,
            Graph(vlabels.values(), edges),
            {lab: B.proj_v[vclasses[root][0]] for root, lab in vlabels.items()},
            {lab: B.proj_e[eclasses[root][0]] for root, lab in elabels.items()},
        )
        proj = CoverMorphism(
            B,
            quotient,
            {v: vlabels[find(v)] for v in B.total.vertices},
            {e: elabels[find(e)] for e in B.total.edge_order},
        )
        return quotient, proj

    def limit_sections(self, cell_order, tops, level_obj, arrows):
        """Limit of a diagram of covers, anchored over the base.

        A phantom cell valued in the identity cover receives the projection
        of every diagram cell, which both confines each section to parts of a
        single kind lying over one base element and makes the empty diagram's
        limit the identity cover, as it must be among covers.
        """
        cells = list(cell_order) + [BASE_CELL]
        objs = dict(level_obj)
        objs[BASE_CELL] = self.terminal()
        arr = list(arrows)
        for c in cell_order:
            cover = level_obj[c]
            arr.append((c, BASE_CELL, {**cover.proj_v, **cover.proj_e}))
        tops2 = list(tops) if tops else [BASE_CELL]
        candidates = {c: list(self.elements(objs[c])) for c in tops2}
        sections = solve_sections(cells, tops2, candidates, arr)
        if tops:
            by_label = {tuple_label([sec[c] for c in tops]): sec for sec in sections}
        else:
            by_label = {sec[BASE_CELL]: sec for sec in sections}
        base_vertices = set(self.base.vertices)
        vertices, edge_sections = {}, {}
        for lab, sec in by_label.items():
            if sec[BASE_CELL] in base_vertices:
                vertices[lab] = sec[BASE_CELL]
            else:
                edge_sections[lab] = sec
        edges, proj_e = {}, {}
        for lab, sec in edge_sections.items():
            if tops:
                src = tuple_label([level_obj[c].total.edges[sec[c]][0] for c in tops])
                tgt = tuple_label([level_obj[c].total.edges[sec[c]][1] for c in tops])
            else:
                src, tgt = self.base.edges[sec[BASE_CELL]]
            if src not in vertices or tgt not in vertices:
                raise AssertionError("edge section with endpoints outside the limit")
            edges[lab] = (src, tgt)
            proj_e[lab] = sec[BASE_CELL]
        obj = GraphCover(self.base, Graph(vertices.keys(), edges), vertices, proj_e)
        return LimitResult(obj, list(tops), by_label)


# ---- monodromy ---------------------------------------------------------------------


def _spread_cover_map(A: GraphCover, B: GraphCover, vertex_map, edge_map, start):
    """Grow a partial morphism of covers from a freshly assigned vertex by
    unique lifting; reject on any conflict."""
    frontier = [start]
    while frontier:
        v = frontier.pop()
        w = vertex_map[v]
        for e in A.total.out_edges[v]:
            image = B._lift_out[(w, A.proj_e[e])]
            if edge_map.setdefault(e, image) != image:
                return False
            u, iu = A.total.edges[e][1], B.total.edges[image][1]
            if u in vertex_map:
                if vertex_map[u] != iu:
                    return False
            else:
                vertex_map[u] = iu
                frontier.append(u)
        for e in A.total.in_edges[v]:
            image = B._lift_in[(w, A.proj_e[e])]
            if edge_map.setdefault(e, image) != image:
                return False
            u, iu = A.total.edges[e][0], B.total.edges[image][0]
            if u in vertex_map:
                if vertex_map[u] != iu:
                    return False
            else:
                vertex_map[u] = iu
                frontier.append(u)
    return True


def fiber_functor(cover: GraphCover) -> GSet:
    """The monodromy action on the basepoint fiber.

    Each loop generator acts by path lifting: start at a fiber point, lift
    the generator loop step by step, land on another fiber point.
    """
    base = cover.base
    perms = {}
    for e in base.loop_generators:
        loop = base.generator_loop(e)
        perms[e] = {y: cover.lift_path(y, loop) for y in cover.fiber}
    return free_group_action(base.rank, cover.fiber, perms, generator_labels=base.loop_generators)


def fiber_functor_map(morphism: CoverMorphism):
    """The equivariant fiber map induced by a morphism of covers."""
    source = fiber_functor(morphism.source)
    target = fiber_functor(morphism.target)
    site = GFinSetsSite(source.group)
    return site.morphism_from_mapping(
        source, target, {y: morphism.vertex_map[y] for y in morphism.source.fiber}
    )


def monodromy_site(base: BasedGraph) -> GFinSetsSite:
    """The site of finite actions of the base's free loop group."""
    return GFinSetsSite(base.free_group())


def cover_from_action(action: GSet, base: BasedGraph) -> GraphCover:
    """Rebuild the cover with the given monodromy by spreading sheets along
    the tree.

    One sheet per carrier point: tree edges stay inside their sheet, each
    non-tree edge jumps sheets by its permutation.  The basepoint fiber keeps
    the carrier labels, so reading the action back off the rebuilt cover
    reproduces it exactly.
    """
    expected = base.free_group()
    if action.group != expected:
        raise ValueError(
            f"action is for {action.group!r}, but the base's loop group is {expected!r}"
        )

    def vertex_label(y, v):
        return y if v == base.base else pair_label(y, v)

    carrier = action.carrier.elements
    guard_size(len(carrier) * max(len(base.vertices), 1), "rebuilt cover size")
    vertices, proj_v = {}, {}
    for y in carrier:
        for v in base.vertices:
            lab = vertex_label(y, v)
            vertices[lab] = None
            proj_v[lab] = v
    edges, proj_e = {}, {}
    for y in carrier:
        for e in base.edge_order:
            u, w = base.edges[e]
            sheet = y if e in base.tree else action.action[e][y]
            lab = pair_label(y, e)
            edges[lab] = (vertex_label(y, u), vertex_label(sheet, w))
            proj_e[lab] = e
    return GraphCover(base, Graph(proj_v.keys(), edges), proj_v, proj_e)


def cover_isomorphism(c1: GraphCover, c2: GraphCover):
    """Some isomorphism of covers c1 -> c2, or None.

    Exhaustive over fiber bijections: each candidate is spread through the
    total graph by unique path lifting and kept if it lands bijectively.
    """
    if c1.base != c2.base:
        raise ValueError("covers of different bases cannot be compared")
    if c1.degree != c2.degree or len(c1.total.vertices) != len(c2.total.vertices):
        return None
    guard_size(math.factorial(c1.degree), "fiber bijection search")
    for image in itertools.permutations(c2.fiber):
        vertex_map = dict(zip(c1.fiber, image))
        edge_map = {}
        ok = True
        for y in c1.fiber:
            if not _spread_cover_map(c1, c2, vertex_map, edge_map, y):
                ok = False
                break
        if not ok:
            continue
        if len(vertex_map) != len(c1.total.vertices):
            continue
        candidate = CoverMorphism(c1, c2, vertex_map, edge_map)
        if len(set(candidate.vertex_map.values())) == len(c2.total.vertices) and len(
            set(candidate.edge_map.values())
        ) == len(c2.total.edges):
            return candidate
    return None


def roundtrip_iso(cover: GraphCover) -> CoverMorphism:
    """An isomorphism between a cover and the rebuild from its monodromy.

    A failed search would falsify the cover/action dictionary at this
    instance, so it raises instead of returning None.
    """
    rebuilt = cover_from_action(fiber_functor(cover), cover.base)
    witness = cover_isomorphism(cover, rebuilt)
    if witness is None:
        raise AssertionError("no isomorphism between the cover and its monodromy rebuild")
    return witness


def action_roundtrip_exact(action: GSet, base: BasedGraph) -> bool:
    """Whether rebuilding a cover from the action and reading the action back
    reproduces it bit-for-bit."""
    return fiber_functor(cover_from_action(action, base)) == action


# ---- enumeration ---------------------------------------------------------------------


def enumerate_fiber_actions(base: BasedGraph, max_points: int, up_to_iso: bool = True):
    """All actions of the base's loop group on carriers {1..k}, k <= max_points,
    optionally one per equivariant-isomorphism class."""
    group = base.free_group()
    site = GFinSetsSite(group)
    found = []
    for k in range(1, max_points + 1):
        carrier = FinSetObj([str(i) for i in range(1, k + 1)])
        for action in all_actions_on_carrier(group, carrier):
            if up_to_iso and any(
                len(seen.carrier) == k and site.are_isomorphic(seen, action)
                for seen in found
            ):
                continue
            found.append(action)
    return found


def enumerate_covers(base: BasedGraph, max_degree: int, up_to_iso: bool = True):
    """Covers of degree 1..max_degree via their monodromy actions."""
    return [
        cover_from_action(action, base)
        for action in enumerate_fiber_actions(base, max_degree, up_to_iso=up_to_iso)
    ]


def graphcov_probe(base: BasedGraph, max_degree: int = 2, covers: str = "surjective") -> Probe:
    """All morphisms between one cover per isomorphism class of bounded degree."""
    site = GraphCovSite(base, covers=covers)
    objects = enumerate_covers(base, max_degree)
    morphisms = []
    for A in objects:
        for B in objects:
            morphisms.extend(site.all_morphisms(A, B))
    return Probe(objects, morphisms, name=f"graphcov<= {max_degree}")


# ---- the level-wise monodromy functor ---------------------------------------------


def fiber_functor_ngrpd(X: TruncatedSimplicialObject) -> TruncatedSimplicialObject:
    """Transport a simplicial object of covers to an equivariant simplicial
    object by taking monodromy level-wise."""
    if not isinstance(X.site, GraphCovSite):
        raise ValueError("expected a simplicial object over a site of graph covers")
    target = monodromy_site(X.site.base)
    levels = {m: fiber_functor(X.levels[m]) for m in range(X.N + 1)}
    d = {key: fiber_functor_map(mor) for key, mor in X.d.items()}
    s = {key: fiber_functor_map(mor) for key, mor in X.s.items()}
    return TruncatedSimplicialObject(target, X.N, levels, d, s)


def fiber_functor_morphism(f: SimplicialMorphism) -> SimplicialMorphism:
    """The level-wise monodromy image of a morphism of simplicial objects."""
    return SimplicialMorphism(
        fiber_functor_ngrpd(f.source),
        fiber_functor_ngrpd(f.target),
        {m: fiber_functor_map(f.components[m]) for m in range(f.source.N + 1)},
    )


def verify_correspondence_exactness(
    base: BasedGraph,
    objects,
    morphisms=None,
    essential_point_bound: int = 0,
    covers: str = "surjective",
    truncation=None,
) -> dict:
    """Audit the level-wise monodromy functor on a finite sample.

    Runs the exactness audit (functoriality, terminal, fibrations, trivial
    fibrations, pullback squares, products, weak equivalences), then checks
    the cover dictionary both ways on every sampled component (a morphism of
    covers is surjective exactly when its fiber map is), and finally instance
    checks essential surjectivity: every action on at most
    ``essential_point_bound`` points, lifted to a constant simplicial object,
    is isomorphic to the image of the corresponding rebuilt cover.
    """
    from .grpd import enumerate_simplicial_morphisms, simplicial_isomorphism, verify_exact_functor

    src_site = GraphCovSite(base, covers=covers)
    tgt_site = monodromy_site(base)
    named = [obj if isinstance(obj, tuple) else (f"object{k}", obj) for k, obj in enumerate(objects)]
    if morphisms is None:
        morphisms = []
        for nm_s, X in named:
            for nm_t, Y in named:
                for idx, mor in enumerate(enumerate_simplicial_morphisms(X, Y)):
                    morphisms.append((f"{nm_s}->{nm_t}#{idx}", mor))
    else:
        morphisms = [
            mor if isinstance(mor, tuple) else (f"morphism{k}", mor)
            for k, mor in enumerate(morphisms)
        ]
    report = verify_exact_functor(
        fiber_functor_ngrpd,
        fiber_functor_morphism,
        src_site,
        tgt_site,
        named,
        morphisms=morphisms,
        name="monodromy",
    )
    checks = report["checks"]
    for nm, mor in morphisms:
        for m in range(mor.source.N + 1):
            component = mor.components[m]
            source_is_cover = src_site.is_cover(component)
            image_is_cover = tgt_site.is_cover(fiber_functor_map(component))
            checks.append(
                {
                    "check": "cover_dictionary",
                    "morphism": nm,
                    "level": m,
                    "source_is_cover": source_is_cover,
                    "image_is_cover": image_is_cover,
                    "ok": source_is_cover == image_is_cover,
                }
            )
    if truncation is None:
        truncation = named[0][1].N if named else 1
    for idx, action in enumerate(
        enumerate_fiber_actions(base, essential_point_bound, up_to_iso=True)
    ):
        target_obj = constant_object(tgt_site, action, truncation)
        image = fiber_functor_ngrpd(
            constant_object(src_site, cover_from_action(action, base), truncation)
        )
        hit = simplicial_isomorphism(image, target_obj) is not None
        checks.append(
            {
                "check": "essential_surjectivity",
                "target": f"{len(action.carrier)}pt#{idx}",
                "ok": hit,
            }
        )
    report["ok"] = all(c["ok"] for c in checks)
    return report


# ---- action extraction --------------------------------------------------------------


@dataclass
class ActionCarryingObject:
    """A plain simplicial object of finite sets with a recorded group action
    per level, each commuting with every face and degeneracy."""

    plain: TruncatedSimplicialObject
    group: object
    actions: dict = field(default_factory=dict)

    def level_action(self, m: int) -> dict:
        return self.actions[m]


def pull_out_action(X: TruncatedSimplicialObject) -> ActionCarryingObject:
    """Forget an equivariant simplicial object down to finite sets while
    recording the level-wise action."""
    if not isinstance(X.site, GFinSetsSite):
        raise ValueError("expected a simplicial object of group actions")
    plain_site = FinSetsSite()
    levels = {m: X.levels[m].carrier for m in range(X.N + 1)}
    d = {
        key: FinMap(levels[key[0]], levels[key[0] - 1], dict(mor.mapping))
        for key, mor in X.d.items()
    }
    s = {
        key: FinMap(levels[key[0]], levels[key[0] + 1], dict(mor.mapping))
        for key, mor in X.s.items()
    }
    plain = TruncatedSimplicialObject(plain_site, X.N, levels, d, s)
    actions = {
        m: {letter: dict(perm) for letter, perm in X.levels[m].action.items()}
        for m in range(X.N + 1)
    }
    return ActionCarryingObject(plain, X.site.group, actions)


def push_in_action(carrying: ActionCarryingObject) -> TruncatedSimplicialObject:
    """Reassemble the equivariant simplicial object from a plain one with
    recorded actions; rejects actions that break the action axioms or fail to
    commute with a structure map, naming the offender."""
    plain, group, actions = carrying.plain, carrying.group, carrying.actions
    site = GFinSetsSite(group)
    levels = {}
    for m in range(plain.N + 1):
        try:
            levels[m] = GSet(group, plain.levels[m], actions[m])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"invalid action at level {m}: {exc}") from exc
    d, s = {}, {}
    for key, mor in plain.d.items():
        try:
            d[key] = site.morphism_from_mapping(levels[key[0]], levels[key[0] - 1], dict(mor.mapping))
        except ValueError as exc:
            raise ValueError(f"action does not commute with face {key}: {exc}") from exc
    for key, mor in plain.s.items():
        try:
            s[key] = site.morphism_from_mapping(levels[key[0]], levels[key[0] + 1], dict(mor.mapping))
        except ValueError as exc:
            raise ValueError(f"action does not commute with degeneracy {key}: {exc}") from exc
    return TruncatedSimplicialObject(site, plain.N, levels, d, s)


# ---- stock graphs and covers --------------------------------------------------------


def figure_eight() -> BasedGraph:
    """One vertex, two loops; loop group free of rank two."""
    return BasedGraph(["x"], {"a": ("x", "x"), "b": ("x", "x")}, "x", [])


def theta_graph() -> BasedGraph:
    """Two vertices joined by three parallel edges, tree = first edge."""
    return BasedGraph(
        ["u", "v"], {"p": ("u", "v"), "q": ("u", "v"), "r": ("u", "v")}, "u", ["p"]
    )


def double_cover_a() -> GraphCover:
    """The connected double cover of the figure eight whose a-edges swap the
    two sheets and whose b-edges fix them."""
    base = figure_eight()
    total = Graph(
        ["1", "2"],
        {"a1": ("1", "2"), "a2": ("2", "1"), "b1": ("1", "1"), "b2": ("2", "2")},
    )
    return GraphCover(
        base,
        total,
        {"1": "x", "2": "x"},
        {"a1": "a", "a2": "a", "b1": "b", "b2": "b"},
        name="double cover (a swaps)",
    )
