"""Ordinal-map combinatorics and truncated simplicial objects over a site.

The index category is the one whose objects are the finite ordinals
[m] = {0 < 1 < ... < m} and whose morphisms are nondecreasing maps.  An
:class:`OrdinalMap` factors uniquely as cofaces after codegeneracies, which is
how an abstract map acts on a simplicial object.

Shapes (:class:`FiniteSimplicialSet`) are finite cell complexes truncated at a
level N: the standard simplex, its boundary (non-surjective maps), its horns
(maps whose image together with one marked vertex misses some vertex), and
binary products.  A :class:`TruncatedSimplicialObject` has a site object per
level and face/degeneracy morphisms satisfying the simplicial identities; a
:class:`SimplicialMorphism` is a level-wise morphism commuting with them.

``hom_into(S, X)`` is the central computation: the site object of all
shape-to-object maps, computed as a finite limit (compatible families over the
cells of S) with canonical tuple labels over the generating cells.
"""

from __future__ import annotations

import itertools

from .fincat import RefusedError, guard_size, pair_label, tuple_label


class OrdinalMap:
    """A nondecreasing map [m] -> [k], stored by its value tuple."""

    __slots__ = ("m", "k", "values")

    def __init__(self, m: int, k: int, values):
        values = tuple(values)
        if len(values) != m + 1:
            raise ValueError("need one value per domain element")
        if any(not 0 <= v <= k for v in values):
            raise ValueError("values out of codomain range")
        if any(values[i] > values[i + 1] for i in range(m)):
            raise ValueError("values must be nondecreasing")
        self.m = m
        self.k = k
        self.values = values

    @staticmethod
    def identity(k):
        return OrdinalMap(k, k, range(k + 1))

    @staticmethod
    def coface(k, i):
        """delta_i: [k-1] -> [k], skipping i."""
        if not 0 <= i <= k or k < 1:
            raise ValueError("coface index out of range")
        return OrdinalMap(k - 1, k, [v for v in range(k + 1) if v != i])

    @staticmethod
    def codegeneracy(k, j):
        """sigma_j: [k+1] -> [k], hitting j twice."""
        if not 0 <= j <= k:
            raise ValueError("codegeneracy index out of range")
        return OrdinalMap(k + 1, k, [min(v, k) for v in list(range(j + 1)) + list(range(j, k + 1))])

    @staticmethod
    def constant(m, k, value):
        return OrdinalMap(m, k, [value] * (m + 1))

    def compose(self, other: "OrdinalMap") -> "OrdinalMap":
        """self ∘ other (apply other first)."""
        if other.k != self.m:
            raise ValueError("ordinal maps not composable")
        return OrdinalMap(other.m, self.k, [self.values[v] for v in other.values])

    def is_surjective(self) -> bool:
        return set(self.values) == set(range(self.k + 1))

    def in_horn(self, i: int) -> bool:
        """Membership in the i-th horn: image together with {i} misses a vertex."""
        return not set(range(self.k + 1)) <= set(self.values) | {i}

    def factorize(self):
        """The unique coface/codegeneracy decomposition.

        Returns (missing, duplicated): ``missing`` lists the codomain values not
        hit, in descending order; ``duplicated`` the domain positions j with
        value(j) = value(j+1), ascending.  Acting contravariantly on a
        simplicial object, the faces d_i apply first (largest i first), then the
        degeneracies s_j (smallest j first).
        """
        image = set(self.values)
        missing = [i for i in range(self.k, -1, -1) if i not in image]
        duplicated = [j for j in range(self.m) if self.values[j] == self.values[j + 1]]
        return missing, duplicated

    def label(self) -> str:
        return tuple_label(str(v) for v in self.values)

    def key(self):
        return (self.m, self.k, self.values)

    def __eq__(self, other):
        return isinstance(other, OrdinalMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"OrdinalMap({self.m}->{self.k}, {list(self.values)})"


def ordinal_maps(m: int, k: int):
    """All nondecreasing maps [m] -> [k] in lexicographic order."""
    return [
        OrdinalMap(m, k, values)
        for values in itertools.combinations_with_replacement(range(k + 1), m + 1)
    ]


class FiniteSimplicialSet:
    """A truncated complex of labeled cells with face/degeneracy mappings.

    ``cell_data`` optionally retains, for shapes carved out of a standard
    simplex or a product of two, the underlying ordinal map (or pair of maps)
    of each cell; evaluation-style constructions need it.
    """

    def __init__(self, N, levels, d, s, cell_data=None, name=""):
        self.N = N
        self.levels = {m: tuple(levels[m]) for m in range(N + 1)}
        self.d = {key: dict(val) for key, val in d.items()}
        self.s = {key: dict(val) for key, val in s.items()}
        self.cell_data = dict(cell_data) if cell_data else {}
        self.name = name
        self._validate()

    def _validate(self):
        for m in range(self.N + 1):
            if len(set(self.levels[m])) != len(self.levels[m]):
                raise ValueError(f"duplicate cell labels at level {m}")
        for m in range(1, self.N + 1):
            here, below = set(self.levels[m]), set(self.levels[m - 1])
            for i in range(m + 1):
                face = self.d.get((m, i))
                if face is None or set(face) != here or not set(face.values()) <= below:
                    raise ValueError(f"face ({m},{i}) is not a total map downward")
        for m in range(self.N):
            here, above = set(self.levels[m]), set(self.levels[m + 1])
            for j in range(m + 1):
                deg = self.s.get((m, j))
                if deg is None or set(deg) != here or not set(deg.values()) <= above:
                    raise ValueError(f"degeneracy ({m},{j}) is not a total map upward")
        self._check_identities()

    def _check_identities(self):
        for m in range(2, self.N + 1):
            for j in range(m + 1):
                for i in range(j):
                    for c in self.levels[m]:
                        if self.d[(m - 1, i)][self.d[(m, j)][c]] != self.d[(m - 1, j - 1)][self.d[(m, i)][c]]:
                            raise ValueError(f"face-face identity fails at level {m} ({i},{j})")
        for m in range(self.N):
            for j in range(m + 1):
                for i in range(m + 2):
                    for c in self.levels[m]:
                        up = self.s[(m, j)][c]
                        got = self.d[(m + 1, i)][up]
                        if i < j:
                            want = self.s[(m - 1, j - 1)][self.d[(m, i)][c]]
                        elif i in (j, j + 1):
                            want = c
                        else:
                            want = self.s[(m - 1, j)][self.d[(m, i - 1)][c]]
                        if got != want:
                            raise ValueError(f"face-degeneracy identity fails at level {m} ({i},{j})")
        for m in range(self.N - 1):
            for j in range(m + 1):
                for i in range(j + 1):
                    for c in self.levels[m]:
                        if self.s[(m + 1, i)][self.s[(m, j)][c]] != self.s[(m + 1, j + 1)][self.s[(m, i)][c]]:
                            raise ValueError(f"degeneracy-degeneracy identity fails at level {m} ({i},{j})")

    def cells(self, m):
        return self.levels[m]

    def cell_count(self):
        return sum(len(self.levels[m]) for m in range(self.N + 1))

    def is_degenerate(self, m, cell) -> bool:
        if m == 0:
            return False
        return any(
            self.s[(m - 1, j)][c] == cell for j in range(m) for c in self.levels[m - 1]
        )

    def nondegenerate_cells(self):
        out = []
        for m in range(self.N + 1):
            degenerate = set()
            if m > 0:
                for j in range(m):
                    degenerate.update(self.s[(m - 1, j)].values())
            out.extend((m, c) for c in self.levels[m] if c not in degenerate)
        return out

    def generating_cells(self):
        """Nondegenerate cells that are not iterated faces of other
        nondegenerate cells; assignments on these determine a simplicial map."""
        nondeg = self.nondegenerate_cells()
        nondeg_set = set(nondeg)
        dominated = set()
        for m, c in nondeg:
            frontier = [(m, c)]
            seen = set()
            while frontier:
                lm, lc = frontier.pop()
                if lm == 0:
                    continue
                for i in range(lm + 1):
                    nxt = (lm - 1, self.d[(lm, i)][lc])
                    if nxt in seen:
                        continue
                    seen.add(nxt)
                    frontier.append(nxt)
                    if nxt in nondeg_set:
                        dominated.add(nxt)
        return [cell for cell in nondeg if cell not in dominated]

    def key(self):
        return (
            self.N,
            tuple(self.levels[m] for m in range(self.N + 1)),
            tuple(sorted((k, tuple(sorted(v.items()))) for k, v in self.d.items())),
            tuple(sorted((k, tuple(sorted(v.items()))) for k, v in self.s.items())),
        )

    def __eq__(self, other):
        return isinstance(other, FiniteSimplicialSet) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        sizes = [len(self.levels[m]) for m in range(self.N + 1)]
        return f"FiniteSimplicialSet({self.name or 'shape'}, N={self.N}, sizes={sizes})"


def _simplex_like(k: int, N: int, keep, name: str) -> FiniteSimplicialSet:
    """Sub-shape of the standard k-simplex with cells filtered by ``keep``."""
    levels, cell_data = {}, {}
    chosen = {}
    for m in range(N + 1):
        cells = [a for a in ordinal_maps(m, k) if keep(a)]
        chosen[m] = cells
        levels[m] = [a.label() for a in cells]
        for a in cells:
            cell_data[(m, a.label())] = a
    d, s = {}, {}
    for m in range(1, N + 1):
        for i in range(m + 1):
            delta = OrdinalMap.coface(m, i)
            d[(m, i)] = {a.label(): a.compose(delta).label() for a in chosen[m]}
    for m in range(N):
        for j in range(m + 1):
            sigma = OrdinalMap.codegeneracy(m, j)
            s[(m, j)] = {a.label(): a.compose(sigma).label() for a in chosen[m]}
    return FiniteSimplicialSet(N, levels, d, s, cell_data=cell_data, name=name)


def standard_simplex(k: int, N: int) -> FiniteSimplicialSet:
    if k < 0 or N < 0:
        raise ValueError("need k >= 0 and N >= 0")
    return _simplex_like(k, N, lambda a: True, name=f"simplex({k})")


def boundary(k: int, N: int) -> FiniteSimplicialSet:
    if k < 1:
        raise ValueError("boundary needs k >= 1")
    return _simplex_like(k, N, lambda a: not a.is_surjective(), name=f"boundary({k})")


def horn(k: int, i: int, N: int) -> FiniteSimplicialSet:
    if k < 1 or not 0 <= i <= k:
        raise ValueError("horn needs k >= 1 and 0 <= i <= k")
    return _simplex_like(k, N, lambda a: a.in_horn(i), name=f"horn({k},{i})")


def product_simplex(m: int, n: int, N: int) -> FiniteSimplicialSet:
    """The product of the standard m- and n-simplices, cells = pairs of maps."""
    if m < 0 or n < 0 or N < 0:
        raise ValueError("need nonnegative dimensions")
    levels, cell_data = {}, {}
    chosen = {}
    for lvl in range(N + 1):
        pairs = [(a, b) for a in ordinal_maps(lvl, m) for b in ordinal_maps(lvl, n)]
        chosen[lvl] = pairs
        levels[lvl] = [pair_label(a.label(), b.label()) for a, b in pairs]
        for a, b in pairs:
            cell_data[(lvl, pair_label(a.label(), b.label()))] = (a, b)
    d, s = {}, {}
    for lvl in range(1, N + 1):
        for i in range(lvl + 1):
            delta = OrdinalMap.coface(lvl, i)
            d[(lvl, i)] = {
                pair_label(a.label(), b.label()): pair_label(
                    a.compose(delta).label(), b.compose(delta).label()
                )
                for a, b in chosen[lvl]
            }
    for lvl in range(N):
        for j in range(lvl + 1):
            sigma = OrdinalMap.codegeneracy(lvl, j)
            s[(lvl, j)] = {
                pair_label(a.label(), b.label()): pair_label(
                    a.compose(sigma).label(), b.compose(sigma).label()
                )
                for a, b in chosen[lvl]
            }
    return FiniteSimplicialSet(N, levels, d, s, cell_data=cell_data, name=f"product({m},{n})")


def empty_shape(N: int) -> FiniteSimplicialSet:
    """The shape with no cells at all (e.g. the boundary of a point)."""
    return FiniteSimplicialSet(
        N, {m: [] for m in range(N + 1)},
        {(m, i): {} for m in range(1, N + 1) for i in range(m + 1)},
        {(m, j): {} for m in range(N) for j in range(m + 1)},
        name="empty",
    )


class TruncatedSimplicialObject:
    """Site objects X_0..X_N with face/degeneracy morphisms of the site."""

    def __init__(self, site, N, levels, d, s):
        self.site = site
        self.N = N
        self.levels = {m: levels[m] for m in range(N + 1)}
        self.d = dict(d)
        self.s = dict(s)
        self._hom_cache = {}
        self._validate()

    def _validate(self):
        site = self.site
        for m in range(1, self.N + 1):
            for i in range(m + 1):
                f = self.d.get((m, i))
                if f is None or f.source != self.levels[m] or f.target != self.levels[m - 1]:
                    raise ValueError(f"face ({m},{i}) missing or has wrong endpoints")
        for m in range(self.N):
            for j in range(m + 1):
                f = self.s.get((m, j))
                if f is None or f.source != self.levels[m] or f.target != self.levels[m + 1]:
                    raise ValueError(f"degeneracy ({m},{j}) missing or has wrong endpoints")
        for m in range(2, self.N + 1):
            for j in range(m + 1):
                for i in range(j):
                    lhs = site.compose(self.d[(m - 1, i)], self.d[(m, j)])
                    rhs = site.compose(self.d[(m - 1, j - 1)], self.d[(m, i)])
                    if not site.morphisms_equal(lhs, rhs):
                        raise ValueError(f"face-face identity fails ({i},{j}) at level {m}")
        for m in range(self.N):
            for j in range(m + 1):
                for i in range(m + 2):
                    lhs = site.compose(self.d[(m + 1, i)], self.s[(m, j)])
                    if i < j:
                        rhs = site.compose(self.s[(m - 1, j - 1)], self.d[(m, i)])
                    elif i in (j, j + 1):
                        rhs = site.identity(self.levels[m])
                    else:
                        rhs = site.compose(self.s[(m - 1, j)], self.d[(m, i - 1)])
                    if not site.morphisms_equal(lhs, rhs):
                        raise ValueError(f"face-degeneracy identity fails ({i},{j}) at level {m}")
        for m in range(self.N - 1):
            for j in range(m + 1):
                for i in range(j + 1):
                    lhs = site.compose(self.s[(m + 1, i)], self.s[(m, j)])
                    rhs = site.compose(self.s[(m + 1, j + 1)], self.s[(m, i)])
                    if not site.morphisms_equal(lhs, rhs):
                        raise ValueError(f"degeneracy-degeneracy identity fails ({i},{j}) at level {m}")

    def level_sizes(self):
        return [len(self.site.elements(self.levels[m])) for m in range(self.N + 1)]

    def operator(self, alpha: OrdinalMap):
        """The site morphism X_k -> X_m induced by alpha: [m] -> [k]."""
        if alpha.k > self.N or alpha.m > self.N:
            raise ValueError("operator outside truncation")
        site = self.site
        missing, duplicated = alpha.factorize()
        mor = site.identity(self.levels[alpha.k])
        level = alpha.k
        for i in missing:
            mor = site.compose(self.d[(level, i)], mor)
            level -= 1
        for j in duplicated:
            mor = site.compose(self.s[(level, j)], mor)
            level += 1
        return mor

    def key(self):
        return (
            self.N,
            tuple(self.site.elements(self.levels[m]) for m in range(self.N + 1)),
            tuple(
                sorted(
                    (k, tuple(sorted(self.site.mapping(v).items())))
                    for k, v in self.d.items()
                )
            ),
            tuple(
                sorted(
                    (k, tuple(sorted(self.site.mapping(v).items())))
                    for k, v in self.s.items()
                )
            ),
        )

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSimplicialObject)
            and self.site == other.site
            and self.levels == other.levels
            and all(
                self.site.morphisms_equal(self.d[k], other.d[k]) for k in self.d
            )
            and set(self.d) == set(other.d)
            and set(self.s) == set(other.s)
            and all(
                self.site.morphisms_equal(self.s[k], other.s[k]) for k in self.s
            )
        )

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"TruncatedSimplicialObject(N={self.N}, sizes={self.level_sizes()})"


class SimplicialMorphism:
    """A level-wise site morphism commuting with faces and degeneracies."""

    def __init__(self, source: TruncatedSimplicialObject, target: TruncatedSimplicialObject, components):
        if source.site != target.site or source.N != target.N:
            raise ValueError("simplicial morphisms need matching site and truncation")
        self.site = source.site
        self.source = source
        self.target = target
        self.components = {m: components[m] for m in range(source.N + 1)}
        self._validate()

    def _validate(self):
        site = self.site
        for m in range(self.source.N + 1):
            f = self.components[m]
            if f.source != self.source.levels[m] or f.target != self.target.levels[m]:
                raise ValueError(f"component {m} has wrong endpoints")
        for m in range(1, self.source.N + 1):
            for i in range(m + 1):
                lhs = site.compose(self.components[m - 1], self.source.d[(m, i)])
                rhs = site.compose(self.target.d[(m, i)], self.components[m])
                if not site.morphisms_equal(lhs, rhs):
                    raise ValueError(f"does not commute with face ({m},{i})")
        for m in range(self.source.N):
            for j in range(m + 1):
                lhs = site.compose(self.components[m + 1], self.source.s[(m, j)])
                rhs = site.compose(self.target.s[(m, j)], self.components[m])
                if not site.morphisms_equal(lhs, rhs):
                    raise ValueError(f"does not commute with degeneracy ({m},{j})")

    def key(self):
        return (
            self.source.key(),
            self.target.key(),
            tuple(
                (m, tuple(sorted(self.site.mapping(f).items())))
                for m, f in sorted(self.components.items())
            ),
        )

    def __eq__(self, other):
        return isinstance(other, SimplicialMorphism) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"SimplicialMorphism(levels={list(self.components)})"


def identity_morphism(X: TruncatedSimplicialObject) -> SimplicialMorphism:
    return SimplicialMorphism(
        X, X, {m: X.site.identity(X.levels[m]) for m in range(X.N + 1)}
    )


def compose_morphisms(g: SimplicialMorphism, f: SimplicialMorphism) -> SimplicialMorphism:
    if f.target is not g.source and f.target != g.source:
        raise ValueError("simplicial morphisms not composable")
    return SimplicialMorphism(
        f.source,
        g.target,
        {m: f.site.compose(g.components[m], f.components[m]) for m in f.components},
    )


# ---- Hom(S, X) as a finite limit ---------------------------------------------


def _node(m, cell):
    return f"{m}:{cell}"


def hom_into(S: FiniteSimplicialSet, X: TruncatedSimplicialObject):
    """The site object of simplicial maps S -> X, as a LimitResult.

    Sections assign to each cell of S an element of the matching level of X,
    compatibly with every face and degeneracy; labels are value tuples over the
    generating cells of S in canonical order.
    """
    if S.N != X.N:
        raise ValueError("shape and object must share truncation")
    key = ("hom", S.key())
    if key in X._hom_cache:
        return X._hom_cache[key]
    cell_order = [_node(m, c) for m in range(S.N + 1) for c in S.cells(m)]
    tops = [_node(m, c) for m, c in S.generating_cells()]
    level_obj = {
        _node(m, c): X.levels[m] for m in range(S.N + 1) for c in S.cells(m)
    }
    arrows = []
    for m in range(1, S.N + 1):
        for i in range(m + 1):
            shape_face = S.d[(m, i)]
            obj_face = X.site.mapping(X.d[(m, i)])
            for c in S.cells(m):
                arrows.append((_node(m, c), _node(m - 1, shape_face[c]), obj_face))
    for m in range(S.N):
        for j in range(m + 1):
            shape_deg = S.s[(m, j)]
            obj_deg = X.site.mapping(X.s[(m, j)])
            for c in S.cells(m):
                arrows.append((_node(m, c), _node(m + 1, shape_deg[c]), obj_deg))
    result = X.site.limit_sections(cell_order, tops, level_obj, arrows)
    X._hom_cache[key] = result
    return result


def evaluation_map(hom_result, S: FiniteSimplicialSet, m: int, cell: str, X: TruncatedSimplicialObject):
    """Hom(S, X) -> X_m, a section to its value at one cell of S."""
    node = _node(m, cell)
    mapping = {label: sec[node] for label, sec in hom_result.sections.items()}
    return X.site.morphism_from_mapping(hom_result.obj, X.levels[m], mapping)


def hom_postcompose(hom_src, hom_tgt, S: FiniteSimplicialSet, f: SimplicialMorphism):
    """Hom(S, X) -> Hom(S, Y) induced by f: X -> Y (post-composition)."""
    site = f.site
    comp = {m: site.mapping(f.components[m]) for m in range(S.N + 1)}
    mapping = {}
    for label, sec in hom_src.sections.items():
        values = []
        for node in hom_src.tops:
            m = int(node.split(":", 1)[0])
            values.append(comp[m][sec[node]])
        mapping[label] = tuple_label(values)
    return site.morphism_from_mapping(hom_src.obj, hom_tgt.obj, mapping)


def section_label(hom_result, section: dict) -> str:
    return tuple_label(section[node] for node in hom_result.tops)


def matching_map(k: int, i: int, X: TruncatedSimplicialObject):
    """The restriction X_k -> Hom(Λ^k_i, X) against the (k,i)-horn.

    Returns (morphism, hom_result)."""
    if not 1 <= k <= X.N:
        raise ValueError("matching map needs 1 <= k <= truncation")
    S = horn(k, i, X.N)
    hom = hom_into(S, X)
    site = X.site
    ops = {}
    for node in hom.tops:
        m, label = node.split(":", 1)
        alpha = S.cell_data[(int(m), label)]
        ops[node] = site.mapping(X.operator(alpha))
    mapping = {}
    for x in site.elements(X.levels[k]):
        mapping[x] = tuple_label(ops[node][x] for node in hom.tops)
    mor = site.morphism_from_mapping(X.levels[k], hom.obj, mapping)
    return mor, hom


def boundary_restriction(k: int, X: TruncatedSimplicialObject):
    """The restriction X_k -> Hom(∂Δ^k, X); for k=0 the boundary is empty."""
    site = X.site
    if k == 0:
        S = empty_shape(X.N)
        hom = hom_into(S, X)
        mapping = {x: tuple_label([]) for x in site.elements(X.levels[0])}
        return site.morphism_from_mapping(X.levels[0], hom.obj, mapping), hom
    S = boundary(k, X.N)
    hom = hom_into(S, X)
    ops = {}
    for node in hom.tops:
        m, label = node.split(":", 1)
        alpha = S.cell_data[(int(m), label)]
        ops[node] = site.mapping(X.operator(alpha))
    mapping = {}
    for x in site.elements(X.levels[k]):
        mapping[x] = tuple_label(ops[node][x] for node in hom.tops)
    return site.morphism_from_mapping(X.levels[k], hom.obj, mapping), hom


def boundary_matching_map(k: int, f: SimplicialMorphism):
    """The comparison X_k -> Hom(∂Δ^k, X) ×_{Hom(∂Δ^k, Y)} Y_k.

    For k = 0 the boundary is empty and the comparison is f_0 itself."""
    if k == 0:
        return f.components[0]
    X, Y, site = f.source, f.target, f.site
    rho_x, hom_x = boundary_restriction(k, X)
    rho_y, hom_y = boundary_restriction(k, Y)
    S = boundary(k, X.N)
    push = hom_postcompose(hom_x, hom_y, S, f)
    pb = site.pullback(push, rho_y)
    return pb.mediate(rho_x, f.components[k])


def relative_matching_map(k: int, i: int, f: SimplicialMorphism):
    """The comparison X_k -> Hom(Λ^k_i, X) ×_{Hom(Λ^k_i, Y)} Y_k."""
    X, Y, site = f.source, f.target, f.site
    lam_x, hom_x = matching_map(k, i, X)
    lam_y, hom_y = matching_map(k, i, Y)
    S = horn(k, i, X.N)
    push = hom_postcompose(hom_x, hom_y, S, f)
    pb = site.pullback(push, lam_y)
    return pb.mediate(lam_x, f.components[k])


# ---- builders -----------------------------------------------------------------


def constant_object(site, A, N: int) -> TruncatedSimplicialObject:
    ident = site.identity(A)
    return TruncatedSimplicialObject(
        site,
        N,
        {m: A for m in range(N + 1)},
        {(m, i): ident for m in range(1, N + 1) for i in range(m + 1)},
        {(m, j): ident for m in range(N) for j in range(m + 1)},
    )


def constant_objects_morphism(site, f, N: int) -> SimplicialMorphism:
    """The simplicial morphism between constant objects induced by f."""
    X = constant_object(site, f.source, N)
    Y = constant_object(site, f.target, N)
    return SimplicialMorphism(X, Y, {m: f for m in range(N + 1)})


def cech_nerve(site, f, N: int):
    """The iterated-fiber-power object of f: A -> B with its augmentation.

    Level k is the (k+1)-fold fiber power of A over B with flat tuple labels;
    faces drop a coordinate, degeneracies repeat one.  Returns (X, aug) where
    aug: X -> constant(B) is the augmentation morphism.
    """
    fm = site.mapping(f)
    levels = {}
    level_results = {}
    for k in range(N + 1):
        names = [f"p{t}" for t in range(k + 1)]
        cell_order = names + ["base"]
        level_obj = {name: f.source for name in names}
        level_obj["base"] = f.target
        arrows = [(name, "base", fm) for name in names]
        res = site.limit_sections(cell_order, names, level_obj, arrows)
        levels[k] = res.obj
        level_results[k] = res
    d, s = {}, {}
    for k in range(1, N + 1):
        names = [f"p{t}" for t in range(k + 1)]
        for i in range(k + 1):
            mapping = {}
            for label, sec in level_results[k].sections.items():
                kept = [sec[n] for t, n in enumerate(names) if t != i]
                mapping[label] = tuple_label(kept)
            d[(k, i)] = site.morphism_from_mapping(levels[k], levels[k - 1], mapping)
    for k in range(N):
        names = [f"p{t}" for t in range(k + 1)]
        for j in range(k + 1):
            mapping = {}
            for label, sec in level_results[k].sections.items():
                values = [sec[n] for n in names]
                values = values[: j + 1] + [values[j]] + values[j + 1 :]
                mapping[label] = tuple_label(values)
            s[(k, j)] = site.morphism_from_mapping(levels[k], levels[k + 1], mapping)
    X = TruncatedSimplicialObject(site, N, levels, d, s)
    B_const = constant_object(site, f.target, N)
    aug_components = {}
    for k in range(N + 1):
        mapping = {
            label: fm[sec["p0"]] for label, sec in level_results[k].sections.items()
        }
        aug_components[k] = site.morphism_from_mapping(levels[k], f.target, mapping)
    aug = SimplicialMorphism(X, B_const, aug_components)
    return X, aug


def group_nerve(site, group, N: int) -> TruncatedSimplicialObject:
    """The classifying object of a finite group: level k = k-tuples of elements,
    inner faces multiply adjacent entries, outer faces drop, degeneracies insert
    the identity."""
    from .fincat import FinSetObj

    levels = {}
    tuples = {}
    for k in range(N + 1):
        tuples[k] = list(itertools.product(group.elements, repeat=k))
        levels[k] = FinSetObj([tuple_label(t) for t in tuples[k]])
        guard_size(len(tuples[k]), "group nerve level")
    d, s = {}, {}
    for k in range(1, N + 1):
        for i in range(k + 1):
            mapping = {}
            for t in tuples[k]:
                if i == 0:
                    out = t[1:]
                elif i == k:
                    out = t[:-1]
                else:
                    out = t[: i - 1] + (group.multiply(t[i - 1], t[i]),) + t[i + 1 :]
                mapping[tuple_label(t)] = tuple_label(out)
            d[(k, i)] = site.morphism_from_mapping(levels[k], levels[k - 1], mapping)
    for k in range(N):
        for j in range(k + 1):
            mapping = {}
            for t in tuples[k]:
                out = t[:j] + (group.identity,) + t[j:]
                mapping[tuple_label(t)] = tuple_label(out)
            s[(k, j)] = site.morphism_from_mapping(levels[k], levels[k + 1], mapping)
    return TruncatedSimplicialObject(site, N, levels, d, s)


def group_nerve_morphism(site, hom_map: dict, G, H, N: int) -> SimplicialMorphism:
    """Nerve of a group homomorphism given by an element mapping table."""
    X = group_nerve(site, G, N)
    Y = group_nerve(site, H, N)
    components = {}
    for k in range(N + 1):
        mapping = {}
        for t in itertools.product(G.elements, repeat=k):
            mapping[tuple_label(t)] = tuple_label(hom_map[g] for g in t)
        components[k] = site.morphism_from_mapping(X.levels[k], Y.levels[k], mapping)
    return SimplicialMorphism(X, Y, components)


def truncate(X: TruncatedSimplicialObject, M: int) -> TruncatedSimplicialObject:
    if M > X.N:
        raise ValueError("cannot truncate upward")
    return TruncatedSimplicialObject(
        X.site,
        M,
        {m: X.levels[m] for m in range(M + 1)},
        {(m, i): X.d[(m, i)] for m in range(1, M + 1) for i in range(m + 1)},
        {(m, j): X.s[(m, j)] for m in range(M) for j in range(m + 1)},
    )


def truncate_morphism(f: SimplicialMorphism, M: int) -> SimplicialMorphism:
    return SimplicialMorphism(
        truncate(f.source, M),
        truncate(f.target, M),
        {m: f.components[m] for m in range(M + 1)},
    )


def extend_by_fillers(
    X: TruncatedSimplicialObject, n, M: int, filler_index: str = "first"
) -> TruncatedSimplicialObject:
    """Extend a certified horn-filling object upward: each new level k is the
    object of horn families in X (omitting the first or last facet, per
    ``filler_index``), with evaluation faces, the derived missing face, and
    precomposition degeneracies.

    Requires the horn-restriction maps to be covers up to the current
    truncation and isomorphisms above level n (checked; refused otherwise), so
    the missing face is produced by inverting an isomorphism.
    """
    from .grpd import is_n_groupoid

    if filler_index not in ("first", "last"):
        raise ValueError("filler_index must be 'first' or 'last'")
    cert = is_n_groupoid(X, n)
    if not cert.ok:
        raise RefusedError("extension requires a certified input object")
    current = X
    while current.N < M:
        current = _extend_one_level(current, filler_index)
    return current


def _extend_one_level(X: TruncatedSimplicialObject, filler_index: str) -> TruncatedSimplicialObject:
    site = X.site
    k = X.N + 1
    omit = 0 if filler_index == "first" else k
    S = horn(k, omit, X.N)
    hom = hom_into(S, X)
    new_level = hom.obj
    levels = dict(X.levels)
    levels[k] = new_level
    d = dict(X.d)
    s = dict(X.s)
    # Evaluation faces: the j-th face of a horn family is its value at the
    # j-th facet cell, present in the horn for every j except the omitted one.
    for j in range(k + 1):
        if j == omit:
            continue
        facet = OrdinalMap.coface(k, j)
        node = _node(k - 1, facet.label())
        mapping = {label: sec[node] for label, sec in hom.sections.items()}
        d[(k, j)] = site.morphism_from_mapping(new_level, X.levels[k - 1], mapping)
    # Missing face: its entire boundary is determined by the family, so it is
    # recovered through the inverse of the (k-1)-level horn restriction.
    lam, lam_hom = matching_map(k - 1, 0, X)
    if not site.is_iso(lam):
        raise RefusedError(
            f"cannot derive the missing face at level {k}: horn restriction at {k - 1} is not invertible"
        )
    lam_inv = {v: x for x, v in site.mapping(lam).items()}
    Sk1 = horn(k - 1, 0, X.N)
    delta_omit = OrdinalMap.coface(k, omit)
    mapping = {}
    for label, sec in hom.sections.items():
        values = []
        for node in lam_hom.tops:
            m, cell_label = node.split(":", 1)
            alpha = Sk1.cell_data[(int(m), cell_label)]
            shifted = delta_omit.compose(alpha)
            values.append(sec[_node(alpha.m, shifted.label())])
        mapping[label] = lam_inv[tuple_label(values)]
    d[(k, omit)] = site.morphism_from_mapping(new_level, X.levels[k - 1], mapping)
    # Degeneracies: precompose the family with the collapse of one direction.
    for j in range(k):
        sigma = OrdinalMap.codegeneracy(k - 1, j)
        ops = {}
        for node in hom.tops:
            m, cell_label = node.split(":", 1)
            alpha = S.cell_data[(int(m), cell_label)]
            ops[node] = site.mapping(X.operator(sigma.compose(alpha)))
        mapping = {}
        for x in site.elements(X.levels[k - 1]):
            mapping[x] = tuple_label(ops[node][x] for node in hom.tops)
        s[(k - 1, j)] = site.morphism_from_mapping(X.levels[k - 1], new_level, mapping)
    return TruncatedSimplicialObject(site, k, levels, d, s)


# ---- direct enumeration (oracle-grade, used by tests and small searches) ------


def enumerate_sections_directly(S: FiniteSimplicialSet, X: TruncatedSimplicialObject):
    """All simplicial maps S -> X by cell-by-cell assignment with immediate
    constraint checking — an independent route to hom_into for cross-checks."""
    if S.N != X.N:
        raise ValueError("shape and object must share truncation")
    site = X.site
    nodes = [(m, c) for m in range(S.N + 1) for c in S.cells(m)]
    elements = {m: site.elements(X.levels[m]) for m in range(S.N + 1)}
    d_maps = {key: site.mapping(mor) for key, mor in X.d.items()}
    s_maps = {key: site.mapping(mor) for key, mor in X.s.items()}
    sections = []

    def consistent(assign, m, c, v):
        if m > 0:
            for i in range(m + 1):
                fkey = (m - 1, S.d[(m, i)][c])
                if fkey in assign and assign[fkey] != d_maps[(m, i)][v]:
                    return False
        if m < S.N:
            for j in range(m + 1):
                ukey = (m + 1, S.s[(m, j)][c])
                if ukey in assign and assign[ukey] != s_maps[(m, j)][v]:
                    return False
        # Constraints pointing *at* (m, c) from already-assigned cells:
        if m + 1 <= S.N:
            for i in range(m + 2):
                for c2 in S.cells(m + 1):
                    if S.d[(m + 1, i)].get(c2) == c and (m + 1, c2) in assign:
                        if d_maps[(m + 1, i)][assign[(m + 1, c2)]] != v:
                            return False
        if m >= 1:
            for j in range(m):
                for c2 in S.cells(m - 1):
                    if S.s[(m - 1, j)].get(c2) == c and (m - 1, c2) in assign:
                        if s_maps[(m - 1, j)][assign[(m - 1, c2)]] != v:
                            return False
        return True

    def extend(idx, assign):
        if idx == len(nodes):
            sections.append(dict(assign))
            return
        m, c = nodes[idx]
        for v in elements[m]:
            if consistent(assign, m, c, v):
                assign[(m, c)] = v
                extend(idx + 1, assign)
                del assign[(m, c)]

    extend(0, {})
    return sections
