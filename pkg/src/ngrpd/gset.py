"""Group actions on finite sets as a site.

Two flavours of acting group share one carrier/action format:

- :class:`FiniteGroup`: explicit element list and multiplication table, with a
  chosen generating set and a word (in those generators) for each element;
- :class:`FreeGroup`: a rank and generator labels; elements are reduced words
  and are never enumerated.

A :class:`GSet` stores a finite carrier plus one permutation per *letter*
(every element for finite groups, every generator for free groups); left
actions throughout, so ``w . x`` applies the rightmost letter of ``w`` first.
:class:`GFinSetsSite` makes equivariant maps into a site whose covers are the
equivariant surjections; limits are computed on carriers with letter-wise
actions.
"""

from __future__ import annotations

import itertools

from .fincat import (
    FinSetObj,
    LimitResult,
    PullbackResult,
    Site,
    class_label,
    guard_size,
    pair_label,
    solve_sections,
    tuple_label,
)


INVERSE_SUFFIX = "^-1"


def inverse_letter(letter: str) -> str:
    if letter.endswith(INVERSE_SUFFIX):
        return letter[: -len(INVERSE_SUFFIX)]
    return letter + INVERSE_SUFFIX


class FiniteGroup:
    """A finite group given by labels and a full multiplication table.

    ``table[a][b]`` is the product a·b.  ``generators`` is a generating set and
    ``words[x]`` one expression of x as a product of generators (leftmost factor
    first), found by breadth-first search; both are used to enumerate actions
    from generator images alone.
    """

    def __init__(self, name: str, elements, table: dict, generators=None):
        self.name = name
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate group element labels")
        self.table = {a: dict(table[a]) for a in self.elements}
        self._validate_table()
        self.identity = self._find_identity()
        self.inverse = self._build_inverses()
        self.generators = tuple(generators) if generators else self.elements
        self.words = self._generator_words()

    is_free = False

    def _validate_table(self):
        elems = set(self.elements)
        for a in self.elements:
            if set(self.table[a]) != elems:
                raise ValueError(f"table row for {a!r} is not total")
            for b in self.elements:
                if self.table[a][b] not in elems:
                    raise ValueError("table value outside the group")
        for a in self.elements:
            for b in self.elements:
                for c in self.elements:
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise ValueError(f"multiplication not associative at ({a},{b},{c})")

    def _find_identity(self):
        for e in self.elements:
            if all(self.table[e][x] == x and self.table[x][e] == x for x in self.elements):
                return e
        raise ValueError("group has no identity element")

    def _build_inverses(self):
        inv = {}
        for a in self.elements:
            for b in self.elements:
                if self.table[a][b] == self.identity and self.table[b][a] == self.identity:
                    inv[a] = b
                    break
            else:
                raise ValueError(f"element {a!r} has no inverse")
        return inv

    def _generator_words(self):
        words = {self.identity: ()}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = self.table[x][g]
                    if y not in words:
                        words[y] = words[x] + (g,)
                        nxt.append(y)
            frontier = nxt
        if len(words) != len(self.elements):
            raise ValueError("declared generators do not generate the group")
        return words

    def multiply(self, a, b):
        return self.table[a][b]

    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroup)
            and self.elements == other.elements
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.elements, tuple(sorted((a, b, c) for a, row in self.table.items() for b, c in row.items()))))

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={len(self.elements)})"


class FreeGroup:
    """A free group of finite rank; elements are reduced words over the
    generator labels and their formal inverses and are never enumerated."""

    def __init__(self, rank: int, generator_labels=None):
        if rank < 0:
            raise ValueError("rank must be nonnegative")
        self.rank = rank
        if generator_labels is None:
            generator_labels = tuple(chr(ord("a") + i) for i in range(rank))
        self.generators = tuple(generator_labels)
        if len(self.generators) != rank or len(set(self.generators)) != rank:
            raise ValueError("need one distinct label per generator")
        self.name = f"free({','.join(self.generators)})"

    is_free = True

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and self.generators == other.generators

    def __hash__(self):
        return hash(("free", self.generators))

    def __repr__(self):
        return f"FreeGroup(rank={self.rank})"


def reduce_word(word) -> tuple:
    """Cancel adjacent inverse letters, e.g. (a, a^-1) -> ()."""
    out = []
    for letter in word:
        if out and out[-1] == inverse_letter(letter):
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


class GSet:
    """A finite carrier with one permutation/function per acting letter.

    For a finite group the letters are all group elements and each must act;
    for a free group the letters are the generators and each must act by a
    permutation (so inverse letters act by the inverse permutation).
    Equality is bit-level: same group, same carrier labels, same action dicts.
    """

    def __init__(self, group, carrier, action: dict):
        self.group = group
        self.carrier = carrier if isinstance(carrier, FinSetObj) else FinSetObj(carrier)
        letters = group.generators if group.is_free else group.elements
        if set(action) != set(letters):
            raise ValueError("action must assign exactly the acting letters")
        pts = set(self.carrier.elements)
        self.action = {}
        for letter in letters:
            perm = dict(action[letter])
            if set(perm) != pts or not set(perm.values()) <= pts:
                raise ValueError(f"letter {letter!r} does not act on the carrier")
            self.action[letter] = {x: perm[x] for x in self.carrier.elements}
        self._validate()

    def _validate(self):
        g = self.group
        if g.is_free:
            for letter, perm in self.action.items():
                if len(set(perm.values())) != len(perm):
                    raise ValueError(f"generator {letter!r} must act bijectively")
        else:
            ident = self.action[g.identity]
            if any(ident[x] != x for x in self.carrier.elements):
                raise ValueError("identity element must act trivially")
            for a in g.elements:
                for b in g.elements:
                    ab = g.multiply(a, b)
                    for x in self.carrier.elements:
                        if self.action[a][self.action[b][x]] != self.action[ab][x]:
                            raise ValueError(
                                f"not a left action: {a!r}.({b!r}.{x!r}) != ({a!r}{b!r}).{x!r}"
                            )

    def letter_perm(self, letter):
        if letter in self.action:
            return self.action[letter]
        base = inverse_letter(letter)
        if self.group.is_free and base in self.action:
            return {v: k for k, v in self.action[base].items()}
        raise KeyError(f"unknown acting letter {letter!r}")

    def act_word(self, word, x):
        """Apply a word (leftmost letter outermost): w.x for w = l1...lk is
        l1.(l2.(...lk.x))."""
        for letter in reversed(tuple(word)):
            x = self.letter_perm(letter)[x]
        return x

    def act(self, element, x):
        if self.group.is_free:
            return self.act_word(element if not isinstance(element, str) else (element,), x)
        return self.action[element][x]

    def orbits(self):
        """Orbit partition, each orbit sorted, orbits ordered by least element."""
        letters = list(self.group.generators if self.group.is_free else self.group.elements)
        if self.group.is_free:
            letters += [inverse_letter(l) for l in self.group.generators]
        seen = set()
        orbits = []
        for x in self.carrier.elements:
            if x in seen:
                continue
            orbit = {x}
            frontier = [x]
            while frontier:
                y = frontier.pop()
                for letter in letters:
                    z = self.letter_perm(letter)[y]
                    if z not in orbit:
                        orbit.add(z)
                        frontier.append(z)
            seen |= orbit
            orbits.append(tuple(sorted(orbit)))
        return orbits

    def key(self):
        return (
            self.carrier.elements,
            tuple((l, tuple(self.action[l].items())) for l in sorted(self.action)),
        )

    def __eq__(self, other):
        return (
            isinstance(other, GSet)
            and self.group == other.group
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.group, self.key()))

    def __repr__(self):
        return f"GSet({self.group.name}, {list(self.carrier.elements)!r})"


class EqMap:
    """An equivariant map between G-sets (equivariance validated on letters)."""

    __slots__ = ("source", "target", "mapping")

    def __init__(self, source: GSet, target: GSet, mapping: dict):
        if source.group != target.group:
            raise ValueError("equivariant maps need a common acting group")
        if set(mapping) != set(source.carrier.elements):
            raise ValueError("mapping must be total on the source carrier")
        tgt = set(target.carrier.elements)
        letters = (
            source.group.generators if source.group.is_free else source.group.elements
        )
        for x, y in mapping.items():
            if y not in tgt:
                raise ValueError(f"mapping sends {x!r} outside the target")
        for letter in letters:
            ps, pt = source.action[letter], target.action[letter]
            for x in source.carrier.elements:
                if mapping[ps[x]] != pt[mapping[x]]:
                    raise ValueError(
                        f"not equivariant: letter {letter!r} disagrees at {x!r}"
                    )
        self.source = source
        self.target = target
        self.mapping = {x: mapping[x] for x in source.carrier.elements}

    def key(self):
        return (self.source.key(), self.target.key(), tuple(self.mapping.items()))

    def __eq__(self, other):
        return isinstance(other, EqMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"EqMap({self.mapping!r})"


class GFinSetsSite(Site):
    """G-sets and equivariant maps; covers are the equivariant surjections."""

    def __init__(self, group):
        self.group = group

    kind = "gfinsets"

    def descriptor(self) -> dict:
        return {"kind": self.kind, "group": self.group.name}

    def __eq__(self, other):
        return isinstance(other, GFinSetsSite) and self.group == other.group

    def __hash__(self):
        return hash((self.kind, self.group))

    def letters(self):
        return self.group.generators if self.group.is_free else self.group.elements

    def elements(self, A):
        return A.carrier.elements

    def mapping(self, f):
        return f.mapping

    def morphism_from_mapping(self, A, B, mapping):
        return EqMap(A, B, mapping)

    def terminal(self):
        star = FinSetObj(["*"])
        return GSet(self.group, star, {l: {"*": "*"} for l in self.letters()})

    def terminal_map(self, A):
        return EqMap(A, self.terminal(), {x: "*" for x in A.carrier.elements})

    def is_cover(self, f):
        return set(f.mapping.values()) == set(f.target.carrier.elements)

    def all_morphisms(self, A, B):
        """All equivariant maps, by choosing an image for one representative per
        orbit and propagating along generator letters."""
        letters = list(self.letters())
        if self.group.is_free:
            letters += [inverse_letter(l) for l in self.group.generators]
        reps = [orbit[0] for orbit in A.orbits()]
        if reps and not B.carrier.elements:
            return []
        size_bound = max(len(B.carrier.elements), 1) ** max(len(reps), 1)
        guard_size(size_bound, "equivariant map enumeration")
        results = []

        def propagate(mapping, rep, y):
            mapping[rep] = y
            frontier = [rep]
            while frontier:
                x = frontier.pop()
                for letter in letters:
                    x2 = A.letter_perm(letter)[x]
                    y2 = B.letter_perm(letter)[mapping[x]]
                    if x2 in mapping:
                        if mapping[x2] != y2:
                            return False
                    else:
                        mapping[x2] = y2
                        frontier.append(x2)
            return True

        def extend(i, mapping):
            if i == len(reps):
                results.append(EqMap(A, B, mapping))
                return
            rep = reps[i]
            if rep in mapping:
                extend(i + 1, mapping)
                return
            for y in B.carrier.elements:
                trial = dict(mapping)
                if propagate(trial, rep, y):
                    extend(i + 1, trial)

        extend(0, {})
        return results

    def _apex_action(self, pairs, A: GSet, B: GSet):
        action = {}
        for letter in self.letters():
            pa, pb = A.action[letter], B.action[letter]
            perm = {}
            for lab, (a, b) in pairs.items():
                perm[lab] = pair_label(pa[a], pb[b])
            action[letter] = perm
        return action

    def pullback(self, f, g):
        if f.target != g.target:
            raise ValueError("pullback needs a shared target")
        pairs = {}
        for a in f.source.carrier.elements:
            for b in g.source.carrier.elements:
                if f.mapping[a] == g.mapping[b]:
                    pairs[pair_label(a, b)] = (a, b)
        guard_size(len(pairs), "pullback apex")
        carrier = FinSetObj(pairs.keys())
        apex = GSet(self.group, carrier, self._apex_action(pairs, f.source, g.source))
        p1 = EqMap(apex, f.source, {lab: ab[0] for lab, ab in pairs.items()})
        p2 = EqMap(apex, g.source, {lab: ab[1] for lab, ab in pairs.items()})
        return PullbackResult(self, f, g, apex, p1, p2, pairs)

    def equalizer(self, f, g):
        if f.source != g.source or f.target != g.target:
            raise ValueError("equalizer needs a parallel pair")
        kept = [x for x in f.source.carrier.elements if f.mapping[x] == g.mapping[x]]
        kept_set = set(kept)
        action = {}
        for letter in self.letters():
            perm = f.source.action[letter]
            for x in kept:
                if perm[x] not in kept_set:
                    raise AssertionError("equalizer subset is not action-closed")
            action[letter] = {x: perm[x] for x in kept}
        sub = GSet(self.group, FinSetObj(kept), action)
        return sub, EqMap(sub, f.source, {x: x for x in kept})

    def coequalizer(self, f, g):
        if f.source != g.source or f.target != g.target:
            raise ValueError("coequalizer needs a parallel pair")
        tgt = f.target
        parent = {y: y for y in tgt.carrier.elements}

        def find(y):
            while parent[y] != y:
                parent[y] = parent[parent[y]]
                y = parent[y]
            return y

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        for x in f.source.carrier.elements:
            union(f.mapping[x], g.mapping[x])
        # Close under the action so the quotient inherits one.
        changed = True
        while changed:
            changed = False
            for letter in self.letters():
                perm = tgt.action[letter]
                for a in tgt.carrier.elements:
                    for b in tgt.carrier.elements:
                        if find(a) == find(b) and find(perm[a]) != find(perm[b]):
                            union(perm[a], perm[b])
                            changed = True
        classes = {}
        for y in tgt.carrier.elements:
            classes.setdefault(find(y), []).append(y)
        labels = {root: class_label(members) for root, members in classes.items()}
        carrier = FinSetObj(labels.values())
        action = {}
        for letter in self.letters():
            perm = tgt.action[letter]
            action[letter] = {
                labels[root]: labels[find(perm[members[0]])]
                for root, members in classes.items()
            }
        q = GSet(self.group, carrier, action)
        proj = EqMap(tgt, q, {y: labels[find(y)] for y in tgt.carrier.elements})
        return q, proj

    def limit_sections(self, cell_order, tops, level_obj, arrows):
        candidates = {c: level_obj[c].carrier.elements for c in tops}
        sections = solve_sections(cell_order, tops, candidates, arrows)
        by_label = {tuple_label([s[c] for c in tops]): s for s in sections}
        carrier = FinSetObj(by_label.keys())
        action = {}
        for letter in self.letters():
            perm = {}
            for lab, s in by_label.items():
                moved = [level_obj[c].action[letter][s[c]] for c in tops]
                perm[lab] = tuple_label(moved)
            action[letter] = perm
        for letter, perm in action.items():
            if not set(perm.values()) <= set(by_label):
                raise AssertionError("section set is not action-closed")
        obj = GSet(self.group, carrier, action)
        return LimitResult(obj, tops, by_label)


# ---- group constructors -----------------------------------------------------


def trivial_group() -> FiniteGroup:
    return FiniteGroup("1", ["e"], {"e": {"e": "e"}}, generators=["e"])


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group needs n >= 1")
    elems = [str(i) for i in range(n)]
    table = {a: {b: str((int(a) + int(b)) % n) for b in elems} for a in elems}
    gens = ["1"] if n > 1 else ["0"]
    return FiniteGroup(f"Z{n}", elems, table, generators=gens)


def _perm_label(perm_tuple):
    return "".join(str(i) for i in perm_tuple)


def symmetric_group(n: int) -> FiniteGroup:
    """Permutations of {0..n-1} in one-line notation; (p·q)(i) = p(q(i))."""
    if n < 1:
        raise ValueError("symmetric group needs n >= 1")
    perms = list(itertools.permutations(range(n)))
    elems = [_perm_label(p) for p in perms]
    by_label = {_perm_label(p): p for p in perms}
    table = {}
    for a in elems:
        pa = by_label[a]
        table[a] = {}
        for b in elems:
            pb = by_label[b]
            table[a][b] = _perm_label(tuple(pa[pb[i]] for i in range(n)))
    if n == 1:
        gens = elems
    elif n == 2:
        gens = [_perm_label((1, 0))]
    else:
        cycle = tuple(list(range(1, n)) + [0])
        gens = [_perm_label((1, 0) + tuple(range(2, n))), _perm_label(cycle)]
    return FiniteGroup(f"S{n}", elems, table, generators=gens)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    elems = [pair_label(a, b) for a in G.elements for b in H.elements]
    table = {}
    for a1 in G.elements:
        for b1 in H.elements:
            row = {}
            for a2 in G.elements:
                for b2 in H.elements:
                    row[pair_label(a2, b2)] = pair_label(
                        G.multiply(a1, a2), H.multiply(b1, b2)
                    )
            table[pair_label(a1, b1)] = row
    gens = [pair_label(g, H.identity) for g in G.generators] + [
        pair_label(G.identity, h) for h in H.generators
    ]
    return FiniteGroup(f"{G.name}x{H.name}", elems, table, generators=gens)


def klein_four() -> FiniteGroup:
    return direct_product(cyclic_group(2), cyclic_group(2))


def groups_of_order_up_to(n: int):
    """One group per isomorphism class of order <= n (n <= 7)."""
    if n > 7:
        raise ValueError("only orders up to 7 are catalogued")
    catalogue = [
        trivial_group(),
        cyclic_group(2),
        cyclic_group(3),
        cyclic_group(4),
        klein_four(),
        cyclic_group(5),
        cyclic_group(6),
        symmetric_group(3),
        cyclic_group(7),
    ]
    return [G for G in catalogue if len(G.elements) <= n]


# ---- action builders ----------------------------------------------------------


def action_from_generator_perms(group: FiniteGroup, carrier, gen_perms: dict) -> GSet:
    """Extend permutations of the generators to the whole group via its
    generator words; the GSet constructor then validates the homomorphism law."""
    carrier = carrier if isinstance(carrier, FinSetObj) else FinSetObj(carrier)
    action = {}
    for x, word in group.words.items():
        perm = {p: p for p in carrier.elements}
        for letter in reversed(word):
            g = gen_perms[letter]
            perm = {p: g[perm[p]] for p in carrier.elements}
        action[x] = perm
    return GSet(group, carrier, action)


def free_group_action(rank: int, fiber, perms: dict, generator_labels=None) -> GSet:
    group = FreeGroup(rank, generator_labels)
    return GSet(group, FinSetObj(fiber), {g: dict(perms[g]) for g in group.generators})


def trivial_action(group, carrier) -> GSet:
    carrier = carrier if isinstance(carrier, FinSetObj) else FinSetObj(carrier)
    letters = group.generators if group.is_free else group.elements
    return GSet(group, carrier, {l: {x: x for x in carrier.elements} for l in letters})


def all_actions_on_carrier(group, carrier) -> list:
    """Every action of the group on the given carrier, via generator images."""
    carrier = carrier if isinstance(carrier, FinSetObj) else FinSetObj(carrier)
    pts = carrier.elements
    perms = [dict(zip(pts, img)) for img in itertools.permutations(pts)]
    gens = group.generators
    guard_size(len(perms) ** len(gens), "action enumeration")
    actions = []
    for images in itertools.product(perms, repeat=len(gens)):
        gen_perms = dict(zip(gens, images))
        try:
            if group.is_free:
                gset = GSet(group, carrier, gen_perms)
            else:
                gset = action_from_generator_perms(group, carrier, gen_perms)
        except ValueError:
            continue
        actions.append(gset)
    return actions


def actions_up_to_iso(group, max_size: int) -> list:
    """One action per isomorphism class on carriers of size 1..max_size."""
    site = GFinSetsSite(group)
    reps = []
    for k in range(1, max_size + 1):
        carrier = FinSetObj([f"p{i}" for i in range(1, k + 1)])
        for gset in all_actions_on_carrier(group, carrier):
            if any(
                len(r.carrier) == k
                and any(site.is_iso(m) for m in site.all_morphisms(r, gset))
                for r in reps
            ):
                continue
            reps.append(gset)
    return reps


def gset_probe(group, max_size: int = 4):
    """All equivariant maps between one representative per action iso class."""
    from .fincat import Probe

    site = GFinSetsSite(group)
    objects = actions_up_to_iso(group, max_size)
    morphisms = []
    for A in objects:
        for B in objects:
            morphisms.extend(site.all_morphisms(A, B))
    return Probe(objects, morphisms, name=f"{group.name}-sets<={max_size}")
