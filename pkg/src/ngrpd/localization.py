"""Inverting marked morphisms: zigzags, hammocks, spans, and their components.

A finite category comes with three marked classes of morphisms:

- ``W`` — the morphisms to be inverted; zigzags may traverse them backward;
- ``H`` — a smaller backward class (here: hypercovers) that is enough for a
  one-step backward-then-forward presentation;
- ``F`` — fibrations, carried along for audits.

Two presentations of the localized mapping space between objects ``X`` and
``Y`` are built side by side:

- the *hammock* model: zigzags ``X <- . -> . <- ... -> Y`` with backward
  steps in ``W``, organized into grids of parallel zigzags joined by
  ``W``-verticals with commuting squares;
- the *span* model: single spans ``X <-H- Z -> Y`` organized into the nerve
  of the span category.

Both models are enumerated up to an explicit size bound, their path
components are computed, and :func:`compare_localization_models` reports
whether the components agree and whether the bounded answer has stabilized.
The comparison is deliberately pi0-only; higher simplices are emitted for
inspection, never judged.

:func:`localize_groupoid_category` manufactures such marked categories out
of the groupoid engines: objects are certified truncated groupoid objects
over a site, W = verified weak equivalences, F = fibrations, H = hypercovers
observed through the truncation window.  Choosing a smaller cover class for
the site shrinks H; :func:`compare_cover_class_marks` exhibits that
difference with a witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fincat import FinSetObj, FinSetsSite, guard_size, pair_label, tuple_label
from .galois import CoverMorphism, GraphCovSite, cover_from_action, enumerate_covers, figure_eight
from .grpd import (
    INF,
    enumerate_simplicial_morphisms,
    enumerate_simplicial_objects,
    is_fibration,
    is_hypercover,
    is_n_groupoid,
    is_weak_equivalence,
)
from .gset import GFinSetsSite, actions_up_to_iso, trivial_action
from .simp import FiniteSimplicialSet, cech_nerve, compose_morphisms, constant_object

FORWARD = "fwd"
BACKWARD = "bwd"


def step_label(step) -> str:
    """``>name`` for a forward step, ``<name`` for a backward one."""
    direction, name = step
    return (">" if direction == FORWARD else "<") + name


def steps_label(steps) -> str:
    return ";".join(step_label(st) for st in steps) if steps else "[]"


# ---- marked relative categories -----------------------------------------------


class MarkedRelCategory:
    """A finite category with three marked classes of morphisms.

    ``morphisms`` maps each name to its ``(source, target)`` pair, and
    ``compose[f][g]`` names the composite *f followed by g* — defined exactly
    when ``target(f) == source(g)``.  The constructor checks shapes (a total,
    endpoint-correct compose table on composable pairs; marks naming real
    morphisms) and locates the identity of each object through the unit laws.
    Deeper laws — associativity, unit laws, closure properties of the marks —
    are the business of :func:`validate_marked_category`, which reports
    witnesses instead of raising; pass ``identities`` explicitly to build a
    category whose unit laws are meant to fail.
    """

    def __init__(self, objects, morphisms, compose, W=(), H=(), F=(), identities=None, name=""):
        self.name = name
        self.objects = tuple(sorted(objects))
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate object names")
        objset = set(self.objects)
        for X in self.objects:
            if not isinstance(X, str):
                raise ValueError(f"object names must be strings, got {X!r}")
        self.morphisms = {}
        for nm in sorted(morphisms):
            if not isinstance(nm, str):
                raise ValueError(f"morphism names must be strings, got {nm!r}")
            src, tgt = morphisms[nm]
            if src not in objset or tgt not in objset:
                raise ValueError(f"morphism {nm!r} has an endpoint outside the object set")
            self.morphisms[nm] = (src, tgt)
        morset = set(self.morphisms)

        for f, row in compose.items():
            if f not in morset:
                raise ValueError(f"compose table mentions unknown morphism {f!r}")
            for g in row:
                if g not in morset:
                    raise ValueError(f"compose table mentions unknown morphism {g!r}")
        self.compose = {f: dict(compose.get(f, {})) for f in self.morphisms}
        for f, (fs, ft) in self.morphisms.items():
            for g, (gs, gt) in self.morphisms.items():
                if ft == gs:
                    h = self.compose[f].get(g)
                    if h is None:
                        raise ValueError(f"compose table misses the composable pair ({f!r}, {g!r})")
                    if h not in morset:
                        raise ValueError(f"composite of ({f!r}, {g!r}) is not a morphism: {h!r}")
                    if self.morphisms[h] != (fs, gt):
                        raise ValueError(f"composite {h!r} of ({f!r}, {g!r}) has the wrong endpoints")
                elif g in self.compose[f]:
                    raise ValueError(f"compose table defines the non-composable pair ({f!r}, {g!r})")

        for mark, members in (("W", W), ("H", H), ("F", F)):
            for nm in members:
                if nm not in morset:
                    raise ValueError(f"{mark} marks unknown morphism {nm!r}")
        self.W = frozenset(W)
        self.H = frozenset(H)
        self.F = frozenset(F)

        if identities is None:
            identities = self._detect_identities()
        else:
            identities = dict(identities)
            if set(identities) != objset:
                raise ValueError("identities must be given for every object")
            for X, nm in identities.items():
                if nm not in morset or self.morphisms[nm] != (X, X):
                    raise ValueError(f"{nm!r} cannot be the identity of {X!r}")
        self.identities = {X: identities[X] for X in self.objects}
        self._id_set = frozenset(self.identities.values())
        self._into = {
            X: tuple(sorted(nm for nm, (_, t) in self.morphisms.items() if t == X))
            for X in self.objects
        }
        self._out = {
            X: tuple(sorted(nm for nm, (s, _) in self.morphisms.items() if s == X))
            for X in self.objects
        }

    def _detect_identities(self):
        found = {}
        for X in self.objects:
            candidates = []
            for m, (s, t) in sorted(self.morphisms.items()):
                if (s, t) != (X, X):
                    continue
                absorbs_after = all(
                    self.compose[m].get(g) == g
                    for g, (gs, _) in self.morphisms.items()
                    if gs == X
                )
                absorbs_before = all(
                    self.compose[f].get(m) == f
                    for f, (_, ft) in self.morphisms.items()
                    if ft == X
                )
                if absorbs_after and absorbs_before:
                    candidates.append(m)
            if not candidates:
                raise ValueError(
                    f"no identity morphism found for object {X!r}; pass identities explicitly"
                )
            found[X] = candidates[0]
        return found

    # ---- accessors -----------------------------------------------------------
    def source(self, name: str) -> str:
        return self.morphisms[name][0]

    def target(self, name: str) -> str:
        return self.morphisms[name][1]

    def identity_of(self, X: str) -> str:
        return self.identities[X]

    def is_identity(self, name: str) -> bool:
        return name in self._id_set

    def hom(self, X: str, Y: str) -> tuple:
        return tuple(nm for nm in self._out[X] if self.morphisms[nm][1] == Y)

    def morphisms_out_of(self, X: str) -> tuple:
        return self._out[X]

    def morphisms_into(self, X: str) -> tuple:
        return self._into[X]

    def composite(self, f: str, g: str) -> str:
        """The name of the composite *f followed by g*."""
        return self.compose[f][g]

    def is_iso(self, f: str) -> bool:
        src, tgt = self.morphisms[f]
        return any(
            self.compose[f][g] == self.identities[src]
            and self.compose[g][f] == self.identities[tgt]
            for g in self.hom(tgt, src)
        )

    # ---- serialization ---------------------------------------------------------
    def as_dict(self) -> dict:
        return {
            "objects": list(self.objects),
            "morphisms": [
                {"name": nm, "source": s, "target": t}
                for nm, (s, t) in sorted(self.morphisms.items())
            ],
            "compose": {f: dict(sorted(row.items())) for f, row in sorted(self.compose.items()) if row},
            "W": sorted(self.W),
            "H": sorted(self.H),
            "F": sorted(self.F),
        }

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "MarkedRelCategory":
        morphisms = {rec["name"]: (rec["source"], rec["target"]) for rec in data["morphisms"]}
        return cls(
            data["objects"],
            morphisms,
            {f: dict(row) for f, row in data.get("compose", {}).items()},
            W=data.get("W", ()),
            H=data.get("H", ()),
            F=data.get("F", ()),
            name=name or data.get("name", ""),
        )

    def with_marks(self, W=None, H=None, F=None) -> "MarkedRelCategory":
        """A copy of this category with some of the mark classes replaced."""
        return MarkedRelCategory(
            self.objects,
            dict(self.morphisms),
            {f: dict(row) for f, row in self.compose.items()},
            W=self.W if W is None else W,
            H=self.H if H is None else H,
            F=self.F if F is None else F,
            identities=dict(self.identities),
            name=self.name,
        )

    def __repr__(self):
        return (
            f"MarkedRelCategory({len(self.objects)} objects, {len(self.morphisms)} morphisms, "
            f"|W|={len(self.W)}, |H|={len(self.H)}, |F|={len(self.F)})"
        )


def validate_marked_category(C: MarkedRelCategory) -> dict:
    """Re-check the category laws and the closure properties of the marks.

    Returns a report with explicit witnesses rather than raising: unit laws,
    associativity, every isomorphism marked in W, two-out-of-three for W, and
    H contained in both W and F.
    """
    identity_failures = []
    for X in C.objects:
        e = C.identity_of(X)
        for g in C.morphisms_out_of(X):
            got = C.composite(e, g)
            if got != g:
                identity_failures.append({"identity": e, "morphism": g, "side": "before", "got": got})
        for f in C.morphisms_into(X):
            got = C.composite(f, e)
            if got != f:
                identity_failures.append({"identity": e, "morphism": f, "side": "after", "got": got})

    assoc_failures = []
    for f in sorted(C.morphisms):
        for g in C.morphisms_out_of(C.target(f)):
            for h in C.morphisms_out_of(C.target(g)):
                left = C.composite(C.composite(f, g), h)
                right = C.composite(f, C.composite(g, h))
                if left != right:
                    assoc_failures.append(
                        {"first": f, "second": g, "third": h, "left": left, "right": right}
                    )

    iso_failures = sorted(nm for nm in C.morphisms if C.is_iso(nm) and nm not in C.W)

    two_of_three_failures = []
    for f in sorted(C.morphisms):
        for g in C.morphisms_out_of(C.target(f)):
            c = C.composite(f, g)
            flags = (f in C.W, g in C.W, c in C.W)
            if sum(flags) == 2:
                missing = ("first", "second", "composite")[flags.index(False)]
                two_of_three_failures.append(
                    {"first": f, "second": g, "composite": c, "not_in_W": missing}
                )

    containment_failures = sorted(nm for nm in C.H if nm not in C.W or nm not in C.F)

    checks = {
        "identity_laws": {"ok": not identity_failures, "failures": identity_failures},
        "associativity": {"ok": not assoc_failures, "failures": assoc_failures},
        "isomorphisms_marked": {"ok": not iso_failures, "failures": iso_failures},
        "two_out_of_three": {"ok": not two_of_three_failures, "failures": two_of_three_failures},
        "H_inside_W_and_F": {"ok": not containment_failures, "failures": containment_failures},
    }
    return {
        "name": C.name,
        "counts": {
            "objects": len(C.objects),
            "morphisms": len(C.morphisms),
            "W": len(C.W),
            "H": len(C.H),
            "F": len(C.F),
        },
        "checks": checks,
        "ok": all(entry["ok"] for entry in checks.values()),
    }


# ---- zigzags ------------------------------------------------------------------


class Zigzag:
    """A chain ``X <- . -> . ... -> Y`` of steps, each a morphism traversed
    forward or backward; every backward step must be marked in W (it stands in
    for a formal inverse)."""

    __slots__ = ("category", "source", "target", "steps")

    def __init__(self, category: MarkedRelCategory, source: str, target: str, steps):
        if source not in set(category.objects) or target not in set(category.objects):
            raise ValueError("zigzag endpoints must be objects of the category")
        self.category = category
        self.source = source
        self.target = target
        self.steps = tuple((direction, name) for direction, name in steps)
        cur = source
        for k, (direction, name) in enumerate(self.steps):
            if name not in category.morphisms:
                raise ValueError(f"step {k} uses unknown morphism {name!r}")
            s, t = category.morphisms[name]
            if direction == FORWARD:
                if s != cur:
                    raise ValueError(f"step {k} ({name!r} forward) does not start at {cur!r}")
                cur = t
            elif direction == BACKWARD:
                if name not in category.W:
                    raise ValueError(f"step {k} traverses {name!r} backward, but it is not in W")
                if t != cur:
                    raise ValueError(f"step {k} ({name!r} backward) does not start at {cur!r}")
                cur = s
            else:
                raise ValueError(f"step {k} has unknown direction {direction!r}")
        if cur != target:
            raise ValueError(f"zigzag ends at {cur!r}, not at {target!r}")

    def __len__(self):
        return len(self.steps)

    @property
    def label(self) -> str:
        return steps_label(self.steps)

    def vertices(self) -> tuple:
        """The objects visited, from source to target (length + 1 entries)."""
        out = [self.source]
        for direction, name in self.steps:
            s, t = self.category.morphisms[name]
            out.append(t if direction == FORWARD else s)
        return tuple(out)

    def direction_word(self) -> str:
        return "".join(">" if direction == FORWARD else "<" for direction, _ in self.steps)

    def is_reduced(self) -> bool:
        """No identity steps, and directions strictly alternate."""
        if any(self.category.is_identity(name) for _, name in self.steps):
            return False
        return all(a[0] != b[0] for a, b in zip(self.steps, self.steps[1:]))

    def key(self):
        return (self.source, self.target, self.steps)

    def __eq__(self, other):
        return isinstance(other, Zigzag) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Zigzag({self.source!r} -> {self.target!r}: {self.label})"


def shrinking_moves(C: MarkedRelCategory, steps) -> list:
    """Every step tuple reachable by one length-decreasing rewrite.

    The rewrites: drop an identity step; fuse two adjacent steps pointing the
    same way into their composite (backward fusion needs the composite in W);
    cancel an adjacent back-and-forth along a single W-morphism.  Each
    length-*increasing* identification is one of these read from its longer
    end, so a bounded component search only ever needs the shrinking ones.
    """
    steps = tuple(steps)
    out = []
    for k, (_, name) in enumerate(steps):
        if C.is_identity(name):
            out.append(steps[:k] + steps[k + 1:])
    for k in range(len(steps) - 1):
        (d1, n1), (d2, n2) = steps[k], steps[k + 1]
        if d1 == d2 == FORWARD:
            out.append(steps[:k] + ((FORWARD, C.composite(n1, n2)),) + steps[k + 2:])
        elif d1 == d2 == BACKWARD:
            fused = C.composite(n2, n1)
            if fused in C.W:
                out.append(steps[:k] + ((BACKWARD, fused),) + steps[k + 2:])
        elif n1 == n2 and n1 in C.W:
            out.append(steps[:k] + steps[k + 2:])
    return out


def reduce_zigzag(z: Zigzag) -> Zigzag:
    """Apply shrinking rewrites, first applicable one first, until none applies."""
    steps = z.steps
    while True:
        options = shrinking_moves(z.category, steps)
        if not options:
            return Zigzag(z.category, z.source, z.target, steps)
        steps = options[0]


def enumerate_zigzags(C: MarkedRelCategory, X: str, Y: str, max_length: int, reduced: bool = True) -> list:
    """All zigzags from X to Y with at most ``max_length`` steps, sorted by
    (length, label).

    With ``reduced=True`` (the default) only reduced zigzags are produced: no
    identity steps and strictly alternating directions.  ``reduced=False``
    enumerates every zigzag within the bound — the vertex set that
    :func:`pi0_mapping_space` glues.
    """
    if X not in set(C.objects) or Y not in set(C.objects):
        raise ValueError("zigzag endpoints must be objects of the category")
    if max_length < 0:
        raise ValueError("max_length must be nonnegative")
    found = []
    explored = 0
    stack = [(X, ())]
    while stack:
        cur, steps = stack.pop()
        if cur == Y:
            found.append(steps)
        if len(steps) >= max_length:
            continue
        last_direction = steps[-1][0] if steps else None
        options = [(FORWARD, name, C.target(name)) for name in C.morphisms_out_of(cur)]
        options.extend(
            (BACKWARD, name, C.source(name))
            for name in C.morphisms_into(cur)
            if name in C.W
        )
        for direction, name, nxt in options:
            if reduced and (C.is_identity(name) or direction == last_direction):
                continue
            stack.append((nxt, steps + ((direction, name),)))
            explored += 1
            guard_size(explored, "zigzag enumeration")
    zigzags = [Zigzag(C, X, Y, steps) for steps in found]
    zigzags.sort(key=lambda z: (len(z.steps), z.label))
    return zigzags


# ---- hammocks -----------------------------------------------------------------


def hammock_problems(C: MarkedRelCategory, X: str, Y: str, rows, verticals) -> list:
    """Everything wrong with the proposed hammock data, as witness records.

    Checked in order (later checks assume earlier ones passed): every row is a
    reduced zigzag X -> Y of one shared width and direction word; the vertical
    tuples have one entry per interior column and one tuple per gap between
    rows; each vertical is a W-morphism joining the column vertices of
    consecutive rows; every square commutes, with the two pinned end columns
    read as identities.
    """
    rows = tuple(tuple(row) for row in rows)
    verticals = tuple(tuple(col) for col in verticals)
    if not rows:
        return [{"kind": "shape", "detail": "a hammock needs at least one row"}]

    problems = []
    width = len(rows[0])
    zigzag_rows = []
    for r, row in enumerate(rows):
        if len(row) != width:
            problems.append(
                {"kind": "shape", "row": r, "detail": f"row {r} has width {len(row)}, expected {width}"}
            )
            continue
        try:
            zigzag_rows.append(Zigzag(C, X, Y, row))
        except ValueError as err:
            problems.append({"kind": "row", "row": r, "detail": str(err)})
    if problems:
        return problems

    word = zigzag_rows[0].direction_word()
    for r, z in enumerate(zigzag_rows):
        if z.direction_word() != word:
            problems.append({"kind": "row", "row": r, "detail": "direction word differs from row 0"})
        if not z.is_reduced():
            problems.append({"kind": "row", "row": r, "detail": "row is not reduced"})
    if problems:
        return problems

    gaps = len(rows) - 1
    interior = max(width - 1, 0)
    if len(verticals) != gaps:
        return [{"kind": "shape", "detail": f"expected {gaps} vertical tuples, got {len(verticals)}"}]
    for i, col in enumerate(verticals):
        if len(col) != interior:
            problems.append(
                {"kind": "shape", "gap": i, "detail": f"vertical tuple {i} has {len(col)} entries, expected {interior}"}
            )
    if problems:
        return problems

    columns = [z.vertices() for z in zigzag_rows]
    for i, col in enumerate(verticals):
        for j, name in enumerate(col, start=1):
            if name not in C.morphisms:
                problems.append({"kind": "vertical", "gap": i, "column": j, "detail": f"unknown morphism {name!r}"})
                continue
            want = (columns[i][j], columns[i + 1][j])
            if C.morphisms[name] != want:
                problems.append(
                    {"kind": "vertical", "gap": i, "column": j,
                     "detail": f"{name!r} does not join {want[0]!r} to {want[1]!r}"}
                )
            if name not in C.W:
                problems.append(
                    {"kind": "vertical", "gap": i, "column": j, "detail": f"{name!r} is not in W"}
                )
    if problems:
        return problems

    for i in range(gaps):
        upper, lower = rows[i], rows[i + 1]
        for j in range(width):
            left_vert = C.identity_of(columns[i][j]) if j == 0 else verticals[i][j - 1]
            right_vert = (
                C.identity_of(columns[i][j + 1]) if j + 1 == width else verticals[i][j]
            )
            du, nu = upper[j]
            _, nl = lower[j]
            if du == FORWARD:
                one = C.composite(nu, right_vert)
                two = C.composite(left_vert, nl)
            else:
                one = C.composite(nu, left_vert)
                two = C.composite(right_vert, nl)
            if one != two:
                problems.append(
                    {"kind": "square", "gap": i, "column": j, "upper": nu, "lower": nl,
                     "one_way": one, "other_way": two}
                )
    return problems


class Hammock:
    """A grid of parallel reduced zigzags: ``height + 1`` rows of one width and
    direction word, joined at each interior column by W-morphisms from each row
    to the next, every square commuting, both ends pinned at the endpoints."""

    __slots__ = ("category", "source", "target", "rows", "verticals")

    def __init__(self, category: MarkedRelCategory, source: str, target: str, rows, verticals):
        self.category = category
        self.source = source
        self.target = target
        self.rows = tuple(tuple((d, n) for d, n in row) for row in rows)
        self.verticals = tuple(tuple(col) for col in verticals)
        problems = hammock_problems(category, source, target, self.rows, self.verticals)
        if problems:
            raise ValueError(f"invalid hammock: {problems[0]}")

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def height(self) -> int:
        return len(self.rows) - 1

    def row_zigzags(self) -> tuple:
        return tuple(Zigzag(self.category, self.source, self.target, row) for row in self.rows)

    @property
    def label(self) -> str:
        row_part = " / ".join(steps_label(row) for row in self.rows)
        if self.verticals and any(self.verticals):
            col_part = " / ".join(",".join(col) for col in self.verticals)
            return f"[{row_part} | {col_part}]"
        return f"[{row_part}]"

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "width": self.width,
            "height": self.height,
            "rows": [[step_label(st) for st in row] for row in self.rows],
            "verticals": [list(col) for col in self.verticals],
        }

    def __repr__(self):
        return f"Hammock({self.label})"


def validate_hammock(C: MarkedRelCategory, X: str, Y: str, rows, verticals) -> dict:
    """Independent re-check of hammock data; reports witnesses, never raises."""
    problems = hammock_problems(C, X, Y, rows, verticals)
    return {
        "source": X,
        "target": Y,
        "rows": len(tuple(rows)),
        "ok": not problems,
        "problems": problems,
    }


def _fill_verticals(C: MarkedRelCategory, combo, width: int, gaps: int) -> list:
    """All ways to join the chosen rows with commuting W-verticals, column by
    column from left to right (the pinned end columns act as identities)."""
    columns = [z.vertices() for z in combo]

    def square_ok(i, j_step, left_vert, right_vert):
        du, nu = combo[i].steps[j_step]
        _, nl = combo[i + 1].steps[j_step]
        if du == FORWARD:
            return C.composite(nu, right_vert) == C.composite(left_vert, nl)
        return C.composite(nu, left_vert) == C.composite(right_vert, nl)

    def column_vectors(j):
        per_gap = []
        for i in range(gaps):
            opts = tuple(m for m in C.hom(columns[i][j], columns[i + 1][j]) if m in C.W)
            if not opts:
                return []
            per_gap.append(opts)
        return list(itertools.product(*per_gap))

    if width == 0:
        return [tuple(() for _ in range(gaps))]

    results = []
    pinned_left = tuple(C.identity_of(columns[i][0]) for i in range(gaps))

    def extend(j, prev_vec, interior):
        if j == width + 1:
            results.append(tuple(tuple(vec[i] for vec in interior) for i in range(gaps)))
            return
        if j == width:
            vectors = [tuple(C.identity_of(columns[i][width]) for i in range(gaps))]
        else:
            vectors = column_vectors(j)
        for vec in vectors:
            if all(square_ok(i, j - 1, prev_vec[i], vec[i]) for i in range(gaps)):
                extend(j + 1, vec, interior + [vec] if j < width else interior)

    extend(1, pinned_left, [])
    return results


def hammock_simplices(C: MarkedRelCategory, X: str, Y: str, n: int, k: int) -> list:
    """Every hammock of width ``n`` and height ``k`` from X to Y.

    Height 0 wraps each reduced zigzag of width exactly ``n`` on its own.
    Greater heights pick ``k + 1`` rows sharing a direction word and fill the
    interior columns with commuting W-verticals by backtracking.
    """
    if n < 0 or k < 0:
        raise ValueError("hammock width and height must be nonnegative")
    pool = [z for z in enumerate_zigzags(C, X, Y, n) if len(z) == n]
    if k == 0:
        return [Hammock(C, X, Y, (z.steps,), ()) for z in pool]
    by_word = {}
    for z in pool:
        by_word.setdefault(z.direction_word(), []).append(z)
    out = []
    tried = 0
    for word in sorted(by_word):
        group = by_word[word]
        for combo in itertools.product(group, repeat=k + 1):
            tried += 1
            guard_size(tried, "hammock row combinations")
            for verticals in _fill_verticals(C, combo, n, k):
                out.append(Hammock(C, X, Y, tuple(z.steps for z in combo), verticals))
    out.sort(key=lambda h: h.label)
    return out


# ---- spans --------------------------------------------------------------------


class Span:
    """A backward-then-forward pair ``X <-left- apex -right-> Y`` whose
    backward leg is marked in H."""

    __slots__ = ("category", "source", "target", "left", "right")

    def __init__(self, category: MarkedRelCategory, source: str, target: str, left: str, right: str):
        for nm in (left, right):
            if nm not in category.morphisms:
                raise ValueError(f"unknown morphism {nm!r}")
        if category.source(left) != category.source(right):
            raise ValueError("the two legs of a span must share their apex")
        if category.target(left) != source:
            raise ValueError(f"left leg {left!r} does not land at {source!r}")
        if category.target(right) != target:
            raise ValueError(f"right leg {right!r} does not land at {target!r}")
        if left not in category.H:
            raise ValueError(f"left leg {left!r} is not in H")
        self.category = category
        self.source = source
        self.target = target
        self.left = left
        self.right = right

    @property
    def apex(self) -> str:
        return self.category.source(self.left)

    @property
    def label(self) -> str:
        return pair_label(self.left, self.right)

    def as_zigzag(self) -> Zigzag:
        """The two-step zigzag ``<left;>right`` (needs H inside W to traverse
        the left leg backward; validate the category first)."""
        return Zigzag(
            self.category,
            self.source,
            self.target,
            ((BACKWARD, self.left), (FORWARD, self.right)),
        )

    def __repr__(self):
        return f"Span({self.label})"


@dataclass
class SpanMappingSpace:
    """The span category from X to Y and its nerve.

    ``spans`` are sorted by label; ``arrows[(a, b)]`` lists the apex morphisms
    realizing span morphisms from the span labeled ``a`` to the one labeled
    ``b`` (both triangles commute); ``nerve`` is the truncated nerve, level m
    holding chains of m composable span morphisms.
    """

    source: str
    target: str
    spans: tuple
    arrows: dict
    nerve: FiniteSimplicialSet


def _chain_label(chain) -> str:
    return chain[0] if len(chain) == 1 else tuple_label(chain)


def _span_nerve(C, spans, arrows, truncation, name):
    apex_of = {s.label: s.apex for s in spans}
    outgoing = {}
    for (a, b), phis in sorted(arrows.items()):
        for phi in phis:
            outgoing.setdefault(a, []).append((phi, b))
    for a in outgoing:
        outgoing[a].sort()

    chains = {0: [(s.label,) for s in spans]}
    for m in range(1, truncation + 1):
        level = []
        for chain in chains[m - 1]:
            for phi, b in outgoing.get(chain[-1], ()):
                level.append(chain + (phi, b))
        guard_size(len(level), f"span nerve level {m}")
        chains[m] = level

    def face(chain, i):
        m = len(chain) // 2
        if i == 0:
            return chain[2:]
        if i == m:
            return chain[:-2]
        fused = C.composite(chain[2 * i - 1], chain[2 * i + 1])
        return chain[: 2 * i - 1] + (fused,) + chain[2 * i + 2:]

    def degeneracy(chain, j):
        ident = C.identity_of(apex_of[chain[2 * j]])
        return chain[: 2 * j + 1] + (ident, chain[2 * j]) + chain[2 * j + 1:]

    levels = {m: [_chain_label(c) for c in chains[m]] for m in range(truncation + 1)}
    d = {
        (m, i): {_chain_label(c): _chain_label(face(c, i)) for c in chains[m]}
        for m in range(1, truncation + 1)
        for i in range(m + 1)
    }
    s = {
        (m, j): {_chain_label(c): _chain_label(degeneracy(c, j)) for c in chains[m]}
        for m in range(truncation)
        for j in range(m + 1)
    }
    return FiniteSimplicialSet(truncation, levels, d, s, name=name)


def span_mapping_space(
    C: MarkedRelCategory, X: str, Y: str, truncation: int = 2, H=None
) -> SpanMappingSpace:
    """The category of spans ``X <-H- Z -> Y`` and its truncated nerve.

    A span morphism is an apex morphism making both triangles commute; the
    nerve records chains of them up to the requested truncation (default 2 —
    enough to see components and the relations between connecting morphisms).
    Path components of the 1-skeleton are the span-model pi0.  ``H`` replaces
    the category's own backward class when given (e.g. identities only, for
    which the nerve is discrete with one vertex per morphism X -> Y).
    """
    if X not in set(C.objects) or Y not in set(C.objects):
        raise ValueError("span endpoints must be objects of the category")
    if truncation < 0:
        raise ValueError("truncation must be nonnegative")
    if H is not None:
        C = C.with_marks(H=H)
    spans = []
    for left in C.morphisms_into(X):
        if left not in C.H:
            continue
        for right in C.hom(C.source(left), Y):
            spans.append(Span(C, X, Y, left, right))
    spans.sort(key=lambda s: s.label)

    arrows = {}
    for s1 in spans:
        for s2 in spans:
            connecting = tuple(
                phi
                for phi in C.hom(s1.apex, s2.apex)
                if C.composite(phi, s2.left) == s1.left
                and C.composite(phi, s2.right) == s1.right
            )
            if connecting:
                arrows[(s1.label, s2.label)] = connecting

    nerve = _span_nerve(C, spans, arrows, truncation, name=f"spans({X}->{Y})")
    return SpanMappingSpace(X, Y, tuple(spans), arrows, nerve)


# ---- path components ------------------------------------------------------------


class _UnionFind:
    def __init__(self, items=()):
        self.parent = {}
        for item in items:
            self.parent.setdefault(item, item)

    def find(self, item):
        self.parent.setdefault(item, item)
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            keep, drop = min(ra, rb), max(ra, rb)
            self.parent[drop] = keep

    def groups(self) -> dict:
        out = {}
        for item in self.parent:
            out.setdefault(self.find(item), []).append(item)
        return {root: sorted(members) for root, members in out.items()}


def pi0_mapping_space(
    C: MarkedRelCategory, X: str, Y: str, model: str = "hammock", max_length: int = 4, H=None
) -> dict:
    """Path components of the mapping space from X to Y under one model.

    ``model="span"``: components of the span category (the 1-skeleton of its
    nerve); members are span labels; ``H`` optionally replaces the category's
    backward class.

    ``model="hammock"``: every zigzag of length at most ``max_length`` is a
    vertex; vertices are glued along the length-decreasing rewrites of
    :func:`shrinking_moves` and along height-1 ladders.  A ladder joins two
    rows of one width and one alternating direction word by commuting
    W-verticals; the rows may contain identity steps (the grid constraints
    are column-level, so only the columns must avoid being all-identity),
    which is what lets a rung land on a row that rewrites to a strictly
    shorter zigzag.  Members reported per component are its reduced zigzags.
    The answer depends on the bound; see :func:`compare_localization_models`
    for the stabilization check.
    """
    if model == "span":
        space = span_mapping_space(C, X, Y, truncation=1, H=H)
        uf = _UnionFind(s.label for s in space.spans)
        for a, b in space.arrows:
            uf.union(a, b)
        components = sorted(tuple(members) for members in uf.groups().values())
        return {
            "model": "span",
            "source": X,
            "target": Y,
            "component_count": len(components),
            "components": [list(comp) for comp in components],
        }
    if model != "hammock":
        raise ValueError(f"unknown model {model!r}")

    zigzags = enumerate_zigzags(C, X, Y, max_length, reduced=False)
    uf = _UnionFind(z.label for z in zigzags)
    for z in zigzags:
        for shorter in shrinking_moves(C, z.steps):
            uf.union(z.label, steps_label(shorter))
    by_word = {}
    for z in zigzags:
        word = z.direction_word()
        if word and all(a != b for a, b in zip(word, word[1:])):
            by_word.setdefault(word, []).append(z)
    tried = 0
    for word in sorted(by_word):
        group = by_word[word]
        for a, b in itertools.combinations(group, 2):
            if uf.find(a.label) == uf.find(b.label):
                continue
            tried += 1
            guard_size(tried, "hammock rung search")
            if _fill_verticals(C, (a, b), len(a), 1) or _fill_verticals(C, (b, a), len(a), 1):
                uf.union(a.label, b.label)

    reduced_labels = {z.label for z in zigzags if z.is_reduced()}
    components = []
    for members in uf.groups().values():
        kept = [m for m in members if m in reduced_labels] or list(members)
        components.append(tuple(kept))
    components.sort()
    return {
        "model": "hammock",
        "source": X,
        "target": Y,
        "max_length": max_length,
        "component_count": len(components),
        "components": [list(comp) for comp in components],
    }


def compare_localization_models(
    C: MarkedRelCategory, X: str, Y: str, max_length: int = 4, max_height: int = 2
) -> dict:
    """Compare pi0 of the span and hammock models of the mapping space.

    The hammock side is recomputed with the bound raised by one; the bounded
    answer counts as *stabilized* when the inclusion of vertex sets induces a
    bijection of components.  Each span maps to its reduced two-step zigzag,
    inducing a map of components that must be well defined and bijective.

    Verdicts: ``"pass"`` (stabilized and bijective), ``"fail"`` (stabilized
    but not bijective, or the induced map is not well defined),
    ``"inconclusive"`` (not stabilized, or some span's reduced zigzag is
    longer than the bound — raise the bound either way), ``"refused"`` (the
    marked category itself fails validation).  The comparison is pi0-only:
    hammocks up to ``max_height`` are tallied for inspection but judged
    nowhere.  Reading zigzag components as a mapping space presumes the
    marked class admits a homotopy calculus of fractions; that hypothesis is
    recorded in the report, not checked.
    """
    if max_length < 0:
        raise ValueError("max_length must be nonnegative")
    if max_height < 0:
        raise ValueError("max_height must be nonnegative")

    report = {
        "source": X,
        "target": Y,
        "max_length": max_length,
        "max_height": max_height,
        "validation": validate_marked_category(C),
        "notes": {
            "scope": "pi0 only: path components of the two models are compared, higher homotopy is not",
            "assumption": (
                "the zigzag reading presumes W admits a homotopy calculus of fractions; "
                "this hypothesis is recorded, not checked"
            ),
        },
    }
    if not report["validation"]["ok"]:
        report["verdict"] = "refused"
        report["reason"] = "the marked category fails validation"
        return report

    span_pi0 = pi0_mapping_space(C, X, Y, model="span")
    hammock_lo = pi0_mapping_space(C, X, Y, model="hammock", max_length=max_length)
    hammock_hi = pi0_mapping_space(C, X, Y, model="hammock", max_length=max_length + 1)

    lo_index = {label: i for i, comp in enumerate(hammock_lo["components"]) for label in comp}
    hi_index = {label: i for i, comp in enumerate(hammock_hi["components"]) for label in comp}
    carried = {}
    for i, comp in enumerate(hammock_lo["components"]):
        targets = {hi_index[label] for label in comp if label in hi_index}
        carried[i] = min(targets) if targets else None
    injective = len(set(carried.values())) == len(carried) and None not in carried.values()
    surjective = set(carried.values()) == set(range(len(hammock_hi["components"])))
    stabilized = injective and surjective
    stabilization = {
        "bounded_components": hammock_lo["component_count"],
        "extended_components": hammock_hi["component_count"],
        "injective": injective,
        "surjective": surjective,
        "stabilized": stabilized,
    }

    span_index = {label: i for i, comp in enumerate(span_pi0["components"]) for label in comp}
    spans = span_mapping_space(C, X, Y, truncation=0).spans
    canonical = []
    induced = {}
    well_defined = True
    for s in spans:
        z = reduce_zigzag(s.as_zigzag())
        entry = {
            "span": s.label,
            "zigzag": z.label,
            "span_component": span_index[s.label],
            "hammock_component": lo_index.get(z.label),
        }
        canonical.append(entry)
        prior = induced.setdefault(entry["span_component"], entry["hammock_component"])
        if prior != entry["hammock_component"]:
            well_defined = False
    values = set(induced.values())
    bijective = (
        well_defined
        and None not in values
        and len(values) == len(induced)
        and values == set(range(len(hammock_lo["components"])))
    )

    census = {}
    for width in range(max_length + 1):
        for height in range(max_height + 1):
            census[f"width {width}, height {height}"] = len(hammock_simplices(C, X, Y, width, height))

    report.update(
        {
            "span_pi0": span_pi0,
            "hammock_pi0": hammock_lo,
            "hammock_pi0_extended": hammock_hi,
            "stabilization": stabilization,
            "canonical_map": canonical,
            "induced_map": {"well_defined": well_defined, "bijective": bijective},
            "hammock_census": census,
        }
    )
    unplaced = sorted(entry["span"] for entry in canonical if entry["hammock_component"] is None)
    if not stabilized:
        report["verdict"] = "inconclusive"
        report["suggestion"] = (
            f"components still change between max_length {max_length} and {max_length + 1}; "
            "raise max_length"
        )
    elif unplaced:
        report["verdict"] = "inconclusive"
        report["suggestion"] = (
            f"spans {unplaced} reduce to zigzags longer than max_length {max_length}; "
            "raise max_length"
        )
    elif well_defined and bijective:
        report["verdict"] = "pass"
    else:
        report["verdict"] = "fail"
    return report


# ---- marked categories from the groupoid engines --------------------------------


def _default_carriers(site, bound: int):
    if isinstance(site, FinSetsSite):
        return [FinSetObj([str(i) for i in range(size)]) for size in range(bound + 1)]
    if isinstance(site, GFinSetsSite):
        return actions_up_to_iso(site.group, bound)
    if isinstance(site, GraphCovSite):
        return enumerate_covers(site.base, bound)
    raise ValueError(f"no default carriers for site {site!r}")


def localize_groupoid_category(site, n, bound=None, sample=None, name: str = "") -> MarkedRelCategory:
    """Present certified groupoid objects over a site as a marked category.

    Objects: without ``sample``, every simplicial object truncated at
    ``n + 2`` built from carriers up to ``bound`` (finite sets of each size,
    actions up to isomorphism, covers up to degree — depending on the site),
    kept when the n-groupoid certificate passes; a caller-curated ``sample``
    (a list of truncated simplicial objects) is taken as-is, bypassing both
    the enumeration and the certificate filter.  Objects are named ``X0``,
    ``X1``, ... and morphisms ``m0``, ``m1``, ... in enumeration order.

    Marks: W = verified weak equivalences, F = fibrations, H = hypercovers
    observed through the truncation window (boundary comparisons up to one
    level below the truncation, matching what the weak-equivalence check can
    see).
    """
    N = n + 2
    if sample is not None:
        objects = list(sample)
        for X in objects:
            if X.N != N:
                raise ValueError(f"sample object truncated at {X.N}, expected {N}")
    else:
        if bound is None:
            raise ValueError("either bound or sample is required")
        objects = [
            X
            for X in enumerate_simplicial_objects(site, N, _default_carriers(site, bound))
            if is_n_groupoid(X, n).ok
        ]

    object_names = [f"X{i}" for i in range(len(objects))]
    morphisms = {}
    by_pair = {}
    lookup = {}
    W, H, F = set(), set(), set()
    counter = 0
    for i, A in enumerate(objects):
        for j, B in enumerate(objects):
            homs = enumerate_simplicial_morphisms(A, B)
            guard_size(counter + len(homs), "localized category size")
            entry = []
            for f in homs:
                nm = f"m{counter}"
                counter += 1
                morphisms[nm] = (object_names[i], object_names[j])
                lookup[(i, j, f.key())] = nm
                entry.append((nm, f))
                if is_weak_equivalence(f):
                    W.add(nm)
                if is_fibration(f).ok:
                    F.add(nm)
                if is_hypercover(f, INF, max_level=N - 1).ok:
                    H.add(nm)
            by_pair[(i, j)] = entry

    compose = {}
    for (i, j), entries in by_pair.items():
        for nm_f, f in entries:
            row = {}
            for k in range(len(objects)):
                for nm_g, g in by_pair[(j, k)]:
                    row[nm_g] = lookup[(i, k, compose_morphisms(g, f).key())]
            compose[nm_f] = row

    kind = getattr(site, "kind", type(site).__name__)
    return MarkedRelCategory(
        object_names,
        morphisms,
        compose,
        W=W,
        H=H,
        F=F,
        name=name or f"localized({kind}, n={n})",
    )


def compare_cover_class_marks(site_small, site_large, n, bound=None, samples=None) -> dict:
    """Localize twice over two cover-class selectors and report how H differs.

    ``samples`` is an optional pair of object lists, one built over each site
    handle (same construction, different selector); without it, both sides
    enumerate up to ``bound``.  On fixtures designed for it, the two
    presentations are identical and the stricter selector yields a strictly
    smaller H; the witness is the first morphism marked only in the larger
    class.
    """
    sample_small, sample_large = samples if samples is not None else (None, None)
    small = localize_groupoid_category(site_small, n, bound=bound, sample=sample_small, name="strict")
    large = localize_groupoid_category(site_large, n, bound=bound, sample=sample_large, name="loose")

    presentation_identical = (
        small.objects == large.objects
        and small.morphisms == large.morphisms
        and small.compose == large.compose
    )
    only_in_large = sorted(large.H - small.H)
    only_in_small = sorted(small.H - large.H)
    strictly_smaller = presentation_identical and bool(only_in_large) and not only_in_small
    report = {
        "classes": {"small": site_small.descriptor(), "large": site_large.descriptor()},
        "n": n,
        "presentation_identical": presentation_identical,
        "H_small": sorted(small.H),
        "H_large": sorted(large.H),
        "only_in_large": only_in_large,
        "only_in_small": only_in_small,
        "witness": only_in_large[0] if only_in_large else None,
        "witness_endpoints": dict(
            zip(("source", "target"), large.morphisms[only_in_large[0]])
        )
        if only_in_large
        else None,
        "strictly_smaller": strictly_smaller,
        "ok": strictly_smaller,
    }
    return report


# ---- desk fixtures ---------------------------------------------------------------


def desk_marked_category() -> MarkedRelCategory:
    """A five-object marked category sized for hand checking.

    Shape: ``t : E -> A`` and ``w : D -> C`` each link a pair of objects and
    carry every mark (they play the trivial fibrations); ``u, v : C -> B``
    are parallel and unmarked, with ``uw``/``vw`` naming their composites out
    of D.  Every weak equivalence here is a trivial fibration: any backward
    leg the hammock model can traverse is equally available to the span
    model, so the two models agree on every ordered pair of objects.  Small
    enough that every zigzag rewrite and every span can be listed by hand:
    between C and B both models see exactly the two classes of ``u`` and
    ``v``; between A and A both see a single class.
    """
    objects = ["A", "B", "C", "D", "E"]
    identities = {X: f"id{X}" for X in objects}
    morphisms = {ident: (X, X) for X, ident in identities.items()}
    morphisms.update(
        {
            "t": ("E", "A"),
            "u": ("C", "B"),
            "v": ("C", "B"),
            "w": ("D", "C"),
            "uw": ("D", "B"),
            "vw": ("D", "B"),
        }
    )
    compose = {nm: {} for nm in morphisms}
    for nm, (src, tgt) in morphisms.items():
        compose[nm][identities[tgt]] = nm
        compose[identities[src]][nm] = nm
    compose["w"]["u"] = "uw"
    compose["w"]["v"] = "vw"
    W = list(identities.values()) + ["t", "w"]
    H = list(W)
    F = list(morphisms)
    return MarkedRelCategory(objects, morphisms, compose, W=W, H=H, F=F, name="desk")


def graphcov_two_class_samples(n: int = 1):
    """Matched samples over the two graph-cover classes, plus the sites.

    The sample holds the Čech complex of a fold that merges two of three
    sheets of a trivial cover of the wedge of two loops (sheet counts 2 and 1
    over the target — surjective, but not a constant-sheet covering) and the
    constant object on the fold's target.  The augmentation toward the target
    is levelwise surjective, hence marked under the loose class, but its
    non-constant sheet count keeps it out of the strict class.

    Returns ``(site_strict, site_large, samples)`` ready for
    :func:`compare_cover_class_marks`.
    """
    base = figure_eight()
    group = base.free_group()
    three = cover_from_action(trivial_action(group, ["1", "2", "3"]), base)
    two = cover_from_action(trivial_action(group, ["1", "2"]), base)
    fold = {"1": "1", "2": "1", "3": "2"}
    fold_map = CoverMorphism(
        three,
        two,
        dict(fold),
        {
            pair_label(sheet, edge): pair_label(fold[sheet], edge)
            for sheet in fold
            for edge in base.edge_order
        },
    )
    site_strict = GraphCovSite(base, covers="finite-covers")
    site_large = GraphCovSite(base, covers="surjective")
    N = n + 2
    samples = []
    for site in (site_strict, site_large):
        X, _aug = cech_nerve(site, fold_map, N)
        samples.append([X, constant_object(site, two, N)])
    return site_strict, site_large, (samples[0], samples[1])
