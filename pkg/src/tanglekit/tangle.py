"""Shaded planar tangles as combinatorial maps with a nesting forest.

Conventions
-----------
* Discs are numbered ``OUTER`` (-1) and ``0..n-1`` for the internal discs.
  A disc of arity ``k`` carries ``2k`` marked points ``0..2k-1`` in
  counterclockwise order.
* An *endpoint* is ``(disc, point)``; a strand is an unordered pair of
  endpoints.
* A *corner* ``(disc, s)`` is the boundary segment between points ``s`` and
  ``s+1``.  An arity-0 disc has the single corner ``(disc, 0)``.
* The distinguished region of a disc with base point ``b`` is the corner
  ``b-1`` (the region immediately clockwise of the base point).
* Components not connected to the outer disc, and closed loops, are placed
  by *anchors*: a corner (any corner of the face that contains them) or
  ``(LOOP, l)`` meaning "inside loop ``l``".  A floating component also names
  the corner of its own exterior face.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from . import kernels
from .errors import (
    CompositionArityError,
    CompositionShadingError,
    ConsistencyError,
    ShadingError,
    ValidationError,
)

OUTER = -1
LOOP = -2
WHITE, BLACK = "w", "b"


def flip(color):
    return BLACK if color == WHITE else WHITE


@dataclass(frozen=True)
class Disc:
    arity: int
    base: int | None = None

    @property
    def npoints(self):
        return 2 * self.arity

    @property
    def ncorners(self):
        return max(2 * self.arity, 1)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def _norm_pair(a, b):
    a, b = tuple(a), tuple(b)
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Tangle:
    outer: Disc
    inner: tuple = ()
    strands: tuple = ()
    nesting: tuple = ()
    loops: tuple = ()
    shading: str = WHITE

    def __post_init__(self):
        object.__setattr__(self, "inner", tuple(self.inner))
        object.__setattr__(
            self, "strands", tuple(sorted(_norm_pair(a, b) for a, b in self.strands))
        )
        object.__setattr__(
            self,
            "nesting",
            tuple(sorted((tuple(c), tuple(a)) for c, a in self.nesting)),
        )
        object.__setattr__(self, "loops", tuple(tuple(a) for a in self.loops))

    # -- basic accessors -------------------------------------------------

    def disc(self, d):
        return self.outer if d == OUTER else self.inner[d]

    def disc_ids(self):
        return [OUTER] + list(range(len(self.inner)))

    def base_corner(self, d):
        disc = self.disc(d)
        if disc.arity == 0:
            return (d, 0)
        return (d, (disc.base - 1) % disc.npoints)

    @cached_property
    def _analysis(self):
        return _Analysis(self)

    @cached_property
    def _violations(self):
        # values are immutable, so the verdict never changes
        if _core is not None and _core.is_valid(self):
            return ()
        return tuple(_violations(self))

    def __repr__(self):
        return (
            f"Tangle(outer={self.outer}, inner={self.inner}, strands={self.strands}, "
            f"nesting={self.nesting}, loops={self.loops}, shading={self.shading!r})"
        )


# ---------------------------------------------------------------------------
# combinatorial analysis


def _trace_faces(arities, partner):
    """Face cycles of the rotation system.

    ``arities`` maps disc -> arity, ``partner`` maps endpoint -> endpoint.
    Returns ``(faces, face_of)`` with faces as lists of corners.
    """
    corners = []
    for d in sorted(arities):
        corners.extend((d, s) for s in range(max(2 * arities[d], 1)))
    face_of = {}
    faces = []
    for c in corners:
        if c in face_of:
            continue
        fid = len(faces)
        cycle = []
        cur = c
        while cur not in face_of:
            face_of[cur] = fid
            cycle.append(cur)
            d, s = cur
            k2 = 2 * arities[d]
            if k2 == 0:
                break
            end = (d, s) if d == OUTER else (d, (s + 1) % k2)
            d2, q = partner[end]
            if d2 == OUTER:
                cur = (d2, (q - 1) % (2 * arities[d2]))
            else:
                cur = (d2, q)
        faces.append(cycle)
    return faces, face_of


def _components(disc_ids, strands):
    parent = {d: d for d in disc_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (d1, _), (d2, _) in strands:
        r1, r2 = find(d1), find(d2)
        if r1 != r2:
            parent[max(r1, r2)] = min(r1, r2)
    groups = defaultdict(list)
    for d in disc_ids:
        groups[find(d)].append(d)
    comps = sorted(groups.values(), key=lambda g: min(g))
    comp_of = {}
    for i, g in enumerate(comps):
        for d in g:
            comp_of[d] = i
    return comps, comp_of


class _Analysis:
    """Derived structure of a (structurally well-formed) tangle."""

    def __init__(self, t, same_map=None):
        # same_map: analysis of a tangle with identical discs and strands.
        # No reference back to ``t``: tangles cache their analysis, and a
        # cycle would keep every intermediate tangle alive until a GC pass.
        self.loops = t.loops
        self.shading = t.shading
        self.outer = t.outer
        if same_map is not None:
            for name in ("arities", "partner", "faces", "face_of", "comps", "comp_of",
                         "outer_comp", "face_comp", "comp_faces", "comp_strands"):
                setattr(self, name, getattr(same_map, name))
        else:
            self.arities = {d: t.disc(d).arity for d in t.disc_ids()}
            self.partner = {}
            for a, b in t.strands:
                self.partner[a] = b
                self.partner[b] = a
            self.faces, self.face_of = _trace_faces(self.arities, self.partner)
            self.comps, self.comp_of = _components(t.disc_ids(), t.strands)
            self.outer_comp = self.comp_of[OUTER]
            self.face_comp = [self.comp_of[f[0][0]] for f in self.faces]
            self.comp_faces = defaultdict(list)
            for fid, c in enumerate(self.face_comp):
                self.comp_faces[c].append(fid)
            self.comp_strands = defaultdict(list)
            for a, b in t.strands:
                self.comp_strands[self.comp_of[a[0]]].append((a, b))
        self.ext_face = {}
        self.comp_parent = {}
        for corner, anchor in t.nesting:
            if corner not in self.face_of:
                continue
            c = self.comp_of[corner[0]]
            self.ext_face[c] = self.face_of[corner]
            self.comp_parent[c] = anchor

    def genus(self, c):
        v = len(self.comps[c])
        e = len(self.comp_strands[c])
        f = len(self.comp_faces[c])
        chi = v - e + f
        return (2 - chi) // 2, chi

    def anchor_face(self, anchor):
        if anchor[0] == LOOP:
            return None
        return self.face_of.get(anchor)

    @cached_property
    def face_region(self):
        """Face id -> region key ``('f', face)`` or ``('l', loop)``."""
        out = [None] * len(self.faces)
        limit = len(self.faces) + len(self.loops) + 2
        for fid in range(len(self.faces)):
            chain = []
            cur = fid
            key = None
            while key is None:
                if out[cur] is not None:
                    key = out[cur]
                    break
                chain.append(cur)
                if len(chain) > limit:
                    raise ConsistencyError("cyclic nesting")
                c = self.face_comp[cur]
                if c != self.outer_comp and self.ext_face.get(c) == cur:
                    anchor = self.comp_parent[c]
                    if anchor[0] == LOOP:
                        key = ("l", anchor[1])
                    else:
                        cur = self.face_of[anchor]
                else:
                    key = ("f", cur)
            for f in chain:
                out[f] = key
        return out

    def region_of_anchor(self, anchor):
        """Resolve an anchor to its region key ``('f', face)`` or ``('l', loop)``."""
        if anchor[0] == LOOP:
            return ("l", anchor[1])
        return self.face_region[self.face_of[anchor]]

    def region_of_corner(self, corner):
        return self.face_region[self.face_of[corner]]

    @cached_property
    def region_ids(self):
        """``(corner -> region index, number of regions, loop sides as index pairs)``."""
        index = {}
        fr = self.face_region
        corner_id = {c: index.setdefault(fr[fid], len(index)) for c, fid in self.face_of.items()}
        sides = []
        for l in range(len(self.loops)):
            a, b = self.loop_sides(l)
            sides.append((index.setdefault(a, len(index)), index.setdefault(b, len(index))))
        return corner_id, len(index), sides

    def loop_sides(self, l):
        return self.region_of_anchor(self.loops[l]), ("l", l)

    def region_keys(self):
        keys = []
        for fid, c in enumerate(self.face_comp):
            if c == self.outer_comp or self.ext_face.get(c) != fid:
                keys.append(("f", fid))
        keys.extend(("l", l) for l in range(len(self.loops)))
        return keys

    def region_anchor(self, key):
        if key[0] == "l":
            return (LOOP, key[1])
        return min(self.faces[key[1]])

    @cached_property
    def colors(self):
        """Region key -> color, from the base shading; raises on inconsistency."""
        adj = defaultdict(list)
        # faces on either side of a marked point
        for d, k in self.arities.items():
            k2 = 2 * k
            for p in range(k2):
                f1 = self.face_of[(d, (p - 1) % k2)]
                f2 = self.face_of[(d, p)]
                adj[f1].append(f2)
                adj[f2].append(f1)
        fr = self.face_region
        fadj = adj
        adj = defaultdict(list)
        for f1, nbrs in fadj.items():
            adj[fr[f1]].extend(fr[f2] for f2 in nbrs)
        for l in range(len(self.loops)):
            r1, r2 = self.loop_sides(l)
            adj[r1].append(r2)
            adj[r2].append(r1)
        o = self.outer
        start = self.region_of_corner((OUTER, (o.base - 1) % o.npoints if o.arity else 0))
        colors = {start: self.shading}
        queue = deque([start])
        while queue:
            r = queue.popleft()
            for r2 in adj[r]:
                want = flip(colors[r])
                if r2 not in colors:
                    colors[r2] = want
                    queue.append(r2)
                elif colors[r2] != want:
                    raise ConsistencyError(f"shading conflict between regions {r} and {r2}")
        for key in self.region_keys():
            if key not in colors:
                raise ConsistencyError(f"region {key} unreachable for shading")
        return colors

    def corner_color(self, corner):
        return self.colors[self.region_of_corner(corner)]


# ---------------------------------------------------------------------------
# validation


def _structural_violations(t):
    out = []
    if t.shading not in (WHITE, BLACK):
        out.append(Violation("shading", f"base shading {t.shading!r} is not 'b' or 'w'"))
    discs = [(OUTER, t.outer)] + list(enumerate(t.inner))
    for d, disc in discs:
        if not isinstance(disc.arity, int) or disc.arity < 0:
            out.append(Violation("arity", f"disc {d} has arity {disc.arity!r}"))
            continue
        if disc.arity == 0 and disc.base is not None:
            out.append(Violation("base", f"disc {d} has arity 0 but base {disc.base}"))
        if disc.arity > 0 and (disc.base is None or not 0 <= disc.base < disc.npoints):
            out.append(Violation("base", f"disc {d} base {disc.base!r} outside [0, {disc.npoints})"))
    if out:
        return out
    seen = defaultdict(int)
    for a, b in t.strands:
        for e in (a, b):
            d, p = e
            if d != OUTER and not 0 <= d < len(t.inner):
                out.append(Violation("endpoint", f"strand endpoint {e} names a missing disc"))
            elif not 0 <= p < t.disc(d).npoints:
                out.append(Violation("endpoint", f"strand endpoint {e} names a missing point"))
            seen[e] += 1
        if a == b:
            out.append(Violation("endpoint", f"strand joins {a} to itself"))
    for d, disc in discs:
        for p in range(disc.npoints):
            if seen[(d, p)] != 1:
                out.append(
                    Violation("matching", f"marked point {(d, p)} is used by {seen[(d, p)]} strands")
                )
    return out


def _anchor_exists(t, anchor):
    if len(anchor) != 2:
        return False
    d, x = anchor
    if d == LOOP:
        return 0 <= x < len(t.loops)
    if d != OUTER and not 0 <= d < len(t.inner):
        return False
    return 0 <= x < t.disc(d).ncorners


def validate(t):
    """Return a list of :class:`Violation` (empty iff ``t`` is a valid tangle)."""
    return list(t._violations)


def _violations(t):
    out = _structural_violations(t)
    if out:
        return out
    an = t._analysis
    for c in range(len(an.comps)):
        g, chi = an.genus(c)
        if chi != 2:
            out.append(
                Violation("planarity", f"component with discs {an.comps[c]} has genus {g} (chi={chi})")
            )
    # nesting entries
    placed = defaultdict(int)
    for corner, anchor in t.nesting:
        if not _anchor_exists(t, corner) or corner[0] == LOOP:
            out.append(Violation("nesting", f"exterior corner {corner} does not exist"))
            continue
        c = an.comp_of[corner[0]]
        if c == an.outer_comp:
            out.append(Violation("nesting", f"component of {corner} is attached to the outer disc"))
        placed[c] += 1
        if not _anchor_exists(t, anchor):
            out.append(Violation("nesting", f"parent region {anchor} does not exist"))
    for c in range(len(an.comps)):
        if c != an.outer_comp and placed[c] != 1:
            out.append(
                Violation("nesting", f"floating component {an.comps[c]} has {placed[c]} placements")
            )
    for l, anchor in enumerate(t.loops):
        if not _anchor_exists(t, anchor):
            out.append(Violation("nesting", f"loop {l} anchor {anchor} does not exist"))
    if out:
        return out
    # acyclicity: every component and loop must reach the outer component
    def parent_node(node):
        kind, i = node
        anchor = an.comp_parent[i] if kind == "c" else t.loops[i]
        if anchor[0] == LOOP:
            return ("l", anchor[1])
        return ("c", an.comp_of[anchor[0]])

    nodes = [("c", c) for c in range(len(an.comps)) if c != an.outer_comp]
    nodes += [("l", l) for l in range(len(t.loops))]
    for node in nodes:
        seen_nodes = {node}
        cur = node
        while cur != ("c", an.outer_comp):
            cur = parent_node(cur)
            if cur in seen_nodes:
                out.append(Violation("nesting", f"{node} is nested inside itself"))
                break
            seen_nodes.add(cur)
    if out:
        return out
    try:
        colors = an.colors
    except ConsistencyError as exc:
        return [Violation("shading", str(exc))]
    for i, disc in enumerate(t.inner):
        if disc.arity > 0 and an.corner_color(t.base_corner(i)) != WHITE:
            out.append(Violation("shading", f"base region of internal disc {i} is black"))
    del colors
    return out


def ensure_valid(t):
    violations = validate(t)
    if violations:
        raise ValidationError(violations)
    return t


def genus_per_component(t):
    an = t._analysis
    return [an.genus(c)[0] for c in range(len(an.comps))]


# ---------------------------------------------------------------------------
# assembly from region labels


def assemble(outer, inner, strands, loop_sides, corner_label, shading):
    """Build a tangle, deriving the nesting forest from region labels.

    ``corner_label`` maps every corner of every disc to an opaque region
    label; ``loop_sides`` lists one ``(label, label)`` pair per closed loop
    (the two regions it separates, in either order).  Labels must describe a
    planar configuration: the component/region incidence graph is a tree.
    """
    bare = Tangle(outer, tuple(inner), tuple(strands), (), (), shading)
    an = _Analysis(bare)
    face_label = []
    for fid, cycle in enumerate(an.faces):
        labels = {corner_label[c] for c in cycle}
        if len(labels) != 1:
            raise ConsistencyError(f"face {cycle} spans several regions {labels}")
        face_label.append(labels.pop())
    graph = defaultdict(list)
    for fid, lab in enumerate(face_label):
        node = ("c", an.face_comp[fid])
        graph[node].append((("r", lab), fid))
        graph[("r", lab)].append((node, fid))
    for l, (a, b) in enumerate(loop_sides):
        if a == b:
            raise ConsistencyError(f"loop {l} has the same region on both sides")
        for side, lab in ((0, a), (1, b)):
            graph[("l", l)].append((("r", lab), side))
            graph[("r", lab)].append((("l", l), side))

    root = ("c", an.outer_comp)
    parent = {root: None}
    owner = {}  # region label -> (node, face-or-side)
    placement = {}  # node -> (region label, face-or-side facing it)
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for nbr, tag in graph[node]:
            if nbr == parent[node]:
                continue
            if nbr in parent:
                raise ConsistencyError("region/component incidence graph has a cycle")
            parent[nbr] = node
            if nbr[0] == "r":
                owner[nbr[1]] = (node, tag)
            else:
                placement[nbr] = (node[1], tag)
            queue.append(nbr)
    expected = {("c", c) for c in range(len(an.comps))} | {("l", l) for l in range(len(loop_sides))}
    missing = expected - set(parent)
    if missing:
        raise ConsistencyError(f"disconnected pieces {sorted(missing)}")

    def anchor_for(label):
        node, tag = owner[label]
        if node[0] == "l":
            # the region a loop owns is always its inside
            return (LOOP, node[1])
        return min(an.faces[tag])

    nesting = []
    final_loops = [None] * len(loop_sides)
    for node, (label, tag) in placement.items():
        if node[0] == "c":
            nesting.append((min(an.faces[tag]), anchor_for(label)))
        else:
            final_loops[node[1]] = anchor_for(label)
    result = Tangle(outer, tuple(inner), tuple(strands), tuple(nesting), tuple(final_loops), shading)
    # same discs and strands as ``bare``: reuse its faces and components
    result.__dict__["_analysis"] = _Analysis(result, an)
    return result


def region_labels(t, tag=None):
    """Map every corner of ``t`` and every loop side to its region key.

    Keys are wrapped as ``(tag, key)`` so labels from different tangles can
    be mixed.  Returns ``(corner_label, loop_sides)``.
    """
    an = t._analysis
    corner_label = {}
    for d in t.disc_ids():
        for s in range(t.disc(d).ncorners):
            corner_label[(d, s)] = (tag, an.region_of_corner((d, s)))
    loop_sides = []
    for l in range(len(t.loops)):
        a, b = an.loop_sides(l)
        loop_sides.append(((tag, a), (tag, b)))
    return corner_label, loop_sides


# ---------------------------------------------------------------------------
# canonical form


@dataclass
class Relabeling:
    """How a tangle's elements move under :func:`canonical_form`."""

    disc: dict = field(default_factory=dict)
    loop: dict = field(default_factory=dict)

    def point(self, t, e):
        d, p = e
        if d == OUTER:
            return e
        disc = t.inner[d]
        return (self.disc[d], (p - disc.base) % disc.npoints if disc.arity else p)

    def corner(self, t, c):
        d, s = c
        if d == LOOP:
            return (LOOP, self.loop[s])
        if d == OUTER or t.inner[d].arity == 0:
            return (self.disc.get(d, d), s)
        disc = t.inner[d]
        return (self.disc[d], (s - disc.base) % disc.npoints)


def _zero(*_):
    return 0


class _Canonizer:
    def __init__(self, t, strand_w=None, seg_w=None, loop_w=None):
        self.t = t
        self.an = t._analysis
        self.strand_w = strand_w or _zero
        self.seg_w = seg_w or _zero
        self.loop_w = loop_w or _zero
        an = self.an
        self.children = defaultdict(list)
        for c in range(len(an.comps)):
            if c != an.outer_comp:
                self.children[an.region_of_anchor(an.comp_parent[c])].append(("c", c))
        for l in range(len(t.loops)):
            self.children[an.region_of_anchor(t.loops[l])].append(("l", l))
        self._region_code = {}
        self._node_code = {}
        self._best = {}
        self._bfs = {}
        # per disc: (arity, npoints, ncorners, base offset for points, for corners)
        self.shape = {}
        for d in t.disc_ids():
            disc = t.disc(d)
            off = 0 if (d == OUTER or disc.arity == 0) else disc.base
            self.shape[d] = (disc.arity, disc.npoints, disc.ncorners, off)

    def rel(self, d, p):
        _, n, _, off = self.shape[d]
        return (p - off) % n if off else p

    def bfs(self, start):
        got = self._bfs.get(start)
        if got is not None:
            return got
        partner, shape = self.an.partner, self.shape
        order = [start]
        label = {start: 0}
        i = 0
        while i < len(order):
            d = order[i]
            i += 1
            _, n, _, off = shape[d]
            for r in range(n):
                d2 = partner[(d, (off + r) % n)][0]
                if d2 not in label:
                    label[d2] = len(order)
                    order.append(d2)
        self._bfs[start] = order, label
        return order, label

    def local_face(self, fid, label):
        shape = self.shape
        best = None
        for d, s in self.an.faces[fid]:
            _, n, _, off = shape[d]
            key = (label[d], (s - off) % n if off else s)
            if best is None or key < best:
                best = key
        return best

    def comp_code(self, c, start):
        an, shape = self.an, self.shape
        partner = an.partner
        strand_w, seg_w = self.strand_w, self.seg_w
        order, label = self.bfs(start)
        discs = []
        for d in order:
            arity, n, nc, off = shape[d]
            recs = []
            for r in range(n):
                p = (off + r) % n
                d2, q = e2 = partner[(d, p)]
                _, n2, _, off2 = shape[d2]
                recs.append((label[d2], (q - off2) % n2 if off2 else q,
                             strand_w(_norm_pair((d, p), e2)) if strand_w is not _zero else 0))
            if seg_w is _zero:
                segs = (0,) * nc
            else:
                segs = tuple(seg_w((d, (off + r) % n if off else r)) for r in range(nc))
            discs.append((arity, tuple(recs), segs))

        ext = an.ext_face.get(c)
        ext_id = self.local_face(ext, label) if ext is not None else (-1, -1)
        owned = []
        for fid in an.comp_faces[c]:
            if fid == ext and c != an.outer_comp:
                continue
            owned.append((self.local_face(fid, label), self.region_code(("f", fid))))
        owned.sort()
        return (1, tuple(discs), ext_id, tuple(owned))

    def region_code(self, key):
        if key not in self._region_code:
            self._region_code[key] = tuple(sorted(self.node_code(n) for n in self.children[key]))
        return self._region_code[key]

    def node_code(self, node):
        got = self._node_code.get(node)
        if got is not None:
            return got
        kind, i = node
        if kind == "l":
            code = (0, self.loop_w(i), self.region_code(("l", i)))
        else:
            best = None
            for start in self.an.comps[i]:
                cand = self.comp_code(i, start)
                if best is None or cand < best[0]:
                    best = (cand, start)
            self._best[i] = best[1]
            code = best[0]
        self._node_code[node] = code
        return code

    def run(self):
        t, an = self.t, self.an
        relab = Relabeling()
        next_disc = [0]
        next_loop = [0]

        def label_comp(c, start):
            order, _ = self.bfs(start)
            for d in order:
                if d == OUTER:
                    continue
                relab.disc[d] = next_disc[0]
                next_disc[0] += 1
            regions = []
            for fid in an.comp_faces[c]:
                if c != an.outer_comp and an.ext_face.get(c) == fid:
                    continue
                regions.append(fid)
            # walk owned regions in canonical (local face id) order
            _, label = self.bfs(start)
            regions.sort(key=lambda f: self.local_face(f, label))
            for fid in regions:
                walk_region(("f", fid))

        def walk_region(key):
            kids = sorted(self.children[key], key=self.node_code)
            for node in kids:
                if node[0] == "l":
                    relab.loop[node[1]] = next_loop[0]
                    next_loop[0] += 1
                    walk_region(("l", node[1]))
                else:
                    self.node_code(node)
                    label_comp(node[1], self._best[node[1]])

        label_comp(an.outer_comp, OUTER)

        inner = [None] * len(t.inner)
        for d, nd in relab.disc.items():
            a = t.inner[d].arity
            inner[nd] = Disc(a, 0 if a else None)
        strands = [(relab.point(t, a), relab.point(t, b)) for a, b in t.strands]
        nesting = []
        for c in range(len(an.comps)):
            if c == an.outer_comp:
                continue
            ext = min(relab.corner(t, x) for x in an.faces[an.ext_face[c]])
            region = an.region_of_anchor(an.comp_parent[c])
            nesting.append((ext, self.region_anchor(region, relab)))
        loops = [None] * len(t.loops)
        for l, nl in relab.loop.items():
            loops[nl] = self.region_anchor(an.region_of_anchor(t.loops[l]), relab)
        canon = Tangle(t.outer, tuple(inner), tuple(strands), tuple(nesting), tuple(loops), t.shading)
        return canon, relab

    def region_anchor(self, key, relab):
        if key[0] == "l":
            return (LOOP, relab.loop[key[1]])
        return min(relab.corner(self.t, x) for x in self.an.faces[key[1]])


def canonical_form(t, strand_w=None, seg_w=None, loop_w=None):
    """Canonical tangle plus the :class:`Relabeling` that produced it.

    Optional weight callbacks take part in tie-breaking so that decorated
    tangles canonicalize consistently with their decorations.
    """
    ensure_valid(t)
    return _Canonizer(t, strand_w, seg_w, loop_w).run()


def canonicalize(t):
    if _core is not None:
        got = _core.canonicalize(t)
        if got is not None:
            return got
    return canonical_form(t)[0]


def equals(a, b):
    return canonicalize(a) == canonicalize(b)


# ---------------------------------------------------------------------------
# constructors and operad structure


def empty_disc(shading=WHITE):
    return Tangle(Disc(0), shading=shading)


@lru_cache(maxsize=None)
def identity_tangle(k, shading=WHITE):
    """Annulus with radial strands.  Only white for ``k > 0``: internal base regions are white."""
    if k > 0 and shading != WHITE:
        raise ShadingError("an identity tangle with arity > 0 needs a white base region")
    if k == 0:
        return Tangle(Disc(0), (Disc(0),), (), (((0, 0), (OUTER, 0)),), (), shading)
    strands = [((OUTER, i), (0, i)) for i in range(2 * k)]
    return Tangle(Disc(k, 0), (Disc(k, 0),), tuple(strands), (), (), shading)


def matching_tangle(pairs, k, shading=WHITE, base=0):
    """A tangle with no internal discs whose strands realise ``pairs`` on ``2k`` outer points."""
    strands = [((OUTER, a), (OUTER, b)) for a, b in pairs]
    return Tangle(Disc(k, base if k else None), (), tuple(strands), (), (), shading)


@dataclass
class Composition:
    tangle: Tangle
    # new strand -> list of ("t"|"s", old strand)
    strand_sources: dict
    # loop id -> ("t"|"s", old loop id) or ("new", [old strands])
    loop_sources: list
    t_disc: dict
    s_disc: dict


def compose_detailed(t, j, s):
    ensure_valid(t)
    ensure_valid(s)
    if not 0 <= j < len(t.inner):
        raise IndexError(f"internal disc index {j} out of range for {len(t.inner)} discs")
    dj = t.inner[j]
    k = dj.arity
    if k != s.outer.arity:
        raise CompositionArityError(
            f"disc {j} has arity {k} but the inserted tangle has outer arity {s.outer.arity}"
        )
    region_color = t._analysis.corner_color(t.base_corner(j))
    if region_color != s.shading:
        raise CompositionShadingError(
            f"region at disc {j} is {region_color!r} but inserted tangle has base shading {s.shading!r}"
        )
    ns = len(s.inner)
    t_disc = {OUTER: OUTER}
    for i in range(len(t.inner)):
        if i != j:
            t_disc[i] = i if i < j else i - 1 + ns
    s_disc = {m: j + m for m in range(ns)}
    n2 = 2 * k

    shift = (s.outer.base - dj.base) if k else 0

    tp, sp = t._analysis.partner, s._analysis.partner

    strands = []
    sources = {}
    visited = set()

    def walk(side, e):
        # follow from a free endpoint e (on side "t" or "s") to the other free end
        used = []
        cur_side, cur = side, e
        while True:
            visited.add((cur_side, cur))
            if cur_side == "t":
                other = tp[cur]
                used.append(("t", _norm_pair(cur, other)))
                visited.add(("t", other))
                if other[0] != j:
                    return ("t", other), used
                cur_side, cur = "s", (OUTER, (other[1] + shift) % n2)
            else:
                other = sp[cur]
                used.append(("s", _norm_pair(cur, other)))
                visited.add(("s", other))
                if other[0] != OUTER:
                    return ("s", other), used
                cur_side, cur = "t", (j, (other[1] - shift) % n2)

    def new_point(side, e):
        return (t_disc[e[0]] if side == "t" else s_disc[e[0]], e[1])

    free = [("t", e) for pair in t.strands for e in pair if e[0] != j]
    free += [("s", e) for pair in s.strands for e in pair if e[0] != OUTER]
    for side, e in free:
        if (side, e) in visited:
            continue
        (side2, e2), used = walk(side, e)
        pair = _norm_pair(new_point(side, e), new_point(side2, e2))
        strands.append(pair)
        sources[pair] = used

    # regions of both inputs as integers, merged across the glued boundary
    t_reg, nt, t_loops = t._analysis.region_ids
    s_reg, nsr, s_loops = s._analysis.region_ids
    uf = list(range(nt + nsr))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    for p in range(max(n2, 1)):
        ra, rb = find(t_reg[(j, p)]), find(nt + s_reg[(OUTER, (p + shift) % n2 if n2 else 0)])
        if ra != rb:
            uf[ra] = rb

    loop_sides = []
    loop_sources = []
    for l, (a, b) in enumerate(t_loops):
        loop_sides.append((find(a), find(b)))
        loop_sources.append(("t", l))
    for l, (a, b) in enumerate(s_loops):
        loop_sides.append((find(nt + a), find(nt + b)))
        loop_sources.append(("s", l))
    for p in range(n2):
        if ("t", (j, p)) in visited:
            continue
        start = (j, p)
        # a closed chain through the glued boundary
        used = []
        cur = start
        while True:
            visited.add(("t", cur))
            other = tp[cur]
            used.append(("t", _norm_pair(cur, other)))
            visited.add(("t", other))
            q = (other[1] + shift) % n2
            s_other = sp[(OUTER, q)]
            used.append(("s", _norm_pair((OUTER, q), s_other)))
            cur = (j, (s_other[1] - shift) % n2)
            if cur == start:
                break
        loop_sides.append((find(t_reg[(j, (p - 1) % n2)]), find(t_reg[(j, p)])))
        loop_sources.append(("new", used))

    corner_label = {}
    for (d, c), r in t_reg.items():
        if d != j:
            corner_label[(t_disc[d], c)] = find(r)
    for (d, c), r in s_reg.items():
        if d != OUTER:
            corner_label[(s_disc[d], c)] = find(nt + r)
    inner = [None] * (len(t.inner) - 1 + ns)
    for i, disc in enumerate(t.inner):
        if i != j:
            inner[t_disc[i]] = disc
    for m, disc in enumerate(s.inner):
        inner[s_disc[m]] = disc
    result = assemble(t.outer, inner, strands, loop_sides, corner_label, t.shading)
    strand_sources = {pair: sources[pair] for pair in result.strands}
    return Composition(result, strand_sources, loop_sources, t_disc, s_disc)


def compose(t, j, s):
    """Operad composition ``t o_j s``: glue ``s`` into internal disc ``j`` of ``t``."""
    if (_core is not None and type(j) is int and 0 <= j < len(t.inner)
            and t.inner[j].arity == s.outer.arity):
        got = _core.compose(t, j, s)
        if got is not None and got[0] is not None:
            return got[0]
    return compose_detailed(t, j, s).tangle


def involution(t):
    """Mirror image with shadings reversed; base points stay where they are."""
    ensure_valid(t)

    def mp(e):
        d, p = e
        disc = t.disc(d)
        return (d, (2 * disc.base - p) % disc.npoints)

    def mc(c):
        d, s = c
        if d == LOOP:
            return c
        disc = t.disc(d)
        if disc.arity == 0:
            return c
        return (d, (2 * disc.base - s - 1) % disc.npoints)

    shading = t.shading if t.outer.arity else flip(t.shading)
    return Tangle(
        t.outer,
        t.inner,
        tuple((mp(a), mp(b)) for a, b in t.strands),
        tuple((mc(c), mc(a)) for c, a in t.nesting),
        tuple(mc(a) for a in t.loops),
        shading,
    )


@dataclass(frozen=True)
class Region:
    id: int
    color: str
    anchor: tuple
    corners: tuple
    neighbors: tuple


def regions(t):
    """Complementary regions in a deterministic order (sorted by anchor, loops last)."""
    ensure_valid(t)
    an = t._analysis
    keys = an.region_keys()
    keys.sort(key=lambda k: (1, k[1]) if k[0] == "l" else (0, an.region_anchor(k)))
    index = {k: i for i, k in enumerate(keys)}
    corners = defaultdict(list)
    for d in t.disc_ids():
        for s in range(t.disc(d).ncorners):
            corners[an.region_of_corner((d, s))].append((d, s))
    nbrs = defaultdict(set)
    for d in t.disc_ids():
        k2 = t.disc(d).npoints
        for p in range(k2):
            r1 = an.region_of_corner((d, (p - 1) % k2))
            r2 = an.region_of_corner((d, p))
            nbrs[r1].add(index[r2])
            nbrs[r2].add(index[r1])
    for l in range(len(t.loops)):
        r1, r2 = an.loop_sides(l)
        nbrs[r1].add(index[r2])
        nbrs[r2].add(index[r1])
    return [
        Region(
            index[k],
            an.colors[k],
            an.region_anchor(k),
            tuple(sorted(corners[k])),
            tuple(sorted(nbrs[k])),
        )
        for k in keys
    ]


def _make_tangle(outer, inner, strands, nesting, loops, shading):
    # fields already in normal form: skip __post_init__
    t = object.__new__(Tangle)
    t.__dict__.update(outer=outer, inner=inner, strands=strands, nesting=nesting,
                      loops=loops, shading=shading)
    return t


_core = kernels.tangle_core
if _core is not None:
    _core.bind(Disc, _make_tangle)
