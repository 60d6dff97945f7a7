"""Independent oracles and random generators shared by the test modules.

The oracles never call the library's face tracing, canonical form or
enumeration code; they re-derive what they need from the raw strand lists.
The random generators do use the library's ``assemble`` to build tangles.
"""
from __future__ import annotations

import itertools
import random
from collections import defaultdict
from fractions import Fraction

from tanglekit.poly import TwoParamPoly
from tanglekit.realmaps import RealRationalMap
from tanglekit.tangle import BLACK, LOOP, OUTER, WHITE, Disc, Tangle, assemble, flip
from tanglekit.tl import TLDiagram, TLElement
from tanglekit.weighted import WeightedTangle

# ---------------------------------------------------------------------------
# noncrossing matchings via Dyck words


def dyck_words(n):
    """Balanced bracket strings of length ``2n`` by plain backtracking."""
    out = []

    def go(word, opened, closed):
        if closed == n:
            out.append("".join(word))
            return
        if opened < n:
            word.append("(")
            go(word, opened + 1, closed)
            word.pop()
        if closed < opened:
            word.append(")")
            go(word, opened, closed + 1)
            word.pop()

    go([], 0, 0)
    return out


def word_to_pairs(word):
    stack, pairs = [], []
    for i, ch in enumerate(word):
        if ch == "(":
            stack.append(i)
        else:
            pairs.append((stack.pop(), i))
    return sorted(pairs)


def noncrossing_matchings(n):
    return [word_to_pairs(w) for w in dyck_words(n)]


def is_noncrossing(pairs):
    for (a, b), (c, d) in itertools.combinations(pairs, 2):
        a, b = sorted((a, b))
        c, d = sorted((c, d))
        if a < c < b < d or c < a < d < b:
            return False
    return True


def random_noncrossing(rng, points):
    """Random noncrossing perfect matching of the list ``points`` (even length)."""
    if not points:
        return []
    j = rng.randrange(1, len(points), 2)
    return ([(points[0], points[j])] + random_noncrossing(rng, points[1:j])
            + random_noncrossing(rng, points[j + 1:]))


# ---------------------------------------------------------------------------
# Temperley-Lieb oracles on the rectangle picture


def _d(colour_inside):
    return TwoParamPoly.monomial(1, 0) if colour_inside == BLACK else TwoParamPoly.monomial(0, 1)


def oracle_stack(a, b, shading=WHITE):
    """``a * b`` (``b`` on top) by walking the three rows of points.

    Bottom positions of a diagram are labels ``0..n-1``; top position ``i``
    is label ``2n-1-i``.  Returns ``(partner tuple, loop factor)``.
    """
    n = a.n

    def node(which, label):
        bottom = label < n
        pos = label if bottom else 2 * n - 1 - label
        if which == "a":
            return ("lo", pos) if bottom else ("mid", pos)
        return ("mid", pos) if bottom else ("hi", pos)

    edges = []
    for which, p in (("a", a.partner), ("b", b.partner)):
        for x in range(2 * n):
            if x < p[x]:
                edges.append((node(which, x), node(which, p[x])))
    incident = defaultdict(list)
    for e, (u, v) in enumerate(edges):
        incident[u].append(e)
        incident[v].append(e)

    def walk(start):
        used, cur, e = set(), start, incident[start][0]
        while True:
            used.add(e)
            u, v = edges[e]
            cur = v if u == cur else u
            rest = [f for f in incident[cur] if f not in used]
            if not rest:
                return cur, used
            e = rest[0]

    def label(nd):
        return nd[1] if nd[0] == "lo" else 2 * n - 1 - nd[1]

    partner = [0] * (2 * n)
    done = set()
    for start in [("lo", i) for i in range(n)] + [("hi", i) for i in range(n)]:
        end, used = walk(start)
        done |= used
        partner[label(start)] = label(end)
    factor = TwoParamPoly.one()
    for e in range(len(edges)):
        if e in done:
            continue
        # a closed loop; everything on it sits in the middle row
        members, stack = set(), [e]
        while stack:
            f = stack.pop()
            if f in members:
                continue
            members.add(f)
            for nd in edges[f]:
                stack.extend(incident[nd])
        done |= members
        left = min(nd[1] for f in members for nd in edges[f]) + 1  # 1-indexed
        inside = BLACK if left % 2 == 1 else WHITE
        factor = factor * _d(inside if shading == WHITE else flip(inside))
    return tuple(partner), factor


def oracle_multiply(x, y):
    terms = defaultdict(TwoParamPoly)
    for da, ca in x.items():
        for db, cb in y.items():
            p, f = oracle_stack(da, db, x.shading)
            terms[p] = terms[p] + ca * cb * f
    return TLElement(x.n, {TLDiagram(x.n, p): c for p, c in terms.items()}, x.shading)


def oracle_trace(x):
    """Closure trace: top ``i`` joined to bottom ``i`` around the right-hand side.

    Each loop passes through the closing arcs; the leftmost position it uses
    decides the colour inside it.
    """
    total = TwoParamPoly()
    n = x.n
    for d, c in x.items():
        parent = list(range(2 * n))

        def find(u):
            while parent[u] != u:
                u = parent[u]
            return u

        for u in range(2 * n):
            parent[find(u)] = find(d.partner[u])
        for j in range(n):
            parent[find(j)] = find(2 * n - 1 - j)
        groups = defaultdict(list)
        for u in range(n):
            groups[find(u)].append(u)
        f = TwoParamPoly.one()
        for g in groups.values():
            inside = BLACK if (min(g) + 1) % 2 == 1 else WHITE
            f = f * _d(inside if x.shading == WHITE else flip(inside))
        total = total + c * f
    return total


def random_poly(rng, terms=3, degree=3):
    p = TwoParamPoly()
    for _ in range(rng.randrange(1, terms + 1)):
        m = rng.randrange(degree + 1)
        n = rng.randrange(degree + 1)
        c = rng.choice([-3, -2, -1, 1, 2, 3, 7, -11])
        p = p + TwoParamPoly({(m, n): c})
    return p


def random_tl(rng, n, basis, shading=WHITE, terms=3):
    picked = {}
    for _ in range(rng.randrange(1, terms + 1)):
        d = rng.choice(basis)
        picked[d] = random_poly(rng)
    return TLElement(n, picked, shading)


# ---------------------------------------------------------------------------
# oval forests


def oval_oracle(parents, ambient):
    """Remove innermost ovals one at a time; ``parents[i]`` is ``None`` for a root."""
    parents = dict(enumerate(parents))
    factor = TwoParamPoly.one()
    while parents:
        has_child = {p for p in parents.values() if p is not None}
        leaf = next(i for i in sorted(parents) if i not in has_child)
        depth, cur = 0, parents[leaf]
        while cur is not None:
            depth += 1
            cur = parents[cur]
        inside = flip(ambient) if depth % 2 == 0 else ambient
        factor = factor * _d(inside)
        del parents[leaf]
    return factor


def random_parents(rng, size):
    return [None if i == 0 or rng.random() < 0.3 else rng.randrange(i) for i in range(size)]


# ---------------------------------------------------------------------------
# independent face tracing and isotopy signature


def faces_of(t):
    """Corner cycles of ``t``: walk each region boundary with the region on the left."""
    partner = {}
    for a, b in t.strands:
        partner[a] = b
        partner[b] = a
    corners = [(d, s) for d in t.disc_ids() for s in range(t.disc(d).ncorners)]
    face = {}
    cycles = []
    for c in corners:
        if c in face:
            continue
        cyc = []
        cur = c
        while cur not in face:
            face[cur] = len(cycles)
            cyc.append(cur)
            d, s = cur
            k2 = t.disc(d).npoints
            if k2 == 0:
                break
            end = (d, (s + 1) % k2) if d == OUTER else (d, s)
            d2, p2 = partner[end]
            k22 = t.disc(d2).npoints
            cur = (d2, p2) if d2 == OUTER else (d2, (p2 - 1) % k22)
        cycles.append(cyc)
    return face, cycles


def components_of(t):
    parent = {d: d for d in t.disc_ids()}

    def find(u):
        while parent[u] != u:
            u = parent[u]
        return u

    for (d1, _), (d2, _) in t.strands:
        parent[find(d1)] = find(d2)
    groups = defaultdict(list)
    for d in t.disc_ids():
        groups[find(d)].append(d)
    return list(groups.values())


def planar_components(t):
    """Euler characteristic 2 for every connected component."""
    face, cycles = faces_of(t)
    for comp in components_of(t):
        cs = set(comp)
        v = len(comp)
        e = sum(1 for (d1, _), _ in t.strands if d1 in cs)
        f = sum(1 for cyc in cycles if cyc[0][0] in cs)
        if v - e + f != 2:
            return False
    return True


def isotopy_signature(t):
    """Canonical description of ``t`` up to renaming inner discs, loops and anchors.

    Minimises over all permutations of the internal discs; fine for the
    handful of discs the tests use.
    """
    face, cycles = faces_of(t)
    # regions: faces merged by nesting, plus loop interiors
    parent = {("f", i): ("f", i) for i in range(len(cycles))}
    for l in range(len(t.loops)):
        parent[("l", l)] = ("l", l)

    def find(u):
        while parent[u] != u:
            u = parent[u]
        return u

    def node(anchor):
        return ("l", anchor[1]) if anchor[0] == LOOP else ("f", face[tuple(anchor)])

    for c, a in t.nesting:
        parent[find(node(c))] = find(node(a))
    loop_out = [find(node(a)) for a in t.loops]

    best = None
    n = len(t.inner)
    for perm in itertools.permutations(range(n)):
        def pt(e):
            d, p = e
            if d == OUTER:
                return (OUTER, p)
            disc = t.inner[d]
            return (perm[d], (p - disc.base) % disc.npoints if disc.arity else p)

        inner = tuple(Disc(t.inner[i].arity, 0 if t.inner[i].arity else None)
                      for i in sorted(range(n), key=lambda i: perm[i]))
        strands = tuple(sorted(tuple(sorted((pt(a), pt(b)))) for a, b in t.strands))
        region_corners = defaultdict(list)
        for c, f in face.items():
            region_corners[find(("f", f))].append(pt(c))

        def sig_region(r):
            kids = sorted(sig_region(find(("l", l))) for l in range(len(t.loops)) if loop_out[l] == r)
            return (tuple(sorted(region_corners.get(r, []))), tuple(kids))

        roots = {find(("f", f)) for f in range(len(cycles))}
        body = tuple(sorted(sig_region(r) for r in roots))
        cand = (t.outer, inner, strands, body, t.shading)
        if best is None or repr(cand) < repr(best):
            best = cand
    return best


def scramble(rng, t):
    """The same tangle under fresh names: permuted discs and loops, rotated labels, other anchors."""
    face, cycles = faces_of(t)
    n = len(t.inner)
    perm = list(range(n))
    rng.shuffle(perm)
    rot = [rng.randrange(max(d.npoints, 1)) if d.arity else 0 for d in t.inner]

    def pt(e):
        d, p = e
        if d == OUTER:
            return e
        k2 = t.inner[d].npoints
        return (perm[d], (p + rot[d]) % k2 if k2 else p)

    nl = len(t.loops)
    lperm = list(range(nl))
    rng.shuffle(lperm)

    def anchor(a):
        if a[0] == LOOP:
            return (LOOP, lperm[a[1]])
        other = rng.choice(cycles[face[tuple(a)]])
        return pt(other)

    inner = [None] * n
    for i, d in enumerate(t.inner):
        inner[perm[i]] = Disc(d.arity, (d.base + rot[i]) % d.npoints if d.arity else None)
    loops = [None] * nl
    for l, a in enumerate(t.loops):
        loops[lperm[l]] = anchor(a)
    nesting = [(anchor(c), anchor(a)) for c, a in t.nesting]
    return Tangle(t.outer, tuple(inner), tuple((pt(a), pt(b)) for a, b in t.strands),
                  tuple(nesting), tuple(loops), t.shading)


# ---------------------------------------------------------------------------
# random tangles: discs as beads on a necklace


class _UF:
    def __init__(self):
        self.p = {}

    def find(self, u):
        self.p.setdefault(u, u)
        while self.p[u] != u:
            self.p[u] = self.p[self.p[u]]
            u = self.p[u]
        return u

    def union(self, a, b):
        self.p[self.find(a)] = self.find(b)


def _bead_group(rng, gid, blocks, uf, corner_label, strands):
    """Place ``blocks`` around a necklace; return the labels of the group's regions.

    Each block is ``(disc, arity)``; the outer disc lists its points
    counterclockwise, internal discs clockwise, both from a random start.
    Strands are a random noncrossing matching of all the points.
    """
    rng.shuffle(blocks)
    positions = []
    block_span = []
    channel = ("chan", gid)
    uf.find(channel)
    for d, k in blocks:
        k2 = 2 * k
        if k2 == 0:
            corner_label[(d, 0)] = channel
            continue
        r = rng.randrange(k2)
        pts = [(r + i) % k2 if d == OUTER else (r - i) % k2 for i in range(k2)]
        start = len(positions)
        positions.extend((d, p) for p in pts)
        block_span.append((d, start, len(positions), pts))
    total = len(positions)
    idx = list(range(total))
    chords = random_noncrossing(rng, idx)
    for a, b in chords:
        strands.append((positions[a], positions[b]))

    def gap_label(g):
        key = frozenset((a, b) for a, b in chords if a <= g < b)
        return ("gap", gid, key)

    for d, start, end, pts in block_span:
        for m in range(len(pts) - 1):
            lab = gap_label(start + m)
            c = (d, pts[m]) if d == OUTER else (d, pts[m + 1])
            corner_label[c] = lab
        back = (d, (pts[0] - 1) % len(pts)) if d == OUTER else (d, pts[0])
        corner_label[back] = channel
        uf.union(gap_label(end - 1 if end - 1 >= 0 else total - 1), channel)
    labels = {channel}
    for g in range(total):
        labels.add(gap_label(g))
    return labels


def random_tangle(rng, inner_arities=None, outer_arity=None, max_inner=3, max_points=16,
                  loops=None, shading=None, outer_base=None, max_arity=3):
    """A random valid tangle.  Floating groups and loops go into random regions."""
    if outer_arity is None:
        outer_arity = rng.randrange(0, max_arity + 1)
    if inner_arities is None:
        inner_arities = []
        budget = max_points - 2 * outer_arity
        for _ in range(rng.randrange(0, max_inner + 1)):
            k = rng.randrange(0, max_arity + 1)
            if 2 * k <= budget:
                inner_arities.append(k)
                budget -= 2 * k
    n = len(inner_arities)
    if loops is None:
        loops = rng.choice([0, 0, 0, 1, 2])
    # split discs into the outer group and floating groups
    groups = [[(OUTER, outer_arity)]]
    for i, k in enumerate(inner_arities):
        if k == 0 or rng.random() < 0.3:
            if k > 0 and len(groups) > 1 and rng.random() < 0.5:
                groups[rng.randrange(1, len(groups))].append((i, k))
            else:
                groups.append([(i, k)])
        else:
            groups[0].append((i, k))
    uf = _UF()
    corner_label = {}
    strands = []
    group_labels = [_bead_group(rng, g, list(blocks), uf, corner_label, strands)
                    for g, blocks in enumerate(groups)]
    available = sorted(group_labels[0], key=repr)
    loop_sides = []
    pending = [("g", g) for g in range(1, len(groups))] + [("l", l) for l in range(loops)]
    rng.shuffle(pending)
    for kind, x in pending:
        host = rng.choice(available)
        if kind == "g":
            mine = sorted(group_labels[x], key=repr)
            uf.union(rng.choice(mine), host)
            available.extend(mine)
        else:
            inside = ("loop", x)
            loop_sides.append((host, inside))
            available.append(inside)
    corner_label = {c: uf.find(lab) for c, lab in corner_label.items()}
    loop_sides = [(uf.find(a), uf.find(b)) for a, b in loop_sides]
    if shading is None:
        shading = rng.choice([WHITE, BLACK])
    if not outer_arity:
        outer_base = None
    elif outer_base is None:
        outer_base = rng.randrange(2 * outer_arity)
    outer = Disc(outer_arity, outer_base)
    draft = assemble(outer, [Disc(k, 0 if k else None) for k in inner_arities], strands,
                     loop_sides, corner_label, shading)
    an = draft._analysis
    inner = []
    for i, k in enumerate(inner_arities):
        if k == 0:
            inner.append(Disc(0))
            continue
        ok = [b for b in range(2 * k) if an.corner_color((i, (b - 1) % (2 * k))) == WHITE]
        inner.append(Disc(k, rng.choice(ok)))
    return assemble(outer, inner, strands, loop_sides, corner_label, shading)


def base_region_color(t, j):
    if t.inner[j].arity:
        return WHITE  # valid tangles have white internal base regions
    return t._analysis.corner_color(t.base_corner(j))


def random_composable(rng, max_inner=3, max_points=16):
    """``(t, j, s)`` with ``s`` fitting internal disc ``j`` of ``t``."""
    while True:
        t = random_tangle(rng, max_inner=max_inner, max_points=max_points)
        if t.inner:
            break
    j = rng.randrange(len(t.inner))
    k = t.inner[j].arity
    s = random_tangle(rng, outer_arity=k, max_inner=max_inner, max_points=max_points, shading=WHITE)
    return t, j, s


# ---------------------------------------------------------------------------
# exhaustive small tangles


def random_fitting(rng, t, j, max_inner=3, max_points=16, need_inner=False):
    """A random tangle that can be glued into internal disc ``j`` of ``t``."""
    k = t.inner[j].arity
    colour = base_region_color(t, j)
    while True:
        s = random_tangle(rng, outer_arity=k, max_inner=max_inner, max_points=max_points, shading=colour)
        if s.inner or not need_inner:
            return s


def random_triple(rng, max_inner=3, max_points=16):
    """``(t, j, s, jj, r)``: ``s`` fits disc ``j`` of ``t`` and ``r`` fits disc ``jj`` of ``s``."""
    while True:
        t = random_tangle(rng, max_inner=max_inner, max_points=max_points)
        if t.inner:
            break
    j = rng.randrange(len(t.inner))
    s = random_fitting(rng, t, j, max_inner, max_points, need_inner=True)
    jj = rng.randrange(len(s.inner))
    r = random_fitting(rng, s, jj, max_inner, max_points)
    return t, j, s, jj, r


def perfect_matchings(points):
    if not points:
        yield []
        return
    a = points[0]
    for i in range(1, len(points)):
        rest = points[1:i] + points[i + 1:]
        for m in perfect_matchings(rest):
            yield [(a, points[i])] + m


def _matchings_pruned(points, disc_of):
    """Perfect matchings with no two interleaved strands returning to the same disc."""
    own = defaultdict(list)

    def interleaves(a, b):
        for c, d in own[disc_of[a]]:
            if (a < c < b) != (a < d < b):
                return True
        return False

    def rec(rest, acc):
        if not rest:
            yield list(acc)
            return
        a = rest[0]
        for i in range(1, len(rest)):
            b = rest[i]
            same = disc_of[a] == disc_of[b]
            if same and interleaves(a, b):
                continue
            if same:
                own[disc_of[a]].append((a, b))
            acc.append((a, b))
            yield from rec(rest[1:i] + rest[i + 1:], acc)
            acc.pop()
            if same:
                own[disc_of[a]].pop()

    yield from rec(list(points), [])


def _raw_planar(arities, partner):
    """Euler check on flat arrays; disc 0 is the outer disc."""
    off = [0]
    for a in arities:
        off.append(off[-1] + 2 * a)
    disc_of = [d for d, a in enumerate(arities) for _ in range(2 * a)]
    seen = bytearray(off[-1])
    nfaces = [1 if a == 0 else 0 for a in arities]
    for c in range(off[-1]):
        if seen[c]:
            continue
        nfaces[disc_of[c]] += 1
        cur = c
        while not seen[cur]:
            seen[cur] = 1
            d = disc_of[cur]
            s = cur - off[d]
            end = off[d] + ((s + 1) % (2 * arities[d]) if d == 0 else s)
            q = partner[end]
            d2 = disc_of[q]
            cur = q if d2 == 0 else off[d2] + (q - off[d2] - 1) % (2 * arities[d2])
    root = list(range(len(arities)))

    def find(u):
        while root[u] != u:
            u = root[u]
        return u

    for x, y in enumerate(partner):
        root[find(disc_of[x])] = find(disc_of[y])
    comps = defaultdict(list)
    for d in range(len(arities)):
        comps[find(d)].append(d)
    return all(
        len(ds) - sum(arities[d] for d in ds) + sum(nfaces[d] for d in ds) == 2
        for ds in comps.values()
    )


def _swap_key(arities, pairs):
    """Smallest form under swapping two internal discs of equal arity."""
    key = tuple(sorted(tuple(sorted(p)) for p in pairs))
    if len(arities) == 3 and arities[1] == arities[2]:
        sw = {0: 0, 1: 2, 2: 1}
        other = tuple(sorted(tuple(sorted(((sw[a[0]], a[1]), (sw[b[0]], b[1])))) for a, b in pairs))
        key = min(key, other)
    return key


def all_small_tangles(max_inner=2, max_strands=6):
    """Every loop-free tangle with at most ``max_inner`` internal discs and ``max_strands`` strands.

    The outer base point is fixed at 0.  Planar matchings are found among
    all perfect matchings of the marked points, up to swapping two internal
    discs of equal arity.  Internal bases sit on point 0; any other base
    position is the same tangle under a rotated labelling.  Floating
    components are then placed in every way.  Each isotopy class comes out
    once, except for classes symmetric under a disc swap.
    """
    for n in range(max_inner + 1):
        for arities in itertools.product(range(max_strands + 1), repeat=n + 1):
            if sum(arities) > max_strands or (n == 2 and arities[1] > arities[2]):
                continue
            off = [0]
            for a in arities:
                off.append(off[-1] + 2 * a)
            names = [(OUTER if d == 0 else d - 1, p) for d, a in enumerate(arities) for p in range(2 * a)]
            keys = set()
            disc_of = [d for d, a in enumerate(arities) for _ in range(2 * a)]
            for m in _matchings_pruned(range(off[-1]), disc_of):
                partner = [0] * off[-1]
                for a, b in m:
                    partner[a], partner[b] = b, a
                if not _raw_planar(arities, partner):
                    continue
                keys.add(_swap_key(arities, [((_d0(names[a])), _d0(names[b])) for a, b in m]))
            for key in sorted(keys):
                strands = tuple((_d1(a), _d1(b)) for a, b in key)
                for shading in (WHITE, BLACK):
                    bare = Tangle(Disc(arities[0], 0 if arities[0] else None),
                                  tuple(Disc(a, 0 if a else None) for a in arities[1:]),
                                  strands, (), (), shading)
                    yield from _place_floating(bare)


def _d0(e):
    # library disc ids to 0-based slots (outer first)
    return (0 if e[0] == OUTER else e[0] + 1, e[1])


def _d1(e):
    return (OUTER if e[0] == 0 else e[0] - 1, e[1])


def _place_floating(bare):
    """Every nesting of the floating components, with internal bases on point 0.

    A floating component picks the face that becomes its outside and a host
    face on another component; the outside face of a floating component is
    merged into its host, so it cannot host anything itself.  Placements
    whose base regions come out black are dropped: the same tangle shows up
    under the labelling that starts one point later.
    """
    face, cycles = faces_of(bare)
    comps = components_of(bare)
    owner = {}
    for ci, c in enumerate(comps):
        for d in c:
            owner[d] = ci
    top = owner[OUTER]
    faces_by_comp = defaultdict(list)
    for fid, cyc in enumerate(cycles):
        faces_by_comp[owner[cyc[0][0]]].append(fid)
    floating = [ci for ci in range(len(comps)) if ci != top]
    choices = []
    for ci in floating:
        opts = []
        for ext in faces_by_comp[ci]:
            for cj in range(len(comps)):
                if cj != ci:
                    opts.extend((ext, host, cj) for host in faces_by_comp[cj])
        choices.append(opts)
    out = []
    for combo in itertools.product(*choices):
        exts = {ext for ext, _, _ in combo}
        if any(host in exts for _, host, _ in combo):
            continue
        parent = {ci: cj for ci, (_, _, cj) in zip(floating, combo)}
        ok = True
        for ci in floating:
            seen, cur = set(), ci
            while cur != top and ok:
                if cur in seen:
                    ok = False
                seen.add(cur)
                cur = parent[cur]
        if not ok:
            continue
        nesting = [(cycles[ext][0], cycles[host][0]) for ext, host, _ in combo]
        colour = _face_colours(bare, face, cycles, nesting)
        if all(d.arity == 0 or colour[face[(i, d.npoints - 1)]] == WHITE for i, d in enumerate(bare.inner)):
            out.append(Tangle(bare.outer, bare.inner, bare.strands, tuple(nesting), (), bare.shading))
    return out


def _face_colours(t, face, cycles, nesting):
    """Checkerboard colours of the faces: neighbouring corners of a disc alternate."""
    colour = {}
    k2 = t.outer.npoints
    start = face[(OUTER, k2 - 1 if k2 else 0)]
    colour[start] = t.shading
    host_of = {face[tuple(c)]: face[tuple(a)] for c, a in nesting}
    stack = [start]
    while True:
        while stack:
            f = stack.pop()
            for d, s in cycles[f]:
                n = t.disc(d).npoints
                if n == 0:
                    continue
                for s2 in ((s + 1) % n, (s - 1) % n):
                    g = face[(d, s2)]
                    if g not in colour:
                        colour[g] = flip(colour[f])
                        stack.append(g)
        todo = [(f, h) for f, h in host_of.items() if f not in colour and h in colour]
        if not todo:
            return colour
        for f, h in todo:
            colour[f] = colour[h]
            stack.append(f)


# ---------------------------------------------------------------------------
# weighted tangles


def random_weighted(rng, t=None, max_weight=3):
    from tanglekit.weighted import segments

    if t is None:
        t = random_tangle(rng)
    return WeightedTangle(
        t,
        {s: rng.randrange(max_weight + 1) for s in t.strands},
        {c: rng.randrange(max_weight + 1) for c in segments(t)},
        tuple(rng.randrange(1, max_weight + 1) for _ in t.loops),
    )


def genus0_encoding(wt):
    """Isotopy-invariant key of a disc-free weighted tangle, from raw data only."""
    t = wt.tangle
    face, cycles = faces_of(t)
    kids = defaultdict(list)
    top = defaultdict(list)
    for l, a in enumerate(t.loops):
        if a[0] == LOOP:
            kids[a[1]].append(l)
        else:
            top[face[tuple(a)]].append(l)

    def tree(l):
        return (wt.loop_weights[l], tuple(sorted(tree(c) for c in kids[l])))

    regions = tuple(sorted(
        (tuple(sorted(cycles[f])), tuple(sorted(tree(l) for l in top[f]))) for f in range(len(cycles))
    ))
    return (
        t.outer.arity,
        t.shading,
        tuple(sorted((a, b, w) for (a, b), w in wt.strand_weights.items())),
        tuple(sorted(wt.segment_weights.items())),
        regions,
    )


def _weighted_trees(s):
    """Rooted trees with positive vertex weights summing to ``s``, as nested tuples."""
    return [(w, f) for w in range(1, s + 1) for f in _weighted_forests(s - w)]


def _weighted_forests(budget):
    """Multisets of weighted trees with total weight ``budget``, as sorted tuples."""
    if budget in _FOREST_CACHE:
        return _FOREST_CACHE[budget]
    pool = [tr for s in range(1, budget + 1) for tr in _weighted_trees(s)]
    out = []

    def build(remaining, lo, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for i in range(lo, len(pool)):
            size = _tree_weight(pool[i])
            if size <= remaining:
                build(remaining - size, i, acc + [pool[i]])

    build(budget, 0, [])
    out = sorted({tuple(sorted(f)) for f in out})
    _FOREST_CACHE[budget] = out
    return out


def _tree_weight(tr):
    return tr[0] + sum(_tree_weight(c) for c in tr[1])


_FOREST_CACHE = {}


def brute_force_genus0(d):
    """Keys of all weighted genus-0 tangles of total weight ``d`` (shape x weights)."""
    keys = []
    for k in range(d):
        for pairs in noncrossing_matchings(k):
            strands = [((OUTER, a), (OUTER, b)) for a, b in pairs]
            for shading in (WHITE, BLACK):
                t = Tangle(Disc(k, 0 if k else None), (), tuple(strands), (), (), shading)
                face, cycles = faces_of(t)
                nstr = len(t.strands)
                segs = [(OUTER, s) for s in range(max(2 * k, 1))]
                nreg = len(cycles)
                for loop_budget in range(d + 1):
                    rest = d - loop_budget
                    # loop weight spread over regions
                    for spread in _spreads(loop_budget, nreg):
                        per_region = [_weighted_forests(b) for b in spread]
                        for forests in itertools.product(*per_region):
                            for ws in _spreads(rest, nstr + len(segs)):
                                sw = tuple(sorted(
                                    (a, b, w) for (a, b), w in zip(sorted(t.strands), ws[:nstr])))
                                gw = tuple(sorted(zip(segs, ws[nstr:])))
                                regions = tuple(sorted(
                                    (tuple(sorted(cycles[f])), tuple(sorted(forests[f])))
                                    for f in range(nreg)))
                                keys.append((k, shading, sw, gw, regions))
    return keys


def _spreads(total, slots):
    if slots == 0:
        if total == 0:
            yield ()
        return
    for v in range(total + 1):
        for rest in _spreads(total - v, slots - 1):
            yield (v,) + rest


# ---------------------------------------------------------------------------
# real maps


def random_map(rng, d, integer=False):
    def coeff():
        if integer:
            return rng.randint(-9, 9)
        return Fraction(rng.randint(-999, 999), 100)

    while True:
        p = [coeff() for _ in range(d + 1)]
        q = [coeff() for _ in range(d + 1)]
        if rng.random() < 0.3:
            q = [coeff() for _ in range(rng.randrange(1, d + 1))]
        try:
            f = RealRationalMap(p, q)
        except Exception:
            continue
        if f.degree == d:
            return f
