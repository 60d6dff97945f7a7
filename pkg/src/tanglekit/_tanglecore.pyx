# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled fast paths for validation, composition and canonical form.

Every entry point answers ``None`` when it cannot decide (odd input types,
invalid tangles, anything off the plain path).  The pure-Python code in
``tangle.py`` is the reference: it handles those cases and produces the
detailed errors.  Results here must agree with it exactly.

Flat numbering: disc ``0`` is the outer disc and disc ``i + 1`` is internal
disc ``i``.  Points and corners are numbered disc by disc.  An anchor is a
corner index ``>= 0`` or ``-(l + 1)`` for "inside loop ``l``".  A region is
a face id, or ``C + l`` for the inside of loop ``l`` (``C`` = corner count).
"""
from cpython.mem cimport PyMem_Malloc, PyMem_Free

cdef object Disc = None
cdef object make_tangle = None
cdef dict _disc_cache = {}

cdef int OUTER = -1
cdef int LOOP = -2
cdef int FAIL = -1000000000


def bind(disc_cls, maker):
    """Register the ``Disc`` class and a constructor for normalized tangles."""
    global Disc, make_tangle
    Disc = disc_cls
    make_tangle = maker


cdef inline int md(int a, int n):
    cdef int r = a % n
    return r + n if r < 0 else r


cdef object _disc(int a):
    d = _disc_cache.get(a)
    if d is None:
        d = Disc(a, 0 if a else None)
        _disc_cache[a] = d
    return d


cdef class _Map:
    """Rotation system, faces, components and regions of one tangle."""

    cdef int D, P, C, F, NC, L, NR
    cdef int outer_base      # base point of the outer disc, -1 if none
    cdef int *buf
    cdef int *arity
    cdef int *shift          # base for internal discs of positive arity, else 0
    cdef int *poff
    cdef int *coff
    cdef int *partner
    cdef int *pdisc
    cdef int *cdisc
    cdef int *face_of
    cdef int *face_list
    cdef int *face_start
    cdef int *face_comp
    cdef int *face_min
    cdef int *comp_of
    cdef int *ext_face
    cdef int *comp_parent
    cdef int *loop_anchor
    cdef int *face_region
    cdef int *color          # per region: 0 white, 1 black, -1 unset

    def __dealloc__(self):
        PyMem_Free(self.buf)

    cdef int alloc(self, int D, int P, int C, int L) except -1:
        cdef int total = 5 * D + 2 * (D + 1) + 2 * P + 7 * C + 1 + L + (C + L)
        self.D, self.P, self.C, self.L = D, P, C, L
        self.buf = <int *> PyMem_Malloc(max(total, 1) * sizeof(int))
        if self.buf == NULL:
            raise MemoryError()
        cdef int *p = self.buf
        self.arity = p; p += D
        self.shift = p; p += D
        self.comp_of = p; p += D
        self.ext_face = p; p += D
        self.comp_parent = p; p += D
        self.poff = p; p += D + 1
        self.coff = p; p += D + 1
        self.partner = p; p += P
        self.pdisc = p; p += P
        self.cdisc = p; p += C
        self.face_of = p; p += C
        self.face_list = p; p += C
        self.face_comp = p; p += C
        self.face_min = p; p += C
        self.face_region = p; p += C
        self.face_start = p; p += C + 1
        self.loop_anchor = p; p += L
        self.color = p
        return 0

    # -- construction --------------------------------------------------

    cdef int set_discs(self, list arities, list bases) except -1:
        """Offsets from arities; ``bases`` holds -1 for discs without one."""
        cdef int d, a, pp = 0, cc = 0, i
        for d in range(self.D):
            a = arities[d]
            self.arity[d] = a
            self.shift[d] = bases[d] if (d > 0 and a > 0) else 0
            self.poff[d] = pp
            self.coff[d] = cc
            for i in range(2 * a):
                self.pdisc[pp + i] = d
            for i in range(max(2 * a, 1)):
                self.cdisc[cc + i] = d
            pp += 2 * a
            cc += max(2 * a, 1)
        self.poff[self.D] = pp
        self.coff[self.D] = cc
        for i in range(self.P):
            self.partner[i] = -1
        return 0

    cdef int trace(self):
        """Faces and components; returns 0 if the strands are malformed."""
        cdef int c0, cur, d, s, k2, endp, q, d2, qp, pos = 0, F = 0, best
        cdef int i, r1, r2, x, nc
        for i in range(self.C):
            self.face_of[i] = -1
        for c0 in range(self.C):
            if self.face_of[c0] >= 0:
                continue
            self.face_start[F] = pos
            cur = c0
            best = c0
            while self.face_of[cur] < 0:
                self.face_of[cur] = F
                self.face_list[pos] = cur
                pos += 1
                if cur < best:
                    best = cur
                d = self.cdisc[cur]
                s = cur - self.coff[d]
                k2 = 2 * self.arity[d]
                if k2 == 0:
                    break
                if d == 0:
                    endp = self.poff[d] + s
                else:
                    endp = self.poff[d] + (s + 1) % k2
                q = self.partner[endp]
                d2 = self.pdisc[q]
                qp = q - self.poff[d2]
                if d2 == 0:
                    cur = self.coff[0] + md(qp - 1, 2 * self.arity[0])
                else:
                    cur = self.coff[d2] + qp
            self.face_min[F] = best
            F += 1
        self.face_start[F] = pos
        self.F = F
        # components: union-find, then ids in order of smallest disc
        cdef int *uf = self.ext_face     # scratch, reset below
        for i in range(self.D):
            uf[i] = i
        for i in range(self.P):
            r1 = self.pdisc[i]
            r2 = self.pdisc[self.partner[i]]
            while uf[r1] != r1:
                r1 = uf[r1]
            while uf[r2] != r2:
                r2 = uf[r2]
            if r1 != r2:
                if r1 < r2:
                    uf[r2] = r1
                else:
                    uf[r1] = r2
        nc = 0
        for i in range(self.D):
            x = i
            while uf[x] != x:
                x = uf[x]
            if x == i:
                self.comp_parent[i] = nc   # scratch: root -> comp id
                nc += 1
            self.comp_of[i] = self.comp_parent[x]
        self.NC = nc
        for i in range(self.D):
            self.ext_face[i] = -1
            self.comp_parent[i] = FAIL
        for i in range(F):
            self.face_comp[i] = self.comp_of[self.cdisc[self.face_list[self.face_start[i]]]]
        return 1

    cdef int anchor_code(self, object a):
        """Anchor tuple -> code, or FAIL if it names nothing."""
        if type(a) is not tuple or len(a) != 2:
            return FAIL
        d, x = a
        if type(d) is not int or type(x) is not int:
            return FAIL
        cdef int di = d, xi = x
        if di == LOOP:
            return -(xi + 1) if 0 <= xi < self.L else FAIL
        if di < -1 or di >= self.D - 1:
            return FAIL
        di += 1
        if 0 <= xi < max(2 * self.arity[di], 1):
            return self.coff[di] + xi
        return FAIL

    cdef int region_of_anchor(self, int code):
        if code < 0:
            return self.C + (-code - 1)
        return self.face_region[self.face_of[code]]

    cdef int resolve_regions(self):
        """Face -> region; 0 on cyclic nesting."""
        cdef int f, cur, c, steps, key, a
        for f in range(self.F):
            cur = f
            steps = 0
            while True:
                c = self.face_comp[cur]
                if c != 0 and self.ext_face[c] == cur:
                    a = self.comp_parent[c]
                    if a < 0:
                        key = self.C + (-a - 1)
                        break
                    cur = self.face_of[a]
                    steps += 1
                    if steps > self.F + 1:
                        return 0
                else:
                    key = cur
                    break
            self.face_region[f] = key
        self.NR = self.C + self.L
        return 1

    cdef int shade(self, int outer_white):
        """Two-colour the regions; 0 on conflict or unreachable regions."""
        cdef int R = self.C + self.L
        cdef int nedge = 0, d, k2, p, i, r2, head, tail, r, e, want, c
        cdef int *eu
        cdef int *ev
        cdef int *deg
        cdef int *adj
        cdef int *queue
        cdef int m = self.P + self.L
        cdef int *tmp = <int *> PyMem_Malloc((4 * m + 2 * (R + 1) + R + 1) * sizeof(int))
        if tmp == NULL:
            raise MemoryError()
        eu = tmp
        ev = tmp + m
        adj = tmp + 2 * m
        deg = tmp + 4 * m
        queue = deg + R + 1
        try:
            for d in range(self.D):
                k2 = 2 * self.arity[d]
                for p in range(k2):
                    eu[nedge] = self.face_region[self.face_of[self.coff[d] + md(p - 1, k2)]]
                    ev[nedge] = self.face_region[self.face_of[self.coff[d] + p]]
                    nedge += 1
            for i in range(self.L):
                eu[nedge] = self.region_of_anchor(self.loop_anchor[i])
                ev[nedge] = self.C + i
                nedge += 1
            for r in range(R + 1):
                deg[r] = 0
            for e in range(nedge):
                deg[eu[e] + 1] += 1
                deg[ev[e] + 1] += 1
            for r in range(R):
                deg[r + 1] += deg[r]
            # deg[r] is now the start of r's list; fill using queue as cursor
            for r in range(R):
                queue[r] = deg[r]
            for e in range(nedge):
                adj[queue[eu[e]]] = ev[e]
                queue[eu[e]] += 1
                adj[queue[ev[e]]] = eu[e]
                queue[ev[e]] += 1
            for r in range(R):
                self.color[r] = -1
            if self.arity[0]:
                r = self.face_region[self.face_of[self.coff[0] + md(self.outer_base - 1, 2 * self.arity[0])]]
            else:
                r = self.face_region[self.face_of[self.coff[0]]]
            self.color[r] = 0 if outer_white else 1
            head = 0
            tail = 1
            queue[0] = r
            while head < tail:
                r = queue[head]
                head += 1
                want = 1 - self.color[r]
                for i in range(deg[r], deg[r + 1]):
                    r2 = adj[i]
                    if self.color[r2] < 0:
                        self.color[r2] = want
                        queue[tail] = r2
                        tail += 1
                    elif self.color[r2] != want:
                        return 0
            for i in range(self.F):
                c = self.face_comp[i]
                if (c == 0 or self.ext_face[c] != i) and self.color[i] < 0:
                    return 0
            for i in range(self.L):
                if self.color[self.C + i] < 0:
                    return 0
            return 1
        finally:
            PyMem_Free(tmp)

    cdef int genus_ok(self):
        cdef int c, i
        cdef int *v = <int *> PyMem_Malloc(3 * self.NC * sizeof(int))
        if v == NULL:
            raise MemoryError()
        try:
            for c in range(3 * self.NC):
                v[c] = 0
            for i in range(self.D):
                v[3 * self.comp_of[i]] += 1
            for i in range(self.P):
                v[3 * self.comp_of[self.pdisc[i]] + 1] += 1
            for i in range(self.F):
                v[3 * self.face_comp[i] + 2] += 1
            for c in range(self.NC):
                # points / 2 = strands
                if v[3 * c] - v[3 * c + 1] // 2 + v[3 * c + 2] != 2:
                    return 0
            return 1
        finally:
            PyMem_Free(v)

    cdef int acyclic(self):
        cdef int node, cur, steps, a, limit = self.NC + self.L + 1
        # nodes: comps 1..NC-1 then loops NC..NC+L-1
        for node in range(1, self.NC + self.L):
            cur = node
            steps = 0
            while cur != 0:
                if cur < self.NC:
                    a = self.comp_parent[cur]
                else:
                    a = self.loop_anchor[cur - self.NC]
                if a < 0:
                    cur = self.NC + (-a - 1)
                else:
                    cur = self.comp_of[self.cdisc[a]]
                steps += 1
                if steps > limit:
                    return 0
        return 1


cdef _Map _load(object t):
    """Full analysis of ``t``; ``None`` unless ``t`` is a valid tangle."""
    shading = t.shading
    if shading != "w" and shading != "b":
        return None
    inner = t.inner
    discs = [t.outer]
    discs.extend(inner)
    cdef int D = len(discs), P = 0, C = 0, L = len(t.loops), d, a, b
    cdef list arities = []
    cdef list bases = []
    for disc in discs:
        ar = disc.arity
        if type(ar) is not int or ar < 0:
            return None
        a = ar
        bs = disc.base
        if a == 0:
            if bs is not None:
                return None
            bases.append(-1)
        else:
            if type(bs) is not int or not 0 <= bs < 2 * a:
                return None
            bases.append(bs)
        arities.append(a)
        P += 2 * a
        C += max(2 * a, 1)
    cdef _Map m = _Map()
    m.alloc(D, P, C, L)
    m.set_discs(arities, bases)
    m.outer_base = bases[0]
    cdef int x, y, n = D - 1
    for pair in t.strands:
        if type(pair) is not tuple or len(pair) != 2:
            return None
        ea, eb = pair
        x = _point(m, ea, n)
        y = _point(m, eb, n)
        if x < 0 or y < 0 or x == y or m.partner[x] >= 0 or m.partner[y] >= 0:
            return None
        m.partner[x] = y
        m.partner[y] = x
    for x in range(P):
        if m.partner[x] < 0:
            return None
    m.trace()
    if not m.genus_ok():
        return None
    # nesting: every floating component placed exactly once
    cdef int c, code
    for entry in t.nesting:
        corner, anchor = entry
        code = m.anchor_code(corner)
        if code < 0:
            return None
        c = m.comp_of[m.cdisc[code]]
        if c == 0 or m.ext_face[c] >= 0:
            return None
        m.ext_face[c] = m.face_of[code]
        a = m.anchor_code(anchor)
        if a == FAIL:
            return None
        m.comp_parent[c] = a
    for c in range(1, m.NC):
        if m.ext_face[c] < 0:
            return None
    for x in range(L):
        a = m.anchor_code(t.loops[x])
        if a == FAIL:
            return None
        m.loop_anchor[x] = a
    if not m.acyclic() or not m.resolve_regions():
        return None
    if not m.shade(shading == "w"):
        return None
    for d in range(1, D):
        if m.arity[d] > 0:
            b = m.coff[d] + md(m.shift[d] - 1, 2 * m.arity[d])
            if m.color[m.face_region[m.face_of[b]]] != 0:
                return None
    return m


cdef int _point(_Map m, object e, int n):
    if type(e) is not tuple or len(e) != 2:
        return -1
    d, p = e
    if type(d) is not int or type(p) is not int:
        return -1
    cdef int di = d, pi = p
    if di < -1 or di >= n:
        return -1
    di += 1
    if not 0 <= pi < 2 * m.arity[di]:
        return -1
    return m.poff[di] + pi


def is_valid(t):
    """``True`` if ``t`` is certainly valid, ``None`` if undecided."""
    try:
        return True if _load(t) is not None else None
    except (TypeError, ValueError, OverflowError):
        return None


# ---------------------------------------------------------------------------
# canonical form


cdef class _Canon:
    cdef _Map m
    cdef list children          # region -> list of nodes (comp c or NC + loop)
    cdef list comp_faces
    cdef list region_memo
    cdef list node_memo
    cdef list best
    cdef list bfs_memo
    cdef list newdisc
    cdef list newloop
    cdef int next_disc, next_loop

    def __init__(self, _Map m):
        self.m = m
        cdef int R = m.C + m.L, c, l, f
        self.children = [None] * R
        for c in range(1, m.NC):
            self._add_child(m.region_of_anchor(m.comp_parent[c]), c)
        for l in range(m.L):
            self._add_child(m.region_of_anchor(m.loop_anchor[l]), m.NC + l)
        self.comp_faces = [[] for _ in range(m.NC)]
        for f in range(m.F):
            (<list> self.comp_faces[m.face_comp[f]]).append(f)
        self.region_memo = [None] * R
        self.node_memo = [None] * (m.NC + m.L)
        self.best = [0] * m.NC
        self.bfs_memo = [None] * m.D
        self.newdisc = [0] * m.D
        self.newloop = [0] * m.L
        self.next_disc = 0
        self.next_loop = 0

    cdef void _add_child(self, int r, int node):
        kids = self.children[r]
        if kids is None:
            self.children[r] = [node]
        else:
            (<list> kids).append(node)

    cdef tuple bfs(self, int start):
        got = self.bfs_memo[start]
        if got is not None:
            return <tuple> got
        cdef _Map m = self.m
        cdef list order = [start]
        cdef list label = [-1] * m.D
        label[start] = 0
        cdef int i = 0, d, n, off, r, d2
        while i < len(order):
            d = order[i]
            i += 1
            n = 2 * m.arity[d]
            off = m.shift[d]
            for r in range(n):
                d2 = m.pdisc[m.partner[m.poff[d] + (off + r) % n]]
                if label[d2] < 0:
                    label[d2] = len(order)
                    order.append(d2)
        res = (order, label)
        self.bfs_memo[start] = res
        return res

    cdef tuple local_face(self, int f, list label):
        cdef _Map m = self.m
        cdef int i, c, d, s, n, lab, rel, bl = 1 << 30, bs = 1 << 30
        for i in range(m.face_start[f], m.face_start[f + 1]):
            c = m.face_list[i]
            d = m.cdisc[c]
            s = c - m.coff[d]
            if m.shift[d]:
                s = md(s - m.shift[d], 2 * m.arity[d])
            lab = label[d]
            if lab < bl or (lab == bl and s < bs):
                bl = lab
                bs = s
        return (bl, bs)

    cdef tuple comp_code(self, int c, int start):
        cdef _Map m = self.m
        cdef tuple ol = self.bfs(start)
        cdef list order = ol[0]
        cdef list label = ol[1]
        cdef list discs = []
        cdef int d, n, off, r, q, d2, qp
        for d in order:
            n = 2 * m.arity[d]
            off = m.shift[d]
            recs = []
            for r in range(n):
                q = m.partner[m.poff[d] + (off + r) % n]
                d2 = m.pdisc[q]
                qp = q - m.poff[d2]
                if m.shift[d2]:
                    qp = md(qp - m.shift[d2], 2 * m.arity[d2])
                recs.append((label[d2], qp, 0))
            discs.append((m.arity[d], tuple(recs), (0,) * max(n, 1)))
        cdef int ext = m.ext_face[c] if c != 0 else -1
        ext_id = self.local_face(ext, label) if ext >= 0 else (-1, -1)
        owned = []
        for f in self.comp_faces[c]:
            if f == ext:
                continue
            owned.append((self.local_face(f, label), self.region_code(f)))
        owned.sort()
        return (1, tuple(discs), ext_id, tuple(owned))

    cdef tuple region_code(self, int r):
        got = self.region_memo[r]
        if got is not None:
            return <tuple> got
        kids = self.children[r]
        if kids is None:
            res = ()
        else:
            res = tuple(sorted([self.node_code(x) for x in kids]))
        self.region_memo[r] = res
        return res

    cdef tuple node_code(self, int node):
        got = self.node_memo[node]
        if got is not None:
            return <tuple> got
        cdef _Map m = self.m
        cdef int d, c
        if node >= m.NC:
            res = (0, 0, self.region_code(m.C + node - m.NC))
        else:
            c = node
            res = None
            for d in range(m.D):
                if m.comp_of[d] != c:
                    continue
                cand = self.comp_code(c, d)
                if res is None or cand < res:
                    res = cand
                    self.best[c] = d
        self.node_memo[node] = res
        return res

    cdef void label_comp(self, int c, int start) except *:
        cdef _Map m = self.m
        cdef tuple ol = self.bfs(start)
        cdef int d
        for d in ol[0]:
            if d != 0:
                self.newdisc[d] = self.next_disc
                self.next_disc += 1
        cdef int ext = m.ext_face[c] if c != 0 else -1
        label = ol[1]
        regions = []
        for f in self.comp_faces[c]:
            if f != ext:
                regions.append((self.local_face(f, label), f))
        regions.sort()
        for _, f in regions:
            self.walk_region(f)

    cdef void walk_region(self, int r) except *:
        kids = self.children[r]
        if kids is None:
            return
        cdef _Map m = self.m
        cdef int node
        keyed = [(self.node_code(x), i, x) for i, x in enumerate(kids)]
        keyed.sort()
        for item in keyed:
            node = item[2]
            if node >= m.NC:
                self.newloop[node - m.NC] = self.next_loop
                self.next_loop += 1
                self.walk_region(m.C + node - m.NC)
            else:
                self.label_comp(node, self.best[node])

    cdef tuple corner(self, int c):
        cdef _Map m = self.m
        cdef int d = m.cdisc[c], s = c - m.coff[d]
        if d == 0:
            return (OUTER, s)
        if m.arity[d] == 0:
            return (self.newdisc[d], s)
        return (self.newdisc[d], md(s - m.shift[d], 2 * m.arity[d]))

    cdef tuple face_anchor(self, int f):
        cdef _Map m = self.m
        cdef int i
        best = None
        for i in range(m.face_start[f], m.face_start[f + 1]):
            x = self.corner(m.face_list[i])
            if best is None or x < best:
                best = x
        return best

    cdef tuple region_anchor(self, int r):
        if r >= self.m.C:
            return (LOOP, self.newloop[r - self.m.C])
        return self.face_anchor(r)

    cdef object run(self, object t):
        cdef _Map m = self.m
        self.label_comp(0, 0)
        cdef int d, x, y, dx, dy, c, l
        inner = [None] * (m.D - 1)
        for d in range(1, m.D):
            inner[self.newdisc[d]] = _disc(m.arity[d])
        strands = []
        for x in range(m.P):
            y = m.partner[x]
            if y < x:
                continue
            a = self.point(x)
            b = self.point(y)
            strands.append((a, b) if a <= b else (b, a))
        strands.sort()
        nesting = []
        for c in range(1, m.NC):
            nesting.append((self.face_anchor(m.ext_face[c]),
                            self.region_anchor(m.region_of_anchor(m.comp_parent[c]))))
        nesting.sort()
        loops = [None] * m.L
        for l in range(m.L):
            loops[self.newloop[l]] = self.region_anchor(m.region_of_anchor(m.loop_anchor[l]))
        return make_tangle(t.outer, tuple(inner), tuple(strands), tuple(nesting), tuple(loops), t.shading)

    cdef tuple point(self, int x):
        cdef _Map m = self.m
        cdef int d = m.pdisc[x], p = x - m.poff[d]
        if d == 0:
            return (OUTER, p)
        return (self.newdisc[d], md(p - m.shift[d], 2 * m.arity[d]))


def canonicalize(t):
    """Canonical form of a valid tangle, or ``None`` to defer to Python."""
    try:
        m = _load(t)
    except (TypeError, ValueError, OverflowError):
        return None
    if m is None:
        return None
    return _Canon(m).run(t)


# ---------------------------------------------------------------------------
# composition


cdef int _find(int *uf, int x):
    while uf[x] != x:
        uf[x] = uf[uf[x]]
        x = uf[x]
    return x


def compose(t, int j, s):
    """``t o_j s`` for valid ``t``, ``s`` of matching arity.

    Returns ``(tangle, colour)`` where ``colour`` is the shading of the
    region at disc ``j``; ``tangle`` is ``None`` if the shadings differ or
    the fast path declines.  Returns ``None`` when ``t`` or ``s`` cannot be
    analysed here.
    """
    try:
        mt = _load(t)
        ms = _load(s)
    except (TypeError, ValueError, OverflowError):
        return None
    if mt is None or ms is None:
        return None
    return _compose(mt, j, ms, t, s)


cdef object _compose(_Map mt, int j, _Map ms, object t, object s):
    cdef int J = j + 1, k = mt.arity[J], n2 = 2 * k
    cdef int bj = mt.coff[J] + (md(mt.shift[J] - 1, n2) if k else 0)
    colour = "w" if mt.color[mt.face_region[mt.face_of[bj]]] == 0 else "b"
    if colour != s.shading:
        return (None, colour)
    cdef int shift = (ms.outer_base - mt.shift[J]) if k else 0
    cdef int ns = ms.D - 1, nt_inner = mt.D - 1
    cdef int D = nt_inner + ns          # result discs, outer included
    cdef int d, i, x, y, p, side, lim, ra, rb
    # result disc of each input disc (-1 for the glued ones)
    cdef list tmap = [0] * mt.D
    cdef list smap = [0] * ms.D
    tmap[J] = -1
    smap[0] = -1
    for d in range(1, mt.D):
        if d != J:
            tmap[d] = d if d - 1 < j else d - 1 + ns
    for d in range(1, ms.D):
        smap[d] = j + d
    arities = [0] * D
    bases = [-1] * D
    inner_objs = [None] * (D - 1)
    arities[0] = mt.arity[0]
    bases[0] = mt.outer_base
    tin = t.inner
    sin = s.inner
    for d in range(1, mt.D):
        if d != J:
            arities[tmap[d]] = mt.arity[d]
            bases[tmap[d]] = mt.shift[d] if mt.arity[d] else -1
            inner_objs[tmap[d] - 1] = tin[d - 1]
    for d in range(1, ms.D):
        arities[smap[d]] = ms.arity[d]
        bases[smap[d]] = ms.shift[d] if ms.arity[d] else -1
        inner_objs[smap[d] - 1] = sin[d - 1]
    cdef int P = 0, C = 0
    for d in range(D):
        P += 2 * <int> arities[d]
        C += max(2 * <int> arities[d], 1)
    cdef int Lt = mt.L, Ls = ms.L
    # walk strands; loops through the glued boundary are counted after
    cdef int *tvis = <int *> PyMem_Malloc((mt.P + ms.P + 1) * sizeof(int))
    if tvis == NULL:
        raise MemoryError()
    cdef int *svis = tvis + mt.P
    cdef int Rt = mt.C + mt.L, Rs = ms.C + ms.L
    cdef int *uf = <int *> PyMem_Malloc((Rt + Rs + 1) * sizeof(int))
    if uf == NULL:
        PyMem_Free(tvis)
        raise MemoryError()
    cdef _Map r = _Map()
    cdef list new_loops = []
    try:
        for i in range(mt.P + ms.P):
            tvis[i] = 0
        # pass 1: count new loops to size the result
        for p in range(n2):
            x = mt.poff[J] + p
            if tvis[x]:
                continue
            if _chain_is_loop(mt, ms, J, x, shift, n2, tvis, svis):
                new_loops.append(p)
        for i in range(mt.P + ms.P):
            tvis[i] = 0
        r.alloc(D, P, C, Lt + Ls + len(new_loops))
        r.set_discs(arities, bases)
        r.outer_base = mt.outer_base
        # pass 2: strands with a free end
        for side in range(2):
            lim = mt.P if side == 0 else ms.P
            for x in range(lim):
                if side == 0:
                    if mt.pdisc[x] == J or tvis[x]:
                        continue
                else:
                    if ms.pdisc[x] == 0 or svis[x]:
                        continue
                y = _walk(mt, ms, J, side, x, shift, n2, tvis, svis)
                ra = _rpoint(mt, ms, r, tmap, smap, side, x)
                if y >= 0:
                    rb = _rpoint(mt, ms, r, tmap, smap, 0, y)
                else:
                    rb = _rpoint(mt, ms, r, tmap, smap, 1, -y - 1)
                r.partner[ra] = rb
                r.partner[rb] = ra
        # regions of both inputs, merged across the glued boundary
        for i in range(Rt + Rs):
            uf[i] = i
        for p in range(max(n2, 1)):
            x = _find(uf, mt.face_region[mt.face_of[mt.coff[J] + p]])
            y = _find(uf, Rt + ms.face_region[ms.face_of[ms.coff[0] + (md(p + shift, n2) if n2 else 0)]])
            if x != y:
                uf[x] = y
        loop_sides = []
        for i in range(Lt):
            loop_sides.append((_find(uf, mt.region_of_anchor(mt.loop_anchor[i])), _find(uf, mt.C + i)))
        for i in range(Ls):
            loop_sides.append((_find(uf, Rt + ms.region_of_anchor(ms.loop_anchor[i])),
                               _find(uf, Rt + ms.C + i)))
        for p in new_loops:
            loop_sides.append((_find(uf, mt.face_region[mt.face_of[mt.coff[J] + md(p - 1, n2)]]),
                               _find(uf, mt.face_region[mt.face_of[mt.coff[J] + p]])))
        # corner labels of the result
        corner_label = [0] * C
        for d in range(mt.D):
            if d == J:
                continue
            for i in range(max(2 * mt.arity[d], 1)):
                corner_label[r.coff[<int> (0 if d == 0 else tmap[d])] + i] = \
                    _find(uf, mt.face_region[mt.face_of[mt.coff[d] + i]])
        for d in range(1, ms.D):
            for i in range(max(2 * ms.arity[d], 1)):
                corner_label[r.coff[<int> smap[d]] + i] = \
                    _find(uf, Rt + ms.face_region[ms.face_of[ms.coff[d] + i]])
    finally:
        PyMem_Free(tvis)
        PyMem_Free(uf)
    return (_assemble(r, corner_label, loop_sides, Rt + Rs, t.outer, inner_objs, t.shading), colour)


cdef int _chain_is_loop(_Map mt, _Map ms, int J, int x, int shift, int n2, int *tvis, int *svis):
    """Follow the chain through point ``x`` of disc J; 1 if it closes up."""
    cdef int start = x, other, q
    while True:
        tvis[x] = 1
        other = mt.partner[x]
        tvis[other] = 1
        if mt.pdisc[other] != J:
            return 0
        q = ms.poff[0] + md(other - mt.poff[J] + shift, n2)
        svis[q] = 1
        other = ms.partner[q]
        svis[other] = 1
        if ms.pdisc[other] != 0:
            return 0
        x = mt.poff[J] + md(other - ms.poff[0] - shift, n2)
        if x == start:
            return 1


cdef int _walk(_Map mt, _Map ms, int J, int side, int x, int shift, int n2, int *tvis, int *svis):
    """Far end of the strand starting at free point ``x``.

    Returns a ``t`` point index, or ``-(index + 1)`` for an ``s`` point.
    """
    cdef int other
    while True:
        if side == 0:
            tvis[x] = 1
            other = mt.partner[x]
            tvis[other] = 1
            if mt.pdisc[other] != J:
                return other
            x = ms.poff[0] + md(other - mt.poff[J] + shift, n2)
            side = 1
        else:
            svis[x] = 1
            other = ms.partner[x]
            svis[other] = 1
            if ms.pdisc[other] != 0:
                return -other - 1
            x = mt.poff[J] + md(other - ms.poff[0] - shift, n2)
            side = 0


cdef int _rpoint(_Map mt, _Map ms, _Map r, list tmap, list smap, int side, int x):
    cdef int d, p
    if side == 0:
        d = mt.pdisc[x]
        p = x - mt.poff[d]
        return r.poff[<int> (0 if d == 0 else tmap[d])] + p
    d = ms.pdisc[x]
    p = x - ms.poff[d]
    return r.poff[<int> smap[d]] + p


cdef object _assemble(_Map r, list corner_label, list loop_sides, int nlabels,
                      object outer, list inner_objs, object shading):
    """Nesting forest of the result from region labels (see ``assemble``)."""
    r.trace()
    cdef int F = r.F, NC = r.NC, L = r.L, f, i, lab, c, a, b, node, nbr
    face_label = [0] * F
    for f in range(F):
        lab = corner_label[r.face_list[r.face_start[f]]]
        for i in range(r.face_start[f] + 1, r.face_start[f + 1]):
            if corner_label[r.face_list[i]] != lab:
                return None
        face_label[f] = lab
    # graph nodes: comps [0, NC), loops [NC, NC+L), labels [NC+L, ...)
    cdef int base = NC + L, N = base + nlabels
    graph = [None] * N
    for f in range(F):
        c = r.face_comp[f]
        lab = base + <int> face_label[f]
        _edge(graph, c, lab, f)
        _edge(graph, lab, c, f)
    for i in range(L):
        a, b = loop_sides[i]
        if a == b:
            return None
        _edge(graph, NC + i, base + a, 0)
        _edge(graph, base + a, NC + i, 0)
        _edge(graph, NC + i, base + b, 1)
        _edge(graph, base + b, NC + i, 1)
    parent = [-2] * N
    owner_node = [0] * N
    owner_tag = [0] * N
    place_label = [0] * base
    place_tag = [0] * base
    parent[0] = -1
    queue = [0]
    cdef int head = 0
    while head < len(queue):
        node = queue[head]
        head += 1
        nbrs = graph[node]
        if nbrs is None:
            continue
        for nbr, tag in nbrs:
            if nbr == parent[node]:
                continue
            if parent[nbr] != -2:
                return None
            parent[nbr] = node
            if nbr >= base:
                owner_node[nbr] = node
                owner_tag[nbr] = tag
            else:
                place_label[nbr] = node
                place_tag[nbr] = tag
            queue.append(nbr)
    for node in range(base):
        if parent[node] == -2:
            return None
    # anchors and nesting in the caller's numbering
    nesting = []
    loops = [None] * L
    for node in range(1, base):
        anchor = _owner_anchor(r, owner_node[<int> place_label[node]], owner_tag[<int> place_label[node]], NC)
        if node < NC:
            nesting.append((_corner_tuple(r, r.face_min[<int> place_tag[node]]), anchor))
        else:
            loops[node - NC] = anchor
    nesting.sort()
    strands = []
    cdef int x, y
    for x in range(r.P):
        y = r.partner[x]
        if y < x:
            continue
        pa = _point_tuple(r, x)
        pb = _point_tuple(r, y)
        strands.append((pa, pb) if pa <= pb else (pb, pa))
    strands.sort()
    return make_tangle(outer, tuple(inner_objs), tuple(strands), tuple(nesting), tuple(loops), shading)


cdef void _edge(list graph, int u, int v, int tag) except *:
    lst = graph[u]
    if lst is None:
        graph[u] = [(v, tag)]
    else:
        (<list> lst).append((v, tag))


cdef tuple _owner_anchor(_Map r, int node, int tag, int NC):
    if node >= NC:
        return (LOOP, node - NC)
    return _corner_tuple(r, r.face_min[tag])


cdef tuple _corner_tuple(_Map r, int c):
    cdef int d = r.cdisc[c]
    return (d - 1, c - r.coff[d])


cdef tuple _point_tuple(_Map r, int x):
    cdef int d = r.pdisc[x]
    return (d - 1, x - r.poff[d])
