"""Deterministic SVG drawings of tangles.

Each connected component is drawn by a Tutte (barycentric) embedding of an
augmented graph: every disc gets a centre joined to its points and corner
vertices, every strand a midpoint, and every face a hub joined to its whole
boundary.  The augmented graph is internally triangulated, so with the
outer boundary pinned to a circle the straight-line drawing is planar.
Floating components and loops are drawn recursively in a circle around the
hub of the region that holds them.  Faces are painted parent first, so
nested pieces cover their surroundings.
"""
from __future__ import annotations

import math

import numpy as np

from .tangle import BLACK, OUTER, WHITE, canonicalize, ensure_valid
from .weighted import WeightedTangle, canonicalize_weighted

SIZE = 240
RADIUS = 100.0
FILL = {WHITE: "#ffffff", BLACK: "#404040"}
DISC_FILL = "#d8d8d8"


def _num(v):
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class _Renderer:
    def __init__(self, t, wt=None):
        self.t = t
        self.wt = wt
        self.an = t._analysis
        self.out = []
        self.labels = []
        self.cx = self.cy = SIZE / 2
        an = self.an
        self.children = {}
        for c in range(len(an.comps)):
            if c != an.outer_comp:
                key = an.region_of_anchor(an.comp_parent[c])
                self.children.setdefault(key, []).append(("c", c))
        for l, a in enumerate(t.loops):
            self.children.setdefault(an.region_of_anchor(a), []).append(("l", l))
        for v in self.children.values():
            v.sort(key=lambda n: (n[0] != "l", n[1]))

    # coordinates: math orientation (counterclockwise positive) mapped to SVG
    def xy(self, p):
        return _num(self.cx + p[0]), _num(self.cy - p[1])

    def strand_at(self, e):
        b = self.an.partner[e]
        return (e, b) if e < b else (b, e)

    def face_cycle(self, fid):
        t, an = self.t, self.an
        cyc = []
        for d, s in an.faces[fid]:
            cyc.append(("cv", d, s))
            k2 = t.disc(d).npoints
            e = (d, s) if d == OUTER else (d, (s + 1) % k2)
            cyc.append(("pt",) + e)
            cyc.append(("mid",) + self.strand_at(e))
            cyc.append(("pt",) + an.partner[e])
        return cyc

    def layout(self, comp, fixed_cycle=None, center=(0.0, 0.0), radius=RADIUS):
        """Positions of every vertex of ``comp``; the exterior is pinned to a circle."""
        t, an = self.t, self.an
        edges = []
        discs = sorted(an.comps[comp])
        for d in discs:
            k2 = t.disc(d).npoints
            for p in range(k2):
                edges.append((("pt", d, p), ("cv", d, p)))
                edges.append((("cv", d, p), ("pt", d, (p + 1) % k2)))
                if d != OUTER:
                    edges.append((("ctr", d), ("pt", d, p)))
                    edges.append((("ctr", d), ("cv", d, p)))
        for a, b in an.comp_strands[comp]:
            m = ("mid", a, b)
            edges.append((("pt",) + a, m))
            edges.append((m, ("pt",) + b))
        ext = an.ext_face.get(comp) if comp != an.outer_comp else None
        for fid in an.comp_faces[comp]:
            if fid == ext:
                continue
            for v in self.face_cycle(fid):
                edges.append((("hub", fid), v))

        fixed = {}
        if comp == an.outer_comp:
            k2 = t.outer.npoints
            for p in range(k2):
                a = self.point_angle(p)
                fixed[("pt", OUTER, p)] = (radius * math.cos(a), radius * math.sin(a))
                a2 = self.point_angle(p + 0.5)
                fixed[("cv", OUTER, p)] = (radius * math.cos(a2), radius * math.sin(a2))
        else:
            cyc = fixed_cycle
            n = len(cyc)
            for i, v in enumerate(cyc):
                a = math.pi / 2 + 2 * math.pi * i / n
                fixed[v] = (center[0] + radius * math.cos(a), center[1] + radius * math.sin(a))
        return self.tutte(edges, fixed)

    def point_angle(self, p):
        k2 = self.t.outer.npoints
        # the base region faces left; labels run counterclockwise from the base point
        return math.pi + math.pi / k2 + 2 * math.pi * (p - self.t.outer.base) / k2

    def tutte(self, edges, fixed):
        nbrs = {}
        for a, b in edges:
            if a == b:
                continue
            nbrs.setdefault(a, set()).add(b)
            nbrs.setdefault(b, set()).add(a)
        free = sorted((v for v in nbrs if v not in fixed), key=repr)
        idx = {v: i for i, v in enumerate(free)}
        n = len(free)
        pos = dict(fixed)
        if n:
            A = np.zeros((n, n))
            B = np.zeros((n, 2))
            for v in free:
                i = idx[v]
                for u in nbrs[v]:
                    A[i, i] += 1
                    if u in idx:
                        A[i, idx[u]] -= 1
                    else:
                        B[i] += fixed[u]
            sol = np.linalg.solve(A, B)
            for v in free:
                pos[v] = (float(sol[idx[v], 0]), float(sol[idx[v], 1]))
        return pos

    def disc_orientation(self, pos, d):
        k2 = self.t.disc(d).npoints
        poly = []
        for p in range(k2):
            poly.append(pos[("pt", d, p)])
            poly.append(pos[("cv", d, p)])
        area = 0.0
        for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
            area += x1 * y2 - x2 * y1
        return area

    # -- painting -------------------------------------------------------

    def path(self, verts, pos, rim_radius=None, rim_center=(0.0, 0.0)):
        parts = []
        for i, v in enumerate(verts):
            x, y = self.xy(pos[v])
            if i == 0:
                parts.append(f"M{x} {y}")
                continue
            u = verts[i - 1]
            if rim_radius is not None and u[1] == OUTER and v[1] == OUTER and u[0] != "mid" and v[0] != "mid":
                (ux, uy), (vx, vy) = pos[u], pos[v]
                # SVG sweep flag 0 is counterclockwise once the y axis is flipped
                cross = (ux - rim_center[0]) * (vy - rim_center[1]) - (uy - rim_center[1]) * (vx - rim_center[0])
                sweep = 0 if cross > 0 else 1
                r = _num(rim_radius)
                parts.append(f"A{r} {r} 0 0 {sweep} {x} {y}")
            else:
                parts.append(f"L{x} {y}")
        parts.append("Z")
        return "".join(parts)

    def draw_component(self, comp, pos):
        t, an = self.t, self.an
        ext = an.ext_face.get(comp) if comp != an.outer_comp else None
        rim = RADIUS if comp == an.outer_comp else None
        for fid in sorted(an.comp_faces[comp]):
            if fid == ext:
                continue
            color = an.colors[("f", fid)]
            d = self.path(self.face_cycle(fid), pos, rim)
            self.out.append(f'<path d="{d}" fill="{FILL[color]}" stroke="none"/>')
        for a, b in sorted(an.comp_strands[comp]):
            pts = [pos[("pt",) + a], pos[("mid", a, b)], pos[("pt",) + b]]
            coords = " ".join(",".join(self.xy(p)) for p in pts)
            self.out.append(f'<polyline points="{coords}" fill="none" stroke="#000000" stroke-width="1.5"'
                            f' stroke-linejoin="round"/>')
            if self.wt is not None:
                self.label(pos[("mid", a, b)], self.wt.strand_weights[(a, b)], "#c00000")
        for d in sorted(an.comps[comp]):
            if d == OUTER:
                continue
            k2 = t.disc(d).npoints
            verts = []
            for p in range(k2):
                verts.append(("pt", d, p))
                verts.append(("cv", d, p))
            dpath = self.path(verts, pos)
            self.out.append(f'<path d="{dpath}" fill="{DISC_FILL}" stroke="#000000" stroke-width="1"/>')
            x, y = self.xy(pos[("ctr", d)])
            self.out.append(f'<text x="{x}" y="{y}" font-size="7" text-anchor="middle"'
                            f' dominant-baseline="central" font-family="monospace">{d}</text>')
            self.base_mark(pos[("pt", d, t.inner[d].base)])
            if self.wt is not None:
                for s in range(k2):
                    self.label(pos[("cv", d, s)], self.wt.segment_weights[(d, s)], "#0050c0")
        for fid in sorted(an.comp_faces[comp]):
            if fid == ext:
                continue
            self.draw_children(("f", fid), pos[("hub", fid)], self.room(fid, pos))

    def room(self, fid, pos):
        """Radius of a circle around the face hub that stays inside the face."""
        hub = np.array(pos[("hub", fid)])
        cyc = self.face_cycle(fid)
        best = math.inf
        for u, v in zip(cyc, cyc[1:] + cyc[:1]):
            a, b = np.array(pos[u]), np.array(pos[v])
            ab = b - a
            L = float(ab @ ab)
            s = 0.0 if L == 0 else min(1.0, max(0.0, float((hub - a) @ ab) / L))
            best = min(best, float(np.linalg.norm(hub - (a + s * ab))))
        return 0.8 * best

    def base_mark(self, p):
        x, y = self.xy(p)
        self.out.append(f'<circle cx="{x}" cy="{y}" r="2" fill="#c00000"/>')

    def label(self, p, w, color):
        x, y = self.xy(p)
        self.labels.append(f'<text x="{x}" y="{y}" font-size="8" fill="{color}" text-anchor="middle"'
                           f' font-family="monospace">{w}</text>')

    def draw_children(self, key, center, radius):
        kids = self.children.get(key, [])
        n = len(kids)
        if not n:
            return
        if n == 1:
            spots = [(center, 0.8 * radius)]
        else:
            r = radius * min(0.45, math.sin(math.pi / n) * 0.5)
            spots = []
            for i in range(n):
                a = math.pi / 2 + 2 * math.pi * i / n
                spots.append(((center[0] + 0.5 * radius * math.cos(a), center[1] + 0.5 * radius * math.sin(a)), r))
        for node, (c, r) in zip(kids, spots):
            if node[0] == "l":
                self.draw_loop(node[1], c, r)
            else:
                self.draw_floating(node[1], c, r)

    def draw_loop(self, l, c, r):
        inside = self.an.colors[("l", l)]
        x, y = self.xy(c)
        self.out.append(f'<circle cx="{x}" cy="{y}" r="{_num(r)}" fill="{FILL[inside]}" stroke="#000000"'
                        f' stroke-width="1.5"/>')
        if self.wt is not None:
            self.label((c[0], c[1] + r + 2), self.wt.loop_weights[l], "#008000")
        self.draw_children(("l", l), c, 0.8 * r)

    def draw_floating(self, comp, c, r):
        t, an = self.t, self.an
        discs = sorted(an.comps[comp])
        if len(discs) == 1 and t.disc(discs[0]).arity == 0:
            d = discs[0]
            x, y = self.xy(c)
            self.out.append(f'<circle cx="{x}" cy="{y}" r="{_num(0.6 * r)}" fill="{DISC_FILL}" stroke="#000000"'
                            f' stroke-width="1"/>')
            self.out.append(f'<text x="{x}" y="{y}" font-size="7" text-anchor="middle"'
                            f' dominant-baseline="central" font-family="monospace">{d}</text>')
            if self.wt is not None:
                self.label((c[0], c[1] - 0.6 * r - 6), self.wt.segment_weights[(d, 0)], "#0050c0")
            return
        cyc = self.face_cycle(an.ext_face[comp])
        pos = self.layout(comp, cyc, c, 0.9 * r)
        probe = next(d for d in discs if t.disc(d).arity)
        if self.disc_orientation(pos, probe) < 0:
            pos = self.layout(comp, cyc[::-1], c, 0.9 * r)
        self.draw_component(comp, pos)

    def svg(self):
        t, an = self.t, self.an
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}"'
                f' viewBox="0 0 {SIZE} {SIZE}">')
        x, y = self.xy((0.0, 0.0))
        self.out.append(f'<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>')
        if t.outer.arity == 0:
            color = an.colors[an.region_of_corner((OUTER, 0))]
            self.out.append(f'<circle cx="{x}" cy="{y}" r="{_num(RADIUS)}" fill="{FILL[color]}" stroke="none"/>')
            self.draw_children(an.region_of_corner((OUTER, 0)), (0.0, 0.0), 0.8 * RADIUS)
            if self.wt is not None:
                self.label((0.0, RADIUS + 6), self.wt.segment_weights[(OUTER, 0)], "#0050c0")
        else:
            pos = self.layout(an.outer_comp)
            self.draw_component(an.outer_comp, pos)
            self.base_mark(pos[("pt", OUTER, t.outer.base)])
            if self.wt is not None:
                for s in range(t.outer.npoints):
                    px, py = pos[("cv", OUTER, s)]
                    self.label((px * 1.1, py * 1.1 - 3), self.wt.segment_weights[(OUTER, s)], "#0050c0")
        self.out.append(f'<circle cx="{x}" cy="{y}" r="{_num(RADIUS)}" fill="none" stroke="#000000"'
                        f' stroke-width="2"/>')
        return "\n".join([head] + self.out + self.labels + ["</svg>"]) + "\n"


def render_svg(x):
    """SVG text for a tangle or weighted tangle; equal canonical forms give identical bytes."""
    if isinstance(x, WeightedTangle):
        ensure_valid(x.tangle)
        wt = canonicalize_weighted(x)
        return _Renderer(wt.tangle, wt).svg()
    ensure_valid(x)
    return _Renderer(canonicalize(x)).svg()


__all__ = ["render_svg"]
