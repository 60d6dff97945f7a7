# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_kernels_py``."""
from cpython.mem cimport PyMem_Free, PyMem_Malloc


def tl_stack(a, b, Py_ssize_t n, bint base_white=True):
    cdef Py_ssize_t m = 2 * n
    cdef Py_ssize_t start, cur, other, end, pos, q, p, i
    cdef int side
    cdef long black = 0, white = 0
    cdef bint inside_white
    if len(a) != m or len(b) != m:
        raise ValueError("partner lists must have 2n entries")
    # one buffer: a, b, out (m each) and the middle-row marks (n)
    cdef long *buf = <long *> PyMem_Malloc((3 * m + n + 1) * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef long *av = buf
    cdef long *bv = buf + m
    cdef long *out = buf + 2 * m
    cdef long *seen = buf + 3 * m
    try:
        for i in range(m):
            av[i] = a[i]
            bv[i] = b[i]
            out[i] = -1
        for i in range(n):
            seen[i] = 0
        for start in range(m):
            if out[start] != -1:
                continue
            side = 0 if start < n else 1
            cur = start
            while True:
                if side == 0:
                    other = av[cur]
                    if other < n:
                        end = other
                        break
                    pos = m - 1 - other
                    seen[pos] = 1
                    side = 1
                    cur = pos
                else:
                    other = bv[cur]
                    if other >= n:
                        end = other
                        break
                    pos = other
                    seen[pos] = 1
                    side = 0
                    cur = m - 1 - pos
            out[start] = end
            out[end] = start
        for p in range(n):
            if seen[p]:
                continue
            pos = p
            while True:
                seen[pos] = 1
                q = bv[pos]
                seen[q] = 1
                pos = m - 1 - av[m - 1 - q]
                if pos == p:
                    break
            inside_white = ((p + 1) % 2 == 0) == base_white
            if inside_white:
                white += 1
            else:
                black += 1
        return [out[i] for i in range(m)], black, white
    finally:
        PyMem_Free(buf)


def eval_grid(terms, xs, ys):
    cdef Py_ssize_t nt = len(terms), nx = len(xs), ny = len(ys)
    cdef Py_ssize_t r, c, t, k
    cdef double x, y, total, term
    import array
    ti = array.array("l", [int(tt[0]) for tt in terms])
    tj = array.array("l", [int(tt[1]) for tt in terms])
    tc = array.array("d", [float(tt[2]) for tt in terms])
    xa = array.array("d", [float(v) for v in xs])
    ya = array.array("d", [float(v) for v in ys])
    cdef long[:] ei = ti
    cdef long[:] ej = tj
    cdef double[:] cc = tc
    cdef double[:] xv = xa
    cdef double[:] yv = ya
    out = []
    cdef double[:] rowv
    for r in range(ny):
        y = yv[r]
        row = array.array("d", bytes(8 * nx))
        rowv = row
        for c in range(nx):
            x = xv[c]
            total = 0.0
            for t in range(nt):
                term = cc[t]
                for k in range(ei[t]):
                    term *= x
                for k in range(ej[t]):
                    term *= y
                total += term
            rowv[c] = total
        out.append(list(row))
    return out
