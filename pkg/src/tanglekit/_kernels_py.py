"""Pure-Python implementations of the hot kernels.

``_kernels.pyx`` mirrors these functions one for one; :mod:`tanglekit.kernels`
picks whichever is importable.
"""


def tl_stack(a, b, n, base_white=True):
    """Stack diagram ``b`` on top of diagram ``a`` (both on ``2n`` points).

    Diagrams are partner lists in disc labelling: bottom positions
    ``0..n-1`` are labels ``0..n-1``, top position ``i`` is label
    ``2n-1-i``.  Returns ``(partner, black_loops, white_loops)`` where loops
    are classified by the colour of the region just inside them; the region
    left of every diagram is white iff ``base_white``.
    """
    m = 2 * n
    out = [-1] * m
    seen_mid = [False] * n
    # free endpoints: a's bottom labels and b's top labels
    for start in range(m):
        if out[start] != -1:
            continue
        if start < n:
            side, cur = 0, start
        else:
            side, cur = 1, start
        while True:
            if side == 0:
                other = a[cur]
                if other < n:
                    end = other
                    break
                pos = m - 1 - other
                seen_mid[pos] = True
                side, cur = 1, pos
            else:
                other = b[cur]
                if other >= n:
                    end = other
                    break
                pos = other
                seen_mid[pos] = True
                side, cur = 0, m - 1 - pos
        out[start] = end
        out[end] = start
    black = 0
    white = 0
    for p in range(n):
        if seen_mid[p]:
            continue
        # p is the leftmost middle crossing of a new loop
        pos = p
        while True:
            seen_mid[pos] = True
            q = b[pos]
            seen_mid[q] = True
            pos = m - 1 - a[m - 1 - q]
            if pos == p:
                break
        # region just right of position p is region p + 1
        inside_white = ((p + 1) % 2 == 0) == base_white
        if inside_white:
            white += 1
        else:
            black += 1
    return out, black, white


def eval_grid(terms, xs, ys):
    """Evaluate ``sum c * x**i * y**j`` over ``terms = [(i, j, c)]`` on a grid.

    Returns a list of rows: ``out[r][c] = P(xs[c], ys[r])``.
    """
    out = []
    for y in ys:
        row = []
        for x in xs:
            total = 0.0
            for i, j, c in terms:
                total += c * x ** i * y ** j
            row.append(total)
        out.append(row)
    return out
