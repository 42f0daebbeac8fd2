"""Pure-Python DBM kernels.

Entries are packed integers: ``2 * value + 1`` for a weak bound and
``2 * value`` for a strict one, so plain integer comparison orders bounds.
``INF`` stands for ``(<, +inf)``.  Matrices are flat row-major sequences
of length ``(n + 1) ** 2``.
"""

INF = 1 << 60
LE_ZERO = 1


def add(a, b):
    if a >= INF or b >= INF:
        return INF
    return ((a >> 1) + (b >> 1)) * 2 + (a & b & 1)


def close(m, size):
    """Floyd-Warshall in place.  Returns False when the zone is empty."""
    for k in range(size):
        rk = k * size
        for i in range(size):
            ri = i * size
            mik = m[ri + k]
            if mik >= INF:
                continue
            for j in range(size):
                mkj = m[rk + j]
                if mkj >= INF:
                    continue
                s = ((mik >> 1) + (mkj >> 1)) * 2 + (mik & mkj & 1)
                if s < m[ri + j]:
                    m[ri + j] = s
        if m[rk + k] < LE_ZERO:
            return False
    for i in range(size):
        if m[i * size + i] < LE_ZERO:
            return False
    return True


def tighten(m, size, i, j, b):
    """Intersect a canonical matrix with ``c_i - c_j < b`` and re-close.

    Only the O(n^2) update through the new edge is needed.  Returns False
    when the result is empty.
    """
    if b >= m[i * size + j]:
        return True
    mji = m[j * size + i]
    if mji < INF and add(mji, b) < LE_ZERO:
        return False
    m[i * size + j] = b
    for p in range(size):
        mpi = m[p * size + i]
        if mpi >= INF:
            continue
        left = add(mpi, b)
        rp = p * size
        rj = j * size
        for q in range(size):
            mjq = m[rj + q]
            if mjq >= INF:
                continue
            s = ((left >> 1) + (mjq >> 1)) * 2 + (left & mjq & 1)
            if s < m[rp + q]:
                m[rp + q] = s
    return True


def normalize(m, size, upper, lower):
    """Apply k-extrapolation in place.

    ``upper[i]`` is the packed ``(k_i, <=)`` and ``lower[j]`` the packed
    ``(-k_j, <)``.  Returns True when some entry changed; the caller then
    re-closes the matrix.
    """
    changed = False
    for i in range(size):
        ri = i * size
        ui = upper[i]
        for j in range(size):
            if i == j:
                continue
            v = m[ri + j]
            if v >= INF:
                continue
            if v > ui:
                m[ri + j] = INF
                changed = True
            elif v < lower[j]:
                m[ri + j] = lower[j]
                changed = True
    return changed


def includes(outer, inner, length):
    for t in range(length):
        if inner[t] > outer[t]:
            return False
    return True
