# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled DBM kernels.  Same contract as ``_dbm_py``."""

ctypedef long long raw_t

cdef raw_t INF = (<raw_t>1) << 60
cdef raw_t LE_ZERO = 1


cdef inline raw_t _add(raw_t a, raw_t b) nogil:
    if a >= INF or b >= INF:
        return INF
    return ((a >> 1) + (b >> 1)) * 2 + (a & b & 1)


def add(raw_t a, raw_t b):
    return _add(a, b)


cdef bint _close(raw_t[::1] m, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef raw_t mik, mkj, s
    for k in range(size):
        for i in range(size):
            mik = m[i * size + k]
            if mik >= INF:
                continue
            for j in range(size):
                mkj = m[k * size + j]
                if mkj >= INF:
                    continue
                s = ((mik >> 1) + (mkj >> 1)) * 2 + (mik & mkj & 1)
                if s < m[i * size + j]:
                    m[i * size + j] = s
        if m[k * size + k] < LE_ZERO:
            return False
    for i in range(size):
        if m[i * size + i] < LE_ZERO:
            return False
    return True


def close(raw_t[::1] m, Py_ssize_t size):
    cdef bint ok
    with nogil:
        ok = _close(m, size)
    return ok


def tighten(raw_t[::1] m, Py_ssize_t size, Py_ssize_t i, Py_ssize_t j, raw_t b):
    cdef Py_ssize_t p, q
    cdef raw_t mji, mpi, left, mjq, s
    if b >= m[i * size + j]:
        return True
    mji = m[j * size + i]
    if mji < INF and _add(mji, b) < LE_ZERO:
        return False
    m[i * size + j] = b
    with nogil:
        for p in range(size):
            mpi = m[p * size + i]
            if mpi >= INF:
                continue
            left = _add(mpi, b)
            for q in range(size):
                mjq = m[j * size + q]
                if mjq >= INF:
                    continue
                s = ((left >> 1) + (mjq >> 1)) * 2 + (left & mjq & 1)
                if s < m[p * size + q]:
                    m[p * size + q] = s
    return True


def normalize(raw_t[::1] m, Py_ssize_t size, raw_t[::1] upper, raw_t[::1] lower):
    cdef Py_ssize_t i, j
    cdef raw_t v
    cdef bint changed = False
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            v = m[i * size + j]
            if v >= INF:
                continue
            if v > upper[i]:
                m[i * size + j] = INF
                changed = True
            elif v < lower[j]:
                m[i * size + j] = lower[j]
                changed = True
    return changed


def includes(raw_t[::1] outer, raw_t[::1] inner, Py_ssize_t length):
    cdef Py_ssize_t t
    for t in range(length):
        if inner[t] > outer[t]:
            return False
    return True
