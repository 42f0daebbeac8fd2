"""Difference bound matrices over a reference clock plus ``dim`` clocks.

Entry ``[i][j]`` bounds ``c_i - c_j``; index 0 is the reference clock that
is always zero.  Every public operation returns a canonical :class:`Dbm`,
or ``None`` when the resulting zone has no valuation.
"""

from array import array
from fractions import Fraction
from typing import NamedTuple

from . import _kernel
from ._kernel import INF, LE_ZERO

LT_ZERO = 0


class Bound(NamedTuple):
    """One matrix entry: ``c_i - c_j < value`` or ``<= value``.

    ``value`` is ``None`` for +inf, which is always strict.
    """

    value: object
    strict: bool

    @classmethod
    def infinity(cls):
        return cls(None, True)

    @property
    def is_inf(self):
        return self.value is None

    def pack(self):
        if self.value is None:
            return INF
        return 2 * self.value + (0 if self.strict else 1)

    @classmethod
    def unpack(cls, raw):
        if raw >= INF:
            return cls(None, True)
        return cls(raw >> 1, not (raw & 1))

    def __lt__(self, other):
        return self.pack() < other.pack()

    def __le__(self, other):
        return self.pack() <= other.pack()

    def __gt__(self, other):
        return self.pack() > other.pack()

    def __ge__(self, other):
        return self.pack() >= other.pack()

    def __add__(self, other):
        return Bound.unpack(_kernel.add(self.pack(), other.pack()))

    def __str__(self):
        if self.value is None:
            return "< inf"
        return ("< " if self.strict else "<= ") + str(self.value)


def weak(v):
    return 2 * v + 1


def strict(v):
    return 2 * v


def negate(raw):
    """Packed bound of the complement: not(a - b < v) is b - a <= -v."""
    return 1 - raw


class Dbm:
    """An immutable canonical DBM.  Use the module functions to build one."""

    __slots__ = ("dim", "size", "data", "_hash")

    def __init__(self, dim, data):
        self.dim = dim
        self.size = dim + 1
        self.data = data
        self._hash = None

    def __getitem__(self, ij):
        i, j = ij
        return Bound.unpack(self.data[i * self.size + j])

    def raw(self, i, j):
        return self.data[i * self.size + j]

    def key(self):
        return self.data.tobytes()

    def __eq__(self, other):
        return isinstance(other, Dbm) and self.dim == other.dim and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.key()))
        return self._hash

    def __repr__(self):
        return "Dbm(%d, %s)" % (self.dim, to_text(self).replace("\n", "; ") or "true")

    def copy_data(self):
        return array("q", self.data)


def _wrap(dim, data):
    return Dbm(dim, data)


def zero_dbm(dim):
    """The zone holding only the all-zero valuation."""
    return _wrap(dim, array("q", [LE_ZERO]) * ((dim + 1) * (dim + 1)))


def universe(dim):
    """All non-negative valuations."""
    size = dim + 1
    data = array("q", [INF]) * (size * size)
    for i in range(size):
        data[i * size + i] = LE_ZERO
        data[i] = LE_ZERO
    return _wrap(dim, data)


def from_bounds(dim, entries):
    """Build and canonicalize from a mapping ``(i, j) -> Bound``.

    Unlisted entries start unconstrained (subject to non-negativity).
    """
    size = dim + 1
    data = universe(dim).copy_data()
    for (i, j), b in entries.items():
        raw = b.pack() if isinstance(b, Bound) else b
        if raw < data[i * size + j]:
            data[i * size + j] = raw
    return canonicalize(_wrap(dim, data))


def canonicalize(d):
    data = d.copy_data()
    if not _kernel.close(data, d.size):
        return None
    return _wrap(d.dim, data)


def is_canonical(d):
    c = canonicalize(d)
    return c is not None and c.data == d.data


def tighten_raw(d, i, j, raw):
    """Intersect with ``c_i - c_j`` bounded by the packed bound ``raw``."""
    if raw >= d.data[i * d.size + j]:
        return d
    data = d.copy_data()
    if not _kernel.tighten(data, d.size, i, j, raw):
        return None
    return _wrap(d.dim, data)


def constrain(d, clock, op, m):
    """Intersect with the atomic constraint ``clock op m``.

    ``clock`` is a matrix index (1-based); ``op`` is one of ``<``, ``<=``,
    ``==``, ``>=``, ``>``.
    """
    if op == "<":
        return tighten_raw(d, clock, 0, strict(m))
    if op == "<=":
        return tighten_raw(d, clock, 0, weak(m))
    if op == ">":
        return tighten_raw(d, 0, clock, strict(-m))
    if op == ">=":
        return tighten_raw(d, 0, clock, weak(-m))
    if op == "==":
        d = tighten_raw(d, clock, 0, weak(m))
        return None if d is None else tighten_raw(d, 0, clock, weak(-m))
    raise ValueError("unknown relation %r" % (op,))


def constrain_all(d, atoms):
    """Intersect with ``(index, op, m)`` triples; stops early when empty."""
    for clock, op, m in atoms:
        d = constrain(d, clock, op, m)
        if d is None:
            return None
    return d


def intersect(a, b):
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    data = a.copy_data()
    changed = False
    for t, v in enumerate(b.data):
        if v < data[t]:
            data[t] = v
            changed = True
    if not changed:
        return a
    if not _kernel.close(data, a.size):
        return None
    return _wrap(a.dim, data)


def future(d):
    data = d.copy_data()
    size = d.size
    for i in range(1, size):
        data[i * size] = INF
    return _wrap(d.dim, data)


def past(d):
    data = d.copy_data()
    size = d.size
    for i in range(1, size):
        data[i] = LE_ZERO
    _kernel.close(data, size)
    return _wrap(d.dim, data)


def reset(d, clocks):
    if not clocks:
        return d
    data = d.copy_data()
    size = d.size
    for c in clocks:
        rc = c * size
        for j in range(size):
            data[rc + j] = data[j]
            data[j * size + c] = data[j * size]
        data[rc + c] = LE_ZERO
    return _wrap(d.dim, data)


def free(d, c):
    data = d.copy_data()
    size = d.size
    rc = c * size
    for j in range(size):
        if j != c:
            data[rc + j] = INF
            data[j * size + c] = data[j * size]
    data[c] = LE_ZERO
    data[rc + c] = LE_ZERO
    return _wrap(d.dim, data)


def includes(outer, inner):
    """True iff the zone of ``inner`` lies inside the zone of ``outer``."""
    if outer.dim != inner.dim:
        raise ValueError("dimension mismatch")
    return _kernel.includes(outer.data, inner.data, len(inner.data))


def ceilings_raw(k):
    """Packed ``(k, <=)`` / ``(-k, <)`` vectors; ``k`` lists clock ceilings."""
    upper = array("q", [weak(0)] + [weak(v) for v in k])
    lower = array("q", [strict(0)] + [strict(-v) for v in k])
    return upper, lower


def k_normalize(d, k, raws=None):
    """Extrapolate beyond the per-clock ceilings ``k`` (one per clock)."""
    upper, lower = raws if raws is not None else ceilings_raw(k)
    data = d.copy_data()
    if _kernel.normalize(data, d.size, upper, lower):
        _kernel.close(data, d.size)
        return _wrap(d.dim, data)
    return d


def extract_virtual(d, split):
    """Submatrix over the reference clock and the clocks ``split..dim``."""
    idx = [0] + list(range(split, d.size))
    size = d.size
    data = array("q", [d.data[i * size + j] for i in idx for j in idx])
    return _wrap(len(idx) - 1, data)


def embed(d, phi, mapping):
    """Intersect ``d`` with ``phi`` whose clock ``t`` is ``d``'s ``mapping[t]``.

    ``mapping[0]`` must be 0.
    """
    data = d.copy_data()
    size = d.size
    psize = phi.size
    changed = False
    for a in range(psize):
        ra = mapping[a] * size
        for b in range(psize):
            if a == b:
                continue
            v = phi.data[a * psize + b]
            t = ra + mapping[b]
            if v < data[t]:
                data[t] = v
                changed = True
    if not changed:
        return d
    if not _kernel.close(data, size):
        return None
    return _wrap(d.dim, data)


def is_fixed_zero(d, c):
    return d.raw(c, 0) == LE_ZERO and d.raw(0, c) == LE_ZERO


def contains(d, valuation):
    """Membership of a concrete valuation (sequence of ``dim`` numbers)."""
    vals = [0] + [Fraction(v) for v in valuation]
    size = d.size
    for i in range(size):
        for j in range(size):
            raw = d.data[i * size + j]
            if raw >= INF:
                continue
            diff = vals[i] - vals[j]
            bound = raw >> 1
            if raw & 1:
                if diff > bound:
                    return False
            elif diff >= bound:
                return False
    return True


def to_text(d, names=None):
    """One ``ci - cj <= z`` line per non-trivial entry, row-major."""
    if names is None:
        names = ["0"] + ["c%d" % i for i in range(1, d.size)]
    lines = []
    size = d.size
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            raw = d.data[i * size + j]
            if raw >= INF or (i == 0 and raw == LE_ZERO):
                continue
            b = Bound.unpack(raw)
            lines.append("%s - %s %s" % (names[i], names[j], b))
    return "\n".join(lines)
