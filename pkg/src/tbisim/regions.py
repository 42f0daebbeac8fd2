"""Clock regions: splitting zones into regions and a region-graph bisimulation oracle.

The oracle works on combinatorial region signatures and never touches the
DBM kernels, so it can cross-check the zone-based checker.
"""

from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

from . import dbm
from .dbm import INF
from .model import disjoint_clocks, ensure_valid, k_function


def _parts(value):
    value = Fraction(value)
    n = value.numerator // value.denominator
    return n, value - n


def region_equivalent(u, v, k):
    """Exact region equivalence of two valuations under ceilings ``k``."""
    pu = [_parts(x) for x in u]
    pv = [_parts(x) for x in v]
    for c in range(len(k)):
        over_u, over_v = Fraction(u[c]) > k[c], Fraction(v[c]) > k[c]
        if over_u != over_v:
            return False
        if over_u:
            continue
        if pu[c][0] != pv[c][0]:
            return False
        if (pu[c][1] == 0) != (pv[c][1] == 0):
            return False
    small = [c for c in range(len(k)) if Fraction(u[c]) <= k[c]]
    for c, d in combinations(small, 2):
        if (pu[c][1] <= pu[d][1]) != (pv[c][1] <= pv[d][1]):
            return False
        if (pu[d][1] <= pu[c][1]) != (pv[d][1] <= pv[c][1]):
            return False
    return True


# -- zone splitting ------------------------------------------------------------


def _clock_slices(c, kc):
    """Atom lists describing each integer slice of clock ``c``."""
    for m in range(kc + 1):
        yield [(c, "==", m)]
        if m < kc:
            yield [(c, ">", m), (c, "<", m + 1)]
    yield [(c, ">", kc)]


def split_clock_values(d, k):
    """Split ``d`` so every piece fixes each clock's integer slice."""
    zones = [d]
    for c in range(1, d.size):
        nxt = []
        for z in zones:
            for atoms in _clock_slices(c, k[c - 1]):
                piece = dbm.constrain_all(z, atoms)
                if piece is not None:
                    nxt.append(piece)
        zones = nxt
    return zones


def _fractional_clocks(z, k):
    """Clocks strictly between two integers (at most ``k``), with their ceiling."""
    out = []
    for c in range(1, z.size):
        up = z.raw(c, 0)
        lo = z.raw(0, c)
        if up >= INF or up & 1:
            continue
        top = up >> 1
        if top <= k[c - 1] and lo == dbm.strict(-(top - 1)):
            out.append((c, top))
    return out


def order_frac(d, k):
    """Split a sliced zone by the relative order of fractional parts."""
    zones = [d]
    top = dict(_fractional_clocks(d, k))
    for i, j in combinations(sorted(top), 2):
        diff = top[i] - top[j]
        nxt = []
        for z in zones:
            same = dbm.tighten_raw(z, i, j, dbm.weak(diff))
            if same is not None:
                same = dbm.tighten_raw(same, j, i, dbm.weak(-diff))
            for piece in (
                same,
                dbm.tighten_raw(z, j, i, dbm.strict(-diff)),
                dbm.tighten_raw(z, i, j, dbm.strict(diff)),
            ):
                if piece is not None:
                    nxt.append(piece)
        zones = nxt
    return zones


def extract_regions(d, k):
    """Partition ``d`` into its intersections with single regions."""
    out = []
    for z in split_clock_values(d, k):
        out.extend(order_frac(z, k))
    return out


# -- region signatures -----------------------------------------------------------


class Signature(NamedTuple):
    """Integer parts (None above the ceiling) and fractional-part ordering.

    ``zero`` holds the clocks with zero fraction; ``groups`` lists the other
    clocks at most their ceiling, by increasing fraction.
    """

    ints: tuple
    zero: frozenset
    groups: tuple


def initial_signature(n):
    return Signature((0,) * n, frozenset(range(n)), ())


def time_successor(sig, k):
    """The next region reached by letting time pass, or None if unbounded."""
    ints = list(sig.ints)
    if sig.zero:
        moved = set()
        for c in sig.zero:
            if ints[c] >= k[c]:
                ints[c] = None
            else:
                moved.add(c)
        groups = ((frozenset(moved),) if moved else ()) + sig.groups
        return Signature(tuple(ints), frozenset(), groups)
    if sig.groups:
        last = sig.groups[-1]
        for c in last:
            ints[c] += 1
        return Signature(tuple(ints), last, sig.groups[:-1])
    return None


def reset_signature(sig, clocks):
    if not clocks:
        return sig
    clocks = frozenset(clocks)
    ints = tuple(0 if c in clocks else v for c, v in enumerate(sig.ints))
    groups = tuple(g - clocks for g in sig.groups if g - clocks)
    return Signature(ints, sig.zero | clocks, groups)


def satisfies(sig, atom):
    """Truth of ``(clock index, op, m)`` on every valuation of the region."""
    c, op, m = atom
    n = sig.ints[c]
    if n is None:
        return op in (">", ">=")
    exact = c in sig.zero
    if op == "<":
        return n < m
    if op == "<=":
        return n <= m if exact else n < m
    if op == ">":
        return n > m if exact else n >= m
    if op == ">=":
        return n >= m
    raise ValueError(op)


def satisfies_all(sig, atoms):
    return all(satisfies(sig, t) for t in atoms)


def signature_point(sig, k):
    """A representative valuation of the region."""
    steps = len(sig.groups) + 1
    out = []
    for c, n in enumerate(sig.ints):
        if n is None:
            out.append(Fraction(k[c]) + Fraction(1, 2))
        elif c in sig.zero:
            out.append(Fraction(n))
        else:
            pos = next(i for i, g in enumerate(sig.groups) if c in g)
            out.append(n + Fraction(pos + 1, steps))
    return tuple(out)


def signature_of_zone(z, k):
    """Signature of the region holding a zone that lies inside one region.

    Pieces from ``extract_regions`` qualify: they are regions cut by the
    input zone.
    """
    ints = []
    zero = set()
    frac = []
    for c in range(1, z.size):
        up, lo = z.raw(c, 0), z.raw(0, c)
        if lo <= dbm.strict(-k[c - 1]):
            ints.append(None)
        elif up & 1 and lo == dbm.weak(-(up >> 1)):
            ints.append(up >> 1)
            zero.add(c - 1)
        elif up < INF and not up & 1 and lo == dbm.strict(1 - (up >> 1)):
            ints.append((up >> 1) - 1)
            frac.append(c)
        else:
            raise ValueError("zone is not inside a single region")
    groups = []
    for c in frac:
        placed = False
        for g in groups:
            r = next(iter(g))
            diff = ints[c - 1] - ints[r - 1]
            if z.raw(c, r) == dbm.weak(diff) and z.raw(r, c) == dbm.weak(-diff):
                g.add(c)
                placed = True
                break
        if not placed:
            groups.append({c})

    def less(g, h):
        a, b = next(iter(g)), next(iter(h))
        return z.raw(a, b) <= dbm.strict(ints[a - 1] - ints[b - 1])

    ordered = []
    for g in groups:
        pos = 0
        while pos < len(ordered) and less(ordered[pos], g):
            pos += 1
        ordered.insert(pos, g)
    return Signature(tuple(ints), frozenset(zero), tuple(frozenset(c - 1 for c in g) for g in ordered))


# -- bisimulation oracle -----------------------------------------------------------


class OracleLimit(RuntimeError):
    pass


class _Side:
    def __init__(self, a, offset):
        self.a = a
        index = {c: offset + i for i, c in enumerate(a.clocks)}
        self.inv = {loc.name: [(index[t.clock], t.op, t.constant) for t in loc.invariant] for loc in a.locations}
        self.moves = {}
        for sw in a.switches:
            guard = [(index[t.clock], t.op, t.constant) for t in sw.guard]
            resets = frozenset(index[c] for c in sw.resets)
            self.moves.setdefault(sw.source, []).append((sw.action, guard, resets, sw.target))

    def enabled(self, loc, sig):
        for act, guard, resets, target in self.moves.get(loc, ()):
            if satisfies_all(sig, guard):
                yield act, resets, target


def oracle_bisim(a, b, k=None, limit=2_000_000):
    """Timed bisimilarity via the product of region graphs."""
    ensure_valid(a)
    ensure_valid(b)
    b = disjoint_clocks(a, b)
    if k is None:
        kf = k_function(a, b)
        k = kf.a + kf.b
    k = tuple(k)
    side_a, side_b = _Side(a, 0), _Side(b, len(a.clocks))
    start = (a.initial, b.initial, initial_signature(len(k)))

    succ = {}
    todo = deque([start])
    seen = {start}
    while todo:
        node = todo.popleft()
        la, lb, sig = node
        info = {"bad": False, "delay": None, "a": [], "b": []}
        nxt = time_successor(sig, k)
        if nxt is not None:
            ok_a = satisfies_all(nxt, side_a.inv[la])
            ok_b = satisfies_all(nxt, side_b.inv[lb])
            if ok_a != ok_b:
                info["bad"] = True
            elif ok_a:
                info["delay"] = (la, lb, nxt)
        moves_a = list(side_a.enabled(la, sig))
        moves_b = list(side_b.enabled(lb, sig))
        # one entry per move of each side: the list of joint targets matching it
        joint = {}
        for ia, (act_a, ra, ta) in enumerate(moves_a):
            for ib, (act_b, rb, tb) in enumerate(moves_b):
                if act_a != act_b:
                    continue
                s2 = reset_signature(sig, ra | rb)
                a_ok = satisfies_all(reset_signature(sig, ra), side_a.inv[ta])
                b_ok = satisfies_all(reset_signature(sig, rb), side_b.inv[tb])
                if a_ok and b_ok:
                    joint[ia, ib] = (ta, tb, s2)
        for ia, (_, ra, ta) in enumerate(moves_a):
            if satisfies_all(reset_signature(sig, ra), side_a.inv[ta]):
                info["a"].append([joint[ia, ib] for ib in range(len(moves_b)) if (ia, ib) in joint])
        for ib, (_, rb, tb) in enumerate(moves_b):
            if satisfies_all(reset_signature(sig, rb), side_b.inv[tb]):
                info["b"].append([joint[ia, ib] for ia in range(len(moves_a)) if (ia, ib) in joint])
        succ[node] = info
        targets = list(joint.values())
        if info["delay"] is not None:
            targets.append(info["delay"])
        for t in targets:
            if t not in seen:
                seen.add(t)
                if len(seen) > limit:
                    raise OracleLimit("region product exceeds %d nodes" % limit)
                todo.append(t)

    good = set(succ)
    changed = True
    while changed:
        changed = False
        for node in list(good):
            info = succ[node]
            ok = not info["bad"]
            if ok and info["delay"] is not None and info["delay"] not in good:
                ok = False
            if ok:
                for options in info["a"] + info["b"]:
                    if not any(t in good for t in options):
                        ok = False
                        break
            if not ok:
                good.discard(node)
                changed = True
    return start in good


def signature_of_valuation(u, k):
    """Signature of the region holding the valuation ``u``."""
    ints = []
    zero = set()
    fracs = {}
    for c, x in enumerate(u):
        x = Fraction(x)
        if x > k[c]:
            ints.append(None)
            continue
        n, f = _parts(x)
        ints.append(n)
        if f == 0:
            zero.add(c)
        else:
            fracs.setdefault(f, set()).add(c)
    groups = tuple(frozenset(fracs[f]) for f in sorted(fracs))
    return Signature(tuple(ints), frozenset(zero), groups)
