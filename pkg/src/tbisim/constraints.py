"""Virtual constraints: canonical zones over the virtual clocks only.

Sets of constraints are plain lists read as disjunctions.  ``and_not`` and
``combine`` always return pairwise-disjoint, non-empty members.
"""

from . import dbm
from ._kernel import add as add_bounds
from .dbm import INF, LE_ZERO
from .vcg import extract_virtual_constraint  # noqa: F401  (re-exported)


def apply_vc(ctx, d, phi):
    """``d`` restricted to the valuations whose virtual part satisfies ``phi``."""
    return dbm.embed(d, phi, ctx.vmap)


def conjoin(phi1, phi2):
    return dbm.intersect(phi1, phi2)


def and_not(phi1, phi2):
    """Split ``phi1 minus phi2`` into disjoint zones.

    Walks the atoms of ``phi2`` in row-major order: each atom that still cuts
    the remainder yields one piece (remainder and not atom), then the
    remainder is narrowed by the atom.
    """
    if dbm.intersect(phi1, phi2) is None:
        return [phi1]
    out = []
    cur = phi1
    size = phi2.size
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            atom = phi2.data[i * size + j]
            if atom >= INF or atom >= cur.data[i * size + j]:
                continue
            piece = dbm.tighten_raw(cur, j, i, dbm.negate(atom))
            if piece is not None:
                out.append(piece)
            cur = dbm.tighten_raw(cur, i, j, atom)
            if cur is None:  # pragma: no cover - phi1 and phi2 overlap
                return out
    return out


def and_not_all(phi, others):
    """``phi`` minus the union of ``others``."""
    pieces = [phi]
    for other in others:
        nxt = []
        for p in pieces:
            nxt.extend(and_not(p, other))
        pieces = nxt
        if not pieces:
            break
    return pieces


def combine(phis):
    """Disjoint cover of the union of ``phis``; later members are cut by earlier ones."""
    result = []
    for phi in phis:
        if phi is None:
            continue
        result.extend(and_not_all(phi, result))
    return result


def norm_vc(phi, k):
    return dbm.k_normalize(phi, k)


def intersect_all(phis, psi):
    out = []
    for phi in phis:
        r = dbm.intersect(phi, psi)
        if r is not None:
            out.append(r)
    return out


def contains(phis, valuation):
    return any(dbm.contains(p, valuation) for p in phis)


def _fmt_upper(raw):
    return ("<= " if raw & 1 else "< ") + str(raw >> 1)


def render(phi, names=None):
    """Human-readable form: equality classes with their bounds, then differences."""
    n = phi.dim
    if names is None:
        names = ["χ%d" % t for t in range(n)]
    size = phi.size
    m = phi.data

    def tied(i, j):
        return m[i * size + j] == LE_ZERO and m[j * size + i] == LE_ZERO

    rep = list(range(size))
    for i in range(size):
        for j in range(i):
            if rep[j] == j and tied(i, j):
                rep[i] = j
                break
    classes = {}
    for i in range(size):
        classes.setdefault(rep[i], []).append(i)

    parts = []
    for r, members in classes.items():
        label = " = ".join(names[i - 1] for i in members if i)
        if r == 0:
            if label:
                parts.append(label + " = 0")
            continue
        upper = m[r * size]
        lower = m[r]
        lo = ""
        if lower != LE_ZERO:
            lo = "%d %s " % (-(lower >> 1), "<=" if lower & 1 else "<")
        hi = "" if upper >= INF else " " + _fmt_upper(upper)
        if lo or hi or len(members) > 1:
            parts.append(lo + label + hi)

    reps = [r for r in classes if r != 0]
    for r in reps:
        for s in reps:
            if r == s:
                continue
            v = m[r * size + s]
            if v >= INF:
                continue
            if v < add_bounds(m[r * size], m[s]):
                parts.append("%s - %s %s" % (names[r - 1], names[s - 1], _fmt_upper(v)))
    return " ∧ ".join(parts) if parts else "true"


def render_all(phis, names=None):
    return [render(p, names) for p in phis]
