"""Zone graphs of automata extended with shared virtual clocks.

For a pair (A, B) both sides carry the same virtual block
``χ0 .. χ(|C_A|+|C_B|-1)``.  In A's matrix, clock ``C_A[i]`` sits at index
``1 + i`` and is shadowed by ``χi``; in B's matrix, ``C_B[i]`` is shadowed by
``χ(|C_A|+i)``.  Virtual clocks live in the trailing columns and are only
ever touched by :func:`sync_pair`.
"""

from typing import NamedTuple

from . import dbm
from .model import disjoint_clocks, ensure_valid, k_function

SYNCHRONIZED = "synchronized"
SEMI_SYNCHRONIZED = "semi_synchronized"
NEITHER = "neither"


class SymbolicState(NamedTuple):
    location: str
    zone: dbm.Dbm


class VcgContext:
    """One side of the pair: index maps, compiled constraints and ceilings."""

    def __init__(self, side, automaton, offset, n_virtual, own_k, virtual_k):
        self.side = side
        self.automaton = automaton
        self.n_orig = len(automaton.clocks)
        self.n_virtual = n_virtual
        self.dim = self.n_orig + n_virtual
        self.split = 1 + self.n_orig
        self.index = {c: 1 + i for i, c in enumerate(automaton.clocks)}
        # matrix index of the virtual partner of each original clock
        self.partner = [self.split + offset + i for i in range(self.n_orig)]
        # virtual-constraint clock t (1-based) -> matrix index here
        self.vmap = [0] + [self.split + t for t in range(n_virtual)]
        self.k = tuple(own_k) + tuple(virtual_k)
        self.k_raws = dbm.ceilings_raw(self.k)
        self.virtual_k = tuple(virtual_k)
        self.invariants = {loc.name: self.compile(loc.invariant) for loc in automaton.locations}
        self.guards = [self.compile(sw.guard) for sw in automaton.switches]
        self.resets = [sorted(self.index[c] for c in sw.resets) for sw in automaton.switches]

    def compile(self, atoms):
        return [(self.index[t.clock], t.op, t.constant) for t in atoms]

    def clock_names(self):
        own = list(self.automaton.clocks)
        return ["0"] + own + ["χ%d" % t for t in range(self.n_virtual)]

    def __repr__(self):
        return "VcgContext(%s, %s, %d+%d)" % (self.side, self.automaton.name, self.n_orig, self.n_virtual)


def make_contexts(a, b):
    """Build both contexts; ``b`` is clock-renamed first if names collide."""
    ensure_valid(a)
    ensure_valid(b)
    b = disjoint_clocks(a, b)
    k = k_function(a, b)
    n_virtual = len(a.clocks) + len(b.clocks)
    ctx_a = VcgContext("A", a, 0, n_virtual, k.a, k.virtual)
    ctx_b = VcgContext("B", b, len(a.clocks), n_virtual, k.b, k.virtual)
    return ctx_a, ctx_b


def initial_state(ctx):
    return SymbolicState(ctx.automaton.initial, dbm.zero_dbm(ctx.dim))


def epsilon_successor(ctx, s):
    zone = dbm.constrain_all(dbm.future(s.zone), ctx.invariants[s.location])
    if zone is None:  # pragma: no cover - s itself satisfies the invariant
        raise AssertionError("delay successor lost its source zone")
    return SymbolicState(s.location, zone)


def fire(ctx, zone, switch_id):
    """Target zone of ``switch_id`` from ``zone``, or None if disabled."""
    sw = ctx.automaton.switches[switch_id]
    z = dbm.constrain_all(zone, ctx.guards[switch_id])
    if z is None:
        return None
    z = dbm.reset(z, ctx.resets[switch_id])
    return dbm.constrain_all(z, ctx.invariants[sw.target])


def action_successors(ctx, s, action):
    """Enabled ``action`` switches from ``s`` as ``(switch id, target)`` pairs."""
    out = []
    for i, sw in enumerate(ctx.automaton.switches):
        if sw.source != s.location or sw.action != action:
            continue
        z = fire(ctx, s.zone, i)
        if z is not None:
            out.append((i, SymbolicState(sw.target, z)))
    return out


def _tied(d, c, p):
    return d.raw(c, p) == dbm.LE_ZERO and d.raw(p, c) == dbm.LE_ZERO


def classify(ctx, s):
    d = s.zone
    synced = True
    for i in range(ctx.n_orig):
        c = 1 + i
        if _tied(d, c, ctx.partner[i]):
            continue
        synced = False
        if not dbm.is_fixed_zero(d, c):
            return NEITHER
    return SYNCHRONIZED if synced else SEMI_SYNCHRONIZED


def extract_virtual_constraint(ctx, d):
    return dbm.extract_virtual(d, ctx.split)


def virtually_includes(ctx_a, d_a, ctx_b, d_b):
    """Virtual inclusion of ``d_a`` in ``d_b``."""
    return dbm.includes(extract_virtual_constraint(ctx_b, d_b), extract_virtual_constraint(ctx_a, d_a))


def virtually_equivalent(ctx_a, d_a, ctx_b, d_b):
    va = extract_virtual_constraint(ctx_a, d_a)
    vb = extract_virtual_constraint(ctx_b, d_b)
    return va == vb


def sync_set(ctx_a, s_a, ctx_b, s_b):
    """Virtual clocks (as 0-based virtual indices) whose partner is fixed at zero."""
    out = []
    for ctx, s in ((ctx_a, s_a), (ctx_b, s_b)):
        for i in range(ctx.n_orig):
            if dbm.is_fixed_zero(s.zone, 1 + i):
                out.append(ctx.partner[i] - ctx.split)
    return sorted(out)


def virtual_indices(ctx, virtual):
    return [ctx.split + t for t in virtual]


def sync_pair(ctx_a, s_a, ctx_b, s_b):
    """Reset every virtual clock whose partner is identically zero, on both sides."""
    r = sync_set(ctx_a, s_a, ctx_b, s_b)
    if not r:
        return s_a, s_b
    return (
        SymbolicState(s_a.location, dbm.reset(s_a.zone, virtual_indices(ctx_a, r))),
        SymbolicState(s_b.location, dbm.reset(s_b.zone, virtual_indices(ctx_b, r))),
    )


def normalized(ctx, s):
    return SymbolicState(s.location, dbm.k_normalize(s.zone, ctx.k, ctx.k_raws))
