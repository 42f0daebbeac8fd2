"""Pull virtual constraints backwards through VCG steps."""

from . import dbm
from .constraints import apply_vc, combine, extract_virtual_constraint, intersect_all
from .vcg import sync_set, virtual_indices


def multiple_reset(d, d_split, clocks):
    """Valuations of ``d`` whose reset by ``clocks`` lands in ``d_split``.

    Clocks are peeled off in ascending order: reset one, recurse, then free
    it again and intersect with ``d``.
    """
    clocks = sorted(clocks)
    if not clocks:
        return d_split
    c = clocks[0]
    inner = multiple_reset(dbm.reset(d, [c]), d_split, clocks[1:])
    if inner is None:
        return None
    return dbm.intersect(d, dbm.free(inner, c))


def revert_action_trans(ctx, d, switch_id, phi_split):
    """Virtual constraint of the part of ``d`` that ``switch_id`` maps into ``phi_split``.

    Returns None when no such valuation exists.
    """
    dg = dbm.constrain_all(d, ctx.guards[switch_id])
    if dg is None:
        return None
    r = ctx.resets[switch_id]
    target = dbm.reset(dg, r)
    target = dbm.constrain_all(target, ctx.invariants[ctx.automaton.switches[switch_id].target])
    if target is None:
        return None
    split = apply_vc(ctx, target, phi_split)
    if split is None:
        return None
    pre = multiple_reset(dg, split, r)
    if pre is None:
        return None
    return extract_virtual_constraint(ctx, pre)


def revert_epsilon_trans(ctx, d, d_eps, splits):
    """For each split, the part of ``d`` that can delay into it."""
    out = []
    for phi in splits:
        q = apply_vc(ctx, d_eps, phi)
        if q is None:
            continue
        p = dbm.intersect(d, dbm.past(q))
        if p is not None:
            out.append(extract_virtual_constraint(ctx, p))
    return out


def revert_sync(ctx_a, s_a, ctx_b, s_b, phis):
    """Map constraints on the synchronized pair back onto the pre-sync pair."""
    if not phis:
        return []
    r = sync_set(ctx_a, s_a, ctx_b, s_b)
    if not r:
        return combine(intersect_all(phis, extract_virtual_constraint(ctx_a, s_a.zone)))
    out = []
    for ctx, s in ((ctx_a, s_a), (ctx_b, s_b)):
        idx = virtual_indices(ctx, r)
        post = dbm.reset(s.zone, idx)
        for phi in phis:
            split = apply_vc(ctx, post, phi)
            if split is None:
                continue
            pre = multiple_reset(s.zone, split, idx)
            if pre is not None:
                out.append(extract_virtual_constraint(ctx, pre))
    return combine(out)
