import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from brute import grid, in_free, in_future, in_past, in_reset, member
from tbisim import dbm
from tbisim.dbm import INF, LE_ZERO, Bound
from tbisim.regions import extract_regions, signature_of_valuation

K = 3
HORIZON = 8


def zone(dim, *atoms):
    return dbm.constrain_all(dbm.universe(dim), atoms)


# -- bounds ---------------------------------------------------------------------


def test_bound_order_and_packing():
    assert Bound(2, True) < Bound(2, False) < Bound(3, True) < Bound.infinity()
    assert Bound.unpack(Bound(-4, False).pack()) == Bound(-4, False)
    assert Bound.unpack(INF).is_inf
    assert Bound(1, False) + Bound(2, True) == Bound(3, True)
    assert (Bound(1, False) + Bound.infinity()).is_inf
    assert str(Bound(3, False)) == "<= 3"


def test_negate_complements_an_atom():
    # not (x - y < 2) is y - x <= -2
    assert Bound.unpack(dbm.negate(dbm.strict(2))) == Bound(-2, False)
    assert Bound.unpack(dbm.negate(dbm.weak(2))) == Bound(-2, True)


# -- operation examples -----------------------------------------------------------


def test_zero_dbm():
    z = dbm.zero_dbm(1)
    assert dbm.contains(z, [0]) and not dbm.contains(z, [0.5])
    assert dbm.zero_dbm(0).data.tolist() == [LE_ZERO]
    assert dbm.contains(dbm.zero_dbm(3), [0, 0, 0])


def test_canonicalize_derives_implied_bound():
    d = dbm.from_bounds(2, {(1, 0): Bound(2, False), (2, 1): Bound(1, False)})
    assert d[2, 0] == Bound(3, False)
    z = dbm.zero_dbm(2)
    assert dbm.canonicalize(z) == z
    assert zone(1, (1, "<=", 1), (1, ">=", 2)) is None


def test_constrain_examples():
    z = dbm.zero_dbm(2)
    assert dbm.constrain(z, 1, "<=", 5) == z
    assert dbm.constrain(z, 1, ">", 0) is None
    diag = dbm.future(z)  # x = y
    got = dbm.constrain(diag, 1, ">=", 1)
    assert got[1, 2] == got[2, 1] == Bound(0, False)
    assert got[0, 1] == Bound(-1, False)


def test_future_examples():
    z = dbm.zero_dbm(2)
    f = dbm.future(z)
    assert f[1, 0].is_inf and f[1, 2] == Bound(0, False)
    d = zone(2, (1, "==", 0), (2, "==", 1))
    f = dbm.future(d)
    assert f[2, 1] == Bound(1, False) and f[1, 2] == Bound(-1, False)
    assert dbm.future(f) == f


def test_past_examples():
    d = dbm.constrain(dbm.future(dbm.zero_dbm(2)), 1, ">=", 1)
    assert dbm.past(d) == dbm.future(dbm.zero_dbm(2))
    assert dbm.past(dbm.zero_dbm(2)) == dbm.zero_dbm(2)


def test_reset_examples():
    eq = dbm.future(dbm.zero_dbm(2))
    r = dbm.reset(eq, [1])
    assert r == zone(2, (1, "==", 0))
    assert dbm.reset(eq, []) == eq
    d = dbm.constrain(eq, 1, ">=", 1)
    assert dbm.reset(d, [1]) == zone(2, (1, "==", 0), (2, ">=", 1))


def test_free_examples():
    z = dbm.zero_dbm(2)
    f = dbm.free(z, 1)
    assert f == zone(2, (2, "==", 0))
    assert dbm.free(f, 1) == f
    d = zone(2, (1, "<=", 2), (2, ">", 1))
    assert dbm.reset(dbm.free(d, 1), [1]) == dbm.reset(d, [1])


def test_includes_examples():
    d = zone(2, (1, "<", 3), (2, ">=", 1))
    assert dbm.includes(d, d)
    assert dbm.includes(dbm.future(d), d)
    assert not dbm.includes(dbm.zero_dbm(1), zone(1, (1, "<=", 1)))


def test_k_normalize_examples():
    d = zone(2, (1, "==", 0), (2, ">=", 2))
    assert dbm.k_normalize(d, (2, 2)) == d
    assert dbm.k_normalize(d, (2, 1)) == zone(2, (1, "==", 0), (2, ">", 1))
    z = dbm.zero_dbm(3)
    assert dbm.k_normalize(z, (1, 1, 1)) == z
    n = dbm.k_normalize(zone(1, (1, ">", 7)), (3,))
    assert n == zone(1, (1, ">", 3))
    assert dbm.k_normalize(n, (3,)) == n


def test_extract_virtual_examples():
    d = dbm.zero_dbm(2)
    assert dbm.extract_virtual(d, 2) == dbm.zero_dbm(1)
    # x = 0 and chi0 = chi1 unbounded
    e = dbm.reset(dbm.future(dbm.zero_dbm(3)), [1])
    v = dbm.extract_virtual(e, 2)
    assert v == dbm.future(dbm.zero_dbm(2))
    assert dbm.extract_virtual(v, 1) == v


def test_to_text_is_row_major():
    d = zone(2, (1, "<=", 2), (2, ">", 1))
    assert dbm.to_text(d).splitlines() == [
        "0 - c2 < -1",
        "c1 - 0 <= 2",
        "c1 - c2 < 1",
    ]


# -- randomized operation sequences ----------------------------------------------------

OPS = ("constrain", "future", "past", "reset", "free", "intersect")

op_strategy = st.tuples(
    st.sampled_from(OPS),
    st.integers(1, 3),
    st.sampled_from(("<", "<=", ">=", ">")),
    st.integers(0, K),
)


def random_zone(rng, dim):
    d = dbm.universe(dim)
    for _ in range(rng.randint(1, 3)):
        nxt = dbm.constrain(d, rng.randint(1, dim), rng.choice(("<", "<=", ">=", ">")), rng.randint(0, K))
        if nxt is not None:
            d = nxt
    return d


def apply_op(d, op, rng):
    kind, c, rel, m = op
    c = (c - 1) % d.dim + 1
    if kind == "constrain":
        return dbm.constrain(d, c, rel, m), (lambda u: member(d, u) and _holds(u[c - 1], rel, m))
    if kind == "future":
        return dbm.future(d), (lambda u: in_future(d, u))
    if kind == "past":
        return dbm.past(d), (lambda u: in_past(d, u, HORIZON))
    if kind == "reset":
        return dbm.reset(d, [c]), (lambda u: in_reset(d, u, c, HORIZON))
    if kind == "free":
        return dbm.free(d, c), (lambda u: in_free(d, u, c, HORIZON))
    other = random_zone(rng, d.dim)
    return dbm.intersect(d, other), (lambda u: member(d, u) and member(other, u))


def _holds(x, rel, m):
    return {"<": x < m, "<=": x <= m, ">=": x >= m, ">": x > m}[rel]


def sample_points(d, rng, dim, count=8):
    pts = list(grid(dim, K + 1, 0.5))
    inside = [p for p in pts if member(d, p)] if d is not None else []
    chosen = rng.sample(inside, min(len(inside), count // 2))
    chosen += rng.sample(pts, min(len(pts), count - len(chosen)))
    return chosen


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    dim=st.integers(1, 3),
    start_zero=st.booleans(),
    ops=st.lists(op_strategy, min_size=1, max_size=5),
    seed=st.integers(0, 2**32),
)
def test_operation_sequences_match_definitions(dim, start_zero, ops, seed):
    check_sequence(dim, start_zero, ops, seed)


def random_ops(rng):
    return [
        (rng.choice(OPS), rng.randint(1, 3), rng.choice(("<", "<=", ">=", ">")), rng.randint(0, K))
        for _ in range(rng.randint(1, 5))
    ]


def check_sequence(dim, start_zero, ops, seed):
    """Run ``ops`` checking each result against the brute-force definition, then k-normalize."""
    rng = random.Random(seed)
    d = dbm.zero_dbm(dim) if start_zero else dbm.universe(dim)
    for op in ops:
        new, definition = apply_op(d, op, rng)
        if new is not None:
            assert dbm.is_canonical(new)
            assert dbm.canonicalize(dbm.canonicalize(new)) == new
        for u in sample_points(new, rng, dim):
            got = new is not None and member(new, u)
            assert got == definition(u), (op, u)
        if new is None:
            return
        d = new
    k = tuple(rng.randint(1, 2) for _ in range(dim))
    check_k_norm_soundness(d, k)


def region_signatures(d, k):
    # wide enough that every region reachable from constants <= K has a sample
    return {signature_of_valuation(u, k) for u in grid(d.dim, 2 * K + 2, 0.25) if member(d, u)}


def check_k_norm_soundness(d, k):
    n = dbm.k_normalize(d, k)
    assert dbm.includes(n, d)
    assert dbm.k_normalize(n, k) == n
    # every region touched by the normalized zone is touched by the zone itself
    for r in extract_regions(n, k):
        assert dbm.intersect(r, d) is not None
    if d.dim < 3:
        assert region_signatures(n, k) <= region_signatures(d, k)


@settings(max_examples=50, deadline=None)
@given(dim=st.integers(1, 2), seed=st.integers(0, 2**32))
def test_normalized_images_repeat(dim, seed):
    rng = random.Random(seed)
    k = tuple(rng.randint(1, 2) for _ in range(dim))
    d = dbm.zero_dbm(dim)
    seen = set()
    steps = 0
    while steps < 300:
        for op in random_ops(rng):
            steps += 1
            new, _ = apply_op(d, op, rng)
            if new is None:
                continue
            d = dbm.k_normalize(new, k)
            seen.add(d.key())
            # finitely many images: re-closure chains at most ``dim`` ceilings
            assert all(v >= INF or abs(v >> 1) <= dim * max(k) for v in d.data)
    assert len(seen) < 150


def test_equal_zones_have_identical_matrices():
    a = zone(2, (1, "<=", 2), (2, "<=", 2), (1, ">=", 1))
    b = dbm.from_bounds(2, {(1, 0): Bound(2, False), (0, 1): Bound(-1, False), (2, 0): Bound(2, False)})
    assert dbm.includes(a, b) and dbm.includes(b, a)
    assert a.data == b.data


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_contains_agrees_with_brute_member(dim):
    rng = random.Random(dim)
    for _ in range(20):
        d = random_zone(rng, dim)
        for u in grid(dim, 3, 0.5):
            assert dbm.contains(d, u) == member(d, u)
