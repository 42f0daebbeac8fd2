"""Programmatic automata used by several test modules."""

from tbisim.model import Atom, Location, Switch, TimedAutomaton, rename_clocks


def synthetic(p):
    """Waits up to ``p`` in l0, then either acts or silently moves on."""
    return TimedAutomaton(
        name="syn%d" % p,
        locations=(
            Location("l0", (Atom("x", "<=", p),)),
            Location("l1", (Atom("x", "<=", 1),)),
            Location("l2", (Atom("x", "<=", 1),)),
        ),
        initial="l0",
        alphabet=("a", "tau"),
        clocks=("x",),
        switches=(
            Switch("l0", "a", "l1", (), ("x",)),
            Switch("l0", "tau", "l2", (Atom("x", ">=", p),), ("x",)),
            Switch("l1", "tau", "l1", (Atom("x", ">=", 1),), ("x",)),
            Switch("l2", "tau", "l2", (Atom("x", ">=", 1),), ("x",)),
        ),
    )


CHAIN_CLOCKS = ("x", "y", "z")


def chain(length):
    """Linear chain whose zones interleave three clocks.

    Step ``i`` is guarded by one clock and resets the next, so the reachable
    zone at each location depends on the whole delay history.
    """
    locations = tuple(Location("l%d" % i) for i in range(length + 1))
    switches = []
    for i in range(length):
        c = CHAIN_CLOCKS[i % 3]
        nxt = CHAIN_CLOCKS[(i + 1) % 3]
        switches.append(Switch("l%d" % i, "e%d" % i, "l%d" % (i + 1), (Atom(c, "<=", i % 3 + 1),), (nxt,)))
    return TimedAutomaton(
        name="chain%d" % length,
        locations=locations,
        initial="l0",
        alphabet=tuple("e%d" % i for i in range(length)),
        clocks=CHAIN_CLOCKS,
        switches=tuple(switches),
    )


def renamed_copy(a, suffix="_copy"):
    return rename_clocks(a, {c: c + suffix for c in a.clocks})
