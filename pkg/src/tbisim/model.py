"""Diagonal-free timed safety automata."""

from dataclasses import dataclass, field, replace

RELATIONS = ("<", "<=", ">=", ">")


@dataclass(frozen=True)
class Atom:
    """``clock op constant``, or ``clock - other op constant`` when ``other`` is set.

    Difference atoms can be represented so that ``validate`` can report
    them, but the checker only accepts single-clock atoms.
    """

    clock: str
    op: str
    constant: int
    other: str | None = None

    def __str__(self):
        lhs = self.clock if self.other is None else "%s-%s" % (self.clock, self.other)
        return "%s%s%d" % (lhs, self.op, self.constant)


@dataclass(frozen=True)
class Location:
    name: str
    invariant: tuple = ()


@dataclass(frozen=True)
class Switch:
    source: str
    action: str
    target: str
    guard: tuple = ()
    resets: tuple = ()


@dataclass(frozen=True)
class TimedAutomaton:
    name: str
    locations: tuple
    initial: str
    alphabet: tuple
    clocks: tuple
    switches: tuple
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {loc.name: loc for loc in self.locations})

    def location(self, name):
        return self._index[name]

    def invariant(self, name):
        return self._index[name].invariant

    def outgoing(self, name, action):
        return [(i, s) for i, s in enumerate(self.switches) if s.source == name and s.action == action]

    def constants(self):
        """Yield every ``(clock, constant)`` pair occurring in a constraint."""
        for loc in self.locations:
            for atom in loc.invariant:
                yield atom.clock, atom.constant
        for sw in self.switches:
            for atom in sw.guard:
                yield atom.clock, atom.constant


@dataclass(frozen=True)
class Violation:
    where: str
    rule: str

    def __str__(self):
        return "%s: %s" % (self.where, self.rule)


class ValidationError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def _check_atoms(atoms, where, clocks, out):
    for atom in atoms:
        if atom.other is not None:
            out.append(Violation(where, "diagonal constraint %s" % atom))
        if atom.clock not in clocks or (atom.other is not None and atom.other not in clocks):
            out.append(Violation(where, "undeclared clock in %s" % atom))
        if atom.op not in RELATIONS:
            out.append(Violation(where, "unknown relation %r" % atom.op))
        if not isinstance(atom.constant, int) or atom.constant < 0:
            out.append(Violation(where, "constant must be a natural number in %s" % atom))


def _zero_satisfies(atoms):
    for atom in atoms:
        if atom.op == ">" or (atom.op == ">=" and atom.constant > 0):
            return False
    return True


def validate(a):
    """Return the list of violations; an empty list means the automaton is fine."""
    out = []
    clocks = set(a.clocks)
    names = [loc.name for loc in a.locations]
    if len(set(names)) != len(names):
        out.append(Violation(a.name, "duplicate location"))
    if len(clocks) != len(a.clocks):
        out.append(Violation(a.name, "duplicate clock"))
    if clocks & set(a.alphabet):
        out.append(Violation(a.name, "clock and action names overlap"))
    if a.initial not in names:
        out.append(Violation(a.name, "missing initial location"))
    for loc in a.locations:
        _check_atoms(loc.invariant, "location %s" % loc.name, clocks, out)
    if a.initial in names and not _zero_satisfies(a.invariant(a.initial)):
        out.append(Violation("location %s" % a.initial, "initial invariant unsatisfied by zero valuation"))
    for i, sw in enumerate(a.switches):
        where = "switch %d (%s -%s-> %s)" % (i, sw.source, sw.action, sw.target)
        if sw.source not in names or sw.target not in names:
            out.append(Violation(where, "unknown location"))
        if sw.action not in a.alphabet:
            out.append(Violation(where, "undeclared action"))
        for c in sw.resets:
            if c not in clocks:
                out.append(Violation(where, "reset of undeclared clock %s" % c))
        _check_atoms(sw.guard, where, clocks, out)
    return out


def ensure_valid(a):
    problems = validate(a)
    if problems:
        raise ValidationError(problems)
    return a


def rename_clocks(a, mapping):
    """Copy of ``a`` with clocks renamed by ``mapping`` (missing names kept)."""

    def ren(c):
        return mapping.get(c, c)

    def ren_atoms(atoms):
        return tuple(replace(t, clock=ren(t.clock), other=None if t.other is None else ren(t.other)) for t in atoms)

    return TimedAutomaton(
        name=a.name,
        locations=tuple(replace(loc, invariant=ren_atoms(loc.invariant)) for loc in a.locations),
        initial=a.initial,
        alphabet=a.alphabet,
        clocks=tuple(ren(c) for c in a.clocks),
        switches=tuple(
            replace(sw, guard=ren_atoms(sw.guard), resets=tuple(ren(c) for c in sw.resets)) for sw in a.switches
        ),
    )


def disjoint_clocks(a, b, suffix="_b"):
    """Rename clocks of ``b`` that collide with clocks (or actions) of ``a``."""
    taken = set(a.clocks) | set(a.alphabet) | set(b.alphabet)
    mapping = {}
    for c in b.clocks:
        if c in taken:
            new = c + suffix
            while new in taken or new in b.clocks:
                new += suffix
            mapping[c] = new
            taken.add(new)
    return rename_clocks(b, mapping) if mapping else b


@dataclass(frozen=True)
class KFunction:
    """Per-clock ceilings for both automata and for the shared virtual clocks."""

    a: tuple
    b: tuple

    @property
    def virtual(self):
        return self.a + self.b


def ceilings(a):
    """Max constant plus one for each clock of ``a`` (1 when unconstrained)."""
    top = {c: 0 for c in a.clocks}
    for c, m in a.constants():
        top[c] = max(top[c], m + 1)
    return tuple(max(1, top[c]) for c in a.clocks)


def k_function(a, b):
    """Ceilings for ``a``'s clocks, ``b``'s clocks, and the virtual block ``a + b``."""
    return KFunction(ceilings(a), ceilings(b))
