"""Reader and writer for a single-process subset of the TChecker text format.

Grammar (one declaration per line, ``#`` starts a comment)::

    document   = { line } ;
    line       = system | clock | event | process | location | edge ;
    system     = "system:" ident ;
    clock      = "clock:1:" ident ;
    event      = "event:" ident ;
    process    = "process:" ident ;
    location   = "location:" ident ":" ident "{" attrs "}" ;
    edge       = "edge:" ident ":" ident ":" ident ":" ident "{" attrs "}" ;
    attrs      = [ attr { ":" attr } ] ;
    attr       = key ":" value ;          (key: initial, invariant, provided, do)
    conj       = atom { "&&" atom } ;
    atom       = ident op nat ;           (op: <  <=  ==  >=  >)
    resets     = ident "=0" { "," ident "=0" } ;
"""

import re
from dataclasses import dataclass

from .model import Atom, Location, Switch, TimedAutomaton, validate

IDENT = r"[A-Za-z_][A-Za-z0-9_.']*"
_IDENT_RE = re.compile("^%s$" % IDENT)
_ATOM_RE = re.compile(r"^\s*(%s)\s*(<=|>=|==|<|>)\s*(\d+)\s*$" % IDENT)
_RESET_RE = re.compile(r"^\s*(%s)\s*=\s*0\s*$" % IDENT)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self):
        return "%d:%d" % (self.line, self.column)


class ParseError(ValueError):
    def __init__(self, message, span):
        self.message = message
        self.span = span
        super().__init__("%s: %s" % (span, message))


class _Line:
    def __init__(self, number, text):
        self.number = number
        self.text = text

    def span(self, offset=0):
        return SourceSpan(self.number, offset + 1)

    def error(self, message, offset=0):
        return ParseError(message, self.span(offset))


def _strip_comment(text):
    i = text.find("#")
    return text if i < 0 else text[:i]


def _split_body(line, body, start):
    """Split ``head{attrs}`` into head fields and an attribute dict."""
    if "{" in body:
        open_at = body.index("{")
        if not body.rstrip().endswith("}"):
            raise line.error("missing closing brace", start + open_at)
        head = body[:open_at]
        inner = body[open_at + 1 : body.rstrip().rindex("}")]
        inner_start = start + open_at + 1
    else:
        head, inner, inner_start = body, "", start
    head_fields = head.strip().split(":")
    attrs = {}
    if inner.strip():
        parts = inner.split(":")
        if len(parts) % 2:
            raise line.error("attributes must be key:value pairs", inner_start)
        offset = inner_start
        for k in range(0, len(parts), 2):
            key = parts[k].strip()
            value = parts[k + 1]
            value_at = offset + len(parts[k]) + 1
            if key in attrs:
                raise line.error("duplicate attribute %r" % key, offset)
            attrs[key] = (value, value_at)
            offset = value_at + len(value) + 1
    return head_fields, attrs


def _lead(piece):
    return len(piece) - len(piece.lstrip())


def _parse_conj(line, value, at, clocks):
    atoms = []
    if not value.strip():
        return atoms
    offset = at
    for piece in value.split("&&"):
        m = _ATOM_RE.match(piece)
        if m is None:
            raise line.error("malformed constraint %r" % piece.strip(), offset + _lead(piece))
        clock, op, n = m.group(1), m.group(2), int(m.group(3))
        if clock not in clocks:
            raise line.error("undeclared clock %r" % clock, offset + piece.index(clock))
        if op == "==":
            atoms.append(Atom(clock, "<=", n))
            atoms.append(Atom(clock, ">=", n))
        else:
            atoms.append(Atom(clock, op, n))
        offset += len(piece) + 2
    return atoms


def _parse_resets(line, value, at, clocks):
    out = []
    if not value.strip():
        return out
    offset = at
    for piece in value.split(","):
        m = _RESET_RE.match(piece)
        if m is None:
            raise line.error("malformed reset %r" % piece.strip(), offset + _lead(piece))
        if m.group(1) not in clocks:
            raise line.error("undeclared clock %r" % m.group(1), offset + _lead(piece))
        if m.group(1) not in out:
            out.append(m.group(1))
        offset += len(piece) + 1
    return out


def _ident(line, name, at, what):
    if not _IDENT_RE.match(name):
        raise line.error("bad %s name %r" % (what, name), at)
    return name


def parse(text):
    """Parse a document into a validated :class:`TimedAutomaton`."""
    clocks = []
    events = []
    process = None
    process_line = None
    locations = []
    loc_lines = {}
    initial = None
    edges = []

    lines = text.splitlines()
    for number, raw in enumerate(lines, start=1):
        line = _Line(number, raw)
        body = _strip_comment(raw)
        if not body.strip():
            continue
        lead = len(body) - len(body.lstrip())
        body = body.strip()
        if ":" not in body:
            raise line.error("unknown directive %r" % body, lead)
        kind, rest = body.split(":", 1)
        rest_at = lead + len(kind) + 1
        if kind == "system":
            _ident(line, rest.strip(), rest_at, "system")
        elif kind == "clock":
            parts = rest.split(":")
            if len(parts) != 2 or parts[0].strip() != "1":
                raise line.error("expected clock:1:<id>", rest_at)
            name = _ident(line, parts[1].strip(), rest_at + len(parts[0]) + 1, "clock")
            if name in clocks or name in events:
                raise line.error("duplicate declaration %r" % name, rest_at)
            clocks.append(name)
        elif kind == "event":
            name = _ident(line, rest.strip(), rest_at, "event")
            if name in events or name in clocks:
                raise line.error("duplicate declaration %r" % name, rest_at)
            events.append(name)
        elif kind == "process":
            name = _ident(line, rest.strip(), rest_at, "process")
            if process is not None:
                raise line.error("only one process per file is supported", lead)
            process, process_line = name, line
        elif kind in ("location", "edge"):
            head, attrs = _split_body(line, rest, rest_at)
            want = 2 if kind == "location" else 4
            if len(head) != want:
                raise line.error("malformed %s declaration" % kind, rest_at)
            head = [h.strip() for h in head]
            if process is None:
                raise line.error("%s before process declaration" % kind, lead)
            if head[0] != process:
                raise line.error("undeclared process %r" % head[0], rest_at)
            if kind == "location":
                name = _ident(line, head[1], rest_at, "location")
                if name in loc_lines:
                    raise line.error("duplicate location %r" % name, rest_at)
                for key in attrs:
                    if key not in ("initial", "invariant"):
                        raise line.error("unknown location attribute %r" % key, attrs[key][1])
                inv = []
                if "invariant" in attrs:
                    inv = _parse_conj(line, attrs["invariant"][0], attrs["invariant"][1], clocks)
                if "initial" in attrs:
                    if attrs["initial"][0].strip():
                        raise line.error("initial takes no value", attrs["initial"][1])
                    if initial is not None:
                        raise line.error("second initial location %r" % name, rest_at)
                    initial = name
                loc_lines[name] = line
                locations.append(Location(name, tuple(inv)))
            else:
                for key in attrs:
                    if key not in ("provided", "do"):
                        raise line.error("unknown edge attribute %r" % key, attrs[key][1])
                guard = []
                if "provided" in attrs:
                    guard = _parse_conj(line, attrs["provided"][0], attrs["provided"][1], clocks)
                resets = []
                if "do" in attrs:
                    resets = _parse_resets(line, attrs["do"][0], attrs["do"][1], clocks)
                if head[3] not in events:
                    raise line.error("undeclared event %r" % head[3], rest_at)
                edges.append((line, Switch(head[1], head[3], head[2], tuple(guard), tuple(resets))))
        else:
            raise line.error("unknown directive %r" % kind, lead)

    end = _Line(max(1, len(lines)), "")
    if process is None:
        raise end.error("missing process")
    for line, sw in edges:
        for name in (sw.source, sw.target):
            if name not in loc_lines:
                raise line.error("undeclared location %r" % name)
    if initial is None:
        raise process_line.error("missing initial location")

    a = TimedAutomaton(
        name=process,
        locations=tuple(locations),
        initial=initial,
        alphabet=tuple(events),
        clocks=tuple(clocks),
        switches=tuple(sw for _, sw in edges),
    )
    problems = validate(a)
    if problems:
        raise loc_lines[initial].error(str(problems[0]))
    return a


def parse_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _conj(atoms):
    return "&&".join(str(t) for t in atoms)


def serialize(a):
    """Canonical text form; ``parse(serialize(a)) == a``."""
    out = ["system:%s" % a.name]
    out += ["clock:1:%s" % c for c in a.clocks]
    out += ["event:%s" % e for e in a.alphabet]
    out.append("process:%s" % a.name)
    for loc in a.locations:
        attrs = []
        if loc.name == a.initial:
            attrs.append("initial:")
        if loc.invariant:
            attrs.append("invariant:" + _conj(loc.invariant))
        out.append("location:%s:%s{%s}" % (a.name, loc.name, ":".join(attrs)))
    for sw in a.switches:
        attrs = []
        if sw.guard:
            attrs.append("provided:" + _conj(sw.guard))
        if sw.resets:
            attrs.append("do:" + ",".join("%s=0" % c for c in sw.resets))
        out.append("edge:%s:%s:%s:%s{%s}" % (a.name, sw.source, sw.target, sw.action, ":".join(attrs)))
    return "\n".join(out) + "\n"
