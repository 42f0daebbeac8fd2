"""Timed bisimulation check by contradiction search over paired VCGs.

The recursive functions return lists of virtual constraints.  An empty list
means no contradiction: the two symbolic states are virtually bisimilar.
A non-empty list describes the virtual valuations for which no bisimilar
partner exists.
"""

import json
import logging
import sys
import threading
import time
from dataclasses import dataclass, field

from . import dbm
from .constraints import (
    and_not,
    and_not_all,
    apply_vc,
    combine,
    extract_virtual_constraint,
    norm_vc,
    render_all,
)
from .revert import revert_action_trans, revert_epsilon_trans, revert_sync
from .vcg import (
    SymbolicState,
    action_successors,
    epsilon_successor,
    initial_state,
    make_contexts,
    normalized,
    sync_pair,
    virtually_equivalent,
)

log = logging.getLogger("tbisim")
TRACE = 5
logging.addLevelName(TRACE, "TRACE")

MAX_SWEEPS = 10000
STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 200000


class CheckerError(RuntimeError):
    """The search could not finish (limit reached or no progress)."""


class VisitedLimitExceeded(CheckerError):
    def __init__(self, limit, count):
        self.limit = limit
        self.count = count
        super().__init__("visited more than %d state pairs" % limit)


@dataclass
class Verdict:
    bisimilar: bool
    contradictions: list
    pairs_visited: int
    millis: float
    rendered: list = field(default_factory=list)

    def to_dict(self, with_time=True):
        out = {
            "bisimilar": self.bisimilar,
            "contradictions": self.rendered,
            "pairs_visited": self.pairs_visited,
        }
        if with_time:
            out["millis"] = round(self.millis, 3)
        return out

    def to_json(self, with_time=True):
        return json.dumps(self.to_dict(with_time), ensure_ascii=False)


class _Frame:
    """One pair on the current search path.

    ``low`` is the shallowest path position whose "assume bisimilar" entry
    this search relied on.  After the frame finishes, ``forward`` points to
    the frame it still depends on (or ``_SETTLED``) and ``failed`` records
    whether it found contradictions.
    """

    __slots__ = ("depth", "low", "active", "failed", "forward")

    def __init__(self, depth):
        self.depth = depth
        self.low = depth
        self.active = True
        self.failed = False
        self.forward = None


_SETTLED = object()


class Checker:
    """Holds both contexts and the visited set for one top-level query."""

    def __init__(self, a, b, normalize=True, max_visited=10**7, memo=True):
        self.ctx_a, self.ctx_b = make_contexts(a, b)
        self.k = self.ctx_a.virtual_k
        self.normalize = normalize
        self.max_visited = max_visited
        seen = set()
        self.alphabet = []
        for act in list(self.ctx_a.automaton.alphabet) + list(self.ctx_b.automaton.alphabet):
            if act not in seen:
                seen.add(act)
                self.alphabet.append(act)
        self.memo = memo
        self.visited = {}
        self.stack = []
        self.clean = {}
        self.clean_zones = {}
        self.found = {}
        self.pairs_visited = 0
        self.max_depth = 0

    def initial_states(self):
        return initial_state(self.ctx_a), initial_state(self.ctx_b)

    def evc_a(self, d):
        return extract_virtual_constraint(self.ctx_a, d)

    def evc_b(self, d):
        return extract_virtual_constraint(self.ctx_b, d)

    def norm(self, phi):
        return norm_vc(phi, self.k) if self.normalize else phi

    def _normalized(self, s_a, s_b):
        if self.normalize:
            return normalized(self.ctx_a, s_a), normalized(self.ctx_b, s_b)
        return s_a, s_b

    def _key(self, s_a, s_b):
        s_a, s_b = self._normalized(s_a, s_b)
        return (s_a.location, s_a.zone.key(), s_b.location, s_b.zone.key())

    def _covered(self, n_a, n_b):
        """A still-valid clean result for a pair of zones containing these."""
        for z_a, z_b, key in self.clean_zones.get((n_a.location, n_b.location), ()):
            if dbm.includes(z_a, n_a.zone) and dbm.includes(z_b, n_b.zone):
                if self._lookup(self.clean, key) is not None:
                    return True
        return False

    def _enter(self, key):
        self.pairs_visited += 1
        if self.pairs_visited > self.max_visited:
            raise VisitedLimitExceeded(self.max_visited, self.pairs_visited)
        frame = _Frame(len(self.stack))
        self.visited[key] = frame
        self.stack.append(frame)
        self.max_depth = max(self.max_depth, len(self.stack))
        return frame

    def _leave(self, key, frame, failed):
        del self.visited[key]
        self.stack.pop()
        frame.active = False
        frame.failed = failed
        frame.forward = self.stack[frame.low] if frame.low < frame.depth else _SETTLED
        if self.stack:
            self._depend(frame.low)

    def _depend(self, depth):
        if self.stack and depth < self.stack[-1].low:
            self.stack[-1].low = depth

    def _lookup(self, table, key):
        """Cached entry for ``key`` if the assumptions behind it still hold."""
        entry = table.get(key)
        if entry is None:
            return None
        frame, value = entry
        dep = frame.forward
        while dep is not _SETTLED:
            if dep.active:
                self._depend(dep.depth)
                return entry
            if dep.failed:
                del table[key]
                return None
            dep = dep.forward
        return entry

    def _inequivalence(self, s_a, s_b):
        va = self.evc_a(s_a.zone)
        vb = self.evc_b(s_b.zone)
        if va == vb:
            return []
        return and_not(va, vb) + and_not(vb, va)

    # -- unbounded check ----------------------------------------------------

    def check(self, s_a, s_b):
        """Contradictions between two semi-synchronized states."""
        if not virtually_equivalent(self.ctx_a, s_a.zone, self.ctx_b, s_b.zone):
            return self._inequivalence(s_a, s_b)
        e_a, e_b = sync_pair(self.ctx_a, s_a, self.ctx_b, s_b)
        eps_a = epsilon_successor(self.ctx_a, e_a)
        eps_b = epsilon_successor(self.ctx_b, e_b)
        if eps_a.zone != e_a.zone or eps_b.zone != e_b.zone:
            res = self.check(eps_a, eps_b)
            if not res:
                return []
            contra = revert_epsilon_trans(self.ctx_a, e_a.zone, eps_a.zone, res)
            contra += revert_epsilon_trans(self.ctx_b, e_b.zone, eps_b.zone, res)
            return revert_sync(self.ctx_a, s_a, self.ctx_b, s_b, contra)

        n_a, n_b = self._normalized(e_a, e_b)
        key = (n_a.location, n_a.zone.key(), n_b.location, n_b.zone.key())
        on_stack = self.visited.get(key)
        if on_stack is not None:
            self._depend(on_stack.depth)
            return []
        exact = (e_a.location, e_a.zone.key(), e_b.location, e_b.zone.key())
        if self.memo:
            if self._lookup(self.clean, key) is not None or self._covered(n_a, n_b):
                return []
            hit = self._lookup(self.found, exact)
            if hit is not None:
                return revert_sync(self.ctx_a, s_a, self.ctx_b, s_b, hit[1])
        if log.isEnabledFor(TRACE):
            log.log(TRACE, "%s| visit %s / %s", " " * len(self.stack), e_a.location, e_b.location)
        frame = self._enter(key)
        cont = []
        try:
            for act in self.alphabet:
                cont = self.check_outgoing(
                    e_a.zone,
                    e_b.zone,
                    action_successors(self.ctx_a, e_a, act),
                    action_successors(self.ctx_b, e_b, act),
                    self.check,
                )
                if cont:
                    break
        finally:
            self._leave(key, frame, bool(cont))
        if self.memo:
            if cont:
                self.found[exact] = (frame, cont)
            else:
                self.clean[key] = (frame, None)
                self.clean_zones.setdefault((n_a.location, n_b.location), []).append((n_a.zone, n_b.zone, key))
        if not cont:
            return []
        return revert_sync(self.ctx_a, s_a, self.ctx_b, s_b, cont)

    # -- bounded check ------------------------------------------------------

    def check_in_order(self, s_a, s_b, n):
        """Contradictions visible within ``n`` steps.

        Clean results depend on ``n``, so build the checker with ``memo=False``.
        """
        if n == 0 or not virtually_equivalent(self.ctx_a, s_a.zone, self.ctx_b, s_b.zone):
            return self._inequivalence(s_a, s_b)
        e_a, e_b = sync_pair(self.ctx_a, s_a, self.ctx_b, s_b)
        key = self._key(e_a, e_b)
        if key in self.visited:
            return []
        if log.isEnabledFor(TRACE):
            log.log(TRACE, "%s| visit %s / %s (n=%d)", " " * len(self.stack), e_a.location, e_b.location, n)
        frame = self._enter(key)
        result = []
        try:
            result = self._bounded_step(s_a, s_b, e_a, e_b, n)
        finally:
            self._leave(key, frame, bool(result))
        return result

    def _bounded_step(self, s_a, s_b, e_a, e_b, n):
        def func(t_a, t_b):
            return self.check_in_order(t_a, t_b, n - 1)

        eps_a = epsilon_successor(self.ctx_a, e_a)
        eps_b = epsilon_successor(self.ctx_b, e_b)
        res = func(eps_a, eps_b)
        if res:
            cond = revert_epsilon_trans(self.ctx_a, e_a.zone, eps_a.zone, res)
            cond += revert_epsilon_trans(self.ctx_b, e_b.zone, eps_b.zone, res)
            if cond:
                return revert_sync(self.ctx_a, s_a, self.ctx_b, s_b, cond)
        for act in self.alphabet:
            cont = self.check_outgoing(
                e_a.zone,
                e_b.zone,
                action_successors(self.ctx_a, e_a, act),
                action_successors(self.ctx_b, e_b, act),
                func,
            )
            if cont:
                return revert_sync(self.ctx_a, s_a, self.ctx_b, s_b, cont)
        return []

    # -- outgoing transitions -------------------------------------------------

    def check_outgoing(self, d_a, d_b, trans_a, trans_b, func):
        """Contradictions on the sources ``d_a``/``d_b`` caused by one action."""
        if not trans_a and not trans_b:
            return []
        if not trans_b or not trans_a:
            ctx, d, trans = (self.ctx_a, d_a, trans_a) if trans_a else (self.ctx_b, d_b, trans_b)
            out = []
            for sw, t in trans:
                r = revert_action_trans(ctx, d, sw, extract_virtual_constraint(ctx, t.zone))
                if r is not None:
                    out.append(r)
            return combine(out)

        rows, cols = len(trans_a), len(trans_b)
        found = [[[] for _ in range(cols)] for _ in range(rows)]
        finished = [[False] * cols for _ in range(rows)]
        for _ in range(MAX_SWEEPS):
            grew = False
            for i, (_, t_a) in enumerate(trans_a):
                for j, (_, t_b) in enumerate(trans_b):
                    if finished[i][j]:
                        continue
                    eq_a = apply_vc(self.ctx_a, t_a.zone, self.evc_b(t_b.zone))
                    eq_b = apply_vc(self.ctx_b, t_b.zone, self.evc_a(t_a.zone)) if eq_a is not None else None
                    if eq_a is None or eq_b is None:
                        cont = []
                    else:
                        cont = self.check_target_pair(
                            (t_a.location, eq_a), (t_b.location, eq_b), found[i][j], func
                        )
                    finished[i][j] = not cont
                    if cont:
                        grew = True
                        found[i][j] = found[i][j] + cont
            c = self.search_contradiction(d_a, d_b, trans_a, trans_b, found)
            if c:
                return c
            if self.no_contradiction_possible(d_a, d_b, trans_a, trans_b, found, finished):
                return []
            if not grew:
                raise CheckerError("contradiction matrix made no progress in a sweep")
        raise CheckerError("contradiction matrix did not settle after %d sweeps" % MAX_SWEEPS)

    def check_target_pair(self, target_a, target_b, found_cont, func):
        (l_a, z_a), (l_b, z_b) = target_a, target_b
        without = and_not_all(self.evc_a(z_a), found_cont)
        contradictions = []
        for phi in without:
            pa = apply_vc(self.ctx_a, z_a, phi)
            pb = apply_vc(self.ctx_b, z_b, phi)
            if pa is None or pb is None:  # pragma: no cover - phi is inside both
                continue
            contradictions += func(SymbolicState(l_a, pa), SymbolicState(l_b, pb))
        return combine([self.norm(c) for c in contradictions])

    # -- contradiction search --------------------------------------------------

    @staticmethod
    def _find_contradiction(ev, conts):
        result = [ev]
        for cl in conts:
            nxt = []
            for x in result:
                for y in cl:
                    z = dbm.intersect(x, y)
                    if z is not None:
                        nxt.append(z)
            result = nxt
            if not result:
                return []
        return combine(result)

    def search_contradiction(self, d_a, d_b, trans_a, trans_b, found):
        out = []
        ev_a = [self.evc_a(t.zone) for _, t in trans_a]
        ev_b = [self.evc_b(t.zone) for _, t in trans_b]
        for i, (sw, _) in enumerate(trans_a):
            conts = [found[i][j] + and_not(ev_a[i], ev_b[j]) for j in range(len(trans_b))]
            for phi in self._find_contradiction(ev_a[i], conts):
                r = revert_action_trans(self.ctx_a, d_a, sw, phi)
                if r is not None:
                    out.append(r)
        for j, (sw, _) in enumerate(trans_b):
            conts = [found[i][j] + and_not(ev_b[j], ev_a[i]) for i in range(len(trans_a))]
            for phi in self._find_contradiction(ev_b[j], conts):
                r = revert_action_trans(self.ctx_b, d_b, sw, phi)
                if r is not None:
                    out.append(r)
        return combine(out)

    def no_contradiction_possible(self, d_a, d_b, trans_a, trans_b, found, finished):
        worst = []
        for i, (_, t_a) in enumerate(trans_a):
            row = []
            for j, (_, t_b) in enumerate(trans_b):
                if finished[i][j]:
                    row.append(found[i][j])
                    continue
                na = self.norm(self.evc_a(t_a.zone))
                nb = self.norm(self.evc_b(t_b.zone))
                both = dbm.intersect(na, nb)
                row.append([both] if both is not None else [])
            worst.append(row)
        return not self.search_contradiction(d_a, d_b, trans_a, trans_b, worst)


def _run_with_stack(fn):
    """Run ``fn`` on a thread with a large stack so deep recursion is safe."""
    box = {}

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, RECURSION_LIMIT))
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised in the caller's thread
            box["error"] = exc

    old_size = threading.stack_size()
    threading.stack_size(STACK_BYTES)
    try:
        t = threading.Thread(target=target, name="tbisim-check")
        t.start()
    finally:
        threading.stack_size(old_size)
    t.join()
    if "error" in box:
        raise box["error"]
    return box["value"]


def check_bisimilar(a, b, order=None, normalize=True, max_visited=10**7, memo=True):
    """Decide timed bisimilarity of ``a`` and ``b``.

    With ``order`` set, only behaviour up to that many steps is compared.
    """
    memo = memo and order is None
    checker = Checker(a, b, normalize=normalize, max_visited=max_visited, memo=memo)
    s_a, s_b = checker.initial_states()
    start = time.perf_counter()
    if order is None:
        result = _run_with_stack(lambda: checker.check(s_a, s_b))
    else:
        result = _run_with_stack(lambda: checker.check_in_order(s_a, s_b, order))
    millis = (time.perf_counter() - start) * 1000.0
    log.info("checked %s vs %s: %d pairs, %.1f ms", a.name, b.name, checker.pairs_visited, millis)
    return Verdict(
        bisimilar=not result,
        contradictions=result,
        pairs_visited=checker.pairs_visited,
        millis=millis,
        rendered=render_all(result),
    )
