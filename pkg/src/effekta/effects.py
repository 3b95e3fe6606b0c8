"""Effect types as automata over operation names.

An effect is a non-empty set of finite and infinite operation sequences.
It is represented by a nondeterministic automaton with two acceptance
conditions: ``fin`` states accept finite words, ``buchi`` states accept
infinite words visited infinitely often.  The denotation is the union.

Everything here is immutable once built.  Constructions go through a
mutable ``_Builder`` that allows epsilon links, which are eliminated when
the automaton is frozen.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union as TUnion

import networkx as nx

Word = tuple[str, ...]


class EmptyEffect(ValueError):
    """Raised when a construction would denote the empty set."""


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class Atom:
    op: str


@dataclass(frozen=True)
class Concat:
    left: "EffectExpr"
    right: "EffectExpr"


@dataclass(frozen=True)
class Union:
    left: "EffectExpr"
    right: "EffectExpr"


@dataclass(frozen=True)
class Star:
    body: "EffectExpr"


@dataclass(frozen=True)
class Omega:
    body: "EffectExpr"


EffectExpr = TUnion[Eps, Atom, Concat, Union, Star, Omega]

EPS = Eps()


def show_effexpr(e: EffectExpr, prec: int = 0) -> str:
    """Concrete syntax; precedence is | (0) < . (1) < postfix (2)."""
    if isinstance(e, Eps):
        return "eps"
    if isinstance(e, Atom):
        return e.op
    if isinstance(e, Union):
        s = f"{show_effexpr(e.left, 0)} | {show_effexpr(e.right, 1)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, Concat):
        s = f"{show_effexpr(e.left, 1)} . {show_effexpr(e.right, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(e, Star):
        return f"{show_effexpr(e.body, 3)}*"
    if isinstance(e, Omega):
        return f"{show_effexpr(e.body, 3)}^w"
    raise TypeError(e)


# smart constructors used when an expression is rebuilt or recovered


def _cat(a: EffectExpr | None, b: EffectExpr | None) -> EffectExpr | None:
    if a is None or b is None:
        return None
    if isinstance(a, Eps):
        return b
    if isinstance(b, Eps):
        return a
    if isinstance(a, Omega):
        return a
    if isinstance(b, Omega) and a in (b.body, Star(b.body)):
        return b  # x . x^w and x* . x^w are x^w
    if isinstance(a, Concat):
        return _cat(a.left, _cat(a.right, b))
    return Concat(a, b)


def _alts(e: EffectExpr) -> list[EffectExpr]:
    if isinstance(e, Union):
        return _alts(e.left) + _alts(e.right)
    return [e]


def _alt(a: EffectExpr | None, b: EffectExpr | None) -> EffectExpr | None:
    if a is None:
        return b
    if b is None:
        return a
    parts: list[EffectExpr] = []
    for p in _alts(a) + _alts(b):
        if p not in parts:
            parts.append(p)
    if any(isinstance(p, Star) for p in parts) and EPS in parts:
        parts.remove(EPS)
    out = parts[0]
    for p in parts[1:]:
        out = Union(out, p)
    return out


def _star(a: EffectExpr | None) -> EffectExpr:
    if a is None or isinstance(a, Eps):
        return EPS
    if isinstance(a, Star):
        return a
    if isinstance(a, Union) and EPS in _alts(a):
        rest = [p for p in _alts(a) if p != EPS]
        if not rest:
            return EPS
        out = rest[0]
        for p in rest[1:]:
            out = Union(out, p)
        return _star(out)
    return Star(a)


# ---------------------------------------------------------------- automata


@dataclass(frozen=True)
class Lasso:
    """The ultimately periodic word ``stem . period^w``."""

    stem: Word
    period: Word

    def __post_init__(self) -> None:
        if not self.period:
            raise ValueError("lasso period must be non-empty")

    def canonical(self) -> "Lasso":
        stem, period = tuple(self.stem), tuple(self.period)
        n = len(period)
        for d in range(1, n + 1):
            if n % d == 0 and period[:d] * (n // d) == period:
                period = period[:d]
                break
        while stem and stem[-1] == period[-1]:
            stem = stem[:-1]
            period = period[-1:] + period[:-1]
        return Lasso(stem, period)

    def __str__(self) -> str:
        s = ".".join(self.stem) or "eps"
        return f"{s} . ({'.'.join(self.period)})^w"


@dataclass(frozen=True)
class EffectAutomaton:
    states: frozenset[int]
    alphabet: frozenset[str]
    transitions: frozenset[tuple[int, str, int]]
    initial: int
    fin: frozenset[int]
    buchi: frozenset[int]
    expr: EffectExpr | None = field(default=None, compare=False, repr=False)

    @cached_property
    def succ(self) -> dict[int, dict[str, frozenset[int]]]:
        out: dict[int, dict[str, set[int]]] = {q: {} for q in self.states}
        for p, a, q in self.transitions:
            out[p].setdefault(a, set()).add(q)
        return {p: {a: frozenset(qs) for a, qs in d.items()} for p, d in out.items()}

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.states)
        g.add_edges_from((p, q) for p, _, q in self.transitions)
        return g

    @cached_property
    def live_buchi(self) -> frozenset[int]:
        """Büchi states lying on a cycle."""
        return frozenset(q for q in self.buchi if q in _cyclic_nodes(self.graph))

    @cached_property
    def sup_length(self) -> float:
        """Supremum of accepted word lengths; infinite on any cycle."""
        if self.live_buchi or not nx.is_directed_acyclic_graph(self.graph):
            return float("inf")
        best: dict[int, int] = {}
        for q in reversed(list(nx.topological_sort(self.graph))):
            cands = [0] if q in self.fin else []
            cands += [1 + best[r] for r in self.graph.successors(q) if best[r] >= 0]
            best[q] = max(cands) if cands else -1
        return best[self.initial]

    @property
    def has_omega(self) -> bool:
        return bool(self.live_buchi)

    def describe(self) -> str:
        return show_effexpr(self.expr if self.expr is not None else to_expr(self))

    def __str__(self) -> str:
        return "{" + self.describe() + "}"


def _cyclic_nodes(g: nx.DiGraph) -> set:
    out = set()
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1:
            out |= comp
        else:
            (q,) = comp
            if g.has_edge(q, q):
                out.add(q)
    return out


class _Builder:
    """Mutable automaton with epsilon links."""

    def __init__(self) -> None:
        self.n = 0
        self.trans: set[tuple[int, str, int]] = set()
        self.eps: set[tuple[int, int]] = set()
        self.fin: set[int] = set()
        self.buchi: set[int] = set()
        self.initial = 0

    def fresh(self) -> int:
        self.n += 1
        return self.n - 1

    def copy(
        self, a: EffectAutomaton, fin: bool = True, buchi: bool = True, edges: bool = True
    ) -> dict[int, int]:
        m = {q: self.fresh() for q in sorted(a.states)}
        if edges:
            self.trans |= {(m[p], op, m[q]) for p, op, q in a.transitions}
        if fin:
            self.fin |= {m[q] for q in a.fin}
        if buchi:
            self.buchi |= {m[q] for q in a.buchi}
        return m

    def build(self, expr: EffectExpr | None = None, infconc: bool = False) -> EffectAutomaton:
        # epsilon closure with a flag recording a Büchi visit along the way
        eps_succ: dict[int, list[int]] = {}
        for p, q in self.eps:
            eps_succ.setdefault(p, []).append(q)
        letter: dict[int, list[tuple[str, int]]] = {}
        for p, a, q in self.trans:
            letter.setdefault(p, []).append((a, q))

        closure: dict[int, set[tuple[int, bool]]] = {}
        for s in range(self.n):
            seen = {(s, s in self.buchi)}
            todo = [(s, s in self.buchi)]
            while todo:
                q, f = todo.pop()
                for r in eps_succ.get(q, ()):
                    item = (r, f or r in self.buchi)
                    if item not in seen:
                        seen.add(item)
                        todo.append(item)
            closure[s] = seen

        # states whose epsilon closure reaches an epsilon cycle through a Büchi state
        diverge: set[int] = set()
        if infconc and self.eps:
            g = nx.DiGraph()
            g.add_nodes_from(range(self.n))
            g.add_edges_from(self.eps)
            for comp in nx.strongly_connected_components(g):
                loops = len(comp) > 1 or any(g.has_edge(q, q) for q in comp)
                if loops and comp & self.buchi:
                    diverge |= comp

        # new states are pairs (q, flag); flag marks a Büchi visit on the last epsilon path
        start = (self.initial, False)
        index = {start: 0}
        order = [start]
        trans: set[tuple[int, str, int]] = set()
        fin: set[int] = set()
        buchi: set[int] = set()
        i = 0
        while i < len(order):
            q, flag = order[i]
            if flag or q in self.buchi:
                buchi.add(i)
            if any(t in self.fin or t in diverge for t, _ in closure[q]):
                fin.add(i)
            for t, f in closure[q]:
                for a, u in letter.get(t, ()):
                    tgt = (u, f and u not in self.buchi)
                    if tgt not in index:
                        index[tgt] = len(order)
                        order.append(tgt)
                    trans.add((i, a, index[tgt]))
            i += 1
        return _trim(len(order), trans, 0, fin, buchi, expr)


def _trim(n, trans, initial, fin, buchi, expr) -> EffectAutomaton:
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((p, q) for p, _, q in trans)
    reach = nx.descendants(g, initial) | {initial}
    cyc = _cyclic_nodes(g.subgraph(reach))
    good = (set(fin) | (set(buchi) & cyc)) & reach
    if not good:
        raise EmptyEffect("effect denotes the empty set")
    rev = g.reverse(copy=False)
    coreach = set(good)
    for q in good:
        coreach |= nx.descendants(rev, q)
    keep = reach & coreach
    # renumber by breadth-first order for deterministic output
    succ: dict[int, list[tuple[str, int]]] = {}
    for p, a, q in sorted(trans):
        if p in keep and q in keep:
            succ.setdefault(p, []).append((a, q))
    num = {initial: 0}
    dq = deque([initial])
    while dq:
        p = dq.popleft()
        for _, q in succ.get(p, ()):
            if q not in num:
                num[q] = len(num)
                dq.append(q)
    tr = frozenset((num[p], a, num[q]) for p in num for a, q in succ.get(p, ()))
    return _quotient(
        len(num), tr,
        frozenset(num[q] for q in fin if q in num),
        frozenset(num[q] for q in buchi if q in num and q in cyc),
        expr,
    )


def _quotient(n, tr, fin, buchi, expr) -> EffectAutomaton:
    """Merge forward-bisimilar states; the language is unchanged."""
    block = [(q in fin, q in buchi) for q in range(n)]
    succ: dict[int, set[tuple[str, int]]] = {q: set() for q in range(n)}
    for p, a, q in tr:
        succ[p].add((a, q))
    count = len(set(block))
    while True:
        sig = [(block[q], frozenset((a, block[r]) for a, r in succ[q])) for q in range(n)]
        ids: dict = {}
        new = [ids.setdefault(x, len(ids)) for x in sig]
        block = new
        if len(ids) == count:
            break
        count = len(ids)
    # renumber blocks in order of first appearance so the initial state stays 0
    order: dict[int, int] = {}
    for q in range(n):
        order.setdefault(block[q], len(order))
    m = [order[block[q]] for q in range(n)]
    tr = frozenset((m[p], a, m[q]) for p, a, q in tr)
    return EffectAutomaton(
        states=frozenset(m),
        alphabet=frozenset(a for _, a, _ in tr),
        transitions=tr,
        initial=0,
        fin=frozenset(m[q] for q in fin),
        buchi=frozenset(m[q] for q in buchi),
        expr=expr,
    )


def _split(a: EffectAutomaton) -> tuple[EffectAutomaton | None, EffectAutomaton | None]:
    """The finite-word part and the infinite-word part of ``a``."""
    fin_part = inf_part = None
    if a.fin:
        b = _Builder()
        b.initial = b.copy(a, buchi=False)[a.initial]
        fin_part = b.build()
    if a.live_buchi:
        b = _Builder()
        b.initial = b.copy(a, fin=False)[a.initial]
        inf_part = b.build()
    return fin_part, inf_part


def _without_eps(a: EffectAutomaton) -> EffectAutomaton | None:
    b = _Builder()
    m = b.copy(a)
    s = b.fresh()
    b.initial = s
    b.trans |= {(s, op, q) for p, op, q in b.trans if p == m[a.initial]}
    try:
        return b.build()
    except EmptyEffect:
        return None


def _star_loop(a: EffectAutomaton) -> EffectAutomaton:
    """Finite iterations of a Büchi-free automaton."""
    b = _Builder()
    m = b.copy(a)
    s = b.fresh()
    b.initial = s
    b.fin.add(s)
    b.eps.add((s, m[a.initial]))
    b.eps |= {(m[f], m[a.initial]) for f in a.fin}
    return b.build()


def _omega_loop(a: EffectAutomaton) -> EffectAutomaton:
    """Infinite iterations of a Büchi-free automaton without the empty word."""
    b = _Builder()
    m = b.copy(a, fin=False)
    r = b.fresh()
    b.initial = r
    b.buchi.add(r)
    b.eps.add((r, m[a.initial]))
    b.eps |= {(m[f], r) for f in a.fin}
    return b.build()


def eff_epsilon() -> EffectAutomaton:
    return compile_effect(EPS)


def eff_atom(op: str) -> EffectAutomaton:
    return compile_effect(Atom(op))


def eff_concat(a: EffectAutomaton, b: EffectAutomaton) -> EffectAutomaton:
    bl = _Builder()
    ma = bl.copy(a, fin=False)
    mb = bl.copy(b)
    bl.initial = ma[a.initial]
    bl.eps |= {(ma[f], mb[b.initial]) for f in a.fin}
    return bl.build(_cat(a.expr, b.expr))


def eff_union(a: EffectAutomaton, b: EffectAutomaton) -> EffectAutomaton:
    bl = _Builder()
    s = bl.fresh()
    bl.initial = s
    ma = bl.copy(a)
    mb = bl.copy(b)
    bl.eps |= {(s, ma[a.initial]), (s, mb[b.initial])}
    return bl.build(_alt(a.expr, b.expr))


def eff_star(a: EffectAutomaton) -> EffectAutomaton:
    fin_part, inf_part = _split(a)
    loop = _star_loop(fin_part) if fin_part is not None else eff_epsilon()
    out = loop if inf_part is None else eff_union(loop, eff_concat(loop, inf_part))
    return _relabel(out, _star(a.expr) if a.expr is not None else None)


def eff_omega(a: EffectAutomaton) -> EffectAutomaton:
    fin_part, inf_part = _split(a)
    nonempty = _without_eps(fin_part) if fin_part is not None else None
    parts = []
    if nonempty is not None:
        parts.append(_omega_loop(nonempty))
    if inf_part is not None:
        prefix = _star_loop(nonempty) if nonempty is not None else eff_epsilon()
        parts.append(eff_concat(prefix, inf_part))
    if not parts:
        out = eff_epsilon()  # the body is exactly {eps}
    else:
        out = parts[0] if len(parts) == 1 else eff_union(*parts)
    return _relabel(out, Omega(a.expr) if a.expr is not None else None)


def _relabel(a: EffectAutomaton, expr: EffectExpr | None) -> EffectAutomaton:
    return EffectAutomaton(a.states, a.alphabet, a.transitions, a.initial, a.fin, a.buchi, expr)


def compile_effect(e: EffectExpr) -> EffectAutomaton:
    if isinstance(e, Eps):
        b = _Builder()
        b.initial = b.fresh()
        b.fin.add(b.initial)
        return b.build(e)
    if isinstance(e, Atom):
        b = _Builder()
        b.initial, q = b.fresh(), b.fresh()
        b.trans.add((b.initial, e.op, q))
        b.fin.add(q)
        return b.build(e)
    if isinstance(e, Concat):
        return _relabel(eff_concat(compile_effect(e.left), compile_effect(e.right)), e)
    if isinstance(e, Union):
        return _relabel(eff_union(compile_effect(e.left), compile_effect(e.right)), e)
    if isinstance(e, Star):
        return _relabel(eff_star(compile_effect(e.body)), e)
    if isinstance(e, Omega):
        return _relabel(eff_omega(compile_effect(e.body)), e)
    raise TypeError(f"not an effect expression: {e!r}")


# ---------------------------------------------------------------- membership


def _post(a: EffectAutomaton, qs: Iterable[int], op: str) -> frozenset[int]:
    out: set[int] = set()
    for q in qs:
        out |= a.succ[q].get(op, frozenset())
    return frozenset(out)


def _run(a: EffectAutomaton, word: Sequence[str], start: Iterable[int] | None = None) -> frozenset[int]:
    qs = frozenset([a.initial] if start is None else start)
    for op in word:
        qs = _post(a, qs, op)
        if not qs:
            break
    return qs


def _accepts_lasso_from(a: EffectAutomaton, q0: int, lasso: Lasso) -> bool:
    word = lasso.stem + lasso.period
    m, n = len(lasso.stem), len(word)
    g = nx.DiGraph()
    start = (q0, 0)
    g.add_node(start)
    todo = [start]
    while todo:
        q, i = todo.pop()
        j = i + 1 if i + 1 < n else m
        for r in a.succ[q].get(word[i], ()):
            node = (r, j)
            if node not in g:
                g.add_node(node)
                todo.append(node)
            g.add_edge((q, i), node)
    return any(q in a.buchi for q, _ in _cyclic_nodes(g))


def eff_member(w: Sequence[str] | Lasso, a: EffectAutomaton) -> bool:
    if isinstance(w, Lasso):
        return _accepts_lasso_from(a, a.initial, w)
    return bool(_run(a, w) & a.fin)


def is_prefix_of_language(w: Sequence[str], a: EffectAutomaton) -> bool:
    """True when some accepted word (finite or infinite) extends ``w``.

    Automata are trimmed, so every reachable state leads to acceptance.
    """
    return bool(_run(a, w))


def accepts_epsilon(a: EffectAutomaton) -> bool:
    return a.initial in a.fin


# ---------------------------------------------------------------- enumeration


def eff_enumerate(a: EffectAutomaton, max_len: int) -> tuple[set[Word], set[Lasso]]:
    words: set[Word] = set()
    lassos: set[Lasso] = set()
    layer: dict[Word, frozenset[int]] = {(): frozenset([a.initial])}
    prefixes: dict[Word, frozenset[int]] = dict(layer)
    for length in range(max_len + 1):
        for w, qs in layer.items():
            if qs & a.fin:
                words.add(w)
        if length == max_len:
            break
        nxt: dict[Word, frozenset[int]] = {}
        for w, qs in layer.items():
            for op in sorted(a.alphabet):
                rs = _post(a, qs, op)
                if rs:
                    nxt[w + (op,)] = rs
        prefixes.update(nxt)
        layer = nxt
    if a.has_omega:
        for w in prefixes:
            for cut in range(len(w)):
                las = Lasso(w[:cut], w[cut:])
                if eff_member(las, a):
                    lassos.add(las.canonical())
    return words, lassos


# ---------------------------------------------------------------- inclusion


@dataclass(frozen=True)
class Inclusion:
    verdict: str  # "yes" | "no" | "unknown"
    witness: Word | Lasso | None = None

    @property
    def yes(self) -> bool:
        return self.verdict == "yes"

    @property
    def no(self) -> bool:
        return self.verdict == "no"

    @property
    def unknown(self) -> bool:
        return self.verdict == "unknown"


YES = Inclusion("yes")
UNKNOWN = Inclusion("unknown")


@dataclass(frozen=True)
class Bounds:
    max_stem: int = 4
    max_period: int = 4
    max_len: int = 8
    max_profiles: int = 4000
    max_work: int = 1_000_000  # profile edges composed before the exact check gives up


DEFAULT_BOUNDS = Bounds()


def _finite_counterexample(
    a: EffectAutomaton, a_init: int, a_fin: Iterable[int],
    b: EffectAutomaton, b_init: Iterable[int], b_fin: Iterable[int],
) -> Word | None:
    """Shortest word reaching ``a_fin`` in ``a`` but no ``b_fin`` state in ``b``."""
    a_fin, b_fin = frozenset(a_fin), frozenset(b_fin)
    start = (a_init, frozenset(b_init))
    parent: dict = {start: None}
    dq = deque([start])
    while dq:
        node = dq.popleft()
        q, qs = node
        if q in a_fin and not (qs & b_fin):
            word: list[str] = []
            while parent[node] is not None:
                node, op = parent[node]
                word.append(op)
            return tuple(reversed(word))
        for op, rs in sorted(a.succ[q].items()):
            ps = _post(b, qs, op)
            for r in sorted(rs):
                nxt = (r, ps)
                if nxt not in parent:
                    parent[nxt] = (node, op)
                    dq.append(nxt)
    return None


def _buchi_sccs(a: EffectAutomaton) -> list[set[int]]:
    out = []
    for comp in nx.strongly_connected_components(a.graph):
        loops = len(comp) > 1 or any(a.graph.has_edge(q, q) for q in comp)
        if loops and comp & a.buchi:
            out.append(comp)
    return out


def _simple_cycle_word(a: EffectAutomaton, comp: set[int]) -> tuple[int, Word] | None:
    """If ``comp`` is a single deterministic cycle, its entry state and word."""
    inner = {q: [(op, r) for p, op, r in a.transitions if p == q and r in comp] for q in comp}
    if any(len(v) != 1 for v in inner.values()):
        return None
    start = min(comp)
    word, q = [], start
    while True:
        op, q = inner[q][0]
        word.append(op)
        if q == start:
            break
    return start, tuple(word)


def _lasso_shaped(a: EffectAutomaton, b: EffectAutomaton) -> Inclusion | None:
    found = []
    for comp in _buchi_sccs(a):
        cyc = _simple_cycle_word(a, comp)
        if cyc is None:
            return None
        found.append(cyc)
    for c, v in found:
        good = [q for q in b.states if _accepts_lasso_from(b, q, Lasso((), v))]
        u = _finite_counterexample(a, a.initial, [c], b, [b.initial], good)
        if u is not None:
            return Inclusion("no", Lasso(u, v).canonical())
    return YES


def _profile(a: EffectAutomaton, op: str) -> frozenset[tuple[int, int, bool]]:
    return frozenset(
        (p, q, p in a.buchi or q in a.buchi) for p, o, q in a.transitions if o == op
    )


def _compose(g, h):
    by_src: dict[int, list[tuple[int, bool]]] = {}
    for q, r, f in h:
        by_src.setdefault(q, []).append((r, f))
    best: dict[tuple[int, int], bool] = {}
    for p, q, f in g:
        for r, f2 in by_src.get(q, ()):
            k = (p, r)
            best[k] = best.get(k, False) or f or f2
    return frozenset((p, r, f) for (p, r), f in best.items())


def _loop_sources(g) -> set[int]:
    """States p with a path p -> q and an accepting loop q -> q in ``g``."""
    acc = {q for q, r, f in g if q == r and f}
    return {p for p, q, _ in g if q in acc}


def _ramsey(a: EffectAutomaton, b: EffectAutomaton, bounds: Bounds) -> Inclusion | None:
    """Exact ω-inclusion through the finite semigroup of transition profiles."""
    letters = sorted(a.alphabet)
    gen = {op: (_profile(a, op), _profile(b, op)) for op in letters}
    words: dict = {}
    dq = deque()
    for op in letters:
        if gen[op] not in words:
            words[gen[op]] = (op,)
            dq.append(gen[op])
    work = 0
    while dq:
        s = dq.popleft()
        for op in letters:
            work += len(s[0]) + len(s[1])
            if work > bounds.max_work:
                return None
            t = (_compose(s[0], gen[op][0]), _compose(s[1], gen[op][1]))
            if t not in words:
                if len(words) >= bounds.max_profiles:
                    return None
                words[t] = words[s] + (op,)
                dq.append(t)
    # only the state sets reached by a prefix and the loop sources of an
    # idempotent matter, so both sides are deduplicated before pairing
    heads: dict[tuple[frozenset, frozenset], Word] = {(frozenset([a.initial]), frozenset([b.initial])): ()}
    loops: dict[tuple[frozenset, frozenset], Word] = {}
    for s, w in words.items():
        key = (
            frozenset(q for p, q, _ in s[0] if p == a.initial),
            frozenset(q for p, q, _ in s[1] if p == b.initial),
        )
        heads.setdefault(key, w)
        if (_compose(s[0], s[0]), _compose(s[1], s[1])) == s:
            qa = _loop_sources(s[0])
            if qa:
                loops.setdefault((frozenset(qa), frozenset(_loop_sources(s[1]))), w)
    for (qa, qb), v in loops.items():
        for (pa, pb), u in heads.items():
            if pa & qa and not (pb & qb):
                return Inclusion("no", Lasso(u, v).canonical())
    return YES


def _lassos_of(a: EffectAutomaton, max_stem: int, max_period: int) -> Iterable[Lasso]:
    letters = sorted(a.alphabet)
    for m in range(max_stem + 1):
        for stem in itertools.product(letters, repeat=m):
            if not _run(a, stem):
                continue
            for k in range(1, max_period + 1):
                for period in itertools.product(letters, repeat=k):
                    las = Lasso(stem, period)
                    if eff_member(las, a):
                        yield las


def eff_includes(a: EffectAutomaton, b: EffectAutomaton, bounds: Bounds = DEFAULT_BOUNDS) -> Inclusion:
    """Decide L(a) ⊆ L(b); ``unknown`` only when no exact method applies."""
    if a is b:
        return YES
    return _includes(a, b, bounds)


@lru_cache(maxsize=65536)
def _includes(a: EffectAutomaton, b: EffectAutomaton, bounds: Bounds) -> Inclusion:
    u = _finite_counterexample(a, a.initial, a.fin, b, [b.initial], b.fin)
    if u is not None:
        return Inclusion("no", u)
    if not a.has_omega:
        return YES
    if not b.has_omega:
        # any infinite word of a is a counterexample
        las = next(_lassos_of(a, len(a.states), len(a.states)), None)
        return Inclusion("no", las.canonical()) if las is not None else UNKNOWN
    for method in (_lasso_shaped, lambda x, y: _ramsey(x, y, bounds)):
        res = method(a, b)
        if res is not None:
            return res
    for las in _lassos_of(a, bounds.max_stem, bounds.max_period):
        if not eff_member(las, b):
            return Inclusion("no", las.canonical())
    return UNKNOWN


def eff_equal(a: EffectAutomaton, b: EffectAutomaton, bounds: Bounds = DEFAULT_BOUNDS) -> Inclusion:
    """Language equality as mutual inclusion."""
    x = eff_includes(a, b, bounds)
    if not x.yes:
        return x
    return eff_includes(b, a, bounds)


# ---------------------------------------------------------------- handler filters


CONTINUE = "c"
STOP = "s"


@dataclass(frozen=True)
class ClauseFilter:
    op: str
    mode: str  # CONTINUE or STOP
    effect: EffectAutomaton


@dataclass(frozen=True)
class HandlerFilter:
    clauses: tuple[ClauseFilter, ...]
    final: EffectAutomaton

    def __post_init__(self) -> None:
        ops = [c.op for c in self.clauses]
        if len(set(ops)) != len(ops):
            raise ValueError("duplicate clause in handler filter")

    def clause(self, op: str) -> ClauseFilter | None:
        for c in self.clauses:
            if c.op == op:
                return c
        return None


def filter_apply(h: HandlerFilter, e: EffectAutomaton) -> EffectAutomaton:
    """The effect of handling a computation of effect ``e`` with ``h``."""
    b = _Builder()
    m = b.copy(e, fin=False, edges=False)
    b.initial = m[e.initial]
    final = b.copy(h.final)
    b.eps |= {(m[f], final[h.final.initial]) for f in e.fin}
    resume: dict[tuple[str, int], dict[int, int]] = {}
    stop: dict[str, dict[int, int]] = {}
    for p, op, q in sorted(e.transitions):
        c = h.clause(op)
        if c is None:
            b.trans.add((m[p], op, m[q]))
        elif c.mode == STOP:
            if op not in stop:
                stop[op] = b.copy(c.effect)
            b.eps.add((m[p], stop[op][c.effect.initial]))
        else:
            key = (op, q)
            if key not in resume:
                cm = resume[key] = b.copy(c.effect, fin=False)
                b.eps |= {(cm[f], m[q]) for f in c.effect.fin}
            b.eps.add((m[p], resume[key][c.effect.initial]))
    return b.build(infconc=True)


# ---------------------------------------------------------------- expression recovery


def _eliminate(edges: dict[tuple, EffectExpr], inner: Iterable, src, dst) -> EffectExpr | None:
    """Paths from ``src`` to ``dst`` after removing every state in ``inner``.

    States with the fewest in-out pairs go first, which keeps the result small.
    """
    r = dict(edges)
    todo = set(inner)
    while todo:
        def cost(k):
            ins = sum(1 for (p, q) in r if q == k and p != k)
            outs = sum(1 for (p, q) in r if p == k and q != k)
            return ins * outs, repr(k)
        k = min(todo, key=cost)
        todo.discard(k)
        loop = _star(r.pop((k, k), None))
        ins = [(p, x) for (p, q), x in r.items() if q == k]
        outs = [(q, x) for (p, q), x in r.items() if p == k]
        for p, _ in ins:
            del r[p, k]
        for q, _ in outs:
            del r[k, q]
        for p, x in ins:
            for q, y in outs:
                r[p, q] = _alt(r.get((p, q)), _cat(_cat(x, loop), y))
    return r.get((src, dst))


def _loop_heads(a: EffectAutomaton) -> list[tuple[int, set[int]]]:
    """Büchi states that every accepting cycle passes through, each with the
    states its loops may use.

    Heads are picked greedily until no Büchi state is left on a cycle avoiding
    them. A run that sees Büchi states infinitely often sees some head
    infinitely often; taking the first such head in pick order, the tail of
    the run avoids all earlier heads, so later heads get smaller graphs.
    """
    g = a.graph.copy()
    out = []
    while True:
        cyclic = _cyclic_nodes(g)
        live = [q for q in a.buchi if q in cyclic]
        if not live:
            return out
        q = max(live, key=lambda x: (g.in_degree(x) * g.out_degree(x), -x))
        out.append((q, (nx.descendants(g, q) & nx.ancestors(g, q)) | {q}))
        g.remove_node(q)


def to_expr(a: EffectAutomaton) -> EffectExpr:
    """An effect expression denoting the language of ``a`` (state elimination)."""
    base: dict[tuple, EffectExpr] = {}
    for p, op, q in sorted(a.transitions):
        base[p, q] = _alt(base.get((p, q)), Atom(op))
    states = sorted(a.states)
    out: EffectExpr | None = None
    if a.fin:
        edges = dict(base)
        edges["in", a.initial] = EPS
        for f in sorted(a.fin):
            edges[f, "out"] = EPS
        out = _eliminate(edges, states, "in", "out")
    for q, comp in _loop_heads(a):
        # first-return loops at q, iterated forever, after any path reaching q
        edges = {
            ((("q", "in") if x == q else x), (("q", "out") if y == q else y)): e
            for (x, y), e in base.items() if x in comp and y in comp
        }
        loop = _eliminate(edges, sorted(comp - {q}), ("q", "in"), ("q", "out"))
        if loop is None:
            continue
        edges = dict(base)
        edges["in", a.initial] = EPS
        edges[q, "out"] = EPS
        stem = _eliminate(edges, states, "in", "out")
        out = _alt(out, _cat(stem, Omega(loop)))
    assert out is not None
    return out
