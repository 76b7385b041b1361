"""The "equal or vanish" subroutine.

Given an x0 = 0 state and a configuration graph, parties take turns
measuring so that each turn either lifts a lagging component up to the
current maximum or removes that party from the system.  The subroutine
terminates in standard W states on subsets of the parties (or outright
failure), and because the branch tree is finite it can be enumerated
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    FAILURE,
    ConfigGraph,
    InternalConsistencyError,
    InvalidInputError,
    LocalMeasurement,
    MAX_EQUAL_RTOL,
    NULL_OUTCOME_PROB,
    OutcomeDistribution,
    PreconditionError,
    StandardW,
    WState,
)

X0_TOL = 1e-12


# ---------------------------------------------------------------------------
# actions


@dataclass(frozen=True)
class RemoveIsolated:
    party: str


@dataclass(frozen=True)
class FailTwoParty:
    pass


@dataclass(frozen=True)
class Terminal:
    pass


@dataclass(frozen=True)
class Measure:
    party: str


def _degrees(labels, edges) -> dict[str, int]:
    deg = {l: 0 for l in labels}
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    return deg


def _neighbors(label, edges) -> set[str]:
    out = set()
    for a, b in edges:
        if a == label:
            out.add(b)
        elif b == label:
            out.add(a)
    return out


def _select(comps, labels, edges):
    """Next action for an x0 = 0 node, as (tag, party).

    Order of the rules matters: isolated nodes are dealt with before the
    all-maximal terminal check, and the measuring party is the lowest-index
    non-maximal party connected to a maximal one, falling back to the
    lowest-index non-maximal party.
    """
    deg = _degrees(labels, edges)
    isolated = [l for l in labels if deg[l] == 0]
    if isolated:
        if len(labels) == 2:
            return "fail2", None
        return "isolate", isolated[0]
    xmax = max(comps)
    maximal = [c >= xmax * (1.0 - MAX_EQUAL_RTOL) for c in comps]
    if all(maximal):
        return "terminal", None
    max_parties = {labels[i] for i in range(len(labels)) if maximal[i]}
    fallback = None
    for i, l in enumerate(labels):
        if maximal[i]:
            continue
        if fallback is None:
            fallback = l
        if _neighbors(l, edges) & max_parties:
            return "measure", l
    return "measure", fallback


def select_ev_action(state: WState, graph: ConfigGraph):
    """Classify the next equal-or-vanish step for (state, graph)."""
    if state.x0 > X0_TOL:
        raise PreconditionError(f"equal-or-vanish needs x0 = 0, got {state.x0}")
    if set(state.labels) != set(graph.labels):
        raise InvalidInputError("state parties and graph nodes differ")
    tag, party = _select(state.components, state.labels, graph.edges)
    if tag == "fail2":
        return FailTwoParty()
    if tag == "isolate":
        return RemoveIsolated(party)
    if tag == "terminal":
        return Terminal()
    return Measure(party)


def ev_measurement(state: WState, k: str) -> LocalMeasurement:
    """The two-outcome measurement that equalizes or removes party ``k``.

    Outcome 1 lifts x_k to the current maximum, outcome 2 sets it to zero.
    """
    xk = state.component(k)
    xmax = state.max_component()
    if xk >= xmax * (1.0 - MAX_EQUAL_RTOL):
        raise PreconditionError(f"component of {k!r} is already maximal")
    a = xk / xmax
    return LocalMeasurement(k, [(a, 0.0, 1.0), (1.0 - a, 0.0, 0.0)])


# ---------------------------------------------------------------------------
# exact enumeration

# Branch steps on raw tuples; x0 stays exactly 0 throughout so only the
# party weights are tracked.


def _equal_branch(comps, k):
    """(probability, new comps) for the 'equal' outcome of party k."""
    xk = comps[k]
    imax = comps.index(max(comps))
    a = xk / comps[imax]
    p = a * (1.0 - xk) + xk
    if p < NULL_OUTCOME_PROB:
        return p, ()
    new = [a * c / p for c in comps]
    new[k] = new[imax]  # force the intended exact tie
    return p, tuple(new)


def _vanish_branch(comps, labels, k):
    """(probability, comps without k, labels without k)."""
    xk = comps[k]
    imax = comps.index(max(comps))
    a = xk / comps[imax]
    p = (1.0 - a) * (1.0 - xk)
    if p < NULL_OUTCOME_PROB:
        return p, (), ()
    new = tuple(c / (1.0 - xk) for i, c in enumerate(comps) if i != k)
    return p, new, tuple(l for i, l in enumerate(labels) if i != k)


def _drop_isolated(comps, labels, k):
    """(probability of staying entangled, comps without k, labels without k)."""
    xk = comps[k]
    p = 1.0 - xk
    if p < NULL_OUTCOME_PROB:
        return p, (), ()
    new = tuple(c / p for i, c in enumerate(comps) if i != k)
    return p, new, tuple(l for i, l in enumerate(labels) if i != k)


def _restrict_edges(edges, labels):
    keep = set(labels)
    return frozenset(e for e in edges if e[0] in keep and e[1] in keep)


def enumerate_ev(comps, labels, edges) -> dict:
    """Exhaustively walk the equal-or-vanish tree.

    Returns a map from terminal to probability; terminals are either an
    ordered tuple of party labels (a standard W state on those parties) or
    the FAILURE sentinel.  Raw-tuple variant of :func:`ev_distribution`
    shared with the protocol-tree builder.
    """
    acc: dict = {}
    depth_cap = 2 * len(labels)

    def visit(comps, labels, edges, pathp, depth):
        if depth > depth_cap:
            raise InternalConsistencyError("equal-or-vanish recursion too deep")
        if len(labels) < 2:
            acc[FAILURE] = acc.get(FAILURE, 0.0) + pathp
            return
        tag, party = _select(comps, labels, edges)
        if tag == "fail2":
            acc[FAILURE] = acc.get(FAILURE, 0.0) + pathp
            return
        if tag == "terminal":
            acc[labels] = acc.get(labels, 0.0) + pathp
            return
        k = labels.index(party)
        if tag == "isolate":
            p, new, newlab = _drop_isolated(comps, labels, k)
            if p >= NULL_OUTCOME_PROB:
                visit(new, newlab, _restrict_edges(edges, newlab), pathp * p, depth + 1)
            if 1.0 - p >= NULL_OUTCOME_PROB:
                acc[FAILURE] = acc.get(FAILURE, 0.0) + pathp * (1.0 - p)
            return
        pe, eq = _equal_branch(comps, k)
        if pe >= NULL_OUTCOME_PROB:
            visit(eq, labels, edges, pathp * pe, depth + 1)
        pv, van, vanlab = _vanish_branch(comps, labels, k)
        if pv >= NULL_OUTCOME_PROB:
            visit(van, vanlab, _restrict_edges(edges, vanlab), pathp * pv, depth + 1)

    visit(tuple(comps), tuple(labels), frozenset(edges), 1.0, 0)
    return acc


def _check_support(terminals, comps, labels, edges):
    """Every W terminal must contain each initially-maximal party or be
    disconnected from it."""
    xmax = max(comps)
    maximal = [labels[i] for i, c in enumerate(comps) if c >= xmax * (1.0 - MAX_EQUAL_RTOL)]
    for term in terminals:
        if term is FAILURE:
            continue
        members = set(term)
        for m in maximal:
            if m in members:
                continue
            if _neighbors(m, edges) & members:
                raise InternalConsistencyError(
                    f"terminal {term} is adjacent to the maximal party {m!r}"
                )


def ev_distribution(state: WState, graph: ConfigGraph) -> OutcomeDistribution:
    """Exact terminal distribution of the equal-or-vanish subroutine.

    Keys are StandardW terminals (party tuples in state order) plus a
    single Failure entry collecting every dead end.
    """
    if state.x0 > X0_TOL:
        raise PreconditionError(f"equal-or-vanish needs x0 = 0, got {state.x0}")
    if set(state.labels) != set(graph.labels):
        raise InvalidInputError("state parties and graph nodes differ")
    acc = enumerate_ev(state.components, state.labels, graph.edges)
    _check_support(acc.keys(), state.components, state.labels, graph.edges)
    entries = []
    fail = 0.0
    for term, p in acc.items():
        if term is FAILURE:
            fail += p
        else:
            entries.append((StandardW(term), p))
    entries.sort(key=lambda tp: (-len(tp[0].parties), tp[0].parties))
    if fail > 0.0:
        entries.append((FAILURE, fail))
    return OutcomeDistribution(entries)


def full_set_lambda(state: WState) -> float:
    """Closed form for the probability that no party gets removed:
    N * prod(x_k, k != n1) / x_n1^(N-2)."""
    comps = state.components
    xmax = max(comps)
    imax = comps.index(xmax)
    prod = 1.0
    for i, c in enumerate(comps):
        if i != imax:
            prod *= c
    return len(comps) * prod / xmax ** (len(comps) - 2)


# ---------------------------------------------------------------------------
# tree export (for inspection; the distribution above is the workhorse)


@dataclass(frozen=True)
class EvNode:
    """One node of the explicit equal-or-vanish tree."""

    state: WState | None
    graph: ConfigGraph | None
    path_probability: float
    kind: str  # "measure" | "isolate" | "terminal" | "failure"
    party: str | None
    children: tuple[tuple[float, "EvNode"], ...]


def ev_tree(state: WState, graph: ConfigGraph) -> EvNode:
    """Build the full branch tree, for DOT export and by-hand inspection."""
    if state.x0 > X0_TOL:
        raise PreconditionError(f"equal-or-vanish needs x0 = 0, got {state.x0}")

    def build(comps, labels, edges, pathp) -> EvNode:
        if len(labels) < 2:
            return EvNode(None, None, pathp, "failure", None, ())
        st = WState(comps, labels)
        g = ConfigGraph(labels, edges)
        tag, party = _select(comps, labels, edges)
        if tag == "fail2":
            return EvNode(st, g, pathp, "failure", None, ())
        if tag == "terminal":
            return EvNode(st, g, pathp, "terminal", None, ())
        k = labels.index(party)
        children = []
        if tag == "isolate":
            p, new, newlab = _drop_isolated(comps, labels, k)
            if p >= NULL_OUTCOME_PROB:
                children.append((p, build(new, newlab, _restrict_edges(edges, newlab), pathp * p)))
            if 1.0 - p >= NULL_OUTCOME_PROB:
                children.append((1.0 - p, EvNode(None, None, pathp * (1.0 - p), "failure", None, ())))
            return EvNode(st, g, pathp, "isolate", party, tuple(children))
        pe, eq = _equal_branch(comps, k)
        if pe >= NULL_OUTCOME_PROB:
            children.append((pe, build(eq, labels, edges, pathp * pe)))
        pv, van, vanlab = _vanish_branch(comps, labels, k)
        if pv >= NULL_OUTCOME_PROB:
            children.append((pv, build(van, vanlab, _restrict_edges(edges, vanlab), pathp * pv)))
        return EvNode(st, g, pathp, "measure", party, tuple(children))

    return build(state.components, state.labels, frozenset(graph.edges), 1.0)


def ev_tree_to_dot(root: EvNode) -> str:
    """Graphviz rendering of an equal-or-vanish tree."""
    lines = ["digraph ev {", "  node [shape=box, fontsize=10];"]
    counter = [0]

    def fmt(node: EvNode) -> str:
        if node.kind == "failure":
            return "FAIL"
        comps = ",".join(f"{c:.4g}" for c in node.state.components)
        head = f"({comps}) on {','.join(node.state.labels)}"
        if node.kind == "terminal":
            return f"W{node.state.n}\\n{head}"
        return f"{node.kind} {node.party}\\n{head}"

    def walk(node: EvNode) -> int:
        me = counter[0]
        counter[0] += 1
        lines.append(f'  n{me} [label="{fmt(node)}"];')
        for p, child in node.children:
            cid = walk(child)
            lines.append(f'  n{me} -> n{cid} [label="{p:.6g}"];')
        return me

    walk(root)
    lines.append("}")
    return "\n".join(lines)


def ev_order_sensitivity(state: WState, graph: ConfigGraph) -> float:
    """Largest change in any terminal probability when the measuring-party
    tie-break prefers the highest index instead of the lowest.

    Diagnostic only: nothing in the protocol relies on the answer being
    zero, this just records how the enumeration responds to the one choice
    left open by the selection rules.
    """
    base = enumerate_ev(state.components, state.labels, graph.edges)

    # rerun with reversed preference among non-maximal candidates
    acc: dict = {}

    def select_rev(comps, labels, edges):
        deg = _degrees(labels, edges)
        isolated = [l for l in labels if deg[l] == 0]
        if isolated:
            if len(labels) == 2:
                return "fail2", None
            return "isolate", isolated[-1]
        xmax = max(comps)
        maximal = [c >= xmax * (1.0 - MAX_EQUAL_RTOL) for c in comps]
        if all(maximal):
            return "terminal", None
        max_parties = {labels[i] for i in range(len(labels)) if maximal[i]}
        fallback = None
        chosen = None
        for i, l in enumerate(labels):
            if maximal[i]:
                continue
            fallback = l
            if _neighbors(l, edges) & max_parties:
                chosen = l
        return "measure", chosen if chosen is not None else fallback

    def visit(comps, labels, edges, pathp):
        if len(labels) < 2:
            acc[FAILURE] = acc.get(FAILURE, 0.0) + pathp
            return
        tag, party = select_rev(comps, labels, edges)
        if tag == "fail2":
            acc[FAILURE] = acc.get(FAILURE, 0.0) + pathp
            return
        if tag == "terminal":
            key = tuple(sorted(labels))
            acc[key] = acc.get(key, 0.0) + pathp
            return
        k = labels.index(party)
        if tag == "isolate":
            p, new, newlab = _drop_isolated(comps, labels, k)
            if p >= NULL_OUTCOME_PROB:
                visit(new, newlab, _restrict_edges(edges, newlab), pathp * p)
            if 1.0 - p >= NULL_OUTCOME_PROB:
                acc[FAILURE] = acc.get(FAILURE, 0.0) + pathp * (1.0 - p)
            return
        pe, eq = _equal_branch(comps, k)
        if pe >= NULL_OUTCOME_PROB:
            visit(eq, labels, edges, pathp * pe)
        pv, van, vanlab = _vanish_branch(comps, labels, k)
        if pv >= NULL_OUTCOME_PROB:
            visit(van, vanlab, _restrict_edges(edges, vanlab), pathp * pv)

    visit(state.components, state.labels, frozenset(graph.edges), 1.0)

    keys = {tuple(sorted(t)) if t is not FAILURE else t for t in base} | set(acc)
    worst = 0.0
    for key in keys:
        b = sum(p for t, p in base.items() if (t is FAILURE and key is FAILURE) or (t is not FAILURE and tuple(sorted(t)) == key))
        r = acc.get(key, 0.0)
        worst = max(worst, abs(b - r))
    return worst
