"""Component calculus for W-class qubit states.

An N-party W-class state is stored as the vector of nonnegative weights
(x_1, ..., x_N), one weight per party, with the residual weight
x0 = 1 - sum(x_i) carried implicitly.  Binary local measurements in
upper-triangular Kraus form act on this vector through a closed-form
update, and everything else in the package is built on that update.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

COMPONENT_SUM_TOL = 1e-12      # sum(x_i) may exceed 1 by at most this
ZERO_COMPONENT = 1e-14         # below this a party counts as disentangled
COMPLETENESS_TOL = 1e-12
NULL_OUTCOME_PROB = 1e-15      # outcomes rarer than this carry no state
DISTRIBUTION_SUM_TOL = 1e-9
MAX_EQUAL_RTOL = 1e-12         # relative tolerance for "component is maximal"


class DistillationError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMeasurementError(DistillationError):
    """A local measurement violates the completeness constraints."""


class InvalidPartyError(DistillationError):
    """A party label is unknown to the state or graph at hand."""


class InvalidInputError(DistillationError):
    """Inputs are structurally inconsistent (label sets, probabilities)."""


class PreconditionError(DistillationError):
    """An operation was called outside its stated domain."""


class UnknownPresetError(DistillationError):
    """No graph preset is registered under the requested name."""


class GraphMatchError(DistillationError):
    """A graph does not match the configuration family an operation needs."""


class InternalConsistencyError(DistillationError):
    """A structural invariant that should be unbreakable was broken."""


def default_labels(n: int) -> tuple[str, ...]:
    if n <= 26:
        return tuple(chr(ord("A") + i) for i in range(n))
    return tuple(f"P{i + 1}" for i in range(n))


@dataclass(frozen=True)
class WState:
    """A W-class state given by its per-party weights.

    ``components[i]`` is the weight of party ``labels[i]``; the weight of
    the all-zero amplitude is the derived ``x0 = 1 - sum(components)``.
    Weights below ``ZERO_COMPONENT`` are clamped to exactly zero, which
    marks that party as disentangled.  Instances are immutable.
    """

    components: tuple[float, ...]
    labels: tuple[str, ...]

    def __init__(self, components: Sequence[float], labels: Sequence[str] | None = None):
        comps = tuple(float(c) for c in components)
        if labels is None:
            labels = default_labels(len(comps))
        labels = tuple(str(l) for l in labels)
        if len(comps) < 2:
            raise InvalidInputError("a W-class state needs at least two parties")
        if len(labels) != len(comps):
            raise InvalidInputError("labels and components must have equal length")
        if len(set(labels)) != len(labels):
            raise InvalidInputError(f"duplicate party labels: {labels}")
        cleaned = []
        for c in comps:
            if c < -COMPONENT_SUM_TOL:
                raise InvalidInputError(f"negative component {c}")
            cleaned.append(0.0 if c < ZERO_COMPONENT else c)
        total = sum(cleaned)
        if total > 1.0 + COMPONENT_SUM_TOL:
            raise InvalidInputError(f"components sum to {total} > 1")
        object.__setattr__(self, "components", tuple(cleaned))
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def x0(self) -> float:
        return max(0.0, 1.0 - sum(self.components))

    def component(self, label: str) -> float:
        return self.components[self.index(label)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidPartyError(f"unknown party {label!r}") from None

    def max_component(self) -> float:
        return max(self.components)

    def dominant_party(self) -> str:
        """Label of the maximal component; ties go to the lowest index."""
        return self.labels[self.components.index(max(self.components))]

    def is_product(self) -> bool:
        """True when at most one party carries weight (no entanglement)."""
        return sum(1 for c in self.components if c > 0.0) <= 1

    def to_json(self) -> dict:
        return {"components": list(self.components), "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: Mapping) -> "WState":
        if isinstance(data, (list, tuple)):
            return cls(data)
        return cls(data["components"], data.get("labels"))


@dataclass(frozen=True)
class ConfigGraph:
    """Target-pair configuration graph: nodes are parties, edges mark the
    pairs whose shared EPR state counts as a success."""

    labels: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __init__(self, labels: Sequence[str], edges: Iterable[Sequence[str]] = ()):
        labels = tuple(str(l) for l in labels)
        if len(set(labels)) != len(labels):
            raise InvalidInputError(f"duplicate node labels: {labels}")
        known = set(labels)
        normalized = set()
        for e in edges:
            a, b = (str(e[0]), str(e[1]))
            if a == b:
                raise InvalidInputError(f"self-loop on {a!r}")
            if a not in known or b not in known:
                raise InvalidPartyError(f"edge ({a},{b}) leaves the node set")
            normalized.add((a, b) if a <= b else (b, a))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", frozenset(normalized))

    @property
    def n(self) -> int:
        return len(self.labels)

    def has_edge(self, a: str, b: str) -> bool:
        return ((a, b) if a <= b else (b, a)) in self.edges

    def neighbors(self, label: str) -> set[str]:
        if label not in self.labels:
            raise InvalidPartyError(f"unknown node {label!r}")
        out = set()
        for a, b in self.edges:
            if a == label:
                out.add(b)
            elif b == label:
                out.add(a)
        return out

    def degree(self, label: str) -> int:
        return len(self.neighbors(label))

    def isolated_nodes(self) -> tuple[str, ...]:
        touched = {v for e in self.edges for v in e}
        return tuple(l for l in self.labels if l not in touched)

    def is_complete(self) -> bool:
        n = self.n
        return len(self.edges) == n * (n - 1) // 2

    def induced(self, keep: Iterable[str]) -> "ConfigGraph":
        keep_set = set(keep)
        unknown = keep_set - set(self.labels)
        if unknown:
            raise InvalidPartyError(f"unknown nodes {sorted(unknown)}")
        labels = tuple(l for l in self.labels if l in keep_set)
        edges = [e for e in self.edges if e[0] in keep_set and e[1] in keep_set]
        return ConfigGraph(labels, edges)

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "edges": sorted(list(e) for e in self.edges)}

    @classmethod
    def from_json(cls, data: Mapping) -> "ConfigGraph":
        if "preset" in data:
            return graph_catalog(data["preset"], data.get("n"))
        return cls(data["labels"], data.get("edges", ()))


def remove_nodes(g: ConfigGraph, s: Iterable[str]) -> ConfigGraph:
    """Subgraph with the nodes in ``s`` and their incident edges removed."""
    drop = set(s)
    unknown = drop - set(g.labels)
    if unknown:
        raise InvalidPartyError(f"unknown nodes {sorted(unknown)}")
    return g.induced(l for l in g.labels if l not in drop)


@dataclass(frozen=True)
class LocalMeasurement:
    """A binary (or k-ary) local measurement in upper-triangular Kraus form.

    Each outcome is a triple (a, b, c) encoding the operator
    [[sqrt(a), b], [0, sqrt(c)]] acting on the measuring party's qubit.
    Completeness requires sum(a) = 1, sum(sqrt(a) b) = 0 and
    sum(b^2 + c) = 1.
    """

    party: str
    outcomes: tuple[tuple[float, float, float], ...]

    def __init__(self, party: str, outcomes: Iterable[Sequence[float]]):
        outs = tuple((float(a), float(b), float(c)) for a, b, c in outcomes)
        for a, b, c in outs:
            if a < 0 or c < 0:
                raise InvalidMeasurementError(f"negative Kraus weight in {(a, b, c)}")
        object.__setattr__(self, "party", str(party))
        object.__setattr__(self, "outcomes", outs)

    def completeness_residuals(self) -> tuple[float, float, float]:
        sa = sum(a for a, _, _ in self.outcomes) - 1.0
        sb = sum(math.sqrt(a) * b for a, b, _ in self.outcomes)
        sc = sum(b * b + c for _, b, c in self.outcomes) - 1.0
        return sa, sb, sc

    def is_complete(self, tol: float = COMPLETENESS_TOL) -> bool:
        return all(abs(r) <= tol for r in self.completeness_residuals())

    @classmethod
    def diagonal(cls, party: str, weights: Iterable[Sequence[float]]) -> "LocalMeasurement":
        """Diagonal measurement from (a, c) pairs, all b terms zero."""
        return cls(party, [(a, 0.0, c) for a, c in weights])

    @classmethod
    def identity_split(cls, party: str, k: int = 2) -> "LocalMeasurement":
        """k outcomes each proportional to the identity."""
        return cls.diagonal(party, [(1.0 / k, 1.0 / k)] * k)


# ---------------------------------------------------------------------------
# terminal results


@dataclass(frozen=True)
class Epr:
    """An EPR pair shared by two parties (the success terminal)."""

    parties: tuple[str, str]

    def __init__(self, parties: Iterable[str]):
        a, b = sorted(str(p) for p in parties)
        object.__setattr__(self, "parties", (a, b))

    def label(self) -> str:
        return f"EPR({self.parties[0]},{self.parties[1]})"


@dataclass(frozen=True)
class StandardW:
    """A standard W state shared by the listed parties."""

    parties: tuple[str, ...]

    def __init__(self, parties: Iterable[str]):
        object.__setattr__(self, "parties", tuple(str(p) for p in parties))

    def label(self) -> str:
        return f"W{len(self.parties)}({','.join(self.parties)})"


@dataclass(frozen=True)
class Failure:
    def label(self) -> str:
        return "FAIL"


FAILURE = Failure()


@dataclass(frozen=True)
class Residual:
    """A leftover W-class state and its pruned graph (protocol continues)."""

    state: WState
    graph: ConfigGraph

    def label(self) -> str:
        return f"RES({','.join(self.state.labels)})"


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probability map over terminal results.  Probabilities must be
    nonnegative and sum to one within ``DISTRIBUTION_SUM_TOL``."""

    entries: tuple[tuple[object, float], ...]

    def __init__(self, entries):
        items = tuple(entries.items()) if isinstance(entries, Mapping) else tuple(entries)
        total = 0.0
        for term, p in items:
            if p < -1e-15:
                raise InvalidInputError(f"negative probability {p} for {term}")
            total += p
        if abs(total - 1.0) > DISTRIBUTION_SUM_TOL:
            raise InvalidInputError(f"terminal probabilities sum to {total}")
        object.__setattr__(self, "entries", items)

    def items(self):
        return self.entries

    def probability(self, terminal) -> float:
        return sum(p for t, p in self.entries if t == terminal)

    def total(self) -> float:
        return sum(p for _, p in self.entries)


# ---------------------------------------------------------------------------
# the measurement update


def component_update(
    comps: Sequence[float], x0: float, k: int, a: float, b: float, c: float
) -> tuple[float, tuple[float, ...], float]:
    """Apply one upper-triangular Kraus operator to raw components.

    Returns (probability, new components, new x0).  The new values are
    normalized by the outcome probability; callers must skip outcomes
    whose probability is below ``NULL_OUTCOME_PROB``.
    """
    xk = comps[k]
    rest = 1.0 - x0 - xk
    amp0 = math.sqrt(x0 * a) + b * math.sqrt(xk)
    p = a * rest + c * xk + amp0 * amp0
    if p < NULL_OUTCOME_PROB:
        return p, (), 0.0
    new = tuple((c * xk if j == k else a * comps[j]) / p for j in range(len(comps)))
    return p, new, amp0 * amp0 / p


def apply_measurement(state: WState, m: LocalMeasurement) -> list[tuple[float, WState | None]]:
    """Outcome probabilities and post-measurement states of a local
    measurement.

    Outcomes with probability below ``NULL_OUTCOME_PROB`` are reported with
    ``None`` in place of a state.  Probabilities always sum to one.
    """
    if not m.is_complete():
        raise InvalidMeasurementError(
            f"measurement on {m.party!r} is not complete: residuals "
            f"{m.completeness_residuals()}"
        )
    k = state.index(m.party)
    x0 = state.x0
    results: list[tuple[float, WState | None]] = []
    for a, b, c in m.outcomes:
        p, comps, _ = component_update(state.components, x0, k, a, b, c)
        if p < NULL_OUTCOME_PROB:
            results.append((p, None))
        else:
            results.append((p, WState(comps, state.labels)))
    return results


def kt_averages(
    pre: WState, outcomes: Sequence[tuple[float, WState | None]]
) -> tuple[float, ...]:
    """Average post-measurement component values minus the pre values.

    Returns (d_x0, d_x1, ..., d_xN).  Under any complete local measurement
    the x0 entry may only grow on average and every party entry may only
    shrink, which is what callers assert.
    """
    total_p = sum(p for p, _ in outcomes)
    if abs(total_p - 1.0) > DISTRIBUTION_SUM_TOL:
        raise InvalidInputError(f"outcome probabilities sum to {total_p}")
    avg0 = 0.0
    avg = [0.0] * pre.n
    for p, post in outcomes:
        if post is None:
            continue
        if post.labels != pre.labels:
            raise InvalidInputError("outcome party set differs from the input state")
        avg0 += p * post.x0
        for i, c in enumerate(post.components):
            avg[i] += p * c
    deltas = [avg0 - pre.x0]
    deltas.extend(avg[i] - pre.components[i] for i in range(pre.n))
    return tuple(deltas)


def standard_w(labels: Iterable[str]) -> WState:
    """The standard W state on the given parties: all weights equal, x0 = 0."""
    labs = sorted(str(l) for l in set(labels))
    if len(labs) < 2:
        raise InvalidInputError("a standard W state needs at least two parties")
    return WState([1.0 / len(labs)] * len(labs), labs)


# ---------------------------------------------------------------------------
# graph catalog

_FIXED_PRESETS: dict[str, tuple[int, tuple[tuple[str, str], ...]]] = {
    "wedge": (3, (("A", "B"), ("A", "C"))),
    "triangle": (3, (("A", "B"), ("A", "C"), ("B", "C"))),
    "I": (4, (("A", "B"),)),
    "I'": (4, (("A", "B"), ("A", "C"))),
    "I''": (4, (("A", "B"), ("A", "C"), ("A", "D"))),
    "II": (4, (("A", "B"), ("A", "C"), ("B", "C"))),
    "III-a": (4, (("A", "B"), ("C", "D"))),
    "III-b": (4, (("A", "B"), ("B", "C"), ("C", "D"))),
    "III-c": (4, (("A", "B"), ("B", "C"), ("C", "D"), ("A", "D"))),
    "IV": (4, (("A", "B"), ("A", "C"), ("A", "D"), ("B", "C"), ("B", "D"))),
    "V": (4, (("A", "B"), ("A", "C"), ("A", "D"), ("B", "C"), ("B", "D"), ("C", "D"))),
    "VI": (4, (("A", "B"), ("A", "C"), ("A", "D"), ("B", "C"))),
}

_PRESET_ALIASES = {
    "I′": "I'",
    "I″": "I''",
    "i": "I",
    "i'": "I'",
    "i''": "I''",
    "ii": "II",
    "iii-a": "III-a",
    "iii-b": "III-b",
    "iii-c": "III-c",
    "iv": "IV",
    "v": "V",
    "vi": "VI",
}


def graph_catalog(name: str, n: int | None = None) -> ConfigGraph:
    """Named configuration-graph presets.

    Fixed-size presets: wedge, triangle, I, I', I'', II, III-a/b/c, IV, V,
    VI.  Parametric presets: pairs(n) with n even (disjoint pairs on nodes
    "1".."n") and complete(n).
    """
    key = str(name)
    key = _PRESET_ALIASES.get(key, _PRESET_ALIASES.get(key.lower(), key))
    if key in _FIXED_PRESETS:
        size, edges = _FIXED_PRESETS[key]
        if n is not None and n != size:
            raise InvalidInputError(f"preset {key!r} has exactly {size} nodes")
        return ConfigGraph(default_labels(size), edges)
    low = key.lower()
    if low == "pairs":
        if n is None or n < 4 or n % 2:
            raise InvalidInputError("pairs preset needs an even node count >= 4")
        labels = tuple(str(i + 1) for i in range(n))
        edges = [(labels[2 * i], labels[2 * i + 1]) for i in range(n // 2)]
        return ConfigGraph(labels, edges)
    if low == "complete":
        if n is None or n < 2:
            raise InvalidInputError("complete preset needs a node count >= 2")
        labels = default_labels(n)
        edges = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n)]
        return ConfigGraph(labels, edges)
    raise UnknownPresetError(f"unknown graph preset {name!r}")


def state_from_json(text_or_data) -> WState:
    data = json.loads(text_or_data) if isinstance(text_or_data, str) else text_or_data
    return WState.from_json(data)


def graph_from_json(text_or_data) -> ConfigGraph:
    data = json.loads(text_or_data) if isinstance(text_or_data, str) else text_or_data
    return ConfigGraph.from_json(data)
