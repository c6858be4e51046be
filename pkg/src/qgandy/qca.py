"""Quantum cellular automata in the two-layer Swap/K form.

Every cell ``C`` carries a primary site and an ancilla site ``C'``. A rule is
one unitary ``K`` on the window ``(C', C + sigma_1, ..., C + sigma_r)``; a
step applies ``K`` at every cell whose neighbourhood meets the support of
the state and then swaps primary and ancilla at those cells.

Doubled states live on the lattice Z^(d+1): site ``(*C, 0)`` is the primary
of cell ``C`` and ``(*C, 1)`` its ancilla. Between steps every ancilla is
quiescent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ContractViolation, DomainError
from .field import FieldSpec, Scalar
from .fock import StateVector, inner, reduced_density
from .gates import embed, hadamard, pauli_x
from .lattice import QUIESCENT, Configuration, Coord, Neighborhood, grow, read_cone, translate
from .localop import LocalMap, apply, dagger, identity_matrix, kron, matmul

__all__ = [
    "QCARule",
    "DoubledState",
    "RuleReport",
    "CausalityReport",
    "verify_rule",
    "qca_step",
    "qca_evolve",
    "check_causality",
    "measure_cell",
    "swap_rule",
    "shift_unitary_rule",
    "coupled_phase_rule",
]

PRIMARY, ANCILLA = 0, 1


def _site(c: Sequence[int], layer: int) -> Coord:
    return (*c, layer)


class DoubledState:
    """A state on primary and ancilla sites; wraps a ``(d+1)``-dimensional vector."""

    __slots__ = ("vector",)

    def __init__(self, vector: StateVector):
        if vector.dim < 2:
            raise DomainError("a doubled state needs at least one lattice axis plus the layer axis")
        for cfg in vector:
            for c, _ in cfg.items():
                if c[-1] not in (PRIMARY, ANCILLA):
                    raise DomainError(f"site {c} has layer {c[-1]}, expected 0 or 1")
        self.vector = vector

    @classmethod
    def from_primary(cls, v: StateVector) -> "DoubledState":
        terms = {Configuration._raw(v.dim + 1, {_site(c, PRIMARY): s for c, s in cfg.items()}): a for cfg, a in v.items()}
        return cls(StateVector._raw(v.field, v.n, v.dim + 1, terms))

    @classmethod
    def from_configs(cls, field: FieldSpec, n: int, terms: Iterable[tuple[Configuration, object]]) -> "DoubledState":
        terms = list(terms)
        dim = terms[0][0].dim if terms else 1
        return cls.from_primary(StateVector(field, n, dim, terms))

    @property
    def dim(self) -> int:
        return self.vector.dim - 1

    @property
    def field(self) -> FieldSpec:
        return self.vector.field

    @property
    def n(self) -> int:
        return self.vector.n

    def ancillas_quiescent(self) -> bool:
        return all(c[-1] == PRIMARY for cfg in self.vector for c, _ in cfg.items())

    def primary(self) -> StateVector:
        if not self.ancillas_quiescent():
            raise ContractViolation("quiescence", "ancilla sites are not quiescent")
        terms = {Configuration._raw(self.dim, {c[:-1]: s for c, s in cfg.items()}): a for cfg, a in self.vector.items()}
        return StateVector._raw(self.field, self.n, self.dim, terms)

    @property
    def support(self) -> frozenset[Coord]:
        """Cells with a non-quiescent primary or ancilla site in some term."""
        return frozenset(c[:-1] for c in self.vector.support)

    def translate(self, t: Sequence[int]) -> "DoubledState":
        return DoubledState(self.vector.translate((*t, 0)))

    def norm_sq(self) -> Scalar:
        return inner(self.vector, self.vector)

    def __eq__(self, other):
        if not isinstance(other, DoubledState):
            return NotImplemented
        return self.vector == other.vector

    def __repr__(self):
        return f"DoubledState({self.vector!r})"


class QCARule:
    """Neighbourhood plus the window unitary ``K``.

    ``K`` is an ``n**(r+1)`` square matrix over the ordered window
    ``(C', C + sigma_1, ..., C + sigma_r)``. With ``validate`` set (the
    default) the rule is checked for unitarity, quiescence and pairwise
    commutation, and a :class:`ContractViolation` names the first failure.
    """

    def __init__(self, neighborhood: Neighborhood, K: Sequence[Sequence], n: int, field: FieldSpec, validate: bool = True):
        self.neighborhood = neighborhood
        self.n = n
        self.field = field
        self.template = LocalMap(self.window_sites((0,) * neighborhood.dim), K, n, field)
        self.K = self.template.matrix
        if validate:
            report = verify_rule(self)
            if not report.ok:
                name, message = report.failures[0]
                raise ContractViolation(name, message)

    @property
    def dim(self) -> int:
        return self.neighborhood.dim

    @property
    def r(self) -> int:
        return self.neighborhood.r

    def window_sites(self, c: Sequence[int]) -> list[Coord]:
        return [_site(c, ANCILLA)] + [_site(translate(c, s), PRIMARY) for s in self.neighborhood.offsets]

    def local_map_at(self, c: Sequence[int]) -> LocalMap:
        return self.template.on(self.window_sites(c))

    def __repr__(self):
        return f"QCARule(n={self.n}, r={self.r}, field={self.field!r})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "offsets": self.neighborhood.to_json(),
            "K": [[x.to_json() for x in row] for row in self.K],
        }

    @classmethod
    def from_json(cls, doc: dict, field: FieldSpec, validate: bool = True) -> "QCARule":
        nb = Neighborhood.from_json(doc["offsets"])
        rows = doc["K"]
        n = doc.get("n")
        if n is None:
            n = round(len(rows) ** (1 / (nb.r + 1)))
        K = [[field.scalar(x) for x in row] for row in rows]
        return cls(nb, K, n, field, validate=validate)


@dataclass
class RuleReport:
    checks: dict[str, bool]
    messages: dict[str, str] = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[tuple[str, str]]:
        return [(k, self.messages.get(k, "check failed")) for k, v in self.checks.items() if not v]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks), "messages": dict(self.messages)}


def _overlap_shifts(nb: Neighborhood) -> list[Coord]:
    """Representative nonzero shifts ``D - C`` for which windows of C and D overlap.

    ``delta`` and ``-delta`` give translated copies of the same pair, so only
    the lexicographically positive one is kept.
    """
    zero = (0,) * nb.dim
    deltas = {tuple(a - b for a, b in zip(s, t)) for s in nb.offsets for t in nb.offsets}
    return sorted(d for d in deltas if d > zero)


def verify_rule(rule: QCARule) -> RuleReport:
    """Exact checks of unitarity, quiescence and commutation of shifted copies."""
    f, n, K = rule.field, rule.n, rule.K
    size = len(K)
    checks: dict[str, bool] = {}
    messages: dict[str, str] = {}

    cols = [rule.template.column(i) for i in range(size)]
    unitary = True
    for i in range(size):
        ci = {r: x.conj() for r, x in cols[i]}
        for j in range(i, size):
            acc = f.zero
            for r, y in cols[j]:
                if r in ci:
                    acc = acc + ci[r] * y
            if acc != (1 if i == j else 0):
                unitary = False
                messages["unitarity"] = f"K^dagger K differs from the identity at ({i}, {j})"
                break
        if not unitary:
            break
    checks["unitarity"] = unitary

    col0 = cols[0]
    quiescent = len(col0) == 1 and col0[0][0] == 0 and col0[0][1] == 1
    if not quiescent:
        if len(col0) == 1 and col0[0][0] == 0:
            messages["quiescence"] = (
                f"K multiplies the quiescent window by the phase {col0[0][1]}; renormalize K by the inverse phase"
            )
        else:
            messages["quiescence"] = "K does not fix the all-quiescent window"
    checks["quiescence"] = quiescent

    commute = True
    zero = (0,) * rule.dim
    for delta in _overlap_shifts(rule.neighborhood):
        kc, kd = rule.local_map_at(zero), rule.local_map_at(delta)
        joint = list(kc.cells) + [s for s in kd.cells if s not in kc.cells]
        for pattern in product(range(1, n + 1), repeat=len(joint)):
            cfg = Configuration._raw(rule.dim + 1, {s: p for s, p in zip(joint, pattern) if p != QUIESCENT})
            e = StateVector._raw(f, n, rule.dim + 1, {cfg: f.one})
            if apply(kc, apply(kd, e)) != apply(kd, apply(kc, e)):
                commute = False
                messages["commutation"] = f"K at the origin and K shifted by {delta} do not commute"
                break
        if not commute:
            break
    checks["commutation"] = commute
    return RuleReport(checks, messages)


def _swap_layers(v: StateVector, cells: frozenset[Coord]) -> StateVector:
    out = {}
    for cfg, a in v.items():
        store = {}
        for c, s in cfg.items():
            if c[:-1] in cells:
                store[(*c[:-1], 1 - c[-1])] = s
            else:
                store[c] = s
        out[Configuration._raw(v.dim, store)] = a
    return StateVector._raw(v.field, v.n, v.dim, out)


def qca_step(psi: DoubledState, rule: QCARule, order: Sequence[Sequence[int]] | None = None) -> DoubledState:
    """One step of the global evolution restricted to the finite active region.

    ``order`` optionally fixes the order in which the ``K`` copies are
    applied; it must list exactly the active cells.
    """
    if psi.dim != rule.dim:
        raise DomainError("rule and state have different lattice dimensions")
    if psi.n != rule.n or psi.field != rule.field:
        raise DomainError("rule and state disagree on alphabet or field")
    if not psi.ancillas_quiescent():
        raise ContractViolation("quiescence", "ancilla sites must be quiescent before a step")
    active = grow(psi.support, rule.neighborhood)
    if order is None:
        cells = sorted(active)
    else:
        cells = [tuple(c) for c in order]
        if len(cells) != len(active) or set(cells) != active:
            raise DomainError("order must list each active cell exactly once")
    v = psi.vector
    for c in cells:
        v = apply(rule.local_map_at(c), v)
    out = DoubledState(_swap_layers(v, active))
    if not out.ancillas_quiescent():
        raise ContractViolation(
            "quiescence", "ancilla sites are not restored to the quiescent state; K is not of the form G Swap G^dagger"
        )
    return out


def qca_evolve(psi: DoubledState, rule: QCARule, k: int) -> DoubledState:
    if k < 0:
        raise DomainError("number of steps must be non-negative")
    for _ in range(k):
        psi = qca_step(psi, rule)
    return psi


# -- rule builders --------------------------------------------------------------


def swap_rule(neighborhood: Neighborhood, n: int, field: FieldSpec) -> QCARule:
    """K = Swap(C', C): the step is the identity."""
    return shift_unitary_rule(identity_matrix(field, n), neighborhood, n, field)


def shift_unitary_rule(
    u: Sequence[Sequence[Scalar]],
    neighborhood: Neighborhood,
    n: int,
    field: FieldSpec,
    source: Sequence[int] | None = None,
) -> QCARule:
    """K = (u on C') Swap(C', C + source).

    The step moves the content of ``C + source`` to ``C`` and applies ``u``;
    with ``source`` zero it applies ``u`` at every cell.
    """
    offsets = neighborhood.offsets
    src = tuple(source) if source is not None else (0,) * neighborhood.dim
    if src not in offsets:
        raise DomainError(f"source offset {src} is not in the neighbourhood")
    k = offsets.index(src) + 1
    width = neighborhood.r + 1
    size = n**width
    K = [[field.zero] * size for _ in range(size)]
    for pattern in product(range(n), repeat=width):
        swapped = list(pattern)
        swapped[0], swapped[k] = swapped[k], swapped[0]
        col = _digits_to_index(pattern, n)
        for a in range(n):
            entry = field(u[a][swapped[0]])
            if entry:
                out = list(swapped)
                out[0] = a
                K[_digits_to_index(out, n)][col] = entry
    return QCARule(neighborhood, K, n, field)


def coupled_phase_rule(
    u: Sequence[Sequence[Scalar]],
    coupling: Sequence[Sequence[Scalar]],
    n: int,
    field: FieldSpec,
    dim: int = 1,
) -> QCARule:
    """Rule of G = (prod_x D_{x, x+e}) (tensor_x u) along the first axis.

    ``D`` is the diagonal two-cell gate with entries ``coupling[a][b]``; row
    and column 0 must be 1 so quiescent cells stay uncoupled. The window
    unitary is ``K = G^dagger Swap(C', C) G`` restricted to
    ``(C', C - e, C, C + e)``, so the step applies G. The rule entangles
    neighbouring cells.
    """
    if any(coupling[0][b] != 1 or coupling[b][0] != 1 for b in range(n)):
        raise DomainError("the coupling must be trivial on the quiescent state")
    e = (1,) + (0,) * (dim - 1)
    nb = Neighborhood((tuple(-x for x in e), (0,) * dim, e))
    one_cell = identity_matrix(field, n)
    ug = kron(kron(kron(one_cell, u), u), u)
    size = n**4
    diag = [[field.zero] * size for _ in range(size)]
    for pattern in product(range(n), repeat=4):
        i = _digits_to_index(pattern, n)
        diag[i][i] = field(coupling[pattern[1]][pattern[2]]) * field(coupling[pattern[2]][pattern[3]])
    g = matmul(diag, ug)
    sw = [[field.zero] * size for _ in range(size)]
    for pattern in product(range(n), repeat=4):
        out = list(pattern)
        out[0], out[2] = out[2], out[0]
        sw[_digits_to_index(out, n)][_digits_to_index(pattern, n)] = field.one
    K = matmul(dagger(g), matmul(sw, g))
    return QCARule(nb, K, n, field)


def _digits_to_index(digits: Sequence[int], n: int) -> int:
    k = 0
    for d in digits:
        k = k * n + d
    return k


# -- causality -----------------------------------------------------------------


@dataclass
class CausalityTrial:
    region: list[Coord]
    perturbed: list[Coord]
    precondition: bool
    passed: bool


@dataclass
class CausalityReport:
    trials: list[CausalityTrial]

    @property
    def passed(self) -> int:
        return sum(t.passed for t in self.trials)

    @property
    def failed(self) -> int:
        return len(self.trials) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "failed": self.failed,
            "trials": [
                {"region": [list(c) for c in t.region], "perturbed": [list(c) for c in t.perturbed], "passed": t.passed}
                for t in self.trials
            ],
        }


def _amplitude_pool(field: FieldSpec) -> list[Scalar]:
    pool = [field.one, -field.one, field.scalar(2), field.scalar(Fraction(1, 2))]
    if field.degree > 1:
        pool += [field.gen, -field.gen, field.gen + 1]
    return pool


def _random_doubled_state(field: FieldSpec, n: int, cells: Sequence[Coord], rng: random.Random, terms: int) -> DoubledState:
    pool = _amplitude_pool(field)
    dim = len(cells[0])
    out = []
    for _ in range(terms):
        store = {}
        for c in cells:
            if rng.random() < 0.5:
                store[c] = rng.randrange(2, n + 1)
        out.append((Configuration._raw(dim, store), rng.choice(pool)))
    v = StateVector(field, n, dim, out)
    if not v:
        v = StateVector.basis(field, n, Configuration._raw(dim, {cells[0]: 2}))
    return DoubledState.from_primary(v)


def _perturbations(field: FieldSpec, n: int) -> list[list[list[Scalar]]]:
    # local unitaries that move population between the quiescent and first excited level
    pool = [embed(pauli_x(field), (1, 2), n, field)]
    try:
        pool.append(embed(hadamard(field), (1, 2), n, field))
    except DomainError:
        pass
    return pool


def check_causality(
    rule: QCARule,
    trials: int = 50,
    seed: int = 0,
    region_size: int = 1,
    window: Sequence[Sequence[int]] | None = None,
    step: Callable[[DoubledState], DoubledState] | None = None,
    terms: int = 3,
) -> CausalityReport:
    """Randomized test that a step only propagates information from the read cone.

    Each trial draws a state psi1 on ``window`` and a region A, then builds
    psi2 by acting with local unitaries on every window cell outside the read
    cone of A, so both states have the same reduced density matrix on the
    cone. The trial passes when the reduced density matrices on A agree
    after one step. ``step`` substitutes an arbitrary global map for the
    rule's own step (used to exercise the checker on non-causal maps).
    """
    rng = random.Random(seed)
    d = rule.dim
    if window is None:
        window = [(x,) + (0,) * (d - 1) for x in range(-2, 6)]
    window = [tuple(c) for c in window]
    stepper = step if step is not None else (lambda s: qca_step(s, rule))
    pert_pool = _perturbations(rule.field, rule.n)
    results = []
    for _ in range(trials):
        psi1 = _random_doubled_state(rule.field, rule.n, window, rng, terms)
        region = rng.sample(window, min(region_size, len(window)))
        cone = read_cone(region, rule.neighborhood)
        outside = [c for c in window if c not in cone]
        v = psi1.vector
        for c in outside:
            g = rng.choice(pert_pool)
            v = apply(LocalMap([_site(c, PRIMARY)], g, rule.n, rule.field), v)
        psi2 = DoubledState(v)
        cone_sites = sorted(_site(c, PRIMARY) for c in cone)
        pre = reduced_density(psi1.vector, cone_sites) == reduced_density(psi2.vector, cone_sites)
        a_sites = [_site(c, PRIMARY) for c in sorted(region)]
        out1, out2 = stepper(psi1), stepper(psi2)
        passed = reduced_density(out1.vector, a_sites) == reduced_density(out2.vector, a_sites)
        results.append(CausalityTrial(sorted(region), outside, pre, passed and pre))
    return CausalityReport(results)


# -- measurement ----------------------------------------------------------------


def cell_probabilities(psi: DoubledState | StateVector, c: Sequence[int]) -> list[Scalar]:
    """Exact outcome probabilities ``p_1 .. p_n`` for measuring cell ``c``."""
    if isinstance(psi, DoubledState):
        v, site = psi.vector, _site(c, PRIMARY)
    else:
        v, site = psi, tuple(c)
    if inner(v, v) != 1:
        raise DomainError("measurement needs a state of norm exactly 1")
    return reduced_density(v, [site]).diagonal()


def measure_cell(
    psi: DoubledState | StateVector,
    c: Sequence[int],
    seed: int,
    samples: int,
) -> dict[int, int]:
    """Sample ``samples`` measurements of cell ``c`` in the basis ``e_1..e_n``.

    Exact probabilities are enclosed in rational intervals of width at most
    2**-40 and the interval midpoints drive a seeded multinomial draw.
    """
    if samples < 0:
        raise DomainError("sample count must be non-negative")
    probs = cell_probabilities(psi, c)
    eps = Fraction(1, 2**40)
    mids = []
    for p in probs:
        lo, hi = p.field.approx_real(p, eps)
        mids.append(float((lo + hi) / 2))
    weights = np.clip(np.array(mids, dtype=float), 0.0, None)
    weights = weights / weights.sum()
    counts = np.random.default_rng(seed).multinomial(samples, weights)
    return {e + 1: int(k) for e, k in enumerate(counts)}
