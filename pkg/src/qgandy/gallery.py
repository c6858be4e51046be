"""Counter-examples showing why each physical hypothesis is needed.

Each demo builds a dynamics that drops one hypothesis and reads bits of a
set ``U`` back out of the evolution. ``U`` is played by a computable
:class:`Oracle` so the recovered bits can be checked. With ``restored=True``
a demo runs the same harness with the hypothesis put back; the dynamics then
no longer consult the oracle and the readout is the same for every oracle.

Cells use the alphabet ``{q, 0, 1}`` encoded as symbols ``1, 2, 3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from sympy import isprime

from .errors import DomainError
from .field import FieldSpec, Scalar, zeta8
from .fock import StateVector
from .gates import embed
from .lattice import QUIESCENT, Configuration, Neighborhood
from .qca import DoubledState, cell_probabilities, measure_cell, qca_step, shift_unitary_rule

__all__ = [
    "Oracle",
    "DemoResult",
    "ScalarEstimate",
    "Q",
    "ZERO",
    "ONE",
    "demo_space_inhomogeneous",
    "demo_time_inhomogeneous",
    "demo_unbounded_density",
    "density_map",
    "demo_unbounded_velocity",
    "velocity_map",
    "demo_nonquiescent_input",
    "demo_scalar_extraction",
    "demo_stochastic_correlation",
    "DEMOS",
]

Q, ZERO, ONE = QUIESCENT, 2, 3


def _bit_symbol(b: int) -> int:
    return ONE if b else ZERO


def _symbol_bit(s: int) -> int:
    if s not in (ZERO, ONE):
        raise DomainError(f"symbol {s} is not a bit")
    return int(s == ONE)


def _not_pow(s: int, k: int) -> int:
    """Not**k on {0, 1}; q is left alone."""
    if s == Q or not k:
        return s
    return ONE if s == ZERO else ZERO


@dataclass(frozen=True)
class Oracle:
    """A total computable predicate on the naturals standing in for ``U``."""

    name: str
    predicate: Callable[[int], int]

    def __call__(self, i: int) -> int:
        if i < 0:
            raise DomainError("oracle indices are natural numbers")
        return int(bool(self.predicate(i)))

    @classmethod
    def primality(cls) -> "Oracle":
        return cls("primality", lambda i: isprime(i))

    @classmethod
    def parity(cls) -> "Oracle":
        """1 on odd numbers."""
        return cls("parity", lambda i: i % 2)

    @classmethod
    def bitstring(cls, bits: str) -> "Oracle":
        """Planted bits; every index past the end reads 0."""
        if any(b not in "01" for b in bits):
            raise DomainError(f"bitstring oracle needs 0/1 characters, got {bits!r}")
        return cls(f"bits:{bits}", lambda i: int(i < len(bits) and bits[i] == "1"))

    @classmethod
    def constant(cls, b: int) -> "Oracle":
        return cls("ones" if b else "zeros", lambda i: b)

    @classmethod
    def parse(cls, text: str) -> "Oracle":
        """``primality``, ``parity``, ``zeros``, ``ones`` or ``bits:<0/1 string>``."""
        if text == "primality":
            return cls.primality()
        if text == "parity":
            return cls.parity()
        if text in ("zeros", "ones"):
            return cls.constant(int(text == "ones"))
        if text.startswith("bits:"):
            return cls.bitstring(text[5:])
        raise DomainError(f"unknown oracle {text!r}")


@dataclass
class DemoResult:
    recovered_bits: list[dict]
    matches_oracle: bool
    details: dict = dc_field(default_factory=dict)

    @property
    def bits(self) -> list[int]:
        return [b["bit"] for b in self.recovered_bits]

    def to_json(self) -> dict:
        return {"recovered_bits": self.recovered_bits, "matches_oracle": self.matches_oracle, "details": self.details}


def _result(oracle: Oracle, recovered: list[tuple[int, int]], method: str, details: dict) -> DemoResult:
    bits = [{"index": i, "bit": b, "method": method} for i, b in recovered]
    return DemoResult(bits, all(b == oracle(i) for i, b in recovered), details)


# -- homogeneity of space -------------------------------------------------------


def space_map(cfg: Configuration, oracle: Oracle | None) -> Configuration:
    """Apply Not**U(x) at every cell x; ``None`` is the homogeneous identity."""
    if cfg.dim != 1:
        raise DomainError("the space demo lives on a one-dimensional lattice")
    if oracle is None:
        return cfg
    return Configuration._raw(1, {c: _not_pow(s, oracle(c[0]) if c[0] >= 0 else 0) for c, s in cfg.items()})


def demo_space_inhomogeneous(oracle: Oracle, indices: Sequence[int], restored: bool = False) -> DemoResult:
    """Put a 0 at cell ``i``, apply the position-dependent rule once, read cell ``i``."""
    recovered = []
    for i in indices:
        cfg = Configuration({(i,): ZERO}, dim=1)
        image = space_map(cfg, None if restored else oracle)[(i,)]
        recovered.append((i, _symbol_bit(image)))
    method = "homogeneous identity rule" if restored else "position-dependent Not rule"
    return _result(oracle, recovered, method, {"restored": restored})


# -- homogeneity of time --------------------------------------------------------


def demo_time_inhomogeneous(oracle: Oracle, steps: int, restored: bool = False) -> DemoResult:
    """Apply Not**U(t) to a single cell at step ``t``; bit ``t`` is whether the cell changed."""
    if steps < 0:
        raise DomainError("number of steps must be non-negative")
    cell = (0,)
    cfg = Configuration({cell: ZERO}, dim=1)
    trajectory = [_symbol_bit(cfg[cell])]
    recovered = []
    for t in range(steps):
        k = 0 if restored else oracle(t)
        new = Configuration._raw(1, {c: _not_pow(s, k) for c, s in cfg.items()})
        recovered.append((t, int(new[cell] != cfg[cell])))
        cfg = new
        trajectory.append(_symbol_bit(cfg[cell]))
    method = "time-independent identity rule" if restored else "time-dependent Not rule"
    return _result(oracle, recovered, method, {"restored": restored, "trajectory": trajectory})


# -- bounded density ------------------------------------------------------------


def density_map(k: int, oracle: Oracle) -> int:
    """The single-cell map sending the j-th member of U to 2j and the j-th non-member to 2j+1."""
    if k < 0:
        raise DomainError("cell contents are natural numbers")
    member = oracle(k)
    j = sum(1 for x in range(k) if oracle(x) == member)
    return 2 * j if member else 2 * j + 1


def demo_unbounded_density(oracle: Oracle, m: int, restored: bool = False) -> DemoResult:
    """Run the unbounded-alphabet cell on inputs 0..m; bit k is the parity test on f_U(k).

    With bounded density restored the cell has a finite alphabet and the rule
    is a fixed finite table; here it is the identity on the two bits, so the
    output carries no information about U.
    """
    if m < 0:
        raise DomainError("m must be a natural number")
    recovered, images = [], []
    if restored:
        for k in range(m + 1):
            images.append(k % 2)
            recovered.append((k, int(images[-1] == 0)))
    else:
        # one pass computing f_U(0..m) with running member / non-member counts
        counts = [0, 0]
        for k in range(m + 1):
            member = oracle(k)
            f = 2 * counts[member] if member else 2 * counts[member] + 1
            counts[member] += 1
            images.append(f)
            recovered.append((k, int(f % 2 == 0)))
    method = "finite-alphabet identity rule" if restored else "parity of f_U on an unbounded alphabet"
    return _result(oracle, recovered, method, {"restored": restored, "images": images})


# -- bounded velocity -----------------------------------------------------------


def velocity_map(cfg: Configuration, oracle: Oracle) -> Configuration:
    """Map a segment ``q x 1^i q`` to ``q Not**U(i)(x) 1^i q``.

    The head ``x`` is the leftmost non-quiescent cell. The map reads the
    whole segment, however long, so information travels unboundedly far in
    one step.
    """
    if cfg.dim != 1:
        raise DomainError("the velocity demo lives on a one-dimensional lattice")
    cells = sorted(c[0] for c in cfg.support)
    if not cells:
        return cfg
    head = cells[0]
    if cells != list(range(head, head + len(cells))):
        raise DomainError("malformed segment: non-quiescent cells are not contiguous")
    if cfg[(head,)] not in (ZERO, ONE):
        raise DomainError("malformed segment: the head must hold 0 or 1")
    if any(cfg[(c,)] != ONE for c in cells[1:]):
        raise DomainError("malformed segment: the tail must consist of 1s")
    i = len(cells) - 1
    return cfg.replace({(head,): _not_pow(cfg[(head,)], oracle(i))})


def demo_unbounded_velocity(oracle: Oracle, i: int, x: int, restored: bool = False) -> DemoResult:
    """Build ``q x 1^i q`` and read the head after one step; bit = whether it flipped.

    With bounded velocity restored the head can only see a fixed radius, so
    the rule cannot depend on ``i``; the harness then uses the identity.
    """
    if i < 0 or x not in (0, 1):
        raise DomainError("need i >= 0 and x in {0, 1}")
    cells = {(0,): _bit_symbol(x)}
    cells.update({(k,): ONE for k in range(1, i + 1)})
    cfg = Configuration(cells, dim=1)
    out = cfg if restored else velocity_map(cfg, oracle)
    head = _symbol_bit(out[(0,)])
    method = "radius-limited identity rule" if restored else "segment-length-dependent head flip"
    return _result(oracle, [(i, int(head != x))], method, {"restored": restored, "x": x, "head": head})


# -- quiescent initial state ----------------------------------------------------


def demo_nonquiescent_input(oracle: Oracle, width: int, restored: bool = False) -> DemoResult:
    """Write U(0..width-1) into the initial configuration, evolve with the identity, read back.

    The restored harness starts from a configuration given independently of
    U (all quiescent); quiescent cells read as 0.
    """
    if width < 0:
        raise DomainError("width must be non-negative")
    if restored:
        cfg = Configuration.quiescent(1)
    else:
        cfg = Configuration({(k,): _bit_symbol(oracle(k)) for k in range(width)}, dim=1)
    out = cfg  # the trivial rule
    recovered = [(k, int(out[(k,)] == ONE)) for k in range(width)]
    method = "quiescent initial state" if restored else "oracle written into the initial state"
    return _result(oracle, recovered, method, {"restored": restored})


# -- scalar extraction ----------------------------------------------------------


@dataclass
class ScalarEstimate:
    estimate: float
    exact: Scalar
    counts: dict[int, int]
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "exact": self.exact.to_json(),
            "exact_float": float(self.exact.field.approx_real(self.exact, Fraction(1, 2**40))[0]),
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "samples": self.samples,
            "seed": self.seed,
        }


def _real_interval(s: Scalar) -> tuple[Fraction, Fraction]:
    return s.field.approx_real(s, Fraction(1, 2**40))


def demo_scalar_extraction(
    u: Scalar | Fraction | int,
    samples: int = 10_000,
    seed: int = 0,
    field: FieldSpec | None = None,
) -> ScalarEstimate:
    """Estimate ``u**2`` by measuring ``N|0>`` where ``N|0> = u|0> + sqrt(1-u^2)|1>``.

    ``N`` is the real rotation ``[[u, w], [w, -u]]`` on the levels 0, 1 of a
    cell with ``w = sqrt(1 - u**2)``, which must lie in the field. It runs
    as a one-cell rule through the quantum engine, and the cell is then
    sampled with :func:`measure_cell`.
    """
    f = field if field is not None else zeta8()
    u = f(u)
    if u.conj() != u:
        raise DomainError("u must be real")
    if u.is_rational:
        ur = u.rational()
        if not 0 < ur <= 1:
            raise DomainError("u must satisfy 0 < u <= 1")
    elif _real_interval(u)[0] <= 0 or _real_interval(f.one - u * u)[1] < 0:
        raise DomainError("u must satisfy 0 < u <= 1")
    w = f.sqrt(f.one - u * u)
    if w and _real_interval(w)[1] < 0:
        w = -w
    n = 3
    N = embed([[u, w], [w, -u]], (ZERO, ONE), n, f)
    rule = shift_unitary_rule(N, Neighborhood(((0,),)), n, f)
    psi = DoubledState.from_primary(StateVector.basis(f, n, Configuration({(0,): ZERO}, dim=1)))
    out = qca_step(psi, rule)
    exact = cell_probabilities(out, (0,))[ZERO - 1]
    counts = measure_cell(out, (0,), seed, samples)
    estimate = counts[ZERO] / samples if samples else 0.0
    return ScalarEstimate(estimate, exact, counts, samples, seed)


# -- correlated stochastic outputs ----------------------------------------------


def demo_stochastic_correlation(
    oracle: Oracle,
    i: int,
    samples: int = 10_000,
    seed: int = 0,
    restored: bool = False,
    threshold: float = 0.9,
) -> DemoResult:
    """Sample the stochastic map on ``...q q 0 1^i 0 q q...``.

    Each 0 becomes a fair coin over {0, 1}; the two coins are perfectly
    correlated exactly when U(i) = 1, the distance information being
    collected non-locally. Restored locality draws the coins independently.
    The recovered bit is whether the agreement frequency exceeds
    ``threshold``.
    """
    if i < 0 or samples <= 0:
        raise DomainError("need i >= 0 and a positive sample count")
    cells = {(0,): ZERO, (i + 1,): ZERO}
    cells.update({(k,): ONE for k in range(1, i + 1)})
    start = Configuration(cells, dim=1)
    rng = np.random.default_rng(seed)
    first = rng.integers(0, 2, size=samples)
    second = rng.integers(0, 2, size=samples)
    if not restored and oracle(i):
        second = first
    agreement = float(np.mean(first == second))
    method = "independent local coins" if restored else "distance-correlated coins"
    details = {
        "restored": restored,
        "agreement": agreement,
        "samples": samples,
        "seed": seed,
        "initial": start.to_json(),
    }
    return _result(oracle, [(i, int(agreement > threshold))], method, details)


DEMOS = {
    "space-inhomogeneous": demo_space_inhomogeneous,
    "time-inhomogeneous": demo_time_inhomogeneous,
    "unbounded-density": demo_unbounded_density,
    "unbounded-velocity": demo_unbounded_velocity,
    "nonquiescent-input": demo_nonquiescent_input,
    "scalar-extraction": demo_scalar_extraction,
    "stochastic-correlation": demo_stochastic_correlation,
}
