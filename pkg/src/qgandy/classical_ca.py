"""Classical cellular automata on Z^d with a quiescent symbol.

A rule is a finite table ``chi : S^r -> S`` over the symbols ``1..n`` of the
cells ``c + sigma_1, ..., c + sigma_r``; symbol 1 is quiescent and the rule
must map the all-quiescent neighbourhood to 1. The global map only visits
cells whose neighbourhood meets the support of the configuration.
"""

from __future__ import annotations

from itertools import product
from typing import Callable, Sequence

from .codec import coord_index, coord_unindex, seq_decode, seq_encode
from .errors import ContractViolation, DomainError
from .lattice import QUIESCENT, Configuration, Neighborhood, grow

__all__ = [
    "ClassicalRule",
    "step",
    "evolve",
    "config_sequence",
    "config_index",
    "config_unindex",
]


class ClassicalRule:
    """Local rule table over ``n`` symbols.

    ``chi`` lists the ``n**r`` outputs in row-major order over neighbourhood
    tuples: the tuple ``(s_1, ..., s_r)`` sits at position
    ``sum((s_i - 1) * n**(r - i))``, so the first offset is most significant.
    """

    def __init__(self, n: int, neighborhood: Neighborhood, chi: Sequence[int]):
        if n < 1:
            raise DomainError("alphabet size must be >= 1")
        r = neighborhood.r
        chi = tuple(chi)
        if len(chi) != n**r:
            raise DomainError(f"rule table needs {n ** r} entries, got {len(chi)}")
        bad = [s for s in chi if not isinstance(s, int) or not 1 <= s <= n]
        if bad:
            raise DomainError(f"rule table entries must lie in 1..{n}, got {bad[0]!r}")
        if chi[0] != QUIESCENT:
            raise ContractViolation("quiescence", "the rule must map the all-quiescent neighbourhood to the quiescent symbol")
        self.n = n
        self.neighborhood = neighborhood
        self.chi = chi

    @classmethod
    def from_function(cls, n: int, neighborhood: Neighborhood, f: Callable[..., int]) -> "ClassicalRule":
        table = [f(*symbols) for symbols in product(range(1, n + 1), repeat=neighborhood.r)]
        return cls(n, neighborhood, table)

    def __call__(self, *symbols: int) -> int:
        k = 0
        for s in symbols:
            k = k * self.n + (s - 1)
        return self.chi[k]

    def __eq__(self, other):
        if not isinstance(other, ClassicalRule):
            return NotImplemented
        return (self.n, self.neighborhood, self.chi) == (other.n, other.neighborhood, other.chi)

    def __repr__(self):
        return f"ClassicalRule(n={self.n}, r={self.neighborhood.r})"

    def to_json(self) -> dict:
        return {"n": self.n, "offsets": self.neighborhood.to_json(), "chi": list(self.chi)}

    @classmethod
    def from_json(cls, doc: dict) -> "ClassicalRule":
        return cls(doc["n"], Neighborhood.from_json(doc["offsets"]), doc["chi"])


def step(cfg: Configuration, rule: ClassicalRule) -> Configuration:
    """One application of the global map."""
    offs = rule.neighborhood.offsets
    if rule.neighborhood.dim != cfg.dim:
        raise DomainError("rule and configuration have different dimensions")
    if cfg.max_symbol() > rule.n:
        raise DomainError(f"configuration uses symbols beyond 1..{rule.n}")
    out = {}
    for c in grow(cfg.support, rule.neighborhood):
        s = rule(*(cfg[tuple(a + b for a, b in zip(c, o))] for o in offs))
        if s != QUIESCENT:
            out[c] = s
    return Configuration._raw(cfg.dim, out)


def evolve(cfg: Configuration, rule: ClassicalRule, k: int) -> Configuration:
    if k < 0:
        raise DomainError("number of steps must be non-negative")
    for _ in range(k):
        cfg = step(cfg, rule)
    return cfg


def config_sequence(cfg: Configuration) -> list[int]:
    """Shortest symbol sequence ``j'`` with ``j = j' 1 1 1 ...`` in cell-index order."""
    if not len(cfg):
        return []
    idx = {coord_index(c): s for c, s in cfg.items()}
    seq = [QUIESCENT] * (max(idx) + 1)
    for k, s in idx.items():
        seq[k] = s
    return seq


def config_index(cfg: Configuration, max_bits: int | None = None) -> int:
    return seq_encode(config_sequence(cfg), max_bits=max_bits)


def config_unindex(k: int, dim: int = 3) -> Configuration:
    seq = seq_decode(k)
    if seq and seq[-1] == QUIESCENT:
        raise DomainError(f"{k} is not the index of a configuration (trailing quiescent symbol)")
    if any(s < 1 for s in seq):
        raise DomainError(f"{k} is not the index of a configuration (symbol 0)")
    return Configuration(((coord_unindex(i, dim), s) for i, s in enumerate(seq)), dim=dim)
