"""Finite linear combinations of configurations, with exact coefficients.

A :class:`StateVector` is a sparse map from :class:`Configuration` to nonzero
:class:`Scalar`. Configurations form an orthonormal basis, so the inner
product only pairs equal configurations. Reduced density matrices are taken
over an ordered list of cells; their rows and columns are indexed by the
mixed-radix number of the cell pattern, first cell most significant.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .classical_ca import config_index, config_unindex
from .codec import coord_index, coord_unindex, fold_int, seq_decode, seq_encode, unfold_int
from .errors import DomainError, FieldMismatchError
from .field import FieldSpec, Scalar
from .lattice import QUIESCENT, Configuration, Coord

__all__ = [
    "StateVector",
    "DensityMatrix",
    "set_cell",
    "prepend",
    "inner",
    "scalar_index",
    "scalar_unindex",
    "vector_index",
    "vector_unindex",
    "reduced_density",
    "pattern_index",
    "pattern_symbols",
]


def pattern_index(symbols: Sequence[int], n: int) -> int:
    k = 0
    for s in symbols:
        k = k * n + (s - 1)
    return k


def pattern_symbols(k: int, n: int, length: int) -> tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        k, d = divmod(k, n)
        out[i] = d + 1
    return tuple(out)


class StateVector:
    """Element of the Fock space over ``field`` with ``n`` basis states per cell."""

    __slots__ = ("field", "n", "dim", "_terms")

    def __init__(
        self,
        field: FieldSpec,
        n: int,
        dim: int,
        terms: Mapping[Configuration, object] | Iterable[tuple[Configuration, object]] = (),
    ):
        if n < 1:
            raise DomainError("alphabet size must be >= 1")
        self.field = field
        self.n = n
        self.dim = dim
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Configuration, Scalar] = {}
        for cfg, c in items:
            if cfg.dim != dim:
                raise DomainError(f"configuration of dimension {cfg.dim} in a {dim}-dimensional vector")
            if cfg.max_symbol() > n:
                raise DomainError(f"configuration uses symbols beyond 1..{n}")
            c = field(c)
            if cfg in acc:
                c = acc[cfg] + c
            acc[cfg] = c
        self._terms = {cfg: c for cfg, c in acc.items() if c}

    @classmethod
    def _raw(cls, field: FieldSpec, n: int, dim: int, terms: dict[Configuration, Scalar]) -> "StateVector":
        self = object.__new__(cls)
        self.field, self.n, self.dim = field, n, dim
        self._terms = {cfg: c for cfg, c in terms.items() if c}
        return self

    @classmethod
    def zero(cls, field: FieldSpec, n: int, dim: int = 3) -> "StateVector":
        return cls._raw(field, n, dim, {})

    @classmethod
    def basis(cls, field: FieldSpec, n: int, cfg: Configuration) -> "StateVector":
        return cls(field, n, cfg.dim, [(cfg, field.one)])

    @classmethod
    def quiescent(cls, field: FieldSpec, n: int, dim: int = 3) -> "StateVector":
        return cls.basis(field, n, Configuration.quiescent(dim))

    # -- container protocol ----------------------------------------------

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, cfg: Configuration) -> Scalar:
        return self._terms.get(cfg, self.field.zero)

    def sorted_terms(self) -> list[tuple[Configuration, Scalar]]:
        return sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0].items()))

    @property
    def support(self) -> frozenset[Coord]:
        cells = set()
        for cfg in self._terms:
            cells.update(cfg.support)
        return frozenset(cells)

    # -- linear structure ------------------------------------------------

    def _check(self, other: "StateVector") -> None:
        if self.field != other.field:
            raise FieldMismatchError("vectors over different fields")
        if (self.n, self.dim) != (other.n, other.dim):
            raise DomainError("vectors over different alphabets or lattices")

    def __add__(self, other: "StateVector") -> "StateVector":
        if not isinstance(other, StateVector):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for cfg, c in other._terms.items():
            out[cfg] = out[cfg] + c if cfg in out else c
        return StateVector._raw(self.field, self.n, self.dim, out)

    def __neg__(self) -> "StateVector":
        return StateVector._raw(self.field, self.n, self.dim, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "StateVector") -> "StateVector":
        if not isinstance(other, StateVector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar) -> "StateVector":
        if isinstance(scalar, StateVector):
            return NotImplemented
        s = self.field(scalar)
        return StateVector._raw(self.field, self.n, self.dim, {k: s * c for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return (self.field, self.n, self.dim) == (other.field, other.n, other.dim) and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, self.dim, frozenset(self._terms.items())))

    def translate(self, t: Sequence[int]) -> "StateVector":
        return StateVector._raw(self.field, self.n, self.dim, {cfg.translate(t): c for cfg, c in self._terms.items()})

    def norm_sq(self) -> Scalar:
        return inner(self, self)

    def __repr__(self):
        body = " + ".join(f"({c})|{dict(cfg.items())}>" for cfg, c in self.sorted_terms()[:4])
        more = "" if len(self) <= 4 else f" + ... ({len(self)} terms)"
        return f"StateVector({body or '0'}{more})"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> list[dict]:
        return [{"config": cfg.to_json(), "coeff": c.to_json()} for cfg, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, doc, field: FieldSpec, n: int, dim: int) -> "StateVector":
        try:
            terms = [(Configuration.from_json(t["config"], dim=dim), field.scalar(t["coeff"])) for t in doc]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed state vector: {exc}") from None
        return cls(field, n, dim, terms)


def set_cell(c: Sequence[int], e: int, v: StateVector) -> StateVector:
    """Write basis state ``e`` at cell ``c`` of every term (bilinearly).

    The cell must be quiescent in every term of ``v``.
    """
    c = tuple(c)
    if not 1 <= e <= v.n:
        raise DomainError(f"basis index {e} outside 1..{v.n}")
    if any(cfg[c] != QUIESCENT for cfg in v):
        raise DomainError(f"cell {c} is not quiescent in every term")
    if e == QUIESCENT:
        return v
    return StateVector._raw(v.field, v.n, v.dim, {cfg.replace({c: e}): coef for cfg, coef in v.items()})


def prepend(e: int, v: StateVector) -> StateVector:
    """The tensor ``e (x) v``: push ``e`` in front of each configuration's sequence.

    Every cell moves from index ``k`` to index ``k + 1`` in the cell enumeration
    and cell 0 receives ``e``.
    """
    if not 1 <= e <= v.n:
        raise DomainError(f"basis index {e} outside 1..{v.n}")
    origin = coord_unindex(0, v.dim)
    out = {}
    for cfg, coef in v.items():
        store = {coord_unindex(coord_index(c) + 1, v.dim): s for c, s in cfg.items()}
        if e != QUIESCENT:
            store[origin] = e
        out[Configuration._raw(v.dim, store)] = coef
    return StateVector._raw(v.field, v.n, v.dim, out)


def inner(u: StateVector, v: StateVector) -> Scalar:
    """``<u|v>``, conjugate-linear in ``u``."""
    u._check(v)
    acc = u.field.zero
    small, big = (u, v) if len(u) <= len(v) else (v, u)
    for cfg in small:
        if cfg in big._terms:
            acc = acc + u._terms[cfg].conj() * v._terms[cfg]
    return acc


def scalar_index(s: Scalar) -> int:
    """Godel number of a scalar: folded numerator and denominator of each coefficient."""
    seq = []
    for c in s.coefficients:
        seq.append(fold_int(c.numerator))
        seq.append(c.denominator - 1)
    return seq_encode(seq)


def scalar_unindex(k: int, field: FieldSpec) -> Scalar:
    seq = seq_decode(k)
    if len(seq) != 2 * field.degree:
        raise DomainError(f"{k} is not a scalar index for {field!r}")
    coeffs = [Fraction(unfold_int(seq[i]), seq[i + 1] + 1) for i in range(0, len(seq), 2)]
    return field.scalar(coeffs)


def vector_index(v: StateVector, max_bits: int | None = None) -> int:
    """Godel number of ``v``: alternating scalar and configuration indices.

    Terms are listed by increasing configuration index so that equal vectors
    get equal indices.
    """
    terms = sorted(((config_index(cfg, max_bits=max_bits), c) for cfg, c in v.items()), key=lambda t: t[0])
    seq = []
    for idx, c in terms:
        seq.append(scalar_index(c))
        seq.append(idx)
    return seq_encode(seq, max_bits=max_bits)


def vector_unindex(k: int, field: FieldSpec, n: int, dim: int = 3) -> StateVector:
    seq = seq_decode(k)
    if len(seq) % 2:
        raise DomainError(f"{k} is not a vector index")
    terms = [(config_unindex(seq[i + 1], dim), scalar_unindex(seq[i], field)) for i in range(0, len(seq), 2)]
    return StateVector(field, n, dim, terms)


class DensityMatrix:
    """Exact matrix over the cell patterns of ``region``."""

    __slots__ = ("region", "n", "field", "entries")

    def __init__(self, region: Sequence[Coord], n: int, field: FieldSpec, entries: Sequence[Sequence[Scalar]]):
        self.region = tuple(region)
        self.n = n
        self.field = field
        self.entries = tuple(tuple(row) for row in entries)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self.entries[i][j]

    def trace(self) -> Scalar:
        acc = self.field.zero
        for i in range(self.size):
            acc = acc + self.entries[i][i]
        return acc

    def diagonal(self) -> list[Scalar]:
        return [self.entries[i][i] for i in range(self.size)]

    def is_hermitian(self) -> bool:
        return all(
            self.entries[i][j] == self.entries[j][i].conj() for i in range(self.size) for j in range(i, self.size)
        )

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return (self.region, self.n, self.field, self.entries) == (other.region, other.n, other.field, other.entries)

    def __repr__(self):
        return f"DensityMatrix(region={list(self.region)}, size={self.size})"

    def to_json(self) -> dict:
        return {
            "region": [list(c) for c in self.region],
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }


def reduced_density(
    v: StateVector,
    region: Iterable[Sequence[int]],
    exterior_key: Callable[[Configuration], object] | None = None,
) -> DensityMatrix:
    """Partial trace of ``|v><v|`` onto ``region``.

    A set-like region is put in sorted order; a list keeps its order.
    ``exterior_key`` only changes the order in which exterior patterns are
    summed, which cannot change the exact result.
    """
    if not v:
        raise DomainError("the zero vector has no density matrix")
    if isinstance(region, (set, frozenset)):
        cells = tuple(sorted(tuple(c) for c in region))
    else:
        cells = tuple(tuple(c) for c in region)
    if len(set(cells)) != len(cells):
        raise DomainError("region cells must be distinct")
    n = v.n
    groups: dict[Configuration, dict[int, Scalar]] = {}
    for cfg, c in v.items():
        i = pattern_index([cfg[x] for x in cells], n)
        groups.setdefault(cfg.without(cells), {})[i] = c
    size = n ** len(cells)
    zero = v.field.zero
    rows = [[zero] * size for _ in range(size)]
    exteriors = list(groups)
    if exterior_key is not None:
        exteriors.sort(key=exterior_key)
    for ext in exteriors:
        amps = groups[ext]
        conj = {j: a.conj() for j, a in amps.items()}
        for i, a in amps.items():
            row = rows[i]
            for j, b in conj.items():
                row[j] = row[j] + a * b
    return DensityMatrix(cells, n, v.field, rows)
