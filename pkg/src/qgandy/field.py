"""Exact arithmetic in a number field presented as Q[x]/(m(x)).

A :class:`FieldSpec` fixes the monic minimal polynomial ``m``, the image of
the generator under complex conjugation, and a rational rectangle isolating
the complex root that the generator stands for. :class:`Scalar` values are
immutable and kept in a canonical form (integer numerators over one positive
denominator, fully reduced), so equality is syntactic.

The default field is Q(zeta_8), ``m(x) = x^4 + 1``, which holds ``i``,
``sqrt(2)`` and ``1/sqrt(2)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence, Union

import mpmath
import sympy

from .errors import DomainError, FieldMismatchError

__all__ = [
    "FieldSpec",
    "Scalar",
    "zeta8",
    "gaussian",
    "rationals",
    "add",
    "mul",
    "inv",
    "conj",
    "abs_sq",
    "approx_real",
]

Rational = Union[int, Fraction, str]
Interval = tuple[Fraction, Fraction]
Box = tuple[Interval, Interval]

_X = sympy.Symbol("x")


def _frac(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot read {value!r} as an exact rational")


# -- rational polynomial helpers (coefficient lists, constant first) ---------


def _ptrim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pdivmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] -= c * bc
        _ptrim(a)
    return _ptrim(q), a


def _psub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] -= c
    return _ptrim(out)


def _pmul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim(out)


# -- interval helpers --------------------------------------------------------


def _imul(a: Interval, b: Interval) -> Interval:
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(ps), max(ps)


def _iadd(a: Interval, b: Interval) -> Interval:
    return a[0] + b[0], a[1] + b[1]


def _isub(a: Interval, b: Interval) -> Interval:
    return a[0] - b[1], a[1] - b[0]


def _iscale(c: Fraction, a: Interval) -> Interval:
    return (c * a[0], c * a[1]) if c >= 0 else (c * a[1], c * a[0])


def _cmul(z: Box, w: Box) -> Box:
    (x, y), (u, v) = z, w
    return _isub(_imul(x, u), _imul(y, v)), _iadd(_imul(x, v), _imul(y, u))


class FieldSpec:
    """A finite extension of Q together with a complex embedding.

    Parameters
    ----------
    min_poly : sequence of rationals
        Coefficients of the monic minimal polynomial, constant term first.
    conj_image : sequence of rationals
        Complex conjugate of the generator, written in the power basis.
    root_box : ((re_lo, re_hi), (im_lo, im_hi))
        Rectangle with rational corners containing exactly one root of
        ``min_poly``; the generator is identified with that root.
    check : bool
        Verify irreducibility, the conjugation map and the root box.
    """

    def __init__(
        self,
        min_poly: Sequence[Rational],
        conj_image: Sequence[Rational],
        root_box: tuple[Sequence[Rational], Sequence[Rational]],
        *,
        name: str | None = None,
        check: bool = True,
    ):
        mp = tuple(_frac(c) for c in min_poly)
        if len(mp) < 2 or mp[-1] != 1:
            raise DomainError("minimal polynomial must be monic of degree >= 1")
        self.min_poly = mp
        self.degree = len(mp) - 1
        ci = tuple(_frac(c) for c in conj_image)
        if len(ci) != self.degree:
            raise DomainError(f"conj_image needs {self.degree} coefficients, got {len(ci)}")
        self.conj_image = ci
        (rl, rh), (il, ih) = root_box
        box = ((_frac(rl), _frac(rh)), (_frac(il), _frac(ih)))
        if box[0][0] > box[0][1] or box[1][0] > box[1][1]:
            raise DomainError("root box corners are out of order")
        self.root_box = box
        self.name = name
        self._key = (mp, ci, box)
        self._hash = hash(self._key)

        self._integral = all(c.denominator == 1 for c in mp)
        self._mod_int = tuple(int(c) for c in mp[:-1]) if self._integral else None
        self._boxes: list[Box] = [box]
        self._box_powers: dict[int, list[Box]] = {}
        self._root_index: int | None = None

        gamma = self.scalar(ci)
        self._conj_cols = self._power_columns(gamma)
        if check:
            self._validate(gamma)

    # -- identity --------------------------------------------------------

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.name:
            return f"FieldSpec({self.name})"
        return f"FieldSpec(min_poly={[str(c) for c in self.min_poly]})"

    # -- construction of scalars ------------------------------------------

    def scalar(self, coeffs: Iterable[Rational] | Rational) -> "Scalar":
        if isinstance(coeffs, (int, Fraction, str)):
            coeffs = [coeffs]
        fr = [_frac(c) for c in coeffs]
        if len(fr) > self.degree:
            # reduce modulo m so callers may pass any polynomial in the generator
            _, fr = _pdivmod(fr, list(self.min_poly))
        fr = fr + [Fraction(0)] * (self.degree - len(fr))
        den = reduce(lambda acc, c: acc * c.denominator // gcd(acc, c.denominator), fr, 1)
        return Scalar._make(self, [int(c * den) for c in fr], den)

    def __call__(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            _same_field(self, value.field)
            return value
        return self.scalar(value)

    @property
    def zero(self) -> "Scalar":
        return Scalar._make(self, [0] * self.degree, 1)

    @property
    def one(self) -> "Scalar":
        return Scalar._make(self, [1] + [0] * (self.degree - 1), 1)

    @property
    def gen(self) -> "Scalar":
        return self.scalar([0, 1])

    # -- internals -------------------------------------------------------

    def _power_columns(self, gamma: "Scalar") -> tuple[tuple[int, ...], ...]:
        # column k holds gamma**k scaled to a shared denominator (stored last)
        powers = [self.one]
        for _ in range(self.degree - 1):
            powers.append(powers[-1] * gamma)
        den = reduce(lambda acc, p: acc * p.den // gcd(acc, p.den), powers, 1)
        cols = tuple(tuple(n * (den // p.den) for n in p.num) for p in powers)
        return cols + ((den,),)

    def _sympy_poly(self) -> sympy.Poly:
        coeffs = [sympy.Rational(c.numerator, c.denominator) for c in reversed(self.min_poly)]
        return sympy.Poly(coeffs, _X, domain="QQ")

    def _count_roots(self, box: Box) -> int:
        (rl, rh), (il, ih) = box
        inf = sympy.Rational(rl.numerator, rl.denominator) + sympy.I * sympy.Rational(il.numerator, il.denominator)
        sup = sympy.Rational(rh.numerator, rh.denominator) + sympy.I * sympy.Rational(ih.numerator, ih.denominator)
        if rl == rh or il == ih:
            # degenerate boxes: count on the real line or a vertical segment
            raise DomainError("root box must have positive width and height")
        return int(self._sympy_poly().count_roots(inf, sup))

    def _validate(self, gamma: "Scalar") -> None:
        if self.degree > 1 and not self._sympy_poly().is_irreducible:
            raise DomainError("minimal polynomial is reducible over Q")
        # gamma must be a root of m for conjugation to extend to a homomorphism
        acc = self.zero
        for c in reversed(self.min_poly):
            acc = acc * gamma + c
        if acc:
            raise DomainError("conj_image is not a root of the minimal polynomial")
        if self.conj(gamma) != self.gen:
            raise DomainError("conjugation applied twice is not the identity")
        if self._count_roots(self.root_box) != 1:
            raise DomainError("root box must contain exactly one root")
        with mpmath.workdps(40):
            root = self.root_approx(30)
            mismatch = abs(gamma._eval_mp(root) - mpmath.conj(root))
        if mismatch > mpmath.mpf(10) ** -20:
            raise DomainError("conj_image does not match complex conjugation of the embedded root")

    def root_approx(self, dps: int = 17) -> mpmath.mpc:
        """The embedded root of the minimal polynomial to ``dps`` digits."""
        (rl, rh), (il, ih) = self._boxes[-1]
        with mpmath.workdps(dps + 10):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(self.min_poly)]
            if self.degree == 1:
                roots = [mpmath.mpc(-coeffs[1])]
            else:
                roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=4 * dps + 50)
            centre = mpmath.mpc((mpmath.mpf(rl.numerator) / rl.denominator + mpmath.mpf(rh.numerator) / rh.denominator) / 2,
                                (mpmath.mpf(il.numerator) / il.denominator + mpmath.mpf(ih.numerator) / ih.denominator) / 2)
            best = min(roots, key=lambda z: abs(mpmath.mpc(z) - centre))
            return +mpmath.mpc(best)

    def _box_at(self, level: int) -> Box:
        while len(self._boxes) <= level:
            self._boxes.append(self._refine(self._boxes[-1], 16 * len(self._boxes)))
        return self._boxes[level]

    def _refine(self, box: Box, bits: int) -> Box:
        dps = bits // 3 + 20
        scale = 2 ** (bits + 8)
        with mpmath.workdps(dps + 10):
            root = self.root_approx(dps)
            cre = Fraction(int(mpmath.nint(root.real * scale)), scale)
            cim = Fraction(int(mpmath.nint(root.imag * scale)), scale)
        half = Fraction(1, 2**bits)
        for _ in range(8):
            cand = (
                (max(box[0][0], cre - half), min(box[0][1], cre + half)),
                (max(box[1][0], cim - half), min(box[1][1], cim + half)),
            )
            if cand[0][0] < cand[0][1] and cand[1][0] < cand[1][1] and self._count_roots(cand) == 1:
                return cand
            half *= 4
        return box

    def _powers_at(self, level: int) -> list[Box]:
        if level not in self._box_powers:
            z = self._box_at(level)
            pw = [((Fraction(1), Fraction(1)), (Fraction(0), Fraction(0)))]
            for _ in range(self.degree - 1):
                pw.append(_cmul(pw[-1], z))
            self._box_powers[level] = pw
        return self._box_powers[level]

    # -- field operations -----------------------------------------------------

    def conj(self, a: "Scalar") -> "Scalar":
        _same_field(self, a.field)
        cols = self._conj_cols
        cden = cols[-1][0]
        out = [0] * self.degree
        for k, c in enumerate(a.num):
            if c:
                for j, v in enumerate(cols[k]):
                    out[j] += c * v
        return Scalar._make(self, out, a.den * cden)

    def interval(self, a: "Scalar", level: int) -> Box:
        """Complex interval enclosure of ``a`` using refinement ``level``."""
        pw = self._powers_at(level)
        re: Interval = (Fraction(0), Fraction(0))
        im: Interval = (Fraction(0), Fraction(0))
        for c, (pre, pim) in zip(a.coefficients, pw):
            if c:
                re = _iadd(re, _iscale(c, pre))
                im = _iadd(im, _iscale(c, pim))
        return re, im

    def approx_real(self, a: "Scalar", eps: Rational) -> Interval:
        eps = _frac(eps)
        if eps <= 0:
            raise DomainError("eps must be positive")
        if self.conj(a) != a:
            raise DomainError("approx_real needs a conjugation-fixed (real) scalar")
        if a.is_rational:
            r = a.rational()
            return r, r
        level = 0
        while True:
            (lo, hi), _ = self.interval(a, level)
            if hi - lo <= eps:
                return lo, hi
            level += 1
            if level > 200:
                raise RuntimeError("interval refinement failed to converge")

    def sqrt(self, a: "Scalar") -> "Scalar":
        """Principal square root of ``a`` inside the field.

        Raises :class:`DomainError` when the root is not a field element.
        """
        _same_field(self, a.field)
        if a.is_rational:
            r = a.rational()
            if r >= 0:
                n, d = sympy.integer_nthroot(r.numerator, 2), sympy.integer_nthroot(r.denominator, 2)
                if n[1] and d[1]:
                    return self.scalar(Fraction(int(n[0]), int(d[0])))
        if self.degree == 1:
            raise DomainError(f"{a} has no square root in {self!r}")
        from sympy.polys.numberfields.subfield import to_number_field
        from sympy.polys.polyerrors import IsomorphismFailed

        theta = sympy.CRootOf(self._sympy_poly().as_expr(), self._root_idx())
        expr = sum(sympy.Rational(c.numerator, c.denominator) * theta**k for k, c in enumerate(a.coefficients))
        try:
            alg = to_number_field(sympy.sqrt(expr), theta)
        except IsomorphismFailed:
            raise DomainError(f"{a} has no square root in {self!r}") from None
        coeffs = [Fraction(int(c.numerator), int(c.denominator)) for c in reversed(alg.native_coeffs())]
        root = self.scalar(coeffs)
        if root * root != a:
            raise DomainError(f"square root of {a} could not be certified")
        return root

    def _root_idx(self) -> int:
        if self._root_index is None:
            target = complex(self.root_approx(30))
            roots = [complex(sympy.CRootOf(self._sympy_poly().as_expr(), k).evalf(30)) for k in range(self.degree)]
            self._root_index = min(range(self.degree), key=lambda k: abs(roots[k] - target))
        return self._root_index

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "min_poly": [str(c) for c in self.min_poly],
            "conj_image": [str(c) for c in self.conj_image],
            "root_box": {
                "re": [str(self.root_box[0][0]), str(self.root_box[0][1])],
                "im": [str(self.root_box[1][0]), str(self.root_box[1][1])],
            },
        }

    @classmethod
    def from_json(cls, doc: dict, name: str | None = None) -> "FieldSpec":
        try:
            box = doc["root_box"]
            return cls(doc["min_poly"], doc["conj_image"], (box["re"], box["im"]), name=name)
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed field document: {exc}") from None


def _same_field(f: FieldSpec, g: FieldSpec) -> None:
    if f is not g and f != g:
        raise FieldMismatchError(f"scalars from {f!r} and {g!r} cannot be combined")


class Scalar:
    """An element of a :class:`FieldSpec`, ``sum(num[k] * x**k) / den``."""

    __slots__ = ("field", "num", "den", "_h")

    field: FieldSpec
    num: tuple[int, ...]
    den: int

    @classmethod
    def _make(cls, field: FieldSpec, num: Sequence[int], den: int) -> "Scalar":
        self = object.__new__(cls)
        g = den
        for c in num:
            if c:
                g = gcd(g, c)
                if g == 1:
                    break
        if den < 0:
            g = -g
        if not any(num):
            num, den, g = [0] * len(num), 1, 1
        self.field = field
        self.num = tuple(c // g for c in num) if g != 1 else tuple(num)
        self.den = den // g
        self._h = None
        return self

    # -- views -----------------------------------------------------------

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational(self) -> Fraction:
        if not self.is_rational:
            raise DomainError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coefficients]

    def _eval_mp(self, root) -> mpmath.mpc:
        acc = mpmath.mpc(0)
        for c in reversed(self.coefficients):
            acc = acc * root + mpmath.mpf(c.numerator) / c.denominator
        return acc

    def __complex__(self) -> complex:
        return complex(self._eval_mp(self.field.root_approx()))

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            _same_field(self.field, other.field)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return Scalar._make(self.field, [a + b for a, b in zip(self.num, other.num)], self.den)
        return Scalar._make(
            self.field,
            [a * other.den + b * self.den for a, b in zip(self.num, other.num)],
            self.den * other.den,
        )

    __radd__ = __add__

    def __neg__(self):
        return Scalar._make(self.field, [-a for a in self.num], self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.field
        deg = f.degree
        if other.is_rational:
            c = other.num[0]
            return Scalar._make(f, [a * c for a in self.num], self.den * other.den)
        if self.is_rational:
            c = self.num[0]
            return Scalar._make(f, [a * c for a in other.num], self.den * other.den)
        prod = [0] * (2 * deg - 1)
        for i, x in enumerate(self.num):
            if x:
                for j, y in enumerate(other.num):
                    if y:
                        prod[i + j] += x * y
        den = self.den * other.den
        if f._integral:
            m = f._mod_int
            for k in range(2 * deg - 2, deg - 1, -1):
                c = prod[k]
                if c:
                    base = k - deg
                    for j in range(deg):
                        prod[base + j] -= c * m[j]
            return Scalar._make(f, prod[:deg], den)
        _, rem = _pdivmod([Fraction(c, den) for c in prod], list(f.min_poly))
        return f.scalar(rem)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("inverse of zero scalar")
        f = self.field
        if self.is_rational:
            return f.scalar(1 / self.rational())
        # extended Euclid: s*a + t*m = g, g a nonzero constant since m is irreducible
        r0, r1 = list(f.min_poly), _ptrim(list(self.coefficients))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
        if not r1:
            raise DomainError("minimal polynomial is not irreducible")
        c = r1[0]
        return f.scalar([x / c for x in s1])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        out = self.field.one
        k = abs(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "Scalar":
        return self.field.conj(self)

    def abs_sq(self) -> "Scalar":
        return self * self.field.conj(self)

    # -- comparisons -----------------------------------------------------

    def __bool__(self):
        return any(self.num)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if self.field is not other.field and self.field != other.field:
                return False
            return self.den == other.den and self.num == other.num
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_rational and Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            if self.is_rational:
                self._h = hash(Fraction(self.num[0], self.den))
            else:
                self._h = hash((self.num, self.den))
        return self._h

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coefficients):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "x" if k == 1 else f"x^{k}"
                terms.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


# -- module-level operations -------------------------------------------------


def add(a: Scalar, b: Scalar) -> Scalar:
    _same_field(a.field, b.field)
    return a + b


def mul(a: Scalar, b: Scalar) -> Scalar:
    _same_field(a.field, b.field)
    return a * b


def inv(a: Scalar) -> Scalar:
    return a.inverse()


def conj(a: Scalar) -> Scalar:
    return a.field.conj(a)


def abs_sq(a: Scalar) -> Scalar:
    """``a * conj(a)``; always a real, non-negative element."""
    return a.abs_sq()


def approx_real(a: Scalar, eps: Rational) -> Interval:
    """Rational interval of width ``<= eps`` containing the real value of ``a``."""
    return a.field.approx_real(a, eps)


@lru_cache(maxsize=None)
def zeta8() -> FieldSpec:
    """Q(zeta_8) with zeta_8 = (1 + i)/sqrt(2)."""
    half = Fraction(1, 2)
    return FieldSpec([1, 0, 0, 0, 1], [0, 0, 0, -1], ((half, 1), (half, 1)), name="Q(zeta8)")


@lru_cache(maxsize=None)
def gaussian() -> FieldSpec:
    """Q(i)."""
    half = Fraction(1, 2)
    return FieldSpec([1, 0, 1], [0, -1], ((-half, half), (half, Fraction(3, 2))), name="Q(i)")


@lru_cache(maxsize=None)
def rationals() -> FieldSpec:
    """Q itself, as the degree-one extension Q[x]/(x)."""
    half = Fraction(1, 2)
    return FieldSpec([0, 1], [0], ((-half, half), (-half, half)), name="Q")
