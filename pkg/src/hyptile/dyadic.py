"""Dyadic rationals and the 2-adic odometer.

Two number-like types live here.  DyadicRational is the exact ring
Z[1/2] used for half-plane coordinates: every value is mantissa * 2**exponent
with an odd (or zero) mantissa.  DyadicInt is a truncated 2-adic integer,
a residue known modulo 2**precision, which is the state space the odometer
x -> x + 1 acts on.

Clopen subsets of the 2-adic integers are finite disjoint unions of
cylinders F(n, k) = 2**n * Omega + k, and locally constant integer (or
dyadic) valued functions are tables over the residues mod 2**level.
The class map of the odometer's coinvariants sends such a function to its
Haar integral in Z[1/2]; `omega_coinvariant_class` computes the value and,
on request, an exact transfer witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class PrecisionExhausted(Exception):
    """A 2-adic residue was asked for more digits than it carries."""


class WitnessDepthExceeded(Exception):
    """No coboundary witness exists within the allowed refinement depth."""


def _v2(n: int) -> int:
    # 2-adic valuation of a nonzero integer
    if n == 0:
        raise ValueError("v2(0) is infinite")
    return (n & -n).bit_length() - 1


def dyadic_norm(n: int) -> Fraction:
    """2-adic absolute value of an integer: |n| = 2**(-v2(n)), |0| = 0."""
    if n == 0:
        return Fraction(0)
    return Fraction(1, 1 << _v2(n))


@dataclass(frozen=True, order=False)
class DyadicRational:
    """Exact element of Z[1/2], stored as mantissa * 2**exponent.

    Canonical form: mantissa is odd or zero, and zero carries exponent 0.
    Addition, subtraction and multiplication stay in the ring; there is no
    general division (convert to Fraction for quotients).
    """

    mantissa: int
    exponent: int = 0

    def __post_init__(self):
        m, e = self.mantissa, self.exponent
        if m == 0:
            e = 0
        else:
            s = _v2(m)
            m >>= s
            e += s
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    @staticmethod
    def from_fraction(q: Fraction | int) -> "DyadicRational":
        q = Fraction(q)
        d = q.denominator
        if d & (d - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return DyadicRational(q.numerator, -(d.bit_length() - 1))

    def as_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self) -> float:
        return self.mantissa * 2.0 ** self.exponent

    def _aligned(self, other: "DyadicRational") -> tuple[int, int, int]:
        e = min(self.exponent, other.exponent)
        return (self.mantissa << (self.exponent - e),
                other.mantissa << (other.exponent - e), e)

    def __add__(self, other):
        other = _coerce(other)
        a, b, e = self._aligned(other)
        return DyadicRational(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        a, b, e = self._aligned(other)
        return DyadicRational(a - b, e)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return DyadicRational(-self.mantissa, self.exponent)

    def __mul__(self, other):
        other = _coerce(other)
        return DyadicRational(self.mantissa * other.mantissa,
                              self.exponent + other.exponent)

    __rmul__ = __mul__

    def scale_pow2(self, k: int) -> "DyadicRational":
        """Multiply by 2**k (exact for either sign of k)."""
        if self.mantissa == 0:
            return self
        return DyadicRational(self.mantissa, self.exponent + k)

    def _cmp_key(self, other: "DyadicRational") -> int:
        a, b, _ = self._aligned(other)
        return (a > b) - (a < b)

    def __lt__(self, other):
        return self._cmp_key(_coerce(other)) < 0

    def __le__(self, other):
        return self._cmp_key(_coerce(other)) <= 0

    def __gt__(self, other):
        return self._cmp_key(_coerce(other)) > 0

    def __ge__(self, other):
        return self._cmp_key(_coerce(other)) >= 0

    def __repr__(self):
        return f"DyadicRational({self.mantissa}, {self.exponent})"


def _coerce(x) -> DyadicRational:
    if isinstance(x, DyadicRational):
        return x
    if isinstance(x, int):
        return DyadicRational(x, 0)
    if isinstance(x, Fraction):
        return DyadicRational.from_fraction(x)
    raise TypeError(f"cannot coerce {x!r} to DyadicRational")


DZERO = DyadicRational(0)
DONE = DyadicRational(1)
DHALF = DyadicRational(1, -1)


@dataclass(frozen=True)
class DyadicInt:
    """A 2-adic integer known modulo 2**precision.

    The residue is reduced to [0, 2**precision).  Arithmetic that reads
    digits beyond the stored precision raises PrecisionExhausted; halving
    an even residue costs one digit of precision, doubling costs none.
    """

    residue: int
    precision: int

    def __post_init__(self):
        if self.precision < 0:
            raise PrecisionExhausted("no dyadic digits left")
        object.__setattr__(self, "residue", self.residue % (1 << self.precision))

    def add(self, k: int) -> "DyadicInt":
        return DyadicInt(self.residue + k, self.precision)

    def successor(self) -> "DyadicInt":
        return self.add(1)

    def double(self) -> "DyadicInt":
        # 2x is known mod 2**(precision+1); we keep the same precision,
        # which only forgets the new top digit.
        return DyadicInt(self.residue << 1, self.precision)

    def half(self) -> "DyadicInt":
        if self.residue & 1:
            raise ValueError("cannot halve an odd 2-adic integer")
        if self.precision == 0:
            raise PrecisionExhausted("no dyadic digits left")
        return DyadicInt(self.residue >> 1, self.precision - 1)

    def parity(self) -> int:
        if self.precision == 0:
            raise PrecisionExhausted("parity unknown at precision 0")
        return self.residue & 1

    def project(self, precision: int) -> "DyadicInt":
        if precision > self.precision:
            raise PrecisionExhausted(
                f"cannot extend precision {self.precision} to {precision}")
        return DyadicInt(self.residue, precision)


def odometer_add(x: DyadicInt, k: int = 1) -> DyadicInt:
    """k-fold odometer step x -> x + k (k may be negative)."""
    return x.add(k)


@dataclass(frozen=True)
class ClopenSet:
    """Finite disjoint union of cylinders F(n, k) = 2**n * Omega + k.

    Cylinders are stored normalized: residues reduced mod 2**n, pairwise
    disjoint, and no two cylinders of equal level merge into one of lower
    level.  The empty set is allowed.
    """

    cylinders: tuple[tuple[int, int], ...]

    def __post_init__(self):
        cyls = []
        for n, k in self.cylinders:
            if n < 0:
                raise ValueError("cylinder level must be >= 0")
            cyls.append((n, k % (1 << n)))
        _check_disjoint(cyls)
        object.__setattr__(self, "cylinders", _merge(cyls))

    @staticmethod
    def cylinder(n: int, k: int) -> "ClopenSet":
        return ClopenSet(((n, k),))

    @staticmethod
    def empty() -> "ClopenSet":
        return ClopenSet(())

    def translate(self, j: int) -> "ClopenSet":
        """Image under x -> x + j; Haar measure is preserved."""
        return ClopenSet(tuple((n, (k + j) % (1 << n)) for n, k in self.cylinders))

    def haar_measure(self) -> Fraction:
        return sum((Fraction(1, 1 << n) for n, _ in self.cylinders), Fraction(0))

    def contains_residue(self, x: int, precision: int) -> bool:
        """Membership of the residue class x mod 2**precision.

        Requires every cylinder level to be <= precision, else membership
        is not determined by the residue.
        """
        for n, k in self.cylinders:
            if n > precision:
                raise PrecisionExhausted(
                    f"membership in a level-{n} cylinder needs {n} digits")
            if x % (1 << n) == k:
                return True
        return False

    def indicator(self, level: int | None = None) -> "LocallyConstFn":
        lev = max([n for n, _ in self.cylinders], default=0)
        if level is not None:
            if level < lev:
                raise ValueError(f"level {level} below finest cylinder level {lev}")
            lev = level
        vals = [0] * (1 << lev)
        for n, k in self.cylinders:
            step = 1 << n
            for r in range(k, 1 << lev, step):
                vals[r] = 1
        return LocallyConstFn(lev, tuple(vals))


def _check_disjoint(cyls):
    for i in range(len(cyls)):
        for j in range(i + 1, len(cyls)):
            n1, k1 = cyls[i]
            n2, k2 = cyls[j]
            n = min(n1, n2)
            if k1 % (1 << n) == k2 % (1 << n):
                raise ValueError(f"cylinders {cyls[i]} and {cyls[j]} overlap")


def _merge(cyls):
    # F(n, k) | F(n, k + 2**(n-1)) = F(n-1, k mod 2**(n-1))
    cyls = sorted(cyls)
    changed = True
    while changed:
        changed = False
        for i in range(len(cyls)):
            for j in range(i + 1, len(cyls)):
                n1, k1 = cyls[i]
                n2, k2 = cyls[j]
                if n1 == n2 and n1 > 0 and k1 % (1 << (n1 - 1)) == k2 % (1 << (n1 - 1)):
                    merged = (n1 - 1, k1 % (1 << (n1 - 1)))
                    cyls = [c for t, c in enumerate(cyls) if t not in (i, j)]
                    cyls.append(merged)
                    cyls.sort()
                    changed = True
                    break
            if changed:
                break
    return tuple(cyls)


@dataclass(frozen=True)
class LocallyConstFn:
    """Function on the 2-adic integers constant on level-`level` cylinders.

    values[k] is the value on F(level, k).  Values are ints or Fractions;
    all ring operations are exact.
    """

    level: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != 1 << self.level:
            raise ValueError("value table length must be 2**level")

    @staticmethod
    def constant(c, level: int = 0) -> "LocallyConstFn":
        return LocallyConstFn(level, tuple([c] * (1 << level)))

    def refine(self, level: int) -> "LocallyConstFn":
        """Rewrite at a finer level; each coefficient is duplicated, since
        F(n, k) = F(n+1, k) | F(n+1, k + 2**n)."""
        if level < self.level:
            raise ValueError("refinement can only increase the level")
        reps = 1 << (level - self.level)
        n = 1 << self.level
        vals = [self.values[k % n] for k in range(n * reps)]
        return LocallyConstFn(level, tuple(vals))

    def _pair(self, other: "LocallyConstFn"):
        lev = max(self.level, other.level)
        return self.refine(lev), other.refine(lev), lev

    def __add__(self, other):
        a, b, lev = self._pair(other)
        return LocallyConstFn(lev, tuple(x + y for x, y in zip(a.values, b.values)))

    def __sub__(self, other):
        a, b, lev = self._pair(other)
        return LocallyConstFn(lev, tuple(x - y for x, y in zip(a.values, b.values)))

    def __neg__(self):
        return LocallyConstFn(self.level, tuple(-x for x in self.values))

    def scale(self, c) -> "LocallyConstFn":
        return LocallyConstFn(self.level, tuple(c * x for x in self.values))

    def compose_odometer_inverse(self) -> "LocallyConstFn":
        """f -> f o (x -> x - 1): the value on F(n, k) becomes f(k - 1)."""
        n = 1 << self.level
        return LocallyConstFn(self.level,
                              tuple(self.values[(k - 1) % n] for k in range(n)))

    def evaluate(self, x: DyadicInt):
        if x.precision < self.level:
            raise PrecisionExhausted(
                f"level-{self.level} function needs {self.level} digits")
        return self.values[x.residue % (1 << self.level)]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def canonical(self) -> "LocallyConstFn":
        """Drop levels while both halves of every cylinder agree."""
        f = self
        while f.level > 0:
            n = 1 << (f.level - 1)
            if all(f.values[k] == f.values[k + n] for k in range(n)):
                f = LocallyConstFn(f.level - 1, f.values[:n])
            else:
                break
        return f


def integrate(f: LocallyConstFn) -> Fraction:
    """Haar integral: 2**(-level) * sum of the value table."""
    return sum(map(Fraction, f.values), Fraction(0)) / (1 << f.level)


def omega_coinvariant_class(f: LocallyConstFn, want_witness: bool = False,
                            witness_depth: int = 2):
    """Class of an integer-valued f in the odometer coinvariants.

    The class group is identified with Z[1/2] by f -> integral of f.
    With want_witness=True also returns an integer-valued g with

        f - p * indicator(F(n, 0)) = g - g o (x -> x - 1)

    where integrate(f) = p / 2**n in lowest terms.  The witness lives at
    level max(level(f), n) <= level(f) + witness_depth; if the required
    level exceeds that bound, WitnessDepthExceeded is raised (a budget
    condition, not evidence the witness fails to exist).
    """
    for v in f.values:
        if not isinstance(v, int) and not (isinstance(v, Fraction) and v.denominator == 1):
            raise ValueError("coinvariant classes are computed for integer-valued f")
    value = integrate(f)
    if not want_witness:
        return value, None
    p = value.numerator
    n = 0 if p == 0 else (value.denominator.bit_length() - 1)
    lev = max(f.level, n)
    if lev > f.level + witness_depth:
        raise WitnessDepthExceeded(f"witness not found at depth {witness_depth}")
    h = f.refine(lev) - ClopenSet.cylinder(n, 0).indicator(lev).scale(p)
    # The odometer acts on level-lev residues as the 2**lev cycle k -> k+1,
    # so any zero-sum h is the coboundary of its partial sums.
    assert sum(h.values) == 0
    g = [0] * (1 << lev)
    for k in range(1, 1 << lev):
        g[k] = g[k - 1] + h.values[k]
    witness = LocallyConstFn(lev, tuple(int(v) for v in g))
    check = witness - witness.compose_odometer_inverse()
    assert (check - h).is_zero()
    return value, witness
