"""Invariants and coinvariants of cylinder functions under the shift.

Integer (or dyadic-integer) valued functions on the coding space that
depend on finitely many letters form a module under two shift operators:
the plain one, f -> f o shift^-1, and the doubling one that also scales
by 2 and therefore only acts on Z[1/2] coefficients.  Everything here is
a finite, exact computation on truncations of that module:

* ``invariants``       the fixed functions of the operator,
* ``coinvariants``     the quotient by differences f - shift(f),
* ``k_groups``         the K-theory of the associated tiling algebra,
  assembled from the two computations above (K0 splits as the doubling
  coinvariants plus the plain invariants; K1 is the plain coinvariants),
* ``cech_cohomology``  the same groups relabelled as degree 0..2,
* ``gap_labels``       the subgroup of (R, +) spanned by cylinder
  measures, tracked truncation by truncation.

Truncation at window length N presents the coinvariants by generators
e_u over the length-(N+1) language with one combined relation per
length-N word (right refinement minus psi-weighted left extension).
Consecutive truncations are compared through the induced maps; the
``stabilized`` flag is a certificate that two consecutive maps are
isomorphisms, never an assumption.  Over Z[1/2] the integer Smith form
is used and 2-power invariant factors are discarded, since 2 is a unit.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .algebraic import AlgebraicNumber
from .intmat import (
    hnf_row_lattice,
    identity,
    integer_kernel,
    lattice_contains,
    rational_rank,
    smith_diagonal,
    smith_normal_form,
    transpose,
)
from .subshift import (
    HorizonExhausted,
    MeasureValue,
    SubshiftSpec,
    approximate,
    language,
    measure_vector,
)

__all__ = [
    "RING_Z",
    "RING_HALF",
    "SHIFT_PLAIN",
    "SHIFT_DOUBLING",
    "CylinderFunction",
    "FPAbelianGroup",
    "GapLabelGroup",
    "smith_normal_form",
    "apply_shift",
    "constant_one",
    "refine_left",
    "refine_right",
    "refine_to",
    "canonical",
    "cf_equal",
    "invariant_rank",
    "invariants",
    "coinvariants",
    "coinvariant_class",
    "k_groups",
    "cech_cohomology",
    "gap_labels",
    "measure_pairing",
    "group_to_json",
    "gap_label_to_json",
]

RING_Z = "Z"
RING_HALF = "Z[1/2]"

SHIFT_PLAIN = "plain"
SHIFT_DOUBLING = "doubling"


def _check_ring(ring: str):
    if ring not in (RING_Z, RING_HALF):
        raise ValueError(f"unknown coefficient ring {ring!r}")


def _odd(n: int) -> int:
    n = abs(n)
    while n and n % 2 == 0:
        n //= 2
    return n


def _coerce_coeff(ring: str, value):
    if ring == RING_Z:
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ValueError("ring Z needs integer coefficients")
            return int(value)
        if isinstance(value, int):
            return int(value)
        raise ValueError("ring Z needs integer coefficients")
    v = Fraction(value)
    den = v.denominator
    if den & (den - 1):
        raise ValueError("ring Z[1/2] needs power-of-two denominators")
    return v


@dataclass(frozen=True)
class CylinderFunction:
    """Finitely supported combination of cylinder indicators.

    The function sits on the window [start, start + L) where L is the
    shared length of the coefficient words; the empty coefficient map is
    the zero function.  Coefficients live in Z or Z[1/2] according to
    the ring flag.
    """

    ring: str
    start: int
    coeffs: tuple  # sorted ((word, coefficient), ...)

    @classmethod
    def of(cls, ring: str, start: int, mapping) -> "CylinderFunction":
        _check_ring(ring)
        clean = {}
        for word, value in dict(mapping).items():
            if not isinstance(word, str) or not word:
                raise ValueError("coefficient keys must be nonempty words")
            v = _coerce_coeff(ring, value)
            if v:
                clean[word] = v
        lengths = {len(w) for w in clean}
        if len(lengths) > 1:
            raise ValueError("all coefficient words must share one length")
        return cls(ring, int(start), tuple(sorted(clean.items())))

    @property
    def length(self) -> int:
        return len(self.coeffs[0][0]) if self.coeffs else 0

    @property
    def window(self) -> tuple[int, int]:
        return (self.start, self.start + self.length)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def scale(self, c) -> "CylinderFunction":
        return CylinderFunction.of(
            self.ring, self.start, {w: v * c for w, v in self.coeffs})

    def __neg__(self) -> "CylinderFunction":
        return self.scale(-1)

    def _combine(self, other: "CylinderFunction", sign: int):
        if self.ring != other.ring:
            raise ValueError("mixed coefficient rings")
        if self.is_zero:
            return other.scale(sign)
        if other.is_zero:
            return self
        if self.window != other.window:
            raise ValueError("windows differ; refine to a common window first")
        out = dict(self.coeffs)
        for w, v in other.coeffs:
            out[w] = out.get(w, 0) + sign * v
        return CylinderFunction.of(self.ring, self.start, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)


def constant_one(spec: SubshiftSpec, ring: str) -> CylinderFunction:
    """The constant function 1, written over the one-letter window."""
    return CylinderFunction.of(ring, 0, {a: 1 for a in language(spec, 1)})


def apply_shift(f: CylinderFunction, mode: str) -> CylinderFunction:
    """Push f forward through the shift; window moves by +1.

    Plain mode keeps coefficients; doubling mode multiplies them by 2
    and is only defined over Z[1/2].
    """
    if mode not in (SHIFT_PLAIN, SHIFT_DOUBLING):
        raise ValueError(f"unknown shift mode {mode!r}")
    if mode == SHIFT_DOUBLING and f.ring != RING_HALF:
        raise ValueError("doubling shift needs ring Z[1/2]")
    scale = 2 if mode == SHIFT_DOUBLING else 1
    return CylinderFunction.of(
        f.ring, f.start + 1, {w: v * scale for w, v in f.coeffs})


def _unshift(f: CylinderFunction, mode: str) -> CylinderFunction:
    if mode == SHIFT_DOUBLING and f.ring != RING_HALF:
        raise ValueError("doubling shift needs ring Z[1/2]")
    scale = Fraction(1, 2) if mode == SHIFT_DOUBLING else 1
    return CylinderFunction.of(
        f.ring, f.start - 1, {w: v * scale for w, v in f.coeffs})


def _ring_mode(ring: str) -> str:
    return SHIFT_DOUBLING if ring == RING_HALF else SHIFT_PLAIN


def _language_filter(spec: SubshiftSpec, f: CylinderFunction) -> CylinderFunction:
    # Words outside the language are empty cylinders; drop them.
    if f.is_zero:
        return f
    legal = set(language(spec, f.length))
    return CylinderFunction.of(
        f.ring, f.start, {w: v for w, v in f.coeffs if w in legal})


def refine_right(spec: SubshiftSpec, f: CylinderFunction) -> CylinderFunction:
    """Rewrite f over a window one letter longer on the right."""
    if f.is_zero:
        return f
    f = _language_filter(spec, f)
    longer = language(spec, f.length + 1)
    out: dict = {}
    for w, v in f.coeffs:
        for ext in longer:
            if ext[:-1] == w:
                out[ext] = out.get(ext, 0) + v
    return CylinderFunction.of(f.ring, f.start, out)


def refine_left(spec: SubshiftSpec, f: CylinderFunction) -> CylinderFunction:
    """Rewrite f over a window one letter longer on the left."""
    if f.is_zero:
        return f
    f = _language_filter(spec, f)
    longer = language(spec, f.length + 1)
    out: dict = {}
    for w, v in f.coeffs:
        for ext in longer:
            if ext[1:] == w:
                out[ext] = out.get(ext, 0) + v
    return CylinderFunction.of(f.ring, f.start - 1, out)


def refine_to(spec: SubshiftSpec, f: CylinderFunction,
              start: int, stop: int) -> CylinderFunction:
    if f.is_zero:
        return CylinderFunction.of(f.ring, start, {})
    a, b = f.window
    if start > a or stop < b:
        raise ValueError("target window must contain the current one")
    while f.start > start:
        f = refine_left(spec, f)
    while f.window[1] < stop:
        f = refine_right(spec, f)
    return f


def canonical(spec: SubshiftSpec, f: CylinderFunction) -> CylinderFunction:
    """Shrink the window while the coefficients allow it.

    A letter can be dropped from an end of the window when the
    coefficient map factors through forgetting it (with absent language
    words counting as coefficient 0).  Stops at window length 1.
    """
    f = _language_filter(spec, f)
    if f.is_zero:
        return CylinderFunction.of(f.ring, 0, {})
    changed = True
    while changed and f.length > 1:
        changed = False
        data = f.as_dict()
        lang = language(spec, f.length)
        shorter = language(spec, f.length - 1)
        for side in ("right", "left"):
            cut = (lambda w: w[:-1]) if side == "right" else (lambda w: w[1:])
            merged: dict = {}
            ok = True
            for p in shorter:
                vals = {data.get(w, 0) for w in lang if cut(w) == p}
                if len(vals) != 1:
                    ok = False
                    break
                merged[p] = vals.pop()
            if ok:
                f = CylinderFunction.of(
                    f.ring, f.start + (0 if side == "right" else 1), merged)
                changed = True
                break
    return f


def cf_equal(spec: SubshiftSpec, f: CylinderFunction,
             g: CylinderFunction) -> bool:
    """Do f and g agree as functions on the coding space?"""
    if f.ring != g.ring:
        return False
    f = _language_filter(spec, f)
    g = _language_filter(spec, g)
    if f.is_zero or g.is_zero:
        return f.is_zero and g.is_zero
    start = min(f.start, g.start)
    stop = max(f.window[1], g.window[1])
    return (refine_to(spec, f, start, stop).coeffs
            == refine_to(spec, g, start, stop).coeffs)


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class FPAbelianGroup:
    """Finitely presented abelian group in Smith-canonical form."""

    ring: str
    rank: int
    torsion: tuple  # invariant factors > 1, odd when ring = Z[1/2]
    generators: tuple  # ((name, CylinderFunction representative), ...)
    stabilized: bool
    n_used: int
    approximate: bool = False
    pres: object = field(default=None, repr=False, compare=False)

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def generator_map(self) -> dict:
        return dict(self.generators)


def _coeff_json(ring: str, v):
    if ring == RING_Z:
        return int(v)
    v = Fraction(v)
    return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _cylinder_json(name: str, f: CylinderFunction) -> dict:
    return {
        "name": name,
        "window": list(f.window),
        "coefficients": {w: _coeff_json(f.ring, v) for w, v in f.coeffs},
    }


def group_to_json(g: FPAbelianGroup) -> dict:
    out = {
        "ring": g.ring,
        "rank": g.rank,
        "torsion": [int(d) for d in g.torsion],
        "generators": [_cylinder_json(n, f) for n, f in g.generators],
        "stabilized": bool(g.stabilized),
        "N_used": g.n_used,
    }
    if g.approximate:
        out["approximate"] = True
    return out


def _int_inverse(mat) -> list:
    """Exact inverse of a unimodular integer matrix."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col])
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                c = a[i][col]
                a[i] = [x - c * y for x, y in zip(a[i], a[col])]
    out = []
    for row in a:
        vals = row[n:]
        assert all(x.denominator == 1 for x in vals), "matrix was not unimodular"
        out.append([int(x) for x in vals])
    return out


def _saturate2(rows, width: int) -> list:
    """Basis of {v : 2^j v in the row lattice for some j >= 0}."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    _, s, v = smith_normal_form(rows)
    v_inv = _int_inverse(v)
    diag = [s[i][i] for i in range(min(len(s), width))]
    out = []
    for i, d in enumerate(diag):
        if d:
            out.append([_odd(d) * x for x in v_inv[i]])
    return out


@dataclass(frozen=True)
class _Presentation:
    ring: str
    level: int  # window length N of the relation index set
    cols: tuple  # language(N + 1), the generator words
    rows: tuple  # one combined relation per word of language(N)
    v: tuple
    v_inv: tuple
    diag: tuple
    tors: tuple  # ((column index, invariant factor), ...)
    free: tuple  # column indices


def _relation_rows(spec: SubshiftSpec, n: int, psi: int):
    lo = language(spec, n)
    hi = language(spec, n + 1)
    idx = {v: j for j, v in enumerate(hi)}
    rows = []
    for u in lo:
        row = [0] * len(hi)
        for v in hi:
            if v[:n] == u:
                row[idx[v]] += 1
            if v[1:] == u:
                row[idx[v]] -= psi
        rows.append(row)
    return rows, hi


def _presentation(spec: SubshiftSpec, ring: str, n: int) -> _Presentation:
    psi = 2 if ring == RING_HALF else 1
    rows, cols = _relation_rows(spec, n, psi)
    m = len(cols)
    if any(any(r) for r in rows):
        _, s, v = smith_normal_form(rows)
        diag = [s[i][i] for i in range(min(len(s), m))]
    else:
        v = identity(m)
        diag = []
    if ring == RING_HALF:
        diag = [_odd(d) if d else 0 for d in diag]
    v_inv = _int_inverse(v)
    tors = []
    free = []
    for j in range(m):
        d = diag[j] if j < len(diag) else 0
        if d == 0:
            free.append(j)
        elif d > 1:
            tors.append((j, d))
    return _Presentation(
        ring, n, tuple(cols), tuple(tuple(r) for r in rows),
        tuple(tuple(r) for r in v), tuple(tuple(r) for r in v_inv),
        tuple(diag), tuple(tors), tuple(free))


def _group_from(pres: _Presentation, stabilized: bool,
                approximate_flag: bool) -> FPAbelianGroup:
    gens = []
    for i, (j, _d) in enumerate(pres.tors):
        rep = CylinderFunction.of(
            pres.ring, 0,
            {w: c for w, c in zip(pres.cols, pres.v_inv[j]) if c})
        gens.append((f"t{i}", rep))
    for i, j in enumerate(pres.free):
        rep = CylinderFunction.of(
            pres.ring, 0,
            {w: c for w, c in zip(pres.cols, pres.v_inv[j]) if c})
        gens.append((f"f{i}", rep))
    return FPAbelianGroup(
        ring=pres.ring,
        rank=len(pres.free),
        torsion=tuple(d for _, d in pres.tors),
        generators=tuple(gens),
        stabilized=stabilized,
        n_used=pres.level,
        approximate=approximate_flag,
        pres=pres,
    )


def _bonding_matrix(p1: _Presentation, p2: _Presentation) -> list:
    # e_v -> sum of its one-letter right refinements, rows over p1.cols.
    out = []
    for w in p1.cols:
        out.append([1 if v[:-1] == w else 0 for v in p2.cols])
    return out


def _bonding_is_iso(p1: _Presentation, p2: _Presentation, ring: str) -> bool:
    c1, c2 = len(p1.cols), len(p2.cols)
    f_rows = _bonding_matrix(p1, p2)

    stack = [list(r) for r in f_rows] + [list(r) for r in p2.rows]
    diag = smith_diagonal(stack)
    nonzero = [d for d in diag if d]
    if len(nonzero) != c2:
        return False
    if ring == RING_HALF:
        if any(_odd(d) != 1 for d in nonzero):
            return False
    elif any(d != 1 for d in nonzero):
        return False

    if ring == RING_HALF:
        b1 = _saturate2(p1.rows, c1)
        b2 = _saturate2(p2.rows, c2)
    else:
        b1 = [list(r) for r in p1.rows if any(r)]
        b2 = [list(r) for r in p2.rows if any(r)]
    stacked = f_rows + b2
    for vec in integer_kernel(transpose(stacked)):
        if not lattice_contains(b1, vec[:c1]):
            return False
    return True


def _coinvariant_chain(spec: SubshiftSpec, ring: str, n_max: int):
    """Presentations for N = 1..n_max plus per-step isomorphism flags."""
    levels = []
    truncated = False
    for n in range(1, n_max + 1):
        try:
            levels.append(_presentation(spec, ring, n))
        except HorizonExhausted:
            truncated = True
            break
    isos = [
        _bonding_is_iso(levels[i], levels[i + 1], ring)
        for i in range(len(levels) - 1)
    ]
    return levels, isos, truncated


def coinvariants(spec: SubshiftSpec, ring: str, n_max: int = 8):
    """Shift coinvariants at truncation, with a stabilization certificate.

    Returns (group, stabilized).  The group is reported at the first
    truncation N whose two following induced maps are isomorphisms; when
    no such N exists up to n_max the last computed group is returned
    with stabilized = False rather than pretending the chain settled.
    """
    _check_ring(ring)
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    levels, isos, truncated = _coinvariant_chain(spec, ring, n_max)
    if not levels:
        raise HorizonExhausted(
            "horizon exhausted: no truncation could be computed")
    approx = approximate(spec) or truncated
    pick = None
    for i in range(len(isos) - 1):
        if isos[i] and isos[i + 1]:
            pick = i
            break
    if pick is not None:
        return _group_from(levels[pick], True, approx), True
    return _group_from(levels[-1], False, approx), False


def invariant_rank(spec: SubshiftSpec, ring: str, n: int) -> int:
    """Rank of the fixed functions of the shift operator at window n."""
    _check_ring(ring)
    lo = language(spec, n)
    hi = language(spec, n + 1)
    if ring == RING_HALF:
        # c[v[:n]] = 2 c[v[1:]] for every longer word v; count solutions.
        idx = {u: j for j, u in enumerate(lo)}
        rows = []
        for v in hi:
            row = [0] * len(lo)
            row[idx[v[:n]]] += 1
            row[idx[v[1:]]] -= 2
            rows.append(row)
        return len(lo) - rational_rank(rows)
    parent = list(range(len(lo)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    idx = {u: j for j, u in enumerate(lo)}
    for v in hi:
        a, b = find(idx[v[:n]]), find(idx[v[1:]])
        if a != b:
            parent[a] = b
    return len({find(i) for i in range(len(lo))})


def _components(spec: SubshiftSpec, n: int):
    lo = language(spec, n)
    idx = {u: j for j, u in enumerate(lo)}
    parent = list(range(len(lo)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for v in language(spec, n + 1):
        a, b = find(idx[v[:n]]), find(idx[v[1:]])
        if a != b:
            parent[a] = b
    groups: dict = {}
    for u in lo:
        groups.setdefault(find(idx[u]), []).append(u)
    return [sorted(words) for _, words in sorted(groups.items(),
                                                 key=lambda kv: kv[1][0])]


def invariants(spec: SubshiftSpec, ring: str,
               n_cap: int = 8) -> FPAbelianGroup:
    """Fixed functions of the shift operator, as a group with witnesses.

    Over Z[1/2] the doubling operator scales every fixed function's
    largest coefficient by 2, so only zero is fixed; the chain of
    truncations is still checked explicitly up to n_cap.  Over Z the
    fixed functions at truncation n are spanned by the indicator
    functions of the connected components of the length-n language
    under the overlap relation, and the rank chain certifies
    stabilization when it repeats.
    """
    _check_ring(ring)
    approx = approximate(spec)
    ranks = []
    limit = n_cap
    for n in range(1, n_cap + 1):
        try:
            ranks.append(invariant_rank(spec, ring, n))
        except HorizonExhausted:
            approx = True
            limit = n - 1
            break
    if not ranks:
        raise HorizonExhausted(
            "horizon exhausted: no truncation could be computed")

    if ring == RING_HALF:
        if any(ranks):
            n_bad = ranks.index(next(r for r in ranks if r)) + 1
            lo = language(spec, n_bad)
            hi = language(spec, n_bad + 1)
            idx = {u: j for j, u in enumerate(lo)}
            rows = []
            for v in hi:
                row = [0] * len(lo)
                row[idx[v[:n_bad]]] += 1
                row[idx[v[1:]]] -= 2
                rows.append(row)
            gens = tuple(
                (f"f{i}",
                 CylinderFunction.of(ring, 0,
                                     {w: c for w, c in zip(lo, vec) if c}))
                for i, vec in enumerate(integer_kernel(rows)))
            return FPAbelianGroup(ring, len(gens), (), gens,
                                  False, n_bad, approx)
        stabilized = len(ranks) >= 2
        return FPAbelianGroup(ring, 0, (), (), stabilized, limit, approx)

    pick = None
    for i in range(len(ranks) - 1):
        if ranks[i] == ranks[i + 1]:
            pick = i + 1  # 1-based truncation level
            break
    n_used = pick if pick is not None else limit
    comps = _components(spec, n_used)
    gens = tuple(
        (f"c{i}", CylinderFunction.of(ring, 0, {w: 1 for w in comp}))
        for i, comp in enumerate(comps))
    return FPAbelianGroup(ring, len(comps), (), gens,
                          pick is not None, n_used, approx)


def coinvariant_class(spec: SubshiftSpec, f: CylinderFunction,
                      group: FPAbelianGroup) -> dict:
    """Coordinates of the class of f in the group's generator basis.

    Linear in f, kills coboundaries f - shift(f), and reduces torsion
    coordinates modulo their invariant factor.
    """
    pres: _Presentation = group.pres
    if pres is None:
        raise ValueError("group carries no presentation; "
                         "use a group returned by coinvariants()")
    if f.ring != group.ring:
        raise ValueError("ring of the function and the group differ")
    mode = _ring_mode(group.ring)
    while f.start > 0:
        f = _unshift(f, mode)
    while f.start < 0:
        f = apply_shift(f, mode)
    f = _language_filter(spec, f)
    width = pres.level + 1
    if f.length > width:
        raise ValueError(
            f"window of length {f.length} exceeds the truncation; "
            f"refine N_max to at least {f.length - 1}")
    if not f.is_zero:
        f = refine_to(spec, f, 0, width)
    data = f.as_dict()
    x = [data.get(w, 0) for w in pres.cols]
    names = [name for name, _ in group.generators]
    coords = {}
    order = list(pres.tors) + [(j, 0) for j in pres.free]
    for name, (j, d) in zip(names, order):
        w = sum(Fraction(xi) * vij for xi, vij in zip(x, [row[j] for row in pres.v]))
        if d:
            num, den = w.numerator, w.denominator
            # den is a 2-power and d is odd over Z[1/2]; invert it mod d.
            coords[name] = (num * pow(den, -1, d)) % d
        else:
            coords[name] = int(w) if w.denominator == 1 else w
    return coords


def _retag(group: FPAbelianGroup, prefix: str) -> FPAbelianGroup:
    gens = tuple((f"{prefix}:{name}", rep) for name, rep in group.generators)
    return FPAbelianGroup(group.ring, group.rank, group.torsion, gens,
                          group.stabilized, group.n_used,
                          group.approximate, group.pres)


def k_groups(spec: SubshiftSpec, n_max: int = 8) -> dict:
    """K0 (as its split pair) and K1 of the tiling algebra of a colouring.

    K0 splits as the doubling coinvariants plus the plain invariants; an
    explicit section exists, so the pair is reported instead of an
    extension class.  The coinvariant summand's generators are tagged as
    projection classes; the names are opaque labels.
    """
    co_half, _ = coinvariants(spec, RING_HALF, n_max)
    co_z, _ = coinvariants(spec, RING_Z, n_max)
    inv_z = invariants(spec, RING_Z, n_cap=n_max)
    return {"K0": (_retag(co_half, "projection-class"), inv_z), "K1": co_z}


def cech_cohomology(spec: SubshiftSpec, n_max: int = 8) -> dict:
    """Degree 0..2 cohomology of the hull, from the shift module."""
    h1, _ = coinvariants(spec, RING_Z, n_max)
    h2, _ = coinvariants(spec, RING_HALF, n_max)
    return {
        "H0": invariants(spec, RING_Z, n_cap=n_max),
        "H1": h1,
        "H2": h2,
    }


# ---------------------------------------------------------------------------
# gap labels


@dataclass(frozen=True)
class GapLabelGroup:
    """Subgroup of (R, +) spanned by cylinder measures, per truncation."""

    kind: str  # "rational" | "algebraic"
    minpoly: tuple | None  # ascending Fraction coefficients, monic
    generators: tuple  # MeasureValue, reduced, each in [0, 1]
    chain: tuple  # per-truncation records, n = 1..n_used
    stabilized: bool
    n_used: int
    dyadic_base: Fraction | None  # odd part of the generator when halving


def _frac_rows_canon(rows) -> tuple:
    """Canonical form of the lattice spanned by rows of Fractions."""
    den = 1
    for row in rows:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    scaled = [[int(x * den) for x in row] for row in rows]
    hnf = hnf_row_lattice(scaled)
    return tuple(tuple(Fraction(x, den) for x in row) for row in hnf)


def _frac_in_lattice(rows, vec) -> bool:
    den = 1
    for row in list(rows) + [vec]:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    scaled = [[int(x * den) for x in row] for row in rows]
    target = [int(x * den) for x in vec]
    return lattice_contains(scaled, target)


def _value_row(value, degree: int) -> list:
    if isinstance(value, Fraction):
        return [value] + [Fraction(0)] * (degree - 1)
    coeffs = list(value.coeffs)
    return [Fraction(c) for c in coeffs] + [Fraction(0)] * (degree - len(coeffs))


def gap_labels(spec: SubshiftSpec, n_max: int = 6) -> GapLabelGroup:
    """Group of cylinder-measure values, truncation by truncation.

    Rational measures collapse to a single gcd generator; algebraic ones
    keep a reduced list of measure values, none lying in the lattice
    spanned by the others over the field's rational coordinate basis.
    A halving step at the end of the chain is reported as a dyadic
    pattern with the odd part of the final generator as its base.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    per_level = []
    for n in range(1, n_max + 1):
        per_level.append(measure_vector(spec, n))  # raises UnsupportedSpec

    first = next(iter(per_level[0].values()))
    algebraic = not first.is_rational
    if algebraic:
        fld = first.value.field
        degree = len(fld.minpoly) - 1
        minpoly = tuple(fld.minpoly)
    else:
        degree = 1
        minpoly = None

    chain = []
    canons = []
    gens_last: tuple = ()
    for n, mu in enumerate(per_level, start=1):
        words = sorted(mu)
        values = [mu[w].value for w in words]
        rows = [_value_row(v, degree) for v in values]
        if algebraic:
            kept = list(range(len(values)))
            changed = True
            while changed:
                changed = False
                for pos in list(kept):
                    others = [rows[i] for i in kept if i != pos]
                    if others and _frac_in_lattice(others, rows[pos]):
                        kept.remove(pos)
                        changed = True
                        break
            gens = tuple(MeasureValue(values[i]) for i in kept)
        else:
            den = 1
            for v in values:
                den = den * v.denominator // math.gcd(den, v.denominator)
            num = 0
            for v in values:
                num = math.gcd(num, int(v * den))
            gens = (MeasureValue(Fraction(num, den)),)
        canon = _frac_rows_canon(rows)
        agrees = bool(canons) and canon == canons[-1]
        canons.append(canon)
        gens_last = gens
        chain.append({
            "n": n,
            "generators": gens,
            "agrees_with_previous": agrees,
        })

    stabilized = len(canons) >= 2 and canons[-1] == canons[-2]
    dyadic_base = None
    if len(canons) >= 2:
        halved = canons[-1] == tuple(
            tuple(x / 2 for x in row) for row in canons[-2])
        if halved and not algebraic:
            g = gens_last[0].value
            dyadic_base = Fraction(_odd(g.numerator), _odd(g.denominator))
    return GapLabelGroup(
        kind="algebraic" if algebraic else "rational",
        minpoly=minpoly,
        generators=gens_last,
        chain=tuple(chain),
        stabilized=stabilized,
        n_used=n_max,
        dyadic_base=dyadic_base,
    )


def _measure_value_json(mv: MeasureValue):
    if mv.is_rational:
        v = mv.value
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return {"coordinates": [f"{Fraction(c).numerator}/{Fraction(c).denominator}"
                            for c in mv.value.coeffs],
            "approx": mv.as_float()}


def gap_label_to_json(g: GapLabelGroup) -> dict:
    out = {
        "kind": g.kind,
        "generators": [_measure_value_json(v) for v in g.generators],
        "chain": [
            {
                "n": entry["n"],
                "generators": [_measure_value_json(v)
                               for v in entry["generators"]],
                "agrees_with_previous": entry["agrees_with_previous"],
            }
            for entry in g.chain
        ],
        "stabilized": g.stabilized,
        "N_used": g.n_used,
    }
    if g.minpoly is not None:
        out["minpoly"] = [f"{c.numerator}/{c.denominator}" for c in g.minpoly]
    if g.dyadic_base is not None:
        b = g.dyadic_base
        out["dyadic_base"] = (int(b) if b.denominator == 1
                              else f"{b.numerator}/{b.denominator}")
    return out


def measure_pairing(spec: SubshiftSpec, f: CylinderFunction):
    """Integral of f against the invariant measure, exactly.

    Independent of how the window is written (refinement on either side
    preserves it, by additivity of the measure), equal to the word
    measure on cylinder indicators, and constant on plain-shift
    coinvariant classes since the measure is shift invariant.  It is
    not constant on doubling-shift classes; no additive functional into
    the reals can be, because those groups have torsion.
    """
    if f.is_zero:
        return Fraction(0)
    f = _language_filter(spec, f)
    if f.is_zero:
        return Fraction(0)
    mu = measure_vector(spec, f.length)
    acc = None
    for w, c in f.coeffs:
        term = mu[w].value * Fraction(c)
        acc = term if acc is None else acc + term
    return acc
