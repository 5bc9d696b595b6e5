"""Pentagon tilings of the hyperbolic upper half-plane, exactly.

The base pentagon P has vertices A1=(0,1), A2=(1/2,1), A3=(1,1), A4=(1,2),
A5=(0,2).  Its images under z -> 2**k (z + n), k and n integers, tile the
half-plane.  All vertex coordinates are dyadic rationals, so adjacency is
decided by exact endpoint comparison, never by float tolerance.

Edge bookkeeping follows the charge rule: each tile's top edge A4A5 can
only meet the bottom edges A1A2 or A2A3 of a tile one scale up, while the
two vertical edges pair with same-scale neighbours.  Every tile carries
one positive edge (A4A5) and two negative ones (A1A2, A2A3).

Ball membership for patch generation uses the Euclidean model of the
hyperbolic ball around i=(0,1): the disk with center (0, cosh r) and
radius sinh r.  The default tile test compares that disk against the
tile's bounding box (vertices plus arc apexes), which is deliberately a
slight superset; `tile_meets_disk_exact` is the exact polygon test with
rational predicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .dyadic import DyadicRational, DZERO, DONE

LN2 = math.log(2.0)

_HALF = DyadicRational(1, -1)
_TWO = DyadicRational(2)

# base pentagon, in vertex order A1..A5
BASE_VERTICES = (
    (DZERO, DONE),
    (_HALF, DONE),
    (DONE, DONE),
    (DONE, _TWO),
    (DZERO, _TWO),
)

EDGE_LABELS = ("A1A2", "A2A3", "A3A4", "A4A5", "A5A1")
POSITIVE_EDGE = "A4A5"
NEGATIVE_EDGES = ("A1A2", "A2A3")


class ColourWindowExhausted(Exception):
    """A colour index fell outside the supplied colour window."""


@dataclass(frozen=True)
class Point:
    """Point of the upper half-plane with dyadic coordinates."""

    x: DyadicRational
    y: DyadicRational

    def __post_init__(self):
        if not self.y > DZERO:
            raise ValueError("points must lie strictly above the real axis")

    def to_floats(self) -> tuple[float, float]:
        return float(self.x), float(self.y)


def pt(x, y) -> Point:
    def conv(v):
        if isinstance(v, DyadicRational):
            return v
        if isinstance(v, int):
            return DyadicRational(v)
        return DyadicRational.from_fraction(v)
    return Point(conv(x), conv(y))


@dataclass(frozen=True)
class AffineMap:
    """z -> 2**k z + b with b dyadic: the exact maps the tiling uses."""

    k: int
    b: DyadicRational = DZERO

    def apply(self, p: Point) -> Point:
        return Point(p.x.scale_pow2(self.k) + self.b, p.y.scale_pow2(self.k))

    def compose(self, other: "AffineMap") -> "AffineMap":
        # self o other : z -> 2**(k1+k2) z + (2**k1 b2 + b1)
        return AffineMap(self.k + other.k, other.b.scale_pow2(self.k) + self.b)

    def inverse(self) -> "AffineMap":
        return AffineMap(-self.k, (-self.b).scale_pow2(-self.k))

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(0, DZERO)

    @staticmethod
    def doubling() -> "AffineMap":
        """R: z -> 2z."""
        return AffineMap(1, DZERO)

    @staticmethod
    def unit_shift(n: int = 1) -> "AffineMap":
        """S**n: z -> z + n."""
        return AffineMap(0, DyadicRational(n))


@dataclass(frozen=True)
class TileIndex:
    """Tile R**k S**n P, the image of the base pentagon under
    z -> 2**k (z + n).  colour is an optional small int."""

    k: int
    n: int
    colour: int | None = None

    def affine(self) -> AffineMap:
        return AffineMap(self.k, DyadicRational(self.n).scale_pow2(self.k))


def tile_vertices(t: TileIndex) -> tuple[Point, ...]:
    f = t.affine()
    return tuple(f.apply(Point(x, y)) for x, y in BASE_VERTICES)


def tile_edges(t: TileIndex):
    """The five edges as (label, endpoint frozenset) in A1A2..A5A1 order."""
    v = tile_vertices(t)
    pairs = ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0))
    return [(lab, frozenset((v[i], v[j])))
            for lab, (i, j) in zip(EDGE_LABELS, pairs)]


def cosh_distance(p: Point, q: Point) -> Fraction:
    """cosh of the hyperbolic distance, exactly:
    1 + ((x1-x2)**2 + (y1-y2)**2) / (2 y1 y2)."""
    dx = (p.x - q.x).as_fraction()
    dy = (p.y - q.y).as_fraction()
    return 1 + (dx * dx + dy * dy) / (2 * p.y.as_fraction() * q.y.as_fraction())


@dataclass(frozen=True)
class GeodesicArc:
    """Geodesic segment between two points.

    Vertical segments have center None; otherwise the full geodesic is the
    half-circle with the given rational center on the real axis and squared
    radius radius_sq.
    """

    start: Point
    end: Point
    center: Fraction | None
    radius_sq: Fraction | None


def geodesic_arc(p: Point, q: Point) -> GeodesicArc:
    if p.x == q.x:
        if p.y == q.y:
            raise ValueError("no geodesic between identical points")
        return GeodesicArc(p, q, None, None)
    xp, yp = p.x.as_fraction(), p.y.as_fraction()
    xq, yq = q.x.as_fraction(), q.y.as_fraction()
    c = (xp + xq) / 2 + (yq * yq - yp * yp) / (2 * (xq - xp))
    r2 = (xp - c) ** 2 + yp * yp
    return GeodesicArc(p, q, c, r2)


@dataclass(frozen=True)
class ColourWindow:
    """Finite window of a colour sequence: w[j] for start <= j < start+len."""

    word: str
    start: int = 0

    def get(self, j: int) -> int:
        if not (self.start <= j < self.start + len(self.word)):
            raise ColourWindowExhausted(
                f"colour window exhausted: index {j} outside "
                f"[{self.start}, {self.start + len(self.word)})")
        return int(self.word[j - self.start])


@dataclass(frozen=True)
class TileSet:
    tiles: tuple[TileIndex, ...]
    radius: float

    def __post_init__(self):
        idx = [(t.k, t.n) for t in self.tiles]
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate tile index")
        object.__setattr__(
            self, "tiles", tuple(sorted(self.tiles, key=lambda t: (t.k, t.n))))

    def index_set(self) -> set[tuple[int, int]]:
        return {(t.k, t.n) for t in self.tiles}


# -- patch generation ---------------------------------------------------

_APEX = math.sqrt(17.0) / 2.0  # top-arc apex height of a scale-0 tile over y=2


def _box_meets_disk(x0, x1, y0, y1, c, s) -> bool:
    # clamped squared distance, padded toward inclusion
    dx = max(x0, min(0.0, x1))
    dy = max(y0, min(c, y1))
    d2 = dx * dx + (dy - c) ** 2
    return d2 <= s * s + 1e-9 * (1.0 + s * s)


def scale_range(radius: float) -> range:
    """Scales k whose band can meet the ball: 2**k in [e**-r / 2, 2 e**r]."""
    k_min = math.ceil(-radius / LN2 - 1.0 - 1e-12)
    k_max = math.floor(radius / LN2 + 1.0 + 1e-12)
    return range(k_min, k_max + 1)


def generate_patch(radius: float, colouring: ColourWindow | None = None,
                   exact: bool = False) -> TileSet:
    """All tiles meeting the closed ball of the given radius around i=(0,1).

    Membership is the documented conservative test: bounding box of the
    tile against the Euclidean disk of the ball.  With exact=True the
    candidates are filtered by the exact polygon-disk predicate instead.
    Balls are closed, so e.g. radius 0 keeps the four tiles whose closure
    contains i.  When a colouring window is given, the tile at scale k is
    coloured by w[-k]; a too-narrow window raises ColourWindowExhausted.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    c = math.cosh(radius)
    s = math.sinh(radius)
    tiles = []
    for k in scale_range(radius):
        w = 2.0 ** k
        colour = None
        for n in range(math.floor(-s / w) - 1, math.ceil(s / w) + 2):
            # box = x interval times [2**k, 2**k sqrt(17)/2] (vertices + apexes)
            if not _box_meets_disk(w * n, w * (n + 1), w, w * _APEX, c, s):
                continue
            if exact and not tile_meets_disk_exact(
                    TileIndex(k, n), Fraction(c), Fraction(s) ** 2):
                continue
            if colouring is not None and colour is None:
                colour = colouring.get(-k)
            tiles.append(TileIndex(k, n, colour))
    return TileSet(tuple(tiles), radius)


# -- exact disk predicates ----------------------------------------------

def _sign_lin_sqrt(alpha: Fraction, beta: Fraction, gamma: Fraction) -> int:
    """Sign of alpha + beta * sqrt(gamma) for rational inputs, gamma >= 0."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if gamma == 0 or beta == 0:
        return (alpha > 0) - (alpha < 0)
    if alpha == 0:
        return (beta > 0) - (beta < 0)
    sa = 1 if alpha > 0 else -1
    sb = 1 if beta > 0 else -1
    if sa == sb:
        return sa
    lhs = alpha * alpha
    rhs = beta * beta * gamma
    if lhs == rhs:
        return 0
    return sa if lhs > rhs else sb


def _le_twice_sqrt(a: Fraction, c: Fraction) -> bool:
    # a <= 2 sqrt(c), c >= 0
    if a <= 0:
        return True
    return a * a <= 4 * c


def _edge_within(edge_kind, data, cy: Fraction, r2: Fraction) -> bool:
    """Euclidean distance from (0, cy) to the edge is <= sqrt(r2)."""
    if edge_kind == "vertical":
        x, y1, y2 = data
        yc = min(max(cy, y1), y2)
        return x * x + (cy - yc) ** 2 <= r2
    m, q, xa, xb = data  # circle center (m, 0), radius**2 q, x range
    d2 = m * m + cy * cy
    if d2 == 0:
        return False
    # closest circle point to the disk center: x* = m (1 - sqrt(q/d2))
    g = q / d2
    in_lo = _sign_lin_sqrt(m - xa, -m, g) >= 0
    in_hi = _sign_lin_sqrt(xb - m, m, g) >= 0
    if in_lo and in_hi:
        # |sqrt(d2) - sqrt(q)| <= sqrt(r2)
        return _le_twice_sqrt(d2 + q - r2, d2 * q)
    return False  # nearest in-range point is an endpoint: vertex check covers it


def _tile_edge_data(t: TileIndex):
    v = [(p.x.as_fraction(), p.y.as_fraction()) for p in tile_vertices(t)]
    (x1, y1), (x2, _), (x3, _), (_, y4), _ = v
    h = y1          # 2**k
    top = y4        # 2**(k+1)

    def arc(xa, xb, yy):
        m = (xa + xb) / 2
        return ("arc", (m, (xb - xa) ** 2 / 4 + yy * yy, xa, xb))

    return [
        arc(x1, x2, h),                       # A1A2
        arc(x2, x3, h),                       # A2A3
        ("vertical", (x3, h, top)),           # A3A4
        arc(x1, x3, top),                     # A4A5
        ("vertical", (x1, h, top)),           # A5A1
    ]


def _center_in_tile(t: TileIndex, cy: Fraction) -> bool:
    v = [(p.x.as_fraction(), p.y.as_fraction()) for p in tile_vertices(t)]
    (x1, y1), (x2, _), (x3, _), (_, y4), _ = v
    if not (x1 <= 0 <= x3):
        return False
    # below the top arc
    mt = (x1 + x3) / 2
    qt = (x3 - x1) ** 2 / 4 + y4 * y4
    if mt * mt + cy * cy > qt:
        return False
    # above the bottom arc covering x=0
    xa, xb = (x1, x2) if 0 <= x2 else (x2, x3)
    mb = (xa + xb) / 2
    qb = (xb - xa) ** 2 / 4 + y1 * y1
    return mb * mb + cy * cy >= qb


def tile_meets_disk_exact(t: TileIndex, cy: Fraction, r2: Fraction) -> bool:
    """Exact test of tile against the Euclidean disk center (0, cy), radius**2 r2.

    True iff some vertex is in the disk, or the disk center lies in the
    tile, or some edge passes within the radius.
    """
    for p in tile_vertices(t):
        x, y = p.x.as_fraction(), p.y.as_fraction()
        if x * x + (y - cy) ** 2 <= r2:
            return True
    if _center_in_tile(t, cy):
        return True
    return any(_edge_within(kind, data, cy, r2)
               for kind, data in _tile_edge_data(t))


# -- adjacency ----------------------------------------------------------

@dataclass(frozen=True)
class AdjacencyReport:
    interior: dict
    boundary: tuple
    interior_positive: int
    interior_negative: int
    tally: int
    boundary_positive: int
    boundary_negative: int
    top_matches: tuple

    def boundary_charge_gap(self) -> int:
        """Negative minus positive boundary edges.  Each tile carries one
        positive and two negative charged edges and interior edges cancel
        pairwise, so this always equals the number of tiles."""
        return self.boundary_negative - self.boundary_positive


def edge_adjacency(ts: TileSet) -> AdjacencyReport:
    """Pair up coincident edges of the patch by exact endpoints.

    Interior edges (both sides present) are checked against the charge
    rule: a positive A4A5 side always meets a negative A1A2 or A2A3 side
    of a tile one scale up, verticals meet opposite verticals at the same
    scale.  Boundary edges are reported separately and never counted in
    the tally.
    """
    by_key: dict = {}
    for t in ts.tiles:
        for lab, key in tile_edges(t):
            by_key.setdefault(key, []).append((t, lab))
    interior = {}
    boundary = []
    top_matches = []
    ip = ineg = bp = bneg = 0
    for key, sides in by_key.items():
        if len(sides) > 2:
            raise ValueError("more than two tiles share an edge")
        if len(sides) == 1:
            t, lab = sides[0]
            boundary.append((t, lab))
            if lab == POSITIVE_EDGE:
                bp += 1
            elif lab in NEGATIVE_EDGES:
                bneg += 1
            continue
        (t1, l1), (t2, l2) = sides
        interior[key] = ((t1, l1), (t2, l2))
        for t, lab in sides:
            if lab == POSITIVE_EDGE:
                ip += 1
            elif lab in NEGATIVE_EDGES:
                ineg += 1
        labs = {l1, l2}
        if POSITIVE_EDGE in labs:
            upper = (t2, l2) if l1 == POSITIVE_EDGE else (t1, l1)
            lower = (t1, l1) if l1 == POSITIVE_EDGE else (t2, l2)
            if upper[1] not in NEGATIVE_EDGES:
                raise ValueError(
                    f"A4A5 edge of {lower[0]} met a {upper[1]} edge")
            if upper[0].k != lower[0].k + 1:
                raise ValueError("A4A5 partner is not one scale up")
            top_matches.append((lower[0], upper[0], upper[1]))
        elif labs <= set(NEGATIVE_EDGES):
            raise ValueError("two negative edges matched each other")
        elif labs == {"A3A4"} or labs == {"A5A1"}:
            raise ValueError("vertical edge matched an equal label")
    return AdjacencyReport(
        interior=interior,
        boundary=tuple(boundary),
        interior_positive=ip,
        interior_negative=ineg,
        tally=ip - ineg,
        boundary_positive=bp,
        boundary_negative=bneg,
        top_matches=tuple(top_matches),
    )


def interiors_disjoint(ts: TileSet) -> bool:
    """Exact pairwise disjointness of open tiles in the patch.

    Same-scale tiles occupy disjoint open x-intervals; scales k and k+1
    touch only along the shared boundary curve (their arcs sit on one
    circle through identical endpoints); scales two or more apart are
    separated outright because the apex factor sqrt(17)/2 is below 2.
    """
    tiles = ts.tiles
    for i in range(len(tiles)):
        for j in range(i + 1, len(tiles)):
            a, b = tiles[i], tiles[j]
            if a.k == b.k:
                if a.n == b.n:
                    return False
                continue
            lo, hi = (a, b) if a.k < b.k else (b, a)
            if hi.k - lo.k >= 2:
                # band [2**k, 2**k sqrt(17)/2] vs [2**k', ...]: 17/4 < 16
                continue
            # adjacent scales: x-overlap must lie along the common circle
            xl_lo = Fraction(lo.n) * (1 << lo.k) if lo.k >= 0 else Fraction(lo.n, 1 << -lo.k)
            xr_lo = xl_lo + (Fraction(1 << lo.k) if lo.k >= 0 else Fraction(1, 1 << -lo.k))
            xl_hi = Fraction(hi.n) * 2 * (xr_lo - xl_lo)
            xr_hi = xl_hi + 2 * (xr_lo - xl_lo)
            if xr_lo <= xl_hi or xr_hi <= xl_lo:
                continue
            # top arc of lo and the overlapping bottom arc of hi must agree
            top = _tile_edge_data(lo)[3][1]
            bots = [_tile_edge_data(hi)[0][1], _tile_edge_data(hi)[1][1]]
            if not any(arc[0] == top[0] and arc[1] == top[1] and
                       arc[2] == top[2] and arc[3] == top[3] for arc in bots):
                return False
    return True


# -- distances and agreement --------------------------------------------

def _cosh_point_to_pentagon(c: Fraction, k: int) -> float:
    """cosh distance from i=(0,1) to the closed pentagon with x-interval
    [c, c + 2**k] at scale k (offset c rational)."""
    w = Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)
    h = w
    top = 2 * w
    xs = [c, c + w / 2, c + w, c + w, c]
    ys = [h, h, h, top, top]
    best = None

    def upd(val: float):
        nonlocal best
        if best is None or val < best:
            best = val

    for x, y in zip(xs, ys):
        upd(float(1 + (x * x + (y - 1) ** 2) / (2 * y)))
    arcs = [(c, c + w / 2, h), (c + w / 2, c + w, h), (c, c + w, top)]
    for xa, xb, yy in arcs:
        m = (xa + xb) / 2
        q = (xb - xa) ** 2 / 4 + yy * yy
        d = m * m + 1 + q
        xstar = m * (d - 2 * q) / d
        if xa <= xstar <= xb:
            val2 = (d * d - 4 * q * m * m) / (4 * q)
            upd(math.sqrt(float(val2)))
    for x in (c, c + w):
        y2 = x * x + 1
        if h * h <= y2 <= top * top:
            upd(math.sqrt(float(y2)))
    return best


def _v2_int(n: int) -> int:
    return (n & -n).bit_length() - 1


def agreement_radius(n: int, m: int) -> float:
    """Largest radius at which the tilings P+n and P+m look identical
    around i.

    Scale-k tiles of P+t occupy x-intervals 2**k j + t, so the two tile
    sets agree at every scale k <= v2(m-n) and differ at every higher
    scale.  The returned radius is the distance from i to the nearest
    tile of either tiling at scale v2(m-n) + 1; returns inf when n == m.
    """
    if n == m:
        return math.inf
    k = _v2_int(m - n) + 1
    w = Fraction(1 << k)
    best = None
    for t in (n, m):
        j0 = math.floor(Fraction(-t) / w)
        for j in (j0 - 1, j0, j0 + 1):
            c = w * j + t
            val = _cosh_point_to_pentagon(c, k)
            if best is None or val < best:
                best = val
    return math.acosh(best)
