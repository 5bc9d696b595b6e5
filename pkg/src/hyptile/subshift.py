"""Colouring subshifts: presentations, languages, and exact invariant measures.

Three presentations are supported.  Periodic words and substitution rules
define the subshift exactly; an explicit window only exhibits a finite
stretch of one orbit, so everything derived from it is flagged
approximate and measures are refused outright.

Substitution languages are computed by the junction-closure fixpoint on
2-blocks followed by one application of a high enough power of the rules;
both steps are exact for primitive rules, which is the regime every
measure-level operation requires anyway.

Aperiodicity for substitutions is certified, not guessed.  For bijective
constant-length rules (every column a permutation) the fixed word is
periodic iff its minimal period p satisfies p <= alphabet size: first,
gcd(p, s) > 1 would let a column map collapse the rotation by p/q to the
identity, contradicting minimality; then windows of length >= p at the
positions s^k * i are pinned by single letters, so same-letter positions
coincide mod p.  Scanning those finitely many candidate periods decides
the question.  Non-bijective rules only ever emit a definite "periodic"
(via complexity stabilization, which is conclusive), else "unknown".
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from .algebraic import AlgebraicNumber, perron_eigenvalue, nullspace_vector


class HorizonExhausted(Exception):
    """The explicit window is too short for the requested block length."""


class UnsupportedSpec(Exception):
    """Raised for measure requests outside the uniquely ergodic cases."""


@dataclass(frozen=True)
class Periodic:
    word: str

    def __post_init__(self):
        _check_letters(self.word)
        if not self.word:
            raise ValueError("periodic word must be nonempty")


@dataclass(frozen=True)
class Substitution:
    rules: tuple[tuple[str, str], ...]  # sorted (letter, image) pairs

    @staticmethod
    def of(mapping) -> "Substitution":
        return Substitution(tuple(sorted(mapping.items())))

    def __post_init__(self):
        seen = set()
        for letter, image in self.rules:
            if len(letter) != 1:
                raise ValueError("rule keys must be single letters")
            if letter in seen:
                raise ValueError(f"duplicate rule for {letter!r}")
            seen.add(letter)
            if not image:
                raise ValueError(f"empty image for letter {letter!r}")
        for letter, image in self.rules:
            for c in image:
                if c not in seen:
                    raise ValueError(f"image letter {c!r} has no rule")
        _check_letters("".join(seen))

    def mapping(self) -> dict:
        return dict(self.rules)


@dataclass(frozen=True)
class ExplicitWindow:
    left: str   # letters at indices ..., -2, -1
    right: str  # letters at indices 0, 1, ...
    horizon: int

    def __post_init__(self):
        _check_letters(self.left + self.right)
        if not (self.left + self.right):
            raise ValueError("window must be nonempty")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


SubshiftSpec = Periodic | Substitution | ExplicitWindow


def _check_letters(s: str):
    # colour alphabets are 1..r in practice, but any symbol works here
    for c in s:
        if not c.isalnum():
            raise ValueError(f"letters must be alphanumeric, got {c!r}")


def approximate(spec: SubshiftSpec) -> bool:
    """Whether downstream results carry the horizon-limited caveat."""
    return isinstance(spec, ExplicitWindow)


def alphabet(spec: SubshiftSpec) -> tuple[str, ...]:
    if isinstance(spec, Periodic):
        return tuple(sorted(set(spec.word)))
    if isinstance(spec, Substitution):
        return tuple(sorted(dict(spec.rules)))
    return tuple(sorted(set(spec.left + spec.right)))


# -- JSON ingestion ------------------------------------------------------

def parse_spec(obj: dict) -> SubshiftSpec:
    kind = obj.get("type")
    if kind == "periodic":
        return Periodic(obj["word"])
    if kind == "substitution":
        return Substitution.of(obj["rules"])
    if kind == "explicit":
        return ExplicitWindow(obj.get("left", ""), obj.get("right", ""),
                              int(obj["horizon"]))
    raise ValueError(f"unknown subshift spec type: {kind!r}")


def spec_to_json(spec: SubshiftSpec) -> dict:
    if isinstance(spec, Periodic):
        return {"type": "periodic", "word": spec.word}
    if isinstance(spec, Substitution):
        return {"type": "substitution", "rules": dict(spec.rules)}
    return {"type": "explicit", "left": spec.left, "right": spec.right,
            "horizon": spec.horizon}


# -- substitution machinery ----------------------------------------------

def incidence_matrix(spec: Substitution) -> list[list[int]]:
    """M[i][j] = occurrences of letter i in the image of letter j."""
    letters = alphabet(spec)
    rules = spec.mapping()
    return [[rules[b].count(a) for b in letters] for a in letters]


def is_primitive(spec: Substitution) -> bool:
    """Some power of the incidence matrix is strictly positive."""
    letters = alphabet(spec)
    r = len(letters)
    rules = spec.mapping()
    reach = [[rules[b].count(a) > 0 for b in letters] for a in letters]
    cur = reach
    for _ in range((r - 1) ** 2 + 1):
        if all(all(row) for row in cur):
            return True
        cur = [[any(cur[i][k] and reach[k][j] for k in range(r))
                for j in range(r)] for i in range(r)]
    return False


def _apply(rules: dict, word: str) -> str:
    return "".join(rules[c] for c in word)


def _power(rules: dict, t: int) -> dict:
    out = {c: c for c in rules}
    for _ in range(t):
        out = {c: _apply(rules, w) for c, w in out.items()}
    return out


def _reject_stuck(rules: dict):
    """Refuse rule sets with a cycle of letters whose images never grow."""
    stuck = {c for c, w in rules.items() if len(w) == 1}
    while True:
        kept = {c for c in stuck if rules[c][0] in stuck}
        if kept == stuck:
            break
        stuck = kept
    if stuck:
        raise ValueError(f"letters {sorted(stuck)} never expand under the rules")


def _seed_power(spec: Substitution) -> tuple[dict, str]:
    """A power of the rules with a fixed first letter and images >= 2 long."""
    rules = spec.mapping()
    _reject_stuck(rules)
    c = next(iter(sorted(rules)))
    trail = [c]
    while True:
        c = rules[c][0]
        if c in trail:
            t = len(trail) - trail.index(c)
            break
        trail.append(c)
    out = _power(rules, t)
    while min(len(w) for w in out.values()) < 2:
        out = {k: _apply(out, w) for k, w in out.items()}
    return out, c


_lang_lock = threading.Lock()
_lang_cache: dict = {}


def _pair_closure(spec: Substitution) -> frozenset:
    """Two-letter junction closure seeded from every letter's image.

    Any 2-block of any iterate sits inside the image of a letter or of a
    previously seen 2-block, so iterating cd -> 2-blocks(rules[c]+rules[d])
    to a fixed point collects exactly the candidate junctions.
    """
    rules = spec.mapping()
    pairs = set()
    for img in rules.values():
        pairs.update(img[i:i + 2] for i in range(len(img) - 1))
    while True:
        new = set(pairs)
        for p in pairs:
            img = rules[p[0]] + rules[p[1]]
            new.update(img[i:i + 2] for i in range(len(img) - 1))
        if new == pairs:
            return frozenset(pairs)
        pairs = new


def language(spec: SubshiftSpec, n: int):
    """Sorted length-n words of the subshift.

    Exact for Periodic always and for primitive Substitution rules; an
    ExplicitWindow lists the blocks of its finite stretch and refuses
    n beyond the declared horizon.
    """
    if n < 1:
        raise ValueError("block length must be >= 1")
    key = (spec, n)
    with _lang_lock:
        if key in _lang_cache:
            return list(_lang_cache[key])
    if isinstance(spec, Periodic):
        p = len(spec.word)
        reps = spec.word * (n // p + 2)
        words = sorted({reps[i:i + n] for i in range(p)})
    elif isinstance(spec, ExplicitWindow):
        w = spec.left + spec.right
        if n > spec.horizon:
            raise HorizonExhausted(
                f"horizon exhausted: window trusted to {spec.horizon}, need {n}")
        if n > len(w):
            raise HorizonExhausted(
                f"horizon exhausted: window holds {len(w)} letters, need {n}")
        words = sorted({w[i:i + n] for i in range(len(w) - n + 1)})
    elif len(alphabet(spec)) == 1:
        words = [alphabet(spec)[0] * n]
    else:
        rules = spec.mapping()
        _reject_stuck(rules)
        while min(len(w) for w in rules.values()) < n:
            base = dict(rules)
            rules = {k: _apply(base, w) for k, w in rules.items()}
        out = set()
        for pair in _pair_closure(spec):
            img = rules[pair[0]] + rules[pair[1]]
            out.update(img[i:i + n] for i in range(len(rules[pair[0]])))
        words = sorted(out)
    with _lang_lock:
        _lang_cache[key] = tuple(words)
    return words


def constant_length(spec: Substitution):
    lens = {len(w) for _, w in spec.rules}
    return lens.pop() if len(lens) == 1 else None


def _is_bijective(spec: Substitution) -> bool:
    s = constant_length(spec)
    if s is None:
        return False
    letters = alphabet(spec)
    rules = spec.mapping()
    return all(len({rules[c][j] for c in letters}) == len(letters)
               for j in range(s))


def _fixed_prefix(rules: dict, a: str, length: int) -> str:
    w = a
    while len(w) < length:
        w = _apply(rules, w)
    return w[:length]


def check_minimal_aperiodic(spec: SubshiftSpec) -> dict:
    """Minimality and aperiodicity verdicts, each True/False/"unknown"."""
    if isinstance(spec, Periodic):
        return {"minimal": True, "aperiodic": False}
    if isinstance(spec, ExplicitWindow):
        return {"minimal": "unknown", "aperiodic": "unknown",
                "approximate": True}
    minimal = is_primitive(spec)
    letters = alphabet(spec)
    if len(letters) == 1:
        return {"minimal": minimal, "aperiodic": False}
    aperiodic = "unknown"
    if minimal and _is_bijective(spec):
        rules, a = _seed_power(spec)
        s = len(next(iter(rules.values())))
        periodic = False
        for p in range(1, len(letters) + 1):
            y = _fixed_prefix(rules, a, p)
            if _apply(rules, y) == y * s:
                periodic = True
                break
        aperiodic = not periodic
    elif minimal:
        # stabilized complexity is a conclusive periodicity certificate
        prev = len(language(spec, 1))
        for n in range(2, 41):
            cur = len(language(spec, n))
            if cur == prev:
                aperiodic = False
                break
            prev = cur
    return {"minimal": minimal, "aperiodic": aperiodic}


# -- exact invariant measures ---------------------------------------------

@dataclass(frozen=True)
class MeasureValue:
    """Exact cylinder measure: a Fraction or a field element."""

    value: object  # Fraction | AlgebraicNumber

    @property
    def is_rational(self) -> bool:
        return isinstance(self.value, Fraction)

    def as_float(self) -> float:
        return float(self.value)

    def __eq__(self, other):
        if isinstance(other, MeasureValue):
            return self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash(str(self.value))


def block_substitution(spec: Substitution, n: int):
    """Induced substitution on length-n blocks.

    The image of a block is the run of n-windows of sigma(block) starting
    at each position of the first letter's image; the tail letters always
    supply the n-1 letters those windows need.
    """
    rules = spec.mapping()
    blocks = language(spec, n)
    out = {}
    for u in blocks:
        img = _apply(rules, u)
        head = len(rules[u[0]])
        out[u] = [img[j:j + n] for j in range(head)]
    return blocks, out


_meas_lock = threading.Lock()
_meas_cache: dict = {}
_perron_cache: dict = {}


def _spec_perron(spec: Substitution):
    """One eigenvalue object per spec, so every block level shares a field."""
    with _meas_lock:
        if spec not in _perron_cache:
            s = constant_length(spec)
            _perron_cache[spec] = Fraction(s) if s is not None \
                else perron_eigenvalue(incidence_matrix(spec))
        return _perron_cache[spec]


def measure_vector(spec: SubshiftSpec, n: int) -> dict:
    """Exact invariant probabilities of all length-n cylinders."""
    key = (spec, n)
    with _meas_lock:
        if key in _meas_cache:
            return dict(_meas_cache[key])
    if isinstance(spec, ExplicitWindow):
        raise UnsupportedSpec("not uniquely ergodic / unsupported spec")
    if isinstance(spec, Periodic):
        p = len(spec.word)
        reps = spec.word * (n // p + 2)
        counts: dict = {}
        for i in range(p):
            w = reps[i:i + n]
            counts[w] = counts.get(w, 0) + 1
        vec = {w: MeasureValue(Fraction(c, p)) for w, c in counts.items()}
    else:
        if not is_primitive(spec):
            raise UnsupportedSpec("not uniquely ergodic / unsupported spec")
        blocks, sub = block_substitution(spec, n)
        lam = _spec_perron(spec)
        mat = [[Fraction(sub[u].count(v)) for u in blocks] for v in blocks]
        if isinstance(lam, AlgebraicNumber):
            field = lam.field
            mat = [[field.rational(x) for x in row] for row in mat]
        for i in range(len(blocks)):
            mat[i][i] = mat[i][i] - lam
        v = nullspace_vector(mat)
        total = v[0]
        for x in v[1:]:
            total = total + x
        mu = [x / total for x in v]
        for x in mu:
            positive = x > 0 if isinstance(x, Fraction) else x.sign() > 0
            if not positive:
                raise ValueError("Perron vector not strictly positive")
        vec = {u: MeasureValue(x) for u, x in zip(blocks, mu)}
    with _meas_lock:
        _meas_cache[key] = dict(vec)
    return vec


def cylinder_measure(spec: SubshiftSpec, u: str) -> MeasureValue:
    """Invariant probability of the cylinder [u], exactly."""
    if not u:
        raise ValueError("cylinder word must be nonempty")
    vec = measure_vector(spec, len(u))
    if u not in vec:
        raise ValueError(f"word {u!r} is not in the language")
    return vec[u]
