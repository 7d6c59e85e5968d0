"""Closed-form machinery special to banana graphs.

Degree-0 classes on a banana correspond to integer (g+1)-tuples modulo the
relations (1,...,1) and n0*e0 - na*ea; each class has a unique reduced tuple
(entries in range, at least one zero, full entries left of zeros).  Reduced
tuples translate directly into base-reduced divisors, which makes rank a
three-integer formula.  The tau fragments and inversion lower bounds for the
three special hub-adjacent markings live here too.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import AlgorithmError, InvalidGraphError, WrongShapeError
from .graphs import BananaSpec, Graph
from .divisors import Divisor

_REDUCE_GUARD = 10 ** 6

MULTIVALENT_PAIR = "multivalent_pair"
ONE_OFF = "one_off"
BOTH_OFF = "both_off"
BOTH_OFF_MIN = "both_off_min"


@dataclass(frozen=True)
class BananaTuple:
    """Coset representative: entries a_alpha plus the degree the class lives in."""

    spec: BananaSpec
    entries: tuple[int, ...]
    degree_offset: int = 0

    def __post_init__(self):
        if len(self.entries) != len(self.spec.lengths):
            raise WrongShapeError("entry count must match strand count")

    def is_reduced(self) -> bool:
        lengths = self.spec.lengths
        e = self.entries
        if any(not 0 <= a <= n for a, n in zip(e, lengths)):
            return False
        if 0 not in e:
            return False
        zeros = [i for i, a in enumerate(e) if a == 0]
        fulls = [i for i, a in enumerate(e) if a == lengths[i]]
        return not fulls or not zeros or max(fulls) < min(zeros)


@dataclass(frozen=True)
class BananaReducedDivisor:
    """Base-reduced shape on a banana: chips at the two hubs plus at most one
    interior chip per strand."""

    left: int
    right: int
    interior: tuple[tuple[int, int], ...]  # (strand, position), position interior

    @property
    def excess(self) -> int:
        return len(self.interior)

    def to_divisor(self, spec: BananaSpec) -> Divisor:
        chips: dict[str, int] = {}
        if self.left:
            chips[spec.left] = self.left
        if self.right:
            chips[spec.right] = chips.get(spec.right, 0) + self.right
        for alpha, i in self.interior:
            chips[spec.vertex_id(alpha, i)] = chips.get(spec.vertex_id(alpha, i), 0) + 1
        return Divisor(chips)


def _reduce_entries(lengths: tuple[int, ...], entries) -> tuple[int, ...]:
    work = list(entries)
    for _ in range(_REDUCE_GUARD):
        m = min(work)
        if m:
            work = [a - m for a in work]
        over = next((i for i, a in enumerate(work) if a > lengths[i]), None)
        if over is None:
            break
        zero = work.index(0)
        work[over] -= lengths[over]
        work[zero] = lengths[zero]
    else:
        raise AlgorithmError("tuple reduction did not terminate; this is a bug")
    # left-justify: full values occupy the leftmost of the {0, full} slots
    slots = [i for i, a in enumerate(work) if a == 0 or a == lengths[i]]
    nfull = sum(1 for i in slots if work[i] == lengths[i])
    for pos, i in enumerate(slots):
        work[i] = lengths[i] if pos < nfull else 0
    return tuple(work)


def reduce_tuple(t: BananaTuple) -> BananaTuple:
    """Unique reduced representative of the same coset; fixed point on reduced input."""
    return BananaTuple(t.spec, _reduce_entries(t.spec.lengths, t.entries), t.degree_offset)


def divisor_to_tuple(spec: BananaSpec, d: Divisor) -> BananaTuple:
    """Reduced tuple of [d - deg(d) * L], carrying deg(d) as the offset."""
    raw = [0] * len(spec.lengths)
    for v, c in d.coeffs.items():
        alpha, i = spec.position(v)
        raw[alpha] += c * i
    return BananaTuple(spec, _reduce_entries(spec.lengths, raw), d.degree)


def tuple_to_reduced_divisor(t: BananaTuple, degree: int) -> BananaReducedDivisor:
    """Base-reduced divisor of t's class at the requested degree."""
    if not t.is_reduced():
        raise WrongShapeError("tuple must be reduced first")
    lengths = t.spec.lengths
    right = 0
    interior = []
    nonzero = 0
    for alpha, a in enumerate(t.entries):
        if a == 0:
            continue
        nonzero += 1
        if a == lengths[alpha]:
            right += 1
        else:
            interior.append((alpha, a))
    return BananaReducedDivisor(degree - nonzero, right, tuple(interior))


def banana_rank(a: int, b: int, e: int, g: int) -> int:
    """Rank of a base-reduced banana divisor with a/b hub chips and e strand chips."""
    if b < 0 or e < 0 or b > g - e:
        raise InvalidGraphError(
            f"not a reduced banana shape: a={a} b={b} e={e} g={g}")
    if a < 0:
        return -1
    return min(a, b) + max(0, max(a, b) - (g - e))


def rank_of_tuple(t: BananaTuple, degree: int) -> int:
    red = tuple_to_reduced_divisor(t, degree)
    return banana_rank(red.left, red.right, red.excess, t.spec.genus)


def _raw_entries(spec: BananaSpec, d: Divisor) -> list[int]:
    raw = [0] * len(spec.lengths)
    for v, c in d.coeffs.items():
        alpha, i = spec.position(v)
        raw[alpha] += c * i
    return raw


def rank_entries(spec: BananaSpec, raw_entries, degree: int) -> int:
    """Rank of the class with unreduced entry vector raw_entries at a degree."""
    t = BananaTuple(spec, _reduce_entries(spec.lengths, raw_entries), degree)
    return rank_of_tuple(t, degree)


def class_rank(g: Graph, d: Divisor) -> int:
    """Rank via the tuple calculus; only callable on graphs built as bananas."""
    if g.banana is None:
        raise WrongShapeError("not a banana graph")
    return rank_entries(g.banana, _raw_entries(g.banana, d), d.degree)


def predicted_tau(case: str, lengths, b: int) -> int | None:
    """Closed-form fragments of the transmission window for D = g*R.

    Cases name the marking: both hubs; hub plus the vertex one step short of
    the other hub (strand 0); or the two positions one step inside strands 0
    and 1.  Returns None outside the fragment's validity range rather than
    extrapolating.
    """
    lengths = tuple(lengths)
    g = len(lengths) - 1
    if case == MULTIVALENT_PAIR:
        return g - b if 0 <= b <= g else None

    if case == ONE_OFF:
        n0 = lengths[0]
        if n0 < 2:
            raise WrongShapeError("one-off marking needs strand 0 of length >= 2")
        if not 0 <= b * (n0 - 1) <= n0 * g:
            return None
        r = b % n0
        if r == 0:
            return b // n0
        if r == n0 - 1:
            return g + (b + 1) // n0
        return g + 2 * (b // n0) - b + 1

    if case == BOTH_OFF:
        n0, n1 = lengths[0], lengths[1]
        if n0 < 2 or n1 < 2:
            raise WrongShapeError("both-off marking needs strands 0,1 of length >= 2")
        # lower end needs g+3-n0, not g+2-n0: the interior chip at g-b+2 must
        # stay short of the far hub
        if max(2, g + 3 - n0) <= b <= min(g - 1, n1 - 2):
            return g - b + 2
        if b >= 1 and b * (n1 - 1) <= n1 * g:
            m, r = divmod(b, n1)
            if r == 0 and 1 <= m <= n0 - 1:
                return m + 1
            # the r = n1-1 family also needs ((b+1)/n1)(n1-1) >= 2: the walk must
            # drop the far-hub coefficient strictly below g-1
            if (r == n1 - 1 and b <= n1 * (n0 - 1 - g) - 1
                    and (m + 1) * (n1 - 1) >= 2):
                return g + (b + 1) // n1
            if 2 <= r <= n1 - 2 and b >= 2 and 2 * m - b <= n0 - 3 - g:
                return g + 2 * m - b + 2
        return None

    raise WrongShapeError(f"unknown marking case {case!r}")


def inversion_lower_bound(case: str, lengths) -> int:
    """Guaranteed minimum for the maximal inversion count over all divisors,
    for the marking cases where every divisor is submodular."""
    lengths = tuple(lengths)
    g = len(lengths) - 1
    if case == MULTIVALENT_PAIR:
        return comb(g + 1, 2)

    if case == ONE_OFF:
        n0 = lengths[0]
        if n0 < 2:
            raise WrongShapeError("one-off marking needs strand 0 of length >= 2")
        f = g // (n0 - 1)
        h = f * (n0 - 2) + min(n0 - 2, (n0 * g) // (n0 - 1) - n0 * f)
        return comb(f + 1, 2) + f * h + comb(h, 2)

    if case == BOTH_OFF_MIN:
        n0, n1 = lengths[0], lengths[1]
        if min(n0, n1) < g + 1:
            raise WrongShapeError("bound requires both marked strands longer than the genus")
        return comb(g - 2, 2)

    raise WrongShapeError(f"unknown marking case {case!r}")
