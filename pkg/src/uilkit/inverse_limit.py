"""Itinerary-level classification of points of tent inverse limit spaces.

A point of the inverse limit is coded by a two-sided symbol sequence
``... s_{-2} s_{-1} . s_0 s_1 ...``; the left tail determines the basic arc
through the match sets

    N_L = { n > 1  : s_{-(n-1)}..s_{-1} = nu_1..nu_{n-1}, #1 odd }
    N_R = { n >= 1 : s_{-(n-1)}..s_{-1} = nu_1..nu_{n-1}, #1 even }

(parities count the 1s of the matched kneading prefix) and their suprema
tau_L, tau_R.  For a finite left word, the zero-th projections of all
compatible points form an interval whose endpoints are critical-orbit values
picked out by exactly these matches (plus the domain floor for the two words
coding the endpoints 0 and 1); the independent oracle is a plain interval
pull-back of [0, 1] through the word, composing the certified branch maps.

An endpoint of the space needs an infinite tau on the side where the point
sits at the arc's edge.  A finite horizon can never certify a supremum over
an infinite set, so verdicts are the currency: infinite tails are certified
only by periodic pumping against a declared periodic kneading continuation,
finite tau with a mismatch witness inside the known prefix for every deeper
depth refutes, and persistent saturation yields depth-stamped evidence.

Pull-backs of intervals along backward orbits drive the recurrence-type
test: a monotone pull-back (no interior critical visit) of a fixed-size
neighbourhood along long critical-orbit segments witnesses reluctant
recurrence; systematic failure across an epsilon grid is finite-horizon
evidence of persistent recurrence, reported together with the shortcut
"divergent kneading map implies persistent recurrence".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import verdicts as V
from .errors import (DomainError, NoRecurrenceWitness, PrecisionExhausted,
                     UnrealizableWord, UnresolvedComparison)
from .hofbauer import OrbitTable, tower_levels
from .kneading import CuttingData, KneadingPrefix, cutting_data, q_asymptotics
from .scalars import (C, DEFAULT_PREC_CAP, Scalar, SignRelC, SlopeParam,
                      branch_preimage, certified_cmp, sign_rel_c, tent_apply)

RULE_TAU = "backward-word-prefix-matches"
RULE_ARC = "arc-projection-from-matches"
RULE_ENDPOINT = "endpoint-infinite-tau-criterion"
RULE_FOLDING = "folding-orbit-closure-membership"
RULE_PERSISTENCE = "monotone-pullback-search"
RULE_CLASS = "folding-endpoint-classification"


# -- backward words and itineraries -------------------------------------------

class BackwardWord:
    """A finite left tail s_{-N} .. s_{-1}, optionally periodic further left.

    ``symbols`` is stored oldest-first, so ``symbols[-1]`` is s_{-1}.  When
    ``periodic_block`` is set the tail continues beyond depth N by repeating
    the block leftwards, making every depth well defined.
    """

    __slots__ = ("symbols", "periodic_block")

    def __init__(self, symbols: str, periodic_block: Optional[str] = None):
        if any(ch not in "01" for ch in symbols):
            raise DomainError("backward word must be over 0/1")
        if periodic_block is not None and (
                not periodic_block or any(ch not in "01" for ch in periodic_block)):
            raise DomainError("periodic block must be a nonempty 0/1 word")
        self.symbols = symbols
        self.periodic_block = periodic_block

    @property
    def is_periodic(self) -> bool:
        return self.periodic_block is not None

    def depth_available(self) -> Optional[int]:
        """Explicit depth, or None for an infinite (periodic) tail."""
        return None if self.is_periodic else len(self.symbols)

    def at(self, n: int) -> Optional[str]:
        """s_{-n} for n >= 1, or None beyond a finite word."""
        if n < 1:
            raise IndexError(n)
        if n <= len(self.symbols):
            return self.symbols[len(self.symbols) - n]
        if not self.is_periodic:
            return None
        p = len(self.periodic_block)
        return self.periodic_block[-(((n - len(self.symbols) - 1) % p) + 1)]

    def unrolled(self, depth: int) -> str:
        if not self.is_periodic and depth > len(self.symbols):
            depth = len(self.symbols)
        return "".join(self.at(n) for n in range(depth, 0, -1))

    def __eq__(self, other):
        return isinstance(other, BackwardWord) and \
            self.symbols == other.symbols and \
            self.periodic_block == other.periodic_block

    def __hash__(self):
        return hash((self.symbols, self.periodic_block))

    def __repr__(self):
        head = f"({self.periodic_block})^inf " if self.is_periodic else "..."
        return f"BackwardWord({head}{self.symbols})"


@dataclass
class TwoSidedItinerary:
    backward: BackwardWord
    forward: str = ""
    x0: Optional[Scalar] = None

    def __post_init__(self):
        if any(ch not in "01" for ch in self.forward):
            raise DomainError("forward word must be over 0/1")

    def shifted(self, slope: Optional[SlopeParam] = None) -> "TwoSidedItinerary":
        """One shift step: s_0 moves into the tail, the base point advances."""
        if not self.forward:
            raise DomainError("need a forward symbol to shift")
        x0 = None
        if slope is not None and self.x0 is not None:
            x0 = tent_apply(slope, self.x0)
        back = BackwardWord(self.backward.symbols + self.forward[0],
                            self.backward.periodic_block)
        return TwoSidedItinerary(back, self.forward[1:], x0)


def parse_itinerary(text: str) -> TwoSidedItinerary:
    """Parse ``(block)^inf tail.word`` / ``...tail.word`` itinerary notation."""
    text = text.strip().replace("|", " ")
    block = None
    if text.startswith("("):
        close = text.index(")")
        block = text[1:close]
        rest = text[close + 1:]
        if not rest.startswith("^inf"):
            raise DomainError("periodic marker must be written (block)^inf")
        text = rest[4:]
    text = text.strip().lstrip(".").strip()
    if "." in text:
        back, _, fwd = text.partition(".")
    else:
        back, fwd = text, ""
    return TwoSidedItinerary(BackwardWord(back.strip(), block), fwd.strip())


def format_itinerary(it: TwoSidedItinerary) -> str:
    head = f"({it.backward.periodic_block})^inf " if it.backward.is_periodic \
        else "..."
    return f"{head}{it.backward.symbols}.{it.forward}"


# -- match sets ---------------------------------------------------------------

@dataclass(frozen=True)
class TauData:
    """Match sets of a left tail against the kneading prefix.

    ``n_max`` is the deepest checkable depth; a match at ``n_max`` saturates
    its side (the true tau may exceed the bound).  ``cert_finite*`` means
    every deeper depth carries a mismatch witness inside the known kneading
    prefix; ``cert_infinite*`` means a periodic pumping certificate exists
    (only possible against a declared periodic kneading continuation).
    """

    NL: tuple
    NR: tuple
    tauL: Optional[int]
    tauR: Optional[int]
    saturatedL: bool
    saturatedR: bool
    cert_finiteL: bool = False
    cert_finiteR: bool = False
    cert_infiniteL: bool = False
    cert_infiniteR: bool = False
    n_max: int = 0
    word_len: Optional[int] = None
    pump_witness: Optional[tuple] = None

    def to_json(self):
        return {"NL": list(self.NL), "NR": list(self.NR),
                "tauL": self.tauL, "tauR": self.tauR,
                "saturatedL": self.saturatedL, "saturatedR": self.saturatedR,
                "cert_finiteL": self.cert_finiteL,
                "cert_finiteR": self.cert_finiteR,
                "cert_infiniteL": self.cert_infiniteL,
                "cert_infiniteR": self.cert_infiniteR,
                "n_max": self.n_max}


def _match_at(back: BackwardWord, nu: KneadingPrefix, n: int) -> bool:
    for i in range(1, n):
        if back.at(i) != nu.symbol_at(n - i):
            return False
    return True


def tau_data(back: BackwardWord, nu: KneadingPrefix,
             depth: Optional[int] = None) -> TauData:
    """Exact match sets within the data, saturation flags at its boundary."""
    width = len(nu)
    avail = back.depth_available()
    if avail is not None and width < avail:
        raise DomainError("kneading prefix shorter than the backward word")
    n_max = width + 1 if avail is None else min(avail + 1, width + 1)
    if depth is not None:
        n_max = min(n_max, depth)

    parity = [0] * (width + 1)
    ones = 0
    for i in range(1, width + 1):
        if nu[i] == "1":
            ones += 1
        parity[i] = ones % 2

    NL, NR = [], []
    for n in range(1, n_max + 1):
        if _match_at(back, nu, n):
            (NR if parity[n - 1] == 0 else NL).append(n)
    tauL = NL[-1] if NL else None
    tauR = NR[-1] if NR else None
    saturatedL = bool(NL) and NL[-1] == n_max
    saturatedR = bool(NR) and NR[-1] == n_max

    cfL = cfR = ciL = ciR = False
    pump = None
    if back.is_periodic:
        cfL, cfR, ciL, ciR, pump = _periodic_tail_analysis(back, nu, n_max, parity)
        saturatedL = saturatedL or ciL
        saturatedR = saturatedR or ciR
    return TauData(tuple(NL), tuple(NR), tauL, tauR, saturatedL, saturatedR,
                   cfL, cfR, ciL, ciR, n_max, avail, pump)


def _known_mismatch(back: BackwardWord, nu: KneadingPrefix, n: int) -> bool:
    """A mismatch for the depth-n match witnessed inside the known prefix."""
    for i in range(1, n):
        v = nu.symbol_at(n - i)
        if v is not None and back.at(i) != v:
            return True
    return False


def _periodic_tail_analysis(back, nu, n_max, parity):
    """Finiteness kill-witnesses and pumping certificates for periodic tails.

    A depth-n match needs s_{-i} = nu_{n-i} for every i < n; only positions
    with nu known can witness a mismatch.  Once n is past
    ``explicit + |nu| + p``, the compared tail window is purely periodic and
    the witness pattern depends only on n mod p, so finitely many checks
    certify that tau is finite.  With a declared periodic kneading
    continuation, two aligned matches one common period apart pump forever.
    """
    p = len(back.periodic_block)
    width = len(nu)
    explicit = len(back.symbols)
    threshold = explicit + width + p + 2

    maybeL = maybeR = False
    survivors = []
    for n in range(n_max + 1, threshold + 1):
        if not _known_mismatch(back, nu, n):
            survivors.append(n)
            if n - 1 <= width:
                if parity[n - 1] == 0:
                    maybeR = True
                else:
                    maybeL = True
            else:
                maybeL = maybeR = True
    for r in range(p):
        n = threshold + 1 + ((r - threshold - 1) % p)
        if not _known_mismatch(back, nu, n):
            maybeL = maybeR = True

    ciL = ciR = False
    pump = None
    if nu.periodic_tail is not None:
        pre_nu, per_nu = nu.periodic_tail
        L = per_nu
        while L % p:
            L += per_nu
        base = max(pre_nu + per_nu, explicit + p) + L
        for n in range(base, base + 2 * L + 1):
            if _pump_match(back, nu, n) and _pump_match(back, nu, n + L):
                pump = (n, L)
                break
        if pump is not None:
            n0 = pump[0]
            block_ones = sum(
                1 for i in range(pre_nu + 1, pre_nu + per_nu + 1)
                if nu.symbol_at(i) == "1")
            if (L // per_nu) * block_ones % 2 == 0:
                if _pump_parity(nu, n0 - 1) == 0:
                    ciR = True
                else:
                    ciL = True
            else:
                ciL = ciR = True
            maybeL = maybeL or ciL
            maybeR = maybeR or ciR
    return (not maybeL and not ciL, not maybeR and not ciR, ciL, ciR, pump)


def _pump_match(back, nu, n):
    for i in range(1, n):
        v = nu.symbol_at(n - i)
        if v is None or back.at(i) != v:
            return False
    return True


def _pump_parity(nu, m):
    ones = 0
    for i in range(1, m + 1):
        if nu.symbol_at(i) == "1":
            ones += 1
    return ones % 2


# -- arc projections ----------------------------------------------------------

def word_image_interval(slope: SlopeParam, word: str, domain: str = "unit"):
    """Interval pull-back of [0,1] (or the core) through a backward word.

    Composes the certified branch maps: K_0 is the start interval and
    K_i = T(K_{i-1} cut to the branch of w_i); K_N is exactly the set of
    zero-th projections compatible with the word.  Returns exact Fractions
    (lo, hi), or None when the cylinder is empty.
    """
    if not slope.is_exact:
        raise DomainError("the word-image oracle needs an exact rational slope")
    s = slope.s.value
    if domain == "unit":
        lo, hi = Fraction(0), Fraction(1)
    elif domain == "core":
        lo, hi = s * (1 - s / 2), s / 2
    else:
        raise DomainError(f"unknown domain {domain!r}")
    half = Fraction(1, 2)
    for ch in word:
        if ch == "0":
            a, b = lo, min(hi, half)
            if a > b:
                return None
            lo, hi = s * a, s * b
        else:
            a, b = max(lo, half), hi
            if a > b:
                return None
            lo, hi = s * (1 - b), s * (1 - a)
    return lo, hi


def word_realizable(word: str, nu: KneadingPrefix) -> bool:
    """Symbolic realizability of a word inside [0, 1] itineraries.

    Every point of [0, c_1] has itinerary parity-lex below the kneading
    sequence, and every symbol after the first sees such a point, so a word
    is realizable exactly when each of its shifted windows (offset >= 1)
    stays parity-lex at or below the kneading prefix; ties run off the data
    and pass (points shadowing the critical value realize them).
    """
    from .scalars import parity_lex_cmp
    for i in range(1, len(word)):
        if parity_lex_cmp(word[i:], nu.bits) > 0:
            return False
    return True


def _approx_width(w):
    return None if w is None else V.approx(w)


@dataclass(frozen=True)
class ArcInterval:
    """Projection interval compatible with a backward word.

    ``exact`` means both endpoints are pinned orbit values (finite,
    unsaturated matches); otherwise lo/hi are one-sided bounds.  Orbit
    indices use 0 for the domain floor.
    """

    lo: Scalar
    hi: Scalar
    lo_n: int
    hi_n: int
    exact: bool
    tower_identity: Optional[int] = None
    degenerate_width: Optional[Fraction] = None

    def to_json(self):
        return {"lo": self.lo.to_json(), "hi": self.hi.to_json(),
                "lo_n": self.lo_n, "hi_n": self.hi_n, "exact": self.exact,
                "tower_identity": self.tower_identity,
                "degenerate_width": _approx_width(self.degenerate_width)
                if self.degenerate_width is not None else None}


def _extreme_orbit_value(candidates, orbit, want_min, prec_cap):
    best_n = None
    best = None
    for n in candidates:
        v = orbit.value(n)
        if best is None:
            best, best_n = v, n
            continue
        try:
            cmp = certified_cmp(v, best, prec_cap)
        except UnresolvedComparison:
            raise PrecisionExhausted(f"cannot order c_{n} against c_{best_n}")
        if cmp != 0 and (cmp < 0) == want_min:
            best, best_n = v, n
    return best, best_n


def basic_arc_interval(td: TauData, orbit: OrbitTable, word: Optional[str] = None,
                       kd: Optional[CuttingData] = None, mode: str = "unit",
                       degeneracy_threshold=Fraction(1, 1 << 20),
                       prec_cap: int = DEFAULT_PREC_CAP) -> ArcInterval:
    """Arc projection interval from the match sets.

    ``unit`` mode reproduces the [0,1] pull-back through the finite word:
    matches at depths up to the word length contribute their orbit values,
    and the two words coding the domain endpoints (all zeros, or 1 followed
    by zeros) contribute the floor 0.  ``core`` mode keeps every match
    (including saturated full-word ones) as one-sided bounds with the trivial
    floor c_2; with finite unsaturated matches on both sides the interval is
    exact and is checked to be the tower level D_{max(tauL, tauR)}.
    """
    if mode == "unit":
        if td.word_len is None:
            raise DomainError("unit mode needs a finite backward word")
        N = td.word_len
        nl = [n for n in td.NL if n <= N]
        nr = [n for n in td.NR if n <= N]
        domain_floor = word is not None and (
            word == "0" * N or word == "1" + "0" * (N - 1))
        if word is not None and kd is not None and \
                not word_realizable(word, kd.nu):
            raise UnrealizableWord("a shifted window exceeds the kneading word")
        if not nr:
            raise UnrealizableWord("no upper constraint: empty cylinder")
        hi, hi_n = _extreme_orbit_value(nr, orbit, True, prec_cap)
        if domain_floor:
            lo, lo_n = Scalar.exact(0), 0
        elif nl:
            lo, lo_n = _extreme_orbit_value(nl, orbit, False, prec_cap)
        else:
            raise UnrealizableWord(
                "no lower constraint and no domain endpoint: empty cylinder")
        return ArcInterval(lo, hi, lo_n, hi_n, True)
    if mode != "core":
        raise DomainError(f"unknown mode {mode!r}")

    nl, nr = list(td.NL), list(td.NR)
    hi, hi_n = _extreme_orbit_value(nr or [1], orbit, True, prec_cap)
    if nl:
        lo, lo_n = _extreme_orbit_value(nl, orbit, False, prec_cap)
    else:
        lo, lo_n = orbit.value(2), 2
    exact = bool(nl) and bool(nr) and not td.saturatedL and not td.saturatedR \
        and not td.cert_infiniteL and not td.cert_infiniteR
    identity = None
    if exact and kd is not None:
        n_star = max(td.tauL, td.tauR)
        if n_star <= kd.horizon and kd.beta_of(n_star) == min(td.tauL, td.tauR):
            identity = n_star
    degen = None
    if kd is not None and nl:
        inter_lo = inter_hi = None
        for n in nl:
            if n > kd.horizon:
                continue
            a, b = orbit.value(n), orbit.value(kd.beta_of(n))
            d_lo, d_hi = min(a.lo, b.lo), max(a.hi, b.hi)
            if inter_lo is None:
                inter_lo, inter_hi = d_lo, d_hi
            else:
                inter_lo, inter_hi = max(inter_lo, d_lo), min(inter_hi, d_hi)
        if inter_lo is not None and inter_hi - inter_lo <= degeneracy_threshold:
            degen = max(Fraction(0), inter_hi - inter_lo)
    return ArcInterval(lo, hi, lo_n, hi_n, exact, identity, degen)


# -- endpoint and folding verdicts ---------------------------------------------

def endpoint_verdict(it: TwoSidedItinerary, nu: KneadingPrefix,
                     depth: int = 256, position: Optional[str] = None,
                     prec_cap: int = DEFAULT_PREC_CAP) -> V.Verdict:
    """Endpoint test through the infinite-tau criterion.

    Certified only for periodic tails that pump against a declared periodic
    kneading continuation (with the point at the matching arc edge); refuted
    when both tail suprema are certifiably finite or the word's matches sit
    strictly inside the data; evidence when saturation persists as the depth
    grows.
    """
    td = tau_data(it.backward, nu, depth)
    if td.cert_infiniteL or td.cert_infiniteR:
        side = "left" if td.cert_infiniteL else "right"
        if position in (None, "edge", "left_end", "right_end"):
            return V.certified(RULE_ENDPOINT, depth=td.n_max, side=side,
                               pump=td.pump_witness)
        return V.refuted(RULE_ENDPOINT, depth=td.n_max, side=side,
                         reason="declared interior of its basic arc")
    if td.cert_finiteL and td.cert_finiteR:
        return V.refuted(RULE_ENDPOINT, depth=td.n_max, tauL=td.tauL,
                         tauR=td.tauR,
                         reason="both tail suprema certifiably finite")
    if td.saturatedL or td.saturatedR:
        # evidence needs the recurrence to have fired repeatedly, not just a
        # one-off full-word match
        deep_l = td.saturatedL and len([n for n in td.NL if n > 1]) >= 2
        deep_r = td.saturatedR and len([n for n in td.NR if n > 1]) >= 2
        if deep_l or deep_r:
            return V.evidence(RULE_ENDPOINT, depth=td.n_max,
                              side="left" if deep_l else "right",
                              tauL=td.tauL, tauR=td.tauR)
        return V.undetermined(RULE_ENDPOINT,
                              "saturation without repeated recurrence",
                              depth=td.n_max)
    if td.word_len is not None:
        return V.refuted(RULE_ENDPOINT, depth=td.n_max, tauL=td.tauL,
                         tauR=td.tauR,
                         reason="matches sit strictly inside the word")
    return V.undetermined(RULE_ENDPOINT, "no certificate either way",
                          depth=td.n_max)


def reconstruct_x0(slope: SlopeParam, forward: str) -> Scalar:
    """Enclosure of the points whose forward itinerary starts with ``forward``."""
    if not slope.is_exact:
        raise DomainError("x0 reconstruction needs an exact rational slope")
    s = slope.s.value
    lo, hi = Fraction(0), Fraction(1)
    for ch in reversed(forward):
        hi = min(hi, s / 2)                 # values above c_1 have no preimage
        if lo > hi:
            raise UnrealizableWord(f"forward word {forward!r} unrealizable")
        if ch == "0":
            lo, hi = lo / s, hi / s
        else:
            lo, hi = 1 - hi / s, 1 - lo / s
    return Scalar(lo, hi)


def backward_points(slope: SlopeParam, it: TwoSidedItinerary, depth: int):
    """Enclosures of pi_0 .. pi_depth along the backward symbols."""
    x0 = it.x0
    if x0 is None:
        if not it.forward:
            raise DomainError("need x0 or a forward word to locate the point")
        x0 = reconstruct_x0(slope, it.forward)
    pts = [x0]
    for n in range(1, depth + 1):
        sym = it.backward.at(n)
        if sym is None:
            break
        pts.append(branch_preimage(slope, pts[-1], int(sym)))
    return pts


def folding_verdict(it: TwoSidedItinerary, slope: SlopeParam,
                    nu: KneadingPrefix, depth: int = 64,
                    eps=Fraction(1, 1 << 20), proxy_len: int = 256,
                    burn_in: Optional[int] = None, window: int = 24,
                    orbit: Optional[OrbitTable] = None,
                    prec_cap: int = DEFAULT_PREC_CAP) -> V.Verdict:
    """Two-channel finite test that all projections lie in omega(c).

    Numeric channel: every projection up to ``depth`` must come eps-close to
    the orbit-tail proxy {c_j : burn_in <= j <= proxy_len}.  Symbolic
    channel: the itinerary window starting at a far coordinate must occur in
    the kneading prefix.  Refuted only when both channels fail; evidence
    otherwise.
    """
    eps = Fraction(eps)
    burn_in = proxy_len // 4 if burn_in is None else burn_in
    orbit = orbit or OrbitTable(slope, prec_cap)
    orbit.extend(proxy_len)
    # distances only need eps resolution; shed the huge exact denominators
    bits = max(64, (eps.denominator.bit_length() + 32))
    proxy = [orbit.value(j).rounded(bits)
             for j in range(burn_in, proxy_len + 1)]
    resolution = max(p.width() for p in proxy)
    pts = [x.rounded(bits) for x in backward_points(slope, it, depth)]
    far = []
    for n, x in enumerate(pts):
        near = False
        certainly_far = True
        for p in proxy:
            gap_lo = max(Fraction(0), p.lo - x.hi, x.lo - p.hi)
            gap_hi = max(abs(p.hi - x.lo), abs(x.hi - p.lo))
            if gap_hi <= eps:
                near = True
                break
            if gap_lo <= eps + resolution + x.width():
                certainly_far = False
        if not near and certainly_far:
            far.append(n)
    if not far:
        return V.evidence(RULE_FOLDING, depth=len(pts) - 1, epsilon=eps,
                          proxy_len=proxy_len)
    n = far[0]
    piece = it.backward.unrolled(n + window)[:window] if n > 0 else \
        (it.forward[:window] or it.backward.unrolled(window))
    if piece and piece not in nu.bits:
        return V.refuted(RULE_FOLDING, depth=len(pts) - 1, epsilon=eps,
                         far_at=n, missing_word=piece)
    return V.evidence(RULE_FOLDING, depth=len(pts) - 1, epsilon=eps,
                      anomaly_at=n)


# -- endpoint itinerary generation ----------------------------------------------

def endpoint_itinerary_gen(nu: KneadingPrefix, count: int = 2,
                           depth: int = 30) -> list:
    """Backward words from prefix-recurrence chains of the kneading word.

    A chain n_1 < n_2 < ... with nu_1..nu_{n_{j+1}} ending in nu_1..nu_{n_j}
    yields the left tail lim_j nu_1..nu_{n_j}; the emitted word is the full
    prefix nu_1..nu_{n_J} at the first chain element past ``depth``, so the
    chain elements stay visible as matches and the deepest match saturates
    at the word boundary.  Words are emitted only from chains still alive at
    the horizon (the final element recurs again); a non-recurrent word
    raises NoRecurrenceWitness with the deepest live chain element.  When
    two non-nested continuations exist, both branches are explored.
    """
    bits = nu.bits

    def occurrences(m):
        pref = bits[:m]
        out = []
        start = 1
        while True:
            idx = bits.find(pref, start)
            if idx < 0:
                break
            out.append(idx + m)
            start = idx + 1
        return [n for n in out if n > m]

    words, chains = [], []
    best_live = 1
    seen = set()
    stack = [(1, (1,))]
    while stack and len(words) < count:
        n, chain = stack.pop()
        nexts = occurrences(n)
        if nexts:
            best_live = max(best_live, n)
        if n >= depth and nexts:
            w = bits[:n]
            if w not in seen:
                seen.add(w)
                words.append(BackwardWord(w))
                chains.append(chain)
            continue
        if not nexts:
            continue
        picked = [nexts[0]]
        for cand in nexts[1:]:
            if not bits[:cand].endswith(bits[:picked[0]]):
                picked.append(cand)
                break
        if len(picked) == 1 and len(nexts) > 1:
            picked.append(nexts[1])
        for cand in reversed(picked):
            stack.append((cand, chain + (cand,)))
    if not words:
        raise NoRecurrenceWitness(best_live)
    return words


# -- pull-backs and persistence ---------------------------------------------------

@dataclass
class PullbackChain:
    """A maximal pull-back J_0, J_1, ... with per-step monotonicity data.

    Intervals are endpoint pairs (Scalar, Scalar).  ``monotone_prefix`` is
    the largest m such that none of J_1 .. J_m has c in its interior; the
    chain is monotone when that covers its whole length.
    """

    intervals: list
    joined: list
    monotone_prefix: int
    complete: bool

    @property
    def length(self):
        return len(self.intervals) - 1

    @property
    def monotone(self):
        return self.complete and self.monotone_prefix == self.length


def pull_back(J, along, slope: SlopeParam, stop_on_nonmonotone: bool = False,
              prec_cap: int = DEFAULT_PREC_CAP) -> PullbackChain:
    """Maximal pull-back of J along a backward orbit or a symbol word.

    ``along`` is either a list of point enclosures [x_0, x_{-1}, ...] (each
    J_k must contain x_{-k}) or a 0/1 word giving the branch of each step.
    J_{k+1} is the largest interval with T(J_{k+1}) inside J_k: a full branch
    preimage, or the join of both preimages through c whenever J_k reaches
    the critical value (the joined interval has c interior unless J_k is
    pinched at c_1, which is exactly when monotonicity breaks).
    """
    if isinstance(J, tuple):
        a, b = J
    else:
        a, b = Scalar(J.lo, J.lo), Scalar(J.hi, J.hi)
    c1 = tent_apply(slope, Scalar.exact(C))
    zero = Scalar.exact(0)
    intervals = [(a, b)]
    joined_flags = [False]
    symbols = along if isinstance(along, str) else None
    points = None if symbols is not None else list(along)
    steps = len(symbols) if symbols is not None else len(points) - 1
    first_interior = None
    complete = True
    for k in range(steps):
        a, b = intervals[-1]
        try:
            reaches_peak = certified_cmp(b, c1, prec_cap) >= 0
            if certified_cmp(a, c1, prec_cap) > 0:
                complete = False      # no preimage at all
                break
        except UnresolvedComparison:
            complete = False
            break
        a_eff = a if a.lo >= 0 else zero
        b_eff = c1 if reaches_peak else b
        left = (branch_preimage(slope, a_eff, 0), branch_preimage(slope, b_eff, 0))
        right = (branch_preimage(slope, b_eff, 1), branch_preimage(slope, a_eff, 1))
        if reaches_peak:
            new = (left[0], right[1])
            joined = True
        else:
            if symbols is not None:
                side = symbols[k]
            else:
                sgn = sign_rel_c(points[k + 1])
                if sgn is SignRelC.UNRESOLVED:
                    raise UnresolvedComparison(
                        f"pull-back step {k + 1}: target straddles c")
                side = "0" if sgn is SignRelC.BELOW else "1"
            new = left if side == "0" else right
            joined = False
        intervals.append(new)
        joined_flags.append(joined)
        if joined and first_interior is None:
            try:
                pinched = certified_cmp(a_eff, c1, prec_cap) == 0
            except UnresolvedComparison:
                pinched = False
            if not pinched:
                first_interior = k + 1
                if stop_on_nonmonotone:
                    break
    length = len(intervals) - 1
    monotone_prefix = length if first_interior is None else first_interior - 1
    return PullbackChain(intervals, joined_flags, monotone_prefix, complete)


def verify_monotone(chain: PullbackChain,
                    prec_cap: int = DEFAULT_PREC_CAP) -> bool:
    """Independent recheck that c is not interior to J_1 .. J_monotone_prefix."""
    c_scalar = Scalar.exact(C)
    for k in range(1, chain.monotone_prefix + 1):
        a, b = chain.intervals[k]
        try:
            if certified_cmp(a, c_scalar, prec_cap) < 0 and \
               certified_cmp(b, c_scalar, prec_cap) > 0:
                return False
        except UnresolvedComparison:
            return False
    return True


def reluctance_search(slope: SlopeParam, eps_grid: Sequence,
                      length_target: int = 64, horizon: int = 200,
                      kd: Optional[CuttingData] = None,
                      orbit: Optional[OrbitTable] = None,
                      prec_cap: int = DEFAULT_PREC_CAP) -> V.Verdict:
    """Monotone pull-backs of eps-balls along critical-orbit segments.

    Reluctant recurrence is witnessed by a monotone pull-back of a fixed
    eps-neighbourhood of c_{n+1} along (c_1, ..., c_{n+1}) of length at
    least ``length_target``.  When every eps in the grid fails for every
    segment within the horizon, the verdict is persistence evidence.  The
    shortcut "divergent kneading map implies persistent recurrence" and the
    recurrence of c within the horizon are reported alongside.
    """
    orbit = orbit or OrbitTable(slope, prec_cap)
    orbit.extend(horizon + 2)
    rec_gap = None
    for n in range(1, horizon + 1):
        x = orbit.value(n)
        gap = max(abs(x.hi - C), abs(C - x.lo))
        rec_gap = gap if rec_gap is None else min(rec_gap, gap)
    recurrent_hint = rec_gap is not None and rec_gap < Fraction(1, 64)

    q_shortcut = None
    if kd is not None:
        qa = q_asymptotics(list(kd.Q))
        if qa.to_infinity.is_positive:
            q_shortcut = "kneading-map-divergence-implies-persistent"

    per_eps = {}
    for eps in eps_grid:
        eps = Fraction(eps)
        best_len, best_n = 0, None
        for n in range(length_target, horizon + 1):
            center = orbit.value(n + 1)
            ball = (Scalar.exact(max(Fraction(0), center.lo - eps)),
                    Scalar.exact(min(Fraction(1), center.hi + eps)))
            segment = [orbit.value(n + 1 - k) for k in range(0, n + 1)]
            chain = pull_back(ball, segment, slope, stop_on_nonmonotone=True,
                              prec_cap=prec_cap)
            if chain.monotone_prefix > best_len:
                best_len, best_n = chain.monotone_prefix, n
            if best_len >= length_target:
                break
        per_eps[str(eps)] = {"max_monotone": best_len, "at_n": best_n}
        if best_len >= length_target:
            return V.evidence(
                RULE_PERSISTENCE, depth=horizon, epsilon=eps,
                kind="reluctant", length=best_len, segment_end=best_n,
                recurrent_within_horizon=recurrent_hint,
                min_return_gap=V.approx(rec_gap), q_shortcut=q_shortcut)
    return V.evidence(RULE_PERSISTENCE, depth=horizon, kind="persistent",
                      per_eps=per_eps, recurrent_within_horizon=recurrent_hint,
                      min_return_gap=V.approx(rec_gap), q_shortcut=q_shortcut)


# -- combined classification -----------------------------------------------------

@dataclass
class PointClassification:
    folding: V.Verdict
    endpoint: V.Verdict
    arc: Optional[ArcInterval]
    subclass_flags: tuple
    expectations: dict

    def to_json(self):
        return {
            "folding": self.folding.to_json(),
            "endpoint": self.endpoint.to_json(),
            "arc": self.arc.to_json() if self.arc is not None else None,
            "subclass_flags": list(self.subclass_flags),
            "expectations": {k: (v.to_json() if isinstance(v, V.Verdict) else v)
                             for k, v in sorted(self.expectations.items())},
        }


def classification_report(it: TwoSidedItinerary, nu: KneadingPrefix,
                          slope: Optional[SlopeParam] = None,
                          kd: Optional[CuttingData] = None,
                          depth: int = 64, eps=Fraction(1, 1 << 20),
                          position: Optional[str] = None,
                          persistence: Optional[V.Verdict] = None,
                          orbit: Optional[OrbitTable] = None,
                          prec_cap: int = DEFAULT_PREC_CAP) -> PointClassification:
    """Combine folding/endpoint verdicts with the global dichotomies.

    Expectations reported: persistent-recurrence evidence makes the folding
    and endpoint sets expected to coincide; a divergent kneading map makes
    every folding arc degenerate; a non-divergent one yields a witness search
    for a folding point inside a non-degenerate arc (tails ...111 nu_1..nu_{n-1}
    projecting onto long tower levels).
    """
    kd = kd or cutting_data(nu)
    endpoint = endpoint_verdict(it, nu, depth=depth, position=position,
                                prec_cap=prec_cap)
    if slope is not None and orbit is None:
        orbit = OrbitTable(slope, prec_cap)
    if slope is not None:
        try:
            folding = folding_verdict(it, slope, nu, depth=depth, eps=eps,
                                      orbit=orbit, prec_cap=prec_cap)
        except (DomainError, UnrealizableWord) as exc:
            folding = V.undetermined(RULE_FOLDING, str(exc), depth=depth)
    else:
        folding = V.undetermined(RULE_FOLDING, "no slope given", depth=depth)
    if endpoint.is_positive and folding.is_refuted:
        endpoint = V.refuted(RULE_ENDPOINT, depth=depth,
                             reason="endpoints are folding points; folding refuted")

    arc = None
    if orbit is not None:
        td = tau_data(it.backward, nu, depth)
        arc = basic_arc_interval(td, orbit, kd=kd, mode="core",
                                 prec_cap=prec_cap)

    qa = q_asymptotics(list(kd.Q))
    if persistence is not None and persistence.witness.get("kind") == "persistent":
        f_is_e = V.evidence(RULE_CLASS, depth=kd.horizon,
                            via="persistent-recurrence-evidence")
    elif persistence is not None and persistence.witness.get("kind") == "reluctant":
        f_is_e = V.refuted(RULE_CLASS, depth=kd.horizon,
                           via="reluctant-recurrence-witness")
    else:
        f_is_e = qa.to_infinity

    if qa.to_infinity.is_positive:
        nondeg = V.refuted(RULE_CLASS, depth=kd.horizon,
                           via="divergent-kneading-map")
    elif qa.to_infinity.is_refuted and slope is not None:
        witness = None
        levels = tower_levels(kd, slope, min(kd.horizon, 4 * depth),
                              orbit=orbit, prec_cap=prec_cap)
        for lv in levels[2:]:
            if lv.length is not None and lv.length.lo > Fraction(1, 128):
                w = BackwardWord("111" + nu.bits[:lv.n - 1])
                t = tau_data(w, nu)
                if t.tauL and t.tauR and max(t.tauL, t.tauR) == lv.n:
                    witness = {"n": lv.n, "tail": "...111" + nu.bits[:lv.n - 1]}
                    break
        nondeg = V.evidence(RULE_CLASS, depth=depth, witness_arc=witness) \
            if witness else V.undetermined(RULE_CLASS,
                                           "no long-level witness found",
                                           depth=depth)
    else:
        nondeg = V.undetermined(RULE_CLASS, "kneading-map trend unclear",
                                depth=kd.horizon)
    expectations = {
        "folding_set_equals_endpoints": f_is_e,
        "all_folding_arcs_degenerate": qa.to_infinity,
        "exists_nondegenerate_folding_arc": nondeg,
    }

    flags = []
    if arc is not None and arc.degenerate_width is not None:
        flags.append("degenerate-arc-evidence")
        if endpoint.is_positive:
            flags.append("degenerate-endpoint-candidate")
    if arc is not None and arc.exact and endpoint.is_positive:
        flags.append("flat-candidate")
    if folding.is_positive and endpoint.is_refuted:
        flags.append("non-end-folding")
    return PointClassification(folding, endpoint, arc, tuple(flags), expectations)
