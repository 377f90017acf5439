"""Subcontinuum chains: direct spirals, basic sin(1/x)-continua, cascades.

A chain of critical projections is an increasing sequence (k_i) of cutting
indices such that consecutive levels pull back monotonically: the strict
condition is

    Q(k_i) = k_{i-1}   and   Q(Q(k_i - 1) + 1) < k_{i-1} - 1,

the relaxed variant replaces the equality by
``Q(Q(k_i-1)+1) < k_{i-1}-1 < Q(k_i)``.  Along a chain one chooses points
a_i inside the open precritical cell of index k_i - 1 so that T^{S_{k_i-1}}
maps [c, a_i] monotonically onto [c_{S_{k_i-1}}, a_{i-1}]; the nested levels
then assemble into a subcontinuum which is a direct spiral when
Q(k_i + 1) -> oo (the central tower levels shrink to a point) and a basic
sin(1/x)-continuum when Q(k_i + 1) stays bounded along a subsequence (the
levels' intersection is the bar).  A separate symbolic rule detects
renormalization cascades: a window k with Q(k + j) >= k - 1 for all j is a
renormalization of period S_{k-1}, and a deep nest of such windows is the
signature of the infinitely renormalizable case in which every folding
point is an endpoint with a degenerate arc-component.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import verdicts as V
from .errors import ConditionViolated, DomainError, UnresolvedComparison
from .hofbauer import OrbitTable, PrecriticalTable
from .kneading import CuttingData, renorm_scan
from .scalars import (C, DEFAULT_PREC_CAP, Scalar, SlopeParam, certified_cmp,
                      s_one_minus, tent_apply)

RULE_CHAIN = "critical-projection-chain-search"
RULE_BUILD = "chain-level-construction"
RULE_CLASSIFY = "chain-shrinkage-classification"
RULE_NASTY = "renormalization-cascade-rule"

STRICT = "strict"
RELAXED = "relaxed"


def _materialize(q, upto):
    if callable(q):
        return [q(k) for k in range(1, upto + 1)]
    return list(q[:upto])


def _satisfies(qs, variant, k_prev, k):
    """The chain step condition from k_prev to k (1-based Q list)."""
    def q_of(j):
        if j == 0:
            return 0
        return qs[j - 1] if 1 <= j <= len(qs) else None

    qk = q_of(k)
    inner = q_of(q_of(k - 1) + 1) if q_of(k - 1) is not None else None
    if qk is None or inner is None:
        return False
    if variant == STRICT:
        return qk == k_prev and inner < k_prev - 1
    if variant == RELAXED:
        return inner < k_prev - 1 < qk
    raise DomainError(f"unknown chain variant {variant!r}")


def find_qcond_chains(q, horizon: int, variant: str = STRICT,
                      min_len: int = 2, max_chains: int = 64):
    """All maximal chain prefixes within the horizon, plus the greedy chain.

    The greedy chain follows the recursion k_i = min{ k : Q(k) > k_{i-1}-1 }
    (which satisfies the relaxed condition whenever Q(k) <= k - 2 holds on
    the tail); it is reported separately even when shorter than ``min_len``.
    """
    qs = _materialize(q, horizon)
    m = len(qs)

    succ = {}
    for k_prev in range(1, m + 1):
        succ[k_prev] = [k for k in range(k_prev + 1, m + 1)
                        if _satisfies(qs, variant, k_prev, k)]

    chains = []
    seen_prefix = set()

    def extend(chain):
        if len(chains) >= max_chains:
            return
        nexts = succ.get(chain[-1], [])
        if not nexts:
            if len(chain) >= min_len and chain not in seen_prefix:
                seen_prefix.add(chain)
                chains.append(chain)
            return
        for k in nexts:
            extend(chain + (k,))

    starts = sorted({k for k in range(1, m + 1)
                     if succ[k] and not any(k in s for s in succ.values())})
    for k0 in starts or range(1, m + 1):
        extend((k0,))
    chains.sort()

    greedy = []
    k_prev = None
    for k in range(1, m + 1):
        if k_prev is None:
            if qs[k - 1] > 0:
                greedy.append(k)
                k_prev = k
        elif qs[k - 1] > k_prev - 1:
            greedy.append(k)
            k_prev = k
    return {"variant": variant, "chains": chains, "greedy": tuple(greedy),
            "horizon": m}


@dataclass
class ChainLevel:
    i: int
    k: int
    n: int
    cell: int                       # a_i lies in Upsilon_{cell} (open)
    a: Scalar
    side: str
    image_onto: bool                # T^{S_{k-1}}([c, a_i]) = [c_{S_{k-1}}, a_{i-1}]
    l_image_avoids_c: Optional[bool] = None

    def to_json(self):
        return {"i": self.i, "k": self.k, "n": self.n, "cell": self.cell,
                "a": self.a.to_json(), "side": self.side,
                "image_onto": self.image_onto,
                "l_image_avoids_c": self.l_image_avoids_c}


@dataclass
class CriticalProjectionChain:
    k_seq: tuple
    n_seq: tuple
    levels: list
    variant: str

    def to_json(self):
        return {"k_seq": list(self.k_seq), "n_seq": list(self.n_seq),
                "variant": self.variant,
                "levels": [lv.to_json() for lv in self.levels]}


def _monotone_branch_image(slope, zp, m, x, prec_cap):
    """T^{S_m} of a point in the cell piece of index m (exact iterate)."""
    y = x
    for _ in range(zp.kd.S[m]):
        y = tent_apply(slope, y)
    return y


def _bisect_preimage(slope, zp, m, target, side, bits, prec_cap):
    """Point a in the open piece of Upsilon_m with T^{S_m}(a) = target.

    T^{S_m} is monotone on each piece; certified bisection on the piece.
    """
    lo = zp.boundary(m - 1) if m >= 1 else zp.pair(-1).z
    hi = zp.boundary(m)
    if side == "right":
        lo, hi = s_one_minus(hi), s_one_minus(lo)
    a, b = lo.hi, hi.lo                     # inner dyadic-ish bracket
    fa = _monotone_branch_image(slope, zp, m, Scalar.exact(a), prec_cap)
    fb = _monotone_branch_image(slope, zp, m, Scalar.exact(b), prec_cap)
    try:
        increasing = certified_cmp(fa, fb, prec_cap) < 0
        lo_v, hi_v = (fa, fb) if increasing else (fb, fa)
        if not (certified_cmp(target, lo_v, prec_cap) > 0
                and certified_cmp(target, hi_v, prec_cap) < 0):
            raise ConditionViolated(
                m, "target not inside the branch image of the cell piece")
    except UnresolvedComparison:
        raise ConditionViolated(m, "branch image comparison unresolved")
    for _ in range(bits):
        mid = (a + b) / 2
        fm = _monotone_branch_image(slope, zp, m, Scalar.exact(mid), prec_cap)
        try:
            cmp = certified_cmp(fm, target, prec_cap)
        except UnresolvedComparison:
            break
        if cmp == 0:
            return Scalar.exact(mid)
        if (cmp < 0) == increasing:
            a = mid
        else:
            b = mid
    return Scalar(a, b)


def build_chain(slope: SlopeParam, k_seq: Sequence[int], zp: PrecriticalTable,
                variant: str = STRICT, side: str = "left",
                bisect_bits: int = 64,
                prec_cap: int = DEFAULT_PREC_CAP) -> CriticalProjectionChain:
    """Realize a chain numerically: certified a_i with monotone-onto levels.

    Aborts with ConditionViolated when the containment
    T^{S_{k_i - 1}}(open cell) contains a_{i-1} fails, which would falsify
    the verified chain condition (used as a self-test).
    """
    kd = zp.kd
    qs = list(kd.Q)
    k_seq = tuple(k_seq)
    if len(k_seq) < 2:
        raise DomainError("a chain needs at least two indices")
    for k_prev, k in zip(k_seq, k_seq[1:]):
        if not _satisfies(qs, variant, k_prev, k):
            raise ConditionViolated(
                k, f"chain condition ({variant}) fails at {k_prev} -> {k}")
    if variant == STRICT:
        n_seq = tuple(kd.S[k] for k in k_seq)
    else:
        n_seq = (0,) + tuple(
            sum(kd.S[k_seq[j] - 1] for j in range(1, i + 1))
            for i in range(1, len(k_seq)))

    # The branch image of the level-(i+1) cell lies between c_{S_{Q(k_{i+1}-1)}}
    # and c, on the side given by the kneading bit at S_{Q(k_{i+1}-1)}; a_i
    # must sit on that side so the next level can map onto it.  The last
    # level's side is the caller's free choice.
    nu_bits = kd.nu.bits
    sides = {}
    for i in range(1, len(k_seq)):
        sides[i] = side
    for i in range(1, len(k_seq) - 1):
        m_next = k_seq[i + 1] - 1
        s_val = kd.S[kd.q_of(m_next)]
        sides[i] = "right" if nu_bits[s_val - 1] == "1" else "left"

    levels = []
    orbit = zp.orbit
    # base level: a_1 free inside the open cell of index k_1 - 1
    m1 = k_seq[1] - 1
    lo = zp.boundary(m1 - 1) if m1 >= 1 else zp.pair(-1).z
    hi = zp.boundary(m1)
    a_prev = Scalar.exact((lo.hi + hi.lo) / 2)
    if sides[1] == "right":
        a_prev = s_one_minus(a_prev)
    levels.append(ChainLevel(1, k_seq[1], n_seq[1], m1, a_prev, sides[1], True))
    for i in range(2, len(k_seq)):
        m = k_seq[i] - 1
        a_i = _bisect_preimage(slope, zp, m, a_prev, sides[i], bisect_bits,
                               prec_cap)
        img = _monotone_branch_image(slope, zp, m, a_i, prec_cap)
        onto = img.overlaps(a_prev)
        l_avoid = None
        if variant == RELAXED and i + 1 < len(k_seq):
            # L_{n_i} = [c, c_{S_{k_{i+1}-1}}]; its S_{k_i-1} image must avoid c
            l_end = orbit.value(kd.S[k_seq[i + 1] - 1])
            l_set = Scalar(min(Fraction(C), l_end.lo), max(Fraction(C), l_end.hi))
            for _ in range(kd.S[m]):
                l_set = tent_apply(slope, l_set)
            l_avoid = not (l_set.lo < C < l_set.hi)
        levels.append(ChainLevel(i, k_seq[i], n_seq[i], m, a_i, sides[i], onto,
                                 l_avoid))
        if not onto:
            raise ConditionViolated(i, "level image does not meet a_{i-1}")
        a_prev = a_i
    return CriticalProjectionChain(k_seq, n_seq, levels, variant)


@dataclass(frozen=True)
class ChainClass:
    kind: str                       # direct-spiral | basic-sin-curve | undetermined
    verdict: V.Verdict
    bar_enclosure: Optional[tuple] = None

    def to_json(self):
        out = {"kind": self.kind, "verdict": self.verdict.to_json()}
        if self.bar_enclosure is not None:
            out["bar"] = {"lo": V.approx(self.bar_enclosure[0]),
                          "hi": V.approx(self.bar_enclosure[1])}
        return out


def classify_chain(k_seq: Sequence[int], q, horizon: Optional[int] = None,
                   kd: Optional[CuttingData] = None,
                   orbit: Optional[OrbitTable] = None,
                   min_levels: int = 3) -> ChainClass:
    """Direct spiral versus basic sin(1/x) from the tail of Q(k_i + 1).

    Divergence evidence of Q(k_i + 1) along the chain classifies a direct
    spiral (the central tower levels |D_{S_{k_i}}| shrink to a point); a
    bounded subsequence witness classifies a basic sin(1/x)-continuum, whose
    bar projection is enclosed by the intersection of the available levels.
    Chains shorter than ``min_levels`` stay undetermined.
    """
    k_seq = tuple(k_seq)
    if len(k_seq) < min_levels:
        return ChainClass("undetermined",
                          V.undetermined(RULE_CLASSIFY, "chain too short",
                                         depth=len(k_seq)))
    qs = _materialize(q, (max(k_seq) + 2) if callable(q) else 10 ** 9)
    vals = []
    for k in k_seq:
        if k + 1 <= len(qs):
            vals.append(qs[k])          # Q(k_i + 1), 1-based list
    if len(vals) < min_levels:
        return ChainClass("undetermined",
                          V.undetermined(RULE_CLASSIFY,
                                         "Q(k_i + 1) not available",
                                         depth=len(vals)))
    half = len(vals) // 2
    head, tail = vals[:half], vals[half:]
    decay = None
    if kd is not None and orbit is not None:
        lengths = []
        for k in k_seq:
            if k <= kd.max_k:
                n = kd.S[k]
                if n <= kd.horizon:
                    a = orbit.value(n)
                    b = orbit.value(kd.beta_of(n))
                    lengths.append(max(a.hi, b.hi) - min(a.lo, b.lo))
        if len(lengths) >= min_levels:
            decay = all(y < x for x, y in zip(lengths, lengths[1:]))
    if min(tail) > max(head) and vals[-1] >= vals[0] + len(vals) // 2:
        if decay is False:
            return ChainClass("undetermined", V.undetermined(
                RULE_CLASSIFY, "symbolic divergence but no numeric decay",
                depth=len(vals), q_values=vals))
        return ChainClass("direct-spiral",
                          V.evidence(RULE_CLASSIFY, depth=len(vals),
                                     q_values=vals, level_decay=decay))
    bound = max(head)
    witnesses = [k for k, v in zip(k_seq, vals) if v <= bound]
    if len([v for v in tail if v <= bound]) >= 1 and len(witnesses) >= 2:
        bar = None
        if kd is not None and orbit is not None:
            lo = hi = None
            for k in k_seq:
                if k <= kd.max_k and kd.S[k] <= kd.horizon:
                    n = kd.S[k]
                    a, b = orbit.value(n), orbit.value(kd.beta_of(n))
                    d_lo, d_hi = min(a.lo, b.lo), max(a.hi, b.hi)
                    lo = d_lo if lo is None else max(lo, d_lo)
                    hi = d_hi if hi is None else min(hi, d_hi)
            if lo is not None and lo <= hi:
                bar = (lo, hi)
        return ChainClass("basic-sin-curve",
                          V.evidence(RULE_CLASSIFY, depth=len(vals),
                                     q_values=vals, bounded_by=bound,
                                     witness_k=witnesses[:8]),
                          bar)
    return ChainClass("undetermined",
                      V.undetermined(RULE_CLASSIFY, "mixed Q(k_i+1) tail",
                                     depth=len(vals), q_values=vals))


def nasty_cascade_rule(q, horizon: int, cascade_min: int = 3) -> V.Verdict:
    """Symbolic rule for the infinitely renormalizable configuration.

    Evidence that every folding point is a nasty endpoint when the
    renormalization scan finds a nested cascade of at least ``cascade_min``
    windows; refuted(-leaning) when the scan refutes every candidate window;
    undetermined otherwise.  The witness reports the symbolic periods
    S_{k-1} of the cascade levels.
    """
    qs = _materialize(q, horizon)
    scan = renorm_scan(qs, horizon)
    passing = scan["passing"]
    S = [1]
    for k in range(1, len(qs) + 1):
        qk = qs[k - 1]
        if qk >= len(S):
            break
        S.append(S[-1] + S[qk])
    periods = [S[k - 1] for k in passing if k - 1 < len(S)]
    if len(passing) >= cascade_min:
        return V.evidence(RULE_NASTY, depth=horizon, cascade=passing,
                          periods=periods)
    if not passing:
        return V.refuted(RULE_NASTY, depth=horizon,
                         reason="every renormalization window refuted")
    return V.undetermined(RULE_NASTY, "shallow cascade", depth=horizon,
                          cascade=passing, periods=periods)
