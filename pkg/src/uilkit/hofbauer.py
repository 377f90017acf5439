"""Geometric realization of the Hofbauer tower for tent maps.

Tower levels follow the inductive definition D_1 = [c, c_1] and
D_{n+1} = [c_{n+1}, c_1] when c is in D_n, else T(D_n); the index form
D_n = [c_n, c_beta(n)] (with c_0 standing for c) is computed independently
from the cutting structure and cross-checked against the induction.

Closest precritical points z_k < c < zhat_k = 1 - z_k satisfy
T^{S_k}(z_k) = c with no earlier critical visit on [z_k, zhat_k]; they are
obtained exactly by composing inverse branches along the kneading symbols.
The cells

    Upsilon_k = [z_{k-1}, z_k) u (zhat_k, zhat_{k-1}]

partition the core minus c (with zhat_{-1} = c_1, z_{-1} = c_2, and the
z_0 = c_2 adjustment when the first return above c happens at time 3), and
drive both the membership test for critical values and the accelerated map
F(y) = T^{S_k}(y) on Upsilon_k, which satisfies F(c_{S_k}) = c_{S_{k+1}}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import verdicts as V
from .errors import (DomainError, InternalInconsistency, PrecisionExhausted,
                     UnresolvedComparison)
from .kneading import CuttingData, cutting_data, nu_from_orbit, q_asymptotics
from .scalars import (C, DEFAULT_PREC_CAP, Scalar, SignRelC, SlopeParam,
                      branch_preimage_left, branch_preimage_right, certified_cmp,
                      critical_orbit, s_one_minus, sign_rel_c, tent_apply)

RULE_ZZZ = "critical-value-in-precritical-cell"
RULE_LONGBRANCH = "tower-level-length-trend"
RULE_DENSITY = "cutting-value-gap-scan"
RULE_TOWER = "tower-index-vs-induction"


class OrbitTable:
    """Lazily extended certified critical orbit c_0 = c, c_1, c_2, ..."""

    def __init__(self, slope: SlopeParam, prec_cap: int = DEFAULT_PREC_CAP):
        self.slope = slope
        self.prec_cap = prec_cap
        self._values = [Scalar.exact(C)]

    def extend(self, n: int):
        if n < len(self._values):
            return
        fresh = critical_orbit(self.slope, n, prec_cap=self.prec_cap,
                               allow_unresolved=True)
        self._values = [Scalar.exact(C)] + [x for x, _ in fresh]

    def value(self, n: int) -> Scalar:
        """c_n, with c_0 = c."""
        if n < 0:
            raise DomainError("orbit index must be >= 0")
        self.extend(n)
        return self._values[n]

    def sign(self, n: int) -> SignRelC:
        return sign_rel_c(self.value(n))


def _hull(a: Scalar, b: Scalar) -> Scalar:
    return Scalar(min(a.lo, b.lo), max(a.hi, b.hi),
                  min(a.precision_bits, b.precision_bits))


@dataclass(frozen=True)
class TowerLevel:
    n: int
    beta_n: int                       # 0 stands for the critical point c
    numeric: Optional[tuple] = None   # (Scalar low end, Scalar high end)
    length: Optional[Scalar] = None
    contains_c: bool = False

    @property
    def endpoint_indices(self):
        return (self.n, self.beta_n)

    def to_json(self):
        out = {"n": self.n, "beta": self.beta_n, "is_cutting": self.contains_c}
        if self.numeric is not None:
            out["lo"] = self.numeric[0].to_json()
            out["hi"] = self.numeric[1].to_json()
        return out


def tower_levels(kd: CuttingData, slope: Optional[SlopeParam] = None,
                 N: Optional[int] = None,
                 orbit: Optional[OrbitTable] = None,
                 prec_cap: int = DEFAULT_PREC_CAP):
    """Tower levels D_1 .. D_N with the induction cross-checked numerically.

    Without a slope only the index form is produced.  With one, the two
    computations of every level must agree (exactly for exact slopes,
    overlapping enclosures otherwise) or InternalInconsistency is raised.
    """
    N = N or kd.horizon
    if N > kd.horizon:
        raise DomainError("tower depth exceeds the kneading horizon")
    cuts = set(kd.S)
    levels = []
    if slope is None:
        for n in range(1, N + 1):
            levels.append(TowerLevel(n, kd.beta_of(n), contains_c=n in cuts))
        return levels

    orbit = orbit or OrbitTable(slope, prec_cap)
    orbit.extend(N)
    c1 = orbit.value(1)
    # The inductive level is carried as its two endpoint values; away from
    # cutting times c is outside the level, so T maps endpoints to endpoints.
    end_a, end_b = Scalar.exact(C), c1          # D_1 = [c, c_1]
    for n in range(1, N + 1):
        lo_idx = orbit.value(n)
        hi_idx = orbit.value(kd.beta_of(n))
        index_form = _hull(lo_idx, hi_idx)
        inductive = _hull(end_a, end_b)
        if index_form.lo > inductive.hi or inductive.lo > index_form.hi or (
                slope.is_exact and (index_form.lo != inductive.lo
                                    or index_form.hi != inductive.hi)):
            raise InternalInconsistency(
                f"tower level {n}: index form [{index_form.lo}, {index_form.hi}] "
                f"!= induction [{inductive.lo}, {inductive.hi}]")
        length = Scalar(max(Fraction(0), index_form.width() - lo_idx.width()
                            - hi_idx.width()),
                        index_form.width())
        levels.append(TowerLevel(n, kd.beta_of(n), (index_form, inductive),
                                 length, n in cuts))
        if n in cuts:
            end_a, end_b = orbit.value(n + 1) if n < N else \
                tent_apply(slope, lo_idx), c1
        else:
            end_a, end_b = tent_apply(slope, end_a), tent_apply(slope, end_b)
    return levels


def tower_level(kd: CuttingData, n: int, slope: Optional[SlopeParam] = None,
                prec_cap: int = DEFAULT_PREC_CAP) -> TowerLevel:
    return tower_levels(kd, slope, n, prec_cap=prec_cap)[n - 1]


@dataclass(frozen=True)
class PrecriticalPair:
    """z_k and zhat_k = 1 - z_k, with the conventions for k = -1 and kappa = 3.

    ``z_natural`` is the genuine closest precritical point (T^{S_k} maps it to
    c); ``z`` is the cell-boundary convention value, which differs from the
    natural point only for k = 0 when kappa = 3 (then z is clamped to c_2).
    """

    k: int
    z: Scalar
    zhat: Scalar
    z_natural: Scalar
    flags: tuple = ()

    def to_json(self):
        return {"k": self.k, "z": self.z.to_json(), "zhat": self.zhat.to_json(),
                "flags": list(self.flags)}


class PrecriticalTable:
    """Certified closest precritical points for a slope, lazily extended.

    z_k is computed by inverting the monotone branch of T^{S_{k-1}} on
    [z_{k-1}, c]: the inverse composes branch preimages along the kneading
    symbols and finishes with the increasing branch.  The image endpoint used
    is whichever of z_{Q(k)}, zhat_{Q(k)} lies between c and c_{S_{k-1}}, read
    off from the kneading bit at S_{k-1}.
    """

    def __init__(self, slope: SlopeParam, kd: CuttingData,
                 orbit: Optional[OrbitTable] = None,
                 prec_cap: int = DEFAULT_PREC_CAP):
        self.slope = slope
        self.kd = kd
        self.orbit = orbit or OrbitTable(slope, prec_cap)
        self.prec_cap = prec_cap
        self._natural = [branch_preimage_left(slope, Scalar.exact(C))]

    @property
    def max_k(self) -> int:
        return self.kd.max_k

    def natural(self, k: int) -> Scalar:
        if k < 0:
            raise DomainError("natural precritical index must be >= 0")
        if k > self.kd.max_k:
            raise DomainError(
                f"z_{k} needs cutting data to S_{k} (have {self.kd.max_k})")
        nu = self.kd.nu.bits
        while len(self._natural) <= k:
            j = len(self._natural)
            s_prev = self.kd.S[j - 1]
            q = self.kd.q_of(j)
            side_bit = nu[s_prev - 1]
            w = self.hat_natural(q) if side_bit == "1" else self.natural(q)
            y = w
            for i in range(s_prev - 1, 0, -1):
                if nu[i - 1] == "0":
                    y = branch_preimage_left(self.slope, y)
                else:
                    y = branch_preimage_right(self.slope, y)
            self._natural.append(branch_preimage_left(self.slope, y))
        return self._natural[k]

    def hat_natural(self, k: int) -> Scalar:
        return s_one_minus(self.natural(k))

    def pair(self, k: int) -> PrecriticalPair:
        if k == -1:
            c2 = self.orbit.value(2)
            return PrecriticalPair(-1, c2, self.orbit.value(1), c2,
                                   ("boundary-convention",))
        z = self.natural(k)
        if k == 0 and self.kd.kappa == 3:
            # only the left boundary is clamped into the core; the hat point
            # keeps its dynamical meaning T(zhat_0) = c
            z_adj = self.orbit.value(2)
            return PrecriticalPair(0, z_adj, s_one_minus(z), z,
                                   ("kappa3-clamped-to-c2",))
        return PrecriticalPair(k, z, s_one_minus(z), z, ())

    def boundary(self, k: int) -> Scalar:
        """Left cell-boundary value of z_k (conventions included)."""
        return self.pair(k).z

    def boundary_hat(self, k: int) -> Scalar:
        """Right cell-boundary value zhat_k (c_1 for k = -1)."""
        return self.pair(k).zhat


def closest_precriticals(slope: SlopeParam, upto_k: int,
                         kd: Optional[CuttingData] = None,
                         prec_cap: int = DEFAULT_PREC_CAP):
    """Certified pairs (z_k, zhat_k) for k = 0 .. upto_k."""
    if kd is None:
        depth = 4
        while True:
            nu = nu_from_orbit(slope, depth, prec_cap)
            kd = cutting_data(nu)
            if kd.max_k >= upto_k:
                break
            depth *= 2
    table = PrecriticalTable(slope, kd, prec_cap=prec_cap)
    return [table.pair(k) for k in range(0, upto_k + 1)]


def upsilon_index(slope: SlopeParam, x: Scalar, zp: PrecriticalTable,
                  prec_cap: int = DEFAULT_PREC_CAP) -> int:
    """The unique k with x in Upsilon_k, certified by comparisons against z_k.

    Raises UnresolvedComparison when the enclosure of x straddles a cell
    boundary at the precision cap, and DomainError when x is not certified
    inside the core minus the critical point.
    """
    c2 = zp.orbit.value(2)
    c1 = zp.orbit.value(1)
    try:
        if certified_cmp(x, c2, prec_cap) < 0 or certified_cmp(x, c1, prec_cap) > 0:
            raise DomainError("x not certified inside the core [c_2, c_1]")
    except UnresolvedComparison:
        # equality with a core endpoint is fine; being outside is not
        if x.lo < c2.lo or x.hi > c1.hi:
            raise DomainError("x not certified inside the core [c_2, c_1]")
    sign = sign_rel_c(x)
    if sign is SignRelC.AT_C:
        raise DomainError("x = c has no cell")
    if sign is SignRelC.UNRESOLVED:
        raise UnresolvedComparison("x straddles the critical point")
    # cells are walked on each side separately: the kappa = 3 clamp makes
    # the left and right boundary ladders asymmetric
    k = 0
    while True:
        if k > zp.max_k:
            raise PrecisionExhausted(
                f"x closer to c than z_{zp.max_k}; extend the kneading horizon")
        if sign is SignRelC.BELOW:
            if certified_cmp(x, zp.boundary(k), prec_cap) < 0:
                return k            # x in [z_{k-1}, z_k)
        else:
            if certified_cmp(x, zp.boundary_hat(k), prec_cap) > 0:
                return k            # x in (zhat_k, zhat_{k-1}]
        k += 1


def f_apply(slope: SlopeParam, y: Scalar, zp: PrecriticalTable,
            prec_cap: int = DEFAULT_PREC_CAP):
    """The accelerated map F(y) = T^{S_k}(y) for y in Upsilon_k.

    Returns (F(y), k).  Unresolved cell membership propagates from
    upsilon_index.
    """
    k = upsilon_index(slope, y, zp, prec_cap)
    out = y
    for _ in range(zp.kd.S[k]):
        out = tent_apply(slope, out)
    return out, k


def verify_zzz(slope: SlopeParam, k: int, zp: PrecriticalTable,
               prec_cap: int = DEFAULT_PREC_CAP) -> V.Verdict:
    """Check that c_{S_k} sits in the interior of Upsilon_{Q(k+1)} (k >= 2).

    For k = 0 and k = 1 the membership is on the boundary: c_1 = zhat_{-1}
    and c_2 equals the left cell edge (z_{-1}, or the clamped z_0 when
    kappa = 3).
    """
    kd = zp.kd
    if k + 1 > kd.max_k:
        raise DomainError(f"need cutting data to S_{k + 1}")
    q = kd.q_of(k + 1)
    val = zp.orbit.value(kd.S[k])
    if k >= 2:
        # cell boundaries per side: conventions at -1 and the kappa = 3 clamp
        # make the ladders asymmetric
        lo = zp.boundary(q - 1)
        hi = zp.boundary(q)
        lo_hat = zp.boundary_hat(q)
        hi_hat = zp.boundary_hat(q - 1)

        def strictly_inside(a, b):
            try:
                return certified_cmp(val, a, prec_cap) > 0 and \
                    certified_cmp(val, b, prec_cap) < 0
            except UnresolvedComparison:
                return None

        in_left = strictly_inside(lo, hi)
        in_right = strictly_inside(lo_hat, hi_hat)
        if in_left or in_right:
            return V.certified(RULE_ZZZ, depth=k, k=k, q=q,
                               side="left" if in_left else "right")
        if in_left is None or in_right is None:
            return V.undetermined(RULE_ZZZ, "cell comparison unresolved",
                                  depth=k, k=k, q=q)
        return V.refuted(RULE_ZZZ, depth=k, k=k, q=q)
    # boundary cases
    edge = zp.orbit.value(1) if k == 0 else zp.orbit.value(2)
    if slope.is_exact and val.is_exact and edge.is_exact:
        if val.lo == edge.lo:
            return V.certified(RULE_ZZZ, depth=k, k=k, q=q, boundary=True)
        return V.refuted(RULE_ZZZ, depth=k, k=k, q=q, boundary=True)
    if val.overlaps(edge):
        return V.evidence(RULE_ZZZ, depth=k, k=k, q=q, boundary=True)
    return V.refuted(RULE_ZZZ, depth=k, k=k, q=q, boundary=True)


def long_branched_evidence(kd: CuttingData, N: Optional[int] = None,
                           slope: Optional[SlopeParam] = None,
                           threshold=Fraction(1, 1 << 16),
                           prec_cap: int = DEFAULT_PREC_CAP) -> V.Verdict:
    """Finite-horizon verdict for inf_n |D_n| > 0.

    Refuted-style evidence (status ``refuted``) when the minimum level length
    decays below the threshold with a decreasing trend; evidence when the
    kneading map shows bounded evidence or the minimum is stable above the
    threshold.  The witness always carries min |D_n| and its argmin when a
    slope is available.
    """
    N = N or kd.horizon
    qa = q_asymptotics(list(kd.Q))
    witness = {"q_bounded": qa.bounded.status, "q_max": qa.max_value}
    if slope is not None:
        levels = tower_levels(kd, slope, N, prec_cap=prec_cap)
        lengths = [(lv.length.hi, lv.n) for lv in levels]
        min_len, argmin = min(lengths)
        half = [l for l, n in lengths if n > N // 2]
        first_half = [l for l, n in lengths if n <= N // 2]
        decreasing = min(half) < min(first_half) if half and first_half else False
        witness.update(min_length=V.approx(min_len), argmin=argmin,
                       decreasing=decreasing)
        if min_len < threshold and decreasing and not qa.bounded.is_positive:
            return V.refuted(RULE_LONGBRANCH, depth=N,
                             epsilon=Fraction(threshold), **witness)
    if qa.bounded.is_positive:
        return V.evidence(RULE_LONGBRANCH, depth=N, **witness)
    if slope is not None and witness.get("decreasing") is False:
        return V.evidence(RULE_LONGBRANCH, depth=N, **witness)
    if slope is None and qa.to_infinity.is_positive:
        return V.refuted(RULE_LONGBRANCH, depth=N, **witness)
    return V.undetermined(RULE_LONGBRANCH, "no stable trend", depth=N, **witness)


def cutting_value_gaps(slope: SlopeParam, K: int, eps,
                       kd: Optional[CuttingData] = None,
                       prec_cap: int = DEFAULT_PREC_CAP):
    """Largest gap in {c_{S_k} : k <= K} (plus core endpoints), and the
    sub-report restricted to k with Q(k) <= 1.

    The verdict is about eps-density at this horizon only.
    """
    eps = Fraction(eps)
    if kd is None:
        depth = 64
        while True:
            kd = cutting_data(nu_from_orbit(slope, depth, prec_cap))
            if kd.max_k >= K:
                break
            depth *= 2
    if kd.max_k < K:
        raise DomainError(f"cutting data only reaches S_{kd.max_k}")
    orbit = OrbitTable(slope, prec_cap)

    def gap_report(ks):
        pts = [(orbit.value(kd.S[k]), kd.S[k]) for k in ks]
        pts.append((orbit.value(1), 1))
        pts.append((orbit.value(2), 2))
        try:
            pts.sort(key=lambda p: p[0].lo)
            rows = []
            worst = (Fraction(0), None)
            for (a, na), (b, nb) in zip(pts, pts[1:]):
                gap = b.hi - a.lo          # outer estimate of the gap
                rows.append({"from_n": na, "to_n": nb, "gap_hi": V.approx(gap)})
                if gap > worst[0]:
                    worst = (gap, (na, nb))
            return rows, worst
        except UnresolvedComparison:
            raise PrecisionExhausted("cutting values not separable")

    all_rows, (max_gap, max_pair) = gap_report(range(0, K + 1))
    small_ks = [k for k in range(0, K + 1) if kd.q_of(k) <= 1]
    small_rows, (small_gap, small_pair) = gap_report(small_ks)
    dense = max_gap <= eps
    verdict = V.evidence(RULE_DENSITY, depth=K, epsilon=eps,
                         max_gap=V.approx(max_gap), pair=max_pair) if dense else \
        V.refuted(RULE_DENSITY, depth=K, epsilon=eps,
                  max_gap=V.approx(max_gap), pair=max_pair)
    return {
        "K": K,
        "eps": V.approx(eps),
        "max_gap": max_gap,
        "max_gap_pair": max_pair,
        "rows": all_rows,
        "restricted_q_le_1": {"ks": small_ks, "max_gap": small_gap,
                              "pair": small_pair, "rows": small_rows},
        "eps_dense_at_horizon": verdict,
    }


def f_graph_data(slope: SlopeParam, zp: PrecriticalTable, grid: int = 256,
                 max_cell: int = 8, prec_cap: int = DEFAULT_PREC_CAP):
    """Sample rows (x_lo, x_hi, F_lo, F_hi, cell_k) for plotting Eq-style
    graphs of the accelerated map; cell-aware so each branch piece shows its
    affine structure (at least 3 interior points per piece)."""
    c2 = zp.orbit.value(2)
    c1 = zp.orbit.value(1)
    samples = []
    for k in range(0, max_cell + 1):
        if k > zp.max_k:
            break
        lo = zp.boundary(k - 1) if k >= 1 else zp.pair(-1).z
        hi = zp.boundary(k)
        if not lo.certainly_lt(hi):
            continue
        for i in (1, 2, 3):
            t = Fraction(i, 4)
            pt = Scalar.exact(lo.hi + (hi.lo - lo.hi) * t)
            samples.append(pt)
            samples.append(s_one_minus(pt))
    lo_f, hi_f = c2.hi, c1.lo
    for i in range(1, grid):
        samples.append(Scalar.exact(lo_f + (hi_f - lo_f) * Fraction(i, grid)))
    rows = []
    for x in samples:
        try:
            y, k = f_apply(slope, x, zp, prec_cap)
        except (UnresolvedComparison, DomainError, PrecisionExhausted):
            continue
        rows.append((x.lo, x.hi, y.lo, y.hi, k))
    rows.sort(key=lambda r: (r[0], r[4]))
    return rows
