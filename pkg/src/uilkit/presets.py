"""Named slope presets and input parsing helpers.

Two kinds of presets:

* algebraic roots (``golden``, ``tribonacci``) given as certified interval
  enclosures with a sign-bisection refinement rule on the minimal
  polynomial.  Both have finite critical orbits (the critical point returns
  exactly after 3 resp. 4 steps), so they exercise exact-hit handling;
* kneading-matched rationals (``fib``, ``ex35``, ``nonrec41``, ``appendix``)
  found by bisection against a target kneading word to a requested depth.
  They are exact rationals certified to reproduce the target combinatorics
  for that many symbols, which is what every finite-horizon computation
  needs.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError
from .kneading import example35_q, fibonacci_q, nonrecurrent_example_nu, \
    nu_from_q
from .scalars import Scalar, SlopeParam, slope_exact, slope_for_prefix

DEFAULT_PRESET_DEPTH = 200


def _poly_root_enclosure(coeffs, lo, hi, bits):
    """Sign bisection for a polynomial with a single root in [lo, hi]."""
    def p(x):
        acc = Fraction(0)
        for c in coeffs:
            acc = acc * x + c
        return acc

    lo, hi = Fraction(lo), Fraction(hi)
    neg_lo = p(lo) < 0
    width = Fraction(1, 1 << bits)
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = p(mid)
        if v == 0:
            return Scalar(mid, mid)
        if (v < 0) == neg_lo:
            lo = mid
        else:
            hi = mid
    return Scalar(lo, hi, bits)


def golden_slope(bits: int = 128) -> SlopeParam:
    """Root of x^2 - x - 1: the critical point is 3-periodic."""
    def recompute(p):
        return _poly_root_enclosure([1, -1, -1], Fraction(3, 2), Fraction(7, 4), p)

    s = recompute(bits)
    s.recompute = recompute
    return SlopeParam(s, "golden")


def tribonacci_slope(bits: int = 128) -> SlopeParam:
    """Root of x^3 - x^2 - x - 1: the critical point is 4-periodic."""
    def recompute(p):
        return _poly_root_enclosure([1, -1, -1, -1], Fraction(7, 4),
                                    Fraction(15, 8), p)

    s = recompute(bits)
    s.recompute = recompute
    return SlopeParam(s, "tribonacci")


def sqrt3_slope(bits: int = 192) -> SlopeParam:
    """Root of x^2 - 3: a generic algebraic slope with infinite orbit."""
    def recompute(p):
        return _poly_root_enclosure([1, 0, -3], Fraction(3, 2), Fraction(15, 8), p)

    s = recompute(bits)
    s.recompute = recompute
    return SlopeParam(s, "sqrt3")


def cbrt6_slope(bits: int = 192) -> SlopeParam:
    """Root of x^3 - 6: a generic algebraic slope with infinite orbit."""
    def recompute(p):
        return _poly_root_enclosure([1, 0, 0, -6], Fraction(3, 2),
                                    Fraction(15, 8), p)

    s = recompute(bits)
    s.recompute = recompute
    return SlopeParam(s, "cbrt6")


def fibonacci_slope(depth: int = DEFAULT_PRESET_DEPTH) -> SlopeParam:
    target = nu_from_q(fibonacci_q, depth)
    return slope_for_prefix(target.bits, name="fib")


def example35_slope(depth: int = DEFAULT_PRESET_DEPTH) -> SlopeParam:
    target = nu_from_q(example35_q, depth)
    return slope_for_prefix(target.bits, name="ex35")


def nonrecurrent_slope(depth: int = DEFAULT_PRESET_DEPTH) -> SlopeParam:
    target = nonrecurrent_example_nu(depth)
    return slope_for_prefix(target.bits, name="nonrec41")


def appendix_slope(depth: int = DEFAULT_PRESET_DEPTH) -> SlopeParam:
    from .seqgen import generate
    nu, _, _ = generate(max(depth, 7))
    return slope_for_prefix(nu.bits[:depth], name="appendix")


_KNEADING_PRESETS = {
    "fib": fibonacci_slope,
    "fibonacci": fibonacci_slope,
    "ex35": example35_slope,
    "nonrec41": nonrecurrent_slope,
    "appendix": appendix_slope,
}

_ALGEBRAIC_PRESETS = {
    "golden": golden_slope,
    "tribonacci": tribonacci_slope,
    "trib": tribonacci_slope,
    "sqrt3": sqrt3_slope,
    "cbrt6": cbrt6_slope,
}


def parse_slope(text: str, depth: int = DEFAULT_PRESET_DEPTH) -> SlopeParam:
    """Slope inputs: exact rationals/decimals, intervals, or preset names.

    ``1.84``, ``9/5``, ``fib``, ``fib:300`` (preset to a depth),
    ``interval:1.79,1.80``.
    """
    text = text.strip()
    if ":" in text:
        head, _, rest = text.partition(":")
        if head == "interval":
            lo, _, hi = rest.partition(",")
            from .scalars import slope_interval
            return slope_interval(Fraction(lo), Fraction(hi), name=text)
        if head in _KNEADING_PRESETS:
            return _KNEADING_PRESETS[head](int(rest))
        if head in _ALGEBRAIC_PRESETS:
            return _ALGEBRAIC_PRESETS[head](int(rest))
        raise ConfigError(f"unknown slope preset {head!r}")
    if text in _KNEADING_PRESETS:
        return _KNEADING_PRESETS[text]()
    if text in _ALGEBRAIC_PRESETS:
        return _ALGEBRAIC_PRESETS[text]()
    try:
        return slope_exact(Fraction(text), name=text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse slope {text!r}")


def parse_q(text: str, horizon: int):
    """Kneading-map inputs: preset names or a comma-separated list."""
    from .kneading import cascade_q
    named = {"fib": fibonacci_q, "fibonacci": fibonacci_q,
             "ex35": example35_q, "cascade": cascade_q}
    text = text.strip()
    if text in named:
        f = named[text]
        return [f(k) for k in range(1, horizon + 1)], text
    try:
        return [int(tok) for tok in text.replace(",", " ").split()], "literal"
    except ValueError:
        raise ConfigError(f"cannot parse kneading map {text!r}")
