"""Midpoint-radius (ball) arithmetic on mpmath numbers with outward rounding.

A Ball stores an mpf or mpc midpoint, a nonnegative mpf radius, and the
working precision (bits) its midpoint was computed at.  Every operation
widens the radius enough to cover both the propagated input radii and the
rounding error of the midpoint computation, so a Ball that starts as a true
enclosure stays one.  Radii are computed at a fixed small precision with a
one-sided safety bump; midpoints are computed at the ball's precision.

Endpoints of real balls are exact dyadic rationals, so certified
comparisons and containment checks go through fractions.Fraction with no
rounding at all.
"""

from __future__ import annotations

import numbers
from fractions import Fraction

import mpmath as mp
from mpmath.libmp import mpf_neg

PREC_START = 128
PREC_CEILING = 1 << 20

# Radius bookkeeping runs at this precision with a multiplicative bump that
# dwarfs its rounding error (2**-64 per op vs. a 2**-16 cushion).
_RAD_PREC = 64
_BUMP = None  # initialised lazily under _RAD_PREC


class IndeterminateComparison(ArithmeticError):
    """Two enclosures overlap, so the comparison cannot be certified."""


class ZeroDivisionEnclosure(ZeroDivisionError):
    """Divisor enclosure contains zero; caller should escalate precision."""


class DomainError(ValueError):
    """Enclosure leaves the domain of the requested function (e.g. log of
    an interval touching zero, or arg of a disc crossing the branch cut)."""


class PrecisionExhausted(RuntimeError):
    """Certification failed at the configured precision ceiling."""


def _bump():
    global _BUMP
    if _BUMP is None:
        with mp.workprec(_RAD_PREC):
            _BUMP = mp.mpf(1) + mp.mpf(2) ** -16
    return _BUMP


def mpf_to_fraction(x) -> Fraction:
    """Exact rational value of a finite mpf (mpf values are dyadic)."""
    if not mp.isfinite(x):
        raise ValueError(f"non-finite mpf: {x}")
    sign, man, exp, _ = x._mpf_
    man, exp = int(man), int(exp)  # gmpy2 backend hands out mpz
    if man == 0:
        return Fraction(0)
    val = Fraction(man, 1)
    if exp >= 0:
        val *= 1 << exp
    else:
        val /= 1 << (-exp)
    return -val if sign else val


def fraction_to_mpf_ub(fr: Fraction):
    """An mpf upper bound for a nonnegative Fraction."""
    if fr < 0:
        raise ValueError("expected nonnegative")
    if fr == 0:
        return mp.mpf(0)
    with mp.workprec(_RAD_PREC):
        approx = mp.mpf(fr.numerator) / mp.mpf(fr.denominator)
        return approx * _bump()


def _ulp_rel(prec):
    # Relative rounding slack for one mpmath op at `prec` bits, with an
    # 8x cushion over the correctly-rounded bound (covers mpc cross terms).
    return mp.mpf(2) ** (3 - prec)


def _abs_ub(x, rad=None):
    """Upper bound on |x| (+ rad), computed at radius precision."""
    with mp.workprec(_RAD_PREC):
        a = abs(x) * _bump()
        if rad is not None:
            a = (a + rad) * _bump()
        return a


def neg_exact(x):
    """Exact negation: mpmath's unary minus rounds to the ambient
    context precision, which silently truncates high-precision mids."""
    if isinstance(x, mp.mpc):
        return mp.make_mpc((mpf_neg(x._mpc_[0]), mpf_neg(x._mpc_[1])))
    return mp.make_mpf(mpf_neg(x._mpf_))


def conj_exact(x):
    """Exact conjugation (same ambient-rounding pitfall as negation)."""
    if isinstance(x, mp.mpc):
        return mp.make_mpc((x._mpc_[0], mpf_neg(x._mpc_[1])))
    return x


class Ball:
    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad, prec):
        self.mid = mid
        self.rad = rad
        self.prec = prec

    # -- constructors -------------------------------------------------

    @classmethod
    def exact(cls, value, prec=PREC_START):
        """Ball around an int, Fraction, or mpf/mpc, with exact radius.

        The radius is zero when `value` is representable at `prec` bits,
        and the exact (outward-rounded) representation error otherwise.
        """
        if isinstance(value, (mp.mpf, mp.mpc)):
            return cls(value, mp.mpf(0), prec)
        if isinstance(value, numbers.Integral):
            value = Fraction(int(value))
        if not isinstance(value, Fraction):
            raise TypeError(f"cannot build an exact Ball from {type(value)}")
        with mp.workprec(prec):
            mid = mp.mpf(value.numerator) / mp.mpf(value.denominator)
        err = abs(value - mpf_to_fraction(mid))
        return cls(mid, fraction_to_mpf_ub(err), prec)

    @classmethod
    def from_midrad(cls, mid, rad, prec):
        if not isinstance(rad, mp.mpf):
            # Converting through the ambient context may round either way;
            # bump so the stored radius never lands below the requested one.
            with mp.workprec(_RAD_PREC):
                rad = mp.mpf(rad) * _bump()
        if rad < 0:
            raise ValueError("negative radius")
        return cls(mid, rad, prec)

    @classmethod
    def pi(cls, prec=PREC_START):
        with mp.workprec(prec):
            mid = +mp.pi
        return cls(mid, _abs_ub(mid) * _ulp_rel(prec), prec)

    # -- bookkeeping ---------------------------------------------------

    @property
    def is_complex(self):
        return isinstance(self.mid, mp.mpc)

    def _pad(self, prec):
        # Radius term covering the rounding of the freshly computed mid.
        return _abs_ub(self.mid) * _ulp_rel(prec)

    def __repr__(self):
        return f"Ball({mp.nstr(self.mid, 12)} +/- {mp.nstr(self.rad, 4)} @{self.prec}b)"

    def to_decimal(self, digits=None):
        digits = digits or max(6, int(self.prec * 0.30103) + 2)
        return {"mid": mp.nstr(self.mid, digits), "rad": mp.nstr(self.rad, 6)}

    # -- ring operations -----------------------------------------------

    @staticmethod
    def _coerce(other, prec):
        if isinstance(other, Ball):
            return other
        return Ball.exact(other, prec)

    def __add__(self, other):
        other = self._coerce(other, self.prec)
        p = min(self.prec, other.prec)
        with mp.workprec(p):
            mid = self.mid + other.mid
        with mp.workprec(_RAD_PREC):
            rad = ((self.rad + other.rad) * _bump()
                   + _abs_ub(mid) * _ulp_rel(p))
        return Ball(mid, rad, p)

    __radd__ = __add__

    def __neg__(self):
        return Ball(neg_exact(self.mid), self.rad, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other, self.prec))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other, self.prec)
        p = min(self.prec, other.prec)
        with mp.workprec(p):
            mid = self.mid * other.mid
        with mp.workprec(_RAD_PREC):
            rad = ((_abs_ub(self.mid) * other.rad
                    + _abs_ub(other.mid) * self.rad
                    + self.rad * other.rad) * _bump()
                   + _abs_ub(mid) * _ulp_rel(p))
        return Ball(mid, rad, p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other, self.prec)
        p = min(self.prec, other.prec)
        lb_b = other.lb_abs()
        if lb_b <= 0:
            raise ZeroDivisionEnclosure(
                f"divisor enclosure contains zero: {other!r}")
        with mp.workprec(p):
            mid = self.mid / other.mid
        with mp.workprec(_RAD_PREC):
            denom_mid_lb = abs(other.mid) / _bump()
            rad = ((self.rad * _abs_ub(other.mid)
                    + other.rad * _abs_ub(self.mid))
                   / (denom_mid_lb * lb_b) * _bump()
                   + _abs_ub(mid) * _ulp_rel(p))
        return Ball(mid, rad, p)

    def __rtruediv__(self, other):
        return self._coerce(other, self.prec) / self

    def pow_int(self, n: int) -> "Ball":
        """self**n for any integer n, by repeated squaring on balls."""
        if n == 0:
            return Ball.exact(1, self.prec)
        base = self if n > 0 else Ball.exact(1, self.prec) / self
        e = abs(n)
        result = None
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- structure -----------------------------------------------------

    def conjugate(self):
        return Ball(conj_exact(self.mid), self.rad, self.prec)

    def real(self):
        mid = self.mid.real if self.is_complex else self.mid
        return Ball(mid, self.rad, self.prec)

    def imag(self):
        mid = self.mid.imag if self.is_complex else mp.mpf(0)
        return Ball(mid, self.rad, self.prec)

    def magnitude(self) -> "Ball":
        """Real ball enclosing |self|."""
        with mp.workprec(self.prec):
            mid = abs(self.mid)
        with mp.workprec(_RAD_PREC):
            rad = self.rad * _bump() + _abs_ub(mid) * _ulp_rel(self.prec)
        return Ball(mid, rad, self.prec)

    def add_error(self, extra) -> "Ball":
        with mp.workprec(_RAD_PREC):
            rad = (self.rad + mp.mpf(extra)) * _bump()
        return Ball(self.mid, rad, self.prec)

    # -- real elementary functions (monotone, endpoint evaluation) ------

    def _endpoints(self):
        """Outer endpoints [lo, hi] computed at full precision.

        The subtraction/addition is done at prec+16 bits and then widened
        by an absolute slip larger than that rounding error, so [lo, hi]
        certifiedly contains [mid-rad, mid+rad] while staying tight
        relative to the input radius.
        """
        if self.is_complex:
            raise TypeError("real-only operation on a complex ball")
        p = self.prec
        with mp.workprec(p + 16):
            slip = (abs(self.mid) + self.rad) * mp.mpf(2) ** (-p - 8)
            lo = (self.mid - self.rad) - slip
            hi = (self.mid + self.rad) + slip
        return lo, hi

    def _monotone(self, fn, lo, hi):
        """Enclosure of fn over [lo, hi] for increasing fn.

        Evaluations and the width arithmetic run at prec+16 bits; the
        radius gets an additive cover for mpmath's function rounding
        (a few ulp) and a final multiplicative bump.
        """
        p = self.prec
        with mp.workprec(p + 16):
            flo, fhi = fn(lo), fn(hi)
            mid = (flo + fhi) / 2
            rad = ((fhi - flo) / 2
                   + (abs(flo) + abs(fhi) + abs(mid)) * mp.mpf(2) ** (4 - p))
        with mp.workprec(_RAD_PREC):
            rad = rad * _bump()
        return Ball(mid, rad, p)

    def sqrt(self):
        lo, hi = self._endpoints()
        if lo < 0:
            raise DomainError(f"sqrt of enclosure reaching below zero: {self!r}")
        return self._monotone(mp.sqrt, lo, hi)

    def log(self):
        lo, hi = self._endpoints()
        if lo <= 0:
            raise DomainError(f"log of enclosure touching zero: {self!r}")
        return self._monotone(mp.log, lo, hi)

    def exp(self):
        lo, hi = self._endpoints()
        return self._monotone(mp.exp, lo, hi)

    def arg(self) -> "Ball":
        """Principal argument in (-pi, pi] of a complex enclosure.

        Raises DomainError when the disc contains zero or crosses the
        negative real axis (where the principal branch jumps).
        """
        lb = self.lb_abs()
        if lb <= 0:
            raise DomainError("arg of enclosure containing zero")
        if self.is_complex and self.mid.real < 0:
            with mp.workprec(_RAD_PREC):
                if abs(self.mid.imag) <= self.rad * _bump():
                    raise DomainError("arg enclosure crosses the branch cut")
        p = self.prec
        with mp.workprec(p):
            mid = mp.arg(self.mid)
        with mp.workprec(_RAD_PREC):
            # |arg(z) - arg(mid)| <= arcsin(rad/|mid|) <= (pi/2) rad/lb|z|
            rad = (mp.mpf(2) * self.rad / lb) * _bump() \
                + _abs_ub(mid) * _ulp_rel(p)
        return Ball(mid, rad, p)

    # -- certified predicates (exact, via Fraction endpoints) -----------

    def fr_mid(self):
        if self.is_complex:
            raise TypeError("real-only predicate on a complex ball")
        return mpf_to_fraction(self.mid)

    def fr_lo(self) -> Fraction:
        return self.fr_mid() - mpf_to_fraction(self.rad)

    def fr_hi(self) -> Fraction:
        return self.fr_mid() + mpf_to_fraction(self.rad)

    def lb_abs(self):
        """mpf lower bound on |value| (0 when the enclosure reaches 0)."""
        with mp.workprec(_RAD_PREC):
            lb = (abs(self.mid) / _bump() - self.rad * _bump()) / _bump()
            return lb if lb > 0 else mp.mpf(0)

    def ub_abs(self):
        return _abs_ub(self.mid, self.rad)

    def contains(self, value) -> bool:
        """Exact containment of an int or Fraction in a real ball."""
        v = Fraction(value)
        return self.fr_lo() <= v <= self.fr_hi()

    def gt(self, other) -> bool:
        """Certified self > other (other: Ball, int, or Fraction)."""
        if isinstance(other, Ball):
            if self.fr_lo() > other.fr_hi():
                return True
            if self.fr_hi() <= other.fr_lo():
                return False
            raise IndeterminateComparison(f"{self!r} vs {other!r}")
        v = Fraction(other)
        if self.fr_lo() > v:
            return True
        if self.fr_hi() <= v:
            return False
        raise IndeterminateComparison(f"{self!r} vs {v}")

    def lt(self, other) -> bool:
        if isinstance(other, Ball):
            return other.gt(self)
        v = Fraction(other)
        if self.fr_hi() < v:
            return True
        if self.fr_lo() >= v:
            return False
        raise IndeterminateComparison(f"{self!r} vs {v}")

    def is_nonzero(self) -> bool:
        return self.lb_abs() > 0

    def unique_floor(self) -> int:
        """floor(value) when it is the same for the whole enclosure."""
        import math
        lo = math.floor(self.fr_lo())
        hi = math.floor(self.fr_hi())
        if lo != hi:
            raise IndeterminateComparison(
                f"floor straddles an integer: {self!r}")
        return lo


def ball_sum(balls, prec=None):
    """Sum of an iterable of Balls (exact 0 ball for empty input)."""
    balls = list(balls)
    if not balls:
        return Ball.exact(0, prec or PREC_START)
    acc = balls[0]
    for b in balls[1:]:
        acc = acc + b
    return acc


def escalate(prec: int) -> int:
    nxt = prec * 2
    if nxt > PREC_CEILING:
        raise PrecisionExhausted(f"precision ceiling {PREC_CEILING} reached")
    return nxt
