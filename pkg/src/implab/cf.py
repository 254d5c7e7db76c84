"""Continued fractions, the two expansions of p/q, rotation numbers and Brjuno sums.

A rational p/q in lowest terms has exactly two continued-fraction expansions,
[a_0,...,a_k] with a_k >= 2 and [a_0,...,a_k - 1, 1].  Appending a real tail
t > 0 as one extra term gives the numbers theta_n = [a_0,...,a_m, n + theta]
that approach p/q from the side determined by the parity of m.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .precision import _CTX as mp
from .precision import golden_tail, mpf


class RationalRotationError(ValueError):
    """Raised when an operation requires an irrational rotation number."""


class PrecisionFault(ArithmeticError):
    """Parity sign rule and numeric sign disagree; working precision too low."""


@dataclass(frozen=True)
class ContinuedFraction:
    """Finite expansion [a_0, a_1, ..., a_m] with a_i >= 1 for i >= 1."""

    terms: tuple

    def __post_init__(self):
        terms = tuple(int(a) for a in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("empty continued fraction")
        if any(a < 1 for a in terms[1:]):
            raise ValueError(f"partial quotients must be >= 1: {terms}")

    @property
    def m(self):
        """Index of the last term."""
        return len(self.terms) - 1

    def convergents(self):
        """All (p_k, q_k) pairs, k = 0..m."""
        p, q = [], []
        pk1, pk2, qk1, qk2 = 1, 0, 0, 1
        for a in self.terms:
            pk1, pk2 = a * pk1 + pk2, pk1
            qk1, qk2 = a * qk1 + qk2, qk1
            p.append(pk1)
            q.append(qk1)
        return list(zip(p, q))

    def value(self) -> Fraction:
        """Exact rational value."""
        p, q = self.convergents()[-1]
        return Fraction(p, q)


def cf_expand(r) -> tuple[ContinuedFraction, ContinuedFraction]:
    """Both expansions of a rational: (ending in a_k >= 2, ending in 1).

    Integers give ([a_0], [a_0 - 1, 1]).
    """
    r = Fraction(r)
    terms = []
    a0 = r.numerator // r.denominator
    terms.append(a0)
    rem = r - a0
    while rem:
        inv = 1 / rem
        a = inv.numerator // inv.denominator
        terms.append(a)
        rem = inv - a
    # Euclidean output ends with a_k >= 2 unless the rational is an integer.
    if len(terms) > 1 and terms[-1] == 1:
        # Can only happen for r = a0 + 1/1; fold into the short form.
        terms = terms[:-2] + [terms[-2] + 1]
    short = ContinuedFraction(tuple(terms))
    long = ContinuedFraction(tuple(terms[:-1]) + (terms[-1] - 1, 1))
    if short.value() != r or long.value() != r:
        raise AssertionError(f"expansion round-trip failed for {r}")
    return short, long


def cf_eval(cf: ContinuedFraction, tail=None):
    """Evaluate [a_0,...,a_m] exactly, or [a_0,...,a_m, tail] at working precision.

    The tail, when given, is appended as one extra (real, positive) term.
    """
    (p, q), (p1, q1) = _last_two_convergents(cf)
    if tail is None:
        return Fraction(p, q)
    t = mpf(tail)
    if t <= 0:
        raise ValueError("tail must be positive")
    return (t * p + p1) / (t * q + q1)


def _last_two_convergents(cf: ContinuedFraction):
    conv = cf.convergents()
    if len(conv) == 1:
        return conv[0], (1, 0)
    return conv[-1], conv[-2]


@dataclass(frozen=True)
class RotationNumber:
    """theta_n = [a_0,...,a_m, n + tail]: a high-precision irrational near p/q."""

    base: ContinuedFraction
    tail: object  # mpf in (0,1), irrational
    n: int
    value: object = field(default=None)  # mpf, filled by rotation_number()

    @property
    def pq(self) -> Fraction:
        return self.base.value()

    @property
    def q(self) -> int:
        return self.pq.denominator

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def sign(self) -> int:
        """Sign of theta_n - p/q, equal to (-1)^m."""
        return -1 if self.m % 2 else 1

    @property
    def end(self) -> str:
        """Cylinder end receiving the dynamics: 'upper' iff theta_n > p/q."""
        return "upper" if self.sign > 0 else "lower"

    def delta(self):
        """theta_n - p/q, computed without cancellation.

        With t = n + tail and p_m/q_m, p_{m-1}/q_{m-1} the last convergents,
        theta_n - p/q = (-1)^m / (q_m (q_m t + q_{m-1})).
        """
        (pm, qm), (pm1, qm1) = _last_two_convergents(self.base)
        t = mpf(self.n) + self.tail
        return mp.mpf(self.sign) / (qm * (qm * t + qm1))


def rotation_number(base: ContinuedFraction, n: int, tail=None) -> RotationNumber:
    """Build theta_n from an expansion of p/q, an index n >= 1 and an irrational tail.

    tail defaults to the golden mean (sqrt(5)-1)/2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = golden_tail() if tail is None else mpf(tail)
    if not (0 < t < 1):
        raise ValueError("tail must lie in (0, 1)")
    rn = RotationNumber(base=base, tail=t, n=n)
    pq = rn.pq
    value = mpf(pq.numerator) / pq.denominator + rn.delta()
    nested = cf_eval(base, tail=mpf(n) + t)
    if abs(nested - value) > abs(rn.delta()) * mp.mpf(10) ** (-10):
        raise PrecisionFault("nested evaluation disagrees with convergent formula")
    return RotationNumber(base=base, tail=t, n=n, value=value)


def approach_sign(rn: RotationNumber):
    """((-1)^m, end marker), asserted against the numeric sign of theta_n - p/q."""
    numeric = 1 if rn.value - mpf(rn.pq.numerator) / rn.pq.denominator > 0 else -1
    if numeric != rn.sign:
        raise PrecisionFault(
            f"(-1)^m = {rn.sign} but numeric sign is {numeric} for n={rn.n}"
        )
    return rn.sign, rn.end


@dataclass(frozen=True)
class BrjunoEstimate:
    theta: object
    depth: int
    partial_sum: float
    converged: bool
    increments: tuple = ()


def brjuno_sum(theta, depth: int, tol: float = 1e-12) -> BrjunoEstimate:
    """Partial Brjuno sum  sum_{k<=depth} beta_{k-1} log(1/alpha_k).

    alpha_k is the Gauss-map orbit of theta and beta_k the product of the
    alphas.  Rational theta (terminating orbit) raises RationalRotationError.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(theta, (Fraction, int)) or (
        isinstance(theta, float) and Fraction(theta).denominator < 10**6
    ):
        raise RationalRotationError("rational rotation number")
    alpha = mpf(theta)
    if not (0 < alpha < 1):
        alpha = alpha - mp.floor(alpha)
    # Orbit must stay clearly away from 0 at working precision.
    floor_guard = mp.mpf(10) ** (-mp.dps // 2)
    beta = mp.mpf(1)  # beta_{k-1}
    total = mp.mpf(0)
    increments = []
    converged = False
    for _ in range(depth):
        if alpha < floor_guard:
            raise RationalRotationError("rational rotation number")
        inc = beta * mp.log(1 / alpha)
        total += inc
        increments.append(float(inc))
        if inc < tol:
            converged = True
            break
        beta = beta * alpha
        inv = 1 / alpha
        alpha = inv - mp.floor(inv)
    return BrjunoEstimate(
        theta=mpf(theta),
        depth=len(increments),
        partial_sum=float(total),
        converged=converged,
        increments=tuple(increments),
    )
