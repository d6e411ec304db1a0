"""Elliptic curves over Q from a-invariants: point counts, traces, reduction.

Models are taken as supplied and never minimalized; good reduction at p is
decided by p not dividing the discriminant of the given model.  All
arithmetic is exact (python integers, numpy int64 for counting sweeps).
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BadReduction, InternalInconsistency, SingularCurve, UnsupportedPrime


@dataclass(frozen=True)
class EllipticCurveQ:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    b2: int
    b4: int
    b6: int
    b8: int
    c4: int
    c6: int
    discriminant: int
    label: str = None

    @property
    def j(self):
        return Fraction(self.c4 ** 3, self.discriminant)

    @property
    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def __repr__(self):
        tag = f"{self.label}: " if self.label else ""
        return f"EllipticCurveQ({tag}{list(self.ainvs)})"


def derive_invariants(a1, a2, a3, a4, a6, label=None) -> EllipticCurveQ:
    """Standard Weierstrass quantities; raises SingularCurve when disc = 0."""
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    if disc == 0:
        raise SingularCurve(f"[{a1},{a2},{a3},{a4},{a6}] has discriminant zero")
    assert 4 * b8 == b2 * b6 - b4 * b4
    assert 1728 * disc == c4 ** 3 - c6 * c6
    return EllipticCurveQ(a1, a2, a3, a4, a6, b2, b4, b6, b8, c4, c6, disc, label)


def curve(ainvs, label=None):
    return derive_invariants(*ainvs, label=label)


def legendre_symbol(a, p):
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


@lru_cache(maxsize=None)
def primes_up_to(n):
    if n < 2:
        return ()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n ** 0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return tuple(int(q) for q in np.nonzero(sieve)[0])


def count_points(e: EllipticCurveQ, ell: int) -> int:
    """Projective point count over F_ell via the quadratic character sum.

    Completing the square sends (x, y) to (x, 2y + a1 x + a3), so affine
    points correspond to solutions of eta^2 = 4x^3 + b2 x^2 + 2 b4 x + b6.
    """
    if e.discriminant % ell == 0:
        raise BadReduction(f"{ell} divides the discriminant")
    if ell == 2:
        return _count_affine_p2(e) + 1
    x = np.arange(ell, dtype=np.int64)
    fx = (4 * x + e.b2 % ell) % ell
    fx = (fx * x + 2 * e.b4 % ell) % ell
    fx = (fx * x + e.b6 % ell) % ell
    counts = np.zeros(ell, dtype=np.int64)
    np.add.at(counts, (x * x) % ell, 1)
    return int(counts[fx].sum()) + 1


def count_points_enumeration(e: EllipticCurveQ, ell: int) -> int:
    """Independent oracle: brute enumeration of all

    affine pairs (x, y) in F_ell^2 against the original equation."""
    if e.discriminant % ell == 0:
        raise BadReduction(f"{ell} divides the discriminant")
    x = np.arange(ell, dtype=np.int64)
    xs, ys = np.meshgrid(x, x, indexing="ij")
    lhs = (ys * ys + (e.a1 % ell) * xs * ys + (e.a3 % ell) * ys) % ell
    x2 = xs * xs % ell
    rhs = (x2 * xs + (e.a2 % ell) * x2 + (e.a4 % ell) * xs + e.a6) % ell
    return int((lhs == rhs).sum()) + 1


def _count_affine_p2(e):
    total = 0
    for x in range(2):
        for y in range(2):
            lhs = y * y + e.a1 * x * y + e.a3 * y
            rhs = x ** 3 + e.a2 * x * x + e.a4 * x + e.a6
            if (lhs - rhs) % 2 == 0:
                total += 1
    return total


@lru_cache(maxsize=262144)
def trace_at(e: EllipticCurveQ, ell: int):
    """a_ell = ell + 1 - #E(F_ell), or None when the model is bad at ell."""
    if e.discriminant % ell == 0:
        return None
    a = ell + 1 - count_points(e, ell)
    assert a * a <= 4 * ell, "Hasse bound violated"
    return a


@dataclass(frozen=True)
class FrobeniusData:
    curve: EllipticCurveQ
    entries: tuple  # (ell, a_ell or None, good)

    def good_traces(self):
        return tuple((ell, a) for ell, a, good in self.entries if good)

    def trace(self, ell):
        for l, a, good in self.entries:
            if l == ell:
                return a
        return None


TRACE_BOUND_MAX = 10 ** 5


def frobenius_traces(e: EllipticCurveQ, bound: int) -> FrobeniusData:
    """Exact a_ell for all good ell <= bound; bad primes flagged."""
    if bound > TRACE_BOUND_MAX:
        raise ValueError(f"trace bound {bound} exceeds {TRACE_BOUND_MAX}")
    entries = []
    for ell in primes_up_to(bound):
        a = trace_at(e, ell)
        entries.append((ell, a, a is not None))
    return FrobeniusData(e, tuple(entries))


class ReductionType(Enum):
    GOOD = "Good"
    MULTIPLICATIVE_SPLIT = "MultiplicativeSplit"
    MULTIPLICATIVE_NONSPLIT = "MultiplicativeNonsplit"
    ADDITIVE = "Additive"


def reduction_type(e: EllipticCurveQ, p: int) -> ReductionType:
    """Reduction type of the supplied model at an odd prime.

    Multiplicative reduction is split or nonsplit according to whether the
    tangent-cone quadratic at the node factors over F_p, i.e. whether its
    discriminant b2 + 12*x0 is a square, x0 being the node abscissa.
    """
    if p == 2:
        raise UnsupportedPrime("reduction type analysis is restricted to odd p")
    if e.discriminant % p != 0:
        return ReductionType.GOOD
    if e.c4 % p == 0:
        return ReductionType.ADDITIVE
    x0 = _node_abscissa(e, p)
    chi = legendre_symbol(e.b2 + 12 * x0, p)
    if chi == 1:
        return ReductionType.MULTIPLICATIVE_SPLIT
    if chi == -1:
        return ReductionType.MULTIPLICATIVE_NONSPLIT
    raise InternalInconsistency("node tangent cone degenerated with c4 nonzero")


def _node_abscissa(e, p):
    """Double root mod p of 4x^3 + b2 x^2 + 2 b4 x + b6 (p odd, p | disc, p ∤ c4)."""
    f = (e.b6 % p, 2 * e.b4 % p, e.b2 % p, 4 % p)
    fp = (2 * e.b4 % p, 2 * e.b2 % p, 12 % p)
    g = _poly_gcd(f, fp, p)
    if len(g) != 2:
        raise InternalInconsistency(f"expected a single double root, gcd degree {len(g) - 1}")
    return (-g[0]) * pow(g[1], -1, p) % p


def _poly_trim(f):
    while len(f) > 1 and f[-1] == 0:
        f = f[:-1]
    return f


def _poly_mod(f, g, p):
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(f) - 1 >= dg and any(f):
        if f[-1] == 0:
            f.pop()
            continue
        coef = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - coef * gi) % p
        f.pop()
    return _poly_trim(tuple(f) if f else (0,))


def _poly_gcd(f, g, p):
    f = _poly_trim(tuple(x % p for x in f))
    g = _poly_trim(tuple(x % p for x in g))
    while g != (0,):
        f, g = g, _poly_mod(f, g, p)
    inv = pow(f[-1], -1, p)
    return tuple(x * inv % p for x in f)


def is_supersingular(e: EllipticCurveQ, p: int) -> bool:
    """Good reduction at p with a_p = 0 mod p (the exact criterion)."""
    if e.discriminant % p == 0:
        raise BadReduction(f"model is bad at {p}")
    return trace_at(e, p) % p == 0


def _squarefree(d):
    if d == 0:
        return False
    d = abs(d)
    q = 2
    while q * q <= d:
        if d % (q * q) == 0:
            return False
        while d % q == 0:
            d //= q
        q += 1
    return True


def quadratic_twist(e: EllipticCurveQ, d: int) -> EllipticCurveQ:
    """Twist by a squarefree integer d, on the integral model
    y^2 = x^3 + d*b2*x^2 + 8*d^2*b4*x + 16*d^3*b6.

    This model is exactly isomorphic to E for d = 1 (c-invariants pick up
    the factor 2^4 resp. 2^6 from the model change); the j-invariant and
    the twisted trace identity a_ell(E^d) = chi_d(ell) * a_ell(E) are on
    the nose for good odd ell not dividing d.
    """
    if not _squarefree(d):
        raise ValueError(f"twist discriminant {d} must be squarefree and nonzero")
    return derive_invariants(0, d * e.b2, 0, 8 * d * d * e.b4, 16 * d ** 3 * e.b6)


def two_division_roots(e: EllipticCurveQ):
    """Rational roots of the monic 2-division cubic X^3 + b2 X^2 + 8 b4 X + 16 b6.

    Rational roots of a monic integer cubic are integers; the model change
    X = 4x turns the classical division polynomial into this integral form.
    """
    return _monic_cubic_integer_roots(e.b2, 8 * e.b4, 16 * e.b6)


def _monic_cubic_integer_roots(b, c, d):
    """Integer roots of X^3 + b X^2 + c X + d by exact Hensel lifting.

    Roots mod a prime q not dividing the (nonzero) cubic discriminant are
    simple, so Newton lifting doubles q-adic precision; once the modulus
    exceeds twice the Cauchy root bound the symmetric representative is
    the only possible integer root above each residue.  No factoring of
    the constant term, no floating point.
    """
    from .fp_linalg import is_prime as _isp

    f = lambda x: ((x + b) * x + c) * x + d
    fprime = lambda x: (3 * x + 2 * b) * x + c
    disc = 18 * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * c ** 3 - 27 * d * d
    if disc == 0:
        raise ValueError("cubic must be separable")
    bound = 1 + max(abs(b), abs(c), abs(d))
    q = 3
    while disc % q == 0 or not _isp(q):
        q += 2
    roots = set()
    for r0 in range(q):
        if f(r0) % q:
            continue
        modulus = q
        r = r0
        while modulus <= 2 * bound:
            modulus *= modulus
            r = (r - f(r) * pow(fprime(r), -1, modulus)) % modulus
        rep = r if 2 * r <= modulus else r - modulus
        if f(rep) == 0:
            roots.add(rep)
    return sorted(roots)


def has_full_rational_2torsion(e: EllipticCurveQ) -> bool:
    """True iff the 2-division cubic splits into three rational roots."""
    return len(two_division_roots(e)) == 3
