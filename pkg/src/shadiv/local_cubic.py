"""p-adic solvability of diagonal plane cubics and cube classes in Q_p*.

Covers exactly what the worked Selmer-curve example needs: cube class
computations in Q_p*/(Q_p*)^3, coordinate-section point tests, and an
exhaustive mod-p^k point search with Hensel certification.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, PrecisionInsufficient
from .fp_linalg import is_prime

SCAN_TABLE_BUDGET = 4 * 10 ** 6


@dataclass(frozen=True)
class PAdicApprox:
    """x = p^valuation * unit known to precision k digits of the unit."""

    p: int
    valuation: int
    unit: int
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if self.unit % self.p == 0:
            raise ValueError("unit part must be coprime to p")

    @staticmethod
    def from_rational(x, p, precision=8):
        x = Fraction(x)
        if x == 0:
            raise ValueError("zero has no p-adic approximation")
        v = 0
        num, den = x.numerator, x.denominator
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        unit = num * pow(den, -1, p ** precision) % p ** precision
        return PAdicApprox(p, v, unit, precision)


@dataclass(frozen=True)
class CubeClass:
    """Image of x in Q_p*/(Q_p*)^3: valuation mod 3 plus a unit-class tag."""

    p: int
    valuation_mod_3: int
    unit_class: int

    @property
    def is_trivial(self):
        return self.valuation_mod_3 == 0 and self.unit_class == 1


def _unit_class(unit, p):
    """Canonical tag of a p-adic unit modulo cubes.

    p = 3: units are cubes iff congruent to +-1 mod 9; the tag is the
    smaller of u, 9-u mod 9 (values 1, 2, 4).  p = 1 mod 3: the cubic
    residue symbol u^((p-1)/3) mod p.  p = 2 mod 3: every unit is a cube.
    """
    if p == 3:
        u = unit % 9
        return min(u, 9 - u)
    if p % 3 == 1:
        return pow(unit % p, (p - 1) // 3, p)
    return 1


def cube_class(x, p, precision=None) -> CubeClass:
    min_prec = 2 if p == 3 else 1
    precision = max(precision or min_prec, min_prec)
    approx = PAdicApprox.from_rational(x, p, precision)
    return cube_class_from_approx(approx)


def cube_class_from_approx(approx: PAdicApprox) -> CubeClass:
    p = approx.p
    need = 2 if p == 3 else 1
    if approx.precision < need:
        raise ValueError(f"cube class mod {p} needs precision >= {need}")
    return CubeClass(p, approx.valuation % 3, _unit_class(approx.unit, p))


def is_cube(x, p) -> bool:
    """Whether the nonzero rational x is a cube in Q_p*."""
    cls = cube_class(x, p)
    return cls.is_trivial


def cube_class_group_order(p):
    """|Q_p*/(Q_p*)^3|: 9 for p = 3 and p = 1 mod 3, else 3.

    The valuation contributes Z/3 always; units contribute Z/3 exactly
    when mu_3 lies in Q_p (p = 1 mod 3) or p = 3 (the 1-units).
    """
    if p == 3 or p % 3 == 1:
        return 9
    return 3


def unit_cube_class_count(p):
    return 3 if (p == 3 or p % 3 == 1) else 1


def has_zeta3(v) -> bool:
    """Whether Q_v contains a primitive cube root of unity.

    x^2 + x + 1 has a root mod v iff v = 1 mod 3, and Hensel lifts it for
    v != 3; over Q_3 there is no root even mod 9.
    """
    if not is_prime(v):
        raise ValueError(f"{v} is not prime")
    if v == 3:
        return False
    return v % 3 == 1


@dataclass(frozen=True)
class DiagonalCubic:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a * self.b * self.c == 0:
            raise ValueError("coefficients must be nonzero")

    def __str__(self):
        return f"{self.a}X^3 + {self.b}Y^3 + {self.c}Z^3 = 0"


def coordinate_section_point(cubic: DiagonalCubic, p) -> bool:
    """Whether the locus XYZ = 0 on the cubic has a Q_p-point.

    X = 0 needs -c/b a cube, Y = 0 needs -c/a, Z = 0 needs -b/a.
    """
    a, b, c = cubic.a, cubic.b, cubic.c
    return (
        is_cube(Fraction(-c, b), p)
        or is_cube(Fraction(-c, a), p)
        or is_cube(Fraction(-b, a), p)
    )


def has_real_point(cubic: DiagonalCubic) -> bool:
    """Always true: an odd-degree form represents zero over R."""
    return True


def _vp_int(n, p, cap):
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


def has_local_point(cubic: DiagonalCubic, p, precision=None) -> bool:
    """Whether the cubic has a Q_p-point, by scan plus Hensel certificates.

    For p not dividing 3abc the reduction is a smooth plane cubic, which
    has an F_p-point by Hasse-Weil, and smoothness lifts it.  Otherwise we
    sweep primitive triples mod p^k: a triple with F = 0 mod p^k and some
    partial derivative of valuation j with k > 2j certifies a point; if no
    primitive root mod p^k exists at all the curve is rigorously pointless
    over Q_p; roots without certificates raise PrecisionInsufficient.
    """
    a, b, c = cubic.a, cubic.b, cubic.c
    if (3 * a * b * c) % p != 0:
        return True
    k = precision if precision is not None else (6 if p == 3 else 5)
    if k < 5:
        raise ValueError("precision must be at least 5")
    pk = p ** k
    if pk > SCAN_TABLE_BUDGET:
        raise BudgetExceeded(f"p^k = {pk} exceeds the scan budget")
    res = np.arange(pk, dtype=np.int64)
    cubes = res * res % pk * res % pk
    val = np.full(pk, k, dtype=np.int64)
    nonzero = res > 0
    v = np.zeros(pk, dtype=np.int64)
    tmp = res.copy()
    for _ in range(k):
        divisible = nonzero & (tmp % p == 0)
        v[divisible] += 1
        tmp[divisible] //= p
    val[nonzero] = v[nonzero]

    cz = c % pk * cubes % pk
    vz_of = np.full(pk, k, dtype=np.int64)  # min valuation of z with c z^3 = R
    has_any = np.zeros(pk, dtype=bool)
    has_unit_z = np.zeros(pk, dtype=bool)
    np.minimum.at(vz_of, cz, val)
    has_any[cz] = True
    unit_mask = res % p != 0
    has_unit_z[cz[unit_mask]] = True

    va = _vp_int(3 * a, p, k)
    vb = _vp_int(3 * b, p, k)
    vc = _vp_int(3 * c, p, k)
    ax3 = a % pk * cubes % pk
    by3 = b % pk * cubes % pk
    jx_row = np.minimum(va + 2 * val, np.full(pk, k))  # valuation of dF/dX per x
    jy = np.minimum(vb + 2 * val, np.full(pk, k))

    roots_seen = False
    for x in range(pk):
        r_row = (-ax3[x] - by3) % pk
        hit = has_any[r_row]
        if x % p == 0:
            # primitive needs y or z a unit
            hit = hit & ((res % p != 0) | has_unit_z[r_row])
        if not hit.any():
            continue
        roots_seen = True
        jz = np.minimum(vc + 2 * vz_of[r_row], k)
        jmin = np.minimum(np.minimum(jx_row[x], jy), jz)
        certified = hit & (2 * jmin < k)
        idx = np.nonzero(certified)[0]
        if len(idx):
            return True
    if not roots_seen:
        return False
    raise PrecisionInsufficient(
        f"roots mod {p}^{k} exist but none carries a Hensel certificate"
    )


def find_certified_point(cubic: DiagonalCubic, p, precision=None):
    """A certified triple (x, y, z, j) mod p^k, or None; used for replay tests."""
    a, b, c = cubic.a, cubic.b, cubic.c
    k = precision if precision is not None else (6 if p == 3 else 5)
    pk = p ** k
    if pk > SCAN_TABLE_BUDGET:
        raise BudgetExceeded(f"p^k = {pk} exceeds the scan budget")
    f = lambda x, y, z: (a * x ** 3 + b * y ** 3 + c * z ** 3) % pk
    for x in range(pk):
        for y in range(pk):
            rhs = (-(a * x ** 3 + b * y ** 3)) % pk
            for z in range(pk):
                if (c * z ** 3) % pk != rhs:
                    continue
                if x % p == 0 and y % p == 0 and z % p == 0:
                    continue
                j = min(
                    _vp_int(3 * a * x * x, p, k),
                    _vp_int(3 * b * y * y, p, k),
                    _vp_int(3 * c * z * z, p, k),
                )
                if k > 2 * j:
                    return x, y, z, j
    return None


def lift_certificate(cubic: DiagonalCubic, point, p, k):
    """One more digit of precision for a certified point; replays Hensel.

    Returns a triple congruent to `point` mod p^(k-j) with F = 0 mod p^(k+1).
    """
    a, b, c = cubic.a, cubic.b, cubic.c
    x, y, z = point
    target = p ** (k + 1)
    coeffs = (a, b, c)
    vals = list(point)
    partials = (3 * a * x * x, 3 * b * y * y, 3 * c * z * z)
    js = [_vp_int(q, p, k) for q in partials]
    j = min(js)
    i = js.index(j)
    step = p ** (k - j)
    for t in range(p):
        trial = list(vals)
        trial[i] = (trial[i] + t * step) % target
        if (a * trial[0] ** 3 + b * trial[1] ** 3 + c * trial[2] ** 3) % target == 0:
            return tuple(trial)
    raise PrecisionInsufficient("certificate failed to lift, which contradicts k > 2j")


# ---------------------------------------------------------------------------
# the worked example: Selmer's cubic and the Jacobian X^3 + Y^3 + 60 Z^3


def selmer_example_report() -> dict:
    """Every computable ingredient of the Selmer-curve example, plus the
    cited conclusions it feeds, each step tagged computed or cited."""
    from .datasets import SELMER_COMPANIONS, SELMER_CUBIC

    s = DiagonalCubic(*SELMER_CUBIC)
    companions = {name: DiagonalCubic(*coeffs) for name, coeffs in SELMER_COMPANIONS.items()}
    sections = {"S": coordinate_section_point(s, 3)}
    for name, cubic in companions.items():
        sections[name] = coordinate_section_point(cubic, 3)
    local_points = {}
    for p in [q for q in range(2, 101) if is_prime(q)]:
        local_points[p] = has_local_point(s, p)
    steps = [
        {
            "tag": "computed",
            "name": "cube-classes-at-3",
            "detail": {
                "is_cube(10, 3)": is_cube(10, 3),
                "order of Q_3*/(Q_3*)^3": cube_class_group_order(3),
            },
        },
        {
            "tag": "computed",
            "name": "coordinate-sections-at-3",
            "detail": {name: sections[name] for name in ("S", "S'", "S''", "S'''")},
        },
        {
            "tag": "computed",
            "name": "everywhere-local-solvability-of-S",
            "detail": {
                "real": has_real_point(s),
                "p <= 100": all(local_points.values()),
            },
        },
        {
            "tag": "computed",
            "name": "jacobian-torsion-vanishing-inputs",
            "detail": {
                "is_cube(60, 2)": is_cube(60, 2),
                "is_cube(60, 5)": is_cube(60, 5),
                "has_zeta3(2)": has_zeta3(2),
                "has_zeta3(5)": has_zeta3(5),
            },
        },
        {
            "tag": "cited",
            "name": "sha-structure",
            "statement": "Sha of the Jacobian over Q is Z/3 x Z/3, with S, S', S'', S''' "
            "representing the nontrivial classes up to inversion",
        },
        {
            "tag": "cited",
            "name": "selmer-order-count",
            "statement": "the 3-relaxed Selmer groups have order 3^(n+1) at level 3^n",
        },
        {
            "tag": "cited",
            "name": "divisible-intersection-generator",
            "statement": "the class of the Selmer cubic generates the intersection of "
            "Sha with the maximal divisible subgroup of the Weil-Chatelet group",
        },
        {
            "tag": "cited",
            "name": "pairing-antisymmetry",
            "statement": "the Bockstein pairing against the compactly supported class of S "
            "vanishes by antisymmetry of the Weil pairing",
        },
    ]
    return {
        "curve": str(s),
        "jacobian": "X^3 + Y^3 + 60Z^3 = 0, Weierstrass model y^2 = x^3 - 1555200",
        "steps": steps,
        "derived": {
            "only [S] survives the trivial-at-3 condition": sections["S"]
            and not any(sections[n] for n in ("S'", "S''", "S'''")),
            "local points of S at all p <= 100": all(local_points.values()),
        },
    }
