"""Explicit subgroups of GL2(F_p): closure, enumeration, sampling, classification.

A per-prime ambient context indexes every element of GL2(F_p) in
lexicographic order of its entry 4-tuple (a, b, c, d); that ordering is
canonical throughout.  For p <= 7 the full multiplication table is built
once (|GL2(F_7)| = 2016, an 8 MB uint16 table), which turns closure and
cohomology sweeps into array lookups.  For p = 11, 13 operations fall back
to direct modular arithmetic on encoded elements.
"""

import random
import threading
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    InternalInconsistency,
    ModeUnsupported,
    NonInvertibleGenerator,
    SizeCapExceeded,
)
from .fp_linalg import is_prime

TABLE_MAX_P = 7
SAMPLING_MAX_P = 13
EXHAUSTIVE_MAX_P = 3

_ambient_cache = {}
_ambient_lock = threading.Lock()


def gl2_order(p):
    return (p * p - 1) * (p * p - p)


def sl2_order(p):
    return p * (p * p - 1)


def _encode(a, b, c, d, p):
    return ((a * p + b) * p + c) * p + d


def _decode(code, p):
    d = code % p
    code //= p
    c = code % p
    code //= p
    b = code % p
    a = code // p
    return a, b, c, d


class GL2Ambient:
    """Indexed copy of GL2(F_p) with shared lookup structure."""

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        codes = []
        for code in range(p ** 4):
            a, b, c, d = _decode(code, p)
            if (a * d - b * c) % p != 0:
                codes.append(code)
        self.codes = np.array(codes, dtype=np.int64)
        self.size = len(codes)
        assert self.size == gl2_order(p)
        self.code_to_id = np.full(p ** 4, -1, dtype=np.int32)
        self.code_to_id[self.codes] = np.arange(self.size, dtype=np.int32)
        a, rem = np.divmod(self.codes, p ** 3)
        b, rem = np.divmod(rem, p ** 2)
        c, d = np.divmod(rem, p)
        self.mats = np.stack(
            [np.stack([a, b], axis=1), np.stack([c, d], axis=1)], axis=1
        ).astype(np.int64)
        self.dets = (a * d - b * c) % p
        det_inv = np.array([0] + [pow(int(x), -1, p) for x in range(1, p)], dtype=np.int64)
        di = det_inv[self.dets]
        inv_codes = _encode(d * di % p, (-b) * di % p, (-c) * di % p, a * di % p, p)
        self.inv = self.code_to_id[inv_codes].astype(np.int32)
        self.identity_id = int(self.code_to_id[_encode(1, 0, 0, 1, p)])
        self.scalar_ids = np.array(
            [int(self.code_to_id[_encode(s, 0, 0, s, p)]) for s in range(1, p)],
            dtype=np.int32,
        )
        self.mul = None
        if p <= TABLE_MAX_P:
            self.mul = self._build_mul_table()
        self._orders = None
        self._ad_mats = None
        self._small_order_ids = {}
        self._lines = None
        self._lock = threading.Lock()

    def _build_mul_table(self):
        p = self.p
        table = np.empty((self.size, self.size), dtype=np.uint16)
        mats = self.mats
        for i in range(self.size):
            prod = (mats[i] @ mats) % p
            codes = _encode(prod[:, 0, 0], prod[:, 0, 1], prod[:, 1, 0], prod[:, 1, 1], p)
            table[i] = self.code_to_id[codes]
        return table

    def mat_of(self, eid):
        m = self.mats[eid]
        return ((int(m[0, 0]), int(m[0, 1])), (int(m[1, 0]), int(m[1, 1])))

    def id_of_mat(self, mat):
        p = self.p
        (a, b), (c, d) = mat
        eid = int(self.code_to_id[_encode(a % p, b % p, c % p, d % p, p)])
        if eid < 0:
            raise NonInvertibleGenerator(f"matrix {mat} is singular mod {p}")
        return eid

    def mul_ids(self, i, j):
        if self.mul is not None:
            return int(self.mul[i, j])
        p = self.p
        x = self.mats[i]
        y = self.mats[j]
        prod = (x @ y) % p
        return int(self.code_to_id[_encode(prod[0, 0], prod[0, 1], prod[1, 0], prod[1, 1], p)])

    def mul_many(self, ids_a, ids_b):
        """Pairwise products of two equal-length id arrays."""
        if self.mul is not None:
            return self.mul[ids_a, ids_b].astype(np.int32)
        p = self.p
        prod = (self.mats[ids_a] @ self.mats[ids_b]) % p
        codes = _encode(prod[..., 0, 0], prod[..., 0, 1], prod[..., 1, 0], prod[..., 1, 1], p)
        return self.code_to_id[codes].astype(np.int32)

    def products(self, ids_a, ids_b):
        """All products a*b for a in ids_a, b in ids_b, as a 2-d id array."""
        if self.mul is not None:
            return self.mul[np.ix_(np.asarray(ids_a), np.asarray(ids_b))].astype(np.int32)
        p = self.p
        prod = (self.mats[np.asarray(ids_a)][:, None] @ self.mats[np.asarray(ids_b)][None, :]) % p
        codes = _encode(prod[..., 0, 0], prod[..., 0, 1], prod[..., 1, 0], prod[..., 1, 1], p)
        return self.code_to_id[codes].astype(np.int32)

    def conjugate_set(self, g, ids):
        """g S g^-1 as an id array."""
        ids = np.asarray(ids)
        left = self.products([g], ids)[0]
        return self.mul_many(left, np.full(len(ids), self.inv[g], dtype=np.int32))

    def order_of(self, eid):
        if self._orders is not None:
            return int(self._orders[eid])
        k = 1
        cur = eid
        while cur != self.identity_id:
            cur = self.mul_ids(cur, eid)
            k += 1
        return k

    @property
    def orders(self):
        with self._lock:
            if self._orders is None:
                orders = np.zeros(self.size, dtype=np.int32)
                everyone = np.arange(self.size, dtype=np.int32)
                cur = everyone.copy()
                k = 1
                while (orders == 0).any():
                    hit = (cur == self.identity_id) & (orders == 0)
                    orders[hit] = k
                    cur = self.mul_many(cur, everyone)
                    k += 1
                self._orders = orders
        return self._orders

    def ids_with_power_identity(self, k):
        """Ids of elements x with x^k = identity (cached per k)."""
        with self._lock:
            if k not in self._small_order_ids:
                cur = np.arange(self.size, dtype=np.int32)
                acc = np.full(self.size, self.identity_id, dtype=np.int32)
                for _ in range(k):
                    acc = self.mul_many(acc, cur)
                self._small_order_ids[k] = np.nonzero(acc == self.identity_id)[0].astype(np.int32)
        return self._small_order_ids[k]

    @property
    def ad_mats(self):
        """Conjugation action on 2x2 matrices in the basis E11, E12, E21, E22."""
        with self._lock:
            if self._ad_mats is None:
                p = self.p
                g = self.mats
                ginv = self.mats[self.inv]
                ginv_t = ginv.transpose(0, 2, 1)
                ad = np.einsum("nij,nkl->nikjl", g, ginv_t).reshape(self.size, 4, 4) % p
                self._ad_mats = ad.astype(np.int64)
        return self._ad_mats

    @property
    def lines(self):
        """Representative vectors of the p + 1 lines of F_p^2."""
        if self._lines is None:
            self._lines = [(1, t) for t in range(self.p)] + [(0, 1)]
        return self._lines

    def line_image(self, eid, line_idx):
        p = self.p
        v = self.lines[line_idx]
        m = self.mats[eid]
        w = (int(m[0, 0]) * v[0] + int(m[0, 1]) * v[1]) % p, (
            int(m[1, 0]) * v[0] + int(m[1, 1]) * v[1]
        ) % p
        if w[0] != 0:
            return w[1] * pow(w[0], -1, p) % p
        return p


def ambient(p):
    with _ambient_lock:
        if p not in _ambient_cache:
            _ambient_cache[p] = GL2Ambient(p)
        return _ambient_cache[p]


class ClassificationTag(Enum):
    BOREL_CONTAINED = "BorelContained"
    CONTAINS_SL2 = "ContainsSL2"
    SPLIT_TORUS_NORMALIZER = "SplitTorusNormalizer"
    NONSPLIT_TORUS_NORMALIZER = "NonsplitTorusNormalizer"
    EXCEPTIONAL_A4 = "Exceptional(A4)"
    EXCEPTIONAL_S4 = "Exceptional(S4)"
    EXCEPTIONAL_A5 = "Exceptional(A5)"


@dataclass(frozen=True, eq=False)
class Subgroup:
    """Subgroup of GL2(F_p) with its full element set.

    element_ids are sorted ascending, which is lexicographic order on the
    entry 4-tuples; all downstream output is deterministic because of this.
    """

    p: int
    generator_ids: tuple
    element_ids: tuple

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.p == other.p
            and self.element_ids == other.element_ids
        )

    def __hash__(self):
        return hash((self.p, self.element_ids))

    @property
    def order(self):
        return len(self.element_ids)

    @property
    def ambient(self):
        return ambient(self.p)

    @property
    def generators(self):
        amb = self.ambient
        return tuple(amb.mat_of(i) for i in self.generator_ids)

    @property
    def elements(self):
        amb = self.ambient
        return tuple(amb.mat_of(i) for i in self.element_ids)

    @property
    def id_set(self):
        return frozenset(self.element_ids)

    def contains_matrix(self, mat):
        try:
            return self.ambient.id_of_mat(mat) in self.id_set
        except NonInvertibleGenerator:
            return False

    def is_subset_of(self, other):
        return self.p == other.p and self.id_set <= other.id_set


def _normalize_generator(gen):
    if hasattr(gen, "entries"):
        gen = gen.entries
    rows = tuple(tuple(int(x) for x in row) for row in gen)
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ValueError("generators must be 2x2 matrices")
    return rows


def _closure_ids(amb, gen_ids):
    if not gen_ids:
        return (amb.identity_id,)
    cap = amb.size
    if amb.mul is not None:
        seen = np.zeros(amb.size, dtype=bool)
        seen[amb.identity_id] = True
        frontier = np.array([amb.identity_id], dtype=np.int32)
        gen_arr = np.asarray(sorted(set(gen_ids)), dtype=np.int32)
        while len(frontier):
            prods = amb.mul[np.ix_(frontier, gen_arr)].ravel()
            prods = np.unique(prods)
            new = prods[~seen[prods]]
            seen[new] = True
            frontier = new.astype(np.int32)
        ids = np.nonzero(seen)[0]
        if len(ids) > cap:
            raise SizeCapExceeded(f"closure exceeded |GL2(F_{amb.p})|")
        return tuple(int(i) for i in ids)
    seen = {amb.identity_id}
    frontier = [amb.identity_id]
    gens = sorted(set(gen_ids))
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = amb.mul_ids(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
        if len(seen) > cap:
            raise SizeCapExceeded(f"closure exceeded |GL2(F_{amb.p})|")
    return tuple(sorted(seen))


def closure(p, generators):
    """Smallest subgroup of GL2(F_p) containing the given matrices."""
    amb = ambient(p)
    gen_ids = tuple(amb.id_of_mat(_normalize_generator(g)) for g in generators)
    return Subgroup(p, gen_ids, _closure_ids(amb, gen_ids))


def subgroup_from_ids(p, element_ids, generator_ids=None):
    """Wrap a known-closed id set as a Subgroup, reducing generators greedily."""
    amb = ambient(p)
    ids = tuple(sorted(int(i) for i in element_ids))
    if generator_ids is None:
        generator_ids = _greedy_generators(amb, ids)
    return Subgroup(p, tuple(generator_ids), ids)


def _greedy_generators(amb, ids):
    gens = []
    have = {amb.identity_id}
    for eid in ids:
        if eid not in have:
            gens.append(eid)
            have = set(_closure_ids(amb, tuple(gens)))
            if len(have) == len(ids):
                break
    return tuple(gens)


def meets_center(g: Subgroup) -> bool:
    """True iff the subgroup contains a nontrivial scalar matrix."""
    amb = g.ambient
    ids = g.id_set
    return any(int(s) in ids for s in amb.scalar_ids if int(s) != amb.identity_id)


def det_image_order(g: Subgroup) -> int:
    amb = g.ambient
    return len({int(amb.dets[i]) for i in g.element_ids})


def p_sylow(g: Subgroup) -> Subgroup:
    """One Sylow p-subgroup, chosen deterministically.

    Seeded by the first element of maximal p-power order in canonical
    order, then extended greedily while the index is still divisible by p.
    """
    p = g.p
    amb = g.ambient
    target = 1
    while g.order % (target * p) == 0:
        target *= p
    if target == 1:
        return subgroup_from_ids(p, (amb.identity_id,), ())
    p_power_elts = []
    for eid in g.element_ids:
        o = amb.order_of(eid)
        if o > 1 and _is_p_power(o, p):
            p_power_elts.append((o, eid))
    max_order = max(o for o, _ in p_power_elts)
    seed = next(eid for o, eid in p_power_elts if o == max_order)
    gens = [seed]
    current = _closure_ids(amb, tuple(gens))
    while len(current) < target:
        cur_set = set(current)
        extended = False
        for o, eid in p_power_elts:
            if eid in cur_set:
                continue
            candidate = _closure_ids(amb, tuple(gens + [eid]))
            if _is_p_power(len(candidate), p) and set(candidate) <= g.id_set:
                gens.append(eid)
                current = candidate
                extended = True
                break
        if not extended:
            raise InternalInconsistency("could not extend to a full Sylow subgroup")
    return Subgroup(p, tuple(gens), tuple(sorted(current)))


def _is_p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def normalizer_in(g: Subgroup, h: Subgroup) -> Subgroup:
    """Normalizer of h inside g, by elementwise conjugation test."""
    if not h.is_subset_of(g):
        raise ValueError("h must be a subgroup of g")
    amb = g.ambient
    h_sorted = np.asarray(h.element_ids, dtype=np.int32)
    h_set = h.id_set
    found = []
    for x in g.element_ids:
        conj = amb.conjugate_set(x, h_sorted)
        if all(int(c) in h_set for c in conj):
            found.append(x)
    return subgroup_from_ids(g.p, found)


def s3_copy(p):
    """The standard S3 inside GL2(F_p), from its 2-dimensional integral model.

    The representation is the sum-zero plane of the coordinate-permutation
    action on F_p^3 in the basis (e1 - e2, e2 - e3); it is faithful for
    every prime p and its determinant is the sign of the permutation.
    Returns (subgroup, transposition_id, three_cycle_id).
    """
    amb = ambient(p)
    transposition = ((-1, 1), (0, 1))
    three_cycle = ((0, -1), (1, -1))
    t_id = amb.id_of_mat(tuple(tuple(x % p for x in row) for row in transposition))
    c_id = amb.id_of_mat(tuple(tuple(x % p for x in row) for row in three_cycle))
    group = Subgroup(p, (t_id, c_id), _closure_ids(amb, (t_id, c_id)))
    if group.order != 6:
        raise InternalInconsistency(f"S3 model degenerated at p={p}")
    return group, t_id, c_id


def embeds_in_s3(g: Subgroup) -> bool:
    """True iff g lies inside some subgroup of GL2(F_p) isomorphic to S3."""
    n = g.order
    if n not in (1, 2, 3, 6):
        return False
    amb = g.ambient
    if n == 1:
        return True
    if n == 6:
        ids = g.element_ids
        return any(
            amb.mul_ids(x, y) != amb.mul_ids(y, x) for x in ids for y in ids
        )
    if n == 3:
        s = next(i for i in g.element_ids if i != amb.identity_id)
        s_inv = int(amb.inv[s])
        for t in amb.ids_with_power_identity(2):
            t = int(t)
            if t == amb.identity_id:
                continue
            if amb.mul_ids(amb.mul_ids(t, s), int(amb.inv[t])) == s_inv:
                return True
        return False
    # n == 2: look for an order-3 element inverted by the involution
    t = next(i for i in g.element_ids if i != amb.identity_id)
    t_inv = int(amb.inv[t])
    for s in amb.ids_with_power_identity(3):
        s = int(s)
        if s == amb.identity_id:
            continue
        if amb.mul_ids(amb.mul_ids(t, s), t_inv) == int(amb.inv[s]):
            return True
    return False


def _gens_stabilize_line(amb, gen_ids, line_idx):
    return all(amb.line_image(g, line_idx) == line_idx for g in gen_ids)


def invariant_line(g: Subgroup):
    """Index of a line of F_p^2 fixed setwise by the whole subgroup, or None."""
    amb = g.ambient
    gens = g.generator_ids if g.generator_ids else (amb.identity_id,)
    for line_idx in range(g.p + 1):
        if _gens_stabilize_line(amb, gens, line_idx):
            return line_idx
    return None


def _fp2_mul(x, y, r, p):
    return (x[0] * y[0] + r * x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p


def _fp2_inv(x, r, p):
    n = (x[0] * x[0] - r * x[1] * x[1]) % p
    ninv = pow(n, -1, p)
    return x[0] * ninv % p, (-x[1]) * ninv % p


def _nonresidue(p):
    return next(r for r in range(2, p) if pow(r, (p - 1) // 2, p) == p - 1)


def _stabilizes_split_pair(amb, gen_ids, pair):
    l1, l2 = pair
    for g in gen_ids:
        images = {amb.line_image(g, l1), amb.line_image(g, l2)}
        if images != {l1, l2}:
            return False
    return True


def _stabilizes_nonsplit_pair(amb, gen_ids, z, r):
    """Whether all generators stabilize the conjugate line pair [1 : z], [1 : z~]."""
    p = amb.p
    zbar = (z[0], (-z[1]) % p)
    for g in gen_ids:
        m = amb.mats[g]
        a, b = int(m[0, 0]), int(m[0, 1])
        c, d = int(m[1, 0]), int(m[1, 1])
        num = ((c + d * z[0]) % p, d * z[1] % p)
        den = ((a + b * z[0]) % p, b * z[1] % p)
        w = _fp2_mul(num, _fp2_inv(den, r, p), r, p)
        if w != z and w != zbar:
            return False
    return True


def _in_split_torus_normalizer(g: Subgroup):
    amb = g.ambient
    gens = g.generator_ids if g.generator_ids else (amb.identity_id,)
    p = g.p
    for l1 in range(p + 1):
        for l2 in range(l1 + 1, p + 1):
            if _stabilizes_split_pair(amb, gens, (l1, l2)):
                return True
    return False


def _in_nonsplit_torus_normalizer(g: Subgroup):
    amb = g.ambient
    p = g.p
    if p == 2:
        # the nonsplit torus of GL2(F_2) is the cyclic C_3, whose
        # normalizer is all of GL2(F_2): everything qualifies
        return True
    gens = g.generator_ids if g.generator_ids else (amb.identity_id,)
    r = _nonresidue(p)
    for za in range(p):
        for zb in range(1, (p - 1) // 2 + 1):
            if _stabilizes_nonsplit_pair(amb, gens, (za, zb), r):
                return True
    return False


_EXCEPTIONAL_ORDER_PROFILES = {
    12: ("A4", {1: 1, 2: 3, 3: 8}),
    24: ("S4", {1: 1, 2: 9, 3: 8, 4: 6}),
    60: ("A5", {1: 1, 2: 15, 3: 20, 5: 24}),
}


def _projective_order(amb, eid, scalar_set):
    k = 1
    cur = eid
    while cur not in scalar_set:
        cur = amb.mul_ids(cur, eid)
        k += 1
    return k


def classify(g: Subgroup) -> ClassificationTag:
    """Classification tag per the subgroup taxonomy of GL2(F_p).

    The p | #G dichotomy is settled first; overlapping prime-to-p cases are
    resolved with priority split > nonsplit > exceptional.
    """
    p = g.p
    amb = g.ambient
    if g.order % p == 0:
        if invariant_line(g) is not None:
            return ClassificationTag.BOREL_CONTAINED
        t1 = amb.id_of_mat(((1, 1), (0, 1)))
        t2 = amb.id_of_mat(((1, 0), (1, 1)))
        if t1 in g.id_set and t2 in g.id_set:
            return ClassificationTag.CONTAINS_SL2
        raise InternalInconsistency(
            "subgroup with p | order is neither Borel-contained nor contains SL2"
        )
    if _in_split_torus_normalizer(g):
        return ClassificationTag.SPLIT_TORUS_NORMALIZER
    if _in_nonsplit_torus_normalizer(g):
        return ClassificationTag.NONSPLIT_TORUS_NORMALIZER
    scalar_set = set(int(s) for s in amb.scalar_ids)
    image_ids = {}
    for eid in g.element_ids:
        image_ids.setdefault(_projective_rep(amb, eid, scalar_set), eid)
    image_order = len(image_ids)
    if image_order in _EXCEPTIONAL_ORDER_PROFILES:
        name, profile = _EXCEPTIONAL_ORDER_PROFILES[image_order]
        observed = {}
        for rep in image_ids.values():
            o = _projective_order(amb, rep, scalar_set)
            observed[o] = observed.get(o, 0) + 1
        if observed != profile:
            raise InternalInconsistency(
                f"projective image of order {image_order} has order profile "
                f"{observed}, expected {profile}"
            )
        return {
            "A4": ClassificationTag.EXCEPTIONAL_A4,
            "S4": ClassificationTag.EXCEPTIONAL_S4,
            "A5": ClassificationTag.EXCEPTIONAL_A5,
        }[name]
    raise InternalInconsistency(
        f"no classification case matched (order {g.order}, image order {image_order})"
    )


def _projective_rep(amb, eid, scalar_set):
    """Canonical coset representative of eid modulo scalars."""
    best = eid
    for s in scalar_set:
        t = amb.mul_ids(s, eid)
        if t < best:
            best = t
    return best


@dataclass(frozen=True)
class Exhaustive:
    pass


@dataclass(frozen=True)
class Sampled:
    count: int
    seed: int


def enumerate_subgroups(p, mode):
    """Yield subgroups of GL2(F_p), either all of them or a seeded sample.

    Exhaustive mode builds the full subgroup lattice by iterated extension:
    every cyclic subgroup is a seed, and each known subgroup is closed with
    each outside element until a fixpoint.  Sampled mode draws generator
    sets of size <= 3 from a seeded RNG and deduplicates.
    """
    if isinstance(mode, Exhaustive):
        if p > EXHAUSTIVE_MAX_P:
            raise ModeUnsupported(f"exhaustive enumeration only for p <= {EXHAUSTIVE_MAX_P}")
        yield from _enumerate_all(p)
    elif isinstance(mode, Sampled):
        if p > SAMPLING_MAX_P:
            raise ModeUnsupported(f"sampling only for p <= {SAMPLING_MAX_P}")
        yield from _sample(p, mode.count, mode.seed)
    else:
        raise ModeUnsupported(f"unknown mode {mode!r}")


def _enumerate_all(p):
    amb = ambient(p)
    known = {}
    for eid in range(amb.size):
        ids = _closure_ids(amb, (eid,))
        known.setdefault(ids, (eid,))
    trivial = (amb.identity_id,)
    known.setdefault(trivial, ())
    frontier = list(known.items())
    while frontier:
        new_items = []
        for ids, gens in frontier:
            members = set(ids)
            if len(ids) == amb.size:
                continue
            for eid in range(amb.size):
                if eid in members:
                    continue
                bigger = _closure_ids(amb, gens + (eid,))
                if bigger not in known:
                    entry = (gens + (eid,))
                    known[bigger] = entry
                    new_items.append((bigger, entry))
        frontier = new_items
    for ids in sorted(known, key=lambda t: (len(t), t)):
        yield Subgroup(p, known[ids], ids)


def _sample(p, count, seed):
    """Distinct subgroups from seeded <=3-generator draws.

    GL2(F_p) can have fewer subgroups than requested (GL2(F_5) has exactly
    466 in total), so the stream saturates: it stops early, after yielding
    everything it found, once a deterministic attempt or stall budget runs
    out.  Output is a pure function of (p, count, seed).
    """
    amb = ambient(p)
    rng = random.Random(seed)
    seen = set()
    produced = 0
    attempts = 0
    stall = 0
    max_attempts = max(1000, 40 * count)
    max_stall = max(1000, 10 * count)
    while produced < count and attempts < max_attempts and stall < max_stall:
        attempts += 1
        k = rng.randint(1, 3)
        gen_ids = tuple(rng.randrange(amb.size) for _ in range(k))
        ids = _closure_ids(amb, gen_ids)
        if ids in seen:
            stall += 1
            continue
        stall = 0
        seen.add(ids)
        produced += 1
        yield Subgroup(p, gen_ids, ids)
