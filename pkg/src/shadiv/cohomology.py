"""G-modules over F_p: composition factors, isomorphism testing, H^1.

The first cohomology is computed by propagating unknown cocycle values on
the generators along a spanning tree of the Cayley graph; every non-tree
edge contributes linear constraints.  This keeps the unknown count at
dim(M) * #generators independently of |G|.
"""

import threading
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .errors import BudgetExceeded, SizeExceeded
from .fp_linalg import det_raw, kernel_basis, subspace_count
from .gl2 import Subgroup, ambient, invariant_line

H1_MAX_ORDER = 10 ** 4
ISO_SCAN_BUDGET = 10 ** 6
HOM_CHECK_FULL_MAX = 200


@dataclass(frozen=True, eq=False)
class GModule:
    """Finite-dimensional F_p representation of an explicit subgroup.

    mats[i] is the matrix of the i-th element in the subgroup's canonical
    element order; vectors are columns and matrices act on the left.
    """

    subgroup: Subgroup
    dim: int
    mats: np.ndarray

    @property
    def p(self):
        return self.subgroup.p

    @property
    def gen_mats(self):
        pos = _position_index(self.subgroup)
        return self.mats[[pos[g] for g in self.subgroup.generator_ids]]

    def action_of(self, element_id):
        return self.mats[_position_index(self.subgroup)[element_id]]

    def character_values(self):
        """For a 1-dimensional module, the map element -> F_p*."""
        if self.dim != 1:
            raise ValueError("not a character")
        return {
            eid: int(self.mats[i, 0, 0])
            for i, eid in enumerate(self.subgroup.element_ids)
        }


@lru_cache(maxsize=256)
def _position_index(subgroup):
    return {eid: i for i, eid in enumerate(subgroup.element_ids)}


def make_standard_module(g: Subgroup) -> GModule:
    """The tautological 2-dimensional module: action by inclusion."""
    amb = g.ambient
    return GModule(g, 2, amb.mats[list(g.element_ids)].copy())


def make_adjoint_module(g: Subgroup) -> GModule:
    """End(V) with conjugation action, in the basis E11, E12, E21, E22."""
    amb = g.ambient
    return GModule(g, 4, amb.ad_mats[list(g.element_ids)].copy())


def character_module(g: Subgroup, values) -> GModule:
    """A 1-dimensional module from an element -> F_p* value map."""
    return gmodule_from_action(g, 1, {eid: ((values[eid],),) for eid in g.element_ids})


def gmodule_from_action(g: Subgroup, dim, action):
    """Build a GModule from an element -> matrix map, checking it is a hom.

    The homomorphism property is verified on all pairs for |G| <= 200 and
    on generator x element pairs for larger groups.
    """
    p = g.p
    mats = np.zeros((g.order, dim, dim), dtype=np.int64)
    for i, eid in enumerate(g.element_ids):
        mat = action[eid] if not callable(action) else action(eid)
        mats[i] = np.asarray(mat, dtype=np.int64) % p
    mod = GModule(g, dim, mats)
    _validate_hom(mod)
    return mod


def _validate_hom(mod):
    g = mod.subgroup
    amb = g.ambient
    p = g.p
    pos = _position_index(g)
    ident = mod.mats[pos[amb.identity_id]]
    if not np.array_equal(ident % p, np.eye(mod.dim, dtype=np.int64)):
        raise ValueError("action(identity) != identity matrix")
    if g.order <= HOM_CHECK_FULL_MAX:
        left = g.element_ids
    else:
        left = g.generator_ids
    for a in left:
        for b in g.element_ids:
            ab = amb.mul_ids(a, b)
            lhs = mod.mats[pos[a]] @ mod.mats[pos[b]] % p
            if not np.array_equal(lhs, mod.mats[pos[ab]]):
                raise ValueError("action is not a homomorphism")


# ---------------------------------------------------------------------------
# invariant subspace machinery (echelon representatives, vectorized scan)


_rref_cache = {}
_rref_lock = threading.Lock()


def _echelon_bases(p, n, d):
    """All d-dim subspaces of F_p^n grouped by pivot columns.

    Returns a list of (pivot_cols, bases) with bases of shape (m, d, n).
    """
    key = (p, n, d)
    with _rref_lock:
        if key not in _rref_cache:
            if subspace_count(p, n, d) > 10 ** 6:
                raise BudgetExceeded("subspace enumeration budget exceeded")
            groups = []
            for pivots in combinations(range(n), d):
                free_positions = []
                for i, piv in enumerate(pivots):
                    for col in range(piv + 1, n):
                        if col not in pivots:
                            free_positions.append((i, col))
                shape_count = p ** len(free_positions)
                bases = np.zeros((shape_count, d, n), dtype=np.int64)
                for i, piv in enumerate(pivots):
                    bases[:, i, piv] = 1
                for idx, values in enumerate(product(range(p), repeat=len(free_positions))):
                    for (i, col), val in zip(free_positions, values):
                        bases[idx, i, col] = val
                groups.append((pivots, bases))
            _rref_cache[key] = groups
    return _rref_cache[key]


def _invariant_mask(gen_mats, p, pivots, bases):
    """Boolean mask of which echelon bases span invariant subspaces."""
    mask = np.ones(len(bases), dtype=bool)
    piv = list(pivots)
    for m in gen_mats:
        if not mask.any():
            break
        w = bases @ m.T % p
        coords = w[:, :, piv]
        residual = (w - coords @ bases) % p
        mask &= ~residual.any(axis=(1, 2))
    return mask


def invariant_subspaces(gen_mats, p, n, d):
    """All d-dim subspaces invariant under every generator, as RREF bases."""
    if d == 0:
        return [np.zeros((0, n), dtype=np.int64)]
    found = []
    gen_mats = np.asarray(gen_mats, dtype=np.int64) % p
    for pivots, bases in _echelon_bases(p, n, d):
        mask = _invariant_mask(gen_mats, p, pivots, bases)
        found.extend(bases[mask])
    return found


def _first_invariant_subspace(gen_mats, p, n, max_dim):
    """First (canonical) invariant subspace of minimal dimension, or None."""
    gen_mats = np.asarray(gen_mats, dtype=np.int64) % p
    for d in range(1, max_dim + 1):
        for pivots, bases in _echelon_bases(p, n, d):
            mask = _invariant_mask(gen_mats, p, pivots, bases)
            idx = np.nonzero(mask)[0]
            if len(idx):
                return bases[int(idx[0])], list(pivots)
    return None, None


# ---------------------------------------------------------------------------
# composition factors and isomorphism


def composition_factors(m: GModule):
    """Jordan-Holder factors of m, as a list of irreducible GModules."""
    if m.dim > 4:
        raise ValueError("modules of dimension > 4 are out of scope")
    if m.dim == 0:
        return []
    p = m.p
    gens = m.gen_mats if len(m.subgroup.generator_ids) else np.eye(m.dim, dtype=np.int64)[None]
    basis, pivots = _first_invariant_subspace(gens, p, m.dim, m.dim - 1)
    if basis is None:
        return [m]
    sub, quot = _split_module(m, basis, pivots)
    return composition_factors(sub) + composition_factors(quot)


def _split_module(m, basis, pivots):
    """Sub and quotient module for an invariant subspace in RREF."""
    p = m.p
    n = m.dim
    d = len(pivots)
    others = [c for c in range(n) if c not in pivots]
    w = m.mats @ basis.T % p  # (|G|, n, d): images of basis vectors as columns
    sub_mats = w[:, pivots, :] % p
    cols = m.mats[:, :, others] % p  # images of the complement unit vectors
    coords = cols[:, pivots, :]
    reduced = (cols - basis.T @ coords) % p
    quot_mats = reduced[:, others, :] % p
    sub = GModule(m.subgroup, d, sub_mats)
    quot = GModule(m.subgroup, n - d, quot_mats)
    return sub, quot


def modules_isomorphic(a: GModule, b: GModule) -> bool:
    """Whether an invertible equivariant map a -> b exists.

    Solves T A(s) = B(s) T on the generators and scans the intertwiner
    space for an invertible element; the scan is exhaustive and
    deterministic, capped by the p^dim budget.
    """
    if a.subgroup != b.subgroup:
        raise ValueError("modules must share their subgroup")
    if a.dim != b.dim:
        return False
    n = a.dim
    p = a.p
    amats = a.gen_mats
    bmats = b.gen_mats
    if len(amats) == 0 or all(
        np.array_equal(x, y) for x, y in zip(amats, bmats)
    ):
        return True  # identity intertwines
    if n == 1:
        return all(int(x[0, 0]) == int(y[0, 0]) for x, y in zip(amats, bmats))
    rows = []
    for s in range(len(amats)):
        A = amats[s]
        B = bmats[s]
        for i in range(n):
            for j in range(n):
                row = [0] * (n * n)
                for k in range(n):
                    row[i * n + k] = (row[i * n + k] + int(A[k, j])) % p
                    row[k * n + j] = (row[k * n + j] - int(B[i, k])) % p
                rows.append(tuple(row))
    basis = kernel_basis(rows, n * n, p)
    dim = len(basis)
    if dim == 0:
        return False
    if p ** dim > ISO_SCAN_BUDGET:
        raise BudgetExceeded(f"intertwiner scan p^{dim} over budget")
    for coeffs in product(range(p), repeat=dim):
        if not any(coeffs):
            continue
        t = [[0] * n for _ in range(n)]
        for c, vec in zip(coeffs, basis):
            if c:
                for i in range(n):
                    for j in range(n):
                        t[i][j] = (t[i][j] + c * vec[i * n + j]) % p
        if det_raw(tuple(tuple(r) for r in t), p) != 0:
            return True
    return False


def common_irreducible_factor(a: GModule, b: GModule) -> bool:
    """Whether some Jordan-Holder factor of a is isomorphic to one of b."""
    fa = composition_factors(a)
    fb = composition_factors(b)
    for x in fa:
        for y in fb:
            if x.dim == y.dim and modules_isomorphic(x, y):
                return True
    return False


# ---------------------------------------------------------------------------
# H^1 by Cayley-tree propagation


@dataclass(frozen=True)
class CohomologyClassSpace:
    dim_z1: int
    dim_b1: int
    h1: int
    basis: tuple  # cocycle value tables: per basis vector, per generator, a vector


class _FpRowReducer:
    """Incremental row reduction mod p with a fixed column count."""

    def __init__(self, ncols, p):
        self.ncols = ncols
        self.p = p
        self.pivot_rows = {}  # leading column -> normalized row (numpy)

    def add(self, row):
        p = self.p
        row = row % p
        while True:
            nz = np.nonzero(row)[0]
            if len(nz) == 0:
                return False
            lead = int(nz[0])
            existing = self.pivot_rows.get(lead)
            if existing is None:
                inv = pow(int(row[lead]), -1, p)
                self.pivot_rows[lead] = row * inv % p
                return True
            row = (row - int(row[lead]) * existing) % p

    @property
    def rank(self):
        return len(self.pivot_rows)

    def kernel(self):
        rows = [tuple(int(x) for x in r) for r in self.pivot_rows.values()]
        return kernel_basis(rows, self.ncols, self.p)


def _cayley_schedule(subgroup):
    """BFS order and edge list of the Cayley graph on the generators.

    Returns (order, tree, extra) where order is the visit order of element
    positions, tree maps visited position -> (parent_pos, gen_index) and
    extra lists non-tree edges (pos, gen_index, target_pos).  Cached by
    (p, elements, generators): Subgroup equality ignores the generator
    set, which the schedule depends on.
    """
    return _cayley_schedule_cached(
        subgroup.p, subgroup.element_ids, subgroup.generator_ids
    )


@lru_cache(maxsize=64)
def _cayley_schedule_cached(p, element_ids, generator_ids):
    from .gl2 import Subgroup as _S

    subgroup = _S(p, generator_ids, element_ids)
    amb = subgroup.ambient
    pos = _position_index(subgroup)
    gens = subgroup.generator_ids
    start = pos[amb.identity_id]
    visited = {start}
    order = [start]
    tree = {}
    extra = []
    queue = [start]
    ids = subgroup.element_ids
    while queue:
        nxt = []
        for src in queue:
            for j, gid in enumerate(gens):
                dst = pos[amb.mul_ids(ids[src], gid)]
                if dst not in visited:
                    visited.add(dst)
                    tree[dst] = (src, j)
                    order.append(dst)
                    nxt.append(dst)
                else:
                    extra.append((src, j, dst))
        queue = nxt
    return tuple(order), tree, tuple(extra)


def h1(g: Subgroup, m: GModule) -> CohomologyClassSpace:
    """H^1(G, M) with explicit cocycle basis on the generators."""
    if g != m.subgroup:
        raise ValueError("module does not belong to the subgroup")
    if g.order > H1_MAX_ORDER:
        raise SizeExceeded(f"|G| = {g.order} exceeds H^1 size limit")
    p = g.p
    n = m.dim
    k = len(g.generator_ids)
    nunk = n * k
    if k == 0:
        return CohomologyClassSpace(0, 0, 0, ())
    pos = _position_index(g)
    order, tree, extra = _cayley_schedule(g)
    gen_pos = [pos[gid] for gid in g.generator_ids]
    t = np.zeros((g.order, n, nunk), dtype=np.int64)
    reducer = _FpRowReducer(nunk, p)
    for dst in order[1:]:
        src, j = tree[dst]
        prop = t[src].copy()
        prop[:, j * n : (j + 1) * n] += m.mats[src]
        t[dst] = prop % p
    for src, j, dst in extra:
        prop = t[src].copy()
        prop[:, j * n : (j + 1) * n] += m.mats[src]
        diff = (prop - t[dst]) % p
        for row in diff:
            reducer.add(row)
    z1_basis = reducer.kernel()
    dim_z1 = len(z1_basis)
    cob_rows = []
    for gp in gen_pos:
        block = (m.mats[gp] - np.eye(n, dtype=np.int64)) % p
        cob_rows.append(block)
    cob = np.concatenate(cob_rows, axis=0)  # (n*k, n): v -> coboundary values
    dim_b1 = _rank_np(cob.T, p)
    basis = tuple(
        tuple(tuple(int(x) for x in vec[j * n : (j + 1) * n]) for j in range(k))
        for vec in z1_basis
    )
    return CohomologyClassSpace(dim_z1, dim_b1, dim_z1 - dim_b1, basis)


def _rank_np(rows, p):
    reducer = _FpRowReducer(rows.shape[1], p)
    for row in np.asarray(rows, dtype=np.int64):
        reducer.add(row.copy())
    return reducer.rank


def h1_star(g: Subgroup, m: GModule) -> int:
    """Dimension of the classes killed by restriction to every cyclic subgroup."""
    if g.order > H1_MAX_ORDER:
        raise SizeExceeded(f"|G| = {g.order} exceeds H^1 size limit")
    p = g.p
    n = m.dim
    k = len(g.generator_ids)
    if k == 0:
        return 0
    space = h1(g, m)
    if space.h1 == 0:
        return 0
    pos = _position_index(g)
    order, tree, extra = _cayley_schedule(g)
    nunk = n * k
    t = np.zeros((g.order, n, nunk), dtype=np.int64)
    for dst in order[1:]:
        src, j = tree[dst]
        prop = t[src].copy()
        prop[:, j * n : (j + 1) * n] += m.mats[src]
        t[dst] = prop % p
    reducer = _FpRowReducer(nunk, p)
    for src, j, dst in extra:
        prop = t[src].copy()
        prop[:, j * n : (j + 1) * n] += m.mats[src]
        for row in (prop - t[dst]) % p:
            reducer.add(row)
    amb = g.ambient
    seen_cyclic = set()
    for eid in g.element_ids:
        members = []
        cur = eid
        while cur != amb.identity_id:
            members.append(cur)
            cur = amb.mul_ids(cur, eid)
        key = frozenset(members)
        if key in seen_cyclic or not members:
            continue
        seen_cyclic.add(key)
        rho = m.mats[pos[eid]]
        shifted = (rho - np.eye(n, dtype=np.int64)) % p
        left_kernel = kernel_basis(
            [tuple(int(x) for x in col) for col in shifted.T], n, p
        )
        for krow in left_kernel:
            constraint = (np.asarray(krow, dtype=np.int64) @ t[pos[eid]]) % p
            reducer.add(constraint)
    dim_w = nunk - reducer.rank
    return dim_w - space.dim_b1


# ---------------------------------------------------------------------------
# characters on a triangularizing datum, and the two criterion sides


def line_character_values(g: Subgroup, line_idx, element_ids=None):
    """Eigenvalue character on a stabilized line, per element."""
    amb = g.ambient
    p = g.p
    v = amb.lines[line_idx]
    values = {}
    for eid in element_ids if element_ids is not None else g.element_ids:
        m = amb.mats[eid]
        w0 = (int(m[0, 0]) * v[0] + int(m[0, 1]) * v[1]) % p
        w1 = (int(m[1, 0]) * v[0] + int(m[1, 1]) * v[1]) % p
        lam = w0 * pow(v[0], -1, p) % p if v[0] else w1 * pow(v[1], -1, p) % p
        values[eid] = lam
    return values


def reducible_characters(g: Subgroup):
    """(chi1, chi2) values on generators if V is reducible, else None.

    chi1 is the sub-character on an invariant line, chi2 the quotient
    character det/chi1, with the first stabilized line in canonical order.
    """
    line_idx = invariant_line(g)
    if line_idx is None:
        return None
    amb = g.ambient
    p = g.p
    gens = g.generator_ids
    chi1 = line_character_values(g, line_idx, gens)
    chi2 = {}
    for eid in gens:
        det = int(amb.dets[eid])
        chi2[eid] = det * pow(chi1[eid], -1, p) % p
    return (
        tuple(chi1[e] for e in gens),
        tuple(chi2[e] for e in gens),
    )


def groupcrit_side_analytic(g: Subgroup) -> bool:
    """No common irreducible factor between V and End(V), and H^1(G, V) = 0."""
    std = make_standard_module(g)
    adj = make_adjoint_module(g)
    if common_irreducible_factor(std, adj):
        return False
    return h1(g, std).h1 == 0


def groupcrit_side_structural(g: Subgroup) -> bool:
    """Not inside an S3 copy; reducible characters avoid 1 and each other's square."""
    from .gl2 import embeds_in_s3

    if embeds_in_s3(g):
        return False
    chars = reducible_characters(g)
    if chars is None:
        return True
    chi1, chi2 = chars
    p = g.p
    one = tuple(1 for _ in chi1)
    chi1_sq = tuple(x * x % p for x in chi1)
    chi2_sq = tuple(x * x % p for x in chi2)
    if chi1 == one or chi1 == chi2_sq:
        return False
    if chi2 == one or chi2 == chi1_sq:
        return False
    return True


# ---------------------------------------------------------------------------
# the Sylow-normalizer datum behind the H^1 vanishing bound


def borel_datum(g: Subgroup):
    """Sylow normalizer data for p | #G: (P, N_G(P), chi1, chi2) or None.

    chi1, chi2 are the diagonal characters of N_G(P) read off a basis in
    which P is the standard unipotent group; chi1 restricts to the
    character of the line fixed by P.
    """
    from .gl2 import normalizer_in, p_sylow

    p = g.p
    if g.order % p != 0:
        return None
    amb = g.ambient
    syl = p_sylow(g)
    norm = normalizer_in(g, syl)
    u = next(i for i in syl.element_ids if i != amb.identity_id)
    umat = amb.mats[u]
    shifted = (umat - np.eye(2, dtype=np.int64)) % p
    line = kernel_basis([tuple(int(x) for x in row) for row in shifted], 2, p)[0]
    if line[0]:
        inv0 = pow(int(line[0]), -1, p)
        line_idx = int(line[1]) * inv0 % p
    else:
        line_idx = p
    chi1 = line_character_values(g, line_idx, norm.element_ids)
    chi2 = {
        eid: int(amb.dets[eid]) * pow(chi1[eid], -1, p) % p
        for eid in norm.element_ids
    }
    return syl, norm, chi1, chi2


def sylow_hom_bound(g: Subgroup):
    """dim Hom_{N_G(P)}(P, chi2), the upper bound for h^1(G, V).

    Computed purely from the normalizer characters: the Hom space is one
    dimensional exactly when chi1 = chi2^2 on N_G(P), else zero.
    """
    datum = borel_datum(g)
    if datum is None:
        return None
    _, norm, chi1, chi2 = datum
    p = g.p
    if all(chi1[e] == chi2[e] * chi2[e] % p for e in norm.element_ids):
        return 1
    return 0
