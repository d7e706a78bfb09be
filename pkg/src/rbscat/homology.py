"""Chain complexes, Smith normal form, and nerve homology.

The nerve of a finite category is truncated at a stated depth D: the
normalized chain groups C_0..C_D have bases the composable chains of
non-identity morphisms, and a face whose composite is an identity
contributes zero.  Homology computed from such a truncation is trusted in
degrees 0..D-1 only; HomologyResult records that range.

Integer homology goes through Smith normal form with arbitrary-precision
integers; a fraction-free rank oracle over Q (Bareiss) is provided as an
independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .guards import DEFAULT, GuardExceeded


# ---------------------------------------------------------------------------
# dense Smith normal form with transforms

def smith_normal_form(A):
    """Full SNF: returns (U, D, V) with U*A*V = D, U, V unimodular and the
    diagonal entries forming a divisibility chain.  Postconditions are
    asserted on every call.

    Classical pivot algorithm: take the smallest nonzero entry as pivot,
    clear its row and column with Euclidean remainder swaps (each swap
    strictly shrinks the pivot), then force the pivot to divide the whole
    remaining block by a row addition and repeat; termination is by
    strict descent of the pivot.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(r) for r in A]
    U = _ident(m)
    V = _ident(n)
    k = 0
    while True:
        piv = _smallest_pivot(D, k)
        if piv is None:
            break
        pi, pj = piv
        _swap_rows(D, U, k, pi)
        _swap_cols(D, V, k, pj)
        if D[k][k] < 0:
            _scale_row(D, U, k, -1)
        while True:
            # clear column k below the pivot
            restart = False
            for i in range(k + 1, m):
                if D[i][k]:
                    q = D[i][k] // D[k][k]
                    if q:
                        _row_op(D, U, i, k, -q)
                    if D[i][k]:
                        # remainder in (0, pivot): promote it and restart
                        _swap_rows(D, U, k, i)
                        restart = True
                        break
            if restart:
                continue
            # clear row k to the right of the pivot
            for j in range(k + 1, n):
                if D[k][j]:
                    q = D[k][j] // D[k][k]
                    if q:
                        _col_op(D, V, j, k, -q)
                    if D[k][j]:
                        _swap_cols(D, V, k, j)
                        restart = True
                        break
            if restart:
                continue  # column may have been disturbed by the col ops
            if any(D[i][k] for i in range(k + 1, m)) or \
               any(D[k][j] for j in range(k + 1, n)):
                continue
            # pivot must divide every remaining entry for the chain
            bad = None
            for i in range(k + 1, m):
                for j in range(k + 1, n):
                    if D[i][j] % D[k][k] != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            _row_op(D, U, k, bad, 1)  # mixes a non-multiple into row k
        k += 1
    _assert_snf(A, U, D, V, k)
    return U, D, V


def _ident(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _smallest_pivot(D, k):
    best = None
    best_val = None
    for i in range(k, len(D)):
        for j in range(k, len(D[0]) if D else 0):
            v = abs(D[i][j])
            if v and (best_val is None or v < best_val):
                best, best_val = (i, j), v
                if v == 1:
                    return best
    return best


def _swap_rows(D, U, a, b):
    if a != b:
        D[a], D[b] = D[b], D[a]
        U[a], U[b] = U[b], U[a]


def _swap_cols(D, V, a, b):
    if a != b:
        for row in D:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]


def _row_op(D, U, i, k, c):
    D[i] = [x + c * y for x, y in zip(D[i], D[k])]
    U[i] = [x + c * y for x, y in zip(U[i], U[k])]


def _col_op(D, V, j, k, c):
    for row in D:
        row[j] += c * row[k]
    for row in V:
        row[j] += c * row[k]


def _scale_row(D, U, i, c):
    D[i] = [c * x for x in D[i]]
    U[i] = [c * x for x in U[i]]


def _mat_mul(A, B):
    n = len(B[0]) if B else 0
    Bt = list(zip(*B)) if B else []
    return [[sum(x * y for x, y in zip(row, col)) for col in Bt] for row in A]


def _det_unimodular(M):
    """Exact determinant by fraction-free elimination; must be +-1."""
    n = len(M)
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * (A[n - 1][n - 1] if n else 1)


def _assert_snf(A, U, D, V, rank):
    prod = _mat_mul(_mat_mul(U, [list(r) for r in A]), V)
    assert prod == D, "U*A*V != D"
    for i in range(len(D)):
        for j in range(len(D[0]) if D else 0):
            if i != j:
                assert D[i][j] == 0, "D not diagonal"
    diag = [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]
    for i in range(rank - 1):
        assert diag[i] != 0 and diag[i + 1] % diag[i] == 0, "divisibility fails"
    for i in range(rank, len(diag)):
        assert diag[i] == 0
    assert abs(_det_unimodular(U)) == 1, "U not unimodular"
    assert abs(_det_unimodular(V)) == 1, "V not unimodular"


def snf_diagonal(A):
    """Invariant factors of a dense integer matrix (no transforms)."""
    U, D, V = smith_normal_form(A)
    k = min(len(D), len(D[0]) if D else 0)
    return [D[i][i] for i in range(k) if D[i][i] != 0]


# ---------------------------------------------------------------------------
# sparse integer column reduction (image lattice + invariant factors)

class IntegerLattice:
    """Row-echelon integer lattice accumulator (columns streamed in).

    Vectors are dicts {coordinate: value}.  After all columns are added,
    `basis` holds echelon generators of the lattice they span.
    """

    def __init__(self):
        self.pivots = {}  # leading coordinate -> vector (dict)

    def add(self, vec):
        v = {k: x for k, x in vec.items() if x}
        while v:
            j = min(v)
            if j not in self.pivots:
                self.pivots[j] = v
                return True
            row = self.pivots[j]
            a, b = row[j], v[j]
            if b % a == 0:
                q = b // a
                v = _vec_sub(v, row, q)
            else:
                g, s, t = _xgcd_int(a, b)
                new_row = _vec_comb(row, v, s, t)
                # replacement has entry g at j; express both against it
                v = _vec_sub(v, new_row, b // g)
                self.pivots[j] = new_row
                v2 = _vec_sub(row, new_row, a // g)
                if v2:
                    # re-add the tail of the displaced row
                    self.add(v2)
        return False

    @property
    def rank(self):
        return len(self.pivots)

    def basis_matrix(self, dense_cols=None):
        """Dense matrix of the echelon basis restricted to its support."""
        if dense_cols is None:
            support = sorted({k for v in self.pivots.values() for k in v})
        else:
            support = list(dense_cols)
        colmap = {c: i for i, c in enumerate(support)}
        rows = []
        for j in sorted(self.pivots):
            v = self.pivots[j]
            row = [0] * len(support)
            for k, x in v.items():
                row[colmap[k]] = x
            rows.append(row)
        return rows


def _vec_sub(v, row, q):
    if q == 0:
        return v
    out = dict(v)
    for k, x in row.items():
        y = out.get(k, 0) - q * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def _vec_comb(u, v, s, t):
    out = {}
    for k, x in u.items():
        out[k] = s * x
    for k, x in v.items():
        y = out.get(k, 0) + t * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return {k: x for k, x in out.items() if x}


def _xgcd_int(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def sparse_invariant_factors(columns):
    """Invariant factors of the integer matrix given by sparse columns
    (each column a dict row->value)."""
    lat = IntegerLattice()
    for col in columns:
        lat.add(col)
    if not lat.pivots:
        return []
    basis = lat.basis_matrix()
    factors = snf_diagonal(basis) if len(basis) <= 120 else \
        _invariant_factors_sparse_first(basis)
    return factors


def _invariant_factors_sparse_first(rows):
    """Eliminate unit pivots cheaply, then dense SNF on the small core."""
    work = [{j: x for j, x in enumerate(r) if x} for r in rows]
    work = [r for r in work if r]
    ones = 0
    progress = True
    while progress:
        progress = False
        for i, row in enumerate(work):
            unit_col = next((j for j, x in row.items() if abs(x) == 1), None)
            if unit_col is None:
                continue
            val = row[unit_col]
            for i2, other in enumerate(work):
                if i2 != i and unit_col in other:
                    q = other[unit_col] * val  # val in {1,-1}
                    work[i2] = _vec_sub(other, row, q)
            work.pop(i)
            work = [r for r in work if r]
            ones += 1
            progress = True
            break
    if not work:
        return [1] * ones
    support = sorted({j for r in work for j in r})
    colmap = {c: i for i, c in enumerate(support)}
    dense = [[0] * len(support) for _ in work]
    for i, r in enumerate(work):
        for j, x in r.items():
            dense[i][colmap[j]] = x
    core = snf_diagonal(dense)
    return [1] * ones + core


def sparse_rank_mod(columns, ell, nrows=None):
    """Rank over F_ell of the matrix given by sparse columns."""
    pivots = {}  # row -> reduced column (dict), leading entry 1
    rank = 0
    for col in columns:
        v = {k: x % ell for k, x in col.items() if x % ell}
        while v:
            j = min(v)
            if j in pivots:
                c = v[j]
                row = pivots[j]
                out = dict(v)
                for k, x in row.items():
                    y = (out.get(k, 0) - c * x) % ell
                    if y:
                        out[k] = y
                    else:
                        out.pop(k, None)
                v = out
            else:
                inv = pow(v[j], ell - 2, ell)
                pivots[j] = {k: (inv * x) % ell for k, x in v.items()}
                rank += 1
                break
    return rank


# ---------------------------------------------------------------------------
# chain complexes

@dataclass
class ChainComplex:
    """Non-negatively graded complex with integer boundary matrices.

    dims[k] is the rank of C_k; boundaries[k] (for 1 <= k <= D) is the
    sparse matrix of d_k: C_k -> C_{k-1}, stored column-wise as a list of
    dicts {row: coefficient}.  d_{k-1} . d_k = 0 is verified on build.
    """

    dims: list
    boundaries: dict  # degree -> list of sparse columns
    labels: dict = field(default_factory=dict)  # degree -> basis labels
    complete: bool = False  # True when C_{depth+1} = 0 (untruncated complex)

    @property
    def depth(self):
        return len(self.dims) - 1

    def verify_boundary_squared(self):
        for k in range(2, self.depth + 1):
            dk = self.boundaries.get(k, [])
            dk1 = self.boundaries.get(k - 1, [])
            for col in dk:
                acc = {}
                for r, c in col.items():
                    for r2, c2 in dk1[r].items():
                        acc[r2] = acc.get(r2, 0) + c * c2
                if any(v != 0 for v in acc.values()):
                    raise AssertionError("d.d != 0 in degree %d" % k)
        return True


@dataclass
class HomologyResult:
    """Betti numbers (and torsion over Z) for degrees 0..trusted_max."""

    coefficients: str          # "Z" or "F<ell>"
    betti: dict                # degree -> rank
    torsion: dict              # degree -> sorted list of invariant factors > 1
    trusted_max: int
    dims: list

    def reduced_betti(self, k):
        b = self.betti.get(k)
        if b is None:
            return None
        return b - 1 if k == 0 else b


def homology(complex_, coefficients="Z", reduced=False):
    """Homology of a truncated complex; degrees 0..depth-1 are certified.

    Over Z returns Betti numbers and torsion via Smith normal form; over
    F_ell (coefficients "F2", "F3", ...) returns Betti numbers via ranks.
    """
    D = complex_.depth
    dims = complex_.dims
    top = D + 1 if complex_.complete else D
    if coefficients == "Z":
        rank = {0: 0}
        tors = {}
        for k in range(1, D + 1):
            cols = complex_.boundaries.get(k, [])
            facs = sparse_invariant_factors(cols)
            rank[k] = len(facs)
            tors[k - 1] = sorted(f for f in facs if f not in (1, -1))
        betti = {}
        torsion = {}
        for k in range(0, top):
            betti[k] = dims[k] - rank.get(k, 0) - rank.get(k + 1, 0)
            torsion[k] = tors.get(k, [])
        return HomologyResult("Z", betti, torsion, top - 1, list(dims))
    if coefficients.startswith("F"):
        ell = int(coefficients[1:])
        if ell < 2 or any(ell % d == 0 for d in range(2, ell)):
            raise ValueError("homology coefficients need a prime ell, got %d" % ell)
        rank = {0: 0}
        for k in range(1, D + 1):
            rank[k] = sparse_rank_mod(complex_.boundaries.get(k, []), ell)
        betti = {k: dims[k] - rank.get(k, 0) - rank.get(k + 1, 0)
                 for k in range(0, top)}
        return HomologyResult(coefficients, betti, {}, top - 1, list(dims))
    raise ValueError("unknown coefficients %r" % (coefficients,))


# ---------------------------------------------------------------------------
# nerves

def nerve_chain_complex(C, depth, guards=DEFAULT):
    """Normalized nerve chains of a finite category up to the given depth.

    C_k has basis the composable chains (f_1, ..., f_k) of non-identity
    morphisms; the i-th face composes f_{i+1} . f_i (contributing zero if
    the composite is an identity) and the outer faces drop an end.
    """
    non_id = C.non_identity_morphisms()
    out_of = {}
    for f in non_id:
        out_of.setdefault(C.src[f], []).append(f)
    # degree 0: objects
    labels = {0: list(range(C.n_objects))}
    dims = [C.n_objects]
    boundaries = {}
    chains = [(f,) for f in sorted(non_id)]
    index_prev = {}
    k = 1
    while k <= depth:
        if len(chains) > guards.max_simplices_per_degree:
            raise GuardExceeded(
                "nerve has %d nondegenerate %d-simplices > max_simplices_per_degree=%d"
                % (len(chains), k, guards.max_simplices_per_degree))
        index_here = {ch: i for i, ch in enumerate(chains)}
        cols = []
        ids = set(C.identity_of)
        for ch in chains:
            col = {}
            if k == 1:
                f = ch[0]
                col[C.tgt[f]] = col.get(C.tgt[f], 0) + 1
                col[C.src[f]] = col.get(C.src[f], 0) - 1
            else:
                # face 0: drop first arrow
                face = ch[1:]
                _acc(col, index_prev[face], 1)
                sign = -1
                for i in range(k - 1):
                    comp = C.comp[(ch[i + 1], ch[i])]
                    if comp not in ids:
                        face = ch[:i] + (comp,) + ch[i + 2:]
                        _acc(col, index_prev[face], sign)
                    sign = -sign
                face = ch[:-1]
                _acc(col, index_prev[face], sign)
            cols.append({r: v for r, v in col.items() if v})
        boundaries[k] = cols
        labels[k] = list(chains)
        dims.append(len(chains))
        if k == depth:
            break
        nxt = []
        for ch in chains:
            for g in out_of.get(C.tgt[ch[-1]], ()):
                nxt.append(ch + (g,))
        index_prev = index_here
        chains = nxt
        k += 1
    cx = ChainComplex(dims, boundaries, labels)
    cx.verify_boundary_squared()
    return cx


def _acc(col, idx, sign):
    col[idx] = col.get(idx, 0) + sign


def nerve_simplex_counts(C, depth, guards=DEFAULT):
    """Per-degree counts of nondegenerate simplices (cheap, no boundaries)."""
    non_id = C.non_identity_morphisms()
    out_of = {}
    for f in non_id:
        out_of.setdefault(C.src[f], []).append(f)
    counts = [C.n_objects]
    chains = [(f,) for f in non_id]
    for k in range(1, depth + 1):
        counts.append(len(chains))
        if len(chains) > guards.max_simplices_per_degree:
            raise GuardExceeded("nerve count exceeds guard in degree %d" % k)
        if k == depth:
            break
        chains = [ch + (g,) for ch in chains for g in out_of.get(C.tgt[ch[-1]], ())]
    return counts


# ---------------------------------------------------------------------------
# simplicial complexes (order complexes, corpus spaces)

def chain_complex_from_facets(facets):
    """Simplicial chain complex from maximal faces (vertices comparable)."""
    simplices = {}
    for f in facets:
        f = tuple(sorted(set(f)))
        for k in range(len(f)):
            for face in _subsets(f, k + 1):
                simplices.setdefault(k, set()).add(face)
    if not simplices:
        return ChainComplex([0], {}, complete=True)
    top = max(simplices)
    labels = {k: sorted(simplices.get(k, ())) for k in range(top + 1)}
    index = {k: {s: i for i, s in enumerate(labels[k])} for k in labels}
    dims = [len(labels[k]) for k in range(top + 1)]
    boundaries = {}
    for k in range(1, top + 1):
        cols = []
        for s in labels[k]:
            col = {}
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                col[index[k - 1][face]] = 1 if i % 2 == 0 else -1
            cols.append(col)
        boundaries[k] = cols
    cx = ChainComplex(dims, boundaries, labels, complete=True)
    cx.verify_boundary_squared()
    return cx


def _subsets(t, size):
    import itertools
    return itertools.combinations(t, size)


def order_complex(poset):
    """Order complex of a poset: simplices are the chains."""
    elements = list(poset.elements)
    facets = []

    def extend(chain):
        extended = False
        last = chain[-1]
        for e in elements:
            if e != last and poset.leq(last, e):
                if all(x == e or poset.leq(x, e) for x in chain):
                    extend(chain + [e])
                    extended = True
        if not extended:
            facets.append(tuple(poset.index[x] for x in chain))

    for e in elements:
        if not any(x != e and poset.leq(x, e) for x in elements):
            extend([e])
    # ensure isolated/missed elements appear
    covered = {v for f in facets for v in f}
    for e in elements:
        if poset.index[e] not in covered:
            facets.append((poset.index[e],))
    return chain_complex_from_facets(facets)


# ---------------------------------------------------------------------------
# independent rank oracle (fraction-free over Q)

def bareiss_rank(A):
    """Exact rank of an integer matrix by fraction-free elimination."""
    M = [list(r) for r in A]
    m = len(M)
    n = len(M[0]) if m else 0
    rank = 0
    prev = 1
    row = 0
    for col in range(n):
        piv = None
        for i in range(row, m):
            if M[i][col]:
                piv = i
                break
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        for i in range(row + 1, m):
            for j in range(col + 1, n):
                M[i][j] = (M[i][j] * M[row][col] - M[i][col] * M[row][j]) // prev
            M[i][col] = 0
        prev = M[row][col]
        row += 1
        rank += 1
        if row == m:
            break
    return rank


def betti_via_rank_oracle(complex_):
    """Betti numbers over Q by dense fraction-free ranks (naive oracle)."""
    D = complex_.depth
    rank = {0: 0}
    for k in range(1, D + 1):
        cols = complex_.boundaries.get(k, [])
        dense = [[0] * len(cols) for _ in range(complex_.dims[k - 1])]
        for j, col in enumerate(cols):
            for r, v in col.items():
                dense[r][j] = v
        rank[k] = bareiss_rank(dense) if cols else 0
    top = D + 1 if complex_.complete else D
    return {k: complex_.dims[k] - rank.get(k, 0) - rank.get(k + 1, 0)
            for k in range(0, top)}
