"""
Codebook sparsification on the Grassmann manifold.

Two routes to a sparse precoder P with exactly nt nonzeros that spans (or
nearly spans) the same subspace as a dense precoder W:

* exact: find a unitary U with W U supported on a given pattern. This works
  iff every block's zero constraints leave a nonzero direction in C^ns.
* SPCA: for each pattern, maximize ``sum_j p_j^H W W^H p_j`` with column j
  supported on block j; the optimum per block is the top eigenvector of
  the principal submatrix of ``W W^H``. The best pattern over all
  candidates gives the minimum chordal distance over all patterns.

`build_sparse_codebook` tries the exact route pattern by pattern and falls
back to SPCA only when no pattern admits an exact solution.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .codebook_io import Codebook
from .grassmann import chordal_distance
from .numeric import DEFAULT_TOL, hermitian_top_eigpair, pseudoinverse, svd
from .patterns import SparsityPattern, enumerate_patterns


class Method(str, enum.Enum):
    EXACT = "exact"
    SPCA = "spca"


@dataclass(frozen=True)
class ExactAttemptResult:
    feasible: bool
    unitary: Optional[np.ndarray] = None
    sparse: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SpcaResult:
    pattern: SparsityPattern
    objective: float
    sparse: np.ndarray


@dataclass(frozen=True)
class SparsifyReport:
    index: int
    method: Method
    pattern: SparsityPattern
    chordal_dist: float
    distortion: float

    def to_dict(self) -> dict:
        return {
            "index": self.index + 1,
            "method": self.method.value,
            "pattern": str(self.pattern),
            "chordal_dist": self.chordal_dist,
            "distortion": self.distortion,
        }


def normalize_column_phases(p: np.ndarray) -> np.ndarray:
    """Rotate each column so its first nonzero entry is real and positive."""
    p = np.array(p, dtype=np.complex128)
    for j in range(p.shape[1]):
        nz = np.flatnonzero(np.abs(p[:, j]) > 1e-12)
        if nz.size:
            x = p[nz[0], j]
            p[:, j] *= np.conj(x) / abs(x)
            p[nz[0], j] = abs(p[nz[0], j])
    return p


def nullspace_projector(w, jset: Sequence[int], tol: float = DEFAULT_TOL) -> np.ndarray:
    """Projector in C^ns onto ker(W[jset, :]): ``I - W_J^+ W_J``."""
    w = np.asarray(w, dtype=np.complex128)
    ns = w.shape[1]
    wj = w[list(jset), :]
    q = np.eye(ns, dtype=complex) - pseudoinverse(wj, tol) @ wj
    return 0.5 * (q + q.conj().T)


def try_exact(w, pattern: SparsityPattern, tol: float = DEFAULT_TOL) -> ExactAttemptResult:
    """
    Attempt exact sparsification of `w` onto `pattern` via a unitary rotation.

    Columns of U are built one at a time. At step j the null-space projector
    of the rows that column j must zero is deflated against the columns
    already accepted; its dominant left singular vector becomes u_j. A
    largest singular value at or below `tol` means the intersection is empty
    and the pattern is infeasible.

    On success the off-pattern entries of ``W U`` (at most ``10 * tol``) are
    set to exact zeros, columns are renormalized and phase-normalized, and
    `unitary` is returned consistent with the final `sparse`.
    """
    w = np.asarray(w, dtype=np.complex128)
    nt, ns = w.shape
    if pattern.nt != nt or pattern.ns != ns:
        raise ValueError(f"pattern is {pattern.nt}x{pattern.ns}, precoder is {nt}x{ns}")

    eye = np.eye(ns, dtype=complex)
    taken = np.zeros((ns, ns), dtype=complex)
    cols = []
    for j in range(ns):
        q = nullspace_projector(w, pattern.complement(j), tol)
        lsv, s, _ = svd((eye - taken) @ q)
        if s[0] <= tol:
            return ExactAttemptResult(False)
        u = lsv[:, 0]
        cols.append(u)
        taken += np.outer(u, u.conj())

    p = w @ np.column_stack(cols)
    mask = pattern.mask()
    if np.abs(p[~mask]).max(initial=0.0) > 10 * tol:
        return ExactAttemptResult(False)
    p[~mask] = 0.0
    p /= np.linalg.norm(p, axis=0)
    p = normalize_column_phases(p)
    return ExactAttemptResult(True, w.conj().T @ p, p)


def spca_block(w, iset: Sequence[int]):
    """
    Best unit column supported on `iset`.

    Returns the top eigenvalue of ``(W W^H)[iset, iset]`` and its eigenvector
    embedded at `iset` (zeros elsewhere) as a length-nt vector.
    """
    w = np.asarray(w, dtype=np.complex128)
    idx = list(iset)
    wi = w[idx, :]
    lam, b = hermitian_top_eigpair(wi @ wi.conj().T)
    col = np.zeros(w.shape[0], dtype=complex)
    col[idx] = b
    return min(max(lam, 0.0), 1.0), col


_TABLES: dict = {}


def _pattern_table(patterns):
    # Distinct support sets as index arrays grouped by size, and each
    # pattern's blocks as positions in the concatenated group order.
    # Cached per patterns object.
    hit = _TABLES.get(id(patterns))
    if hit is not None and hit[0] is patterns:
        return hit[1], hit[2]
    if len({(pat.nt, pat.ns) for pat in patterns}) != 1:
        raise ValueError("candidate patterns have mixed dimensions")
    distinct = sorted({b for pat in patterns for b in pat.blocks}, key=lambda b: (len(b), b))
    pos = {b: i for i, b in enumerate(distinct)}
    groups = {}
    for b in distinct:
        groups.setdefault(len(b), []).append(b)
    groups = [np.array(g, dtype=np.intp) for g in groups.values()]
    table = np.array([[pos[b] for b in pat.blocks] for pat in patterns], dtype=np.intp)
    if isinstance(patterns, tuple):
        if len(_TABLES) > 32:
            _TABLES.clear()
        _TABLES[id(patterns)] = (patterns, groups, table)
    return groups, table


def _block_eigenvalues(w: np.ndarray, groups) -> np.ndarray:
    """Top eigenvalue of ``(W W^H)[I, I]`` for every support set I.

    ``W_I W_I^H`` and ``W_I^H W_I`` share nonzero eigenvalues, so each
    eigenproblem is at most ns x ns.
    """
    ns = w.shape[1]
    out = []
    for idx in groups:
        rows = w[idx]  # (g, k, ns)
        if idx.shape[1] > ns:
            a = rows.conj().transpose(0, 2, 1) @ rows
        else:
            a = rows @ rows.conj().transpose(0, 2, 1)
        a = 0.5 * (a + a.conj().transpose(0, 2, 1))
        out.append(np.linalg.eigvalsh(a)[:, -1])
    return np.clip(np.concatenate(out), 0.0, 1.0)


def spca_sparsify(w, patterns: Optional[Sequence[SparsityPattern]] = None) -> SpcaResult:
    """
    Exhaustive SPCA over candidate patterns.

    The objective of a pattern is the sum of its blocks' top eigenvalues. A
    block's eigenvalue does not depend on the rest of the pattern, so each
    distinct support set is decomposed once. Ties go to the earliest pattern.
    """
    w = np.asarray(w, dtype=np.complex128)
    if patterns is None:
        patterns = enumerate_patterns(*w.shape)
    if len(patterns) == 0:
        raise ValueError("need at least one candidate pattern")
    nt, ns = w.shape
    groups, table = _pattern_table(patterns)
    if patterns[0].nt != nt or table.shape[1] != ns:
        raise ValueError(f"patterns are {patterns[0].nt}x{table.shape[1]}, precoder is {nt}x{ns}")
    lam = _block_eigenvalues(w, groups)
    scores = lam[table].sum(axis=1)
    best = patterns[int(np.argmax(scores))]

    cols = [spca_block(w, b)[1] for b in best.blocks]
    p = normalize_column_phases(np.column_stack(cols))
    return SpcaResult(best, float(scores.max()), p)


def sparsify_precoder(w, patterns=None, tol: float = DEFAULT_TOL, index: int = 0):
    """Sparsify one precoder: first exactly-feasible pattern, else SPCA.

    Returns ``(P, SparsifyReport)``.
    """
    w = np.asarray(w, dtype=np.complex128)
    if patterns is None:
        patterns = enumerate_patterns(*w.shape)
    for pat in patterns:
        res = try_exact(w, pat, tol)
        if res.feasible:
            p, method = res.sparse, Method.EXACT
            break
    else:
        spca = spca_sparsify(w, patterns)
        p, pat, method = spca.sparse, spca.pattern, Method.SPCA
    d = chordal_distance(w, p)
    rep = SparsifyReport(index, method, pat, d, d * d / w.shape[1])
    return p, rep


def build_sparse_codebook(dense: Codebook, tol: float = DEFAULT_TOL, threads: int = 1):
    """
    Map every entry of a dense codebook to a sparse precoder at the same index.

    Entries are independent; with ``threads > 1`` they are processed
    concurrently but the output is assembled in index order and does not
    depend on the thread count.

    Returns
    -------
    sparse : Codebook
    reports : list of SparsifyReport
    """
    patterns = enumerate_patterns(dense.nt, dense.ns)

    def work(item):
        i, w = item
        return sparsify_precoder(w, patterns, tol, index=i)

    items = list(enumerate(dense.entries))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, items))
    else:
        results = [work(it) for it in items]

    label = f"sparse({dense.label})" if dense.label else "sparse"
    sparse = Codebook.from_matrices([p for p, _ in results], label=label)
    return sparse, [r for _, r in results]
