"""
Codebooks: storage, JSON persistence, the NR 4-port rank-2 asset, and a
max-min chordal packing utility.

File format::

    {"nt": 4, "ns": 2, "label": "...",
     "entries": [{"index": 1, "re": [[...], ...], "im": [[...], ...]}, ...]}

``re``/``im`` are row-major nt x ns arrays. ``index`` is 1-based. Floats are
written with Python's shortest round-trip repr, so save/load is lossless.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grassmann import check_semi_unitary, random_grassmann_point

LOAD_TOL = 1e-8


class CodebookFormatError(ValueError):
    """Malformed or invalid codebook file."""


@dataclass(frozen=True)
class Codebook:
    """Indexed set of nt x ns semi-unitary precoders.

    Entries are stored as read-only arrays so a codebook can be shared
    freely between threads and callers.
    """

    nt: int
    ns: int
    entries: tuple = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if len(self.entries) == 0:
            raise ValueError("codebook must be nonempty")
        for i, e in enumerate(self.entries):
            if e.shape != (self.nt, self.ns):
                raise ValueError(f"entry {i + 1} has shape {e.shape}, expected {(self.nt, self.ns)}")

    @classmethod
    def from_matrices(cls, mats: Sequence, label: str = "", tol: float = 1e-9) -> "Codebook":
        frozen = []
        for i, m in enumerate(mats):
            try:
                m = check_semi_unitary(m, tol)
            except ValueError as exc:
                raise ValueError(f"entry {i + 1}: {exc}") from None
            m = np.array(m, dtype=np.complex128)
            m.flags.writeable = False
            frozen.append(m)
        if not frozen:
            raise ValueError("codebook must be nonempty")
        nt, ns = frozen[0].shape
        return cls(nt, ns, tuple(frozen), label)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def stack(self) -> np.ndarray:
        """All entries as one (size, nt, ns) array."""
        return np.stack(self.entries)

    @property
    def feedback_bits(self) -> int:
        return int(np.ceil(np.log2(len(self)))) if len(self) > 1 else 0


def to_json(cb: Codebook) -> str:
    doc = {
        "nt": cb.nt,
        "ns": cb.ns,
        "label": cb.label,
        "entries": [
            {"index": i + 1, "re": e.real.tolist(), "im": e.imag.tolist()}
            for i, e in enumerate(cb.entries)
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def save(cb: Codebook, path) -> None:
    with open(path, "w") as f:
        f.write(to_json(cb))


def from_json(text: str, source: str = "<string>") -> Codebook:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodebookFormatError(f"{source}: line {exc.lineno} col {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise CodebookFormatError(f"{source}: top level must be an object")
    for key in ("nt", "ns", "entries"):
        if key not in doc:
            raise CodebookFormatError(f"{source}: missing field '{key}'")
    nt, ns = doc["nt"], doc["ns"]
    if not (isinstance(nt, int) and isinstance(ns, int) and 1 <= ns <= nt):
        raise CodebookFormatError(f"{source}: invalid dimensions nt={nt!r}, ns={ns!r}")
    raw = doc["entries"]
    if not isinstance(raw, list) or not raw:
        raise CodebookFormatError(f"{source}: 'entries' must be a nonempty list")

    mats = []
    for pos, ent in enumerate(raw):
        idx = ent.get("index", pos + 1) if isinstance(ent, dict) else pos + 1
        try:
            m = np.array(ent["re"], dtype=float) + 1j * np.array(ent["im"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise CodebookFormatError(f"{source}: entry {idx}: bad field ({exc})") from None
        if m.shape != (nt, ns):
            raise CodebookFormatError(f"{source}: entry {idx}: shape {m.shape}, expected {(nt, ns)}")
        try:
            check_semi_unitary(m, LOAD_TOL)
        except ValueError as exc:
            raise CodebookFormatError(f"{source}: entry {idx}: {exc}") from None
        mats.append(m)
    return Codebook.from_matrices(mats, label=str(doc.get("label", "")), tol=LOAD_TOL)


def load(path) -> Codebook:
    path = os.fspath(path)
    with open(path) as f:
        text = f.read()
    return from_json(text, source=path)


# 3GPP TS 38.211 Table 6.3.1.5-5 (two layers, four antenna ports, transform
# precoding disabled), fully coherent TPMIs 14..21. The table scales by
# 1/(2*sqrt(2)); the 1/2 used here makes each entry semi-unitary.
_NR_4X2_TPMI = (14, 15, 16, 17, 18, 19, 20, 21)
_NR_4X2_TABLE = (
    ((1, 1), (1, 1), (1, -1), (1, -1)),
    ((1, 1), (1, 1), (1j, -1j), (1j, -1j)),
    ((1, 1), (1j, 1j), (1, -1), (1j, -1j)),
    ((1, 1), (1j, 1j), (1j, -1j), (-1, 1)),
    ((1, 1), (-1, -1), (1, -1), (-1, 1)),
    ((1, 1), (-1, -1), (1j, -1j), (-1j, 1j)),
    ((1, 1), (-1j, -1j), (1, -1), (-1j, 1j)),
    ((1, 1), (-1j, -1j), (1j, -1j), (1, -1)),
)
_NR_4X2 = None


def nr_codebook_4x2() -> Codebook:
    """The eight dense 4x2 precoders of the NR uplink codebook (TPMI 14..21)."""
    global _NR_4X2
    if _NR_4X2 is None:
        mats = [0.5 * np.array(t, dtype=complex) for t in _NR_4X2_TABLE]
        tpmi = ",".join(map(str, _NR_4X2_TPMI))
        _NR_4X2 = Codebook.from_matrices(mats, label=f"NR TS 38.211 Table 6.3.1.5-5 TPMI {tpmi}")
    return _NR_4X2


def _pairwise_sq_overlap(c: np.ndarray) -> np.ndarray:
    # ||C_a^H C_b||_F^2 for all pairs; c has shape (size, nt, ns)
    g = np.einsum("aij,bik->abjk", c.conj(), c)
    return np.sum(np.abs(g) ** 2, axis=(2, 3))


def min_chordal_distance(cb) -> float:
    """Smallest pairwise chordal distance in a codebook (or an entry stack)."""
    c = cb.stack() if isinstance(cb, Codebook) else np.asarray(cb)
    size, _, ns = c.shape
    if size < 2:
        raise ValueError("need at least two entries")
    d2 = ns - _pairwise_sq_overlap(c)
    d2[np.diag_indices(size)] = np.inf
    return float(np.sqrt(max(d2.min(), 0.0)))


def _orthonormalize(m: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(m)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def generate_packing(nt: int, ns: int, size: int, iterations: int = 10_000, rng=None,
                     restart_every: int = 2000, return_history: bool = False):
    """
    Search for a codebook with large minimum pairwise chordal distance.

    Random restarts, each followed by a hill climb that nudges one member of
    the currently closest pair and keeps the move if the minimum distance
    does not drop. This is a heuristic, not a Riemannian optimizer; it gets
    close to the optimum for small codebooks.

    Parameters
    ----------
    iterations : int
        Total number of perturbation steps across all restarts.
    rng : int or numpy.random.Generator
    return_history : bool
        Also return the best minimum distance seen after each step
        (nondecreasing).
    """
    if size < 2:
        raise ValueError("size must be at least 2")
    if not 1 <= ns <= nt:
        raise ValueError(f"need 1 <= ns <= nt, got nt={nt}, ns={ns}")
    rng = np.random.default_rng(rng)
    best, best_d = None, -1.0
    history = np.empty(max(iterations, 0))

    def fresh():
        return np.stack([random_grassmann_point(nt, ns, rng) for _ in range(size)])

    c = fresh()
    d2 = ns - _pairwise_sq_overlap(c)
    np.fill_diagonal(d2, np.inf)
    step = 0.3
    for it in range(iterations):
        if it and it % restart_every == 0:
            c = fresh()
            d2 = ns - _pairwise_sq_overlap(c)
            np.fill_diagonal(d2, np.inf)
            step = 0.3
        cur = d2.min()
        a, b = np.unravel_index(np.argmin(d2), d2.shape)
        k = a if rng.random() < 0.5 else b
        g = rng.standard_normal((nt, ns)) + 1j * rng.standard_normal((nt, ns))
        cand = _orthonormalize(c[k] + step * g / np.sqrt(2 * nt * ns))
        row = ns - np.sum(np.abs(np.einsum("ij,bik->bjk", cand.conj(), c)) ** 2, axis=(1, 2))
        row[k] = np.inf
        new_d2 = d2.copy()
        new_d2[k, :] = row
        new_d2[:, k] = row
        if new_d2.min() >= cur:
            c[k] = cand
            d2 = new_d2
            step = min(step * 1.2, 1.0)
        else:
            step = max(step * 0.95, 1e-4)
        d = float(np.sqrt(max(d2.min(), 0.0)))
        if d > best_d:
            best, best_d = c.copy(), d
        history[it] = best_d

    if best is None:
        best = c
    cb = Codebook.from_matrices(list(best), label=f"packing nt={nt} ns={ns} size={size}")
    if return_history:
        return cb, history
    return cb
