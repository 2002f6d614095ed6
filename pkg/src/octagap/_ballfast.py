"""Vectorized orbit-ball enumeration shared by the geometry module.

These walk the same languages as ``words.enumerate_free_ball`` and
``words.enumerate_racg_ball`` but carry complex128 matrix entries in numpy
arrays instead of materializing word tuples, which is what makes orbit balls
of tens of millions of elements feasible.  Entries of products of the
generator matrices grow like 4^L, far inside double range for the guarded
lengths, and every group element has unit determinant modulus, so the
isometry action needs no determinant correction.

All generators carry the conjugation bit, so an element of word length L
conjugates iff L is odd; appending a letter to an odd-length element must
right-multiply by the entrywise conjugate of the letter's matrix.
"""

from __future__ import annotations

import numpy as np

from .errors import MemoryGuardError
from .group import GENERATOR_NAMES, STANDARD_GENERATORS
from .words import (
    free_sphere_count,
    racg_sphere_count,
    shortlex_automaton_masks,
)

_CHUNK = 1 << 21

MAX_FREE_LEN = 15
MAX_RACG_LEN = 10


def generator_matrix_table() -> np.ndarray:
    """(8, 4) complex array of generator entries (a, b, c, d), letter order."""
    out = np.zeros((8, 4), dtype=np.complex128)
    for k, name in enumerate(GENERATOR_NAMES):
        g = STANDARD_GENERATORS[name]
        out[k] = [complex(e.re, e.im) for e in g.entries()]
    return out


def _displacement_chunk(
    a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray,
    parity: int, z0: complex, t0: float, out: np.ndarray,
) -> None:
    z = np.conj(z0) if parity else z0
    czd = c * z + d
    denom = np.abs(czd) ** 2 + np.abs(c) ** 2 * (t0 * t0)
    w = ((a * z + b) * np.conj(czd) + a * np.conj(c) * (t0 * t0)) / denom
    t1 = t0 / denom
    coshd = 1.0 + (np.abs(w - z0) ** 2 + (t1 - t0) ** 2) / (2.0 * t1 * t0)
    np.arccosh(np.maximum(coshd, 1.0), out=out)


def _displacements(
    mats: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    parity: int, z0: complex, t0: float,
) -> np.ndarray:
    a, b, c, d = mats
    n = a.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(0, n, _CHUNK):
        s = slice(i, min(i + _CHUNK, n))
        _displacement_chunk(a[s], b[s], c[s], d[s], parity, z0, t0, out[s])
    return out


def free_ball_displacements(z0: complex, t0: float, max_len: int) -> np.ndarray:
    """Displacements d(x0, g x0) over the ball of the free product on r1..r4.

    Returns one float per reduced word of length <= max_len (the identity
    included), unsorted.
    """
    if max_len < 0:
        raise MemoryGuardError("max_len must be nonnegative")
    if max_len > MAX_FREE_LEN:
        raise MemoryGuardError(
            f"free orbit ball of radius {max_len} exceeds the memory guard ({MAX_FREE_LEN})"
        )
    table = generator_matrix_table()
    face = table[[0, 2, 4, 6]]
    pieces = [np.zeros(1)]
    a = np.ones(1, dtype=np.complex128)
    b = np.zeros(1, dtype=np.complex128)
    c = np.zeros(1, dtype=np.complex128)
    d = np.ones(1, dtype=np.complex128)
    last = np.full(1, -1, dtype=np.int8)
    for level in range(max_len):
        size = free_sphere_count(level + 1)
        na = np.empty(size, dtype=np.complex128)
        nb = np.empty_like(na)
        nc = np.empty_like(na)
        nd = np.empty_like(na)
        nlast = np.empty(size, dtype=np.int8)
        gmats = face if level % 2 == 0 else np.conj(face)
        off = 0
        for g in range(4):
            sel = np.flatnonzero(last != g)
            ga, gb, gc, gd = gmats[g]
            n_g = sel.size
            view = slice(off, off + n_g)
            sa, sb, sc, sd = a[sel], b[sel], c[sel], d[sel]
            na[view] = sa * ga + sb * gc
            nb[view] = sa * gb + sb * gd
            nc[view] = sc * ga + sd * gc
            nd[view] = sc * gb + sd * gd
            nlast[view] = g
            off += n_g
        if off != size:
            raise AssertionError(f"free sphere {level + 1}: {off} != {size}")
        a, b, c, d, last = na, nb, nc, nd, nlast
        pieces.append(_displacements((a, b, c, d), (level + 1) % 2, z0, t0))
    return np.concatenate(pieces)


def racg_ball_displacements(
    z0: complex, t0: float, max_len: int, kernel_only: bool = False
) -> np.ndarray:
    """Displacements over the ball of the full reflection group.

    One float per element of geodesic length <= max_len (identity included),
    unsorted.  With kernel_only, elements are kept only when their image in
    the free product on the perp letters is trivial (the ball of the normal
    closure of the face letters, intersected with the word-length ball).
    """
    if max_len < 0:
        raise MemoryGuardError("max_len must be nonnegative")
    if max_len > MAX_RACG_LEN:
        raise MemoryGuardError(
            f"reflection-group orbit ball of radius {max_len} exceeds the memory guard ({MAX_RACG_LEN})"
        )
    keep_masks, set_masks = shortlex_automaton_masks()
    keep = np.array(keep_masks, dtype=np.uint16)
    sets = np.array(set_masks, dtype=np.uint16)
    table = generator_matrix_table()
    # perp letters are the odd positions of GENERATOR_NAMES; letter rkp pushes
    # or pops the symbol k on the reduced image word, packed 3 bits per symbol
    perp_symbol = np.array(
        [(g // 2 + 1) if GENERATOR_NAMES[g].endswith("p") else 0 for g in range(8)],
        dtype=np.uint64,
    )
    pieces = [np.zeros(1)]
    a = np.ones(1, dtype=np.complex128)
    b = np.zeros(1, dtype=np.complex128)
    c = np.zeros(1, dtype=np.complex128)
    d = np.ones(1, dtype=np.complex128)
    state = np.zeros(1, dtype=np.uint16)
    pack = np.zeros(1, dtype=np.uint64)
    plen = np.zeros(1, dtype=np.int64)
    for level in range(max_len):
        size = racg_sphere_count(level + 1)
        na = np.empty(size, dtype=np.complex128)
        nb = np.empty_like(na)
        nc = np.empty_like(na)
        nd = np.empty_like(na)
        nstate = np.empty(size, dtype=np.uint16)
        npack = np.empty(size, dtype=np.uint64)
        nplen = np.empty(size, dtype=np.int64)
        gmats = table if level % 2 == 0 else np.conj(table)
        off = 0
        for g in range(8):
            sel = np.flatnonzero((state >> np.uint16(2 * g)) & np.uint16(3) == 0)
            n_g = sel.size
            view = slice(off, off + n_g)
            ga, gb, gc, gd = gmats[g]
            sa, sb, sc, sd = a[sel], b[sel], c[sel], d[sel]
            na[view] = sa * ga + sb * gc
            nb[view] = sa * gb + sb * gd
            nc[view] = sc * ga + sd * gc
            nd[view] = sc * gb + sd * gd
            nstate[view] = (state[sel] & keep[g]) | sets[g]
            sym = int(perp_symbol[g])
            if sym == 0:
                npack[view] = pack[sel]
                nplen[view] = plen[sel]
            else:
                pk = pack[sel]
                pl = plen[sel]
                top_shift = (3 * np.maximum(pl - 1, 0)).astype(np.uint64)
                top = (pk >> top_shift) & np.uint64(7)
                pop = (pl > 0) & (top == sym)
                pushed = pk | (np.uint64(sym) << (3 * pl).astype(np.uint64))
                popped = pk & ~(np.uint64(7) << top_shift)
                npack[view] = np.where(pop, popped, pushed)
                nplen[view] = np.where(pop, pl - 1, pl + 1)
            off += n_g
        if off != size:
            raise AssertionError(f"sphere {level + 1}: {off} != {size}")
        a, b, c, d = na, nb, nc, nd
        state, pack, plen = nstate, npack, nplen
        if kernel_only:
            sel = np.flatnonzero(plen == 0)
            if sel.size:
                pieces.append(
                    _displacements((a[sel], b[sel], c[sel], d[sel]), (level + 1) % 2, z0, t0)
                )
        else:
            pieces.append(_displacements((a, b, c, d), (level + 1) % 2, z0, t0))
    return np.concatenate(pieces)
