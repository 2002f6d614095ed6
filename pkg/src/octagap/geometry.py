"""Upper half space geometry: the isometry action, orbit balls, cap volumes,
the fundamental corner, horoball covers, and critical-exponent estimates.

Points live in upper half space as (z, t) with z complex horizontal coordinate
and t > 0 height.  A matrix [[a, b], [c, d]] over Z[i] acts by

    z' = ((a z + b) conj(c z + d) + a conj(c) t^2) / D
    t' = |det| t / D,          D = |c z + d|^2 + |c|^2 t^2,

preceded by z -> conj(z) when the conjugation bit is set.  The |det| factor
makes the formula scale invariant, so projective representatives with
non-unit determinant (the octahedron rotations, for instance) act correctly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy import integrate

from . import _ballfast
from .errors import DomainError, InsufficientDataError, SetupError
from .group import GaussianInt, ProjIsom, identity, octa_symmetry_group
from .words import CoxeterWord, evaluate_word, format_word

#: Critical exponent of the subgroup generated by the four face reflections
#: (the Apollonian circle packing exponent), used as a pinned input constant.
FREE_SUBGROUP_CRITICAL_EXPONENT = 1.30568672804987718


class Point3(NamedTuple):
    """A point (z, t) of upper half space, t > 0."""

    z: complex
    t: float


def point(x: float, y: float, t: float) -> Point3:
    if not t > 0:
        raise DomainError(f"height must be positive, got {t}")
    return Point3(complex(x, y), float(t))


def apply_isom(g: ProjIsom, p: Point3) -> Point3:
    """Image of p under the isometry g."""
    if not p.t > 0:
        raise DomainError(f"height must be positive, got {p.t}")
    z = p.z.conjugate() if g.conj else p.z
    t = p.t
    a = complex(g.a.re, g.a.im)
    b = complex(g.b.re, g.b.im)
    c = complex(g.c.re, g.c.im)
    d = complex(g.d.re, g.d.im)
    czd = c * z + d
    denom = abs(czd) ** 2 + abs(c) ** 2 * t * t
    w = ((a * z + b) * czd.conjugate() + a * c.conjugate() * t * t) / denom
    det_mod = math.sqrt(g.det().norm())
    return Point3(w, det_mod * t / denom)


def dist(p: Point3, q: Point3) -> float:
    """Hyperbolic distance between two points of upper half space."""
    if not (p.t > 0 and q.t > 0):
        raise DomainError("heights must be positive")
    coshd = 1.0 + (abs(p.z - q.z) ** 2 + (p.t - q.t) ** 2) / (2.0 * p.t * q.t)
    return math.acosh(max(coshd, 1.0))


def ball_volume(radius: float) -> float:
    """Volume of a hyperbolic ball: pi (sinh(2T) - 2T)."""
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    return math.pi * (math.sinh(2.0 * radius) - 2.0 * radius)


def cap_volume(radius: float, separation: float) -> float:
    """Volume of the intersection of two balls of equal radius.

    The centers sit at distance ``separation``.  In polar coordinates around
    one center the intersection is a full ball out to r0 = max(0, T - delta)
    plus, for r in [r0, T], the spherical cap where

        cos(theta) >= (cosh r cosh delta - cosh T) / (sinh r sinh delta),

    whose area fraction is (1 - cos(theta))-shaped; the fraction is clamped to
    [0, 2] where the cap is empty or the whole sphere.
    """
    T, delta = float(radius), float(separation)
    if T < 0 or delta < 0:
        raise DomainError("radius and separation must be nonnegative")
    if delta == 0.0:
        return ball_volume(T)
    if delta >= 2.0 * T:
        return 0.0
    r0 = max(0.0, T - delta)
    full = math.pi * (math.sinh(2.0 * r0) - 2.0 * r0)

    def integrand(r: float) -> float:
        if r <= 0.0:
            return 0.0
        q = (math.cosh(r) * math.cosh(delta) - math.cosh(T)) / (
            math.sinh(r) * math.sinh(delta)
        )
        frac = min(max(1.0 - q, 0.0), 2.0)
        return math.sinh(r) ** 2 * frac

    lens, _ = integrate.quad(integrand, r0, T, epsabs=1e-12, epsrel=1e-12, limit=200)
    return full + 2.0 * math.pi * lens


def cap_volume_bound(radius: float, separation: float) -> float:
    """The exponential upper bound 8 pi e^(2T - delta) for cap_volume."""
    return 8.0 * math.pi * math.exp(2.0 * radius - separation)


def cap_volume_monte_carlo(
    radius: float, separation: float, n_samples: int, seed: int
) -> float:
    """Monte Carlo estimate of cap_volume, for cross-checking the quadrature.

    The centers are placed on a vertical geodesic at (0, 1) and (0, e^delta).
    Heights are drawn with density proportional to 1/t^3 (the hyperbolic
    volume weight) over the slab spanned by the Euclidean envelope of the
    lower ball, horizontal coordinates uniformly on the disk slicing that
    envelope, and the indicator of the two-ball intersection is averaged.
    """
    T, delta = float(radius), float(separation)
    if T <= 0 or delta < 0:
        raise DomainError("radius must be positive and separation nonnegative")
    if n_samples <= 0:
        raise DomainError("n_samples must be positive")
    if delta >= 2.0 * T:
        return 0.0
    rng = np.random.default_rng(seed)
    x = Point3(0.0 + 0.0j, 1.0)
    y = Point3(0.0 + 0.0j, math.exp(delta))
    # Euclidean envelope of B(x, T): center height cosh(T), radius sinh(T)
    tc, re = math.cosh(T), math.sinh(T)
    t1, t2 = tc - re, tc + re
    inv1, inv2 = t1 ** -2.0, t2 ** -2.0
    w_total = 0.0
    chunk = 1 << 18
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        u = rng.random(m)
        t = (inv1 - u * (inv1 - inv2)) ** -0.5
        r_slice = np.sqrt(np.maximum(re * re - (t - tc) ** 2, 0.0))
        phi = rng.random(m) * (2.0 * math.pi)
        rad = np.sqrt(rng.random(m)) * r_slice
        zx = rad * np.cos(phi)
        zy = rad * np.sin(phi)
        rho2 = zx * zx + zy * zy
        coshd_x = 1.0 + (rho2 + (t - x.t) ** 2) / (2.0 * t * x.t)
        coshd_y = 1.0 + (rho2 + (t - y.t) ** 2) / (2.0 * t * y.t)
        inside = (coshd_x <= math.cosh(T)) & (coshd_y <= math.cosh(T))
        area = math.pi * r_slice ** 2
        w_total += float(np.sum(inside * area))
        done += m
    z_norm = (inv1 - inv2) / 2.0
    return w_total / n_samples * z_norm


# -- fundamental corner and horoball cover ----------------------------------

#: The point where all six truncated horoballs of the standard cover meet:
#: the symmetry center of the octahedron.
OCTA_CENTER = Point3(0.5 + 0.5j, math.sqrt(0.5))


def in_fundamental_corner(p: Point3, tol: float = 1e-9) -> bool:
    """Whether p lies in {0 <= x, y <= 1/2, x^2 + y^2 + t^2 >= 1} (with slack tol)."""
    x, y = p.z.real, p.z.imag
    return (
        -tol <= x <= 0.5 + tol
        and -tol <= y <= 0.5 + tol
        and x * x + y * y + p.t * p.t >= 1.0 - tol
    )


def move_to_corner(p: Point3, tol: float = 1e-9) -> tuple[ProjIsom, Point3]:
    """Find a symmetry of the octahedron carrying p into the fundamental corner.

    Returns the pair (g, g applied to p).  Raises SetupError when no symmetry
    works, which for exact inputs means p is outside the octahedron.
    """
    for g in octa_symmetry_group():
        q = apply_isom(g, p)
        if in_fundamental_corner(q, tol):
            return g, q
    raise SetupError(f"no octahedral symmetry carries {p} into the corner")


def in_standard_horoball(p: Point3, tol: float = 1e-9) -> bool:
    """The truncated horoball piece {0 <= x, y <= 1, t >= 1/sqrt(2)}."""
    x, y = p.z.real, p.z.imag
    return (
        -tol <= x <= 1.0 + tol
        and -tol <= y <= 1.0 + tol
        and p.t >= math.sqrt(0.5) - tol
    )


#: The six ideal vertices of the octahedron as projective pairs (p : q).
IDEAL_VERTICES: tuple[tuple[str, GaussianInt, GaussianInt], ...] = (
    ("inf", GaussianInt(1, 0), GaussianInt(0, 0)),
    ("0", GaussianInt(0, 0), GaussianInt(1, 0)),
    ("1", GaussianInt(1, 0), GaussianInt(1, 0)),
    ("i", GaussianInt(0, 1), GaussianInt(1, 0)),
    ("1+i", GaussianInt(1, 1), GaussianInt(1, 0)),
    ("(1+i)/2", GaussianInt(1, 1), GaussianInt(2, 0)),
)


def horoball_cover_maps() -> list[tuple[str, ProjIsom]]:
    """One octahedral symmetry per ideal vertex, sending infinity to it.

    The cover of the octahedron by six truncated horoballs is the image of
    the standard piece under these maps.  The stabilizer of infinity has
    order four and preserves the standard piece, so any coset representative
    serves.  Raises SetupError if some vertex is not reached.
    """
    found: dict[str, ProjIsom] = {}
    for g in octa_symmetry_group():
        # g(inf) = a/c as a projective pair
        for label, pnum, pden in IDEAL_VERTICES:
            if label in found:
                continue
            cross = g.a * pden - pnum * g.c
            if not cross:
                found[label] = g
    missing = [label for label, _, _ in IDEAL_VERTICES if label not in found]
    if missing:
        raise SetupError(f"no symmetry sends infinity to: {missing}")
    return [(label, found[label]) for label, _, _ in IDEAL_VERTICES]


@dataclass(frozen=True)
class HoroballCoverReport:
    n_checked: int
    n_excluded: int
    covered_fraction: float
    max_multiplicity: int
    multiplicity_counts: dict[int, int]


def horoball_cover_check(
    n_samples: int,
    seed: int,
    exclusion_radius: float = 1e-3,
    height_cap: float = 2.5,
) -> HoroballCoverReport:
    """Sample the octahedron and audit the six-horoball cover.

    Points are drawn in the fundamental corner (heights up to height_cap) and
    pushed around by random symmetries so the whole octahedron is exercised.
    For each point the multiplicity counts how many of the six truncated
    horoballs contain it.  Points within exclusion_radius (hyperbolic) of the
    center, where all six pieces meet, are excluded from the multiplicity
    tally but still counted for coverage.
    """
    if n_samples <= 0:
        raise DomainError("n_samples must be positive")
    if height_cap <= 1.0:
        raise DomainError("height_cap must exceed the corner floor")
    rng = np.random.default_rng(seed)
    maps = horoball_cover_maps()
    inverses = [(label, g.inverse()) for label, g in maps]
    syms = octa_symmetry_group()
    counts: dict[int, int] = {}
    n_excluded = 0
    n_covered = 0
    max_mult = 0
    for _ in range(n_samples):
        x = rng.random() * 0.5
        y = rng.random() * 0.5
        t_low = math.sqrt(max(1.0 - x * x - y * y, 0.0))
        t = t_low + rng.random() * (height_cap - t_low)
        p = Point3(complex(x, y), t)
        g = syms[rng.integers(len(syms))]
        p = apply_isom(g, p)
        mult = sum(
            1 for _, ginv in inverses if in_standard_horoball(apply_isom(ginv, p))
        )
        if mult > 0:
            n_covered += 1
        if dist(p, OCTA_CENTER) < exclusion_radius:
            n_excluded += 1
            continue
        counts[mult] = counts.get(mult, 0) + 1
        max_mult = max(max_mult, mult)
    return HoroballCoverReport(
        n_checked=n_samples,
        n_excluded=n_excluded,
        covered_fraction=n_covered / n_samples,
        max_multiplicity=max_mult,
        multiplicity_counts=dict(sorted(counts.items())),
    )


# -- cusp data ----------------------------------------------------------------

@dataclass(frozen=True)
class CuspDatum:
    """Normalized data of a cusp: its rank with the area or length it carries.

    Rank two keeps the coarea of the translation lattice, rank one the
    translation length, rank zero nothing.
    """

    rank: int
    area: float = float("nan")
    length: float = float("nan")

    @classmethod
    def rank2(cls, w1: complex, w2: complex) -> "CuspDatum":
        area = abs((w1.conjugate() * w2).imag)
        if not area > 0:
            raise DomainError("rank-2 translations must be independent")
        return cls(rank=2, area=area)

    @classmethod
    def rank1(cls, w: complex) -> "CuspDatum":
        length = abs(w)
        if not length > 0:
            raise DomainError("rank-1 translation must be nonzero")
        return cls(rank=1, length=length)

    @classmethod
    def rank0(cls) -> "CuspDatum":
        return cls(rank=0)


def cusp_height_standard(
    p: Point3, reps: Iterable[ProjIsom], lattice: CuspDatum | None = None
) -> float:
    """Height of p at the cusp at infinity, maximized over the supplied orbit.

    The honest height is a supremum over the whole group; this restricts the
    maximum to a finite representative set, which is how every caller uses
    it.  The optional lattice is validated (the cusp at infinity has rank
    two) but does not affect the value: horizontal translations preserve t.
    """
    if lattice is not None and lattice.rank != 2:
        raise DomainError("the cusp at infinity has rank two")
    best = p.t
    for g in reps:
        best = max(best, apply_isom(g, p).t)
    return best


# -- orbit balls and the critical exponent -----------------------------------

@dataclass
class OrbitBall:
    """Displacements d(x0, g x0) over a word-length ball of a subgroup.

    ``displacements`` is sorted ascending and always starts at 0 (the
    identity).  ``words`` holds the corresponding words when the ball was
    enumerated explicitly, and is None for the vectorized enumerations.
    """

    base: Point3
    word_length: int
    displacements: np.ndarray
    words: list[CoxeterWord] | None = None
    label: str = ""

    @property
    def radius(self) -> float:
        return float(self.displacements[-1])

    @property
    def count(self) -> int:
        return int(self.displacements.size)

    def counting_function(self, t: float) -> int:
        """Number of orbit points within distance t."""
        return int(np.searchsorted(self.displacements, t, side="right"))

    def to_csv(self, fileobj) -> None:
        """Write rows word,displacement.  Requires explicit words."""
        if self.words is None:
            raise DomainError("this ball was enumerated without words")
        fileobj.write("word,displacement\r\n")
        for w, dval in zip(self.words, self.displacements):
            fileobj.write(f"{format_word(w)},{dval:.12g}\r\n")


ORBIT_GROUPS = ("free", "full", "kernel")


def orbit_ball(
    group: str | Callable[[int], Iterable[CoxeterWord]],
    base: Point3,
    max_len: int,
) -> OrbitBall:
    """Orbit ball of a subgroup around a base point.

    ``group`` selects a built-in vectorized enumeration: "free" for the
    subgroup generated by the face letters r1..r4 (a free product of four
    order-two groups), "full" for the whole reflection group, "kernel" for
    the elements of the full ball with trivial image in the free product on
    the perp letters.  A callable taking max_len and yielding words runs the
    exact word-by-word path and keeps the words.
    """
    if not base.t > 0:
        raise DomainError("base height must be positive")
    if callable(group):
        words = [tuple(w) for w in group(max_len)]
        disp = np.array([dist(base, apply_isom(evaluate_word(w), base)) for w in words])
        order = np.argsort(disp, kind="stable")
        return OrbitBall(
            base=base,
            word_length=max_len,
            displacements=disp[order],
            words=[words[k] for k in order],
            label="custom",
        )
    if group == "free":
        disp = _ballfast.free_ball_displacements(base.z, base.t, max_len)
    elif group == "full":
        disp = _ballfast.racg_ball_displacements(base.z, base.t, max_len)
    elif group == "kernel":
        disp = _ballfast.racg_ball_displacements(base.z, base.t, max_len, kernel_only=True)
    else:
        raise DomainError(f"unknown orbit group {group!r}; expected one of {ORBIT_GROUPS}")
    disp.sort()
    return OrbitBall(
        base=base, word_length=max_len, displacements=disp, words=None, label=group
    )


DEFAULT_BASE_POINT = Point3(0.3 + 0.4j, 0.9)


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of log N(T) against T over a window of the orbit ball."""

    exponent: float
    intercept: float
    n_points: int
    window: tuple[float, float]
    t_values: tuple[float, ...]
    counts: tuple[int, ...]

    def __float__(self) -> float:
        return self.exponent


def estimate_critical_exponent(
    ball: OrbitBall,
    window: tuple[float, float] | None = None,
    bin_width: float = 0.1,
    min_points: int = 10,
) -> ExponentFit:
    """Estimate the orbital growth exponent from the counting function.

    N(T) is read off at multiples of bin_width inside the window (absolute
    distance bounds), and a line is fit to (T, log N(T)).  The default window
    is [0.3, 0.9] times the ball's word length: word balls count all orbit
    points out to roughly their word radius and start missing points beyond
    it, so distances past the word length mostly measure that truncation
    rather than growth.  Windows reaching past 0.9 of the displacement radius
    are rejected outright.  Raises InsufficientDataError when fewer than
    min_points bins carry distinct counts, which happens for balls too small
    to show their growth rate.
    """
    if bin_width <= 0:
        raise DomainError("bin_width must be positive")
    if window is None:
        window = (0.3 * ball.word_length, 0.9 * ball.word_length)
    t_lo, t_hi = float(window[0]), float(window[1])
    radius = ball.radius
    if not (0.0 <= t_lo < t_hi <= 0.9 * radius + 1e-12):
        raise DomainError(
            f"window must satisfy 0 <= lo < hi <= 0.9 * radius ({0.9 * radius:.3f}), got {window}"
        )
    k_lo = math.ceil(t_lo / bin_width)
    k_hi = math.floor(t_hi / bin_width)
    ts = [k * bin_width for k in range(k_lo, k_hi + 1)]
    counts = [ball.counting_function(t) for t in ts]
    keep = [(t, n) for t, n in zip(ts, counts) if n > 0]
    if len({n for _, n in keep}) < min_points:
        raise InsufficientDataError(
            f"only {len({n for _, n in keep})} distinct counts in window; need {min_points}"
        )
    t_arr = np.array([t for t, _ in keep])
    n_arr = np.array([n for _, n in keep], dtype=float)
    slope, intercept = np.polyfit(t_arr, np.log(n_arr), 1)
    return ExponentFit(
        exponent=float(slope),
        intercept=float(intercept),
        n_points=len(keep),
        window=(t_lo, t_hi),
        t_values=tuple(float(t) for t, _ in keep),
        counts=tuple(int(n) for _, n in keep),
    )


def elstrodt_sullivan(delta: float) -> float:
    """Bottom of the spectrum as a function of the critical exponent.

    Equals 1 for delta <= 1 and delta (2 - delta) above; the exponent must
    lie in [0, 2].
    """
    if not 0.0 <= delta <= 2.0:
        raise DomainError(f"critical exponent must lie in [0, 2], got {delta}")
    return 1.0 if delta <= 1.0 else delta * (2.0 - delta)


class GapBounds(NamedTuple):
    lower: float
    upper: float


#: Spectral gap of the infinite replacement graph: 3 - sqrt(5 + 2 sqrt(3)).
REPLACEMENT_GRAPH_GAP = 3.0 - math.sqrt(5.0 + 2.0 * math.sqrt(3.0))


def spectral_gap_bounds(
    delta_free: float = FREE_SUBGROUP_CRITICAL_EXPONENT,
    mu: float = 1.0,
) -> GapBounds:
    """Two-sided bounds on the limiting spectral gap of the random covers.

    The lower bound transfers the replacement graph's gap through a
    Brooks-style comparison, mu * gap / (16 d + mu * gap) with d = 4.  The
    upper bound pushes the free subgroup's critical exponent through the
    kernel bound delta >= 2 - delta_free / 2 and the spectral formula.
    """
    if mu <= 0:
        raise DomainError("comparison constant mu must be positive")
    gap = REPLACEMENT_GRAPH_GAP
    lower = mu * gap / (16.0 * 4.0 + mu * gap)
    delta_kernel = 2.0 - delta_free / 2.0
    upper = elstrodt_sullivan(delta_kernel)
    return GapBounds(lower=lower, upper=upper)
