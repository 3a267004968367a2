"""Conjugacy classes of closed subgroups of O(2) x Gamma' (Gamma' finite).

A finite subgroup H <= O(2) x Gamma' is stored as an explicit element set
{(kind, angle, gamma_index)} where angles are exact Fractions of a full turn:
(ROT, t, g) is the rotation by t turns paired with gamma element g, and
(REF, a, g) is the reflection kappa_a : z -> exp(2*pi*i*a) * conj(z) paired
with g.  All conjugacy questions about O(2) x Gamma' reduce to scans over a
finite grid of axis offsets, which is the truncation D_N x Gamma' of the
ambient group; counting queries are re-checked on the doubled grid.

Subgroups with a full O(2) factor (the only infinite ones we need) are kept
symbolically and delegate everything to Gamma'.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    InfiniteSubgroup,
    InfiniteWeyl,
    NonIntegralTrace,
    StabilizationFailure,
)
from .groups import FiniteGroup

ROT, REF = 0, 1

TWO_PI = 2.0 * np.pi


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# -- O(2) element arithmetic (angles in turns) ----------------------------------

def o2_mul(x, y):
    kx, a = x
    ky, b = y
    if kx == ROT:
        if ky == ROT:
            return (ROT, (a + b) % 1)
        return (REF, (b + a) % 1)
    if ky == ROT:
        return (REF, (a - b) % 1)
    return (ROT, (a - b) % 1)


def o2_inv(x):
    k, a = x
    if k == ROT:
        return (ROT, (-a) % 1)
    return x


def o2_conj(g, x):
    """g x g^-1 in O(2)."""
    kg, c = g
    kx, a = x
    if kg == ROT:
        if kx == ROT:
            return x
        return (REF, (a + 2 * c) % 1)
    if kx == ROT:
        return (ROT, (-a) % 1)
    return (REF, (2 * c - a) % 1)


class SubgroupG:
    """Concrete finite subgroup of O(2) x Gamma', as an element set."""

    __slots__ = ("gamma", "elems", "rot_fracs", "axes", "proj2_mask", "kern2_mask",
                 "z1_rot_count", "z1_axes", "rot_order", "_hash", "_grids")

    def __init__(self, gamma: FiniteGroup, elems: Iterable[tuple]):
        self.gamma = gamma
        self.elems = frozenset(elems)
        rot = set()
        axes = set()
        proj2 = 0
        kern2 = 0
        z1r = 0
        z1a = set()
        for kind, a, g in self.elems:
            proj2 |= 1 << g
            if kind == ROT:
                rot.add(a)
                if g == 0:
                    z1r += 1
                if a == 0:
                    kern2 |= 1 << g
            else:
                axes.add(a)
                if g == 0:
                    z1a.add(a)
        self.rot_fracs = frozenset(rot)
        self.axes = frozenset(axes)
        self.proj2_mask = proj2
        self.kern2_mask = kern2
        self.z1_rot_count = z1r
        self.z1_axes = frozenset(z1a)
        self.rot_order = len(rot)
        self._hash = hash(self.elems)
        self._grids: dict = {}

    @property
    def order(self) -> int:
        return len(self.elems)

    @property
    def has_reflections(self) -> bool:
        return bool(self.axes)

    def conjugate(self, kind: int, c: Fraction, gidx: int) -> "SubgroupG":
        conj = self.gamma.conj_map[gidx]
        g = (kind, c)
        return SubgroupG(self.gamma,
                         ((*o2_conj(g, (k, a)), conj[x]) for k, a, x in self.elems))

    def std_position(self) -> "SubgroupG":
        if not self.axes:
            return self
        a0 = min(self.axes)
        if a0 == 0:
            return self
        return self.conjugate(ROT, (-a0 / 2) % 1, 0)

    def contains(self, other: "SubgroupG") -> bool:
        return other.elems <= self.elems

    def fingerprint(self) -> tuple:
        gamma = self.gamma
        sig = sorted((kind, min(a, (1 - a) % 1) if kind == ROT else Fraction(0),
                      gamma.element_class_index(g))
                     for kind, a, g in self.elems)
        return (self.rot_order, len(self.axes), self.order,
                gamma.subgroup_class_of(self.proj2_mask),
                gamma.subgroup_class_of(gamma.closure_mask(self.kern2_mask | 1)),
                self.z1_rot_count, len(self.z1_axes), tuple(sig))

    def __eq__(self, other) -> bool:
        return isinstance(other, SubgroupG) and self.elems == other.elems

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"SubgroupG(order={self.order}, rot={self.rot_order}, axes={len(self.axes)})"




def conjugate_in_g(h1: SubgroupG, h2: SubgroupG) -> bool:
    """Whether two std-position subgroups are conjugate in O(2) x Gamma'."""
    if h1.order != h2.order or h1.rot_order != h2.rot_order:
        return False
    if len(h1.axes) != len(h2.axes):
        return False
    gamma = h1.gamma
    M = math.lcm(grid_level(h1), grid_level(h2))
    kinds, ticks, gammas, _ = grid_arrays(h1, M)
    target = grid_codes(h2, M)
    conj = _conj_table(gamma)[:, gammas]  # forward conjugation, rows indexed by g
    for kind in (ROT, REF):
        for two_c in range(M):
            o2 = _mapped_o2_fwd(kinds, ticks, kind, two_c, M)
            codes = ((kinds * M + o2) * gamma.order)[None, :] + conj
            if np.isin(codes, target).all(axis=1).any():
                return True
    return False


@dataclass(frozen=True)
class OrbitType:
    """A conjugacy class of closed subgroups, as handled by the Burnside layer.

    kind is "finite" for dihedral/cyclic-projection subgroups (rep holds a
    standard-position representative) or "o2" for full-O(2) direct products
    O(2) x K2 (rep is None, k2_class indexes the Gamma' subgroup class).
    """

    key: int
    kind: str
    symbol: str
    rep: Optional[SubgroupG]
    k2_class: int
    order: Optional[int]
    k2_order: int = 0

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def sort_rank(self) -> tuple:
        # o2-kinds dominate all finite types in the processing order; among
        # them the finite factor's order decides
        if self.kind == "o2":
            return (1, self.k2_order, self.symbol)
        return (0, self.order, self.symbol)

    def __repr__(self) -> str:
        return self.symbol


class AmbientContext:
    """Machinery bundle for one ambient group O(2) x Gamma'.

    Holds the finite factor, display names for its subgroup classes, the
    irreducible representation data used by orbit-type computations, and all
    memo tables.  Immutable from the caller's point of view; the internal
    caches are guarded by a lock so concurrent queries are safe.

    weyl_mode selects the coefficient presentation: "reduced" (default)
    reports coefficients and Weyl orders in the conventional table basis,
    where rotation-kernel types carry a factor-2 rescale; "ambient" reports
    the literal product-group values.  Ring arithmetic is identical in both.
    """

    def __init__(self, gamma: FiniteGroup, irreps: dict[int, "Irrep"],
                 class_names: Optional[Sequence[str]] = None,
                 weyl_mode: str = "reduced"):
        if weyl_mode not in ("reduced", "ambient"):
            raise ValueError(f"unknown weyl_mode {weyl_mode!r}")
        self.weyl_mode = weyl_mode
        self.gamma = gamma
        self.irreps = dict(irreps)
        self.exponent = 1
        for i in range(gamma.order):
            o = gamma.element_order(i)
            self.exponent = self.exponent * o // math.gcd(self.exponent, o)
        classes = gamma.subgroup_classes()
        if class_names is None:
            class_names = _generated_names(gamma)
        self.class_names = list(class_names)
        if len(self.class_names) != len(classes):
            raise ValueError("need one display name per Gamma' subgroup class")
        self._lock = threading.RLock()
        self._types: list[OrbitType] = []
        self._by_fingerprint: dict[tuple, list[int]] = {}
        self._o2_types: dict[int, OrbitType] = {}
        self._symbol_counts: dict[str, int] = {}
        self._leq_cache: dict[tuple[int, int], bool] = {}
        self._n_cache: dict[tuple[int, int], int] = {}
        self._weyl_cache: dict[int, int] = {}
        self._orbit_type_cache: dict[tuple[int, int], tuple] = {}
        self._maximal_cache: dict[int, dict] = {}
        self._fix_cache: dict[tuple[int, int, int], int] = {}
        self.unit = self.intern_o2(gamma.subgroup_class_of((1 << gamma.order) - 1))

    # -- type registry ---------------------------------------------------------

    def intern_o2(self, k2_class: int) -> OrbitType:
        with self._lock:
            got = self._o2_types.get(k2_class)
            if got is not None:
                return got
            cls = self.gamma.subgroup_classes()[k2_class]
            if cls.order == self.gamma.order:
                symbol = "(G)"
            else:
                symbol = f"(O2 x {self.class_names[k2_class]})"
            t = OrbitType(len(self._types), "o2", symbol, None, k2_class, None, cls.order)
            self._types.append(t)
            self._o2_types[k2_class] = t
            return t

    def intern(self, h: SubgroupG) -> OrbitType:
        h = h.std_position()
        fp = h.fingerprint()
        with self._lock:
            for key in self._by_fingerprint.get(fp, ()):
                t = self._types[key]
                if t.rep is not None and conjugate_in_g(t.rep, h):
                    return t
            base = self._base_symbol(h)
            count = self._symbol_counts.get(base, 0)
            self._symbol_counts[base] = count + 1
            symbol = base if count == 0 else f"{base[:-1]}~{count + 1})"
            k2_class = self.gamma.subgroup_class_of(h.proj2_mask)
            t = OrbitType(len(self._types), "finite", symbol, h, k2_class, h.order,
                          self.gamma.subgroup_classes()[k2_class].order)
            self._types.append(t)
            self._by_fingerprint.setdefault(fp, []).append(t.key)
            return t

    def _base_symbol(self, h: SubgroupG) -> str:
        a1 = h.rot_order
        k1 = (f"D{a1}" if h.axes else f"Z{a1}")
        if h.z1_axes:
            z1 = f"D{h.z1_rot_count}"
        else:
            z1 = f"Z{h.z1_rot_count}"
        k2 = self.class_names[self.gamma.subgroup_class_of(h.proj2_mask)]
        z2mask = self.gamma.closure_mask(h.kern2_mask | 1)
        z2 = self.class_names[self.gamma.subgroup_class_of(z2mask)]
        return f"({k1}^{z1} x^{z2} {k2})"

    def type_by_symbol(self, symbol: str) -> OrbitType:
        with self._lock:
            for t in self._types:
                if t.symbol == symbol:
                    return t
        raise KeyError(symbol)

    # -- irreps ------------------------------------------------------------------

    def irrep(self, j: int) -> "Irrep":
        if j not in self.irreps:
            raise KeyError(f"no irreducible representation labelled {j}")
        return self.irreps[j]

    def active_js(self) -> list[int]:
        return sorted(self.irreps)


@dataclass(frozen=True)
class Irrep:
    """Matrix model of one irreducible Gamma'-representation (antipodal factor included)."""

    j: int
    dim: int
    mats: tuple
    chars: tuple

    @classmethod
    def from_matrices(cls, j: int, mats: Sequence[np.ndarray]) -> "Irrep":
        mats = tuple(np.asarray(m, dtype=float) for m in mats)
        chars = tuple(float(m.trace()) for m in mats)
        return cls(j, mats[0].shape[0], mats, chars)


@dataclass(frozen=True)
class IrrepLabel:
    """Label (m, j) of the O(2) x Gamma'-irreducible W_m (x) V_j^-."""

    m: int
    j: int
    dim: int

    @classmethod
    def of(cls, ctx: AmbientContext, m: int, j: int) -> "IrrepLabel":
        d = ctx.irrep(j).dim
        return cls(m, j, d if m == 0 else 2 * d)


# -- element-level access ---------------------------------------------------------

def elements_of(ctx: AmbientContext, t: OrbitType, axis_offset: Fraction = Fraction(0)):
    """Explicit elements of one representative, with reflection axes shifted by
    axis_offset * pi.  Only finite types have element lists."""
    if not t.is_finite:
        raise InfiniteSubgroup(f"{t.symbol} contains a full O(2) factor")
    h = t.rep
    if axis_offset:
        h = h.conjugate(ROT, Fraction(axis_offset) / 2 % 1, 0)
    out = []
    for kind, a, g in sorted(h.elems):
        out.append(((kind, a), ctx.gamma.elements[g]))
    return out


# -- partial order, counts, Weyl groups --------------------------------------------



def grid_level(h: SubgroupG) -> int:
    """Common denominator of every angle in h."""
    den = 1
    for kind, a, g in h.elems:
        den = math.lcm(den, a.denominator)
    return den


def grid_arrays(h: SubgroupG, M: int):
    """(kinds, ticks, gammas, sorted elements) with angles as integers over 1/M."""
    got = h._grids.get(M)
    if got is None:
        elems = sorted(h.elems)
        kinds = np.array([e[0] for e in elems], dtype=np.int64)
        ticks = np.array([int(e[1] * M) % M for e in elems], dtype=np.int64)
        gammas = np.array([e[2] for e in elems], dtype=np.int64)
        got = (kinds, ticks, gammas, elems)
        h._grids[M] = got
    return got


def grid_codes(h: SubgroupG, M: int) -> np.ndarray:
    """Sorted packed integer codes ((kind*M + tick)*|Gamma'| + gamma) of h."""
    key = ("codes", M)
    got = h._grids.get(key)
    if got is None:
        kinds, ticks, gammas, _ = grid_arrays(h, M)
        got = np.sort((kinds * M + ticks) * h.gamma.order + gammas)
        h._grids[key] = got
    return got


def _inv_conj_table(gamma: FiniteGroup) -> np.ndarray:
    """Row g: conjugation by g^-1 as a map on Gamma'-element indices."""
    got = getattr(gamma, "_inv_conj_np", None)
    if got is None:
        got = np.array([gamma.conj_map[gamma.inv[g]] for g in range(gamma.order)],
                       dtype=np.int64)
        gamma._inv_conj_np = got
    return got


def _mapped_o2(kinds: np.ndarray, ticks: np.ndarray, conj_kind: int, two_c: int, M: int):
    """O(2)-parts of elements after conjugation by the inverse of (conj_kind, c),
    with angles as ticks over 1/M and two_c = 2*c*M."""
    rot = kinds == ROT
    if conj_kind == ROT:
        new = np.where(rot, ticks, (ticks - two_c) % M)
    else:
        new = np.where(rot, (-ticks) % M, (two_c - ticks) % M)
    return new


def _mapped_o2_fwd(kinds: np.ndarray, ticks: np.ndarray, conj_kind: int, two_c: int, M: int):
    """Same as _mapped_o2 but conjugating forward by (conj_kind, c)."""
    rot = kinds == ROT
    if conj_kind == ROT:
        new = np.where(rot, ticks, (ticks + two_c) % M)
    else:
        new = np.where(rot, (-ticks) % M, (two_c - ticks) % M)
    return new


def _conj_table(gamma: FiniteGroup) -> np.ndarray:
    got = getattr(gamma, "_conj_np", None)
    if got is None:
        got = np.array(gamma.conj_map, dtype=np.int64)
        gamma._conj_np = got
    return got


def leq(ctx: AmbientContext, h: OrbitType, k: OrbitType) -> bool:
    """(h) <= (k): some conjugate of h's representative lies inside k's."""
    if h.key == k.key:
        return True
    cached = ctx._leq_cache.get((h.key, k.key))
    if cached is not None:
        return cached
    if k.kind == "o2":
        if h.kind == "o2":
            got = _gamma_class_leq(ctx, h.k2_class, k.k2_class)
        else:
            got = _gamma_mask_leq_class(ctx, h.rep.proj2_mask, k.k2_class)
    elif h.kind == "o2":
        got = False
    else:
        got = False
        if h.order <= k.order and k.order % h.order == 0:
            got = bool(_containment_scan(h.rep, k.rep, 1, count=False))
    with ctx._lock:
        ctx._leq_cache[(h.key, k.key)] = got
    return got


def _containment_scan(h: SubgroupG, k: SubgroupG, grid_mult: int, count: bool):
    """Conjugates of k containing h: their number (count=True) or existence."""
    gamma = k.gamma
    M = math.lcm(grid_level(h), grid_level(k)) * grid_mult
    kinds, ticks, gammas, _ = grid_arrays(h, M)
    kcodes = grid_codes(k, M)
    inv_conj = _inv_conj_table(gamma)[:, gammas]
    if count:
        kkinds, kticks, kgammas, _ = grid_arrays(k, M)
        fwd_conj = _conj_table(gamma)
    found = set()
    for kind in (ROT, REF):
        for two_c in range(M):
            o2 = _mapped_o2(kinds, ticks, kind, two_c, M)
            codes = ((kinds * M + o2) * gamma.order)[None, :] + inv_conj
            ok = np.isin(codes, kcodes).all(axis=1)
            if not count:
                if ok.any():
                    return True
                continue
            hits = np.nonzero(ok)[0]
            if hits.size:
                ko2 = _mapped_o2_fwd(kkinds, kticks, kind, two_c, M)
                base = (kkinds * M + ko2) * gamma.order
                for g in hits:
                    conj_codes = np.sort(base + fwd_conj[g][kgammas])
                    found.add(conj_codes.tobytes())
    if not count:
        return False
    return len(found)


def _gamma_class_leq(ctx: AmbientContext, c1: int, c2: int) -> bool:
    g = ctx.gamma
    m1 = g.subgroup_classes()[c1].representative.mask
    for m2 in g.subgroup_classes()[c2].members:
        if (m1 & ~m2) == 0:
            return True
    return False


def _gamma_mask_leq_class(ctx: AmbientContext, mask: int, c2: int) -> bool:
    for m2 in ctx.gamma.subgroup_classes()[c2].members:
        if (mask & ~m2) == 0:
            return True
    return False


def n_amalgam(ctx: AmbientContext, h: OrbitType, k: OrbitType) -> int:
    """n(H, K): number of conjugates of K containing a fixed representative of H."""
    cached = ctx._n_cache.get((h.key, k.key))
    if cached is not None:
        return cached
    if k.kind == "o2":
        if h.kind == "o2":
            rep = ctx.gamma.subgroup_classes()[h.k2_class].representative.mask
        else:
            rep = h.rep.proj2_mask
        got = sum(1 for m in ctx.gamma.subgroup_classes()[k.k2_class].members
                  if (rep & ~m) == 0)
    elif h.kind == "o2":
        got = 0
    else:
        if not h.rep.has_reflections:
            raise InfiniteWeyl(f"{h.symbol} has infinite Weyl group; n(H,K) undefined")
        got = _count_containing(h.rep, k.rep, 1)
        again = _count_containing(h.rep, k.rep, 2)
        if got != again:
            raise StabilizationFailure(
                f"n({h.symbol},{k.symbol}) unstable under grid refinement: {got} vs {again}")
    with ctx._lock:
        ctx._n_cache[(h.key, k.key)] = got
    return got


def _count_containing(h: SubgroupG, k: SubgroupG, grid_mult: int) -> int:
    if h.order > k.order or k.order % h.order != 0:
        return 0
    return _containment_scan(h, k, grid_mult, count=True)


def ambient_weyl_order(ctx: AmbientContext, t: OrbitType) -> int:
    """|N(H)/H| inside the literal product group O(2) x Gamma'."""
    cached = ctx._weyl_cache.get(t.key)
    if cached is not None:
        return cached
    if t.kind == "o2":
        g = ctx.gamma
        rep = g.subgroup_classes()[t.k2_class].representative
        nm = bin(g.normalizer_mask(rep.mask)).count("1")
        got = nm // rep.order
    else:
        h = t.rep
        if not h.has_reflections:
            raise InfiniteWeyl(f"{t.symbol} has infinite Weyl group")
        got = _normalizer_count(h, 1)
        again = _normalizer_count(h, 2)
        if got != again:
            raise InfiniteWeyl(f"{t.symbol}: normalizer grows under grid refinement")
        assert got % h.order == 0
        got //= h.order
    with ctx._lock:
        ctx._weyl_cache[t.key] = got
    return got


def _normalizer_count(h: SubgroupG, grid_mult: int) -> int:
    """Size of the normalizer intersected with the alignment grid.

    Conjugation by c and by c + 1/2 act identically on O(2), so the grid runs
    over 2c in [0, 1); each hit therefore accounts for two conjugators, which
    matches |N(H)| because the kernel of the conjugation action has order 2.
    """
    gamma = h.gamma
    M = grid_level(h) * grid_mult
    kinds, ticks, gammas, _ = grid_arrays(h, M)
    target = grid_codes(h, M)
    conj = _conj_table(gamma)[:, gammas]
    count = 0
    for kind in (ROT, REF):
        for two_c in range(M):
            o2 = _mapped_o2_fwd(kinds, ticks, kind, two_c, M)
            codes = ((kinds * M + o2) * gamma.order)[None, :] + conj
            count += int(np.isin(codes, target).all(axis=1).sum())
    return 2 * count


def coeff_scale(ctx: AmbientContext, t: OrbitType) -> int:
    """Basis rescale of the table presentation relative to the ambient ring.

    Coefficients on finite types whose O(2)-kernel contains no reflection are
    reported doubled; the presentations are isomorphic and all internal
    arithmetic runs in the ambient ring.  "ambient" mode turns the rescale off.
    """
    if (ctx.weyl_mode == "reduced" and t.is_finite and t.rep.has_reflections
            and not t.rep.z1_axes):
        return 2
    return 1


def weyl_order_amalgam(ctx: AmbientContext, t: OrbitType) -> int:
    """Weyl order in the table presentation (ambient order over the rescale)."""
    w = ambient_weyl_order(ctx, t)
    s = coeff_scale(ctx, t)
    if w % s:
        raise InfiniteWeyl(f"{t.symbol}: presentation Weyl weight is not integral")
    return w // s


def x0_of(ctx: AmbientContext, t: OrbitType) -> int:
    w = weyl_order_amalgam(ctx, t)
    if w == 2:
        return 1
    if w == 1:
        return 2
    raise InfiniteWeyl(f"{t.symbol} has |W| = {w}; expected 1 or 2 for a maximal type")


# -- folding -------------------------------------------------------------------------

def fold_subgroup(h: SubgroupG, s: int) -> SubgroupG:
    elems = []
    for kind, a, g in h.elems:
        for i in range(s):
            elems.append((kind, (a + i) / s % 1, g))
    return SubgroupG(h.gamma, elems)


def fold(ctx: AmbientContext, t: OrbitType, s: int) -> OrbitType:
    """Preimage class under the s-fold map on the O(2) factor."""
    if s == 1:
        return t
    if t.kind == "o2":
        return t
    return ctx.intern(fold_subgroup(t.rep, s))


# -- fixed spaces -----------------------------------------------------------------------

def fixed_dim_irrep(ctx: AmbientContext, t: OrbitType, m: int, j: int) -> int:
    """dim (W_m (x) V_j^-)^H by character averaging."""
    cached = ctx._fix_cache.get((t.key, m, j))
    if cached is not None:
        return cached
    irr = ctx.irrep(j)
    if t.kind == "o2":
        if m >= 1:
            got = 0
        else:
            g = ctx.gamma
            members = g.subgroup_classes()[t.k2_class].representative.members()
            got = _snap_int(sum(irr.chars[x] for x in members) / len(members))
    else:
        tot = 0.0
        for kind, a, g in t.rep.elems:
            if m == 0:
                tot += irr.chars[g]
            elif kind == ROT:
                tot += 2.0 * np.cos(TWO_PI * m * float(a)) * irr.chars[g]
        got = _snap_int(tot / t.rep.order)
    with ctx._lock:
        ctx._fix_cache[(t.key, m, j)] = got
    return got


def _snap_int(val: float) -> int:
    snapped = round(val)
    if abs(val - snapped) > 1e-9:
        raise NonIntegralTrace(f"averaged character {val} is not an integer")
    return int(snapped)


def rep_matrix(ctx: AmbientContext, m: int, j: int, elem: tuple) -> np.ndarray:
    kind, a, g = elem
    B = ctx.irrep(j).mats[g]
    if m == 0:
        return B
    phi = TWO_PI * m * float(a)
    c, s = np.cos(phi), np.sin(phi)
    if kind == ROT:
        R = np.array([[c, -s], [s, c]])
    else:
        R = np.array([[c, s], [s, -c]])
    return np.kron(R, B)


def fixed_space(ctx: AmbientContext, m: int, j: int, h: SubgroupG) -> np.ndarray:
    dim = ctx.irrep(j).dim * (1 if m == 0 else 2)
    P = np.zeros((dim, dim))
    for elem in h.elems:
        P += rep_matrix(ctx, m, j, elem)
    P /= h.order
    vals, vecs = np.linalg.eigh(P)
    return vecs[:, vals > 0.5]


def _pointwise_stabilizer(ctx: AmbientContext, m: int, j: int, W: np.ndarray,
                          max_den: int) -> Optional[set]:
    """All (kind, angle, g) fixing the column space of W pointwise; None if any
    stabilizing angle fails to land on the rational grid (an off-grid element
    means the candidate cannot be its own stabilizer)."""
    irr = ctx.irrep(j)
    d = irr.dim
    f = W.shape[1]
    out = set()
    Wt = W.T.reshape(f, 2, d)  # each fixed vector as a 2 x d coordinate block
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    K = np.array([[1.0, 0.0], [0.0, -1.0]])
    L = np.array([[0.0, 1.0], [1.0, 0.0]])
    for g in range(ctx.gamma.order):
        B = irr.mats[g]
        WB = np.stack([w @ B.T for w in Wt])  # rotation part acts on the left
        target = Wt.reshape(-1)
        for kind, M1, M2 in ((ROT, np.eye(2), J), (REF, K, L)):
            col1 = np.stack([M1 @ wb for wb in WB]).reshape(-1)
            col2 = np.stack([M2 @ wb for wb in WB]).reshape(-1)
            A = np.stack([col1, col2], axis=1)
            sols = _unit_circle_solutions(A, target)
            if sols is None:
                return None
            for x, y in sols:
                phi = float(np.arctan2(float(y), float(x))) / TWO_PI % 1.0
                for kcopy in range(m):
                    tval = (phi + kcopy) / m
                    frac = Fraction(tval).limit_denominator(max_den)
                    if abs(float(frac) - tval) > 1e-9:
                        if abs(tval - 1.0) <= 1e-9:  # wrapped zero angle
                            frac = Fraction(0)
                        else:
                            return None
                    out.add((kind, frac % 1, g))
    return out


def _unit_circle_solutions(A: np.ndarray, b: np.ndarray):
    """Solutions of A v = b with |v| = 1; None when a whole circle solves."""
    sol, res, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank == 0:
        if np.linalg.norm(b) < 1e-9:
            return None  # every angle fixes W: continuum
        return []
    if rank == 2:
        if np.linalg.norm(A @ sol - b) > 1e-9:
            return []
        if abs(np.linalg.norm(sol) - 1.0) > 1e-9:
            return []
        return [tuple(sol)]
    # rank 1: line of least-squares solutions sol + t * null
    u, s, vt = np.linalg.svd(A)
    null = vt[1]
    # intersect |sol + t*null| = 1
    p = float(sol @ null)
    q = float(sol @ sol) - 1.0
    disc = p * p - q
    if disc < -1e-12:
        return []
    roots = []
    for sign in (1.0, -1.0):
        t = -p + sign * np.sqrt(max(disc, 0.0))
        v = sol + t * null
        if np.linalg.norm(A @ v - b) <= 1e-9:
            roots.append(tuple(v))
    uniq = []
    for v in roots:
        if not any(abs(v[0] - w[0]) + abs(v[1] - w[1]) < 1e-12 for w in uniq):
            uniq.append(v)
    return uniq


# -- orbit type enumeration ------------------------------------------------------------

class _Quotient:
    """Coset structure K2 / Z2 inside Gamma'."""

    def __init__(self, gamma: FiniteGroup, k2_mask: int, z2_mask: int):
        self.gamma = gamma
        members = gamma.mask_elements(k2_mask)
        z2 = gamma.mask_elements(z2_mask)
        coset_of = {}
        cosets = []
        for x in members:
            if x in coset_of:
                continue
            cid = len(cosets)
            elems = sorted(gamma.mul[x][z] for z in z2)
            for y in elems:
                coset_of[y] = cid
            cosets.append(elems)
        # identity coset first
        id_c = coset_of[0]
        if id_c != 0:
            order = [id_c] + [i for i in range(len(cosets)) if i != id_c]
            remap = {old: new for new, old in enumerate(order)}
            cosets = [cosets[old] for old in order]
            coset_of = {x: remap[c] for x, c in coset_of.items()}
        self.cosets = cosets
        self.coset_of = coset_of
        self.size = len(cosets)
        self.mul_table = [[coset_of[gamma.mul[cosets[i][0]][cosets[j][0]]]
                           for j in range(self.size)] for i in range(self.size)]

    def order_of(self, i: int) -> int:
        n, x = 1, i
        while x != 0:
            x = self.mul_table[x][i]
            n += 1
        return n

    def power(self, i: int, k: int) -> int:
        x = 0
        for _ in range(k):
            x = self.mul_table[x][i]
        return x


def _dihedral_isos(q2: _Quotient, r: int):
    """Isomorphisms D_r -> q2, as maps (kind j, index i) -> coset id.

    D_r elements are encoded (j, i) = rho^i sigma^j with 0 <= i < r, j in {0,1}.
    For r == 0 the source is the cyclic group Z_{|q2|} generated by rho.
    """
    out = []
    if r == 0:
        n = q2.size
        for R in range(q2.size):
            if q2.order_of(R) != n:
                continue
            out.append({(0, i): q2.power(R, i) for i in range(n)})
        return out
    if 2 * r != q2.size:
        return []
    for R in range(q2.size):
        if q2.order_of(R) != max(r, 1):
            continue
        Rinv = q2.power(R, r - 1) if r > 1 else 0
        for S in range(q2.size):
            if S == 0 or q2.order_of(S) != 2:
                continue
            if q2.mul_table[q2.mul_table[S][R]][S] != Rinv:
                continue
            mapping = {}
            ok = True
            used = set()
            for i in range(r):
                Ri = q2.power(R, i)
                mapping[(0, i)] = Ri
                mapping[(1, i)] = q2.mul_table[Ri][S]
            used = set(mapping.values())
            if len(used) == q2.size:
                out.append(mapping)
    return out


def _candidate_subgroups(ctx: AmbientContext, amax: int, include_cyclic: bool):
    """Goursat candidates for isotropy groups in W_m (x) V_j^- (amax = m * exponent)."""
    gamma = ctx.gamma
    classes = gamma.subgroup_classes()
    all_subs = gamma.all_subgroups()
    for a1 in _divisors(amax):
        # kernel shapes inside D_{a1} (and Z_{a1} when cyclic types are wanted)
        shapes = []
        for b in _divisors(a1):
            shapes.append(("rotkernel", b))  # Z_b, quotient D_{a1/b}
        if a1 % 2 == 0:
            shapes.append(("halfdihedral", a1 // 2))  # D_{a1/2}, quotient Z_2
        shapes.append(("fulldihedral", a1))  # quotient trivial
        if include_cyclic:
            for b in _divisors(a1):
                shapes.append(("cyclic", b))  # Z_b inside Z_{a1}, quotient Z_{a1/b}
        for shape, b in shapes:
            if shape == "rotkernel":
                q1_size, r = 2 * (a1 // b), a1 // b
            elif shape == "halfdihedral":
                q1_size, r = 2, 1
            elif shape == "fulldihedral":
                q1_size, r = 1, 0
            else:
                q1_size, r = a1 // b, 0
            for ci, cls in enumerate(classes):
                k2_mask = cls.representative.mask
                k2_order = cls.order
                if k2_order % max(q1_size, 1) != 0:
                    continue
                z2_order = k2_order // max(q1_size, 1)
                for z2_mask in all_subs:
                    if (z2_mask & ~k2_mask) != 0:
                        continue
                    if bin(z2_mask).count("1") != z2_order:
                        continue
                    if any(gamma.conjugate_mask(z2_mask, x) != z2_mask
                           for x in gamma.mask_elements(k2_mask)):
                        continue
                    q2 = _Quotient(gamma, k2_mask, z2_mask)
                    if shape == "fulldihedral":
                        isos = [{}] if q2.size == 1 else []
                    elif shape == "cyclic":
                        isos = _dihedral_isos(q2, 0) if q2.size == a1 // b else []
                    elif shape == "halfdihedral":
                        isos = _z2half_isos(q2)
                    else:
                        isos = _dihedral_isos(q2, r) if q2.size == 2 * r or (r == 1 and q2.size == 2) else []
                    for iso in isos:
                        yield _build_candidate(ctx, a1, shape, b, q2, iso)


def _z2half_isos(q2: _Quotient):
    if q2.size != 2:
        return []
    return [{(0, 0): 0, (0, 1): 1}]


def _build_candidate(ctx: AmbientContext, a1: int, shape: str, b: int,
                     q2: _Quotient, iso: dict) -> SubgroupG:
    gamma = ctx.gamma
    elems = []
    if shape == "cyclic":
        mod = a1 // b
        for k in range(a1):
            cid = iso[(0, k % mod)] if mod > 1 else 0
            for g in q2.cosets[cid]:
                elems.append((ROT, Fraction(k, a1), g))
    else:
        for kind in (ROT, REF):
            for k in range(a1):
                if shape == "fulldihedral":
                    cid = 0
                elif shape == "halfdihedral":
                    cid = iso[(0, k % 2)]
                else:  # rotkernel Z_b, quotient D_{a1//b}
                    cid = iso[(kind, k % (a1 // b))]
                for g in q2.cosets[cid]:
                    elems.append((kind, Fraction(k, a1), g))
    return SubgroupG(gamma, elems)


def orbit_types(ctx: AmbientContext, m: int, j: int, include_non_phi0: bool = False):
    """Conjugacy classes of isotropy groups of nonzero points of W_m (x) V_j^-.

    By default only classes with finite Weyl group (dihedral projection, plus
    the full-O(2) classes at m = 0) are returned, which is what the Burnside
    layer consumes; include_non_phi0 adds the cyclic-projection classes.
    """
    key = (m, j, include_non_phi0)
    with ctx._lock:
        if key in ctx._orbit_type_cache:
            return list(ctx._orbit_type_cache[key])
    if m == 0:
        out = _orbit_types_m0(ctx, j)
    elif m == 1:
        out = _orbit_types_enum(ctx, 1, j, include_non_phi0)
    else:
        base = orbit_types(ctx, 1, j, include_non_phi0)
        out = [fold(ctx, t, m) for t in base]
    with ctx._lock:
        ctx._orbit_type_cache[key] = tuple(out)
    return list(out)


def orbit_types_direct(ctx: AmbientContext, m: int, j: int, include_non_phi0: bool = False):
    """Debug cross-check: enumerate frequency-m orbit types without folding."""
    if m == 0:
        return _orbit_types_m0(ctx, j)
    return _orbit_types_enum(ctx, m, j, include_non_phi0)


def _orbit_types_m0(ctx: AmbientContext, j: int):
    gamma = ctx.gamma
    irr = ctx.irrep(j)
    out = []
    for ci, cls in enumerate(gamma.subgroup_classes()):
        members = cls.representative.members()
        P = np.zeros((irr.dim, irr.dim))
        for x in members:
            P += irr.mats[x]
        P /= len(members)
        vals, vecs = np.linalg.eigh(P)
        W = vecs[:, vals > 0.5]
        if W.shape[1] == 0:
            continue
        stab = 0
        for g in range(gamma.order):
            if np.abs(irr.mats[g] @ W - W).max() < 1e-9:
                stab |= 1 << g
        if stab == cls.representative.mask:
            out.append(ctx.intern_o2(ci))
    return out


def _orbit_types_enum(ctx: AmbientContext, m: int, j: int, include_non_phi0: bool):
    irr = ctx.irrep(j)
    survivors = []
    seen = set()
    for h in _candidate_subgroups(ctx, m * ctx.exponent, include_cyclic=include_non_phi0):
        # quick character-based pruning before any matrix work
        tot = sum(2.0 * np.cos(TWO_PI * m * float(a)) * irr.chars[g]
                  for kind, a, g in h.elems if kind == ROT)
        fix = tot / h.order
        if fix < 0.5:
            continue
        h = h.std_position()
        if h.elems in seen:
            continue
        seen.add(h.elems)
        survivors.append(h)
    out = []
    tested = set()
    max_den = 4 * m * ctx.exponent
    for h in survivors:
        t = ctx.intern(h)
        if t.key in tested:
            continue
        tested.add(t.key)
        h0 = t.rep
        W = fixed_space(ctx, m, j, h0)
        if W.shape[1] == 0:
            continue
        stab = _pointwise_stabilizer(ctx, m, j, W, max_den)
        if stab is not None and stab == set(h0.elems):
            out.append(t)
    out.sort(key=lambda t: (t.order, t.symbol))
    return out


def maximal_types(ctx: AmbientContext, m: int, j: int):
    """Maximal orbit types of W_m (x) V_j^- under the subconjugation order."""
    with ctx._lock:
        cache = ctx._maximal_cache.get((m, j))
    if cache is None:
        pool = orbit_types(ctx, m, j)
        cache = [t for t in pool
                 if not any(u.key != t.key and leq(ctx, t, u) for u in pool)]
        cache.sort(key=lambda t: (t.order or 0, t.symbol))
        with ctx._lock:
            ctx._maximal_cache[(m, j)] = cache
    return list(cache)


# -- symbol rendering --------------------------------------------------------------

_PRETTY_SUFFIX = {"z": "^z", "d": "^d", "hd": "^d̂", "m": "^-", "p": "^p"}


def pretty_symbol(symbol: str) -> str:
    """Unicode form of an ASCII amalgamated symbol."""
    import re

    def deco(name: str) -> str:
        m = re.fullmatch(r"([A-Z])(\d+)(hd|[zdmp]?)", name)
        if not m:
            return name
        letter, num, suf = m.groups()
        return f"{letter}_{num}" + (_PRETTY_SUFFIX.get(suf, "") if suf else "")

    m = re.fullmatch(r"\((\w+)\^(\w+) x\^(\w+) (\w+)\)(~\d+)?", symbol)
    if not m:
        if symbol == "(G)":
            return "(G)"
        m2 = re.fullmatch(r"\(O2 x (\w+)\)", symbol)
        if m2:
            return f"(O(2) × {deco(m2.group(1))})"
        return symbol
    k1, z1, z2, k2, suffix = m.groups()
    return f"({deco(k1)}^{{{deco(z1)}}} ×^{{{deco(z2)}}} {deco(k2)})" + (suffix or "")


def parse_symbol(ctx: AmbientContext, symbol: str) -> OrbitType:
    """Look up a type from its ASCII symbol, enumerating orbit types on demand."""
    import re

    try:
        return ctx.type_by_symbol(symbol)
    except KeyError:
        pass
    m = re.match(r"\((?:D|Z)(\d+)\^", symbol)
    folds = {1}
    if m:
        a1 = int(m.group(1))
        folds.update(d for d in _divisors(a1))
    for j in ctx.active_js():
        orbit_types(ctx, 0, j)
        base = orbit_types(ctx, 1, j)
        for s in sorted(folds):
            for t in base:
                fold(ctx, t, s)
    return ctx.type_by_symbol(symbol)


def _generated_names(gamma: FiniteGroup) -> list[str]:
    names = []
    by_order: dict[int, int] = {}
    for cls in gamma.subgroup_classes():
        idx = by_order.get(cls.order, 0)
        by_order[cls.order] = idx + 1
        names.append(f"U{cls.order}_{idx}")
    return names
