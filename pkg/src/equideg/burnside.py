"""Burnside ring arithmetic over the orbit types of O(2) x Gamma'.

Elements are sparse integer combinations of orbit types; generator products
are evaluated through the recurrence over the subconjugation order, with all
containment counts delegated to the orbit-type layer.  Generator products are
memoized per canonical pair.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import NonIntegralCoefficient
from .groups import n_count, weyl_order
from .orbit_types import (
    REF,
    ROT,
    AmbientContext,
    OrbitType,
    SubgroupG,
    _inv_conj_table,
    ambient_weyl_order,
    coeff_scale,
    grid_arrays,
    grid_codes,
    grid_level,
    leq,
    n_amalgam,
)
from .orbit_types import _mapped_o2


class BurnsideElement:
    """Sparse integer combination of orbit types (zero coefficients dropped)."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: AmbientContext, terms=None):
        self.ctx = ctx
        self.terms: dict[OrbitType, int] = {}
        if terms:
            for t, c in dict(terms).items():
                if c:
                    self.terms[t] = int(c)

    # -- construction -----------------------------------------------------------

    @classmethod
    def zero(cls, ctx: AmbientContext) -> "BurnsideElement":
        return cls(ctx)

    @classmethod
    def unit(cls, ctx: AmbientContext) -> "BurnsideElement":
        return cls(ctx, {ctx.unit: 1})

    @classmethod
    def generator(cls, ctx: AmbientContext, t: OrbitType, coeff: int = 1) -> "BurnsideElement":
        return cls(ctx, {t: coeff})

    # -- ring operations -----------------------------------------------------------

    def __add__(self, other: "BurnsideElement") -> "BurnsideElement":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return BurnsideElement(self.ctx, out)

    def __sub__(self, other: "BurnsideElement") -> "BurnsideElement":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) - c
        return BurnsideElement(self.ctx, out)

    def __neg__(self) -> "BurnsideElement":
        return BurnsideElement(self.ctx, {t: -c for t, c in self.terms.items()})

    def __mul__(self, other) -> "BurnsideElement":
        if isinstance(other, int):
            return BurnsideElement(self.ctx, {t: c * other for t, c in self.terms.items()})
        out: dict[OrbitType, int] = {}
        for t1, c1 in self.terms.items():
            for t2, c2 in other.terms.items():
                for t, c in generator_product(self.ctx, t1, t2).items():
                    out[t] = out.get(t, 0) + c1 * c2 * c
        return BurnsideElement(self.ctx, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, BurnsideElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, t: OrbitType) -> int:
        """Coefficient in the table presentation (rescaled basis)."""
        return self.terms.get(t, 0) * coeff_scale(self.ctx, t)

    def coeff_ambient(self, t: OrbitType) -> int:
        return self.terms.get(t, 0)

    # -- presentation -----------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[str, int]]:
        def key(item):
            t, _ = item
            return (0 if t is self.ctx.unit else 1, t.sort_rank())
        return [(t.symbol, c * coeff_scale(self.ctx, t))
                for t, c in sorted(self.terms.items(), key=key)]

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for sym, c in self.sorted_terms():
            if c == 1:
                bits.append(f"+ {sym}")
            elif c == -1:
                bits.append(f"- {sym}")
            elif c > 0:
                bits.append(f"+ {c}{sym}")
            else:
                bits.append(f"- {-c}{sym}")
        text = " ".join(bits)
        return text[2:] if text.startswith("+ ") else text


def unit(ctx: AmbientContext) -> BurnsideElement:
    return BurnsideElement.unit(ctx)


def multiply(a: BurnsideElement, b: BurnsideElement) -> BurnsideElement:
    return a * b


def coeff(a: BurnsideElement, t: OrbitType) -> int:
    return a.coeff(t)


# -- generator products ----------------------------------------------------------------

def generator_product(ctx: AmbientContext, a: OrbitType, b: OrbitType) -> dict[OrbitType, int]:
    if a is ctx.unit:
        return {b: 1}
    if b is ctx.unit:
        return {a: 1}
    key = (a.key, b.key) if a.key <= b.key else (b.key, a.key)
    cache = _product_cache(ctx)
    got = cache.get(key)
    if got is None:
        if a.kind == "o2" and b.kind == "o2":
            got = _product_o2_o2(ctx, a, b)
        elif a.kind == "o2":
            got = _product_mixed(ctx, b, a)
        elif b.kind == "o2":
            got = _product_mixed(ctx, a, b)
        else:
            got = _product_finite(ctx, a, b)
        with ctx._lock:
            cache[key] = got
    return got


def _product_cache(ctx: AmbientContext) -> dict:
    cache = getattr(ctx, "_generator_products", None)
    if cache is None:
        with ctx._lock:
            cache = getattr(ctx, "_generator_products", None)
            if cache is None:
                cache = {}
                ctx._generator_products = cache
    return cache


def _resolve_recurrence(ctx: AmbientContext, a: OrbitType, b: OrbitType,
                        candidates: Iterable[OrbitType]) -> dict[OrbitType, int]:
    cands = sorted({t.key: t for t in candidates}.values(),
                   key=lambda t: t.sort_rank(), reverse=True)
    coeffs: dict[OrbitType, int] = {}
    for L in cands:
        lead = (n_amalgam(ctx, L, a) * ambient_weyl_order(ctx, a)
                * n_amalgam(ctx, L, b) * ambient_weyl_order(ctx, b))
        corr = 0
        for Lt, val in coeffs.items():
            if val and leq(ctx, L, Lt):
                corr += val * n_amalgam(ctx, L, Lt) * ambient_weyl_order(ctx, Lt)
        num = lead - corr
        wl = ambient_weyl_order(ctx, L)
        if num % wl:
            raise NonIntegralCoefficient(
                f"({a.symbol})({b.symbol}): coefficient of {L.symbol} = {num}/{wl}")
        if num:
            coeffs[L] = num // wl
    return {t: c for t, c in coeffs.items() if c}


def _product_finite(ctx: AmbientContext, a: OrbitType, b: OrbitType) -> dict[OrbitType, int]:
    import numpy as np

    A, B = a.rep, b.rep
    gamma = ctx.gamma
    M = math.lcm(grid_level(A), grid_level(B))
    kinds, ticks, gammas, elems_sorted = grid_arrays(A, M)
    bcodes = grid_codes(B, M)
    b_axes = {int(x * M) % M for x in B.axes}
    refl_mask = kinds == REF
    refl_idx = np.nonzero(refl_mask)[0]
    inv_conj = _inv_conj_table(gamma)[:, gammas]
    gorder = gamma.order
    cands: dict[int, OrbitType] = {}
    seen = set()
    for kind in (ROT, REF):
        for two_c in range(M):
            o2 = _mapped_o2(kinds, ticks, kind, two_c, M)
            # a contributing (finite-Weyl) intersection must contain a
            # reflection of A whose image lands on an axis of B
            if not any(int(o2[i]) in b_axes for i in refl_idx):
                continue
            codes = ((kinds * M + o2) * gorder)[None, :] + inv_conj
            present = np.isin(codes, bcodes)
            rows = np.nonzero(present.sum(axis=1) > 1)[0]
            for g in rows:
                mask = present[g]
                if not (mask & refl_mask).any():
                    continue
                fro = frozenset(elems_sorted[i] for i in np.nonzero(mask)[0])
                if fro in seen:
                    continue
                seen.add(fro)
                t = ctx.intern(SubgroupG(gamma, fro))
                cands[t.key] = t
    return _resolve_recurrence(ctx, a, b, cands.values())


def _product_mixed(ctx: AmbientContext, fin: OrbitType, o2t: OrbitType) -> dict[OrbitType, int]:
    gamma = ctx.gamma
    cls = gamma.subgroup_classes()[o2t.k2_class]
    cands: dict[int, OrbitType] = {}
    for mask in cls.members:
        inter = frozenset(e for e in fin.rep.elems if (mask >> e[2]) & 1)
        if len(inter) <= 1:
            continue
        L = SubgroupG(gamma, inter)
        if not L.has_reflections:
            continue
        t = ctx.intern(L)
        cands[t.key] = t
    return _resolve_recurrence(ctx, fin, o2t, cands.values())


def _product_o2_o2(ctx: AmbientContext, a: OrbitType, b: OrbitType) -> dict[OrbitType, int]:
    coeffs = gamma_burnside_product(ctx.gamma, a.k2_class, b.k2_class)
    return {ctx.intern_o2(ci): c for ci, c in coeffs.items() if c}


# -- Burnside ring of the finite factor ---------------------------------------------------

def gamma_burnside_product(gamma, c1: int, c2: int) -> dict[int, int]:
    """(H)(K) in A(Gamma') for subgroup classes c1, c2; keys are class indices."""
    classes = gamma.subgroup_classes()
    m1 = classes[c1].representative.mask
    cand_idx = set()
    for m2 in classes[c2].members:
        inter = m1 & m2
        cand_idx.add(gamma.subgroup_class_of(inter))
    order = sorted(cand_idx, key=lambda ci: classes[ci].order, reverse=True)
    coeffs: dict[int, int] = {}
    for ci in order:
        h = classes[ci].representative
        lead = (n_count(gamma, h, classes[c1]) * _gamma_weyl(gamma, c1)
                * n_count(gamma, h, classes[c2]) * _gamma_weyl(gamma, c2))
        corr = 0
        for cj, val in coeffs.items():
            if val:
                corr += val * n_count(gamma, h, classes[cj]) * _gamma_weyl(gamma, cj)
        num = lead - corr
        wl = _gamma_weyl(gamma, ci)
        if num % wl:
            raise NonIntegralCoefficient(f"Gamma'-ring product: {num}/{wl}")
        if num:
            coeffs[ci] = num // wl
    return coeffs


def _gamma_weyl(gamma, ci: int) -> int:
    cache = getattr(gamma, "_weyl_by_class", None)
    if cache is None:
        cache = {}
        gamma._weyl_by_class = cache
    got = cache.get(ci)
    if got is None:
        got = weyl_order(gamma, gamma.subgroup_classes()[ci].representative)
        cache[ci] = got
    return got
