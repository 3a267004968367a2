"""Basic degrees of the irreducible representations and their products.

The degree of -id on the unit ball of W_m (x) V_j^- is computed by the
recurrence over the orbit-type poset at frequency 1 (or 0) and transported to
higher frequencies by the folding homomorphism; the direct computation at
frequency m is kept as a debug cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .burnside import BurnsideElement
from .errors import CrossCheckMismatch, NonIntegralCoefficient
from .orbit_types import (
    AmbientContext,
    IrrepLabel,
    OrbitType,
    ambient_weyl_order,
    fixed_dim_irrep,
    fold,
    leq,
    maximal_types,
    n_amalgam,
    orbit_types,
    orbit_types_direct,
    x0_of,
)


@dataclass(frozen=True)
class BasicDegree:
    label: IrrepLabel
    value: BurnsideElement


def basic_degree(ctx: AmbientContext, m: int, j: int) -> BasicDegree:
    """deg of -id on B(W_m (x) V_j^-); frequency m >= 1 is folded from m = 1."""
    cache = _degree_cache(ctx)
    got = cache.get((m, j))
    if got is None:
        if m <= 1:
            value = _degree_recurrence(ctx, m, j, orbit_types(ctx, m, j))
        else:
            base = basic_degree(ctx, 1, j).value
            value = fold_element(ctx, base, m)
        got = BasicDegree(IrrepLabel.of(ctx, m, j), value)
        with ctx._lock:
            cache[(m, j)] = got
    return got


def basic_degree_direct(ctx: AmbientContext, m: int, j: int) -> BasicDegree:
    """Debug path: run the recurrence at frequency m without folding."""
    value = _degree_recurrence(ctx, m, j, orbit_types_direct(ctx, m, j))
    return BasicDegree(IrrepLabel.of(ctx, m, j), value)


def _degree_cache(ctx: AmbientContext) -> dict:
    cache = getattr(ctx, "_basic_degrees", None)
    if cache is None:
        with ctx._lock:
            cache = getattr(ctx, "_basic_degrees", None)
            if cache is None:
                cache = {}
                ctx._basic_degrees = cache
    return cache


def _degree_recurrence(ctx: AmbientContext, m: int, j: int,
                       types: Sequence[OrbitType]) -> BurnsideElement:
    pool = list(types) + [ctx.unit]
    pool.sort(key=lambda t: t.sort_rank(), reverse=True)
    coeffs: dict[OrbitType, int] = {}
    for t in pool:
        lead = -1 if fixed_dim_irrep(ctx, t, m, j) % 2 else 1
        corr = 0
        for u, val in coeffs.items():
            if val and leq(ctx, t, u):
                corr += val * n_amalgam(ctx, t, u) * ambient_weyl_order(ctx, u)
        num = lead - corr
        w = ambient_weyl_order(ctx, t)
        if num % w:
            raise NonIntegralCoefficient(
                f"deg(W_{m} x V_{j}): coefficient of {t.symbol} = {num}/{w}")
        if num:
            coeffs[t] = num // w
    return BurnsideElement(ctx, coeffs)


def fold_element(ctx: AmbientContext, elem: BurnsideElement, s: int) -> BurnsideElement:
    out: dict[OrbitType, int] = {}
    for t, c in elem.terms.items():
        ft = fold(ctx, t, s)
        out[ft] = out.get(ft, 0) + c
    return BurnsideElement(ctx, out)


def degree_of_linearization(ctx: AmbientContext, triples: Iterable[tuple[int, int, int]],
                            multiplicities: dict[int, int]) -> BurnsideElement:
    """Product of basic degrees over the index set; even isotypic multiplicities
    contribute the unit and are skipped."""
    out = BurnsideElement.unit(ctx)
    for n, m, j in triples:
        if multiplicities.get(j, 1) % 2 == 0:
            continue
        out = out * basic_degree(ctx, m, j).value
    return out


def coeff_fast(ctx: AmbientContext, h: OrbitType, s: int, js: Sequence[int]) -> int:
    """Coefficient of the s-fold of h in prod_k deg(W_s (x) V_{j_k}^-), via the
    odd-fixed-dimension parity rule; the result is cross-checked against the
    literal Burnside product."""
    if not js:
        return 0
    for j in js:
        if all(h.key != u.key for u in maximal_types(ctx, 1, j)):
            raise CrossCheckMismatch(
                f"{h.symbol} is not maximal in component {j}; fast path inapplicable")
    odd = sum(1 for j in js if fixed_dim_irrep(ctx, h, 1, j) % 2)
    fast = -x0_of(ctx, fold(ctx, h, s)) if odd % 2 else 0
    prod = BurnsideElement.unit(ctx)
    for j in js:
        prod = prod * basic_degree(ctx, s, j).value
    brute = prod.coeff(fold(ctx, h, s))
    if fast != brute:
        raise CrossCheckMismatch(
            f"coeff^({h.symbol} fold {s}) fast={fast} != product={brute}")
    return fast
