"""Local bifurcation invariants, folding statistics, and global verdicts.

The invariant at a crossing is the difference of degree products over the
negative-spectrum index sets on both sides.  Products are evaluated in the
Burnside layer (brute force is normative); the frequency-folding statistics
feed the closed-form coefficient rule, which is always cross-checked against
the product value.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .burnside import BurnsideElement
from .degrees import basic_degree
from .errors import CrossCheckMismatch, NotIsolated
from .orbit_types import (
    AmbientContext,
    OrbitType,
    ambient_weyl_order,
    fold,
    maximal_types,
    n_amalgam,
    x0_of,
)
from .spectrum import BesselZeroTable, CriticalPoint, EigenvalueCurve


class BifurcationProblem:
    """Spectral data plus the Burnside context for one linearized model."""

    def __init__(self, ctx: AmbientContext, curves: Sequence[EigenvalueCurve],
                 table: BesselZeroTable, multiplicities: dict[int, int],
                 critical: Sequence[CriticalPoint], mode: str = "relative",
                 k_fixed: bool = True, alpha_bracket: float = 1.0):
        if mode not in ("relative", "full"):
            raise ValueError(f"unknown mode {mode!r}")
        self.ctx = ctx
        self.curves = {c.j: c for c in curves}
        self.table = table
        self.multiplicities = dict(multiplicities)
        self.critical = sorted(critical, key=lambda cp: cp.alpha)
        self.mode = mode
        self.k_fixed = k_fixed
        self.alpha_bracket = alpha_bracket
        self._rho_cache: dict = {}
        self._rho_lock = threading.Lock()

    # -- index bookkeeping -------------------------------------------------------

    def crossing_levels(self) -> list[float]:
        return [cp.zeta_level for cp in self.critical]

    def bracket(self, cp: CriticalPoint) -> tuple[float, float]:
        """alpha0 -/+ min(alpha_bracket, half-gap to the neighbouring crossings)."""
        alphas = [c.alpha for c in self.critical]
        i = alphas.index(cp.alpha)
        gap_lo = cp.alpha - alphas[i - 1] if i > 0 else math.inf
        gap_hi = alphas[i + 1] - cp.alpha if i + 1 < len(alphas) else math.inf
        if min(gap_lo, gap_hi) <= 1e-12:
            raise NotIsolated(f"critical point {cp.id} is not isolated")
        lo = cp.alpha - min(self.alpha_bracket, gap_lo / 2)
        hi = cp.alpha + min(self.alpha_bracket, gap_hi / 2)
        return lo, hi

    def sigma(self, alpha: float, mode: Optional[str] = None,
              k_fixed: Optional[bool] = None) -> tuple[tuple[int, int, int], ...]:
        """Index triples contributing to the degree product at alpha."""
        mode = self.mode if mode is None else mode
        k_fixed = self.k_fixed if k_fixed is None else k_fixed
        out = []
        for j, curve in sorted(self.curves.items()):
            if self.multiplicities.get(j, 1) % 2 == 0:
                continue
            mu = curve.value(alpha)
            lo, _ = curve.codomain()
            for m in range(self.table.m_max + 1):
                if self.table.entries[m][0] >= mu:
                    break
                if k_fixed and m % 2 == 0:
                    continue
                for n in range(1, self.table.n_max + 1):
                    s = self.table.entries[m][n - 1]
                    if s >= mu:
                        break
                    if mode == "relative" and s <= lo:
                        continue  # permanently negative background block
                    out.append((n, m, j))
        out.sort()
        return tuple(out)

    def reduced_factors(self, triples) -> list[tuple[int, int]]:
        """(m, j) pairs with odd triple count (involution collapses the rest)."""
        counts: dict[tuple[int, int], int] = {}
        for n, m, j in triples:
            counts[(m, j)] = counts.get((m, j), 0) + 1
        return sorted(k for k, v in counts.items() if v % 2)

    def rho(self, triples) -> BurnsideElement:
        key = tuple(self.reduced_factors(triples))
        with self._rho_lock:
            got = self._rho_cache.get(key)
        if got is None:
            got = BurnsideElement.unit(self.ctx)
            for m, j in key:
                got = got * basic_degree(self.ctx, m, j).value
            with self._rho_lock:
                self._rho_cache[key] = got
        return got

    def maximal_pool(self) -> list[OrbitType]:
        out = []
        for j in sorted(self.curves):
            for t in maximal_types(self.ctx, 1, j):
                if all(t.key != u.key for u in out):
                    out.append(t)
        return out


@dataclass(frozen=True)
class LocalInvariant:
    cp_id: tuple[int, int, int]
    mode: str
    k_fixed: bool
    value: BurnsideElement
    alpha_minus: float
    alpha_plus: float


def local_invariant(prob: BifurcationProblem, cp: CriticalPoint,
                    mode: Optional[str] = None, k_fixed: Optional[bool] = None) -> LocalInvariant:
    mode = prob.mode if mode is None else mode
    k_fixed = prob.k_fixed if k_fixed is None else k_fixed
    lo, hi = prob.bracket(cp)
    rho_lo = prob.rho(prob.sigma(lo, mode, k_fixed))
    rho_hi = prob.rho(prob.sigma(hi, mode, k_fixed))
    return LocalInvariant(cp.id, mode, k_fixed, rho_lo - rho_hi, lo, hi)


@dataclass
class FoldingProfile:
    """Frequency-folding statistics of one critical point against one maximal type.

    indicator holds the parity-change indicator of the crossing counts;
    signed_indicator folds in the parity of lower-alpha same-frequency
    crossings (the sign convention of the bundled example's tables); m_minus
    and m_plus are the matching exponent counts entering the coefficient rule.
    """

    cp_id: tuple[int, int, int]
    orbit_type: OrbitType
    n_minus: dict[int, int] = field(default_factory=dict)
    n_plus: dict[int, int] = field(default_factory=dict)
    indicator: dict[int, int] = field(default_factory=dict)
    signed_indicator: dict[int, int] = field(default_factory=dict)
    m_minus: dict[int, int] = field(default_factory=dict)
    m_plus: dict[int, int] = field(default_factory=dict)
    s_max: Optional[int] = None


def folding_profile(prob: BifurcationProblem, cp: CriticalPoint, h: OrbitType,
                    mode: Optional[str] = None, k_fixed: Optional[bool] = None) -> FoldingProfile:
    """Crossing counts n^s, indicators i^s, and exponents m^s for (H) in M_1."""
    ctx = prob.ctx
    mode = prob.mode if mode is None else mode
    k_fixed = prob.k_fixed if k_fixed is None else k_fixed
    lo, hi = prob.bracket(cp)
    sig_lo = prob.sigma(lo, mode, k_fixed)
    sig_hi = prob.sigma(hi, mode, k_fixed)
    levels = sorted({m for _, m, _ in sig_lo} | {m for _, m, _ in sig_hi} | {cp.m})
    prof = FoldingProfile(cp.id, h)
    for s in levels:
        if s == 0:
            continue
        u = fold(ctx, h, s)
        nm_lo = sum(1 for n, m, j in sig_lo
                    if m == s and basic_degree(ctx, m, j).value.coeff(u) != 0)
        nm_hi = sum(1 for n, m, j in sig_hi
                    if m == s and basic_degree(ctx, m, j).value.coeff(u) != 0)
        prof.n_minus[s] = nm_lo
        prof.n_plus[s] = nm_hi
        if nm_lo % 2 == nm_hi % 2:
            ind = 0
        elif nm_lo % 2 == 0:
            ind = 1
        else:
            ind = -1
        prof.indicator[s] = ind
        prior = sum(1 for n, m, j in sig_lo if m == s)
        prof.signed_indicator[s] = ind * (-1) ** prior
        flips_lo = _flip_count(prob, sig_lo, u)
        flips_hi = _flip_count(prob, sig_hi, u)
        prof.m_minus[s] = prior + flips_lo
        prof.m_plus[s] = sum(1 for n, m, j in sig_hi if m == s) + flips_hi
    nonzero = [s for s, v in prof.indicator.items() if v]
    prof.s_max = max(nonzero) if nonzero else None
    return prof


def _flip_count(prob: BifurcationProblem, triples, u: OrbitType) -> int:
    """Number of reduced degree factors whose non-unit terms fold the sign of
    the u-coefficient (the product collapse rule behind the coefficient formula)."""
    ctx = prob.ctx
    flips = 0
    for m, j in prob.reduced_factors(triples):
        phi = 1
        for t, c in basic_degree(ctx, m, j).value.terms.items():
            if t is ctx.unit or not t.is_finite:
                continue
            if u.order is not None and t.order is not None and u.order > t.order:
                continue
            phi += c * n_amalgam(ctx, u, t) * ambient_weyl_order(ctx, t)
        if phi == -1:
            flips += 1
        elif phi != 1:
            raise CrossCheckMismatch(
                f"fold factor for {u.symbol} against deg({m},{j}) is {phi}, not +-1")
    return flips


def theorem_bounded_coeff(prob: BifurcationProblem, cp: CriticalPoint, h: OrbitType,
                          s: int, profile: Optional[FoldingProfile] = None,
                          cross_check: bool = True) -> int:
    """Closed-form coefficient of the s-fold of h in the local invariant.

    Requires the profile's top indicator to be nonzero; the value must agree
    with the coefficient read from the product-computed invariant.
    """
    prof = profile or folding_profile(prob, cp, h)
    if prof.s_max is None:
        raise CrossCheckMismatch(
            f"{h.symbol} has no nonzero indicator at {cp.id}; the coefficient rule needs one")
    if s > prof.s_max:
        fast = 0
    elif s == prof.s_max:
        u = fold(prob.ctx, h, s)
        fast = ((-1) ** prof.m_minus[s]) * prof.signed_indicator[s] * x0_of(prob.ctx, u)
    else:
        raise CrossCheckMismatch(f"coefficient rule stated only for s >= s_max, got {s}")
    if cross_check:
        inv = local_invariant(prob, cp)
        brute = inv.value.coeff(fold(prob.ctx, h, s))
        if brute != fast:
            raise CrossCheckMismatch(
                f"coeff of {h.symbol} fold {s} at {cp.id}: rule gives {fast}, product gives {brute}")
    return fast


@dataclass(frozen=True)
class BranchCertificate:
    cp_id: tuple[int, int, int]
    orbit_type_symbol: str
    folded_symbol: str
    s: int
    coefficient: int
    statement: str


def branch_certificates(prob: BifurcationProblem, cp: CriticalPoint) -> list[BranchCertificate]:
    """One certificate per maximal type with nonzero closed-form coefficient."""
    out = []
    for h in prob.maximal_pool():
        prof = folding_profile(prob, cp, h)
        if prof.s_max is None:
            continue
        coeffv = theorem_bounded_coeff(prob, cp, h, prof.s_max, profile=prof)
        if coeffv == 0:
            continue
        folded = fold(prob.ctx, h, prof.s_max)
        stmt = (f"branch of non-radial solutions bifurcating from (alpha_{cp.id}, 0) "
                f"with symmetries at least {folded.symbol}")
        out.append(BranchCertificate(cp.id, h.symbol, folded.symbol, prof.s_max, coeffv, stmt))
    return out


@dataclass(frozen=True)
class GlobalVerdict:
    orbit_type_symbol: str
    s_bar: Optional[int]
    members: tuple[tuple[int, int, int], ...]
    parity_odd: bool
    conclusion: str  # "UnboundedBranch" | "Inconclusive"
    folded_symbol: Optional[str]
    direction: str


def global_verdict(prob: BifurcationProblem, h: OrbitType) -> GlobalVerdict:
    """Unboundedness verdict for branches with symmetries folded from h."""
    s_values = {}
    for cp in prob.critical:
        if cp.m % 2 == 0:
            continue  # even-frequency crossings are invisible to the reduced problem
        prof = folding_profile(prob, cp, h)
        if prof.s_max is not None:
            s_values[cp.id] = prof.s_max
    if not s_values:
        return GlobalVerdict(h.symbol, None, (), False, "Inconclusive", None,
                             "no crossings carry this symmetry type")
    s_bar = max(s_values.values())
    members = tuple(sorted(cp_id for cp_id, s in s_values.items() if s == s_bar))
    odd = len(members) % 2 == 1
    folded = fold(prob.ctx, h, s_bar)
    if odd:
        direction = ("for some M > 0 the branch meets every slice alpha > M "
                     "or every slice alpha < -M")
        return GlobalVerdict(h.symbol, s_bar, members, True, "UnboundedBranch",
                             folded.symbol, direction)
    return GlobalVerdict(h.symbol, s_bar, members, False, "Inconclusive",
                         folded.symbol, "invariants at the top folding may cancel in pairs")


def rabinowitz_sum(invariants: Sequence[LocalInvariant]) -> BurnsideElement:
    """Sum of local invariants; a nonzero value rules out the compact alternative."""
    if not invariants:
        raise ValueError("need at least one invariant")
    modes = {(inv.mode, inv.k_fixed) for inv in invariants}
    if len(modes) > 1:
        raise ValueError("invariants computed in different modes cannot be summed")
    total = invariants[0].value
    for inv in invariants[1:]:
        total = total + inv.value
    return total
