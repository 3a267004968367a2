"""Dirichlet spectrum of the disc Laplacian and the model's eigenvalue curves.

s_nm denotes the squared n-th positive zero of the Bessel function J_m; the
linearization crosses eigenvalues where mu_j(alpha) = s_nm.  Bessel functions
are evaluated by the ascending series for small argument and by backward
(Miller) recurrence otherwise; zeros are bracketed by a scan with McMahon-size
steps and polished by bisection + Newton.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AlphaIsCritical,
    ConvergenceFailure,
    InsufficientHorizon,
    NonMonotoneCurve,
)

MAX_ORDER = 200
MAX_INDEX = 200


def bessel_j(m: int, x: float) -> float:
    """J_m(x) for m >= 0, x >= 0."""
    if x < 0 or m < 0:
        raise ValueError("need m >= 0 and x >= 0")
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x <= max(12.0, 2.0 * math.sqrt(m)):
        # below this threshold the series terms decrease monotonically, so no
        # cancellation; beyond it the backward recurrence is the stable route
        return _bessel_series(m, x)
    return _bessel_miller(m, x)


def _bessel_series(m: int, x: float) -> float:
    half = 0.5 * x
    term = 1.0
    for k in range(1, m + 1):
        term *= half / k
    total = term
    k = 1
    while True:
        term *= -(half * half) / (k * (m + k))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300):
            return total
        k += 1
        if k > 400:
            raise ConvergenceFailure(f"Bessel series for J_{m}({x}) did not converge")


def _bessel_miller(m: int, x: float) -> float:
    top = m + int(1.2 * x) + 24 + int(math.sqrt(40.0 * max(m, 1)))
    jp = 0.0
    jc = 1e-30
    jm_val = 0.0
    norm = 0.0
    for k in range(top, 0, -1):
        prev = (2.0 * k / x) * jc - jp
        jp = jc
        jc = prev
        if k - 1 == m:
            jm_val = jc
        if (k - 1) % 2 == 0:
            norm += 2.0 * jc if k - 1 > 0 else jc
        if abs(jc) > 1e250:
            jc *= 1e-250
            jp *= 1e-250
            jm_val *= 1e-250
            norm *= 1e-250
    return jm_val / norm


def bessel_zero(m: int, n: int) -> float:
    """n-th positive zero of J_m, to near machine precision."""
    if not (0 <= m <= MAX_ORDER and 1 <= n <= MAX_INDEX):
        raise ValueError(f"supported range is m <= {MAX_ORDER}, n <= {MAX_INDEX}")
    # scan for sign changes starting just past the transition point x ~ m
    lo = max(m, 1e-3)
    f_lo = bessel_j(m, lo)
    step = 1.0
    found = 0
    x = lo
    guard = 0
    while True:
        x2 = x + step
        f2 = bessel_j(m, x2)
        if f_lo == 0.0:
            found += 1
            if found == n:
                return x
        elif f_lo * f2 < 0.0:
            found += 1
            if found == n:
                return _polish_zero(m, x, x2)
        x, f_lo = x2, f2
        guard += 1
        if guard > 100000:
            raise ConvergenceFailure(f"could not bracket zero {n} of J_{m}")


def _polish_zero(m: int, a: float, b: float) -> float:
    fa = bessel_j(m, a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = bessel_j(m, mid)
        if fm == 0.0 or (b - a) < 1e-14 * mid:
            a = b = mid
            break
        if fa * fm < 0.0:
            b = mid
        else:
            a, fa = mid, fm
    x = 0.5 * (a + b)
    # two Newton steps using J_m' = (J_{m-1} - J_{m+1}) / 2
    for _ in range(2):
        f = bessel_j(m, x)
        if m == 0:
            d = -bessel_j(1, x)
        else:
            d = 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
        if d != 0.0:
            x -= f / d
    return x


def bessel_zero_sq(m: int, n: int) -> float:
    """Squared n-th positive zero of J_m (an eigenvalue of the disc Laplacian)."""
    z = bessel_zero(m, n)
    return z * z


class BesselZeroTable:
    """Table of squared Bessel zeros s[m][n] up to a horizon (m_max, n_max)."""

    def __init__(self, m_max: int = 12, n_max: int = 12):
        if m_max > MAX_ORDER or n_max > MAX_INDEX:
            raise ValueError("horizon exceeds supported range")
        self.m_max = m_max
        self.n_max = n_max
        self.entries = [[bessel_zero_sq(m, n) for n in range(1, n_max + 1)]
                        for m in range(m_max + 1)]
        self._check()

    def _check(self):
        for m in range(self.m_max + 1):
            row = self.entries[m]
            assert all(row[i] < row[i + 1] for i in range(len(row) - 1))
            assert row[0] > m * (m + 2), f"Watson bound fails at m={m}"
        flat = sorted(v for row in self.entries for v in row)
        for a, b in zip(flat, flat[1:]):
            assert b - a > 1e-9, "squared zeros are not distinct"

    def value(self, n: int, m: int) -> float:
        """s_nm with the table's 1-based n."""
        if m > self.m_max or n > self.n_max or n < 1 or m < 0:
            raise InsufficientHorizon(
                f"(n={n}, m={m}) outside horizon ({self.n_max}, {self.m_max})",
                required_m_max=max(m, self.m_max), required_n_max=max(n, self.n_max))
        return self.entries[m][n - 1]

    @classmethod
    def sufficient_for(cls, sup_mu: float, m_max: int = 12, n_max: int = 12) -> "BesselZeroTable":
        """A table whose horizon certifiably covers eigenvalues below sup_mu.

        Escalates the requested horizon until the Watson bound m(m+2) > sup_mu
        cuts off the frequencies and the deepest kept row passes sup_mu.
        """
        m_need = m_max
        while m_need * (m_need + 2) <= sup_mu:
            m_need += 1
        table = cls(max(m_max, m_need), n_max)
        while True:
            kept = [table.entries[m][-1] for m in range(table.m_max + 1)
                    if table.entries[m][0] <= sup_mu]
            if not kept or min(kept) > sup_mu:
                return table
            table = cls(table.m_max, table.n_max + 4)


# -- eigenvalue curves ------------------------------------------------------------

def sigmoid(alpha: float) -> float:
    if alpha >= 0:
        return 1.0 / (1.0 + math.exp(-alpha))
    e = math.exp(alpha)
    return e / (1.0 + e)


def logit(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    return math.log(level / (1.0 - level))


@dataclass(frozen=True)
class EigenvalueCurve:
    """Strictly monotone bounded eigenvalue curve mu_j(alpha).

    Either affine in a saturation profile, mu(alpha) = a + w * zeta(alpha) with
    zeta the sigmoid, or a tabulated monotone interpolant on breakpoints.
    """

    j: int
    a: float = 0.0
    w: float = 0.0
    breakpoints: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.breakpoints is None:
            if self.w == 0.0:
                raise NonMonotoneCurve(f"curve {self.j}: zero coupling weight")
        else:
            pts = self.breakpoints
            if len(pts) < 2:
                raise NonMonotoneCurve(f"curve {self.j}: need at least two breakpoints")
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise NonMonotoneCurve(f"curve {self.j}: breakpoint abscissae not increasing")
            inc = all(b > a for a, b in zip(ys, ys[1:]))
            dec = all(b < a for a, b in zip(ys, ys[1:]))
            if not (inc or dec):
                raise NonMonotoneCurve(f"curve {self.j}: breakpoint values not strictly monotone")

    @property
    def is_tabulated(self) -> bool:
        return self.breakpoints is not None

    def value(self, alpha: float) -> float:
        if self.breakpoints is None:
            return self.a + self.w * sigmoid(alpha)
        xs = [p[0] for p in self.breakpoints]
        ys = [p[1] for p in self.breakpoints]
        if alpha <= xs[0]:
            return ys[0]
        if alpha >= xs[-1]:
            return ys[-1]
        i = bisect_left(xs, alpha)
        if xs[i] == alpha:
            return ys[i]
        t = (alpha - xs[i - 1]) / (xs[i] - xs[i - 1])
        return ys[i - 1] + t * (ys[i] - ys[i - 1])

    def codomain(self) -> tuple[float, float]:
        """Open interval of attained values (ordered)."""
        if self.breakpoints is None:
            lo, hi = sorted((self.a, self.a + self.w))
            return lo, hi
        ys = [self.breakpoints[0][1], self.breakpoints[-1][1]]
        return min(ys), max(ys)

    def level(self, y: float) -> float:
        """Position of y in the codomain, in (0,1) when attained; the affine
        case returns the saturation level (y - a) / w exactly."""
        if self.breakpoints is None:
            return (y - self.a) / self.w
        lo, hi = self.codomain()
        return (y - lo) / (hi - lo)

    def inverse(self, y: float) -> float:
        """alpha with mu(alpha) = y; exact logit inversion in the affine case."""
        if self.breakpoints is None:
            return logit(self.level(y))
        lo, hi = self.codomain()
        if not lo < y < hi:
            raise ValueError(f"{y} outside open codomain ({lo}, {hi})")
        a, b = self.breakpoints[0][0], self.breakpoints[-1][0]
        for _ in range(200):
            mid = 0.5 * (a + b)
            if (self.value(mid) - y) * (self.value(a) - y) <= 0:
                b = mid
            else:
                a = mid
        return 0.5 * (a + b)


@dataclass(frozen=True)
class CriticalPoint:
    """Parameter point where the linearization loses invertibility."""

    n: int
    m: int
    j: int
    alpha: float
    zeta_level: float

    @property
    def id(self) -> tuple[int, int, int]:
        return (self.n, self.m, self.j)


def critical_points(curves: Sequence[EigenvalueCurve], table: BesselZeroTable) -> list[CriticalPoint]:
    """All (n, m, j) with s_nm inside the open codomain of mu_j, sorted by alpha."""
    sup_mu = max(hi for c in curves for hi in [c.codomain()[1]])
    if table.m_max * (table.m_max + 2) <= sup_mu:
        raise InsufficientHorizon(
            f"m_max={table.m_max} does not certify finiteness below sup mu = {sup_mu}",
            required_m_max=_required_m(sup_mu), required_n_max=table.n_max)
    out = []
    for c in curves:
        lo, hi = c.codomain()
        for m in range(table.m_max + 1):
            if table.entries[m][0] > hi and m * (m + 2) > sup_mu:
                break
            if table.entries[m][-1] <= hi:
                raise InsufficientHorizon(
                    f"n_max={table.n_max} too small at m={m} for sup mu = {hi}",
                    required_m_max=table.m_max, required_n_max=table.n_max + 4)
            for n in range(1, table.n_max + 1):
                s = table.entries[m][n - 1]
                if s >= hi:
                    break
                if s <= lo:
                    continue
                alpha = c.inverse(s)
                out.append(CriticalPoint(n, m, c.j, alpha, c.level(s)))
    out.sort(key=lambda cp: cp.alpha)
    return out


def _required_m(sup_mu: float) -> int:
    m = 0
    while m * (m + 2) <= sup_mu:
        m += 1
    return m


def eigenvalue_xi(curve: EigenvalueCurve, table: BesselZeroTable, n: int, m: int,
                  alpha: float) -> float:
    """xi = 1 - mu_j(alpha) / s_nm, the eigenvalue of the linearized field on
    the (n, m, j) block."""
    return 1.0 - curve.value(alpha) / table.value(n, m)


@dataclass(frozen=True)
class SpectrumIndexSet:
    kind: str  # "sigma_minus" | "sigma" | "sigma_k"
    alpha: float
    triples: tuple[tuple[int, int, int], ...]


def index_sets(curves: Sequence[EigenvalueCurve], table: BesselZeroTable, alpha: float,
               multiplicities: dict[int, int]) -> tuple[SpectrumIndexSet, SpectrumIndexSet, SpectrumIndexSet]:
    """(Sigma_minus, Sigma, Sigma^K) at a regular alpha."""
    minus = []
    for c in curves:
        mu = c.value(alpha)
        for m in range(table.m_max + 1):
            if table.entries[m][0] >= mu and m * (m + 2) >= mu:
                break
            for n in range(1, table.n_max + 1):
                s = table.entries[m][n - 1]
                if abs(s - mu) <= 1e-12 * max(s, 1.0):
                    raise AlphaIsCritical(f"alpha={alpha} is critical at (n,m,j)=({n},{m},{c.j})")
                if s >= mu:
                    break
                minus.append((n, m, c.j))
    minus.sort()
    sig = [t for t in minus if multiplicities.get(t[2], 1) % 2 == 1]
    sig_k = [t for t in sig if t[1] % 2 == 1]
    return (SpectrumIndexSet("sigma_minus", alpha, tuple(minus)),
            SpectrumIndexSet("sigma", alpha, tuple(sig)),
            SpectrumIndexSet("sigma_k", alpha, tuple(sig_k)))


# -- a-priori bound ------------------------------------------------------------------

def a_priori_radius(a_alpha: float, b_alpha: float, nu: float, q: float,
                    op_norm: float) -> dict:
    """Radius bound for solutions at one parameter value.

    c and d follow the norm estimate of the sublinear field; R0 solves
    t - c t^nu - d = 0 past the stationary point and R = c R0^nu + d.
    """
    if not (a_alpha > 0 and b_alpha > 0 and 0 < nu < 1 and q > max(1.0, 2 * nu)
            and op_norm > 0):
        raise ValueError("need a, b, op_norm > 0, 0 < nu < 1, q > max(1, 2 nu)")
    c = a_alpha * math.pi ** (0.5 - nu / q) * op_norm
    d = b_alpha * math.sqrt(math.pi) * op_norm
    r0 = sublinear_root(c, d, nu)
    return {"c": c, "d": d, "r0": r0, "radius": c * r0 ** nu + d}


def sublinear_root(c: float, d: float, nu: float) -> float:
    """Root of psi(t) = t - c t^nu - d beyond its stationary point (c, d >= 0)."""
    if c == 0.0:
        return d
    def psi(t: float) -> float:
        return t - c * t ** nu - d
    t_star = (c * nu) ** (1.0 / (1.0 - nu))
    hi = max(t_star, 1.0, d)
    while psi(hi) <= 0:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceFailure("sublinear root escaped to infinity")
    lo = t_star
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# -- kernel eigenmodes ---------------------------------------------------------------

@dataclass(frozen=True)
class KernelMode:
    """Eigenmode J_m(sqrt(s) r)(cos(m theta) a + sin(m theta) b) of the kernel
    at a critical point, with a, b in the crossing eigenspace of the coupling."""

    cp: CriticalPoint
    s_nm: float
    a_vec: np.ndarray
    b_vec: np.ndarray

    def sample(self, r, theta) -> np.ndarray:
        """Values on a broadcastable (r, theta) grid; output shape (..., k)."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        rad = np.vectorize(lambda x: bessel_j(self.cp.m, math.sqrt(self.s_nm) * x))(r)
        ang_c = np.cos(self.cp.m * theta)
        ang_s = np.sin(self.cp.m * theta)
        return (rad * ang_c)[..., None] * self.a_vec + (rad * ang_s)[..., None] * self.b_vec

    def grid(self, resolution: int) -> list[list[float]]:
        """Rows (r, theta, u_1..u_k) over a polar grid, row-major in r then theta."""
        rows = []
        rs = np.linspace(0.0, 1.0, resolution)
        ths = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
        for r in rs:
            vals = self.sample(r, ths)
            for t, v in zip(ths, vals):
                rows.append([float(r), float(t)] + [float(x) for x in v])
        return rows


def kernel_mode(cp: CriticalPoint, table: BesselZeroTable, a_vec, b_vec) -> KernelMode:
    a_vec = np.asarray(a_vec, dtype=float)
    b_vec = np.asarray(b_vec, dtype=float)
    s = table.value(cp.n, cp.m)
    mode = KernelMode(cp, s, a_vec, b_vec)
    edge = mode.sample(1.0, 0.3)
    if np.abs(edge).max() > 1e-9 * max(1.0, np.abs(a_vec).max() + np.abs(b_vec).max()):
        raise ConvergenceFailure("kernel mode does not vanish on the boundary")
    return mode
