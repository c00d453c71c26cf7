"""Analytic checks on Z: the Hoelder modulus bound and the radius probe."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import zeta

from ..errors import DimensionError, PreconditionError, RegimeError
from ..lattice import LengthOracle, min_nonzero_length, order_lipnorm, zero
from .algebra import AlgebraElement, Cocycle, fourier_eval, random_element
from .seminorms import L_ell, a_norm

N_MIN, N_MAX = 2**12, 2**22


def _fold(h: float) -> float:
    h = abs(h) % 1.0
    return min(h, 1.0 - h)


@lru_cache(maxsize=4096)
def modulus_bounds(beta: float, h: float) -> tuple[float, float]:
    """Lower and upper bounds for m = ||l_beta^{-1} g_{s,t}||_2 with h = |t - s|.

    m^2 = 8 sum_{n>=1} n^{-2 beta} sin^2(pi n h).  The first N terms are
    summed directly; the rest equals 4 zeta(2 beta, N+1) minus an
    oscillating sum bounded both by that zeta value and, by Abel summation,
    by (N+1)^{-2 beta} / sin(pi h).
    """
    if not 0.5 < beta <= 1:
        raise RegimeError("needs 1/2 < beta <= 1")
    h = _fold(h)
    if h == 0.0:
        return 0.0, 0.0
    N = int(min(N_MAX, max(N_MIN, math.ceil(100.0 / h))))
    n = np.arange(1, N + 1, dtype=float)
    frac = np.mod(n * h, 1.0)
    partial = 8.0 * float(np.sum(n ** (-2 * beta) * np.sin(np.pi * frac) ** 2))
    z = float(zeta(2 * beta, N + 1))
    abel = (N + 1) ** (-2 * beta) / math.sin(math.pi * h)
    osc = min(z, abel)
    lo = partial + max(0.0, 4 * z - 4 * osc)
    hi = partial + 4 * z + 4 * osc
    return math.sqrt(lo), math.sqrt(hi)


def modulus_upper(beta: float, h: float) -> float:
    return modulus_bounds(beta, h)[1]


def delta_for(beta: float, eps: float, rel: float = 1e-3) -> float:
    """Largest h found by bisection (in log scale) with modulus_upper(beta, h) <= eps."""
    if modulus_upper(beta, 0.5) <= eps:
        return 0.5
    lo, hi = 1e-300, 0.5
    probe = 1e-3
    while modulus_upper(beta, probe) > eps:
        hi = probe
        probe *= 1e-2
        if probe < 1e-300:
            raise PreconditionError("no positive h meets the bound")
    lo = probe
    while hi / lo > 1 + rel:
        mid = math.sqrt(lo * hi)
        if modulus_upper(beta, mid) <= eps:
            lo = mid
        else:
            hi = mid
    return lo


def weight_ratio(beta: float, omega: LengthOracle, n_max: int = 10_000) -> float:
    """max over 1 <= |n| <= n_max of |n|^beta / omega(n)."""
    return max(max(n ** beta / float(omega((n,))), n ** beta / float(omega((-n,))))
               for n in range(1, n_max + 1))


@dataclass
class HolderReport:
    s: float
    t: float
    lhs: float
    modulus: float
    ratio: float
    L: float
    rhs: float
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def holder_check(f: AlgebraElement, beta: float, omega: LengthOracle, s: float, t: float,
                 L: float | None = None, ratio: float | None = None) -> HolderReport:
    """Compare |f^(t) - f^(s)| with m(s,t) ||l_beta/omega||_inf L(f).

    f^(t) = sum f(n) e^{2 pi i n t}.  m is replaced by its rigorous upper
    bound and L by the truncated estimate, which is at least ||omega f||_2;
    that is all the inequality needs.
    """
    if f.dim != 1 or omega.dim != 1:
        raise DimensionError("the Hoelder check is for Z")
    if not 0.5 < beta <= 1:
        raise RegimeError("needs 1/2 < beta <= 1")
    lhs = abs(fourier_eval(f, t) - fourier_eval(f, s))
    m = modulus_upper(beta, t - s)
    if ratio is None:
        ratio = weight_ratio(beta, omega)
    if L is None:
        L = L_ell(f, omega).value
    rhs = m * ratio * L
    return HolderReport(s, t, lhs, m, ratio, L, rhs, lhs <= rhs * (1 + 1e-12) + 1e-15)


@dataclass
class ProbeReport:
    value: float
    certified: float
    best: dict
    samples: int
    consistent: bool
    min_length: float
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": self.value, "certified_lower": self.certified,
                "best_element": {str(list(k)): [v.real, v.imag] for k, v in self.best.items()},
                "samples": self.samples, "length_bound_consistent": self.consistent,
                "min_length": self.min_length, "trace": self.trace}


def radius_probe(oracle: LengthOracle, cocycle: Cocycle, support_radius: int, n_samples: int,
                 seed: int = 0, R_max: int | None = None, rounds: int = 1) -> ProbeReport:
    """Largest ||f|| / L(f) found over random f with f(0) = 0, then coordinate ascent.

    ``value`` uses the truncated estimates of both sides.  ``certified``
    divides the truncated norm (a lower bound) by ||l f||_1 (an upper bound
    for L), so it is a genuine lower bound for the best constant.
    """
    if R_max is None:
        R_max = 64 if cocycle.dim == 1 else 16
    rng = np.random.default_rng(seed)

    def ratios(f: AlgebraElement) -> tuple[float, float]:
        A = a_norm(f, R_max=R_max)
        L = L_ell(f, oracle, R_max=R_max)
        if L.value == 0:
            return 0.0, 0.0
        return A.value / L.value, A.value / L.upper_companion

    best_val, best_cert, best_f = 0.0, 0.0, None
    trace = []
    origin = zero(cocycle.dim)
    for x in oracle.ball(support_radius * max(1, cocycle.dim)):
        if x == origin or max(abs(c) for c in x) > support_radius:
            continue
        r = 1.0 / float(oracle(x))
        if r > best_val:
            best_val, best_cert, best_f = r, r, AlgebraElement.delta(x, cocycle)
    for i in range(n_samples):
        f = random_element(rng, cocycle, support_radius, zero_at_origin=True)
        val, cert = ratios(f)
        best_cert = max(best_cert, cert)
        if val > best_val:
            best_val, best_f = val, f
        trace.append(val)
    factors = (1.25, 0.8, 1j, -1j)
    for _ in range(rounds):
        for p in list(best_f.support):
            for a in factors:
                g = best_f.map_coeffs(lambda x, v, p=p, a=a: v * a if x == p else v)
                val, cert = ratios(g)
                best_cert = max(best_cert, cert)
                if val > best_val:
                    best_val, best_f = val, g
    s = float(min_nonzero_length(oracle, support_radius))
    consistent = s >= 1.0 / (2.0 * best_val) - 1e-12
    return ProbeReport(best_val, best_cert, dict(best_f.items), n_samples, consistent, s, trace)


def order_norm_bound(f: AlgebraElement, oracle: LengthOracle, R_max: int | None = None) -> tuple[float, float]:
    """(||f||, L(f)/s) for f(0) = 0, s the least nonzero length; the first never exceeds the second."""
    if abs(f(zero(f.dim))) != 0:
        raise PreconditionError("needs f(0) = 0")
    s = float(min_nonzero_length(oracle, max(1, f.support_radius())))
    return a_norm(f, R_max=R_max).value, order_lipnorm(f.coeffs, oracle) / s
