"""Bergman kernel of the flat model C^n/Z_q.

Two independent routes: the q-term closed-form character sum, and a truncated
sum over invariant monomials with a rigorous Gaussian tail bound.  The second
exists purely to check the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammainc, gammaln, logsumexp

from .models import CyclicWeights

__all__ = [
    "rho_closed",
    "rho_closed_detailed",
    "rho_oracle",
    "admissible_indices",
    "degree_cap_for",
    "min_on_ray",
    "OracleResult",
]

MAX_ORACLE_INDICES = 10_000


def _check_point(w: CyclicWeights, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape != (w.n,):
        raise ValueError(f"point must have length n={w.n}, got shape {z.shape}")
    return z


def rho_closed_detailed(w: CyclicWeights, z) -> tuple[float, float]:
    """Closed-form kernel value and the accumulated imaginary residue.

    rho(z) = e^{-pi|z|^2} sum_{j=0}^{q-1} exp(pi sum_l |z_l|^2 e^{2 pi i j p_l / q_l}).

    Terms j and q-j are complex conjugates; they are added pairwise so the
    imaginary parts cancel before accumulation.  The residue reported is the
    magnitude of the imaginary part left by naive accumulation, relative terms
    included, and should sit at machine noise.
    """
    z = _check_point(w, z)
    s = np.abs(z) ** 2
    total_s = float(np.sum(s))
    q = w.q
    # exponent_j = pi * sum_l s_l e^{i theta_l(j)} - pi |z|^2
    terms = np.empty(q, dtype=complex)
    for j in range(q):
        terms[j] = np.exp(np.pi * np.sum(s * np.exp(1j * w.phases(j))) - np.pi * total_s)
    value = terms[0].real
    resid = 0.0
    for j in range(1, q // 2 + 1):
        jc = q - j
        if jc == j or jc == q:
            value += terms[j].real
            resid += abs(terms[j].imag)
        else:
            value += 2.0 * terms[j].real
            resid += abs(terms[j].imag + terms[jc].imag)
    return float(value), float(resid)


def rho_closed(w: CyclicWeights, z) -> float:
    """Closed-form Bergman kernel of C^n/Z_q at the orbit of z (m = 1)."""
    value, _ = rho_closed_detailed(w, z)
    return value


def admissible_indices(w: CyclicWeights, degree_cap: int) -> list[tuple[int, ...]]:
    """Multi-indices j with |j| <= cap and sum_l j_l p_l / q_l integral,
    in graded lexicographic order."""
    if degree_cap < 0:
        raise ValueError("degree_cap must be >= 0")
    q = w.q
    weights = [p * (q // ql) for p, ql in w.pairs]
    n = w.n
    out = []
    for deg in range(degree_cap + 1):
        stack = [((), deg, 0)]
        while stack:
            prefix, rem, acc = stack.pop()
            if len(prefix) == n - 1:
                j = prefix + (rem,)
                if (acc + rem * weights[n - 1]) % q == 0:
                    out.append(j)
                continue
            l = len(prefix)
            # push in reverse so lexicographic order pops first
            for jl in range(rem, -1, -1):
                stack.append((prefix + (jl,), rem - jl, acc + jl * weights[l]))
    return out


def degree_cap_for(w: CyclicWeights, z, tol: float) -> int:
    """Smallest cap whose Gaussian tail bound is below tol.

    Raises if the admissible index count would exceed MAX_ORACLE_INDICES.
    """
    z = _check_point(w, z)
    lam = math.pi * float(np.sum(np.abs(z) ** 2))
    cap = 1
    while w.q * gammainc(cap + 1, lam) > tol:
        cap += 1
        if cap > 2000:
            raise ValueError("tail bound does not reach tolerance at a sane cap")
    count = len(admissible_indices(w, cap))
    if count > MAX_ORACLE_INDICES:
        raise ValueError(f"oracle would need {count} > {MAX_ORACLE_INDICES} indices")
    return cap


@dataclass(frozen=True)
class OracleResult:
    value: float
    tail_bound: float
    degree_cap: int
    n_indices: int


def rho_oracle(w: CyclicWeights, z, degree_cap: int) -> OracleResult:
    """Truncated invariant-monomial sum for the kernel, with tail bound.

    value = q e^{-pi|z|^2} sum_j pi^{|j|} |z^j|^2 / prod j_l!  over admissible
    multi-indices with |j| <= degree_cap.  Terms are evaluated in log space.
    """
    z = _check_point(w, z)
    s = np.abs(z) ** 2
    lam = math.pi * float(np.sum(s))
    idx = admissible_indices(w, degree_cap)
    if len(idx) > MAX_ORACLE_INDICES:
        raise ValueError(f"{len(idx)} indices exceed the {MAX_ORACLE_INDICES} cap")
    with np.errstate(divide="ignore"):
        log_s = np.where(s > 0, np.log(np.maximum(s, 1e-300)), -np.inf)
    logs = []
    for j in idx:
        j = np.array(j, dtype=float)
        with np.errstate(invalid="ignore"):
            lt = np.sum(np.where(j > 0, j * (math.log(math.pi) + log_s), 0.0))
        if not np.isfinite(lt):
            continue  # z_l = 0 with j_l > 0: term vanishes
        logs.append(lt - float(np.sum(gammaln(j + 1.0))))
    if logs:
        value = w.q * math.exp(logsumexp(np.array(logs)) - lam)
    else:
        value = 0.0
    tail = w.q * float(gammainc(degree_cap + 1, lam)) if lam > 0 else 0.0
    return OracleResult(value=float(value), tail_bound=tail,
                        degree_cap=degree_cap, n_indices=len(idx))


def min_on_ray(w: CyclicWeights, direction, t_max: float, nodes: int = 512) -> tuple[float, float]:
    """Scan t -> rho(t*sqrt(r)) on (0, t_max] and refine the best node.

    Returns (t*, rho*).  The refinement is a bounded golden-section search
    with |dt| tolerance 1e-8.
    """
    r = np.asarray(direction, dtype=float)
    if r.shape != (w.n,) or np.any(r < 0) or not np.any(r > 0):
        raise ValueError("direction must be nonnegative, not all zero, length n")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    sq = np.sqrt(r)

    def f(t):
        return rho_closed(w, t * sq)

    ts = np.linspace(t_max / nodes, t_max, nodes)
    vals = np.array([f(t) for t in ts])
    i = int(np.argmin(vals))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, nodes - 1)]
    if lo == hi:
        return float(ts[i]), float(vals[i])
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-8})
    t_best, v_best = float(res.x), float(res.fun)
    if vals[i] < v_best:
        t_best, v_best = float(ts[i]), float(vals[i])
    return t_best, v_best
