"""Gap probabilities and level spacings from Fredholm determinants.

The operator K|_s (the kernel restricted to (0, s), or to the matching
edge interval in level coordinates for the finite-N kernel) is discretized
by a Nystrom rule, symmetrized as sqrt(w_i) K(x_i, x_j) sqrt(w_j), and all
determinants are evaluated through its eigenvalues:

    det(I + T K|_s) = prod_i (1 + T lambda_i).

That product is a polynomial in T, so the k-th T-derivative at T = -1 is
accumulated exactly through elementary symmetric functions; no numerical
differentiation in T is ever performed.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .kernels import KernelSpec, hard_kernel, orthonormal_jacobi

__all__ = [
    "DiscretizedOperator",
    "GapResult",
    "discretize_operator",
    "fredholm_det",
    "gap_probability",
    "spacing_density",
    "first_level_mean",
    "finite_n_gap",
    "finite_n_first_level_mean",
]

DEFAULT_ORDER = 60
MEAN_S_MAX = 8.0
MAX_GAP_COUNT = 6


@dataclass(frozen=True)
class DiscretizedOperator:
    """Nystrom discretization: quadrature nodes, weights, and the
    symmetrized kernel matrix sqrt(w) K sqrt(w)."""

    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class GapResult:
    k: int
    s: float
    probability: float


def discretize_operator(spec: KernelSpec, s: float, order: int = DEFAULT_ORDER) -> DiscretizedOperator:
    """Discretize the kernel restricted to a gap interval of normalized
    length s.

    For the limiting hard kernel the interval is (0, s) and the rule is
    Gauss-Legendre.  For the finite-N Jacobi kernel the interval is the
    image of (0, s) under the angle-to-level map x = cos(pi s / N): levels
    in (cos(pi s / N), 1], and the rule is Gauss-Jacobi so the (1-x)^a
    edge factor of the weight is handled exactly.
    """
    if s <= 0:
        raise ValueError("gap length s must be positive")
    if order < 4:
        raise ValueError("quadrature order must be at least 4")
    if spec.kind == "limiting-hard":
        t, w = leggauss(order)
        x = 0.5 * s * (t + 1.0)
        wq = 0.5 * s * w
        X, Y = np.meshgrid(x, x, indexing="ij")
        Kmat = hard_kernel(spec.m, X, Y)
    else:
        if s >= spec.n:
            raise ValueError("normalized gap length must be below n")
        cmin = np.cos(np.pi * s / spec.n)
        t, w = roots_jacobi(order, spec.a, 0.0)
        half = 0.5 * (1.0 - cmin)
        x = cmin + half * (t + 1.0)
        # (1-x)^a = half^a (1-t)^a is folded into the Gauss-Jacobi weight
        wq = w * half ** (spec.a + 1.0) * (1.0 + x) ** spec.b
        p = orthonormal_jacobi(x, spec.n, spec.a, spec.b)
        Kmat = p.T @ p
    sq = np.sqrt(wq)
    mat = sq[:, None] * Kmat * sq[None, :]
    mat = 0.5 * (mat + mat.T)
    return DiscretizedOperator(nodes=x, weights=wq, matrix=mat)


def fredholm_det(op: DiscretizedOperator, T: float) -> float:
    """det(I + T K|_s) as the eigenvalue product prod(1 + T lambda_i)."""
    lam = op.eigenvalues()
    return float(np.prod(1.0 + T * lam))


def _gap_probabilities_from_eigs(lam: np.ndarray, kmax: int) -> np.ndarray:
    """P(exactly k levels), k = 0..kmax, for a determinantal projection
    operator with eigenvalues lam: coefficients of prod((1-l) + z*l)."""
    coef = np.zeros(kmax + 1)
    coef[0] = 1.0
    for l in lam:
        upper = coef[:-1].copy()
        coef *= 1.0 - l
        coef[1:] += l * upper
    return coef


def gap_probability(m: int, k: int, s: float, order: int = DEFAULT_ORDER) -> GapResult:
    """E^(m)(k; s): probability that exactly k levels of the hardness-m
    edge process lie in (0, s)."""
    if k < 0 or k > MAX_GAP_COUNT:
        raise ValueError(f"k must lie in [0, {MAX_GAP_COUNT}]")
    op = discretize_operator(KernelSpec.limiting(m), s, order)
    lam = np.clip(op.eigenvalues(), 0.0, 1.0)
    probs = _gap_probabilities_from_eigs(lam, k)
    return GapResult(k=k, s=s, probability=float(probs[k]))


def _cumulative_gap(m: int, k: int, s: float, order: int) -> float:
    """sum_{j<=k} E^(m)(j; s), sharing one eigen-decomposition."""
    op = discretize_operator(KernelSpec.limiting(m), s, order)
    lam = np.clip(op.eigenvalues(), 0.0, 1.0)
    return float(_gap_probabilities_from_eigs(lam, k).sum())


def spacing_density(m: int, k: int, s: float, order: int = DEFAULT_ORDER) -> float:
    """p^(m)(k; s) = -d/ds sum_{j<=k} E^(m)(j; s), by Richardson-extrapolated
    central differences with step h = max(1e-4, 1e-3 s)."""
    if s <= 0:
        raise ValueError("s must be positive")
    h = max(1e-4, 1e-3 * s)
    h = min(h, 0.5 * s)  # keep s - h positive

    def deriv(step: float) -> float:
        up = _cumulative_gap(m, k, s + step, order)
        dn = _cumulative_gap(m, k, s - step, order)
        return (up - dn) / (2.0 * step)

    d1 = deriv(h)
    d2 = deriv(0.5 * h)
    return -(4.0 * d2 - d1) / 3.0


def _adaptive_trapezoid(f, a: float, b: float, tol: float = 1e-6, min_depth: int = 4,
                        max_depth: int = 24) -> float:
    """Adaptive trapezoid rule: each interval is bisected until its own
    two-panel estimate stabilizes to its share of the tolerance."""
    total = 0.0
    fa, fb = f(a), f(b)
    stack = [(a, b, fa, fb, 0)]
    while stack:
        lo, hi, flo, fhi, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        whole = 0.5 * (hi - lo) * (flo + fhi)
        halves = 0.25 * (hi - lo) * (flo + 2.0 * fmid + fhi)
        if depth >= min_depth and (abs(halves - whole) < 3.0 * tol * (hi - lo) / (b - a)
                                   or depth >= max_depth):
            total += halves
        else:
            stack.append((lo, mid, flo, fmid, depth + 1))
            stack.append((mid, hi, fmid, fhi, depth + 1))
    return float(total)


def first_level_mean(m: int, order: int = DEFAULT_ORDER, s_max: float = MEAN_S_MAX) -> float:
    """Mean location of the first level above the hardness-m edge,
    computed as integral_0^{s_max} E^(m)(0; s) ds.

    (p(0; s) = -E'(0; s) and E -> 0, so integrating E(0; s) by parts gives
    the mean of the first-level density.)  The tail beyond s_max must
    already be dead: E(0; s_max) < 1e-10 is enforced.
    """
    if not (0 <= m <= 4):
        raise ValueError("first_level_mean supports m in [0, 4]")
    tail = gap_probability(m, 0, s_max, order).probability
    if abs(tail) >= 1e-10:
        raise RuntimeError(f"E(0; {s_max}) = {tail:.3e} has not decayed below 1e-10")

    def e0(s: float) -> float:
        if s <= 0:
            return 1.0
        return gap_probability(m, 0, s, order).probability

    return _adaptive_trapezoid(e0, 0.0, s_max)


def finite_n_gap(n: int, a: float, b: float, k: int, s: float, order: int = 48) -> float:
    """Gap probability under the finite-N Christoffel-Darboux kernel on
    L^2([-1,1], (1-x)^a (1+x)^b dx): probability that exactly k of the N
    levels lie in the edge interval (cos(pi s / n), 1].

    The operator has rank n, so det(I + T K) is a degree-n polynomial in T
    and the same elementary-symmetric accumulation applies.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    op = discretize_operator(KernelSpec.finite(n, a, b), s, order)
    lam = np.clip(op.eigenvalues(), 0.0, 1.0)
    return float(_gap_probabilities_from_eigs(lam, k)[k])


def finite_n_first_level_mean(n: int, a: float, b: float, order: int = 48,
                              s_max: float = MEAN_S_MAX) -> float:
    """Finite-N analogue of first_level_mean: integral of the finite-N
    E(0; s) over normalized gap lengths."""
    s_max = min(s_max, n - 1e-9)

    def e0(s: float) -> float:
        if s <= 0:
            return 1.0
        return finite_n_gap(n, a, b, 0, s, order)

    return _adaptive_trapezoid(e0, 0.0, s_max)
