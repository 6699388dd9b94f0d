"""Hard-edge kernels for orthogonal ensembles.

Everything here is built out of Bessel functions of half-integer order,
which reduce to trigonometric closed forms.  The central objects:

* ``bessel_kernel(a, xi, eta)``:  the hard-edge kernel B^(a),
* ``hard_kernel(m, x, y)``:       K^(m) = B^(m-1/2), parametrized by the
                                  hardness m (number of levels conditioned
                                  at the spectrum edge +1),
* ``explicit_kernel(m, x, y)``:   elementary-function forms for m = 0..3,
* ``cd_jacobi_kernel``:           the finite-N Christoffel-Darboux
                                  projection kernel whose edge limit is
                                  the hard kernel.

All kernel evaluators accept scalars or numpy arrays and broadcast.

Only the +1 edge of the spectrum is treated.  Statistics at the -1 edge
follow from the level reflection x -> -x, which swaps the Jacobi
parameters a and b.
"""

from dataclasses import dataclass
from math import lgamma

import numpy as np

__all__ = [
    "KernelSpec",
    "DensityValue",
    "jacobi_weight",
    "bessel_j_half",
    "bessel_kernel",
    "hard_kernel",
    "explicit_kernel",
    "one_level_density",
    "one_level_density_fourier",
    "jacobi_recurrence",
    "orthonormal_jacobi",
    "cd_jacobi_kernel",
]

#: off-diagonal -> diagonal switchover for the Bessel kernel; below this
#: separation the cancellation in the (xi^2 - eta^2) denominator would
#: exceed ~1e-9, so the confluent (diagonal) form is used instead.
DIAGONAL_EPS = 1e-6

# how far above max(order, argument) the downward (Miller) recurrence
# starts; 25 extra orders keeps the seeding error below ~1e-15.
_MILLER_OFFSET = 25


@dataclass(frozen=True)
class KernelSpec:
    """Selects a kernel: the limiting hard-edge kernel of hardness ``m``
    (``kind="limiting-hard"``) or the finite-N Christoffel-Darboux Jacobi
    kernel (``kind="finite-jacobi"`` with ``n``, ``a``, ``b``)."""

    kind: str
    m: int = 0
    n: int = 0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind == "limiting-hard":
            if self.m < 0:
                raise ValueError("hardness m must be >= 0")
        elif self.kind == "finite-jacobi":
            if self.n < 1:
                raise ValueError("finite-jacobi needs n >= 1")
            if self.a <= -1 or self.b <= -1:
                raise ValueError("jacobi parameters need a, b > -1")
        else:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @staticmethod
    def limiting(m: int) -> "KernelSpec":
        return KernelSpec(kind="limiting-hard", m=m)

    @staticmethod
    def finite(n: int, a: float, b: float) -> "KernelSpec":
        return KernelSpec(kind="finite-jacobi", n=n, a=a, b=b)


@dataclass(frozen=True)
class DensityValue:
    """One-level density split into its smooth part and the integer point
    mass sitting at the origin (one unit per conditioned level)."""

    smooth: float
    point_mass_at_zero: int


def jacobi_weight(x, a: float, b: float):
    """(1-x)^a (1+x)^b on the open interval (-1, 1)."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise ValueError("jacobi_weight requires -1 < x < 1")
    out = (1.0 - x) ** a * (1.0 + x) ** b
    return out if out.ndim else float(out)


def _check_half_order(nu: float) -> int:
    """Map a half-integer order nu to the integer k with nu = k - 1/2."""
    k = nu + 0.5
    if abs(k - round(k)) > 1e-12:
        raise ValueError(f"order {nu} is not half-integer")
    return int(round(k))


def _j_half_pair(x):
    """J_{-1/2} and J_{+1/2} from their trigonometric closed forms."""
    pref = np.sqrt(2.0 / (np.pi * x))
    return pref * np.cos(x), pref * np.sin(x)


def _j_half_all(kmax: int, x):
    """J_{k-1/2}(x) for k = 0..kmax, stacked on the leading axis.

    Upward recurrence J_{nu+1} = (2 nu / x) J_nu - J_{nu-1} where it is
    stable (x >= nu), downward (Miller) recurrence with normalization
    against the closed forms where it is not.
    """
    x = np.asarray(x, dtype=float)
    jm, jp = _j_half_pair(x)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = jm
    if kmax >= 1:
        out[1] = jp
    prev, cur = jm, jp
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, kmax):
            nu = k - 0.5
            prev, cur = cur, (2.0 * nu / x) * cur - prev
            out[k + 1] = cur

    # redo the x < nu region by downward recurrence
    top_nu = kmax - 0.5
    unstable = x < top_nu
    if kmax >= 2 and np.any(unstable):
        xs = x[unstable] if x.ndim else x.reshape(1)
        start = kmax + _MILLER_OFFSET
        jnext = np.zeros_like(xs)
        jcur = np.full_like(xs, 1e-30)
        col = np.zeros((kmax + 1,) + xs.shape)
        for k in range(start, -1, -1):
            nu = k + 0.5  # order of jcur is k - 1/2, recurrence at nu
            jnext, jcur = jcur, (2.0 * nu / xs) * jcur - jnext
            big = np.abs(jcur) > 1e280
            if np.any(big):
                jcur[big] *= 1e-280
                jnext[big] *= 1e-280
                col[:, big] *= 1e-280
            if k <= kmax:
                col[k] = jcur
        jm_s, jp_s = _j_half_pair(xs)
        # normalize against whichever anchor is larger in magnitude
        use_p = np.abs(jp_s) >= np.abs(jm_s)
        scale = np.where(use_p, jp_s / np.where(col[1] == 0, 1.0, col[1]),
                         jm_s / np.where(col[0] == 0, 1.0, col[0]))
        col *= scale
        if x.ndim:
            out[:, unstable] = col
        else:
            out = col[:, 0]
    return out


def bessel_j_half(nu: float, x):
    """Bessel J of half-integer order nu in {-1/2, 1/2, ..., 13/2}, x > 0."""
    k = _check_half_order(nu)
    if k < 0 or k > 7:
        raise ValueError("order must lie in {-1/2, 1/2, ..., 13/2}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bessel_j_half requires x > 0")
    vals = _j_half_all(k, x)[k]
    return vals if np.ndim(vals) else float(vals)


def _bessel_diag(a: float, xi):
    """B^(a)(xi, xi) = (pi/2)(pi xi)[J_a^2 - J_{a-1} J_{a+1}] at pi*xi."""
    k = _check_half_order(a)
    z = np.pi * np.asarray(xi, dtype=float)
    js = _j_half_all(k + 1, z)
    ja, jnext = js[k], js[k + 1]
    if k >= 1:
        jprev = js[k - 1]
    else:  # a = -1/2 needs J_{-3/2}: one stable downward step
        jprev = (2.0 * a / z) * ja - jnext
    return (np.pi / 2.0) * z * (ja * ja - jprev * jnext)


def bessel_kernel(a: float, xi, eta):
    """Hard-edge Bessel kernel B^(a)(xi, eta) for xi, eta > 0.

    Near-diagonal arguments (|xi - eta| < 1e-6) are routed through the
    confluent diagonal form evaluated at the midpoint.
    """
    _check_half_order(a)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(xi <= 0) or np.any(eta <= 0):
        raise ValueError("bessel_kernel requires xi, eta > 0")
    xi, eta = np.broadcast_arrays(xi, eta)
    near = np.abs(xi - eta) < DIAGONAL_EPS
    out = np.empty(xi.shape)

    if np.any(~near):
        u, v = xi[~near], eta[~near]
        k = _check_half_order(a)
        ju = _j_half_all(k + 1, np.pi * u)
        jv = _j_half_all(k + 1, np.pi * v)
        num = np.pi * u * ju[k + 1] * jv[k] - ju[k] * np.pi * v * jv[k + 1]
        out[~near] = np.sqrt(u * v) / (u ** 2 - v ** 2) * num
    if np.any(near):
        mid = 0.5 * (xi[near] + eta[near])
        out[near] = _bessel_diag(a, mid)
    return out if out.ndim else float(out)


def _hard_diag(m: int, x):
    """K^(m)(x, x) through the recursion form of the rescaled kernel:
    k^(m)(z,z) = (z/2)[J_{m+1/2}^2 + J_{m-1/2}^2] - (m-1/2) J_{m+1/2} J_{m-1/2}
    with K^(m)(x,x) = pi * k^(m)(pi x, pi x)."""
    z = np.pi * np.asarray(x, dtype=float)
    js = _j_half_all(m + 1, z)
    jlo, jhi = js[m], js[m + 1]
    k_diag = (z / 2.0) * (jhi * jhi + jlo * jlo) - (m - 0.5) * jhi * jlo
    return np.pi * k_diag


def hard_kernel(m: int, x, y):
    """K^(m)(x, y): the limiting kernel at an edge of hardness m in [0, 6].

    Off-diagonal values come from the Bessel form; diagonal values from the
    independent recursion form, so the two can be checked against each other.
    """
    if not (0 <= m <= 6):
        raise ValueError("hardness m must lie in [0, 6]")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("hard_kernel requires x, y > 0")
    x, y = np.broadcast_arrays(x, y)
    near = np.abs(x - y) < DIAGONAL_EPS
    out = np.empty(x.shape)
    if np.any(~near):
        out[~near] = bessel_kernel(m - 0.5, x[~near], y[~near])
    if np.any(near):
        out[near] = _hard_diag(m, 0.5 * (x[near] + y[near]))
    return out if out.ndim else float(out)


def _sphere_h(z):
    """(sin z - z cos z) / z^2, series-guarded for small z."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 0.1
    out = np.empty(z.shape)
    zb = np.where(small, 1.0, z)
    out = (np.sin(zb) - zb * np.cos(zb)) / zb ** 2
    if np.any(small):
        zs = z[small]
        z2 = zs * zs
        out[small] = zs * (1.0 / 3 - z2 * (1.0 / 30 - z2 * (1.0 / 840 - z2 / 45360)))
    return out


def explicit_kernel(m: int, x, y):
    """Elementary-function forms of K_m for m in {0, 1, 2, 3}.

    m=0 and m=1 are the even/odd sine kernels; m=2 subtracts a rank-one
    sinc x sinc y term; m=3 subtracts a rank-one term built from the
    order-3/2 spherical factor (sin z - z cos z)/z^2.
    """
    if m not in (0, 1, 2, 3):
        raise ValueError("explicit forms are available for m in {0,1,2,3}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("explicit_kernel requires x, y > 0")
    s_minus = np.sinc(x - y)
    s_plus = np.sinc(x + y)
    if m == 0:
        out = s_minus + s_plus
    elif m == 1:
        out = s_minus - s_plus
    elif m == 2:
        out = s_minus + s_plus - 2.0 * np.sinc(x) * np.sinc(y)
    else:
        out = s_minus - s_plus - 6.0 * _sphere_h(np.pi * x) * _sphere_h(np.pi * y)
    return out if out.ndim else float(out)


def one_level_density(m: int, x) -> DensityValue:
    """Level density at the hardness-m edge: smooth part K^(m)(x, x) plus
    an m-fold point mass at the origin (reported separately)."""
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("one_level_density requires x > 0; the point mass "
                         "at 0 is reported in the result")
    smooth = _hard_diag(m, xs)
    smooth = smooth if smooth.ndim else float(smooth)
    return DensityValue(smooth=smooth, point_mass_at_zero=m)


def one_level_density_fourier(m: int, u):
    """Fourier transform of the hardness-m one-level density.

    Returns ``(delta_mass, smooth)``: the coefficient of the delta at u=0
    and the smooth value.  With I(u) the indicator of [-1, 1]:

        m=0:  1,  (1/2) I(u)
        m=1:  1,  1 - (1/2) I(u)
        m=2:  1,  2 + (2|u| - 3/2) I(u)

    Closed forms beyond m=2 are not wired in; use a numerical transform of
    ``one_level_density`` instead (clearly labeled as numerical in the CLI).
    """
    if m not in (0, 1, 2):
        raise ValueError("closed-form transform only for m in {0, 1, 2}")
    u = np.asarray(u, dtype=float)
    ind = (np.abs(u) <= 1.0).astype(float)
    if m == 0:
        smooth = 0.5 * ind
    elif m == 1:
        smooth = 1.0 - 0.5 * ind
    else:
        smooth = 2.0 + (2.0 * np.abs(u) - 1.5) * ind
    smooth = smooth if smooth.ndim else float(smooth)
    return 1.0, smooth


def jacobi_recurrence(nmax: int, a: float, b: float):
    """Recurrence coefficients (alpha_n, beta_n), n = 0..nmax, for monic
    polynomials orthogonal under the weight (1-x)^a (1+x)^b on [-1, 1].

    beta_0 is the weight's total mass, computed through log-gamma so large
    parameters cannot overflow.  The n = 1 coefficient is special-cased to
    stay finite at a + b = -1 (the 0/0 corner of the generic formula).
    """
    if a <= -1 or b <= -1:
        raise ValueError("need a > -1 and b > -1")
    alpha = np.zeros(nmax + 1)
    beta = np.zeros(nmax + 1)
    alpha[0] = (b - a) / (a + b + 2.0)
    beta[0] = np.exp((a + b + 1.0) * np.log(2.0)
                     + lgamma(a + 1.0) + lgamma(b + 1.0) - lgamma(a + b + 2.0))
    for n in range(1, nmax + 1):
        nab = 2.0 * n + a + b
        alpha[n] = (b * b - a * a) / (nab * (nab + 2.0))
        if n == 1:
            beta[n] = 4.0 * (a + 1.0) * (b + 1.0) / ((a + b + 2.0) ** 2 * (a + b + 3.0))
        else:
            beta[n] = (4.0 * n * (n + a) * (n + b) * (n + a + b)
                       / (nab ** 2 * (nab + 1.0) * (nab - 1.0)))
    return alpha, beta


def orthonormal_jacobi(x, n: int, a: float, b: float):
    """Values of the first n orthonormal Jacobi polynomials at x,
    shape (n, len(x)), via the three-term recurrence."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    alpha, beta = jacobi_recurrence(n, a, b)
    p = np.zeros((n, x.size))
    p[0] = 1.0 / np.sqrt(beta[0])
    if n > 1:
        p[1] = (x - alpha[0]) * p[0] / np.sqrt(beta[1])
    for k in range(2, n):
        p[k] = ((x - alpha[k - 1]) * p[k - 1]
                - np.sqrt(beta[k - 1]) * p[k - 2]) / np.sqrt(beta[k])
    return p


def cd_jacobi_kernel(n: int, a: float, b: float, x, y):
    """Christoffel-Darboux projection kernel onto polynomials of degree < n,
    orthonormal under the Jacobi weight (1-x)^a (1+x)^b:

        K_n(x, y) = sum_{k<n} p_k(x) p_k(y).

    The summed form is the numerically stable branch of the
    Christoffel-Darboux identity (its ratio form degenerates on the
    diagonal; the sum is its confluent limit everywhere).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(x) >= 1) or np.any(np.abs(y) >= 1):
        raise ValueError("cd_jacobi_kernel requires x, y in (-1, 1)")
    scalar = x.ndim == 0 and y.ndim == 0
    px = orthonormal_jacobi(np.atleast_1d(x).ravel(), n, a, b)
    py = orthonormal_jacobi(np.atleast_1d(y).ravel(), n, a, b)
    K = px.T @ py
    return float(K[0, 0]) if scalar else K
