"""The quadratic family P(z) = lambda z + z^2 with lambda = e^{2 pi i theta}.

Orbits, the critical point, the q periodic points that split off the
parabolic point for theta_n near p/q, and the splitting constant c with
z_i^q ~ (theta_n - p/q) c.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cf import RotationNumber
from .precision import _CTX as mp
from .precision import mpf

ESCAPE_RADIUS = 4.0
_SATURATE = 1e100


class SeparationError(RuntimeError):
    """Periodic-point candidates coincide or axis labeling is ambiguous."""


class ExtrapolationError(RuntimeError):
    """Splitting-constant extrapolation failed to settle."""


@dataclass(frozen=True)
class QuadraticMap:
    """P_theta(z) = e^{2 pi i theta} z + z^2, theta kept at working precision."""

    theta: object  # mpf or Fraction
    lam: complex = None

    @staticmethod
    def from_theta(theta) -> "QuadraticMap":
        if isinstance(theta, RotationNumber):
            theta = theta.value
        if isinstance(theta, Fraction):
            lam = complex(mp.expjpi(2 * mpf(theta.numerator) / theta.denominator))
        else:
            theta = mpf(theta)
            lam = complex(mp.expjpi(2 * theta))
        return QuadraticMap(theta=theta, lam=lam)

    def __call__(self, z):
        return self.lam * z + z * z

    def apply_k(self, z, k: int):
        """k-fold application; works on scalars and arrays."""
        for _ in range(k):
            z = self.lam * z + z * z
        return z

    def derivative(self, z):
        return self.lam + 2.0 * z

    def orbit_derivative(self, z, k: int):
        """(P^k)'(z) along the orbit, with the final point."""
        d = 1.0 + 0.0j if np.isscalar(z) else np.ones_like(z)
        for _ in range(k):
            d = d * (self.lam + 2.0 * z)
            z = self.lam * z + z * z
        return d, z

    def critical_point(self) -> complex:
        return -self.lam / 2.0


@dataclass(frozen=True)
class OrbitResult:
    points: np.ndarray
    escaped: bool
    escape_index: int = None


def orbit(pmap: QuadraticMap, z0, max_iter: int, radius: float = ESCAPE_RADIUS,
          keep: bool = True) -> OrbitResult:
    """Iterate until |z| > radius or max_iter; saturates instead of overflowing."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if radius < 4.0:
        raise ValueError("escape radius must be >= 4")
    z = complex(z0)
    pts = [z] if keep else None
    for k in range(max_iter):
        if abs(z) > radius:
            return OrbitResult(np.array(pts) if keep else None, True, k)
        z = pmap(z)
        if abs(z) > _SATURATE:
            z = _SATURATE * (1 + 0j)
        if keep:
            pts.append(z)
    escaped = abs(z) > radius
    return OrbitResult(
        np.array(pts) if keep else None, escaped, max_iter if escaped else None
    )


def _compose_q_coeffs(lam_mp, q: int):
    """Coefficients (ascending, mpc) of P^q by repeated composition."""
    coeffs = [mp.mpc(0), lam_mp, mp.mpc(1)]  # P itself
    for _ in range(q - 1):
        sq = _poly_mult(coeffs, coeffs)
        coeffs = [lam_mp * c for c in coeffs] + [mp.mpc(0)] * (len(sq) - len(coeffs))
        coeffs = [a + b for a, b in zip(coeffs, sq)]
    return coeffs


def _poly_mult(a, b):
    out = [mp.mpc(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


@dataclass(frozen=True)
class SplittingData:
    """The q fixed points of P^q near 0 for theta_n, labeled by splitting axis."""

    n: int
    q: int
    points: np.ndarray        # z_1..z_q ordered by axis label
    c_estimate: complex
    axis_labels: np.ndarray   # label[i] = axis index of points[i] (identity order)
    delta: float              # theta_n - p/q as a float

    @property
    def z1(self) -> complex:
        return complex(self.points[0])


def periodic_points_near_zero(rn: RotationNumber, residual_tol: float = 1e-12,
                              newton_steps: int = 60) -> SplittingData:
    """The q roots of P^q(z) = z closest to 0 (excluding 0), polished and labeled.

    Roots come from the companion matrix of the fully composed degree-2^q
    polynomial (coefficients assembled at working precision), then each is
    polished by Newton on z -> P^q(z) - z.
    """
    q = rn.q
    pmap = QuadraticMap.from_theta(rn)
    lam_mp = mp.expjpi(2 * rn.value)
    coeffs = _compose_q_coeffs(lam_mp, q)
    coeffs[1] -= 1  # P^q(z) - z
    asc = np.array([complex(c) for c in coeffs])
    roots = np.roots(asc[::-1])

    order = np.argsort(np.abs(roots))
    roots = roots[order]
    if abs(roots[0]) > 1e-6:
        raise SeparationError("expected a root at the parabolic point 0")
    cand = roots[1 : q + 1].astype(complex)

    for i in range(q):
        z = cand[i]
        for _ in range(newton_steps):
            d, fz = pmap.orbit_derivative(z, q)
            g, gp = fz - z, d - 1.0
            step = g / gp
            z = z - step
            if abs(step) < 1e-16 * max(1.0, abs(z)):
                break
        cand[i] = z

    resid = np.array([abs(pmap.apply_k(z, q) - z) for z in cand])
    scale = np.maximum(1.0, np.abs(cand))
    if np.any(resid > residual_tol * scale):
        raise SeparationError(f"root polishing stalled: residuals {resid}")
    # Pairwise separation, including from 0.
    sep = np.min(np.abs(cand[:, None] - cand[None, :]) + np.eye(q) * 1e9)
    if sep < 1e-9 * np.min(np.abs(cand)) or np.min(np.abs(cand)) < 1e-12:
        raise SeparationError("periodic points failed to separate")

    delta = float(rn.delta())
    c_est = complex(np.mean(cand**q) / delta)
    labels = _axis_labels(cand, delta * c_est, q)
    ordered = cand[np.argsort(labels)]
    return SplittingData(
        n=rn.n, q=q, points=ordered, c_estimate=c_est,
        axis_labels=np.arange(q), delta=delta,
    )


def _axis_labels(points, target, q):
    """Nearest q-th-root-of-target axis for every point; must be a bijection."""
    base = np.angle(target) % (2 * np.pi)
    axes = (base + 2 * np.pi * np.arange(q)) / q  # axis 0 has smallest angle >= 0
    ang = np.angle(points) % (2 * np.pi)
    diff = np.abs(ang[:, None] - axes[None, :])
    diff = np.minimum(diff, 2 * np.pi - diff)
    labels = np.argmin(diff, axis=1)
    if len(set(labels.tolist())) != q:
        raise SeparationError("axis labeling is not a bijection")
    gap = np.sort(diff, axis=1)
    if np.any(gap[:, 1] - gap[:, 0] < 1e-3):
        raise SeparationError("axis labeling ambiguous")
    return labels


def neville(xs, ys):
    """Polynomial extrapolation table to x -> 0 (last row entry is the limit)."""
    tab = [list(ys)]
    for j in range(1, len(xs)):
        prev, row = tab[-1], []
        for i in range(len(xs) - j):
            x0, x1 = xs[i], xs[i + j]
            row.append((x0 * prev[i + 1] - x1 * prev[i]) / (x0 - x1))
        tab.append(row)
    return tab


def estimate_splitting_constant(base_cf, n_list, tail=None, rel_tol: float = 1e-3,
                                z_index: int = None):
    """The splitting constant c = lim z_i^q / (theta_n - p/q) over n_list.

    The default estimator averages z_i^q over the whole cycle, which cancels
    every fractional power of delta and leaves an O(1/n) error, extrapolated
    to 0 by Neville in 1/n.  With z_index given, the single-point estimator
    is used instead; its error is a series in delta^(1/q), so extrapolation
    then runs in |delta|^(1/q) and converges much more slowly.

    Returns (c, err_estimate, table); err_estimate is the distance between
    the last two extrapolants.
    """
    from .cf import rotation_number

    if len(n_list) < 3 or any(b >= a for a, b in zip(n_list[1:], n_list)):
        raise ValueError("n_list must be >= 3 increasing entries")
    xs, ys = [], []
    for n in n_list:
        rn = rotation_number(base_cf, n, tail=tail)
        sd = periodic_points_near_zero(rn)
        if z_index is None:
            xs.append(1.0 / n)
            ys.append(sd.c_estimate)
        else:
            xs.append(abs(sd.delta) ** (1.0 / rn.q))
            ys.append(complex(sd.points[z_index]) ** rn.q / sd.delta)
    tab = neville(xs, ys)
    c, c_prev = tab[-1][0], tab[-2][0]
    err = abs(c - c_prev)
    if err > rel_tol * abs(c):
        raise ExtrapolationError(
            f"splitting constant did not settle: last extrapolants {c_prev} vs {c}"
        )
    return complex(c), float(err), tab
