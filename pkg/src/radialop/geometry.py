"""Hyperspherical coordinates in n dimensions and a finite-difference metric oracle.

Coordinate ordering is ``u = (r, theta_{n-2}, ..., theta_1, phi)``; a
:class:`PolarPoint` stores its thetas in that same order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np


class DegeneratePointError(ValueError):
    """Point where the coordinate Jacobian (nearly) vanishes."""


@dataclass(frozen=True)
class PolarPoint:
    r: float
    thetas: Tuple[float, ...] = ()
    phi: Optional[float] = None  # None only for n = 1

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        if self.r <= 0:
            raise DegeneratePointError("r must be positive")
        if self.phi is None and self.thetas:
            raise ValueError("angles theta require an azimuth phi")

    @property
    def dimension(self) -> int:
        return 1 if self.phi is None else len(self.thetas) + 2

    @classmethod
    def from_coordinates(cls, u: Sequence[float]) -> "PolarPoint":
        """Build from a flat vector in u-ordering."""
        u = [float(v) for v in u]
        if len(u) == 1:
            return cls(u[0])
        return cls(u[0], tuple(u[1:-1]), u[-1])

    def coordinates(self) -> np.ndarray:
        if self.phi is None:
            return np.array([self.r])
        return np.array([self.r, *self.thetas, self.phi])

    def theta(self, k: int) -> float:
        """theta_k for 1 <= k <= n-2."""
        n = self.dimension
        return self.thetas[n - 2 - k]


def _to_cartesian_array(u: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return np.array([u[0]])
    r, phi = u[0], u[-1]
    # thetas_by_index[k] = theta_k, k = 1..n-2
    thetas_by_index = {k: u[n - 1 - k] for k in range(1, n - 1)}
    sines = {k: np.sin(t) for k, t in thetas_by_index.items()}

    def sin_tail(start: int) -> float:
        out = 1.0
        for k in range(start, n - 1):
            out *= sines[k]
        return out

    x = np.empty(n)
    tail = sin_tail(1)
    x[0] = r * np.cos(phi) * tail
    x[1] = r * np.sin(phi) * tail
    for i in range(3, n + 1):
        x[i - 1] = r * np.cos(thetas_by_index[i - 2]) * sin_tail(i - 1)
    return x


def to_cartesian(p: PolarPoint) -> np.ndarray:
    """Cartesian image ``(x_1, ..., x_n)`` of a polar point."""
    return _to_cartesian_array(p.coordinates(), p.dimension)


def analytic_metric_diagonal(p: PolarPoint) -> np.ndarray:
    """diag(1, r^2, r^2 sin^2 theta_{n-2}, ..., r^2 sin^2 theta_{n-2} ... sin^2 theta_1)."""
    n = p.dimension
    diag = [1.0]
    scale = p.r**2
    for j in range(1, n):
        diag.append(scale)
        if j < n - 1:
            scale *= np.sin(p.thetas[j - 1]) ** 2
    return np.array(diag)


def metric_determinant(p: PolarPoint) -> float:
    return float(np.prod(analytic_metric_diagonal(p)))


def closed_form_determinant(p: PolarPoint) -> float:
    """r^(2(n-1)) * prod_k sin^(2k) theta_k."""
    n = p.dimension
    out = p.r ** (2 * (n - 1))
    for k in range(1, n - 1):
        out *= np.sin(p.theta(k)) ** (2 * k)
    return float(out)


def jacobian_fd(p: PolarPoint, h: float = 1e-5, margin: float = 1e-3) -> np.ndarray:
    """Central-difference Jacobian dx_k/du_j with one Richardson level (h, h/2)."""
    if h <= 0:
        raise ValueError("step must be positive")
    for t in p.thetas:
        if not margin < t < np.pi - margin:
            raise DegeneratePointError(f"theta={t} too close to 0 or pi")
    n = p.dimension
    u0 = p.coordinates()

    def central(step: float) -> np.ndarray:
        jac = np.empty((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = step
            jac[:, j] = (_to_cartesian_array(u0 + e, n) - _to_cartesian_array(u0 - e, n)) / (2 * step)
        return jac

    return (4 * central(h / 2) - central(h)) / 3


def random_interior_point(n: int, rng: np.random.Generator) -> PolarPoint:
    """Sample r in [0.5, 5], thetas in [0.3, pi-0.3], phi in [0, 2 pi)."""
    r = rng.uniform(0.5, 5.0)
    if n == 1:
        return PolarPoint(r)
    thetas = tuple(rng.uniform(0.3, np.pi - 0.3, size=n - 2))
    return PolarPoint(r, thetas, rng.uniform(0.0, 2 * np.pi))


def metric_summary(n: Optional[int] = None) -> dict:
    """Text form of the metric diagonal and determinant, symbolic or for a fixed n."""
    if n is None:
        return {
            "coordinates": "(r, theta_{n-2}, ..., theta_1, phi)",
            "diagonal": "(1, r^2, r^2*sin^2(theta_{n-2}), ..., r^2*sin^2(theta_{n-2})*...*sin^2(theta_1))",
            "determinant": "r^(2*(n-1))*sin^(2*(n-2))(theta_{n-2})*...*sin^2(theta_1)",
            "radial_weight": "r^(n-1)",
        }
    if n == 1:
        return {"coordinates": "(r)", "diagonal": "(1)", "determinant": "1", "radial_weight": "1"}
    names = [f"theta_{k}" for k in range(n - 2, 0, -1)] + ["phi"]
    diag = ["1"]
    sines = []
    for j in range(1, n):
        diag.append("*".join(["r^2"] + sines))
        if j < n - 1:
            sines.append(f"sin^2({names[j - 1]})")
    det = [f"r^{2 * (n - 1)}"]
    for k in range(n - 2, 0, -1):
        det.append(f"sin^{2 * k}(theta_{k})" if k > 1 else "sin^2(theta_1)")
    return {
        "coordinates": "(" + ", ".join(["r"] + names) + ")",
        "diagonal": "(" + ", ".join(diag) + ")",
        "determinant": "*".join(det),
        "radial_weight": "r" if n == 2 else f"r^{n - 1}",
    }
