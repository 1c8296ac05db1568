"""Periodic truncated 2-D computational domain and spectral operators.

The exterior domain is replaced by a periodic box of side ``L``; every field
the toolkit evolves is constructed so that it equals its far-field constant
near the box boundary, which makes the periodic truncation faithful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ObstacleSpec:
    """Optional penalized obstacle.  ``kind='none'`` disables it."""

    kind: str = "none"  # 'none' | 'disk'
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    strength: float = 0.0  # penalization strength sigma >= 0

    def __post_init__(self):
        if self.kind not in ("none", "disk"):
            raise ValueError(f"unknown obstacle kind {self.kind!r}")
        if self.kind == "disk" and self.radius <= 0:
            raise ValueError("obstacle radius must be positive")
        if self.strength < 0:
            raise ValueError("penalization strength must be nonnegative")


class Grid2D:
    """Uniform periodic grid on [-L/2, L/2)^2 with Fourier wavenumbers.

    Fields are plain numpy arrays of shape (N, N); vector fields are
    (2, N, N).  All differential operators are spectral and pure.
    """

    def __init__(self, L: float, N: int, obstacle: ObstacleSpec | None = None):
        if N % 2 != 0 or N < 8:
            raise ValueError("N must be even and >= 8")
        if L <= 0:
            raise ValueError("L must be positive")
        obstacle = obstacle or ObstacleSpec()
        if obstacle.kind == "disk":
            cx, cy = obstacle.center
            margin = L / 2 - (max(abs(cx), abs(cy)) + obstacle.radius)
            if margin < L / 4:
                raise ValueError("obstacle too large for the box (margin < L/4)")

        self.L = float(L)
        self.N = int(N)
        self.h = self.L / self.N
        self.obstacle = obstacle

        x1d = -L / 2 + self.h * np.arange(N)
        self.x1, self.x2 = np.meshgrid(x1d, x1d, indexing="ij")
        self.r = np.hypot(self.x1, self.x2)

        k1d = 2.0 * np.pi * np.fft.fftfreq(N, d=self.h)
        self.k1, self.k2 = np.meshgrid(k1d, k1d, indexing="ij")
        self.ksq = self.k1**2 + self.k2**2

        kcut = (2.0 / 3.0) * np.abs(k1d).max()
        self.dealias_mask = (np.abs(self.k1) <= kcut) & (np.abs(self.k2) <= kcut)

    # -- transforms -------------------------------------------------------

    def fft(self, f):
        return np.fft.fft2(f)

    def ifft(self, fh):
        return np.fft.ifft2(fh)

    def to_real(self, f):
        """Drop the imaginary round-off of a nominally real result."""
        return np.ascontiguousarray(f.real)

    # -- differential operators ------------------------------------------

    def grad(self, f):
        """Spectral gradient of a scalar field -> (2, N, N)."""
        fh = self.fft(f)
        gx = self.ifft(1j * self.k1 * fh)
        gy = self.ifft(1j * self.k2 * fh)
        if np.isrealobj(f):
            return np.stack([self.to_real(gx), self.to_real(gy)])
        return np.stack([gx, gy])

    def div(self, v):
        """Spectral divergence of a vector field."""
        out = self.ifft(1j * self.k1 * self.fft(v[0]) + 1j * self.k2 * self.fft(v[1]))
        if np.isrealobj(v):
            return self.to_real(out)
        return out

    def curl(self, v):
        """2-D scalar curl: d(v2)/dx1 - d(v1)/dx2."""
        out = self.ifft(1j * self.k1 * self.fft(v[1]) - 1j * self.k2 * self.fft(v[0]))
        if np.isrealobj(v):
            return self.to_real(out)
        return out

    def lap(self, f):
        """Spectral Laplacian; accepts a scalar or (componentwise) a vector."""
        if f.ndim == 3:
            return np.stack([self.lap(c) for c in f])
        out = self.ifft(-self.ksq * self.fft(f))
        if np.isrealobj(f):
            return self.to_real(out)
        return out

    def shift(self, f, d):
        """Exact spectral translation: returns g with g(x) = f(x + d)."""
        if f.ndim == 3:
            return np.stack([self.shift(c, d) for c in f])
        phase = np.exp(1j * (self.k1 * d[0] + self.k2 * d[1]))
        out = self.ifft(phase * self.fft(f))
        if np.isrealobj(f):
            return self.to_real(out)
        return out

    def dealias(self, f):
        if f.ndim == 3:
            return np.stack([self.dealias(c) for c in f])
        out = self.ifft(self.dealias_mask * self.fft(f))
        if np.isrealobj(f):
            return self.to_real(out)
        return out

    # -- quadrature -------------------------------------------------------

    def integrate(self, f):
        """Trapezoidal (= exact for periodic band-limited) quadrature."""
        return float(np.sum(f.real)) * self.h**2

    def l2norm(self, f):
        if f.ndim == 3:
            return float(np.sqrt(sum(self.integrate(np.abs(c) ** 2) for c in f)))
        return float(np.sqrt(self.integrate(np.abs(f) ** 2)))

    def spectral_l2norm(self, f):
        """L2 norm computed from transform coefficients (Parseval route)."""
        fh = self.fft(f)
        return float(np.sqrt(np.sum(np.abs(fh) ** 2)) / self.N * self.h)

    # -- obstacle ---------------------------------------------------------

    def obstacle_mask(self, width: float | None = None):
        """Smooth indicator of the obstacle, 1 inside the disk, 0 outside.

        Used to build the penalization potential sigma * mask; zero field
        when no obstacle is configured.
        """
        if self.obstacle.kind == "none":
            return np.zeros((self.N, self.N))
        width = width or 4 * self.h
        cx, cy = self.obstacle.center
        r = np.hypot(self.x1 - cx, self.x2 - cy)
        return 0.5 * (1.0 - np.tanh((r - self.obstacle.radius) / width))


def make_grid(L: float, N: int, obstacle: ObstacleSpec | None = None) -> Grid2D:
    return Grid2D(L, N, obstacle)


def _quintic_smoothstep(q):
    """C^2 transition 0 -> 1 on [0, 1]; max slope 15/8 < 2."""
    q = np.clip(q, 0.0, 1.0)
    return q**3 * (10.0 - 15.0 * q + 6.0 * q**2)


def _quintic_smoothstep_deriv(q):
    inside = (q > 0.0) & (q < 1.0)
    qc = np.clip(q, 0.0, 1.0)
    return np.where(inside, 30.0 * qc**2 * (1.0 - qc) ** 2, 0.0)


@dataclass
class CutoffField:
    """Radial cutoff: 0 for |x| <= R, 1 for |x| >= 2R, quintic in between."""

    R: float
    values: np.ndarray
    gradient: np.ndarray  # (2, N, N), analytic


def build_cutoff(grid: Grid2D, R: float) -> CutoffField:
    if 2 * R >= grid.L / 2:
        raise ValueError("cutoff R too large: need 2R < L/2 for a plateau")
    if grid.obstacle.kind == "disk":
        cx, cy = grid.obstacle.center
        if R < np.hypot(cx, cy) + grid.obstacle.radius:
            raise ValueError("cutoff R must enclose the obstacle")

    q = (grid.r - R) / R
    chi = _quintic_smoothstep(q)
    dchidr = _quintic_smoothstep_deriv(q) / R
    with np.errstate(invalid="ignore", divide="ignore"):
        unit1 = np.where(grid.r > 0, grid.x1 / grid.r, 0.0)
        unit2 = np.where(grid.r > 0, grid.x2 / grid.r, 0.0)
    gradient = np.stack([dchidr * unit1, dchidr * unit2])
    return CutoffField(R=R, values=chi, gradient=gradient)


def default_cutoff_radius(grid: Grid2D) -> float:
    """L/8, enlarged to twice the obstacle's circumscribed radius if present."""
    R = grid.L / 8
    if grid.obstacle.kind == "disk":
        cx, cy = grid.obstacle.center
        R = max(R, 2.0 * (np.hypot(cx, cy) + grid.obstacle.radius))
    return R
