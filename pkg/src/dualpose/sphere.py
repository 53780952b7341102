"""Equiangular spherical grids, signals, harmonic transforms, and filters.

Signals are (W, H, d) arrays sampled at azimuths phi_w = 2*pi*w/W and
polar angles theta_h = pi*(h+0.5)/H. Quadrature uses the exact
interpolatory rule for these latitude nodes (Fejer's first rule in
cos(theta)), so bandlimited analysis/synthesis round-trips to machine
precision for bandwidth B <= min(W, H)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lpmv

from .errors import (
    BandwidthExceedsGrid,
    InvalidGrid,
    NonRealSpectrum,
    ShapeMismatch,
)


@dataclass(frozen=True)
class SphericalGrid:
    """Equiangular W x H sampling of the unit sphere."""

    W: int
    H: int
    theta: np.ndarray  # (H,) polar angles
    phi: np.ndarray  # (W,) azimuths
    directions: np.ndarray  # (W, H, 3) unit vectors
    quad_weights: np.ndarray  # (H,) per-cell solid angle; grid total 4*pi

    @property
    def max_bandwidth(self) -> int:
        return min(self.W, self.H) // 2

    def cell_weights(self) -> np.ndarray:
        """Per-cell weights broadcast to the full (W, H) grid."""
        return np.broadcast_to(self.quad_weights[None, :], (self.W, self.H))


@dataclass
class SphericalSignal:
    grid: SphericalGrid
    values: np.ndarray  # (W, H, d)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 2:
            self.values = self.values[:, :, None]
        if self.values.shape[:2] != (self.grid.W, self.grid.H):
            raise ShapeMismatch(
                f"values shape {self.values.shape} does not match grid "
                f"{self.grid.W}x{self.grid.H}"
            )
        if not np.isfinite(self.values).all():
            raise ShapeMismatch("signal contains non-finite values")

    @property
    def channels(self) -> int:
        return self.values.shape[2]


@dataclass
class SpectralCoeffs:
    """Harmonic coefficients per channel, degrees 0 <= l < B, orders |m| <= l.

    Stored as a dense (channels, B, 2B-1) complex array with order m at
    column index m + B - 1; entries with |m| > l are zero.
    """

    bandwidth: int
    values: np.ndarray  # (d, B, 2B-1) complex

    def coeff(self, channel: int, l: int, m: int) -> complex:
        return complex(self.values[channel, l, m + self.bandwidth - 1])


@dataclass
class ZonalFilter:
    """Isotropic spherical filter: one real tap per (in, out, degree)."""

    bandwidth: int
    taps: np.ndarray  # (d_in, d_out, B)

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=np.float64)
        if self.taps.ndim != 3 or self.taps.shape[2] != self.bandwidth:
            raise ShapeMismatch(f"taps shape {self.taps.shape} incompatible with B={self.bandwidth}")
        if not np.isfinite(self.taps).all():
            raise ShapeMismatch("filter taps contain non-finite values")


def _fejer1_weights(H: int) -> np.ndarray:
    """Fejer's first quadrature rule at nodes cos(pi*(h+0.5)/H); sums to 2."""
    th = np.pi * (np.arange(H) + 0.5) / H
    j = np.arange(1, H // 2 + 1)
    w = 1.0 - 2.0 * np.sum(np.cos(2.0 * np.outer(th, j)) / (4.0 * j ** 2 - 1.0), axis=1)
    return w * (2.0 / H)


def make_grid(W: int, H: int) -> SphericalGrid:
    """Equiangular grid with exact latitude quadrature normalized to 4*pi."""
    if W < 4 or H < 4 or W % 2 or H % 2:
        raise InvalidGrid(f"W and H must be even and >= 4, got {W}x{H}")
    theta = np.pi * (np.arange(H) + 0.5) / H
    phi = 2.0 * np.pi * np.arange(W) / W
    st, ct = np.sin(theta), np.cos(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    directions = np.empty((W, H, 3))
    directions[:, :, 0] = np.outer(cp, st)
    directions[:, :, 1] = np.outer(sp, st)
    directions[:, :, 2] = ct[None, :]
    quad = _fejer1_weights(H) * (2.0 * np.pi / W)
    quad *= 4.0 * np.pi / (quad.sum() * W)
    return SphericalGrid(W=W, H=H, theta=theta, phi=phi, directions=directions, quad_weights=quad)


def integrate(signal: SphericalSignal) -> np.ndarray:
    """Quadrature integral of each channel over the sphere."""
    return np.einsum("whc,h->c", signal.values, signal.grid.quad_weights)


class SHTPlan:
    """Precomputed tables for harmonic analysis/synthesis on one grid.

    Analysis of channel c: a[l, m] = sum_{w,h} q_h * conj(Y_lm) * f[w, h, c],
    evaluated as an azimuthal FFT followed by a latitude contraction against
    normalized associated Legendre values.
    """

    def __init__(self, grid: SphericalGrid, bandwidth: int):
        if bandwidth < 1 or bandwidth > grid.max_bandwidth:
            raise BandwidthExceedsGrid(
                f"bandwidth {bandwidth} exceeds grid limit {grid.max_bandwidth}"
            )
        self.grid = grid
        self.B = bandwidth
        B, H = bandwidth, grid.H
        x = np.cos(grid.theta)
        # lam[l, m + B - 1, h] = real factor of Y_l^m at latitude h
        lam = np.zeros((B, 2 * B - 1, H))
        for l in range(B):
            for m in range(l + 1):
                norm = np.sqrt(
                    (2 * l + 1)
                    / (4.0 * np.pi)
                    * np.exp(math.lgamma(l - m + 1) - math.lgamma(l + m + 1))
                )
                vals = norm * lpmv(m, l, x)
                lam[l, m + B - 1] = vals
                if m:
                    lam[l, -m + B - 1] = (-1) ** m * vals
        self._lam = lam
        self._lam_w = lam * grid.quad_weights[None, None, :]
        # FFT bin per order m (signal azimuth axis has length W)
        self._m_bins = np.arange(-(B - 1), B) % grid.W

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """(W, H, d) real -> (d, B, 2B-1) complex coefficients."""
        fw = np.fft.fft(values, axis=0)[self._m_bins]  # (2B-1, H, d)
        return np.einsum("lmh,mhd->dlm", self._lam_w, fw)

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """(d, B, 2B-1) complex -> (W, H, d) real (real part of the sum)."""
        W, H = self.grid.W, self.grid.H
        d = coeffs.shape[0]
        ring = np.einsum("dlm,lmh->mhd", coeffs, self._lam)  # (2B-1, H, d)
        spread = np.zeros((W, H, d), dtype=np.complex128)
        np.add.at(spread, self._m_bins, ring)
        return np.fft.ifft(spread, axis=0).real * W

    def conv(self, values: np.ndarray, taps: np.ndarray) -> np.ndarray:
        """Zonal convolution: per-degree scaling in the spectral domain.

        values: (W, H, d_in); taps: (d_in, d_out, B) -> (W, H, d_out).
        """
        coeffs = self.analyze(values)  # (d_in, B, 2B-1)
        mixed = np.einsum("ilm,iol->olm", coeffs, taps)
        return self.synthesize(mixed)

    def conv_adjoint(self, grad_out: np.ndarray, taps: np.ndarray) -> np.ndarray:
        """Transpose of `conv` as a linear map of the input signal."""
        w = self.grid.cell_weights()[:, :, None]
        return self.conv(grad_out / w, np.transpose(taps, (1, 0, 2))) * w

    def conv_grad_taps(self, values: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
        """Gradient of sum(grad_out * conv(values, taps)) w.r.t. the taps."""
        w = self.grid.cell_weights()[:, :, None]
        a_in = self.analyze(values)  # (d_in, B, 2B-1)
        a_g = self.analyze(grad_out / w)  # (d_out, B, 2B-1)
        return np.einsum("ilm,olm->iol", a_in, np.conj(a_g)).real


_PLAN_CACHE: dict[tuple[int, int, int], SHTPlan] = {}


def get_plan(grid: SphericalGrid, bandwidth: int) -> SHTPlan:
    key = (grid.W, grid.H, bandwidth)
    plan = _PLAN_CACHE.get(key)
    if plan is None:
        plan = SHTPlan(grid, bandwidth)
        _PLAN_CACHE[key] = plan
    return plan


def sht_forward(signal: SphericalSignal, bandwidth: int) -> SpectralCoeffs:
    plan = get_plan(signal.grid, bandwidth)
    return SpectralCoeffs(bandwidth=bandwidth, values=plan.analyze(signal.values))


def sht_inverse(coeffs: SpectralCoeffs, grid: SphericalGrid) -> SphericalSignal:
    plan = get_plan(grid, coeffs.bandwidth)
    violation = _conjugate_symmetry_violation(coeffs)
    if violation > 1e-6:
        raise NonRealSpectrum(f"conjugate symmetry violated by {violation:.3e}")
    return SphericalSignal(grid=grid, values=plan.synthesize(coeffs.values))


def _conjugate_symmetry_violation(coeffs: SpectralCoeffs) -> float:
    B = coeffs.bandwidth
    v = coeffs.values
    worst = 0.0
    for m in range(1, B):
        neg = v[:, :, -m + B - 1]
        pos = v[:, :, m + B - 1]
        worst = max(worst, np.abs(neg - (-1) ** m * np.conj(pos)).max())
    return worst


def zonal_conv(signal: SphericalSignal, filt: ZonalFilter) -> SphericalSignal:
    """Apply an isotropic spectral filter; linear in signal and taps."""
    if filt.taps.shape[0] != signal.channels:
        raise ShapeMismatch(
            f"filter expects {filt.taps.shape[0]} channels, signal has {signal.channels}"
        )
    plan = get_plan(signal.grid, filt.bandwidth)
    return SphericalSignal(grid=signal.grid, values=plan.conv(signal.values, filt.taps))


def rotate_signal_azimuthal(signal: SphericalSignal, k: int) -> SphericalSignal:
    """Exact rotation by 2*pi*k/W about +z: cyclic shift of the azimuth axis."""
    return SphericalSignal(grid=signal.grid, values=np.roll(signal.values, k, axis=0))


def pool_weights(grid: SphericalGrid) -> np.ndarray:
    """(H/2, 2) normalized quadrature weights of each 2x2 pooling block."""
    q = grid.quad_weights.reshape(-1, 2)
    return q / (2.0 * q.sum(axis=1, keepdims=True))


def pool_values(values: np.ndarray, grid: SphericalGrid) -> np.ndarray:
    W, H, d = values.shape
    view = values.reshape(W // 2, 2, H // 2, 2, d)
    return np.einsum("abcde,cd->ace", view, pool_weights(grid))


def pool_adjoint(grad_out: np.ndarray, grid: SphericalGrid) -> np.ndarray:
    Wo, Ho, d = grad_out.shape
    w = pool_weights(grid)
    spread = np.einsum("ace,cd->acde", grad_out, w)  # (W/2, H/2, 2, d)
    full = np.repeat(spread[:, None, :, :, :], 2, axis=1)  # copy across azimuth pair
    return full.reshape(Wo * 2, Ho * 2, d)


def weighted_avg_pool(signal: SphericalSignal) -> SphericalSignal:
    """Quadrature-weighted 2x2 mean onto the half-resolution grid."""
    W, H = signal.grid.W, signal.grid.H
    if W % 2 or H % 2 or W < 8 or H < 8:
        raise InvalidGrid(f"cannot pool {W}x{H} grid below 4x4")
    coarse = make_grid(W // 2, H // 2)
    return SphericalSignal(grid=coarse, values=pool_values(signal.values, signal.grid))


def bin_directions(rel: np.ndarray, W: int, H: int) -> tuple[np.ndarray, np.ndarray]:
    """Map direction vectors to (w, h) cells centered on the grid directions.

    Azimuth cells are half-open [phi_w - pi/W, phi_w + pi/W); polar cells
    are [pi*h/H, pi*(h+1)/H).
    """
    r = np.linalg.norm(rel, axis=1)
    z = np.clip(rel[:, 2] / r, -1.0, 1.0)
    theta = np.arccos(z)
    phi = np.arctan2(rel[:, 1], rel[:, 0]) % (2.0 * np.pi)
    w = np.floor(phi * W / (2.0 * np.pi) + 0.5).astype(np.int64) % W
    h = np.minimum(np.floor(theta * H / np.pi).astype(np.int64), H - 1)
    return w, h


def convert_to_spherical(
    points: np.ndarray, colors: np.ndarray, grid: SphericalGrid
) -> tuple[SphericalSignal, SphericalSignal, np.ndarray]:
    """Encode a crop as color and radial spherical signals about its centroid.

    Each occupied cell carries the point farthest from the centroid: its
    RGB in the color signal and its distance in the radial signal. Empty
    cells are zero. Points coincident with the centroid have no direction
    and are skipped (a single-point crop yields all-zero signals). Ties in
    distance within a cell break toward the lowest point index.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    colors = np.asarray(colors, dtype=np.float64).reshape(-1, 3)
    if len(points) != len(colors):
        raise ShapeMismatch(f"{len(points)} points but {len(colors)} colors")
    if len(points) == 0:
        raise ShapeMismatch("empty point set")
    centroid = points.mean(axis=0)
    rel = points - centroid
    r = np.linalg.norm(rel, axis=1)
    keep = r > 0
    sx = np.zeros((grid.W, grid.H, 3))
    sp = np.zeros((grid.W, grid.H, 1))
    if keep.any():
        idx = np.nonzero(keep)[0]
        w, h = bin_directions(rel[idx], grid.W, grid.H)
        cell = w * grid.H + h
        order = np.lexsort((idx, -r[idx], cell))
        cell_sorted = cell[order]
        first = np.ones(len(order), dtype=bool)
        first[1:] = cell_sorted[1:] != cell_sorted[:-1]
        sel = order[first]
        ww, hh = w[sel], h[sel]
        src = idx[sel]
        sp[ww, hh, 0] = r[src]
        sx[ww, hh] = colors[src]
    return (
        SphericalSignal(grid=grid, values=sx),
        SphericalSignal(grid=grid, values=sp),
        centroid,
    )
