"""Periodic grid states and spectral operators.

A state is a pair U = (u, v) of complex fields on a uniform grid of the unit
cell, together with a quasimomentum twist sigma and a mass m > 0.  All
differential operators act spectrally through the shifted Laplacian symbol
-|2 pi n + sigma|^2, and all inner products use the unit-cell normalization
(1/N^d) sum over grid points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TorusGrid",
    "FieldState",
    "make_state",
    "shifted_laplacian_symbol",
    "energy",
    "dissipativity_residual",
    "state_to_json_csv",
    "state_from_json_csv",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid of the unit cell [0,1]^d with N points per axis.

    N must be a power of two >= 16.  Frequencies follow the standard FFT
    layout with the Nyquist mode on the negative side.
    """

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError("grid size must be a power of two >= 16")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    def points(self) -> np.ndarray:
        """Grid points, shape (n,)*d + (d,)."""
        xs = np.arange(self.n) / self.n
        if self.dim == 1:
            return xs[:, None]
        g1, g2 = np.meshgrid(xs, xs, indexing="ij")
        return np.stack([g1, g2], axis=-1)

    def freq(self) -> list:
        """Integer frequency index per axis (FFT order)."""
        return [np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)] * self.dim

    def freq_mesh(self) -> list:
        f = np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)
        if self.dim == 1:
            return [f]
        return list(np.meshgrid(f, f, indexing="ij"))


@dataclass(frozen=True)
class FieldState:
    """U = (u, dt u) on a torus grid with quasimomentum twist and mass."""

    u: np.ndarray
    v: np.ndarray
    sigma: tuple
    m: float
    grid: TorusGrid

    def __post_init__(self):
        if self.u.shape != self.grid.shape or self.v.shape != self.grid.shape:
            raise ValueError("field shapes must match the grid")
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if len(self.sigma) != self.grid.dim:
            raise ValueError("sigma dimension mismatch")

    def coefficients(self):
        """Unit-cell-normalized Fourier coefficients of (u, v)."""
        norm = self.grid.n**self.grid.dim
        return np.fft.fftn(self.u) / norm, np.fft.fftn(self.v) / norm


@dataclass(frozen=True)
class SpectralMultiplier:
    """Per-mode values on a grid's frequency set (FFT layout)."""

    values: np.ndarray
    grid: TorusGrid

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError("multiplier shape must match the grid frequency set")

    def apply(self, field: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(self.values * np.fft.fftn(field))


def shifted_momentum_sq(grid: TorusGrid, sigma) -> np.ndarray:
    """|2 pi n + sigma|^2 on the grid's frequency set."""
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    mesh = grid.freq_mesh()
    out = np.zeros(grid.shape)
    for axis in range(grid.dim):
        out = out + (2 * np.pi * mesh[axis] + sigma[axis]) ** 2
    return out


def shifted_laplacian_symbol(grid: TorusGrid, sigma) -> SpectralMultiplier:
    """Symbol of the sigma-twisted Laplacian: -(|2 pi n + sigma|^2)."""
    return SpectralMultiplier(-shifted_momentum_sq(grid, sigma), grid)


def make_state(grid: TorusGrid, sigma, m: float, kind: str, **kw) -> FieldState:
    """Deterministic initial states.

    kind = "single-mode": u = exp(2 pi i k.x), v = 0 (kw: k, int or tuple).
    kind = "gaussian": periodized gaussian bump with optional directed
        momentum (kw: center, width, momentum); width must cover >= 4 grid
        spacings.
    kind = "random": complex standard-normal u, v from a seeded generator
        (kw: seed).
    """
    sigma = tuple(float(s) for s in np.atleast_1d(np.asarray(sigma, dtype=float)))
    zeros = np.zeros(grid.shape, dtype=complex)
    if kind == "single-mode":
        k = np.atleast_1d(np.asarray(kw.get("k", 0), dtype=int))
        if np.any(np.abs(k) >= grid.n // 2):
            raise ValueError("mode index exceeds grid resolution")
        pts = grid.points()
        u = np.exp(2j * np.pi * np.tensordot(pts, k.astype(float), axes=([-1], [0])))
        return FieldState(u, zeros, sigma, float(m), grid)
    if kind == "gaussian":
        center = np.atleast_1d(np.asarray(kw.get("center", [0.5] * grid.dim), dtype=float))
        width = float(kw.get("width", 0.1))
        momentum = np.atleast_1d(np.asarray(kw.get("momentum", [0] * grid.dim), dtype=float))
        if width < 4 * grid.spacing:
            raise ValueError("gaussian width under-resolved on this grid")
        pts = grid.points()
        u = np.zeros(grid.shape, dtype=complex)
        shifts = np.arange(-3, 4)
        if grid.dim == 1:
            images = [(s,) for s in shifts]
        else:
            images = [(s1, s2) for s1 in shifts for s2 in shifts]
        for shift in images:
            diff = pts - (center + np.array(shift, dtype=float))
            u += np.exp(-np.sum(diff**2, axis=-1) / (2 * width**2))
        u = u * np.exp(2j * np.pi * np.tensordot(pts, momentum, axes=([-1], [0])))
        return FieldState(u, zeros, sigma, float(m), grid)
    if kind == "random":
        rng = np.random.default_rng(int(kw.get("seed", 0)))
        u = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        v = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        return FieldState(u, v, sigma, float(m), grid)
    raise ValueError(f"unknown state kind: {kind}")


def energy(state: FieldState) -> float:
    """E = sum_n (|2 pi n + sigma|^2 + m)|u_hat|^2 + sum_n |v_hat|^2."""
    cu, cv = state.coefficients()
    w = shifted_momentum_sq(state.grid, state.sigma) + state.m
    return float(np.sum(w * np.abs(cu) ** 2) + np.sum(np.abs(cv) ** 2))


def inner_l2(grid: TorusGrid, f: np.ndarray, g: np.ndarray) -> complex:
    """Unit-cell discrete L^2 inner product (1/N^d) sum f conj(g)."""
    return complex(np.sum(f * np.conj(g)) / grid.n**grid.dim)


def dissipativity_residual(state: FieldState, a_grid: np.ndarray) -> float:
    """|Re<A U, U>_H + <a v, v>| for the first-order generator A.

    A U = (v, (Delta_sigma - m) u - a v).  Vanishes (to roundoff) because
    integration by parts is exact for trigonometric polynomials.
    """
    a_grid = np.asarray(a_grid, dtype=float)
    if a_grid.shape != state.grid.shape:
        raise ValueError("damping grid shape mismatch")
    if a_grid.min() < 0:
        raise ValueError("damping grid must be non-negative")
    grid = state.grid
    lap = shifted_laplacian_symbol(grid, state.sigma)
    # energy inner product <(p,q),(u,v)> = <grad_s p, grad_s u> + m<p,u> + <q,v>
    # computed spectrally with the H^1 part as sum (|2 pi n+sigma|^2+m) p_hat conj(u_hat)
    w = shifted_momentum_sq(grid, state.sigma) + state.m
    norm = grid.n**grid.dim
    cu = np.fft.fftn(state.u) / norm
    cv = np.fft.fftn(state.v) / norm
    second = np.fft.ifftn(lap.values * np.fft.fftn(state.u)) - state.m * state.u - a_grid * state.v
    cs = np.fft.fftn(second) / norm
    pairing = np.sum(w * cv * np.conj(cu)) + np.sum(cs * np.conj(cv))
    damp = float(np.real(inner_l2(grid, a_grid * state.v, state.v)))
    return abs(float(np.real(pairing)) + damp)


def state_to_json_csv(state: FieldState) -> tuple:
    """Serialize a state to a (metadata JSON, values CSV) pair.

    CSV rows are grid values in row-major order with columns
    u_re,u_im,v_re,v_im.
    """
    meta = json.dumps(
        {
            "dim": state.grid.dim,
            "n": state.grid.n,
            "sigma": list(state.sigma),
            "m": state.m,
        },
        sort_keys=True,
    )
    rows = ["u_re,u_im,v_re,v_im"]
    u = state.u.ravel()
    v = state.v.ravel()
    for uu, vv in zip(u, v):
        rows.append(f"{uu.real:.17g},{uu.imag:.17g},{vv.real:.17g},{vv.imag:.17g}")
    return meta, "\n".join(rows) + "\n"


def state_from_json_csv(meta: str, csv_text: str) -> FieldState:
    obj = json.loads(meta)
    grid = TorusGrid(obj["dim"], obj["n"])
    lines = csv_text.strip().splitlines()[1:]
    data = np.array([[float(c) for c in ln.split(",")] for ln in lines])
    u = (data[:, 0] + 1j * data[:, 1]).reshape(grid.shape)
    v = (data[:, 2] + 1j * data[:, 3]).reshape(grid.shape)
    return FieldState(u, v, tuple(obj["sigma"]), obj["m"], grid)
