"""Bloch-fiber matrices of the quadratic damping pencil and resolvent scans.

On each Bloch fiber (quasimomentum sigma) the rescaled stationary operator
-eta^2 Delta_sigma + m - i tau a - tau^2 becomes, in a truncated Fourier
basis n in [-N, N]^d, the matrix

    M[n, n'] = (eta^2 |2 pi n + sigma|^2 + m - tau^2) delta_{n,n'}
               - i tau a_hat(n - n').

1 / sigma_min(M) approximates the fiber resolvent norm and the max over a
sigma grid approximates the full resolvent norm from below.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from kgdamp.damping import DampingProfile, fourier_coefficients
from kgdamp.fields import FieldState, shifted_momentum_sq

__all__ = [
    "FiberPencil",
    "ResolventSample",
    "assemble_pencil",
    "min_singular_value",
    "resolvent_norm",
    "energy_resolvent_norm",
    "semiclassical_inverse_norm",
    "theta_conjugation_residual",
    "truncation_cutoff",
    "sigma_grid",
    "scan",
    "scan_csv",
]

_SVD_SWITCH = 600  # full SVD below, LU + inverse power iteration above
_SINGULAR_REL = 1e-14


@dataclass(frozen=True)
class FiberPencil:
    """Truncated-Fourier matrix of the pencil on one Bloch fiber."""

    eta: float
    tau: float
    sigma: tuple
    cutoff: int
    m: float
    matrix: np.ndarray
    indices: np.ndarray  # (dim_matrix, d) integer frequency per row
    tail_ratio: float

    @property
    def dim_matrix(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ResolventSample:
    """Resolvent norm aggregated over a sigma grid at one (eta, tau)."""

    mode: str
    eta: float
    tau: float
    per_sigma: np.ndarray
    norm: float
    cutoff: int
    tail_ratio: float
    singular: bool
    norm_energy: float = float("nan")

    @property
    def tau_bracket_norm(self) -> float:
        """<tau> * norm with <tau> = sqrt(1 + tau^2)."""
        return float(np.hypot(1.0, self.tau) * self.norm)

    @property
    def bound_ratio(self) -> float:
        """<tau> * norm / (1 + |tau|/eta^2)^2 (the no-GCC scaling shape)."""
        return self.tau_bracket_norm / (1.0 + abs(self.tau) / self.eta**2) ** 2


def truncation_cutoff(eta: float, tau: float, m: float) -> int:
    """Smallest N with eta^2 (2 pi (N-1))^2 >= 4 (tau^2 + m).

    The discarded modes then dominate the coupling, so they perturb the
    inverse only at relative order O(1/(eta^2 N^2)).
    """
    target = np.sqrt(4.0 * (tau**2 + m)) / (2.0 * np.pi * eta)
    return max(2, int(np.ceil(target)) + 1)


def _index_set(cutoff: int, dim: int) -> np.ndarray:
    rng = np.arange(-cutoff, cutoff + 1)
    if dim == 1:
        return rng[:, None]
    g1, g2 = np.meshgrid(rng, rng, indexing="ij")
    return np.stack([g1.ravel(), g2.ravel()], axis=-1)


def _coupling_matrix(coeffs: np.ndarray, indices: np.ndarray, cutoff: int) -> np.ndarray:
    """Convolution matrix A[n, n'] = a_hat(n - n') from coefficients on [-2N, 2N]^d."""
    diff = indices[:, None, :] - indices[None, :, :]
    if indices.shape[1] == 1:
        return coeffs[diff[..., 0] + 2 * cutoff]
    return coeffs[diff[..., 0] + 2 * cutoff, diff[..., 1] + 2 * cutoff]


def assemble_pencil(
    eta: float,
    tau: float,
    sigma,
    cutoff: int,
    p: DampingProfile,
    m: float,
    coeffs: np.ndarray | None = None,
) -> FiberPencil:
    """Assemble the fiber pencil matrix at quasimomentum sigma.

    ``coeffs`` may carry precomputed Fourier coefficients of ``p`` with
    cutoff 2N (as returned by :func:`fourier_coefficients`), which scans use
    to avoid recomputation.
    """
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    d = p.dim
    if len(sigma) != d:
        raise ValueError("sigma dimension mismatch")
    if coeffs is None:
        coeffs = fourier_coefficients(p, 2 * cutoff)
    indices = _index_set(cutoff, d)
    shifted = 2 * np.pi * indices + sigma[None, :]
    diag = eta**2 * np.sum(shifted**2, axis=1) + m - tau**2
    matrix = -1j * tau * _coupling_matrix(coeffs, indices, cutoff)
    matrix[np.diag_indices_from(matrix)] += diag

    tail_floor = eta**2 * (2 * np.pi * cutoff) ** 2 + m - tau**2
    coupling = abs(tau) * p.sup_norm
    tail_ratio = float(coupling / tail_floor) if tail_floor > 0 else float("inf")
    return FiberPencil(
        eta=float(eta),
        tau=float(tau),
        sigma=tuple(float(s) for s in sigma),
        cutoff=int(cutoff),
        m=float(m),
        matrix=matrix,
        indices=indices,
        tail_ratio=tail_ratio,
    )


def min_singular_value(matrix: np.ndarray) -> float:
    """Smallest singular value of a complex square matrix.

    Full SVD up to dimension 600; beyond that an LU factorization with
    inverse power iteration on the normal equations (tolerance 1e-10,
    iteration cap 500).
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix must be square")
    n = matrix.shape[0]
    if n <= _SVD_SWITCH:
        return float(scipy.linalg.svdvals(matrix)[-1])

    lu, piv = scipy.linalg.lu_factor(matrix)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam_prev = 0.0
    for _ in range(500):
        y = scipy.linalg.lu_solve((lu, piv), x, trans=2)  # M^H y = x
        z = scipy.linalg.lu_solve((lu, piv), y)  # M z = y
        lam = np.linalg.norm(z)
        x = z / lam
        if abs(lam - lam_prev) <= 1e-10 * lam:
            return float(1.0 / np.sqrt(lam))
        lam_prev = lam
    # report best bracket on non-convergence
    return float(1.0 / np.sqrt(max(lam, lam_prev)))


def sigma_grid(dim: int, n: int) -> np.ndarray:
    """Uniform quasimomentum grid, shape (n^d, d); reflection-symmetric."""
    s = 2 * np.pi * np.arange(n) / n
    if dim == 1:
        return s[:, None]
    g1, g2 = np.meshgrid(s, s, indexing="ij")
    return np.stack([g1.ravel(), g2.ravel()], axis=-1)


def resolvent_norm(
    eta: float,
    tau: float,
    sigmas: np.ndarray,
    cutoff: int,
    p: DampingProfile,
    m: float,
    coeffs: np.ndarray | None = None,
) -> ResolventSample:
    """sup over the sigma grid of 1 / sigma_min(P_sigma).

    Approximates the resolvent norm from below (finite sigma grid, finite
    truncation); singular fibers are flagged, not raised.
    """
    sigmas = np.atleast_2d(np.asarray(sigmas, dtype=float))
    if len(sigmas) == 0:
        raise ValueError("sigma grid must be non-empty")
    if coeffs is None:
        coeffs = fourier_coefficients(p, 2 * cutoff)
    values = np.empty(len(sigmas))
    singular = False
    tail = 0.0
    for i, s in enumerate(sigmas):
        pen = assemble_pencil(eta, tau, s, cutoff, p, m, coeffs=coeffs)
        tail = pen.tail_ratio
        smin = min_singular_value(pen.matrix)
        scale = np.abs(pen.matrix).max()
        if smin < _SINGULAR_REL * scale:
            singular = True
            values[i] = np.inf
        else:
            values[i] = 1.0 / smin
    return ResolventSample(
        mode="scalar",
        eta=float(eta),
        tau=float(tau),
        per_sigma=values,
        norm=float(values.max()),
        cutoff=int(cutoff),
        tail_ratio=tail,
        singular=singular,
    )


def _energy_block_norm(pen: FiberPencil, coeffs: np.ndarray, p: DampingProfile) -> float:
    """Operator norm of the first-order resolvent block on one fiber.

    Uses the block formula [[R(-a + i tau), -R], [I + R(i tau a + tau^2),
    i tau R]] with R the pencil inverse and a acting by Fourier convolution,
    measured in the weighted energy norm with weights
    w(n) = eta^2 |2 pi n + sigma|^2 + m on the first component.
    """
    k = pen.dim_matrix
    tau = pen.tau
    amat = _coupling_matrix(coeffs, pen.indices, pen.cutoff)
    r = scipy.linalg.inv(pen.matrix)
    eye = np.eye(k)
    block = np.empty((2 * k, 2 * k), dtype=complex)
    block[:k, :k] = r @ (-amat + 1j * tau * eye)
    block[:k, k:] = -r
    block[k:, :k] = eye + r @ (1j * tau * amat + tau**2 * eye)
    block[k:, k:] = 1j * tau * r
    shifted = 2 * np.pi * pen.indices + np.asarray(pen.sigma)[None, :]
    w = pen.eta**2 * np.sum(shifted**2, axis=1) + pen.m
    sqrt_w = np.concatenate([np.sqrt(w), np.ones(k)])
    weighted = (sqrt_w[:, None] * block) / sqrt_w[None, :]
    return float(scipy.linalg.svdvals(weighted)[0])


def energy_resolvent_norm(
    eta: float,
    tau: float,
    sigmas: np.ndarray,
    cutoff: int,
    p: DampingProfile,
    m: float,
    coeffs: np.ndarray | None = None,
) -> float:
    """max over sigma of the energy-space block resolvent norm."""
    sigmas = np.atleast_2d(np.asarray(sigmas, dtype=float))
    if coeffs is None:
        coeffs = fourier_coefficients(p, 2 * cutoff)
    best = 0.0
    for s in sigmas:
        pen = assemble_pencil(eta, tau, s, cutoff, p, m, coeffs=coeffs)
        best = max(best, _energy_block_norm(pen, coeffs, p))
    return best


def semiclassical_cutoff(h: float) -> int:
    """Smallest N with h^2 (2 pi (N-1))^2 >= 8 (tail dominance past s = 1)."""
    target = np.sqrt(8.0) / (2.0 * np.pi * h)
    return max(2, int(np.ceil(target)) + 1)


def semiclassical_inverse_norm(
    h: float,
    eps: float,
    sigmas: np.ndarray,
    cutoff: int | None,
    p: DampingProfile,
) -> ResolventSample:
    """Norm of the inverse of -h^2 Delta_sigma - i eps h a - 1 over a sigma grid.

    Matches the resolvent computation through the substitution eta = 1/eps,
    tau = 1/(eps h); the sample records those equivalent parameters.
    """
    if not (0 < h <= 1) or not (0 < eps <= 1):
        raise ValueError("h and eps must lie in (0, 1]")
    if cutoff is None:
        cutoff = semiclassical_cutoff(h)
    sigmas = np.atleast_2d(np.asarray(sigmas, dtype=float))
    coeffs = fourier_coefficients(p, 2 * cutoff)
    indices = _index_set(cutoff, p.dim)
    values = np.empty(len(sigmas))
    singular = False
    for i, s in enumerate(sigmas):
        s = np.atleast_1d(s)
        shifted = 2 * np.pi * indices + s[None, :]
        diag = h**2 * np.sum(shifted**2, axis=1) - 1.0
        matrix = -1j * eps * h * _coupling_matrix(coeffs, indices, cutoff)
        matrix[np.diag_indices_from(matrix)] += diag
        smin = min_singular_value(matrix)
        if smin < _SINGULAR_REL * np.abs(matrix).max():
            singular = True
            values[i] = np.inf
        else:
            values[i] = 1.0 / smin
    tail_floor = h**2 * (2 * np.pi * cutoff) ** 2 - 1.0
    tail = float(eps * h * p.sup_norm / tail_floor) if tail_floor > 0 else float("inf")
    return ResolventSample(
        mode="semiclassical",
        eta=1.0 / eps,
        tau=1.0 / (eps * h),
        per_sigma=values,
        norm=float(values.max()),
        cutoff=int(cutoff),
        tail_ratio=tail,
        singular=singular,
    )


def theta_conjugation_residual(
    eta: int, tau: float, state: FieldState, p: DampingProfile
) -> float:
    """Residual of the unitary-rescaling conjugation identity on the grid.

    Checks that (-Delta + m - i tau a_eta - tau^2) Theta u equals
    Theta (-eta^2 Delta + m - i tau a - tau^2) u for Theta u(x) =
    eta^{d/2} u(eta x), realized by index dilation.  ``state.u`` must be
    band-limited to |n| <= N / (4 eta) and the grid must satisfy
    N >= 16 eta.
    """
    if eta != int(eta) or eta < 1:
        raise ValueError("eta must be a positive integer")
    eta = int(eta)
    grid = state.grid
    if grid.n < 16 * eta:
        raise ValueError("grid does not resolve both frames (need N >= 16 eta)")
    norm = grid.n**grid.dim
    cu = np.fft.fftn(state.u)
    band = grid.n // (4 * eta)
    mesh = grid.freq_mesh()
    outside = np.zeros(grid.shape, dtype=bool)
    for axis in range(grid.dim):
        outside |= np.abs(mesh[axis]) > band
    if np.max(np.abs(cu[outside])) > 1e-10 * max(np.max(np.abs(cu)), 1e-300):
        raise ValueError("state is not band-limited to |n| <= N/(4 eta)")

    pts = grid.points()
    a_base = p.eval(pts)
    a_scaled = p.eval(eta * pts)
    mom0 = shifted_momentum_sq(grid, (0.0,) * grid.dim)

    def theta(f):
        idx = (np.arange(grid.n) * eta) % grid.n
        if grid.dim == 1:
            return eta ** (grid.dim / 2.0) * f[idx]
        return eta ** (grid.dim / 2.0) * f[np.ix_(idx, idx)]

    u = state.u
    lhs = (
        np.fft.ifftn(mom0 * np.fft.fftn(theta(u)))
        + (state.m - 1j * tau * a_scaled - tau**2) * theta(u)
    )
    inner = (
        eta**2 * np.fft.ifftn(mom0 * np.fft.fftn(u))
        + (state.m - 1j * tau * a_base - tau**2) * u
    )
    rhs = theta(inner)
    # relative to the compared quantities (they carry the operator scale)
    denom = max(
        np.sqrt(np.sum(np.abs(lhs) ** 2) / norm),
        np.sqrt(np.sum(np.abs(rhs) ** 2) / norm),
        1e-300,
    )
    return float(np.sqrt(np.sum(np.abs(lhs - rhs) ** 2) / norm) / denom)


def scan(plan: dict) -> list:
    """Run a deterministic resolvent scan.

    Plan keys:
      mode: "scalar", "energy" or "semiclassical"
      profile: DampingProfile; m: mass (scalar/energy modes)
      etas, taus: parameter lists (scalar/energy)
      hs, epss: parameter lists (semiclassical)
      n_sigma: sigma-grid points per axis (default 64 for d=1, 8 for d=2)
      cutoff: optional fixed truncation; cutoff_cap: optional cap on the rule

    Returns samples ordered by (eta, tau); singular fibers are flagged and
    the scan continues.
    """
    mode = plan.get("mode", "scalar")
    p = plan["profile"]
    n_sigma = plan.get("n_sigma", 64 if p.dim == 1 else 8)
    sigmas = sigma_grid(p.dim, n_sigma)
    samples = []
    if mode == "semiclassical":
        for h in sorted(plan["hs"], reverse=True):
            for eps in sorted(plan["epss"], reverse=True):
                samples.append(
                    semiclassical_inverse_norm(h, eps, sigmas, plan.get("cutoff"), p)
                )
        samples.sort(key=lambda s: (s.eta, s.tau))
        return samples

    m = plan["m"]
    cap = plan.get("cutoff_cap")
    coeff_cache: dict = {}
    for eta in sorted(plan["etas"]):
        for tau in sorted(plan["taus"]):
            cutoff = plan.get("cutoff") or truncation_cutoff(eta, tau, m)
            if cap is not None:
                cutoff = min(cutoff, cap)
            if cutoff not in coeff_cache:
                coeff_cache[cutoff] = fourier_coefficients(p, 2 * cutoff)
            coeffs = coeff_cache[cutoff]
            sample = resolvent_norm(eta, tau, sigmas, cutoff, p, m, coeffs=coeffs)
            if mode == "energy":
                en = energy_resolvent_norm(eta, tau, sigmas, cutoff, p, m, coeffs=coeffs)
                sample = ResolventSample(
                    mode="energy",
                    eta=sample.eta,
                    tau=sample.tau,
                    per_sigma=sample.per_sigma,
                    norm=sample.norm,
                    cutoff=sample.cutoff,
                    tail_ratio=sample.tail_ratio,
                    singular=sample.singular,
                    norm_energy=en,
                )
            samples.append(sample)
    return samples


def scan_csv(samples: list) -> str:
    """CSV with header mode,eta,tau,norm,norm_energy,tau_bracket_norm,bound_ratio,N,singular_flag."""
    rows = ["mode,eta,tau,norm,norm_energy,tau_bracket_norm,bound_ratio,N,singular_flag"]
    for s in samples:
        rows.append(
            f"{s.mode},{s.eta:.17g},{s.tau:.17g},{s.norm:.17g},{s.norm_energy:.17g},"
            f"{s.tau_bracket_norm:.17g},{s.bound_ratio:.17g},{s.cutoff},{int(s.singular)}"
        )
    return "\n".join(rows) + "\n"
