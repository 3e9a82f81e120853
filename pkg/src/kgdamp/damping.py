"""Periodic damping coefficients.

A damping coefficient is a bounded, non-negative, Z^d-periodic function on
R^d (d = 1 or 2), not identically zero.  This module provides a small family
of concrete profiles (constant, cosine, smoothed strip, mollified, tabulated
Fourier series), their integer rescalings x -> a(eta*x), Fourier data,
ray averages for the geometric control condition, and the construction of a
smooth minorant by mollification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DampingProfile",
    "RayAverageReport",
    "eval_profile",
    "rescale_profile",
    "fourier_coefficients",
    "ray_average",
    "gcc_infimum",
    "mollify_profile",
    "gcc_report_csv",
]

_KINDS = ("constant", "cosine", "smoothed-strip", "mollified", "tabulated-fourier")

# Fine-grid resolution used when a profile has to be sampled/convolved at
# construction time (per axis, power of two).
_FINE_1D = 8192
_FINE_2D = 512

# Relative threshold below which Fourier modes of a series-backed profile
# are dropped.
_SERIES_TOL = 1e-13


def _bump(t: np.ndarray) -> np.ndarray:
    """Unnormalized C^inf bump exp(-1/(1-t^2)) supported on |t| < 1."""
    out = np.zeros_like(t, dtype=float)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out


def _series_from_samples(samples: np.ndarray, tol_scale: float):
    """Extract significant Fourier modes from samples on a uniform grid.

    Returns (c0, ns, cs) where c0 is the (real) mean and (ns, cs) list the
    half-spectrum: one representative per conjugate pair, so that
    a(x) = c0 + 2 Re sum_k cs[k] exp(2 pi i ns[k].x).
    """
    d = samples.ndim
    shape = samples.shape
    coeffs = np.fft.fftn(samples) / samples.size
    freqs = [np.fft.fftfreq(n, 1.0 / n).astype(int) for n in shape]
    mesh = np.meshgrid(*freqs, indexing="ij")
    ns = np.stack([m.ravel() for m in mesh], axis=-1)
    cs = coeffs.ravel()

    thresh = _SERIES_TOL * max(tol_scale, 1e-300)
    keep = np.abs(cs) > thresh
    # half-spectrum: first nonzero component positive
    lead = np.zeros(len(ns), dtype=bool)
    for axis in range(d):
        prev_zero = np.ones(len(ns), dtype=bool)
        for a2 in range(axis):
            prev_zero &= ns[:, a2] == 0
        lead |= prev_zero & (ns[:, axis] > 0)
    keep &= lead

    c0 = float(np.real(cs[np.all(ns == 0, axis=1)][0]))
    return c0, ns[keep].copy(), cs[keep].copy()


def _eval_series(c0, ns, cs, x: np.ndarray) -> np.ndarray:
    """Evaluate a real trigonometric polynomial stored as a half-spectrum.

    ``x`` has shape (..., d).  1-D series along a single axis use a power
    recurrence instead of a dense complex exponential matrix.
    """
    pts = np.atleast_2d(x.reshape(-1, x.shape[-1]))
    if len(ns) == 0:
        return np.full(pts.shape[0], c0).reshape(x.shape[:-1])

    active = [a for a in range(ns.shape[1]) if np.any(ns[:, a] != 0)]
    if len(active) == 1:
        axis = active[0]
        order = np.argsort(ns[:, axis])
        n_sorted = ns[order, axis]
        c_sorted = cs[order]
        z = np.exp(2j * np.pi * pts[:, axis])
        acc = np.zeros(pts.shape[0], dtype=complex)
        zp = np.ones_like(z)
        prev = 0
        for n, c in zip(n_sorted, c_sorted):
            zp = zp * z ** (n - prev) if n - prev > 1 else zp * z
            prev = n
            acc += c * zp
        val = c0 + 2.0 * acc.real
    else:
        phase = np.exp(2j * np.pi * (pts @ ns.T))
        val = c0 + 2.0 * (phase @ cs).real
    return val.reshape(x.shape[:-1]) if x.ndim > 1 else val.reshape(x.shape[:-1])


@dataclass(frozen=True)
class DampingProfile:
    """A Z^d-periodic, bounded, non-negative damping coefficient.

    Instances are immutable; use the factory classmethods.  The ``eta``
    entry of ``params`` records accumulated integer rescalings, so the
    profile evaluates to ``base(eta * x)``.
    """

    dim: int
    kind: str
    params: dict
    sup_norm: float
    _c0: float = field(default=0.0, repr=False)
    _ns: np.ndarray = field(default=None, repr=False)
    _cs: np.ndarray = field(default=None, repr=False)

    # -- factories ---------------------------------------------------------

    @classmethod
    def constant(cls, level: float, dim: int = 1) -> "DampingProfile":
        if level <= 0:
            raise ValueError("constant profile must be positive")
        _check_dim(dim)
        return cls(dim, "constant", {"level": float(level), "eta": 1}, float(level))

    @classmethod
    def cosine(cls, mean: float = 1.0, amplitude: float = 1.0, dim: int = 1) -> "DampingProfile":
        """mean + amplitude * cos(2 pi x_1); requires mean >= |amplitude| >= 0."""
        _check_dim(dim)
        if mean < abs(amplitude) or mean <= 0:
            raise ValueError("cosine profile needs mean >= |amplitude| and mean > 0")
        params = {"mean": float(mean), "amplitude": float(amplitude), "eta": 1}
        return cls(dim, "cosine", params, float(mean + abs(amplitude)))

    @classmethod
    def smoothed_strip(
        cls, half_width: float, ramp: float, level: float = 1.0, dim: int = 2
    ) -> "DampingProfile":
        """Strips {dist(x_1, Z) < half_width} with a smooth ramp of width ``ramp``.

        The raw profile level*clamp((w + r - dist(x_1, Z))/r, 0, 1) is smoothed
        by one mollification pass of width r/2, giving a C^inf function that
        vanishes for dist(x_1, Z) >= w + r + r/4 and equals ``level`` on the
        strip interior.
        """
        _check_dim(dim)
        if not (0 < half_width < 0.5):
            raise ValueError("strip half-width must lie in (0, 1/2)")
        if ramp <= 0 or half_width + ramp >= 0.5:
            raise ValueError("ramp width must be positive with w + r < 1/2")
        xs = np.arange(_FINE_1D) / _FINE_1D
        dist = np.abs(((xs + 0.5) % 1.0) - 0.5)
        raw = level * np.clip((half_width + ramp - dist) / ramp, 0.0, 1.0)
        smoothed = _circular_mollify_1d(raw, ramp / 2.0)
        c0, ns1, cs = _series_from_samples(smoothed, level)
        ns = np.zeros((len(ns1), dim), dtype=int)
        ns[:, 0] = ns1[:, 0]
        params = {
            "half_width": float(half_width),
            "ramp": float(ramp),
            "level": float(level),
            "eta": 1,
        }
        return cls(dim, "smoothed-strip", params, float(level), c0, ns, cs)

    @classmethod
    def from_fourier(cls, table: dict, dim: int = 1) -> "DampingProfile":
        """Profile from a table {n: coefficient} (d=1) or {(n1, n2): c} (d=2).

        Only one representative per conjugate pair is needed; Hermitian
        symmetry is enforced (the function is real).  The reconstruction must
        be non-negative; it is validated on a 64^d grid.
        """
        _check_dim(dim)
        entries = {}
        for key, c in table.items():
            n = (int(key),) if np.isscalar(key) else tuple(int(k) for k in key)
            if len(n) != dim:
                raise ValueError("table key dimension mismatch")
            # canonical representative: first nonzero component positive
            flip = False
            for comp in n:
                if comp != 0:
                    flip = comp < 0
                    break
            if flip:
                n = tuple(-k for k in n)
                c = np.conj(c)
            if n in entries and not np.isclose(entries[n], c, atol=1e-12):
                raise ValueError("table breaks Hermitian symmetry")
            entries[n] = complex(c)
        c0 = entries.pop(tuple([0] * dim), 0.0)
        if abs(np.imag(c0)) > 1e-12:
            raise ValueError("mean coefficient must be real")
        ns = np.array(sorted(entries), dtype=int).reshape(len(entries), dim)
        cs = np.array([entries[tuple(n)] for n in ns], dtype=complex)
        prof = cls(dim, "tabulated-fourier", {"eta": 1}, 0.0, float(np.real(c0)), ns, cs)
        grid = _cell_grid(dim, 64)
        vals = prof._eval_raw(grid)
        if vals.min() < -1e-9:
            raise ValueError("Fourier table reconstructs to a negative function")
        if vals.max() <= 0:
            raise ValueError("profile is identically zero")
        # c0 + 2 sum|c_n| is an exact upper bound, tight for band-limited tables
        sup = float(np.real(c0) + 2.0 * np.sum(np.abs(cs)))
        return cls(dim, "tabulated-fourier", {"eta": 1}, sup, float(np.real(c0)), ns, cs)

    # -- evaluation --------------------------------------------------------

    @property
    def eta(self) -> int:
        return int(self.params.get("eta", 1))

    def eval(self, x) -> np.ndarray:
        """Evaluate at points ``x`` of shape (..., d) (or scalars for d=1)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        if self.dim == 1 and (scalar or x.shape[-1] != 1):
            x = x.reshape(x.shape + (1,))
        vals = self._eval_raw(self.eta * x)
        vals = np.clip(vals, 0.0, self.sup_norm if self.sup_norm > 0 else 0.0)
        return float(vals) if scalar else vals

    def _eval_raw(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return np.full(x.shape[:-1], self.params["level"])
        if self.kind == "cosine":
            return self.params["mean"] + self.params["amplitude"] * np.cos(
                2 * np.pi * x[..., 0]
            )
        return _eval_series(self._c0, self._ns, self._cs, x)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        params = dict(self.params)
        if self._ns is not None:
            params["series"] = {
                "c0": self._c0,
                "n": self._ns.tolist(),
                "re": np.real(self._cs).tolist(),
                "im": np.imag(self._cs).tolist(),
            }
        return json.dumps(
            {"dim": self.dim, "kind": self.kind, "params": params, "sup_norm": self.sup_norm},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "DampingProfile":
        obj = json.loads(text)
        params = dict(obj["params"])
        series = params.pop("series", None)
        if series is not None:
            ns = np.array(series["n"], dtype=int).reshape(-1, obj["dim"])
            cs = np.array(series["re"], dtype=float) + 1j * np.array(series["im"], dtype=float)
            return cls(obj["dim"], obj["kind"], params, obj["sup_norm"], series["c0"], ns, cs)
        return cls(obj["dim"], obj["kind"], params, obj["sup_norm"])


@dataclass(frozen=True)
class RayAverageReport:
    """Result of a grid scan for the infimum of ray averages <a>_T."""

    horizon: float
    n_x: int
    n_xi: int
    alpha_hat: float
    argmin_x: tuple
    argmin_xi: tuple

    def to_csv(self) -> str:
        return gcc_report_csv(self)


def _check_dim(dim: int) -> None:
    if dim not in (1, 2):
        raise ValueError("only dimensions 1 and 2 are supported")


def _cell_grid(dim: int, n: int) -> np.ndarray:
    """Cell-center sample points of the unit cell, shape (n^d, d)."""
    xs = (np.arange(n) + 0.5) / n
    if dim == 1:
        return xs[:, None]
    g1, g2 = np.meshgrid(xs, xs, indexing="ij")
    return np.stack([g1.ravel(), g2.ravel()], axis=-1)


def _circular_mollify_1d(samples: np.ndarray, radius: float) -> np.ndarray:
    """Circular convolution with a normalized bump of the given radius."""
    n = len(samples)
    xs = np.fft.fftfreq(n, 1.0 / n) / n  # signed offsets in [-1/2, 1/2)
    kernel = _bump(xs / radius)
    kernel /= kernel.sum()
    return np.real(np.fft.ifft(np.fft.fft(samples) * np.fft.fft(kernel)))


def eval_profile(p: DampingProfile, x) -> np.ndarray:
    """Evaluate ``p`` at ``x`` (periodic extension; values in [0, sup_norm])."""
    return p.eval(x)


def rescale_profile(p: DampingProfile, eta: int) -> DampingProfile:
    """Return the rescaled profile x -> p(eta * x).

    ``eta`` must be a positive integer so the result is still 1-periodic on
    the unit cell.
    """
    if eta != int(eta) or eta < 1:
        raise ValueError("rescaling factor must be a positive integer")
    eta = int(eta)
    if eta == 1:
        return p
    params = dict(p.params)
    params["eta"] = p.eta * eta
    return DampingProfile(p.dim, p.kind, params, p.sup_norm, p._c0, p._ns, p._cs)


def fourier_coefficients(p: DampingProfile, cutoff: int) -> np.ndarray:
    """Fourier coefficients a_hat(n) for n in [-N, N]^d.

    Computed by the discrete Fourier transform of samples on a grid of at
    least 4(2N+1) points per axis.  Returns an array of shape (2N+1,)^d with
    a_hat(n) at index n + N along each axis.

    Rescaled profiles are handled structurally: a(eta x) has a_hat(n) equal
    to the base coefficient at n/eta when eta divides n and 0 otherwise,
    which avoids sampling the oscillations at rate eta.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    eta = p.eta
    if eta > 1:
        base = DampingProfile(p.dim, p.kind, {**p.params, "eta": 1}, p.sup_norm, p._c0, p._ns, p._cs)
        inner_cut = max(1, cutoff // eta)
        inner = fourier_coefficients(base, inner_cut)
        out = np.zeros((2 * cutoff + 1,) * p.dim, dtype=complex)
        rng = np.arange(-(cutoff // eta), cutoff // eta + 1)
        if p.dim == 1:
            out[eta * rng + cutoff] = inner[rng + inner_cut]
        else:
            out[np.ix_(eta * rng + cutoff, eta * rng + cutoff)] = inner[
                np.ix_(rng + inner_cut, rng + inner_cut)
            ]
        return out
    if p._ns is not None:
        # series-backed kinds carry their exact coefficients
        out = np.zeros((2 * cutoff + 1,) * p.dim, dtype=complex)
        center = (cutoff,) * p.dim
        out[center] = p._c0
        for n, c in zip(p._ns, p._cs):
            if np.all(np.abs(n) <= cutoff):
                out[tuple(n + cutoff)] += c
                out[tuple(-n + cutoff)] += np.conj(c)
        return out
    n_min = 4 * (2 * cutoff + 1)
    m = 64
    while m < n_min:
        m *= 2
    if p.dim == 1:
        xs = (np.arange(m) / m)[:, None]
        samples = p.eval(xs)
        coeffs = np.fft.fft(samples) / m
        idx = (np.arange(-cutoff, cutoff + 1)) % m
        return coeffs[idx]
    xs = np.arange(m) / m
    g1, g2 = np.meshgrid(xs, xs, indexing="ij")
    samples = p.eval(np.stack([g1, g2], axis=-1))
    coeffs = np.fft.fft2(samples) / m**2
    idx = (np.arange(-cutoff, cutoff + 1)) % m
    return coeffs[np.ix_(idx, idx)]


def ray_average(p: DampingProfile, horizon: float, x, xi) -> float:
    """Average of the damping along the ray t -> x + 2 t xi over [0, T].

    ``xi`` must be a nonzero direction; it is normalized to the unit sphere.
    Composite midpoint quadrature with max(512, ceil(64 T eta)) nodes.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    norm = np.linalg.norm(xi)
    if norm < 1e-14:
        raise ValueError("direction must be nonzero")
    xi = xi / norm
    n_q = max(512, int(np.ceil(64 * horizon * p.eta)))
    ts = (np.arange(n_q) + 0.5) * horizon / n_q
    pts = x[None, :] + 2.0 * ts[:, None] * xi[None, :]
    return float(np.mean(p.eval(pts)))


def gcc_infimum(
    p: DampingProfile, horizon: float, n_x: int = 64, n_xi: int | None = None
) -> RayAverageReport:
    """Scan the infimum of ray averages over an (x, xi) grid.

    x runs over cell centers of an n_x^d grid; xi over {-1, +1} (d=1) or
    n_xi equispaced angles (d=2).  The reported infimum approximates the true
    one from above.
    """
    if n_x < 2:
        raise ValueError("n_x must be >= 2")
    if n_xi is None:
        n_xi = 2 if p.dim == 1 else 64
    if p.dim == 1:
        dirs = np.array([[-1.0], [1.0]])
    else:
        if n_xi < 2:
            raise ValueError("n_xi must be >= 2")
        angles = 2 * np.pi * np.arange(n_xi) / n_xi
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)

    pts = _cell_grid(p.dim, n_x)
    n_q = max(512, int(np.ceil(64 * horizon * p.eta)))
    ts = (np.arange(n_q) + 0.5) * horizon / n_q

    best = np.inf
    best_x = pts[0]
    best_xi = dirs[0]
    for xi in dirs:
        rays = pts[:, None, :] + 2.0 * ts[None, :, None] * xi[None, None, :]
        avgs = p.eval(rays).mean(axis=1)
        k = int(np.argmin(avgs))
        if avgs[k] < best:
            best = float(avgs[k])
            best_x = pts[k]
            best_xi = xi
    return RayAverageReport(
        horizon=float(horizon),
        n_x=int(n_x),
        n_xi=len(dirs),
        alpha_hat=max(best, 0.0),
        argmin_x=tuple(float(v) for v in best_x),
        argmin_xi=tuple(float(v) for v in best_xi),
    )


def mollify_profile(p: DampingProfile, alpha: float, delta: float) -> DampingProfile:
    """Smooth minorant: mollify max(0, a - alpha/4) with a bump of radius delta.

    Returns a C^inf profile a_inf with 0 <= a_inf <= a and
    ||a - a_inf||_inf <= alpha/2 + omega_a(delta).  If alpha/4 exceeds the sup
    of ``a`` the result is the zero profile (reported, not an error).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not (0 < delta < 0.25):
        raise ValueError("delta must lie in (0, 1/4)")

    if p.dim == 1:
        m = _FINE_1D
        while m < 64 / delta and m < 2**17:
            m *= 2
        xs = (np.arange(m) / m)[:, None]
        clipped = np.maximum(p.eval(xs) - alpha / 4.0, 0.0)
        if clipped.max() <= 0:
            return _zero_mollified(p, alpha, delta)
        smoothed = _circular_mollify_1d(clipped, delta)
        c0, ns, cs = _series_from_samples(smoothed, p.sup_norm)
    else:
        m = _FINE_2D
        while m < 16 / delta and m < 2048:
            m *= 2
        xs = np.arange(m) / m
        g1, g2 = np.meshgrid(xs, xs, indexing="ij")
        clipped = np.maximum(p.eval(np.stack([g1, g2], axis=-1)) - alpha / 4.0, 0.0)
        if clipped.max() <= 0:
            return _zero_mollified(p, alpha, delta)
        offs = np.fft.fftfreq(m, 1.0 / m) / m
        o1, o2 = np.meshgrid(offs, offs, indexing="ij")
        kernel = _bump(np.sqrt(o1**2 + o2**2) / delta)
        kernel /= kernel.sum()
        smoothed = np.real(np.fft.ifft2(np.fft.fft2(clipped) * np.fft.fft2(kernel)))
        c0, ns, cs = _series_from_samples(smoothed, p.sup_norm)

    sup = float(smoothed.max() * (1 + 1e-9) + 1e-12)
    params = {"alpha": float(alpha), "delta": float(delta), "base_kind": p.kind, "eta": p.eta}
    return DampingProfile(p.dim, "mollified", params, sup, c0, ns, cs)


def _zero_mollified(p: DampingProfile, alpha: float, delta: float) -> DampingProfile:
    params = {"alpha": float(alpha), "delta": float(delta), "base_kind": p.kind, "eta": p.eta}
    return DampingProfile(
        p.dim, "mollified", params, 0.0, 0.0, np.zeros((0, p.dim), dtype=int), np.zeros(0, complex)
    )


def gcc_report_csv(report: RayAverageReport) -> str:
    """CSV serialization with header T,n_x,n_xi,alpha_hat,argmin_x...,argmin_xi..."""
    d = len(report.argmin_x)
    head = ["T", "n_x", "n_xi", "alpha_hat"]
    head += [f"argmin_x{i + 1}" for i in range(d)]
    head += [f"argmin_xi{i + 1}" for i in range(d)]
    row = [
        f"{report.horizon:.17g}",
        str(report.n_x),
        str(report.n_xi),
        f"{report.alpha_hat:.17g}",
    ]
    row += [f"{v:.17g}" for v in report.argmin_x]
    row += [f"{v:.17g}" for v in report.argmin_xi]
    return ",".join(head) + "\n" + ",".join(row) + "\n"
