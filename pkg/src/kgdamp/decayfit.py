"""Rate extraction and bound verification from decay records.

Two detectors: an exponential fit of log E(t) over a configurable window,
and a realized constant for the polynomial amplitude bound

    sqrt(E(t)) <= c (1+t)^{-1/2} (|u0|_{H1} + |u1| + (|Lap u0| + |grad u1|) / eta^2).

Theorems of this type bound amplitudes (norms) while the records store the
energy E (a squared norm), so all conversions carry an explicit factor 1/2
on log-slopes and square roots on ratios.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from kgdamp.evolve import DecayRecord

__all__ = [
    "FitResult",
    "fit_exponential",
    "verify_power_bound",
    "uniformity_report",
    "fits_csv",
]


@dataclass(frozen=True)
class FitResult:
    """Fitted decay model for one record.

    For model "exponential", rate is the amplitude rate gamma and amplitude
    the amplitude prefactor C in |u| ~ C e^{-gamma t}.  For model
    "power-bound", rate holds the realized bound constant c_hat and
    amplitude is unused (nan).
    """

    model: str
    rate: float
    amplitude: float
    r_squared: float
    window: tuple
    eta: int = 1

    def __post_init__(self):
        if self.model not in ("exponential", "power-bound"):
            raise ValueError(f"unknown fit model: {self.model}")
        if self.model == "exponential" and self.rate <= 0:
            raise ValueError("exponential fit requires a positive rate")
        if not (0.0 <= self.r_squared <= 1.0 + 1e-12):
            raise ValueError("R^2 must lie in [0, 1]")


def fit_exponential(record: DecayRecord, window: tuple = (0.1, 1.0)) -> FitResult:
    """Least-squares fit of log E vs t over a fractional window of the record.

    Returns the amplitude rate gamma = -slope/2 (E is a squared norm) and
    the amplitude prefactor C = sqrt(exp(intercept)).
    """
    lo, hi = window
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError("window must be a fraction pair with 0 <= lo < hi <= 1")
    t_lo = record.times[0] + lo * (record.times[-1] - record.times[0])
    t_hi = record.times[0] + hi * (record.times[-1] - record.times[0])
    mask = (record.times >= t_lo) & (record.times <= t_hi)
    if mask.sum() < 10:
        raise ValueError("need at least 10 samples in the fit window")
    e = record.energies[mask]
    t = record.times[mask]
    if np.any(e <= 0):
        raise ValueError("energies must be positive for a log fit")

    log_e = np.log(e)
    slope, intercept = np.polyfit(t, log_e, 1)
    fitted = slope * t + intercept
    ss_res = float(np.sum((log_e - fitted) ** 2))
    ss_tot = float(np.sum((log_e - log_e.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(
        model="exponential",
        rate=float(-slope / 2.0),
        amplitude=float(np.sqrt(np.exp(intercept))),
        r_squared=r2,
        window=(float(lo), float(hi)),
        eta=record.eta,
    )


def verify_power_bound(record: DecayRecord) -> FitResult:
    """Realized constant of the (1+t)^{-1/2} amplitude bound.

    c_hat = max over samples of sqrt(E_k (1 + t_k)) divided by the data
    norm |u0|_{H1} + |u1| + (|Lap u0| + |grad u1|) / eta^2.  The bound
    itself asserts this is finite uniformly in eta and data; we report the
    realized value.
    """
    needed = ("u0_h1", "u1_l2", "lap_u0_l2", "grad_u1_l2")
    if any(k not in record.input_norms for k in needed):
        raise ValueError("record is missing input norms for the power bound")
    norms = record.input_norms
    denom = norms["u0_h1"] + norms["u1_l2"] + (norms["lap_u0_l2"] + norms["grad_u1_l2"]) / record.eta**2
    if denom <= 0:
        raise ValueError("data norms vanish; bound constant undefined")
    ratios = np.sqrt(record.energies * (1.0 + record.times)) / denom
    return FitResult(
        model="power-bound",
        rate=float(np.max(ratios)),
        amplitude=float("nan"),
        r_squared=1.0,
        window=(0.0, 1.0),
        eta=record.eta,
    )


def uniformity_report(fits: list) -> dict:
    """Cross-eta spread of fitted rates/constants: {min, max, ratio, per_eta}.

    ``fits`` is a list of (eta, FitResult).  No threshold judgment is made
    here; acceptance criteria apply their own.
    """
    if len(fits) < 2:
        raise ValueError("need at least two fits for a uniformity report")
    per_eta = {int(eta): float(fr.rate) for eta, fr in fits}
    values = np.array(list(per_eta.values()))
    return {
        "min": float(values.min()),
        "max": float(values.max()),
        "ratio": float(values.max() / values.min()),
        "per_eta": per_eta,
    }


def fits_csv(fits: list) -> str:
    """CSV with header eta,model,gamma_or_c,C,r2,window_lo,window_hi."""
    rows = ["eta,model,gamma_or_c,C,r2,window_lo,window_hi"]
    for eta, fr in fits:
        rows.append(
            f"{int(eta)},{fr.model},{fr.rate:.17g},{fr.amplitude:.17g},"
            f"{fr.r_squared:.17g},{fr.window[0]:.17g},{fr.window[1]:.17g}"
        )
    return "\n".join(rows) + "\n"
