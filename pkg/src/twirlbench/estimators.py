"""Decay fitting, infidelity estimators, and error bounds.

The interleaved-gate infidelity is estimated from a reference decay and an
interleaved decay.  Three uncertainty statements accompany it: a bootstrap
statistical interval, a systematic interval from the trace inequality on
composed channels, and (optionally) a purity-benchmarking interval that
tightens as the reference noise loses coherence.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from . import streams
from .channels import depolarizing_from_infidelity, infidelity_from_depolarizing
from .engine import DecayPoint, ShotRecord
from .protocols import ProtocolSpec, TwirlGroup

__all__ = [
    "FitFailureError",
    "IncompleteDataError",
    "InconsistentMeasurementsError",
    "DecayFit",
    "InfidelityEstimate",
    "UnitarityEstimate",
    "XrbBounds",
    "fit_decay",
    "fit_per_pauli",
    "protocol_infidelity",
    "interleaved_estimate_ratio",
    "interleaved_estimate_irb",
    "systematic_bounds",
    "xrb_bounds",
    "unitarity_from_xrb",
    "values_from_records",
    "bootstrap_ci",
    "STDERR_FLOOR",
]

STDERR_FLOOR = 1e-4


class FitFailureError(RuntimeError):
    """Nonlinear fit failed to converge; carries the residuals seen."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class IncompleteDataError(ValueError):
    """Not enough decay data for the requested infidelity combination."""


class InconsistentMeasurementsError(ValueError):
    """Measured decays and unitarity are statistically impossible together."""


@dataclass
class DecayFit:
    model: str  # "ApB" or "A_only"
    params: dict
    cov: np.ndarray
    reduced_chi2: float
    residuals: np.ndarray

    @property
    def p(self) -> float:
        return self.params["p"]

    @property
    def p_stderr(self) -> float:
        names = list(self.params)
        return float(np.sqrt(self.cov[names.index("p"), names.index("p")]))


@dataclass
class InfidelityEstimate:
    epsilon: float
    method: str  # "ratio" or "irb"
    stat_low: float | None = None
    stat_high: float | None = None
    sys_low: float | None = None
    sys_high: float | None = None
    xrb_low: float | None = None
    xrb_high: float | None = None

    @property
    def unphysical_negative(self) -> bool:
        return self.epsilon < 0.0


@dataclass
class UnitarityEstimate:
    u: float
    stderr: float
    amplitude: float
    fit: DecayFit = field(repr=False, default=None)


@dataclass(frozen=True)
class XrbBounds:
    p_low: float
    p_high: float
    eps_low: float
    eps_high: float


def _select(points: list[DecayPoint], label: str) -> list[DecayPoint]:
    sel = sorted((q for q in points if q.label == label), key=lambda q: q.depth)
    if not sel:
        raise IncompleteDataError(f"no decay points with label {label!r}")
    return sel


def fit_decay(
    points: list[DecayPoint],
    model: str = "ApB",
    baseline_guess: float = 0.25,
) -> DecayFit:
    """Weighted nonlinear fit of A p^m (+ B) to one decay curve.

    Weights come from the recorded standard errors with a floor of
    ``STDERR_FLOOR`` so exact-mode points (zero variance) remain usable.
    """
    points = sorted(points, key=lambda q: q.depth)
    ms = np.array([q.depth for q in points], dtype=float)
    ys = np.array([q.mean for q in points])
    sig = np.maximum([q.stderr for q in points], STDERR_FLOOR)
    n_params = 3 if model == "ApB" else 2
    if len(set(ms)) < n_params:
        raise IncompleteDataError(
            f"{model} fit needs at least {n_params} distinct depths, got {len(set(ms))}"
        )

    # log-linear initial guess on the baseline-subtracted means
    b0 = 0.0 if model == "A_only" else baseline_guess
    shifted = np.maximum(ys - b0, 1e-6)
    slope, intercept = np.polyfit(ms, np.log(shifted), 1)
    p0_guess = float(np.clip(np.exp(slope), 1e-3, 2.0))
    a_guess = float(np.clip(np.exp(intercept), -0.1, 1.1))

    if model == "ApB":
        def f(m, a, p, b):
            return a * p**m + b

        guess = [a_guess, p0_guess, b0]
        bounds = ([-0.1, -np.inf, -0.1], [1.1, np.inf, 1.1])
        names = ["A", "p", "B"]
    elif model == "Ap_fixedB":
        def f(m, a, p):
            return a * p**m + b0

        guess = [a_guess, p0_guess]
        bounds = ([-0.1, -np.inf], [1.1, np.inf])
        names = ["A", "p"]
    elif model == "A_only":
        def f(m, a, p):
            return a * p**m

        guess = [a_guess, p0_guess]
        bounds = ([-0.1, -np.inf], [1.1, np.inf])
        names = ["A", "p"]
    else:
        raise ValueError(f"unknown fit model {model!r}")

    try:
        popt, pcov = curve_fit(
            f, ms, ys, p0=guess, sigma=sig, absolute_sigma=True, bounds=bounds,
            maxfev=20000,
        )
    except RuntimeError as exc:
        raise FitFailureError(str(exc), residuals=ys - f(ms, *guess)) from exc
    resid = ys - f(ms, *popt)
    dof = max(len(ms) - len(popt), 1)
    chi2 = float(np.sum((resid / sig) ** 2)) / dof
    return DecayFit(model, dict(zip(names, popt)), pcov, chi2, resid)


def fit_per_pauli(points: list[DecayPoint]) -> dict[str, DecayFit]:
    """One amplitude-only exponential per tracked-Pauli label."""
    labels = sorted({q.label for q in points})
    return {lab: fit_decay(_select(points, lab), model="A_only") for lab in labels}


def protocol_infidelity(fits, group: TwirlGroup, interleaved: bool = False) -> float:
    """Process infidelity of the averaged protocol channel from fitted decays.

    ``fits`` is a single :class:`DecayFit` for the Haar/Clifford protocols
    and the interleaved local-Clifford protocol, a dict with keys
    ``marginal_a``/``marginal_b`` for the local-Clifford reference, and a
    dict of 15 per-Pauli fits for the Pauli protocol.
    """
    group = TwirlGroup(group)
    if group in (TwirlGroup.HAAR, TwirlGroup.CLIFFORD) or (
        group is TwirlGroup.LOCAL_CLIFFORD and interleaved
    ):
        return infidelity_from_depolarizing(fits.p, 4)
    if group is TwirlGroup.LOCAL_CLIFFORD:
        try:
            pa, pb = fits["marginal_a"].p, fits["marginal_b"].p
        except (KeyError, TypeError):
            raise IncompleteDataError(
                "local-Clifford reference needs marginal_a and marginal_b fits"
            ) from None
        return 1.0 - (1.0 + 3.0 * pa) * (1.0 + 3.0 * pb) / 16.0
    if group is TwirlGroup.PAULI:
        if len(fits) != 15:
            raise IncompleteDataError(
                f"Pauli protocol needs 15 per-Pauli decays, got {len(fits)}"
            )
        return 1.0 - (1.0 + sum(f.p for f in fits.values())) / 16.0
    raise ValueError(f"unknown group {group}")


def interleaved_estimate_ratio(eps_ef: float, eps_e: float) -> float:
    """1 - (1 - eps_EF)/(1 - eps_E); may be negative (reported unclamped)."""
    if eps_e >= 1.0:
        raise ValueError(f"reference infidelity must be < 1, got {eps_e}")
    return 1.0 - (1.0 - eps_ef) / (1.0 - eps_e)


def interleaved_estimate_irb(p_ef: float, p_e: float, d: int = 4) -> float:
    """(d^2-1)/d^2 * (1 - p_EF/p_E), the classic interleaved-RB form."""
    if p_e == 0.0:
        raise ValueError("reference decay parameter must be nonzero")
    d2 = d * d
    return (d2 - 1) / d2 * (1.0 - p_ef / p_e)


def _clip_unit(x: float, name: str) -> float:
    if not 0.0 <= x <= 1.0:
        warnings.warn(
            f"{name}={x:.4g} outside [0, 1]; clipping for the systematic bound",
            RuntimeWarning,
            stacklevel=3,
        )
        return float(np.clip(x, 0.0, 1.0))
    return float(x)


def systematic_bounds(eps_ef: float, eps_e: float) -> tuple[float, float]:
    """Guaranteed interval for the interleaved-gate process infidelity.

    center = eps_EF + eps_E - 2 eps_EF eps_E,
    half-width = 2 sqrt((1-eps_EF)(1-eps_E) eps_EF eps_E).
    """
    eps_ef = _clip_unit(eps_ef, "eps_EF")
    eps_e = _clip_unit(eps_e, "eps_E")
    center = eps_ef + eps_e - 2.0 * eps_ef * eps_e
    half = 2.0 * np.sqrt((1.0 - eps_ef) * (1.0 - eps_e) * eps_ef * eps_e)
    return float(center - half), float(center + half)


def xrb_bounds(p_xy: float, p_x: float, u_x: float, tol: float = 1e-9) -> XrbBounds:
    """Interval on the interleaved gate's decay/infidelity from unitarity.

    |p(Y) - p(XY) p(X) / u(X)| <= sqrt(1 - p(X)^2/u(X)) sqrt(1 - p(XY)^2/u(X)).
    Requires u(X) >= p(X)^2 and u(X) >= p(XY)^2, which hold for any physical
    channel; measured violations beyond ``tol`` are surfaced as errors.
    """
    for name, val in (("p_X", p_x), ("p_XY", p_xy)):
        if u_x < val * val - tol:
            raise InconsistentMeasurementsError(
                f"unitarity {u_x:.6g} < {name}^2 = {val * val:.6g}: "
                "measurements are mutually inconsistent"
            )
    center = p_xy * p_x / u_x
    half = np.sqrt(max(1.0 - p_x**2 / u_x, 0.0)) * np.sqrt(
        max(1.0 - p_xy**2 / u_x, 0.0)
    )
    p_low, p_high = center - half, center + half
    # larger p means smaller infidelity, so the interval flips
    return XrbBounds(
        p_low=float(p_low),
        p_high=float(p_high),
        eps_low=infidelity_from_depolarizing(p_high, 4),
        eps_high=infidelity_from_depolarizing(p_low, 4),
    )


def unitarity_from_xrb(points: list[DecayPoint]) -> UnitarityEstimate:
    """Fit the squared-Bloch-norm decay A u^(m-1) of purity circuits."""
    sel = _select(points, "purity")
    if len({q.depth for q in sel}) < 3:
        raise IncompleteDataError("unitarity fit needs at least 3 depths")
    shifted = [DecayPoint(q.depth - 1, q.label, q.mean, q.stderr, q.n) for q in sel]
    fit = fit_decay(shifted, model="A_only")
    return UnitarityEstimate(
        u=fit.p, stderr=fit.p_stderr, amplitude=fit.params["A"], fit=fit
    )


# ---------------------------------------------------------------------------
# bootstrap


def values_from_records(
    spec: ProtocolSpec, records: list[ShotRecord]
) -> dict[tuple[int, str], np.ndarray]:
    """Per-circuit contribution values grouped by (depth, label).

    Reverses the aggregation the engine performs, so resampled decay points
    can be rebuilt from raw shots.
    """
    marginals = spec.group is TwirlGroup.LOCAL_CLIFFORD and spec.interleaved is None
    groups: dict[tuple[int, str], list[float]] = {}

    def add(depth, label, value):
        groups.setdefault((depth, label), []).append(value)

    for r in records:
        if spec.group is TwirlGroup.PAULI:
            add(r.depth, r.label, float(r.sign * r.outcome))
        else:
            add(r.depth, "survival", 1.0 if r.outcome == 0 else 0.0)
            if marginals:
                add(r.depth, "marginal_a", 1.0 if r.outcome in (0, 1) else 0.0)
                add(r.depth, "marginal_b", 1.0 if r.outcome in (0, 2) else 0.0)
    return {k: np.asarray(v) for k, v in groups.items()}


def _resampled_points(value_groups, rng) -> list[DecayPoint]:
    points = []
    for (depth, label), vals in sorted(value_groups.items()):
        n = vals.size
        pick = vals[rng.integers(0, n, size=n)]
        var = pick.var(ddof=1) if n > 1 else 0.0
        points.append(
            DecayPoint(depth, label, float(pick.mean()), float(np.sqrt(var / n)), n)
        )
    return points


def bootstrap_ci(
    value_group_sets: list[dict],
    statistic,
    n_resamples: int = 1000,
    seed: int = 0,
    alpha: float = 0.05,
) -> tuple[float, float]:
    """Percentile bootstrap CI for a statistic of several experiments.

    ``value_group_sets`` holds one dict per experiment (see
    :func:`values_from_records`); ``statistic`` maps the corresponding lists
    of resampled decay points to a real number.  Resample ``b`` draws from a
    stream keyed by (seed, "bootstrap", b), so runs are order-independent.
    """
    samples = np.empty(n_resamples)
    for b in range(n_resamples):
        rng = streams.stream(seed, "bootstrap", b)
        resampled = [_resampled_points(vg, rng) for vg in value_group_sets]
        samples[b] = statistic(*resampled)
    lo, hi = np.percentile(samples, [100 * alpha / 2, 100 * (1 - alpha / 2)])
    return float(lo), float(hi)
