"""Single-source compression with decoder side information.

The degenerate configuration with one active encoder (X compressed, Y known
at the decoder, the other two sources and the second side variable constant)
reduces the region machinery to the classical rate-distortion problem with
decoder side information:

    R(D) = min { I(X; W) - I(W; Y) :  p(w|x),  E d(X, xhat(W, Y)) <= D }.

Two independent evaluation routes are provided: a vectorized exhaustive grid
sweep over channels p(w|x), and — for the doubly symmetric binary case with
Hamming distortion (X fair, Y the output of a binary symmetric channel) — the
closed-form solution: the lower convex envelope of

    g(d) = h(p*d) - h(d)        (p*d = p(1-d) + d(1-p), h binary entropy)

with the zero-rate point (p, 0); the envelope switches from the curve to a
straight line at the point d_c whose tangent passes through (p, 0).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, InvalidQuery
from .optimizer import (
    FEASIBILITY_SLACK,
    MAX_GRID_CHANNELS,
    SWEEP_CHUNK,
    SearchConfig,
    _sweep_chunk,
    count_grid_channels,
    grid_rows,
)
from .probability import Alphabet, JointPMF
from .sources import DistortionMeasure, SourceModel, hamming_distortion


def binary_entropy(x: float | np.ndarray) -> float | np.ndarray:
    """h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0."""
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0)), 0.0)
        t -= np.where(x < 1, (1 - x) * np.log2(np.where(x < 1, 1 - x, 1.0)), 0.0)
    return float(t) if t.ndim == 0 else t


def crossover(p: float, d: float) -> float:
    """Binary convolution p*d = p(1-d) + d(1-p)."""
    return p * (1.0 - d) + d * (1.0 - p)


@dataclass(frozen=True)
class BinaryClosedForm:
    """Closed-form rate function for the doubly symmetric binary case.

    p is the side-information crossover probability; d_critical is where the
    lower convex envelope leaves the curve g(d) = h(p*d) - h(d) for the
    straight line into (p, 0).
    """

    p: float
    d_critical: float

    def curve(self, d: float) -> float:
        return float(binary_entropy(crossover(self.p, d)) - binary_entropy(d))

    def rate(self, d: float) -> float:
        if d < 0:
            raise InvalidQuery(f"distortion {d} is negative")
        if self.p <= 0.0:
            return 0.0
        if d >= self.p:
            return 0.0
        if d <= self.d_critical:
            return max(self.curve(d), 0.0)
        g_c = self.curve(self.d_critical)
        return float(g_c * (self.p - d) / (self.p - self.d_critical))


def _curve_slope(p: float, d: float) -> float:
    u = crossover(p, d)
    return (1.0 - 2.0 * p) * math.log2((1.0 - u) / u) - math.log2((1.0 - d) / d)


def binary_closed_form(p: float) -> BinaryClosedForm:
    """Solve for the envelope switch point of the binary closed form."""
    if not 0.0 <= p <= 0.5:
        raise InvalidQuery(f"side-information crossover {p} outside [0, 0.5]")
    if p <= 1e-12:
        return BinaryClosedForm(p=p, d_critical=0.0)

    def tangent_gap(d: float) -> float:
        g = binary_entropy(crossover(p, d)) - binary_entropy(d)
        return float(g + _curve_slope(p, d) * (p - d))

    lo, hi = 1e-9, p - 1e-9
    if tangent_gap(hi) <= 0.0:
        # Tangent never reaches (p, 0) from inside: the curve is its own envelope.
        return BinaryClosedForm(p=p, d_critical=p)
    d_c = float(brentq(tangent_gap, lo, hi, xtol=1e-14))
    return BinaryClosedForm(p=p, d_critical=d_c)


def closed_form_parameters(p_xy: JointPMF, measure: DistortionMeasure,
                           tol: float = 1e-9) -> float | None:
    """Crossover probability when the closed form applies, else None.

    Applicability: both alphabets binary, X uniform, the side channel
    symmetric, and the distortion matrix 0/1 (Hamming).
    """
    if len(p_xy.axes) != 2:
        return None
    if p_xy.axes[0].size != 2 or p_xy.axes[1].size != 2:
        return None
    probs = p_xy.probs
    px = probs.sum(axis=1)
    if abs(px[0] - 0.5) > tol:
        return None
    flip0 = probs[0, 1] / px[0]
    flip1 = probs[1, 0] / px[1]
    if abs(flip0 - flip1) > tol:
        return None
    if measure.matrix.shape != (2, 2):
        return None
    if not np.allclose(measure.matrix, 1.0 - np.eye(2), atol=tol):
        return None
    p = float(min((flip0 + flip1) / 2.0, 1.0 - (flip0 + flip1) / 2.0))
    return p


def zero_rate_distortion(p_xy: JointPMF, measure: DistortionMeasure) -> float:
    """Expected distortion of the best decoder that sees only Y."""
    probs = p_xy.probs  # (x, y)
    scores = measure.matrix.T @ probs  # (recon, y)
    return float(scores.min(axis=0).sum())


def default_distortion_levels(p_xy: JointPMF, measure: DistortionMeasure,
                              step: float = 0.01) -> tuple[float, ...]:
    d_max = zero_rate_distortion(p_xy, measure)
    n = int(math.floor(d_max / step + 1e-9))
    return tuple(round(i * step, 9) for i in range(n + 1)) + (round(d_max, 9),)


def wyner_ziv_reduction(
    p_xy: JointPMF,
    measure: DistortionMeasure | None = None,
    cfg: SearchConfig | None = None,
    distortion_levels: tuple[float, ...] | None = None,
) -> list[tuple[float, float]]:
    """Grid-swept rate-distortion points for one source with side information.

    For every requested distortion level D the sweep reports the smallest
    I(X; W) - I(W; Y) over grid channels whose Bayes decoder (observing W and
    Y) meets D; levels no channel can meet are omitted.  Results are (D, R)
    pairs sorted by D.
    """
    if len(p_xy.axes) != 2:
        raise InvalidQuery(f"side-information model needs exactly two axes, got {p_xy.names}")
    x_alpha, y_alpha = p_xy.axes
    if measure is None:
        measure = hamming_distortion(x_alpha)
    if measure.source.symbols != x_alpha.symbols:
        raise ConfigError("distortion measure does not match the source alphabet")
    if cfg is None:
        cfg = SearchConfig(distortion_targets=(0.0, 0.0, 0.0))
    steps = cfg.steps()
    w_size = (cfg.w_alphabet_sizes[0] if cfg.w_alphabet_sizes is not None
              else x_alpha.size + 1)
    if w_size < 1:
        raise ConfigError("auxiliary alphabet size must be >= 1")
    if distortion_levels is None:
        distortion_levels = default_distortion_levels(p_xy, measure)
    levels = sorted(set(float(d) for d in distortion_levels))
    if any(d < 0 for d in levels):
        raise ConfigError("distortion levels must be nonnegative")

    n_channels = count_grid_channels(x_alpha.size, w_size, steps)
    if n_channels > MAX_GRID_CHANNELS:
        raise ConfigError(
            f"grid would enumerate {n_channels} channels, above the cap of {MAX_GRID_CHANNELS}"
        )
    rows = grid_rows(steps, w_size)
    pxy1 = p_xy.probs[:, :, None]  # treat Y as the first side axis, constant second

    def eval_span(span: tuple[int, int]) -> np.ndarray:
        lo, hi = span
        rate, dist = _sweep_chunk(pxy1, rows, x_alpha.size, lo, hi, measure)
        rate = np.maximum(rate, 0.0)
        mins = np.full(len(levels), np.inf)
        order = np.argsort(dist, kind="stable")
        sorted_dist = dist[order]
        running = np.minimum.accumulate(rate[order])
        for j, level in enumerate(levels):
            k = np.searchsorted(sorted_dist, level + FEASIBILITY_SLACK, side="right")
            if k > 0:
                mins[j] = running[k - 1]
        return mins

    spans = [(lo, min(lo + SWEEP_CHUNK, n_channels)) for lo in range(0, n_channels, SWEEP_CHUNK)]
    if cfg.threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(eval_span, spans))
    else:
        parts = [eval_span(s) for s in spans]
    best = np.minimum.reduce(parts)
    return [(levels[j], float(best[j])) for j in range(len(levels)) if np.isfinite(best[j])]


def embed_two_variable_model(p_xy: JointPMF) -> SourceModel:
    """Lift a two-variable joint into the canonical five-axis setting.

    X becomes X1 and Y becomes Z; X2, X3, and F are single-symbol constants.
    The embedded joint factorizes as a tree model, so the full frontier
    machinery applies with encoders 2 and 3 carrying zero rate.
    """
    if len(p_xy.axes) != 2:
        raise InvalidQuery(f"expected a two-axis joint, got axes {p_xy.names}")
    x_alpha, y_alpha = p_xy.axes
    const = ("0",)
    axes = (
        Alphabet("X1", x_alpha.symbols),
        Alphabet("X2", const),
        Alphabet("X3", const),
        Alphabet("Z", y_alpha.symbols),
        Alphabet("F", const),
    )
    probs = p_xy.probs[:, None, None, :, None]
    return SourceModel(JointPMF(axes, probs))
