"""Grid search over test channels: rate-distortion frontiers and oracles.

The searcher enumerates every row-stochastic channel whose entries are
multiples of a grid step, evaluates feasibility with Bayes-optimal decoders,
and minimizes one of four objectives over the achievable region.  On
tree-structured sources the region collapses per encoder, so the sweep runs
independently per encoder (three small sweeps instead of their product); on
general sources the full triple product is enumerated.  An optional dyadic
refinement stage perturbs the incumbent's channel rows by +-step/2^k.

Everything is deterministic: channels are enumerated in lexicographic
composition order, ties within 1e-9 of the optimum are kept, deduplicated by
rounded rate triple (first by enumeration order), and Pareto-pruned.
Chunked evaluation is thread-parallel; chunk results are merged in grid
order, so the outcome does not depend on scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product as iter_product
from typing import Iterator, Sequence

import numpy as np
from scipy.special import xlogy

from .errors import ConfigError
from .probability import Alphabet, ConditionalPMF, channel, marginalize
from .region import (
    FORM_INNER,
    FORM_TREE_COLLAPSED,
    RateRegionBounds,
    RateTriple,
    inner_bound,
    min_sum_rate_point,
    tree_collapsed_bounds,
)
from .sources import (
    DistortionMeasure,
    SourceModel,
    TestChannelTriple,
    expected_distortion,
    extend_with_test_channels,
    hamming_distortion,
    is_tree_model,
    optimal_decoder,
    test_channel,
)

MAX_GRID_CHANNELS = 10**8
FEASIBILITY_SLACK = 1e-9
SWEEP_CHUNK = 65536
LN2 = float(np.log(2.0))

OBJECTIVES = ("min_sum_rate", "min_r1", "min_r2", "min_r3")


@dataclass(frozen=True)
class SearchConfig:
    """Settings for a frontier search.

    distortion_targets: per-source expected-distortion ceilings (D1, D2, D3).
    w_alphabet_sizes: auxiliary alphabet sizes; None means |X_i| + 1 each.
    grid_step: channel-entry resolution; must divide 1 into integer steps.
    refine_iters: dyadic local-refinement rounds after the grid sweep.
    objective: one of min_sum_rate, min_r1, min_r2, min_r3.
    threads: worker threads for the grid sweep (results merged in grid order).
    """

    distortion_targets: tuple[float, float, float]
    w_alphabet_sizes: tuple[int, int, int] | None = None
    grid_step: float = 0.05
    refine_iters: int = 0
    objective: str = "min_sum_rate"
    threads: int = 1
    tie_tol: float = 1e-9

    def steps(self) -> int:
        k = round(1.0 / self.grid_step)
        if k < 1 or abs(k * self.grid_step - 1.0) > 1e-9:
            raise ConfigError(f"grid_step {self.grid_step} does not divide 1 into integer steps")
        return k

    def validate(self) -> None:
        self.steps()
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective {self.objective!r} not in {OBJECTIVES}")
        if len(self.distortion_targets) != 3 or any(d < 0 for d in self.distortion_targets):
            raise ConfigError(
                f"distortion targets must be three nonnegative reals, got {self.distortion_targets}"
            )
        if self.w_alphabet_sizes is not None and any(s < 1 for s in self.w_alphabet_sizes):
            raise ConfigError(f"auxiliary alphabet sizes must be >= 1, got {self.w_alphabet_sizes}")
        if self.refine_iters < 0:
            raise ConfigError("refine_iters must be nonnegative")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


@dataclass(frozen=True)
class FrontierPoint:
    """One optimal operating point: rates, the distortions and channels behind them."""

    rates: RateTriple
    distortions: tuple[float, float, float]
    channels: TestChannelTriple
    bound_form: str
    objective_value: float


def simplex_compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of the given length summing to total.

    Rows are in ascending lexicographic order; shape (C(total+parts-1, parts-1), parts).
    """
    if parts < 1:
        raise ConfigError("parts must be >= 1")
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        rest = simplex_compositions(total - first, parts - 1)
        col = np.full((rest.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([col, rest]))
    return np.vstack(blocks)


def grid_rows(steps: int, parts: int) -> np.ndarray:
    """All probability rows with entries that are multiples of 1/steps."""
    return simplex_compositions(steps, parts) / float(steps)


def count_grid_channels(in_size: int, w_size: int, steps: int) -> int:
    rows = math.comb(steps + w_size - 1, w_size - 1)
    return rows**in_size


def channel_rows_for_index(index: int, rows: np.ndarray, in_size: int) -> np.ndarray:
    """Row matrix of the index-th grid channel (row of input 0 varies slowest)."""
    g = rows.shape[0]
    digits = []
    rem = index
    for _ in range(in_size):
        digits.append(rem % g)
        rem //= g
    if rem:
        raise ConfigError(f"channel index {index} out of range")
    digits.reverse()
    return rows[digits]


def enumerate_channels(alphabet: Alphabet, w_size: int, grid_step: float,
                       out_name: str = "W") -> Iterator[ConditionalPMF]:
    """Every row-stochastic matrix on the grid, in deterministic order.

    Rows vary lexicographically, the row for the first input symbol slowest.
    """
    if w_size < 1:
        raise ConfigError("w_size must be >= 1")
    k = round(1.0 / grid_step)
    if k < 1 or abs(k * grid_step - 1.0) > 1e-9:
        raise ConfigError(f"grid_step {grid_step} does not divide 1 into integer steps")
    total = count_grid_channels(alphabet.size, w_size, k)
    if total > MAX_GRID_CHANNELS:
        raise ConfigError(
            f"grid would enumerate {total} channels, above the cap of {MAX_GRID_CHANNELS}"
        )
    rows = grid_rows(k, w_size)
    out = Alphabet(out_name, tuple(str(i) for i in range(w_size)))
    for picks in iter_product(range(rows.shape[0]), repeat=alphabet.size):
        yield channel(alphabet, out, rows[list(picks)])


def _resolve_w_sizes(model: SourceModel, cfg: SearchConfig) -> tuple[int, int, int]:
    if cfg.w_alphabet_sizes is not None:
        return cfg.w_alphabet_sizes
    return tuple(model.alphabet(f"X{i}").size + 1 for i in (1, 2, 3))  # type: ignore[return-value]


def default_measures(
    model: SourceModel,
) -> tuple[DistortionMeasure, DistortionMeasure, DistortionMeasure]:
    return tuple(hamming_distortion(model.alphabet(f"X{i}")) for i in (1, 2, 3))  # type: ignore[return-value]


def _objective_index(objective: str) -> int | None:
    return {"min_sum_rate": None, "min_r1": 0, "min_r2": 1, "min_r3": 2}[objective]


def _witness_rates(bounds: RateRegionBounds, objective: str) -> RateTriple:
    """A concrete rate triple in the region that attains the objective."""
    if objective == "min_sum_rate":
        return min_sum_rate_point(bounds)
    idx = _objective_index(objective)
    assert idx is not None and bounds.has_sums()
    singles = list(bounds.singles())
    sums: dict[tuple[int, int], float] = {
        (0, 1): float(bounds.r12),  # type: ignore[arg-type]
        (0, 2): float(bounds.r13),  # type: ignore[arg-type]
        (1, 2): float(bounds.r23),  # type: ignore[arg-type]
    }
    rates = [0.0, 0.0, 0.0]
    rates[idx] = singles[idx]
    a, b = (i for i in range(3) if i != idx)
    rates[a] = max(singles[a], sums[tuple(sorted((idx, a)))] - rates[idx])
    rates[b] = max(
        singles[b],
        sums[tuple(sorted((idx, b)))] - rates[idx],
        sums[tuple(sorted((a, b)))] - rates[a],
        float(bounds.r123) - rates[idx] - rates[a],  # type: ignore[arg-type]
    )
    point = RateTriple(*rates)
    if not bounds.satisfied_by(point):
        big = sum(abs(v) for v in bounds.as_dict().values() if v is not None)
        rates[a] = rates[b] = big
        point = RateTriple(*rates)
    return point


def _objective_value(bounds: RateRegionBounds, objective: str) -> float:
    if objective == "min_sum_rate":
        return min_sum_rate_point(bounds).total
    idx = _objective_index(objective)
    assert idx is not None
    return bounds.singles()[idx]


def evaluate_triple(
    model: SourceModel,
    triple: TestChannelTriple,
    measures: Sequence[DistortionMeasure],
    use_collapsed: bool,
) -> tuple[tuple[float, float, float], RateRegionBounds]:
    """Bayes-optimal distortions and region bounds for one channel triple."""
    p = extend_with_test_channels(model, triple)
    dists = []
    for i, measure in enumerate(measures, start=1):
        rule = optimal_decoder(p, measure, f"X{i}")
        dists.append(expected_distortion(p, rule, measure))
    if use_collapsed:
        bounds = tree_collapsed_bounds(model, triple, require_tree=False)
    else:
        bounds = inner_bound(model, triple)
    return (dists[0], dists[1], dists[2]), bounds


# ---------------------------------------------------------------------------
# Per-encoder sweep for tree models
# ---------------------------------------------------------------------------

def _neg_entropy_free(t: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    return xlogy(t, t).sum(axis=axes) / LN2


def _sweep_chunk(
    pxzf: np.ndarray,
    rows: np.ndarray,
    in_size: int,
    lo: int,
    hi: int,
    measure: DistortionMeasure,
) -> tuple[np.ndarray, np.ndarray]:
    """Rates and Bayes distortions of grid channels lo..hi-1 for one encoder."""
    g = rows.shape[0]
    ids = np.arange(lo, hi, dtype=np.int64)
    digits = np.empty((ids.size, in_size), dtype=np.int64)
    rem = ids.copy()
    for pos in range(in_size - 1, -1, -1):
        digits[:, pos] = rem % g
        rem //= g
    ch = rows[digits]  # (B, x, w)
    joint = np.einsum("xzf,bxw->bxwzf", pxzf, ch)
    pw_zf = joint.sum(axis=1)  # (B, w, z, f)
    px_w = joint.sum(axis=(3, 4))  # (B, x, w)
    pw = px_w.sum(axis=1)  # (B, w)
    px = pxzf.sum(axis=(1, 2))
    pzf = pxzf.sum(axis=0)
    h_x = float(-_neg_entropy_free(px, (0,)))
    h_zf = float(-_neg_entropy_free(pzf, (0, 1)))
    h_w = -_neg_entropy_free(pw, (1,))
    h_xw = -_neg_entropy_free(px_w, (1, 2))
    h_wzf = -_neg_entropy_free(pw_zf, (1, 2, 3))
    i_xw = np.maximum(h_x + h_w - h_xw, 0.0)
    i_wzf = np.maximum(h_w + h_zf - h_wzf, 0.0)
    rate = i_xw - i_wzf
    scores = np.einsum("bxwzf,xr->bwzfr", joint, measure.matrix)
    dist = scores.min(axis=-1).sum(axis=(1, 2, 3))
    return rate, dist


def _merge_candidates(
    parts: Sequence[dict[float, tuple[int, float, float]]],
    tie_tol: float,
) -> list[tuple[int, float, float]]:
    """Combine per-chunk tie dictionaries, keeping first index per rounded rate."""
    best = math.inf
    for part in parts:
        for _, rate, _ in part.values():
            best = min(best, rate)
    merged: dict[float, tuple[int, float, float]] = {}
    for part in parts:  # parts arrive in grid order
        for key, entry in part.items():
            if entry[1] <= best + tie_tol and key not in merged:
                merged[key] = entry
    return sorted(merged.values(), key=lambda e: e[0])


def _encoder_candidates(
    model: SourceModel,
    enc: int,
    w_size: int,
    steps: int,
    target: float,
    measure: DistortionMeasure,
    threads: int,
    tie_tol: float,
) -> list[tuple[int, float, float]]:
    """Feasible channels within tie_tol of the encoder's minimum rate.

    Returns (channel_index, rate, distortion) rows sorted by channel index,
    at most one per distinct rounded rate; empty when no channel meets the
    distortion target.
    """
    x_name = f"X{enc}"
    base = marginalize(model.joint, (x_name, "Z", "F"))
    order = [base.axis(x_name), base.axis("Z"), base.axis("F")]
    pxzf = np.transpose(base.probs, order)
    in_size = pxzf.shape[0]
    rows = grid_rows(steps, w_size)
    n_channels = rows.shape[0] ** in_size

    def eval_span(span: tuple[int, int]) -> dict[float, tuple[int, float, float]]:
        lo, hi = span
        rate, dist = _sweep_chunk(pxzf, rows, in_size, lo, hi, measure)
        feasible = dist <= target + FEASIBILITY_SLACK
        if not feasible.any():
            return {}
        chunk_best = rate[feasible].min()
        keep = feasible & (rate <= chunk_best + tie_tol)
        out: dict[float, tuple[int, float, float]] = {}
        for off in np.nonzero(keep)[0]:
            key = round(float(rate[off]), 9)
            if key not in out:
                out[key] = (lo + int(off), float(rate[off]), float(dist[off]))
        return out

    spans = [(lo, min(lo + SWEEP_CHUNK, n_channels)) for lo in range(0, n_channels, SWEEP_CHUNK)]
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(eval_span, spans))
    else:
        parts = [eval_span(s) for s in spans]
    return _merge_candidates(parts, tie_tol)


def _rounded(rates: RateTriple, decimals: int = 9) -> tuple[float, float, float]:
    return (round(rates.r1, decimals), round(rates.r2, decimals), round(rates.r3, decimals))


def _pareto_min(points: list[FrontierPoint]) -> list[FrontierPoint]:
    """Drop points whose rate triple is dominated by another kept point."""
    kept: list[FrontierPoint] = []
    for p in points:
        dominated = False
        for q in points:
            if q is p:
                continue
            qr, pr = q.rates, p.rates
            if (qr.r1 <= pr.r1 + 1e-12 and qr.r2 <= pr.r2 + 1e-12 and qr.r3 <= pr.r3 + 1e-12
                    and (qr.r1 < pr.r1 - 1e-12 or qr.r2 < pr.r2 - 1e-12
                         or qr.r3 < pr.r3 - 1e-12)):
                dominated = True
                break
        if not dominated:
            kept.append(p)
    return kept


def _select_ties(points: list[FrontierPoint], tie_tol: float) -> list[FrontierPoint]:
    """Keep points within tie_tol of the best objective, dedupe, Pareto-prune."""
    if not points:
        return []
    best = min(p.objective_value for p in points)
    ties = [p for p in points if p.objective_value <= best + tie_tol]
    seen: set[tuple[float, float, float]] = set()
    unique: list[FrontierPoint] = []
    for p in ties:
        key = _rounded(p.rates)
        if key not in seen:
            seen.add(key)
            unique.append(p)
    return _pareto_min(unique)


def trace_frontier(
    model: SourceModel,
    cfg: SearchConfig,
    measures: Sequence[DistortionMeasure] | None = None,
) -> list[FrontierPoint]:
    """Exhaustive grid search for the optimal feasible operating points.

    A channel triple is feasible when the Bayes-optimal decoders meet every
    distortion target (within 1e-9).  Feasible triples are scored by the
    configured objective over the achievable region; the returned list holds
    the tied optima (deduplicated, Pareto-minimal), empty if nothing is
    feasible.  Tree-structured models use the per-encoder collapse; general
    models enumerate the full product grid.
    """
    cfg.validate()
    measures = tuple(measures) if measures is not None else default_measures(model)
    for i, m in enumerate(measures, start=1):
        if m.source.symbols != model.alphabet(f"X{i}").symbols:
            raise ConfigError(f"distortion measure {i} does not match X{i}'s alphabet")
    w_sizes = _resolve_w_sizes(model, cfg)
    steps = cfg.steps()
    counts = [count_grid_channels(model.alphabet(f"X{i}").size, w_sizes[i - 1], steps)
              for i in (1, 2, 3)]
    tree = is_tree_model(model)
    if tree:
        if max(counts) > MAX_GRID_CHANNELS:
            raise ConfigError(
                f"grid would enumerate {max(counts)} channels for one encoder, "
                f"above the cap of {MAX_GRID_CHANNELS}"
            )
        points = _trace_frontier_tree(model, cfg, measures, w_sizes, steps)
    else:
        total = counts[0] * counts[1] * counts[2]
        if total > MAX_GRID_CHANNELS:
            raise ConfigError(
                f"grid would enumerate {total} channel triples, "
                f"above the cap of {MAX_GRID_CHANNELS}"
            )
        points = _trace_frontier_generic(model, cfg, measures, w_sizes, steps)
    if cfg.refine_iters > 0 and points:
        points = _refine(model, cfg, measures, points, tree)
    return points


def _trace_frontier_tree(
    model: SourceModel,
    cfg: SearchConfig,
    measures: Sequence[DistortionMeasure],
    w_sizes: tuple[int, int, int],
    steps: int,
) -> list[FrontierPoint]:
    per_encoder = []
    for enc in (1, 2, 3):
        cands = _encoder_candidates(
            model, enc, w_sizes[enc - 1], steps,
            cfg.distortion_targets[enc - 1], measures[enc - 1], cfg.threads, cfg.tie_tol,
        )
        if not cands:
            return []
        per_encoder.append(cands)

    candidates: list[FrontierPoint] = []
    for (c1, r1, d1), (c2, r2, d2), (c3, r3, d3) in iter_product(*per_encoder):
        chans = []
        for i, c in enumerate((c1, c2, c3), start=1):
            rows = grid_rows(steps, w_sizes[i - 1])
            x = model.alphabet(f"X{i}")
            chans.append(test_channel(i, x, channel_rows_for_index(c, rows, x.size)))
        triple = TestChannelTriple(*chans)
        rates = RateTriple(max(r1, 0.0), max(r2, 0.0), max(r3, 0.0))
        idx = _objective_index(cfg.objective)
        value = rates.total if idx is None else rates.as_tuple()[idx]
        candidates.append(
            FrontierPoint(rates, (d1, d2, d3), triple, FORM_TREE_COLLAPSED, float(value))
        )
    return _select_ties(candidates, cfg.tie_tol)


def _chunks(iterable, size):
    buf = []
    for item in iterable:
        buf.append(item)
        if len(buf) == size:
            yield buf
            buf = []
    if buf:
        yield buf


def _trace_frontier_generic(
    model: SourceModel,
    cfg: SearchConfig,
    measures: Sequence[DistortionMeasure],
    w_sizes: tuple[int, int, int],
    steps: int,
) -> list[FrontierPoint]:
    iters = [
        list(enumerate_channels(model.alphabet(f"X{i}"), w_sizes[i - 1], cfg.grid_step, f"W{i}"))
        for i in (1, 2, 3)
    ]

    def eval_chunk(chunk: list[tuple[ConditionalPMF, ConditionalPMF, ConditionalPMF]]
                   ) -> list[FrontierPoint]:
        out: list[FrontierPoint] = []
        for ch1, ch2, ch3 in chunk:
            triple = TestChannelTriple(ch1, ch2, ch3)
            dists, bounds = evaluate_triple(model, triple, measures, use_collapsed=False)
            if all(d <= t + FEASIBILITY_SLACK for d, t in zip(dists, cfg.distortion_targets)):
                rates = _witness_rates(bounds, cfg.objective)
                value = _objective_value(bounds, cfg.objective)
                out.append(FrontierPoint(rates, dists, triple, FORM_INNER, value))
        return out

    combos = iter_product(iters[0], iters[1], iters[2])
    chunks = _chunks(combos, 4096)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(eval_chunk, chunks))
    else:
        parts = [eval_chunk(c) for c in chunks]
    feasible = [p for part in parts for p in part]
    return _select_ties(feasible, cfg.tie_tol)


def _row_neighbors(rows: np.ndarray, delta: float) -> Iterator[np.ndarray]:
    """Perturbations moving delta mass between two entries of one row."""
    n_rows, n_cols = rows.shape
    for r in range(n_rows):
        for dst in range(n_cols):
            for src in range(n_cols):
                if src == dst:
                    continue
                if rows[r, src] - delta < -1e-12:
                    continue
                out = rows.copy()
                out[r, src] = max(out[r, src] - delta, 0.0)
                out[r, dst] = min(out[r, dst] + delta, 1.0)
                yield out


def _refine(
    model: SourceModel,
    cfg: SearchConfig,
    measures: Sequence[DistortionMeasure],
    points: list[FrontierPoint],
    tree: bool,
) -> list[FrontierPoint]:
    """Dyadic local refinement: +-step/2^k moves, keeping feasible improvements."""
    form = FORM_TREE_COLLAPSED if tree else FORM_INNER
    current = list(points)
    for k in range(1, cfg.refine_iters + 1):
        delta = cfg.grid_step / (2**k)
        improved: list[FrontierPoint] = []
        for point in current:
            best = point
            mats = [np.asarray(ch.rows) for ch in point.channels.channels]
            for enc in range(3):
                for cand_rows in _row_neighbors(mats[enc], delta):
                    channels = list(point.channels.channels)
                    channels[enc] = test_channel(
                        enc + 1, model.alphabet(f"X{enc + 1}"), cand_rows
                    )
                    triple = TestChannelTriple(*channels)
                    dists, bounds = evaluate_triple(model, triple, measures, use_collapsed=tree)
                    if not all(d <= t + FEASIBILITY_SLACK
                               for d, t in zip(dists, cfg.distortion_targets)):
                        continue
                    value = _objective_value(bounds, cfg.objective)
                    if value < best.objective_value - 1e-12:
                        rates = _witness_rates(bounds, cfg.objective)
                        best = FrontierPoint(rates, dists, triple, form, value)
            improved.append(best)
        current = _select_ties(improved, cfg.tie_tol)
    return current


def lower_convex_envelope(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Vertices of the lower convex envelope of (x, y) points, sorted by x."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (p[0] - x1) * (y2 - y1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def envelope_value(hull: Sequence[tuple[float, float]], x: float) -> float:
    """Piecewise-linear interpolation on an envelope; clamped at the ends."""
    if not hull:
        raise ConfigError("empty envelope")
    xs = [p[0] for p in hull]
    ys = [p[1] for p in hull]
    return float(np.interp(x, xs, ys))
