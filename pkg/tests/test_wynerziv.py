"""Single-source side-information compression: sweep and closed form."""

import numpy as np
import pytest

from rdregion.errors import ConfigError, InvalidQuery
from rdregion.optimizer import SearchConfig, trace_frontier
from rdregion.probability import JointPMF, binary_alphabet, indexed_alphabet
from rdregion.sources import hamming_distortion, is_tree_model
from rdregion.wynerziv import (
    BinaryClosedForm,
    binary_closed_form,
    binary_entropy,
    closed_form_parameters,
    crossover,
    default_distortion_levels,
    embed_two_variable_model,
    wyner_ziv_reduction,
    zero_rate_distortion,
)

import oracle


def symmetric_binary_joint(p):
    """X fair, Y = X flipped with probability p."""
    x, y = binary_alphabet("X"), binary_alphabet("Y")
    probs = np.array([[(1 - p) / 2, p / 2], [p / 2, (1 - p) / 2]])
    return JointPMF((x, y), probs)


# ---------------------------------------------------------------------------
# Scalar helpers
# ---------------------------------------------------------------------------

def test_binary_entropy_values():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert abs(binary_entropy(0.5) - 1.0) < 1e-15
    assert abs(binary_entropy(0.1) - oracle.binary_entropy(0.1)) < 1e-15
    arr = binary_entropy(np.array([0.0, 0.5, 1.0]))
    assert np.allclose(arr, [0.0, 1.0, 0.0])


def test_crossover_values():
    assert abs(crossover(0.25, 0.0) - 0.25) < 1e-15
    assert abs(crossover(0.25, 0.5) - 0.5) < 1e-15
    assert abs(crossover(0.25, 0.1) - crossover(0.1, 0.25)) < 1e-15
    assert abs(crossover(0.25, 0.1) - 0.3) < 1e-15


# ---------------------------------------------------------------------------
# Closed form
# ---------------------------------------------------------------------------

def test_closed_form_switch_point():
    cf = binary_closed_form(0.25)
    assert abs(cf.d_critical - 0.08802070110951253) < 1e-9
    assert abs(cf.d_critical - oracle.wz_tangent_point(0.25)) < 1e-9


def test_closed_form_rate_values():
    cf = binary_closed_form(0.25)
    # zero distortion: the full conditional entropy of X given Y
    assert abs(cf.rate(0.0) - binary_entropy(0.25)) < 1e-12
    # at or beyond the zero-rate distortion the rate vanishes
    assert cf.rate(0.25) == 0.0
    assert cf.rate(0.4) == 0.0
    # curve segment below the switch point, straight line above it
    for d in (0.01, 0.05, 0.08, 0.1, 0.15, 0.2, 0.24):
        want = oracle.wz_closed_rate(0.25, d, cf.d_critical)
        assert abs(cf.rate(d) - want) < 1e-9
    # the envelope is convex and nonincreasing
    grid = [i / 1000 for i in range(0, 260)]
    vals = [cf.rate(d) for d in grid]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    with pytest.raises(InvalidQuery):
        cf.rate(-0.01)


def test_closed_form_degenerate_sides():
    assert binary_closed_form(0.0).rate(0.1) == 0.0
    with pytest.raises(InvalidQuery):
        binary_closed_form(0.75)
    # line segment shrinks to nothing as d_c -> p
    cf = BinaryClosedForm(p=0.25, d_critical=0.25)
    assert cf.rate(0.2499) >= 0.0


def test_closed_form_parameters_detection():
    measure = hamming_distortion(binary_alphabet("X"))
    p = closed_form_parameters(symmetric_binary_joint(0.25), measure)
    assert p is not None and abs(p - 0.25) < 1e-12
    # crossover above one half is folded back
    p = closed_form_parameters(symmetric_binary_joint(0.7), measure)
    assert p is not None and abs(p - 0.3) < 1e-12
    # non-uniform source
    x, y = binary_alphabet("X"), binary_alphabet("Y")
    skew = JointPMF((x, y), np.array([[0.5, 0.1], [0.1, 0.3]]))
    assert closed_form_parameters(skew, measure) is None
    # asymmetric channel
    asym = JointPMF((x, y), np.array([[0.45, 0.05], [0.15, 0.35]]))
    assert closed_form_parameters(asym, measure) is None
    # non-Hamming distortion
    other = hamming_distortion(binary_alphabet("X"))
    object.__setattr__(other, "matrix", np.array([[0.0, 2.0], [1.0, 0.0]]))
    assert closed_form_parameters(symmetric_binary_joint(0.25), other) is None
    # larger alphabets
    x3 = indexed_alphabet("X", 3)
    tri = JointPMF((x3, y), np.full((3, 2), 1.0 / 6.0))
    assert closed_form_parameters(tri, hamming_distortion(x3)) is None


def test_zero_rate_distortion_values():
    measure = hamming_distortion(binary_alphabet("X"))
    assert abs(zero_rate_distortion(symmetric_binary_joint(0.25), measure) - 0.25) < 1e-12
    # independent side information cannot help a fair bit
    x, y = binary_alphabet("X"), binary_alphabet("Y")
    indep = JointPMF((x, y), np.full((2, 2), 0.25))
    assert abs(zero_rate_distortion(indep, measure) - 0.5) < 1e-12


def test_default_distortion_levels():
    measure = hamming_distortion(binary_alphabet("X"))
    levels = default_distortion_levels(symmetric_binary_joint(0.25), measure, step=0.05)
    assert levels[0] == 0.0
    assert levels[-1] == 0.25
    assert levels == (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.25)


# ---------------------------------------------------------------------------
# Grid sweep
# ---------------------------------------------------------------------------

def test_sweep_brackets_closed_form():
    p_xy = symmetric_binary_joint(0.25)
    cf = binary_closed_form(0.25)
    cfg = SearchConfig((0.0, 0.0, 0.0), w_alphabet_sizes=(2, 1, 1), grid_step=0.05)
    levels = (0.0, 0.05, 0.1, 0.2, 0.25)
    pairs = wyner_ziv_reduction(p_xy, cfg=cfg, distortion_levels=levels)
    assert [d for d, _ in pairs] == list(levels)
    rates = {d: r for d, r in pairs}
    # the sweep is an achievability result: never below the converse
    for d, r in pairs:
        assert r >= cf.rate(d) - 1e-9
    # identity channel at D = 0 gives exactly the conditional entropy
    assert abs(rates[0.0] - binary_entropy(0.25)) < 1e-9
    # below the switch point the optimal grid channel is the matched
    # symmetric one, so the curve value is attained exactly
    assert abs(rates[0.05] - cf.rate(0.05)) < 1e-9
    # zero-rate point
    assert rates[0.25] == 0.0
    # above the switch point a two-letter auxiliary cannot time share, so the
    # sweep sits between the envelope and the raw curve
    assert rates[0.2] <= cf.curve(0.2) + 1e-9
    # monotone nonincreasing in the distortion ceiling
    ordered = [rates[d] for d in levels]
    assert all(a >= b - 1e-12 for a, b in zip(ordered, ordered[1:]))


def test_sweep_skips_unreachable_levels():
    p_xy = symmetric_binary_joint(0.25)
    cfg = SearchConfig((0.0, 0.0, 0.0), w_alphabet_sizes=(1, 1, 1), grid_step=0.5)
    # a constant auxiliary cannot reach distortion 0.1
    pairs = wyner_ziv_reduction(p_xy, cfg=cfg, distortion_levels=(0.1, 0.3))
    assert pairs == [(0.3, 0.0)]


def test_sweep_threads_deterministic():
    p_xy = symmetric_binary_joint(0.25)
    levels = (0.05, 0.1, 0.15)
    results = []
    for threads in (1, 4):
        cfg = SearchConfig(
            (0.0, 0.0, 0.0), w_alphabet_sizes=(3, 1, 1), grid_step=0.1,
            threads=threads,
        )
        results.append(wyner_ziv_reduction(p_xy, cfg=cfg, distortion_levels=levels))
    assert results[0] == results[1]


def test_sweep_validation():
    p_xy = symmetric_binary_joint(0.25)
    x, y, z = binary_alphabet("X"), binary_alphabet("Y"), binary_alphabet("Q")
    three = JointPMF((x, y, z), np.full((2, 2, 2), 0.125))
    with pytest.raises(InvalidQuery):
        wyner_ziv_reduction(three)
    with pytest.raises(ConfigError):
        wyner_ziv_reduction(p_xy, measure=hamming_distortion(indexed_alphabet("X", 3)))
    with pytest.raises(ConfigError):
        wyner_ziv_reduction(p_xy, distortion_levels=(-0.1,))
    with pytest.raises(ConfigError):
        cfg = SearchConfig((0.0, 0.0, 0.0), w_alphabet_sizes=(200, 1, 1), grid_step=0.01)
        wyner_ziv_reduction(p_xy, cfg=cfg)


# ---------------------------------------------------------------------------
# Embedding into the three-encoder machinery
# ---------------------------------------------------------------------------

def test_embed_two_variable_model():
    p_xy = symmetric_binary_joint(0.25)
    model = embed_two_variable_model(p_xy)
    assert model.joint.names == ("X1", "X2", "X3", "Z", "F")
    assert model.alphabet("X2").size == 1
    assert model.alphabet("F").size == 1
    assert is_tree_model(model)
    from rdregion.probability import marginalize
    m = marginalize(model.joint, ("X1", "Z"))
    assert np.allclose(m.probs, p_xy.probs, atol=1e-15)


def test_embedded_frontier_agrees_with_sweep():
    p_xy = symmetric_binary_joint(0.25)
    cfg = SearchConfig((0.0, 0.0, 0.0), w_alphabet_sizes=(2, 1, 1), grid_step=0.05)
    pairs = wyner_ziv_reduction(p_xy, cfg=cfg, distortion_levels=(0.1,))
    assert len(pairs) == 1
    sweep_rate = pairs[0][1]
    model = embed_two_variable_model(p_xy)
    frontier_cfg = SearchConfig(
        (0.1, 0.0, 0.0), w_alphabet_sizes=(2, 1, 1), grid_step=0.05,
        objective="min_r1",
    )
    points = trace_frontier(model, frontier_cfg)
    assert points
    assert abs(points[0].objective_value - sweep_rate) < 1e-12
    assert abs(points[0].rates.r2) < 1e-15
    assert abs(points[0].rates.r3) < 1e-15
