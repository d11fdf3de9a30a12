"""Rate-region bounds for three encoders with two-variable decoder side information.

Two families of bounds are computed from an eight-axis joint over
(X1, X2, X3, Z, F, W1, W2, W3):

* the achievable (inner) region, expressed through marginal mutual
  informations of the product-form test channels:

      r_i   = I(X_i; W_i) - I(W_i; W_rest, Z, F)
      r_ij  = r_i + r_j + I(W_i; W_j | W_k, Z, F)
      r_123 = r_1 + r_2 + r_3 + I(W1; W2 | W3, Z, F) + I(W1, W2; W3 | Z, F)

  (a rate triple is achievable when every subset sum meets its bound);

* the converse (outer) region, expressed through conditional mutual
  informations against the full source vector X = (X1, X2, X3):

      r_S = I(X; W_S | W_{S^c}, Z, F)        for each subset S of {1,2,3},

  admitting any auxiliary joint whose per-encoder channels satisfy the
  Markov constraint W_m - X_m - (X_rest, Z, F).

For product-form channels the two families coincide term by term; the
identity residuals are exposed by verify_rate_identities.  On tree-structured
sources the cross terms vanish and the region collapses to per-encoder
bounds (tree_collapsed_bounds); relaxed_outer_bound keeps only the single-rate
bounds, which remain valid for correlated auxiliaries on tree sources.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConstraintError, InvalidQuery
from .probability import ConditionalPMF, JointPMF, condition, mutual_information
from .sources import (
    AUX_AXES,
    SOURCE_AXES,
    SourceModel,
    TestChannelTriple,
    extend_with_auxiliary,
    extend_with_test_channels,
    is_tree_model,
)

FORM_INNER = "inner"
FORM_OUTER = "outer"
FORM_TREE_COLLAPSED = "tree_collapsed"
FORM_RELAXED_OUTER = "relaxed_outer"


@dataclass(frozen=True)
class RateTriple:
    """One operating point: rates in bits per symbol for encoders 1..3."""

    r1: float
    r2: float
    r3: float

    @property
    def total(self) -> float:
        return self.r1 + self.r2 + self.r3

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r1, self.r2, self.r3)


@dataclass(frozen=True)
class RateRegionBounds:
    """The seven right-hand sides of the subset-sum inequalities.

    Rates (R1, R2, R3) belong to the region when R_i >= r_i, R_i + R_j >= r_ij
    and R1 + R2 + R3 >= r123.  Forms that only constrain single rates (the
    relaxed outer bound) carry None for the subset sums.  extras holds
    diagnostic terms (cross terms, admissibility residuals) by name.
    """

    r1: float
    r2: float
    r3: float
    r12: float | None
    r13: float | None
    r23: float | None
    r123: float | None
    form: str
    extras: dict[str, float] = field(default_factory=dict)

    def singles(self) -> tuple[float, float, float]:
        return (self.r1, self.r2, self.r3)

    def has_sums(self) -> bool:
        return None not in (self.r12, self.r13, self.r23, self.r123)

    def as_dict(self) -> dict[str, float | None]:
        return {
            "r1": self.r1, "r2": self.r2, "r3": self.r3,
            "r12": self.r12, "r13": self.r13, "r23": self.r23, "r123": self.r123,
        }

    def satisfied_by(self, rates: RateTriple, slack: float = 1e-9) -> bool:
        """True when the rate triple meets every defined inequality."""
        checks = [
            rates.r1 - self.r1,
            rates.r2 - self.r2,
            rates.r3 - self.r3,
        ]
        if self.r12 is not None:
            checks.append(rates.r1 + rates.r2 - self.r12)
        if self.r13 is not None:
            checks.append(rates.r1 + rates.r3 - self.r13)
        if self.r23 is not None:
            checks.append(rates.r2 + rates.r3 - self.r23)
        if self.r123 is not None:
            checks.append(rates.total - self.r123)
        return all(c >= -slack for c in checks)


def _extended_joint(model: SourceModel, aux: TestChannelTriple | ConditionalPMF | JointPMF) -> JointPMF:
    if isinstance(aux, TestChannelTriple):
        return extend_with_test_channels(model, aux)
    if isinstance(aux, ConditionalPMF):
        return extend_with_auxiliary(model, aux)
    if isinstance(aux, JointPMF):
        if aux.names != SOURCE_AXES + ("Z", "F") + AUX_AXES:
            raise InvalidQuery(f"extended joint must have axes (X1,X2,X3,Z,F,W1,W2,W3), got {aux.names}")
        return aux
    raise InvalidQuery(f"unsupported auxiliary description {type(aux).__name__}")


def admissibility_residuals(p: JointPMF) -> dict[str, float]:
    """Per-encoder Markov residuals I(W_m; X_rest, Z, F | X_m) of an 8-axis joint."""
    out: dict[str, float] = {}
    for m in (1, 2, 3):
        others = tuple(x for x in SOURCE_AXES if x != f"X{m}") + ("Z", "F")
        out[f"markov_w{m}"] = mutual_information(p, (f"W{m}",), others, given=(f"X{m}",))
    return out


def check_admissible(p: JointPMF, tol: float = 1e-9) -> dict[str, float]:
    """Raise ConstraintError unless every per-encoder Markov residual is <= tol."""
    res = admissibility_residuals(p)
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise ConstraintError(f"auxiliary joint violates per-encoder Markov constraints: {bad}")
    return res


def _rest(m: int) -> tuple[str, ...]:
    return tuple(f"W{k}" for k in (1, 2, 3) if k != m)


def inner_bound(model: SourceModel, channels: TestChannelTriple) -> RateRegionBounds:
    """Achievable-region right-hand sides for product-form test channels."""
    p = extend_with_test_channels(model, channels)
    i_marg = [mutual_information(p, (f"X{m}",), (f"W{m}",)) for m in (1, 2, 3)]
    m_leak = [mutual_information(p, (f"W{m}",), _rest(m) + ("Z", "F")) for m in (1, 2, 3)]
    c12 = mutual_information(p, ("W1",), ("W2",), given=("W3", "Z", "F"))
    c13 = mutual_information(p, ("W1",), ("W3",), given=("W2", "Z", "F"))
    c23 = mutual_information(p, ("W2",), ("W3",), given=("W1", "Z", "F"))
    c12_3 = mutual_information(p, ("W1", "W2"), ("W3",), given=("Z", "F"))
    r1 = i_marg[0] - m_leak[0]
    r2 = i_marg[1] - m_leak[1]
    r3 = i_marg[2] - m_leak[2]
    return RateRegionBounds(
        r1=r1, r2=r2, r3=r3,
        r12=r1 + r2 + c12,
        r13=r1 + r3 + c13,
        r23=r2 + r3 + c23,
        r123=r1 + r2 + r3 + c12 + c12_3,
        form=FORM_INNER,
        extras={"cross_12": c12, "cross_13": c13, "cross_23": c23, "cross_12_3": c12_3},
    )


def outer_bound(
    model: SourceModel,
    aux: TestChannelTriple | ConditionalPMF | JointPMF,
    tol: float = 1e-9,
) -> RateRegionBounds:
    """Converse-region right-hand sides in conditional form.

    Accepts a per-source channel triple, a general conditional
    p(w1, w2, w3 | x1, x2, x3), or a prebuilt eight-axis joint; in the latter
    two cases the per-encoder Markov constraints are verified first.
    """
    p = _extended_joint(model, aux)
    if isinstance(aux, TestChannelTriple):
        res = {f"markov_w{m}": 0.0 for m in (1, 2, 3)}
    else:
        res = check_admissible(p, tol)
    x = SOURCE_AXES
    zf = ("Z", "F")
    r1 = mutual_information(p, x, ("W1",), given=("W2", "W3") + zf)
    r2 = mutual_information(p, x, ("W2",), given=("W1", "W3") + zf)
    r3 = mutual_information(p, x, ("W3",), given=("W1", "W2") + zf)
    r12 = mutual_information(p, x, ("W1", "W2"), given=("W3",) + zf)
    r13 = mutual_information(p, x, ("W1", "W3"), given=("W2",) + zf)
    r23 = mutual_information(p, x, ("W2", "W3"), given=("W1",) + zf)
    r123 = mutual_information(p, x, AUX_AXES, given=zf)
    return RateRegionBounds(r1, r2, r3, r12, r13, r23, r123, FORM_OUTER, dict(res))


def tree_collapsed_bounds(
    model: SourceModel,
    channels: TestChannelTriple,
    require_tree: bool = True,
    tol: float = 1e-9,
) -> RateRegionBounds:
    """Per-encoder collapse of the region on tree-structured sources.

    With product channels on a tree source the auxiliary cross terms vanish,
    every single bound reduces to I(X_i; W_i) - I(W_i; Z, F), and every subset
    sum is the sum of its singles.  The four cross terms are reported in
    extras so callers can confirm the collapse numerically.
    """
    if require_tree and not is_tree_model(model, tol):
        raise ConstraintError("source joint does not factorize as a tree model")
    p = extend_with_test_channels(model, channels)
    singles = []
    for m in (1, 2, 3):
        iw = mutual_information(p, (f"X{m}",), (f"W{m}",))
        side = mutual_information(p, (f"W{m}",), ("Z", "F"))
        singles.append(iw - side)
    r1, r2, r3 = singles
    extras = {
        "cross_12": mutual_information(p, ("W1",), ("W2",), given=("W3", "Z", "F")),
        "cross_13": mutual_information(p, ("W1",), ("W3",), given=("W2", "Z", "F")),
        "cross_23": mutual_information(p, ("W2",), ("W3",), given=("W1", "Z", "F")),
        "cross_12_3": mutual_information(p, ("W1", "W2"), ("W3",), given=("Z", "F")),
    }
    return RateRegionBounds(
        r1, r2, r3,
        r12=r1 + r2, r13=r1 + r3, r23=r2 + r3, r123=r1 + r2 + r3,
        form=FORM_TREE_COLLAPSED, extras=extras,
    )


def relaxed_outer_bound(
    model: SourceModel,
    aux: TestChannelTriple | ConditionalPMF | JointPMF,
    tol: float = 1e-9,
) -> RateRegionBounds:
    """Single-rate converse bounds valid for correlated admissible auxiliaries.

    Each encoder obeys R_i >= I(X_i; W_i) - I(W_i; Z, F); no subset-sum bound
    is asserted (those fields are None).
    """
    p = _extended_joint(model, aux)
    if not isinstance(aux, TestChannelTriple):
        check_admissible(p, tol)
    singles = []
    for m in (1, 2, 3):
        iw = mutual_information(p, (f"X{m}",), (f"W{m}",))
        side = mutual_information(p, (f"W{m}",), ("Z", "F"))
        singles.append(iw - side)
    return RateRegionBounds(
        singles[0], singles[1], singles[2],
        r12=None, r13=None, r23=None, r123=None,
        form=FORM_RELAXED_OUTER, extras={},
    )


def productize_auxiliary(
    model: SourceModel,
    aux: ConditionalPMF | JointPMF,
    tol: float = 1e-9,
) -> TestChannelTriple:
    """Replace an admissible correlated auxiliary by independent channels.

    The returned per-source channels are the conditionals p(w_i | x_i) of the
    extended joint.  Because each W_i already satisfies the Markov constraint
    W_i - X_i - (X_rest, Z, F), the product-form replacement reproduces every
    (X_i, W_i, Z, F) marginal exactly, so all per-encoder quantities (the
    relaxed outer bounds in particular) are unchanged.
    """
    p = _extended_joint(model, aux)
    check_admissible(p, tol)
    channels = []
    for m in (1, 2, 3):
        cond = condition(p, (f"W{m}",), (f"X{m}",))
        if not bool(cond.defined.all()):
            raise ConstraintError(f"X{m} has a zero-probability symbol; channel row undefined")
        channels.append(cond)
    return TestChannelTriple(*channels)


def verify_rate_identities(
    model: SourceModel,
    channels: TestChannelTriple,
) -> dict[str, float]:
    """Dual-route evaluation of every bound plus the product-channel zero terms.

    For product-form channels each conditional-form right-hand side must equal
    its marginal-form counterpart; both values and their absolute difference
    are reported (keys <name>_conditional, <name>_marginal, <name>_residual),
    together with the three master Markov zeros
    I(W_m; everything else | X_m) (keys markov_w1..markov_w3).
    """
    p = extend_with_test_channels(model, channels)
    inner = inner_bound(model, channels)
    outer = outer_bound(model, channels)
    out: dict[str, float] = {}
    pairs = [
        ("single1", outer.r1, inner.r1),
        ("single2", outer.r2, inner.r2),
        ("single3", outer.r3, inner.r3),
        ("pair12", outer.r12, inner.r12),
        ("pair13", outer.r13, inner.r13),
        ("pair23", outer.r23, inner.r23),
        ("triple", outer.r123, inner.r123),
    ]
    for name, cond_form, marg_form in pairs:
        out[f"{name}_conditional"] = float(cond_form)
        out[f"{name}_marginal"] = float(marg_form)
        out[f"{name}_residual"] = abs(cond_form - marg_form)
    for m in (1, 2, 3):
        others = tuple(x for x in SOURCE_AXES if x != f"X{m}") + ("Z", "F") + _rest(m)
        out[f"markov_w{m}"] = mutual_information(p, (f"W{m}",), others, given=(f"X{m}",))
    return out


def min_sum_rate_point(bounds: RateRegionBounds, slack: float = 1e-9) -> RateTriple:
    """A rate triple attaining the minimum total rate over the bounded region.

    For the subset-sum polytope above, the minimum of R1 + R2 + R3 equals
    r123, attained at R1 = r1, R2 = max(r2, r12 - r1), R3 = r123 - R1 - R2
    (monotonicity of the right-hand sides makes the remaining inequalities
    hold automatically); the construction is verified before returning.
    """
    if not bounds.has_sums():
        raise InvalidQuery("minimum sum rate needs all subset-sum bounds")
    assert bounds.r12 is not None and bounds.r123 is not None
    point1 = bounds.r1
    point2 = max(bounds.r2, bounds.r12 - point1)
    point3 = bounds.r123 - point1 - point2
    rates = RateTriple(point1, point2, point3)
    if not bounds.satisfied_by(rates, slack):
        raise ConstraintError(
            f"sum-rate witness {rates.as_tuple()} violates the region bounds {bounds.as_dict()}"
        )
    return rates
