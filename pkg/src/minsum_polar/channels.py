"""Binary-input symmetric channels reduced to integer label distributions.

A channel enters the min-sum pipeline only through the distribution of its
integer decoder labels.  We therefore represent a channel directly by
``alpha[t] = Pr(label = t | input 0)`` over the dense range ``-gamma..gamma``.
Symmetry of the underlying channel then becomes the mirror identity
``Pr(label = t | input 1) = alpha[-t]``, which is how the input-1 side is
recovered everywhere in this package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

_SUM_TOL = 1e-12
_CUSTOM_SUM_TOL = 1e-9
# finite stand-in for log2(alpha/0) when a label is reachable from one input only
_LLR_CLIP = 300.0


def _std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class LabeledChannel:
    """A symmetric binary-input channel collapsed to its label distribution.

    Parameters
    ----------
    gamma : int
        Label range bound; labels live in ``-gamma..gamma``.
    alpha : ndarray
        Dense probabilities ``Pr(label = t | input 0)`` for
        ``t = -gamma..gamma`` (length ``2*gamma + 1``).
    descriptor : dict
        Provenance record; doubles as the JSON channel config.
    """

    gamma: int
    alpha: np.ndarray
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.gamma < 1:
            raise ValueError(f"gamma must be a positive integer, got {self.gamma}")
        alpha = np.asarray(self.alpha, dtype=np.float64)
        if alpha.shape != (2 * self.gamma + 1,):
            raise ValueError(
                f"alpha must have length {2 * self.gamma + 1}, got {alpha.shape}"
            )
        if not np.all(np.isfinite(alpha)):
            raise ValueError("alpha contains non-finite entries")
        if np.any(alpha < 0.0):
            raise ValueError("alpha contains negative probabilities")
        if abs(alpha.sum() - 1.0) > _SUM_TOL:
            raise ValueError(f"alpha sums to {alpha.sum()!r}, expected 1")
        if not np.any(alpha > 0.0):
            raise ValueError("alpha has empty support")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    def alpha_at(self, t: int) -> float:
        """Probability of label ``t`` under input 0."""
        if abs(t) > self.gamma:
            return 0.0
        return float(self.alpha[t + self.gamma])

    @property
    def labels(self) -> np.ndarray:
        """The dense label values ``-gamma..gamma``."""
        return np.arange(-self.gamma, self.gamma + 1)

    def alpha_map(self) -> dict:
        """Nonzero labels as a plain ``{t: probability}`` dict."""
        return {
            int(t): float(p)
            for t, p in zip(self.labels, self.alpha)
            if p > 0.0
        }


@dataclass(frozen=True)
class LabelerReport:
    """Outcome of checking the labeler axioms for a channel."""

    is_fair: bool
    is_good: bool
    violations: list


def make_bsc(p: float) -> LabeledChannel:
    """Binary symmetric channel with labeler ``y -> 1 - 2y``.

    Parameters
    ----------
    p : float
        Crossover probability in ``[0, 1]``.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"crossover probability must be in [0, 1], got {p}")
    alpha = np.array([p, 0.0, 1.0 - p])
    return LabeledChannel(1, alpha, {"kind": "bsc", "p": float(p)})


def make_quantized_biawgn(sigma: float, q=(0.2, 0.6, 1.2)) -> LabeledChannel:
    """BPSK over additive Gaussian noise, quantized to eight labels.

    The input bit ``x`` is mapped to ``x' = 1 - 2x`` and received as
    ``y = x' + nu`` with ``nu ~ Normal(0, sigma**2)``.  Three positive
    thresholds ``q1 < q2 < q3`` carve the real line into eight regions with
    labels ``-4..-1, 1..4`` (label 0 is never produced).

    Parameters
    ----------
    sigma : float
        Noise standard deviation, must be positive.
    q : sequence of three floats
        Ascending positive thresholds.
    """
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    q1, q2, q3 = (float(v) for v in q)
    if not (0.0 < q1 < q2 < q3):
        raise ValueError(f"thresholds must satisfy 0 < q1 < q2 < q3, got {q}")

    edges = [-math.inf, -q3, -q2, -q1, 0.0, q1, q2, q3, math.inf]
    region_labels = [-4, -3, -2, -1, 1, 2, 3, 4]
    alpha = np.zeros(9)
    for t, lo, hi in zip(region_labels, edges[:-1], edges[1:]):
        # mean of y is +1 under input 0
        hi_cdf = 1.0 if hi is math.inf else _std_normal_cdf((hi - 1.0) / sigma)
        lo_cdf = 0.0 if lo is -math.inf else _std_normal_cdf((lo - 1.0) / sigma)
        alpha[t + 4] = hi_cdf - lo_cdf
    return LabeledChannel(
        4, alpha, {"kind": "biawgn8", "sigma": float(sigma), "q": [q1, q2, q3]}
    )


def make_custom(alpha_map: dict) -> LabeledChannel:
    """Channel from an explicit ``{label: probability}`` map.

    Probabilities must sum to 1 within 1e-9; they are renormalized exactly
    afterwards.  ``gamma`` is the largest declared ``|label|``.
    """
    if not alpha_map:
        raise ValueError("alpha map is empty")
    cleaned = {}
    for t, p in alpha_map.items():
        if isinstance(t, bool) or not isinstance(t, (int, np.integer)):
            raise ValueError(f"labels must be integers, got {t!r}")
        p = float(p)
        if not math.isfinite(p) or p < 0.0:
            raise ValueError(f"invalid probability {p!r} for label {t}")
        cleaned[int(t)] = cleaned.get(int(t), 0.0) + p
    total = sum(cleaned.values())
    if abs(total - 1.0) > _CUSTOM_SUM_TOL:
        raise ValueError(f"probabilities sum to {total!r}, expected 1 within 1e-9")
    gamma = max(abs(t) for t in cleaned)
    if gamma == 0:
        raise ValueError("at least one nonzero label is required")
    alpha = np.zeros(2 * gamma + 1)
    for t, p in cleaned.items():
        alpha[t + gamma] = p / total
    return LabeledChannel(
        gamma,
        alpha,
        {"kind": "custom", "alpha": {str(t): float(p / total) for t, p in cleaned.items()}},
    )


def validate_labeler(ch: LabeledChannel) -> LabelerReport:
    """Check the sign-consistency axioms of the channel's labeler.

    Symmetry preservation and the finite integer range hold by construction
    of the representation, so fairness reduces to ``alpha[t] >= alpha[-t]``
    for every positive ``t``, strictly for at least one ``t``.  In this
    representation a fair labeler is automatically good.
    """
    violations = []
    strict = False
    for t in range(1, ch.gamma + 1):
        pos = ch.alpha_at(t)
        neg = ch.alpha_at(-t)
        if pos < neg:
            violations.append(("sign-consistency", t, (pos, neg)))
        elif pos > neg:
            strict = True
    if not strict and not violations:
        violations.append(("strictness", None, "alpha[t] == alpha[-t] for all t"))
    is_fair = not violations
    return LabelerReport(is_fair=is_fair, is_good=is_fair, violations=violations)


def binary_entropy(p: float) -> float:
    """Binary entropy in bits, with the 0*log(0) = 0 convention."""
    if p < 0.0 or p > 1.0:
        raise ValueError(f"probability out of range: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(64)


def _biawgn_capacity(sigma: float) -> float:
    # E[1 - log2(1 + exp(-2y/sigma^2))] under y ~ Normal(1, sigma^2),
    # by Gauss-Hermite quadrature of fixed order 64
    y = 1.0 + math.sqrt(2.0) * sigma * _GH_NODES
    integrand = 1.0 - np.logaddexp(0.0, -2.0 * y / sigma**2) / math.log(2.0)
    return float((_GH_WEIGHTS * integrand).sum() / math.sqrt(math.pi))


def reference_capacities(kind: str, grid) -> np.ndarray:
    """Analytic or quadrature capacities for reference curves.

    Parameters
    ----------
    kind : {"bsc", "biawgn-unquantized", "awgn"}
        Channel family; the grid holds ``p`` for BSC and ``sigma`` otherwise.
    grid : sequence of float
        Nonempty parameter grid.

    Returns
    -------
    ndarray
        Capacity in bits per use at each grid point.
    """
    grid = np.asarray(list(grid), dtype=np.float64)
    if grid.size == 0:
        raise ValueError("parameter grid is empty")
    if kind == "bsc":
        return np.array([1.0 - binary_entropy(p) for p in grid])
    if kind in ("biawgn-unquantized", "awgn"):
        if np.any(grid <= 0.0):
            raise ValueError("sigma must be positive")
        if kind == "awgn":
            return 0.5 * np.log2(1.0 + 1.0 / grid**2)
        return np.array([_biawgn_capacity(s) for s in grid])
    raise ValueError(f"unknown channel kind {kind!r}")


def label_llrs(ch: LabeledChannel) -> np.ndarray:
    """Base-2 LLR of each dense label, ``log2(alpha[t] / alpha[-t])``.

    Labels reachable from one input only get a clipped finite value so the
    exact-SC decoder always sees finite inputs.
    """
    a = ch.alpha
    rev = a[::-1]
    llr = np.zeros_like(a)
    both = (a > 0.0) & (rev > 0.0)
    llr[both] = np.log2(a[both] / rev[both])
    llr[(a > 0.0) & (rev == 0.0)] = _LLR_CLIP
    llr[(a == 0.0) & (rev > 0.0)] = -_LLR_CLIP
    return np.clip(llr, -_LLR_CLIP, _LLR_CLIP)


def from_config(cfg) -> LabeledChannel:
    """Build a channel from its JSON config (dict or JSON string).

    Recognized forms::

        {"kind": "bsc", "p": 0.1}
        {"kind": "biawgn8", "sigma": 0.8, "q": [0.2, 0.6, 1.2]}
        {"kind": "custom", "alpha": {"-1": 0.1, "1": 0.9}}
    """
    if isinstance(cfg, str):
        cfg = json.loads(cfg)
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValueError("channel config must be an object with a 'kind' key")
    kind = cfg["kind"]
    if kind == "bsc":
        return make_bsc(float(cfg["p"]))
    if kind == "biawgn8":
        return make_quantized_biawgn(float(cfg["sigma"]), cfg.get("q", (0.2, 0.6, 1.2)))
    if kind == "custom":
        raw = cfg["alpha"]
        return make_custom({int(t): float(p) for t, p in raw.items()})
    raise ValueError(f"unknown channel kind {kind!r}")


def to_config(ch: LabeledChannel) -> dict:
    """The JSON-serializable config of a channel."""
    return dict(ch.descriptor) if ch.descriptor else {
        "kind": "custom",
        "alpha": {str(t): p for t, p in ch.alpha_map().items()},
    }
