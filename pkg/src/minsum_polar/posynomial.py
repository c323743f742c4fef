"""Coefficient arithmetic on label posynomials.

A label posynomial stores the joint probability of (min-sum decoder label,
input bit = 0) as a dense coefficient array over the integer exponents
``-t_max..t_max``.  Everything the analytics need, such as exact error
probabilities, Bhattacharyya-like bounds, and mutual information, is read
off these arrays; the input-1 side is always the mirrored array.
"""

from __future__ import annotations

import json
import math
from typing import NamedTuple

import numpy as np

from .channels import LabeledChannel

_NORM_TOL = 1e-12          # |sum - 1/2| allowed on normalized posynomials
_MINUS_DRIFT_TOL = 1e-12   # drift allowed when renormalizing the minus transform
_FFT_DRIFT_TOL = 1e-9      # relative drift allowed when renormalizing after FFT
_FFT_CLAMP = 1e-15         # negatives no larger than this are rounding noise
_DIRECT_MAX_LEN = 512      # squaring is direct convolution up to this input length
_U_LO = -64.0              # search domain for z_star, in u = log2(xi)
_TERNARY_ITERS = 90        # shrinks the bracket to the float granularity
_NEWTON_ITERS = 4


class LabelPosynomial:
    """Dense posynomial over integer exponents ``t`` in ``[-t_max, t_max]``.

    ``coeffs[k]`` is the coefficient of ``xi**(k - t_max)``.  Coefficients are
    non-negative; the synthetic joint distributions additionally sum to 1/2,
    but intermediates produced by the folding operators need not.
    """

    __slots__ = ("t_max", "coeffs")

    def __init__(self, t_max: int, coeffs, *, copy: bool = True):
        t_max = int(t_max)
        if t_max < 0:
            raise ValueError(f"t_max must be non-negative, got {t_max}")
        if copy:
            arr = np.array(coeffs, dtype=np.float64)
        else:
            arr = np.asarray(coeffs, dtype=np.float64)
        if arr.shape != (2 * t_max + 1,):
            raise ValueError(
                f"coefficient array must have length {2 * t_max + 1}, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients contain non-finite values")
        if np.any(arr < 0.0):
            raise ValueError("coefficients must be non-negative")
        arr.setflags(write=False)
        self.t_max = t_max
        self.coeffs = arr

    @classmethod
    def from_dict(cls, coeff_map: dict) -> "LabelPosynomial":
        """Build from a sparse ``{exponent: coefficient}`` map."""
        if not coeff_map:
            raise ValueError("empty coefficient map")
        t_max = max(abs(int(t)) for t in coeff_map)
        arr = np.zeros(2 * t_max + 1)
        for t, c in coeff_map.items():
            arr[int(t) + t_max] = c
        return cls(t_max, arr, copy=False)

    def coeff(self, t: int) -> float:
        """Coefficient of ``xi**t`` (0 outside the stored range)."""
        if abs(t) > self.t_max:
            return 0.0
        return float(self.coeffs[t + self.t_max])

    def as_dict(self) -> dict:
        """Nonzero coefficients as ``{exponent: value}``."""
        ts = np.arange(-self.t_max, self.t_max + 1)
        return {int(t): float(c) for t, c in zip(ts, self.coeffs) if c != 0.0}

    @property
    def total(self) -> float:
        return float(self.coeffs.sum())

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.coeffs > 0.0))

    def is_normalized(self, tol: float = _NORM_TOL) -> bool:
        return abs(self.total - 0.5) <= tol

    def to_json(self) -> str:
        return json.dumps({"t_max": self.t_max, "coeffs": list(self.coeffs)})

    @classmethod
    def from_json(cls, text: str) -> "LabelPosynomial":
        obj = json.loads(text)
        return cls(int(obj["t_max"]), obj["coeffs"], copy=False)

    def __repr__(self):
        return f"LabelPosynomial(t_max={self.t_max}, total={self.total:.6g})"


def label_distribution(ch: LabeledChannel) -> LabelPosynomial:
    """Base posynomial of a channel: coefficient at ``t`` is ``alpha[t] / 2``."""
    return LabelPosynomial(ch.gamma, ch.alpha * 0.5, copy=False)


def evaluate(posy: LabelPosynomial, xi: float) -> float:
    """Evaluate ``sum_t coeffs[t] * xi**t`` at ``xi > 0``.

    Powers are built by repeated multiplication outward from ``t = 0`` so the
    positive and negative tails are each accumulated stably.
    """
    if not xi > 0.0:
        raise ValueError(f"xi must be positive, got {xi}")
    c = posy.coeffs
    center = posy.t_max
    total = c[center]
    up = 1.0
    down = 1.0
    for k in range(1, center + 1):
        up *= xi
        down /= xi
        ck = c[center + k]
        if ck != 0.0:
            total += ck * up
        ck = c[center - k]
        if ck != 0.0:
            total += ck * down
    return float(total)


def mirror(posy: LabelPosynomial) -> LabelPosynomial:
    """The posynomial of ``1/xi``: coefficients reversed about ``t = 0``."""
    return LabelPosynomial(posy.t_max, posy.coeffs[::-1])


def pos_op(posy: LabelPosynomial) -> LabelPosynomial:
    """Copy coefficients for ``t >= 0`` and reflect them onto ``t < 0``."""
    return LabelPosynomial(posy.t_max, _pos_fold(posy.coeffs, posy.t_max), copy=False)


def neg_op(posy: LabelPosynomial) -> LabelPosynomial:
    """Copy coefficients for ``t <= 0`` and reflect them onto ``t > 0``."""
    return LabelPosynomial(posy.t_max, _neg_fold(posy.coeffs, posy.t_max), copy=False)


def hadamard(a: LabelPosynomial, b: LabelPosynomial) -> LabelPosynomial:
    """Pointwise coefficient product; requires equal exponent ranges."""
    if a.t_max != b.t_max:
        raise ValueError(f"exponent ranges differ: {a.t_max} vs {b.t_max}")
    return LabelPosynomial(a.t_max, a.coeffs * b.coeffs, copy=False)


def above(posy: LabelPosynomial) -> LabelPosynomial:
    """At each ``t``, the sum of coefficients at exponents strictly above."""
    return LabelPosynomial(posy.t_max, _suffix_sums(posy.coeffs), copy=False)


def below(posy: LabelPosynomial) -> LabelPosynomial:
    """At each ``t``, the sum of coefficients at exponents strictly below."""
    return LabelPosynomial(posy.t_max, _prefix_sums(posy.coeffs), copy=False)


def plus_transform(posy: LabelPosynomial) -> LabelPosynomial:
    """One polarization step along the better branch: ``2 * P(xi)**2``.

    The exponent range doubles.  Squaring is direct convolution up to 512
    input coefficients and FFT-based beyond, with rounding noise clamped and
    the total renormalized (drift beyond 1e-9 relative raises).
    """
    c = posy.coeffs
    out = 2.0 * _square(c)
    target = _transform_target(c.sum())
    out = _renormalize(out, target, _FFT_DRIFT_TOL * (target if target > 0.0 else 1.0))
    return LabelPosynomial(2 * posy.t_max, out, copy=False)


def minus_transform(posy: LabelPosynomial) -> LabelPosynomial:
    """One polarization step along the degraded branch, in linear time.

    The coefficient at ``t`` aggregates, over label pairs ``(t_a, t_b)`` whose
    min-sum combination equals ``t``, twice the product of the input
    coefficients.  Folding the strict parts through the reflected
    above/below prefix sums and handling the boundary pairs per sign of ``t``
    keeps the whole step O(range).  The exponent range is unchanged.
    """
    c = posy.coeffs
    t_max = posy.t_max
    rev = c[::-1]
    pos_above = _pos_fold(_suffix_sums(c), t_max)
    neg_below = _neg_fold(_prefix_sums(c), t_max)

    out = 4.0 * c * pos_above + 4.0 * rev * neg_below
    # boundary pairs: (t, t) and (-t, -t) land on positive t, while the mixed
    # pairs (t, -t) and (-t, t) land on negative t; at t = 0 only the single
    # all-zero pair remains
    out[t_max + 1 :] += 2.0 * (c[t_max + 1 :] ** 2 + rev[t_max + 1 :] ** 2)
    out[:t_max] += 4.0 * c[:t_max] * rev[:t_max]
    out[t_max] += 2.0 * c[t_max] ** 2

    out = _renormalize(out, _transform_target(c.sum()), _MINUS_DRIFT_TOL)
    return LabelPosynomial(t_max, out, copy=False)


def error_probability(posy: LabelPosynomial) -> float:
    """Exact genie-aided decision error: mass at ``t = 0`` plus twice the
    mass at negative exponents."""
    c = posy.coeffs
    pe = float(c[posy.t_max] + 2.0 * c[: posy.t_max].sum())
    return min(max(pe, 0.0), 1.0)


def z_value(posy: LabelPosynomial, xi0: float) -> float:
    """Bhattacharyya-like bound ``2 * P(xi0)`` for ``0 < xi0 <= 1``."""
    if not (0.0 < xi0 <= 1.0):
        raise ValueError(f"xi0 must be in (0, 1], got {xi0}")
    return 2.0 * evaluate(posy, xi0)


class ZStar(NamedTuple):
    value: float
    xi: float


def z_star(posy: LabelPosynomial) -> ZStar:
    """Tightest Bhattacharyya-like bound over ``xi`` in ``(0, 1]``.

    The objective is convex in ``u = log2(xi)``; a ternary search over
    ``u in [-64, 0]`` locates the minimum to better than 1e-12 in the bound.
    When no mass sits at negative exponents the infimum is approached as
    ``xi -> 0`` and is returned with the sentinel ``xi = 0`` (for mass only
    at ``t = 0`` the bound is constant and ``(value, 1.0)`` is returned).
    """
    values, xis = _z_star_batch(posy.coeffs[np.newaxis, :], posy.t_max)
    return ZStar(float(values[0]), float(xis[0]))


def mutual_information(posy: LabelPosynomial) -> float:
    """Mutual information in bits of the channel the posynomial describes.

    Uses only the stored input-0 row; the input-1 row is its mirror image.
    """
    c = posy.coeffs
    m = c + c[::-1]
    mask = c > 0.0
    terms = c[mask] * np.log2(2.0 * c[mask] / m[mask])
    return float(min(max(2.0 * terms.sum(), 0.0), 1.0))


# ---------------------------------------------------------------------------
# internals

def _transform_target(total):
    """Post-transform mass: exactly 1/2 for normalized inputs so rounding
    drift never compounds along deep transform chains, else the algebraic
    value ``2 * total**2``."""
    return np.where(np.abs(total - 0.5) <= _NORM_TOL, 0.5, 2.0 * total**2)


def _suffix_sums(c: np.ndarray) -> np.ndarray:
    out = np.zeros_like(c)
    out[:-1] = np.cumsum(c[::-1])[::-1][1:]
    return out


def _prefix_sums(c: np.ndarray) -> np.ndarray:
    out = np.zeros_like(c)
    out[1:] = np.cumsum(c)[:-1]
    return out


def _minus_rows(mat: np.ndarray) -> np.ndarray:
    """Row-wise minus transform of same-range posynomials (see
    ``minus_transform`` for the derivation)."""
    t_max = (mat.shape[1] - 1) // 2
    rev = mat[:, ::-1]
    above_ = np.zeros_like(mat)
    above_[:, :-1] = np.cumsum(rev, axis=1)[:, ::-1][:, 1:]
    below_ = np.zeros_like(mat)
    below_[:, 1:] = np.cumsum(mat, axis=1)[:, :-1]
    pos_above = above_.copy()
    pos_above[:, :t_max] = above_[:, ::-1][:, :t_max]
    neg_below = below_.copy()
    neg_below[:, t_max + 1 :] = below_[:, ::-1][:, t_max + 1 :]

    out = 4.0 * (mat * pos_above + rev * neg_below)
    out[:, t_max + 1 :] += 2.0 * (mat[:, t_max + 1 :] ** 2 + rev[:, t_max + 1 :] ** 2)
    out[:, :t_max] += 4.0 * mat[:, :t_max] * rev[:, :t_max]
    out[:, t_max] += 2.0 * mat[:, t_max] ** 2
    return _renormalize_rows(out, _transform_target(mat.sum(axis=1)), _MINUS_DRIFT_TOL)


def _plus_rows(mat: np.ndarray) -> np.ndarray:
    """Row-wise plus transform; ranges double.  Rows are squared together
    through one batched FFT (pointwise identical math to ``_square_fft``)."""
    width = mat.shape[1]
    out_len = 2 * width - 1
    nfft = 1 << (out_len - 1).bit_length()
    spec = np.fft.rfft(mat, nfft, axis=1)
    np.multiply(spec, spec, out=spec)
    out = np.fft.irfft(spec, nfft, axis=1)[:, :out_len]
    tiny = (out < 0.0) & (out >= -_FFT_CLAMP)
    out[tiny] = 0.0
    if np.any(out < 0.0):
        raise ValueError("FFT squaring produced negative coefficients beyond 1e-15")
    out *= 2.0
    target = _transform_target(mat.sum(axis=1))
    return _renormalize_rows(out, target, _FFT_DRIFT_TOL * np.maximum(target, 1e-300))


def _renormalize_rows(out: np.ndarray, target: np.ndarray, tol) -> np.ndarray:
    totals = out.sum(axis=1)
    if np.any(np.abs(totals - target) > tol):
        worst = float(np.max(np.abs(totals - target)))
        raise ValueError(f"normalization drift {worst!r} exceeds tolerance")
    scale = np.divide(target, totals, out=np.ones_like(totals), where=totals > 0.0)
    out *= scale[:, np.newaxis]
    return out


def _pos_fold(c: np.ndarray, t_max: int) -> np.ndarray:
    out = c.copy()
    out[:t_max] = c[::-1][:t_max]
    return out


def _neg_fold(c: np.ndarray, t_max: int) -> np.ndarray:
    out = c.copy()
    out[t_max + 1 :] = c[::-1][t_max + 1 :]
    return out


def _square_direct(c: np.ndarray) -> np.ndarray:
    return np.convolve(c, c)


def _square_fft(c: np.ndarray) -> np.ndarray:
    out_len = 2 * c.size - 1
    nfft = 1 << (out_len - 1).bit_length()
    spec = np.fft.rfft(c, nfft)
    out = np.fft.irfft(spec * spec, nfft)[:out_len]
    tiny = (out < 0.0) & (out >= -_FFT_CLAMP)
    out[tiny] = 0.0
    if np.any(out < 0.0):
        raise ValueError("FFT squaring produced negative coefficients beyond 1e-15")
    return out


def _square(c: np.ndarray) -> np.ndarray:
    if c.size <= _DIRECT_MAX_LEN:
        return _square_direct(c)
    return _square_fft(c)


def _renormalize(out: np.ndarray, target: float, tol: float) -> np.ndarray:
    drift = out.sum() - target
    if abs(drift) > tol:
        raise ValueError(
            f"normalization drift {drift!r} exceeds tolerance {tol!r}"
        )
    if target > 0.0 and out.sum() > 0.0:
        out *= target / out.sum()
    return out


def _z_star_groups(groups):
    """The z_star search for groups of posynomials of mixed exponent ranges.

    ``groups`` is a list of ``(matrix, t_max)`` pairs; results come back in
    group-major row order.  The searched rows are flattened into one segment
    vector so each ternary iteration is a fixed handful of whole-buffer
    passes plus a segmented sum: the total work is proportional to the summed
    row widths, with no per-row interpreter cost.
    """
    count = sum(mat.shape[0] for mat, _ in groups)
    values = np.empty(count)
    xis = np.empty(count)

    coeff_parts = []
    expo_parts = []
    length_parts = []
    searched_ids = []
    offset = 0
    for mat, t_max in groups:
        rows = mat.shape[0]
        ids = np.arange(offset, offset + rows)
        offset += rows
        center = mat[:, t_max]
        if t_max == 0:
            values[ids] = 2.0 * center
            xis[ids] = 1.0
            continue
        has_neg = mat[:, :t_max].any(axis=1)
        has_pos = mat[:, t_max + 1 :].any(axis=1)
        special = ~has_neg
        if special.any():
            # positive-only support: the bound decays to the center mass at
            # the open boundary xi -> 0; center-only rows are constant
            values[ids[special]] = 2.0 * center[special]
            xis[ids[special]] = np.where(has_pos[special], 0.0, 1.0)
        if has_neg.any():
            sub = mat[has_neg]
            coeff_parts.append(sub.ravel())
            grid = np.arange(-t_max, t_max + 1, dtype=np.float64)
            expo_parts.append(np.tile(grid, sub.shape[0]))
            length_parts.append(np.full(sub.shape[0], grid.size, dtype=np.intp))
            searched_ids.append(ids[has_neg])
    if not searched_ids:
        return values, xis

    coeff = np.concatenate(coeff_parts)
    expo = np.concatenate(expo_parts)
    lengths = np.concatenate(length_parts)
    searched = np.concatenate(searched_ids)
    starts = np.zeros(lengths.size, dtype=np.intp)
    np.cumsum(lengths[:-1], out=starts[1:])
    totals = np.add.reduceat(coeff, starts)

    def z_at(u):
        e = np.repeat(u, lengths) * expo
        np.minimum(e, 1020.0, out=e)  # zero coefficients never meet an overflow
        np.exp2(e, out=e)
        e *= coeff
        return 2.0 * np.add.reduceat(e, starts)

    nsearch = searched.size
    lo = np.full(nsearch, _U_LO)
    hi = np.zeros(nsearch)
    ln2 = math.log(2.0)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        for _ in range(_TERNARY_ITERS):
            third = (hi - lo) / 3.0
            z1 = z_at(lo + third)
            z2 = z_at(hi - third)
            # strict comparison: on exact ties (value plateaus, such as the
            # capped far-left region) the minimum provably lies right of the
            # first probe, so the right segment must be the one kept
            left = z1 < z2
            hi = np.where(left, hi - third, hi)
            lo = np.where(left, lo, lo + third)
        u = 0.5 * (lo + hi)
        z = z_at(u)
        # deep in the search the comparisons sit on the rounding plateau of
        # the objective, so the bracket can drift off the minimizer by the
        # plateau width; Newton steps on the (strictly convex) objective,
        # confined to a margin around the bracket, recover full precision
        newton_lo = np.maximum(lo - 1e-3, _U_LO)
        newton_hi = np.minimum(hi + 1e-3, 0.0)
        for _ in range(_NEWTON_ITERS):
            e = np.repeat(u, lengths) * expo
            np.minimum(e, 1020.0, out=e)
            np.exp2(e, out=e)
            e *= coeff
            s1 = np.add.reduceat(e * expo, starts)
            s2 = np.add.reduceat(e * expo * expo, starts)
            step = np.divide(s1, ln2 * s2, out=np.zeros_like(u), where=s2 > 0.0)
            u = np.clip(u - step, newton_lo, newton_hi)
        z_new = z_at(u)
        better = np.isfinite(z_new) & (z_new <= z)
        z = np.where(better, z_new, z)
        u = np.where(better, u, 0.5 * (lo + hi))
        # the endpoint xi = 1 is exact: twice the total mass
        z_end = 2.0 * totals
        at_end = z_end <= z
        z = np.where(at_end, z_end, z)
        u = np.where(at_end, 0.0, u)
    values[searched] = z
    xis[searched] = np.exp2(u)
    return values, xis


def _z_star_batch(mat: np.ndarray, t_max: int):
    """Row-wise z_star for a batch of posynomials sharing one exponent range."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.float64))
    return _z_star_groups([(mat, t_max)])
