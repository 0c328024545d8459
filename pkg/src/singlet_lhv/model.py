"""Hidden-orientation model of an entangled particle pair.

A hidden configuration of the pair is a single angular coordinate on the
circle [-pi, pi).  The same configuration is described in the frame of
apparatus A by ``omega_a`` and in the frame of apparatus B by

    omega_b = wrap(-circle_transform_n(omega_a, delta, n))

where ``delta = wrap(d_omega - phi)`` is the only physical setting
parameter: the relative apparatus angle minus the state phase.  A strong
measurement returns the sign of the coordinate in the local frame, with
the half-open convention that [0, pi) maps to +1.

``circle_transform`` is a continuous, strictly increasing, degree-one
circle map built from four arccos branches.  On every branch the cosine
of the image differs from the cosine of the argument by a constant, so
the density ``orientation_density`` (proportional to |sin|) is exactly
invariant under the map.  ``circle_transform_n`` generalizes the map to
the density family |sin(n w)|/4 and converges uniformly to the linear
map ``wrap(omega - delta)`` as n grows.

Angle-valued functions accept floats or numpy arrays and always return
values wrapped to [-pi, pi).  Wrapping is done by constructors and by
the functions themselves; callers never need to pre-wrap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Branch algebra keeps arccos arguments inside [-1, 1] exactly; anything
# beyond this tolerance is a branch-selection bug, not rounding.
ACOS_CLAMP_TOL = 1e-12


class AcosDomainError(ArithmeticError):
    """An arccos argument strayed outside [-1, 1] beyond rounding error."""


def _as_float_array(x, name="angle"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite {name} rejected")
    return arr


def _maybe_scalar(out, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(out)
    return out


def wrap_angle(x):
    """Wrap radians to the half-open interval [-pi, pi); wrap(pi) == -pi.

    Values already in range pass through bit-exactly (the mod form
    would absorb magnitudes below one ulp of pi).
    """
    arr = _as_float_array(x)
    out = np.where(
        (arr >= -np.pi) & (arr < np.pi),
        arr,
        np.mod(arr + np.pi, TWO_PI) - np.pi,
    )
    return _maybe_scalar(out, x)


def circle_distance(a, b):
    """Absolute distance between two angles measured along the circle."""
    return np.abs(wrap_angle(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def branch_sign(omega, delta):
    """Sign selector for the transform: -1 where wrap(omega - delta) < 0.

    sign(0) is fixed to +1; at the only point where the choice could
    matter the arccos factor vanishes, so it is observationally inert.
    """
    rel = wrap_angle(np.asarray(omega, dtype=float) - np.asarray(delta, dtype=float))
    out = np.where(np.asarray(rel) >= 0.0, 1.0, -1.0)
    return _maybe_scalar(out, omega, delta)


def _acos_checked(u):
    bad = np.max(np.abs(u)) - 1.0 if np.size(u) else 0.0
    if bad > ACOS_CLAMP_TOL:
        raise AcosDomainError(
            f"arccos argument excursion {bad:.3e} beyond [-1, 1]; branch selection is broken"
        )
    return np.arccos(np.clip(u, -1.0, 1.0))


def circle_transform(omega, delta):
    """Measure-preserving frame transform for density index n = 1.

    Four half-open branches, cut at {delta - pi, 0, delta} for
    delta >= 0 and at {delta, 0, delta + pi} for delta < 0.  Continuous
    on the circle, strictly increasing, and satisfies
    |d cos(out)| = |d cos(omega)| on every branch.
    """
    o = wrap_angle(omega)
    d = wrap_angle(delta)
    o_arr, d_arr = np.broadcast_arrays(np.asarray(o), np.asarray(d))
    cos_o = np.cos(o_arr)
    cos_d = np.cos(d_arr)

    pos = d_arr >= 0.0
    masks = [
        pos & (o_arr < d_arr - np.pi),
        pos & (o_arr >= d_arr - np.pi) & (o_arr < 0.0),
        pos & (o_arr >= 0.0) & (o_arr < d_arr),
        pos & (o_arr >= d_arr),
        ~pos & (o_arr < d_arr),
        ~pos & (o_arr >= d_arr) & (o_arr < 0.0),
        ~pos & (o_arr >= 0.0) & (o_arr < d_arr + np.pi),
        ~pos & (o_arr >= d_arr + np.pi),
    ]
    choices = [
        -cos_d - cos_o - 1.0,
        cos_d + cos_o - 1.0,
        cos_d - cos_o + 1.0,
        -cos_d + cos_o + 1.0,
        -cos_d + cos_o + 1.0,
        cos_d - cos_o + 1.0,
        cos_d + cos_o - 1.0,
        -cos_d - cos_o - 1.0,
    ]
    u = np.select(masks, choices)
    out = wrap_angle(branch_sign(o_arr, d_arr) * _acos_checked(u))
    return _maybe_scalar(out, omega, delta)


def circle_transform_n(omega, delta, n=1):
    """Frame transform preserving the density |sin(n w)|/4.

    Defined as the linear map plus the n = 1 deviation evaluated on the
    n-fold covering and scaled down by n:

        wrap(omega - delta) + wrap(T(wrap(n omega), wrap(n delta)) - wrap(n (omega - delta))) / n

    with T = circle_transform.  This collapses to circle_transform at
    n = 1, preserves |sin(n w)|/4 because n times it equals
    T(n omega; n delta) modulo 2 pi, and approaches the linear map
    uniformly with deviation bounded by sup|T - linear| / n.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"density index must be a positive integer, got {n!r}")
    n = int(n)
    if n == 1:
        return circle_transform(omega, delta)
    o = _as_float_array(omega)
    d = _as_float_array(delta)
    lin = wrap_angle(o - d)
    inner = circle_transform(wrap_angle(n * o), wrap_angle(n * d))
    deviation = wrap_angle(inner - wrap_angle(n * o - n * d))
    out = wrap_angle(lin + deviation / n)
    return _maybe_scalar(out, omega, delta)


def linear_reference(omega, delta):
    """The linear frame map wrap(omega - delta), the n -> infinity limit."""
    return wrap_angle(np.asarray(omega, dtype=float) - np.asarray(delta, dtype=float))


def orientation_density(omega, n=1):
    """Probability density |sin(n w)| / 4 of hidden orientations."""
    out = 0.25 * np.abs(np.sin(n * np.asarray(omega, dtype=float)))
    return _maybe_scalar(out, omega)


def orientation_cdf(omega, n=1):
    """Closed-form CDF of orientation_density on [-pi, pi).

    Each half-period cell of width pi/n carries mass 1/(2n); inside a
    cell the mass accumulates as (1 - cos(n r)) / (4 n), evaluated in
    the cancellation-free half-angle form sin^2(n r / 2) / (2 n).
    """
    o = np.asarray(omega, dtype=float)
    cell = np.pi / n
    m = np.floor((o + np.pi) / cell)
    m = np.clip(m, 0, 2 * n)
    r = o - (-np.pi + m * cell)
    out = m / (2.0 * n) + np.sin(0.5 * n * r) ** 2 / (2.0 * n)
    return _maybe_scalar(out, omega)


def sample_orientations(rng, size, n=1):
    """Draw hidden orientations with density |sin(n w)|/4, vectorized.

    Inverse-CDF in the cosine variable: u uniform on the open (-1, 1),
    a fair sign, then wrap(sign * acos(u)).  The open interval makes the
    zero-density poles {0, -pi} unreachable, so exact anti-correlation
    at delta = 0 holds for every emitted sample.  For n > 1 the n = 1
    draw is compressed into one double cell and shifted by a uniformly
    chosen whole cell.

    Draw order per call is fixed (u block, sign block, cell block) so a
    seeded generator reproduces the same samples.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"density index must be a positive integer, got {n!r}")
    n = int(n)
    r = rng.random(size)
    while True:
        zero = r == 0.0
        if not zero.any():
            break
        r[zero] = rng.random(int(zero.sum()))
    u = 2.0 * r - 1.0
    sign = 2.0 * rng.integers(0, 2, size=size) - 1.0
    omega = sign * np.arccos(u)
    if n == 1:
        return wrap_angle(omega)
    k = rng.integers(0, 2 * n, size=size)
    return wrap_angle(omega / n + k * (np.pi / n))


def sample_hidden(rng, n=1) -> "HiddenConfig":
    """Draw a single hidden configuration (see sample_orientations)."""
    return HiddenConfig(float(sample_orientations(rng, 1, n)[0]))


def response(omega):
    """Strong-measurement outcome: +1 on [0, pi), -1 on [-pi, 0)."""
    out = np.where(np.asarray(omega, dtype=float) >= 0.0, 1, -1)
    return int(out) if np.ndim(omega) == 0 else out


@dataclass(frozen=True)
class MeasurementSetting:
    """Relative apparatus angle, state phase, and density index.

    Only the combination delta = wrap(d_omega - phi) is physical.
    """

    delta_omega: float
    phi: float = 0.0
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "delta_omega", wrap_angle(self.delta_omega))
        object.__setattr__(self, "phi", wrap_angle(self.phi))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"density index must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def delta(self) -> float:
        return wrap_angle(self.delta_omega - self.phi)

    @classmethod
    def from_delta(cls, delta, n=1):
        return cls(delta_omega=wrap_angle(delta), phi=0.0, n=n)

    def rotated(self, extra_rotation: float) -> "MeasurementSetting":
        """Setting after rotating the apparatus by an additional angle.

        Equivalently: re-anchor to the current frame, where the pair
        appears with phase wrap(phi - delta_omega), and rotate by
        extra_rotation.  Both readings give the parameter
        wrap(extra_rotation + delta_omega - phi).
        """
        return MeasurementSetting(
            delta_omega=wrap_angle(self.delta_omega + extra_rotation),
            phi=self.phi,
            n=self.n,
        )


@dataclass(frozen=True)
class HiddenConfig:
    """One hidden configuration: orientation in the A-apparatus frame."""

    omega_a: float

    def __post_init__(self):
        object.__setattr__(self, "omega_a", wrap_angle(self.omega_a))


@dataclass(frozen=True)
class TrialOutcome:
    s_a: int
    s_b: int
    omega_a: float


def b_frame_coordinate(omega_a, setting: MeasurementSetting):
    """Orientation of the configuration as seen from apparatus B."""
    return wrap_angle(-circle_transform_n(omega_a, setting.delta, setting.n))


def responses_for(omega_a, setting: MeasurementSetting):
    """Vectorized pair of outcomes (s_a, s_b) for orientations omega_a."""
    s_a = response(omega_a)
    s_b = response(b_frame_coordinate(omega_a, setting))
    return s_a, s_b


def measure_pair(config, setting: MeasurementSetting) -> TrialOutcome:
    """Outcome pair produced by one hidden configuration.

    The +1 region for B is the arc (delta - pi, delta]; it differs from
    the half-open subset table used by coarse_partition only at the two
    boundary points, which carry zero density.
    """
    omega = config.omega_a if isinstance(config, HiddenConfig) else float(config)
    s_a, s_b = responses_for(omega, setting)
    return TrialOutcome(s_a=int(s_a), s_b=int(s_b), omega_a=wrap_angle(omega))
