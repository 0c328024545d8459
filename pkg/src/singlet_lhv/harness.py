"""Seeded, stream-parallel Monte Carlo experiment runner.

Randomness comes from counter-based Philox generators: each stream owns
an independent generator keyed by a hash of (seed, stream index), draws
are made in fixed blocks, and per-stream tallies are exact integers
merged in stream-index order.  Results therefore depend only on
(seed, trials, stream partition), never on execution or merge timing,
and are reproducible across platforms (uniform doubles use the 53-bit
construction).

Streams are embarrassingly parallel; when more than one stream is
requested the tally loop runs them on a small thread pool (numpy
releases the GIL) and still reduces in index order.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .analytic import ChshSetting, correlation
from .model import (
    MeasurementSetting,
    b_frame_coordinate,
    circle_transform_n,
    response,
    sample_orientations,
    wrap_angle,
)

MAX_TALLY_WORKERS = 8


@dataclass(frozen=True)
class RunConfig:
    """Size, seeding, and setting of one Monte Carlo run."""

    trials: int
    seed: int
    streams: int = 1
    setting: MeasurementSetting = field(
        default_factory=lambda: MeasurementSetting(delta_omega=0.0)
    )
    gauge_fixed: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.streams < 1:
            raise ValueError("streams must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def with_setting(self, setting: MeasurementSetting) -> "RunConfig":
        return replace(self, setting=setting)


@dataclass(frozen=True)
class EstimateWithError:
    """Point estimate with standard error and the trial count behind it."""

    value: float
    std_error: float
    n: int

    @classmethod
    def for_product_mean(cls, product_sum: int, n: int) -> "EstimateWithError":
        value = product_sum / n
        return cls(value=value, std_error=float(np.sqrt(max(0.0, 1.0 - value * value) / n)), n=n)


def partition_streams(seed, streams, trials):
    """Deterministic per-stream (sub_seed, sub_count) assignments.

    Sub-seeds are 128-bit integers derived by hashing (seed, index);
    counts split trials as evenly as possible, remainder to the lowest
    indices.
    """
    if streams < 1:
        raise ValueError("streams must be >= 1")
    base, extra = divmod(int(trials), int(streams))
    out = []
    for idx in range(streams):
        digest = hashlib.sha256(f"{int(seed)}:{idx}".encode("ascii")).digest()
        sub_seed = int.from_bytes(digest[:16], "little")
        count = base + (1 if idx < extra else 0)
        out.append((sub_seed, count))
    return out


def stream_generator(sub_seed) -> np.random.Generator:
    """Philox generator keyed directly by a 128-bit sub-seed."""
    return np.random.Generator(np.random.Philox(key=sub_seed))


def _map_streams(worker, assignments):
    """Run worker(sub_seed, count) per stream; results in index order."""
    jobs = [(s, c) for s, c in assignments if c > 0]
    if len(jobs) <= 1:
        return [worker(s, c) for s, c in jobs]
    with ThreadPoolExecutor(max_workers=min(len(jobs), MAX_TALLY_WORKERS)) as pool:
        futures = [pool.submit(worker, s, c) for s, c in jobs]
        return [f.result() for f in futures]


@dataclass(frozen=True)
class TrialTally:
    """Exact integer outcome counts for one joint-measurement run."""

    n: int
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int

    def __add__(self, other: "TrialTally") -> "TrialTally":
        return TrialTally(
            n=self.n + other.n,
            n_pp=self.n_pp + other.n_pp,
            n_pm=self.n_pm + other.n_pm,
            n_mp=self.n_mp + other.n_mp,
            n_mm=self.n_mm + other.n_mm,
        )

    @property
    def product_sum(self) -> int:
        return self.n_pp + self.n_mm - self.n_pm - self.n_mp

    @property
    def discordant(self) -> int:
        """Trials that failed to anti-correlate."""
        return self.n_pp + self.n_mm

    def frequencies(self):
        return {
            "p_pp": self.n_pp / self.n,
            "p_pm": self.n_pm / self.n,
            "p_mp": self.n_mp / self.n,
            "p_mm": self.n_mm / self.n,
        }


EMPTY_TALLY = TrialTally(0, 0, 0, 0, 0)


def stream_tallies(config: RunConfig) -> list[TrialTally]:
    """Per-stream outcome tallies, ordered by stream index."""
    setting = config.setting

    def worker(sub_seed, count):
        rng = stream_generator(sub_seed)
        omega = sample_orientations(rng, count, setting.n)
        s_a = response(omega)
        s_b = response(b_frame_coordinate(omega, setting))
        pos_a = s_a > 0
        pos_b = s_b > 0
        n_pp = int(np.count_nonzero(pos_a & pos_b))
        n_pm = int(np.count_nonzero(pos_a & ~pos_b))
        n_mp = int(np.count_nonzero(~pos_a & pos_b))
        n_mm = count - n_pp - n_pm - n_mp
        return TrialTally(n=count, n_pp=n_pp, n_pm=n_pm, n_mp=n_mp, n_mm=n_mm)

    return _map_streams(worker, partition_streams(config.seed, config.streams, config.trials))


def tally_outcomes(config: RunConfig) -> TrialTally:
    """Sample hidden orientations and tally the four joint outcomes."""
    return sum(stream_tallies(config), EMPTY_TALLY)


def estimate_correlation(config: RunConfig) -> EstimateWithError:
    """Monte Carlo mean of the outcome product s_a * s_b."""
    tally = tally_outcomes(config)
    return EstimateWithError.for_product_mean(tally.product_sum, tally.n)


@dataclass(frozen=True)
class ScanRow:
    delta: float
    estimate: float
    std_error: float
    analytic: float
    n: int


def scan_correlation(delta_grid: Sequence[float], config: RunConfig) -> list[ScanRow]:
    """One correlation estimate per effective parameter value.

    Each grid point runs with phi = 0 and delta_omega = delta under the
    same (seed, streams) configuration.  The analytic column is the
    n = 1 closed form -cos(delta); for n > 1 it is a reference curve
    only (no closed form exists for the estimate's expectation).
    """
    rows = []
    for delta in delta_grid:
        setting = MeasurementSetting.from_delta(delta, n=config.setting.n)
        est = estimate_correlation(config.with_setting(setting))
        rows.append(
            ScanRow(
                delta=float(wrap_angle(delta)),
                estimate=est.value,
                std_error=est.std_error,
                analytic=float(correlation(delta)),
                n=est.n,
            )
        )
    return rows


@dataclass(frozen=True)
class ChshEstimate:
    estimate: EstimateWithError
    analytic: float
    out_of_range_fraction: float | None
    per_trial_counts: dict[int, int] | None


def estimate_chsh(setting: ChshSetting, config: RunConfig) -> ChshEstimate:
    """Monte Carlo CHSH estimate.

    Gauge-fixed mode (default): one hidden orientation per trial is
    evaluated against the four relative B orientations, forming the
    per-trial variable s_a * (s1 + s2 + s3 - s4) whose values lie in
    {0, +-2, +-4}; the fraction outside [-2, 2] is reported along with
    the exact per-value counts.  Orthodox mode draws independent trials
    for each of the four correlations and reports their combination.
    """
    orientations = setting.relative_orientations()
    phi = config.setting.phi
    n_index = config.setting.n

    if config.gauge_fixed:
        deltas = [wrap_angle(r - phi) for r in orientations]

        def worker(sub_seed, count):
            rng = stream_generator(sub_seed)
            omega = sample_orientations(rng, count, n_index)
            s_a = response(omega)
            terms = []
            for d in deltas:
                ms = MeasurementSetting(delta_omega=d, phi=0.0, n=n_index)
                terms.append(response(b_frame_coordinate(omega, ms)))
            x = s_a * (terms[0] + terms[1] + terms[2] - terms[3])
            values, counts = np.unique(x, return_counts=True)
            return {int(v): int(c) for v, c in zip(values, counts)}

        partials = _map_streams(
            worker, partition_streams(config.seed, config.streams, config.trials)
        )
        counts: dict[int, int] = {}
        for partial in partials:
            for v, c in partial.items():
                counts[v] = counts.get(v, 0) + c
        n = sum(counts.values())
        total = sum(v * c for v, c in counts.items())
        total_sq = sum(v * v * c for v, c in counts.items())
        mean = total / n
        var = max(0.0, total_sq / n - mean * mean)
        est = EstimateWithError(value=mean, std_error=float(np.sqrt(var / n)), n=n)
        outside = sum(c for v, c in counts.items() if abs(v) > 2)
        return ChshEstimate(
            estimate=est,
            analytic=float(
                correlation(deltas[0])
                + correlation(deltas[1])
                + correlation(deltas[2])
                - correlation(deltas[3])
            ),
            out_of_range_fraction=outside / n,
            per_trial_counts=dict(sorted(counts.items())),
        )

    signs = (1.0, 1.0, 1.0, -1.0)
    value = 0.0
    variance = 0.0
    for k, (sign, rel) in enumerate(zip(signs, orientations)):
        # fresh trials per orientation: derive a distinct sub-seed so the
        # four correlations use disjoint sample sets
        digest = hashlib.sha256(f"{int(config.seed)}/orientation:{k}".encode("ascii")).digest()
        sub = replace(
            config,
            seed=int.from_bytes(digest[:8], "little"),
            setting=MeasurementSetting(delta_omega=rel, phi=phi, n=n_index),
        )
        est = estimate_correlation(sub)
        value += sign * est.value
        variance += est.std_error**2
    return ChshEstimate(
        estimate=EstimateWithError(value=value, std_error=float(np.sqrt(variance)), n=config.trials),
        analytic=float(
            sum(
                sign * correlation(wrap_angle(rel - phi))
                for sign, rel in zip(signs, orientations)
            )
        ),
        out_of_range_fraction=None,
        per_trial_counts=None,
    )


@dataclass(frozen=True)
class WZTrialRecord:
    alpha: float
    beta: float
    s_a: int
    s_b: int
    omega_a: float


@dataclass(frozen=True)
class WZResult:
    pair_tallies: dict[tuple[float, float], TrialTally]
    chsh_pairs: tuple[tuple[float, float], ...]
    chsh: EstimateWithError
    records: tuple[WZTrialRecord, ...]

    def pair_correlations(self):
        return {
            pair: EstimateWithError.for_product_mean(t.product_sum, t.n)
            for pair, t in self.pair_tallies.items()
            if t.n > 0
        }


def run_weihs_zeilinger(
    base_phi,
    alpha_choices: Sequence[float],
    beta_choices: Sequence[float],
    config: RunConfig,
    keep_records: int = 0,
) -> WZResult:
    """Modulator experiment: random per-trial phase twists.

    Each trial independently draws modulator angles alpha and beta
    uniformly from their choice sets; together they shift the state
    phase to phi - (alpha + beta), so the trial runs at the effective
    parameter wrap(d_omega - phi + alpha + beta).  Per-(alpha, beta)
    tallies are returned together with the CHSH combination over the
    designated 2x2 sub-grid (the first two sorted angles of each set;
    sign convention E(a,b) + E(a,b') + E(a',b) - E(a',b')).

    ``keep_records`` retains that many trial records from the start of
    each stream (for dump/inspection; tallies always use all trials).
    """
    alphas = sorted(float(wrap_angle(a)) for a in set(alpha_choices))
    betas = sorted(float(wrap_angle(b)) for b in set(beta_choices))
    if not alphas or not betas:
        raise ValueError("modulator choice sets must be non-empty")
    phi = wrap_angle(base_phi)
    d_omega = config.setting.delta_omega
    n_index = config.setting.n
    alpha_arr = np.array(alphas)
    beta_arr = np.array(betas)

    def worker(sub_seed, count):
        rng = stream_generator(sub_seed)
        ai = rng.integers(0, len(alphas), size=count)
        bi = rng.integers(0, len(betas), size=count)
        omega = sample_orientations(rng, count, n_index)
        delta = wrap_angle(d_omega - phi + alpha_arr[ai] + beta_arr[bi])
        s_a = response(omega)
        omega_b = wrap_angle(-circle_transform_n(omega, delta, n_index))
        s_b = response(omega_b)
        tallies = {}
        for i, a in enumerate(alphas):
            for j, b in enumerate(betas):
                mask = (ai == i) & (bi == j)
                cnt = int(np.count_nonzero(mask))
                pos_a = s_a[mask] > 0
                pos_b = s_b[mask] > 0
                n_pp = int(np.count_nonzero(pos_a & pos_b))
                n_pm = int(np.count_nonzero(pos_a & ~pos_b))
                n_mp = int(np.count_nonzero(~pos_a & pos_b))
                tallies[(a, b)] = TrialTally(
                    n=cnt, n_pp=n_pp, n_pm=n_pm, n_mp=n_mp, n_mm=cnt - n_pp - n_pm - n_mp
                )
        records = tuple(
            WZTrialRecord(
                alpha=float(alpha_arr[ai[k]]),
                beta=float(beta_arr[bi[k]]),
                s_a=int(s_a[k]),
                s_b=int(s_b[k]),
                omega_a=float(omega[k]),
            )
            for k in range(min(keep_records, count))
        )
        return tallies, records

    partials = _map_streams(
        worker, partition_streams(config.seed, config.streams, config.trials)
    )
    pair_tallies = {(a, b): EMPTY_TALLY for a in alphas for b in betas}
    records: list[WZTrialRecord] = []
    for tallies, recs in partials:
        for pair, tally in tallies.items():
            pair_tallies[pair] = pair_tallies[pair] + tally
        records.extend(recs)

    chsh_pairs = tuple(
        (a, b) for a in alphas[:2] for b in betas[:2]
    )
    value = 0.0
    variance = 0.0
    if len(alphas) >= 2 and len(betas) >= 2:
        signs = {
            (alphas[0], betas[0]): 1.0,
            (alphas[0], betas[1]): 1.0,
            (alphas[1], betas[0]): 1.0,
            (alphas[1], betas[1]): -1.0,
        }
        for pair, sign in signs.items():
            t = pair_tallies[pair]
            if t.n == 0:
                raise ValueError(f"no trials observed for modulator pair {pair}")
            est = EstimateWithError.for_product_mean(t.product_sum, t.n)
            value += sign * est.value
            variance += est.std_error**2
    else:
        t = pair_tallies[(alphas[0], betas[0])]
        est = EstimateWithError.for_product_mean(t.product_sum, t.n)
        value, variance = est.value, est.std_error**2
    return WZResult(
        pair_tallies=pair_tallies,
        chsh_pairs=chsh_pairs,
        chsh=EstimateWithError(value=value, std_error=float(np.sqrt(variance)), n=config.trials),
        records=tuple(records),
    )
