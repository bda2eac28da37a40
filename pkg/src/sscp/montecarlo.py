"""Seeded Monte-Carlo estimate of the SSCP by simulating the protocol end to end.

Trials are split into fixed-size chunks.  Chunk ``i`` draws from its own
Philox stream keyed by ``(seed, i)``, so the estimate depends only on
``(seed, trials, batch)`` and never on how many workers run the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import FadingSpec
from .protocol import (
    ChannelDraw,
    SecrecySnapshot,
    capacities_and_secrecy,
    sinrs,
    success_event,
    threshold_event,
    thresholds,
    z_coefficients,
)
from .sysmodel import ScenarioConfig, SscpEstimate, validate_config

__all__ = [
    "EventMismatch",
    "McConfig",
    "chunk_rng",
    "draw_channels",
    "estimate_sscp",
    "simulate_batch",
    "simulate_once",
]

CHECK_EVENTS = os.environ.get("SSCP_CHECK_EVENTS", "") == "1"


class EventMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    seed: int = 0
    workers: int = 1
    batch: int = 1 << 16

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.batch < 1 or self.workers < 1:
            raise ValueError("batch and workers must be >= 1")


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Independent counter-based stream for one chunk."""
    key = np.random.SeedSequence([seed & (2**64 - 1), chunk]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_channels(cfg: ScenarioConfig, rng: np.random.Generator, n: int) -> ChannelDraw:
    """Channel powers of the selected devices for ``n`` rounds (array fields)."""
    m = cfg.m
    fu, nu, fe, ne = (FadingSpec(m, cfg.xi(k)) for k in ("fu", "nu", "fe", "ne"))
    # best device per cluster: largest estimated channel power
    a = rng.gamma(m, 1.0 / fu.rate, size=(n, cfg.K)).max(axis=1)
    b = rng.gamma(m, 1.0 / nu.rate, size=(n, cfg.Q)).max(axis=1)
    # eavesdropper legs of the selected devices, independent of the selection
    x = rng.gamma(m, 1.0 / fe.rate, size=n)
    y = rng.gamma(m, 1.0 / ne.rate, size=n)
    return ChannelDraw(a, b, x, y)


def simulate_batch(cfg: ScenarioConfig, rng: np.random.Generator, n: int,
                   check_events: bool | None = None) -> SecrecySnapshot:
    """Simulate ``n`` independent protocol rounds; every field is an array."""
    z = z_coefficients(cfg)
    thr = thresholds(cfg)
    d = draw_channels(cfg, rng, n)
    sinr = sinrs(z, d.a, d.b, d.x, d.y, cfg.nu1)
    snap = success_event(capacities_and_secrecy(sinr, thr.t_th, cfg.W), thr)
    if CHECK_EVENTS if check_events is None else check_events:
        alt = threshold_event(sinr, thr)
        bad = int(np.count_nonzero(alt != snap.success))
        if bad:
            raise EventMismatch(f"{bad} trials disagree between event forms")
    return snap


def simulate_once(cfg: ScenarioConfig, rng: np.random.Generator) -> SecrecySnapshot:
    snap = simulate_batch(cfg, rng, 1)
    out = {}
    for name, value in vars(snap).items():
        v = np.asarray(value)[0]
        out[name] = bool(v) if v.dtype == bool else float(v)
    return SecrecySnapshot(**out)


def _count_chunk(cfg, seed, chunk, n, check_events):
    snap = simulate_batch(cfg, chunk_rng(seed, chunk), n, check_events)
    return int(np.count_nonzero(snap.success))


def estimate_sscp(cfg: ScenarioConfig, mc: McConfig = McConfig(),
                  check_events: bool | None = None) -> SscpEstimate:
    validate_config(cfg)
    n_chunks = -(-mc.trials // mc.batch)
    sizes = [min(mc.batch, mc.trials - i * mc.batch) for i in range(n_chunks)]
    args = [(cfg, mc.seed, i, sizes[i], check_events) for i in range(n_chunks)]
    if mc.workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(mc.workers) as pool:
            counts = list(pool.map(lambda a: _count_chunk(*a), args))
    else:
        counts = [_count_chunk(*a) for a in args]
    hits = sum(counts)
    p = hits / mc.trials
    return SscpEstimate(
        value=p,
        method="monte-carlo",
        stderr=math.sqrt(p * (1.0 - p) / mc.trials),
        trials=mc.trials,
        seed=mc.seed,
        extra={"hits": hits, "batch": mc.batch},
    )
