"""Tick-aggregation clocks.

Four clocks are provided: repeated-trade VWAP deduplication, calendar
OHLCV/VWAP bars, per-asset intrinsic volume-time buckets, and a
synchronised volume clock that fills a common bucket size across assets
in calendar order.

Volume buckets are never built by literally repeating each trade by its
share count; cumulative-share arithmetic with boundary splitting gives
the same values (the literal expansion serves as the test oracle only).
"""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import PathBundle, TickSeries

BAR_KINDS = ("CALENDAR_CLOSE", "CALENDAR_VWAP", "INTRINSIC", "SYNC_VOLUME")


@dataclass(frozen=True)
class VolumeClockConfig:
    """Bucket sizing for the volume clocks.

    ``buckets_per_day`` maps average daily volume to a bucket size;
    the synchronised clock sizes every asset's bucket off the baseline
    (least- or most-liquid) asset.
    """

    buckets_per_day: int = 48
    baseline: str = "LEAST_LIQUID"

    def __post_init__(self):
        if self.buckets_per_day < 1:
            raise ValueError("buckets_per_day must be >= 1")
        if self.baseline not in ("LEAST_LIQUID", "MOST_LIQUID"):
            raise ValueError("baseline must be LEAST_LIQUID or MOST_LIQUID")

    def bucket_size(self, adv: float) -> float:
        v = adv / self.buckets_per_day
        if v < 1.0:
            raise ValueError(
                f"bucket size {v:.3g} below one share (ADV {adv:.6g} / {self.buckets_per_day})"
            )
        return v


@dataclass(frozen=True)
class BarSeries:
    """Aggregated bars: calendar OHLCV/VWAP or volume-bucket prices.

    Calendar bars stamp each bar with its end time; volume buckets carry
    bucket indices (intrinsic) or the triggering calendar time
    (synchronised). ``missing`` marks unfilled synchronised buckets,
    whose vwap is NaN.
    """

    asset_id: str
    kind: str
    bar_times: np.ndarray
    vwap: np.ndarray
    volume: np.ndarray
    open: np.ndarray | None = None
    high: np.ndarray | None = None
    low: np.ndarray | None = None
    close: np.ndarray | None = None
    missing: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in BAR_KINDS:
            raise ValueError(f"kind must be one of {BAR_KINDS}, got {self.kind!r}")

    def __len__(self) -> int:
        return len(self.bar_times)

    def price_column(self) -> np.ndarray:
        """The price series this clock feeds to an estimator."""
        if self.kind == "CALENDAR_CLOSE":
            return self.close
        return self.vwap

    def to_tick_series(self) -> TickSeries:
        """View the bars as a tick series (missing buckets are dropped).

        Zero-volume carried bars get a unit volume so that the result
        is a valid TickSeries; estimators ignore volumes.
        """
        prices = self.price_column()
        keep = np.ones(len(self), dtype=bool)
        if self.missing is not None:
            keep &= ~self.missing
        keep &= np.isfinite(prices)
        if not np.any(keep):
            raise ValueError(f"{self.asset_id}: no non-missing bars")
        return TickSeries(
            asset_id=self.asset_id,
            times=self.bar_times[keep],
            prices=prices[keep],
            volumes=np.maximum(self.volume[keep], 1).astype(np.int64),
        )

    def write_csv(self, path) -> None:
        """Documented schema: bar_time,open,high,low,close,volume,vwap,missing."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bar_time", "open", "high", "low", "close", "volume", "vwap", "missing"])
            for i in range(len(self)):
                def cell(col):
                    return "" if col is None else repr(float(col[i]))
                writer.writerow(
                    [
                        repr(float(self.bar_times[i])),
                        cell(self.open),
                        cell(self.high),
                        cell(self.low),
                        cell(self.close),
                        str(int(self.volume[i])),
                        repr(float(self.vwap[i])),
                        int(bool(self.missing[i])) if self.missing is not None else 0,
                    ]
                )


def dedupe_trades(series: TickSeries) -> TickSeries:
    """Merge same-timestamp trades into one tick at their VWAP.

    Output times are strictly increasing; total volume and total
    price*volume are preserved.
    """
    times, first = np.unique(series.times, return_index=True)
    if len(times) == len(series):
        return series
    group = np.searchsorted(times, series.times)
    pv = np.zeros(len(times))
    vol = np.zeros(len(times), dtype=np.int64)
    np.add.at(pv, group, series.prices * series.volumes)
    np.add.at(vol, group, series.volumes)
    return TickSeries(
        asset_id=series.asset_id, times=times, prices=pv / vol, volumes=vol
    )


def calendar_bars(
    series: TickSeries,
    bar_length: float,
    anchor: float | None = None,
    end: float | None = None,
    kind: str = "CALENDAR_CLOSE",
) -> BarSeries:
    """OHLCV and VWAP bars over fixed calendar intervals.

    Bar j covers [anchor + j*L, anchor + (j+1)*L) and is stamped with
    its end time. The first bar's open is the first trade price; every
    later open is the previous close. Bars without trades carry the
    previous close forward with zero volume (keeps bar grids synchronous
    across assets); leading empty bars are dropped.

    ``anchor`` defaults to the first trade time; a shared anchor/end
    aligns bar grids across assets.
    """
    if bar_length <= 0:
        raise ValueError("bar_length must be positive")
    if not series.strictly_increasing:
        raise ValueError(f"{series.asset_id}: deduplicate trades first")
    if kind not in ("CALENDAR_CLOSE", "CALENDAR_VWAP"):
        raise ValueError("kind must be CALENDAR_CLOSE or CALENDAR_VWAP")
    t0 = float(series.times[0]) if anchor is None else float(anchor)
    if series.times[0] < t0:
        raise ValueError(f"{series.asset_id}: trade precedes bar anchor {t0}")
    t_end = float(series.times[-1]) if end is None else float(end)
    n_bars = max(1, int(math.ceil((t_end - t0) / bar_length + 1e-12)))

    idx = np.floor((series.times - t0) / bar_length).astype(np.int64)
    idx = np.minimum(idx, n_bars - 1)  # a trade exactly at `end` joins the last bar
    first_bar = int(idx[0])

    nb = n_bars - first_bar
    high = np.full(nb, -np.inf)
    low = np.full(nb, np.inf)
    close = np.full(nb, np.nan)
    volume = np.zeros(nb, dtype=np.int64)
    pv = np.zeros(nb)
    rel = idx - first_bar
    np.maximum.at(high, rel, series.prices)
    np.minimum.at(low, rel, series.prices)
    np.add.at(volume, rel, series.volumes)
    np.add.at(pv, rel, series.prices * series.volumes)
    # input is time-sorted, so the last trade of bar j sits just before
    # the first trade of any later bar
    last_pos = np.searchsorted(rel, np.arange(nb), side="right") - 1
    has_trade = volume > 0
    close[has_trade] = series.prices[last_pos[has_trade]]

    vwap = np.empty(nb)
    open_ = np.empty(nb)
    filled = volume > 0
    vwap[filled] = pv[filled] / volume[filled]
    open_[0] = float(series.prices[0])
    prev_close = close[0]  # bar 0 is never empty (it holds the first trade)
    for j in range(1, nb):
        open_[j] = prev_close
        if not filled[j]:
            close[j] = high[j] = low[j] = vwap[j] = prev_close
        prev_close = close[j]

    bar_times = t0 + (np.arange(first_bar, n_bars, dtype=np.float64) + 1.0) * bar_length
    return BarSeries(
        asset_id=series.asset_id,
        kind=kind,
        bar_times=bar_times,
        open=open_,
        high=high,
        low=low,
        close=close,
        vwap=vwap,
        volume=volume,
    )


def _expanded_prefix(prices: np.ndarray, volumes: np.ndarray):
    """Prefix machinery for sums over the expanded share stream.

    Returns (cum, pv_prefix) where cum[i] is the expanded-share count
    after trade i and F(x) = sum of the first x expanded share values is
    evaluated by ``_prefix_value``.
    """
    cum = np.concatenate(([0.0], np.cumsum(volumes.astype(np.float64))))
    pv = np.concatenate(([0.0], np.cumsum(prices * volumes)))
    return cum, pv


def _prefix_value(x, cum, pv, prices) -> np.ndarray:
    """F(x): total value of the first x expanded shares (x may be fractional)."""
    x = np.asarray(x, dtype=np.float64)
    j = np.searchsorted(cum, x, side="left")  # trade covering share x
    j = np.clip(j, 1, len(prices))
    return pv[j - 1] + prices[j - 1] * (x - cum[j - 1])


def intrinsic_volume_bars(series: TickSeries, bucket_size: float) -> BarSeries:
    """Asset-specific volume clock: fixed share-count buckets.

    Conceptually each trade is repeated once per share and consecutive
    runs of ``bucket_size`` shares are averaged; implemented by
    cumulative-share arithmetic with trades split across bucket
    boundaries. The trailing partial bucket is discarded.
    """
    if bucket_size < 1:
        raise ValueError("bucket_size must be at least one share")
    total = float(series.volumes.sum())
    n_buckets = int(total // bucket_size)
    if n_buckets < 1:
        raise ValueError(
            f"{series.asset_id}: insufficient volume ({total:.6g} < bucket {bucket_size:.6g})"
        )
    cum, pv = _expanded_prefix(series.prices, series.volumes.astype(np.float64))
    bounds = np.arange(n_buckets + 1, dtype=np.float64) * bucket_size
    f = _prefix_value(bounds, cum, pv, series.prices)
    bucket_px = np.diff(f) / bucket_size
    return BarSeries(
        asset_id=series.asset_id,
        kind="INTRINSIC",
        bar_times=np.arange(1, n_buckets + 1, dtype=np.float64),
        vwap=bucket_px,
        volume=np.full(n_buckets, int(round(bucket_size)), dtype=np.int64),
    )


class _ShareQueue:
    """FIFO of (price, shares) runs with exact fractional consumption."""

    def __init__(self):
        self.runs: deque = deque()
        self.total = 0.0

    def push(self, price: float, shares: float) -> None:
        self.runs.append([price, shares])
        self.total += shares

    def consume(self, shares: float) -> float:
        """Remove the first ``shares`` shares, returning their mean value."""
        need = shares
        value = 0.0
        while need > 0:
            run = self.runs[0]
            take = min(run[1], need)
            value += run[0] * take
            run[1] -= take
            need -= take
            if run[1] <= 0:
                self.runs.popleft()
        self.total -= shares
        return value / shares


def synchronized_volume_bars(bundle: PathBundle, bucket_size: float) -> dict[str, BarSeries]:
    """Common-bucket volume clock synchronised across assets.

    Walks the unique trade times in calendar order, accumulating each
    asset's expanded shares. Whenever any asset has a full bucket, a
    bucket index is emitted for every asset: assets holding at least
    ``bucket_size`` shares emit the mean of their first bucket worth and
    consume it; the rest emit a missing value. Buckets are stamped with
    the calendar time of the triggering event.
    """
    if bucket_size < 1:
        raise ValueError("bucket_size must be at least one share")
    if len(bundle) < 1:
        raise ValueError("empty bundle")
    ids = bundle.asset_ids
    queues = {aid: _ShareQueue() for aid in ids}
    prices: dict[str, list] = {aid: [] for aid in ids}
    stamps: list[float] = []

    events = sorted(
        (float(t), aid, float(p), float(v))
        for s, aid in zip(bundle.series, ids)
        for t, p, v in zip(s.times, s.prices, s.volumes)
    )
    i = 0
    n = len(events)
    while i < n:
        t = events[i][0]
        while i < n and events[i][0] == t:
            _, aid, p, v = events[i]
            queues[aid].push(p, v)
            i += 1
        while any(q.total >= bucket_size for q in queues.values()):
            stamps.append(t)
            for aid in ids:
                q = queues[aid]
                if q.total >= bucket_size:
                    prices[aid].append(q.consume(bucket_size))
                else:
                    prices[aid].append(np.nan)

    out = {}
    for aid in ids:
        px = np.asarray(prices[aid], dtype=np.float64)
        missing = np.isnan(px)
        out[aid] = BarSeries(
            asset_id=aid,
            kind="SYNC_VOLUME",
            bar_times=np.asarray(stamps, dtype=np.float64),
            vwap=px,
            volume=np.where(missing, 0, int(round(bucket_size))).astype(np.int64),
            missing=missing,
        )
    return out
