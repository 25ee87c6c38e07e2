"""Layer-ordered heaps and the linear-time partitioning primitives behind them.

A layer-ordered heap (LOH) stores a multiset in one array partitioned into
contiguous layers L1, L2, ... where every value in a layer is <= every value
in the next layer. Values inside a layer stay unordered. The first layer
holds exactly one value and sizes grow geometrically with a rank alpha > 1
through the recurrence s(1) = 1, s(i+1) = ceil(alpha * s(i)); the final
layer is truncated so the sizes sum to n exactly.

Construction partitions the array with a linear select at each cumulative
layer boundary, walking from the last boundary toward the first. The prefix
sizes decay geometrically, so total work is linear in n for fixed alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    ConfigError,
    ContractError,
    EmptyInputError,
    InvalidValueError,
)

__all__ = [
    "ComparisonCounter",
    "LayerOrderedHeap",
    "LohConfig",
    "as_value_array",
    "layer_size_schedule",
    "layer_sizes",
    "linear_select",
    "lohify",
    "partition_by_value",
    "unify_profile",
    "verify_loh",
]

# Pools at or below this size are partitioned by one sort instead of masking.
_SMALL_SORT = 64
# Fixed pivot seed: selections must be deterministic from run to run.
_PIVOT_SEED = 0x1087


def _alpha_fraction(alpha) -> Fraction:
    """Exact rational form of a rank; floats convert via their decimal repr."""
    if isinstance(alpha, Fraction):
        frac = alpha
    elif isinstance(alpha, int):
        frac = Fraction(alpha)
    elif isinstance(alpha, float):
        if not math.isfinite(alpha):
            raise ConfigError(f"rank alpha must be finite, got {alpha!r}")
        # str() gives the shortest round-trip decimal, so 1.1 becomes 11/10
        # rather than the binary float it rides in on; keeps ceil exact.
        frac = Fraction(str(alpha))
    elif isinstance(alpha, str):
        try:
            frac = Fraction(alpha)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot read rank alpha from {alpha!r}") from exc
    else:
        raise ConfigError(f"rank alpha must be a number, got {type(alpha).__name__}")
    if frac <= 1:
        raise ConfigError(f"rank alpha must be > 1, got {alpha!r}")
    return frac


@dataclass(frozen=True)
class LohConfig:
    """Construction parameters for a layer-ordered heap."""

    alpha: float | Fraction | str = 1.1

    def __post_init__(self):
        _alpha_fraction(self.alpha)

    @property
    def alpha_fraction(self) -> Fraction:
        return _alpha_fraction(self.alpha)


def layer_size_schedule(alpha):
    """Yield the untruncated layer sizes 1, ceil(alpha), ceil(alpha*s), ..."""
    frac = _alpha_fraction(alpha)
    num, den = frac.numerator, frac.denominator
    s = 1
    while True:
        yield s
        s = -(-num * s // den)  # exact ceil(frac * s)


def layer_sizes(alpha, n) -> list[int]:
    """Layer sizes for n values at rank alpha, final layer truncated to fit.

    layer_sizes(2, 15) == [1, 2, 4, 8]; layer_sizes(1.1, 10) == [1, 2, 3, 4].
    """
    n = int(n)
    if n < 0:
        raise ContractError(f"cannot schedule layers for n={n}")
    if n == 0:
        raise EmptyInputError("cannot schedule layers for zero values")
    sizes: list[int] = []
    total = 0
    for s in layer_size_schedule(alpha):
        if total + s >= n:
            sizes.append(n - total)
            break
        sizes.append(s)
        total += s
    return sizes


def as_value_array(values, *, name="input") -> np.ndarray:
    """Coerce one input to the numeric profile (int64 or float64) and check it."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ContractError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptyInputError(f"{name} is empty")
    kind = arr.dtype.kind
    if kind == "u":
        if int(arr.max()) > np.iinfo(np.int64).max:
            raise InvalidValueError(f"{name} holds unsigned values beyond int64 range")
        return arr.astype(np.int64)
    if kind in "ib":
        return arr.astype(np.int64)
    if kind == "f":
        out = arr.astype(np.float64)
        if np.isnan(out).any():
            raise InvalidValueError(f"{name} contains NaN")
        return out
    raise InvalidValueError(f"{name} has non-numeric dtype {arr.dtype}")


def unify_profile(arrays: list[np.ndarray]) -> list[np.ndarray]:
    """Promote a group of ingested arrays to one profile and range-check it.

    If any array is float the whole group becomes float64. An all-integer
    group is checked so that summing one value from each array cannot
    overflow int64.
    """
    if any(a.dtype.kind == "f" for a in arrays):
        return [a if a.dtype.kind == "f" else a.astype(np.float64) for a in arrays]
    m = len(arrays)
    worst = max(max(abs(int(a.min())), abs(int(a.max()))) for a in arrays)
    if worst > (2**63 - 1) // max(m, 1):
        raise InvalidValueError(
            f"integer magnitudes up to {worst} could overflow int64 when "
            f"summing {m} values"
        )
    return list(arrays)


class ComparisonCounter:
    """Tallies element comparisons made by the selection routines."""

    __slots__ = ("comparisons",)

    def __init__(self):
        self.comparisons = 0

    def add(self, n):
        self.comparisons += int(n)


def _mom_pivot(a: np.ndarray, counter=None):
    """Median-of-medians pivot: worst-case linear, no randomness."""
    m = len(a)
    if m <= 5:
        if counter is not None:
            counter.add(3 * m)
        return np.sort(a)[(m - 1) // 2]
    full = (m // 5) * 5
    meds = np.sort(a[:full].reshape(-1, 5), axis=1)[:, 2]
    if full < m:
        rest = np.sort(a[full:])
        meds = np.append(meds, rest[(len(rest) - 1) // 2])
    if counter is not None:
        counter.add(2 * m)
    head, _ = linear_select(meds, (len(meds) + 1) // 2, counter)
    return head.max()


def linear_select(pool, k, counter=None) -> tuple[np.ndarray, np.ndarray]:
    """Partition pool so a k-smallest multiset comes first.

    Returns (head, tail): head holds k values forming a smallest-k multiset
    of the pool, tail holds the rest; neither is in any particular order.
    Expected linear time: three-way quickselect with pivots drawn from a
    fixed-seed generator, switching to median-of-medians pivots past a depth
    limit so the worst case stays linear. Pass a ComparisonCounter to tally
    one comparison per element per partitioning pass.
    """
    arr = np.asarray(pool)
    n = arr.size
    k = int(k)
    if not 0 <= k <= n:
        raise ContractError(f"k={k} out of range for a pool of {n} values")
    if k == 0:
        return arr[:0], arr
    if k == n:
        return arr, arr[:0]

    rng = None
    depth_limit = 2 * n.bit_length() + 8
    heads: list[np.ndarray] = []
    tails: list[np.ndarray] = []
    a = arr
    need = k
    depth = 0
    while True:
        m = len(a)
        if need == m:
            heads.append(a)
            break
        if m <= _SMALL_SORT:
            if counter is not None and m > 1:
                counter.add(m * (m - 1).bit_length())
            srt = np.sort(a)
            heads.append(srt[:need])
            tails.append(srt[need:])
            break
        if depth > depth_limit:
            pivot = _mom_pivot(a, counter)
        else:
            if rng is None:
                rng = np.random.default_rng(_PIVOT_SEED)
            pivot = a[int(rng.integers(m))]
        lt = a < pivot
        if counter is not None:
            counter.add(m)
        n_lt = int(np.count_nonzero(lt))
        if need <= n_lt:
            tails.append(a[~lt])
            a = a[lt]
        else:
            gt = a > pivot
            if counter is not None:
                counter.add(m)
            n_gt = int(np.count_nonzero(gt))
            n_eq = m - n_lt - n_gt
            if need <= n_lt + n_eq:
                # pivot ties straddle the cut; ration them by count
                heads.append(a[lt])
                ties = np.full(n_eq, pivot, dtype=a.dtype)
                heads.append(ties[: need - n_lt])
                tails.append(ties[need - n_lt :])
                tails.append(a[gt])
                break
            heads.append(a[lt])
            heads.append(np.full(n_eq, pivot, dtype=a.dtype))
            a = a[gt]
            need -= n_lt + n_eq
        depth += 1
    head = heads[0] if len(heads) == 1 else np.concatenate(heads)
    tail = tails[0] if len(tails) == 1 else np.concatenate(tails) if tails else arr[:0]
    return head, tail


def partition_by_value(pool, bound) -> tuple[np.ndarray, np.ndarray]:
    """Split pool into (values <= bound, values > bound) in one masking pass."""
    arr = np.asarray(pool)
    if arr.ndim != 1:
        raise ContractError(f"pool must be one-dimensional, got shape {arr.shape}")
    try:
        bad = bool(np.isnan(bound))
    except TypeError:
        raise ContractError(f"bound must be numeric, got {type(bound).__name__}")
    if bad:
        raise ContractError("bound must not be NaN")
    mask = arr <= bound
    return arr[mask], arr[~mask]


@dataclass
class LayerOrderedHeap:
    """A value array partitioned into ordered layers.

    boundaries[i] is the cumulative end offset of layer i+1 (the last entry
    equals len(values)). Layers are addressed 1-based to match the indices
    carried by selection tuples.
    """

    values: np.ndarray
    boundaries: np.ndarray
    config: LohConfig
    layer_mins: np.ndarray | None = None
    layer_maxs: np.ndarray | None = None

    def __post_init__(self):
        if self.layer_mins is None:
            starts = self._starts()
            self.layer_mins = np.minimum.reduceat(self.values, starts)
            self.layer_maxs = np.maximum.reduceat(self.values, starts)

    def _starts(self) -> np.ndarray:
        starts = np.zeros(len(self.boundaries), dtype=np.int64)
        starts[1:] = self.boundaries[:-1]
        return starts

    @property
    def n_layers(self) -> int:
        return len(self.boundaries)

    def layer(self, i) -> np.ndarray:
        if not 1 <= i <= self.n_layers:
            raise ContractError(f"layer {i} out of range [1, {self.n_layers}]")
        start = 0 if i == 1 else int(self.boundaries[i - 2])
        return self.values[start : int(self.boundaries[i - 1])]

    def layer_size(self, i) -> int:
        start = 0 if i == 1 else int(self.boundaries[i - 2])
        return int(self.boundaries[i - 1]) - start

    def layer_min(self, i):
        return self.layer_mins[i - 1].item()

    def layer_max(self, i):
        return self.layer_maxs[i - 1].item()


def lohify(values, config: LohConfig | None = None, counter=None) -> LayerOrderedHeap:
    """Build a layer-ordered heap over values; the multiset is preserved.

    Repeated linear selection at the layer boundaries, processed from the
    last boundary toward the first, keeps total work linear in len(values).
    """
    cfg = config if config is not None else LohConfig()
    arr = as_value_array(values)
    sizes = layer_sizes(cfg.alpha, len(arr))
    bounds = np.cumsum(sizes, dtype=np.int64)
    work = arr.copy()
    end = len(work)
    for b in bounds[-2::-1]:
        head, tail = linear_select(work[:end], int(b), counter)
        work[:end] = np.concatenate((head, tail))
        end = int(b)
    return LayerOrderedHeap(work, bounds, cfg)


def verify_loh(heap: LayerOrderedHeap) -> bool:
    """Check the layer structure: scheduled boundaries, ordered layers."""
    vals = np.asarray(heap.values)
    bounds = np.asarray(heap.boundaries)
    if vals.ndim != 1 or vals.size == 0:
        return False
    try:
        sizes = layer_sizes(heap.config.alpha, len(vals))
    except (ConfigError, ContractError, EmptyInputError):
        return False
    if not np.array_equal(bounds, np.cumsum(sizes)):
        return False
    starts = np.zeros(len(bounds), dtype=np.int64)
    starts[1:] = bounds[:-1]
    mins = np.minimum.reduceat(vals, starts)
    maxs = np.maximum.reduceat(vals, starts)
    return bool(np.all(maxs[:-1] <= mins[1:]))
