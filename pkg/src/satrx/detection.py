"""Joint-ML and list-based group-search detection on the equivalent channel.

Both detectors operate on the preprocessed system ``y = H s + z``:

* :func:`jml` enumerates every symbol vector in the signal space and keeps
  the one with the smallest Euclidean metric (globally optimal, exponential
  cost, guarded by a search budget).
* :func:`lgsd` runs the list-based group-wise search: per-row branch list
  estimation (BLE) that enumerates one group of symbols at a time while
  cancelling the other groups' interference, followed by a global list
  optimizer (GLO) that refines the merged lists by coordinate descent on
  the full metric.

Complexity is reported as a count of real squaring operations: a squared
magnitude of one complex entry costs 2, a full length-R metric costs 2R.

Candidate vectors are carried as mixed-radix integer codes (most
significant digit first) so that ascending code order equals lexicographic
order of the symbol-index vectors; all metric ties are broken toward the
smaller code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .constellation import Constellation, make_constellation
from .validation import check_complex_matrix, check_complex_vector

__all__ = [
    "DEFAULT_SEARCH_BUDGET",
    "SearchSpaceTooLargeError",
    "OpCounter",
    "LgsdConfig",
    "CandidateList",
    "DetectionResult",
    "jml",
    "jml_batch",
    "allocate_groups",
    "ble_pass",
    "glo_pass",
    "lgsd",
    "lgsd_batch",
    "JointMLDetector",
    "LgsdDetector",
]

#: Cap on the number of candidate metric evaluations one jml() call may do.
DEFAULT_SEARCH_BUDGET = 2 ** 24


class SearchSpaceTooLargeError(ValueError):
    """The exhaustive search would exceed the configured budget."""


def _abs2(z):
    """Squared magnitude computed as re^2 + im^2 (no intermediate sqrt).

    Used by every metric path so that the reference implementation and the
    compiled kernel produce bit-identical floats.
    """
    return z.real ** 2 + z.imag ** 2


def _places(base: int, n: int) -> np.ndarray:
    # big-endian mixed radix: code = sum_j digit_j * base^(n-1-j)
    return base ** np.arange(n - 1, -1, -1, dtype=np.int64)


def _decode(codes: np.ndarray, places: np.ndarray, base: int) -> np.ndarray:
    return (np.asarray(codes, dtype=np.int64)[..., None] // places) % base


@dataclass
class OpCounter:
    """Accumulates the real-squaring count of one or more detector calls."""

    squarings: int = 0

    def add(self, amount: int) -> None:
        self.squarings += int(amount)


@dataclass(frozen=True)
class LgsdConfig:
    """Search parameters: list length L and the (Q, Theta, Phi) iterations."""

    list_len: int
    overall_iters: int = 2
    ble_iters: int = 3
    glo_iters: int = 2
    group_sizes: tuple = (3, 2)
    rng_seed: int = 0

    def __post_init__(self):
        if self.list_len < 1:
            raise ValueError("list_len must be >= 1")
        for name in ("overall_iters", "ble_iters", "glo_iters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        sizes = tuple(int(s) for s in self.group_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("group_sizes must be nonempty positive counts")
        object.__setattr__(self, "group_sizes", sizes)


@dataclass(eq=False)
class CandidateList:
    """Symbol-vector candidates with ascending MSE metrics.

    ``entries`` holds one symbol-index vector per row; ``metrics`` is sorted
    ascending and ties are ordered lexicographically by entry.
    """

    entries: np.ndarray
    metrics: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.int64)
        self.metrics = np.asarray(self.metrics, dtype=np.float64)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.metrics.shape[0]:
            raise ValueError("entries and metrics lengths disagree")

    def __len__(self) -> int:
        return self.entries.shape[0]

    @property
    def head(self) -> np.ndarray:
        return self.entries[0]


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Hard decision plus its recomputed metric and the squaring count."""

    symbols: np.ndarray
    metric: float
    squarings: int


def _direct_metric(y: np.ndarray, h: np.ndarray, points: np.ndarray,
                   digits: np.ndarray) -> float:
    """||y - H s||^2 by explicit accumulation (column order, then rows)."""
    resid = y.copy()
    for j in range(h.shape[1]):
        resid = resid - points[digits[j]] * h[:, j]
    total = 0.0
    for r in range(resid.shape[0]):
        total += _abs2(resid[r])
    return float(total)


# ---------------------------------------------------------------------------
# joint maximum likelihood
# ---------------------------------------------------------------------------

def jml(y, h, constellation: Constellation, *, budget: int = DEFAULT_SEARCH_BUDGET,
        counter: OpCounter | None = None) -> DetectionResult:
    """Exhaustive minimum-distance detection over the whole signal space.

    Ties are broken toward the lexicographically smallest symbol vector.
    The squaring count follows the closed form 2R|w|^N for R rows.
    """
    digits, metrics = jml_batch(np.asarray(y)[None, :], h, constellation,
                                budget=budget, counter=counter)
    return DetectionResult(symbols=digits[0], metric=float(metrics[0]),
                           squarings=2 * np.asarray(h).shape[0]
                           * len(constellation.points) ** np.asarray(h).shape[1])


def jml_batch(ys, h, constellation: Constellation, *,
              budget: int = DEFAULT_SEARCH_BUDGET,
              counter: OpCounter | None = None,
              trial_chunk: int = 256, code_chunk: int = 1 << 15):
    """Vectorized jml over many received vectors sharing one channel.

    Returns ``(digits, metrics)`` where ``digits`` is (T, N) and ``metrics``
    holds the directly recomputed metric of each winner.
    """
    h = check_complex_matrix(h, name="h")
    ys = np.ascontiguousarray(np.atleast_2d(np.asarray(ys, dtype=np.complex128)))
    rows, n = h.shape
    if ys.shape[1] != rows:
        raise ValueError(f"received vectors have length {ys.shape[1]}, expected {rows}")
    base = len(constellation.points)
    n_codes = base ** n
    if n_codes > budget:
        raise SearchSpaceTooLargeError(
            f"|omega|^N = {base}^{n} = {n_codes} exceeds the search budget {budget}")
    points = constellation.points
    places = _places(base, n)
    n_trials = ys.shape[0]
    best_code = np.zeros(n_trials, dtype=np.int64)
    best_met = np.full(n_trials, np.inf)
    for clo in range(0, n_codes, code_chunk):
        chi = min(clo + code_chunk, n_codes)
        dig = _decode(np.arange(clo, chi, dtype=np.int64), places, base)
        proj = points[dig] @ h.T  # (chunk, rows)
        norm2 = _abs2(proj).sum(axis=1)
        for tlo in range(0, n_trials, trial_chunk):
            thi = min(tlo + trial_chunk, n_trials)
            cross = ys[tlo:thi].conj() @ proj.T
            met = norm2[None, :] - 2.0 * cross.real
            arg = np.argmin(met, axis=1)
            cand = met[np.arange(thi - tlo), arg]
            better = cand < best_met[tlo:thi]
            best_met[tlo:thi][better] = cand[better]
            best_code[tlo:thi][better] = arg[better] + clo
    if counter is not None:
        counter.add(2 * rows * n_codes * n_trials)
    digits = _decode(best_code, places, base)
    metrics = np.empty(n_trials)
    for t in range(n_trials):
        metrics[t] = _direct_metric(ys[t], h, points, digits[t])
    return digits, metrics


# ---------------------------------------------------------------------------
# group allocation
# ---------------------------------------------------------------------------

def allocate_groups(powers, iteration: int, sizes, rng: np.random.Generator):
    """Partition stream indices into groups for one overall iteration.

    Iteration 0 packs the strongest streams (descending power, stable order)
    into the first group; later iterations use a uniformly random partition
    drawn from ``rng``.  Every group is returned sorted ascending.
    """
    powers = np.asarray(powers, dtype=np.float64)
    n = powers.shape[0]
    sizes = tuple(int(s) for s in sizes)
    if sum(sizes) != n:
        raise ValueError(f"group sizes {sizes} do not sum to {n}")
    if iteration == 0:
        order = np.argsort(-powers, kind="stable")
    else:
        order = rng.permutation(n)
    groups = []
    at = 0
    for s in sizes:
        groups.append(np.sort(order[at:at + s]).astype(np.int64))
        at += s
    return groups


# ---------------------------------------------------------------------------
# reference BLE / GLO (readable, loop-based; the compiled kernel mirrors it)
# ---------------------------------------------------------------------------

def _group_projection(h_row: np.ndarray, points: np.ndarray, group: np.ndarray,
                      base: int) -> np.ndarray:
    """Row response of every subvector of one group: sum_j h[row,g_j]*w_dj."""
    k = len(group)
    dig = _decode(np.arange(base ** k, dtype=np.int64), _places(base, k), base)
    acc = np.zeros(base ** k, dtype=np.complex128)
    for i in range(k):
        acc = acc + points[dig[:, i]] * h_row[group[i]]
    return acc


def _sort_met_code(metrics: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Order by ascending metric, ties by ascending code."""
    return np.lexsort((codes, metrics))


def ble_pass(y, h, constellation: Constellation, groups, in_list, theta: int,
             list_len: int, counter: OpCounter):
    """Branch list estimation: one list per row of the equivalent system.

    Each branch repeats ``theta`` times over the groups: the candidates'
    other-group symbols are frozen as cancellation contexts, every subvector
    of the active group is enumerated against the branch's single row, and
    the best ``list_len`` completions (row metric, then lexicographic)
    survive.  Row metrics for a repeated (group, context) pair are computed
    once and the counter only pays for rows actually evaluated.

    ``in_list`` may be a CandidateList or an integer code array; returns one
    CandidateList per branch carrying row metrics.
    """
    h = check_complex_matrix(h, name="h")
    rows, n = h.shape
    base = len(constellation.points)
    points = constellation.points
    places = _places(base, n)
    if isinstance(in_list, CandidateList):
        seed_codes = in_list.entries @ places
    else:
        seed_codes = np.asarray(in_list, dtype=np.int64)
    if seed_codes.size == 0:
        raise ValueError("ble_pass needs a nonempty input list")
    groups = [np.asarray(g, dtype=np.int64) for g in groups]
    gplaces = [places[g] for g in groups]
    # completion offsets of every subvector of group g, in subvector order
    gcomp = []
    for g, gp in zip(groups, gplaces):
        sub = _decode(np.arange(base ** len(g), dtype=np.int64),
                      _places(base, len(g)), base)
        gcomp.append(sub @ gp)

    out = []
    for row in range(rows):
        gproj = [_group_projection(h[row], points, g, base) for g in groups]
        memo: dict = {}
        codes = seed_codes
        metrics = None
        for _ in range(theta):
            for gi, g in enumerate(groups):
                own = (codes[:, None] // gplaces[gi][None, :]) % base
                ctx = codes - own @ gplaces[gi]
                ctx = np.unique(ctx)
                rows_met = np.empty((ctx.size, gproj[gi].size))
                for i, c in enumerate(ctx.tolist()):
                    key = (gi, c)
                    hit = memo.get(key)
                    if hit is None:
                        free = y[row]
                        for gj in range(len(groups)):
                            if gj == gi:
                                continue
                            d = (c // gplaces[gj]) % base
                            sub = 0.0 + 0.0j
                            for pos in range(len(groups[gj])):
                                sub = sub + points[d[pos]] * h[row, groups[gj][pos]]
                            free = free - sub
                        hit = _abs2(free - gproj[gi])
                        counter.add(2 * hit.size)
                        memo[key] = hit
                    rows_met[i] = hit
                pool_codes = (ctx[:, None] + gcomp[gi][None, :]).ravel()
                pool_met = rows_met.ravel()
                if pool_met.size > list_len:
                    part = np.argpartition(pool_met, list_len - 1)[:list_len]
                    keep = np.flatnonzero(pool_met <= pool_met[part].max())
                    order = _sort_met_code(pool_met[keep], pool_codes[keep])[:list_len]
                    sel = keep[order]
                else:
                    sel = _sort_met_code(pool_met, pool_codes)
                codes = pool_codes[sel]
                metrics = pool_met[sel]
        out.append(CandidateList(entries=_decode(codes, places, base),
                                 metrics=metrics))
    return out


def glo_pass(y, h, constellation: Constellation, branch_lists, phi: int,
             list_len: int, counter: OpCounter) -> CandidateList:
    """Global list optimization of the merged branch lists.

    The union of the branch lists is deduplicated, ranked by the full metric
    ``||y - H s||^2`` and truncated to ``list_len``; then ``phi`` coordinate-
    descent sweeps try every constellation point at every symbol position,
    accepting improvements, with a dedup/resort/truncate after each sweep.
    """
    h = check_complex_matrix(h, name="h")
    rows, n = h.shape
    base = len(constellation.points)
    points = constellation.points
    places = _places(base, n)
    pools = []
    for bl in branch_lists:
        if isinstance(bl, CandidateList):
            pools.append(bl.entries @ places)
        else:
            pools.append(np.asarray(bl, dtype=np.int64))
    if not pools or sum(p.size for p in pools) == 0:
        raise ValueError("glo_pass needs at least one nonempty branch list")
    codes = np.unique(np.concatenate(pools))
    digits = _decode(codes, places, base)
    resid = np.tile(y, (codes.size, 1))
    for j in range(n):
        resid = resid - points[digits[:, j], None] * h[:, j][None, :]
    metrics = _abs2(resid).sum(axis=1)
    counter.add(2 * rows * codes.size)
    order = _sort_met_code(metrics, codes)[:list_len]
    codes, metrics, resid = codes[order], metrics[order], resid[order]

    for _ in range(phi):
        for p in range(n):
            cur = (codes // places[p]) % base
            delta = points[None, :] - points[cur][:, None]  # (L, B)
            trial = resid[:, None, :] - delta[:, :, None] * h[:, p][None, None, :]
            tmet = _abs2(trial).sum(axis=2)  # (L, B)
            counter.add(2 * rows * tmet.size)
            pick = np.argmin(tmet, axis=1)  # first minimum = smallest symbol
            codes = codes + (pick - cur) * places[p]
            take = np.arange(codes.size)
            resid = trial[take, pick]
            metrics = tmet[take, pick]
        codes, first = np.unique(codes, return_index=True)
        metrics, resid = metrics[first], resid[first]
        order = _sort_met_code(metrics, codes)[:list_len]
        codes, metrics, resid = codes[order], metrics[order], resid[order]
    return CandidateList(entries=_decode(codes, places, base), metrics=metrics)


def _seed_codes(y, h_pinv, points, places, base):
    """Initial candidates: hard-demapped least squares plus all-zeros.

    The matvec is accumulated explicitly so both engines see identical seeds.
    """
    n = h_pinv.shape[0]
    ls = np.zeros(n, dtype=np.complex128)
    for j in range(h_pinv.shape[1]):
        ls = ls + h_pinv[:, j] * y[j]
    hard = np.argmin(_abs2(ls[:, None] - points[None, :]), axis=1)
    return np.unique(np.array([hard @ places, 0], dtype=np.int64))


def lgsd(y, h, constellation: Constellation, config: LgsdConfig, *,
         satellite_powers=None, rng: np.random.Generator | None = None,
         counter: OpCounter | None = None, engine: str = "auto") -> DetectionResult:
    """List-based group-wise search detection of one received vector.

    Runs ``overall_iters`` rounds of group allocation -> BLE -> GLO, carrying
    the surviving list between rounds, and returns the best candidate seen
    anywhere (never worse than the seed list head).  ``satellite_powers``
    drives the strongest-first allocation of round 0 and defaults to the
    column powers of ``h``; ``rng`` drives the randomized allocations of
    later rounds and defaults to a fresh generator seeded with
    ``config.rng_seed``.

    ``engine`` selects "reference" (pure numpy) or "compiled" (numba kernel,
    identical results); "auto" prefers the compiled kernel when available.
    """
    h = check_complex_matrix(h, name="h")
    rows, n = h.shape
    y = check_complex_vector(y, name="y", length=rows)
    if sum(config.group_sizes) != n:
        raise ValueError(
            f"group sizes {config.group_sizes} do not sum to the stream count {n}")
    base = len(constellation.points)
    points = constellation.points
    places = _places(base, n)
    if satellite_powers is None:
        satellite_powers = _abs2(h).sum(axis=0)
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    allocations = [
        allocate_groups(satellite_powers, q, config.group_sizes, rng)
        for q in range(config.overall_iters)
    ]
    seeds = _seed_codes(y, np.linalg.pinv(h), points, places, base)

    use_kernel = False
    if engine not in ("auto", "reference", "compiled"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine in ("auto", "compiled"):
        from . import _lgsd_fast
        if _lgsd_fast.AVAILABLE:
            use_kernel = True
        elif engine == "compiled":
            raise RuntimeError("compiled engine requested but numba is unavailable")

    if use_kernel:
        alloc = np.stack([np.concatenate(g) for g in allocations]).astype(np.int64)
        sizes = np.asarray(config.group_sizes, dtype=np.int64)
        best_code, squarings = _lgsd_fast.run(
            y, h, points, alloc, sizes, seeds,
            config.list_len, config.ble_iters, config.glo_iters)
    else:
        local = OpCounter()
        best_code, best_met = -1, np.inf
        seed_digits = _decode(seeds, places, base)
        for i in range(seeds.size):
            met = _direct_metric(y, h, points, seed_digits[i])
            local.add(2 * rows)
            if met < best_met:
                best_met, best_code = met, int(seeds[i])
        carry = seeds
        for q in range(config.overall_iters):
            branches = ble_pass(y, h, constellation, allocations[q], carry,
                                config.ble_iters, config.list_len, local)
            out = glo_pass(y, h, constellation, branches, config.glo_iters,
                           config.list_len, local)
            codes = out.entries @ places
            if out.metrics[0] < best_met or (
                    out.metrics[0] == best_met and codes[0] < best_code):
                best_met, best_code = float(out.metrics[0]), int(codes[0])
            carry = codes
        squarings = local.squarings

    if counter is not None:
        counter.add(squarings)
    digits = _decode(np.int64(best_code), places, base)
    return DetectionResult(symbols=digits, squarings=int(squarings),
                           metric=_direct_metric(y, h, points, digits))


def lgsd_batch(ys, h, constellation: Constellation, config: LgsdConfig, *,
               satellite_powers=None, rngs=None,
               counter: OpCounter | None = None, engine: str = "auto"):
    """List search over a batch of received vectors sharing one channel.

    ``rngs`` supplies one generator per trial for the randomized group
    allocations (defaults to generators seeded with
    ``SeedSequence([config.rng_seed, trial])``); results are identical to
    calling :func:`lgsd` per vector with the same generators.  Returns
    ``(digits, squarings)`` with shapes (T, N) and (T,).
    """
    h = check_complex_matrix(h, name="h")
    rows, n = h.shape
    ys = np.ascontiguousarray(np.atleast_2d(np.asarray(ys, dtype=np.complex128)))
    if ys.shape[1] != rows:
        raise ValueError(f"received vectors have length {ys.shape[1]}, expected {rows}")
    if sum(config.group_sizes) != n:
        raise ValueError(
            f"group sizes {config.group_sizes} do not sum to the stream count {n}")
    n_trials = ys.shape[0]
    if satellite_powers is None:
        satellite_powers = _abs2(h).sum(axis=0)
    if rngs is None:
        rngs = [np.random.default_rng(np.random.SeedSequence([config.rng_seed, t]))
                for t in range(n_trials)]
    elif len(rngs) != n_trials:
        raise ValueError("rngs must supply one generator per trial")

    use_kernel = False
    if engine not in ("auto", "reference", "compiled"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine in ("auto", "compiled"):
        from . import _lgsd_fast
        if _lgsd_fast.AVAILABLE:
            use_kernel = True
        elif engine == "compiled":
            raise RuntimeError("compiled engine requested but numba is unavailable")

    base = len(constellation.points)
    points = constellation.points
    places = _places(base, n)
    if not use_kernel:
        digits = np.empty((n_trials, n), dtype=np.int64)
        squarings = np.empty(n_trials, dtype=np.int64)
        for t in range(n_trials):
            res = lgsd(ys[t], h, constellation, config,
                       satellite_powers=satellite_powers, rng=rngs[t],
                       counter=counter, engine="reference")
            digits[t] = res.symbols
            squarings[t] = res.squarings
        return digits, squarings

    from . import _lgsd_fast
    sizes = np.asarray(config.group_sizes, dtype=np.int64)
    alloc = np.empty((n_trials, config.overall_iters, n), dtype=np.int64)
    seeds = np.zeros((n_trials, 2), dtype=np.int64)
    seed_counts = np.empty(n_trials, dtype=np.int64)
    h_pinv = np.linalg.pinv(h)
    for t in range(n_trials):
        for q in range(config.overall_iters):
            alloc[t, q] = np.concatenate(
                allocate_groups(satellite_powers, q, config.group_sizes, rngs[t]))
        sc = _seed_codes(ys[t], h_pinv, points, places, base)
        seeds[t, :sc.size] = sc
        seed_counts[t] = sc.size
    codes, squarings = _lgsd_fast.run_batch(
        ys, h, points, alloc, sizes, seeds, seed_counts,
        config.list_len, config.ble_iters, config.glo_iters)
    if counter is not None:
        counter.add(int(squarings.sum()))
    return _decode(codes, places, base), squarings


# ---------------------------------------------------------------------------
# estimator front ends
# ---------------------------------------------------------------------------

class JointMLDetector(BaseEstimator):
    """Exhaustive maximum-likelihood detector bound to one equivalent channel.

    Parameters
    ----------
    constellation : str or Constellation, default "8psk"
    budget : int
        Cap on metric evaluations per call (|omega|^N must not exceed it).
    """

    def __init__(self, constellation="8psk", budget=DEFAULT_SEARCH_BUDGET):
        self.constellation = constellation
        self.budget = budget

    def _resolve(self):
        c = self.constellation
        return c if isinstance(c, Constellation) else make_constellation(c)

    def fit(self, channel, y=None):
        """Bind the detector to an equivalent channel matrix H."""
        self.channel_ = check_complex_matrix(channel, name="channel")
        self.constellation_ = self._resolve()
        n_codes = len(self.constellation_.points) ** self.channel_.shape[1]
        if n_codes > self.budget:
            raise SearchSpaceTooLargeError(
                f"|omega|^N = {n_codes} exceeds the search budget {self.budget}")
        self.n_streams_ = self.channel_.shape[1]
        return self

    def detect(self, y, counter: OpCounter | None = None) -> DetectionResult:
        check_is_fitted(self, "channel_")
        return jml(y, self.channel_, self.constellation_, budget=self.budget,
                   counter=counter)

    def predict(self, ys, counter: OpCounter | None = None) -> np.ndarray:
        """Detect a batch of received vectors; returns (T, N) symbol indices."""
        check_is_fitted(self, "channel_")
        digits, _ = jml_batch(ys, self.channel_, self.constellation_,
                              budget=self.budget, counter=counter)
        return digits


class LgsdDetector(BaseEstimator):
    """List-based group-wise search detector bound to one equivalent channel.

    Parameters mirror :class:`LgsdConfig`; ``list_len=None`` selects the 4N
    rule and ``group_sizes=None`` uses a single group spanning all streams.
    ``satellite_powers`` (fit) feeds the strongest-first allocation and
    defaults to the column powers of the fitted channel.
    """

    def __init__(self, constellation="8psk", list_len=None, overall_iters=2,
                 ble_iters=3, glo_iters=2, group_sizes=None, rng_seed=0,
                 engine="auto"):
        self.constellation = constellation
        self.list_len = list_len
        self.overall_iters = overall_iters
        self.ble_iters = ble_iters
        self.glo_iters = glo_iters
        self.group_sizes = group_sizes
        self.rng_seed = rng_seed
        self.engine = engine

    def fit(self, channel, y=None, satellite_powers=None):
        """Bind to an equivalent channel and freeze the search configuration."""
        self.channel_ = check_complex_matrix(channel, name="channel")
        c = self.constellation
        self.constellation_ = (
            c if isinstance(c, Constellation) else make_constellation(c))
        n = self.channel_.shape[1]
        sizes = self.group_sizes if self.group_sizes is not None else (n,)
        self.config_ = LgsdConfig(
            list_len=4 * n if self.list_len is None else self.list_len,
            overall_iters=self.overall_iters, ble_iters=self.ble_iters,
            glo_iters=self.glo_iters, group_sizes=tuple(sizes),
            rng_seed=self.rng_seed)
        if satellite_powers is not None:
            self.satellite_powers_ = np.asarray(satellite_powers, dtype=np.float64)
        else:
            self.satellite_powers_ = _abs2(self.channel_).sum(axis=0)
        self.n_streams_ = n
        return self

    def detect(self, y, rng: np.random.Generator | None = None,
               counter: OpCounter | None = None) -> DetectionResult:
        check_is_fitted(self, "channel_")
        return lgsd(y, self.channel_, self.constellation_, self.config_,
                    satellite_powers=self.satellite_powers_, rng=rng,
                    counter=counter, engine=self.engine)

    def predict(self, ys, first_trial: int = 0,
                counter: OpCounter | None = None) -> np.ndarray:
        """Detect a batch; per-row RNG derives from (rng_seed, trial index)."""
        check_is_fitted(self, "channel_")
        ys = np.atleast_2d(np.asarray(ys, dtype=np.complex128))
        rngs = [np.random.default_rng(
                    np.random.SeedSequence([self.rng_seed, first_trial + t]))
                for t in range(ys.shape[0])]
        digits, _ = lgsd_batch(ys, self.channel_, self.constellation_,
                               self.config_,
                               satellite_powers=self.satellite_powers_,
                               rngs=rngs, counter=counter, engine=self.engine)
        return digits
