"""Continuous-time event-driven simulation of multivariate dynamics on
interlacing arrays, plus the standalone one-dimensional particle systems.

The Gillespie loop recomputes all jump rates after every event; a cascade is
applied strictly bottom-up, with the slice quantities for a propagation step
evaluated on the post-move lower row and pre-move upper row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .arrays import InterlacingArray, xi
from .classifier import (
    F_quant,
    SliceContext,
    SliceSolution,
    f_quant,
    fundamental,
    left_pull,
    mix,
    pb,
    right_push,
    rsk,
    S_quant,
    T_quant,
)
from .errors import InvalidInput, InvariantViolation
from .macdonald import MacParams

_PROB_TOL = 1e-9

RECIPES = (
    "pb",
    "rsk",
    "r",
    "l",
    "qrow",
    "oconnell-pei",
    "oconnell-pei-nn",
    "det-insertion",
    "mixing",
)

_H_LENGTH = {"rsk": 0, "det-insertion": 0, "r": -1, "l": -1}


@dataclass(frozen=True)
class DynamicsSpec:
    """A named dynamics on arrays of the given depth.

    h is required for the rsk / r / l / det-insertion recipes (length depth for
    rsk and det-insertion, depth-1 for r and l).  A mixing recipe carries
    component specs and either one constant weight per component or a callable
    (level, nu_bar, lam) -> weights evaluated per slice.
    """

    params: MacParams
    a: tuple
    depth: int
    recipe: str
    h: tuple | None = None
    components: tuple = ()
    weights: object = None

    def __post_init__(self):
        if self.recipe not in RECIPES:
            raise InvalidInput(f"unknown dynamics {self.recipe!r}")
        if len(self.a) != self.depth:
            raise InvalidInput(f"need {self.depth} drift parameters, got {len(self.a)}")
        if any(v <= 0 for v in self.a):
            raise InvalidInput("drift parameters must be positive")
        if self.recipe in _H_LENGTH:
            want = self.depth + _H_LENGTH[self.recipe]
            if self.h is None or len(self.h) != want:
                raise InvalidInput(
                    f"recipe {self.recipe!r} needs an h-vector of length {want}"
                )
            for lvl, v in enumerate(self.h, start=1):
                if not 1 <= v <= lvl:
                    raise InvalidInput(f"h-vector entry {v} at position {lvl} outside 1..{lvl}")
        elif self.h is not None:
            raise InvalidInput(f"recipe {self.recipe!r} takes no h-vector")
        if self.recipe == "mixing":
            if not self.components:
                raise InvalidInput("mixing needs component specs")
            for comp in self.components:
                if comp.recipe in ("mixing", "oconnell-pei"):
                    raise InvalidInput("mixing components must be nearest-neighbor primitives")
                if (comp.params, comp.a, comp.depth) != (self.params, self.a, self.depth):
                    raise InvalidInput("mixing components must share params, a, and depth")


def _level_kind(spec: DynamicsSpec, k: int):
    if spec.recipe == "pb":
        return pb()
    if spec.recipe in ("rsk", "qrow"):
        return rsk(spec.h[k - 1] if spec.recipe == "rsk" else 1)
    if spec.recipe == "r":
        return right_push(spec.h[k - 2])
    if spec.recipe == "l":
        return left_pull(spec.h[k - 2])
    return None


def _oc_nn_solution(ctx: SliceContext) -> SliceSolution:
    F = [F_quant(ctx, j) for j in range(1, ctx.k + 2)]
    w = {m: (1 - F[m - 1]) * F[m] for m in ctx.free}
    c = {j: f_quant(ctx, j) for j in ctx.pushers}
    return SliceSolution(w=w, c=dict(c), r=dict(c))


def _det_insertion_solution(ctx: SliceContext, h: int) -> SliceSolution:
    one = ctx.params.one()
    zero = 0 * one
    free = ctx.free
    c = {j: one for j in ctx.pushers}
    r = {j: (one if j < h else zero) for j in ctx.pushers}
    w = {}
    for m, cur in enumerate(free):
        val = S_quant(ctx, cur)
        if m >= 1:
            j = cur - 1
            val -= (c[j] - r[j]) * T_quant(ctx, j)
        if m + 1 < len(free):
            j = free[m + 1] - 1
            val -= r[j] * T_quant(ctx, j)
        w[cur] = val
    return SliceSolution(w=w, c=c, r=r)


def slice_solution(spec: DynamicsSpec, k: int, nu_bar, lam) -> SliceSolution:
    """The (w, c, r) triple the dynamics uses on the slice (nu_bar, lam)."""
    ctx = SliceContext(tuple(nu_bar), tuple(lam), spec.params)
    if k == 1:
        return fundamental(pb(), ctx)  # every recipe jumps at rate a_1 here
    kind = _level_kind(spec, k)
    if kind is not None:
        return fundamental(kind, ctx)
    if spec.recipe == "oconnell-pei-nn":
        return _oc_nn_solution(ctx)
    if spec.recipe == "det-insertion":
        return _det_insertion_solution(ctx, spec.h[k - 1])
    if spec.recipe == "mixing":
        sols = [slice_solution(comp, k, nu_bar, lam) for comp in spec.components]
        if callable(spec.weights):
            thetas = spec.weights(k, tuple(nu_bar), tuple(lam))
        else:
            thetas = spec.weights
        return mix(sols, list(thetas))
    raise InvalidInput(f"recipe {spec.recipe!r} has no slice solution")


def _oc_F(ctx: SliceContext) -> list:
    return [F_quant(ctx, j) for j in range(1, ctx.k + 2)]


_SLICE_CACHE: dict = {}


def clear_caches() -> None:
    _SLICE_CACHE.clear()


def _spec_cache_key(spec: DynamicsSpec, k: int):
    if spec.recipe == "mixing" and callable(spec.weights):
        return None
    return (spec.recipe, spec.h, spec.weights, spec.params.q, spec.params.t, k)


def _slice_data(spec: DynamicsSpec, k: int, nu_bar: tuple, lam: tuple):
    """Cached float view of the slice solution: (w items, c, r, xi table).

    States recur heavily during an ensemble, so the per-slice solve is
    memoized on (recipe, level, slice)."""
    marker = _spec_cache_key(spec, k)
    key = (marker, nu_bar, lam) if marker is not None else None
    if key is not None:
        hit = _SLICE_CACHE.get(key)
        if hit is not None:
            return hit
    sol = slice_solution(spec, k, nu_bar, lam)
    w_items = tuple((m, float(v)) for m, v in sorted(sol.w.items()))
    for m, v in w_items:
        if v < -_PROB_TOL:
            raise InvariantViolation(
                f"negative jump rate {v} at level {k}, index {m}: {spec.recipe} is not "
                f"an honest dynamics on this state"
            )
    c = {}
    r = {}
    xi_of = {}
    for j in sol.c:
        cj, rj = float(sol.c[j]), float(sol.r[j])
        if rj < -_PROB_TOL or cj - rj < -_PROB_TOL or cj > 1 + _PROB_TOL:
            raise InvariantViolation(
                f"triggered-move probabilities outside [0,1] at level {k}: c={cj}, r={rj}"
            )
        c[j] = cj
        r[j] = rj
        xi_of[j] = xi(nu_bar, lam, j)
    data = (w_items, c, r, xi_of)
    if key is not None:
        _SLICE_CACHE[key] = data
    return data


def _oc_data(spec: DynamicsSpec, k: int, nu_bar: tuple, lam: tuple):
    """Cached (rates, push tables) for the randomized-insertion recipe."""
    key = ("oconnell-pei", spec.params.q, k, nu_bar, lam)
    hit = _SLICE_CACHE.get(key)
    if hit is not None:
        return hit
    ctx = SliceContext(nu_bar, lam, spec.params)
    F = [float(v) for v in _oc_F(ctx)]
    f = [float(f_quant(ctx, i)) for i in range(1, k + 1)]
    rates = []
    for j in range(1, k + 1):
        rate = 1 - F[j - 1]
        for rr in range(j + 1, k + 1):
            rate *= F[rr - 1]
        if rate:
            rates.append((j, rate))
    data = (tuple(rates), F, f)
    _SLICE_CACHE[key] = data
    return data


def jump_rates(spec: DynamicsSpec, rows: Sequence[Sequence[int]], k: int):
    """Independent jump rates [(index, rate)] at level k for the current state."""
    if k == 1:
        return [(1, float(spec.a[0]))]
    a_k = float(spec.a[k - 1])
    nu_bar, lam = tuple(rows[k - 2]), tuple(rows[k - 1])
    if spec.recipe == "oconnell-pei":
        rates, _, _ = _oc_data(spec, k, nu_bar, lam)
        return [(j, a_k * rate) for j, rate in rates]
    w_items, _, _, _ = _slice_data(spec, k, nu_bar, lam)
    return [(m, a_k * v) for m, v in w_items if v > 0]


def propagate(spec: DynamicsSpec, rows, k: int, j: int, prev: int, rng):
    """Decide the triggered move at level k after lower particle j moved.

    rows holds the post-move lower row and pre-move upper row; prev is the
    mover's coordinate before its move.  Returns (index, cause) or None.
    """
    lam = rows[k - 1]
    if lam[j - 1] == prev:
        return j, "short_push"
    nu_bar = tuple(rows[k - 2])
    lam = tuple(lam)
    if spec.recipe == "oconnell-pei":
        _, F, f = _oc_data(spec, k, nu_bar, lam)
        fi = f[j - 1]
        u = rng.random()
        if u < fi:
            return j, "long_push"
        u -= fi
        for target in range(j - 1, 0, -1):
            p = (1 - F[target - 1]) * (1 - fi)
            for rr in range(target + 1, j):
                p *= F[rr - 1]
            if u < p:
                return target, "long_push"
            u -= p
        raise InvariantViolation("randomized insertion probabilities do not sum to one")
    _, c_tab, r_tab, xi_of = _slice_data(spec, k, nu_bar, lam)
    c = c_tab[j]
    r = r_tab[j]
    u = rng.random()
    if u < r:
        target = xi_of[j]
        return target, ("long_push" if target == j else "donated")
    if u < c:
        return j + 1, "pull"
    return None


@dataclass(frozen=True)
class Event:
    """One Gillespie event: the absolute time and the bottom-up cascade of
    single-coordinate moves it produced."""

    time: float
    cascade: tuple[tuple[int, int, str], ...]

    def to_json_dict(self) -> dict:
        return {
            "time": self.time,
            "cascade": [
                {"level": lvl, "index": idx, "cause": cause}
                for lvl, idx, cause in self.cascade
            ],
        }


def _check_interlacing(rows) -> None:
    for k in range(1, len(rows)):
        low, high = rows[k - 1], rows[k]
        for j in range(len(low)):
            if not (high[j + 1] <= low[j] <= high[j]):
                raise InvariantViolation(f"interlacing broken between levels {k} and {k + 1}")


def trajectory_rng(seed, index: int = 0) -> np.random.Generator:
    """Counter-based per-trajectory stream: Philox keyed by seed, jumped to the
    trajectory index.  Equal (seed, index) reproduce bit-identical runs."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def simulate(
    spec: DynamicsSpec,
    tau: float,
    seed=None,
    initial: InterlacingArray | None = None,
    rng: np.random.Generator | None = None,
    log_events: bool = True,
):
    """Run one trajectory for time tau; returns (final array, event log)."""
    if tau < 0:
        raise InvalidInput("tau must be nonnegative")
    n = spec.depth
    if initial is None:
        initial = InterlacingArray.zeros(n)
    if initial.depth != n:
        raise InvalidInput("initial state has wrong depth")
    if rng is None:
        rng = trajectory_rng(seed)
    rows = [list(r) for r in initial.levels]
    t = 0.0
    events: list[Event] = []
    while True:
        entries = []
        total = 0.0
        for k in range(1, n + 1):
            for m, rate in jump_rates(spec, rows, k):
                entries.append((k, m, rate))
                total += rate
        if total <= 0:
            break
        t += rng.exponential(1.0 / total)
        if t > tau:
            break
        u = rng.random() * total
        for k, m, rate in entries:
            u -= rate
            if u <= 0:
                break
        cascade = [(k, m, "jump")]
        prev = rows[k - 1][m - 1]
        rows[k - 1][m - 1] += 1
        j = m
        for lvl in range(k + 1, n + 1):
            res = propagate(spec, rows, lvl, j, prev, rng)
            if res is None:
                break
            target, cause = res
            prev = rows[lvl - 1][target - 1]
            rows[lvl - 1][target - 1] += 1
            cascade.append((lvl, target, cause))
            j = target
        _check_interlacing(rows)
        if log_events:
            events.append(Event(time=t, cascade=tuple(cascade)))
    return InterlacingArray(tuple(tuple(r) for r in rows)), events


def run_ensemble(
    spec: DynamicsSpec,
    tau: float,
    samples: int,
    seed,
    initial: InterlacingArray | None = None,
    collect: Callable[[InterlacingArray], object] | None = None,
    workers: int = 1,
) -> list:
    """Simulate `samples` independent trajectories with per-trajectory Philox
    streams; returns [collect(final_state)] ordered by trajectory index."""
    collect = collect or (lambda arr: arr)
    base = np.random.Philox(key=seed)

    def one(i: int):
        rng = np.random.Generator(base.jumped(i))
        final, _ = simulate(spec, tau, initial=initial, rng=rng, log_events=False)
        return collect(final)

    if workers <= 1:
        return [one(i) for i in range(samples)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(samples)))


# --- standalone one-dimensional systems ----------------------------------------

@dataclass
class QTasep:
    """q-TASEP: particles x_1 > x_2 > ... > x_N, particle n jumps right at rate
    a_n (1 - q^{x_{n-1} - x_n - 1}); the first particle is free.

    This is the law of the leftmost array particles via x_n = lam^(n)_n - n.
    """

    q: float
    a: tuple
    x: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.x:
            self.x = [-(n + 1) for n in range(len(self.a))]
        if any(self.x[i] <= self.x[i + 1] for i in range(len(self.x) - 1)):
            raise InvalidInput("q-TASEP positions must strictly decrease")

    def rates(self) -> list[float]:
        out = [float(self.a[0])]
        for n in range(1, len(self.x)):
            gap = self.x[n - 1] - self.x[n] - 1
            out.append(float(self.a[n]) * (1.0 - float(self.q) ** gap))
        return out

    def _apply_move(self, rng, rates, total) -> int:
        u = rng.random() * total
        for n, rate in enumerate(rates):
            u -= rate
            if u <= 0:
                break
        self.x[n] += 1
        if n > 0 and self.x[n] >= self.x[n - 1]:
            raise InvariantViolation("q-TASEP ordering broken")
        return n + 1

    def step(self, rng) -> tuple[float, int | None]:
        """One Gillespie event; returns (waiting time, moved index or None)."""
        rates = self.rates()
        total = sum(rates)
        if total <= 0:
            return float("inf"), None
        dt = rng.exponential(1.0 / total)
        return dt, self._apply_move(rng, rates, total)

    def simulate(self, tau: float, rng) -> "QTasep":
        t = 0.0
        while True:
            rates = self.rates()
            total = sum(rates)
            if total <= 0:
                break
            t += rng.exponential(1.0 / total)
            if t > tau:
                break
            self._apply_move(rng, rates, total)
        return self


@dataclass
class QPushTasep:
    """q-PushTASEP: particles x_1 < x_2 < ... < x_N; particle n jumps right at
    rate a_n, and any moved particle pushes its right neighbor with probability
    q^{gap - 1} (probability one when the destination is occupied).

    This is the law of the rightmost array particles via x_n = lam^(n)_1 + n.
    """

    q: float
    a: tuple
    x: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.x:
            self.x = [n + 1 for n in range(len(self.a))]
        if any(self.x[i] >= self.x[i + 1] for i in range(len(self.x) - 1)):
            raise InvalidInput("q-PushTASEP positions must strictly increase")

    def push_probability(self, gap: int) -> float:
        if gap < 1:
            raise InvalidInput("gap must be at least 1")
        return float(self.q) ** (gap - 1)

    def _apply_move(self, rng) -> list[int]:
        u = rng.random() * float(sum(self.a))
        for n in range(len(self.a)):
            u -= float(self.a[n])
            if u <= 0:
                break
        moved = []
        i = n
        while True:
            push = None
            if i + 1 < len(self.x):
                push = self.push_probability(self.x[i + 1] - self.x[i])
            self.x[i] += 1
            moved.append(i + 1)
            if push is None or rng.random() >= push:
                break
            i += 1
        if any(self.x[j] >= self.x[j + 1] for j in range(len(self.x) - 1)):
            raise InvariantViolation("q-PushTASEP ordering broken")
        return moved

    def step(self, rng) -> tuple[float, list[int]]:
        """One Gillespie event; returns (waiting time, 1-based moved indices,
        cascades included)."""
        dt = rng.exponential(1.0 / float(sum(self.a)))
        return dt, self._apply_move(rng)

    def simulate(self, tau: float, rng) -> "QPushTasep":
        t = 0.0
        total = float(sum(self.a))
        while True:
            t += rng.exponential(1.0 / total)
            if t > tau:
                break
            self._apply_move(rng)
        return self


def leftmost_coordinates(arr: InterlacingArray) -> tuple[int, ...]:
    """(lam^(1)_1, ..., lam^(N)_N): the leftmost particle of each level."""
    return tuple(arr.row(k)[k - 1] for k in range(1, arr.depth + 1))


def rightmost_coordinates(arr: InterlacingArray) -> tuple[int, ...]:
    """(lam^(1)_1, ..., lam^(N)_1): the rightmost particle of each level."""
    return tuple(arr.row(k)[0] for k in range(1, arr.depth + 1))
