"""Integration against quasi-measures through pushforward distributions on the line.

A sampled function ``a`` and a quasi-measure ``m`` give the distribution
function ``F(t) = m(a <= t)`` over the finitely many sample values.  Its jumps
form an atomic probability measure on the line, and the integral of ``a`` is
the first moment of that measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvariantViolation, PreconditionViolation, SpaceMismatch
from .grid import CLOSED, OPEN, Grid, Image, erode, erosion_depth
from .measures import QuasiMeasure, TOL, is_exact_value, values_equal
from .reports import Report, status_of

CHANGE_OF_VARIABLES_TOL = 1e-9


class GridFunction:
    """A bounded function sampled once per cell of a space."""

    __slots__ = ("space", "values", "name")

    def __init__(self, space, values, name: str = ""):
        values = np.array(values, dtype=float).reshape(-1)
        if values.size != space.size:
            raise ValueError(f"function has {values.size} samples, space has {space.size} cells")
        if not np.all(np.isfinite(values)):
            raise ValueError("function samples must be finite")
        values.setflags(write=False)
        self.space = space
        self.values = values
        self.name = name

    @classmethod
    def constant(cls, space, c: float) -> "GridFunction":
        return cls(space, np.full(space.size, float(c)), f"constant:{c}")

    def map(self, phi: Callable[[float], float], name: str | None = None) -> "GridFunction":
        """Apply ``phi`` valuewise on the exact sample values."""
        uniq, inverse = np.unique(self.values, return_inverse=True)
        image = np.array([float(phi(float(v))) for v in uniq])
        return GridFunction(self.space, image[inverse], name or f"phi({self.name})")

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.space != self.space:
                raise SpaceMismatch("functions live on different spaces")
            return other.values
        return float(other)

    def __add__(self, other):
        return GridFunction(self.space, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.space, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.space, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.space, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.space, -self.values)

    def norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def le(self, other: "GridFunction") -> bool:
        return bool(np.all(self.values <= self._other(other)))

    def __repr__(self):
        return f"GridFunction({self.name or '?'}, {self.space})"

    def to_csv(self) -> str:
        if self.space.is_discrete:
            rows = [self.values]
        else:
            rows = self.values.reshape(self.space.shape)
        return "\n".join(",".join(repr(float(v)) for v in row) for row in rows) + "\n"

    @classmethod
    def from_csv(cls, text: str, space, name: str = "") -> "GridFunction":
        rows = [ln for ln in text.strip().splitlines() if ln.strip()]
        values = [[float(x) for x in row.split(",")] for row in rows]
        if not space.is_discrete and (len(values) != space.n or any(len(r) != space.n for r in values)):
            raise ValueError(f"CSV is not {space.n}x{space.n}")
        return cls(space, np.array(values).reshape(-1), name)


def _exact_builtin(grid: Grid, name: str) -> list[Fraction]:
    m = grid.n - 1
    r, c = np.divmod(np.arange(grid.size), grid.n)
    head, _, arg = name.partition(":")
    x0, y0, x1, y1 = (Fraction(v) for v in grid.domain)
    if head == "pyramid":
        return [Fraction(2 * min(ci, m - ci, ri, m - ri), m) for ri, ci in zip(r, c)]
    if head == "plane_b":
        return [Fraction(max(0, 2 * (m - ri) - m), m) for ri in r]
    if head == "constant":
        v = Fraction(arg)
        return [v] * grid.size
    if head == "coords" and arg == "x":
        return [x0 + (x1 - x0) * Fraction(int(ci), m) for ci in c]
    if head == "coords" and arg == "y":
        return [y0 + (y1 - y0) * Fraction(m - int(ri), m) for ri in r]
    raise ValueError(f"unknown builtin function {name!r}")


def builtin_function(grid: Grid, name: str) -> GridFunction:
    """Generators ``pyramid``, ``plane_b``, ``constant:<c>``, ``coords:x``, ``coords:y``.

    Terms joined by ``+`` are summed in exact arithmetic before rounding to
    floats, so ``pyramid+plane_b`` is exactly 1 on the top triangle.
    """
    terms = [t.strip() for t in name.split("+")]
    total = [Fraction(0)] * grid.size
    for term in terms:
        total = [s + v for s, v in zip(total, _exact_builtin(grid, term))]
    return GridFunction(grid, [float(v) for v in total], name)


def sublevel(a: GridFunction, t: float) -> Image:
    """Closed image of the cells where ``a <= t``."""
    return Image(a.space, a.values <= t, CLOSED)


def superlevel(a: GridFunction, t: float) -> Image:
    """Open image of the cells where ``a > t``; the complement of :func:`sublevel`."""
    return Image(a.space, a.values > t, OPEN)


def level_preimage(a: GridFunction, lo: float, hi: float, kind: str) -> Image:
    """Preimage of ``[lo, hi]`` (closed) or ``(lo, hi)`` (open)."""
    v = a.values
    mask = (v >= lo) & (v <= hi) if kind == CLOSED else (v > lo) & (v < hi)
    return Image(a.space, mask, kind)


def spectrum(a: GridFunction) -> tuple[float, ...]:
    """Distinct sample values in increasing order; the closure of a finite range is itself."""
    return tuple(float(v) for v in np.unique(a.values))


def _neighbour_pairs(values: np.ndarray, n: int):
    v = values.reshape(n, n)
    yield v[:, 1:], v[:, :-1]
    yield v[1:, :], v[:-1, :]
    yield v[1:, 1:], v[:-1, :-1]
    yield v[1:, :-1], v[:-1, 1:]


def is_grid_continuous(a: GridFunction) -> bool:
    """Grid stand-in for continuity: level sets separate as they would in the continuum.

    Two conditions. No pair of 8-neighbours skips over a value the function
    attains, and no 2x2 block is a diagonal pinch (both cells of one
    diagonal strictly below both cells of the other), so every sublevel set
    has the same components under 4- and 8-adjacency. Functions that fail
    can break quasi-linearity identities exactly, through grid artifacts.
    Discrete spaces always qualify.
    """
    if a.space.is_discrete:
        return True
    n = a.space.n
    ranks = np.searchsorted(np.unique(a.values), a.values)
    if any(np.abs(x - y).max(initial=0) > 1 for x, y in _neighbour_pairs(ranks, n)):
        return False
    v = a.values.reshape(n, n)
    p, q, r, t = v[:-1, :-1], v[:-1, 1:], v[1:, :-1], v[1:, 1:]
    pinch = (np.maximum(p, t) < np.minimum(q, r)) | (np.maximum(q, r) < np.minimum(p, t))
    return not pinch.any()


def resolve_steps(a: GridFunction) -> GridFunction:
    """Round ``a`` down onto a dyadic lattice no finer than its largest neighbour jump.

    Afterwards no neighbour pair skips an attained value; diagonal pinches
    may remain. The result stays within one lattice step of ``a``.
    """
    if a.space.is_discrete:
        return a
    jump = max(float(np.abs(x - y).max(initial=0.0)) for x, y in _neighbour_pairs(a.values, a.space.n))
    if jump == 0:
        return a
    h = 2.0 ** math.ceil(math.log2(jump))
    return GridFunction(a.space, np.floor(a.values / h) * h, a.name)


@dataclass(frozen=True)
class PushforwardDistribution:
    """Atomic probability measure on the line: sorted ``(t, mass)`` pairs."""

    jumps: tuple

    def __post_init__(self):
        ts = [t for t, _ in self.jumps]
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise InvariantViolation("jump locations must be strictly increasing")
        if any(not mass > 0 for _, mass in self.jumps):
            raise InvariantViolation("jump masses must be positive")
        total = sum(mass for _, mass in self.jumps)
        if not values_equal(total, 1):
            raise InvariantViolation(f"masses sum to {total}")

    @property
    def atoms(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.jumps)

    def cdf(self, t: float):
        return sum((mass for s, mass in self.jumps if s <= t), 0)

    def expect(self, phi: Callable[[float], float] = lambda t: t) -> float:
        return math.fsum(float(phi(t)) * float(mass) for t, mass in self.jumps)

    def mean(self) -> float:
        return self.expect()

    def pushforward(self, phi: Callable[[float], float]) -> "PushforwardDistribution":
        merged: dict[float, object] = {}
        for t, mass in self.jumps:
            s = float(phi(t))
            merged[s] = merged.get(s, 0) + mass
        return PushforwardDistribution(tuple(sorted(merged.items())))


def _check_space(m: QuasiMeasure, a: GridFunction) -> None:
    if m.space != a.space:
        raise SpaceMismatch(f"function lives on {a.space}, measure on {m.space}")


def _is_increase(lo, hi) -> bool:
    if is_exact_value(lo) and is_exact_value(hi):
        return hi > lo
    return hi - lo > TOL


def pushforward_distribution(m: QuasiMeasure, a: GridFunction, method: str = "bisect") -> PushforwardDistribution:
    """Distribution of ``a`` under ``m`` from the closed sublevel sets of ``a``.

    ``method="sweep"`` evaluates every threshold.  ``method="bisect"`` splits
    the sorted thresholds and skips any stretch over which ``F`` is flat at
    both ends, which monotonicity makes exact; it costs a few evaluations per
    jump instead of one per distinct value.
    """
    _check_space(m, a)
    ts = np.unique(a.values)
    k = len(ts)
    cache: dict[int, object] = {-1: m(a.space.empty(CLOSED))}
    if not values_equal(cache[-1], 0):
        raise InvariantViolation("the empty image has nonzero value")

    def F(i):
        if i not in cache:
            cache[i] = m(sublevel(a, ts[i]))
        return cache[i]

    top = F(k - 1)
    if not values_equal(top, 1):
        raise InvariantViolation(f"the whole space has value {top}")

    if method == "sweep":
        for i in range(k):
            F(i)
    elif method == "bisect":
        stack = [(-1, k - 1)]
        while stack:
            lo, hi = stack.pop()
            flo, fhi = F(lo), F(hi)
            if hi - lo <= 1 or not _is_increase(flo, fhi):
                continue
            mid = (lo + hi) // 2
            fm = F(mid)
            if _is_increase(fm, flo) or _is_increase(fhi, fm):
                raise InvariantViolation("distribution function decreases")
            stack.append((mid, hi))
            stack.append((lo, mid))
    else:
        raise ValueError(f"unknown method {method!r}")

    idx = sorted(cache)
    jumps = []
    for prev, cur in zip(idx, idx[1:]):
        fp, fc = cache[prev], cache[cur]
        if _is_increase(fc, fp):
            raise InvariantViolation("distribution function decreases")
        if _is_increase(fp, fc):
            if cur - prev > 1:
                raise InvariantViolation("unresolved jump between evaluated thresholds")
            jumps.append((float(ts[cur]), fc - fp))
    return PushforwardDistribution(tuple(jumps))


def integrate(m: QuasiMeasure, a: GridFunction, method: str = "bisect") -> float:
    """First moment of the pushforward distribution of ``a`` under ``m``."""
    return pushforward_distribution(m, a, method).mean()


def simple_value(sigma: QuasiMeasure, a: GridFunction) -> float:
    """The single atom of the distribution of ``a`` under a simple ``sigma``.

    Binary search for the least sample value whose sublevel set has value one.
    """
    _check_space(sigma, a)
    ts = np.unique(a.values)

    def F(i):
        v = sigma(sublevel(a, ts[i])) if i >= 0 else sigma(a.space.empty(CLOSED))
        if not (values_equal(v, 0) or values_equal(v, 1)):
            raise InvariantViolation(f"measure takes value {v} on a sublevel set; it is not simple here")
        return values_equal(v, 1)

    lo, hi = -1, len(ts) - 1
    if F(lo) or not F(hi):
        raise InvariantViolation("measure is not normalized on this function")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if F(mid):
            hi = mid
        else:
            lo = mid
    return float(ts[hi])


@dataclass(frozen=True)
class StaircaseDecomposition:
    """Clamped splitting of ``a <= b`` into pieces ``a_i``, ``b_i`` with ``a_i <= b_i + delta/n``."""

    a: GridFunction
    b: GridFunction
    delta: float
    shift: float
    betas: np.ndarray
    a_shifted: np.ndarray  # phi_i(a + M), one row per piece
    b_shifted: np.ndarray  # phi_i(b + M + delta)

    @property
    def n(self) -> int:
        return len(self.betas) - 1

    @property
    def a_pieces(self) -> np.ndarray:
        return self.a_shifted - self.shift / self.n

    @property
    def b_pieces(self) -> np.ndarray:
        return self.b_shifted - (self.shift + self.delta) / self.n

    @property
    def pieces(self) -> list[tuple[GridFunction, GridFunction]]:
        sp = self.a.space
        return [(GridFunction(sp, ai, f"a_{i + 1}"), GridFunction(sp, bi, f"b_{i + 1}"))
                for i, (ai, bi) in enumerate(zip(self.a_pieces, self.b_pieces))]

    def residuals(self) -> dict:
        steps = np.diff(self.betas)[:, None]
        return {
            "sum_a": float(np.max(np.abs(self.a_pieces.sum(axis=0) - self.a.values))),
            "sum_b": float(np.max(np.abs(self.b_pieces.sum(axis=0) - self.b.values))),
            "dominance": float(np.max(self.a_pieces - self.b_pieces - self.delta / self.n)),
            "proof_identity": float(np.max(np.abs(self.a_shifted * (steps - self.b_shifted)))),
        }

    def holds(self, tol: float = 1e-12) -> bool:
        r = self.residuals()
        return r["sum_a"] <= tol and r["sum_b"] <= tol and r["dominance"] <= tol and r["proof_identity"] == 0.0


def staircase(a: GridFunction, b: GridFunction, delta: float, shift: float | None = None,
              pieces: int | None = None) -> StaircaseDecomposition:
    """Build the staircase pieces of ``a <= b`` for a given ``delta > 0``.

    By default the shift is ``max(0, -min a)`` and the partition of
    ``[0, max(b + shift + delta)]`` is uniform with the fewest pieces whose
    width is strictly below ``delta``.
    """
    if a.space != b.space:
        raise SpaceMismatch("a and b live on different spaces")
    if not delta > 0:
        raise PreconditionViolation("delta must be positive")
    if not a.le(b):
        raise PreconditionViolation("staircase needs a <= b pointwise")
    M = max(0.0, -float(a.values.min())) if shift is None else float(shift)
    at = a.values + M
    if at.min() < 0:
        raise PreconditionViolation("shift too small: a + shift must be nonnegative")
    bt = b.values + M + delta
    beta = float(np.max(np.abs(bt)))
    if pieces is None:
        n = math.floor(beta / delta) + 1
    else:
        n = int(pieces)
        if n < 1 or beta / n > delta:
            raise PreconditionViolation("partition steps must not exceed delta")
    betas = beta * np.arange(n + 1) / n
    betas[-1] = beta
    lo, hi = betas[:-1, None], betas[1:, None]
    a_sh = np.clip(at[None, :], lo, hi) - lo
    b_sh = np.clip(bt[None, :], lo, hi) - lo
    return StaircaseDecomposition(a, b, float(delta), M, betas, a_sh, b_sh)


def _report_close(check, claim, lhs, rhs, tol, **extra) -> Report:
    gap = abs(float(lhs) - float(rhs))
    return Report(check, claim, status_of(gap <= tol), {"lhs": lhs, "rhs": rhs, "discrepancy": gap, **extra})


def change_of_variables_check(m: QuasiMeasure, a: GridFunction, phi: Callable[[float], float],
                              tol: float = CHANGE_OF_VARIABLES_TOL) -> Report:
    """Integral of ``phi(a)`` against the integral of ``phi`` under the distribution of ``a``."""
    lhs = integrate(m, a.map(phi))
    rhs = pushforward_distribution(m, a).expect(phi)
    return _report_close("change_of_variables", "integral of phi(a) equals the integral of phi under the distribution of a",
                         lhs, rhs, tol)


def quasi_linearity_check(m: QuasiMeasure, a: GridFunction, phi, psi,
                          tol: float = CHANGE_OF_VARIABLES_TOL) -> Report:
    """Linearity on the algebra generated by ``a``, positivity and normalization."""
    fa, ga = a.map(phi), a.map(psi)
    s = GridFunction(a.space, fa.values + ga.values, "phi(a)+psi(a)")
    i_sum, i_f, i_g = integrate(m, s), integrate(m, fa), integrate(m, ga)
    linear = abs(i_sum - (i_f + i_g)) <= tol
    positive = integrate(m, fa * fa) >= 0 and integrate(m, ga * ga) >= 0
    for f, i in ((fa, i_f), (ga, i_g)):
        if f.values.min() >= 0 and i < 0:
            positive = False
    one = integrate(m, GridFunction.constant(a.space, 1.0))
    normalized = one == 1.0
    return Report(
        "quasi_linearity",
        "the integral is linear on functions of one generator, positive and normalized",
        status_of(linear and positive and normalized),
        {"sum": i_sum, "phi": i_f, "psi": i_g, "linear": linear, "positive": positive, "unit": one},
    )


def multiplicativity_check(sigma: QuasiMeasure, a: GridFunction, phi, psi,
                           tol: float | None = 0.0) -> Report:
    """For simple ``sigma``: integral of ``phi(a) psi(a)`` is the product of the integrals."""
    fa, ga = a.map(phi), a.map(psi)
    lhs = integrate(sigma, fa * ga)
    rhs = integrate(sigma, fa) * integrate(sigma, ga)
    return _report_close("multiplicativity", "a simple quasi-measure integrates products multiplicatively",
                         lhs, rhs, tol or 0.0)


def monotonicity_check(m: QuasiMeasure, pairs: Iterable[tuple[GridFunction, GridFunction]]) -> Report:
    bad = []
    count = 0
    for a, b in pairs:
        if not a.le(b):
            raise PreconditionViolation("monotonicity pairs need a <= b")
        count += 1
        ia, ib = integrate(m, a), integrate(m, b)
        if ia > ib:
            bad.append((a.name, b.name, ia, ib))
    return Report("functional_monotonicity", "a <= b implies integral of a <= integral of b",
                  status_of(not bad), {"pairs": count, "failures": len(bad)},
                  {"first": list(bad[0])} if bad else None)


def lipschitz_check(m: QuasiMeasure, pairs: Iterable[tuple[GridFunction, GridFunction]]) -> Report:
    worst = -math.inf
    count = 0
    for a, b in pairs:
        count += 1
        gap = abs(integrate(m, a) - integrate(m, b)) - (a - b).norm()
        worst = max(worst, gap)
    return Report("lipschitz", "integrals differ by at most the max-norm distance",
                  status_of(worst <= CHANGE_OF_VARIABLES_TOL), {"pairs": count, "worst_excess": worst})


def consistency_check(m: QuasiMeasure, a: GridFunction, phi) -> Report:
    """For monotone ``phi``: distribution of ``phi(a)`` is the image of the distribution of ``a``."""
    direct = pushforward_distribution(m, a.map(phi))
    mapped = pushforward_distribution(m, a).pushforward(phi)
    same = len(direct.jumps) == len(mapped.jumps) and all(
        t1 == t2 and values_equal(m1, m2) for (t1, m1), (t2, m2) in zip(direct.jumps, mapped.jumps))
    return Report("distribution_consistency",
                  "the distribution of phi(a) is the distribution of a pushed through phi",
                  status_of(same), {"direct": [list(j) for j in direct.jumps], "mapped": [list(j) for j in mapped.jumps]})


def monotone_chain_check(m: QuasiMeasure, chain: Sequence[GridFunction]) -> Report:
    """Along an increasing chain of functions the integrals increase to the last one."""
    vals = [integrate(m, f) for f in chain]
    nested = all(chain[i].le(chain[i + 1]) for i in range(len(chain) - 1))
    ok = nested and all(vals[i] <= vals[i + 1] for i in range(len(vals) - 1))
    return Report("monotone_convergence", "integrals along an increasing chain increase to the limit integral",
                  status_of(ok), {"integrals": vals, "nested": nested})


def plateau(u: Image, ramp: int = 2) -> GridFunction:
    """Function ``0 <= k <= 1`` vanishing off ``erode(u, 1)``, equal to 1 on ``erode(u, ramp)``."""
    grid = u.space
    depth = erosion_depth(u.mask, grid)
    values = np.clip(depth / ramp, 0.0, 1.0)
    return GridFunction(grid, values, f"plateau{ramp}")


def is_subordinate(k: GridFunction, u: Image) -> bool:
    grid = u.space
    inner1 = erode(u.mask, 1, grid)
    inner2 = erode(u.mask, 2, grid)
    v = k.values
    return bool(np.all(v >= 0) and np.all(v <= 1) and np.all(v[~inner1] == 0) and np.all(v[inner2] == 1))


def riesz_roundtrip_check(m: QuasiMeasure, open_family: Sequence[Image],
                          subordinates: Sequence[Sequence[GridFunction]] | None = None) -> Report:
    """Value of each open image against the best integral of a subordinate plateau.

    Witness-based: a pass means the supplied plateaus attain the value.
    """
    if subordinates is None:
        subordinates = [[plateau(u, 1), plateau(u, 2)] for u in open_family]
    if len(subordinates) != len(open_family):
        raise PreconditionViolation("need one list of subordinate functions per open image")
    rows = []
    failures = 0
    for u, ks in zip(open_family, subordinates):
        if not u.is_open():
            raise PreconditionViolation("riesz round trip needs open images")
        for k in ks:
            if not is_subordinate(k, u):
                raise PreconditionViolation(f"function {k.name} is not subordinate to the open image")
        best = max(integrate(m, k) for k in ks)
        value = m(u)
        ok = abs(best - float(value)) <= TOL
        failures += not ok
        rows.append({"measure_value": value, "best_integral": best, "ok": ok})
    return Report("riesz_roundtrip", "value of an open set is the supremum of integrals of functions below it",
                  status_of(failures == 0), {"sets": len(rows), "failures": failures, "rows": rows})
