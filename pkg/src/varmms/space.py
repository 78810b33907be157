"""Finite metric measure spaces: storage, ball queries, nets, covering diagnostics.

A space is a finite point set with a full distance matrix and strictly
positive point weights (the measure).  All operations are pure; a space is
immutable after construction.  Distance matrices are validated once when a
space is built through one of the ``from_*`` constructors; internal
re-slicing (``subspace``) skips re-validation because restrictions of a
metric stay metric.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpaceValidationError",
    "MetricMeasureSpace",
    "Ball",
    "ball",
    "critical_radii",
    "separated_net",
    "product_cover_check",
    "overlap_bound_check",
    "estimate_doubling",
    "uniform_perfectness",
    "perfectness_resolution",
    "phi",
    "phi_iterates",
]

# exhaustive triangle check up to this size, random triples beyond
_EXHAUSTIVE_TRIANGLE_LIMIT = 200
_TRIANGLE_SAMPLES = 100_000
_TRIANGLE_SLACK = 1e-9


class SpaceValidationError(ValueError):
    """Raised when a distance matrix or weight vector fails validation."""


@dataclass(frozen=True)
class MetricMeasureSpace:
    dist: np.ndarray
    weight: np.ndarray
    labels: tuple[str, ...] | None = None
    coords: np.ndarray | None = None
    atoms: tuple[int, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.weight.sum())

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n > 1 else 0.0

    def min_positive_distance(self) -> float:
        if self.n < 2:
            raise ValueError("need at least two points")
        off = self.dist[~np.eye(self.n, dtype=bool)]
        return float(off.min())

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_matrix(cls, dist, weight, labels=None, coords=None, atoms=()):
        dist = np.asarray(dist, dtype=float)
        weight = np.asarray(weight, dtype=float)
        _validate(dist, weight)
        return cls(dist=dist, weight=weight,
                   labels=tuple(labels) if labels is not None else None,
                   coords=None if coords is None else np.asarray(coords, dtype=float),
                   atoms=tuple(int(a) for a in atoms))

    @classmethod
    def from_points(cls, coords, weight, labels=None, atoms=()):
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        if coords.ndim == 2 and coords.shape[0] == 1 and np.ndim(weight) and len(np.atleast_1d(weight)) > 1:
            coords = coords.T
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=-1))
        dist = 0.5 * (dist + dist.T)
        np.fill_diagonal(dist, 0.0)
        return cls.from_matrix(dist, weight, labels=labels, coords=coords, atoms=atoms)

    @classmethod
    def from_json(cls, payload):
        if isinstance(payload, (str, bytes)):
            payload = json.loads(payload)
        n = int(payload["n"])
        weight = np.asarray(payload["weights"], dtype=float)
        if weight.shape != (n,):
            raise SpaceValidationError(f"expected {n} weights, got {weight.shape}")
        metric = payload["metric"]
        labels = payload.get("labels")
        atoms = payload.get("atoms", ())
        if metric["type"] == "matrix":
            return cls.from_matrix(metric["values"], weight, labels=labels, atoms=atoms)
        if metric["type"] == "euclidean":
            coords = np.asarray(metric["coords"], dtype=float)
            if coords.shape[0] != n:
                raise SpaceValidationError(f"expected {n} coordinate rows, got {coords.shape[0]}")
            return cls.from_points(coords, weight, labels=labels, atoms=atoms)
        raise SpaceValidationError(f"unknown metric type {metric['type']!r}")

    def to_json(self) -> dict:
        payload = {"n": self.n, "weights": self.weight.tolist()}
        if self.coords is not None:
            payload["metric"] = {"type": "euclidean", "coords": self.coords.tolist()}
        else:
            payload["metric"] = {"type": "matrix", "values": self.dist.tolist()}
        if self.labels is not None:
            payload["labels"] = list(self.labels)
        if self.atoms:
            payload["atoms"] = list(self.atoms)
        return payload

    # -- derived views -----------------------------------------------------

    def subspace(self, indices) -> "MetricMeasureSpace":
        """Restriction to a point subset (no re-validation needed)."""
        idx = np.asarray(indices, dtype=int)
        if idx.size == 0:
            raise ValueError("subspace needs at least one point")
        sub_atoms = tuple(int(k) for k, orig in enumerate(idx) if orig in self.atoms)
        return MetricMeasureSpace(
            dist=self.dist[np.ix_(idx, idx)],
            weight=self.weight[idx],
            labels=None if self.labels is None else tuple(self.labels[i] for i in idx),
            coords=None if self.coords is None else self.coords[idx],
            atoms=sub_atoms,
        )


def _validate(dist: np.ndarray, weight: np.ndarray) -> None:
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise SpaceValidationError(f"distance matrix must be square, got {dist.shape}")
    n = dist.shape[0]
    if weight.shape != (n,):
        raise SpaceValidationError(f"expected {n} weights, got {weight.shape}")
    if not np.all(np.isfinite(dist)) or not np.all(np.isfinite(weight)):
        raise SpaceValidationError("non-finite entries")
    if np.any(weight <= 0):
        i = int(np.argmin(weight))
        raise SpaceValidationError(f"weight[{i}] = {weight[i]} must be > 0")
    if np.any(np.abs(np.diag(dist)) > 0):
        i = int(np.argmax(np.abs(np.diag(dist))))
        raise SpaceValidationError(f"dist[{i}][{i}] = {dist[i, i]} must be 0")
    if not np.allclose(dist, dist.T, rtol=0, atol=0):
        bad = np.argwhere(dist != dist.T)[0]
        raise SpaceValidationError(f"asymmetry at ({bad[0]}, {bad[1]})")
    off = ~np.eye(n, dtype=bool)
    if n > 1 and np.any(dist[off] <= 0):
        i, j = np.argwhere((dist <= 0) & off)[0]
        raise SpaceValidationError(f"dist[{i}][{j}] = {dist[i, j]} must be > 0 for distinct points")
    _check_triangle(dist)


def _check_triangle(dist: np.ndarray) -> None:
    n = dist.shape[0]
    scale = max(1.0, float(dist.max(initial=0.0)))
    slack = _TRIANGLE_SLACK * scale
    if n <= _EXHAUSTIVE_TRIANGLE_LIMIT:
        for k in range(n):
            via = dist[:, k][:, None] + dist[k, :][None, :]
            bad = dist > via + slack
            if bad.any():
                i, j = map(int, np.argwhere(bad)[0])
                raise SpaceValidationError(
                    f"triangle inequality fails for ({i}, {j}, {k}): "
                    f"{dist[i, j]} > {dist[i, k]} + {dist[k, j]}")
        return
    rng = np.random.default_rng(0)
    ii = rng.integers(0, n, _TRIANGLE_SAMPLES)
    jj = rng.integers(0, n, _TRIANGLE_SAMPLES)
    kk = rng.integers(0, n, _TRIANGLE_SAMPLES)
    bad = dist[ii, jj] > dist[ii, kk] + dist[kk, jj] + slack
    if bad.any():
        t = int(np.argmax(bad))
        raise SpaceValidationError(
            f"triangle inequality fails for ({ii[t]}, {jj[t]}, {kk[t]})")


# -- balls -----------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    center: int
    radius: float
    members: np.ndarray
    measure: float
    closed: bool = False


def ball(space: MetricMeasureSpace, center: int, r: float, closed: bool = False) -> Ball:
    """Open ball ``{j : d(center, j) < r}`` (closed variant via flag)."""
    if not 0 <= center < space.n:
        raise IndexError(f"center {center} out of range for {space.n} points")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    row = space.dist[center]
    mask = (row <= r) if closed else (row < r)
    members = np.flatnonzero(mask)
    return Ball(center=center, radius=float(r), members=members,
                measure=float(space.weight[members].sum()), closed=closed)


def critical_radii(space: MetricMeasureSpace, r_min: float = 0.0,
                   r_max: float = np.inf) -> np.ndarray:
    """Sorted distinct positive pairwise distances plus midpoints between
    consecutive values, clipped to ``[r_min, r_max]``.

    Ball membership is piecewise constant in r, so "for all r" checks
    quantify over this finite set.
    """
    if space.n < 2:
        return np.array([])
    off = space.dist[np.triu_indices(space.n, k=1)]
    vals = np.unique(off[off > 0])
    if vals.size == 0:
        return np.array([])
    mids = 0.5 * (vals[:-1] + vals[1:])
    out = np.unique(np.concatenate([vals, mids]))
    return out[(out >= r_min) & (out <= r_max)]


# -- nets and covering -----------------------------------------------------

def separated_net(space: MetricMeasureSpace, r: float) -> list[int]:
    """Greedy maximal r/2-separated subset, scanning indices in order.

    The output is r/2-separated and every point lies within r/2 of it, so
    the balls B(s, r), s in the net, cover the space.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    sep = r / 2.0
    net: list[int] = []
    for i in range(space.n):
        if all(space.dist[i, s] >= sep for s in net):
            net.append(i)
    return net


def product_cover_check(space: MetricMeasureSpace, delta: float) -> dict:
    """Net-based product cover: a delta/4-net {z_i} whose delta/2-balls
    jointly contain every pair at distance below delta/4.

    Returns the net and the worst pair diagnostics (the global regularity
    harness reduces small-separation pairs to inflated net balls this way).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    net = separated_net(space, delta / 4.0)
    ok = True
    witness = None
    net_dist = space.dist[:, net]
    for x in range(space.n):
        close = np.flatnonzero((space.dist[x] < delta / 4.0) & (space.dist[x] > 0))
        for y in close:
            covered = (net_dist[x] < delta / 2.0) & (net_dist[y] < delta / 2.0)
            if not covered.any():
                ok = False
                witness = (int(x), int(y))
    return {"net": net, "ok": ok, "witness": witness, "delta": float(delta)}


def estimate_doubling(space: MetricMeasureSpace) -> int:
    """Upper estimate of the geometric doubling constant.

    For every center and every radius in the critical set (pairwise
    distances and their doubles), greedily cover B(x, r) by balls of radius
    r/2 centered at points of B(x, r); return the worst cover size.  Greedy
    order is farthest-point, seeded at the lowest index, ties to the lowest
    index, so the result is deterministic.
    """
    if space.n == 1:
        return 1
    off = space.dist[np.triu_indices(space.n, k=1)]
    base = np.unique(off[off > 0])
    radii = np.unique(np.concatenate([base, 2.0 * base]))
    worst = 1
    for x in range(space.n):
        row = space.dist[x]
        for r in radii:
            members = np.flatnonzero(row < r)
            if members.size <= worst:
                continue
            worst = max(worst, _greedy_cover_size(space, members, r / 2.0))
    return worst


def _greedy_cover_size(space: MetricMeasureSpace, members: np.ndarray, radius: float) -> int:
    d = space.dist[np.ix_(members, members)]
    m = members.size
    covered = np.zeros(m, dtype=bool)
    # distance from each point to the chosen center set
    dist_to_centers = np.full(m, np.inf)
    count = 0
    nxt = 0  # lowest index first
    while True:
        covered |= d[nxt] < radius
        count += 1
        if covered.all():
            return count
        np.minimum(dist_to_centers, d[nxt], out=dist_to_centers)
        cand = np.where(covered, -np.inf, dist_to_centers)
        nxt = int(np.argmax(cand))


def overlap_bound_check(space: MetricMeasureSpace, r: float, R: float,
                        net: list[int] | None = None,
                        doubling: int | None = None) -> dict:
    """Compare the empirical overlap of the net balls B(net_i, R) with the
    covering bound A (R/r)^B, where A = M^3 and B = log2 M for the greedy
    doubling estimate M.
    """
    if not R > r > 0:
        raise ValueError("need R > r > 0")
    if net is None:
        net = separated_net(space, r)
    M = estimate_doubling(space) if doubling is None else int(doubling)
    sub = space.dist[np.ix_(np.arange(space.n), np.asarray(net, dtype=int))]
    multiplicity = int((sub < R).sum(axis=1).max())
    bound = (M ** 3) * (R / r) ** np.log2(max(M, 1))
    # reverse direction: a cover with overlap constants (A, B) forces the
    # doubling estimate to stay below A 3**B
    reverse = float(M ** 3) * 3.0 ** np.log2(max(M, 1))
    return {
        "multiplicity": multiplicity,
        "bound": float(bound),
        "doubling_estimate": M,
        "net_size": len(net),
        "reverse_doubling_bound": reverse,
        "ok": multiplicity <= bound + 1e-12 and M <= reverse + 1e-12,
    }


# -- uniform perfectness ---------------------------------------------------

_LAMBDA_GRID = np.round(np.arange(0.01, 1.0, 0.01), 2)


def perfectness_resolution(space: MetricMeasureSpace) -> float:
    """Smallest sensible resolution scale for the perfectness check: just
    above the largest nearest-neighbor gap, so no scanned ball is a
    singleton (singleton balls make the annulus condition vacuously fail)."""
    if space.n < 2:
        raise ValueError("need at least two points")
    d = space.dist + np.where(np.eye(space.n, dtype=bool), np.inf, 0.0)
    return float(d.min(axis=1).max()) * (1.0 + 1e-9)


def uniform_perfectness(space: MetricMeasureSpace, epsilon: float,
                        lambdas: np.ndarray | None = None) -> float | None:
    """Largest grid value lambda in (0, 1) such that B(x, r) \\ B(x, lambda r)
    is nonempty for all centers and all critical radii r >= epsilon with
    X \\ B(x, r) nonempty.

    Finite spaces are never literally uniformly perfect below their minimum
    gap; ``epsilon`` restricts the quantifier and must be reported with the
    result.  Returns None if no grid value works.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if lambdas is None:
        lambdas = _LAMBDA_GRID
    radii = critical_radii(space)
    radii = radii[radii >= epsilon]
    best = None
    for lam in np.sort(lambdas):
        ok = True
        for x in range(space.n):
            row = space.dist[x]
            for r in radii:
                inside = row < r
                if inside.all():
                    continue  # X \ B(x,r) empty: vacuous
                if not np.any(inside & (row >= lam * r)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            best = float(lam)
    return best


# -- measure-halving radius ------------------------------------------------

def phi(space: MetricMeasureSpace, x: int, r: float) -> float:
    """Exact sup of { s in [0, r] : mu(B(x,s)) <= mu(B(x,r))/2 }.

    Computed by scanning the sorted distances from x; mu(B(x,s)) is a
    left-continuous step function of s.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0:
        return 0.0
    row = space.dist[x]
    target = 0.5 * float(space.weight[row < r].sum())
    levels, inverse = np.unique(row, return_inverse=True)
    mass_at = np.zeros(levels.size)
    np.add.at(mass_at, inverse, space.weight)
    mass_at = np.cumsum(mass_at)  # mu of the closed ball of radius levels[j]
    # mu(B(x, s)) = mass_at[j-1] for s in (levels[j-1], levels[j]], so the
    # condition mu(B(x, s)) <= target holds exactly up to the first level
    # whose closed-ball mass exceeds the target.
    exceeding = np.flatnonzero(mass_at > target)
    sup = r if exceeding.size == 0 else float(levels[exceeding[0]])
    return float(min(sup, r))


def phi_iterates(space: MetricMeasureSpace, x: int, r: float, j: int) -> list[float]:
    """Iterates phi^0(r)=r, phi^k(r)=phi(phi^{k-1}(r)) for k=1..j."""
    out = [float(r)]
    for _ in range(j):
        out.append(phi(space, x, out[-1]))
    return out
