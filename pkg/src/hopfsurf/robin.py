"""Robin constants of Green functions in R^4 by walk-on-spheres.

Normalization: the Green function with pole p is expanded as

    G(x) = |x - p|^{-2} + lambda + o(1)  as x -> p,

so lambda ("the Robin constant") is estimated as

    lambda_hat = -mean[ survival_weight * |X_exit - p|^{-2} ],

where X_exit is the first boundary hit of a walk-on-spheres path started at
the pole (epsilon-shell termination, exit point projected to the boundary
where a projection is available).  Walks that leave the escape radius
contribute zero kernel, which matches the o(1) tail of the unbounded
domains used here.

Closed-form oracles: a ball of radius R with a centered pole has
lambda = -1/R^2; a half-space with the pole at distance d has
lambda = -1/(4 d^2) (method of images); the half-plane product domain at
angular offset theta is a half-space at distance cos(theta), hence
lambda = -1/(4 cos^2 theta).

A positive zeroth-order coefficient c (operator Laplacian minus c) is
supported through per-step survival factors; the matching functional is
certified against an ODE oracle for centered balls only and is flagged
qualitative elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import i1 as _bessel_i1

from .errors import EvaluationError, InvalidInputError
from . import domains as _domains

KERNEL_NORMALIZATION = "G(x) = |x - pole|^-2 + lambda + o(1)"


def kernel(r):
    """Singular kernel matching the Green-function normalization."""
    return np.asarray(r, dtype=float) ** -2.0


# ---------------------------------------------------------------------------
# solvable domains in R^4, coordinates (Re xi, Im xi, Re eta, Im eta)


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidInputError("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def distance(self, x: np.ndarray) -> np.ndarray:
        return self.radius - np.linalg.norm(x - np.asarray(self.center), axis=-1)

    def project(self, x: np.ndarray) -> np.ndarray:
        c = np.asarray(self.center)
        v = x - c
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        return c + v * (self.radius / n)


@dataclass(frozen=True)
class HalfSpace:
    """{x : <x, normal> > offset}."""

    normal: tuple
    offset: float = 0.0

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        nn = np.linalg.norm(n)
        if nn == 0:
            raise InvalidInputError("normal must be nonzero")
        object.__setattr__(self, "normal", tuple(n / nn))

    def distance(self, x: np.ndarray) -> np.ndarray:
        return x @ np.asarray(self.normal) - self.offset

    def project(self, x: np.ndarray) -> np.ndarray:
        n = np.asarray(self.normal)
        d = (x @ n - self.offset)[..., None]
        return x - d * n


@dataclass(frozen=True)
class GenericSolvable:
    """Caller-supplied vectorized inscribed-sphere radius; no projection."""

    distance_fn: Callable  # (B, 4) -> (B,) lower bound on boundary distance

    def distance(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.distance_fn(x), dtype=float)

    def project(self, x: np.ndarray) -> np.ndarray:
        return x


def half_space_from_theta(theta: float) -> HalfSpace:
    """The half-plane product domain {Re(eta e^{i theta}) > 0} as a wall in R^4."""
    return HalfSpace(normal=(0.0, 0.0, math.cos(theta), -math.sin(theta)),
                     offset=0.0)


def identity_point() -> np.ndarray:
    return np.array([1.0, 0.0, 1.0, 0.0])


def solvable_from_translate(translated):
    """Adapt a translated domain to the walk-on-spheres interface."""
    if isinstance(translated, _domains.ProductHalfPlane):
        return half_space_from_theta(translated.theta)
    if isinstance(translated, _domains.ModulusRegion):
        lo, hi, rho = translated.log_k1, translated.log_k2, translated.rho

        def dist(x):
            x = np.atleast_2d(x)
            rxi = np.hypot(x[:, 0], x[:, 1])
            reta = np.hypot(x[:, 2], x[:, 3])
            with np.errstate(divide="ignore"):
                F = np.log(reta) - rho * np.log(rxi)
            gap = np.minimum(F - lo, hi - F)
            gap = np.where(np.isnan(gap), 0.0, np.maximum(gap, 0.0))
            # local Lipschitz bound of F, halved for safety since it is not
            # global: steps never overshoot in practice but the distance is
            # a heuristic lower bound, flagged qualitative
            L = np.sqrt((rho / np.maximum(rxi, 1e-300)) ** 2
                        + (1.0 / np.maximum(reta, 1e-300)) ** 2)
            return 0.5 * gap / L

        return GenericSolvable(distance_fn=dist)
    raise EvaluationError(f"no walk-on-spheres adapter for {translated!r}")


# ---------------------------------------------------------------------------
# estimator


@dataclass(frozen=True)
class WosConfig:
    eps_shell: float = 1e-4
    r_max_factor: float = 1e3
    max_steps: int = 20000
    block_size: int = 4096
    shards: int = 1


@dataclass(frozen=True)
class RobinEstimate:
    lambda_hat: float
    stderr: float
    n_walks: int
    truncated_walks: int
    escaped_walks: int
    seed: int
    c_weight: float
    r_max: float
    kernel_normalization: str = KERNEL_NORMALIZATION


def _survival_factor(r: np.ndarray, c: float) -> np.ndarray:
    """E[exp(-c tau)] for exit from a sphere of radius r in R^4.

    Closed form x / (2 I_1(x)) with x = sqrt(c) r; series for tiny x.
    """
    x = math.sqrt(c) * np.asarray(r, dtype=float)
    out = np.ones_like(x)
    small = x < 1e-6
    out[small] = 1.0 - x[small] ** 2 / 8.0
    xs = x[~small]
    out[~small] = xs / (2.0 * _bessel_i1(xs))
    return out


def _run_block(domain, pole, nb, rng, c_weight, eps, r_max, max_steps):
    pos = np.tile(pole, (nb, 1))
    weight = np.ones(nb)
    contrib = np.zeros(nb)
    active = np.ones(nb, dtype=bool)
    escaped = 0
    for _ in range(max_steps):
        d = domain.distance(pos)
        hit = active & (d <= eps)
        if hit.any():
            exit_pos = domain.project(pos[hit])
            r = np.linalg.norm(exit_pos - pole, axis=-1)
            r = np.maximum(r, eps)  # pole sits strictly inside; guard only
            contrib[hit] = weight[hit] * kernel(r)
            active &= ~hit
        far = active & (np.linalg.norm(pos - pole, axis=-1) >= r_max)
        if far.any():
            escaped += int(far.sum())
            active &= ~far
        if not active.any():
            return contrib, 0, escaped
        # directions are drawn for the whole block each step so the stream
        # consumed is independent of which walks are still alive
        dirs = rng.standard_normal((nb, 4))
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
        if c_weight > 0.0:
            weight[active] *= _survival_factor(d[active], c_weight)
        pos[active] += d[active, None] * dirs[active]
    truncated = int(active.sum())
    return contrib, truncated, escaped


def robin_constant(domain, pole, n_walks: int, seed: int,
                   c_weight: float = 0.0,
                   config: WosConfig = WosConfig()) -> RobinEstimate:
    """Monte-Carlo Robin constant of `domain` at `pole`.

    Deterministic for fixed (seed, n_walks, config): walks are partitioned
    into fixed-size blocks, each block drawing from its own seed-derived
    substream, and blocks are merged in index order -- so the estimate is
    bit-identical no matter how many shards process the blocks.
    """
    if n_walks < 1:
        raise InvalidInputError("n_walks must be >= 1")
    if c_weight < 0:
        raise InvalidInputError("c_weight must be >= 0")
    if config.shards < 1:
        raise InvalidInputError("shards must be >= 1")
    pole = np.asarray(pole, dtype=float)
    d0 = float(domain.distance(pole[None])[0])
    if d0 <= config.eps_shell:
        raise EvaluationError("pole is outside the domain or within the "
                              f"termination shell (distance {d0})")
    r_max = config.r_max_factor * d0

    n_blocks = (n_walks + config.block_size - 1) // config.block_size
    results: dict[int, tuple] = {}
    for shard in range(config.shards):
        for b in range(shard, n_blocks, config.shards):
            nb = min(config.block_size, n_walks - b * config.block_size)
            rng = np.random.default_rng([seed, b])
            results[b] = _run_block(domain, pole, nb, rng, c_weight,
                                    config.eps_shell, r_max, config.max_steps)
    contrib = np.concatenate([results[b][0] for b in range(n_blocks)])
    truncated = sum(results[b][1] for b in range(n_blocks))
    escaped = sum(results[b][2] for b in range(n_blocks))

    lam = -float(np.mean(contrib))
    se = float(np.std(contrib, ddof=1) / math.sqrt(n_walks)) if n_walks > 1 else 0.0
    return RobinEstimate(lambda_hat=lam, stderr=se, n_walks=n_walks,
                         truncated_walks=truncated, escaped_walks=escaped,
                         seed=seed, c_weight=c_weight, r_max=r_max)


# ---------------------------------------------------------------------------
# oracles


def ball_oracle(R: float, c: float = 0.0, pole_at_center: bool = True) -> float:
    """Robin-type constant of the centered ball, independent of the sampler.

    For c = 0 this is -1/R^2 exactly.  For c > 0 the radial profile
    U'' + (3/rho) U' = c U, U(0) = 1, U'(0) = 0, is integrated by
    Runge-Kutta (tolerance 1e-8) and the weighted functional from the
    center pole equals -1/(U(R) R^2).
    """
    if not pole_at_center:
        raise InvalidInputError("oracle only covers the centered pole")
    if c == 0.0:
        return -1.0 / R**2
    rho0 = 1e-8

    def rhs(rho, y):
        u, up = y
        return [up, c * u - 3.0 * up / rho]

    y0 = [1.0 + c * rho0**2 / 8.0, c * rho0 / 4.0]
    sol = solve_ivp(rhs, (rho0, R), y0, rtol=1e-8, atol=1e-12,
                    method="RK45")
    if not sol.success:
        raise EvaluationError(f"radial integration failed: {sol.message}")
    U_R = sol.y[0, -1]
    return -1.0 / (U_R * R**2)


def half_space_oracle(d: float) -> float:
    """Method of images: pole at distance d from a wall gives -1/(4 d^2)."""
    if d <= 0:
        raise InvalidInputError("distance must be positive")
    return -1.0 / (4.0 * d * d)


def product_half_plane_oracle(theta: float) -> float:
    """Wall at distance cos(theta) from the identity: -1/(4 cos^2 theta)."""
    ct = math.cos(theta)
    if ct <= 0:
        raise InvalidInputError("identity is not inside the half-plane")
    return -1.0 / (4.0 * ct * ct)


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class ExperimentBudget:
    n_walks: int = 20000
    seed: int = 0
    config: WosConfig = field(default_factory=WosConfig)


@dataclass(frozen=True)
class BoundaryRow:
    anchor_z: complex
    anchor_w: complex
    theta: Optional[float]
    dist_lower: float
    dist_upper: float
    lambda_hat: float
    stderr: float
    n_walks: int
    truncated_walks: int


def _sub_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _domain_seed(seed: int, td) -> int:
    """Sub-seed derived from the translated domain's parameters.

    Two anchors producing the same translated domain get identical walk
    streams, so the estimated proxy is identical too -- a useful control: a
    degenerate anchor family has sub-mean-value residual exactly zero.
    """
    if isinstance(td, _domains.ProductHalfPlane):
        key = np.array([td.theta]).view(np.uint32)
    elif isinstance(td, _domains.ModulusRegion):
        key = np.array([td.log_k1, td.log_k2, td.rho]).view(np.uint32)
    else:
        return seed
    return int(np.random.SeedSequence([seed, *map(int, key)]).generate_state(1)[0])


def boundary_behavior_experiment(spec, anchors: Sequence, params,
                                 inv=None,
                                 budget: ExperimentBudget = ExperimentBudget()
                                 ) -> list[BoundaryRow]:
    """Robin constants of the recentered domain along a path of anchors.

    As the anchors approach the boundary the distance from the identity to
    the translated boundary shrinks and lambda_hat dives; for the half-plane
    family both the distance (cos theta) and the limit law -1/(4 cos^2
    theta) are exact.
    """
    rows = []
    for j, anchor in enumerate(anchors):
        td = _domains.translate_domain(spec, anchor, params, inv)
        lo, hi = _domains.distance_to_identity(td)
        solvable = solvable_from_translate(td)
        est = robin_constant(solvable, identity_point(), budget.n_walks,
                             _sub_seed(budget.seed, j), config=budget.config)
        theta = td.theta if isinstance(td, _domains.ProductHalfPlane) else None
        rows.append(BoundaryRow(
            anchor_z=complex(anchor[0]), anchor_w=complex(anchor[1]),
            theta=theta, dist_lower=lo, dist_upper=hi,
            lambda_hat=est.lambda_hat, stderr=est.stderr,
            n_walks=est.n_walks, truncated_walks=est.truncated_walks))
    return rows


@dataclass(frozen=True)
class PshReport:
    center_value: float
    ring_values: list
    residual: float       # mean(ring) - center of the -lambda proxy
    stderr: float
    consistent: bool      # residual >= -3 stderr


def psh_spot_check(spec, anchor, direction, disk_radius: float, grid_n: int,
                   params, inv=None,
                   budget: ExperimentBudget = ExperimentBudget()) -> PshReport:
    """Sub-mean-value test of -lambda along a complex line of anchors.

    Evaluates the -lambda proxy at anchor and at grid_n points on the circle
    of radius disk_radius in the line t -> anchor + t*direction, and checks
    mean(ring) - center >= -3 sigma.  All line points must stay inside the
    domain.
    """
    if grid_n < 3:
        raise InvalidInputError("grid_n must be >= 3")
    dz, dw = complex(direction[0]), complex(direction[1])
    z0, w0 = complex(anchor[0]), complex(anchor[1])

    def value_at(pt):
        res = _domains.evaluate_domain(spec, pt, params, inv)
        if not res.inside:
            raise EvaluationError(f"line point {pt} leaves the domain")
        td = _domains.translate_domain(spec, pt, params, inv)
        est = robin_constant(solvable_from_translate(td), identity_point(),
                             budget.n_walks, _domain_seed(budget.seed, td),
                             config=budget.config)
        return -est.lambda_hat, est.stderr

    center, se_c = value_at((z0, w0))
    ring = []
    ses = []
    for j in range(grid_n):
        t = disk_radius * complex(math.cos(2 * math.pi * j / grid_n),
                                  math.sin(2 * math.pi * j / grid_n))
        v, se = value_at((z0 + t * dz, w0 + t * dw))
        ring.append(v)
        ses.append(se)
    residual = float(np.mean(ring) - center)
    se = math.sqrt(sum(s**2 for s in ses) / grid_n**2 + se_c**2)
    return PshReport(center_value=center, ring_values=ring,
                     residual=residual, stderr=se,
                     consistent=(residual >= -3.0 * se))
