"""Levi curvature of boundary residuals and the boundary-graph case ladder.

For a real C^2 defining function psi(z, w) the (scaled) Levi determinant is

    L(psi) = psi_zzbar |psi_w|^2 - 2 Re{ psi_zwbar psi_zbar psi_w }
             + psi_wwbar |psi_z|^2,

which is zero on Levi-flat boundaries, positive on strictly pseudoconvex
ones, and scales like lambda^3 under psi -> lambda psi.

The second half of the module studies local boundary graphs

    psi = v + p0(z) + p1(z) u + p2(z) u^2 + ...,   w = u + iv,

with p0(0) = 0 and p1(0) = 0, and searches for a nearby z* where p0(z*) > 0
(the boundary bends into {v < 0} somewhere arbitrarily close to the base
point).  The search follows a case ladder on the leading homogeneous part
of p0: gradient direction, positive Laplacian, pure z^2 term, odd leading
degree (circle maximization of an associated polynomial), even leading
degree with or without off-diagonal terms.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (EvaluationError, InvalidInputError, PreconditionError)
from .invariants import HopfParams
from .poly import ZERO, RealPoly2
from . import domains as _dom

_COEFF_TOL = 1e-12
_SHRINK_BUDGET = 60
_CIRCLE_GRID = 4096


# ---------------------------------------------------------------------------
# Levi form


@dataclass(frozen=True)
class Jet2:
    """Second-order Wirtinger jet of a real function of (z, w)."""

    value: float
    d_z: complex
    d_w: complex
    d_zzbar: float
    d_wwbar: float
    d_zwbar: complex

    def scaled(self, lam: float) -> "Jet2":
        return Jet2(lam * self.value, lam * self.d_z, lam * self.d_w,
                    lam * self.d_zzbar, lam * self.d_wwbar,
                    lam * self.d_zwbar)


def levi_form(jet: Jet2) -> float:
    """The Levi determinant of the jet (cubic under jet scaling)."""
    t1 = jet.d_zzbar * abs(jet.d_w) ** 2
    t2 = -2.0 * (jet.d_zwbar * jet.d_z.conjugate() * jet.d_w).real
    t3 = jet.d_wwbar * abs(jet.d_z) ** 2
    return t1 + t2 + t3


def numeric_jet(psi: Callable, point, h: float = 4e-4,
                richardson: bool = True) -> Jet2:
    """Central-difference jet of psi at (z, w).

    psi takes (z, w) complex and returns a real value; differences are taken
    in the four real coordinates and assembled into Wirtinger derivatives.
    Internally the function is pulled back through (zeta, omega) ->
    (z0 zeta, w0 omega) so that the step size is relative to the base point
    (log-type residuals near a coordinate axis stay well-conditioned), and
    the derivatives are chain-ruled back to the original coordinates.
    With richardson=True (default) the O(h^2) truncation term is eliminated
    by a second pass at h/2.
    """
    if richardson:
        j1 = numeric_jet(psi, point, h=h, richardson=False)
        j2 = numeric_jet(psi, point, h=h / 2, richardson=False)
        return Jet2(value=j1.value,
                    d_z=(4 * j2.d_z - j1.d_z) / 3,
                    d_w=(4 * j2.d_w - j1.d_w) / 3,
                    d_zzbar=(4 * j2.d_zzbar - j1.d_zzbar) / 3,
                    d_wwbar=(4 * j2.d_wwbar - j1.d_wwbar) / 3,
                    d_zwbar=(4 * j2.d_zwbar - j1.d_zwbar) / 3)
    z0, w0 = complex(point[0]), complex(point[1])
    s1 = z0 if z0 != 0 else 1.0 + 0j
    s2 = w0 if w0 != 0 else 1.0 + 0j
    c1, c2 = z0 / s1, w0 / s2  # base point of the pulled-back function

    def f(dx1=0.0, dy1=0.0, dx2=0.0, dy2=0.0):
        return float(psi(s1 * (c1 + complex(dx1, dy1)),
                         s2 * (c2 + complex(dx2, dy2))))

    f0 = f()
    # first derivatives
    gx1 = (f(dx1=h) - f(dx1=-h)) / (2 * h)
    gy1 = (f(dy1=h) - f(dy1=-h)) / (2 * h)
    gx2 = (f(dx2=h) - f(dx2=-h)) / (2 * h)
    gy2 = (f(dy2=h) - f(dy2=-h)) / (2 * h)
    # pure second derivatives
    hx1 = (f(dx1=h) - 2 * f0 + f(dx1=-h)) / h**2
    hy1 = (f(dy1=h) - 2 * f0 + f(dy1=-h)) / h**2
    hx2 = (f(dx2=h) - 2 * f0 + f(dx2=-h)) / h**2
    hy2 = (f(dy2=h) - 2 * f0 + f(dy2=-h)) / h**2

    def mixed(a: str, b: str) -> float:
        kw = {a: h, b: h}
        pp = f(**kw)
        kw = {a: h, b: -h}
        pm = f(**kw)
        kw = {a: -h, b: h}
        mp = f(**kw)
        kw = {a: -h, b: -h}
        mm = f(**kw)
        return (pp - pm - mp + mm) / (4 * h**2)

    m_x1x2 = mixed("dx1", "dx2")
    m_x1y2 = mixed("dx1", "dy2")
    m_y1x2 = mixed("dy1", "dx2")
    m_y1y2 = mixed("dy1", "dy2")

    # jet of the pulled-back function, then the chain rule undoes the scaling
    d_zeta = 0.5 * complex(gx1, -gy1)
    d_omega = 0.5 * complex(gx2, -gy2)
    d_zzb = 0.25 * (hx1 + hy1)
    d_wwb = 0.25 * (hx2 + hy2)
    d_zwb = 0.25 * complex(m_x1x2 + m_y1y2, m_x1y2 - m_y1x2)
    return Jet2(
        value=f0,
        d_z=d_zeta / s1,
        d_w=d_omega / s2,
        d_zzbar=d_zzb / abs(s1) ** 2,
        d_wwbar=d_wwb / abs(s2) ** 2,
        d_zwbar=d_zwb / (s1 * s2.conjugate()),
    )


def _smooth_residual(spec, point, params: HopfParams, inv=None) -> Callable:
    """A locally smooth defining function matching the spec near point.

    The generic evaluator reduces into the fundamental shell, which is
    discontinuous across its faces; differencing needs a smooth branch.
    """
    if isinstance(spec, _dom.LevelBand):
        z, w = complex(point[0]), complex(point[1])
        L = math.log(abs(w)) - params.rho * math.log(abs(z))
        if math.log(spec.k1) - L >= L - math.log(spec.k2):
            return lambda zz, ww: (math.log(spec.k1) - math.log(abs(ww))
                                   + params.rho * math.log(abs(zz)))
        return lambda zz, ww: (math.log(abs(ww))
                               - params.rho * math.log(abs(zz))
                               - math.log(spec.k2))
    if isinstance(spec, _dom.SubLevel):
        return lambda zz, ww: (math.log(abs(ww))
                               - params.rho * math.log(abs(zz))
                               - math.log(spec.k))
    if isinstance(spec, _dom.SuperLevel):
        return lambda zz, ww: (math.log(spec.k) - math.log(abs(ww))
                               + params.rho * math.log(abs(zz)))
    if isinstance(spec, _dom.Nemirovskii):
        return lambda zz, ww: spec.A * ww.real + spec.B * ww.imag
    if isinstance(spec, _dom.ImplicitDomain):
        return spec.psi
    return lambda zz, ww: _dom.evaluate_domain(spec, (zz, ww), params,
                                               inv).residual


@dataclass(frozen=True)
class ScanReport:
    min_levi: float
    max_levi: float
    n_evaluated: int
    violations: list  # boundary points with Levi value < -tol
    pseudoconvex_at_samples: bool


def pseudoconvexity_scan(spec, n_samples: int, tol: float,
                         params: HopfParams, seed: int,
                         inv=None, h: float = 4e-4) -> ScanReport:
    """Numeric Levi values of the boundary residual at sampled boundary points."""
    rng = np.random.default_rng(seed)
    pts = _dom._boundary_samples(spec, n_samples, params, inv, rng)
    if not pts:
        raise EvaluationError("no boundary points found for this spec")
    vals = []
    bad = []
    for pt in pts:
        psi = _smooth_residual(spec, pt, params, inv)
        lv = levi_form(numeric_jet(psi, pt, h=h))
        vals.append(lv)
        if lv < -tol:
            bad.append((pt, lv))
    return ScanReport(min_levi=min(vals), max_levi=max(vals),
                      n_evaluated=len(vals), violations=bad,
                      pseudoconvex_at_samples=(min(vals) >= -tol))


# ---------------------------------------------------------------------------
# boundary graphs


@dataclass(frozen=True)
class BoundaryModel:
    """psi = v + p[0](z) + p[1](z) u + p[2](z) u^2 + ... near the origin."""

    p: tuple  # of RealPoly2

    def __post_init__(self):
        if len(self.p) == 0:
            raise InvalidInputError("need at least p0")
        for q in self.p:
            if not isinstance(q, RealPoly2):
                raise InvalidInputError("coefficients must be RealPoly2")
        if abs(self.p[0](0j)) > 0:
            raise InvalidInputError("p0(0) must vanish")
        if len(self.p) > 1 and abs(self.p[1](0j)) > 0:
            raise InvalidInputError("p1(0) must vanish")

    def coeff(self, i: int) -> RealPoly2:
        return self.p[i] if i < len(self.p) else ZERO

    def psi(self, z: complex, w: complex) -> float:
        u, v = complex(w).real, complex(w).imag
        acc = v
        for i, q in enumerate(self.p):
            acc += q(z) * u**i
        return acc

    def arc_v(self, z: complex, u: float) -> float:
        """The v-value of the boundary graph over (z, u)."""
        return -sum(q(z) * u**i for i, q in enumerate(self.p))


def levi2_residual(model: BoundaryModel, z: complex) -> float:
    """Left-hand side of the graph pseudoconvexity inequality at u = 0.

    (1 + p1^2) Lap(p0)/4 - 2 Re{ p1_z p0_zbar (-i + p1) } + 2 p2 |p0_z|^2;
    nonnegative for all z iff the graph bounds a pseudoconvex side at u = 0.
    """
    p0, p1, p2 = model.coeff(0), model.coeff(1), model.coeff(2)
    p1v = p1(z)
    t1 = (1.0 + p1v**2) * p0.laplacian(z) / 4.0
    p1_z = p1.wirtinger_z(z)
    p0_zb = p0.wirtinger_z(z).conjugate()
    t2 = -2.0 * (p1_z * p0_zb * complex(p1v, -1.0)).real
    t3 = 2.0 * p2(z) * abs(p0.wirtinger_z(z)) ** 2
    return t1 + t2 + t3


@dataclass(frozen=True)
class DiamondResult:
    found: bool
    case: str
    z_star: Optional[complex] = None
    p0_value: Optional[float] = None
    trace: tuple = ()


def _max_on_circle(fn: Callable, r: float, grid: int = _CIRCLE_GRID):
    """(theta*, value) maximizing fn(r e^{i theta}); grid plus golden refine."""
    thetas = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    vals = np.array([fn(r * cmath.exp(1j * t)) for t in thetas])
    i = int(np.argmax(vals))
    span = 2 * math.pi / grid
    lo, hi = thetas[i] - span, thetas[i] + span
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = fn(r * cmath.exp(1j * c))
    fd = fn(r * cmath.exp(1j * d))
    for _ in range(60):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(r * cmath.exp(1j * c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(r * cmath.exp(1j * d))
    t = 0.5 * (a + b)
    return t, fn(r * cmath.exp(1j * t))


def _leading_data(p0: RealPoly2):
    """Smallest degree with a nonvanishing homogeneous part, plus that part."""
    scale = max((abs(c) for c in p0.coeffs.values()), default=0.0)
    if scale == 0.0:
        return None, None
    for d in range(1, p0.degree + 1):
        part = p0.homogeneous_part(d)
        if not part.is_zero(tol=_COEFF_TOL * scale):
            return d, part
    return None, None


def diamond_search(model: BoundaryModel, r1: float) -> DiamondResult:
    """Find z* with 0 < |z*| < r1 and p0(z*) > 0, reporting the case used.

    The candidate direction comes from the leading homogeneous part of p0;
    the radius then shrinks (r -> r/2, budget 60) until p0 is positive at
    the candidate or the budget runs out.
    """
    if r1 <= 0:
        raise InvalidInputError("r1 must be positive")
    p0 = model.coeff(0)
    trace = []

    # curvature sanity: warn if the graph inequality fails nearby
    for t in np.linspace(0, 2 * math.pi, 8, endpoint=False):
        zs = 0.3 * r1 * cmath.exp(1j * t)
        if levi2_residual(model, zs) < -1e-9:
            warnings.warn("boundary model violates the graph pseudoconvexity "
                          f"inequality near z = {zs:.3g}", stacklevel=2)
            break

    def shrink(candidate_at, case):
        r = r1 / 2.0
        for _ in range(_SHRINK_BUDGET):
            z = candidate_at(r)
            val = p0(z)
            if val > 0.0:
                return DiamondResult(found=True, case=case, z_star=z,
                                     p0_value=val, trace=tuple(trace))
            r /= 2.0
        trace.append(f"{case}: shrink budget exhausted")
        return DiamondResult(found=False, case=case, trace=tuple(trace))

    # Case (i): nonzero gradient at 0
    gx, gy = p0.dx().eval(0.0, 0.0), p0.dy().eval(0.0, 0.0)
    gn = math.hypot(gx, gy)
    if gn > _COEFF_TOL:
        trace.append("gradient nonzero at 0")
        direction = complex(gx, gy) / gn
        return shrink(lambda r: r * direction, "gradient")

    d, lead = _leading_data(p0)
    if d is None:
        raise PreconditionError("p0 is identically zero")
    trace.append(f"leading homogeneous degree {d}")
    A = lead.complex_coeffs(d)

    if d == 2:
        a11 = A.get((1, 1), 0j).real
        a20 = 2.0 * A.get((2, 0), 0j)
        if a11 > _COEFF_TOL:
            trace.append(f"a11 = {a11:.6g} > 0: subharmonic circle search")
            return shrink(
                lambda r: r * cmath.exp(1j * _max_on_circle(p0, r)[0]),
                "a11-positive")
        if abs(a20) > _COEFF_TOL:
            theta = -cmath.phase(a20) / 2.0
            trace.append(f"a11 ~ 0, a20 != 0: direction {theta:.6g}")
            return shrink(lambda r: r * cmath.exp(1j * theta), "a20")
        trace.append("degenerate quadratic part")
        return shrink(
            lambda r: r * cmath.exp(1j * _max_on_circle(p0, r)[0]),
            "generic-fallback")

    if d % 2 == 1:
        # odd leading degree 2n-1: maximize Re g on the unit circle with
        # g(Z) = sum_k a_{d-k,k} Z^{d-2k} (coefficients doubled off-diagonal)
        n = (d + 1) // 2
        gcoef = [(d - 2 * k, 2.0 * A.get((d - k, k), 0j))
                 for k in range(n)]

        def re_g(zc: complex) -> float:
            return sum((c * zc**e).real for e, c in gcoef)

        theta, _ = _max_on_circle(re_g, 1.0)
        trace.append(f"odd leading degree {d}: circle direction {theta:.6g}")
        return shrink(lambda r: r * cmath.exp(1j * theta), "odd-leading")

    n = d // 2
    uppers = [(k, 2.0 * A.get((d - k, k), 0j)) for k in range(n)]
    a_n = A.get((n, n), 0j).real
    if any(abs(c) > _COEFF_TOL for _, c in uppers):
        # even leading degree with off-diagonal terms: weighted circle
        # polynomial g(Z) = sum_k a_{2n-k} (1 - (2n-k) k / n^2) Z^{2n-2k}
        gcoef = [(d - 2 * k, c * (1.0 - (d - k) * k / n**2))
                 for k, c in uppers]

        def re_g(zc: complex) -> float:
            return sum((c * zc**e).real for e, c in gcoef)

        theta, _ = _max_on_circle(re_g, 1.0)
        trace.append(f"even leading degree {d}: weighted circle direction "
                     f"{theta:.6g}")
        return shrink(lambda r: r * cmath.exp(1j * theta), "even-leading")
    if a_n > _COEFF_TOL:
        trace.append(f"even leading degree {d}, diagonal a_n = {a_n:.6g} > 0")
        return shrink(
            lambda r: r * cmath.exp(1j * _max_on_circle(p0, r)[0]),
            "radial-subharmonic")
    trace.append("even leading degree with nonpositive diagonal")
    return shrink(
        lambda r: r * cmath.exp(1j * _max_on_circle(p0, r)[0]),
        "generic-fallback")


@dataclass(frozen=True)
class SweepReport:
    r_prime: float
    z_star: complex
    n_covered: int
    max_arc_residual: float
    diamond_case: str


def sweep_cover_check(model: BoundaryModel, r1: float,
                      n_w_samples: int = 200, seed: int = 0) -> SweepReport:
    """Certify a radius r' such that the boundary arcs over the segment
    [0, z*] sweep the whole slice D(0) within |w| < r'.

    Every sampled w below the base arc is matched to an s in [0, 1] with w on
    the arc over s z* (one-dimensional bisection; the arc residual at the
    solution is reported).  r' halves until the far arc clears every sample.
    """
    p0 = model.coeff(0)
    probe = max(abs(p0(0.5 * r1 * cmath.exp(1j * t)))
                for t in np.linspace(0, 2 * math.pi, 64, endpoint=False))
    if probe <= 1e-14:
        raise PreconditionError("p0 vanishes identically on the probe circle")

    dres = diamond_search(model, r1)
    if not dres.found:
        raise PreconditionError("no positivity point found; cannot anchor "
                                f"the sweep (trace: {dres.trace})")
    z_star, P = dres.z_star, dres.p0_value

    rng = np.random.default_rng(seed)
    disk = []
    while len(disk) < n_w_samples:
        u, v = rng.uniform(-1, 1), rng.uniform(-1, 1)
        if u * u + v * v <= 1.0:
            disk.append((u, v))

    def f(s: float, u: float, v: float) -> float:
        return v - model.arc_v(s * z_star, u)

    r_prime = min(r1, P) / 2.0
    for _ in range(_SHRINK_BUDGET):
        samples = [(r_prime * u, r_prime * v) for u, v in disk]
        samples = [(u, v) for u, v in samples if f(0.0, u, v) < 0.0]
        if all(f(1.0, u, v) > 0.0 for u, v in samples):
            break
        r_prime /= 2.0
    else:
        raise PreconditionError("could not certify a covering radius")

    max_res = 0.0
    for u, v in samples:
        lo, hi = 0.0, 1.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if f(mid, u, v) < 0.0:
                lo = mid
            else:
                hi = mid
        max_res = max(max_res, abs(f(0.5 * (lo + hi), u, v)))

    return SweepReport(r_prime=r_prime, z_star=z_star, n_covered=len(samples),
                       max_arc_residual=max_res, diamond_case=dres.case)
