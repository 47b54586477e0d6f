"""Fundamental-domain reduction for the multiplier quotient.

Points of C^2 minus the origin are reduced modulo (z, w) ~ (a z, b w) into
the closed shell

    F = E1 u E2,   E1 = {|z| <= |a|} x {1 < |w| <= |b|},
                   E2 = {1 < |z| <= |a|} x {|w| <= |b|},

which contains exactly one representative of every orbit (up to the boundary
gluings (z, w) ~ (z/a, w/b) on the outer faces).  The two special orbits of
the coordinate tori are the circles {w = 0} and {z = 0} inside F.

The deck-invariant exhaustion coordinate is

    U(z, w) = log|z|/log|a| - log|w|/log|b|,

whose level sets S_c = {|w| = k |z|^rho}, k = exp(-c log|b|), foliate the
complement of the tori.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import CaseError, EvaluationError, InvalidInputError
from .invariants import HopfParams, InvariantSet


@dataclass(frozen=True)
class HopfPoint:
    """A reduced quotient point: representative in F plus its lift index.

    The original input equals (a**lift_index * rep_z, b**lift_index * rep_w).
    """

    rep_z: complex
    rep_w: complex
    lift_index: int
    on_Ta: bool  # w = 0: the z-axis torus
    on_Tb: bool  # z = 0: the w-axis torus

    def __post_init__(self):
        if self.on_Ta and self.on_Tb:
            raise InvalidInputError("origin is not a point of the quotient")

    @property
    def rep(self) -> tuple[complex, complex]:
        return (self.rep_z, self.rep_w)


def _in_fundamental_domain(z: complex, w: complex, params: HopfParams) -> bool:
    az, aw = abs(z), abs(w)
    A, B = abs(params.a), abs(params.b)
    if az <= A and 1.0 < aw <= B:   # E1
        return True
    if 1.0 < az <= A and aw <= B:   # E2
        return True
    return False


def _shell_violation(z: complex, w: complex, params: HopfParams) -> float:
    """Relative distance of (z, w) from E1 union E2 in log-modulus terms."""
    az, aw = abs(z), abs(w)
    A, B = abs(params.a), abs(params.b)
    e1 = max(az / A - 1.0, 1.0 - aw, aw / B - 1.0, 0.0)
    e2 = max(1.0 - az, az / A - 1.0, aw / B - 1.0, 0.0)
    return min(e1, e2)


def reduce_point(pt: tuple[complex, complex], params: HopfParams) -> HopfPoint:
    """Reduce (z, w) != (0, 0) to its representative in F.

    The candidate lift index is read off from log|w|/log|b| (and from
    log|z|/log|a| when that coordinate is nonzero); a window of +-1 around
    each candidate is tested and the smallest qualifying index wins, which
    makes the choice on the glued boundary circles deterministic.
    """
    z, w = complex(pt[0]), complex(pt[1])
    if z == 0 and w == 0:
        raise InvalidInputError("(0, 0) does not represent a quotient point")

    candidates: set[int] = set()
    if w != 0:
        n0 = math.floor(math.log(abs(w)) / params.log_abs_b)
        candidates.update((n0 - 1, n0, n0 + 1))
    if z != 0:
        n0 = math.floor(math.log(abs(z)) / params.log_abs_a)
        candidates.update((n0 - 1, n0, n0 + 1))

    for n in sorted(candidates):
        rz = z / params.a**n
        rw = w / params.b**n
        if _in_fundamental_domain(rz, rw, params):
            return HopfPoint(rep_z=rz, rep_w=rw, lift_index=n,
                             on_Ta=(w == 0), on_Tb=(z == 0))
    # Rounding on the shell boundary can in principle push both windows off
    # by one; widen once before giving up.
    lo, hi = min(candidates) - 2, max(candidates) + 2
    for n in range(lo, hi + 1):
        rz = z / params.a**n
        rw = w / params.b**n
        if _in_fundamental_domain(rz, rw, params):
            return HopfPoint(rep_z=rz, rep_w=rw, lift_index=n,
                             on_Ta=(w == 0), on_Tb=(z == 0))
    # A point within a few ulps of the glued shell boundary (e.g. |w| one
    # rounding step above |b| while |w| / |b| rounds to exactly 1) can fail
    # every strict inequality; accept the index with the smallest violation.
    best_n, best_v = None, math.inf
    for n in range(lo, hi + 1):
        rz = z / params.a**n
        rw = w / params.b**n
        v = _shell_violation(rz, rw, params)
        if v < best_v:
            best_n, best_v = n, v
    if best_n is not None and best_v <= 1e-12:
        return HopfPoint(rep_z=z / params.a**best_n, rep_w=w / params.b**best_n,
                         lift_index=best_n, on_Ta=(w == 0), on_Tb=(z == 0))
    raise EvaluationError(f"could not reduce {pt} into the fundamental shell")


def _close(u: complex, v: complex, tol: float) -> bool:
    return abs(u - v) <= tol * (1.0 + max(abs(u), abs(v)))


def equivalent(pt1, pt2, params: HopfParams, tol: float) -> bool:
    """True iff pt1 and pt2 represent the same quotient point within tol.

    Representatives are compared componentwise; a representative on the
    outer boundary (|z| = |a| or |w| = |b|) is additionally compared against
    its inner gluing image (z/a, w/b).
    """
    r1 = reduce_point(pt1, params)
    r2 = reduce_point(pt2, params)
    if _close(r1.rep_z, r2.rep_z, tol) and _close(r1.rep_w, r2.rep_w, tol):
        return True
    for x, y in ((r1, r2), (r2, r1)):
        gz, gw = x.rep_z / params.a, x.rep_w / params.b
        if _close(gz, y.rep_z, tol) and _close(gw, y.rep_w, tol):
            return True
    return False


def u_value(pt, params: HopfParams, extended: bool = False) -> float:
    """The deck-invariant coordinate U = log|z|/log|a| - log|w|/log|b|.

    U is undefined on the coordinate tori; with extended=True those return
    +inf (w = 0) and -inf (z = 0) instead of raising.
    """
    z, w = complex(pt[0]), complex(pt[1])
    if z == 0 and w == 0:
        raise InvalidInputError("(0, 0) does not represent a quotient point")
    if z == 0 or w == 0:
        if not extended:
            raise EvaluationError(
                "U is undefined on the coordinate tori (pass extended=True "
                "for the +-inf convention)")
        return math.inf if w == 0 else -math.inf
    return (math.log(abs(z)) / params.log_abs_a
            - math.log(abs(w)) / params.log_abs_b)


@dataclass(frozen=True)
class LevelResidual:
    """Two equivalent signed residuals for membership in a level set S_c."""

    residual: float          # U(pt) - c
    k: float                 # exp(-c log|b|)
    modulus_residual: float  # log|w| - log k - rho log|z|


def level_membership(pt, c: float, params: HopfParams) -> LevelResidual:
    """Signed residual of pt against the level set S_c = {|w| = k |z|^rho}."""
    z, w = complex(pt[0]), complex(pt[1])
    if z == 0 or w == 0:
        raise EvaluationError("level sets do not meet the coordinate tori")
    u = u_value(pt, params)
    k = math.exp(-c * params.log_abs_b)
    mod_res = (math.log(abs(w)) - math.log(k)
               - params.rho * math.log(abs(z)))
    return LevelResidual(residual=u - c, k=k, modulus_residual=mod_res)


def leaf_equivalent(c1: complex, c2: complex, inv: InvariantSet,
                    tol: float) -> bool:
    """Whether the compact leaves labelled c1 and c2 coincide.

    Only meaningful when both invariants are rational (the leaves are closed
    curves); the label is defined up to the root-of-unity group K, so the
    test is min over k in K of |c2/c1 - k| <= tol.
    """
    if inv.case_tag != "CaseB2":
        raise CaseError("leaf labels are only defined when rho and tau are "
                        f"both rational, invariants are {inv.case_tag}")
    if c1 == 0:
        raise InvalidInputError("leaf label c1 must be nonzero")
    ratio = c2 / c1
    return min(abs(ratio - k) for k in inv.K) <= tol
