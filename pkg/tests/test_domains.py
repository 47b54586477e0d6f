"""Tests for invariant domains, translation, and classification."""

import cmath
import math

import numpy as np
import pytest

from hopfsurf.domains import (GenericTranslate, LeafFamily, LevelBand,
                              ModulusRegion, Nemirovskii, ProductHalfPlane,
                              SubLevel, SuperLevel, classify_domain,
                              distance_to_identity, evaluate_domain,
                              tangency_check, translate_domain,
                              verify_nemirovskii_quotient)
from hopfsurf.errors import (CaseError, EvaluationError, InvalidInputError,
                             PreconditionError)
from hopfsurf.flows import VectorField, unit_field
from hopfsurf.invariants import HopfParams, Numeric, derive_invariants

P23 = HopfParams(2 + 0j, 3 + 0j)
INV23 = derive_invariants(P23, Numeric())
P24 = HopfParams(2 + 0j, 4 + 0j)
INV24 = derive_invariants(P24, Numeric())
P2M4 = HopfParams(2 + 0j, -4 + 0j)
INV2M4 = derive_invariants(P2M4, Numeric())


def _random_point(rng, lo=-2.0, hi=2.0):
    z = math.exp(rng.uniform(lo, hi)) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    w = math.exp(rng.uniform(lo, hi)) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    return z, w


class TestSpecs:
    def test_level_band_ordering(self):
        with pytest.raises(InvalidInputError):
            LevelBand(k1=2.0, k2=0.5)

    def test_nemirovskii_normalization(self):
        spec = Nemirovskii(2.0, 0.0)
        assert spec.A == pytest.approx(1.0)
        with pytest.raises(InvalidInputError):
            Nemirovskii(0.0, 0.0)


class TestEvaluateDomain:
    def test_level_band_on_middle_level(self):
        spec = LevelBand(0.5, 2.0)
        z = 1.3 + 0.4j
        w = abs(z) ** INV23.rho * cmath.exp(0.7j)
        res = evaluate_domain(spec, (z, w), P23, INV23)
        assert res.inside
        assert res.residual == pytest.approx(max(math.log(0.5), -math.log(2.0)))

    def test_nemirovskii_signs(self):
        spec = Nemirovskii(1.0, 0.0)
        assert not evaluate_domain(spec, (1 + 0j, 1 + 0j), P24).inside
        assert evaluate_domain(spec, (1 + 0j, -1 + 0j), P24).inside

    def test_nemirovskii_requires_real_b(self):
        with pytest.raises(PreconditionError):
            evaluate_domain(Nemirovskii(1.0, 0.0), (1 + 0j, -1 + 0j), P2M4)

    def test_sign_is_deck_invariant(self):
        rng = np.random.default_rng(13)
        specs = [LevelBand(0.5, 2.0), SubLevel(1.0), SuperLevel(1.5)]
        for _ in range(200):
            pt = _random_point(rng)
            n = int(rng.integers(-4, 5))
            lifted = (pt[0] * P23.a**n, pt[1] * P23.b**n)
            for spec in specs:
                s0 = evaluate_domain(spec, pt, P23, INV23).inside
                s1 = evaluate_domain(spec, lifted, P23, INV23).inside
                assert s0 == s1

    def test_leaf_family_membership(self):
        # region delta = unit disk in the leaf parameter
        spec = LeafFamily(residual_fn=lambda c: abs(c) - 1.0)
        inside = evaluate_domain(spec, (1.5 + 0j, 0.5 * 1.5**2 + 0j), P2M4,
                                 INV2M4)
        assert inside.inside
        outside = evaluate_domain(spec, (1.5 + 0j, 3.0 * 1.5**2 + 0j), P2M4,
                                  INV2M4)
        assert not outside.inside

    def test_leaf_family_needs_case_b2(self):
        spec = LeafFamily(residual_fn=lambda c: abs(c) - 1.0)
        with pytest.raises(CaseError):
            evaluate_domain(spec, (1.5 + 0j, 1 + 0j), P23, INV23)


class TestTranslateDomain:
    def test_nemirovskii_gives_product_half_plane(self):
        spec = Nemirovskii(1.0, 0.0)
        theta = 0.4
        anchor = (1 + 0j, -cmath.exp(1j * theta))
        td = translate_domain(spec, anchor, P24, INV24)
        assert isinstance(td, ProductHalfPlane)
        assert td.theta == pytest.approx(theta)

    def test_level_band_gives_modulus_region(self):
        spec = LevelBand(0.5, 2.0)
        anchor = (1.3 + 0j, 1.3**INV23.rho + 0j)
        td = translate_domain(spec, anchor, P23, INV23)
        assert isinstance(td, ModulusRegion)
        assert td.log_k1 < 0.0 < td.log_k2

    def test_identity_inside_translate(self):
        rng = np.random.default_rng(17)
        spec = LevelBand(0.5, 2.0)
        n_found = 0
        for _ in range(200):
            pt = _random_point(rng)
            if evaluate_domain(spec, pt, P23, INV23).inside:
                td = translate_domain(spec, pt, P23, INV23)
                assert td.residual(1 + 0j, 1 + 0j) < 0
                n_found += 1
        assert n_found > 20

    def test_outside_anchor_rejected(self):
        with pytest.raises(EvaluationError):
            translate_domain(Nemirovskii(1.0, 0.0), (1 + 0j, 1 + 0j), P24,
                             INV24)

    def test_parallel_law(self):
        # translate at anchor2 is the (z1/z2, w1/w2)-scaling of translate at
        # anchor1, checked on sampled points
        rng = np.random.default_rng(19)
        spec = LevelBand(0.5, 2.0)
        a1 = (1.2 + 0j, 1.2**INV23.rho * cmath.exp(0.3j))
        a2 = (0.9 + 0.4j, abs(0.9 + 0.4j) ** INV23.rho * 1.1 + 0j)
        t1 = translate_domain(spec, a1, P23, INV23)
        t2 = translate_domain(spec, a2, P23, INV23)
        s_z = a1[0] / a2[0]
        s_w = a1[1] / a2[1]
        for _ in range(100):
            xi = complex(rng.normal(), rng.normal()) + 2
            eta = complex(rng.normal(), rng.normal()) + 2
            r2 = t2.residual(xi, eta)
            r1 = t1.residual(xi / s_z, eta / s_w)
            assert abs(r1 - r2) < 1e-10 * (1 + abs(r1))


class TestDistanceToIdentity:
    def test_product_half_plane_exact(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            theta = rng.uniform(-math.pi / 2 + 0.01, math.pi / 2 - 0.01)
            lo, hi = distance_to_identity(ProductHalfPlane(theta))
            assert abs(lo - math.cos(theta)) < 1e-14
            assert abs(hi - math.cos(theta)) < 1e-14

    def test_modulus_region_shrinks_near_boundary(self):
        spec = LevelBand(0.5, 2.0)
        dists = []
        for c in (1.0, 0.7, 0.55, 0.51):
            anchor = (1.0 + 0j, c + 0j)
            lo, hi = distance_to_identity(
                translate_domain(spec, anchor, P23, INV23))
            assert lo <= hi + 1e-12
            dists.append(hi)
        assert dists == sorted(dists, reverse=True)
        assert dists[-1] < 0.05

    def test_generic_translate_bracket(self):
        spec = Nemirovskii(1.0, 0.0)
        td = translate_domain(spec, (1 + 0j, -1 + 0j), P24, INV24)
        gen = GenericTranslate(residual_fn=td.residual)
        lo, hi = distance_to_identity(gen)
        assert lo <= 1.0 + 1e-9
        assert hi >= lo


class TestTangency:
    def test_level_band_tangent_to_unit_field(self):
        rep = tangency_check(LevelBand(0.5, 2.0), unit_field(P23), 50,
                             [0.5, 1.0, -0.7], 1e-9, P23, seed=3, inv=INV23)
        assert rep.tangential
        assert rep.boundary_drift < 1e-12

    def test_nemirovskii_tangent_to_horizontal_field(self):
        rep = tangency_check(Nemirovskii(1.0, 0.0), VectorField(1 + 0j, 0j),
                             50, [0.5, -0.5], 1e-9, P24, seed=3, inv=INV24)
        assert rep.tangential

    def test_level_band_not_tangent_to_horizontal_field(self):
        rep = tangency_check(LevelBand(0.5, 2.0), VectorField(1 + 0j, 0j), 50,
                             [0.5, 1.0], 1e-9, P23, seed=3, inv=INV23)
        assert not rep.tangential
        assert rep.boundary_drift > 0.1


class TestClassifyDomain:
    def test_level_band(self):
        res = classify_domain(LevelBand(0.5, 2.0), INV23)
        assert res.theorem_type == "A1"
        assert res.verdict.status == "NotStein"
        assert res.verdict.witness

    def test_sub_and_super_level(self):
        assert classify_domain(SubLevel(1.0), INV23).theorem_type == "A2prime"
        assert classify_domain(SuperLevel(1.0),
                               INV23).theorem_type == "A2doubleprime"

    def test_leaf_family(self):
        spec = LeafFamily(residual_fn=lambda c: abs(c) - 1.0, contains0=True,
                          containsInf=True)
        res = classify_domain(spec, INV2M4)
        assert res.theorem_type == "B2"
        assert res.verdict.status == "NotStein"

    def test_leaf_family_wrong_case(self):
        with pytest.raises(CaseError):
            classify_domain(LeafFamily(residual_fn=lambda c: abs(c) - 1),
                            INV23)

    def test_nemirovskii_stein(self):
        res = classify_domain(Nemirovskii(1.0, 0.0), INV24)
        assert res.theorem_type == "NemirovskiiStein"
        assert res.verdict.status == "Stein"


class TestNemirovskiiQuotient:
    def test_sampled_identity_holds(self):
        rep = verify_nemirovskii_quotient(P24, 2000, seed=21)
        assert rep.forward_failures == 0
        assert rep.backward_failures == 0
        assert rep.shell_inner_count > 0
        assert rep.shell_outer_count > 0

    def test_requires_real_b(self):
        with pytest.raises(PreconditionError):
            verify_nemirovskii_quotient(P2M4, 100, seed=0)


class TestHausdorffContinuity:
    def test_translates_converge_as_anchor_approaches_torus(self):
        # Nemirovskii translates depend only on the anchor's w-phase, so as
        # w_n -> 0 along a fixed phase the translated domains stabilize;
        # along a slowly rotating phase they converge in Hausdorff sense,
        # measured here by the half-plane angle
        spec = Nemirovskii(1.0, 0.0)
        theta_inf = 0.3
        gaps = []
        for n in range(1, 6):
            w = -(10.0 ** -n) * cmath.exp(1j * (theta_inf + 0.5 / n))
            td = translate_domain(spec, (1 + 0j, w), P24, INV24)
            gaps.append(abs(td.theta - theta_inf))
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 0.11


class TestClassificationGoldenTable:
    def test_matches_frozen_table(self):
        import json
        import pathlib

        from hopfsurf.domains import ImplicitDomain

        golden = json.loads((pathlib.Path(__file__).parent / "data" /
                             "classification_golden.json").read_text())
        cases = {
            "level_band": (LevelBand(0.5, 2.0), INV23),
            "sub_level": (SubLevel(1.0), INV23),
            "super_level": (SuperLevel(1.5), INV23),
            "leaf_family_interior":
                (LeafFamily(residual_fn=lambda c: abs(c) - 1.0), INV2M4),
            "leaf_family_boundary_flags":
                (LeafFamily(residual_fn=lambda c: abs(c) - 1.0,
                            contains0=True, containsInf=True), INV2M4),
            "nemirovskii": (Nemirovskii(1.0, 0.0), INV24),
            "implicit":
                (ImplicitDomain(psi=lambda z, w: abs(w) - 1.0), INV23),
        }
        assert set(cases) == set(golden)
        for name, (spec, inv) in cases.items():
            res = classify_domain(spec, inv)
            assert res.theorem_type == golden[name]["theorem_type"], name
            assert res.verdict.status == golden[name]["status"], name
            assert res.verdict.witness == golden[name]["witness"], name
            assert res.verdict.reason == golden[name]["reason"], name
            assert list(res.notes) == golden[name]["notes"], name
