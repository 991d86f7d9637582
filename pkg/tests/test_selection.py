import itertools
import json
import math

import numpy as np
import pytest

import expframes as ef
from expframes.construct import fourier_system
from expframes.errors import (
    InvalidD,
    KTooLarge,
    NotParseval,
    TooManySubsets,
)


def eig2_min(a: float, b: float, c: complex) -> float:
    """Closed-form smallest eigenvalue of the 2x2 Hermitian [[a, c], [c*, b]]."""
    return (a + b) / 2.0 - math.sqrt(((a - b) / 2.0) ** 2 + abs(c) ** 2)


class TestConstants:
    def test_ratio_bound_q2(self):
        # ((sqrt2+1)/(sqrt2-1))^2 = (3+2*sqrt2)^2 = 17 + 12*sqrt2
        assert math.isclose(ef.condition_ratio_bound(2.0), 17.0 + 12.0 * math.sqrt(2.0))

    def test_lower_constant_identities(self):
        # ((sqrt2-1)/(sqrt2+1))^2 = (3-2*sqrt2)^2 = 17 - 12*sqrt2
        assert math.isclose(ef.lower_certificate_constant(1.0), 17.0 - 12.0 * math.sqrt(2.0))
        assert math.isclose(ef.lower_certificate_constant(3.0), 1.0 / 9.0)

    def test_riesz_floor_identities(self):
        # (1-sqrt(1/2))^2 = 3/2 - sqrt2
        assert math.isclose(ef.riesz_floor_constant(0.5), 1.5 - math.sqrt(2.0))
        assert math.isclose(ef.riesz_floor_constant(0.75), 0.25)


class TestVectorSystem:
    def test_parseval_validation(self):
        with pytest.raises(NotParseval):
            ef.VectorSystem(np.array([[1.0, 0.0], [0.0, 0.5]]), parseval=True)

    def test_equal_norm_validation(self):
        vecs = np.array([[1.0, 0.0], [0.0, 0.5]])
        with pytest.raises(ValueError):
            ef.VectorSystem(vecs, equal_norm=True)

    def test_fourier_rows_qualify(self):
        sys = fourier_system(ef.GridSpectrum(8, (0, 3, 5)))
        assert sys.parseval and sys.equal_norm and sys.m == 8 and sys.n == 3


class TestBssSelect:
    def test_rank_one_rescaled_to_one(self):
        sys = fourier_system(ef.GridSpectrum(4, (0,)))
        res = ef.bss_select(sys, 2.0)
        assert len(res.indices) <= math.ceil(2.0)
        assert math.isclose(res.lambda_min, 1.0, rel_tol=1e-12)
        assert math.isclose(res.lambda_max, 1.0, rel_tol=1e-12)

    def test_step_budget_covering_all_rows(self):
        # ceil(q*n) = m: the loop may pick every row; certificates still hold
        sys = fourier_system(ef.GridSpectrum(4, (0, 1)))
        res = ef.bss_select(sys, 2.0)
        assert len(res.indices) <= math.ceil(2.0 * 2)
        assert res.lambda_max / res.lambda_min <= ef.condition_ratio_bound(2.0) * (1 + 1e-9)
        spec = ef.hermitian_eig(sys.outer_sum(res.indices, res.weights))
        assert math.isclose(spec.lam_min, res.lambda_min, rel_tol=1e-9)
        assert math.isclose(spec.lam_max, res.lambda_max, rel_tol=1e-9)

    def test_real_run_certificate_and_log(self):
        sys = fourier_system(ef.GridSpectrum(8, (0, 1)))
        res = ef.bss_select(sys, 2.0)
        bound = ef.condition_ratio_bound(2.0)
        assert len(res.indices) <= 4
        assert res.lambda_max / res.lambda_min <= bound * (1.0 + 1e-9)
        assert res.barrier_log
        # barriers strictly bracket the spectrum after every step
        for step in res.barrier_log:
            assert step.u - step.lam_max > 0.0
            assert step.lam_min - step.l > 0.0
            assert step.weight > 0.0
        # shifted potentials never increase
        phis_u = [s.phi_u for s in res.barrier_log]
        phis_l = [s.phi_l for s in res.barrier_log]
        assert all(b <= a + 1e-9 for a, b in zip(phis_u, phis_u[1:]))
        assert all(b <= a + 1e-9 for a, b in zip(phis_l, phis_l[1:]))

    def test_self_consistency_of_reported_extremes(self):
        sys = fourier_system(ef.GridSpectrum(12, (0, 2, 7)))
        res = ef.bss_select(sys, 1.8)
        spec = ef.hermitian_eig(sys.outer_sum(res.indices, res.weights))
        assert math.isclose(spec.lam_min, res.lambda_min, rel_tol=1e-9)
        assert math.isclose(spec.lam_max, res.lambda_max, rel_tol=1e-9)

    def test_identity_system_full_selection(self):
        sys = ef.VectorSystem(np.eye(4), parseval=True, equal_norm=True)
        res = ef.bss_select(sys, 1.5)
        assert res.indices == (0, 1, 2, 3)
        assert max(res.weights) / min(res.weights) == 1.0
        assert math.isclose(res.lambda_max / res.lambda_min, 1.0)

    def test_rejects_bad_input(self):
        sys = ef.VectorSystem(np.eye(3) * 0.5)
        with pytest.raises(NotParseval):
            ef.bss_select(sys, 2.0)
        with pytest.raises(ValueError):
            ef.bss_select(fourier_system(ef.GridSpectrum(4, (0,))), 1.0)

    def test_determinism_byte_identical(self):
        sys = fourier_system(ef.GridSpectrum(16, (1, 4, 9, 12)))
        a = json.dumps(ef.bss_select(sys, 1.7).to_dict())
        b = json.dumps(ef.bss_select(sys, 1.7).to_dict())
        assert a == b

    def test_trajectory_replayed_through_resolvent_quadratics(self):
        # independent replication: rebuild the running sum from the log and
        # recompute every step's scores with the public resolvent operation
        g = ef.GridSpectrum(12, (0, 2, 7))
        sys = fourier_system(g)
        q = 1.8
        res = ef.bss_select(sys, q)
        n, m = sys.n, sys.m
        sq = math.sqrt(q)
        delta_u, delta_l = (sq + 1.0) / (sq - 1.0), 1.0
        eps_u = (sq - 1.0) / (sq * (sq + 1.0))
        u, l = n / eps_u, -n * sq
        a = np.zeros((n, n), dtype=complex)
        for step in res.barrier_log:
            u_next, l_next = u + delta_u, l + delta_l
            evals = np.linalg.eigvalsh(a)
            phi_u = float(np.sum(1.0 / (u - evals)))
            phi_l = float(np.sum(1.0 / (evals - l)))
            phi_u_next = float(np.sum(1.0 / (u_next - evals)))
            phi_l_next = float(np.sum(1.0 / (evals - l_next)))
            margins, upper_scores, lower_scores = [], [], []
            for i in range(m):
                v = sys.vectors[i]
                q1u, q2u = ef.resolvent_quadratics(a, u_next, v)
                q1l, q2l = ef.resolvent_quadratics(a, l_next, v)
                upper = q2u / (phi_u - phi_u_next) + q1u
                lower = q2l / (phi_l_next - phi_l) - q1l
                margins.append(lower - upper)
                upper_scores.append(upper)
                lower_scores.append(lower)
            best = int(np.argmax(margins))
            assert best == step.index
            t = 2.0 / (upper_scores[best] + lower_scores[best])
            assert math.isclose(t, step.weight, rel_tol=1e-9)
            assert upper_scores[best] <= 1.0 / t <= lower_scores[best] * (1 + 1e-12)
            v = sys.vectors[best]
            a = a + t * np.outer(v, v.conj())
            u, l = u_next, l_next


class TestBssUnweighted:
    def test_canonical_single_cell(self):
        sys = fourier_system(ef.GridSpectrum(4, (0,)))
        for d in (0.5, 1.0, 3.0):
            res = ef.bss_unweighted(sys, d)
            assert math.isclose(res.lambda_min, 0.25, rel_tol=1e-12)
            assert res.lambda_min >= ef.lower_certificate_constant(d) * 0.25

    def test_two_cell_certificate(self):
        sys = fourier_system(ef.GridSpectrum(4, (0, 1)))
        res = ef.bss_unweighted(sys, 1.0)
        target = ef.lower_certificate_constant(1.0) * 0.5
        assert res.lambda_min >= target
        spec = ef.hermitian_eig(sys.outer_sum(res.indices))
        assert math.isclose(spec.lam_min, res.lambda_min, rel_tol=1e-9)

    def test_random_small_with_brute_force_feasibility(self):
        g = ef.GridSpectrum(12, (1, 5, 10))
        sys = fourier_system(g)
        res = ef.bss_unweighted(sys, 3.0)
        assert len(res.indices) <= 12
        target = ef.lower_certificate_constant(3.0) * 3 / 12
        assert res.lambda_min >= target
        _, best = ef.brute_force_best(sys, len(res.indices), "max-of-lambda_min")
        assert best >= res.lambda_min - 1e-12

    def test_size_floor(self):
        # fewer than n rows would be rank-deficient, contradicting the floor
        sys = fourier_system(ef.GridSpectrum(16, (0, 3, 8, 11)))
        res = ef.bss_unweighted(sys, 0.6)
        assert len(res.indices) >= sys.n

    def test_rejects_non_positive_d(self):
        with pytest.raises(ValueError):
            ef.bss_unweighted(fourier_system(ef.GridSpectrum(4, (0,))), 0.0)


class TestRitSelect:
    def test_identity_system(self):
        sys = ef.VectorSystem(np.eye(6), parseval=True, equal_norm=True)
        res = ef.rit_select(sys, 0.5)
        assert len(res.indices) >= 3
        assert math.isclose(res.lambda_min, 1.0, rel_tol=1e-12)

    def test_half_spectrum(self):
        sys = fourier_system(ef.GridSpectrum(8, (0, 1, 2, 3)))
        res = ef.rit_select(sys, 0.5)
        assert len(res.indices) >= 2
        assert res.lambda_min >= ef.riesz_floor_constant(0.5) * 0.5
        spec = ef.hermitian_eig(sys.gram_of(res.indices))
        assert math.isclose(spec.lam_min, res.lambda_min, rel_tol=1e-9)

    def test_singleton_case_exhaustive(self):
        # every singleton Gram equals n/m = 1/3, above 0.25 * (1/3)
        sys = fourier_system(ef.GridSpectrum(6, (0, 1)))
        res = ef.rit_select(sys, 0.75)
        assert len(res.indices) >= 1
        floor = ef.riesz_floor_constant(0.75) * 2 / 6
        for j in range(6):
            gram = sys.gram_of([j])
            assert gram[0, 0].real >= floor
        assert res.lambda_min >= floor

    def test_log_tracks_barrier(self):
        sys = fourier_system(ef.GridSpectrum(16, (0, 1, 2, 3, 4, 5, 6, 7)))
        res = ef.rit_select(sys, 0.25)
        assert len(res.barrier_log) == len(res.indices)
        floors = [s.l for s in res.barrier_log]
        assert all(f > 0 for f in floors)

    def test_invalid_d(self):
        sys = fourier_system(ef.GridSpectrum(4, (0,)))
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(InvalidD):
                ef.rit_select(sys, bad)


class TestUpperSelect:
    def test_rank_one(self):
        sys = fourier_system(ef.GridSpectrum(4, (0,)))
        res = ef.upper_select(sys, 1)
        assert len(res.indices) == 1
        assert math.isclose(res.lambda_max, 0.25, rel_tol=1e-12)

    def test_two_cell_pair_matches_brute_force(self):
        sys = fourier_system(ef.GridSpectrum(4, (0, 1)))
        res = ef.upper_select(sys, 2)
        # oracle: exhaustive minimum of lambda_max over all 6 pairs
        _, best = ef.brute_force_best(sys, 2, "min-of-lambda_max")
        assert math.isclose(best, 0.5, rel_tol=1e-12)
        assert math.isclose(res.lambda_max, best, rel_tol=1e-9)

    def test_full_selection(self):
        sys = fourier_system(ef.GridSpectrum(6, tuple(range(6))))
        res = ef.upper_select(sys, 6)
        assert res.indices == tuple(range(6))
        assert math.isclose(res.lambda_max, 1.0, rel_tol=1e-10)

    def test_k_too_large(self):
        with pytest.raises(KTooLarge):
            ef.upper_select(fourier_system(ef.GridSpectrum(4, (0,))), 5)

    def test_small_seeded_ensemble_ratio(self):
        for i in range(8):
            rng = np.random.default_rng(np.random.SeedSequence(entropy=(31, i)))
            cells = tuple(sorted(int(r) for r in rng.choice(32, size=4, replace=False)))
            sys = fourier_system(ef.GridSpectrum(32, cells))
            res = ef.upper_select(sys, 5)
            assert len(res.indices) == 5
            assert res.lambda_max <= 20.0 * (4 / 32)


class TestBruteForce:
    def test_six_pair_hand_enumeration(self):
        sys = fourier_system(ef.GridSpectrum(4, (0, 1)))
        vecs = sys.vectors
        # independent oracle: closed-form 2x2 eigenvalues over all pairs
        best_hand, best_j = -1.0, None
        for pair in itertools.combinations(range(4), 2):
            s = sum(np.outer(vecs[i], vecs[i].conj()) for i in pair)
            lam = eig2_min(s[0, 0].real, s[1, 1].real, s[0, 1])
            if lam > best_hand + 1e-15:
                best_hand, best_j = lam, pair
        j, val = ef.brute_force_best(sys, 2, "max-of-lambda_min")
        assert j == best_j == (0, 2)
        assert math.isclose(val, best_hand, rel_tol=1e-12)
        assert math.isclose(val, 0.5, rel_tol=1e-12)

    def test_full_subset_is_parseval(self):
        sys = fourier_system(ef.GridSpectrum(5, (0, 2)))
        j, val = ef.brute_force_best(sys, 5, "max-of-lambda_min")
        assert j == tuple(range(5))
        assert math.isclose(val, 1.0, rel_tol=1e-10)
        j2, val2 = ef.brute_force_best(sys, 5, "min-of-lambda_max")
        assert math.isclose(val2, 1.0, rel_tol=1e-10)

    def test_oracle_dominates_engine(self):
        sys = fourier_system(ef.GridSpectrum(6, (0, 3)))
        res = ef.bss_unweighted(sys, 1.0)
        _, best = ef.brute_force_best(sys, len(res.indices), "max-of-lambda_min")
        assert best >= res.lambda_min - 1e-12

    def test_too_many_subsets(self):
        sys = ef.VectorSystem(np.eye(40))
        with pytest.raises(TooManySubsets):
            ef.brute_force_best(sys, 20, "max-of-lambda_min")

    def test_unknown_objective(self):
        with pytest.raises(ValueError):
            ef.brute_force_best(fourier_system(ef.GridSpectrum(4, (0,))), 1, "nope")
