import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zrpevo.ga import GaParams, mutate, one_point_crossover, run_ga, tournament_select
from zrpevo.population import init_population
from zrpevo.routes import Individual, PenaltyPolicy, evaluate_fitness, is_valid_route, random_route
from zrpevo.zrp import build_overlay, build_zone_table

from conftest import random_net

S, A, B, C, D, E = 0, 1, 2, 3, 4, 5


def _overlay(n=40, degree=5, seed=0, dest=0):
    net = random_net(n, degree, seed)
    return build_overlay(build_zone_table(net, 2), net, dest)


class TestInitPopulation:
    def test_line5(self, line5_overlay):
        pop = init_population(line5_overlay, 0, 4, 4, np.random.default_rng(0), max_len=60)
        assert [ind.route for ind in pop] == [(0, 2, 4)] * 4
        assert [ind.fitness for ind in pop] == [4] * 4

    def test_fitness_is_evaluated(self):
        ov = _overlay(dest=3)
        pen = PenaltyPolicy.for_overlay(ov)
        for ind in init_population(ov, 11, 3, 30, np.random.default_rng(1), penalty=pen):
            assert ind.fitness == evaluate_fitness(ind.route, ov, pen)

    def test_determinism(self):
        ov = _overlay(dest=3)
        a = init_population(ov, 11, 3, 20, np.random.default_rng(7))
        b = init_population(ov, 11, 3, 20, np.random.default_rng(7))
        assert a == b

    def test_rejects_tiny_population(self, line5_overlay):
        with pytest.raises(ValueError):
            init_population(line5_overlay, 0, 4, 1, np.random.default_rng(0))


class _FixedDraws:
    """Stand-in generator replaying given tournament draws."""

    def __init__(self, draws):
        self.draws = draws

    def integers(self, lo, hi, size):
        return np.array(self.draws[:size])


class TestTournament:
    def test_argmin(self):
        pop = [Individual((S, D), 7.0), Individual((S, A, D), 4.0)]
        assert tournament_select(pop, 2, _FixedDraws([0, 1])).fitness == 4

    def test_tie_goes_to_lower_index(self):
        pop = [Individual((S, A, D), 5.0), Individual((S, B, D), 5.0), Individual((S, C, D), 5.0)]
        assert tournament_select(pop, 2, _FixedDraws([2, 1])).route == (S, B, D)

    def test_full_tournament_finds_global_best(self):
        rng = np.random.default_rng(0)
        fits = rng.permutation(10).astype(float)
        pop = [Individual((S, i + 10, D), f) for i, f in enumerate(fits)]
        best = tournament_select(pop, 10, _FixedDraws(list(range(10))))
        assert best.fitness == 0

    def test_selection_pressure(self):
        rng = np.random.default_rng(0)
        pop = [Individual((S, i + 10, D), float(i)) for i in range(10)]
        picks = [tournament_select(pop, 2, rng).fitness for _ in range(4000)]
        # binary tournament: P(rank i) = (2(M - i) - 1) / M^2
        assert np.mean(np.array(picks) == 0) == pytest.approx(19 / 100, abs=0.02)
        assert np.mean(np.array(picks) == 9) == pytest.approx(1 / 100, abs=0.01)


class TestCrossover:
    def test_shared_node_suffix_swap(self):
        child = one_point_crossover((S, A, B, D), (S, C, B, E, D), np.random.default_rng(0))
        assert child == (S, A, B, E, D)

    def test_identical_parents(self):
        p = (S, A, B, C, D)
        for seed in range(20):
            assert one_point_crossover(p, p, np.random.default_rng(seed)) == p

    def test_disjoint_parents_splice(self):
        children = {one_point_crossover((S, A, D), (S, C, D), np.random.default_rng(s)) for s in range(50)}
        # cuts: p1 prefix in {[S], [S,A]}, p2 suffix in {[C,D], [D]}
        assert children == {(S, C, D), (S, D), (S, A, C, D), (S, A, D)}

    def test_endpoints_preserved_1000_pairs(self):
        ov = _overlay(dest=5)
        rng = np.random.default_rng(3)
        for _ in range(1000):
            s = int(rng.integers(6, 40))
            p1 = random_route(ov, s, 5, rng, 160)
            p2 = random_route(ov, s, 5, rng, 160)
            child = one_point_crossover(p1, p2, rng)
            assert is_valid_route(child, s, 5)


class TestMutate:
    def test_no_interior(self, line5_overlay):
        assert mutate((0, 4), line5_overlay, np.random.default_rng(0), 10) == (0, 4)

    @settings(max_examples=300, deadline=None)
    @given(seed=st.integers(0, 2**63))
    def test_prefix_and_endpoints(self, seed):
        ov = _overlay(dest=5, seed=1)
        rng = np.random.default_rng(seed)
        route = random_route(ov, 17, 5, rng, 160)
        probe = np.random.default_rng(seed + 1)
        m = int(np.random.default_rng(seed + 1).integers(1, len(route) - 1)) if len(route) > 2 else None
        out = mutate(route, ov, probe, 160)
        assert is_valid_route(out, 17, 5)
        if m is not None:
            assert out[:m + 1] == route[:m + 1]

    def test_endpoints_1000_pairs(self):
        ov = _overlay(dest=5, seed=2)
        rng = np.random.default_rng(4)
        for _ in range(1000):
            s = int(rng.integers(6, 40))
            route = random_route(ov, s, 5, rng, 160)
            assert is_valid_route(mutate(route, ov, rng, 160), s, 5)


class TestRunGa:
    def test_line5_optimum(self, line5_overlay):
        rec = run_ga(line5_overlay, 0, 4, GaParams(seed=3))
        assert rec.best_fitness == 4 and rec.best_route == (0, 2, 4)
        assert rec.converged_at is not None and rec.converged_at <= 50

    def test_record_invariants(self):
        for i in range(10):
            ov = _overlay(n=60, degree=6, seed=i, dest=i)
            rec = run_ga(ov, 30, i, GaParams(seed=i, stall_window=20, max_generations=200))
            assert all(b >= a for a, b in zip(rec.best_per_gen[1:], rec.best_per_gen))
            assert rec.best_fitness == rec.best_per_gen[-1]
            assert rec.generations_used == len(rec.best_per_gen) == len(rec.avg_per_gen)
            assert rec.generations_used <= 200
            assert is_valid_route(rec.best_route, 30, i)

    def test_determinism(self):
        ov = _overlay(n=60, degree=6, seed=5, dest=9)
        assert run_ga(ov, 30, 9, GaParams(seed=11)) == run_ga(ov, 30, 9, GaParams(seed=11))

    def test_generation_cap(self):
        ov = _overlay(n=60, degree=6, seed=5, dest=9)
        rec = run_ga(ov, 30, 9, GaParams(seed=1, max_generations=3, stall_window=50))
        assert rec.generations_used == 3 and rec.converged_at is None

    @pytest.mark.parametrize("kw", [dict(population_size=1), dict(crossover_prob=1.5),
                                    dict(mutation_prob=-0.1), dict(tournament_size=1),
                                    dict(max_generations=0)])
    def test_rejects_bad_params(self, line5_overlay, kw):
        with pytest.raises(ValueError):
            run_ga(line5_overlay, 0, 4, GaParams(**kw))

    def test_same_endpoints_rejected(self, line5_overlay):
        with pytest.raises(ValueError):
            run_ga(line5_overlay, 4, 4, GaParams())
