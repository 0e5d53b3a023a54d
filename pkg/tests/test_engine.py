import numpy as np
import pytest

from conftest import objective_pair
from divtween.criteria import CentroidClassifier
from divtween.engine import (
    RunConfig,
    brute_force_pareto,
    run,
    sample_theorem_candidates,
    unguided_baseline,
    verify_theorem_1,
    verify_theorem_2,
)
from divtween.errors import EngineError, RangeError
from divtween.generators import SeededStream
from divtween.motion import LengthPolicy, sequences_equal


def small_config(classifier, domain, **kw):
    defaults = dict(seed=99, classifier=classifier, domain=domain, l=8, m=8, tau_max=5)
    defaults.update(kw)
    return RunConfig(**defaults)


class TestRunConfig:
    def test_bounds(self, classifier6, domain6):
        with pytest.raises(RangeError):
            RunConfig(seed=1, classifier=classifier6, domain=domain6, l=1)
        with pytest.raises(RangeError):
            RunConfig(seed=1, classifier=classifier6, domain=domain6, m=0)
        with pytest.raises(RangeError):
            RunConfig(seed=1, classifier=classifier6, domain=domain6, tau_max=-1)
        with pytest.raises(RangeError):
            RunConfig(seed=1, classifier=classifier6, generator_id="mixture")
        with pytest.raises(RangeError):
            RunConfig(seed=1, classifier=classifier6, domain=domain6, generator_id="nope")

    def test_interp_needs_no_domain(self, classifier6):
        RunConfig(seed=1, classifier=classifier6, generator_id="interp")


class TestRun:
    def test_zero_budget_returns_evaluated_initial_population(
        self, classifier6, domain6, cond16
    ):
        res = run(small_config(classifier6, domain6, tau_max=0), cond16)
        assert len(res.history) == 1
        assert len(res.final.members) == 8

    def test_deterministic(self, classifier6, domain6, cond16):
        cfg = small_config(classifier6, domain6)
        a, b = run(cfg, cond16), run(cfg, cond16)
        for ma, mb in zip(a.final.members, b.final.members):
            assert sequences_equal(ma.seq, mb.seq)
            assert ma.criteria == mb.criteria
        assert a.history == b.history

    def test_population_size_every_generation(self, classifier6, domain6, cond16):
        res = run(small_config(classifier6, domain6), cond16)
        assert all(len(snap) == 8 for snap in res.history)
        assert len(res.history) == 6

    def test_selection_reduces_front0_mean_offset(self, classifier6, domain6, cond16):
        # positive warp tolerance leaves room for the offset to shrink
        cfg = small_config(
            classifier6, domain6, l=12, m=12, tau_max=10, warp_tolerance=0.3
        )
        res = run(cfg, cond16)
        final_front0 = [m.criteria.beta for m in res.final.members if m.rank == 0]
        initial = [e.criteria.beta for e in res.history[0]]
        assert np.mean(final_front0) <= np.mean(initial)

    def test_interp_generator_run(self, classifier6, cond16):
        cfg = RunConfig(
            seed=5, classifier=classifier6, generator_id="interp", l=6, m=6, tau_max=3
        )
        res = run(cfg, cond16)
        assert len(res.final.members) == 6
        assert all(m.criteria.beta == 0.0 for m in res.final.members)

    def test_error_carries_context(self, domain6, cond16):
        wrong_j = CentroidClassifier(
            centroids=np.zeros((3, 15 * 4 * 3)), num_joints=4, frames=15
        )
        with pytest.raises(EngineError, match="initialization, sample 0"):
            run(small_config(wrong_j, domain6), cond16)

    def test_custom_length_policy(self, classifier6, domain6, cond16):
        cfg = small_config(classifier6, domain6, length_policy=LengthPolicy(3, 9))
        res = run(cfg, cond16)
        assert 3 <= res.y_len <= 9
        assert all(len(m.seq) == 9 for m in res.final.members)

    def test_more_offspring_than_parents(self, classifier6, domain6, cond16):
        cfg = small_config(classifier6, domain6, l=4, m=13, tau_max=3)
        res = run(cfg, cond16)
        assert all(len(snap) == 4 for snap in res.history)
        assert len(res.history) == 4

    def test_elitism_across_generations(self, classifier6, domain6, cond16):
        # fronts are admitted in rank order, so a member dominated by a
        # retained parent can never survive while that parent is dropped
        from divtween.pareto import dominates

        cfg = small_config(
            classifier6, domain6, l=10, m=10, tau_max=8, warp_tolerance=0.4
        )
        res = run(cfg, cond16)
        for prev, curr in zip(res.history, res.history[1:]):
            curr_criteria = [e.criteria for e in curr]
            for entry in curr:
                for parent in prev:
                    if dominates(parent.criteria, entry.criteria):
                        assert parent.criteria in curr_criteria


class TestUnguidedBaseline:
    def test_matches_zero_budget_run(self, classifier6, domain6, cond16):
        cfg = small_config(classifier6, domain6, tau_max=7)
        base = unguided_baseline(cfg, cond16)
        res0 = run(small_config(classifier6, domain6, tau_max=0), cond16)
        assert len(base.members) == len(res0.final.members)
        for ma, mb in zip(base.members, res0.final.members):
            assert sequences_equal(ma.seq, mb.seq)
            assert ma.criteria == mb.criteria

    def test_deterministic(self, classifier6, domain6, cond16):
        cfg = small_config(classifier6, domain6)
        a, b = unguided_baseline(cfg, cond16), unguided_baseline(cfg, cond16)
        assert all(sequences_equal(x.seq, y.seq) for x, y in zip(a.members, b.members))


class TestBruteForcePareto:
    def test_chain(self):
        assert brute_force_pareto([objective_pair(1, 1), objective_pair(2, 2)]) == [0]

    def test_antichain(self):
        cands = [objective_pair(1, 4), objective_pair(2, 3), objective_pair(3, 2)]
        assert brute_force_pareto(cands) == [0, 1, 2]

    def test_matches_fast_sort_front0(self, classifier6, domain6):
        from divtween.motion import MotionSequence
        from divtween.pareto import Individual, fast_nondominated_sort

        rng = np.random.default_rng(42)
        cands = [
            objective_pair(*np.round(rng.uniform(0, 2, 2), 2)) for _ in range(200)
        ]
        stub = MotionSequence(frames=np.ones((1, 1, 3)))
        pop = [Individual(seq=stub, criteria=c) for c in cands]
        assert sorted(brute_force_pareto(cands)) == sorted(
            fast_nondominated_sort(pop)[0]
        )

    def test_empty_rejected(self):
        with pytest.raises(RangeError):
            brute_force_pareto([])


class TestTheoremVerifiers:
    def test_two_zero_offset_members_nondominated(self):
        cands = [
            objective_pair(0.3, 0.7),   # beta = 0
            objective_pair(0.8, 0.2),   # beta = 0
            objective_pair(0.9, 1.3),   # beta = 0.6
        ]
        rep = verify_theorem_1(cands)
        assert not rep.skipped
        assert set(rep.minimal_set) == {0, 1}
        assert rep.violations == []

    def test_smaller_alpha_larger_offset_cannot_dominate(self):
        # a rival with smaller f1 but strictly larger beta leaves the minimal
        # member nondominated: its f2 is necessarily worse
        minimal = objective_pair(0.6, 0.4)          # beta = 0
        minimal2 = objective_pair(0.5, 0.5)         # beta = 0
        rival = objective_pair(0.3, 1.1)            # beta = 0.2, smaller f1
        rep = verify_theorem_1([minimal, minimal2, rival])
        assert rep.violations == []

    def test_skipped_when_minimal_set_is_singleton(self):
        cands = [objective_pair(0.3, 0.7), objective_pair(0.9, 1.3)]
        rep = verify_theorem_1(cands)
        assert rep.skipped and "fewer than 2 members" in rep.reason

    def test_skipped_when_too_few_candidates(self):
        rep = verify_theorem_1([objective_pair(0.5, 0.5)])
        assert rep.skipped

    def test_theorem2_threshold_and_separated_pair(self):
        # D=4, equal offsets, labels 0 and 3, confidences 0.5: L1 gap is
        # 2*(3/4) = 1.5 > 4/4, and the labels indeed differ -> no violation
        a = objective_pair((0 + 0.5) / 4, 1 - (0 + 0.5) / 4, label=0)
        b = objective_pair((3 + 0.5) / 4, 1 - (3 + 0.5) / 4, label=3)
        l1 = abs(a.f1 - b.f1) + abs(a.f2 - b.f2)
        assert l1 == pytest.approx(1.5, abs=1e-12)
        rep = verify_theorem_2([a, b], 4)
        assert not rep.skipped and rep.violations == []

    def test_theorem2_flags_inconsistent_same_label_pair(self):
        a = objective_pair(0.05, 0.95, label=2)
        b = objective_pair(0.95, 0.05, label=2)  # same label, L1 gap 1.8 > 4/6
        rep = verify_theorem_2([a, b], 6)
        assert [v["pair"] for v in rep.violations] == [[0, 1]]

    def test_threshold_for_twenty_classes(self):
        assert 4.0 / 20 == 0.2

    def test_same_label_equal_offset_pairs_bounded(self, classifier6, domain6):
        # contrapositive search: no consistent same-label pair exceeds 4/D
        root = SeededStream(314)
        found = 0
        for s in range(40):
            cands = sample_theorem_candidates(domain6, classifier6, 30, root.child(s))
            betas = np.array([c.beta for c in cands])
            minimal = [i for i in range(len(cands)) if betas[i] <= betas.min() + 1e-12]
            for ai in range(len(minimal)):
                for bi in range(ai + 1, len(minimal)):
                    a, b = cands[minimal[ai]], cands[minimal[bi]]
                    if a.label == b.label:
                        found += 1
                        l1 = abs(a.f1 - b.f1) + abs(a.f2 - b.f2)
                        assert l1 <= 4.0 / classifier6.num_classes + 1e-12
        assert found > 0

    def test_randomized_sets_no_violations(self, classifier6, domain6):
        root = SeededStream(2718)
        for s in range(50):
            cands = sample_theorem_candidates(domain6, classifier6, 50, root.child(s))
            assert verify_theorem_1(cands).violations == []
            assert verify_theorem_2(cands, classifier6.num_classes).violations == []
