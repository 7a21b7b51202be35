import numpy as np
import pytest
from hypothesis import given, strategies as st

from rollcast import selection
from rollcast.sarimax import ModelOrder, NO_SEASON, SarimaxParams, simulate
from rollcast.selection import Candidate, GridSpec, best, grid_search, rank


def cand(p, d, q, aic, status=selection.CONVERGED):
    return Candidate(ModelOrder(p, d, q), NO_SEASON, aic, -aic / 2, status, 0.0)


def ar2(seed, n=600):
    return simulate(n, ModelOrder(2, 0, 0), params=SarimaxParams(phi=[0.75, -0.25]),
                    rng=np.random.default_rng(seed))


class TestBest:
    def test_argmin(self):
        assert best(rank([cand(1, 1, 1, 100.0), cand(2, 1, 2, 90.0)])) == ModelOrder(2, 1, 2)

    def test_tie_prefers_smaller_p(self):
        assert best(rank([cand(2, 1, 1, 90.0), cand(1, 1, 2, 90.0)])) == ModelOrder(1, 1, 2)

    def test_tie_prefers_smaller_model(self):
        assert best(rank([cand(1, 1, 2, 90.0), cand(0, 1, 2, 90.0)])) == ModelOrder(0, 1, 2)

    def test_no_converged(self):
        rows = rank([cand(1, 0, 0, 50.0, selection.NOT_CONVERGED),
                     cand(2, 0, 0, np.nan, selection.TIMEOUT)])
        with pytest.raises(ValueError):
            best(rows)

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.floats(-1e4, 1e4),
                              st.sampled_from([selection.CONVERGED, selection.NOT_CONVERGED])),
                    min_size=1, max_size=30, unique_by=lambda r: (r[0], r[1])))
    def test_ranking_properties(self, rows):
        cands = [cand(p, 1, q, aic, status) for p, q, aic, status in rows]
        ranked = rank(cands)
        assert sorted(map(repr, ranked)) == sorted(map(repr, cands))
        flags = [c.converged for c in ranked]
        assert flags == sorted(flags, reverse=True)
        aics = [c.aic for c in ranked if c.converged]
        assert aics == sorted(aics)


class TestGridSearch:
    def test_single_candidate(self):
        ranked = grid_search(ar2(0), GridSpec((2,), (0,)))
        assert len(ranked) == 1 and ranked.rows[0].order == ModelOrder(2, 0, 0)

    def test_recovers_ar2(self):
        ranked = grid_search(ar2(1, 1500), GridSpec(range(5), range(3)))
        assert len(ranked) == 15
        assert ModelOrder(2, 0, 0) in [c.order for c in ranked.top(3)]
        assert {c.order for c in ranked} == set(GridSpec(range(5), range(3)).orders())

    def test_repeatable_and_pool_independent(self):
        y = ar2(2)
        spec = GridSpec((0, 1, 2), (0, 1))
        a = grid_search(y, spec).to_csv(include_seconds=False)
        b = grid_search(y, spec).to_csv(include_seconds=False)
        c = grid_search(y, spec, jobs=2).to_csv(include_seconds=False)
        assert a == b == c

    def test_scale_invariant_choice(self):
        hits = 0
        for seed in range(10):
            y = ar2(100 + seed, 400)
            spec = GridSpec(range(4), range(3))
            hits += best(grid_search(y, spec)) == best(grid_search(10 * y, spec))
        assert hits >= 9

    def test_failures_are_kept(self):
        y = ar2(3, 30)
        ranked = grid_search(y, GridSpec((1, 29), (0,)))
        status = {c.order.p: c.status for c in ranked}
        assert status == {1: selection.CONVERGED, 29: selection.FAILED}
        assert ranked.rows[-1].order.p == 29

    def test_timeouts_are_recorded(self):
        with pytest.raises(selection.GridSearchError) as err:
            grid_search(ar2(4), GridSpec((0, 3), (3,), timeout_per_candidate=1e-9))
        assert [c.status for c in err.value.candidates] == [selection.TIMEOUT] * 2

    def test_all_failed(self):
        with pytest.raises(selection.GridSearchError, match="too short"):
            grid_search(ar2(5, 30), GridSpec((20,), (10,)))

    def test_csv(self):
        ranked = grid_search(ar2(6), GridSpec((1,), (0,)))
        lines = ranked.to_csv().splitlines()
        assert lines[0] == "p,d,q,P,D,Q,S,aic,loglik,status,seconds"
        assert lines[1].startswith("1,0,0,0,0,0,0,")

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            GridSpec((), (0,))
