import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oexnrule import BaseModel, BootstrapSample, Dataset, EnsembleConfig, exnrule_predict, fit, oob_error, predict, predict_proba
from oexnrule.ensemble import ModelFormatError, _select, aggregate_votes, load_model, save_model

from .conftest import make_blobs, selection_violation


def sample(in_bag, cols, n, seed=0):
    in_bag = np.asarray(in_bag)
    oob = np.setdiff1d(np.arange(n), in_bag)
    return BootstrapSample(in_bag, np.asarray(cols), oob, seed)


class TestConfig:
    def test_defaults(self):
        cfg = EnsembleConfig()
        assert (cfg.n_models, cfg.k, cfg.n_selected) == (500, 3, 125)
        assert cfg.resolve_p_prime(29) == 5

    @pytest.mark.parametrize("b, frac, expected", [(4, 0.25, 1), (3, 0.25, 1), (10, 0.25, 3), (10, 1.0, 10),
                                                   (6, 0.25, 2), (1, 0.01, 1)])
    def test_n_selected(self, b, frac, expected):
        assert EnsembleConfig(n_models=b, select_fraction=frac).n_selected == expected

    @pytest.mark.parametrize("kw", [{"n_models": 0}, {"select_fraction": 0}, {"select_fraction": 1.5},
                                    {"k": 0}, {"p_prime": 0}, {"p_prime": "sqrt"}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            EnsembleConfig(**kw)

    def test_p_prime_too_large(self):
        with pytest.raises(ValueError):
            EnsembleConfig(p_prime=9).resolve_p_prime(4)

    def test_dict_round_trip(self):
        cfg = EnsembleConfig(n_models=7, select_fraction=0.5, k=5, p_prime=2, seed=3)
        assert EnsembleConfig.from_dict(cfg.to_dict()) == cfg


class TestOobError:
    X = Dataset([[0.0], [1.0], [2.0], [0.1], [1.1], [2.1]], [0, 1, 1, 0, 1, 0])

    def test_one_of_three_wrong(self):
        # OOB rows 3, 4, 5 sit next to in-bag rows 0, 1, 2: predictions 0, 1, 1 against truth 0, 1, 0
        s = sample([0, 1, 2, 0, 1, 2], [0], 6)
        assert s.oob.tolist() == [3, 4, 5]
        assert oob_error(s, self.X, EnsembleConfig(k=1)) == pytest.approx(1 / 3)

    def test_all_correct(self):
        ds = Dataset([[0.0], [1.0], [0.1], [1.1]], [0, 1, 0, 1])
        assert oob_error(sample([0, 1, 0, 1], [0], 4), ds, EnsembleConfig(k=1)) == 0.0

    def test_empty_oob_is_unscored(self):
        ds = Dataset([[1.0]], [1])
        s = sample([0], [0], 1)
        m = BaseModel(s, oob_error(s, ds, EnsembleConfig(k=1)), 1)
        assert m.oob_error is None and not m.scored


class TestSelection:
    def test_single_survivor_is_best(self, blobs):
        model = fit(blobs, EnsembleConfig(n_models=4, select_fraction=0.25, seed=1))
        assert len(model.selected) == 1
        scored = [e for e in model.all_errors if e is not None]
        assert model.selected[0].oob_error == min(scored)

    def test_tie_goes_to_smaller_ordinal(self):
        s = sample([0], [0], 1)
        models = [BaseModel(s, 0.2, 3), BaseModel(s, 0.1, 5), BaseModel(s, 0.2, 1), BaseModel(s, 0.1, 2)]
        assert [m.ordinal for m in _select(models, 3)] == [2, 5, 1]

    def test_unscored_rank_last(self):
        s = sample([0], [0], 1)
        models = [BaseModel(s, None, 1), BaseModel(s, 0.9, 2), BaseModel(s, 0.5, 3)]
        assert [m.ordinal for m in _select(models, 2)] == [3, 2]
        assert [m.ordinal for m in _select(models, 3)] == [3, 2, 1]

    @settings(max_examples=100, deadline=None)
    @given(errors=st.lists(st.one_of(st.none(), st.sampled_from([0.0, 0.1, 0.25, 0.5, 1.0])), min_size=1,
                           max_size=40), data=st.data())
    def test_selection_optimal(self, errors, data):
        s = sample([0], [0], 1)
        models = [BaseModel(s, e, i + 1) for i, e in enumerate(errors)]
        chosen = _select(models, data.draw(st.integers(1, len(models))))
        assert selection_violation(models, chosen) is None

    def test_selected_sorted_by_rank(self, blobs):
        model = fit(blobs, EnsembleConfig(n_models=40, seed=2))
        keys = [m.rank_key() for m in model.selected]
        assert keys == sorted(keys)
        assert len(model.selected) == 10


class TestPredict:
    def test_single_voter_equals_base_model(self, blobs):
        model = fit(blobs, EnsembleConfig(n_models=4, select_fraction=0.25, seed=9))
        X = make_blobs(n=30, seed=5).features
        base = model.selected[0].votes(blobs, X, model.config)[0]
        np.testing.assert_array_equal(model.predict(X), base)

    def test_functional_api(self, blobs):
        model = fit(blobs, EnsembleConfig(n_models=20, seed=0))
        x = blobs.features[0]
        assert predict(model, x) == model.predict(x[None])[0]
        assert predict_proba(model, x) == model.predict_proba(x[None])[0]
        assert predict(model, blobs.features).shape == (blobs.n,)

    def test_wrong_width(self, blobs):
        model = fit(blobs, EnsembleConfig(n_models=5, seed=0))
        with pytest.raises(ValueError, match="features"):
            model.predict(np.zeros((1, blobs.p + 1)))

    def test_vote_counting(self):
        votes = np.zeros((125, 3), dtype=int)
        votes[:70, 0] = 1
        votes[:50, 1] = 1
        votes[:, 2] = 1
        label, share = aggregate_votes(votes)
        assert label.tolist() == [1, 0, 1]
        assert share.tolist() == [70 / 125, 0.4, 1.0]
        assert aggregate_votes(np.zeros((125, 1)))[1].tolist() == [0.0]

    def test_tie_goes_to_best_ranked(self):
        votes = np.array([[1, 0], [0, 1], [1, 1], [0, 0]])
        assert aggregate_votes(votes)[0].tolist() == [1, 0]

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=30), st.data())
    def test_monotone_and_consistent(self, col, data):
        votes = np.array(col)[:, None]
        label, share = aggregate_votes(votes)
        if share[0] != 0.5:
            assert (share[0] > 0.5) == (label[0] == 1)
        else:
            assert label[0] == votes[0, 0]
        zeros = [i for i, v in enumerate(col) if v == 0]
        if zeros:
            flipped = votes.copy()
            flipped[data.draw(st.sampled_from(zeros)), 0] = 1
            assert aggregate_votes(flipped)[1][0] >= share[0]

    def test_proba_matches_label_on_fit(self, blobs):
        model = fit(blobs, EnsembleConfig(n_models=30, select_fraction=0.5, seed=4))
        X = make_blobs(n=50, seed=8).features
        lab, prob = model.predict(X), model.predict_proba(X)
        clear = prob != 0.5
        np.testing.assert_array_equal(lab[clear], (prob[clear] > 0.5).astype(int))

    def test_degenerate_equivalence_small(self, blobs):
        cfg = EnsembleConfig(n_models=5, select_fraction=1.0, p_prime=blobs.p, bootstrap=False)
        model = fit(blobs, cfg)
        for x in make_blobs(n=10, seed=3).features:
            assert predict(model, x) == exnrule_predict(blobs, x, 3)[0]


class TestDeterminism:
    def test_workers_do_not_matter(self, blobs):
        probe = make_blobs(n=40, seed=12).features
        fits = [fit(blobs, EnsembleConfig(n_models=60, seed=77), workers=w) for w in (1, 2, 8)]
        ordinals = [[m.ordinal for m in f.selected] for f in fits]
        assert ordinals[0] == ordinals[1] == ordinals[2]
        preds = [f.predict_proba(probe) for f in fits]
        np.testing.assert_array_equal(preds[0], preds[1])
        np.testing.assert_array_equal(preds[0], preds[2])
        assert fits[0].all_errors == fits[2].all_errors

    def test_seed_changes_model(self, blobs):
        a = fit(blobs, EnsembleConfig(n_models=30, seed=1))
        b = fit(blobs, EnsembleConfig(n_models=30, seed=2))
        assert a.all_errors != b.all_errors

    def test_too_small(self):
        with pytest.raises(ValueError, match="too small"):
            fit(Dataset([[0.0], [1.0], [2.0]], [0, 1, 0]), EnsembleConfig(k=3))


class TestPersistence:
    def test_round_trip(self, blobs, tmp_path):
        model = fit(blobs, EnsembleConfig(n_models=40, seed=5))
        path = save_model(model, tmp_path / "m.json")
        back = load_model(path, blobs)
        probe = make_blobs(n=25, seed=2).features
        np.testing.assert_array_equal(back.predict_proba(probe), model.predict_proba(probe))
        assert [m.ordinal for m in back.selected] == [m.ordinal for m in model.selected]
        assert back.config == model.config

    def test_byte_stable(self, blobs, tmp_path):
        a = save_model(fit(blobs, EnsembleConfig(n_models=20, seed=5)), tmp_path / "a.json")
        b = save_model(fit(blobs, EnsembleConfig(n_models=20, seed=5), workers=4), tmp_path / "b.json")
        assert a.read_bytes() == b.read_bytes()
        doc = json.loads(a.read_text())
        assert (doc["format"], doc["version"]) == ("oexnrule-model", 1)
        assert len(doc["models"]) == 5

    def test_wrong_data(self, blobs, tmp_path):
        path = save_model(fit(blobs, EnsembleConfig(n_models=8, seed=5)), tmp_path / "m.json")
        with pytest.raises(ModelFormatError, match="digest"):
            load_model(path, make_blobs(seed=99))

    def test_bad_header(self, blobs, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"format": "something-else", "version": 1}))
        with pytest.raises(ModelFormatError, match="format"):
            load_model(path, blobs)
        path.write_text("not json")
        with pytest.raises(ModelFormatError):
            load_model(path, blobs)
