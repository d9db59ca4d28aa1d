from reasonpath import trace_model as tm
from reasonpath.synth import SynthConfig, generate, planted, positive_rate


def test_perfect_convergence_gives_unanimous_positives():
    cfg = SynthConfig(n_bugs=40, convergence=1.0, noise=0.0, seed=1)
    ds = generate(cfg)
    for b, is_planted in zip(ds.bugs, planted(cfg)):
        if is_planted:
            assert tm.confidence(tm.vote_scores(b)) == 1
            assert tm.label(b)


def test_generation_is_deterministic():
    cfg = SynthConfig(n_bugs=30, seed=7)
    assert tm.serialize(generate(cfg)) == tm.serialize(generate(cfg))
    assert tm.serialize(generate(cfg)) != tm.serialize(generate(SynthConfig(n_bugs=30, seed=8)))


def test_round_trip_through_ingest(tmp_path):
    ds = generate(SynthConfig(n_bugs=50, seed=2))
    tm.write(ds, tmp_path / "s.json")
    assert tm.ingest(tmp_path / "s.json") == ds


def test_positive_rate_tracks_survival():
    cfg = SynthConfig(n_bugs=400, seed=3)
    ds = generate(cfg)
    flags = planted(cfg)
    labels = tm.labels(ds.bugs)
    survival = sum(y for y, p in zip(labels, flags) if p) / sum(flags)
    assert abs(positive_rate(ds) - cfg.positive_fraction * survival) <= 0.05


def test_planted_signal_shows_in_late_steps():
    cfg = SynthConfig(n_bugs=60, seed=4, noise=0.0)
    ds = generate(cfg)
    for b, p in zip(ds.bugs, planted(cfg)):
        late = [s for r in b.runs for s in r.steps[len(r.steps) // 2:]]
        share = sum(s.argument == b.ground_truth for s in late) / len(late)
        assert share > 0.5 if p else share < 0.5
