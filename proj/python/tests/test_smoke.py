import json
import math
import os
import random

import pytest

import lobfacts as lf


@pytest.fixture(scope="module")
def session():
    return lf.generate_session(seed=3, duration_seconds=1800, spread_closing_intensity_multiplier=10)


def test_extract_matches_truth(session):
    ex = lf.extract_session(session.data)
    assert ex.flow == session.truth_flow
    assert ex.report.match_rate == 1.0
    snaps = session.data.snapshots
    out = lf.replay_and_verify(snaps[0], ex.flow, snaps)
    assert out.match_fraction == 1.0
    assert out.checked == len(snaps) - 1
    assert sum(ex.scenario_counts.values()) == len(snaps) - 1


def test_book_helpers():
    b = lf.BookSnapshot(0, [lf.Level(17000, 10)], [lf.Level(17001, 5)])
    assert lf.mid_price(b, 0.01) == pytest.approx(170.005)
    assert lf.spread_ticks(b) == 1
    e = lf.FlowEvent()
    e.kind, e.side, e.price, e.size = lf.EventKind.Cancel, lf.Side.Bid, 17000, 10
    after = lf.apply_event(b, e)
    assert after.bids == []
    crossed = lf.BookSnapshot(0, [lf.Level(17002, 1)], [lf.Level(17001, 1)])
    with pytest.raises(lf.Error):
        lf.spread_ticks(crossed)


def test_fits_recover_parameters():
    rng = random.Random(1)
    w = [0.8 * rng.weibullvariate(1.0, 0.6) for _ in range(100_000)]
    fit = lf.fit_weibull_mle(w)
    assert fit.k == pytest.approx(0.6, rel=0.03)
    assert fit.lam == pytest.approx(0.8, rel=0.03)
    g = [rng.gammavariate(2.5, 3.0) for _ in range(100_000)]
    assert lf.fit_gamma_mle(g).shape == pytest.approx(2.5, rel=0.03)
    x = list(range(1, 51))
    pl = lf.fit_powerlaw_loglog(x, [3.0 * k**-0.7 for k in x])
    assert pl.alpha == pytest.approx(0.7, abs=1e-9)
    with pytest.raises(lf.Error):
        lf.fit_gamma_mle([1.0, 1.0, 1.0])


def test_acf_and_bounce():
    p = lf.generate_bounce_trades(seed=2, n_trades=50_000, flip_probability=1.0)
    r = [math.log(b) - math.log(a) for a, b in zip(p, p[1:])]
    res = lf.acf(r, 5)
    assert res.rho[0] == pytest.approx(-0.5, abs=0.05)
    assert res.conf_band == pytest.approx(1.96 / math.sqrt(len(r)))


def test_excitation_and_market_ratio(session):
    flow = session.truth_flow
    exc = lf.excitation(flow)
    assert exc["labels"] == ["Ca", "Cb", "La", "Lb", "Ma", "Mb"]
    for row in exc["transition"]:
        if row[0] is not None:
            assert sum(row) == pytest.approx(1.0)
    assert exc["excitation"][4][4] is None
    ratio = lf.market_ratio(flow)
    assert ratio == pytest.approx(session.stats.markets / (session.stats.markets + session.stats.cancels))


def test_report_is_schema_valid(session):
    jsonschema = pytest.importorskip("jsonschema")
    with open(os.environ["LOBFACTS_SCHEMA"]) as f:
        schema = json.load(f)
    report = lf.build_report(session.data, session.truth_flow)
    jsonschema.validate(report, schema)
    assert report["checks"] == {}
    ranges = {"mean_spread_ticks": [1.0, 1.0000001], "nope": [0, 1]}
    checked = lf.build_report(session.data, session.truth_flow, ranges=ranges, metrics=["spread"])
    jsonschema.validate(checked, schema)
    assert set(checked["metrics"]) == {"spread", "scalars"}
    assert checked["checks"]["nope"]["pass"] is False
    assert checked["checks"]["nope"]["value"] is None


def test_bad_config_raises():
    with pytest.raises(lf.ConfigError):
        lf.generate_session(intensities={"limit": -1})
