import datetime as dt
import math

import pytest
from hypothesis import given, settings, strategies as st

from bdos.econ import (
    HASHES_PER_DIFFICULTY,
    S9_SE,
    S17_PRO,
    TH,
    CostModel,
    HardwareSpec,
    MarketRecord,
    NoRigAvailable,
    RigUnavailable,
    attack_daily_cost,
    attack_threshold,
    best_rig,
    majority_attack_cost,
    profitability,
    profitability_series,
    read_hardware_csv,
    read_market_csv,
    threshold_series,
)
from bdos.markov import AnalysisContext, stop_bound_Q

from oracles import profitability_by_hand

DAY = dt.date(2020, 3, 1)
TOY_RIG = HardwareSpec("toy", 1e6, 1000.0)
CHEAP = CostModel(0.04, 1.15)


def toy_record(reward=1.0, price=1.0, difficulty=3.6e9 / HASHES_PER_DIFFICULTY, date=DAY):
    return MarketRecord(date, difficulty, price, reward)


def test_toy_profitability():
    w = profitability(toy_record(), TOY_RIG, CHEAP)
    expected = profitability_by_hand(3_600_000_000, 10**6, 1000, 0.04, 1.15, 1.0)
    assert w == pytest.approx(float(expected), rel=1e-12)
    assert w == pytest.approx(21.739, abs=5e-4)


def test_halving_and_electricity_halve_omega():
    base = profitability(toy_record(), TOY_RIG, CHEAP)
    assert profitability(toy_record(reward=0.5), TOY_RIG, CHEAP) == pytest.approx(base / 2, rel=1e-12)
    assert profitability(toy_record(), TOY_RIG, CostModel(0.08, 1.15)) == pytest.approx(base / 2, rel=1e-12)


pos = st.floats(0.1, 10.0)


@settings(max_examples=200)
@given(pos, pos, pos, pos, st.floats(1.01, 3.0))
def test_profitability_monotone(difficulty, price, reward, electricity, bump):
    rec = MarketRecord(DAY, difficulty * 1e12, price * 1e4, reward)
    w = profitability(rec, S17_PRO, CostModel(electricity / 100))
    assert profitability(MarketRecord(DAY, rec.difficulty, rec.coin_price * bump, reward), S17_PRO,
                         CostModel(electricity / 100)) > w
    assert profitability(MarketRecord(DAY, rec.difficulty, rec.coin_price, reward * bump), S17_PRO,
                         CostModel(electricity / 100)) > w
    assert profitability(MarketRecord(DAY, rec.difficulty * bump, rec.coin_price, reward), S17_PRO,
                         CostModel(electricity / 100)) < w
    assert profitability(rec, S17_PRO, CostModel(electricity * bump / 100)) < w


def test_rig_availability():
    late = HardwareSpec("late", 2e6, 1000.0, available_from=dt.date(2021, 1, 1))
    with pytest.raises(RigUnavailable):
        profitability(toy_record(), late, CHEAP)
    rig, _ = best_rig(toy_record(), [TOY_RIG, late], CHEAP)
    assert rig is TOY_RIG
    rig, _ = best_rig(toy_record(date=dt.date(2021, 6, 1)), [TOY_RIG, late], CHEAP)
    assert rig is late
    with pytest.raises(NoRigAvailable):
        best_rig(toy_record(), [late], CHEAP)


def test_market_validation():
    with pytest.raises(ValueError):
        MarketRecord(DAY, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        CostModel(0.04, 0.9)


def test_threshold_anchor():
    a = attack_threshold(1.47, 0.5, 0.2)
    assert 0.20 <= a <= 0.22
    # the threshold is exactly where the largest miner becomes indifferent
    ctx = AnalysisContext.make(a, 0.5, 0.2 * (1 - a), omega_b=1.47)
    assert stop_bound_Q(ctx) == pytest.approx(1.47, abs=1e-4)


def test_threshold_with_altruists():
    assert attack_threshold(1.47, 0.5, 0.2, eta=0.2) < 0.10


def test_threshold_edges():
    assert attack_threshold(1.0 + 1e-9, 0.5, 0.2) == 0.0
    assert attack_threshold(1e12, 0.5, 0.2) is None
    with pytest.raises(ValueError):
        attack_threshold(1.47, 0.5, 0.2, eta=1.0)


@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0])
def test_threshold_monotone(gamma):
    omegas = [1.1, 1.3, 1.47, 1.7, 2.0]
    etas = [0.0, 0.1, 0.2, 0.3, 0.5]
    for w in omegas:
        by_eta = [attack_threshold(w, gamma, 0.2, e) for e in etas]
        assert all(x >= y for x, y in zip(by_eta, by_eta[1:]))
    by_omega = [attack_threshold(w, gamma, 0.2) for w in omegas]
    assert all(x <= y for x, y in zip(by_omega, by_omega[1:]))


def flat_series(omega, reward=12.5, n=4):
    """Constant market whose S17 Pro profitability is ``omega``."""
    price = 6000.0
    hashes = reward * price * S17_PRO.hashrate * 3.6e6 / (omega * S17_PRO.power * 0.04 * 1.15)
    diff = hashes / HASHES_PER_DIFFICULTY
    return [MarketRecord(DAY + dt.timedelta(days=k), diff, price, reward) for k in range(n)]


def test_flat_series():
    recs = flat_series(1.47)
    assert [w for _, w, _ in profitability_series(recs, [S17_PRO, S9_SE], CHEAP)] == pytest.approx([1.47] * 4)
    rows = threshold_series(recs, [S17_PRO, S9_SE], CHEAP, 0.5, 0.2, [0.0, 0.2])
    assert len(rows) == 8
    for date, eta, a in rows:
        if eta == 0.0:
            assert a == pytest.approx(0.21, abs=0.01)
            assert a == rows[0][2]


def test_halving_lowers_every_threshold():
    before = flat_series(3.0)
    after = [MarketRecord(r.date, r.difficulty, r.coin_price, r.block_reward / 2) for r in before]
    t0 = threshold_series(before, [S17_PRO], CHEAP, 0.5, 0.2, [0.0, 0.2])
    t1 = threshold_series(after, [S17_PRO], CHEAP, 0.5, 0.2, [0.0, 0.2])
    assert all(b[2] < a[2] for a, b in zip(t0, t1))


def test_series_needs_input():
    with pytest.raises(ValueError):
        threshold_series([], [S17_PRO], CHEAP, 0.5, 0.2, [0.0])


def test_daily_cost():
    rec = MarketRecord(DAY, 1.6e13, 6000.0, 12.5, network_hashrate=120e6 * TH)
    assert attack_daily_cost(rec, S17_PRO, CHEAP, 0.2, 0.0) == 0.0
    assert attack_daily_cost(rec, S17_PRO, CHEAP, 0.0, 0.3) == 0.0
    full = 120e6 * 0.25 / 50 * CHEAP.daily_cost(1.975)
    # with everyone still mining the attacker pays only outside state 1
    assert attack_daily_cost(rec, S17_PRO, CHEAP, 0.2, 1.0) == pytest.approx(full * (1 - 0.2 / 1.16))
    assert attack_daily_cost(rec, S17_PRO, CHEAP, 0.2, 0.2) < attack_daily_cost(rec, S17_PRO, CHEAP, 0.2, 0.4)


def test_implied_hashrate():
    rec = MarketRecord(DAY, 1.0e13, 6000.0, 12.5)
    assert rec.implied_hashrate() == pytest.approx(1.0e13 * 2**32 / 600)


def test_majority_cost_rows():
    units, capex, opex = majority_attack_cost(120e6 * TH, S17_PRO, CHEAP)
    assert units == 2_400_000 and capex == pytest.approx(5.1072e9)
    assert opex == pytest.approx(5.233e6, rel=0.01)
    units, capex, opex = majority_attack_cost(120e6 * TH, S9_SE, CHEAP)
    assert units == 7_500_000 and capex == pytest.approx(2.625e9)
    assert opex == pytest.approx(10.6e6, rel=0.01)


def test_majority_cost_one_rig():
    units, capex, opex = majority_attack_cost(S17_PRO.hashrate, S17_PRO, CHEAP)
    assert (units, capex) == (1, 2128)
    assert opex == pytest.approx(1.975 * 24 * 0.04 * 1.15)
    assert majority_attack_cost(S17_PRO.hashrate * 1.0001, S17_PRO, CHEAP)[0] == 2


def test_csv_readers(tmp_path):
    market = tmp_path / "market.csv"
    market.write_text(
        "date,difficulty,coin_price,block_reward,network_hashrate\n"
        "2020-03-02,1.6e13,6000,12.5,\n"
        "2020-03-01,1.5e13,6100,12.5,1.1e20\n",
        encoding="utf-8",
    )
    recs = read_market_csv(market)
    assert [r.date.day for r in recs] == [1, 2]
    assert recs[0].network_hashrate == 1.1e20 and recs[1].network_hashrate is None
    hw = tmp_path / "hardware.csv"
    hw.write_text(
        "name,hashrate_ths,power_kw,unit_price,available_from\n"
        "S17 Pro,50,1.975,2128,2019-04-01\n",
        encoding="utf-8",
    )
    (rig,) = read_hardware_csv(hw)
    assert rig.hashrate == S17_PRO.hashrate and rig.power == pytest.approx(1975)
    assert rig.available_from == dt.date(2019, 4, 1)
    assert math.isclose(profitability(recs[0], rig, CHEAP), profitability(recs[0], S17_PRO, CHEAP))
