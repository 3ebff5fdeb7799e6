"""Test the annual loop on the reference calibration and on a stationary economy."""

import logging
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from sewsim.calibration_utils.calibration_builder import parse_calibration
from sewsim.calibration_utils.scenario import load_scenario, scenario_from_dict
from sewsim.errors import FingerprintMismatchError, RangeError, SchemaError, ZeroTargetError
from sewsim.model.engine import Trajectory, compare, indexed_frame, initial_state, run_scenario, simulate, step_year
from sewsim.model.environment import PRESSURES
from sewsim.reference import REFERENCE_CALIBRATION, REFERENCE_SCENARIOS, SCENARIO_NAMES

dir_path = Path(__file__).parent.absolute()

REL = 2e-3
FLOWS = ["gdp", "consumption", "employed", "unemployed", "income_tax", "benefits", "lowest_decile_disposable_income"]


@pytest.fixture(scope="module")
def calibration():
    """The reference calibration."""
    return parse_calibration(REFERENCE_CALIBRATION)


@pytest.fixture(scope="module")
def trajectories(calibration):
    """The five reference scenarios over 2020-2070."""
    return {
        name: run_scenario(load_scenario(REFERENCE_SCENARIOS / f"{name}.json"), calibration) for name in SCENARIO_NAMES
    }


@pytest.fixture(scope="module")
def frames(trajectories):
    """One value table per scenario."""
    return {name: trajectory.frame() for name, trajectory in trajectories.items()}


def test_horizon(frames):
    """Test every year of the horizon is recorded."""
    for frame in frames.values():
        assert list(frame.index) == list(range(2020, 2071))
        assert not frame.isna().any().any()


def test_base_year(frames):
    """Test the base-year aggregates."""
    base = frames["bau"].loc[2020]
    assert base["gdp"] == pytest.approx(1192.5e9, rel=REL)
    assert base["consumption"] == pytest.approx(620e9)
    assert base["isew_bce"] == pytest.approx(907.98e9, rel=REL)
    assert base["isew_bcpa"] == pytest.approx(863.77e9, rel=REL)
    assert base["gdp_per_capita"] == pytest.approx(25105.3, rel=REL)
    assert base["isew_bce_per_capita"] == pytest.approx(19115.3, rel=REL)
    assert base["isew_bcpa_per_capita"] == pytest.approx(18184.7, rel=REL)
    assert base["atkinson_index"] == pytest.approx(0.225801, rel=REL)
    assert base["unemployment_rate"] == pytest.approx(0.172492, rel=REL)
    assert base["unpaid_hours"] == pytest.approx(49.30e9, rel=REL)
    assert base["co2_footprint"] == pytest.approx(280.4e6, rel=REL)
    assert base["co2_territorial"] == pytest.approx(237.3e6, rel=REL)
    assert base["job_availability"] == pytest.approx(0.8359, rel=REL)
    assert base["income_fairness"] == pytest.approx(0.8602, rel=REL)
    assert base["income_adequacy"] == pytest.approx(0.7468, rel=REL)
    assert base["net_hourly_wage"] == pytest.approx(12.28, rel=0.01)


def test_base_year_identical_across_scenarios(frames):
    """Test no policy acts before the phase-in."""
    for name in SCENARIO_NAMES:
        pd.testing.assert_series_equal(frames[name].loc[2020], frames["bau"].loc[2020], rtol=1e-12)


def test_base_year_ledger_shares(trajectories):
    """Test the composition of the experienced welfare ledger."""
    components = trajectories["bau"].components_frame().loc[2020]
    bce_benefits = sum(
        components[f"bce:{c}"]
        for c in ("unpaid_work", "individual_consumption", "shadow_economy", "nondefensive_government_consumption")
    )
    assert components["bce:individual_consumption"] / bce_benefits == pytest.approx(0.477, abs=2e-3)
    assert components["bce:unpaid_work"] / bce_benefits == pytest.approx(0.343, abs=2e-3)
    assert components["bce:nondefensive_government_consumption"] / bce_benefits == pytest.approx(0.069, abs=2e-3)
    assert components["bce:inequality_losses"] / bce_benefits == pytest.approx(0.108, abs=2e-3)
    shadow_and_defensive = components["bce:shadow_economy"] + components["bce:defensive_expenditure"]
    assert shadow_and_defensive / bce_benefits == pytest.approx(0.180, abs=2e-3)
    bcpa_benefits = bce_benefits + components["bcpa:capital_stock_change"]
    assert components["bcpa:individual_consumption"] / bcpa_benefits == pytest.approx(0.398, abs=2e-3)
    # Only the shadow economy and defensive spending follow consumption, in both ledgers alike
    bcpa_linked = components["bcpa:shadow_economy"] + components["bcpa:defensive_expenditure"]
    assert bcpa_linked == pytest.approx(shadow_and_defensive, rel=1e-12)
    assert bcpa_linked / bcpa_benefits == pytest.approx(0.150, abs=2e-3)


@pytest.mark.parametrize(
    ("name", "gdp", "bce", "bcpa"),
    [
        ("bau", 40886.7, 34219.6, 30340.5),
        ("carbon_tax", 40886.7, 34219.6, 33727.5),
        ("redistribution", 40614.9, 35167.1, 31330.8),
        ("wtr", 40841.7, 34400.9, 30533.5),
        ("all_three", 40553.5, 35270.0, 34777.0),
    ],
)
def test_end_of_horizon(frames, name, gdp, bce, bcpa):
    """Test the per-capita values of 2070."""
    last = frames[name].loc[2070]
    assert last["gdp_per_capita"] == pytest.approx(gdp, rel=REL)
    assert last["isew_bce_per_capita"] == pytest.approx(bce, rel=REL)
    assert last["isew_bcpa_per_capita"] == pytest.approx(bcpa, rel=REL)


def test_labour_market(frames):
    """Test unemployment and the ageing labour force."""
    bau, wtr = frames["bau"], frames["wtr"]
    assert bau.loc[2070, "unemployment_rate"] == pytest.approx(0.0135945, rel=REL)
    assert bau.loc[2070, "job_availability"] == pytest.approx(0.996369, rel=REL)
    assert bau.loc[2070, "atkinson_index"] == pytest.approx(0.186921, rel=REL)
    share = bau["labour_force"] / bau["population"]
    assert share.loc[2020] == pytest.approx(0.504078, rel=REL)
    assert share.loc[2070] == pytest.approx(0.418559, rel=REL)
    assert wtr.loc[2070, "unemployment_rate"] == 0.0
    assert wtr.loc[2070, "job_availability"] == pytest.approx(1.0 / 0.99)
    assert frames["all_three"].loc[2070, "job_availability"] == pytest.approx(1.0 / 0.99)
    assert np.allclose(bau["employed"] + bau["unemployed"], bau["labour_force"], rtol=1e-12)


def test_bau_growth(frames):
    """Test business-as-usual growth and the flattening of the present-activities index."""
    bau = frames["bau"]
    assert (bau["gdp_per_capita"].diff().dropna() > 0).all()
    indexed = indexed_frame(bau[["gdp_per_capita", "isew_bce_per_capita", "isew_bcpa_per_capita"]])
    assert indexed.loc[2020].tolist() == [100.0, 100.0, 100.0]
    assert indexed.loc[2070, "gdp_per_capita"] == pytest.approx(162.861, rel=REL)
    assert indexed.loc[2070, "isew_bce_per_capita"] == pytest.approx(179.017, rel=REL)
    assert indexed.loc[2070, "isew_bcpa_per_capita"] == pytest.approx(166.846, rel=REL)

    ratio = (indexed["isew_bcpa_per_capita"] / indexed["isew_bce_per_capita"]).loc[2041:]
    assert (ratio.diff().dropna() < 0).all()
    curvature = bau["isew_bcpa_per_capita"].diff().diff().shift(-1).loc[2050:2069]
    assert (curvature < 0).all()


def test_accounting_identities(frames):
    """Test the expenditure identity and the stock-flow audit in every year."""
    for frame in frames.values():
        expenditure = frame["consumption"] + frame["government_consumption"] + frame["investment"] + frame["exports"] - frame["imports"]
        assert np.allclose(frame["gdp"], expenditure, rtol=1e-9)
        lending = frame[[column for column in frame.columns if column.startswith("net_lending_")]]
        assert len(lending.columns) == 5
        assert (lending.sum(axis=1).abs() <= 1e-9 * frame["gdp"]).all()
        assert (frame["net_lending_banks"].abs() <= 1e-6 * frame["gdp"]).all()
        # Stocks move by exactly the year's net lending
        tolerance = 1e-8 * frame["gdp"].loc[2021:]
        changes = {
            "households": frame["household_deposits"].diff(),
            "firms": -frame["firm_loans"].diff(),
            "government": -frame["government_debt"].diff(),
            "rest_of_world": frame["foreign_position"].diff(),
        }
        for agent, change in changes.items():
            assert ((change - frame[f"net_lending_{agent}"]).loc[2021:].abs() <= tolerance).all()


def test_carbon_tax(frames):
    """Test the carbon tax changes the present-activities index only."""
    bau, carbon = frames["bau"], frames["carbon_tax"]
    assert np.allclose(carbon["isew_bce_per_capita"], bau["isew_bce_per_capita"], rtol=1e-12)
    assert (carbon.loc[:2029, "carbon_tax_rate"] == 0.0).all()
    assert (carbon.loc[2030:, "carbon_tax_rate"] > 0.0).all()
    assert (carbon["carbon_tax_rate"] <= 200.0).all()
    assert np.allclose(carbon.loc[:2029, "isew_bcpa_per_capita"], bau.loc[:2029, "isew_bcpa_per_capita"], rtol=1e-12)
    assert (carbon.loc[2030:, "isew_bcpa_per_capita"] > bau.loc[2030:, "isew_bcpa_per_capita"]).all()
    assert (carbon.loc[2030:, "co2_territorial"] < bau.loc[2030:, "co2_territorial"]).all()
    assert np.allclose(carbon["gdp"], bau["gdp"], rtol=1e-12)
    for name in ("carbon_tax", "all_three"):
        steps = frames[name].loc[2030:, "carbon_tax_rate"].diff().dropna()
        signs = np.sign(steps[steps.abs() > 1e-9])
        assert (signs.diff().dropna() != 0).sum() <= 1


def test_redistribution(frames, trajectories):
    """Test the reform cuts the inequality losses at a small cost in consumption."""
    losses = trajectories["redistribution"].components_frame()["bce:inequality_losses"]
    assert losses.loc[2036] / losses.loc[2029] == pytest.approx(1.0 - 0.313, abs=5e-3)
    bau_losses = trajectories["bau"].components_frame()["bce:inequality_losses"]
    assert bau_losses.loc[2036] / bau_losses.loc[2029] > 0.95
    ratio = frames["redistribution"]["consumption"] / frames["bau"]["consumption"]
    assert ratio.min() >= 0.9860
    assert ratio.max() <= 1.0 + 1e-6
    assert frames["redistribution"].loc[2070, "income_adequacy"] > frames["bau"].loc[2070, "income_adequacy"]


def test_working_time_reduction(frames):
    """Test shorter hours spread employment and shift time to unpaid work."""
    bau, wtr = frames["bau"], frames["wtr"]
    assert wtr.loc[2029, "hours_factor"] == 1.0
    assert wtr.loc[2035, "hours_factor"] == pytest.approx(0.85)
    assert np.allclose(wtr.loc[:2030, "unemployment_rate"], bau.loc[:2030, "unemployment_rate"], rtol=1e-12)
    assert np.allclose(wtr.loc[:2030, "gdp"], bau.loc[:2030, "gdp"], rtol=1e-12)
    assert (wtr.loc[2031:, "unemployment_rate"] < bau.loc[2031:, "unemployment_rate"]).all()
    assert (wtr.loc[2031:2035, "unpaid_hours"] < bau.loc[2031:2035, "unpaid_hours"]).all()
    assert wtr.loc[2070, "unpaid_hours"] > bau.loc[2070, "unpaid_hours"]
    assert (wtr.loc[2035:2037, "isew_bce_per_capita"] < bau.loc[2035:2037, "isew_bce_per_capita"]).all()


def test_doughnut(frames):
    """Test the boundary status at both ends of the horizon."""
    ratios = [f"{pressure.value}_overshoot_ratio" for pressure in PRESSURES]
    base = frames["bau"].loc[2020, ratios]
    assert base.tolist() == pytest.approx([2.997, 1.598, 2.201, 0.946, 0.800], rel=REL)
    assert (base > 1.0).sum() == 3
    assert (frames["bau"].loc[2070, ratios] > 1.0).sum() == 5
    co2 = "co2_overshoot_ratio"
    assert frames["all_three"].loc[2070, co2] / frames["bau"].loc[2070, co2] == pytest.approx(0.43, abs=5e-3)
    assert frames["bau"].loc[2070, "income_adequacy"] == pytest.approx(1.151, rel=REL)


def test_comparison(trajectories):
    """Test deltas and the end-of-horizon ranking."""
    ordered = [trajectories[name] for name in SCENARIO_NAMES]
    comparison = compare(ordered)
    bau_deltas = comparison.deltas[comparison.deltas["scenario"] == "bau"]
    assert (bau_deltas["delta"] == 0.0).all()
    ranking = comparison.ranking.set_index(["variable", "scenario"])["rank"]
    assert ranking[("isew_bce_per_capita", "all_three")] == 1
    assert ranking[("isew_bcpa_per_capita", "all_three")] == 1
    for variable in ("isew_bce_per_capita", "isew_bcpa_per_capita"):
        last = {name: trajectories[name].frame().loc[2070, variable] for name in SCENARIO_NAMES}
        assert all(value >= last["bau"] * (1.0 - 1e-12) for value in last.values())
    indexed = comparison.indexed.set_index(["scenario", "year", "variable"])["value"]
    assert indexed[("wtr", 2020, "gdp_per_capita")] == 100.0


def test_comparison_errors(trajectories):
    """Test invalid comparisons are rejected."""
    bau = trajectories["bau"]
    with pytest.raises(ValueError, match="at least two"):
        compare([bau])
    with pytest.raises(FingerprintMismatchError, match="another calibration"):
        compare([bau, replace(trajectories["wtr"], fingerprint="0" * 64)])
    with pytest.raises(ValueError, match="other years"):
        compare([bau, replace(trajectories["wtr"], summaries=trajectories["wtr"].summaries[:-1])])


def test_determinism(calibration, trajectories):
    """Test identical inputs give identical trajectories."""
    scenario = load_scenario(REFERENCE_SCENARIOS / "all_three.json").with_horizon(2020, 2036)
    first = run_scenario(scenario, calibration).frame()
    second = run_scenario(scenario, calibration).frame()
    pd.testing.assert_frame_equal(first, second, check_exact=True)
    pd.testing.assert_frame_equal(first, trajectories["all_three"].frame().loc[:2036], check_exact=True)


def test_neutral_policies(calibration, frames):
    """Test policy blocks with neutral settings reproduce business as usual."""
    scenario = scenario_from_dict(
        {
            "name": "neutral",
            "horizon": {"start_year": 2020, "end_year": 2040},
            "carbon_tax": {"tau_max_eur_per_tonne": 0.0},
            "redistribution": {
                "final_low_rate": 0.19,
                "final_high_rate": 0.47,
                "benefit_multiplier_olf": 1.0,
                "benefit_multiplier_unemployed": 1.0,
            },
            "wtr": {"hours_reduction": 0.0},
        },
    )
    neutral = run_scenario(scenario, calibration).frame()
    pd.testing.assert_frame_equal(neutral, frames["bau"].loc[:2040], rtol=1e-12)


def test_trajectory_round_trip(trajectories):
    """Test the dict form of a trajectory."""
    bau = trajectories["bau"]
    restored = Trajectory.from_dict(bau.to_dict())
    assert restored.years == bau.years
    assert restored.fingerprint == bau.fingerprint
    pd.testing.assert_frame_equal(restored.frame(), bau.frame())


def test_spin_up(calibration, frames, caplog):
    """Test horizons starting after the base year are spun up from it."""
    scenario = load_scenario(REFERENCE_SCENARIOS / "bau.json").with_horizon(2025, 2040)
    with caplog.at_level(logging.WARNING):
        trajectory = run_scenario(scenario, calibration)
    assert trajectory.years == list(range(2025, 2041))
    assert "spinning up from 2020 to 2025" in caplog.text
    pd.testing.assert_frame_equal(trajectory.frame(), frames["bau"].loc[2025:2040], check_exact=True)

    early = load_scenario(REFERENCE_SCENARIOS / "bau.json").with_horizon(2010, 2040)
    with pytest.raises(RangeError, match="before the calibration base year"):
        run_scenario(early, calibration)


def test_simulate_steps(calibration):
    """Test the generator agrees with explicit steps."""
    scenario = load_scenario(REFERENCE_SCENARIOS / "carbon_tax.json").with_horizon(2020, 2035)
    states = list(simulate(scenario, calibration))
    assert [state.year for state in states] == list(range(2020, 2036))
    state = initial_state(scenario, calibration)
    for _ in range(15):
        state = step_year(state, scenario, calibration)
    assert state.year == 2035
    assert state.carbon_tax == states[-1].carbon_tax
    assert state.summary().values == states[-1].summary().values
    assert states[-1].population == pytest.approx(states[-1].summary().values["population"])


def test_stationary_economy():
    """Test a calibration without growth, ageing or interest stays put."""
    calibration = parse_calibration(dir_path / "stationary_bundle")
    scenario = load_scenario(REFERENCE_SCENARIOS / "bau.json").with_horizon(2020, 2035)
    frame = run_scenario(scenario, calibration).frame()
    for column in [*FLOWS, "population", "capital_stock", "unpaid_hours"]:
        assert frame[column].tolist() == pytest.approx([frame[column].iloc[0]] * len(frame), rel=1e-9), column


def test_errors_carry_context():
    """Test simulation errors name the scenario and the year."""
    calibration = parse_calibration(dir_path / "zero_target_bundle")
    scenario = load_scenario(REFERENCE_SCENARIOS / "carbon_tax.json").with_horizon(2020, 2045)
    with pytest.raises(ZeroTargetError) as excinfo:
        run_scenario(scenario, calibration)
    assert excinfo.value.scenario == "carbon_tax"
    assert excinfo.value.year == 2040
    assert str(excinfo.value).startswith("[scenario carbon_tax, year 2040]")

    missing = scenario_from_dict(
        {
            "name": "missing_target",
            "horizon": {"start_year": 2020, "end_year": 2040},
            "carbon_tax": {"target_series_ref": "no_such_series"},
        },
    )
    with pytest.raises(SchemaError, match="no_such_series"):
        run_scenario(missing, calibration)


def test_high_inequality_aversion(frames):
    """Test an inequality aversion above 1 runs and rejects benefits cut to zero."""
    calibration = parse_calibration(dir_path / "high_aversion_bundle")
    frame = run_scenario(load_scenario(REFERENCE_SCENARIOS / "bau.json").with_horizon(2020, 2040), calibration).frame()
    assert frame["atkinson_index"].between(frames["bau"].loc[:2040, "atkinson_index"], 1.0, inclusive="neither").all()
    assert np.isfinite(frame["isew_bce"]).all()

    cut = scenario_from_dict(
        {
            "name": "no_olf_benefits",
            "horizon": {"start_year": 2020, "end_year": 2040},
            "redistribution": {"benefit_multiplier_olf": 0.0},
        },
    )
    with pytest.raises(RangeError) as excinfo:
        run_scenario(cut, calibration)
    assert excinfo.value.field == "no_olf_benefits:redistribution.benefit_multiplier_olf"
    assert run_scenario(cut, parse_calibration(REFERENCE_CALIBRATION)).years[-1] == 2040
