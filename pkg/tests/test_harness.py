import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scalarlab import (Bump, ConfigurationError, ExperimentConfig, FitError, GeometryError, Grid,
                       SolutionField, SolveConfig, burgers, contraction_audit, fit_rate,
                       run_decay_experiment)
from scalarlab.harness import geometric_times, interior_window, is_nonincreasing, max_principle_audit
from scalarlab.initial import Constant

from scenes import FLAGSHIP_DOMAIN, flagship_config, flagship_report, flagship_wave


# --- rate fitting -------------------------------------------------------------------

@pytest.mark.parametrize("values, rate", [
    ([1.0, 0.5 ** 0.5, 0.5], 0.5),
    ([0.3, 0.3, 0.3], 0.0),
    ([1.0, 2 ** -0.25, 2 ** -0.5], 0.25),
])
def test_fit_rate_examples(values, rate):
    assert fit_rate([1.0, 2.0, 4.0], values) == pytest.approx(rate, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(rate=st.floats(-2, 2), c=st.floats(1e-3, 1e3), t0=st.floats(0.1, 10))
def test_fit_rate_recovers_power_laws(rate, c, t0):
    t = t0 * 2.0 ** np.arange(5)
    assert fit_rate(t, c * t ** -rate) == pytest.approx(rate, abs=1e-9)


@pytest.mark.parametrize("times, values", [
    ([1.0, 2.0], [1.0, 0.5]),
    ([1.0, 2.0, 4.0], [1.0, 0.0, 0.5]),
    ([1.0, 2.0, 4.0], [1.0, -0.1, 0.5]),
    ([1.0, 1.0, 4.0], [1.0, 0.5, 0.2]),
    ([0.0, 1.0, 4.0], [1.0, 0.5, 0.2]),
])
def test_fit_rate_errors(times, values):
    with pytest.raises(FitError):
        fit_rate(times, values)


def test_geometric_times():
    assert geometric_times(1, 16) == [1, 2, 4, 8, 16]
    assert geometric_times(0.5, 3, 3) == [0.5, 1.5]
    with pytest.raises(ConfigurationError):
        geometric_times(0, 1)


# --- audits ---------------------------------------------------------------------------

def _traj(values_list, grid=None):
    grid = grid or Grid.uniform(4, 0, 1)
    return [SolutionField(grid, np.asarray(v, dtype=float), float(t)) for t, v in enumerate(values_list)]


def test_contraction_audit_examples():
    a = _traj([[1, 1, 1, 1], [1, 1, 0, 0]])
    b = _traj([[0, 0, 0, 0], [1, 1, 1, 1]])
    assert contraction_audit(a, b) == pytest.approx([1.0, 0.5])
    assert contraction_audit(a, a) == [0.0, 0.0]


def test_contraction_audit_mismatch_errors():
    a = _traj([[1, 1, 1, 1]])
    with pytest.raises(ConfigurationError):
        contraction_audit(a, _traj([[1, 1, 1, 1], [0, 0, 0, 0]]))
    with pytest.raises(ConfigurationError):
        contraction_audit(a, _traj([[1] * 8], Grid.uniform(8, 0, 1)))
    shifted = [SolutionField(a[0].grid, a[0].values, 0.5)]
    with pytest.raises(ConfigurationError):
        contraction_audit(a, shifted)


def test_nonincreasing_tolerance():
    assert is_nonincreasing([1.0, 1.0, 0.5])
    assert not is_nonincreasing([1.0, 1.1])
    assert is_nonincreasing([1.0, 1.0 + 1e-13])
    assert not is_nonincreasing([0.025, 0.025 + 2e-12])
    assert is_nonincreasing([0.025, 0.025 + 2e-12], scale=16.0)
    assert is_nonincreasing([0.3])


def test_max_principle_audit():
    assert max_principle_audit(_traj([[0, 1, 0, 0], [0, 0.5, 0.5, 0]]))
    assert not max_principle_audit(_traj([[0, 1, 0, 0], [0, 1.01, 0, 0]]))


def test_interior_window_is_directional():
    cfg = SolveConfig(burgers(1, (0, 1)), Grid.uniform(64, -8, 24), Constant(0.0), 1.0)
    # speeds lie in [0, 1]: only the inflow side moves
    assert interior_window(cfg, 4.0) == [(-4.0, 24.0)]
    cfg2 = SolveConfig(burgers(1, (-1, 1)), Grid.uniform(64, -8, 24), Constant(0.0), 1.0)
    assert interior_window(cfg2, 4.0) == [(-4.0, 20.0)]
    periodic = SolveConfig(burgers(1, (-1, 1)), Grid.uniform(64, 0, 1, "periodic"), Constant(0.0), 1.0)
    assert interior_window(periodic, 4.0) == [(0.0, 1.0)]


# --- configuration --------------------------------------------------------------------

def _small_config(**kw):
    base = dict(solve=SolveConfig(burgers(1, (0, 1)), Grid.uniform(256, -4, 12), Constant(0.0), 1.0),
                bump=Bump(0.1, 1.0, 0.5), times=[1.0, 2.0, 4.0], wave=flagship_wave())
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.mark.parametrize("kw", [
    dict(bump=Bump(0.1, 1.0, -3.8)),          # support crosses the boundary
    dict(bump=Bump(0.1, 0.05, 0.5)),          # under-resolved
    dict(times=[2.0, 1.0, 4.0]),
    dict(times=[0.0, 1.0, 2.0]),
    dict(base=0.5),                           # both wave and base
    dict(wave=None),                          # neither
    dict(fit_window=(4.0, 1.0)),
    dict(rate_tolerance=-0.1),
])
def test_config_validation(kw):
    with pytest.raises(ConfigurationError):
        _small_config(**kw)


def test_config_defaults():
    cfg = _small_config()
    assert cfg.fit_window == (1.0, 4.0)
    assert cfg.exponents.gamma == pytest.approx(0.099 / 0.699)
    assert cfg.solve.snapshot_times == [0.0, 1.0, 2.0, 4.0]
    assert cfg.solve.end_time == 4.0
    assert cfg.gamma_bar == 1.0
    assert _small_config(wave=None, base=0.5).gamma_bar == 0.0


def test_zero_perturbation_reports_infinite_rate():
    rep = run_decay_experiment(_small_config(bump=Bump(0.0, 1.0, 0.5)))
    assert rep.linf_diff == [0.0, 0.0, 0.0]
    assert math.isinf(rep.fitted_rate) and rep.passed and rep.all_passed
    assert rep.envelope_constant == 0.0
    assert rep.to_dict()["fitted_rate"] == "inf"


def test_empty_window_raises():
    with pytest.raises(GeometryError):
        run_decay_experiment(_small_config(times=[1.0, 8.0, 20.0]))


def test_report_dictionary_keys():
    rep = run_decay_experiment(_small_config())
    d = rep.to_dict()
    for key in ("times", "linf_diff", "l1_diff", "fitted_rate", "gamma_bound", "envelope_constant", "pass"):
        assert key in d
    assert d["pass"] == rep.passed


# --- flagship invariants ---------------------------------------------------------------

@pytest.fixture(scope="module", params=[False, True], ids=["rarefaction", "flat"])
def flagship_pair(request):
    return flagship_report(8192, request.param), flagship_report(16384, request.param)


def test_flagship_rate_beats_bound(flagship_pair):
    for rep in flagship_pair:
        assert rep.fitted_rate >= rep.gamma_bound - 0.05
        assert rep.gamma_bound == pytest.approx(0.099 / 0.699)


def test_flagship_mesh_stability(flagship_pair):
    coarse, fine = flagship_pair
    assert abs(coarse.fitted_rate - fine.fitted_rate) <= 0.05


def test_flagship_envelope_dominates(flagship_pair):
    for rep in flagship_pair:
        assert all(v <= e * (1 + 1e-12) for v, e in zip(rep.linf_diff, rep.bound_envelope))


def test_flagship_l1_contraction_and_bounds(flagship_pair):
    for rep in flagship_pair:
        assert rep.contraction_ok and rep.max_principle_ok
        assert all(v <= rep.l1_initial * (1 + 1e-9) for v in rep.l1_diff)
        assert all(v <= 2 * rep.Lambda for v in rep.linf_diff)
        assert rep.all_passed


def test_flagship_frozen_rates():
    assert flagship_report(8192).fitted_rate == pytest.approx(0.7842624694892707, rel=1e-9)
    assert flagship_report(8192, True).fitted_rate == pytest.approx(0.28539887505581113, rel=1e-9)


def test_flagship_reference_error_shrinks_with_mesh():
    coarse, fine = flagship_report(8192), flagship_report(16384)
    assert max(fine.reference_error) < max(coarse.reference_error)


def test_flagship_config_round_trips_to_dict():
    d = flagship_config(8192).to_dict()
    assert d["solve"]["grid"]["lo"] == [FLAGSHIP_DOMAIN[0]]
    assert d["times"] == [1.0, 2.0, 4.0, 8.0, 16.0]
