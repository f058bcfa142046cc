import json

import pytest

import igkit

BERNOULLI = json.dumps(
    {"space": {"finite": 2}, "potential": {"builtin": {"name": "bernoulli"}}}
)

LUMPED = json.dumps(
    {
        "space": {"finite": 3},
        "param_box": [[0.05, 0.95]],
        "statistical": True,
        "potential": {
            "expression": (
                "x1 * ((w1 - 2) * (w1 - 3) / 2) + ((1 - x1) / 2) * "
                "((w1 - 1) * (w1 - 2) / 2 - (w1 - 1) * (w1 - 3))"
            )
        },
        "statistic": {"classes": [[0], [1, 2]]},
    }
)


def test_bernoulli_fisher():
    m = igkit.Model.load(BERNOULLI)
    assert m.dim == 1
    assert m.statistical
    assert m.mass([0.3]) == pytest.approx(1.0)
    g = m.fisher_matrix([0.25])
    assert g[0][0] == pytest.approx(1.0 / (0.25 * 0.75), rel=1e-10)
    assert m.one_form([0.25], [1.0]) == pytest.approx(0.0, abs=1e-10)


def test_sufficiency_and_monotonicity():
    m = igkit.Model.load(LUMPED)
    assert m.sufficiency() == "sufficient"
    assert m.monotonicity_gap([0.3], [1.0]) == pytest.approx(0.0, abs=1e-7)
    loss, residual = m.information_loss([0.3], [1.0])
    assert loss == pytest.approx(0.0, abs=1e-7)
    assert residual <= 1e-7


def test_integrability_and_orlicz():
    m = igkit.Model.load(BERNOULLI)
    assert m.integrability(2) == "pass"
    assert m.orlicz_norm([0.5]) > 0.0


def test_natgrad():
    m = igkit.Model.load(BERNOULLI)
    out = m.natgrad_descend([0.2], [0.7, 0.3], eta=0.5)
    assert out["converged"]
    assert out["xs"][-1][0] == pytest.approx(0.7, abs=1e-6)


def test_errors_surface():
    with pytest.raises(igkit.IgkitError):
        igkit.Model.load(json.dumps({"space": {"finite": 2}}))
