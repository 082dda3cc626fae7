import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mlgnet import MultilayerDesigner
from mlgnet.exceptions import InfeasibleError, LimitsExceededError
from mlgnet.io import serialize_instance

from conftest import FIXTURES


def test_params_round_trip():
    est = MultilayerDesigner(mode="ls", budget=30, seed=5)
    params = est.get_params()
    assert params["mode"] == "ls" and params["budget"] == 30 and params["seed"] == 5
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(mode="exact")
    assert est.mode == "exact"


def test_fit_predict_on_path_text_and_object(I1):
    by_path = MultilayerDesigner(mode="exact").fit(FIXTURES / "I1.json")
    by_text = MultilayerDesigner(mode="exact").fit(serialize_instance(I1).decode())
    by_bytes = MultilayerDesigner(mode="exact").fit(serialize_instance(I1))
    by_obj = MultilayerDesigner(mode="exact").fit(I1)
    for est in (by_path, by_text, by_bytes, by_obj):
        assert est.cost_ == 69
        assert est.installed_lsrs_ == ["n1", "n3", "n4"]
    assert by_obj.predict() == by_path.predict(I1)
    assert by_obj.score() == -69.0


def test_unfitted_and_mismatched_predict(I1, I2):
    with pytest.raises(NotFittedError):
        MultilayerDesigner().predict()
    est = MultilayerDesigner().fit(I1)
    with pytest.raises(ValueError):
        est.predict(I2)


def test_transform_and_capacity_report(I2):
    est = MultilayerDesigner()
    design = est.fit_predict(I2)
    load = est.transform()
    assert load.links["t/ab"] == 4
    assert est.capacity_report().feasible
    assert design.cost == 27
    assert b"cost: total=27" in est.report()


def test_errors_propagate(I1, I3):
    with pytest.raises(InfeasibleError):
        MultilayerDesigner().fit(I3)
    with pytest.raises(LimitsExceededError):
        MultilayerDesigner(mode="exact", max_k_paths=1).fit(I1)
    with pytest.raises(TypeError):
        MultilayerDesigner().fit(42)
