import math

import pytest

import minklab


def test_corpus_and_dimension():
    assert "gasket-central" in minklab.corpus_names()
    assert abs(minklab.similarity_dimension([0.5, 0.5, 0.5]) - math.log2(3)) < 1e-12


def test_square_slab_is_measurable_with_content_two():
    v = minklab.decide("square-r3")
    assert v["schema"] == "minklab.verdict/1"
    assert v["status"] == "measurable"
    assert v["content_exact"] == "2"


def test_gasket_central_is_not_measurable():
    v = minklab.decide("gasket-central")
    assert v["status"] == "not-measurable"
    assert v["oscillation"]["amplitude"] > 0


def test_parallel_volume_saturates_at_gamma():
    eps, values, err = minklab.parallel_volume("gasket-hull", [0.05, 0.5], n=50_000)
    assert eps == sorted(eps)
    hole = math.sqrt(3) / 16
    assert abs(values[1] - hole) <= 3 * err[1] + 1e-3


def test_p_forms_agree():
    e = [0.1, 0.2, 0.27]
    closed = minklab.p("gasket-central", e)
    series = minklab.p("gasket-central", e, form="series")
    for a, b in zip(closed, series):
        assert abs(a - b) <= 1e-9 * abs(a)


def test_fit_monophase():
    eps = [i / 100 for i in range(1, 101)] + [1.5]
    values = [2 * e * e for e in eps[:-1]] + [2.0]
    block = minklab.fit(eps, values, [0.0] * len(eps), 2, 1.5, 1.0)
    assert len(block["breakpoints"]) == 1


def test_render_and_errors():
    assert minklab.render_svg("gasket-hull", 1).startswith("<svg")
    with pytest.raises(minklab.ValidationError):
        minklab.decide("no-such-scene")
    with pytest.raises(minklab.ConditionFailure):
        minklab.decide("gasket-disk")
