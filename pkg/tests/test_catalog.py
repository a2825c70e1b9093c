import pytest

from nkcp3.catalog import EXAMPLES, example_names, verify_example


def test_names():
    assert example_names() == ["rp3", "berger", "s1s2", "chiang", "exotic"]


@pytest.mark.parametrize("name", ["rp3", "berger", "s1s2", "chiang", "exotic"])
def test_example_checks_pass(name):
    checks = verify_example(name)
    failed = [c["name"] for c in checks if not c["pass"]]
    assert not failed
    names = {c["name"] for c in checks}
    assert {"cross_route_theta", "cross_route_cubic_norm2", "orbit_theta"} <= names


def test_unknown_example():
    with pytest.raises(KeyError):
        verify_example("torus")


def test_base_points_in_chart():
    for ex in EXAMPLES.values():
        assert ex.chart_point.shape == (3,)
