import pytest

from jjwafer.geometry import DEFAULT_BOTTOM_THICKNESS_UM, JunctionGeometry


def test_plate_area_is_width_product():
    g = JunctionGeometry(w_top=5.0, w_bot=5.0, h=0.12)
    assert g.top_area() == 25.0
    assert JunctionGeometry(0.35, 5.0).top_area() == pytest.approx(1.75)


def test_sidewall_area_covers_both_edges():
    g = JunctionGeometry(w_top=5.0, w_bot=40.0, h=0.12)
    # two strips of h by w_top; independent of w_bot
    assert g.sidewall_area() == pytest.approx(2.0 * 0.12 * 5.0)
    assert JunctionGeometry(5.0, 5.0, h=0.3).sidewall_area() == pytest.approx(3.0)


def test_default_bottom_thickness():
    assert DEFAULT_BOTTOM_THICKNESS_UM == 0.12
    assert JunctionGeometry(1.0, 1.0).h == 0.12


@pytest.mark.parametrize("kwargs", [
    dict(w_top=0.0, w_bot=5.0),
    dict(w_top=5.0, w_bot=-1.0),
    dict(w_top=5.0, w_bot=5.0, h=0.0),
])
def test_nonpositive_dimensions_rejected(kwargs):
    with pytest.raises(ValueError):
        JunctionGeometry(**kwargs)
