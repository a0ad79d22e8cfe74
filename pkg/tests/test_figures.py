import pytest

from obsblr.figures import ELL_AXIS, FIGURES, figure


CAPTION_FIXED = {
    2: {"rho": 0.1, "ell": 100},
    3: {"w": 20, "ell": 100},
    4: {"ell": 100, "A": 0.01},
    5: {"ell": 100, "w": 15},
    6: {"A": 0.01, "w": 20},
    7: {"A": 0.01, "rho": 0.1},
    8: {"ell": 100, "A": 0.01},
    9: {"ell": 100, "rho": 0.3},
    10: {"w": 10, "ell": 100, "A": 0.01},
    11: {"N": 16, "S0": 0.5, "ell": 100, "A": 0.5},
    12: {"N": 16, "S0": 0.5, "ell": 100, "rho": 0.5},
    13: {"N": 16, "S0": 0.5, "ell": 100, "A": 0.5},
    14: {"N": 16, "S0": 0.5, "ell": 100, "rho": 0.5},
    15: {"N": 16, "S0": 0.5, "ell": 100, "A": 0.5},
}


def test_ids():
    assert sorted(FIGURES) == list(range(2, 16))
    with pytest.raises(KeyError):
        figure(1)


@pytest.mark.parametrize("fid", sorted(CAPTION_FIXED))
def test_fixed_parameters(fid):
    assert dict(figure(fid).fixed) == CAPTION_FIXED[fid]


@pytest.mark.parametrize("fid, labels", [
    (2, ["w=5", "w=10", "w=15", "w=20"]),
    (3, ["rho=0", "rho=0.3", "rho=0.6", "rho=1"]),
    (5, ["A=0.005", "A=0.01", "A=0.02"]),
    (7, ["w=10", "w=15", "w=20"]),
    (12, ["A=0.1", "A=0.3", "A=0.5"]),
    (13, ["rho=0", "rho=0.5", "rho=1"]),
])
def test_curve_families(fid, labels):
    assert figure(fid).header() == ["x"] + labels


def test_axes():
    assert len(figure(2).x) == 25
    assert figure(2).x[0] == pytest.approx(0.001) and figure(2).x[-1] == pytest.approx(0.1)
    assert len(figure(4).x) == 21
    assert ELL_AXIS == tuple(range(20, 201, 20))
    assert list(figure(8).x) == list(range(1, 31))
    assert list(figure(11).x) == list(range(1, 16))


def test_fig10_rows():
    rows = figure(10).rows()
    assert len(rows) == 21
    for x, y in rows:
        assert y == pytest.approx(x, abs=1e-12)
