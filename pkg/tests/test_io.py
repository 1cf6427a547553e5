import numpy as np
import pytest

from dse import io
from dse.core import CoeffVector, ModeSpec
from dse.distributions import gen_random_cloud, gen_sphere_uniform
from dse.errors import ConfigError, ShapeError


def test_points_round_trip_bitwise(tmp_path):
    for pts in (gen_random_cloud(7, 3, seed=1), gen_sphere_uniform(7, seed=1)):
        io.write_points(tmp_path / "p.csv", pts)
        assert io.read_points(tmp_path / "p.csv") == pts


def test_csv_conventions(tmp_path):
    io.write_points(tmp_path / "p.csv", gen_random_cloud(3, 2, seed=2))
    raw = (tmp_path / "p.csv").read_bytes()
    assert raw.startswith(b"x0,x1\n") and b"\r" not in raw
    assert raw.endswith(b"\n")


def test_field_round_trip(tmp_path, rng):
    vals = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    io.write_field(tmp_path / "f.csv", vals)
    assert (tmp_path / "f.csv").read_text().splitlines()[0] == "re0,im0,re1,im1,re2,im2"
    np.testing.assert_array_equal(io.read_field(tmp_path / "f.csv"), vals)


def test_coeffs_round_trip(tmp_path, rng):
    for spec in (ModeSpec.fourier((3, 2), 2), ModeSpec.fourier(4), ModeSpec.spherical(3)):
        c = CoeffVector(rng.normal(size=(spec.m_total, 2)) + 0j, spec)
        io.write_coeffs(tmp_path / "c.csv", c)
        back = io.read_coeffs(tmp_path / "c.csv")
        assert back.mode_spec == spec
        np.testing.assert_array_equal(back.values, c.values)
    header = (tmp_path / "c.csv").read_text().splitlines()
    assert header[0] == "flat_index,l,m,re0,im0,re1,im1"
    assert header[2].startswith("1,1,-1,")


def test_fourier_coeff_index_columns(tmp_path):
    c = CoeffVector(np.arange(6) + 0j, ModeSpec.fourier((3, 2), 2))
    io.write_coeffs(tmp_path / "c.csv", c)
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "flat_index,k0,k1,re0,im0"
    assert lines[5] == "4,1,1,4,0"


def test_bad_files(tmp_path):
    (tmp_path / "empty.csv").write_text("")
    with pytest.raises(ShapeError):
        io.read_points(tmp_path / "empty.csv")
    (tmp_path / "bad.csv").write_text("a,b\n0.1,0.2\n")
    with pytest.raises(ConfigError):
        io.read_points(tmp_path / "bad.csv")
    (tmp_path / "f.csv").write_text("re0,im1\n1,2\n")
    with pytest.raises(ConfigError):
        io.read_field(tmp_path / "f.csv")


def test_config_parser():
    cfg = io.parse_config_text("# header\nn = 16\nfreq-range=symmetric  # trailing\n\n")
    assert cfg == {"n": "16", "freq_range": "symmetric"}
    with pytest.raises(ConfigError):
        io.parse_config_text("just words\n")
    with pytest.raises(ConfigError):
        io.parse_config_text("= 3\n")
    text = io.format_config("gen", {"n": 4, "out": None, "flag": True, "off": False})
    assert text == "# dse gen\nflag = true\nn = 4\n"
