import math

import pytest

from specdecay.config import (
    ConfigError,
    DuplicateKey,
    InvalidValue,
    MissingKey,
    RangeViolation,
    Sigma2Range,
    UnknownKey,
    load_config,
    parse_config,
    split_norm_list,
)
from specdecay.norms import NormKind

MINIMAL = """\
equation = heat
n = 64
box_length = 64*pi
dt = 1
t_end = 300
u_profile.sigma = 0
u_profile.amplitude = 1
seed = 7
"""

MHD = """\
equation = hall_mhd
n = 16
box_length = 16*pi
dt = 0.5
t_end = 10
seed = 1
[u_profile]
sigma = 0
amplitude = 1
[b_profile]
sigma = -0.5
amplitude = 2
"""


class TestDefaults:
    def test_minimal_heat(self):
        c = parse_config(MINIMAL)
        assert c.equation == "heat" and c.scheme == "HeatOnly"
        assert c.box_length == pytest.approx(64 * math.pi)
        assert c.n_steps == 300
        assert c.sample_every == 1
        assert c.fit_window == (10.0, 300.0)
        assert c.smallness_target is None
        assert c.b_profile is None
        assert c.u_profile.xi_cut == pytest.approx(2 / 3)
        assert c.u_profile.xi_floor is None
        assert c.u_profile.seed == 7
        assert [k.label for k in c.norms] == ["L2Sq", "Xsigma(-1)", "Xsigma(0)", "Ysigma(0)"]
        assert c.expected_exponents == {}
        assert c.output_dir is None

    def test_sections_and_dotted_keys_agree(self):
        dotted = MHD.replace("[u_profile]\nsigma", "u_profile.sigma").replace(
            "amplitude = 1\n[b_profile]\nsigma", "u_profile.amplitude = 1\nb_profile.sigma").replace(
            "amplitude = 2", "b_profile.amplitude = 2")
        assert parse_config(dotted) == parse_config(MHD)

    def test_hall_mhd(self):
        c = parse_config(MHD)
        assert c.scheme == "IFRK4"
        assert c.b_profile.sigma == -0.5 and c.b_profile.seed == 2
        assert NormKind("Ysigma", (-0.5,)) in c.norms

    def test_aliases(self):
        text = MHD.replace("[u_profile]\nsigma = 0", "sigma1 = 0.5\n[u_profile]")
        text = text.replace("[b_profile]\nsigma = -0.5", "[b_profile]").replace(
            "amplitude = 2", "amplitude = 2\n") + "\n"
        text = "sigma2 = -1\n" + text
        c = parse_config(text)
        assert c.u_profile.sigma == 0.5 and c.b_profile.sigma == -1.0

    def test_optional_keys(self):
        c = parse_config(MINIMAL + """
sample_every = 5
smallness_target = 0.01
norms = L2Sq, LowFreqSup(0,1), HnegSq(0.5)
fit_window = 20, 200
expected_tolerance = 0.2
expected.u.L2Sq = -1.5
checkpoint_every = 100
output_dir = out/run1
u_profile.xi_cut = 0.5
u_profile.xi_floor = 0.0625
u_profile.seed = 99
""")
        assert c.sample_every == 5 and c.smallness_target == 0.01
        assert [k.label for k in c.norms] == ["L2Sq", "LowFreqSup(0,1)", "HnegSq(0.5)"]
        assert c.fit_window == (20.0, 200.0)
        assert c.expected_exponents == {"u.L2Sq": -1.5}
        assert c.expected_tolerance == 0.2
        assert c.checkpoint_every == 100 and c.output_dir == "out/run1"
        assert c.u_profile.xi_cut == 0.5 and c.u_profile.xi_floor == 0.0625 and c.u_profile.seed == 99

    def test_with_seed(self):
        c = parse_config(MHD).with_seed(40)
        assert (c.seed, c.u_profile.seed, c.b_profile.seed) == (40, 40, 41)

    def test_comments_and_blank_lines(self):
        c = parse_config("# header\n\n" + MINIMAL.replace("seed = 7", "seed = 7   # trailing"))
        assert c.seed == 7

    def test_pi_forms(self):
        for text, val in (("pi", math.pi), ("2pi", 2 * math.pi), ("2*pi", 2 * math.pi), ("0.5 * pi", 0.5 * math.pi)):
            c = parse_config(MINIMAL.replace("64*pi", text).replace("n = 64", "n = 8"))
            assert c.box_length == pytest.approx(val)

    def test_load_from_file(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text(MINIMAL)
        assert load_config(p) == parse_config(MINIMAL)


def line_of(exc_info):
    return exc_info.value.line


class TestErrors:
    def test_sigma2_range(self):
        with pytest.raises(Sigma2Range) as e:
            parse_config(MHD.replace("sigma = -0.5", "sigma = 0.5"))
        assert line_of(e) == 11
        assert isinstance(e.value, RangeViolation)

    def test_sigma2_alias_range(self):
        text = MHD.replace("[b_profile]\nsigma = -0.5\n", "[b_profile]\n") .replace("seed = 1", "seed = 1\nsigma2 = 0.5")
        with pytest.raises(Sigma2Range):
            parse_config(text)

    def test_duplicate_key(self):
        with pytest.raises(DuplicateKey) as e:
            parse_config(MINIMAL + "dt = 2\n")
        assert line_of(e) == 9
        assert "line 4" in str(e.value)

    def test_duplicate_via_alias(self):
        with pytest.raises(DuplicateKey):
            parse_config(MINIMAL + "sigma1 = 0\n")

    def test_unknown_key(self):
        with pytest.raises(UnknownKey) as e:
            parse_config(MINIMAL + "smalness_target = 0.1\n")
        assert line_of(e) == 9

    @pytest.mark.parametrize("key", ["equation", "n", "dt", "t_end", "seed", "u_profile.sigma"])
    def test_missing(self, key):
        text = "\n".join(l for l in MINIMAL.splitlines() if not l.startswith(key + " "))
        with pytest.raises(MissingKey):
            parse_config(text)

    @pytest.mark.parametrize("old, new, exc", [
        ("equation = heat", "equation = euler", InvalidValue),
        ("n = 64", "n = 63", RangeViolation),
        ("n = 64", "n = 4", RangeViolation),
        ("n = 64", "n = sixty", InvalidValue),
        ("dt = 1", "dt = 0", RangeViolation),
        ("dt = 1", "dt = 0.7", RangeViolation),
        ("t_end = 300", "t_end = -1", RangeViolation),
        ("box_length = 64*pi", "box_length = -3", RangeViolation),
        ("box_length = 64*pi", "box_length = nan", InvalidValue),
        ("u_profile.sigma = 0", "u_profile.sigma = 1.5", RangeViolation),
        ("u_profile.amplitude = 1", "u_profile.amplitude = -1", RangeViolation),
        ("seed = 7", "seed = -1", RangeViolation),
        ("seed = 7", "seed = 1.5", InvalidValue),
    ])
    def test_invalid_values(self, old, new, exc):
        with pytest.raises(exc):
            parse_config(MINIMAL.replace(old, new))

    @pytest.mark.parametrize("extra, exc", [
        ("u_profile.xi_cut = 0.9", RangeViolation),
        ("norms = L2Sq, Bogus", InvalidValue),
        ("norms =", InvalidValue),
        ("fit_window = 300, 10", RangeViolation),
        ("fit_window = 10", InvalidValue),
        ("smallness_target = 0", RangeViolation),
        ("sample_every = 0", RangeViolation),
        ("b_profile.sigma = 0", InvalidValue),
        ("no equals sign", InvalidValue),
        ("[]", InvalidValue),
        ("expected. = 1", UnknownKey),
    ])
    def test_invalid_extras(self, extra, exc):
        with pytest.raises(exc):
            parse_config(MINIMAL + extra + "\n")

    def test_hall_mhd_requires_b(self):
        with pytest.raises(MissingKey):
            parse_config(MINIMAL.replace("equation = heat", "equation = hall_mhd"))

    def test_error_message_carries_line(self):
        with pytest.raises(ConfigError, match="line 9"):
            parse_config(MINIMAL + "bogus = 1\n")


def test_split_norm_list():
    assert split_norm_list("L2Sq, LowFreqSup(0,1) ,Xsigma(-1),") == ["L2Sq", "LowFreqSup(0,1)", "Xsigma(-1)"]
