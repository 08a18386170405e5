"""Tests for wpvol.config: packaged defaults, override files and flag precedence."""

import pytest

from wpvol.config import DEFAULTS_FILE, KEYS, load_settings
from wpvol.errors import InvalidArgumentError


@pytest.fixture
def conf(tmp_path):
    def write(text):
        path = tmp_path / "wpvol.conf"
        path.write_text(text)
        return path

    return write


class TestDefaults:
    def test_packaged_file_exists(self):
        assert DEFAULTS_FILE.exists()

    def test_values(self):
        s = load_settings()
        assert s.max_genus == 3
        assert s.precision == 30
        assert s.convention == "jt"
        assert s.format == "csv"
        assert s.seed == 7
        assert s.quad_tol == pytest.approx(1e-10)

    def test_resolved_has_every_key(self):
        resolved = load_settings().resolved()
        assert sorted(resolved) == sorted(KEYS)
        assert resolved["MC_CHAINS"] == 4


class TestOverrides:
    def test_file_overrides_defaults(self, conf):
        s = load_settings(conf("MAX_GENUS=5\nSEED=123\n# comment\n"))
        assert s.max_genus == 5
        assert s.seed == 123
        assert s.precision == 30

    def test_flags_override_file(self, conf):
        s = load_settings(conf("SEED=123\n"), seed=9, max_genus=None)
        assert s.seed == 9
        assert s.max_genus == 3

    def test_replace_ignores_none(self):
        s = load_settings()
        assert s.replace(precision=None, format="json").format == "json"
        assert s.replace(precision=None).precision == 30

    def test_environment_ignored(self, monkeypatch):
        monkeypatch.setenv("MAX_GENUS", "9")
        monkeypatch.setenv("SEED", "1")
        s = load_settings()
        assert s.max_genus == 3
        assert s.seed == 7

    def test_no_interpolation(self, conf, monkeypatch):
        monkeypatch.setenv("DIR", "/elsewhere")
        assert load_settings(conf("OUTPUT_DIR=${DIR}/out\n")).output_dir == "${DIR}/out"


class TestErrors:
    def test_unknown_key(self, conf):
        with pytest.raises(InvalidArgumentError, match="unknown config keys.*GENUS"):
            load_settings(conf("GENUS=4\n"))

    def test_bad_type(self, conf):
        with pytest.raises(InvalidArgumentError, match="expects int"):
            load_settings(conf("MAX_GENUS=three\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidArgumentError, match="not found"):
            load_settings(tmp_path / "absent.conf")

    @pytest.mark.parametrize(
        "text, message",
        [
            ("PRECISION=10\n", "PRECISION"),
            ("CONVENTION=weil\n", "CONVENTION"),
            ("FORMAT=xml\n", "FORMAT"),
            ("MC_DRAWS=0\n", "MC_DRAWS"),
            ("QUAD_TOL=2\n", "QUAD_TOL"),
            ("SEED=-1\n", "SEED"),
            ("MAX_GENUS=-1\n", "MAX_GENUS"),
        ],
    )
    def test_invalid_values(self, conf, text, message):
        with pytest.raises(InvalidArgumentError, match=message):
            load_settings(conf(text))

    def test_invalid_flag(self):
        with pytest.raises(InvalidArgumentError, match="MC_STEP_SIZE"):
            load_settings(mc_step_size=0.0)
