"""Unit tests for run configuration parsing."""
import pytest

from soliton_lab.cli import commands
from soliton_lab.cli.run_config import RunConfig, build_parser, dump_config, parse_config
from soliton_lab.errors import ConfigurationError


def _write(tmp_path, text, name="run.conf"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_without_a_file():
    config = parse_config()

    assert config.n == 2
    assert config.scheme == "explicit"
    assert config.epsilon == 0.05


def test_reads_key_value_lines(tmp_path):
    path = _write(tmp_path, "# wing run\nn = 3\nepsilon = 0.05\nr_wing = 5\n\nsymbolic = true\n")

    config = parse_config(path)

    assert config.n == 3
    assert config.r_wing == 5.0
    assert config.symbolic is True


def test_overrides_win_over_the_file(tmp_path):
    path = _write(tmp_path, "n = 3\nh = 0.2\n")

    config = parse_config(path, {"h": "0.1", "T": None})

    assert config.n == 3
    assert config.h == 0.1
    assert config.T == RunConfig().T


def test_dimension_one_is_named(tmp_path):
    with pytest.raises(ConfigurationError) as info:
        parse_config(_write(tmp_path, "n = 1\n"))

    assert info.value.violations == ["n: n must be ≥ 2"]
    assert info.value.exit_code == 2


def test_every_violation_is_reported(tmp_path):
    path = _write(tmp_path, "n = 1\ncfl = 0.5\nfoo = 1\norder = 4\n")

    with pytest.raises(ConfigurationError) as info:
        parse_config(path)

    keys = sorted(v.split(":")[0] for v in info.value.violations)
    assert keys == ["cfl", "foo", "n", "order"]


def test_implicit_scheme_needs_dt(tmp_path):
    with pytest.raises(ConfigurationError) as info:
        parse_config(_write(tmp_path, "scheme = implicit\n"))

    assert "dt is required" in str(info.value)
    assert parse_config(_write(tmp_path, "scheme = implicit\ndt = 0.01\n", "ok.conf")).scheme_config().dt == 0.01


def test_missing_file():
    with pytest.raises(ConfigurationError):
        parse_config("/nonexistent/run.conf")


def test_dump_round_trip(tmp_path):
    config = parse_config(overrides={"epsilon": "0.05", "r_wing": "5", "n": "3", "symbolic": "true"})

    path = _write(tmp_path, dump_config(config))

    assert parse_config(path) == config


def test_dump_round_trip_keeps_awkward_floats(tmp_path):
    config = RunConfig(h=0.1 + 0.2, tau=1e-7, dt=1.0 / 3.0)

    assert parse_config(_write(tmp_path, dump_config(config))) == config


def test_parser_has_a_flag_per_field():
    parser = build_parser(commands)

    args = parser.parse_args(["series", "--n", "4", "--order", "11"])

    assert args.subcommand == "series"
    assert args.n == "4" and args.order == "11"
    assert args.epsilon is None
    with pytest.raises(SystemExit):
        parser.parse_args(["unknown"])
