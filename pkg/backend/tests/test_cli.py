import time
from pathlib import Path

import pandas as pd
import pytest
from typer.testing import CliRunner

from app.cli import cli
from tests.utils.utils import fixture_path, spec_path


def game(name: str) -> str:
    return str(spec_path(name))


def read(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


@pytest.mark.parametrize("points", [11, 1])
def test_frontier(runner: CliRunner, tmp_path: Path, points: int) -> None:
    out = tmp_path / "frontier.csv"
    result = runner.invoke(
        cli, ["frontier", "--game", game("qpg"), "--points", str(points), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    frame = read(out)
    assert len(frame) == points
    assert (frame["cert_residual"] <= 1e-6).all()


def test_frontier_to_stdout(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["frontier", "--game", game("qpg"), "--points", "3"])
    assert result.exit_code == 0, result.output
    assert "# run: {" in result.output
    assert "m_1,m_2,x_1,x_2,U_1,U_2,cert_residual" in result.output


def test_game_outside_the_class_is_refused(runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(
        cli,
        [
            "realize",
            "--game",
            str(fixture_path("mixed_sign")),
            "--weights",
            "0.5,0.5",
            "--out",
            str(tmp_path / "plan.csv"),
        ],
    )
    assert result.exit_code == 2
    assert "non-unidirectional" in result.output
    assert not (tmp_path / "plan.csv").exists()


def test_validate(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["validate", "--game", game("qpg")])
    assert result.exit_code == 0, result.output
    assert '"passed": true' in result.output


def test_validate_failure(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["validate", "--game", str(fixture_path("mixed_sign"))])
    assert result.exit_code == 2
    assert '"passed": false' in result.output


def test_realize_by_weights(runner: CliRunner, tmp_path: Path) -> None:
    out = tmp_path / "plan.csv"
    result = runner.invoke(
        cli,
        ["realize", "--game", game("qpg"), "--weights", "0.667,0.333", "--theta", "0.5",
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "verdict: verified" in result.output
    assert "tangent: x_1 =" in result.output
    row = read(out).iloc[0]
    assert row["c_1"] == pytest.approx(0.625, abs=5e-3)
    assert row["c_2"] == pytest.approx(1.6875, abs=5e-3)
    assert row["verdict"] == "verified"


def test_realize_utilitarian_needs_no_shift(runner: CliRunner, tmp_path: Path) -> None:
    out = tmp_path / "plan.csv"
    result = runner.invoke(
        cli, ["realize", "--game", game("qpg"), "--criterion", "utilitarian", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    row = read(out).iloc[0]
    assert row["c_1"] == 0.0 and row["c_2"] == 0.0
    assert row["x_p_1"] == pytest.approx(1.5)


def test_realize_rejects_inefficient_point(runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(
        cli,
        ["realize", "--game", game("qpg"), "--point", "1,1", "--out", str(tmp_path / "p.csv")],
    )
    assert result.exit_code == 2
    assert "error:" in result.output


def test_realize_needs_one_target(runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(cli, ["realize", "--game", game("qpg"), "--out", str(tmp_path / "p.csv")])
    assert result.exit_code == 2


def test_malformed_vector(runner: CliRunner, tmp_path: Path) -> None:
    result = runner.invoke(
        cli,
        ["realize", "--game", game("qpg"), "--weights", "a,b", "--out", str(tmp_path / "p.csv")],
    )
    assert result.exit_code == 2
    assert "comma-separated" in result.output


@pytest.mark.parametrize(
    "args, code",
    [
        (["--profile", "1.5,1.5"], 0),
        (["--profile", "1,1"], 1),
        (["--profile", "1.25,2", "--c", "0.625,1.6875"], 0),
        (["--point", "1.25,2"], 1),
        (["--profile", "0.5,2", "--c", "0.625,1.6875"], 2),
    ],
)
def test_verify(runner: CliRunner, tmp_path: Path, args: list[str], code: int) -> None:
    out = tmp_path / "verify.csv"
    result = runner.invoke(cli, ["verify", "--game", game("qpg"), *args, "--out", str(out)])
    assert result.exit_code == code, result.output
    if code == 0:
        assert "verdict: verified" in result.output
        assert (read(out)["oracle_argmax"] - 1.0).abs().max() <= 1e-3


def test_nash(runner: CliRunner, tmp_path: Path) -> None:
    out = tmp_path / "nash.csv"
    result = runner.invoke(cli, ["nash", "--game", game("qpg"), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert list(read(out)["x"]) == pytest.approx([1.0, 1.0], abs=1e-8)
    assert out.read_text().splitlines()[-1].startswith("# summary: kind=Nash verdict=verified")


def test_mke_dominates_nash(runner: CliRunner, tmp_path: Path) -> None:
    out = tmp_path / "mke.csv"
    result = runner.invoke(cli, ["mke", "--game", game("qpg"), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "MKE strictly dominates Nash: yes" in result.output
    assert list(read(out)["x"]) == pytest.approx([1.5, 1.5], abs=1e-6)


@pytest.mark.parametrize("name", ["qpg", "qpg3", "cournot", "cournot3", "commons", "commons3"])
def test_sweep_realize(runner: CliRunner, tmp_path: Path, name: str) -> None:
    out = tmp_path / "sweep.csv"
    started = time.perf_counter()
    result = runner.invoke(
        cli, ["sweep-realize", "--game", game(name), "--points", "25", "--out", str(out)]
    )
    assert time.perf_counter() - started < 10.0
    assert result.exit_code == 0, result.output
    assert "25/25 verified (100.0%)" in result.output
    frame = read(out)
    assert list(frame["row"]) == list(range(1, 26))
    assert (frame["residual_max"] <= 1e-9).all()


def test_sweep_realize_single_point(runner: CliRunner, tmp_path: Path) -> None:
    out = tmp_path / "sweep.csv"
    result = runner.invoke(
        cli, ["sweep-realize", "--game", game("qpg"), "--points", "1", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert len(read(out)) == 1


def test_reruns_are_byte_identical(runner: CliRunner, tmp_path: Path) -> None:
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        result = runner.invoke(
            cli,
            ["sweep-realize", "--game", game("commons"), "--points", "5", "--seed", "7",
             "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
    assert first.read_bytes() == second.read_bytes()
    assert '"seed":7' in first.read_text().splitlines()[0]
