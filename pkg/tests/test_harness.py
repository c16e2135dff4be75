import json

import pytest

from crowdbid.cli import main
from crowdbid.domain import GenConfig
from crowdbid.harness import (
    CSV_HEADER,
    Scenario,
    batch_frequencies,
    child_seed,
    compare_head_to_head,
    parse_grid,
    run_scenario,
)

SMALL = GenConfig(n_tasks=30, n_participants=40)


def test_parse_grid():
    assert parse_grid("100:600:100") == (100, 200, 300, 400, 500, 600)
    assert parse_grid("5,7") == (5, 7)
    for bad in ("1:5:0", "a,b", "0,3", "1:2"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_row_count_per_grid_point():
    s = Scenario("2sb-ra", SMALL, n_auctions=3, sweep="participants", grid=parse_grid("10:60:10"))
    r = run_scenario(s)
    assert len(r.rows) == 6 * 3
    assert sorted(r.mean_cr()) == [10, 20, 30, 40, 50, 60]


def test_auctions_axis_runs_grid_value_auctions():
    r = run_scenario(Scenario("tscm", SMALL, sweep="auctions", grid=(2, 5)))
    assert len(r.rows) == 7


def test_csv_is_reproducible(tmp_path):
    s = Scenario("ptb-ru", SMALL, n_auctions=5, base_seed=4)
    a, b = run_scenario(s), run_scenario(s)
    assert a.to_csv() == b.to_csv()
    csv_path, manifest = a.write(tmp_path / "out" / "r.csv")
    text = csv_path.read_text()
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert len(text.splitlines()) == 6
    meta = json.loads(manifest.read_text())
    assert meta["rows"] == 5
    assert meta["scenario"]["mechanism"] == "ptb-ru"
    assert meta["scenario"]["gen"]["mode"] == "reputation_unaware"


def test_workers_do_not_change_rows():
    s = Scenario("2sb-ru", SMALL, n_auctions=6, base_seed=2)
    assert run_scenario(s, workers=2).rows == run_scenario(s).rows


def test_child_seeds_differ():
    seeds = {child_seed(0, g, k) for g in (0, 1) for k in range(50)}
    assert len(seeds) == 100
    assert child_seed(1, 0, 0) == child_seed(1, 0, 0)


def test_mechanism_never_beats_itself():
    s = Scenario("2sb-ra", SMALL, n_auctions=10)
    assert compare_head_to_head(s, s, batches=2) == 0.0


def test_secondary_stage_never_loses_to_its_own_first_stage():
    a = Scenario("tscm", SMALL, n_auctions=20)
    b = Scenario("2sb-ra", SMALL, n_auctions=20)
    assert batch_frequencies(b, a)[0] == 0.0


def test_incomparable_scenarios_rejected():
    a = Scenario("tscm", SMALL, n_auctions=10)
    with pytest.raises(ValueError):
        compare_head_to_head(a, Scenario("2sb-ra", SMALL, n_auctions=11))
    with pytest.raises(ValueError):
        compare_head_to_head(a, Scenario("2sb-ra", GenConfig(n_tasks=31, n_participants=40), n_auctions=10))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mechanism": "nope"},
        {"mechanism": "tscm", "sweep": "tasks"},
        {"mechanism": "tscm", "grid": (1, 2)},
        {"mechanism": "tscm", "sweep": "speed", "grid": (1,)},
        {"mechanism": "tscm", "n_auctions": 0},
        {"mechanism": "ptb-ra", "ptb_admission": "maybe"},
    ],
)
def test_bad_scenarios(kwargs):
    with pytest.raises(ValueError):
        Scenario(**kwargs)


def test_cli_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    code = main(["run", "--mechanism", "2sb-ra", "--tasks", "20", "--participants", "30",
                 "--auctions", "2", "--sweep", "tasks", "--grid", "10,20", "--out", str(out)])
    assert code == 0
    assert len(out.read_text().splitlines()) == 5
    assert (tmp_path / "rows.csv.manifest.json").exists()
    assert "mean CR" in capsys.readouterr().err


def test_cli_run_to_stdout(capsys):
    assert main(["run", "--mechanism", "msensing", "--auctions", "2", "--tasks", "10"]) == 0
    assert capsys.readouterr().out.startswith("auction,grid_axis")


def test_cli_errors(capsys):
    assert main(["run", "--mechanism", "tscm", "--sweep", "tasks"]) == 2
    assert main(["run", "--mechanism", "tscm", "--sweep", "tasks", "--grid", "x"]) == 2
    assert main(["oracle", "--max-n", "13"]) == 2
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["run", "--mechanism", "bogus"])


def test_cli_compare_and_oracle(capsys):
    assert main(["compare", "--a", "tscm", "--b", "2sb-ra", "--auctions", "5", "--tasks", "20",
                 "--batches", "2"]) == 0
    assert "mean:" in capsys.readouterr().out
    assert main(["oracle", "--fuzz", "20", "--seed", "3"]) == 0
    assert "20/20" in capsys.readouterr().out
