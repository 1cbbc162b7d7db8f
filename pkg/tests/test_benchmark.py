from botlc.services.benchmark import run_compare
from botlc.services.task_scheduler import EXIT_OK
from botlc.utils.scenario_io import load_compare_manifest


def test_repeated_method_gives_identical_rows(tmp_path, scenario_dir):
    manifest_path = tmp_path / "repeat.toml"
    manifest_path.write_text(
        f'base = "{(scenario_dir / "stationary_proposed.toml").as_posix()}"\n'
        'methods = ["deghat", "deghat"]\n'
        '[overrides.integrator]\n'
        't_end_s = 0.2\n'
    )
    manifest, scenarios = load_compare_manifest(manifest_path)
    result = run_compare(manifest, scenarios, tmp_path / "out", emit=frozenset())

    assert [row["label"] for row in result.rows] == ["deghat", "deghat_2"]
    first, second = ({k: v for k, v in row.items() if k != "label"} for row in result.rows)
    assert first == second
    assert result.exit_code == EXIT_OK
