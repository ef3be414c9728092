import json

import pytest
from click.testing import CliRunner

from phinder.cli import main
from phinder.engine import Phase, ReplayWriter, replay_session, state_digest
from phinder.model import PhishingConcept
from phinder.simulate import PolicySpec, make_policy, run_decisions, simulate_run

from oracles import binomial_3sigma_bounds


class TestOraclePolicy:
    def test_levels_one_through_five_perfect(self):
        rows, sess = simulate_run(PolicySpec("oracle"), [1, 2, 3, 4, 5], seed=7)
        assert len(rows) == 5
        assert all(r.completed for r in rows)
        assert all(r.lives_lost == 0 for r in rows)
        assert all(r.timeouts == 0 for r in rows)
        assert sess.state.phase is Phase.GAME_WON
        expected = sum(100 * r.worms + 50 * r.phish for r in rows)
        assert sess.state.score == expected

    def test_single_level_score_formula(self):
        rows, sess = simulate_run(PolicySpec("oracle"), [1], seed=7)
        row = rows[0]
        assert row.worms == 10
        assert sess.state.score == 10 * 100 + row.phish * 50

    def test_deterministic(self):
        a = simulate_run(PolicySpec("oracle"), [1, 2], seed=3)
        b = simulate_run(PolicySpec("oracle"), [1, 2], seed=3)
        assert state_digest(a[1]) == state_digest(b[1])

    def test_emitted_log_replays_with_zero_divergence(self):
        writer = ReplayWriter()
        _, sess = simulate_run(PolicySpec("oracle"), [1, 2, 3], seed=9, replay=writer)
        again, divergences = replay_session(writer.lines())
        assert divergences == []
        assert state_digest(again) == state_digest(sess)


class TestRandomPolicy:
    def test_wrong_rate_within_three_sigma(self):
        decisions, wrong = run_decisions(PolicySpec("random", seed=1), 2000, seed=1)
        assert decisions == 2000
        low, high = binomial_3sigma_bounds(2000, 0.5)
        assert low <= wrong <= high

    def test_levels_must_be_contiguous(self):
        with pytest.raises(ValueError):
            simulate_run(PolicySpec("random", seed=1), [1, 3], seed=1)


class TestSkillPolicy:
    def test_accuracy_one_is_an_oracle(self):
        accuracies = {c: 1.0 for c in PhishingConcept}
        rows, sess = simulate_run(PolicySpec("skill", seed=5, accuracies=accuracies), [1], seed=5)
        assert rows[0].lives_lost == 0
        assert rows[0].completed

    def test_accuracy_bounds_validated(self):
        with pytest.raises(ValueError):
            PolicySpec("skill", accuracies={PhishingConcept.MALICIOUS_URL: 1.5})

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            PolicySpec("psychic")

    def test_quiz_answer_honors_accuracy(self):
        policy = make_policy(
            PolicySpec("skill", seed=2, accuracies={c: 1.0 for c in PhishingConcept})
        )
        rows, sess = simulate_run(
            PolicySpec("skill", seed=2, accuracies={c: 1.0 for c in PhishingConcept}),
            [1],
            seed=2,
        )
        # perfect accuracy means every quiz answered right: score is all-100s + 50s
        assert sess.state.score == rows[0].worms * 100 + rows[0].phish * 50


class TestCli:
    def test_validate_bundled_corpus_clean(self, tmp_path):
        from importlib import resources

        corpus_dir = tmp_path / "corpus"
        corpus_dir.mkdir()
        data = resources.files("phinder.data").joinpath("corpus")
        for name in ("starter.urls.txt", "starter.emails.txt"):
            (corpus_dir / name).write_text(data.joinpath(name).read_text("utf-8"), "utf-8")
        result = CliRunner().invoke(main, ["validate", str(corpus_dir)])
        assert result.exit_code == 0, result.output
        assert "corpus clean" in result.output

    def test_validate_dirty_corpus_exit_one(self, tmp_path):
        corpus_dir = tmp_path / "corpus"
        corpus_dir.mkdir()
        (corpus_dir / "bad.urls.txt").write_text("www.g0ogle.com\n", "utf-8")
        result = CliRunner().invoke(main, ["validate", str(corpus_dir)])
        assert result.exit_code == 1
        assert "lookalike_domain" in result.output

    def test_validate_missing_path_exit_three(self, tmp_path):
        result = CliRunner().invoke(main, ["validate", str(tmp_path / "missing")])
        assert result.exit_code == 3

    def test_genbank_byte_identical_runs(self, tmp_path):
        args = ["genbank", "--level", "1", "-n", "10", "--seed", "42", "--out"]
        out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        r1 = CliRunner().invoke(main, args + [str(out1)])
        r2 = CliRunner().invoke(main, args + [str(out2)])
        assert r1.exit_code == 0 and r2.exit_code == 0
        assert out1.read_bytes() == out2.read_bytes()
        records = [json.loads(line) for line in out1.read_text().splitlines()]
        assert len(records) == 10

    def test_genbank_bad_level_exit_two(self):
        result = CliRunner().invoke(
            main, ["genbank", "--level", "42", "-n", "1", "--seed", "0"]
        )
        assert result.exit_code == 2

    def test_simulate_oracle_table(self):
        result = CliRunner().invoke(
            main, ["simulate", "--policy", "oracle", "--levels", "1", "--seed", "7"]
        )
        assert result.exit_code == 0, result.output
        assert "lives_lost" in result.output
        assert "final: phase=level_complete" in result.output

    def test_simulate_csv(self):
        result = CliRunner().invoke(
            main,
            ["simulate", "--policy", "oracle", "--levels", "1-2", "--seed", "7", "--csv"],
        )
        assert result.exit_code == 0
        lines = [l for l in result.output.splitlines() if "," in l]
        header = lines[0].split(",")
        assert header == [
            "level", "worms", "phish", "score", "lives_lost", "medals", "timeouts", "completed",
        ]

    def test_simulate_then_replay_no_divergence(self, tmp_path):
        log = tmp_path / "session.jsonl"
        r1 = CliRunner().invoke(
            main,
            ["simulate", "--policy", "oracle", "--levels", "1-5", "--seed", "7",
             "--log", str(log)],
        )
        assert r1.exit_code == 0, r1.output
        r2 = CliRunner().invoke(main, ["replay", str(log)])
        assert r2.exit_code == 0, r2.output
        assert "no divergence" in r2.output

    def test_replay_detects_tampering(self, tmp_path):
        log = tmp_path / "session.jsonl"
        CliRunner().invoke(
            main,
            ["simulate", "--policy", "oracle", "--levels", "1", "--seed", "7",
             "--log", str(log)],
        )
        lines = log.read_text().splitlines()
        record = json.loads(lines[2])
        record["digest"] = "0" * 64
        lines[2] = json.dumps(record)
        log.write_text("\n".join(lines) + "\n")
        result = CliRunner().invoke(main, ["replay", str(log)])
        assert result.exit_code == 1
        assert "divergence" in result.output

    def test_replay_missing_file_exit_three(self, tmp_path):
        result = CliRunner().invoke(main, ["replay", str(tmp_path / "none.jsonl")])
        assert result.exit_code == 3

    def test_simulate_bad_levels_exit_two(self):
        result = CliRunner().invoke(
            main, ["simulate", "--policy", "oracle", "--levels", "5-1", "--seed", "7"]
        )
        assert result.exit_code == 2

    def test_skill_flag_parsing(self):
        result = CliRunner().invoke(
            main,
            ["simulate", "--policy", "skill", "--levels", "1", "--seed", "3",
             "--skill", "malicious_url=1.0", "--skill", "lookalike_domain=1.0"],
        )
        assert result.exit_code == 0, result.output

    def test_serve_config_file_parsing(self, tmp_path):
        from phinder.cli import _read_serve_config

        cfg = tmp_path / "serve.cfg"
        cfg.write_text(
            "# service settings\naddr = 0.0.0.0:9000\ndata_dir = /tmp/x\n", "utf-8"
        )
        values = _read_serve_config(str(cfg))
        assert values == {"addr": "0.0.0.0:9000", "data_dir": "/tmp/x"}
        cfg.write_text("mystery = 1\n", "utf-8")
        with pytest.raises(ValueError):
            _read_serve_config(str(cfg))
