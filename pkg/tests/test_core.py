"""Tests for settings, reports and the command helpers."""

import logging
from unittest.mock import patch

import pandas as pd
import pytest
from pydantic import ValidationError

from disco.commands.common import exit_code_for, failed_report, miner_config, parse_bk
from disco.commands.rulespace import reduction_percent
from disco.commands.scale import COLUMNS as SCALE_COLUMNS
from disco.commands.scale import scale_table
from disco.commands.sweep import COLUMNS as SWEEP_COLUMNS
from disco.commands.sweep import sweep_table
from disco.core.config import Settings
from disco.core.exceptions import (
    ArityMismatchError,
    ContractViolation,
    DiscoParseError,
    LearningTimeout,
    ResourceGuardError,
)
from disco.core.logging import InterceptHandler, setup_logging
from disco.core.timing import Stats
from disco.schemas.report import ExitCode, RunReport
from disco.services.constraints import ConstraintSet
from disco.services.genbk import count_facts
from tests.conftest import TOY_BK


class TestSettings:
    """Test environment configuration."""

    def test_defaults(self):
        """Defaults without environment overrides."""
        with patch.dict("os.environ", {}, clear=True):
            settings = Settings(_env_file=None)

            assert settings.DISCO_THREADS >= 1
            assert settings.LOG_FORMAT == "TEXT"
            assert settings.GENBK_MAX_FACTS == 10**8
            assert settings.LEARN_TIMEOUT is None

    def test_environment_overrides(self):
        """Values are read from the environment and normalised."""
        env = {"DISCO_THREADS": "3", "LOG_FORMAT": "json", "LEARN_TIMEOUT": "2.5"}
        with patch.dict("os.environ", env, clear=True):
            settings = Settings(_env_file=None)

            assert settings.DISCO_THREADS == 3
            assert settings.LOG_FORMAT == "JSON"
            assert settings.LEARN_TIMEOUT == 2.5

    def test_zero_timeout_is_unbounded(self):
        with patch.dict("os.environ", {"LEARN_TIMEOUT": "0"}, clear=True):
            assert Settings(_env_file=None).LEARN_TIMEOUT is None

    @pytest.mark.parametrize(
        "name,value",
        [("DISCO_THREADS", "0"), ("LOG_FORMAT", "xml"), ("MAX_PROPERTY_ARITY", "4")],
    )
    def test_invalid_values(self, name, value):
        """Out-of-range settings are rejected."""
        with patch.dict("os.environ", {name: value}, clear=True):
            with pytest.raises(ValidationError):
                Settings(_env_file=None)


class TestErrorsAndReports:
    """Test exit codes and run reports."""

    @pytest.mark.parametrize(
        "error,code",
        [
            (DiscoParseError("bad", line=2), ExitCode.INPUT_ERROR),
            (ArityMismatchError("arity"), ExitCode.INPUT_ERROR),
            (ContractViolation("clash"), ExitCode.INPUT_ERROR),
            (LearningTimeout("late"), ExitCode.NO_SOLUTION),
            (ResourceGuardError("big"), ExitCode.RESOURCE_GUARD),
            (RuntimeError("boom"), ExitCode.FAILURE),
        ],
    )
    def test_exit_codes(self, error, code):
        assert exit_code_for(error) == code

    def test_parse_error_location(self):
        """Messages name the source and the line."""
        error = DiscoParseError("unexpected ';'", line=2, column=4, source="bk.pl")

        assert str(error) == "bk.pl: line 2, column 4: unexpected ';'"
        assert error.line == 2

    def test_failed_report(self):
        """Failures carry the error text and exit code."""
        report = failed_report("learn", ContractViolation("clash"), Stats())

        assert report.success is False
        assert report.exit_code == ExitCode.INPUT_ERROR
        assert report.error == "clash"

    def test_negative_counters_rejected(self):
        with pytest.raises(ValidationError):
            RunReport(command="learn", counters={"programs_tested": -1})

    def test_negative_phase_rejected(self):
        with pytest.raises(ValidationError):
            RunReport(command="learn", phases={"test": -0.5})

    def test_report_json(self):
        """Reports serialise to one JSON object."""
        report = RunReport(command="genbk", counters={"facts_written": 11})
        text = report.model_dump_json()

        assert '"facts_written":11' in text
        assert '"exit_code":0' in text


class TestStats:
    """Test phase timers and counters."""

    def test_counts_accumulate(self):
        stats = Stats()
        stats.count("programs_tested")
        stats.count("programs_tested", 4)

        assert stats.totals() == {"programs_tested": 5}

    def test_phases_accumulate(self):
        """Repeated phases add up and stay within the elapsed time."""
        stats = Stats()
        for _ in range(3):
            with stats.duration("test"):
                pass

        assert set(stats.phases()) == {"test"}
        assert 0.0 <= stats.phases()["test"] <= stats.elapsed()

    def test_phase_recorded_on_error(self):
        stats = Stats()
        with pytest.raises(ValueError):
            with stats.duration("load"):
                raise ValueError("bad")

        assert "load" in stats.phases()


class TestLogging:
    """Test the logging setup."""

    def test_single_intercept_handler(self):
        """Repeated setup installs one handler on the root logger."""
        setup_logging("DEBUG", "TEXT")
        setup_logging("INFO", "JSON")
        root = logging.getLogger()

        assert sum(isinstance(h, InterceptHandler) for h in root.handlers) == 1
        assert root.level == logging.INFO


class TestCommandHelpers:
    """Test the pieces shared by the commands."""

    def test_facts_skip_the_program_reader(self):
        """Plain fact files take the line-based reader."""
        with patch("disco.commands.common.parse_program") as program:
            store = parse_bk(TOY_BK, source="bk.pl")

        program.assert_not_called()
        assert store.fact_count() == 4
        assert store.texts("length") == [("l1", "1"), ("l2", "2")]

    def test_background_rules_are_grounded(self):
        store = parse_bk("e(a,b).\ne(b,c).\nr(A,B):-e(A,C),e(C,B).\n")

        assert store.texts("r") == [("a", "c")]

    def test_multiline_fact_falls_back(self):
        """Clauses the line reader cannot take go to the program reader."""
        store = parse_bk("p(a,\n  b).\nq(c).\n")

        assert store.texts("p") == [("a", "b")]
        assert store.fact_count() == 2

    def test_malformed_bk_reports_line(self):
        with pytest.raises(DiscoParseError) as exc:
            parse_bk("p(a).\nq(b;c).\n", source="bk.pl")

        assert exc.value.line == 2

    def test_reduction_percent(self):
        assert reduction_percent(3, 2) == 33.3
        assert reduction_percent(94, 8) == 91.5
        assert reduction_percent(0, 0) == 0.0

    def test_miner_config_from_bias(self, odd_even_store, odd_even_bias):
        """The bias head is excluded and its body predicates are candidates."""
        config = miner_config(odd_even_store, odd_even_bias, threads=2)

        assert config.candidates == ["even", "odd"]
        assert config.excluded == ["f"]
        assert config.threads == 2

    def test_miner_config_without_bias(self, intro_store):
        config = miner_config(intro_store, None)

        assert config.candidates == ["even", "head", "odd", "tail"]
        assert config.excluded == []

    def test_sweep_table(self, toy_task):
        """Rows follow the body sizes; small bodies may have no solution."""
        table = sweep_table(toy_task, ConstraintSet(), [1, 2])

        assert list(table.columns) == SWEEP_COLUMNS
        assert list(table["max_body"]) == [1, 2]
        assert pd.isna(table["cost"].iloc[0])
        assert table["cost"].iloc[1] == 3

    def test_scale_table(self):
        """Fact counts follow the generator."""
        table = scale_table([1, 2], 2, threads=1)

        assert list(table.columns) == SCALE_COLUMNS
        assert list(table["facts"]) == [count_facts(1, 2), count_facts(2, 2)]
        assert (table["discovery_seconds"] >= 0).all()
