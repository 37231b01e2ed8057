"""Tests for app/sweep.py"""

import threading

import pytest

from app.sweep import resolve_workers, run_ordered
from config.exceptions import ConfigurationError


class TestResolveWorkers:
    """Tests for worker count resolution."""

    def test_env_var(self, monkeypatch):
        """HEPTAINV_THREADS sets the worker count."""
        monkeypatch.setenv("HEPTAINV_THREADS", "3")
        assert resolve_workers() == 3

    def test_capped_by_tasks(self, monkeypatch):
        """Workers never exceed the task count, with at least one."""
        monkeypatch.setenv("HEPTAINV_THREADS", "8")
        assert resolve_workers(tasks=2) == 2
        assert resolve_workers(tasks=0) == 1

    @pytest.mark.parametrize("raw", ["0", "-2", "four", "1.5"])
    def test_invalid_env_var(self, monkeypatch, raw):
        """Non-positive or non-integer values are rejected."""
        monkeypatch.setenv("HEPTAINV_THREADS", raw)
        with pytest.raises(ConfigurationError):
            resolve_workers()

    def test_blank_env_var_uses_cores(self, monkeypatch, mocker):
        """A blank variable falls back to physical cores."""
        monkeypatch.setenv("HEPTAINV_THREADS", "  ")
        mocker.patch("app.sweep.psutil.cpu_count", return_value=4)
        assert resolve_workers() == 4

    def test_physical_cores(self, monkeypatch, mocker):
        """Without the variable, physical cores are used."""
        monkeypatch.delenv("HEPTAINV_THREADS", raising=False)
        cpu_count = mocker.patch("app.sweep.psutil.cpu_count", return_value=6)
        assert resolve_workers() == 6
        cpu_count.assert_called_once_with(logical=False)

    def test_unknown_core_count(self, monkeypatch, mocker):
        """An unknown core count means one worker."""
        monkeypatch.delenv("HEPTAINV_THREADS", raising=False)
        mocker.patch("app.sweep.psutil.cpu_count", return_value=None)
        assert resolve_workers() == 1


class TestRunOrdered:
    """Tests for the ordered worker pool."""

    def test_empty(self):
        """No items give no results."""
        assert run_ordered(lambda x: x, []) == []

    def test_preserves_order(self):
        """Results come back in input order."""
        assert run_ordered(lambda x: x * x, range(20), workers=4) == [x * x for x in range(20)]

    def test_sequential_runs_on_caller_thread(self, single_worker):
        """One worker runs on the calling thread."""
        caller = threading.get_ident()
        assert run_ordered(lambda _: threading.get_ident(), [1, 2, 3]) == [caller] * 3

    def test_exceptions_propagate(self):
        """Worker exceptions reach the caller."""
        def fail(x):
            raise ValueError(x)

        with pytest.raises(ValueError):
            run_ordered(fail, [1, 2], workers=2)
