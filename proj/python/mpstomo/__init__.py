"""Direct MPS tomography from local window measurements.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports it and adds JSON-friendly wrappers around the campaign commands.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from ._core import *  # noqa: F401,F403
from ._core import MpstomoError, __version__, _check_record, _run_command


def _run(command: str, config: Mapping[str, Any] | None, family: str = "ghz") -> list[dict]:
    text = json.dumps(dict(config or {}))
    return [json.loads(r) for r in _run_command(command, text, family)]


def cmd_run(config: Mapping[str, Any] | None = None) -> list[dict]:
    """Reconstruct and certify; returns header, trial and summary records."""
    return _run("run", config)


def cmd_certify(config: Mapping[str, Any] | None = None) -> list[dict]:
    return _run("certify", config)


def cmd_bench(config: Mapping[str, Any] | None = None) -> list[dict]:
    return _run("bench", config)


def cmd_demo(family: str = "ghz", config: Mapping[str, Any] | None = None) -> list[dict]:
    return _run("demo", config, family)


def check_record(record: Mapping[str, Any]) -> list[str]:
    """Problems found in one manifest record; empty when it is valid."""
    return list(_check_record(json.dumps(dict(record))))

