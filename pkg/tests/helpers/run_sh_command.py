from typing import List, Tuple

import pytest

from tests.helpers.package_available import _SH_AVAILABLE

if _SH_AVAILABLE:
    import sh


def run_sh_command(command: List[str]):
    """Default method for executing shell commands with pytest and sh package."""
    msg = None
    try:
        sh.python(command)
    except sh.ErrorReturnCode as e:
        msg = e.stderr.decode()
    if msg:
        pytest.fail(msg=msg)


def run_sh_command_with_exit_code(command: List[str]) -> Tuple[int, str, str]:
    """Executes `python <command>` and returns the exit code, stdout and stderr."""
    try:
        return 0, str(sh.python(command)), ""
    except sh.ErrorReturnCode as e:
        return e.exit_code, e.stdout.decode(), e.stderr.decode()
