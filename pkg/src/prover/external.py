import logging
import shlex
import subprocess
from dataclasses import dataclass
from pathlib import Path

from src.core.system import EngineError
from src.core.utils import atomic_write_text

logger = logging.getLogger(__name__)

FILE_PLACEHOLDER = "{path}"


class ExternalProverError(EngineError):
    pass


@dataclass(frozen=True)
class ExternalVerdict:
    proved: bool
    timed_out: bool
    output: str


class ExternalProver:
    """Runs a TPTP prover as a subprocess on an exported problem file.

    The command template names the problem file with `{path}`; a run counts
    as a proof when the success marker appears in the prover's output.
    """

    def __init__(self, command: str, success_marker: str = "Theorem", timeout: float = 20.0):
        if not command.strip():
            raise ExternalProverError("no external prover command configured")
        self.command = command
        self.success_marker = success_marker
        self.timeout = timeout

    def _argv(self, problem_file: Path) -> list[str]:
        argv = shlex.split(self.command)
        if not any(FILE_PLACEHOLDER in arg for arg in argv):
            argv.append(FILE_PLACEHOLDER)
        return [arg.replace(FILE_PLACEHOLDER, str(problem_file)) for arg in argv]

    def run_file(self, problem_file: Path) -> ExternalVerdict:
        argv = self._argv(problem_file)
        logger.debug("Running external prover: %s", " ".join(argv))
        try:
            completed = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout, check=False)
        except subprocess.TimeoutExpired as e:
            output = e.stdout if isinstance(e.stdout, str) else ""
            return ExternalVerdict(False, True, output)
        except OSError as e:
            raise ExternalProverError(f"could not start {argv[0]}: {e}") from e
        output = completed.stdout + completed.stderr
        return ExternalVerdict(self.success_marker in output, False, output)

    def prove_text(self, tptp_text: str, problem_file: Path) -> ExternalVerdict:
        atomic_write_text(problem_file, tptp_text)
        return self.run_file(problem_file)
