"""Exception types shared across the package."""

from __future__ import annotations


class ContractViolation(Exception):
    """An operation was invoked contrary to its stated precondition."""


class FairnessViolation(Exception):
    """A scripted schedule starved a continuously enabled process."""

    def __init__(self, process: int, window: tuple[int, int]):
        self.process = process
        self.window = window
        super().__init__(
            f"process {process} enabled but never activated in steps "
            f"{window[0]}..{window[1]}"
        )


class GenerationError(Exception):
    """A random topology could not be generated within the retry budget."""


class ScenarioError(Exception):
    """A scripted replay failed to reach its target configuration."""

    def __init__(self, phase: str, message: str):
        self.phase = phase
        super().__init__(f"[{phase}] {message}")


class AnalysisError(Exception):
    """A trace measurement could not be completed."""

    def __init__(self, message: str, step_index: int | None = None):
        self.step_index = step_index
        super().__init__(message)
