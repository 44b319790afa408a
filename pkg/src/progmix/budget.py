"""Work budgets for exhaustive computations, with an environment override."""

import os

ENV_VAR = "PROGMIX_BUDGET"

# Default ceilings for the three cost models used across the package.
ENUMERATION_BUDGET = 10**7  # elements materialised when enumerating a group
OP_BUDGET = 10**9  # elementary operations in an exact average
MEMBERSHIP_BUDGET = 10**8  # membership tests in pattern counters


class BudgetExceededError(RuntimeError):
    """An exact computation would exceed the configured work budget."""


def budget_limit(default: int) -> int:
    """Return the active budget: PROGMIX_BUDGET if set, else the default."""
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc


def charge(cost: int, default: int, what: str) -> None:
    """Raise BudgetExceededError when `cost` exceeds the active budget."""
    limit = budget_limit(default)
    if cost > limit:
        raise BudgetExceededError(
            f"{what} needs {cost} work units, over the budget of {limit} "
            f"(override with {ENV_VAR}, or use a sampling mode where available)"
        )
