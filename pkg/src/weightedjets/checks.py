"""Named internal-consistency checks.

Cross-module assertions go through :func:`check`.  When a :class:`Ledger`
is passed the outcome is recorded under its name (first outcome wins for
repeated names); a failure always raises :class:`ConsistencyError`.
"""

from __future__ import annotations


class ConsistencyError(AssertionError):
    """Two independent computations disagree: an implementation bug."""


class Ledger:
    def __init__(self):
        self.entries: dict[str, bool] = {}
        self.details: dict[str, str] = {}

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        if name in self.entries:
            return
        self.entries[name] = bool(ok)
        if detail and not ok:
            self.details[name] = detail

    @property
    def ok(self) -> bool:
        return all(self.entries.values())

    def as_dict(self) -> dict[str, str]:
        return {k: ("pass" if v else "fail") for k, v in self.entries.items()}


def check(ledger: Ledger | None, name: str, ok: bool, detail: str = "") -> None:
    if ledger is not None:
        ledger.record(name, ok, detail)
    if not ok:
        raise ConsistencyError(f"{name}: {detail}" if detail else name)
