"""Diagnostics report: time series of measured quantities vs their bounds.

Each check performed during a run appends a :class:`ReportEntry`; the report
serializes to ``report.csv`` (columns: check,t,measured,bound,margin,pass)
and a human-readable ``summary.txt``.  Entries are either *hard* (a failure
flips the run verdict and the CLI exit code) or *soft* (recorded only).
"""
from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["ReportEntry", "DiagnosticsReport", "PASS", "FAIL", "INCONCLUSIVE"]

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class ReportEntry:
    """One measured quantity compared against one bound at one time."""

    check: str
    t: float
    measured: float
    bound: float
    margin: float          # bound - measured (signed; positive = headroom)
    status: str            # PASS / FAIL / INCONCLUSIVE
    hard: bool = True      # hard checks affect the run verdict
    note: str = ""

    @classmethod
    def compare(cls, check, t, measured, bound, *, hard=True, note=""):
        """Entry passing iff measured <= bound."""
        measured, bound = float(measured), float(bound)
        status = PASS if measured <= bound else FAIL
        return cls(check, float(t), measured, bound, bound - measured,
                   status, hard=hard, note=note)

    @classmethod
    def inconclusive(cls, check, t, note=""):
        return cls(check, t, float("nan"), float("nan"), float("nan"),
                   INCONCLUSIVE, hard=False, note=note)


@dataclass
class DiagnosticsReport:
    """Accumulates report entries over a run plus a scenario echo."""

    scenario: dict = field(default_factory=dict)
    entries: list = field(default_factory=list)

    def add(self, entry: ReportEntry) -> ReportEntry:
        self.entries.append(entry)
        return entry

    def extend(self, entries) -> None:
        for e in entries:
            self.add(e)

    def hard_failures(self):
        return [e for e in self.entries if e.hard and e.status == FAIL]

    def all_hard_pass(self) -> bool:
        return not self.hard_failures()

    def by_check(self, name):
        return [e for e in self.entries if e.check == name]

    def to_csv(self, path) -> None:
        # repr() of floats is the shortest round-trip form: deterministic
        # bytes for identical inputs, which the determinism contract needs.
        with open(path, "w") as f:
            f.write("check,t,measured,bound,margin,pass\n")
            for e in self.entries:
                f.write("%s,%r,%r,%r,%r,%s\n"
                        % (e.check, float(e.t), float(e.measured),
                           float(e.bound), float(e.margin), e.status))

    def summary_text(self) -> str:
        lines = []
        if self.scenario:
            lines.append("scenario: %s" % self.scenario.get("name", "?"))
            for k in sorted(self.scenario):
                if k != "name":
                    lines.append("  %s: %s" % (k, self.scenario[k]))
        n_hard = sum(1 for e in self.entries if e.hard)
        fails = self.hard_failures()
        lines.append("checks: %d entries, %d hard, %d hard failures"
                     % (len(self.entries), n_hard, len(fails)))
        for e in self.entries:
            tag = "HARD" if e.hard else "soft"
            lines.append(
                "  [%s] %-22s t=%-7g measured=%-12.6g bound=%-12.6g %s%s"
                % (tag, e.check, e.t, e.measured, e.bound, e.status.upper(),
                   (" (%s)" % e.note) if e.note else ""))
        lines.append("verdict: %s"
                     % ("PASS" if self.all_hard_pass() else "FAIL"))
        return "\n".join(lines) + "\n"

    def write_summary(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.summary_text())
