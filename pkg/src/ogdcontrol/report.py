"""Pass/fail check records returned by the validation helpers."""
from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    residual: float = None
    required: bool = True


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail="", residual=None, required=True):
        self.checks.append(Check(name, bool(passed), detail, residual, required))
        return passed

    def extend(self, other):
        self.checks.extend(other.checks)

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.required)

    def failures(self):
        return [c for c in self.checks if c.required and not c.passed]

    def __bool__(self):
        return self.passed

    def lines(self):
        out = []
        for c in self.checks:
            tag = "PASS" if c.passed else ("FAIL" if c.required else "NOTE")
            extra = f" (residual {c.residual:.3e})" if c.residual is not None else ""
            out.append(f"[{tag}] {c.name}{extra}{': ' + c.detail if c.detail else ''}")
        return out
