"""Three-valued check reports shared by the validators."""

from __future__ import annotations

HOLDS = "Holds"
FAILS = "Fails"
UNKNOWN = "Unknown"

# worst-verdict aggregation: Fails beats Unknown beats Holds
_RANK = {HOLDS: 0, UNKNOWN: 1, FAILS: 2}


class DiagramError(Exception):
    """Structural or parse problem in an input file; carries a location."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = "%s: %s" % (location, message)
        super().__init__(message)


class Check:
    """One named property with a verdict and a JSON-able witness."""

    __slots__ = ("property", "verdict", "witness")

    def __init__(self, property, verdict, witness=None):
        self.property = property
        self.verdict = verdict
        self.witness = witness

    def to_json(self):
        return {"property": self.property, "verdict": self.verdict,
                "witness": self.witness}

    def __repr__(self):
        return "Check(%r, %r, %r)" % (self.property, self.verdict, self.witness)


def worst(verdicts):
    out = HOLDS
    for v in verdicts:
        if _RANK[v] > _RANK[out]:
            out = v
    return out


class ValidationReport:
    """Bundle of checks plus free-form findings lines."""

    def __init__(self, checks=None, findings=None):
        self.checks = list(checks or [])
        self.findings = list(findings or [])

    def add(self, property, verdict, witness=None):
        self.checks.append(Check(property, verdict, witness))

    def note(self, line):
        self.findings.append(line)

    def verdict(self, property):
        for c in self.checks:
            if c.property == property:
                return c.verdict
        raise KeyError(property)

    def witness(self, property):
        for c in self.checks:
            if c.property == property:
                return c.witness
        raise KeyError(property)

    def overall(self):
        return worst(c.verdict for c in self.checks)

    def ok(self):
        return self.overall() == HOLDS

    def to_json(self):
        return {"reports": [c.to_json() for c in self.checks],
                "findings": self.findings}
