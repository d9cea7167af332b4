"""Exception hierarchy shared by every analysis."""

from __future__ import annotations


class CausalVerifError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(CausalVerifError):
    pass


class CyclicModel(ModelError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cyclic dependency: " + " -> ".join(self.cycle))


class PartialFunction(ModelError):
    def __init__(self, variable, row):
        self.variable = variable
        self.row = dict(row)
        super().__init__(f"equation for {variable!r} is undefined on input {self.row}")


class UnknownVariable(ModelError):
    def __init__(self, name, where=""):
        self.name = name
        msg = f"unknown variable {name!r}"
        super().__init__(msg + (f" in {where}" if where else ""))


class ValueOutOfDomain(ModelError):
    def __init__(self, variable, value, domain=None):
        self.variable = variable
        self.value = value
        msg = f"value {value!r} is not in the domain of {variable!r}"
        if domain is not None:
            msg += f" {list(domain)}"
        super().__init__(msg)


class SignatureMismatch(ModelError):
    pass


class FormulaMentionsExogenous(CausalVerifError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__("causal formulas may only mention endogenous variables; got "
                         + ", ".join(self.names))


class CapExceeded(CausalVerifError):
    def __init__(self, what, size, cap):
        self.size = size
        self.cap = cap
        super().__init__(f"{what} has {size} search variables, above the cap of {cap} "
                         "(raise the cap or pass force=True)")


class FormatError(CausalVerifError):
    """Malformed input text or file; carries an optional source position."""

    def __init__(self, message, *, path=None, line=None, col=None):
        self.path = path
        self.line = line
        self.col = col
        where = ""
        if path is not None:
            where = str(path)
        if line is not None:
            where += f":{line}" + (f":{col}" if col is not None else "")
        super().__init__(f"{where}: {message}" if where else message)


class LtlSyntaxError(FormatError):
    def __init__(self, message, *, text="", pos=0, expected=()):
        self.text = text
        self.pos = pos
        self.expected = tuple(expected)
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        if self.expected:
            message += "; expected " + " or ".join(self.expected)
        super().__init__(message, path="<formula>", line=line, col=col)


class UnknownAtom(CausalVerifError):
    def __init__(self, atoms):
        self.atoms = sorted(atoms)
        super().__init__("unknown atomic proposition(s): " + ", ".join(self.atoms))


class AlphabetMismatch(CausalVerifError):
    def __init__(self, atoms):
        self.atoms = sorted(atoms)
        super().__init__("formula mentions atoms outside the alphabet: " + ", ".join(self.atoms))


class UnknownState(CausalVerifError):
    pass


class SpecificationFails(CausalVerifError):
    """Coverage and vacuity are only defined when the specification holds."""


class FormulaHolds(CausalVerifError):
    """Raised when asked to explain a formula that does not fail."""


class OutputAlreadyDetermined(CausalVerifError):
    pass


class CircuitError(CausalVerifError):
    pass
