"""Exception types raised across the screening pipeline."""


class HubScreenError(Exception):
    """Base class for all errors raised by hubscreen."""


class ValidationError(HubScreenError, ValueError):
    """Bad user input (shapes, parameter ranges, file contents)."""


class NumericDegeneracy(HubScreenError, ArithmeticError):
    """A numerical quantity the pipeline depends on is degenerate."""


class ZeroVarianceColumn(ValidationError):
    def __init__(self, labels):
        self.labels = list(labels)
        super().__init__(f"zero-variance columns: {', '.join(map(str, self.labels))}")


class RankDeficientGram(NumericDegeneracy):
    pass


class DimensionMismatch(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DegenerateThreshold(NumericDegeneracy):
    pass


class VertexNotDiscovered(HubScreenError, KeyError):
    def __str__(self):
        return f"vertex {self.args[0]!r} has degree 0 at the screening threshold"


class ParseError(ValidationError):
    def __init__(self, row, column, token):
        self.row, self.column, self.token = row, column, token
        super().__init__(f"cannot parse {token!r} at row {row}, column {column}")


class MissingData(ValidationError):
    def __init__(self, labels):
        self.labels = list(labels)
        super().__init__(f"missing values in columns: {', '.join(self.labels)}")


class EmptyMatrix(ValidationError):
    pass
