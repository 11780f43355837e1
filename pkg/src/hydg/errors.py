"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand dimensions are inconsistent."""


class ContractError(ValueError):
    """A call violated an operation's precondition."""


class ParameterError(ValueError):
    """A configuration value is out of its allowed range."""


class NumericError(ArithmeticError):
    """A computation produced or encountered non-finite values."""


class ParseError(ValueError):
    """A dataset file could not be parsed; carries file and line context."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


class SchemaError(ValueError):
    """Dataset files disagree with the declared n/d/C/T schema."""


class TrainingDiverged(RuntimeError):
    """Training produced a non-finite loss; carries the epoch index."""

    def __init__(self, epoch, value):
        super().__init__(f"non-finite loss {value!r} at epoch {epoch}")
        self.epoch = epoch
