"""Exception and warning classes."""


class InputError(ValueError):
    """Invalid user input: bad geometry, out-of-range parameter, schema violation."""


class UnitError(InputError):
    """Unknown unit, dimension mismatch, or mixed unit systems."""


class ConvergenceError(RuntimeError):
    """A numerical procedure could not reach its requested accuracy."""


class QFlickerWarning(UserWarning):
    pass


class ApplicabilityWarning(QFlickerWarning):
    """A formula is used outside the regime it was derived for."""


class ConvergenceWarning(QFlickerWarning):
    """Quadrature stopped on its budget before reaching the tolerance."""


class ClampWarning(QFlickerWarning):
    """An input was clamped to the range where a model applies."""
