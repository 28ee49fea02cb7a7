"""Exception types shared across the solver stack."""


class SolverFailure(RuntimeError):
    """Fixed-point iteration exhausted its budget without converging."""

    def __init__(self, message, slab=None, increment=None):
        super().__init__(message)
        self.slab = slab
        self.increment = increment


class DegenerateCoefficient(SolverFailure):
    """The coefficient 1 + k*u dropped below the admissibility guard."""

    def __init__(self, message, slab=None, coeff_min=None):
        super().__init__(message, slab=slab)
        self.coeff_min = coeff_min
