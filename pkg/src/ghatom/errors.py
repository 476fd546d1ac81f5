"""Exception hierarchy shared by the library and the CLI.

The CLI maps :class:`InputError` to exit code 2 and every other
:class:`GhAtomError` to exit code 3.
"""


class GhAtomError(Exception):
    """Base class for all library errors."""


class InputError(GhAtomError, ValueError):
    """Parameters violate a documented invariant."""


class NumericalError(GhAtomError, ArithmeticError):
    """A computation hit a singular or ill-defined configuration."""


class DegenerateFrame(NumericalError):
    pass


class SingularTransform(NumericalError):
    pass


class ChannelDegenerate(NumericalError):
    pass


class ResonanceSingular(NumericalError):
    pass


class IllConditioned(NumericalError):
    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class ZeroAmplitude(NumericalError):
    pass


class StencilCrossesResonance(NumericalError):
    pass


class MultipleRoots(NumericalError):
    """More than one critical-angle root was bracketed.

    All roots found are kept on :attr:`roots` (radians, ascending).
    """

    def __init__(self, roots):
        self.roots = tuple(roots)
        super().__init__(
            "critical-angle equation has %d roots: %s"
            % (len(self.roots), ", ".join("%.6f deg" % (r * 180 / 3.141592653589793) for r in self.roots))
        )


class PeakOnBoundary(NumericalError):
    pass


class MultiPeak(NumericalError):
    def __init__(self, message, peaks=()):
        super().__init__(message)
        self.peaks = tuple(peaks)
