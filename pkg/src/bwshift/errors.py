"""Exception types raised across the package."""


class BWShiftError(Exception):
    """Base class for all package errors."""


class ConfigError(BWShiftError, ValueError):
    """Malformed or invalid configuration."""


class ParseError(ConfigError):
    """Base class for expression-language errors.

    ``offset`` is the byte offset into the source text where the problem
    was detected.
    """

    def __init__(self, message, source="", offset=0):
        self.source = source
        self.offset = offset
        super().__init__(f"{message} at offset {offset}: {source!r}")


class ExprSyntaxError(ParseError):
    def __init__(self, source, offset, expected):
        self.expected = frozenset(expected)
        want = ", ".join(sorted(self.expected)) or "end of input"
        super().__init__(f"syntax error, expected one of {{{want}}}", source, offset)


class UnknownFunction(ParseError):
    def __init__(self, name, source, offset):
        self.name = name
        super().__init__(f"unknown function {name!r}", source, offset)


class UnknownIdentifier(ParseError):
    def __init__(self, name, source, offset):
        self.name = name
        super().__init__(f"unknown identifier {name!r} (only 'n' is allowed)", source, offset)


class NoMatchingPiece(ConfigError):
    def __init__(self, n, name=""):
        self.n = n
        label = f" in sequence {name!r}" if name else ""
        super().__init__(f"no piece matches n={n}{label}")


class NonFiniteValue(ConfigError):
    def __init__(self, n, detail="", name=""):
        self.n = n
        label = f"{name}" if name else "sequence"
        super().__init__(f"{label} is not finite at n={n}" + (f" ({detail})" if detail else ""))


class ZeroA(ConfigError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"a_n vanishes at n={n}; every a_n must be nonzero")


class RadiiCollapse(ConfigError):
    def __init__(self, r, R):
        self.r, self.R = r, R
        super().__init__(f"estimated inner radius r={r:.6g} exceeds outer radius R={R:.6g}")


class WrongBasis(BWShiftError, ValueError):
    pass


class WindowExhausted(BWShiftError):
    def __init__(self, nu, detail=""):
        self.nu = nu
        super().__init__(f"expansion of z^{nu} did not terminate inside the window" + (f": {detail}" if detail else ""))


class DivergentSeries(BWShiftError, ArithmeticError):
    pass


class OutsideAnnulus(BWShiftError, ValueError):
    pass


class ZeroWeight(BWShiftError, ArithmeticError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"weight alpha_{n} vanishes")


class WindowTooSmall(BWShiftError, ValueError):
    pass


class EdgeDominated(UserWarning):
    """Most of an iterate's norm sits in edge-tainted coordinates."""
