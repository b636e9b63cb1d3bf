"""Exception types shared by the engines and the command line."""


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit status 1)."""


class NumericalError(RuntimeError):
    """Integration left the physical state space (CLI exit status 2)."""
