"""Parameter containers for the reset process.

The process is Brownian motion with variance ``sigma**2 * t``, drift ``-c``,
and instantaneous relocation to the level ``xr`` at the jump epochs of an
independent Poisson process with intensity ``lam``.  The starting point is
either a fixed real number or a draw from the stationary law; the latter is
encoded as ``x0=None``.
"""

import math
from dataclasses import dataclass

from .errors import ParameterError

#: Sentinel accepted for ``x0`` meaning "start from the stationary law".
STATIONARY = None


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the reset process.

    sigma : volatility scale, sigma > 0
    lam   : reset intensity, lam > 0
    c     : drift magnitude; the process drifts at rate -c
    x0    : fixed initial value, or None for a stationary start
    xr    : reset level
    """

    sigma: float = 1.0
    lam: float = 1.0
    c: float = 0.0
    x0: float | None = 0.0
    xr: float = 0.0

    def __post_init__(self):
        for name in ("sigma", "lam", "c", "xr"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
        if self.sigma <= 0:
            raise ParameterError(f"sigma must be > 0, got {self.sigma}")
        if self.lam <= 0:
            raise ParameterError(f"lam must be > 0, got {self.lam}")
        if self.x0 is not None and not math.isfinite(self.x0):
            raise ParameterError(f"x0 must be finite or None, got {self.x0!r}")

    @property
    def stationary_start(self):
        return self.x0 is None

    def fixed_x0(self):
        """Return x0 as a float, raising if the start is stationary."""
        if self.x0 is None:
            raise ParameterError("operation requires a fixed x0")
        return float(self.x0)


@dataclass(frozen=True)
class AsymParams:
    """Exponential tail rate and prefactor of the stationary law.

    alpha     : (sqrt(c^2 + 2*lam*sigma^2) - c) / sigma^2 > 0
    prefactor : (sqrt(c^2 + 2*lam*sigma^2) + c) / (2*sqrt(c^2 + 2*lam*sigma^2))
    """

    alpha: float
    prefactor: float

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ParameterError(f"alpha must be > 0, got {self.alpha}")
