"""Corpus of small systems used by the checks, the CLI and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lagrangian import LagrangianSystem


@dataclass(frozen=True)
class AircraftParams:
    m: float = 2.0
    g: float = 9.81
    gh: float = 0.5
    gv: float = 0.8
    v0: float = 10.0
    T: float = 5.0

    def as_dict(self) -> dict[str, float]:
        return {"m": self.m, "g": self.g, "gh": self.gh, "gv": self.gv, "v0": self.v0}


AIRCRAFT = AircraftParams()
AIRCRAFT_LAGRANGIAN = "0.5*m*(v1^2 + v2^2) - m*g*x2"
AIRCRAFT_RHO = ("gh*v1", "gv*v2")


def aircraft(params: AircraftParams = AIRCRAFT) -> LagrangianSystem:
    """Point mass in a vertical plane with linear horizontal and vertical drag."""
    return LagrangianSystem.from_text(
        2, AIRCRAFT_LAGRANGIAN, AIRCRAFT_RHO, params.as_dict(), name="aircraft"
    )


def aircraft_position(t, a: AircraftParams = AIRCRAFT) -> np.ndarray:
    """Closed-form free flight from the origin with initial velocity (v0, 0)."""
    t = np.asarray(t, float)
    eh = np.exp(-a.gh * t / a.m)
    ev = np.exp(-a.gv * t / a.m)
    xh = a.m * a.v0 / a.gh * (1.0 - eh)
    xv = a.m**2 * a.g / a.gv**2 * (1.0 - ev) - a.m * a.g / a.gv * t
    return np.stack([xh, xv], axis=-1)


def aircraft_velocity(t, a: AircraftParams = AIRCRAFT) -> np.ndarray:
    t = np.asarray(t, float)
    vh = a.v0 * np.exp(-a.gh * t / a.m)
    vv = a.m * a.g / a.gv * (np.exp(-a.gv * t / a.m) - 1.0)
    return np.stack([vh, vv], axis=-1)


def aircraft_momentum(t, a: AircraftParams = AIRCRAFT) -> np.ndarray:
    return a.m * aircraft_velocity(t, a)


def aircraft_steady_force(a: AircraftParams = AIRCRAFT) -> tuple[float, float]:
    """Force that keeps the aircraft at (v0 t, 0): thrust against drag plus lift."""
    return a.gh * a.v0, a.m * a.g


def free_particle(dim: int = 2, mass: float = 1.5) -> LagrangianSystem:
    text = "0.5*m*(" + " + ".join(f"v{k}^2" for k in range(1, dim + 1)) + ")"
    return LagrangianSystem.from_text(dim, text, None, {"m": mass}, name="free particle")


def damped_oscillator(m: float = 1.0, k: float = 4.0, c: float = 0.3) -> LagrangianSystem:
    return LagrangianSystem.from_text(
        1, "0.5*m*v1^2 - 0.5*k*x1^2", ["c*v1"], {"m": m, "k": k, "c": c}, name="damped oscillator"
    )


def oscillator(m: float = 1.0, k: float = 4.0) -> LagrangianSystem:
    return LagrangianSystem.from_text(
        1, "0.5*m*v1^2 - 0.5*k*x1^2", None, {"m": m, "k": k}, name="oscillator"
    )


def pendulum(m: float = 1.2, l: float = 0.7, g: float = 9.81) -> LagrangianSystem:
    return LagrangianSystem.from_text(
        1, "0.5*m*l^2*v1^2 + m*g*l*cos(x1)", None, {"m": m, "l": l, "g": g}, name="pendulum"
    )


def relativistic_particle(m: float = 1.0, c: float = 3.0) -> LagrangianSystem:
    """Non-quadratic kinetic term; Legendre inversion needs real Newton steps."""
    return LagrangianSystem.from_text(
        1, "-m*c^2*sqrt(1 - v1^2/c^2)", ["0.1*v1^3"], {"m": m, "c": c}, name="relativistic particle"
    )


def corpus() -> list[LagrangianSystem]:
    """The four reference systems."""
    return [aircraft(), free_particle(), damped_oscillator(), pendulum()]


def oscillator_period(m: float = 1.0, k: float = 4.0) -> float:
    return 2.0 * math.pi * math.sqrt(m / k)


__all__ = [
    "AIRCRAFT",
    "AIRCRAFT_LAGRANGIAN",
    "AIRCRAFT_RHO",
    "AircraftParams",
    "aircraft",
    "aircraft_momentum",
    "aircraft_position",
    "aircraft_steady_force",
    "aircraft_velocity",
    "corpus",
    "damped_oscillator",
    "free_particle",
    "oscillator",
    "oscillator_period",
    "pendulum",
    "relativistic_particle",
]
