"""Isotropic elastic media and incident plane waves."""

from dataclasses import dataclass

import numpy as np

# Rotation used for normals (n = Q t) and for the shear polarisation.
Q = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class ElasticMedium:
    """Lame parameters ``lam``, ``mu``, density ``rho`` and circular frequency ``omega``."""

    lam: float
    mu: float
    rho: float
    omega: float

    def __post_init__(self):
        if not (self.mu > 0 and self.rho > 0 and self.omega > 0 and self.lam + self.mu > 0):
            raise ValueError(
                f"invalid medium: need mu > 0, rho > 0, omega > 0, lam + mu > 0 (got {self})"
            )

    @property
    def kp(self) -> float:
        return wavenumbers(self)[0]

    @property
    def ks(self) -> float:
        return wavenumbers(self)[1]

    @property
    def tau(self) -> float:
        return tau(self)

    @property
    def c(self) -> float:
        """Static hypersingular scale ``mu (lam + mu) / (lam + 2 mu)``."""
        return self.mu * (self.lam + self.mu) / (self.lam + 2.0 * self.mu)


def wavenumbers(medium):
    """Return ``(k_p, k_s)``."""
    rw2 = medium.rho * medium.omega**2
    a = rw2 / (medium.lam + 2.0 * medium.mu)
    b = rw2 / medium.mu
    if not (a > 0 and b > 0):
        raise ValueError("non-positive squared wavenumber")
    return float(np.sqrt(a)), float(np.sqrt(b))


def tau(medium):
    lam, mu = medium.lam, medium.mu
    return (lam + 2.0 * mu) / (mu * (lam + mu))


@dataclass(frozen=True)
class IncidentWave:
    kind: str  # "P" or "S"
    direction: tuple

    def __post_init__(self):
        if self.kind not in ("P", "S"):
            raise ValueError(f"wave kind must be 'P' or 'S', got {self.kind!r}")
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (2,) or abs(np.hypot(*d) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit 2-vector")
        object.__setattr__(self, "direction", (float(d[0]), float(d[1])))

    @classmethod
    def at_angle(cls, kind, angle):
        return cls(kind, (np.cos(angle), np.sin(angle)))

    @property
    def d(self):
        return np.array(self.direction)

    def polarization(self):
        return self.d if self.kind == "P" else -Q @ self.d

    def wavenumber(self, medium):
        kp, ks = wavenumbers(medium)
        return kp if self.kind == "P" else ks


def incident_field(wave, medium, x):
    """Plane wave displacement at points ``x`` (shape ``(..., 2)``)."""
    x = np.asarray(x, dtype=float)
    k = wave.wavenumber(medium)
    phase = np.exp(1j * k * (x @ wave.d))
    return phase[..., None] * wave.polarization()


def incident_traction(wave, medium, x, normal):
    """Traction ``lam n div u + mu (grad u + grad u^T) n`` of the plane wave."""
    x = np.asarray(x, dtype=float)
    n = np.asarray(normal, dtype=float)
    k = wave.wavenumber(medium)
    d = wave.d
    p = wave.polarization()
    phase = np.exp(1j * k * (x @ d))
    dn = n @ d
    pn = n @ p
    lam, mu = medium.lam, medium.mu
    # grad u = i k e p d^T ; div u = i k e (p.d)
    t = (lam * (p @ d)) * n + mu * (p * dn[..., None] + d * pn[..., None])
    return 1j * k * phase[..., None] * t
