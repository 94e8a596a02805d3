"""Conservation-law systems with their entropy machinery.

Every system works on arrays whose last axis holds the ``p`` conserved
components, so a single state has shape ``(p,)`` and a grid of cell averages
has shape ``(n, p)``. All methods are pure and vectorized over the leading
axes.

Three systems are provided:

* :class:`Burgers` -- ``s = q^2/2``, ``f^eps = q^3/3``.
* :class:`ShallowWater` -- flat bottom, entropy is the total energy,
  Fjordholm-Mishra-Tadmor two-point flux.
* :class:`Euler` -- ideal gas, entropy ``-rho * (ln p - gamma ln rho)/(gamma - 1)``,
  Chandrashekar kinetic-energy-preserving two-point flux.

The two-point fluxes are only trusted through the jump-condition check in
:func:`jump_condition_residual`; see the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np

Array = np.ndarray

#: states closer than this to a positivity constraint are rejected
ADMISSIBILITY_MARGIN = 1.0e-12


class AdmissibilityError(ValueError):
    """Raised when a state violates a system's admissibility constraint.

    .. attribute:: constraint

        Short name of the violated constraint, e.g. ``"h > 0"``.

    .. attribute:: index

        Index into the leading axes of the offending state, if known.
    """

    def __init__(self, constraint: str, index: Any = None, value: float | None = None):
        self.constraint = constraint
        self.index = index
        self.value = value

        msg = f"inadmissible state: violates '{constraint}'"
        if index is not None:
            msg += f" at index {index}"
        if value is not None:
            msg += f" (value {value!r})"
        super().__init__(msg)


def _first_bad(mask: Array) -> Any:
    idx = np.argwhere(mask)
    if idx.size == 0:
        return None
    first = tuple(int(i) for i in idx[0])
    return first[0] if len(first) == 1 else first


def _average(a: Array, b: Array) -> Array:
    return 0.5 * (a + b)


def log_mean(a: Array, b: Array) -> Array:
    """Logarithmic mean ``(b - a) / (ln b - ln a)`` of positive arrays.

    Uses the series of Ismail and Roe when the arguments are close. The
    arguments are sorted first so the result is bitwise symmetric.
    """
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)

    zeta = lo / hi
    f = (zeta - 1.0) / (zeta + 1.0)
    u = f * f

    with np.errstate(divide="ignore", invalid="ignore"):
        exact = (hi - lo) / np.log(hi / lo)
    series = (lo + hi) / (2.0 * (1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0))

    return np.where(u < 1.0e-4, series, exact)


@dataclass(frozen=True)
class ConservationLawSystem:
    """Base class bundling flux, entropy pair, entropy variables, potential
    and entropy-conservative two-point flux of a 1D system."""

    name: ClassVar[str] = ""
    nvars: ClassVar[int] = 0
    #: names of the conserved components, used in CSV headers and plots
    component_names: ClassVar[tuple[str, ...]] = ()

    @property
    def parameters(self) -> dict[str, float]:
        return {}

    # {{{ interface

    def check_admissible(self, q: Array) -> None:
        q = np.asarray(q, dtype=np.float64)
        if q.shape[-1] != self.nvars:
            raise ValueError(
                f"{self.name}: expected {self.nvars} components, got shape {q.shape}"
            )
        bad = ~np.all(np.isfinite(q), axis=-1)
        if np.any(bad):
            raise AdmissibilityError("finite", _first_bad(bad))

    def flux(self, q: Array) -> Array:
        raise NotImplementedError

    def entropy(self, q: Array) -> Array:
        raise NotImplementedError

    def entropy_flux(self, q: Array) -> Array:
        raise NotImplementedError

    def entropy_variables(self, q: Array) -> Array:
        raise NotImplementedError

    def potential(self, q: Array) -> Array:
        """Closed form of ``psi = w^T f - f^eps``."""
        raise NotImplementedError

    def _ec_flux(self, ql: Array, qr: Array) -> Array:
        raise NotImplementedError

    def max_wave_speed(self, q: Array) -> Array:
        raise NotImplementedError

    # }}}

    def ec_flux(self, ql: Array, qr: Array) -> Array:
        """Symmetric entropy-conservative two-point flux.

        Equal arguments go through :meth:`flux` so that consistency holds
        bitwise.
        """
        ql = np.asarray(ql, dtype=np.float64)
        qr = np.asarray(qr, dtype=np.float64)
        same = np.all(ql == qr, axis=-1, keepdims=True)
        fec = self._ec_flux(ql, qr)
        if np.any(same):
            fec = np.where(same, self.flux(ql), fec)
        return fec

    def random_states(self, rng: np.random.Generator, n: int) -> Array:
        """Uniform samples from a documented admissible box."""
        raise NotImplementedError


@dataclass(frozen=True)
class Burgers(ConservationLawSystem):
    name: ClassVar[str] = "burgers"
    nvars: ClassVar[int] = 1
    component_names: ClassVar[tuple[str, ...]] = ("u",)

    #: sampling box for property tests
    box: ClassVar[tuple[float, float]] = (-2.0, 2.0)

    def flux(self, q):
        return 0.5 * q * q

    def entropy(self, q):
        return 0.5 * q[..., 0] ** 2

    def entropy_flux(self, q):
        return q[..., 0] ** 3 / 3.0

    def entropy_variables(self, q):
        return np.array(q, dtype=np.float64, copy=True)

    def potential(self, q):
        return q[..., 0] ** 3 / 6.0

    def _ec_flux(self, ql, qr):
        # (u^2 + v^2) + uv keeps the argument swap bitwise symmetric
        return ((ql * ql + qr * qr) + ql * qr) / 6.0

    def max_wave_speed(self, q):
        return np.abs(q[..., 0])

    def random_states(self, rng, n):
        return rng.uniform(*self.box, size=(n, 1))


@dataclass(frozen=True)
class ShallowWater(ConservationLawSystem):
    """Shallow water over a flat bottom, ``q = (h, hu)``."""

    name: ClassVar[str] = "shallow_water"
    nvars: ClassVar[int] = 2
    component_names: ClassVar[tuple[str, ...]] = ("h", "hu")

    g: float = 9.81

    box_h: ClassVar[tuple[float, float]] = (0.1, 2.0)
    box_u: ClassVar[tuple[float, float]] = (-1.0, 1.0)

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"gravity must be positive: {self.g}")

    @property
    def parameters(self):
        return {"g": self.g}

    def check_admissible(self, q):
        super().check_admissible(q)
        h = np.asarray(q)[..., 0]
        bad = ~(h > ADMISSIBILITY_MARGIN)
        if np.any(bad):
            i = _first_bad(bad)
            raise AdmissibilityError("h > 0", i, float(h[i]) if h.ndim else float(h))

    def _primitive(self, q):
        h = q[..., 0]
        return h, q[..., 1] / h

    def flux(self, q):
        h, u = self._primitive(q)
        hu = q[..., 1]
        return np.stack([hu, hu * u + 0.5 * self.g * h * h], axis=-1)

    def entropy(self, q):
        h, u = self._primitive(q)
        return 0.5 * h * u * u + 0.5 * self.g * h * h

    def entropy_flux(self, q):
        h, u = self._primitive(q)
        return 0.5 * h * u**3 + self.g * h * h * u

    def entropy_variables(self, q):
        h, u = self._primitive(q)
        return np.stack([self.g * h - 0.5 * u * u, u], axis=-1)

    def potential(self, q):
        h, u = self._primitive(q)
        return 0.5 * self.g * h * h * u

    def _ec_flux(self, ql, qr):
        hl, ul = self._primitive(ql)
        hr, ur = self._primitive(qr)

        h_avg = _average(hl, hr)
        u_avg = _average(ul, ur)
        h2_avg = _average(hl * hl, hr * hr)

        fh = h_avg * u_avg
        return np.stack([fh, fh * u_avg + 0.5 * self.g * h2_avg], axis=-1)

    def max_wave_speed(self, q):
        h, u = self._primitive(q)
        return np.abs(u) + np.sqrt(self.g * h)

    def random_states(self, rng, n):
        h = rng.uniform(*self.box_h, size=n)
        u = rng.uniform(*self.box_u, size=n)
        return np.stack([h, h * u], axis=-1)


@dataclass(frozen=True)
class Euler(ConservationLawSystem):
    """Ideal-gas Euler equations, ``q = (rho, rho u, E)``."""

    name: ClassVar[str] = "euler"
    nvars: ClassVar[int] = 3
    component_names: ClassVar[tuple[str, ...]] = ("rho", "rhou", "E")

    gamma: float = 1.4

    box_rho: ClassVar[tuple[float, float]] = (0.1, 2.0)
    box_u: ClassVar[tuple[float, float]] = (-1.0, 1.0)
    box_p: ClassVar[tuple[float, float]] = (0.1, 2.0)

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1: {self.gamma}")

    @property
    def parameters(self):
        return {"gamma": self.gamma}

    def pressure(self, q):
        rho = q[..., 0]
        m = q[..., 1]
        return (self.gamma - 1.0) * (q[..., 2] - 0.5 * m * m / rho)

    def check_admissible(self, q):
        super().check_admissible(q)
        q = np.asarray(q)
        rho = q[..., 0]
        bad = ~(rho > ADMISSIBILITY_MARGIN)
        if np.any(bad):
            i = _first_bad(bad)
            raise AdmissibilityError("rho > 0", i, float(rho[i]) if rho.ndim else float(rho))

        p = self.pressure(q)
        bad = ~(p > ADMISSIBILITY_MARGIN)
        if np.any(bad):
            i = _first_bad(bad)
            raise AdmissibilityError("p > 0", i, float(p[i]) if p.ndim else float(p))

    def _primitive(self, q):
        rho = q[..., 0]
        u = q[..., 1] / rho
        return rho, u, self.pressure(q)

    def physical_entropy(self, q):
        """Specific entropy ``ln p - gamma ln rho``."""
        rho, _, p = self._primitive(q)
        return np.log(p) - self.gamma * np.log(rho)

    def flux(self, q):
        rho, u, p = self._primitive(q)
        m = q[..., 1]
        return np.stack([m, m * u + p, u * (q[..., 2] + p)], axis=-1)

    def entropy(self, q):
        return -q[..., 0] * self.physical_entropy(q) / (self.gamma - 1.0)

    def entropy_flux(self, q):
        return q[..., 1] / q[..., 0] * self.entropy(q)

    def entropy_variables(self, q):
        rho, u, p = self._primitive(q)
        gm1 = self.gamma - 1.0
        sigma = self.physical_entropy(q)
        return np.stack(
            [
                (self.gamma - sigma) / gm1 - 0.5 * rho * u * u / p,
                rho * u / p,
                -rho / p,
            ],
            axis=-1,
        )

    def potential(self, q):
        return np.array(q[..., 1], copy=True)

    def _ec_flux(self, ql, qr):
        rhol, ul, pl = self._primitive(ql)
        rhor, ur, pr = self._primitive(qr)

        betal = 0.5 * rhol / pl
        betar = 0.5 * rhor / pr

        rho_ln = log_mean(rhol, rhor)
        beta_ln = log_mean(betal, betar)
        rho_avg = _average(rhol, rhor)
        beta_avg = _average(betal, betar)
        u_avg = _average(ul, ur)
        u2_avg = _average(ul * ul, ur * ur)

        f_rho = rho_ln * u_avg
        f_m = 0.5 * rho_avg / beta_avg + u_avg * f_rho
        f_e = f_rho * (0.5 / ((self.gamma - 1.0) * beta_ln) - 0.5 * u2_avg) + u_avg * f_m
        return np.stack([f_rho, f_m, f_e], axis=-1)

    def max_wave_speed(self, q):
        rho, u, p = self._primitive(q)
        return np.abs(u) + np.sqrt(self.gamma * p / rho)

    def random_states(self, rng, n):
        rho = rng.uniform(*self.box_rho, size=n)
        u = rng.uniform(*self.box_u, size=n)
        p = rng.uniform(*self.box_p, size=n)
        energy = p / (self.gamma - 1.0) + 0.5 * rho * u * u
        return np.stack([rho, rho * u, energy], axis=-1)


SYSTEMS: dict[str, type[ConservationLawSystem]] = {
    cls.name: cls for cls in (Burgers, ShallowWater, Euler)
}


def make_system(name: str, parameters: dict[str, float] | None = None) -> ConservationLawSystem:
    """Look up a system by name (``"burgers"``, ``"shallow_water"``,
    ``"euler"``) and instantiate it with *parameters*."""
    try:
        cls = SYSTEMS[name]
    except KeyError:
        raise ValueError(
            f"unknown system '{name}' (expected one of {sorted(SYSTEMS)})"
        ) from None

    return cls(**(parameters or {}))


# {{{ functional interface


def _checked(sys: ConservationLawSystem, *qs: Array) -> list[Array]:
    out = []
    for q in qs:
        q = np.asarray(q, dtype=np.float64)
        sys.check_admissible(q)
        out.append(q)
    return out


def physical_flux(sys: ConservationLawSystem, q: Array) -> Array:
    (q,) = _checked(sys, q)
    return sys.flux(q)


def entropy(sys: ConservationLawSystem, q: Array) -> Array:
    (q,) = _checked(sys, q)
    return sys.entropy(q)


def entropy_flux(sys: ConservationLawSystem, q: Array) -> Array:
    (q,) = _checked(sys, q)
    return sys.entropy_flux(q)


def entropy_variables(sys: ConservationLawSystem, q: Array) -> Array:
    (q,) = _checked(sys, q)
    return sys.entropy_variables(q)


def entropy_potential(sys: ConservationLawSystem, q: Array) -> Array:
    """Entropy flux potential ``psi = w^T f - f^eps`` from its definition."""
    (q,) = _checked(sys, q)
    return np.sum(sys.entropy_variables(q) * sys.flux(q), axis=-1) - sys.entropy_flux(q)


def ec_flux(sys: ConservationLawSystem, ql: Array, qr: Array) -> Array:
    ql, qr = _checked(sys, ql, qr)
    return sys.ec_flux(ql, qr)


@dataclass(frozen=True)
class JumpReport:
    """Residual of the jump condition ``[[w]]^T f^ec - [[psi]]`` for a pair
    of states, with ``[[x]] = x(qL) - x(qR)``."""

    state_pair: tuple[Array, Array]
    residual: Array
    relative_scale: Array = field(repr=False)

    @property
    def relative_residual(self) -> Array:
        return np.abs(self.residual) / self.relative_scale


def jump_condition_residual(sys: ConservationLawSystem, ql: Array, qr: Array) -> JumpReport:
    ql, qr = _checked(sys, ql, qr)

    dw = sys.entropy_variables(ql) - sys.entropy_variables(qr)
    psil = sys.potential(ql)
    psir = sys.potential(qr)
    residual = np.sum(dw * sys.ec_flux(ql, qr), axis=-1) - (psil - psir)

    scale = np.maximum(np.maximum(np.abs(psil), np.abs(psir)), 1.0)
    return JumpReport(state_pair=(ql, qr), residual=residual, relative_scale=scale)


def numerical_entropy_flux(sys: ConservationLawSystem, ql: Array, qr: Array) -> Array:
    """``{{w}}^T f^ec - {{psi}}``; reduces to ``f^eps`` for equal states."""
    ql, qr = _checked(sys, ql, qr)
    return _numerical_entropy_flux(sys, ql, qr)


def _numerical_entropy_flux(sys, ql, qr):
    w_avg = _average(sys.entropy_variables(ql), sys.entropy_variables(qr))
    psi_avg = _average(sys.potential(ql), sys.potential(qr))
    return np.sum(w_avg * sys.ec_flux(ql, qr), axis=-1) - psi_avg


# }}}
