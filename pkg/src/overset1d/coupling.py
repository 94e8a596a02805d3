r"""Interface and interior penalties coupling the two overset solutions.

At each artificial interface the penalties acting on the ``U`` and ``V``
equations are

.. math::

    P_u = \beta\,(f^{ec}(u, v) - f(u)), \qquad
    P_v = -\beta\,(f^{ec}(u, v) - f(v)),

with ``beta = eta`` at ``x = b`` and ``beta = 1 - eta`` at ``x = c``. With an
entropy-conservative two-point flux these make the interface terms of both
the conservation and the entropy balance vanish, which the checkers below
evaluate directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from overset1d.systems import ConservationLawSystem, _checked

Array = np.ndarray

#: per-entry tolerance of the interior-penalty coupling condition
COUPLING_TOLERANCE = 1.0e-14


@dataclass(frozen=True)
class InterfaceSide:
    """One of the two artificial interfaces, ``B`` at ``x = b`` or ``C`` at
    ``x = c``. The outward normal of the overlap points to ``-x`` at ``b``
    and ``+x`` at ``c``."""

    which: Literal["B", "C"]

    def __post_init__(self):
        if self.which not in ("B", "C"):
            raise ValueError(f"interface side must be 'B' or 'C': {self.which!r}")

    @property
    def normal_sign(self) -> float:
        return -1.0 if self.which == "B" else 1.0


SIDE_B = InterfaceSide("B")
SIDE_C = InterfaceSide("C")


def _side(side: InterfaceSide | str) -> InterfaceSide:
    return side if isinstance(side, InterfaceSide) else InterfaceSide(side)


def _check_eta(eta: float) -> None:
    if not (0.0 < eta < 1.0):
        raise ValueError(f"eta must lie in (0,1): got {eta}")


def beta(side: InterfaceSide | str, eta: float) -> float:
    """Interface weight: ``eta`` at ``b``, ``1 - eta`` at ``c``."""
    _check_eta(eta)
    side = _side(side)
    # beta = -eta n_b at b and (1 - eta) n_c at c, projected on the normal
    return eta if side.which == "B" else 1.0 - eta


def penalty_u(sys: ConservationLawSystem, side, eta: float, q_u: Array, q_v: Array) -> Array:
    q_u, q_v = _checked(sys, q_u, q_v)
    return beta(side, eta) * (sys.ec_flux(q_u, q_v) - sys.flux(q_u))


def penalty_v(sys: ConservationLawSystem, side, eta: float, q_u: Array, q_v: Array) -> Array:
    q_u, q_v = _checked(sys, q_u, q_v)
    return -beta(side, eta) * (sys.ec_flux(q_u, q_v) - sys.flux(q_v))


def interface_dissipation_term(
    sys: ConservationLawSystem, kappa: float, q_u: Array, q_v: Array
) -> tuple[Array, Array]:
    """Linear entropy-variable penalties ``(kappa [[w]], -kappa [[w]])`` added
    to ``(P_u, P_v)``. They cancel in the conservation sum and add
    ``kappa |[[w]]|^2`` to the entropy budget."""
    if kappa < 0:
        raise ValueError(f"interface dissipation must be non-negative: kappa = {kappa}")
    q_u, q_v = _checked(sys, q_u, q_v)

    dw = sys.entropy_variables(q_u) - sys.entropy_variables(q_v)
    return kappa * dw, -kappa * dw


def conservation_residual(sys: ConservationLawSystem, side, eta: float, q_u: Array, q_v: Array) -> Array:
    """``beta (f(u) - f(v)) + P_u + P_v``, which must vanish."""
    q_u, q_v = _checked(sys, q_u, q_v)
    b = beta(side, eta)
    return (
        b * (sys.flux(q_u) - sys.flux(q_v))
        + penalty_u(sys, side, eta, q_u, q_v)
        + penalty_v(sys, side, eta, q_u, q_v)
    )


def entropy_budget_B(
    sys: ConservationLawSystem,
    side,
    eta: float,
    q_u: Array,
    q_v: Array,
    kappa: float = 0.0,
) -> Array:
    """Interface entropy term
    ``beta (f^eps(u) - f^eps(v)) + w_u^T P_u + w_v^T P_v``.

    Zero for the entropy-conservative penalties; ``kappa > 0`` adds the
    dissipation term of :func:`interface_dissipation_term`.
    """
    q_u, q_v = _checked(sys, q_u, q_v)
    b = beta(side, eta)

    p_u = penalty_u(sys, side, eta, q_u, q_v)
    p_v = penalty_v(sys, side, eta, q_u, q_v)
    if kappa:
        d_u, d_v = interface_dissipation_term(sys, kappa, q_u, q_v)
        p_u = p_u + d_u
        p_v = p_v + d_v

    w_u = sys.entropy_variables(q_u)
    w_v = sys.entropy_variables(q_v)
    return (
        b * (sys.entropy_flux(q_u) - sys.entropy_flux(q_v))
        + np.sum(w_u * p_u, axis=-1)
        + np.sum(w_v * p_v, axis=-1)
    )


# {{{ interior penalties


def _is_spd(m: Array) -> bool:
    if not np.allclose(m, m.T, rtol=0.0, atol=COUPLING_TOLERANCE * max(1.0, np.abs(m).max())):
        return False
    return bool(np.all(np.linalg.eigvalsh(0.5 * (m + m.T)) > 0.0))


@dataclass(frozen=True)
class PenaltyConfig:
    """Interior-penalty points and matrices plus interface dissipation.

    Use :meth:`from_sigma` to derive the ``V`` matrices from the coupling
    condition ``(1 - eta) Sigma_u = eta Sigma_v``; passing both explicitly is
    allowed but validated.
    """

    eta: float = 0.5
    interior_points: tuple[float, ...] = ()
    sigma_u: tuple[Array, ...] = field(default=(), repr=False)
    sigma_v: tuple[Array, ...] = field(default=(), repr=False)
    kappa: float = 0.0

    def __post_init__(self):
        _check_eta(self.eta)
        if self.kappa < 0:
            raise ValueError(f"interface dissipation must be non-negative: kappa = {self.kappa}")

        m = len(self.interior_points)
        if len(self.sigma_u) != m or len(self.sigma_v) != m:
            raise ValueError(
                f"need one penalty matrix per interior point: {m} points, "
                f"{len(self.sigma_u)} Sigma_u, {len(self.sigma_v)} Sigma_v"
            )

        sigma_u = tuple(np.atleast_2d(np.asarray(s, dtype=np.float64)) for s in self.sigma_u)
        sigma_v = tuple(np.atleast_2d(np.asarray(s, dtype=np.float64)) for s in self.sigma_v)
        for i, (su, sv) in enumerate(zip(sigma_u, sigma_v)):
            if not (_is_spd(su) and _is_spd(sv)):
                raise ValueError(f"penalty matrices at point {i} must be symmetric positive definite")
            mismatch = np.abs((1.0 - self.eta) * su - self.eta * sv).max()
            if mismatch > COUPLING_TOLERANCE * max(1.0, np.abs(su).max()):
                raise ValueError(
                    f"coupling condition (1-eta) Sigma_u = eta Sigma_v violated at "
                    f"point {i}: max mismatch {mismatch:.3e}"
                )

        object.__setattr__(self, "interior_points", tuple(float(x) for x in self.interior_points))
        object.__setattr__(self, "sigma_u", sigma_u)
        object.__setattr__(self, "sigma_v", sigma_v)

    @property
    def n_points(self) -> int:
        return len(self.interior_points)

    @classmethod
    def from_sigma(
        cls,
        eta: float,
        interior_points: Sequence[float],
        sigma_u: Array | Sequence[Array],
        kappa: float = 0.0,
    ) -> PenaltyConfig:
        """Build from the ``U`` matrices alone; a single matrix is reused at
        every point."""
        _check_eta(eta)
        points = tuple(interior_points)

        if isinstance(sigma_u, np.ndarray) or np.isscalar(sigma_u):
            sigma_u = [np.atleast_2d(np.asarray(sigma_u, dtype=np.float64))] * len(points)
        sigma_u = tuple(np.atleast_2d(np.asarray(s, dtype=np.float64)) for s in sigma_u)
        sigma_v = tuple((1.0 - eta) / eta * s for s in sigma_u)

        return cls(eta=eta, interior_points=points, sigma_u=sigma_u, sigma_v=sigma_v, kappa=kappa)

    @classmethod
    def scalar(
        cls,
        eta: float,
        b: float,
        c: float,
        n_points: int,
        sigma: float,
        nvars: int,
        kappa: float = 0.0,
    ) -> PenaltyConfig:
        """*n_points* equispaced points strictly inside ``(b, c)`` with
        ``Sigma_u = sigma I``."""
        h = (c - b) / n_points if n_points else 0.0
        points = [b + (m + 0.5) * h for m in range(n_points)]
        return cls.from_sigma(eta, points, sigma * np.eye(nvars), kappa=kappa)


def interior_penalty(
    sys: ConservationLawSystem,
    cfg: PenaltyConfig,
    m: int,
    q_u: Array,
    q_v: Array,
) -> tuple[Array, Array]:
    """Penalty vectors ``(Sigma_u [[w]], -Sigma_v [[w]])`` at point *m*,
    before the ``1/M`` lifting factor."""
    q_u, q_v = _checked(sys, q_u, q_v)
    dw = sys.entropy_variables(q_u) - sys.entropy_variables(q_v)
    return dw @ cfg.sigma_u[m].T, -(dw @ cfg.sigma_v[m].T)


def interior_penalty_production(
    sys: ConservationLawSystem,
    cfg: PenaltyConfig,
    m: int,
    q_u: Array,
    q_v: Array,
) -> Array:
    """Entropy production
    ``(1-eta) w_u^T Sigma_u [[w]] + eta w_v^T Sigma_v (w_v - w_u)``."""
    q_u, q_v = _checked(sys, q_u, q_v)
    term_u, term_v = interior_penalty(sys, cfg, m, q_u, q_v)
    w_u = sys.entropy_variables(q_u)
    w_v = sys.entropy_variables(q_v)
    return (1.0 - cfg.eta) * np.sum(w_u * term_u, axis=-1) + cfg.eta * np.sum(w_v * term_v, axis=-1)


def interior_penalty_quadratic(
    sys: ConservationLawSystem,
    cfg: PenaltyConfig,
    m: int,
    q_u: Array,
    q_v: Array,
) -> Array:
    """``(1-eta) [[w]]^T Sigma_u [[w]]``, equal to
    :func:`interior_penalty_production` under the coupling condition."""
    q_u, q_v = _checked(sys, q_u, q_v)
    dw = sys.entropy_variables(q_u) - sys.entropy_variables(q_v)
    return (1.0 - cfg.eta) * np.sum(dw * (dw @ cfg.sigma_u[m].T), axis=-1)


# }}}
