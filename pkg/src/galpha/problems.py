"""Test systems: scalar decay modes and a 1D linear-FEM heat harness.

All systems share one shape: M u' + K u = F(t) with symmetric M (positive
definite) and K (positive semidefinite), plus analytic time derivatives of the
forcing up to any order the integrator requests.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .exceptions import ConfigurationError

__all__ = [
    "SemiDiscreteSystem",
    "ManufacturedCase",
    "scalar_mode",
    "heat_fem_1d",
    "manufactured_heat",
    "l2_error",
]


@dataclass
class SemiDiscreteSystem:
    """Matrices and forcing of M u' + K u = F.

    forcing(m, t) returns the m-th time derivative F^(m)(t) as a length-n
    vector; m_max is the highest available derivative order (None: unlimited).
    tridiagonal marks systems whose matrices are tridiagonal so solvers can
    use banded factorizations.
    """

    n: int
    M: np.ndarray
    K: np.ndarray
    forcing: object
    m_max: object = None
    tridiagonal: bool = False
    lambda_theta: object = None

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)
        self.K = np.asarray(self.K, dtype=float)
        n = self.n
        if self.M.shape != (n, n) or self.K.shape != (n, n):
            raise ConfigurationError(
                "expected %d x %d matrices, got M%s and K%s"
                % (n, n, self.M.shape, self.K.shape)
            )
        for name, A in (("mass", self.M), ("stiffness", self.K)):
            if not np.allclose(A, A.T, rtol=1e-12, atol=1e-12):
                raise ConfigurationError("%s matrix is not symmetric" % name)

    def forcing_derivative(self, m, t):
        """F^(m)(t), guarding the available derivative order."""
        if self.m_max is not None and m > self.m_max:
            raise ConfigurationError(
                "forcing derivative of order %d requested, but the system "
                "provides m_max = %d" % (m, self.m_max)
            )
        return np.asarray(self.forcing(m, t), dtype=float)


def scalar_mode(lambda_theta):
    """Single-dof decay mode: M = [1], K = [lambda], F = 0."""
    lam = float(lambda_theta)
    if lam <= 0:
        raise ConfigurationError("lambda_theta must be positive, got %r" % (lambda_theta,))

    def zero_forcing(m, t):
        return np.zeros(1)

    return SemiDiscreteSystem(
        n=1,
        M=np.array([[1.0]]),
        K=np.array([[lam]]),
        forcing=zero_forcing,
        m_max=None,
        tridiagonal=False,
        lambda_theta=lam,
    )


def _assemble_fem(elements, kappa):
    """Element-loop assembly of interior-dof M and K on a uniform mesh of (0,1)."""
    ne = int(elements)
    h = 1.0 / ne
    n = ne - 1
    Me = h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    Ke = kappa / h * np.array([[1.0, -1.0], [-1.0, 1.0]])
    M = np.zeros((n, n))
    K = np.zeros((n, n))
    for e in range(ne):
        for a in range(2):
            ia = e + a - 1  # interior index of global node e + a
            if not 0 <= ia < n:
                continue
            for b in range(2):
                ib = e + b - 1
                if not 0 <= ib < n:
                    continue
                M[ia, ib] += Me[a, b]
                K[ia, ib] += Ke[a, b]
    return M, K, h


def heat_fem_1d(elements, kappa):
    """Linear-element discretization of u_t = kappa u_xx on (0,1), u(0)=u(1)=0.

    Returns the interior-dof system with zero forcing; manufactured cases
    attach their load vectors through ManufacturedCase.assemble.
    """
    if elements < 2:
        raise ConfigurationError("need at least 2 elements, got %r" % (elements,))
    if kappa <= 0:
        raise ConfigurationError("kappa must be positive, got %r" % (kappa,))
    M, K, _ = _assemble_fem(elements, float(kappa))

    def zero_forcing(m, t):
        return np.zeros(M.shape[0])

    return SemiDiscreteSystem(
        n=M.shape[0], M=M, K=K, forcing=zero_forcing,
        m_max=None, tridiagonal=True,
    )


_GAUSS2 = (-1.0 / sqrt(3.0), 1.0 / sqrt(3.0))


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact solution with analytic forcing derivatives for the heat harness."""

    name: str
    kappa: float
    u: object       # u(x, t)
    u_t: object     # du/dt
    u_xx: object    # d2u/dx2
    f: object       # forcing f = u_t - kappa u_xx
    f_dt: object    # f_dt(m, x, t) = m-th time derivative of f
    u0: object      # u(x, 0)

    def assemble(self, elements):
        """Interior-dof system for this case with Gauss-quadrature load vectors."""
        base = heat_fem_1d(elements, self.kappa)

        def forcing(m, t):
            return _case_load(elements, self.f_dt, m, t)

        return SemiDiscreteSystem(
            n=base.n, M=base.M, K=base.K, forcing=forcing,
            m_max=None, tridiagonal=True,
        )


def _case_load(elements, f_dt, m, t):
    """Load vector of the m-th forcing time derivative at time t."""
    ne = int(elements)
    h = 1.0 / ne
    n = ne - 1
    F = np.zeros(n)
    left = np.arange(ne) * h
    idx = np.arange(ne)
    for xi in _GAUSS2:
        xg = left + h * (xi + 1.0) / 2.0
        vals = f_dt(m, xg, t) * (h / 2.0)
        # node e gets the (1-xi)/2 share, node e+1 the (1+xi)/2 share
        for nodes, share in ((idx, (1.0 - xi) / 2.0), (idx + 1, (1.0 + xi) / 2.0)):
            interior = (nodes >= 1) & (nodes <= n)
            np.add.at(F, nodes[interior] - 1, vals[interior] * share)
    return F


def manufactured_heat(case_id, kappa=1.0):
    """Built-in manufactured solutions. Known case ids: 'sin-decay'.

    sin-decay: u(x, t) = sin(pi x) exp(-t), so f = (kappa pi^2 - 1) sin(pi x)
    exp(-t) and every time derivative just flips sign. With kappa = 1/pi^2 the
    forcing vanishes identically (pure decay of the first Laplace mode).
    """
    if case_id != "sin-decay":
        raise ConfigurationError(
            "unknown manufactured case %r; available: 'sin-decay'" % (case_id,)
        )
    kap = float(kappa)
    if kap <= 0:
        raise ConfigurationError("kappa must be positive, got %r" % (kappa,))
    amp = kap * pi ** 2 - 1.0

    def u(x, t):
        return np.sin(pi * np.asarray(x)) * np.exp(-t)

    def u_t(x, t):
        return -u(x, t)

    def u_xx(x, t):
        return -pi ** 2 * u(x, t)

    def f(x, t):
        return amp * np.sin(pi * np.asarray(x)) * np.exp(-t)

    def f_dt(m, x, t):
        return (-1.0) ** m * f(x, t)

    def u0(x):
        return np.sin(pi * np.asarray(x))

    return ManufacturedCase(
        name="sin-decay", kappa=kap, u=u, u_t=u_t, u_xx=u_xx, f=f, f_dt=f_dt, u0=u0,
    )


def l2_error(U_h, case, t):
    """Mass-weighted norm of U_h minus the nodal interpolant of case.u at time t.

    The mesh is inferred from the vector length (n interior dofs of a uniform
    mesh with n + 1 elements).
    """
    U = np.asarray(U_h, dtype=float)
    if U.ndim != 1 or U.size < 1:
        raise ConfigurationError("U_h must be a nonempty vector, got shape %s" % (U.shape,))
    n = U.size
    ne = n + 1
    h = 1.0 / ne
    x = (np.arange(1, n + 1)) * h
    e = U - case.u(x, t)
    M, _, _ = _assemble_fem(ne, 1.0)
    return float(np.sqrt(e @ (M @ e)))
