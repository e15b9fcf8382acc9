"""The k-stage time march: initialization, one step, and the driving loop.

Per step, stage j = 1..k-1 solves (alpha_j M + gamma_j tau K) Q_j = rhs built
from Taylor predictors of the time-n state, and the last stage solves
(alpha_k M + alpha_f gamma_k tau K) D = rhs with the equation shifted to
t_n + alpha_f tau. Stages are mutually decoupled; they are processed in
descending order only for determinism. State entries are stored scaled,
block m holding tau^m u^(m), which makes every update dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.linalg import (
    LinAlgError,
    cho_factor,
    cho_solve,
    cho_solve_banded,
    cholesky_banded,
)

from .exceptions import ConfigurationError, LinearSolveError
from .params import validate_stability

__all__ = ["StateVector", "StepWorkspace", "init_state", "step", "integrate"]


@dataclass
class StateVector:
    """Scaled derivative stack: data[m] = tau^m u^(m), m = 0..2k-1."""

    k: int
    tau: float
    data: np.ndarray  # (2k, n)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[0] != 2 * self.k:
            raise ConfigurationError(
                "state needs shape (2k, n) = (%d, n), got %s" % (2 * self.k, self.data.shape)
            )

    @property
    def n(self):
        return self.data.shape[1]

    @property
    def u(self):
        """The unscaled solution block."""
        return self.data[0]

    def derivative(self, m):
        """Unscaled m-th time derivative."""
        if not 0 <= m < 2 * self.k:
            raise ConfigurationError("derivative order %d outside 0..%d" % (m, 2 * self.k - 1))
        return self.data[m] / self.tau ** m


class _Factorization:
    """Cholesky factor of one SPD stage matrix, dense or banded."""

    def __init__(self, S, banded):
        self.banded = banded
        try:
            if banded:
                n = S.shape[0]
                ab = np.zeros((2, n))
                ab[0, 1:] = np.diag(S, 1)
                ab[1, :] = np.diag(S)
                self.fac = cholesky_banded(ab, lower=False)
            else:
                self.fac = cho_factor(S, lower=False)
        except LinAlgError as exc:
            raise LinearSolveError("stage matrix factorization failed: %s" % exc) from exc

    def solve(self, rhs):
        if self.banded:
            return cho_solve_banded((self.fac, False), rhs)
        return cho_solve(self.fac, rhs)


@dataclass
class StepWorkspace:
    """Factorizations of the k stage matrices for a fixed (system, params, tau)."""

    params: object
    tau: float
    n: int
    factors: list
    n_factorizations: int = 0

    @classmethod
    def build(cls, system, params, tau):
        report = validate_stability(params)
        if not report.ok:
            raise ConfigurationError(
                "parameters violate the stability bounds: " + "; ".join(report.violations)
            )
        if tau <= 0:
            raise ConfigurationError("tau must be positive, got %r" % (tau,))
        ws = cls(params=params, tau=float(tau), n=system.n, factors=[])
        k = params.k
        for j in range(k):
            coef = params.gamma[j] * tau
            if j == k - 1:
                coef *= params.alpha_f
            S = params.alpha[j] * system.M + coef * system.K
            ws.factors.append(_Factorization(S, system.tridiagonal))
            ws.n_factorizations += 1
        return ws

    def matches(self, params, tau, n):
        return self.params == params and self.tau == tau and self.n == n


def init_state(system, U0, k, tau, t0=0.0):
    """Self-starting initialization: recover u^(m)(t0) from the equation.

    Differentiating M u' + K u = F gives M u^(m+1) = F^(m) - K u^(m), so the
    whole stack follows from U0 by repeated mass solves. Needs forcing
    derivatives through order 2k - 2.
    """
    if k < 1:
        raise ConfigurationError("stage count k must be >= 1, got %r" % (k,))
    if tau <= 0:
        raise ConfigurationError("tau must be positive, got %r" % (tau,))
    need = 2 * k - 2
    if system.m_max is not None and system.m_max < need:
        raise ConfigurationError(
            "stage count k = %d needs forcing derivatives through order %d; "
            "system provides m_max = %d" % (k, need, system.m_max)
        )
    U0 = np.asarray(U0, dtype=float)
    if U0.shape != (system.n,):
        raise ConfigurationError(
            "U0 must have shape (%d,), got %s" % (system.n, U0.shape)
        )
    fac = _Factorization(system.M, system.tridiagonal)
    data = np.empty((2 * k, system.n))
    data[0] = U0
    cur = U0
    scale = 1.0
    for m in range(1, 2 * k):
        rhs = system.forcing_derivative(m - 1, t0) - system.K @ cur
        cur = fac.solve(rhs)
        scale *= tau
        data[m] = scale * cur
    return StateVector(k=k, tau=float(tau), data=data)


def step(state, system, params, t_n, tau, ws):
    """Advance the state from t_n to t_n + tau."""
    k = params.k
    if state.k != k:
        raise ConfigurationError("state has k = %d, params have k = %d" % (state.k, k))
    if not ws.matches(params, tau, system.n):
        raise ConfigurationError("workspace does not match (params, tau, system)")
    if state.tau != tau:
        raise ConfigurationError(
            "state was scaled with tau = %r, step called with tau = %r" % (state.tau, tau)
        )
    W = state.data
    nblocks = 2 * k
    new = np.empty_like(W)
    inv_fact = [1.0 / factorial(i) for i in range(nblocks)]
    af = params.alpha_f
    for j in range(k, 0, -1):
        e, o = 2 * j - 2, 2 * j - 1
        g = params.gamma[j - 1]
        tau_o = tau ** o
        if j < k:
            # Taylor predictors over the remaining stack
            t_e = np.zeros(system.n)
            for i in range(nblocks - e):
                t_e += inv_fact[i] * W[e + i]
            t_o = np.zeros(system.n)
            for i in range(nblocks - o):
                t_o += inv_fact[i] * W[o + i]
            rhs = (-(system.M @ t_o) - tau * (system.K @ t_e)
                   + tau_o * system.forcing_derivative(e, t_n + tau))
            q = ws.factors[j - 1].solve(rhs)
            new[e] = t_e + g * q
            new[o] = t_o + q
        else:
            rhs = (-(system.M @ W[o]) - tau * (system.K @ (W[e] + af * W[o]))
                   + tau_o * system.forcing_derivative(e, t_n + af * tau))
            d = ws.factors[j - 1].solve(rhs)
            new[e] = W[e] + W[o] + g * d
            new[o] = W[o] + d
    return StateVector(k=k, tau=float(tau), data=new)


def integrate(system, U0, params, tau, n_steps, t0=0.0):
    """Run n_steps steps from the self-started state; factor each stage once.

    Returns the trajectory [state_0, state_1, ..., state_{n_steps}].
    """
    if n_steps < 0:
        raise ConfigurationError("n_steps must be >= 0, got %r" % (n_steps,))
    state = init_state(system, U0, params.k, tau, t0=t0)
    trajectory = [state]
    if n_steps == 0:
        return trajectory
    ws = StepWorkspace.build(system, params, tau)
    for i in range(int(n_steps)):
        state = step(state, system, params, t0 + i * tau, tau, ws)
        trajectory.append(state)
    return trajectory
