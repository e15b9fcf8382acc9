"""Scalar-mode amplification analysis.

For the 1-dof problem u' = -lambda u the method advances a stack of 2k scaled
derivatives by a 2k x 2k matrix G(theta), theta = tau * lambda. G is block
upper triangular with k diagonal 2x2 blocks, one per stage, so eigenvalues come
from closed-form quadratics; the dense matrix is assembled independently from
the stage equations and cross-checked against the closed-form blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .exceptions import ConfigurationError, GalphaError, PoleError

__all__ = [
    "AmplificationMatrix",
    "SweepResult",
    "StabilityMap",
    "amplification_matrix",
    "block_eigenvalues",
    "spectral_radius",
    "asymptotic_eigenvalues",
    "sweep_spectral_radius",
    "stability_region",
]

A_STABILITY_SLACK = 1e-9


def _stage_blocks(params, theta):
    """Closed-form diagonal blocks G_1 ... G_k at a given theta.

    Raises PoleError when a stage denominator vanishes; that happens only for
    real theta < 0 (at theta = -alpha_j/gamma_j and the alpha_f-weighted analogue).
    """
    th = complex(theta)
    k = params.k
    blocks = []
    for j in range(k):
        a = params.alpha[j]
        g = params.gamma[j]
        if j < k - 1:
            den = a + g * th
            if den == 0:
                raise PoleError(j + 1, theta)
            blocks.append(np.array(
                [[a, a - g],
                 [-th, a + (g - 1.0) * th - 1.0]], dtype=complex) / den)
        else:
            af = params.alpha_f
            den = a + af * g * th
            if den == 0:
                raise PoleError(j + 1, theta)
            blocks.append(np.array(
                [[a + (af - 1.0) * g * th, a - g],
                 [-th, a + af * (g - 1.0) * th - 1.0]], dtype=complex) / den)
    return blocks


def _dense_from_stage_equations(params, theta):
    """Assemble G numerically as L^-1 R from the scaled stage equations.

    State ordering w_m = tau^m u^(m), m = 0..2k-1. Stage j couples the pair
    (2j-2, 2j-1); rows of R hold the Taylor-predictor coefficients, so the
    block lower triangle is exactly zero by construction.
    """
    th = complex(theta)
    k = params.k
    n = 2 * k
    L = np.zeros((n, n), dtype=complex)
    R = np.zeros((n, n), dtype=complex)
    for j in range(1, k + 1):
        e, o = 2 * j - 2, 2 * j - 1
        a = params.alpha[j - 1]
        g = params.gamma[j - 1]
        last = j == k
        L[e, e] = 1.0
        L[e, o] = -g
        L[o, e] = (params.alpha_f if last else 1.0) * th
        L[o, o] = a
        if last:
            R[e, e] = 1.0
            R[e, o] = 1.0 - g
            R[o, e] = -(1.0 - params.alpha_f) * th
            R[o, o] = a - 1.0
        else:
            # predictors t_m = sum_i w_{m+i} / i!
            for i in range(n - e):
                R[e, e + i] += 1.0 / factorial(i)
            for i in range(n - o):
                R[e, o + i] += -g / factorial(i)
                R[o, o + i] += (a - 1.0) / factorial(i)
    # L is block diagonal over the stage pairs, so solve blockwise; this keeps
    # the zero pattern of R exact in the result.
    G = np.zeros((n, n), dtype=complex)
    for j in range(1, k + 1):
        e = 2 * j - 2
        sl = slice(e, e + 2)
        G[sl, :] = np.linalg.solve(L[sl, sl], R[sl, :])
    return G


@dataclass(frozen=True)
class AmplificationMatrix:
    """Amplification matrix G(theta) with its diagonal blocks.

    blocks holds the k closed-form 2x2 stage blocks; dense is the full 2k x 2k
    matrix including the upper coupling blocks. Both agree on the diagonal
    blocks to near machine precision (checked at construction).
    """

    k: int
    theta: complex
    blocks: tuple
    dense: np.ndarray

    def coupling(self, i, j):
        """Upper coupling block between stage pairs i < j (1-based)."""
        if not (1 <= i < j <= self.k):
            raise ConfigurationError(
                "coupling block indices need 1 <= i < j <= k, got (%d, %d)" % (i, j)
            )
        return self.dense[2 * i - 2:2 * i, 2 * j - 2:2 * j]


def amplification_matrix(params, theta):
    """Build G(theta) both ways (closed-form blocks, dense stage equations)."""
    blocks = _stage_blocks(params, theta)
    dense = _dense_from_stage_equations(params, theta)
    scale = max(1.0, float(np.max(np.abs(dense))))
    for j, B in enumerate(blocks):
        sl = slice(2 * j, 2 * j + 2)
        if np.max(np.abs(dense[sl, sl] - B)) > 1e-13 * scale:
            raise GalphaError(
                "internal inconsistency: dense and closed-form stage blocks "
                "disagree at stage %d, theta = %s" % (j + 1, theta)
            )
    return AmplificationMatrix(params.k, complex(theta), tuple(blocks), dense)


def block_eigenvalues(block):
    """Both roots of a 2x2 block, ordered by descending magnitude.

    The larger root uses the stable sign choice in the quadratic formula; the
    smaller one comes from the product of roots, avoiding cancellation.
    """
    b = np.asarray(block, dtype=complex)
    tr = b[0, 0] + b[1, 1]
    det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
    s = np.sqrt(tr * tr - 4.0 * det)
    if abs(tr + s) >= abs(tr - s):
        r1 = (tr + s) / 2.0
    else:
        r1 = (tr - s) / 2.0
    if r1 != 0:
        r2 = det / r1
    else:
        r2 = tr - r1
    if abs(r2) > abs(r1):
        r1, r2 = r2, r1
    return complex(r1), complex(r2)


def spectral_radius(params, theta):
    """max |eigenvalue| of G(theta), from the closed-form blocks."""
    radius = 0.0
    for B in _stage_blocks(params, theta):
        r1, _ = block_eigenvalues(B)
        radius = max(radius, abs(r1))
    return radius


def asymptotic_eigenvalues(params):
    """Eigenvalue limits of G(theta) as |theta| grows, in stage-pair order.

    Stage j < k contributes {0, (gamma_j - 1) / gamma_j}; the last stage
    contributes {(alpha_f - 1) / alpha_f, (gamma_k - 1) / gamma_k}. With the
    rho parameterization every nonzero limit equals -rho of its stage.
    """
    k = params.k
    out = []
    for j in range(k - 1):
        g = params.gamma[j]
        if g == 0:
            raise ConfigurationError("gamma_%d = 0 has no asymptotic limit" % (j + 1,))
        out.extend([0.0 + 0.0j, complex((g - 1.0) / g)])
    g = params.gamma[k - 1]
    af = params.alpha_f
    if g == 0 or af == 0:
        raise ConfigurationError("gamma_%d = 0 or alpha_f = 0 has no asymptotic limit" % (k,))
    out.extend([complex((af - 1.0) / af), complex((g - 1.0) / g)])
    return tuple(out)


@dataclass(frozen=True)
class SweepResult:
    """Dissipation curve: spectral radius and per-block magnitudes over theta."""

    theta: np.ndarray        # (N,)
    rho: np.ndarray          # (N,)
    magnitudes: np.ndarray   # (N, 2k), stage pairs in order, each pair descending


def sweep_spectral_radius(params, theta_grid):
    """Evaluate the spectral radius along a positive theta grid."""
    grid = np.asarray(theta_grid, dtype=float)
    if grid.size == 0:
        raise ConfigurationError("theta grid is empty")
    if np.any(grid <= 0):
        raise ConfigurationError("theta grid must be positive")
    n = grid.size
    mags = np.empty((n, 2 * params.k))
    rho = np.empty(n)
    for i, th in enumerate(grid):
        row = []
        for B in _stage_blocks(params, th):
            r1, r2 = block_eigenvalues(B)
            row.extend([abs(r1), abs(r2)])
        mags[i, :] = row
        rho[i] = max(row)
    return SweepResult(theta=grid.copy(), rho=rho, magnitudes=mags)


@dataclass(frozen=True)
class StabilityMap:
    """Spectral radius sampled on a rectangle of complex theta.

    rho has shape (n_re, n_im); pole nodes carry NaN and are flagged in
    pole_mask. max_rho_right_half and a_stable summarize the Re >= 0 nodes.
    """

    re: np.ndarray
    im: np.ndarray
    rho: np.ndarray
    pole_mask: np.ndarray
    max_rho_right_half: float
    a_stable: bool


def stability_region(params, re_range, im_range, resolution):
    """Map rho(G) over [re_min, re_max] x [im_min, im_max].

    resolution is the point count per axis (one count for both, or a pair
    (n_re, n_im)); a single-point axis requires a degenerate range. Pole nodes
    (only possible for Re theta < 0) are flagged, not fatal.
    """
    try:
        n_re, n_im = (int(resolution[0]), int(resolution[1]))
    except TypeError:
        n_re = n_im = int(resolution)
    re_lo, re_hi = float(re_range[0]), float(re_range[1])
    im_lo, im_hi = float(im_range[0]), float(im_range[1])
    for name, n, lo, hi in (("re", n_re, re_lo, re_hi), ("im", n_im, im_lo, im_hi)):
        if n < 1:
            raise ConfigurationError("%s resolution must be >= 1, got %d" % (name, n))
        if lo > hi:
            raise ConfigurationError("%s range is reversed: [%g, %g]" % (name, lo, hi))
        if n == 1 and lo != hi:
            raise ConfigurationError(
                "single-point %s axis needs a degenerate range, got [%g, %g]" % (name, lo, hi)
            )
    res = np.linspace(re_lo, re_hi, n_re)
    ims = np.linspace(im_lo, im_hi, n_im)
    rho = np.empty((n_re, n_im))
    poles = np.zeros((n_re, n_im), dtype=bool)
    for i, x in enumerate(res):
        for j, y in enumerate(ims):
            try:
                rho[i, j] = spectral_radius(params, complex(x, y))
            except PoleError:
                rho[i, j] = np.nan
                poles[i, j] = True
    right = (res >= 0.0)[:, None] & ~poles
    if np.any(right):
        max_right = float(np.max(rho[right]))
        a_stable = bool(max_right <= 1.0 + A_STABILITY_SLACK)
    else:
        max_right = float("nan")
        a_stable = True
    return StabilityMap(
        re=res, im=ims, rho=rho, pole_mask=poles,
        max_rho_right_half=max_right, a_stable=a_stable,
    )
