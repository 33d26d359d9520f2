"""Least-squares fit of A + B sin(phase + delta) to counts.

The model is linear in (A, B cos delta, B sin delta) over the basis
{1, sin, cos}, so the fit is a weighted linear solve; no starting guess and
no divergence. Weights are Poisson, sigma^2 = max(counts, 1).

External classes:
    SinusoidFit

External functions:
    fit_sinusoid, phase_grid, check_grid
"""

from dataclasses import dataclass
import logging

import numpy as np
from scipy import linalg

logger = logging.getLogger(__name__)

MIN_GRID_POINTS = 8
FULL_TURN = 2*np.pi
SPAN_TOL = 1e-9


@dataclass(frozen=True)
class SinusoidFit:
    mean: float
    amplitude: float
    offset: float
    contrast: float
    contrast_err: float
    covariance: np.ndarray
    residuals: np.ndarray

    def evaluate(self, phases):
        return self.mean + self.amplitude*np.sin(np.asarray(phases) +
                                                 self.offset)


def phase_grid(n_points=16):
    """n_points equally spaced phases over one full turn, endpoint excluded."""
    return np.linspace(0., FULL_TURN, n_points, endpoint=False)


def check_grid(phases):
    """Raise ValueError unless the grid has enough points over a full turn.

    The covered span counts one median spacing beyond the last point, so an
    endpoint-free grid over [0, 2 pi) qualifies.
    """
    phases = np.sort(np.asarray(phases, dtype=float))
    if phases.size < MIN_GRID_POINTS:
        raise ValueError('Phase grid needs at least {} points, got {}.'.format(
            MIN_GRID_POINTS, phases.size))
    span = np.ptp(phases) + np.median(np.diff(phases))
    if span < FULL_TURN - SPAN_TOL:
        raise ValueError('Phase grid spans {:.4f} rad, less than 2 pi.'.format(
            span))


def fit_sinusoid(phases, counts):
    """Fit A + B sin(phase + delta).

    Arguments:
        phases: Radians
        counts: Nonnegative counts, same length

    Returns: SinusoidFit with B >= 0, delta in (-pi, pi], contrast B/A and
        its first-order standard error from the fit covariance.
    """
    phases = np.asarray(phases, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if phases.shape != counts.shape:
        raise ValueError('Phases and counts differ in shape: {} vs {}.'.format(
            phases.shape, counts.shape))
    design = np.column_stack([np.ones_like(phases), np.sin(phases),
                              np.cos(phases)])
    weights = 1/np.maximum(counts, 1.)
    root = np.sqrt(weights)
    coeffs, _, _, _ = linalg.lstsq(design*root[:, None], counts*root)
    covariance = linalg.inv(design.T @ (design*weights[:, None]))

    mean, s, c = coeffs
    amplitude = float(np.hypot(s, c))
    offset = float(np.arctan2(c, s))
    residuals = counts - design @ coeffs

    if mean <= 0:
        logger.warning('Fitted mean %.3g is not positive; contrast set to 0.',
                       mean)
        return SinusoidFit(float(mean), amplitude, offset, 0., 0., covariance,
                           residuals)
    contrast = amplitude/mean
    if amplitude > 0:
        gradient = np.array([-amplitude/mean**2, s/(amplitude*mean),
                             c/(amplitude*mean)])
        variance = gradient @ covariance @ gradient
    else:
        variance = (covariance[1, 1] + covariance[2, 2])/mean**2
    return SinusoidFit(float(mean), amplitude, offset, float(contrast),
                       float(np.sqrt(max(variance, 0.))), covariance,
                       residuals)
