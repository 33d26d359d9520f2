"""Constructors for the W and GHZ target states.

    |W>   = a|101> + b e^{i pi/2}|011> + c|002>
    |GHZ> = d e^{i pi/2}|101> + e|010>

The flip phase e^{i pi/2} is carried as the imaginary unit on b and d.

External classes:
    WParams, GHZParams

External functions:
    make_w, make_ghz, make_target

Usage:
> make_w(WParams.symmetric())
> make_ghz(GHZParams(d=1/np.sqrt(2), e=1/np.sqrt(2)))
"""

from dataclasses import dataclass

import numpy as np

from neutronsim.hilbert.tensor_core import (
    NORM_TOL, PureState, basis_vector)

W_LABELS = ('101', '011', '002')
GHZ_LABELS = ('101', '010')

TARGET_KINDS = ('GHZ', 'W_sym', 'W_asym')


def _check_amplitudes(name, values, tol):
    if any(v < 0 for v in values):
        raise ValueError('{} amplitudes must be nonnegative, got {}.'.format(
            name, values))
    norm = sum(v**2 for v in values)
    if abs(norm - 1) > tol:
        raise ValueError('{} amplitudes are not normalized: sum of squares '
                         '{:.15g}.'.format(name, norm))


@dataclass(frozen=True)
class WParams:
    """Real, nonnegative, normalized amplitudes a, b, c."""
    a: float
    b: float
    c: float

    def __post_init__(self):
        _check_amplitudes('W', (self.a, self.b, self.c), NORM_TOL)

    @classmethod
    def symmetric(cls):
        return cls(*(3*[1/np.sqrt(3)]))

    @classmethod
    def asymmetric(cls):
        return cls(1/np.sqrt(2), .5, .5)


@dataclass(frozen=True)
class GHZParams:
    """Real, nonnegative, normalized amplitudes d, e."""
    d: float
    e: float

    def __post_init__(self):
        _check_amplitudes('GHZ', (self.d, self.e), NORM_TOL)

    @classmethod
    def balanced(cls):
        return cls(1/np.sqrt(2), 1/np.sqrt(2))


def make_w(params):
    """Build a|101> + i b|011> + c|002>."""
    amplitudes = (params.a, 1j*params.b, params.c)
    vector = sum(amp*basis_vector(label)
                 for amp, label in zip(amplitudes, W_LABELS))
    return PureState(vector)


def make_ghz(params):
    """Build i d|101> + e|010>."""
    amplitudes = (1j*params.d, params.e)
    vector = sum(amp*basis_vector(label)
                 for amp, label in zip(amplitudes, GHZ_LABELS))
    return PureState(vector)


def make_target(kind):
    """Return the ideal target for one of TARGET_KINDS."""
    if kind == 'GHZ':
        return make_ghz(GHZParams.balanced())
    elif kind == 'W_sym':
        return make_w(WParams.symmetric())
    elif kind == 'W_asym':
        return make_w(WParams.asymmetric())
    raise ValueError('State kind {!r} not recognized; expecting one of '
                     '{}.'.format(kind, TARGET_KINDS))
