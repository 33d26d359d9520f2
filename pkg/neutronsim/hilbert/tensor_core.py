"""Complex linear algebra over H = H_path ⊗ H_spin ⊗ H_energy, dims (2, 2, 3).

Basis states are addressed by BasisLabel (path, spin, energy), with
path 0 = I, 1 = II; spin 0 = down, 1 = up; energy k = E_0 - k*hbar*omega.
The linear index is (path*2 + spin)*3 + energy, so the energy index varies
fastest and ket strings read off directly: BasisLabel.parse('101') -> index 7.

External classes:
    BasisLabel, SubsystemSet, PureState, DensityMatrix

External functions:
    label_index, label_from_index, matrix_element, swapped_labels,
    swapped_pair_population, permutation_matrix, two_copy_oracle, kron,
    embed_product, factorize_product, basis_vector

Two-copy quantities <xy|Pi_S rho⊗rho Pi_S|xy> reduce to products of
single-copy populations; swapped_pair_population is the production path and
two_copy_oracle the dense 144-dimensional reference.

Usage:
> ghz = (basis_vector('010') + 1j*basis_vector('101'))/np.sqrt(2)
> rho = PureState(ghz).density()
> swapped_pair_population(rho, BasisLabel.parse('010'),
                          BasisLabel.parse('101'), SubsystemSet(1))
0.0
"""

from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import combinations

import numpy as np
from scipy import linalg

DIMS = (2, 2, 3)
DIM = int(np.prod(DIMS))
SUBSYSTEMS = (1, 2, 3)
SUBSYSTEM_NAMES = {1: 'path', 2: 'spin', 3: 'energy'}

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10


@dataclass(frozen=True)
class BasisLabel:
    """A (path, spin, energy) triple addressing one of the 12 basis states."""
    path: int
    spin: int
    energy: int

    def __post_init__(self):
        for value, dim, name in zip(self.as_tuple(), DIMS,
                                    SUBSYSTEM_NAMES.values()):
            if not isinstance(value, (int, np.integer)) or isinstance(
                    value, bool):
                raise TypeError('Basis label {} must be an integer, got '
                                '{!r}.'.format(name, value))
            if not 0 <= value < dim:
                raise ValueError('Basis label {}={} outside range 0..{}.'.format(
                    name, value, dim - 1))

    @classmethod
    def parse(cls, text):
        """Build a label from a ket string such as '101'."""
        text = str(text).strip().strip('|>')
        if len(text) != 3 or not text.isdigit():
            raise ValueError('Expecting a three-digit ket string, got '
                             '{!r}.'.format(text))
        return cls(*(int(ch) for ch in text))

    def as_tuple(self):
        return (self.path, self.spin, self.energy)

    @property
    def index(self):
        return label_index(self)

    def __str__(self):
        return '{}{}{}'.format(*self.as_tuple())


@dataclass(frozen=True)
class SubsystemSet:
    """Nonempty subset of {1, 2, 3} (1 = path, 2 = spin, 3 = energy).

    Members are stored sorted and deduplicated: SubsystemSet(3, 1, 1) has
    members (1, 3).
    """
    members: tuple

    def __init__(self, *members):
        if len(members) == 1 and not isinstance(members[0], (int, np.integer)):
            members = tuple(members[0])
        cleaned = tuple(sorted(set(int(m) for m in members)))
        if not cleaned or not set(cleaned) <= set(SUBSYSTEMS):
            raise ValueError('Subsystem set must be a nonempty subset of '
                             '{}, got {}.'.format(SUBSYSTEMS, members))
        object.__setattr__(self, 'members', cleaned)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, item):
        return item in self.members

    def dims(self):
        return tuple(DIMS[m - 1] for m in self.members)

    def __str__(self):
        return ''.join(str(m) for m in self.members)


ALL_SUBSYSTEM_SETS = tuple(
    SubsystemSet(c) for r in (1, 2, 3) for c in combinations(SUBSYSTEMS, r))

ALL_LABELS = tuple(BasisLabel(p, s, e)
                   for p in range(DIMS[0])
                   for s in range(DIMS[1])
                   for e in range(DIMS[2]))


class PureState(object):
    """Unit-norm amplitude vector of dimension 12.

    Attributes:
        amplitudes: Read-only complex numpy array of shape (12,)
    """

    def __init__(self, amplitudes):
        amplitudes = np.array(amplitudes, dtype=complex)
        if amplitudes.shape != (DIM,):
            raise ValueError('Expecting {} amplitudes, got shape {}.'.format(
                DIM, amplitudes.shape))
        norm = np.vdot(amplitudes, amplitudes).real
        if abs(norm - 1) > NORM_TOL:
            raise ValueError('State is not normalized: squared norm '
                             '{:.15g}.'.format(norm))
        amplitudes.flags.writeable = False
        self.amplitudes = amplitudes

    @classmethod
    def normalized(cls, vector):
        """Rescale an arbitrary nonzero vector to unit norm."""
        vector = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise ValueError('Cannot normalize the zero vector.')
        return cls(vector/norm)

    def amplitude(self, label):
        return self.amplitudes[label_index(label)]

    def density(self):
        """Return the projector |psi><psi| as a DensityMatrix."""
        return DensityMatrix(np.outer(self.amplitudes,
                                      self.amplitudes.conj()))

    def overlap(self, other):
        """Return <self|other>."""
        return np.vdot(self.amplitudes, other.amplitudes)

    def __repr__(self):
        support = ['{:+.4f}|{}>'.format(a, l)
                   for l, a in zip(ALL_LABELS, self.amplitudes)
                   if abs(a) > 1e-12]
        return 'PureState({})'.format(' '.join(support))


class DensityMatrix(object):
    """Hermitian, positive semidefinite, unit-trace 12 x 12 matrix.

    Attributes:
        entries: Read-only complex numpy array of shape (12, 12)
    """

    def __init__(self, entries):
        entries = np.array(entries, dtype=complex)
        if entries.shape != (DIM, DIM):
            raise ValueError('Expecting a {0}x{0} matrix, got shape '
                             '{1}.'.format(DIM, entries.shape))
        validate_density(entries)
        entries.flags.writeable = False
        self.entries = entries

    @classmethod
    def maximally_mixed(cls):
        return cls(np.eye(DIM)/DIM)

    def element(self, bra, ket):
        return matrix_element(self, bra, ket)

    def population(self, label):
        return self.entries[label_index(label), label_index(label)].real

    def populations(self):
        return np.diag(self.entries).real.copy()

    def __repr__(self):
        return 'DensityMatrix(trace={:.6f}, purity={:.6f})'.format(
            np.trace(self.entries).real,
            np.trace(self.entries @ self.entries).real)


def validate_density(entries):
    """Raise ValueError unless entries form a valid density matrix."""
    asym = np.max(np.abs(entries - entries.conj().T))
    if asym > HERMITIAN_TOL:
        raise ValueError('Matrix is not Hermitian (max deviation '
                         '{:.3g}).'.format(asym))
    trace = np.trace(entries).real
    if abs(trace - 1) > TRACE_TOL:
        raise ValueError('Matrix trace is {:.15g}, expecting 1.'.format(trace))
    lowest = linalg.eigvalsh((entries + entries.conj().T)/2)[0]
    if lowest < PSD_TOL:
        raise ValueError('Matrix has negative eigenvalue {:.3g}.'.format(
            lowest))


def label_index(label):
    """Map a BasisLabel to its linear index in 0..11."""
    if not isinstance(label, BasisLabel):
        label = BasisLabel(*label)
    return (label.path*DIMS[1] + label.spin)*DIMS[2] + label.energy


def label_from_index(index):
    """Inverse of label_index."""
    if not 0 <= index < DIM:
        raise ValueError('Index {} outside range 0..{}.'.format(index, DIM - 1))
    return BasisLabel(*(int(v) for v in np.unravel_index(index, DIMS)))


def basis_vector(label):
    """Return the computational basis vector for a label or ket string."""
    if isinstance(label, str):
        label = BasisLabel.parse(label)
    vector = np.zeros(DIM, dtype=complex)
    vector[label_index(label)] = 1
    return vector


def matrix_element(rho, bra, ket):
    """Return <bra|rho|ket>."""
    return complex(rho.entries[label_index(bra), label_index(ket)])


def swapped_labels(x, y, subs):
    """Exchange the components in subs between labels x and y.

    Returns: The pair (x', y').
    """
    xs, ys = list(x.as_tuple()), list(y.as_tuple())
    for m in subs:
        xs[m - 1], ys[m - 1] = ys[m - 1], xs[m - 1]
    return BasisLabel(*xs), BasisLabel(*ys)


def swapped_pair_population(rho, x, y, subs):
    """Closed form of <xy|Pi_subs rho⊗rho Pi_subs|xy>.

    Returns: <x'|rho|x'> * <y'|rho|y'>, with x', y' from swapped_labels.
    """
    xp, yp = swapped_labels(x, y, subs)
    return max(rho.population(xp), 0.)*max(rho.population(yp), 0.)


@lru_cache(maxsize=None)
def permutation_matrix(subs):
    """Explicit 144 x 144 operator exchanging subsystems subs between copies.

    Two-copy basis index is index(x)*12 + index(y).
    """
    perm = np.zeros((DIM**2, DIM**2), dtype=int)
    for x in ALL_LABELS:
        for y in ALL_LABELS:
            xp, yp = swapped_labels(x, y, subs)
            perm[xp.index*DIM + yp.index, x.index*DIM + y.index] = 1
    perm.flags.writeable = False
    return perm


def two_copy_oracle(rho, x, y, subs):
    """Dense reference for swapped_pair_population, via rho⊗rho."""
    ket = permutation_matrix(subs)[:, x.index*DIM + y.index]
    doubled = np.kron(rho.entries, rho.entries)
    return float(np.vdot(ket, doubled @ ket).real)


def kron(*factors):
    """Tensor product of path, spin, energy factors, in that order.

    Arguments: Three vectors of lengths (2, 2, 3), or three square matrices
        of those sizes.

    Returns: The composite vector or matrix in label_index ordering.
    """
    if len(factors) != len(DIMS):
        raise ValueError('Expecting {} factors, got {}.'.format(
            len(DIMS), len(factors)))
    arrays = [np.asarray(f) for f in factors]
    for array, dim, name in zip(arrays, DIMS, SUBSYSTEM_NAMES.values()):
        if array.ndim not in (1, 2) or any(n != dim for n in array.shape):
            raise ValueError('Factor for {} has shape {}; expecting '
                             'dimension {}.'.format(name, array.shape, dim))
    if len(set(a.ndim for a in arrays)) != 1:
        raise ValueError('Cannot mix vectors and matrices in kron.')
    return reduce(np.kron, arrays)


def embed_product(parts, factors):
    """Assemble a product vector across a partition of the subsystems.

    Arguments:
        parts: Disjoint SubsystemSets covering {1, 2, 3}
        factors: One vector per part, of length prod(part.dims()), with
            that part's subsystems ordered ascending

    Returns: Composite amplitude vector in label_index ordering.
    """
    order = [m for part in parts for m in part]
    if sorted(order) != list(SUBSYSTEMS):
        raise ValueError('Parts {} do not cover {} exactly.'.format(
            [str(p) for p in parts], SUBSYSTEMS))
    tensor = np.ones((), dtype=complex)
    for part, factor in zip(parts, factors):
        factor = np.asarray(factor, dtype=complex)
        if factor.size != int(np.prod(part.dims())):
            raise ValueError('Factor for subsystems {} has length {}; '
                             'expecting {}.'.format(part, factor.size,
                                                    np.prod(part.dims())))
        tensor = np.multiply.outer(tensor, factor.reshape(part.dims()))
    return np.transpose(tensor, np.argsort(order)).reshape(DIM)


def factorize_product(vector, tol=1e-9):
    """Split a fully separable vector into path, spin, energy factors.

    Raises ValueError: If the vector is not a product across all three
        subsystems.

    Returns: List of three unit vectors whose kron equals the normalized
        input up to a global phase.
    """
    tensor = np.asarray(vector, dtype=complex).reshape(DIMS)
    factors = []
    for axis in range(len(DIMS)):
        unfolded = np.moveaxis(tensor, axis, 0).reshape(DIMS[axis], -1)
        u, s, _ = linalg.svd(unfolded)
        if s[0] == 0 or s[1] > tol*s[0]:
            raise ValueError('State is not a product across subsystem '
                             '{} ({}).'.format(axis + 1,
                                               SUBSYSTEM_NAMES[axis + 1]))
        factors.append(u[:, 0])
    return factors
