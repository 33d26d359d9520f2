"""Nonlinear witnesses for genuine multipartite entanglement and k-separability.

All witnesses are <= 0 on the relevant separable class; a positive value
certifies entanglement beyond it.

    I_GHZ = |<010|rho|101>| - sum_i sqrt(<xy|Pi_i rho⊗rho Pi_i|xy>)
    I_W   = sum_{i!=j} |<w_i|rho|w_j>|
            - sum_{i,j} sqrt(<w_i w_j|Pi_i rho⊗rho Pi_i|w_i w_j>)
    I_k   = |<phi1|rho|phi2>|
            - sum_{k-partitions} prod_parts <Phi'_part|rho⊗rho|Phi'_part>^(1/2k)

with w = (|101>, |011>, |002>). I_W is reported raw or scaled by 1/2; both
are witnesses since a positive factor keeps the separable bound.

Every two-copy term is a product of two single-copy populations; formulas
take the two-copy evaluator as a parameter so the dense oracle can be
substituted in tests:
> witness_ghz(rho, two_copy=tensor_core.two_copy_oracle)

External functions:
    witness_ghz, witness_w, witness_ksep, best_ksep, witness_from_elements,
    fidelity_witness, exact_report, partitions
"""

from dataclasses import dataclass
from functools import partial
import logging

import numpy as np

from neutronsim.hilbert.tensor_core import (
    BasisLabel, PureState, SubsystemSet, basis_vector, factorize_product,
    kron, matrix_element, swapped_labels, swapped_pair_population)
from neutronsim.states.channels import fidelity
from neutronsim.witnesses.reports import WitnessReport

logger = logging.getLogger(__name__)

GHZ_PAIR = (BasisLabel.parse('010'), BasisLabel.parse('101'))
W_BASIS = tuple(BasisLabel.parse(s) for s in ('101', '011', '002'))
W_SCALE = .5
FIDELITY_THRESHOLD = .5

PHI_PAIRS = (
    ('010', '101'), ('101', '011'), ('101', '002'), ('011', '002'),
    ('000', '111'), ('001', '110'), ('100', '011'), ('001', '112'),
    ('000', '112'), ('010', '102'), ('012', '100'), ('002', '111'),
    ('110', '002'), ('001', '102'), ('010', '111'), ('000', '012'),
    ('100', '111'), ('011', '110'), ('012', '101'), ('000', '102'),
)


class MissingElementError(KeyError):
    """A matrix element required by a witness is absent from the input."""

    def __init__(self, bra, ket):
        self.pair = (str(bra), str(ket))
        super().__init__('Missing matrix element <{}|rho|{}>.'.format(bra, ket))

    def __str__(self):
        return self.args[0]


@dataclass(frozen=True)
class Partition:
    """Exact cover of {1, 2, 3} by 1 to 3 SubsystemSets."""
    parts: tuple

    def __post_init__(self):
        members = sorted(m for part in self.parts for m in part)
        if members != [1, 2, 3] or not 1 <= len(self.parts) <= 3:
            raise ValueError('Parts {} are not an exact cover of {{1,2,3}}.'
                             .format([str(p) for p in self.parts]))

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


_PARTITIONS = {
    1: (Partition((SubsystemSet(1, 2, 3),)),),
    2: (Partition((SubsystemSet(1), SubsystemSet(2, 3))),
        Partition((SubsystemSet(2), SubsystemSet(1, 3))),
        Partition((SubsystemSet(3), SubsystemSet(1, 2)))),
    3: (Partition((SubsystemSet(1), SubsystemSet(2), SubsystemSet(3))),),
}


def partitions(k):
    """All k-partitions of the three subsystems."""
    try:
        return _PARTITIONS[k]
    except KeyError:
        raise ValueError('No {}-partitions of three subsystems.'.format(k))


def _as_label(value):
    if isinstance(value, BasisLabel):
        return value
    return BasisLabel.parse(value)


# Formulas over an abstract element source: cross(x, y) -> |<x|rho|y>|,
# two_copy(x, y, subs) -> <xy|Pi rho⊗rho Pi|xy>.

def _ghz_formula(cross, two_copy):
    x, y = GHZ_PAIR
    subtracted = sum(np.sqrt(max(two_copy(x, y, SubsystemSet(i)), 0.))
                     for i in (1, 2, 3))
    return cross(x, y) - subtracted


def _w_formula(cross, two_copy):
    coherent = sum(cross(wi, wj)
                   for i, wi in enumerate(W_BASIS)
                   for j, wj in enumerate(W_BASIS) if i != j)
    subtracted = sum(np.sqrt(max(two_copy(wi, wj, SubsystemSet(i + 1)), 0.))
                     for i, wi in enumerate(W_BASIS)
                     for wj in W_BASIS)
    return coherent - subtracted


def _ksep_formula(cross, two_copy, k, x, y):
    subtracted = 0.
    for partition in partitions(k):
        term = 1.
        for part in partition:
            term *= max(two_copy(x, y, part), 0.)**(1/(2*k))
        subtracted += term
    return cross(x, y) - subtracted


def _exact_sources(rho, two_copy):
    cross = lambda x, y: abs(matrix_element(rho, x, y))
    return cross, partial(two_copy, rho)


def witness_ghz(rho, two_copy=swapped_pair_population):
    """GHZ witness; maximal value 1/2 on the balanced GHZ state."""
    return float(_ghz_formula(*_exact_sources(rho, two_copy)))


def witness_w(rho, scaled=True, two_copy=swapped_pair_population):
    """W witness, scaled by 1/2 unless scaled=False."""
    raw = _w_formula(*_exact_sources(rho, two_copy))
    return float(W_SCALE*raw if scaled else raw)


def _product_factors(phi):
    """Path, spin, energy factors of a product state given in any form."""
    if isinstance(phi, (str, BasisLabel)):
        vector = basis_vector(_as_label(phi))
    elif isinstance(phi, PureState):
        vector = phi.amplitudes
    elif isinstance(phi, (list, tuple)) and len(phi) == 3:
        vector = kron(*[np.asarray(f, dtype=complex) for f in phi])
    else:
        vector = np.asarray(phi, dtype=complex)
    return factorize_product(vector)


def _ksep_general(rho, k, phi1, phi2):
    f1, f2 = _product_factors(phi1), _product_factors(phi2)
    expect = lambda factors: max(np.vdot(kron(*factors),
                                         rho.entries @ kron(*factors)).real, 0.)
    value = abs(np.vdot(kron(*f1), rho.entries @ kron(*f2)))
    for partition in partitions(k):
        term = 1.
        for part in partition:
            g1 = [f2[m] if m + 1 in part else f1[m] for m in range(3)]
            g2 = [f1[m] if m + 1 in part else f2[m] for m in range(3)]
            term *= (expect(g1)*expect(g2))**(1/(2*k))
        value -= term
    return value


def witness_ksep(rho, k, phi1, phi2, two_copy=swapped_pair_population):
    """k-separability witness for a product pair (phi1, phi2).

    Arguments:
        rho: DensityMatrix
        k: 2 or 3
        phi1, phi2: Fully product states, as BasisLabels, ket strings,
            product PureStates or triples of factor vectors

    Raises ValueError: For k outside {2, 3} or non-product phi.
    """
    if k not in (2, 3):
        raise ValueError('k must be 2 or 3, got {!r}.'.format(k))
    if all(isinstance(p, (str, BasisLabel)) for p in (phi1, phi2)):
        cross, pairs = _exact_sources(rho, two_copy)
        return float(_ksep_formula(cross, pairs, k, _as_label(phi1),
                                   _as_label(phi2)))
    return float(_ksep_general(rho, k, phi1, phi2))


def best_ksep(rho, k, pairs=PHI_PAIRS):
    """Maximize witness_ksep over a dictionary of basis pairs.

    Returns: (value, (phi1, phi2))
    """
    values = [(witness_ksep(rho, k, *pair), pair) for pair in pairs]
    return max(values, key=lambda item: item[0])


def fidelity_witness(rho, target):
    """Fidelity minus 1/2; positive flags entanglement for GHZ/W targets."""
    return fidelity(rho, target) - FIDELITY_THRESHOLD


def exact_report(rho, name, k=None, phi_pair=None):
    """Evaluate a named witness on a full density matrix."""
    if name == 'GHZ':
        value = witness_ghz(rho)
    elif name in ('W_raw', 'W_scaled'):
        value = witness_w(rho, scaled=(name == 'W_scaled'))
    elif name == 'KSEP':
        phi_pair = tuple(str(p) for p in phi_pair or GHZ_PAIR)
        value = witness_ksep(rho, k, *phi_pair)
    else:
        raise ValueError('Witness name {!r} not recognized.'.format(name))
    return WitnessReport(name=name, value=value, k=k, phi_pair=phi_pair)


# Measured elements

class _ElementTable(object):
    """Lookup over a measured element map.

    Keys are (bra, ket) pairs of labels or ket strings; values are magnitudes
    or (value, err) tuples. Populations listed in required raise when
    missing; any other population defaults to 0 and is recorded.
    """

    def __init__(self, elements, required=()):
        self.values, self.errors = {}, {}
        for (bra, ket), entry in elements.items():
            key = (str(_as_label(bra)), str(_as_label(ket)))
            value, err = entry if isinstance(entry, (tuple, list)) else (
                entry, 0.)
            self.values[key] = float(value)
            self.errors[key] = float(err)
        self.required = set(str(r) for r in required)
        self.defaulted = set()

    def _lookup(self, x, y):
        for key in ((str(x), str(y)), (str(y), str(x))):
            if key in self.values:
                return key
        return None

    def cross(self, x, y):
        key = self._lookup(x, y)
        if key is None:
            raise MissingElementError(x, y)
        return abs(self.values[key])

    def population(self, x):
        key = (str(x), str(x))
        if key in self.values:
            return max(self.values[key], 0.)
        if str(x) in self.required:
            raise MissingElementError(x, x)
        self.defaulted.add(str(x))
        return 0.

    def two_copy(self, x, y, subs):
        xp, yp = swapped_labels(x, y, subs)
        return self.population(xp)*self.population(yp)

    def perturbed(self, key, delta):
        """Copy with one element shifted by delta, floored at zero."""
        clone = _ElementTable({}, self.required)
        clone.values = dict(self.values)
        clone.errors = self.errors
        clone.values[key] = max(self.values[key] + delta, 0.)
        return clone


def witness_from_elements(elements, name, k=None, phi_pair=None):
    """Evaluate a witness from the experimentally accessible elements.

    Arguments:
        elements: Map (bra, ket) -> magnitude or (magnitude, err).
            Diagonal keys hold populations.
        name: One of 'GHZ', 'W_raw', 'W_scaled', 'KSEP'
        k, phi_pair: For KSEP, the order and the pair of ket strings

    Raises MissingElementError: Naming the first missing required element.

    Returns: WitnessReport with element_source 'measured'. Populations the
        witness needs but the map lacks are taken as 0 and listed in
        report.defaulted.
    """
    if name == 'GHZ':
        required = ()
        formula = _ghz_formula
    elif name in ('W_raw', 'W_scaled'):
        required = W_BASIS
        scale = W_SCALE if name == 'W_scaled' else 1.
        formula = lambda cross, two_copy: scale*_w_formula(cross, two_copy)
    elif name == 'KSEP':
        if k not in (2, 3):
            raise ValueError('k must be 2 or 3, got {!r}.'.format(k))
        x, y = (_as_label(p) for p in (phi_pair or GHZ_PAIR))
        phi_pair = (str(x), str(y))
        required = ()
        formula = lambda cross, two_copy: _ksep_formula(
            cross, two_copy, k, x, y)
    else:
        raise ValueError('Witness name {!r} not recognized.'.format(name))

    table = _ElementTable(elements, required)
    value = formula(table.cross, table.two_copy)

    variance = 0.
    for key, err in table.errors.items():
        if err <= 0:
            continue
        up, down = table.perturbed(key, err), table.perturbed(key, -err)
        shift = (formula(up.cross, up.two_copy) -
                 formula(down.cross, down.two_copy))/2
        variance += shift**2

    if table.defaulted:
        logger.warning('Witness %s: unmeasured populations %s taken as 0.',
                       name, sorted(table.defaulted))
    return WitnessReport(
        name=name, value=float(value), k=k if name == 'KSEP' else None,
        phi_pair=phi_pair if name == 'KSEP' else None,
        element_source='measured', uncertainty=float(np.sqrt(variance)),
        defaulted=tuple(sorted(table.defaulted)))
