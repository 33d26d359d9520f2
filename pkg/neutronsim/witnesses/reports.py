"""Container for witness evaluations and its JSON form."""

from dataclasses import dataclass, field
import math

WITNESS_NAMES = ('GHZ', 'W_raw', 'W_scaled', 'KSEP')
ELEMENT_SOURCES = ('exact', 'measured')


@dataclass(frozen=True)
class WitnessReport:
    """One witness evaluation.

    Attributes:
        name: One of WITNESS_NAMES
        value: Witness value; positive flags entanglement beyond the bound
        k: Separability order, present iff name == 'KSEP'
        phi_pair: Ket strings of the product pair used by KSEP
        element_source: 'exact' (full density matrix) or 'measured'
        uncertainty: First-order uncertainty for measured inputs
        defaulted: Populations absent from the input that were taken as 0
    """
    name: str
    value: float
    k: int = None
    phi_pair: tuple = None
    element_source: str = 'exact'
    uncertainty: float = None
    defaulted: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.name not in WITNESS_NAMES:
            raise ValueError('Witness name {!r} not recognized; expecting one '
                             'of {}.'.format(self.name, WITNESS_NAMES))
        if not math.isfinite(self.value):
            raise ValueError('Witness value must be finite, got {}.'.format(
                self.value))
        if (self.k is not None) != (self.name == 'KSEP'):
            raise ValueError('k must be given exactly for KSEP reports.')
        if self.element_source not in ELEMENT_SOURCES:
            raise ValueError('Element source {!r} not recognized.'.format(
                self.element_source))

    @property
    def violated(self):
        return self.value > 0

    def to_dict(self):
        return {
            'name': self.name,
            'value': self.value,
            'uncertainty': self.uncertainty,
            'k': self.k,
            'phi': list(self.phi_pair) if self.phi_pair else None,
            'element_source': self.element_source,
            'defaulted': list(self.defaulted)
        }
