"""Beamline components and their ordered configuration.

A BeamlineConfig is a list of Components, starting with the splitter. It
serializes to the JSON document
    {"components": [{"kind": ..., "location": ..., "params": {...}}, ...],
     "visibility": 1.0}

Parameter names by kind:
    rf_flipper: flip_angle (radians), frequency_multiplier (1 or 2)
    dc_flipper: flip_angle
    phase_shifter: phase (chi, acts on path II)
    spin_phase_shifter: phase (phi, acts on spin up)
    absorber: transmission (t in [0, 1])
    dephaser: dephasing (p in [0, 1])
    blocker: none; the location names the blocked path
    splitter, supermirror: none
"""

from dataclasses import dataclass, field, replace
import json
import math

KINDS = ('splitter', 'rf_flipper', 'dc_flipper', 'phase_shifter',
         'spin_phase_shifter', 'absorber', 'blocker', 'dephaser',
         'supermirror')
LOCATIONS = ('path_I', 'path_II', 'both', 'post_recombination')
IN_PATH = ('path_I', 'path_II')
PATH_INDEX = {'path_I': 0, 'path_II': 1}
FLIPPERS = ('rf_flipper', 'dc_flipper')

ALLOWED_LOCATIONS = {
    'splitter': ('both',),
    'rf_flipper': IN_PATH + ('post_recombination',),
    'dc_flipper': IN_PATH + ('post_recombination',),
    'phase_shifter': ('path_II',),
    'spin_phase_shifter': LOCATIONS,
    'absorber': IN_PATH,
    'blocker': IN_PATH,
    'dephaser': IN_PATH + ('both',),
    'supermirror': ('post_recombination',),
}

REQUIRED_PARAMS = {
    'rf_flipper': ('flip_angle', 'frequency_multiplier'),
    'dc_flipper': ('flip_angle',),
    'phase_shifter': ('phase',),
    'spin_phase_shifter': ('phase',),
    'absorber': ('transmission',),
    'dephaser': ('dephasing',),
}

UNIT_INTERVAL_PARAMS = ('transmission', 'dephasing')


@dataclass(frozen=True)
class Component:
    kind: str
    location: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError('Component kind {!r} not recognized; expecting '
                             'one of {}.'.format(self.kind, KINDS))
        if self.location not in ALLOWED_LOCATIONS[self.kind]:
            raise ValueError('Component {} cannot sit at {!r}; allowed: '
                             '{}.'.format(self.kind, self.location,
                                          ALLOWED_LOCATIONS[self.kind]))
        for name in REQUIRED_PARAMS.get(self.kind, ()):
            if name not in self.params:
                raise ValueError('Component {} requires parameter {!r}.'
                                 .format(self.kind, name))
            if not math.isfinite(float(self.params[name])):
                raise ValueError('Parameter {}={} must be finite.'.format(
                    name, self.params[name]))
        for name in UNIT_INTERVAL_PARAMS:
            if name in self.params and not 0 <= self.params[name] <= 1:
                raise ValueError('Parameter {}={} outside [0, 1].'.format(
                    name, self.params[name]))
        if (self.kind == 'rf_flipper' and
                self.params['frequency_multiplier'] not in (1, 2)):
            raise ValueError('RF frequency multiplier must be 1 or 2, got '
                             '{}.'.format(self.params['frequency_multiplier']))

    @property
    def in_interferometer(self):
        return self.location != 'post_recombination'

    def to_dict(self):
        return {'kind': self.kind, 'location': self.location,
                'params': dict(self.params)}

    @classmethod
    def from_dict(cls, record):
        return cls(record['kind'], record['location'],
                   dict(record.get('params', {})))


def splitter():
    return Component('splitter', 'both')


def rf_flipper(location, theta, m):
    return Component('rf_flipper', location,
                     {'flip_angle': float(theta), 'frequency_multiplier': m})


def dc_flipper(location, theta):
    return Component('dc_flipper', location, {'flip_angle': float(theta)})


def phase_shifter(chi):
    return Component('phase_shifter', 'path_II', {'phase': float(chi)})


def spin_phase_shifter(phi, location='post_recombination'):
    return Component('spin_phase_shifter', location, {'phase': float(phi)})


def absorber(location, transmission):
    return Component('absorber', location,
                     {'transmission': float(transmission)})


def blocker(location):
    return Component('blocker', location)


def dephaser(location, p):
    return Component('dephaser', location, {'dephasing': float(p)})


def supermirror():
    return Component('supermirror', 'post_recombination')


@dataclass(frozen=True)
class BeamlineConfig:
    """Ordered components plus the instrument visibility.

    The incoming beam is |path I mode, up, E_0>; the leading splitter sends it
    into both paths. Visibility v in (0, 1] scales path coherences when the
    beam recombines, i.e. just before the first post-recombination component.
    """
    components: tuple
    visibility: float = 1.

    def __post_init__(self):
        components = tuple(self.components)
        object.__setattr__(self, 'components', components)
        kinds = [c.kind for c in components]
        if not kinds or kinds[0] != 'splitter' or kinds.count('splitter') != 1:
            raise ValueError('A beamline needs exactly one splitter, first.')
        mirrors = [n for n, k in enumerate(kinds) if k == 'supermirror']
        if len(mirrors) > 1:
            raise ValueError('At most one supermirror is allowed.')
        if mirrors and mirrors[0] < len(kinds) - 2:
            raise ValueError('The supermirror must be last or second to last.')
        seen_post = False
        for c in components:
            if not c.in_interferometer:
                seen_post = True
            elif seen_post:
                raise ValueError('In-interferometer component {} follows the '
                                 'recombination.'.format(c.kind))
        if not 0 < self.visibility <= 1:
            raise ValueError('Visibility must lie in (0, 1], got {}.'.format(
                self.visibility))

    def extended(self, fragment):
        """Append post-recombination components (e.g. an analysis chain)."""
        return replace(self, components=self.components + tuple(fragment))

    def flippers_off(self):
        """Same beamline with in-interferometer flippers removed."""
        kept = [c for c in self.components
                if not (c.kind in FLIPPERS and c.in_interferometer)]
        return replace(self, components=tuple(kept))

    def with_blocked(self, location):
        """Insert a blocker on one path, after the splitter."""
        return replace(self, components=(self.components[0],
                                         blocker(location)) +
                       self.components[1:])

    def empty(self):
        """The bare interferometer: splitter only, same visibility."""
        return replace(self, components=self.components[:1])

    def to_dict(self):
        return {'components': [c.to_dict() for c in self.components],
                'visibility': self.visibility}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, document):
        return cls(tuple(Component.from_dict(c)
                         for c in document['components']),
                   visibility=float(document.get('visibility', 1.)))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
