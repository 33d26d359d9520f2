"""Published measurement values used for side-by-side comparison.

Rows map state kind -> (prepared, degraded), each (value, err) or None.
Table I holds the multipartite witness (I_GHZ, scaled I_W); Table II the
three-separability witness.
"""

TABLE_I = {
    'GHZ': ((.49, .01), None),
    'W_sym': ((.47, .03), (-.04, .02)),
    'W_asym': ((.46, .02), (-.01, .01)),
}

TABLE_II = {
    'GHZ': ((.49, .01), None),
    'W_sym': ((.65, .02), (.31, .01)),
    'W_asym': ((.45, .01), (.11, .01)),
}

TABLES = {'I': TABLE_I, 'II': TABLE_II}

# The product pair behind the W rows of Table II is not known.
PHI_UNSPECIFIED = {'II': ('W_sym', 'W_asym')}

FIDELITIES = {
    'GHZ': (.985, .011),
    'W_sym': (.987, .029),
    'W_asym': (.948, .022),
}

DEGRADED_FIDELITIES = {
    'W_sym': (.646, .027),
    'W_asym': (.611, .021),
}

# Contrast of the empty-interferometer reference beam.
REFERENCE_CONTRAST = .455
