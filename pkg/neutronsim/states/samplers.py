"""Random separable states for property testing of the witnesses.

Pure factors are drawn Haar-like as normalized complex-Gaussian vectors and
mixed with Dirichlet weights. Every sampler takes an explicit seed (or a
numpy Generator) so parallel shards are reproducible.

External functions:
    random_factor, product_state, sample_biseparable, sample_ksep,
    random_density

Usage:
> rho = sample_biseparable(seed=7)
> rho = sample_ksep(3, seed=7, n_terms=1)
"""

import numpy as np

from neutronsim.hilbert.tensor_core import (
    DIM, DensityMatrix, PureState, SubsystemSet, embed_product)

BIPARTITIONS = (
    (SubsystemSet(1), SubsystemSet(2, 3)),
    (SubsystemSet(2), SubsystemSet(1, 3)),
    (SubsystemSet(3), SubsystemSet(1, 2)),
)
FULL_PARTITION = (SubsystemSet(1), SubsystemSet(2), SubsystemSet(3))

MIN_TERMS, MAX_TERMS = 2, 6


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_factor(rng, dim):
    """Normalized complex-Gaussian vector of length dim."""
    vector = rng.normal(size=dim) + 1j*rng.normal(size=dim)
    return vector/np.linalg.norm(vector)


def product_state(parts, factors):
    """PureState that factors across parts, e.g. ({1}, {2,3})."""
    return PureState.normalized(embed_product(parts, factors))


def _random_product(rng, parts):
    factors = [random_factor(rng, int(np.prod(part.dims()))) for part in parts]
    return product_state(parts, factors).amplitudes


def _mixture(rng, vectors):
    weights = rng.dirichlet(np.ones(len(vectors)))
    entries = sum(w*np.outer(v, v.conj()) for w, v in zip(weights, vectors))
    return DensityMatrix(entries)


def sample_biseparable(seed=None, n_terms=None, partition=None):
    """Convex mixture of pure states, each biseparable.

    Arguments:
        seed: Integer seed or numpy Generator
        n_terms: Number of mixture terms; drawn from 2..6 if None
        partition: Optional fixed bipartition (one of BIPARTITIONS) for all
            terms; by default each term draws its own

    Returns: DensityMatrix
    """
    rng = _rng(seed)
    if n_terms is None:
        n_terms = int(rng.integers(MIN_TERMS, MAX_TERMS + 1))
    vectors = []
    for _ in range(n_terms):
        parts = partition or BIPARTITIONS[rng.integers(len(BIPARTITIONS))]
        vectors.append(_random_product(rng, parts))
    return _mixture(rng, vectors)


def sample_ksep(k, seed=None, n_terms=None):
    """Mixture of pure states each factoring into k parts.

    k = 2 is the biseparable sampler; k = 3 mixes fully product states.
    """
    if k == 2:
        return sample_biseparable(seed, n_terms=n_terms)
    elif k == 3:
        rng = _rng(seed)
        if n_terms is None:
            n_terms = int(rng.integers(MIN_TERMS, MAX_TERMS + 1))
        return _mixture(rng, [_random_product(rng, FULL_PARTITION)
                              for _ in range(n_terms)])
    raise ValueError('k must be 2 or 3, got {!r}.'.format(k))


def random_density(seed=None, rank=DIM):
    """Ginibre-distributed density matrix of the given rank."""
    rng = _rng(seed)
    ginibre = (rng.normal(size=(DIM, rank)) +
               1j*rng.normal(size=(DIM, rank)))
    entries = ginibre @ ginibre.conj().T
    entries = (entries + entries.conj().T)/2
    return DensityMatrix(entries/np.trace(entries).real)
