"""Pure numpy kernels; the reference backend and the import-time fallback."""
import numpy as np


def transform_amplitudes(amps, unitaries):
    """Re-express ``amps`` in a product basis.

    ``unitaries`` has shape (n, d, d); column k of ``unitaries[s]`` is the k-th
    basis vector at site s. Returns the flat amplitudes <e_k1 ... e_kn | psi>.
    """
    n, d, _ = unitaries.shape
    t = np.asarray(amps, dtype=complex).reshape((d,) * n)
    for s in range(n):
        t = np.moveaxis(np.tensordot(unitaries[s].conj().T, t, axes=([1], [s])), 0, s)
    return t.reshape(-1)


def uniqueness_tables(probs, n, d):
    """Per-site outcome marginals and the largest joint probability per (site, outcome).

    Both returned arrays have shape (n, d); ``best[s, a] / marg[s, a]`` is the
    largest conditional probability of one configuration of the other sites.
    """
    p = np.asarray(probs, dtype=float).reshape((d,) * n)
    marg = np.empty((n, d))
    best = np.empty((n, d))
    for s in range(n):
        q = np.moveaxis(p, s, 0).reshape(d, -1)
        marg[s] = q.sum(axis=1)
        best[s] = q.max(axis=1)
    return marg, best
