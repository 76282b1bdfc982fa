"""Pure-numpy coordinate ascent over Bloch-vector measurement settings.

Reference implementation of the compiled kernel in ``_ascent.pyx``; both take
the same arguments and must agree to round-off.

A Bell expression is a list of terms ``coef * <U_A U_B U_C>`` where each party's
observable is either a setting ``s . sigma`` or the identity. With the Pauli
expectation tensor ``R[mu, nu, ka] = Tr(rho sigma_mu x sigma_nu x sigma_ka)``
(index 0 is the identity), a term evaluates to ``R`` contracted with the
extended vectors ``(0, s)`` or ``(1, 0, 0, 0)``. The expression is linear in
every single setting, so the best update of one setting with the others held
fixed is its normalized gradient.
"""
import numpy as np


def _ext(settings, i):
    v = np.zeros(4)
    if i < 0:
        v[0] = 1.0
    else:
        v[1:] = settings[i]
    return v


def evaluate(R, coefs, idx, settings):
    total = 0.0
    for t in range(coefs.shape[0]):
        a = _ext(settings, idx[t, 0])
        b = _ext(settings, idx[t, 1])
        c = _ext(settings, idx[t, 2])
        total += coefs[t] * np.einsum("i,j,k,ijk->", a, b, c, R)
    return float(total)


def _gradient(R, coefs, idx, settings, s, p):
    g = np.zeros(4)
    for t in range(coefs.shape[0]):
        if idx[t, p] != s:
            continue
        vecs = [_ext(settings, idx[t, q]) for q in range(3)]
        if p == 0:
            g += coefs[t] * np.einsum("ijk,j,k->i", R, vecs[1], vecs[2])
        elif p == 1:
            g += coefs[t] * np.einsum("ijk,i,k->j", R, vecs[0], vecs[2])
        else:
            g += coefs[t] * np.einsum("ijk,i,j->k", R, vecs[0], vecs[1])
    return g[1:]


def ascend(R, coefs, idx, party, settings, max_sweeps, tol):
    """Update ``settings`` in place; return (value, sweeps used)."""
    value = evaluate(R, coefs, idx, settings)
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        for s in range(settings.shape[0]):
            g = _gradient(R, coefs, idx, settings, s, party[s])
            norm = np.sqrt(g @ g)
            if norm > 1e-300:
                settings[s] = g / norm
        new = evaluate(R, coefs, idx, settings)
        if new - value <= tol:
            value = max(value, new)
            break
        value = new
    return value, sweeps
