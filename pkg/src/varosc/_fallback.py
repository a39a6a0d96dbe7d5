"""Pure numpy kernels; same signatures as the compiled ``_kernels`` module."""
import numpy as np

NAME = "python"


def real_divide(z, n):
    """``z / n`` for real ``n``, rounded per component (numpy's complex
    division by ``n + 0j`` is not correctly rounded)."""
    out = np.empty_like(z)
    out.real = z.real / n
    out.imag = z.imag / n
    return out


def stream_averages(B, f, checkpoints, compensated=False):
    B = np.ascontiguousarray(B, dtype=np.complex128)
    g = np.array(f, dtype=np.complex128)
    cps = np.asarray(checkpoints, dtype=np.int64)
    out = np.empty((cps.size, g.size), dtype=np.complex128)
    s = np.zeros_like(g)
    c = np.zeros_like(g)
    nxt = 0
    for j in range(1, int(cps[-1]) + 1 if cps.size else 1):
        g = B @ g
        if compensated:
            y = g - c
            t = s + y
            c = (t - s) - y
            s = t
        else:
            s = s + g
        if j == cps[nxt]:
            out[nxt] = real_divide(s, float(j))
            nxt += 1
    return out


def _symbol(n, th):
    half = 0.5 * th
    return np.exp(1j * (half * (n + 1.0))) * (np.sin(n * half) / (n * np.sin(half)))


def _k0(terms, thetas):
    big = thetas[:, None] * terms[None, :] >= 1.0
    anyb = big.any(axis=1)
    return np.where(anyb, big.argmax(axis=1) + 1, 0).astype(np.int64), big


def variation_grid(terms, thetas):
    terms = np.asarray(terms, dtype=np.float64)
    thetas = np.asarray(thetas, dtype=np.float64)
    a = _symbol(terms[None, :], thetas[:, None])
    diff = np.abs(a[:, 1:] - a[:, :-1])
    k0, big = _k0(terms, thetas)
    big = big[:, :-1]
    large = np.where(big, diff, 0.0).sum(axis=1)
    small = np.where(big, 0.0, diff).sum(axis=1)
    return small + large, small, large, k0


def oscillation_grid(terms, mvals, owner, thetas):
    terms = np.asarray(terms, dtype=np.float64)
    mvals = np.asarray(mvals, dtype=np.float64)
    owner = np.asarray(owner, dtype=np.int64)
    thetas = np.asarray(thetas, dtype=np.float64)
    keep = owner >= 0
    mvals, owner = mvals[keep], owner[keep]
    a_n = _symbol(terms[None, :], thetas[:, None])
    a_m = _symbol(mvals[None, :], thetas[:, None])
    diff = np.abs(a_m - a_n[:, owner])
    sup = np.zeros((thetas.size, terms.size - 1))
    for j in range(owner.size):
        k = owner[j]
        np.maximum(sup[:, k], diff[:, j], out=sup[:, k])
    k0, big = _k0(terms, thetas)
    big = big[:, :-1]
    large = np.where(big, sup, 0.0).sum(axis=1)
    small = np.where(big, 0.0, sup).sum(axis=1)
    return small + large, small, large, k0
