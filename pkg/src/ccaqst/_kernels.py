"""Inner loops of the Fock engine.

Each kernel has a numba-compiled loop form and a vectorised numpy form with
identical semantics.  The loop form is used when numba imports and the
environment variable ``CCA_QST_JIT`` is not set to ``0``; ``use_jit`` and
the ``*_numpy``/``*_jit`` names allow either path to be called explicitly
(tests and the benchmark compare both).
"""

import os

import numpy as np
import scipy.sparse as sp

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

JIT_ENABLED = HAVE_NUMBA and os.environ.get("CCA_QST_JIT", "1").strip().lower() not in ("0", "false", "no", "off")


def _identity_decorator(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


if not HAVE_NUMBA:  # pragma: no cover
    njit = _identity_decorator


# --- hopping matrix elements -------------------------------------------------


@njit(cache=True)
def hopping_entries_jit(occ, codes, place, couplings, cutoff):
    """Upper-triangle hopping elements of one sector block.

    For every basis tuple and bond n, moving one photon from mode n + 1 to
    mode n gives the element J_n sqrt((occ_n + 1) occ_{n+1}).  Moves that
    would exceed the cutoff are dropped.  Returns (rows, cols, values) with
    rows the source state and cols the target state.
    """
    dim, n_modes = occ.shape
    cap = dim * (n_modes - 1)
    rows = np.empty(cap, dtype=np.int64)
    cols = np.empty(cap, dtype=np.int64)
    vals = np.empty(cap, dtype=np.float64)
    count = 0
    for i in range(dim):
        for b in range(n_modes - 1):
            left = occ[i, b]
            right = occ[i, b + 1]
            if right == 0 or left + 1 >= cutoff:
                continue
            target = codes[i] + place[b] - place[b + 1]
            j = np.searchsorted(codes, target)
            rows[count] = i
            cols[count] = j
            vals[count] = couplings[b] * np.sqrt((left + 1.0) * right)
            count += 1
    return rows[:count], cols[:count], vals[:count]


def hopping_entries_numpy(occ, codes, place, couplings, cutoff):
    rows, cols, vals = [], [], []
    for b in range(occ.shape[1] - 1):
        left = occ[:, b]
        right = occ[:, b + 1]
        ok = np.flatnonzero((right > 0) & (left + 1 < cutoff))
        target = codes[ok] + place[b] - place[b + 1]
        rows.append(ok)
        cols.append(np.searchsorted(codes, target))
        vals.append(couplings[b] * np.sqrt((left[ok] + 1.0) * right[ok]))
    if not rows:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


# --- product-state amplitudes -------------------------------------------------


@njit(cache=True)
def product_amplitudes_jit(occ, mode_coeffs):
    """coefficient(tuple) = prod_k mode_coeffs[k, occ_k]."""
    dim, n_modes = occ.shape
    out = np.empty(dim, dtype=np.complex128)
    for i in range(dim):
        acc = 1.0 + 0.0j
        for k in range(n_modes):
            acc *= mode_coeffs[k, occ[i, k]]
            if acc == 0:
                break
        out[i] = acc
    return out


def product_amplitudes_numpy(occ, mode_coeffs):
    picked = mode_coeffs[np.arange(occ.shape[1])[None, :], occ]
    return np.prod(picked, axis=1)


# --- projection of the last mode onto a target state --------------------------


@njit(cache=True)
def env_project_jit(block, env_index, weight, n_env, out):
    """out[env_index[i], c] += weight[i] * block[i, c]  (accumulates in place)."""
    dim, n_cols = block.shape
    for i in range(dim):
        w = weight[i]
        if w == 0:
            continue
        e = env_index[i]
        for c in range(n_cols):
            out[e, c] += w * block[i, c]
    return out


def env_project_numpy(block, env_index, weight, n_env, out):
    m = sp.csr_matrix((weight, (env_index, np.arange(block.shape[0]))), shape=(n_env, block.shape[0]))
    out += m @ block
    return out


if JIT_ENABLED:
    hopping_entries = hopping_entries_jit
    product_amplitudes = product_amplitudes_jit
    env_project = env_project_jit
else:
    hopping_entries = hopping_entries_numpy
    product_amplitudes = product_amplitudes_numpy
    env_project = env_project_numpy


def use_jit(flag: bool):
    """Switch the module-level kernels at runtime (benchmarks, tests)."""
    global hopping_entries, product_amplitudes, env_project, JIT_ENABLED
    JIT_ENABLED = bool(flag) and HAVE_NUMBA
    if JIT_ENABLED:
        hopping_entries, product_amplitudes, env_project = (
            hopping_entries_jit, product_amplitudes_jit, env_project_jit)
    else:
        hopping_entries, product_amplitudes, env_project = (
            hopping_entries_numpy, product_amplitudes_numpy, env_project_numpy)
