"""Numba kernels for the samplers and the exhaustive search.

Every chain draws from its own splitmix64 stream seeded with
``seed ^ read_index`` so a read's result never depends on which thread ran
it. Kernels release the GIL and write only into their own output rows.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def _next(state):
    state[0] += _GOLDEN
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def _uniform(state):
    return float(_next(state) >> _S11) * _INV53


@njit(cache=True, nogil=True)
def _randbelow(state, n):
    k = int(_uniform(state) * n)
    return k if k < n else n - 1


@njit(cache=True, nogil=True)
def _accept(delta, temp, state):
    if delta <= 0.0:
        return True
    return _uniform(state) < np.exp(-delta / temp)


@njit(cache=True, nogil=True)
def qubo_energy(lin, sym, offset, x):
    n = lin.shape[0]
    total = offset
    for i in range(n):
        if x[i]:
            total += lin[i]
            for j in range(i + 1, n):
                if x[j]:
                    total += sym[i, j]
    return total


@njit(cache=True, nogil=True)
def anneal_flip(lin, sym, offset, temps, seeds, init, lo, hi, out_states, out_energies):
    """Single-bit Metropolis chains for reads ``lo..hi-1``.

    ``sym`` is the symmetric coupling matrix (zero diagonal). ``init`` is a
    starting state or an empty array for a uniformly random start. Each read
    keeps the lowest-energy state it visits.
    """
    n = lin.shape[0]
    x = np.zeros(n, dtype=np.int8)
    field = np.zeros(n)
    state = np.zeros(1, dtype=np.uint64)
    for r in range(lo, hi):
        state[0] = seeds[r]
        if init.shape[0] == n:
            for i in range(n):
                x[i] = init[i]
        else:
            for i in range(n):
                x[i] = 1 if _uniform(state) < 0.5 else 0
        for i in range(n):
            f = 0.0
            for j in range(n):
                if x[j]:
                    f += sym[i, j]
            field[i] = f
        cur = qubo_energy(lin, sym, offset, x)
        best = cur
        for i in range(n):
            out_states[r, i] = x[i]
        for t in range(temps.shape[0]):
            temp = temps[t]
            for i in range(n):
                g = lin[i] + field[i]
                delta = -g if x[i] else g
                if _accept(delta, temp, state):
                    sign = -1.0 if x[i] else 1.0
                    x[i] = 1 - x[i]
                    cur += delta
                    for j in range(n):
                        field[j] += sign * sym[j, i]
                    if cur < best:
                        best = cur
                        for k in range(n):
                            out_states[r, k] = x[k]
        out_energies[r] = qubo_energy(lin, sym, offset, out_states[r])


@njit(cache=True, nogil=True)
def subset_objective(lin, pair, sel):
    """``sum lin[s] - sum_{a<b} pair[s_a, s_b]`` over the index list ``sel``."""
    total = 0.0
    for a in range(sel.shape[0]):
        total += lin[sel[a]]
        for b in range(a):
            total -= pair[sel[b], sel[a]]
    return total


@njit(cache=True, nogil=True)
def anneal_swap(lin, pair, cs, temps, seeds, lo, hi, out_states, out_energies):
    """Cardinality-preserving swap chains for reads ``lo..hi-1``.

    The objective is ``sum lin[s] - sum_{pairs} pair[s, t]`` over the
    selected set. Each sweep proposes ``n`` swaps of one selected with one
    unselected candidate; a proposal costs O(cs).
    """
    n = lin.shape[0]
    perm = np.empty(n, dtype=np.int64)
    best_sel = np.empty(cs, dtype=np.int64)
    state = np.zeros(1, dtype=np.uint64)
    free = n - cs
    for r in range(lo, hi):
        state[0] = seeds[r]
        # partial Fisher-Yates: perm[:cs] selected, perm[cs:] unselected
        for i in range(n):
            perm[i] = i
        for i in range(cs):
            k = i + _randbelow(state, n - i)
            tmp = perm[i]
            perm[i] = perm[k]
            perm[k] = tmp
        cur = subset_objective(lin, pair, perm[:cs])
        best = cur
        for a in range(cs):
            best_sel[a] = perm[a]
        if free > 0:
            for t in range(temps.shape[0]):
                temp = temps[t]
                for _ in range(n):
                    a = _randbelow(state, cs)
                    b = cs + _randbelow(state, free)
                    u = perm[a]
                    v = perm[b]
                    delta = lin[v] - lin[u]
                    for c in range(cs):
                        if c != a:
                            s = perm[c]
                            delta -= pair[v, s] - pair[u, s]
                    if _accept(delta, temp, state):
                        perm[a] = v
                        perm[b] = u
                        cur += delta
                        if cur < best:
                            best = cur
                            for c in range(cs):
                                best_sel[c] = perm[c]
        for i in range(n):
            out_states[r, i] = 0
        for c in range(cs):
            out_states[r, best_sel[c]] = 1
        out_energies[r] = subset_objective(lin, pair, np.sort(best_sel))


@njit(cache=True, nogil=True)
def enumerate_subsets(lin, pair, cs, best_idx):
    """Minimum of :func:`subset_objective` over all size-``cs`` subsets.

    Subsets are visited in lexicographic order and only a strictly better
    value replaces the incumbent, so ties resolve to the smallest index set.
    Prefix sums make each step cost O(cs) amortized.
    """
    n = lin.shape[0]
    idx = np.empty(cs, dtype=np.int64)
    part = np.zeros(cs + 1)
    for m in range(cs):
        idx[m] = m
        s = part[m] + lin[m]
        for t in range(m):
            s -= pair[idx[t], m]
        part[m + 1] = s
    best = part[cs]
    best_idx[:] = idx
    count = 1
    while True:
        k = cs - 1
        while k >= 0 and idx[k] == n - cs + k:
            k -= 1
        if k < 0:
            break
        idx[k] += 1
        for m in range(k, cs):
            if m > k:
                idx[m] = idx[m - 1] + 1
            v = idx[m]
            s = part[m] + lin[v]
            for t in range(m):
                s -= pair[idx[t], v]
            part[m + 1] = s
        count += 1
        if part[cs] < best:
            best = part[cs]
            best_idx[:] = idx
    return best, count
