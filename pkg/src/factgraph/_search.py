"""Priority-queue path searches over CSR adjacency, JIT-compiled.

One kernel covers both closures: ``minimax=False`` minimizes the sum of
node costs along the path (shortest path), ``minimax=True`` minimizes the
maximum node cost (widest bottleneck). Costs are per-node: entering node v
adds ``node_cost[v]``; the source is free, and in targeted mode the
destination is free too, so the accumulated value covers exactly the
intermediate nodes.

With ``dst >= 0`` the search stops as soon as the destination is settled.
With ``dst == -1`` it runs to exhaustion and every node pays its own cost;
callers then recover destination-entry-free values by minimizing over a
destination's in-neighbors.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def optimal_path_search(indptr, indices, node_cost, src, dst, exc_u, exc_v, minimax):
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf, np.float64)
    pred = np.full(n, -1, np.int64)
    settled = np.zeros(n, np.bool_)
    n_exc = exc_u.shape[0]

    cap = 1024
    heap_d = np.empty(cap, np.float64)
    heap_v = np.empty(cap, np.int64)
    size = 0

    dist[src] = 0.0
    heap_d[0] = 0.0
    heap_v[0] = src
    size = 1

    while size > 0:
        d = heap_d[0]
        u = heap_v[0]
        size -= 1
        heap_d[0] = heap_d[size]
        heap_v[0] = heap_v[size]
        i = 0
        while True:  # sift down; ties broken by node id for determinism
            left = 2 * i + 1
            right = left + 1
            m = i
            if left < size and (
                heap_d[left] < heap_d[m]
                or (heap_d[left] == heap_d[m] and heap_v[left] < heap_v[m])
            ):
                m = left
            if right < size and (
                heap_d[right] < heap_d[m]
                or (heap_d[right] == heap_d[m] and heap_v[right] < heap_v[m])
            ):
                m = right
            if m == i:
                break
            heap_d[i], heap_d[m] = heap_d[m], heap_d[i]
            heap_v[i], heap_v[m] = heap_v[m], heap_v[i]
            i = m

        if settled[u]:
            continue
        settled[u] = True
        if u == dst:
            break

        for ptr in range(indptr[u], indptr[u + 1]):
            v = indices[ptr]
            if settled[v]:
                continue
            blocked = False
            for j in range(n_exc):
                if exc_u[j] == u and exc_v[j] == v:
                    blocked = True
                    break
            if blocked:
                continue
            step = 0.0 if v == dst else node_cost[v]
            if minimax:
                nd = d if d > step else step
            else:
                nd = d + step
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                if size >= cap:
                    new_cap = cap * 2
                    nd_arr = np.empty(new_cap, np.float64)
                    nv_arr = np.empty(new_cap, np.int64)
                    nd_arr[:size] = heap_d[:size]
                    nv_arr[:size] = heap_v[:size]
                    heap_d = nd_arr
                    heap_v = nv_arr
                    cap = new_cap
                i = size
                heap_d[i] = nd
                heap_v[i] = v
                size += 1
                while i > 0:  # sift up
                    p = (i - 1) // 2
                    if heap_d[i] < heap_d[p] or (
                        heap_d[i] == heap_d[p] and heap_v[i] < heap_v[p]
                    ):
                        heap_d[i], heap_d[p] = heap_d[p], heap_d[i]
                        heap_v[i], heap_v[p] = heap_v[p], heap_v[i]
                        i = p
                    else:
                        break

    return dist, pred
