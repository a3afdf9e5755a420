"""Hot-loop kernels, written once in nopython-compatible form.

The numba backend wraps every function here with ``numba.njit``; the fallback
backend runs them as-is. Both paths must stay bit-identical, so kernels only
do arithmetic on arrays handed in by the caller (all transcendental tables are
precomputed outside) and never call each other.
"""
import numpy as np


def girth_bfs(indptr, indices, n, cap):
    """Length of the shortest cycle if <= cap, else cap+1.

    BFS from every node; a non-tree edge (x, y) certifies a closed walk of
    length dist[x]+dist[y]+1 which never undershoots the girth, and for some
    root on a shortest cycle the estimate is exact.
    """
    best = cap + 1
    dist = np.full(n, -1, dtype=np.int64)
    par = np.full(n, -1, dtype=np.int64)
    q = np.empty(n, dtype=np.int64)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
            par[i] = -1
        head = 0
        tail = 0
        q[tail] = s
        tail += 1
        dist[s] = 0
        while head < tail:
            x = q[head]
            head += 1
            dx = dist[x]
            if 2 * dx > best:
                break
            skipped_parent = False
            for i in range(indptr[x], indptr[x + 1]):
                y = indices[i]
                if y == par[x] and not skipped_parent:
                    skipped_parent = True
                    continue
                if dist[y] == -1:
                    dist[y] = dx + 1
                    par[y] = x
                    q[tail] = y
                    tail += 1
                else:
                    cand = dx + dist[y] + 1
                    if cand < best:
                        best = cand
    return best


def greedy_power_coloring(indptr, indices, n, k):
    """Greedy proper coloring of the k-th graph power, nodes in id order."""
    colors = np.full(n, -1, dtype=np.int64)
    used = np.full(n + 2, -1, dtype=np.int64)
    stamp = np.full(n, -1, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    q = np.empty(n, dtype=np.int64)
    for v in range(n):
        head = 0
        tail = 0
        q[tail] = v
        tail += 1
        stamp[v] = v
        dist[v] = 0
        while head < tail:
            x = q[head]
            head += 1
            dx = dist[x]
            if dx >= k:
                continue
            for i in range(indptr[x], indptr[x + 1]):
                y = indices[i]
                if stamp[y] != v:
                    stamp[y] = v
                    dist[y] = dx + 1
                    q[tail] = y
                    tail += 1
                    c = colors[y]
                    if c >= 0:
                        used[c] = v
        c = 0
        while used[c] == v:
            c += 1
        colors[v] = c
    return colors


def check_power_coloring(indptr, indices, n, k, colors):
    """-1 if no two nodes within distance k share a color, else a violator."""
    stamp = np.full(n, -1, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    q = np.empty(n, dtype=np.int64)
    for v in range(n):
        head = 0
        tail = 0
        q[tail] = v
        tail += 1
        stamp[v] = v
        dist[v] = 0
        while head < tail:
            x = q[head]
            head += 1
            dx = dist[x]
            if dx >= k:
                continue
            for i in range(indptr[x], indptr[x + 1]):
                y = indices[i]
                if stamp[y] != v:
                    stamp[y] = v
                    dist[y] = dx + 1
                    q[tail] = y
                    tail += 1
                    if colors[y] == colors[v]:
                        return v
    return -1


def euler_orient(n, eu, ev):
    """Orient every edge along Eulerian circuits; |in-out| <= 1 at all nodes.

    Odd-degree nodes are joined to a dummy node first, so every component of
    the augmented graph is Eulerian; dummy edges are dropped from the output.
    """
    m = eu.shape[0]
    deg = np.zeros(n + 1, dtype=np.int64)
    for e in range(m):
        deg[eu[e]] += 1
        deg[ev[e]] += 1
    n_odd = 0
    for v in range(n):
        if deg[v] % 2 == 1:
            n_odd += 1
    total_m = m + n_odd
    all_u = np.empty(total_m, dtype=np.int64)
    all_v = np.empty(total_m, dtype=np.int64)
    for e in range(m):
        all_u[e] = eu[e]
        all_v[e] = ev[e]
    nxt = m
    for v in range(n):
        if deg[v] % 2 == 1:
            all_u[nxt] = v
            all_v[nxt] = n  # dummy node
            deg[v] += 1
            deg[n] += 1
            nxt += 1
    # incidence CSR over n+1 nodes
    inc_ptr = np.zeros(n + 2, dtype=np.int64)
    for v in range(n + 1):
        inc_ptr[v + 1] = inc_ptr[v] + deg[v]
    cursor = inc_ptr[:-1].copy()
    inc_edge = np.empty(2 * total_m, dtype=np.int64)
    for e in range(total_m):
        a = all_u[e]
        b = all_v[e]
        inc_edge[cursor[a]] = e
        cursor[a] += 1
        inc_edge[cursor[b]] = e
        cursor[b] += 1
    ptr = inc_ptr[:-1].copy()
    used = np.zeros(total_m, dtype=np.uint8)
    dirs = np.zeros(total_m, dtype=np.int8)
    for s in range(n + 1):
        while True:
            while ptr[s] < inc_ptr[s + 1] and used[inc_edge[ptr[s]]] == 1:
                ptr[s] += 1
            if ptr[s] >= inc_ptr[s + 1]:
                break
            x = s
            while True:
                while ptr[x] < inc_ptr[x + 1] and used[inc_edge[ptr[x]]] == 1:
                    ptr[x] += 1
                if ptr[x] >= inc_ptr[x + 1]:
                    break  # walk is stuck, necessarily back at s
                e = inc_edge[ptr[x]]
                used[e] = 1
                if all_u[e] == x:
                    dirs[e] = 0
                    x = all_v[e]
                else:
                    dirs[e] = 1
                    x = all_u[e]
    return dirs[:m].copy()


def condexp_weak_split(u_ptr, u_adj, v_ptr, v_adj, order, p2):
    """Greedy color choice minimizing the exact monochromatic-neighborhood
    expectation; p2[j] = 2^-min(j, clamp). Returns (colors, initial, trace)."""
    nu = u_ptr.shape[0] - 1
    nv = v_ptr.shape[0] - 1
    und = np.empty(nu, dtype=np.int64)
    has_red = np.zeros(nu, dtype=np.uint8)
    has_blue = np.zeros(nu, dtype=np.uint8)
    total = 0.0
    for u in range(nu):
        und[u] = u_ptr[u + 1] - u_ptr[u]
        total += 2.0 * p2[und[u]]
    initial = total
    colors = np.zeros(nv, dtype=np.int8)
    trace = np.empty(order.shape[0], dtype=np.float64)
    for idx in range(order.shape[0]):
        v = order[idx]
        d_red = 0.0
        d_blue = 0.0
        for i in range(v_ptr[v], v_ptr[v + 1]):
            u = v_adj[i]
            p = p2[und[u]]
            pm = p2[und[u] - 1]
            cur = 0.0
            if has_blue[u] == 0:
                cur += p
            if has_red[u] == 0:
                cur += p
            if has_blue[u] == 0:
                d_red += pm - cur
            else:
                d_red += -cur
            if has_red[u] == 0:
                d_blue += pm - cur
            else:
                d_blue += -cur
        if d_red <= d_blue:
            chosen = 1
            total += d_red
        else:
            chosen = 2
            total += d_blue
        colors[v] = chosen
        for i in range(v_ptr[v], v_ptr[v + 1]):
            u = v_adj[i]
            und[u] -= 1
            if chosen == 1:
                has_red[u] = 1
            else:
                has_blue[u] = 1
        trace[idx] = total
    return colors, initial, trace


def condexp_strong_split(u_ptr, u_adj, v_ptr, v_adj, order, lo, hi,
                         constrained, p2n):
    """Greedy red/blue choice minimizing the exact expected number of
    constrained U-nodes whose final red count leaves [lo, hi].

    p2n[j] = 2^-j. Returns (colors, initial, trace).
    """
    nu = u_ptr.shape[0] - 1
    nv = v_ptr.shape[0] - 1
    und = np.empty(nu, dtype=np.int64)
    dr = np.zeros(nu, dtype=np.int64)
    risk = np.zeros(nu, dtype=np.float64)
    total = 0.0
    for u in range(nu):
        und[u] = u_ptr[u + 1] - u_ptr[u]
        if constrained[u] == 1:
            # P(X <= lo-1) + P(X >= hi+1) for X ~ Bin(und, 1/2)
            nn = und[u]
            k1 = lo[u] - 1
            r = 0.0
            if k1 >= nn:
                r += 1.0
            elif k1 >= 0:
                term = p2n[nn]
                s = term
                for j in range(k1):
                    term = term * (nn - j) / (j + 1.0)
                    s += term
                r += s
            k2 = nn - hi[u] - 1
            if k2 >= nn:
                r += 1.0
            elif k2 >= 0:
                term = p2n[nn]
                s = term
                for j in range(k2):
                    term = term * (nn - j) / (j + 1.0)
                    s += term
                r += s
            risk[u] = r
            total += r
    initial = total
    colors = np.zeros(nv, dtype=np.int8)
    trace = np.empty(order.shape[0], dtype=np.float64)
    for idx in range(order.shape[0]):
        v = order[idx]
        d_red = 0.0
        d_blue = 0.0
        excess = 0  # red-minus-blue decided so far around v's constraints
        for i in range(v_ptr[v], v_ptr[v + 1]):
            u = v_adj[i]
            decided = (u_ptr[u + 1] - u_ptr[u]) - und[u]
            excess += 2 * dr[u] - decided
            if constrained[u] == 0:
                continue
            nn = und[u] - 1
            for branch in range(2):
                drb = dr[u] + 1 if branch == 0 else dr[u]
                r = 0.0
                k1 = lo[u] - drb - 1
                if k1 >= nn:
                    r += 1.0
                elif k1 >= 0:
                    term = p2n[nn]
                    s = term
                    for j in range(k1):
                        term = term * (nn - j) / (j + 1.0)
                        s += term
                    r += s
                k2 = nn - (hi[u] - drb) - 1
                if k2 >= nn:
                    r += 1.0
                elif k2 >= 0:
                    term = p2n[nn]
                    s = term
                    for j in range(k2):
                        term = term * (nn - j) / (j + 1.0)
                        s += term
                    r += s
                if branch == 0:
                    d_red += r - risk[u]
                else:
                    d_blue += r - risk[u]
        if d_red < d_blue:
            chosen = 1
            total += d_red
        elif d_blue < d_red:
            chosen = 2
            total += d_blue
        else:
            # exact risk tie: drift toward local balance, red on full ties
            chosen = 2 if excess > 0 else 1
            total += d_red if chosen == 1 else d_blue
        colors[v] = chosen
        for i in range(v_ptr[v], v_ptr[v + 1]):
            u = v_adj[i]
            prev_und = und[u]
            und[u] = prev_und - 1
            if chosen == 1:
                dr[u] += 1
            if constrained[u] == 1:
                nn = und[u]
                r = 0.0
                k1 = lo[u] - dr[u] - 1
                if k1 >= nn:
                    r += 1.0
                elif k1 >= 0:
                    term = p2n[nn]
                    s = term
                    for j in range(k1):
                        term = term * (nn - j) / (j + 1.0)
                        s += term
                    r += s
                k2 = nn - (hi[u] - dr[u]) - 1
                if k2 >= nn:
                    r += 1.0
                elif k2 >= 0:
                    term = p2n[nn]
                    s = term
                    for j in range(k2):
                        term = term * (nn - j) / (j + 1.0)
                        s += term
                    r += s
                risk[u] = r
        trace[idx] = total
    return colors, initial, trace


def condexp_shatter(u_ptr, u_adj, v_ptr, v_adj, order, a1base, a2base,
                    emn, emp, pmn, pmp, q34):
    """Three-way greedy (red/blue/uncolored) minimizing the shattering failure
    estimator: exponential-moment terms for too-few/too-many colored neighbors
    plus the exact no-red/no-blue survival products.

    Table semantics (t is the caller's moment parameter):
    a1base[u] = exp(t*deg(u)/4), a2base[u] = exp(-3*t*deg(u)/4),
    emn[j] = exp(-t*j), emp[j] = exp(t*j),
    pmn[j] = ((1+exp(-t))/2)^j, pmp[j] = ((1+exp(t))/2)^j, q34[j] = (3/4)^j.
    Returns (trit colors, initial, trace).
    """
    nu = u_ptr.shape[0] - 1
    nv = v_ptr.shape[0] - 1
    und = np.empty(nu, dtype=np.int64)
    ncol = np.zeros(nu, dtype=np.int64)
    has_red = np.zeros(nu, dtype=np.uint8)
    has_blue = np.zeros(nu, dtype=np.uint8)
    total = 0.0
    for u in range(nu):
        und[u] = u_ptr[u + 1] - u_ptr[u]
        total += a1base[u] * pmn[und[u]] + a2base[u] * pmp[und[u]] + 2.0 * q34[und[u]]
    initial = total
    colors = np.zeros(nv, dtype=np.int8)
    trace = np.empty(order.shape[0], dtype=np.float64)
    for idx in range(order.shape[0]):
        v = order[idx]
        d_red = 0.0
        d_blue = 0.0
        d_unc = 0.0
        for i in range(v_ptr[v], v_ptr[v + 1]):
            u = v_adj[i]
            ud = und[u]
            c = ncol[u]
            cur = a1base[u] * emn[c] * pmn[ud] + a2base[u] * emp[c] * pmp[ud]
            if has_red[u] == 0:
                cur += q34[ud]
            if has_blue[u] == 0:
                cur += q34[ud]
            mom_col = a1base[u] * emn[c + 1] * pmn[ud - 1] \
                + a2base[u] * emp[c + 1] * pmp[ud - 1]
            mom_unc = a1base[u] * emn[c] * pmn[ud - 1] \
                + a2base[u] * emp[c] * pmp[ud - 1]
            # red branch: no-red risk vanishes, no-blue risk keeps shrinking
            r_red = mom_col
            if has_blue[u] == 0:
                r_red += q34[ud - 1]
            r_blue = mom_col
            if has_red[u] == 0:
                r_blue += q34[ud - 1]
            r_unc = mom_unc
            if has_red[u] == 0:
                r_unc += q34[ud - 1]
            if has_blue[u] == 0:
                r_unc += q34[ud - 1]
            d_red += r_red - cur
            d_blue += r_blue - cur
            d_unc += r_unc - cur
        if d_red <= d_blue and d_red <= d_unc:
            chosen = 1
            total += d_red
        elif d_blue <= d_unc:
            chosen = 2
            total += d_blue
        else:
            chosen = 0
            total += d_unc
        colors[v] = chosen
        for i in range(v_ptr[v], v_ptr[v + 1]):
            u = v_adj[i]
            und[u] -= 1
            if chosen == 1:
                ncol[u] += 1
                has_red[u] = 1
            elif chosen == 2:
                ncol[u] += 1
                has_blue[u] = 1
        trace[idx] = total
    return colors, initial, trace


def greedy_coloring(indptr, indices, n, order):
    """Smallest-free-color greedy in the given node order."""
    colors = np.full(n, -1, dtype=np.int64)
    used = np.full(n + 2, -1, dtype=np.int64)
    for idx in range(order.shape[0]):
        v = order[idx]
        for i in range(indptr[v], indptr[v + 1]):
            c = colors[indices[i]]
            if c >= 0:
                used[c] = v
        c = 0
        while used[c] == v:
            c += 1
        colors[v] = c
    return colors


def greedy_mis(indptr, indices, n, order):
    """Greedy maximal independent set in the given node order (mask output)."""
    state = np.zeros(n, dtype=np.int8)  # 0 free, 1 in set, 2 blocked
    for idx in range(order.shape[0]):
        v = order[idx]
        if state[v] != 0:
            continue
        state[v] = 1
        for i in range(indptr[v], indptr[v + 1]):
            y = indices[i]
            if state[y] == 0:
                state[y] = 2
    return state == 1
