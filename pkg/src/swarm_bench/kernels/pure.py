"""Pure-Python kernels: beam marching, scan integration, gain counting, A*.

This module is the reference implementation. The compiled twin in
``_core.pyx`` mirrors every arithmetic expression one-for-one (same operations,
same order, no FMA contraction) so both backends produce bit-identical
results and experiment outputs do not depend on which backend is active.
"""

import heapq
from math import exp, floor, sqrt

BACKEND = "pure"

SQRT2 = sqrt(2.0)


def range_confidence(d, blind, rise, far_start, fall, max_range):
    """Trapezoid range term: 0 in the blind zone, 1 at mid range, 0.5 at max."""
    if d <= blind:
        return 0.0
    if d < blind + rise:
        return (d - blind) / rise
    if d <= far_start:
        return 1.0
    if d > max_range:
        return 0.5
    return 1.0 - 0.5 * ((d - far_start) / fall)


def trace_beam(block, w, h, inv_cell, x0, y0, sdx, sdy, n_steps, out_ix, out_iy):
    """March one beam over ``block`` by fixed-step sampling.

    Samples k = 0..n_steps at (x0 + k*sdx, y0 + k*sdy). Cells are appended
    to out_ix/out_iy in traversal order (consecutive duplicates skipped;
    a straight ray never revisits a cell). Marching stops at the first
    blocked cell (the hit, excluded from the swept list) or when a sample
    leaves the grid.

    Returns (n_swept, hit, hit_ix, hit_iy, k_hit) where k_hit is the sample
    index of the first blocked sample (-1 on a miss).
    """
    n = 0
    prev_ix = -1
    prev_iy = -1
    for k in range(n_steps + 1):
        px = x0 + k * sdx
        py = y0 + k * sdy
        ix = int(floor(px * inv_cell))
        iy = int(floor(py * inv_cell))
        if ix < 0 or ix >= w or iy < 0 or iy >= h:
            break
        if ix == prev_ix and iy == prev_iy:
            continue
        if block[ix, iy]:
            return n, 1, ix, iy, k
        out_ix[n] = ix
        out_iy[n] = iy
        n += 1
        prev_ix = ix
        prev_iy = iy
    return n, 0, -1, -1, -1


def scan_integrate(
    truth,
    logodds,
    touched,
    visited,
    x0,
    y0,
    sdx_arr,
    sdy_arr,
    ux_arr,
    uy_arr,
    noise_mult,
    n_steps,
    step_len,
    cell_size,
    inv_cell,
    max_range,
    blind,
    rise,
    far_start,
    fall,
    inv_two_sig2,
    dl_occ,
    dl_free,
    l_min,
    l_max,
    out_dist,
    out_hit,
):
    """Cast every beam against ``truth`` and fold the scan into the belief.

    Swept cells get a free update scaled by their measurement confidence,
    the terminal cell (re-indexed by the noisy distance) an occupied one.
    Cells behind the first true obstacle are never swept. Zero-confidence
    updates leave log-odds and the touched layer alone; the visited layer
    records every traversed cell.
    """
    w = truth.shape[0]
    h = truth.shape[1]
    n_beams = sdx_arr.shape[0]
    for b in range(n_beams):
        sdx = sdx_arr[b]
        sdy = sdy_arr[b]
        ux = ux_arr[b]
        uy = uy_arr[b]

        # First pass: true hit distance.
        k_true = -1
        k_last = -1
        prev_ix = -1
        prev_iy = -1
        for k in range(n_steps + 1):
            px = x0 + k * sdx
            py = y0 + k * sdy
            ix = int(floor(px * inv_cell))
            iy = int(floor(py * inv_cell))
            if ix < 0 or ix >= w or iy < 0 or iy >= h:
                break
            k_last = k
            if ix == prev_ix and iy == prev_iy:
                continue
            prev_ix = ix
            prev_iy = iy
            if truth[ix, iy]:
                k_true = k
                break

        if k_true >= 0:
            d_true = k_true * step_len
            d_meas = d_true * noise_mult[b]
            if d_meas < 0.0:
                d_meas = 0.0
            if d_meas >= max_range:
                hit = 0
                d_meas = max_range
            else:
                hit = 1
        else:
            d_true = max_range
            d_meas = max_range
            hit = 0

        # Second pass: sweep free cells up to min(true wall, measured range).
        prev_ix = -1
        prev_iy = -1
        for k in range(n_steps + 1):
            if k_true >= 0 and k >= k_true:
                break
            if k_true < 0 and k > k_last:
                break
            if hit and k * step_len >= d_meas:
                break
            px = x0 + k * sdx
            py = y0 + k * sdy
            ix = int(floor(px * inv_cell))
            iy = int(floor(py * inv_cell))
            if ix < 0 or ix >= w or iy < 0 or iy >= h:
                break
            if ix == prev_ix and iy == prev_iy:
                continue
            prev_ix = ix
            prev_iy = iy
            visited[ix, iy] = 1
            cx = (ix + 0.5) * cell_size
            cy = (iy + 0.5) * cell_size
            rx = cx - x0
            ry = cy - y0
            along = rx * ux + ry * uy
            off = rx * uy - ry * ux
            lat = exp(-(off * off) * inv_two_sig2)
            conf = lat * range_confidence(along, blind, rise, far_start, fall, max_range)
            if conf > 0.0:
                val = logodds[ix, iy] + conf * dl_free
                if val < l_min:
                    val = l_min
                elif val > l_max:
                    val = l_max
                logodds[ix, iy] = val
                touched[ix, iy] = 1

        if hit:
            hx = x0 + d_meas * ux
            hy = y0 + d_meas * uy
            ix = int(floor(hx * inv_cell))
            iy = int(floor(hy * inv_cell))
            if 0 <= ix < w and 0 <= iy < h:
                visited[ix, iy] = 1
                cx = (ix + 0.5) * cell_size
                cy = (iy + 0.5) * cell_size
                rx = cx - x0
                ry = cy - y0
                along = rx * ux + ry * uy
                off = rx * uy - ry * ux
                lat = exp(-(off * off) * inv_two_sig2)
                conf = lat * range_confidence(along, blind, rise, far_start, fall, max_range)
                if conf > 0.0:
                    val = logodds[ix, iy] + conf * dl_occ
                    if val < l_min:
                        val = l_min
                    elif val > l_max:
                        val = l_max
                    logodds[ix, iy] = val
                    touched[ix, iy] = 1

        out_dist[b] = d_meas
        out_hit[b] = hit


def count_gain(
    block,
    touched,
    stamp,
    stamp_val,
    xs,
    ys,
    head_idx,
    sdx_table,
    sdy_table,
    n_steps,
    inv_cell,
):
    """Count unique untouched cells swept by noise-free scans from each pose.

    One scan (one row of the step tables, selected by head_idx) is cast
    from every (xs, ys). ``block`` stops beams, ``stamp`` deduplicates
    across the whole call via the caller-provided stamp_val.
    """
    w = block.shape[0]
    h = block.shape[1]
    n_scans = xs.shape[0]
    n_beams = sdx_table.shape[1]
    count = 0
    for s in range(n_scans):
        x0 = xs[s]
        y0 = ys[s]
        hd = head_idx[s]
        for b in range(n_beams):
            sdx = sdx_table[hd, b]
            sdy = sdy_table[hd, b]
            prev_ix = -1
            prev_iy = -1
            for k in range(n_steps + 1):
                px = x0 + k * sdx
                py = y0 + k * sdy
                ix = int(floor(px * inv_cell))
                iy = int(floor(py * inv_cell))
                if ix < 0 or ix >= w or iy < 0 or iy >= h:
                    break
                if ix == prev_ix and iy == prev_iy:
                    continue
                prev_ix = ix
                prev_iy = iy
                if block[ix, iy]:
                    break
                if stamp[ix, iy] != stamp_val:
                    stamp[ix, iy] = stamp_val
                    if not touched[ix, iy]:
                        count += 1
    return count


# Neighbor order is part of the determinism contract: both backends expand
# successors in this exact order so returned paths are identical.
_NEIGHBORS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


def astar(occupied, unknown, si, sj, gi, gj, unknown_mult):
    """8-connected A* with octile heuristic.

    Orthogonal steps cost 1, diagonal sqrt(2); entering an unknown cell
    multiplies the step cost by unknown_mult. Occupied cells are
    impassable. Returns (list of (i, j) from start to goal, cost) or
    (None, inf) when the goal is unreachable.
    """
    w = occupied.shape[0]
    h = occupied.shape[1]
    if si == gi and sj == gj:
        return [(si, sj)], 0.0
    g = {}
    parent = {}
    closed = set()
    start = (si, sj)
    goal = (gi, gj)
    g[start] = 0.0
    counter = 0
    di = si - gi if si > gi else gi - si
    dj = sj - gj if sj > gj else gj - sj
    hmin = di if di < dj else dj
    hmax = di if di > dj else dj
    open_heap = [((hmax - hmin) + SQRT2 * hmin, counter, si, sj)]
    while open_heap:
        _, _, ci, cj = heapq.heappop(open_heap)
        cur = (ci, cj)
        if cur in closed:
            continue
        closed.add(cur)
        if cur == goal:
            path = [cur]
            while cur != start:
                cur = parent[cur]
                path.append(cur)
            path.reverse()
            return path, g[goal]
        gc = g[cur]
        for di, dj in _NEIGHBORS:
            ni = ci + di
            nj = cj + dj
            if ni < 0 or ni >= w or nj < 0 or nj >= h:
                continue
            nxt = (ni, nj)
            if nxt in closed or occupied[ni, nj]:
                continue
            step = 1.0 if di == 0 or dj == 0 else SQRT2
            if unknown[ni, nj]:
                step = step * unknown_mult
            ng = gc + step
            if ng < g.get(nxt, float("inf")):
                g[nxt] = ng
                parent[nxt] = cur
                ai = ni - gi if ni > gi else gi - ni
                aj = nj - gj if nj > gj else gj - nj
                amin = ai if ai < aj else aj
                amax = ai if ai > aj else aj
                counter += 1
                heapq.heappush(open_heap, (ng + ((amax - amin) + SQRT2 * amin), counter, ni, nj))
    return None, float("inf")
