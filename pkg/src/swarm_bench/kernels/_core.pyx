# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: beam marching, scan integration, gain counting, A*.

Mirrors ``pure.py`` expression-for-expression. Any change there must be
replicated here; the parity tests assert bit-identical outputs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, floor, sqrt

cnp.import_array()

BACKEND = "compiled"

cdef double SQRT2 = sqrt(2.0)


cdef inline double _range_conf(double d, double blind, double rise,
                               double far_start, double fall, double max_range) nogil:
    if d <= blind:
        return 0.0
    if d < blind + rise:
        return (d - blind) / rise
    if d <= far_start:
        return 1.0
    if d > max_range:
        return 0.5
    return 1.0 - 0.5 * ((d - far_start) / fall)


def range_confidence(double d, double blind, double rise, double far_start,
                     double fall, double max_range):
    """Trapezoid range term: 0 in the blind zone, 1 at mid range, 0.5 at max."""
    return _range_conf(d, blind, rise, far_start, fall, max_range)


def trace_beam(cnp.uint8_t[:, ::1] block, int w, int h, double inv_cell,
               double x0, double y0, double sdx, double sdy, int n_steps,
               cnp.int32_t[::1] out_ix, cnp.int32_t[::1] out_iy):
    """See pure.trace_beam."""
    cdef int n = 0
    cdef int prev_ix = -1
    cdef int prev_iy = -1
    cdef int k, ix, iy
    cdef double px, py
    for k in range(n_steps + 1):
        px = x0 + k * sdx
        py = y0 + k * sdy
        ix = <int>floor(px * inv_cell)
        iy = <int>floor(py * inv_cell)
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


def scan_integrate(cnp.uint8_t[:, ::1] truth,
                   double[:, ::1] logodds,
                   cnp.uint8_t[:, ::1] touched,
                   cnp.uint8_t[:, ::1] visited,
                   double x0, double y0,
                   double[::1] sdx_arr, double[::1] sdy_arr,
                   double[::1] ux_arr, double[::1] uy_arr,
                   double[::1] noise_mult,
                   int n_steps, double step_len, double cell_size,
                   double inv_cell, double max_range,
                   double blind, double rise, double far_start, double fall,
                   double inv_two_sig2, double dl_occ, double dl_free,
                   double l_min, double l_max,
                   double[::1] out_dist, cnp.uint8_t[::1] out_hit):
    """See pure.scan_integrate."""
    cdef int w = truth.shape[0]
    cdef int h = truth.shape[1]
    cdef int n_beams = sdx_arr.shape[0]
    cdef int b, k, ix, iy, prev_ix, prev_iy, k_true, k_last, hit
    cdef double sdx, sdy, ux, uy, px, py, d_true, d_meas
    cdef double cx, cy, rx, ry, along, off, lat, conf, val, hx, hy

    for b in range(n_beams):
        sdx = sdx_arr[b]
        sdy = sdy_arr[b]
        ux = ux_arr[b]
        uy = uy_arr[b]

        k_true = -1
        k_last = -1
        prev_ix = -1
        prev_iy = -1
        for k in range(n_steps + 1):
            px = x0 + k * sdx
            py = y0 + k * sdy
            ix = <int>floor(px * inv_cell)
            iy = <int>floor(py * inv_cell)
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
            ix = <int>floor(px * inv_cell)
            iy = <int>floor(py * inv_cell)
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
            conf = lat * _range_conf(along, blind, rise, far_start, fall, max_range)
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
            ix = <int>floor(hx * inv_cell)
            iy = <int>floor(hy * inv_cell)
            if 0 <= ix < w and 0 <= iy < h:
                visited[ix, iy] = 1
                cx = (ix + 0.5) * cell_size
                cy = (iy + 0.5) * cell_size
                rx = cx - x0
                ry = cy - y0
                along = rx * ux + ry * uy
                off = rx * uy - ry * ux
                lat = exp(-(off * off) * inv_two_sig2)
                conf = lat * _range_conf(along, blind, rise, far_start, fall, max_range)
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


def count_gain(cnp.uint8_t[:, ::1] block,
               cnp.uint8_t[:, ::1] touched,
               cnp.int32_t[:, ::1] stamp, int stamp_val,
               double[::1] xs, double[::1] ys, cnp.int32_t[::1] head_idx,
               double[:, ::1] sdx_table, double[:, ::1] sdy_table,
               int n_steps, double inv_cell):
    """See pure.count_gain."""
    cdef int w = block.shape[0]
    cdef int h = block.shape[1]
    cdef int n_scans = xs.shape[0]
    cdef int n_beams = sdx_table.shape[1]
    cdef int count = 0
    cdef int s, b, k, ix, iy, prev_ix, prev_iy, hd
    cdef double x0, y0, sdx, sdy, px, py
    with nogil:
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
                    ix = <int>floor(px * inv_cell)
                    iy = <int>floor(py * inv_cell)
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


cdef inline void _heap_push(double* hf, long* hc, int* hi, int* hj, int* size,
                            double f, long c, int i, int j) nogil:
    cdef int pos = size[0]
    cdef int par
    size[0] += 1
    while pos > 0:
        par = (pos - 1) >> 1
        if f < hf[par] or (f == hf[par] and c < hc[par]):
            hf[pos] = hf[par]
            hc[pos] = hc[par]
            hi[pos] = hi[par]
            hj[pos] = hj[par]
            pos = par
        else:
            break
    hf[pos] = f
    hc[pos] = c
    hi[pos] = i
    hj[pos] = j


cdef inline void _heap_pop(double* hf, long* hc, int* hi, int* hj, int* size) nogil:
    cdef int n = size[0] - 1
    cdef double f = hf[n]
    cdef long c = hc[n]
    cdef int i = hi[n]
    cdef int j = hj[n]
    cdef int pos = 0
    cdef int child
    size[0] = n
    while True:
        child = 2 * pos + 1
        if child >= n:
            break
        if child + 1 < n and (hf[child + 1] < hf[child] or
                              (hf[child + 1] == hf[child] and hc[child + 1] < hc[child])):
            child += 1
        if hf[child] < f or (hf[child] == f and hc[child] < c):
            hf[pos] = hf[child]
            hc[pos] = hc[child]
            hi[pos] = hi[child]
            hj[pos] = hj[child]
            pos = child
        else:
            break
    hf[pos] = f
    hc[pos] = c
    hi[pos] = i
    hj[pos] = j


def astar(cnp.uint8_t[:, ::1] occupied, cnp.uint8_t[:, ::1] unknown,
          int si, int sj, int gi, int gj, double unknown_mult):
    """See pure.astar. Expansion order matches the pure backend exactly."""
    cdef int w = occupied.shape[0]
    cdef int h = occupied.shape[1]
    if si == gi and sj == gj:
        return [(si, sj)], 0.0

    cdef cnp.ndarray[cnp.float64_t, ndim=2] g_arr = np.full((w, h), np.inf)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] parent_arr = np.full((w, h), -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] closed_arr = np.zeros((w, h), dtype=np.uint8)
    cdef double[:, ::1] g = g_arr
    cdef cnp.int32_t[:, ::1] parent = parent_arr
    cdef cnp.uint8_t[:, ::1] closed = closed_arr

    # Heap arrays: each relaxation pushes at most once; 8 per cell bounds it.
    cdef int cap = 8 * w * h + 8
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hf_arr = np.empty(cap)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hc_arr = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] hi_arr = np.empty(cap, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] hj_arr = np.empty(cap, dtype=np.int32)
    cdef double* hf = <double*>hf_arr.data
    cdef long* hc = <long*>hc_arr.data
    cdef int* hi = <int*>hi_arr.data
    cdef int* hj = <int*>hj_arr.data
    cdef int heap_size = 0

    cdef int[8] ndi = [1, 1, 0, -1, -1, -1, 0, 1]
    cdef int[8] ndj = [0, 1, 1, 1, 0, -1, -1, -1]

    cdef long counter = 0
    cdef int ci, cj, ni, nj, m, di, dj, ai, aj, amin, amax, found
    cdef double gc, step, ng

    g[si, sj] = 0.0
    ai = si - gi if si > gi else gi - si
    aj = sj - gj if sj > gj else gj - sj
    amin = ai if ai < aj else aj
    amax = ai if ai > aj else aj
    _heap_push(hf, hc, hi, hj, &heap_size, (amax - amin) + SQRT2 * amin, counter, si, sj)

    found = 0
    with nogil:
        while heap_size > 0:
            ci = hi[0]
            cj = hj[0]
            _heap_pop(hf, hc, hi, hj, &heap_size)
            if closed[ci, cj]:
                continue
            closed[ci, cj] = 1
            if ci == gi and cj == gj:
                found = 1
                break
            gc = g[ci, cj]
            for m in range(8):
                di = ndi[m]
                dj = ndj[m]
                ni = ci + di
                nj = cj + dj
                if ni < 0 or ni >= w or nj < 0 or nj >= h:
                    continue
                if closed[ni, nj] or occupied[ni, nj]:
                    continue
                step = 1.0 if di == 0 or dj == 0 else SQRT2
                if unknown[ni, nj]:
                    step = step * unknown_mult
                ng = gc + step
                if ng < g[ni, nj]:
                    g[ni, nj] = ng
                    parent[ni, nj] = ci * h + cj
                    ai = ni - gi if ni > gi else gi - ni
                    aj = nj - gj if nj > gj else gj - nj
                    amin = ai if ai < aj else aj
                    amax = ai if ai > aj else aj
                    counter += 1
                    _heap_push(hf, hc, hi, hj, &heap_size,
                               ng + ((amax - amin) + SQRT2 * amin), counter, ni, nj)

    if not found:
        return None, float("inf")
    path = [(gi, gj)]
    cdef int cur_i = gi
    cdef int cur_j = gj
    cdef int packed
    while not (cur_i == si and cur_j == sj):
        packed = parent[cur_i, cur_j]
        cur_i = packed // h
        cur_j = packed % h
        path.append((cur_i, cur_j))
    path.reverse()
    return path, g_arr[gi, gj]
