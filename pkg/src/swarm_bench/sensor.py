"""Simulated 2-D LIDAR: ray marching, range noise, measurement confidence.

Beams are marched over the grid by fixed-step sampling (step = a fraction
of the cell side), which is also the definition the independent oracle in
the test suite uses. All trig happens here in Python so both kernel
backends consume identical direction tables.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import InvalidPose
from .gridmap import OccupancyGrid, logodds_update

HEADINGS = (0, 45, 90, 135, 180, 225, 270, 315)


@dataclass(frozen=True)
class LidarConfig:
    max_range_m: float = 4.0
    blind_range_m: float = 0.3
    fov_deg: float = 180.0
    resolution_deg: float = 1.0
    noise_std_fraction: float = 0.05
    # Confidence-curve shape (exposed; see measurement_confidence).
    rise_m: float = 0.2
    fall_m: float = 0.5
    # Beam sampling step as a fraction of the cell side.
    sample_step_fraction: float = 0.25
    # Additive range noise in meters; used instead of the multiplicative
    # fraction when set. Off by default.
    additive_std_m: float | None = None

    def __post_init__(self):
        if not 0 <= self.blind_range_m < self.max_range_m:
            raise ValueError("need 0 <= blind_range_m < max_range_m")
        if self.resolution_deg <= 0:
            raise ValueError("resolution_deg must be positive")

    @property
    def n_beams(self) -> int:
        return int(round(self.fov_deg / self.resolution_deg)) + 1

    @property
    def far_start_m(self) -> float:
        return self.max_range_m - self.fall_m


@dataclass
class Beam:
    angle_deg: float
    distance_m: float
    hit: bool
    swept: list  # [(i, j, confidence), ...] in traversal order
    hit_cell: tuple | None = None  # (i, j, confidence)


@dataclass
class LidarScan:
    x_m: float
    y_m: float
    heading_deg: float
    beams: list


def step_geometry(config: LidarConfig, cell_size: float):
    """(step length, sample count): samples k*step for k = 0..n_steps."""
    step_len = cell_size * config.sample_step_fraction
    n_steps = int(math.floor(config.max_range_m / step_len + 1e-9))
    return step_len, n_steps


def beam_angles(heading_deg: float, config: LidarConfig) -> np.ndarray:
    """Absolute beam angles, FOV centered on the heading, ordered."""
    half = config.fov_deg / 2.0
    return heading_deg - half + np.arange(config.n_beams) * config.resolution_deg


def beam_dirs(heading_deg: float, config: LidarConfig):
    """Unit direction per beam. Angle convention: 0 deg = +y, 90 deg = +x."""
    ang = np.radians(beam_angles(heading_deg, config))
    return np.sin(ang), np.cos(ang)


@lru_cache(maxsize=8)
def heading_step_tables(config: LidarConfig, cell_size: float):
    """Per-step displacement tables for the eight 45-degree headings,
    shape (8, n_beams). Shared by the gain-estimation kernel."""
    step_len, _ = step_geometry(config, cell_size)
    sdx = np.empty((len(HEADINGS), config.n_beams))
    sdy = np.empty_like(sdx)
    for h, heading in enumerate(HEADINGS):
        ux, uy = beam_dirs(float(heading), config)
        sdx[h] = ux * step_len
        sdy[h] = uy * step_len
    return sdx, sdy


def _check_origin(truth_grid: OccupancyGrid, x_m: float, y_m: float):
    i, j = truth_grid.cell_of(x_m, y_m)
    if not truth_grid.in_bounds(i, j):
        raise InvalidPose(f"origin ({x_m}, {y_m}) outside grid")
    if truth_grid.truth is not None and truth_grid.truth[i, j]:
        raise InvalidPose(f"origin ({x_m}, {y_m}) inside obstacle")


def cast_beam(truth_grid: OccupancyGrid, origin, angle_deg: float,
              config: LidarConfig):
    """Cast one noise-free beam against the ground truth.

    Returns (distance_m, hit, swept_cells) where swept_cells is the ordered
    list of (i, j) the beam traverses before the first obstacle.
    """
    x0, y0 = origin
    _check_origin(truth_grid, x0, y0)
    cell = truth_grid.spec.cell_size_m
    step_len, n_steps = step_geometry(config, cell)
    rad = math.radians(angle_deg)
    sdx = math.sin(rad) * step_len
    sdy = math.cos(rad) * step_len
    out_ix = np.empty(n_steps + 1, dtype=np.int32)
    out_iy = np.empty(n_steps + 1, dtype=np.int32)
    n, hit, _, _, k_hit = kernels.trace_beam(
        np.ascontiguousarray(truth_grid.truth), truth_grid.spec.width_cells,
        truth_grid.spec.height_cells, 1.0 / cell, x0, y0, sdx, sdy, n_steps,
        out_ix, out_iy)
    swept = list(zip(out_ix[:n].tolist(), out_iy[:n].tolist()))
    if hit:
        distance = k_hit * step_len
        if distance >= config.max_range_m:
            return config.max_range_m, False, swept
        return distance, True, swept
    return config.max_range_m, False, swept


def apply_noise(distance_m: float, config: LidarConfig, rng) -> float:
    """Noisy range reading, clamped to [0, max_range]."""
    if config.additive_std_m is not None:
        noisy = distance_m + rng.normal(0.0, config.additive_std_m)
    else:
        noisy = distance_m * (1.0 + rng.normal(0.0, config.noise_std_fraction))
    return min(max(noisy, 0.0), config.max_range_m)


def lateral_confidence(offset_m: float, cell_size: float) -> float:
    """Gaussian falloff with perpendicular distance from the beam to the
    cell center; sigma is half the cell side."""
    sig = cell_size * 0.5
    inv_two_sig2 = 1.0 / (2.0 * (sig * sig))
    return math.exp(-(offset_m * offset_m) * inv_two_sig2)


def range_confidence(distance_m: float, config: LidarConfig) -> float:
    return kernels.range_confidence(distance_m, config.blind_range_m,
                                    config.rise_m, config.far_start_m,
                                    config.fall_m, config.max_range_m)


def measurement_confidence(origin, unit_dir, cell, distance_m: float,
                           cell_size: float, config: LidarConfig) -> float:
    """Product of the lateral and range confidence terms for one cell on a
    beam. ``unit_dir`` is the beam's unit direction; ``distance_m`` the
    along-beam distance at which the cell is measured."""
    x0, y0 = origin
    ux, uy = unit_dir
    cx = (cell[0] + 0.5) * cell_size
    cy = (cell[1] + 0.5) * cell_size
    rx = cx - x0
    ry = cy - y0
    off = rx * uy - ry * ux
    return lateral_confidence(off, cell_size) * range_confidence(distance_m, config)


def _beam_confidences(x0, y0, ux, uy, cells, cell_size, config):
    out = []
    for i, j in cells:
        cx = (i + 0.5) * cell_size
        cy = (j + 0.5) * cell_size
        rx = cx - x0
        ry = cy - y0
        along = rx * ux + ry * uy
        conf = measurement_confidence((x0, y0), (ux, uy), (i, j), along,
                                      cell_size, config)
        out.append((i, j, conf))
    return out


def perform_scan(truth_grid: OccupancyGrid, pose, config: LidarConfig,
                 rng=None) -> LidarScan:
    """Full scan from (x, y, heading): cast every beam, apply range noise
    (when an rng is given), and attach per-cell confidences.

    Noise values are drawn in beam order before any beam is processed, so
    results do not depend on evaluation order.
    """
    x0, y0, heading = pose
    _check_origin(truth_grid, x0, y0)
    cell = truth_grid.spec.cell_size_m
    step_len, n_steps = step_geometry(config, cell)
    angles = beam_angles(heading, config)
    ux_arr, uy_arr = beam_dirs(heading, config)
    additive = config.additive_std_m is not None
    if rng is not None:
        # Drawn in beam order, vectorized: identical stream to scan_into.
        std = config.additive_std_m if additive else config.noise_std_fraction
        noise = rng.normal(0.0, std, size=config.n_beams)
    else:
        noise = np.zeros(config.n_beams)

    truth = np.ascontiguousarray(truth_grid.truth)
    inv_cell = 1.0 / cell
    out_ix = np.empty(n_steps + 1, dtype=np.int32)
    out_iy = np.empty(n_steps + 1, dtype=np.int32)
    beams = []
    for b in range(config.n_beams):
        ux = float(ux_arr[b])
        uy = float(uy_arr[b])
        n, hit, _, _, k_hit = kernels.trace_beam(
            truth, truth_grid.spec.width_cells, truth_grid.spec.height_cells,
            inv_cell, x0, y0, ux * step_len, uy * step_len, n_steps,
            out_ix, out_iy)
        cells = list(zip(out_ix[:n].tolist(), out_iy[:n].tolist()))
        if hit:
            d_true = k_hit * step_len
            if additive:
                d_meas = d_true + noise[b]
            else:
                d_meas = d_true * (1.0 + noise[b])
            d_meas = min(max(d_meas, 0.0), config.max_range_m)
            if d_meas >= config.max_range_m:
                hit = False
                d_meas = config.max_range_m
                swept = cells
            else:
                # Sweep stops at the nearer of the true wall and the reading.
                swept = _cut_swept(x0, y0, ux, uy, step_len, k_hit, d_meas,
                                   inv_cell, truth_grid.spec)
        else:
            d_meas = config.max_range_m
            swept = cells
        beam = Beam(angle_deg=float(angles[b]), distance_m=d_meas, hit=bool(hit),
                    swept=_beam_confidences(x0, y0, ux, uy, swept, cell, config))
        if hit:
            hi = int(math.floor((x0 + d_meas * ux) * inv_cell))
            hj = int(math.floor((y0 + d_meas * uy) * inv_cell))
            if truth_grid.in_bounds(hi, hj):
                conf = _beam_confidences(x0, y0, ux, uy, [(hi, hj)], cell, config)[0][2]
                beam.hit_cell = (hi, hj, conf)
        beams.append(beam)
    return LidarScan(x_m=x0, y_m=y0, heading_deg=heading, beams=beams)


def _cut_swept(x0, y0, ux, uy, step_len, k_hit, d_meas, inv_cell, spec):
    """Re-march samples below min(true hit, measured range); mirrors the
    sweep loop of the fused kernel."""
    swept = []
    prev = None
    k = 0
    while k < k_hit and k * step_len < d_meas:
        px = x0 + k * (ux * step_len)
        py = y0 + k * (uy * step_len)
        ij = (int(math.floor(px * inv_cell)), int(math.floor(py * inv_cell)))
        if not (0 <= ij[0] < spec.width_cells and 0 <= ij[1] < spec.height_cells):
            break
        if ij != prev:
            swept.append(ij)
            prev = ij
        k += 1
    return swept


def integrate_scan(belief: OccupancyGrid, scan: LidarScan) -> OccupancyGrid:
    """Fold a scan into the belief grid: free updates along each beam,
    an occupied update at each terminal cell, visited flags for all
    traversed cells. Repeated integrations accumulate additively."""
    for beam in scan.beams:
        for i, j, conf in beam.swept:
            belief.visited[i, j] = 1
            if conf > 0.0:
                belief.log_odds[i, j] = logodds_update(
                    belief.log_odds[i, j], False, conf,
                    belief.dl_occ, belief.dl_free, belief.l_min, belief.l_max)
                belief.touched[i, j] = 1
        if beam.hit_cell is not None:
            i, j, conf = beam.hit_cell
            belief.visited[i, j] = 1
            if conf > 0.0:
                belief.log_odds[i, j] = logodds_update(
                    belief.log_odds[i, j], True, conf,
                    belief.dl_occ, belief.dl_free, belief.l_min, belief.l_max)
                belief.touched[i, j] = 1
    return belief


def scan_into(belief: OccupancyGrid, truth_grid: OccupancyGrid, pose,
              config: LidarConfig, rng=None):
    """Fused cast-and-integrate used by the mission loop. Equivalent to
    perform_scan followed by integrate_scan (asserted by the test suite),
    without building per-beam Python structures."""
    x0, y0, heading = pose
    _check_origin(truth_grid, x0, y0)
    if rng is not None and config.additive_std_m is not None:
        raise ValueError("fused scan path supports multiplicative noise only")
    cell = truth_grid.spec.cell_size_m
    step_len, n_steps = step_geometry(config, cell)
    ux_arr, uy_arr = beam_dirs(heading, config)
    if rng is not None:
        noise = 1.0 + rng.normal(0.0, config.noise_std_fraction, size=config.n_beams)
    else:
        noise = np.ones(config.n_beams)
    sig = cell * 0.5
    inv_two_sig2 = 1.0 / (2.0 * (sig * sig))
    out_dist = np.empty(config.n_beams)
    out_hit = np.zeros(config.n_beams, dtype=np.uint8)
    kernels.scan_integrate(
        truth_grid.truth, belief.log_odds, belief.touched, belief.visited,
        x0, y0,
        np.ascontiguousarray(ux_arr * step_len),
        np.ascontiguousarray(uy_arr * step_len),
        np.ascontiguousarray(ux_arr), np.ascontiguousarray(uy_arr),
        np.ascontiguousarray(noise),
        n_steps, step_len, cell, 1.0 / cell, config.max_range_m,
        config.blind_range_m, config.rise_m, config.far_start_m, config.fall_m,
        inv_two_sig2, belief.dl_occ, belief.dl_free, belief.l_min, belief.l_max,
        out_dist, out_hit)
    return out_dist, out_hit


def scan_to_csv_rows(scan: LidarScan):
    """Debug serialization: one (angle, distance, hit) row per beam."""
    return [(beam.angle_deg, beam.distance_m, int(beam.hit)) for beam in scan.beams]
