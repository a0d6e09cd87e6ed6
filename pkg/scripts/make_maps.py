"""Generate the bundled ASCII maps.

Maps are authored at 0.2 m/cell desk scale and upsampled x2 for the
0.1 m/cell variants, so both scales share one geometry. The house map is
tuned to an interior obstacle ratio of ~0.27 at both scales and checked
for full 8-connectivity of the free space from the default start cell.
"""

import sys
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "maps"


def blank(w, h):
    grid = np.zeros((w, h), dtype=np.uint8)  # [i, j], i=x (east), j=y (north)
    grid[0, :] = grid[-1, :] = 1
    grid[:, 0] = grid[:, -1] = 1
    return grid


def to_text(grid):
    w, h = grid.shape
    lines = []
    for row in range(h):
        j = h - 1 - row
        lines.append("".join("#" if grid[i, j] else "." for i in range(w)))
    return "\n".join(lines) + "\n"


def upsample(grid):
    return np.kron(grid, np.ones((2, 2), dtype=np.uint8))


def interior_ratio(grid):
    interior = grid[1:-1, 1:-1]
    return interior.sum() / interior.size


def connected(grid, start):
    """All interior free cells reachable 8-connected from start."""
    w, h = grid.shape
    free = grid == 0
    seen = np.zeros_like(free)
    stack = [start]
    if not free[start]:
        return False
    seen[start] = True
    while stack:
        i, j = stack.pop()
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                ni, nj = i + di, j + dj
                if 0 <= ni < w and 0 <= nj < h and free[ni, nj] and not seen[ni, nj]:
                    seen[ni, nj] = True
                    stack.append((ni, nj))
    return bool((seen == free).all())


def hwall(grid, j, i0, i1, thick=2):
    grid[i0:i1 + 1, j:j + thick] = 1


def vwall(grid, i, j0, j1, thick=2):
    grid[i:i + thick, j0:j1 + 1] = 1


def door_v(grid, i, j0, width=5, thick=2):
    grid[i:i + thick, j0:j0 + width] = 0


def door_h(grid, j, i0, width=5, thick=2):
    grid[i0:i0 + width, j:j + thick] = 0


def make_empty(n=120):
    return blank(n, n)


def make_house(n=120, target_ratio=0.260, seed=7):
    g = blank(n, n)
    # Room partitions: two vertical and two horizontal walls, 2 cells thick.
    vwall(g, 40, 1, n - 2)
    vwall(g, 80, 1, n - 2)
    hwall(g, 40, 1, n - 2)
    hwall(g, 80, 1, n - 2)
    # Doorways between rooms (5 cells = 1 m wide).
    for i in (40, 80):
        door_v(g, i, 15)
        door_v(g, i, 58)
        door_v(g, i, 100)
    for j in (40, 80):
        door_h(g, j, 18)
        door_h(g, j, 61)
        door_h(g, j, 97)

    start = (5, 5)
    assert connected(g, start)

    # Furniture: chunky blocks dropped room by room until the target
    # interior ratio is reached, skipping any block that would disconnect
    # the free space or crowd a doorway.
    rng = np.random.default_rng(seed)
    attempts = 0
    while interior_ratio(g) < target_ratio and attempts < 4000:
        attempts += 1
        bw = int(rng.integers(6, 15))
        bh = int(rng.integers(6, 15))
        i0 = int(rng.integers(4, n - 4 - bw))
        j0 = int(rng.integers(4, n - 4 - bh))
        if i0 <= 10 and j0 <= 10:
            continue  # keep the start corner clear
        region = g[i0 - 3:i0 + bw + 3, j0 - 3:j0 + bh + 3]
        if region.any():
            continue  # 3-cell clearance from walls and other furniture
        g[i0:i0 + bw, j0:j0 + bh] = 1
        if not connected(g, start):
            g[i0:i0 + bw, j0:j0 + bh] = 0
    return g


def make_factory(w=250, h=150, seed=11):
    """Aisles of long shelf racks plus a few dead-end pockets."""
    g = blank(w, h)
    rack_h = 6
    aisle = 12
    j = 14
    row = 0
    while j + rack_h < h - 14:
        for i0 in range(12, w - 30, 46):
            off = 10 if row % 2 else 0
            i = i0 + off
            if i + 32 >= w - 4:
                continue
            g[i:i + 32, j:j + rack_h] = 1
        j += rack_h + aisle
        row += 1
    # Dead-end pockets along the south wall.
    for i in (60, 140, 200):
        g[i:i + 2, 1:10] = 1
        g[i + 12:i + 14, 1:10] = 1
        g[i:i + 14, 10:12] = 1
        door_h(g, 10, i + 4, width=4, thick=2)
    start = (5, 5)
    assert connected(g, start), "factory map free space is disconnected"
    return g


def main():
    OUT.mkdir(exist_ok=True)
    maps = {}

    # Empty maps are generated per scale: upsampling would double the
    # perimeter wall and leave obstacle cells inside the interior.
    maps["empty_120.txt"] = make_empty(120)
    maps["empty.txt"] = make_empty(240)

    house = make_house()
    maps["house_120.txt"] = house
    maps["house.txt"] = upsample(house)

    factory = make_factory()
    maps["factory_150.txt"] = factory
    maps["factory.txt"] = upsample(factory)

    for name, grid in maps.items():
        (OUT / name).write_text(to_text(grid), encoding="utf-8")
        start = (5, 5) if grid.shape[0] <= 260 else (10, 10)
        ok = connected(grid, start)
        print(f"{name}: {grid.shape[0]}x{grid.shape[1]} "
              f"interior ratio {interior_ratio(grid):.4f} connected={ok}")
        if not ok:
            sys.exit(f"{name} free space is disconnected")

    for name in ("house_120.txt", "house.txt"):
        r = interior_ratio(maps[name])
        if not 0.25 <= r <= 0.29:
            sys.exit(f"{name} ratio {r:.4f} outside 0.27 +/- 0.02")


if __name__ == "__main__":
    main()
