#!/usr/bin/env python3
"""Writes an .m2d mesh of the channel (0, 2.2) x (0, 0.41) minus the disc of
radius 0.05 centred at (0.2, 0.2).

Boundary tags: 1 walls and cylinder, 2 inlet (x = 0), 3 outlet (x = 2.2).
"""

import argparse
import math

import numpy as np
from scipy.spatial import Delaunay

LENGTH, HEIGHT = 2.2, 0.41
CENTER = np.array([0.2, 0.2])
RADIUS = 0.05
WALL, INLET, OUTLET = 1, 2, 3


def ring_points(h):
    """Concentric rings around the cylinder, spacing growing towards h."""
    n = max(16, int(math.ceil(2 * math.pi * RADIUS / (0.4 * h))))
    pts = []
    r = RADIUS
    offset = 0.0
    while True:
        spacing = 2 * math.pi * r / n
        if spacing > h:
            break
        theta = offset + 2 * math.pi * np.arange(n) / n
        pts.append(CENTER + r * np.column_stack([np.cos(theta), np.sin(theta)]))
        r += spacing * math.sqrt(3) / 2
        offset += math.pi / n
    return np.vstack(pts), r


def background_points(h, r_clear):
    nx, ny = int(round(LENGTH / h)), int(round(HEIGHT / h))
    xs, ys = np.linspace(0, LENGTH, nx + 1), np.linspace(0, HEIGHT, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    keep = np.linalg.norm(pts - CENTER, axis=1) > r_clear + 0.5 * h
    return pts[keep]


def build(h):
    rings, r_outer = ring_points(h)
    pts = np.vstack([rings, background_points(h, r_outer)])
    tri = Delaunay(pts).simplices
    centroids = pts[tri].mean(axis=1)
    tri = tri[np.linalg.norm(centroids - CENTER, axis=1) > RADIUS]
    a, b, c = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    tri[area < 0] = tri[area < 0][:, [0, 2, 1]]

    count = {}
    for t in tri:
        for i in range(3):
            e = tuple(sorted((int(t[i]), int(t[(i + 1) % 3]))))
            count[e] = count.get(e, 0) + 1
    boundary = []
    for (i, j), k in sorted(count.items()):
        if k != 1:
            continue
        mid = 0.5 * (pts[i] + pts[j])
        if abs(mid[0]) < 1e-12:
            tag = INLET
        elif abs(mid[0] - LENGTH) < 1e-12:
            tag = OUTLET
        else:
            tag = WALL
        boundary.append((i, j, tag))

    used = np.unique(tri)
    remap = -np.ones(len(pts), dtype=int)
    remap[used] = np.arange(len(used))
    return pts[used], remap[tri], [(remap[i], remap[j], t) for i, j, t in boundary]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("output")
    parser.add_argument("--h", type=float, default=0.02, help="background mesh size")
    args = parser.parse_args()
    pts, tri, boundary = build(args.h)
    with open(args.output, "w") as out:
        out.write(f"# cylinder channel, h = {args.h}\n")
        out.write(f"{len(pts)} {len(tri)} {len(boundary)}\n")
        for x, y in pts:
            out.write(f"{x:.17g} {y:.17g}\n")
        for t in tri:
            out.write(f"{t[0]} {t[1]} {t[2]}\n")
        for i, j, tag in boundary:
            out.write(f"{i} {j} {tag}\n")


if __name__ == "__main__":
    main()
