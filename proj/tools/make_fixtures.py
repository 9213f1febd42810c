#!/usr/bin/env python3
"""Writes tests/fixtures/{scene,motion}.json. Pure arithmetic, no RNG, so the
output only changes when this file does."""
import json
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"
STEP = 0.15


def r(v):
    return round(v + 0.0, 4)


def axis_samples(lo, hi):
    n = max(1, int(math.ceil((hi - lo) / STEP)))
    return [lo + (hi - lo) * i / n for i in range(n + 1)]


def box_surface(center, size):
    lo = [c - s / 2 for c, s in zip(center, size)]
    hi = [c + s / 2 for c, s in zip(center, size)]
    pts = set()
    for fixed in range(3):
        a, b = [i for i in range(3) if i != fixed]
        for side in (lo[fixed], hi[fixed]):
            for u in axis_samples(lo[a], hi[a]):
                for v in axis_samples(lo[b], hi[b]):
                    p = [0.0, 0.0, 0.0]
                    p[fixed], p[a], p[b] = side, u, v
                    pts.add(tuple(r(x) for x in p))
    return sorted(pts)


OBJECTS = [
    ("bed_01", "bed", (5.0, 4.0, 0.3), (2.0, 1.6, 0.6)),
    ("cabinet_01", "cabinet", (2.2, 1.0, 0.5), (0.5, 0.4, 1.0)),
    ("chair_01", "chair", (2.2, 3.0, 0.45), (0.5, 0.5, 0.9)),
    ("lamp_01", "lamp", (3.5, 2.4, 0.95), (0.2, 0.2, 0.4)),
    ("sofa_01", "sofa", (0.8, 4.2, 0.4), (1.8, 0.8, 0.8)),
    ("table_01", "table", (3.3, 2.0, 0.375), (0.8, 1.2, 0.75)),
]


def scene():
    objects = []
    for oid, label, center, size in OBJECTS:
        pts = box_surface(center, size)
        o = {"id": oid, "label": label, "box": {"center": list(center), "size": list(size)},
             "points": [list(p) for p in pts]}
        if label == "lamp":
            o["colors"] = [[230, 217, 153] for _ in pts]
        objects.append(o)
    return {"id": "fixture_room", "objects": objects}


# local frame: x forward, y to the person's left, z up; joint order is fixed
SKELETON = [
    (0.0, 0.0, 0.95),     # pelvis
    (0.0, 0.1, 0.9),      # left hip
    (0.0, -0.1, 0.9),     # right hip
    (0.0, 0.0, 1.05),     # lower spine
    (0.02, 0.1, 0.5),     # left knee
    (0.02, -0.1, 0.5),    # right knee
    (0.0, 0.0, 1.2),      # middle spine
    (0.0, 0.1, 0.1),      # left ankle
    (0.0, -0.1, 0.1),     # right ankle
    (0.0, 0.0, 1.35),     # upper spine
    (0.1, 0.1, 0.02),     # left foot
    (0.1, -0.1, 0.02),    # right foot
    (0.0, 0.0, 1.5),      # neck
    (0.0, 0.08, 1.45),    # left collar
    (0.0, -0.08, 1.45),   # right collar
    (0.02, 0.0, 1.65),    # head
    (0.0, 0.18, 1.42),    # left shoulder
    (0.0, -0.18, 1.42),   # right shoulder
    (0.0, 0.2, 1.15),     # left elbow
    (0.0, -0.2, 1.15),    # right elbow
    (0.05, 0.2, 0.9),     # left wrist
    (0.05, -0.2, 0.9),    # right wrist
]
RIGHT_ELBOW, RIGHT_WRIST = 19, 21


def pose(x, y, heading, reach):
    local = [list(j) for j in SKELETON]
    if reach > 0:
        # right arm forward and down onto the table top
        local[RIGHT_ELBOW] = [0.25 * reach, -0.2, 1.15 - 0.2 * reach]
        local[RIGHT_WRIST] = [0.05 + 0.4 * reach, -0.2, 0.9 - 0.13 * reach]
    c, s = math.cos(heading), math.sin(heading)
    return [[r(x + c * lx - s * ly), r(y + s * lx + c * ly), r(lz)] for lx, ly, lz in local]


def motion():
    frames = []
    start, stop = (0.8, 0.8), (2.6, 2.0)
    walk_heading = math.atan2(stop[1] - start[1], stop[0] - start[0])
    for t in range(90):
        if t < 60:
            a = t / 59
            x = start[0] + (stop[0] - start[0]) * a
            y = start[1] + (stop[1] - start[1]) * a
            heading = walk_heading * (1 - a)
            frames.append(pose(x, y, heading, 0.0))
        else:
            reach = 1.0 if 70 <= t <= 84 else 0.0
            frames.append(pose(stop[0], stop[1], 0.0, reach))
    return {"id": "fixture_reach", "fps": 30.0, "joints": frames}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "scene.json").write_text(json.dumps(scene(), separators=(",", ":")) + "\n")
    (OUT / "motion.json").write_text(json.dumps(motion(), separators=(",", ":")) + "\n")


if __name__ == "__main__":
    main()
