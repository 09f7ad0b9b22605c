#!/usr/bin/env python3
"""Writes the small synthetic scene in data/synthetic (tracks, lanes, run.ini).

The scene covers a straight two-lane road, a gentle exit fork to the right, an IDM
follower behind a braking leader, a parked car on the shoulder and a car
merging back onto its lane centerline. Positions carry a little Gaussian
noise from a fixed seed, so the output is reproducible.
"""

import argparse
import math
import random
from pathlib import Path

SAMPLE_DT = 0.04
NOISE = 0.01

LANES = {
    "through": [(-50.0, 0.0), (400.0, 0.0)],
    "exit": [(-50.0, 0.0), (150.0, 0.0), (300.0, -40.0), (400.0, -60.0)],
    "through2": [(-50.0, 3.7), (400.0, 3.7)],
    "shoulder": [(-50.0, 7.7), (400.0, 7.7)],
}

IDM = dict(v0=14.0, s0=2.0, t_headway=1.2, a_max=1.8, b=2.0)


def along(polyline, s, d=0.0):
    """Point at arc length s and left offset d on a polyline."""
    for (x0, y0), (x1, y1) in zip(polyline, polyline[1:]):
        seg = math.hypot(x1 - x0, y1 - y0)
        if s <= seg or (x1, y1) == polyline[-1]:
            ux, uy = (x1 - x0) / seg, (y1 - y0) / seg
            return x0 + s * ux - d * uy, y0 + s * uy + d * ux
        s -= seg
    raise ValueError("empty polyline")


def times(start, end):
    n = round((end - start) / SAMPLE_DT)
    return [start + i * SAMPLE_DT for i in range(n + 1)]


def leader_speed(t):
    if t < 6.0:
        return 11.0
    if t < 11.0:
        return 11.0 - (t - 6.0)
    if t < 14.0:
        return 6.0
    return min(10.0, 6.0 + (t - 14.0))


def idm_accel(v, gap, v_lead):
    p = IDM
    s_star = p["s0"] + v * p["t_headway"] + v * (v - v_lead) / (2 * math.sqrt(p["a_max"] * p["b"]))
    s_star = max(0.0, s_star)
    return p["a_max"] * (1 - (v / p["v0"]) ** 4 - (s_star / gap) ** 2)


def convoy(length):
    """Scripted leader and IDM follower on the through lane."""
    lead_x, fol_x, fol_v = 40.0, 15.0, 10.0
    lead, fol = [], []
    for t in times(0.0, 20.0):
        lead.append((t, lead_x, 0.0))
        fol.append((t, fol_x, 0.0))
        v_lead = leader_speed(t)
        a = idm_accel(fol_v, lead_x - fol_x - length, v_lead)
        lead_x += v_lead * SAMPLE_DT
        fol_x += fol_v * SAMPLE_DT
        fol_v = max(0.0, fol_v + a * SAMPLE_DT)
    return lead, fol


def build_tracks():
    length = 4.5
    tracks = {}
    tracks["1"] = [(t, 12.0 * t, 3.7 + 0.3 * math.sin(0.6 * t)) for t in times(0.0, 20.0)]
    tracks["2"], tracks["3"] = convoy(length)
    tracks["4"] = [(t, *along(LANES["exit"], 170.0 + 9.0 * t, -0.8 * math.exp(-t / 2.0)))
                   for t in times(0.0, 20.0)]
    tracks["5"] = [(t, 200.0, 7.7) for t in times(0.0, 16.0)]
    tracks["6"] = [(t, -40.0 + 10.0 * (t - 2.0), 3.7 + 1.2 * math.exp(-0.5 * (t - 2.0)))
                   for t in times(2.0, 20.0)]
    return tracks, length


RUN_INI = """[paths]
tracks = tracks.csv
lanes = lanes.csv
out = out

[run]
models = cv,curv-cv,ls-cv,glk-cv,ls-idm,glk-idm
horizon = 6
stride = 0.5
seed = 7

[pf]
n = 500

[dataset]
agent_id = id
time = t
x = x
y = y
length = length
unit_scale = 1
"""


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path,
                        default=Path(__file__).resolve().parent.parent / "data" / "synthetic")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    with open(args.out / "lanes.csv", "w", newline="\n") as f:
        f.write("lane_id,x,y\n")
        for lane_id, pts in LANES.items():
            for x, y in pts:
                f.write(f"{lane_id},{x:.3f},{y:.3f}\n")

    tracks, length = build_tracks()
    with open(args.out / "tracks.csv", "w", newline="\n") as f:
        f.write("id,t,x,y,length\n")
        for agent_id, rows in tracks.items():
            for t, x, y in rows:
                x += rng.gauss(0.0, NOISE)
                y += rng.gauss(0.0, NOISE)
                f.write(f"{agent_id},{t:.2f},{x:.4f},{y:.4f},{length}\n")

    (args.out / "run.ini").write_text(RUN_INI)


if __name__ == "__main__":
    main()
