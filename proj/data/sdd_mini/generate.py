"""Writes a small synthetic annotation set in the drone-dataset text format.

Ten micro-mobility tracks (4 bikers, 3 skaters, 3 carts) circulate around a
roundabout, plus pedestrians and edge cases the loader must filter. Output is
deterministic for a given seed.
"""
import math
import pathlib
import random

FPS = 30
SCALE = 0.04  # m/px, also written to scales.yaml
ROOT = pathlib.Path(__file__).resolve().parent
CENTER = (1000.0, 1000.0)  # px

BOX = {"Biker": (18, 40), "Skater": (14, 36), "Cart": (45, 60), "Pedestrian": (12, 30)}


def path(kind, seed, seconds):
    """World-frame (m) samples of a roundabout traversal with speed and curvature changes."""
    rng = random.Random(seed)
    speed = {"Biker": 4.5, "Skater": 3.0, "Cart": 3.5, "Pedestrian": 1.3}[kind]
    speed *= rng.uniform(0.85, 1.15)
    radius = rng.uniform(12.0, 18.0)
    theta = rng.uniform(0, 2 * math.pi)
    # approach straight, circulate, exit straight
    approach = rng.uniform(2.0, 4.0)
    circulate = seconds - approach - rng.uniform(2.0, 3.0)
    x = radius * math.cos(theta) + approach * speed * math.sin(theta)
    y = radius * math.sin(theta) - approach * speed * math.cos(theta)
    heading = theta + math.pi / 2
    pts = []
    dt = 1.0 / FPS
    n = int(seconds * FPS)
    for k in range(n):
        t = k * dt
        v = speed * (1.0 + 0.1 * math.sin(0.7 * t + seed))
        if approach <= t < approach + circulate:
            yaw_rate = v / radius
        elif t < approach:
            yaw_rate = 0.02 * math.sin(t + seed)
        else:
            yaw_rate = -0.03
        pts.append((x, y))
        heading += yaw_rate * dt
        x += v * math.cos(heading) * dt
        y += v * math.sin(heading) * dt
    return pts


def rows_for(track_id, kind, pts, first_frame, rng, lost=()):
    w, h = BOX[kind]
    out = []
    for k, (x, y) in enumerate(pts):
        px = CENTER[0] + x / SCALE + rng.gauss(0, 0.4)
        py = CENTER[1] + y / SCALE + rng.gauss(0, 0.4)
        xmin, xmax = round(px - w / 2), round(px + w / 2)
        ymin, ymax = round(py - h), round(py)
        flag_lost = 1 if k in lost else 0
        out.append(f'{track_id} {xmin} {ymin} {xmax} {ymax} {first_frame + k} {flag_lost} 0 0 "{kind}"')
    return out


def main():
    rng = random.Random(7)
    videos = {"video0": [], "video1": []}
    tracks = [
        ("video0", 0, "Biker", 11.0), ("video0", 1, "Biker", 12.0), ("video0", 2, "Skater", 13.0),
        ("video0", 3, "Cart", 14.0), ("video0", 4, "Skater", 12.0), ("video1", 0, "Biker", 10.0),
        ("video1", 1, "Biker", 12.5), ("video1", 2, "Cart", 13.0), ("video1", 3, "Skater", 11.5),
        ("video1", 4, "Cart", 12.0),
    ]
    for video, tid, kind, seconds in tracks:
        pts = path(kind, 100 * (video == "video1") + tid, seconds)
        # a few lost frames inside the first biker (short gap, bridged)
        lost = set(range(40, 42)) if (video, tid) == ("video0", 0) else set()
        videos[video] += rows_for(tid, kind, pts, 10 * tid, rng, lost)
    # filtered: pedestrians, a single-frame cart
    videos["video0"] += rows_for(20, "Pedestrian", path("Pedestrian", 20, 8.0), 0, rng)
    videos["video1"] += rows_for(21, "Cart", path("Cart", 21, 1.0)[:1], 5, rng)
    for video, rows in videos.items():
        d = ROOT / "annotations" / "deathCircle" / video
        d.mkdir(parents=True, exist_ok=True)
        (d / "annotations.txt").write_text("\n".join(rows) + "\n")
    (ROOT / "scales.yaml").write_text(
        "deathCircle:\n" + "".join(f"  {v}: {{scale: {SCALE}}}\n" for v in videos))


if __name__ == "__main__":
    main()
