"""Generates hands_synthetic.csv: 18 synthetic right-hand outlines, 72 landmarks each.

Each hand is a palm with four fingers and a thumb drawn as rounded strokes.
Finger lengths, widths and spread angles and the thumb angle vary from hand
to hand. The closed outline is resampled to 72 points equally spaced in arc
length, starting at the right corner of the wrist and running anticlockwise
over the fingertips. Run with `python3 make_hands.py > hands_synthetic.csv`.
"""

import math
import random

HANDS = 18
LANDMARKS = 72
SEED = 20240518


def finger(base, angle, length, width, arc_points=9):
    d = (math.sin(angle), math.cos(angle))
    n = (math.cos(angle), -math.sin(angle))
    r = width / 2
    c = (base[0] + d[0] * (length - r), base[1] + d[1] * (length - r))
    pts = [(base[0] + n[0] * r, base[1] + n[1] * r)]
    for i in range(arc_points):
        phi = math.pi * i / (arc_points - 1)
        pts.append((c[0] + r * (math.cos(phi) * n[0] + math.sin(phi) * d[0]),
                    c[1] + r * (math.cos(phi) * n[1] + math.sin(phi) * d[1])))
    pts.append((base[0] - n[0] * r, base[1] - n[1] * r))
    return pts


def hand(rng):
    g = rng.gauss
    outline = [(0.40, 0.0), (0.44, 0.55)]
    # little, ring, middle, index
    bases = [(0.30, 0.92), (0.10, 1.00), (-0.10, 1.02), (-0.30, 0.98)]
    lengths = [0.55, 0.75, 0.82, 0.72]
    spreads = [0.18, 0.06, -0.02, -0.12]
    for b, length, spread in zip(bases, lengths, spreads):
        outline += finger(b, spread + 0.06 * g(0, 1), length * (1 + 0.07 * g(0, 1)),
                          0.17 * (1 + 0.05 * g(0, 1)))
    outline.append((-0.44, 0.70))
    outline += finger((-0.40, 0.42), -0.95 + 0.12 * g(0, 1), 0.62 * (1 + 0.07 * g(0, 1)),
                      0.22 * (1 + 0.05 * g(0, 1)))
    outline.append((-0.36, 0.0))
    return resample(outline, LANDMARKS)


def resample(poly, k):
    closed = poly + [poly[0]]
    seg = [math.dist(a, b) for a, b in zip(closed, closed[1:])]
    total = sum(seg)
    out, i, start = [], 0, 0.0
    for j in range(k):
        s = total * j / k
        while start + seg[i] < s:
            start += seg[i]
            i += 1
        t = (s - start) / seg[i]
        a, b = closed[i], closed[i + 1]
        out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return out


def main():
    rng = random.Random(SEED)
    print(f"# landmarks={LANDMARKS}")
    for _ in range(HANDS):
        print(",".join(f"{v:.6f}" for p in hand(rng) for v in p))


if __name__ == "__main__":
    main()
