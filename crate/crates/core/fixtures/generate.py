"""Regenerates the synthetic fixtures in this directory.

Per-tile PSNR and relative bitrate anchors at QP 24/36/45 are hand-picked to
resemble a sports clip; absolute bitrates and the chunk variation are
synthetic. Run from this directory: python3 generate.py
"""
import math

# tile -> (BR% and PSNR at QP 24, 36, 45), side slices renumbered from 0
ANCHORS = {
    "right_0": ((57.0, 46.74), (82.1, 40.47), (84.9, 35.17)),
    "right_1": ((58.2, 50.24), (81.1, 44.91), (82.1, 39.31)),
    "left_0": ((57.0, 48.58), (82.8, 42.58), (85.5, 37.27)),
    "left_1": ((52.0, 45.72), (81.3, 39.20), (87.3, 33.86)),
    "top": ((62.0, 47.31), (86.7, 40.91), (89.5, 35.41)),
    "bottom": ((58.5, 50.02), (88.1, 44.61), (90.8, 39.91)),
    "front_0": ((49.3, 45.43), (81.6, 38.51), (88.6, 33.20)),
    "front_1": ((51.4, 45.70), (82.8, 39.01), (89.0, 33.73)),
    "back_0": ((58.3, 51.61), (78.6, 46.66), (79.1, 40.04)),
    "back_1": ((57.3, 51.62), (80.8, 46.73), (80.9, 39.69)),
}
TILES_1 = ["front_0", "front_1", "right_0", "right_1", "back_0", "back_1",
           "left_0", "left_1", "top", "bottom"]
QPS = list(range(18, 52, 3))
QP_LADDER = [44, 40, 36, 33, 27, 23]  # level 0..5
CHUNKS = [(1.00, 0.0), (1.15, -0.3), (0.90, 0.2), (1.25, -0.1)]
BASE_SIDE = 850_000
BASE_POLE = 1_300_000


def interp(qp, pts):
    """Piecewise-linear through (qp, value) points, extrapolating at both ends."""
    for (q0, v0), (q1, v1) in zip(pts, pts[1:]):
        if qp <= q1 or (q1, v1) == pts[-1]:
            return v0 + (v1 - v0) * (qp - q0) / (q1 - q0)


def model(tile, qp):
    a = ANCHORS[tile]
    ratio_pts = [(18, 0.0)] + [(q, math.log(1 - br / 100)) for q, (br, _) in zip((24, 36, 45), a)]
    psnr_pts = [(q, p) for q, (_, p) in zip((24, 36, 45), a)]
    base = BASE_POLE if tile in ("top", "bottom") else BASE_SIDE
    return base * math.exp(interp(qp, ratio_pts)), interp(qp, psnr_pts)


def tiles_2():
    out = []
    for face in ("front", "right", "back", "left"):
        out += [f"{face}_{j}" for j in range(4)]
    return out + ["top", "bottom"]


def parent(tile2):
    if tile2 in ("top", "bottom"):
        return tile2, 1.0
    face, j = tile2.rsplit("_", 1)
    # half the area plus 6% tiling overhead
    return f"{face}_{int(j) // 2}", 0.5 * 1.06


def sweep_rows(tiles, mapper):
    rows = []
    for c, (scale, shift) in enumerate(CHUNKS):
        for t in tiles:
            src, factor = mapper(t)
            for qp in QPS:
                br, psnr = model(src, qp)
                jitter = 0.05 * ((hash_str(t) + c) % 3 - 1) if factor != 1.0 else 0.0
                rows.append((c, t, qp, round(br * scale * factor), round(psnr + shift + jitter, 2)))
    return rows


def hash_str(s):
    return sum(ord(ch) for ch in s)


def write(path, header, rows):
    with open(path, "w") as f:
        f.write(header + "\n")
        for r in rows:
            f.write(",".join(str(x) for x in r) + "\n")


write("rd_sweep_tc1.csv", "chunk,tile,qp,bitrate_bps,psnr_db",
      sweep_rows(TILES_1, lambda t: (t, 1.0)))
write("rd_sweep_tc2.csv", "chunk,tile,qp,bitrate_bps,psnr_db", sweep_rows(tiles_2(), parent))

qp_rows = []
for c, (scale, shift) in enumerate(CHUNKS):
    for t in TILES_1:
        for level, qp in enumerate(QP_LADDER):
            br, psnr = model(t, qp)
            qp_rows.append((c, t, level, round(br * scale), round(psnr + shift, 2)))
write("rates_qp_tc1.csv", "chunk,tile,level,bitrate_bps,psnr_db", qp_rows)

write("viewports.csv", "chunk,yaw_deg,pitch_deg",
      [(0, 0, 0), (1, 30, 5), (2, 90, -10), (3, 200, 0)])
write("viewports_aligned.csv", "chunk,yaw_deg,pitch_deg",
      [(0, 0, 0), (1, 45, 10), (2, 135, 0), (3, 270, -5)])
write("bandwidth.csv", "chunk,bandwidth_bps",
      [(0, 2000000), (1, 4000000), (2, 10000000), (3, 3000000)])

face = 16
origin = {"left": (0, 0), "front": (1, 0), "right": (2, 0),
          "bottom": (0, 1), "back": (1, 1), "top": (2, 1)}
geo = []
for t in TILES_1:
    f = t.split("_")[0]
    x0, y0 = origin[f][0] * face, origin[f][1] * face
    if "_" in t:
        j = int(t.split("_")[1])
        geo.append((t, x0 + j * face // 2, y0, face // 2, face))
    else:
        geo.append((t, x0, y0, face, face))
write("tiles_tc1_face16.csv", "tile,x,y,w,h", geo)
