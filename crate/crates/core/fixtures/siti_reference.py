"""Independent SI/TI reference for the moving-gradient test sequence.

Frame n (0..7) is 24x18 with sample(x, y) = 3x + 2y + 5n + (x*y + n) % 7.
"""
import numpy as np

W, H, N = 24, 18, 8
frames = []
for n in range(N):
    y, x = np.mgrid[0:H, 0:W]
    frames.append((3 * x + 2 * y + 5 * n + (x * y + n) % 7).astype(np.float64))


def sobel(f):
    gx = (f[:-2, 2:] + 2 * f[1:-1, 2:] + f[2:, 2:]) - (f[:-2, :-2] + 2 * f[1:-1, :-2] + f[2:, :-2])
    gy = (f[2:, :-2] + 2 * f[2:, 1:-1] + f[2:, 2:]) - (f[:-2, :-2] + 2 * f[:-2, 1:-1] + f[:-2, 2:])
    return np.hypot(gx, gy)


si = np.median([np.std(sobel(f)) for f in frames])
ti = np.median([np.std(b - a) for a, b in zip(frames, frames[1:])])
print(repr(float(si)), repr(float(ti)))
