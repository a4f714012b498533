"""Regenerate the bundled 28x28 digit phantoms (MNIST-like stroke drawings)."""

from pathlib import Path

import numpy as np

from scatterkit.phantoms import write_pgm

OUT = Path(__file__).resolve().parents[1] / "src" / "scatterkit" / "data"

# polylines in (col, row) pixel coordinates on a 28x28 canvas
STROKES = {
    "0": [[(14 + 6 * np.cos(t), 14 + 9 * np.sin(t)) for t in np.linspace(0, 2 * np.pi, 64)]],
    "1": [[(11, 8), (15, 5), (15, 23)], [(11, 23), (19, 23)]],
    "7": [[(7, 6), (21, 6), (12, 23)]],
}


def render(polylines, size=28, width=1.6):
    yy, xx = np.mgrid[0:size, 0:size] + 0.5
    img = np.zeros((size, size))
    for line in polylines:
        for (x0, y0), (x1, y1) in zip(line, line[1:]):
            dx, dy = x1 - x0, y1 - y0
            t = np.clip(((xx - x0) * dx + (yy - y0) * dy) / max(dx * dx + dy * dy, 1e-12), 0, 1)
            d = np.hypot(xx - x0 - t * dx, yy - y0 - t * dy)
            img = np.maximum(img, np.clip(width + 0.5 - d, 0, 1))
    return np.rint(255 * img)


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    for name, lines in STROKES.items():
        write_pgm(OUT / f"digit{name}.pgm", render(lines))
        print("wrote", OUT / f"digit{name}.pgm")
