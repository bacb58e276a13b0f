"""Minimal SVG recall curves (no plotting dependency)."""

from xml.sax.saxutils import escape

import numpy as np

W, H, PAD = 360, 240, 40


def recall_curve(errors, diameter, max_fraction=0.10, steps=101):
    """``(fractions, recall)`` with recall(f) = share of errors < f * diameter."""
    e = np.asarray(errors, dtype=np.float64)
    fr = np.linspace(0.0, max_fraction, steps)
    return fr, np.array([np.mean(e < f * diameter) for f in fr])


def recall_svg(title, fractions, recall):
    x0, x1 = PAD, W - PAD / 2
    y0, y1 = H - PAD, PAD / 2
    span = fractions[-1] if fractions[-1] > 0 else 1.0
    xs = x0 + (x1 - x0) * fractions / span
    ys = y0 - (y0 - y1) * recall
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{x0}" y="{y0 + 16}" font-size="10">0</text>',
        f'<text x="{x1 - 50}" y="{y0 + 16}" font-size="10">{span:g} x diameter</text>',
        f'<text x="{x0 - 22}" y="{y1 + 4}" font-size="10">1.0</text>',
        f'<text x="{x0}" y="{y1 - 4}" font-size="12">{escape(title)}</text>',
        f'<polyline fill="none" stroke="steelblue" stroke-width="2" points="{pts}"/>',
        "</svg>",
        "",
    ])


def write_recall_svgs(scenes, modes, diameter, out_dir, max_fraction=0.10):
    paths = []
    for mode in modes:
        errs = [m.error if m.ok else np.inf for s in scenes for m in s.modes if m.mode == mode]
        fr, rec = recall_curve(errs, diameter, max_fraction)
        path = out_dir / f"recall_{mode}.svg"
        path.write_text(recall_svg(f"ADD(-S) recall, mode {mode}", fr, rec))
        paths.append(path)
    return paths
