#!/usr/bin/env python3
"""Render the two reference images attached to graph-protocol prompts.

Both images are reconstructions: a labelled sheet of the bond-type vocabulary and a
sheet of the 12 standardization cases. Output is deterministic.
"""
import argparse
import math
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

BOND_TYPES = [
    "single", "double", "triple", "aromatic", "solid wedge", "dashed wedge",
    "hollow wedge", "wavy", "any", "bold", "dashed bold", "dashed double",
    "dashed triple", "single or double", "bold double", "double either",
    "single or aromatic", "double or aromatic", "dative", "dashed dative",
    "hydrogen", "attachment point", "triple with single dash",
]

CASES = [
    ("* or arc on atom", "Rα by single bond"),
    ("bracket with subscript m", "brackets: mark m"),
    ("charge outside []", "charge on metal"),
    ("HO- on ring, open end", "wildcard ?"),
    ("bond cut at image edge", "wildcard ?"),
    ("dashed bond to nothing", "Rα"),
    ("complex graphic", "GROUPα"),
    ("ring-centred charge", "charge on one atom"),
    ("R with open position", "Rα, Rβ on CH"),
    ("geometric shapes", "Rα per shape"),
    ("decorations", "ignored"),
    ("d_n on ring", "explicit D atoms"),
]


def font(size):
    for name in ("DejaVuSans.ttf", "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf"):
        try:
            return ImageFont.truetype(name, size)
        except OSError:
            continue
    return ImageFont.load_default()


def offset(p, q, d):
    dx, dy = q[0] - p[0], q[1] - p[1]
    n = math.hypot(dx, dy)
    ox, oy = -dy / n * d, dx / n * d
    return (p[0] + ox, p[1] + oy), (q[0] + ox, q[1] + oy)


def dashed(draw, p, q, width=2, dash=6):
    n = max(1, int(math.hypot(q[0] - p[0], q[1] - p[1]) // dash))
    for i in range(0, n, 2):
        a = (p[0] + (q[0] - p[0]) * i / n, p[1] + (q[1] - p[1]) * i / n)
        b = (p[0] + (q[0] - p[0]) * (i + 1) / n, p[1] + (q[1] - p[1]) * (i + 1) / n)
        draw.line([a, b], fill="black", width=width)


def wedge(draw, p, q, kind):
    l, r = offset(p, q, 7)[1], offset(p, q, -7)[1]
    if kind == "solid":
        draw.polygon([p, l, r], fill="black")
    elif kind == "hollow":
        draw.polygon([p, l, r], outline="black")
    else:
        for i in range(1, 9):
            t = i / 8
            a = (p[0] + (l[0] - p[0]) * t, p[1] + (l[1] - p[1]) * t)
            b = (p[0] + (r[0] - p[0]) * t, p[1] + (r[1] - p[1]) * t)
            draw.line([a, b], fill="black", width=2)


def bond(draw, name, p, q):
    line = lambda a, b, w=2: draw.line([a, b], fill="black", width=w)
    if name == "single":
        line(p, q)
    elif name in ("double", "double either"):
        line(*offset(p, q, 4))
        line(*offset(p, q, -4))
        if name == "double either":
            line(*offset(p, q, 4)[::-1])
    elif name == "triple":
        line(p, q)
        line(*offset(p, q, 6))
        line(*offset(p, q, -6))
    elif name == "aromatic":
        line(p, q)
        dashed(draw, *offset(p, q, 7))
    elif name in ("solid wedge", "dashed wedge", "hollow wedge"):
        wedge(draw, p, q, name.split()[0])
    elif name == "wavy":
        pts = [(p[0] + (q[0] - p[0]) * t / 40, p[1] + 5 * math.sin(t / 40 * 6 * math.pi)) for t in range(41)]
        draw.line(pts, fill="black", width=2)
    elif name == "any":
        dashed(draw, p, q)
    elif name == "bold":
        line(p, q, 7)
    elif name == "dashed bold":
        dashed(draw, p, q, width=7)
    elif name == "dashed double":
        line(*offset(p, q, 4))
        dashed(draw, *offset(p, q, -4))
    elif name == "dashed triple":
        line(p, q)
        line(*offset(p, q, 6))
        dashed(draw, *offset(p, q, -6))
    elif name == "single or double":
        for d in (-6, 0, 6):
            dashed(draw, *offset(p, q, d))
    elif name == "bold double":
        line(*offset(p, q, 5), 6)
        line(*offset(p, q, -4))
    elif name in ("single or aromatic", "double or aromatic"):
        line(p, q)
        dashed(draw, *offset(p, q, 7), dash=3)
        if name.startswith("double"):
            line(*offset(p, q, -6))
    elif name in ("dative", "dashed dative"):
        if name.startswith("dashed"):
            dashed(draw, p, (q[0] - 10, q[1]))
        else:
            line(p, (q[0] - 10, q[1]))
        draw.polygon([q, (q[0] - 12, q[1] - 6), (q[0] - 12, q[1] + 6)], fill="black")
    elif name == "hydrogen":
        dashed(draw, p, q, width=2, dash=3)
    elif name == "attachment point":
        line(p, q)
        for i in range(5):
            x = q[0] - 4 + i * 2
            draw.arc([x - 6, q[1] - 12, x + 6, q[1] + 12], 300, 60, fill="black")
    elif name == "triple with single dash":
        line(*offset(p, q, 6))
        line(p, q)
        dashed(draw, *offset(p, q, -6))


def bond_sheet(path):
    cols, cell_w, cell_h = 4, 300, 90
    rows = math.ceil(len(BOND_TYPES) / cols)
    img = Image.new("RGB", (cols * cell_w, rows * cell_h), "white")
    draw = ImageDraw.Draw(img)
    f = font(16)
    for i, name in enumerate(BOND_TYPES):
        x0, y0 = (i % cols) * cell_w, (i // cols) * cell_h
        bond(draw, name, (x0 + 40, y0 + 35), (x0 + cell_w - 40, y0 + 35))
        draw.text((x0 + 40, y0 + 60), name, fill="black", font=f)
    img.save(path, optimize=False)


def case_sheet(path):
    cols, cell_w, cell_h = 3, 420, 120
    rows = math.ceil(len(CASES) / cols)
    img = Image.new("RGB", (cols * cell_w, rows * cell_h), "white")
    draw = ImageDraw.Draw(img)
    title, body = font(18), font(15)
    for i, (before, after) in enumerate(CASES):
        x0, y0 = (i % cols) * cell_w, (i // cols) * cell_h
        draw.rectangle([x0 + 5, y0 + 5, x0 + cell_w - 5, y0 + cell_h - 5], outline="gray")
        draw.text((x0 + 15, y0 + 12), f"Case {i + 1}", fill="black", font=title)
        draw.text((x0 + 15, y0 + 45), before, fill="black", font=body)
        draw.line([(x0 + 15, y0 + 78), (x0 + 60, y0 + 78)], fill="black", width=2)
        draw.polygon([(x0 + 68, y0 + 78), (x0 + 58, y0 + 72), (x0 + 58, y0 + 84)], fill="black")
        draw.text((x0 + 80, y0 + 70), after, fill="black", font=body)
    img.save(path, optimize=False)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "prompts")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    bond_sheet(args.out / "bond_exemplar.png")
    case_sheet(args.out / "case_exemplar.png")


if __name__ == "__main__":
    main()
