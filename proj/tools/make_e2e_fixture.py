#!/usr/bin/env python3
"""Writes the three-sample end-to-end fixture: images, manifest and mock responses.

Per protocol, two canned answers are correct and one is wrong, so every protocol
scores 2 of 3.
"""
import argparse
import json
from pathlib import Path

from PIL import Image, ImageDraw


def carbon(atoms, bonds):
    return {
        "format": "CARBON",
        "version": "1.0",
        "form": "attribute-centric",
        "atoms": {str(i): a for i, a in enumerate(atoms)},
        "bonds": {f"{a}-{b}": t for a, b, t in bonds},
    }


def graph_doc(atoms, bonds, brackets=None):
    doc = {
        "atoms": [{"id": i, "atom": a, "point_2d": [40 + 30 * i, 80]} for i, a in enumerate(atoms)],
        "bonds": [{"atom1": a, "atom2": b, "bond_type": t} for a, b, t in bonds],
    }
    if brackets is not None:
        doc["brackets"] = brackets
    return json.dumps(doc)


ETHANOL = (["C", "C", "O"], [(0, 1, "single"), (1, 2, "single")])
# Kekule benzoic acid; one ring bond drawn bold.
BENZOIC = (
    ["C", "C", "C", "C", "C", "C", "C", "O", "O"],
    [(0, 1, "double"), (1, 2, "bold"), (2, 3, "double"), (3, 4, "single"), (4, 5, "double"),
     (5, 0, "single"), (0, 6, "single"), (6, 7, "double"), (6, 8, "single")],
)
# Wedge from the stereocenter to the methyl.
AMINOETHANOL = (["C", "C", "N", "O"], [(0, 1, "solid wedge"), (0, 2, "single"), (0, 3, "single")])

SAMPLES = [
    {
        "sample_id": "e2e-1", "graph": ETHANOL, "smiles": "CCO",
        "visual_labels": ["short_bond"], "chemical_labels": [],
        "source": {"journal": "Fixture Journal", "paper": "fixture-0001", "figure": "Fig. 1a"},
    },
    {
        "sample_id": "e2e-2", "graph": BENZOIC, "smiles": "OC(=O)c1ccccc1",
        "visual_labels": ["thick_bond", "blurry_image"], "chemical_labels": ["aromatic_bond"],
        "source": {"journal": "Fixture Journal", "paper": "fixture-0002", "figure": "Scheme 2"},
    },
    {
        "sample_id": "e2e-3", "graph": AMINOETHANOL, "smiles": "C[C@@H](N)O",
        "visual_labels": [], "chemical_labels": ["equal_width_chiral_bond", "hash_bond"],
    },
]


def responses():
    eth_atoms, eth_bonds = ETHANOL
    bz_atoms, bz_bonds = BENZOIC
    am_atoms, am_bonds = AMINOETHANOL
    bz_simple = [(a, b, "single" if t == "bold" else t) for a, b, t in bz_bonds]
    # Shuffled atom order: the matcher has to find the permutation.
    am_perm = (["O", "N", "C", "C"], [(2, 3, "solid wedge"), (2, 1, "single"), (2, 0, "single")])
    return [
        # smiles: fenced but correct, Kekule but correct, refusal text.
        {"image": "e2e-1.png", "protocol": "smiles", "content": "```json\n{\"smiles\": \"OCC\"}\n```"},
        {"image": "e2e-2.png", "protocol": "smiles", "content": "{\"smiles\": \"OC(=O)C1=CC=CC=C1\"}"},
        {"image": "e2e-3.png", "protocol": "smiles", "content": "I cannot read this image."},
        # simplified graph: correct, one atom missing, correct after a 429.
        {"image": "e2e-1.png", "protocol": "simplified_graph", "content": graph_doc(eth_atoms, eth_bonds)},
        {"image": "e2e-2.png", "protocol": "simplified_graph",
         "content": graph_doc(bz_atoms[:8], [b for b in bz_simple if 8 not in b[:2]])},
        {"image": "e2e-3.png", "protocol": "simplified_graph", "content": graph_doc(*am_perm),
         "fail_statuses": [429]},
        # graph: wrong bond order, correct with bold bond, correct.
        {"image": "e2e-1.png", "protocol": "graph",
         "content": graph_doc(eth_atoms, [(0, 1, "single"), (1, 2, "double")], [])},
        {"image": "e2e-2.png", "protocol": "graph", "content": graph_doc(bz_atoms, bz_bonds, [])},
        {"image": "e2e-3.png", "protocol": "graph", "content": graph_doc(am_atoms, am_bonds, [])},
    ]


def draw(path, atoms, bonds):
    img = Image.new("RGB", (240, 160), "white")
    d = ImageDraw.Draw(img)
    n = len(atoms)
    pts = [(30 + 180 * i / max(1, n - 1), 80 + (25 if i % 2 else -25)) for i in range(n)]
    for a, b, _ in bonds:
        d.line([pts[a], pts[b]], fill="black", width=2)
    for (x, y), label in zip(pts, atoms):
        if label != "C":
            d.text((x - 4, y - 6), label, fill="black")
    img.save(path, optimize=False)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests/fixtures/e2e"))
    out = Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for s in SAMPLES:
        atoms, bonds = s["graph"]
        draw(out / f"{s['sample_id']}.png", atoms, bonds)
        entry = {"sample_id": s["sample_id"], "image": f"{s['sample_id']}.png", "carbon": carbon(atoms, bonds),
                 "smiles": s["smiles"], "visual_labels": s["visual_labels"], "chemical_labels": s["chemical_labels"]}
        if "source" in s:
            entry["source"] = s["source"]
        lines.append(json.dumps(entry))
    (out / "manifest.jsonl").write_text("\n".join(lines) + "\n")
    (out / "mock_responses.json").write_text(json.dumps({"responses": responses()}, indent=2) + "\n")


if __name__ == "__main__":
    main()
