"""Regenerates corpus.json: bounded, compactly supported, piecewise-constant V."""
import json

import numpy as np

SEED = 20241015
COUNT = 20

rng = np.random.default_rng(SEED)
potentials = []
for i in range(COUNT):
    half = float(np.round(rng.uniform(0.5, 5.0), 3))
    pieces = int(rng.integers(1, 6))
    cuts = np.sort(rng.uniform(-half, half, size=pieces - 1))
    edges = np.round(np.concatenate([[-half], cuts, [half]]), 4)
    # mostly attractive, some mixed-sign, all within ||V||_inf <= 1
    values = np.round(rng.uniform(-1.0, 0.6, size=pieces), 4)
    potentials.append(
        {
            "name": f"v{i:02d}",
            "pieces": [
                {"start": float(a), "end": float(b), "value": float(v)}
                for a, b, v in zip(edges[:-1], edges[1:], values)
                if b > a
            ],
        }
    )

with open("corpus.json", "w") as f:
    json.dump({"seed": SEED, "potentials": potentials}, f, indent=1)
    f.write("\n")
