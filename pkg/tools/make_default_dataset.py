#!/usr/bin/env python3
"""Regenerate the bundled synthetic diabetes-screening table.

The real Pima Indians Diabetes data (UCI repository) cannot be fetched
from this environment, so the package ships a deterministic synthetic
stand-in with the same schema: 768 records, 8 features, familiar marginal
distributions and the characteristic zero-valued "measurement missing"
anomalies (insulin and skin fold most of all).

Class-conditional distributions give glucose a dominant signal and BMI
and age useful secondary ones, so a wrapper selector should land on a
small glucose-centred subset.

Run from the repository root:

    python3 tools/make_default_dataset.py
"""

from pathlib import Path

import numpy as np

SEED = 20240817
N = 768
POSITIVE_RATE = 0.35

# per-column zero-anomaly counts (zero means "not measured")
ZERO_COUNTS = {
    "glucose": 5,
    "blood_pressure": 35,
    "skin_thickness": 227,
    "insulin": 374,
    "bmi": 11,
}

OUT_PATH = (
    Path(__file__).resolve().parent.parent / "src" / "gafuzzy" / "data" / "pima.csv"
)

HEADER = [
    "pregnancies", "glucose", "blood_pressure", "skin_thickness",
    "insulin", "bmi", "pedigree", "age", "outcome",
]


def generate(rng: np.random.Generator) -> tuple[dict[str, np.ndarray], np.ndarray]:
    y = (rng.random(N) < POSITIVE_RATE).astype(np.int64)
    pos = y == 1

    glucose = rng.normal(108.0, 21.0, N)
    glucose[pos] = rng.normal(151.0, 27.0, N)[pos]
    glucose = np.clip(np.round(glucose), 56, 199)

    bmi = rng.normal(30.0, 6.2, N)
    bmi[pos] = rng.normal(36.6, 6.4, N)[pos]
    bmi = np.clip(np.round(bmi, 1), 18.2, 67.1)

    age = 21.0 + rng.exponential(8.0, N)
    age[pos] = (24.5 + rng.exponential(12.0, N))[pos]
    age = np.clip(np.round(age), 21, 81)

    pedigree = np.exp(rng.normal(-1.00, 0.55, N))
    pedigree[pos] = np.exp(rng.normal(-0.72, 0.55, N))[pos]
    pedigree = np.clip(np.round(pedigree, 3), 0.078, 2.42)

    pregnancies = rng.poisson(3.0, N)
    pregnancies[pos] = rng.poisson(4.2, N)[pos]
    pregnancies = np.clip(pregnancies, 0, 17).astype(float)

    blood_pressure = np.clip(
        np.round(rng.normal(68.0, 11.5, N) + 3.0 * y), 24, 122
    )
    skin_thickness = np.clip(
        np.round(0.9 * bmi - 7.0 + rng.normal(0.0, 6.5, N)), 7, 99
    )
    insulin = np.clip(
        np.round(2.1 * (glucose - 72.0) + rng.normal(0.0, 48.0, N)), 15, 846
    )

    columns = {
        "pregnancies": pregnancies,
        "glucose": glucose,
        "blood_pressure": blood_pressure,
        "skin_thickness": skin_thickness,
        "insulin": insulin,
        "bmi": bmi,
        "pedigree": pedigree,
        "age": age,
    }
    for name, count in ZERO_COUNTS.items():
        rows = rng.choice(N, size=count, replace=False)
        columns[name][rows] = 0.0
    return columns, y


def fmt(name: str, value: float) -> str:
    if name == "bmi":
        return f"{value:.1f}"
    if name == "pedigree":
        return f"{value:.3f}"
    return str(int(value))


def main() -> None:
    rng = np.random.default_rng(SEED)
    columns, y = generate(rng)
    lines = [",".join(HEADER)]
    for i in range(N):
        cells = [fmt(name, columns[name][i]) for name in HEADER[:-1]]
        cells.append(str(int(y[i])))
        lines.append(",".join(cells))
    OUT_PATH.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT_PATH} ({N} records, {int(y.sum())} positive)")


if __name__ == "__main__":
    main()
