"""Seeded benchmark presets comparing the decoupled run to the baseline.

A preset fixes the synthetic data family; every seed regenerates the data,
so the aggregates capture data and training variability together. The
noisy variant of a dataset shares the informative views with its clean
counterpart byte for byte, which makes clean/noisy deltas paired per seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .data import MultiViewDataset, inject_noise_view, synth_multiview
from .pipeline import ClusteringResult, PipelineConfig, run_cemvc, run_shared_baseline


@dataclass(frozen=True)
class BenchPreset:
    name: str
    n_samples: int = 600
    n_clusters: int = 3
    n_views: int = 2
    dims: tuple[int, ...] = (6, 6)
    separation: tuple[float, ...] = (4.0, 4.0)
    noise_dim: int = 200
    pipeline: PipelineConfig = field(
        default_factory=lambda: PipelineConfig(n_clusters=3)
    )


PRESETS = {
    "noisy3view": BenchPreset(name="noisy3view"),
}


def preset_dataset(preset: BenchPreset, seed: int, noisy: bool) -> MultiViewDataset:
    clean = synth_multiview(
        preset.n_samples,
        preset.n_clusters,
        preset.n_views,
        preset.dims,
        preset.separation,
        seed=seed,
        name=preset.name,
    )
    if not noisy:
        return clean
    return inject_noise_view(clean, preset.noise_dim, seed=(seed, 999))


def run_variant(
    preset: BenchPreset, method: str, noisy: bool, seed: int
) -> ClusteringResult:
    data = preset_dataset(preset, seed, noisy)
    cfg = replace(preset.pipeline, seed=seed)
    if method == "cemvc":
        return run_cemvc(data, cfg)
    if method == "shared":
        return run_shared_baseline(data, cfg)
    raise ValueError(f"unknown method {method!r}, expected 'cemvc' or 'shared'")


def summarize(
    preset: BenchPreset, n_seeds: int, seed0: int = 0
) -> list[dict[str, float | str]]:
    """Mean/std ACC and NMI per method and variant, plus noisy-clean deltas.

    Delta columns are noisy mean minus clean mean, so a negative delta is a
    degradation under the injected noise view.
    """
    if n_seeds < 1:
        raise ValueError("need at least one seed")
    scores: dict[tuple[str, str], dict[str, list[float]]] = {}
    for method in ("cemvc", "shared"):
        for variant in ("clean", "noisy"):
            accs, nmis = [], []
            for s in range(seed0, seed0 + n_seeds):
                result = run_variant(preset, method, variant == "noisy", s)
                accs.append(result.metrics.acc)
                nmis.append(result.metrics.nmi)
            scores[(method, variant)] = {"acc": accs, "nmi": nmis}
    rows = []
    for method in ("cemvc", "shared"):
        clean = scores[(method, "clean")]
        for variant in ("clean", "noisy"):
            cell = scores[(method, variant)]
            row: dict[str, float | str] = {
                "method": method,
                "variant": variant,
                "acc_mean": float(np.mean(cell["acc"])),
                "acc_std": float(np.std(cell["acc"])),
                "nmi_mean": float(np.mean(cell["nmi"])),
                "nmi_std": float(np.std(cell["nmi"])),
                "acc_delta_vs_clean": float(np.mean(cell["acc"]) - np.mean(clean["acc"])),
                "nmi_delta_vs_clean": float(np.mean(cell["nmi"]) - np.mean(clean["nmi"])),
            }
            rows.append(row)
    return rows


BENCH_COLUMNS = [
    "method",
    "variant",
    "acc_mean",
    "acc_std",
    "nmi_mean",
    "nmi_std",
    "acc_delta_vs_clean",
    "nmi_delta_vs_clean",
]


def rows_to_csv(rows: list[dict[str, float | str]]) -> str:
    lines = [",".join(BENCH_COLUMNS)]
    for row in rows:
        cells = []
        for col in BENCH_COLUMNS:
            value = row[col]
            cells.append(value if isinstance(value, str) else format(value, ".6f"))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
