"""Outer training loops: the decoupled weighted run, the shared-parameter
baseline, and the weighting-mode ablation.

One outer iteration of the decoupled run: encode every view, fuse the
latent blocks under the current weights, cluster the fused matrix into
unified soft labels, score each view (conditional entropy + agreement with
the unified labels), refresh the weights, sharpen the unified labels into
a target, and finetune each view's autoencoder against that target.
Weights produced at iteration t scale the fusion at iteration t+1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .clustering import hard_labels, kmeans, soft_assign, target_distribution, unified_soft_labels
from .data import MultiViewDataset
from .infometrics import nmi, total_conditional_entropy
from .metrics import MetricReport, evaluate
from .model import TrainConfig, combined_loss, encode, finetune_view, pretrain
from .weighting import (
    WEIGHT_MODES,
    ViewWeights,
    init_weights,
    scale_representations,
    update_weights,
)


@dataclass
class PipelineConfig:
    n_clusters: int
    latent_dim: int = 8
    hidden_dims: tuple[int, ...] = (32,)
    max_outer_iters: int = 30
    tolerance: float = 1e-3  # fraction of unified labels allowed to change
    weighting_mode: str = "enmi_ce"
    decoupled: bool = True
    standardize: bool = True
    kmeans_restarts: int = 8  # seedings for each fresh (non-warm-start) k-means
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_clusters < 2:
            raise ValueError("need at least 2 clusters")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if not 0.0 <= self.tolerance <= 1.0:
            raise ValueError("tolerance must lie in [0, 1]")
        if self.weighting_mode not in WEIGHT_MODES:
            raise ValueError(
                f"unknown weighting mode {self.weighting_mode!r}, "
                f"expected one of {WEIGHT_MODES}"
            )
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        if self.kmeans_restarts < 1:
            raise ValueError("kmeans_restarts must be >= 1")


@dataclass
class RoundTrace:
    iteration: int
    weights: np.ndarray            # weights produced by this round's update
    cond_entropies: np.ndarray     # per-view conditional entropy (nan for baseline)
    nmi_to_unified: np.ndarray     # per-view agreement with unified labels
    losses: np.ndarray             # per-view combined loss after finetuning
    label_change_fraction: float   # vs previous round; 1.0 on the first round


@dataclass
class ClusteringResult:
    labels: np.ndarray             # final unified hard labels
    soft_labels: np.ndarray        # final unified soft labels
    traces: list[RoundTrace]
    metrics: MetricReport | None   # filled when ground truth is available
    embedding: np.ndarray          # fused (or shared-latent) matrix behind the labels
    mode: str


def _fusion_weights(w: ViewWeights) -> ViewWeights:
    """Rescale weights to mean 1 before fusing.

    The update rule defines relative view importances; the absolute scale
    would otherwise leak into the Student-t soft labels (sharper fused
    spaces self-train harder), coupling the weighting mode to an unrelated
    temperature effect.
    """
    return ViewWeights(w.weights / w.weights.mean(), w.iteration)


def _standardize_columns(x: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=0)
    sigma = np.maximum(x.std(axis=0), 1e-8)
    return (x - mu) / sigma


def _validate(data: MultiViewDataset, cfg: PipelineConfig, min_views: int) -> None:
    if data.n_views < min_views:
        raise ValueError(f"need at least {min_views} views, got {data.n_views}")
    if data.n_samples < cfg.n_clusters:
        raise ValueError(
            f"cannot form {cfg.n_clusters} clusters from {data.n_samples} samples"
        )


def _prepared_views(data: MultiViewDataset, cfg: PipelineConfig) -> list[np.ndarray]:
    if cfg.standardize:
        return [_standardize_columns(v) for v in data.views]
    return [np.asarray(v, dtype=np.float64) for v in data.views]


def _finish(
    data: MultiViewDataset,
    labels: np.ndarray,
    soft: np.ndarray,
    traces: list[RoundTrace],
    embedding: np.ndarray,
    mode: str,
) -> ClusteringResult:
    metrics = evaluate(labels, data.labels) if data.labels is not None else None
    return ClusteringResult(labels, soft, traces, metrics, embedding, mode)


def run_cemvc(data: MultiViewDataset, cfg: PipelineConfig) -> ClusteringResult:
    """Full parameter-decoupled run with adaptive view weighting."""
    _validate(data, cfg, min_views=2)
    views = _prepared_views(data, cfg)
    n_views = data.n_views
    k = cfg.n_clusters
    train_cfg = replace(cfg.train, seed=cfg.seed)

    models = [
        pretrain(views[v], cfg.hidden_dims, cfg.latent_dim, train_cfg, view_index=v)
        for v in range(n_views)
    ]
    weights = init_weights([cfg.latent_dim] * n_views)

    traces: list[RoundTrace] = []
    prev_labels: np.ndarray | None = None
    unified_centroids: np.ndarray | None = None
    prev_fusion: np.ndarray | None = None
    view_centroids: list[np.ndarray | None] = [None] * n_views

    t = 0
    while True:
        reps = [encode(m, x) for m, x in zip(models, views)]
        fusion = _fusion_weights(weights)
        fused = scale_representations(fusion, reps)
        if unified_centroids is not None:
            # stored centroids live in the previous round's block scaling;
            # map them into the current one so warm-starting keeps label
            # identity instead of planting mis-scaled centroids
            ratios = np.repeat(fusion.weights / prev_fusion, cfg.latent_dim)
            init = unified_centroids * ratios
        else:
            init = None
        prev_fusion = fusion.weights
        unified_soft, unified_centroids_new = unified_soft_labels(
            fused.matrix,
            k,
            seed=(cfg.seed, 3, t),
            init=init,
            n_init=cfg.kmeans_restarts,
        )
        labels = hard_labels(unified_soft)
        change = 1.0 if prev_labels is None else float(np.mean(labels != prev_labels))
        converged = prev_labels is not None and change < cfg.tolerance
        if converged or t >= cfg.max_outer_iters:
            return _finish(data, labels, unified_soft, traces, fused.matrix, cfg.weighting_mode)
        prev_labels = labels
        unified_centroids = unified_centroids_new

        # Conditional entropies are scored on the raw (unweighted) latents;
        # the weighted blocks would fold the previous weights back into the
        # score through the scale-equivariant density estimate.
        cond = total_conditional_entropy(reps)

        view_soft = []
        for v in range(n_views):
            centroids_v, _ = kmeans(
                reps[v],
                k,
                seed=(cfg.seed, 4, t, v),
                init=view_centroids[v],
                n_init=cfg.kmeans_restarts,
            )
            view_centroids[v] = centroids_v
            view_soft.append(soft_assign(reps[v], centroids_v))
        nmis = np.array([nmi(hard_labels(sl), labels) for sl in view_soft])

        weights = update_weights(weights, view_soft, unified_soft, cond, mode=cfg.weighting_mode)
        target = target_distribution(unified_soft)

        losses = np.empty(n_views)
        for v in range(n_views):
            finetune_view(models[v], views[v], target, view_centroids[v], train_cfg)
            losses[v] = combined_loss(
                models[v], views[v], target, view_centroids[v], train_cfg.clustering_weight
            )

        traces.append(
            RoundTrace(t, weights.weights.copy(), cond, nmis, losses, change)
        )
        t += 1


def run_shared_baseline(data: MultiViewDataset, cfg: PipelineConfig) -> ClusteringResult:
    """One shared autoencoder over the concatenated raw views.

    Single parameter set, self-training against its own sharpened labels;
    no weighting and no conditional-entropy scoring. Trace vectors keep the
    per-view shape: weights are all 1, entropy/agreement slots are nan, and
    the shared combined loss is replicated across views.
    """
    _validate(data, cfg, min_views=2)
    views = _prepared_views(data, cfg)
    n_views = data.n_views
    k = cfg.n_clusters
    train_cfg = replace(cfg.train, seed=cfg.seed)
    x = np.hstack(views)

    model = pretrain(x, cfg.hidden_dims, cfg.latent_dim, train_cfg, view_index=0)

    traces: list[RoundTrace] = []
    prev_labels: np.ndarray | None = None
    centroids: np.ndarray | None = None

    t = 0
    while True:
        latent = encode(model, x)
        soft, centroids_new = unified_soft_labels(
            latent, k, seed=(cfg.seed, 3, t), init=centroids, n_init=cfg.kmeans_restarts
        )
        labels = hard_labels(soft)
        change = 1.0 if prev_labels is None else float(np.mean(labels != prev_labels))
        converged = prev_labels is not None and change < cfg.tolerance
        if converged or t >= cfg.max_outer_iters:
            return _finish(data, labels, soft, traces, latent, "shared")
        prev_labels = labels
        centroids = centroids_new

        target = target_distribution(soft)
        finetune_view(model, x, target, centroids, train_cfg)
        loss = combined_loss(model, x, target, centroids, train_cfg.clustering_weight)

        traces.append(
            RoundTrace(
                t,
                np.ones(n_views),
                np.full(n_views, np.nan),
                np.full(n_views, np.nan),
                np.full(n_views, loss),
                change,
            )
        )
        t += 1


def run_pipeline(data: MultiViewDataset, cfg: PipelineConfig) -> ClusteringResult:
    """Dispatch on cfg.decoupled: weighted per-view run or shared baseline."""
    if cfg.decoupled:
        return run_cemvc(data, cfg)
    return run_shared_baseline(data, cfg)


def run_ablation(
    data: MultiViewDataset, cfg: PipelineConfig
) -> dict[str, ClusteringResult]:
    """Run the decoupled pipeline once per weighting mode, shared seed."""
    results = {}
    for mode in WEIGHT_MODES:
        results[mode] = run_cemvc(data, replace(cfg, weighting_mode=mode))
    return results
