"""Binary classification and evaluation: L2 logistic regression, ROC/AUC,
F-measure, repeated stratified cross-validation and per-feature odds ratios.

The solver is deterministic full-batch Newton with backtracking on
standardised features; fold shuffling is the only seeded randomness in
cross-validation.  Odds ratios come from unregularised fits with Wald
standard errors from the inverse observed information, reported on the raw
(unstandardised) feature scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureVector

__all__ = [
    "LabeledDataset",
    "LogisticModel",
    "Metrics",
    "CrossValResult",
    "OddsRatio",
    "fit",
    "predict_proba",
    "evaluate",
    "cross_validate",
    "odds_ratios",
]

PROB_EPS = 1e-12  # keeps probabilities strictly inside (0, 1)
# Newton converges quadratically, so driving the gradient well below the
# 1e-6 contract is nearly free and makes refits initialization-independent.
GRAD_TOL = 1e-10
MAX_ITER = 500


@dataclass
class LabeledDataset:
    """Feature rows with binary labels and aligned column names."""

    features: np.ndarray  # (n, d)
    labels: np.ndarray    # (n,) of 0/1
    names: list[str]

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        n, d = self.features.shape
        if self.labels.shape != (n,):
            raise ValueError("row and label counts differ")
        if len(self.names) != d:
            raise ValueError("need one name per feature column")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        if not np.all(np.isin(self.labels, (0, 1))):
            raise ValueError("labels must be 0 or 1")

    @classmethod
    def from_feature_vectors(cls, rows: list[FeatureVector], labels: list[int]) -> "LabeledDataset":
        if not rows:
            raise ValueError("need at least one row")
        names = rows[0].names
        for fv in rows[1:]:
            if fv.names != names:
                raise ValueError("feature vectors disagree on names/order")
        return cls(
            features=np.stack([fv.values for fv in rows]),
            labels=np.asarray(labels),
            names=list(names),
        )

    def subset(self, idx: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(self.features[idx], self.labels[idx], self.names)


@dataclass
class LogisticModel:
    """Fitted weights on standardised features plus everything needed to
    score raw inputs: per-feature mean/sd, retained-column indices and the
    convergence report."""

    weights: np.ndarray        # (d_kept,)
    intercept: float
    means: np.ndarray          # (d_kept,)
    sds: np.ndarray            # (d_kept,)
    kept: np.ndarray           # indices into the original columns
    dropped_names: list[str]
    l2: float
    n_features_in: int
    iterations: int
    final_grad_norm: float
    converged: bool

    def raw_coefficients(self) -> tuple[np.ndarray, float]:
        """Back-transform to coefficients on the raw feature scale."""
        beta = self.weights / self.sds
        intercept = self.intercept - float(np.sum(self.weights * self.means / self.sds))
        return beta, intercept


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _newton_logistic(
    z: np.ndarray, y: np.ndarray, l2: float, seed: int | None
) -> tuple[np.ndarray, float, int, float]:
    """Minimise mean log-loss + (l2/2)*||w||^2 (intercept unpenalised).

    Returns (weights, intercept, iterations, final gradient norm).  The
    objective is convex, so the optimum is independent of the seeded start.
    """
    n, d = z.shape
    rng = np.random.default_rng(seed)
    theta = np.zeros(d + 1)
    if seed is not None:
        theta[: d] = rng.normal(0.0, 0.1, size=d)

    design = np.hstack([z, np.ones((n, 1))])
    reg = np.append(np.full(d, l2), 0.0)

    def objective(th: np.ndarray) -> float:
        p = np.clip(_sigmoid(design @ th), PROB_EPS, 1.0 - PROB_EPS)
        loss = -float(np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))
        return loss + 0.5 * float(np.sum(reg * th**2))

    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        p = _sigmoid(design @ theta)
        grad = design.T @ (p - y) / n + reg * theta
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= GRAD_TOL:
            return theta[:d], float(theta[d]), iterations - 1, grad_norm
        w_diag = np.clip(p * (1.0 - p), 1e-10, None)
        hess = (design.T * w_diag) @ design / n + np.diag(reg)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = grad
        # backtracking keeps the objective non-increasing even far from the optimum
        f0 = objective(theta)
        alpha = 1.0
        while alpha > 1e-8 and objective(theta - alpha * step) > f0 - 1e-4 * alpha * float(grad @ step):
            alpha /= 2.0
        theta = theta - alpha * step

    p = _sigmoid(design @ theta)
    grad = design.T @ (p - y) / n + reg * theta
    return theta[:d], float(theta[d]), iterations, float(np.linalg.norm(grad))


def fit(dataset: LabeledDataset, l2: float = 1e-4, seed: int | None = None) -> LogisticModel:
    """Fit L2-regularised logistic regression on standardised features.

    Zero-variance columns are dropped (and recorded); ``seed`` randomises
    the optimizer start only, which cannot change the optimum.
    """
    if l2 < 0:
        raise ValueError("l2 must be non-negative")
    x, y = dataset.features, dataset.labels
    if x.shape[0] < 2:
        raise ValueError("need at least 2 rows")
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain both classes")

    sds_all = x.std(axis=0)
    kept = np.flatnonzero(sds_all > 0)
    if kept.size == 0:
        raise ValueError("all features have zero variance")
    dropped = [dataset.names[i] for i in np.flatnonzero(sds_all == 0)]
    means = x[:, kept].mean(axis=0)
    sds = sds_all[kept]
    z = (x[:, kept] - means) / sds

    weights, intercept, iterations, grad_norm = _newton_logistic(z, y.astype(float), l2, seed)
    return LogisticModel(
        weights=weights,
        intercept=intercept,
        means=means,
        sds=sds,
        kept=kept,
        dropped_names=dropped,
        l2=l2,
        n_features_in=x.shape[1],
        iterations=iterations,
        final_grad_norm=grad_norm,
        converged=grad_norm <= GRAD_TOL,
    )


def predict_proba(model: LogisticModel, features: np.ndarray) -> float | np.ndarray:
    """Class-1 probability, strictly inside (0, 1).

    Accepts a single feature vector or a matrix of rows; the input carries
    all original columns (dropped ones are ignored).
    """
    x = np.asarray(features, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != model.n_features_in:
        raise ValueError(f"expected {model.n_features_in} features, got {x.shape[1]}")
    z = (x[:, model.kept] - model.means) / model.sds
    p = np.clip(_sigmoid(z @ model.weights + model.intercept), PROB_EPS, 1.0 - PROB_EPS)
    return float(p[0]) if single else p


@dataclass
class Metrics:
    """Threshold-0.5 scores plus full ROC and precision-recall sweeps."""

    accuracy: float
    auc: float
    f_measure: float
    precision: float
    recall: float
    roc_points: list[tuple[float, float]] = field(repr=False)
    pr_points: list[tuple[float, float]] = field(repr=False)

    def as_dict(self) -> dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "auc": self.auc,
            "f_measure": self.f_measure,
            "precision": self.precision,
            "recall": self.recall,
        }


def _confusion(scores: np.ndarray, labels: np.ndarray, threshold: float) -> tuple[int, int, int, int]:
    predicted = scores >= threshold
    tp = int(np.count_nonzero(predicted & (labels == 1)))
    fp = int(np.count_nonzero(predicted & (labels == 0)))
    fn = int(np.count_nonzero(~predicted & (labels == 1)))
    tn = int(np.count_nonzero(~predicted & (labels == 0)))
    return tp, fp, fn, tn


def evaluate(scores: np.ndarray, labels: np.ndarray) -> Metrics:
    """Metrics of a score vector against binary labels.

    AUC is the trapezoid area under the ROC swept over every distinct score
    threshold, which equals the rank statistic with ties credited half.
    Accuracy, precision, recall and F use the fixed 0.5 threshold.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be aligned 1-D arrays")
    n_pos = int(np.count_nonzero(labels == 1))
    n_neg = int(np.count_nonzero(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC undefined: need at least one sample of each class")

    thresholds = np.unique(scores)[::-1]
    roc = [(0.0, 0.0)]
    pr = []
    for th in thresholds:
        tp, fp, fn, _ = _confusion(scores, labels, th)
        roc.append((fp / n_neg, tp / n_pos))
        pr.append((tp / n_pos, tp / (tp + fp) if tp + fp else 1.0))
    auc = 0.0
    for (x0, y0), (x1, y1) in zip(roc[:-1], roc[1:]):
        auc += (x1 - x0) * (y1 + y0) / 2.0

    tp, fp, fn, tn = _confusion(scores, labels, 0.5)
    accuracy = (tp + tn) / scores.shape[0]
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f_measure = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(
        accuracy=accuracy,
        auc=auc,
        f_measure=f_measure,
        precision=precision,
        recall=recall,
        roc_points=roc,
        pr_points=pr,
    )


@dataclass
class CrossValResult:
    """Mean and sd of each metric over all train/test evaluations, plus the
    raw per-fold metrics and pooled scores for curve export."""

    means: dict[str, float]
    sds: dict[str, float]
    fold_metrics: list[Metrics]
    pooled_scores: np.ndarray
    pooled_labels: np.ndarray

    @property
    def n_evaluations(self) -> int:
        return len(self.fold_metrics)


def _stratified_folds(labels: np.ndarray, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Index sets of ``folds`` test folds; within each class the fold sizes
    differ by at most one."""
    test_sets: list[list[int]] = [[] for _ in range(folds)]
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        if idx.size < folds:
            raise ValueError(f"class {cls} has {idx.size} samples, fewer than {folds} folds")
        rng.shuffle(idx)
        for f, chunk in enumerate(np.array_split(idx, folds)):
            test_sets[f].extend(chunk.tolist())
    return [np.sort(np.array(t)) for t in test_sets]


def cross_validate(
    dataset: LabeledDataset,
    l2: float = 1e-4,
    repeats: int = 5,
    folds: int = 5,
    seed: int = 0,
) -> CrossValResult:
    """Repeated stratified cross-validation: ``repeats * folds`` fits.

    Folds are re-randomised every repeat from the seed; each evaluation
    fits on the training folds and scores the held-out fold.
    """
    rng = np.random.default_rng(seed)
    all_metrics: list[Metrics] = []
    pooled_scores: list[np.ndarray] = []
    pooled_labels: list[np.ndarray] = []
    n = dataset.labels.shape[0]
    for _ in range(repeats):
        for test_idx in _stratified_folds(dataset.labels, folds, rng):
            train_mask = np.ones(n, dtype=bool)
            train_mask[test_idx] = False
            model = fit(dataset.subset(np.flatnonzero(train_mask)), l2=l2)
            scores = predict_proba(model, dataset.features[test_idx])
            all_metrics.append(evaluate(scores, dataset.labels[test_idx]))
            pooled_scores.append(np.asarray(scores))
            pooled_labels.append(dataset.labels[test_idx])

    keys = ("accuracy", "auc", "f_measure", "precision", "recall")
    table = {k: np.array([m.as_dict()[k] for m in all_metrics]) for k in keys}
    return CrossValResult(
        means={k: float(v.mean()) for k, v in table.items()},
        sds={k: float(v.std(ddof=1)) for k, v in table.items()},
        fold_metrics=all_metrics,
        pooled_scores=np.concatenate(pooled_scores),
        pooled_labels=np.concatenate(pooled_labels),
    )


@dataclass
class OddsRatio:
    """Wald inference for one feature on the raw scale."""

    name: str
    odds_ratio: float
    p_value: float
    ci_low: float
    ci_high: float
    estimable: bool = True
    flagged: bool = False  # separation suspected: huge or unconverged estimate


def _wald_from_fit(
    model: LogisticModel, z: np.ndarray, names: list[str]
) -> list[OddsRatio]:
    """Per-coefficient Wald statistics from the observed information of an
    unregularised fit on standardised features ``z``."""
    n = z.shape[0]
    design = np.hstack([z, np.ones((n, 1))])
    p = _sigmoid(design @ np.append(model.weights, model.intercept))
    w_diag = p * (1.0 - p)
    info = (design.T * w_diag) @ design  # observed information of the summed log-likelihood
    out: list[OddsRatio] = []
    try:
        cov = np.linalg.inv(info)
        se_std = np.sqrt(np.clip(np.diag(cov)[:-1], 0.0, None))
    except np.linalg.LinAlgError:
        return [
            OddsRatio(name, math.nan, math.nan, math.nan, math.nan, estimable=False)
            for name in names
        ]
    beta_raw = model.weights / model.sds
    se_raw = se_std / model.sds
    for name, beta, se in zip(names, beta_raw, se_raw):
        if not np.isfinite(se) or se == 0:
            out.append(OddsRatio(name, math.nan, math.nan, math.nan, math.nan, estimable=False))
            continue
        zstat = beta / se
        p_two_sided = math.erfc(abs(zstat) / math.sqrt(2.0))
        out.append(
            OddsRatio(
                name=name,
                odds_ratio=_safe_exp(beta),
                p_value=p_two_sided,
                ci_low=_safe_exp(beta - 1.96 * se),
                ci_high=_safe_exp(beta + 1.96 * se),
                flagged=bool(se > 10.0 or not model.converged),
            )
        )
    return out


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def odds_ratios(dataset: LabeledDataset, mode: str = "full") -> list[OddsRatio]:
    """Odds ratio, two-sided p and 95% CI per feature, unregularised.

    ``mode="full"`` fits one multivariate model and reads each coefficient;
    ``mode="per_feature"`` fits a one-predictor model per feature.  Features
    that cannot be estimated (zero variance, singular information) come back
    marked not estimable.
    """
    if mode not in ("full", "per_feature"):
        raise ValueError(f"unknown mode {mode!r}")
    results: list[OddsRatio] = []
    if mode == "full":
        model = fit(dataset, l2=0.0)
        z = (dataset.features[:, model.kept] - model.means) / model.sds
        by_name = {
            o.name: o
            for o in _wald_from_fit(model, z, [dataset.names[i] for i in model.kept])
        }
        for name in dataset.names:
            results.append(
                by_name.get(
                    name,
                    OddsRatio(name, math.nan, math.nan, math.nan, math.nan, estimable=False),
                )
            )
        return results

    for col, name in enumerate(dataset.names):
        sub = LabeledDataset(dataset.features[:, [col]], dataset.labels, [name])
        if float(sub.features.std()) == 0:
            results.append(OddsRatio(name, math.nan, math.nan, math.nan, math.nan, estimable=False))
            continue
        model = fit(sub, l2=0.0)
        z = (sub.features[:, model.kept] - model.means) / model.sds
        results.extend(_wald_from_fit(model, z, [name]))
    return results
