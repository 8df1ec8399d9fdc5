"""Multiscale k-NN: extrapolating neighbour averages to an imaginary 0-NN.

For a query, unweighted k-NN estimates phi_v are computed at V increasing
scales k_1 < ... < k_V and regressed on a polynomial in a predictor p_v:

* radius mode: p_v = r_v^2, the squared distance to the k_v-th neighbour,
  so the model is b_0 + b_1 r^2 + ... + b_C r^{2C} and the fitted intercept
  b_0 is the r -> 0 extrapolation (only even powers appear because the
  neighbourhood-average bias has no odd terms);
* log mode: p_v = ln k_v, extrapolating to k = 1, a parameter-free proxy
  that needs no radii (r^2 is approximately affine in ln k over a scale
  range in moderate-to-high dimension).

The intercept is the estimate. The same least-squares problem has a closed
form as a weighted k-NN: scale weights z (one per k_v) and per-neighbour
weights w*_i = sum_{v: i <= k_v} z_v / k_v, both summing to 1. These are
exposed for inspection; the estimator itself never needs them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .errors import NumericalError
from .estimators import plugin_classify, classify_multiclass
from .neighbors import NeighborList, knn_search

PREDICTORS = ("radius", "log_k")


@dataclass(frozen=True)
class MsknnConfig:
    """Scales, polynomial order, ridge strength, and predictor choice.

    ks=None means the arithmetic rule k_v = v * floor(n^{4/(4+d)}); an
    explicit tuple overrides it (values must be strictly increasing).
    lam penalizes the non-intercept coefficients only, unless
    penalize_intercept is set.
    """

    V: int = 5
    C: int = 1
    lam: float = 1e-4
    predictor: str = "radius"
    ks: tuple[int, ...] | None = None
    penalize_intercept: bool = False

    def __post_init__(self):
        if self.ks is not None:
            ks = tuple(int(k) for k in self.ks)
            if len(ks) < 2 or any(b <= a for a, b in zip(ks, ks[1:])) or ks[0] < 1:
                raise ValueError(f"explicit ks must be >=2 strictly increasing positives, got {ks}")
            object.__setattr__(self, "ks", ks)
            object.__setattr__(self, "V", len(ks))
        if self.V < 2:
            raise ValueError("V must be at least 2")
        if self.C < 0:
            raise ValueError("C must be non-negative")
        if self.C > self.V - 1:
            raise ValueError(f"C={self.C} needs at least C+1 scales, got V={self.V}")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.predictor not in PREDICTORS:
            raise ValueError(f"predictor must be one of {PREDICTORS}")


@dataclass(frozen=True)
class MsknnFit:
    """Regression artifacts for one query: design, coefficients, weights."""

    design: np.ndarray
    coef: np.ndarray
    phi: np.ndarray
    ks: tuple[int, ...]
    predictor: str
    cond: float
    rank_deficient: bool
    z: np.ndarray | None = None
    w_star: np.ndarray | None = None

    @property
    def estimate(self) -> float:
        return float(self.coef[0])


def select_ks(n_pred: int, d: int, V: int) -> list[int]:
    """Scales k_v = v * floor(n_pred^{4/(4+d)}) for v = 1..V.

    If the largest scale exceeds n_pred the base is clamped down to
    floor(n_pred / V) so all scales stay usable.
    """
    if V < 2:
        raise ValueError("V must be at least 2")
    if n_pred < V:
        raise NumericalError(f"n_pred={n_pred} cannot support V={V} distinct scales")
    base = int(np.floor(n_pred ** (4.0 / (4.0 + d))))
    if base * V > n_pred:
        base = n_pred // V
    ks = sorted({v * base for v in range(1, V + 1)})
    if len(ks) < 2:
        raise NumericalError(f"n_pred={n_pred}, d={d} yields fewer than 2 distinct scales")
    return ks


def build_design(
    nl: NeighborList, labels01: np.ndarray, ks, cfg: MsknnConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Design matrix rows (1, p_v, ..., p_v^C) and k-NN estimates phi_v."""
    ks = [int(k) for k in ks]
    if ks[-1] > len(nl):
        raise ValueError(f"largest scale {ks[-1]} exceeds the {len(nl)}-neighbour list")
    labels01 = np.asarray(labels01, dtype=np.float64)
    csum = np.cumsum(labels01[nl.indices[: ks[-1]]])
    karr = np.asarray(ks)
    phi = csum[karr - 1] / karr
    if cfg.predictor == "radius":
        p = np.square(nl.distances[karr - 1])
    else:
        p = np.log(karr.astype(np.float64))
    design = np.vander(p, N=cfg.C + 1, increasing=True)
    return design, phi


def _z_from_design(design: np.ndarray) -> np.ndarray:
    """Scale weights z: the first row of the pseudoinverse of [1 | R].

    Equal to (I - P_R) 1 / (V - 1' P_R 1) with P_R the projector onto the
    predictor columns; computing it straight from the design keeps z
    numerically consistent with the least-squares intercept, and the sum
    (identically 1) is renormalized away from its ~1e-14 rounding residue.
    """
    V, ncol = design.shape
    if ncol == 1:
        return np.full(V, 1.0 / V)
    if np.linalg.matrix_rank(design) < ncol:
        raise NumericalError(
            "design is rank deficient (duplicated scales?); deduplicate ks"
        )
    z = np.linalg.pinv(design)[0]
    total = z.sum()
    if abs(total - 1.0) > 1e-6:
        raise NumericalError("scales leave the intercept unidentifiable")
    return z / total


def _suffix_weights(z: np.ndarray, ks) -> np.ndarray:
    """Per-neighbour weights w*_i = sum over scales with k_v >= i of z_v / k_v."""
    karr = np.asarray(ks, dtype=np.int64)
    suffix = np.cumsum((z / karr)[::-1])[::-1]
    pos = np.searchsorted(karr, np.arange(1, karr[-1] + 1), side="left")
    return suffix[pos]


def _solve_coefficients(
    design: np.ndarray, phi_cols: np.ndarray, lam: float, penalize_intercept: bool
) -> tuple[np.ndarray, float, bool]:
    """Penalized least squares for one design and any number of phi columns.

    Returns (coefficients (C+1, n_rhs), condition estimate, rank flag).
    """
    ncol = design.shape[1]
    if lam == 0:
        coef, _, rank, sv = np.linalg.lstsq(design, phi_cols, rcond=None)
        if rank < ncol:
            dup = _duplicate_scales(design)
            raise NumericalError(
                "singular design at lambda=0"
                + (f": duplicated predictor values {dup}" if dup else "")
            )
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        return coef, cond, False
    first = 0 if penalize_intercept else 1
    pen = np.sqrt(lam) * np.eye(ncol)[first:]
    aug = np.vstack([design, pen])
    rhs = np.vstack([phi_cols, np.zeros((len(pen), phi_cols.shape[1]))])
    coef, _, _, sv = np.linalg.lstsq(aug, rhs, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    rank_deficient = bool(np.linalg.matrix_rank(design) < ncol)
    return coef, cond, rank_deficient


def fit_extrapolate(
    design: np.ndarray,
    phi: np.ndarray,
    lam: float,
    *,
    ks=None,
    penalize_intercept: bool = False,
) -> MsknnFit:
    """Solve the (optionally ridge-penalized) extrapolation regression.

    The intercept is never penalized unless asked: shrinking b_0 toward 0
    would bias the estimate itself rather than just the curvature terms.
    With lam = 0 an exactly singular design raises instead of silently
    returning a minimum-norm solution.
    """
    design = np.asarray(design, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if design.ndim != 2 or phi.ndim != 1 or len(design) != len(phi):
        raise ValueError("design must be V x (C+1) with one phi per row")
    if not (np.all(np.isfinite(design)) and np.all(np.isfinite(phi))):
        raise NumericalError("non-finite values in the regression inputs")
    if lam < 0:
        raise ValueError("lambda must be non-negative")

    coef, cond, rank_deficient = _solve_coefficients(
        design, phi[:, None], lam, penalize_intercept
    )
    coef = coef[:, 0]

    z = w_star = None
    if lam == 0:
        z = _z_from_design(design)
        if ks is not None:
            w_star = _suffix_weights(z, ks)
    return MsknnFit(
        design=design,
        coef=coef,
        phi=phi,
        ks=tuple(int(k) for k in ks) if ks is not None else (),
        predictor="",
        cond=cond,
        rank_deficient=rank_deficient,
        z=z,
        w_star=w_star,
    )


def _duplicate_scales(design: np.ndarray) -> list[float]:
    if design.shape[1] < 2:
        return []
    p = design[:, 1]
    uniq, counts = np.unique(p, return_counts=True)
    return [float(v) for v in uniq[counts > 1]]


def implicit_weights(nl: NeighborList, ks, C: int) -> tuple[np.ndarray, np.ndarray]:
    """Scale weights z and per-neighbour weights w* for radius-mode scales.

    Both vectors sum to 1, and sum_i w*_i Y_(i) reproduces the lam = 0
    extrapolation estimate exactly (up to rounding).
    """
    if C < 1:
        raise ValueError("C must be at least 1 for implicit weights")
    ks = [int(k) for k in ks]
    if len(set(ks)) != len(ks):
        raise NumericalError(f"duplicate scales in ks={ks}; deduplicate first")
    if ks[-1] > len(nl):
        raise ValueError(f"largest scale {ks[-1]} exceeds the {len(nl)}-neighbour list")
    p = np.square(nl.distances[np.asarray(ks) - 1])
    design = np.vander(p, N=C + 1, increasing=True)
    z = _z_from_design(design)
    return z, _suffix_weights(z, ks)


def _resolve(train, cfg: MsknnConfig):
    points = train.points if isinstance(train, Dataset) else np.asarray(train, dtype=np.float64)
    n, d = points.shape
    if cfg.ks is not None:
        ks = list(cfg.ks)
        if ks[-1] > n:
            raise ValueError(f"explicit scale {ks[-1]} exceeds n={n}")
    else:
        ks = select_ks(n, d, cfg.V)
    if cfg.C > len(ks) - 1:
        warnings.warn(
            f"only {len(ks)} distinct scales; reducing C from {cfg.C} to {len(ks) - 1}",
            stacklevel=3,
        )
        cfg = replace(cfg, C=len(ks) - 1, ks=None)
    return points, ks, cfg


def msknn_fit(train, query, labels01: np.ndarray, cfg: MsknnConfig) -> MsknnFit:
    """Full per-query pipeline: search, design, fit, implicit weights."""
    points, ks, cfg = _resolve(train, cfg)
    nl = knn_search(points, query, ks[-1])
    design, phi = build_design(nl, labels01, ks, cfg)
    fit = fit_extrapolate(
        design, phi, cfg.lam, ks=ks, penalize_intercept=cfg.penalize_intercept
    )
    return replace(fit, predictor=cfg.predictor)


def msknn_estimate(train, query, labels01: np.ndarray, cfg: MsknnConfig) -> float:
    """Extrapolated estimate of P(Y=1 | X=query): the fitted intercept."""
    return msknn_fit(train, query, labels01, cfg).estimate


def per_class_estimates(
    nl: NeighborList, labels: np.ndarray, m: int, ks, cfg: MsknnConfig
) -> np.ndarray:
    """One-vs-rest extrapolated estimates for all m classes off one search."""
    labels = np.asarray(labels)
    est = np.empty(m)
    for c in range(m):
        design, phi = build_design(nl, labels == c, ks, cfg)
        fit = fit_extrapolate(design, phi, cfg.lam, penalize_intercept=cfg.penalize_intercept)
        est[c] = fit.estimate
    return est


def msknn_classify(train: Dataset, query, cfg: MsknnConfig, m: int | None = None) -> int:
    """Plug-in classification: threshold for m = 2, one-vs-rest argmax above."""
    if not isinstance(train, Dataset):
        raise TypeError("msknn_classify needs a Dataset (labels required)")
    m = train.m if m is None else m
    points, ks, cfg = _resolve(train, cfg)
    nl = knn_search(points, query, ks[-1])
    if m == 2:
        design, phi = build_design(nl, train.labels == 1, ks, cfg)
        fit = fit_extrapolate(design, phi, cfg.lam, penalize_intercept=cfg.penalize_intercept)
        return plugin_classify(fit.estimate)
    return classify_multiclass(per_class_estimates(nl, train.labels, m, ks, cfg))
