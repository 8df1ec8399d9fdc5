"""Benchmark harness: the repeated split / normalize / classify protocol.

For each dataset and repeat r the data is split with seed base_seed + r,
features are normalized on the prediction split only (test queries are
transformed with the training statistics), and every method classifies every
test query from one shared neighbour ordering. All methods use the same
neighbourhood budget k = V * floor(n_pred^{4/(4+d)}) (clamped); the
multiscale methods split it into V equal scales.

Predictions are one-vs-rest argmax over per-class estimates for every method
(ties to the smallest class id), which reduces to thresholding at 1/2 for
binary problems except on exact ties.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset, SplitSpec, load_csv, normalize, split
from .errors import DataError, NumericalError
from .multiscale import _solve_coefficients, select_ks
from .neighbors import knn_search_batch
from .weights import SamworthParams, choose_a0, samworth_nonneg_weights, samworth_real_weights

METHODS = ("uniform", "snn", "srw", "msknn-r", "msknn-log")


@dataclass(frozen=True)
class BenchConfig:
    """Datasets, methods, and protocol parameters for one benchmark run."""

    datasets: tuple[tuple[str, str], ...]
    label_col: int | str = -1
    methods: tuple[str, ...] = METHODS
    V: int = 5
    C: int = 1
    lam: float = 1e-4
    repeats: int = 10
    train_fraction: float = 0.7
    base_seed: int = 0
    norm: str = "zscore"

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if not self.methods:
            raise ValueError("methods must be non-empty")
        for meth in self.methods:
            if meth not in METHODS:
                raise ValueError(f"unknown method {meth!r}; choose from {METHODS}")


@dataclass(frozen=True)
class BenchRow:
    dataset: str
    n: int
    d: int
    m: int
    method: str
    mean_acc: float
    std_acc: float
    seconds: float
    accuracies: tuple[float, ...]


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def csv(self) -> str:
        lines = ["dataset,n,d,m,method,mean_acc,std_acc,seconds"]
        for r in sorted(self.rows, key=lambda r: (r.dataset, r.method)):
            lines.append(
                f"{r.dataset},{r.n},{r.d},{r.m},{r.method},"
                f"{r.mean_acc:.6f},{r.std_acc:.6f},{r.seconds:.3f}"
            )
        return "\n".join(lines) + "\n"


def sniff_header(path: str | Path) -> bool:
    """True when the first line contains a cell that does not parse as float."""
    with open(path, encoding="utf-8") as f:
        first = f.readline()
    for cell in first.strip().split(","):
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _class_cumsums(ordered_labels: np.ndarray, m: int) -> np.ndarray:
    """Cumulative one-hot counts along the neighbour axis, shape (m, q, k)."""
    return np.stack([np.cumsum(ordered_labels == c, axis=1) for c in range(m)])


def _estimates(
    method: str,
    csums: np.ndarray,
    dists: np.ndarray,
    ks: list[int],
    d: int,
    C: int,
    lam: float,
) -> np.ndarray:
    """Per-class estimates (q, m) for a batch of queries."""
    m, n_q, _ = csums.shape
    k_base = ks[-1]
    if method == "uniform":
        return csums[:, :, k_base - 1].T / k_base
    if method in ("snn", "srw"):
        if method == "snn":
            w = samworth_nonneg_weights(k_base, d).weights
        else:
            a0 = choose_a0(k_base, d) if k_base >= 2 else 1.0
            w = samworth_real_weights(SamworthParams(k_base, d, a0)).weights
        # estimate = w . onehot = sum_i w_i * diff(csum)_i, via a dot with
        # the increments of the cumulative counts
        incr = np.diff(csums[:, :, :k_base], axis=2, prepend=0)
        return np.einsum("mqk,k->qm", incr, w)
    if method in ("msknn-r", "msknn-log"):
        karr = np.asarray(ks)
        phi = csums[:, :, karr - 1] / karr  # (m, q, V)
        C_eff = min(C, len(ks) - 1)
        est = np.empty((n_q, m))
        if method == "msknn-log":
            p = np.log(karr.astype(np.float64))
            design = np.vander(p, N=C_eff + 1, increasing=True)
            solver = _ridge_row0(design, lam)
            return np.einsum("mqv,v->qm", phi, solver)
        for i in range(n_q):
            p = np.square(dists[i, karr - 1])
            design = np.vander(p, N=C_eff + 1, increasing=True)
            coef, _, _ = _solve_coefficients(design, phi[:, i, :].T, lam, False)
            est[i] = coef[0]
        return est
    raise ValueError(f"unknown method {method!r}")


def _ridge_row0(design: np.ndarray, lam: float) -> np.ndarray:
    """First row of the (ridge) solve operator restricted to the data rows."""
    ncol = design.shape[1]
    if lam > 0:
        aug = np.vstack([design, np.sqrt(lam) * np.eye(ncol)[1:]])
    else:
        aug = design
    return np.linalg.pinv(aug)[0, : len(design)]


def run_benchmark(cfg: BenchConfig, verbose: bool = False) -> BenchReport:
    """Run every (dataset, method) cell of the protocol; see module docstring."""
    report = BenchReport()
    for name, path in cfg.datasets:
        try:
            data = load_csv(path, cfg.label_col, has_header=sniff_header(path))
        except DataError as exc:
            report.diagnostics.append(f"{name}: skipped ({exc})")
            continue
        try:
            rows = _bench_dataset(name, data, cfg, verbose)
        except (DataError, NumericalError) as exc:
            report.diagnostics.append(f"{name}: skipped ({exc})")
            continue
        report.rows.extend(rows)
    return report


def _bench_dataset(
    name: str, data: Dataset, cfg: BenchConfig, verbose: bool
) -> list[BenchRow]:
    accs = {meth: [] for meth in cfg.methods}
    secs = {meth: 0.0 for meth in cfg.methods}
    for rep in range(cfg.repeats):
        spec = SplitSpec(cfg.train_fraction, cfg.base_seed + rep)
        train, test = split(data, spec)
        if test.n == 0:
            raise DataError(f"train fraction {cfg.train_fraction} leaves no test queries")
        train_norm, stats = normalize(train, cfg.norm)
        test_pts = stats.transform(test.points)

        ks = select_ks(train.n, data.d, cfg.V)
        t0 = time.perf_counter()
        idx, dists = knn_search_batch(train_norm.points, test_pts, ks[-1])
        search_share = (time.perf_counter() - t0) / len(cfg.methods)
        ordered = train.labels[idx]
        csums = _class_cumsums(ordered, data.m)

        if verbose and rep == 0 and any(m.startswith("msknn") for m in cfg.methods):
            from .multiscale import MsknnConfig, msknn_fit

            fit = msknn_fit(
                train_norm.points,
                test_pts[0],
                (train.labels == 0).astype(float),
                MsknnConfig(V=cfg.V, C=cfg.C, lam=cfg.lam),
            )
            zmax = f", max|z|={np.abs(fit.z).max():.3g}" if fit.z is not None else ""
            print(
                f"# {name} fit diagnostics (first query): cond={fit.cond:.3g}, "
                f"rank_deficient={fit.rank_deficient}{zmax}",
                file=sys.stderr,
            )

        for meth in cfg.methods:
            t0 = time.perf_counter()
            est = _estimates(meth, csums, dists, ks, data.d, cfg.C, cfg.lam)
            pred = np.argmax(est, axis=1)
            acc = float((pred == test.labels).mean())
            secs[meth] += time.perf_counter() - t0 + search_share
            accs[meth].append(acc)
            if verbose:
                print(f"# {name} rep={rep} {meth}: acc={acc:.4f}", file=sys.stderr)

    rows = []
    for meth in cfg.methods:
        a = np.asarray(accs[meth])
        std = float(a.std(ddof=1)) if len(a) > 1 else 0.0
        rows.append(
            BenchRow(
                dataset=name,
                n=data.n,
                d=data.d,
                m=data.m,
                method=meth,
                mean_acc=float(a.mean()),
                std_acc=std,
                seconds=secs[meth],
                accuracies=tuple(a),
            )
        )
    return rows


def bundled_path(name: str) -> Path:
    """Path of a dataset CSV shipped with the package (iris, banknote)."""
    p = Path(__file__).parent / "data" / f"{name}.csv"
    if not p.is_file():
        raise DataError(f"no bundled dataset named {name!r}")
    return p
