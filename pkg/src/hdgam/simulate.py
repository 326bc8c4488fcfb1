"""Monte Carlo coverage study on a sparse additive design.

Covariates are marginally uniform on [-2.5, 2.5] with Gaussian-copula
dependence (latent Toeplitz correlation ``corr_base ** |k - l|``). Only the
first four components are nonzero; the noise scale grows with the absolute
value of one covariate.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.linalg import cholesky, toeplitz
from scipy.special import ndtr

from .bands import build_bands, covers
from .errors import AbortedStudyError, DegenerateCorrelationError, HdgamError, InvalidConfigurationError
from .lasso import PenaltyConfig
from .orthogonal import fit_component

SUPPORT = (-2.5, 2.5)
SIGMA_BAR = math.sqrt(12 / 67)
MAX_FAILURE_RATE = 0.2

# smoothing parameters {own, other} per component for the four (n, p) cells
TABLE_DF = {
    (100, 50): {1: (7, 4), 2: (6, 4), 3: (7, 4), 4: (5, 4), 5: (7, 4)},
    (100, 150): {1: (7, 4), 2: (6, 4), 3: (6, 4), 4: (5, 4), 5: (5, 4)},
    (1000, 50): {1: (7, 4), 2: (6, 5), 3: (5, 4), 4: (5, 4), 5: (5, 4)},
    (1000, 150): {1: (7, 4), 2: (6, 5), 3: (7, 4), 4: (5, 5), 5: (4, 4)},
}

# reported coverage of nominal 95% bands, R = 500
TABLE_COVERAGE = {
    (100, 50): (0.994, 0.982, 0.968, 0.938, 0.990),
    (100, 150): (0.992, 0.976, 0.952, 0.886, 0.988),
    (1000, 50): (0.998, 0.980, 0.962, 0.848, 1.000),
    (1000, 150): (1.000, 0.968, 0.986, 0.806, 1.000),
}


@dataclass(frozen=True)
class DgpConfig:
    n: int
    p: int
    corr_base: float = 0.5
    sigma_bar: float = SIGMA_BAR
    hetero_index: int | None = 1
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidConfigurationError(f"n must be at least 2, got {self.n}")
        if self.p < 4:
            raise InvalidConfigurationError(f"p must be at least 4 (four active components), got {self.p}")
        if not 0 <= self.corr_base < 1:
            raise InvalidConfigurationError(f"corr_base must lie in [0, 1), got {self.corr_base}")
        if self.hetero_index is not None and not 1 <= self.hetero_index <= self.p:
            raise InvalidConfigurationError(f"hetero_index must be in 1..{self.p}")
        if self.sigma_bar < 0:
            raise InvalidConfigurationError("sigma_bar must be non-negative")

    @property
    def support(self) -> tuple[float, float]:
        return SUPPORT


def true_f(j: int, x):
    """Component j (1-based) of the additive truth; mean zero on the support."""
    x = np.asarray(x, dtype=float)
    if j < 1:
        raise InvalidConfigurationError(f"component index starts at 1, got {j}")
    if j == 1:
        return -np.sin(2 * x)
    if j == 2:
        return x**2 - 25 / 12
    if j == 3:
        return x + 0.0
    if j == 4:
        return np.exp(-x) - 0.4 * math.sinh(2.5)
    return np.zeros_like(x)


def replication_rng(seed: int, r: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, r])))


def gen_design(config: DgpConfig, rng: np.random.Generator) -> np.ndarray:
    corr = toeplitz(config.corr_base ** np.arange(config.p))
    try:
        L = cholesky(corr, lower=True)
    except np.linalg.LinAlgError as exc:
        raise DegenerateCorrelationError(f"latent correlation is not positive definite: {exc}") from exc
    latent = rng.standard_normal((config.n, config.p)) @ L.T
    lo, hi = SUPPORT
    return lo + (hi - lo) * ndtr(latent)


def noise_scale(x, sigma_bar: float = SIGMA_BAR):
    return sigma_bar * (1 + np.abs(x))


def gen_response(X, config: DgpConfig, rng: np.random.Generator, hetero_index: int | None = None) -> np.ndarray:
    """Sum of the four active components plus heteroscedastic Gaussian noise.

    `hetero_index` (1-based) overrides ``config.hetero_index``.
    """
    X = np.asarray(X, dtype=float)
    idx = hetero_index if hetero_index is not None else config.hetero_index
    if idx is None:
        idx = 1
    signal = sum(true_f(j, X[:, j - 1]) for j in range(1, 5))
    return signal + noise_scale(X[:, idx - 1], config.sigma_bar) * rng.standard_normal(X.shape[0])


@dataclass
class ComponentRecord:
    component: int
    df_own: int
    df_other: int
    covered: int = 0
    completed: int = 0
    failures: int = 0
    mean_width: float = float("nan")

    @property
    def coverage(self) -> float:
        return self.covered / self.completed if self.completed else float("nan")


@dataclass
class SimulationReport:
    config: DgpConfig
    replications: int
    alpha: float
    bootstrap_draws: int
    interval: tuple[float, float]
    grid_size: int
    components: list[ComponentRecord]
    wall_seconds: float = 0.0
    failure_messages: list[str] = field(default_factory=list)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "config": asdict(self.config),
            "replications": self.replications,
            "alpha": self.alpha,
            "bootstrap_draws": self.bootstrap_draws,
            "interval": list(self.interval),
            "grid_size": self.grid_size,
            "components": [
                {
                    "component": c.component,
                    "df_own": c.df_own,
                    "df_other": c.df_other,
                    "coverage": c.coverage if c.completed else None,
                    "covered": c.covered,
                    "completed": c.completed,
                    "failures": c.failures,
                    "mean_width": c.mean_width if c.completed else None,
                }
                for c in self.components
            ],
            "failure_messages": self.failure_messages,
        }
        if include_timing:
            out["wall_seconds"] = self.wall_seconds
        return out

    def table(self) -> str:
        head = f"{'n':>6} {'p':>5} | " + " ".join(f"{'f' + str(c.component):>7}" for c in self.components)
        row = f"{self.config.n:>6} {self.config.p:>5} | " + " ".join(
            f"{c.coverage:7.3f}" if c.completed else f"{'n/a':>7}" for c in self.components
        )
        widths = f"{'width':>12} | " + " ".join(
            f"{c.mean_width:7.3f}" if c.completed else f"{'n/a':>7}" for c in self.components
        )
        return "\n".join([head, "-" * len(head), row, widths])


def default_df(n: int, p: int, component: int) -> tuple[int, int]:
    cell = TABLE_DF.get((n, p), TABLE_DF[(100, 50)])
    return cell.get(component, cell[5])


def _one_replication(config, r, components, df, alpha, B, interval, grid_size, penalty, c_alpha):
    rng = replication_rng(config.seed, r)
    X = gen_design(config, rng)
    z = rng.standard_normal(config.n)
    signal = sum(true_f(j, X[:, j - 1]) for j in range(1, 5))
    lo, hi = interval
    grid = np.linspace(lo, hi, grid_size)
    results = {}
    for j in components:
        het = config.hetero_index if config.hetero_index is not None else j
        y = signal + noise_scale(X[:, het - 1], config.sigma_bar) * z
        own, other = df[j]
        try:
            model = fit_component(X[:, j - 1], np.delete(X, j - 1, axis=1), y, own, other, config=penalty)
            band = build_bands(
                model, lo, hi, grid_size=grid_size, alpha=alpha, B=B,
                seed=_band_seed(config.seed, r, j), c_alpha=c_alpha,
            )
        except HdgamError as exc:
            results[j] = (None, f"replication {r}, component {j}: {exc}")
            continue
        results[j] = ((covers(band, true_f(j, grid)), band.mean_width), None)
    return r, results


def _band_seed(seed: int, r: int, j: int) -> int:
    return int(np.random.SeedSequence([seed, r, j]).generate_state(2, np.uint64)[0])


def run_monte_carlo(
    config: DgpConfig,
    R: int,
    components=(1, 2, 3, 4, 5),
    df_own: int | None = None,
    df_other: int | None = None,
    alpha: float = 0.05,
    B: int = 1000,
    interval: tuple[float, float] = (-2.0, 2.0),
    grid_size: int = 101,
    penalty: PenaltyConfig = PenaltyConfig(),
    threads: int = 1,
    c_alpha: float | None = None,
    order=None,
) -> SimulationReport:
    """Coverage of simultaneous bands for each requested component.

    df values default to the published table for (n, p) when not given.
    `order` permutes the execution order of replications (results do not
    depend on it). `c_alpha` overrides the bootstrap critical value.
    """
    lo, hi = interval
    if not SUPPORT[0] < lo < hi < SUPPORT[1]:
        raise InvalidConfigurationError(f"interval {interval} must lie inside {SUPPORT}")
    if R < 1:
        raise InvalidConfigurationError("R must be positive")
    components = tuple(sorted(set(int(j) for j in components)))
    if not components or components[0] < 1 or components[-1] > config.p:
        raise InvalidConfigurationError(f"components must lie in 1..{config.p}")
    df = {}
    for j in components:
        own, other = default_df(config.n, config.p, j)
        df[j] = (df_own or own, df_other or other)

    start = time.perf_counter()
    order = list(range(1, R + 1)) if order is None else list(order)
    if sorted(order) != list(range(1, R + 1)):
        raise InvalidConfigurationError("order must be a permutation of 1..R")
    args = (components, df, alpha, B, interval, grid_size, penalty, c_alpha)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(lambda r: _one_replication(config, r, *args), order))
    else:
        out = [_one_replication(config, r, *args) for r in order]
    out.sort(key=lambda t: t[0])

    records = {j: ComponentRecord(j, *df[j]) for j in components}
    widths = {j: [] for j in components}
    messages = []
    for _, results in out:
        for j in components:
            res, msg = results[j]
            rec = records[j]
            if res is None:
                rec.failures += 1
                messages.append(msg)
                continue
            ok, width = res
            rec.completed += 1
            rec.covered += int(ok)
            widths[j].append(width)
    for j in components:
        if widths[j]:
            records[j].mean_width = float(np.mean(widths[j]))
    total = R * len(components)
    n_fail = sum(rec.failures for rec in records.values())
    if n_fail > MAX_FAILURE_RATE * total:
        raise AbortedStudyError(
            f"{n_fail} of {total} fits failed; first failure: {messages[0] if messages else '?'}"
        )
    return SimulationReport(
        config=config,
        replications=R,
        alpha=alpha,
        bootstrap_draws=B,
        interval=(float(lo), float(hi)),
        grid_size=grid_size,
        components=[records[j] for j in components],
        wall_seconds=time.perf_counter() - start,
        failure_messages=messages,
    )
