"""Monte Carlo model of the coarse-grained (macroscopic) Bell experiment.

Each run sends ``N`` independent pairs through a fixed setting pair ``(x, y)``;
each side only records how many of its particles gave outcome 0.  The count
is standardized around its exact mean and binned by sign, giving one binary
macroscopic outcome per side and run.  For large ``N`` the standardized counts
are jointly Gaussian with correlation ``D_xy`` and the sign correlator tends to
``(2/pi) asin(D_xy)``, so the CHSH value of the signs exceeds 2 exactly when
the arcsine criterion is violated.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._parallel import worker_count
from .box import SETTINGS, CorrelationBox, marginal
from .criteria import CHSH_SIGNS, ml_check
from .errors import ConfigError, DeterministicMarginal

CHUNK_RUNS = 1000
MAX_WORK = 10**10


@dataclass(frozen=True)
class MacroConfig:
    pairs_per_run: int = 10_000
    runs: int = 10_000
    seed: int = 0

    def validate(self) -> "MacroConfig":
        if self.pairs_per_run < 100:
            raise ConfigError(f"pairs_per_run must be at least 100, got {self.pairs_per_run}")
        if self.runs < 1000:
            raise ConfigError(f"runs must be at least 1000, got {self.runs}")
        if self.pairs_per_run * self.runs > MAX_WORK:
            raise ConfigError(f"pairs_per_run * runs exceeds {MAX_WORK:.0e}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        return self


@dataclass(frozen=True, eq=False)
class MacroResult:
    d_hat: np.ndarray  # [x, y]
    sign_corr: np.ndarray  # [x, y]
    sign_chsh: float
    stderr_sign_chsh: float
    mean_counts_a: np.ndarray  # mean n_0 on Alice's side, [x, y]
    mean_counts_b: np.ndarray
    config: MacroConfig
    samples: dict | None = None  # (x, y) -> (z_a, z_b), only when requested

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MacroResult):
            return NotImplemented
        return (
            np.array_equal(self.d_hat, other.d_hat)
            and np.array_equal(self.sign_corr, other.sign_corr)
            and self.sign_chsh == other.sign_chsh
            and self.stderr_sign_chsh == other.stderr_sign_chsh
            and np.array_equal(self.mean_counts_a, other.mean_counts_a)
            and np.array_equal(self.mean_counts_b, other.mean_counts_b)
        )

    def to_dict(self) -> dict:
        return {
            "pairs_per_run": self.config.pairs_per_run,
            "runs": self.config.runs,
            "seed": self.config.seed,
            "d_hat": self.d_hat.tolist(),
            "sign_corr": self.sign_corr.tolist(),
            "sign_chsh": self.sign_chsh,
            "stderr_sign_chsh": self.stderr_sign_chsh,
            "counts_summary": {
                "mean_n0_alice": self.mean_counts_a.tolist(),
                "mean_n0_bob": self.mean_counts_b.tolist(),
            },
        }

    def write_samples_csv(self, path) -> None:
        if self.samples is None:
            raise ValueError("simulation was run without keep_samples=True")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "run", "z_alice", "z_bob"])
            for (x, y), (za, zb) in self.samples.items():
                for i, (a, b) in enumerate(zip(za, zb)):
                    w.writerow([x, y, i, repr(float(a)), repr(float(b))])


def _chunk_counts(pvals, n_pairs, size, seed, x, y, chunk):
    # one Philox stream per (seed, setting pair, chunk): independent of thread scheduling
    ss = np.random.SeedSequence([seed, x, y, chunk])
    rng = np.random.Generator(np.random.Philox(ss))
    return rng.multinomial(n_pairs, pvals, size=size)


def _exact_marginals(box: CorrelationBox) -> tuple[list[float], list[float]]:
    ma = [marginal(box, "alice", x)[0] for x in (0, 1)]
    mb = [marginal(box, "bob", y)[0] for y in (0, 1)]
    for name, ms in (("Alice", ma), ("Bob", mb)):
        for s, m in enumerate(ms):
            if m * (1.0 - m) < 1e-12:
                raise DeterministicMarginal(f"{name} setting {s} has a deterministic outcome (P(0) = {m:.12g})")
    return ma, mb


def simulate_macroscopic(box: CorrelationBox, cfg: MacroConfig | None = None, keep_samples: bool = False) -> MacroResult:
    """Run ``cfg.runs`` coarse-grained runs for each of the four setting pairs.

    Counts for one run are drawn as a single multinomial over the four joint
    outcomes, which has the same law as tallying ``N`` independent pairs.
    """
    cfg = (cfg or MacroConfig()).validate()
    ma, mb = _exact_marginals(box)
    n = cfg.pairs_per_run

    jobs = []
    for x, y in SETTINGS:
        pvals = np.clip(box.prob[x, y].reshape(4), 0.0, None)
        pvals = pvals / pvals.sum()
        for k, start in enumerate(range(0, cfg.runs, CHUNK_RUNS)):
            size = min(CHUNK_RUNS, cfg.runs - start)
            jobs.append((pvals, n, size, cfg.seed, x, y, k))

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(lambda j: _chunk_counts(*j), jobs))
    else:
        chunks = [_chunk_counts(*j) for j in jobs]

    d_hat = np.zeros((2, 2))
    sign_corr = np.zeros((2, 2))
    mean_a = np.zeros((2, 2))
    mean_b = np.zeros((2, 2))
    variance = 0.0
    signed_sum = 0.0
    samples = {} if keep_samples else None
    per_setting = len(jobs) // 4
    for i, (x, y) in enumerate(SETTINGS):
        counts = np.concatenate(chunks[i * per_setting : (i + 1) * per_setting])
        n_a = counts[:, 0] + counts[:, 1]  # outcomes 00 and 01
        n_b = counts[:, 0] + counts[:, 2]  # outcomes 00 and 10
        z_a = (n_a - n * ma[x]) / math.sqrt(n * ma[x] * (1.0 - ma[x]))
        z_b = (n_b - n * mb[y]) / math.sqrt(n * mb[y] * (1.0 - mb[y]))
        s_prod = np.where(z_a >= 0, 1.0, -1.0) * np.where(z_b >= 0, 1.0, -1.0)

        d_hat[x, y] = float(np.mean(z_a * z_b))
        sign_corr[x, y] = float(np.mean(s_prod))
        mean_a[x, y] = float(np.mean(n_a))
        mean_b[x, y] = float(np.mean(n_b))
        variance += float(np.var(s_prod, ddof=1)) / len(s_prod)
        signed_sum += CHSH_SIGNS[x, y] * sign_corr[x, y]
        if samples is not None:
            samples[(x, y)] = (z_a, z_b)

    return MacroResult(
        d_hat=d_hat,
        sign_corr=sign_corr,
        sign_chsh=abs(signed_sum),
        stderr_sign_chsh=math.sqrt(variance),
        mean_counts_a=mean_a,
        mean_counts_b=mean_b,
        config=cfg,
        samples=samples,
    )


def theoretical_sign_chsh(box: CorrelationBox) -> float:
    """Large-N limit ``(2/pi) |sum (-1)^{xy} asin(D_xy)|`` of the sign CHSH value."""
    return 2.0 / math.pi * ml_check(box).worst_lhs
