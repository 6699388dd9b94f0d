"""Sampling of special orthogonal matrices and their conditioned models.

Haar sampling uses the QR construction: a Gaussian matrix is factored,
columns are sign-corrected by the diagonal of R (giving Haar on the full
orthogonal group), and a determinant of -1 is repaired by negating the
first column (right translation by a fixed reflection, which maps Haar on
the reflection coset onto Haar on the special orthogonal group).

Two sub-ensembles with eigenvalues pinned at +1 are provided:

* the block model (``sample_independent_model``): identity block of size
  2r glued to a Haar block, so the pinned eigenvalues do not interact
  with the rest;
* the conditioned model (``sample_interaction_levels``): levels drawn
  from the conditioned joint density

      prod_{j<k} (x_k - x_j)^2  prod_j (1-x_j)^(m-1/2) (1+x_j)^(-1/2)

  in which the pinned eigenvalues repel their neighbors.  The density is
  only specified up to normalization, so it is sampled by coordinatewise
  Metropolis-Hastings on the log density with Gaussian proposals
  reflected into [-1, 1].

All samplers are pure functions of (parameters, seed).  Batch drivers
derive one child seed per sample index (or per chain), so results do not
depend on how the work is partitioned across workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

__all__ = [
    "OrthogonalSample",
    "LevelVector",
    "McmcConfig",
    "EnsembleSpec",
    "AngleSummary",
    "haar_sample_so",
    "eigenangles",
    "normalize_eigenangles",
    "sample_independent_model",
    "sample_interaction_levels",
    "interaction_chain",
    "simulate_first_angle_stats",
]

ORTHOGONALITY_TOL = 1e-10
INPUT_ORTHOGONALITY_TOL = 1e-8
FORCED_EIGENVALUE_TOL = 1e-6


@dataclass(frozen=True)
class OrthogonalSample:
    """A special orthogonal matrix together with its eigenangles
    theta_1 <= ... <= theta_{floor(n/2)} in [0, pi]."""

    size: int
    entries: np.ndarray
    angles: np.ndarray


@dataclass(frozen=True)
class LevelVector:
    """Levels x_j = cos(theta_j) in [-1, 1], ascending, for an ensemble of
    ``pairs`` eigenvalue pairs conditioned at hardness ``hardness``."""

    levels: np.ndarray
    hardness: int
    pairs: int


@dataclass(frozen=True)
class McmcConfig:
    """Tuning knobs for the conditioned-model sampler.  Defaults scale with
    the number of levels; they are stored here rather than hard-coded so a
    run's provenance is complete."""

    burn_in: int = 0        # 0 means "use the default 10^4 * pairs"
    thinning: int = 0       # 0 means "use the default 10 * pairs"
    proposal_width: float = 0.1
    seed: int = 0

    def resolved(self, pairs: int) -> "McmcConfig":
        burn = self.burn_in if self.burn_in > 0 else 10_000 * pairs
        thin = self.thinning if self.thinning > 0 else 10 * pairs
        if thin < 1:
            raise ValueError("thinning must be >= 1")
        if self.proposal_width <= 0:
            raise ValueError("proposal_width must be positive")
        return McmcConfig(burn_in=burn, thinning=thin,
                          proposal_width=self.proposal_width, seed=self.seed)


@dataclass(frozen=True)
class EnsembleSpec:
    """What to simulate: plain Haar (``haar`` with matrix ``size``), the
    block model (``independent`` with full-pair count ``pairs`` and
    ``forced`` pinned pairs), or the conditioned model (``interaction``
    with ``pairs`` free pairs and ``hardness`` m)."""

    model: str = "haar"
    size: int = 0
    pairs: int = 0
    forced: int = 0
    hardness: int = 0
    chains: int = 64
    mcmc: McmcConfig = field(default_factory=McmcConfig)

    def describe(self) -> dict:
        d = asdict(self)
        d["mcmc"] = asdict(self.mcmc)
        return d


@dataclass(frozen=True)
class AngleSummary:
    """Descriptive statistics of the first normalized eigenangle over a
    batch of samples, plus a fixed-bin histogram."""

    n: int
    mean: float
    median: float
    stdev: float
    seed: int
    forced_zero_multiplicity: int
    bin_edges: np.ndarray
    counts: np.ndarray
    ensemble: dict


def _rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def haar_sample_so(n: int, seed: int) -> OrthogonalSample:
    """Draw a Haar-distributed matrix from the special orthogonal group of
    size n; deterministic for a fixed seed."""
    return _haar_sample_so(n, np.random.default_rng(seed))


def _haar_sample_so(n: int, rng: np.random.Generator) -> OrthogonalSample:
    if n < 2:
        raise ValueError("matrix dimension must be at least 2")
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    q = q * d
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return OrthogonalSample(size=n, entries=q, angles=eigenangles(q))


def eigenangles(matrix: np.ndarray) -> np.ndarray:
    """Eigenangles theta_j in [0, pi] of a special orthogonal matrix, from
    the eigenvalues of its symmetric part (M + M^T)/2 (each cos(theta)
    appears twice; odd sizes carry one pinned eigenvalue +1, discarded)."""
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    defect = np.abs(m @ m.T - np.eye(n)).max()
    if defect > INPUT_ORTHOGONALITY_TOL:
        raise ValueError(f"matrix is not orthogonal (defect {defect:.2e})")
    if np.linalg.det(m) < 0:
        raise ValueError("matrix has determinant -1, not in the special group")
    sym = 0.5 * (m + m.T)
    return _angles_from_symmetric_eigs(np.linalg.eigvalsh(sym), n)


def _angles_from_symmetric_eigs(w: np.ndarray, n: int) -> np.ndarray:
    """Pair up the doubled cosines (ascending eigenvalues of the symmetric
    part), dropping the single pinned +1 for odd n."""
    if n % 2 == 1:
        idx = int(np.argmin(np.abs(w - 1.0)))
        if abs(w[idx] - 1.0) > FORCED_EIGENVALUE_TOL:
            raise ArithmeticError(
                "odd-size special orthogonal matrix lacks the pinned "
                f"eigenvalue +1 (closest {w[idx]:.8f})")
        w = np.delete(w, idx)
    cos_pairs = 0.5 * (w[0::2] + w[1::2])
    angles = np.arccos(np.clip(cos_pairs, -1.0, 1.0))
    return np.sort(angles)


def normalize_eigenangles(angles, pairs: int):
    """Normalized eigenangles theta * pairs / pi (order preserved)."""
    a = np.asarray(angles, dtype=float)
    if np.any(a < 0) or np.any(a > np.pi):
        raise ValueError("angles must lie in [0, pi]")
    out = a * pairs / np.pi
    return out if out.ndim else float(out)


def sample_independent_model(pairs: int, forced: int, seed: int) -> np.ndarray:
    """Eigenangles of the block model: 2*forced zeros from the identity
    block, then the angles of a Haar matrix of size 2*(pairs - forced).

    The nonzero part is distributed exactly as haar_sample_so of that size
    (same seed gives the identical draw).
    """
    if forced < 0 or pairs <= forced:
        raise ValueError("need pairs > forced >= 0")
    free = haar_sample_so(2 * (pairs - forced), seed)
    return np.concatenate([np.zeros(2 * forced), free.angles])


def _interaction_log_density(x: np.ndarray, m: int) -> float:
    if np.any(np.abs(x) >= 1.0):
        return -np.inf
    n = x.size
    with np.errstate(divide="ignore"):
        val = float(np.sum((m - 0.5) * np.log1p(-x) - 0.5 * np.log1p(x)))
        if n > 1:
            diffs = x[:, None] - x[None, :]
            iu = np.triu_indices(n, 1)
            val += float(2.0 * np.sum(np.log(np.abs(diffs[iu]))))
    return val


def _reflect(v: np.ndarray) -> np.ndarray:
    """Fold values back into [-1, 1] (symmetric proposal under reflection)."""
    v = np.where(v > 1.0, 2.0 - v, v)
    v = np.where(v < -1.0, -2.0 - v, v)
    return v


def interaction_chain(pairs: int, m: int, config: McmcConfig, n_draws: int) -> np.ndarray:
    """Run one Metropolis-Hastings chain targeting the conditioned level
    density and return ``n_draws`` thinned states, shape (n_draws, pairs).

    One step updates every coordinate once with a Gaussian proposal
    reflected into [-1, 1] (reflection keeps the proposal symmetric, so
    the acceptance ratio is the plain density ratio).
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    if m < 0:
        raise ValueError("hardness m must be >= 0")
    cfg = config.resolved(pairs)
    rng = np.random.default_rng(cfg.seed)
    x = np.linspace(-0.5, 0.5, pairs) if pairs > 1 else np.zeros(1)
    logp = _interaction_log_density(x, m)
    if not np.isfinite(logp):
        raise RuntimeError("initial state has non-finite log-density")

    def sweep(x, logp):
        for j in range(pairs):
            prop = x.copy()
            prop[j] = _reflect(prop[j] + cfg.proposal_width * rng.standard_normal())
            logq = _interaction_log_density(prop, m)
            if np.log(rng.random()) < logq - logp:
                x, logp = prop, logq
        return x, logp

    for _ in range(cfg.burn_in):
        x, logp = sweep(x, logp)
    out = np.empty((n_draws, pairs))
    for i in range(n_draws):
        for _ in range(cfg.thinning):
            x, logp = sweep(x, logp)
        out[i] = np.sort(x)
    return out


def sample_interaction_levels(pairs: int, m: int, config: McmcConfig) -> LevelVector:
    """One (approximately) stationary draw from the conditioned level
    density; deterministic given config.seed."""
    draw = interaction_chain(pairs, m, config, 1)[0]
    return LevelVector(levels=draw, hardness=m, pairs=pairs)


def _interaction_batch(pairs: int, m: int, base: McmcConfig, samples: int,
                       seed: int, chains: int) -> np.ndarray:
    """Levels for ``samples`` thinned draws collected from ``chains``
    parallel chains advanced in lockstep (vectorized over chains).  The
    stream is a pure function of (parameters, seed, chains).

    Returns an array of shape (samples, pairs), each row sorted.
    """
    cfg = base.resolved(pairs)
    chains = max(1, min(chains, samples))
    per = -(-samples // chains)  # draws per chain, ceil
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xC0,)))
    x = np.tile(np.linspace(-0.5, 0.5, pairs) if pairs > 1 else np.zeros(1),
                (chains, 1))

    def sweep(x):
        for j in range(pairs):
            prop = _reflect(x[:, j] + cfg.proposal_width * rng.standard_normal(chains))
            with np.errstate(divide="ignore", invalid="ignore"):
                delta = ((m - 0.5) * (np.log1p(-prop) - np.log1p(-x[:, j]))
                         - 0.5 * (np.log1p(prop) - np.log1p(x[:, j])))
                for k in range(pairs):
                    if k == j:
                        continue
                    delta += 2.0 * (np.log(np.abs(prop - x[:, k]))
                                    - np.log(np.abs(x[:, j] - x[:, k])))
            accept = np.log(rng.random(chains)) < delta
            x[accept, j] = prop[accept]
        return x

    for _ in range(cfg.burn_in):
        x = sweep(x)
    draws = np.empty((per, chains, pairs))
    for i in range(per):
        for _ in range(cfg.thinning):
            x = sweep(x)
        draws[i] = x
    flat = np.sort(draws.reshape(per * chains, pairs), axis=1)
    return flat[:samples]


def _first_positive_normalized_angle(angles: np.ndarray, pairs: int) -> float:
    pos = angles[angles > 0]
    if pos.size == 0:
        raise RuntimeError("sample has no angle above 0")
    return float(pos[0] * pairs / np.pi)


def simulate_first_angle_stats(spec: EnsembleSpec, samples: int, seed: int,
                               bins: int = 60, workers: int = 1) -> AngleSummary:
    """Simulate the requested ensemble and summarize the first normalized
    eigenangle above 0 (the first angle of non-pinned type for models with
    pinned eigenvalues; the pinned multiplicity is reported separately).

    Every sample index draws from its own derived seed, so the result is
    identical however the indices are partitioned across workers.
    """
    if samples < 1:
        raise ValueError("need at least one sample")

    forced_mult = 0
    if spec.model == "haar":
        if spec.size < 2:
            raise ValueError("haar model needs size >= 2")
        pairs = spec.size // 2

        def one(i: int) -> float:
            s = _haar_sample_so(spec.size, _rng_for(seed, i))
            return _first_positive_normalized_angle(s.angles, pairs)

        values = _run_indexed(one, samples, workers)
    elif spec.model == "independent":
        if spec.pairs <= spec.forced or spec.forced < 0:
            raise ValueError("independent model needs pairs > forced >= 0")
        pairs = spec.pairs
        forced_mult = 2 * spec.forced
        free_size = 2 * (spec.pairs - spec.forced)

        def one(i: int) -> float:
            s = _haar_sample_so(free_size, _rng_for(seed, i))
            return _first_positive_normalized_angle(s.angles, pairs)

        values = _run_indexed(one, samples, workers)
    elif spec.model == "interaction":
        if spec.pairs < 1:
            raise ValueError("interaction model needs pairs >= 1")
        forced_mult = spec.hardness
        # normalization counts the pinned pairs of the ambient group
        pairs = spec.pairs + spec.hardness // 2
        levels = _interaction_batch(spec.pairs, spec.hardness, spec.mcmc,
                                    samples, seed, spec.chains)
        top = levels[:, -1]
        values = np.arccos(np.clip(top, -1.0, 1.0)) * pairs / np.pi
    else:
        raise ValueError(f"unknown ensemble model {spec.model!r}")

    values = np.asarray(values, dtype=float)
    hi = max(3.0, float(np.ceil(values.max() * 4.0) / 4.0))
    counts, edges = np.histogram(values, bins=bins, range=(0.0, hi))
    return AngleSummary(
        n=samples,
        mean=float(values.mean()),
        median=float(np.median(values)),
        stdev=float(values.std(ddof=1)) if samples > 1 else 0.0,
        seed=seed,
        forced_zero_multiplicity=forced_mult,
        bin_edges=edges,
        counts=counts,
        ensemble=spec.describe(),
    )


def _run_indexed(fn, samples: int, workers: int) -> np.ndarray:
    out = np.empty(samples)
    if workers <= 1:
        for i in range(samples):
            out[i] = fn(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, v in enumerate(pool.map(fn, range(samples), chunksize=256)):
                out[i] = v
    return out
