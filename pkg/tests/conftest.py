import csv
import math

import numpy as np
import pytest

from hardedge.ensembles import EnsembleSpec, McmcConfig, simulate_first_angle_stats, _interaction_batch


@pytest.fixture(scope="session")
def so4_summary():
    """23,040 SO(4) samples: first normalized eigenangle statistics."""
    return simulate_first_angle_stats(EnsembleSpec(model="haar", size=4), 23_040, 7)


@pytest.fixture(scope="session")
def so6_summary():
    return simulate_first_angle_stats(EnsembleSpec(model="haar", size=6), 23_040, 7)


@pytest.fixture(scope="session")
def so7_summary():
    return simulate_first_angle_stats(EnsembleSpec(model="haar", size=7), 50_000, 7)


@pytest.fixture(scope="session")
def so4_angles():
    """Raw (theta1, theta2) pairs of 23,040 SO(4) samples, for joint-density
    and finite-kernel cross-checks."""
    from hardedge.ensembles import _haar_sample_so, _rng_for
    out = np.empty((23_040, 2))
    for i in range(out.shape[0]):
        out[i] = _haar_sample_so(4, _rng_for(7, i)).angles
    return out


@pytest.fixture(scope="session")
def interaction_p2m2_draws():
    """1e5 thinned draws of the conditioned model, pairs=2, hardness=2,
    collected from 64 lockstep chains (epoch-major rows)."""
    return _interaction_batch(2, 2, McmcConfig(), 100_000, 11, 64)


def chain_mean_se(values: np.ndarray, chains: int = 64):
    """Mean and standard error from per-chain means (rows are epoch-major,
    so column c of the reshape is one chain's trajectory)."""
    per = values.size // chains
    mat = values[: per * chains].reshape(per, chains)
    cm = mat.mean(axis=0)
    return float(cm.mean()), float(cm.std(ddof=1) / math.sqrt(chains))


TABLE_FAMILY_COUNTS = [49, 58, 55, 59, 53, 130, 63, 55, 57, 59, 124, 66, 120, 48]


def write_table_fixture(path, n_dup: int = 10) -> dict:
    """A 996-record dataset shaped like an amalgamated multi-family table:
    14 families with the counts above, rank 0, log-conductors in [15, 16).
    The last ``n_dup`` records of family 02 duplicate curves of family 01.
    Returns the golden per-family counts."""
    rng = np.random.default_rng(20_240_101)
    rows = []
    serial = 0
    for fam_idx, count in enumerate(TABLE_FAMILY_COUNTS):
        fam = f"fam{fam_idx + 1:02d}"
        for j in range(count):
            if fam_idx == 1 and j >= count - n_dup:
                # duplicate a curve from family 1 (same Weierstrass tuple)
                ref = rows[j - (count - n_dup)]
                wa = [ref["a1"], ref["a2"], ref["a3"], ref["a4"], ref["a6"]]
                logc = ref["log_conductor"]
            else:
                wa = [serial % 3, (serial + 1) % 5 - 2, serial % 2,
                      serial % 7 - 3, serial + 1]
                logc = 15.0 + (serial % 500) / 500.0
                serial += 1
            z1 = 0.5 + 0.002 * (j + fam_idx)
            rows.append({
                "a1": wa[0], "a2": wa[1], "a3": wa[2], "a4": wa[3], "a6": wa[4],
                "conductor": "", "log_conductor": logc, "rank": 0, "sign": "+1",
                "family_id": fam, "t": j,
                "z1": z1, "z2": z1 + 1.0, "z3": z1 + 2.2,
            })
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    return {f"fam{i + 1:02d}": c for i, c in enumerate(TABLE_FAMILY_COUNTS)}


@pytest.fixture()
def table_fixture(tmp_path):
    path = tmp_path / "tabletwo.csv"
    golden = write_table_fixture(path)
    return path, golden


def write_spacing_fixture(path) -> None:
    """Records whose log-conductor is exactly 2*pi, so stored zeros ARE the
    normalized zeros and all spacing statistics are exact by construction."""
    zero_triples = [
        (1.0, 2.0, 4.0),
        (1.5, 2.5, 4.5),
        (2.0, 3.5, 5.0),
        (0.5, 2.0, 3.0),
    ]
    rows = []
    for i, (z1, z2, z3) in enumerate(zero_triples):
        rows.append({
            "a1": 0, "a2": 0, "a3": 0, "a4": i + 1, "a6": 1,
            "conductor": "", "log_conductor": 2 * math.pi, "rank": 0,
            "sign": "+1", "family_id": "spacing", "t": i,
            "z1": z1, "z2": z2, "z3": z3,
        })
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


@pytest.fixture()
def spacing_fixture(tmp_path):
    path = tmp_path / "spacing.csv"
    write_spacing_fixture(path)
    # golden values, by hand from the four triples
    golden = {
        "z2-z1": {"diffs": [1.0, 1.0, 1.5, 1.5], "median": 1.25, "mean": 1.25},
        "z3-z2": {"diffs": [2.0, 2.0, 1.5, 1.0], "median": 1.75, "mean": 1.625},
        "z3-z1": {"diffs": [3.0, 3.0, 3.0, 2.5], "median": 3.0, "mean": 2.875},
    }
    return path, golden
