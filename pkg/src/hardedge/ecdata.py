"""Ingestion and analysis of elliptic-curve zero datasets.

Dataset schema (CSV with header, JSON mirror with identical field names):

    a1,a2,a3,a4,a6,conductor,log_conductor,rank,sign,family_id,t,z1,z2,z3

``conductor`` may be left empty when ``log_conductor`` is given (large
conductors are often only known through their logarithm).  Zeros columns
are the ordinates of the first zeros above the central point, ascending;
columns beyond z1 are optional.  All floats use '.' as decimal separator.

Zeros are rescaled to unit mean spacing near the central point by
gamma -> gamma * log(conductor) / (2 pi)  (natural log).

``ap_point_count`` supplies the Fourier coefficients a_p by exhaustive
point counting over F_p; the explicit-formula evaluator uses the analytic
normalization lambda(p) = a_p / sqrt(p).
"""

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "CurveRecord",
    "ZeroDataset",
    "TestFunctionPair",
    "ParseError",
    "fejer_pair",
    "parse_dataset",
    "write_dataset",
    "normalize_zeros",
    "filter_partition",
    "amalgamate",
    "duplicate_report",
    "primes_up_to",
    "ap_point_count",
    "curve_discriminant",
    "explicit_formula_prime_side",
    "zero_side_sum",
]

FIELDS = ["a1", "a2", "a3", "a4", "a6", "conductor", "log_conductor",
          "rank", "sign", "family_id", "t", "z1", "z2", "z3"]

MAX_POINT_COUNT_PRIME = 1_000_000


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class CurveRecord:
    weierstrass: tuple          # (a1, a2, a3, a4, a6), integers
    log_conductor: float        # natural log of the conductor
    rank: int
    sign: int                   # +1 or -1
    zeros: tuple                # ascending positive ordinates, possibly empty
    family_id: str = ""
    t_param: int | None = None
    conductor: int | None = None  # exact value when it fits

    def validate(self) -> None:
        if len(self.weierstrass) != 5:
            raise ParseError("weierstrass coefficients must be 5 integers")
        if self.sign not in (-1, 1):
            raise ParseError(f"sign must be +1 or -1, got {self.sign}")
        if self.rank < 0:
            raise ParseError("rank must be nonnegative")
        if any(z <= 0 for z in self.zeros):
            raise ParseError("zeros must be positive")
        if any(b <= a for a, b in zip(self.zeros, self.zeros[1:])):
            raise ParseError("zeros must be strictly increasing")
        if not math.isfinite(self.log_conductor):
            raise ParseError("log-conductor must be finite")

    def parity_consistent(self) -> bool:
        """Even rank should come with sign +1 (functional equation parity)."""
        return (self.rank % 2 == 0) == (self.sign == 1)


@dataclass(frozen=True)
class ZeroDataset:
    records: tuple
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class TestFunctionPair:
    """An even test function and its Fourier transform; phi_hat vanishes
    outside [-support_bound, support_bound]."""

    name: str
    phi: object
    phi_hat: object
    support_bound: float


def fejer_pair(sigma: float = 1.0) -> TestFunctionPair:
    """phi(x) = sigma (sin(pi sigma x) / (pi sigma x))^2 with the triangle
    transform phi_hat(u) = (1 - |u|/sigma)_+; phi >= 0 and phi_hat is
    compactly supported on [-sigma, sigma]."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    def phi(x):
        return sigma * np.sinc(sigma * np.asarray(x, dtype=float)) ** 2

    def phi_hat(u):
        return np.maximum(0.0, 1.0 - np.abs(np.asarray(u, dtype=float)) / sigma)

    return TestFunctionPair(name=f"fejer[{sigma:g}]", phi=phi, phi_hat=phi_hat,
                            support_bound=sigma)


def _parse_row(row: dict, line: int) -> CurveRecord:
    def intval(key):
        raw = (row.get(key) or "").strip()
        if raw == "":
            raise ParseError(f"line {line}: missing integer field {key!r}")
        return int(raw)

    try:
        wa = tuple(intval(k) for k in ("a1", "a2", "a3", "a4", "a6"))
        cond_raw = (row.get("conductor") or "").strip()
        logc_raw = (row.get("log_conductor") or "").strip()
        conductor = int(cond_raw) if cond_raw else None
        if logc_raw:
            log_conductor = float(logc_raw)
        elif conductor is not None:
            if conductor <= 1:
                raise ParseError(f"line {line}: conductor must exceed 1")
            log_conductor = math.log(conductor)
        else:
            raise ParseError(f"line {line}: need conductor or log_conductor")
        rank = intval("rank")
        sraw = (row.get("sign") or "").strip()
        if sraw in ("+1", "+", "1"):
            sign = 1
        elif sraw in ("-1", "-"):
            sign = -1
        else:
            raise ParseError(f"line {line}: bad sign {sraw!r}")
        zeros = []
        for key in ("z1", "z2", "z3"):
            raw = (row.get(key) or "").strip()
            if raw:
                zeros.append(float(raw))
        t_raw = (row.get("t") or "").strip()
        rec = CurveRecord(
            weierstrass=wa, log_conductor=log_conductor, rank=rank, sign=sign,
            zeros=tuple(zeros), family_id=(row.get("family_id") or "").strip(),
            t_param=int(t_raw) if t_raw else None, conductor=conductor)
        try:
            rec.validate()
        except ParseError as exc:
            raise ParseError(f"line {line}: {exc}") from exc
        return rec
    except ParseError:
        raise
    except (ValueError, TypeError) as exc:
        raise ParseError(f"line {line}: {exc}") from exc


def parse_dataset(path, fmt: str | None = None, strict: bool = True) -> ZeroDataset:
    """Read a dataset from CSV or JSON.  In strict mode any malformed row
    aborts the parse; in lenient mode bad rows are skipped and reported in
    the provenance under 'skipped'."""
    path = str(path)
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "csv"
    with open(path, "rb") as fh:
        blob = fh.read()
    checksum = hashlib.sha256(blob).hexdigest()
    records, skipped = [], []
    if fmt == "csv":
        reader = csv.DictReader(blob.decode("utf-8").splitlines())
        if reader.fieldnames is None or "a1" not in reader.fieldnames:
            raise ParseError(f"{path}: missing header row")
        for i, row in enumerate(reader, start=2):
            try:
                records.append(_parse_row(row, i))
            except ParseError as exc:
                if strict:
                    raise
                skipped.append(str(exc))
    elif fmt == "json":
        rows = json.loads(blob.decode("utf-8"))
        for i, row in enumerate(rows, start=1):
            try:
                records.append(_parse_row({k: str(v) for k, v in row.items()
                                           if v is not None}, i))
            except ParseError as exc:
                if strict:
                    raise
                skipped.append(str(exc))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if not records:
        raise ParseError(f"{path}: no valid records")
    prov = {"path": path, "sha256": checksum, "format": fmt}
    if skipped:
        prov["skipped"] = skipped
    return ZeroDataset(records=tuple(records), provenance=prov)


def _record_row(rec: CurveRecord) -> dict:
    row = {k: str(v) for k, v in zip(("a1", "a2", "a3", "a4", "a6"), rec.weierstrass)}
    row["conductor"] = "" if rec.conductor is None else str(rec.conductor)
    row["log_conductor"] = repr(rec.log_conductor)
    row["rank"] = str(rec.rank)
    row["sign"] = "+1" if rec.sign == 1 else "-1"
    row["family_id"] = rec.family_id
    row["t"] = "" if rec.t_param is None else str(rec.t_param)
    for i, key in enumerate(("z1", "z2", "z3")):
        row[key] = repr(rec.zeros[i]) if i < len(rec.zeros) else ""
    return row


def write_dataset(ds: ZeroDataset, path, fmt: str | None = None) -> None:
    path = str(path)
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "csv"
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=FIELDS)
            writer.writeheader()
            for rec in ds.records:
                writer.writerow(_record_row(rec))
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump([_record_row(r) for r in ds.records], fh, indent=1)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def normalize_zeros(record: CurveRecord):
    """gamma_j * log(conductor) / (2 pi) for each stored zero."""
    if record.log_conductor <= 0:
        raise ValueError("normalization requires conductor > 1")
    scale = record.log_conductor / (2.0 * math.pi)
    return [g * scale for g in record.zeros]


def filter_partition(ds: ZeroDataset, log_cond_range=None, rank: int | None = None,
                     dedup: bool = False, family_id: str | None = None) -> ZeroDataset:
    """Select records with log-conductor in [lo, hi) and the given rank;
    with dedup, keep the first occurrence per Weierstrass tuple."""
    if log_cond_range is not None:
        lo, hi = log_cond_range
        if not lo < hi:
            raise ValueError("need lo < hi")
    out, seen = [], set()
    for rec in ds.records:
        if log_cond_range is not None and not (lo <= rec.log_conductor < hi):
            continue
        if rank is not None and rec.rank != rank:
            continue
        if family_id is not None and rec.family_id != family_id:
            continue
        if dedup:
            if rec.weierstrass in seen:
                continue
            seen.add(rec.weierstrass)
        out.append(rec)
    prov = dict(ds.provenance)
    prov["filter"] = {"log_cond_range": list(log_cond_range) if log_cond_range else None,
                      "rank": rank, "dedup": dedup, "family_id": family_id}
    return ZeroDataset(records=tuple(out), provenance=prov)


def duplicate_report(ds: ZeroDataset) -> dict:
    """Weierstrass tuples occurring more than once, with their counts."""
    counts: dict = {}
    for rec in ds.records:
        counts[rec.weierstrass] = counts.get(rec.weierstrass, 0) + 1
    return {w: c for w, c in counts.items() if c > 1}


def amalgamate(datasets) -> ZeroDataset:
    """Concatenate several datasets (family provenance travels with each
    record) and attach a report of shared Weierstrass tuples."""
    records = []
    sources = []
    for ds in datasets:
        records.extend(ds.records)
        sources.append(ds.provenance.get("path", "<memory>"))
    merged = ZeroDataset(records=tuple(records),
                         provenance={"sources": sources})
    dups = duplicate_report(merged)
    prov = dict(merged.provenance)
    prov["duplicates"] = {str(list(k)): v for k, v in sorted(dups.items())}
    return replace(merged, provenance=prov)


def primes_up_to(n: int):
    """Sieve of Eratosthenes, inclusive."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p:: p] = False
    return np.flatnonzero(sieve).tolist()


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in range(2, int(p ** 0.5) + 1):
        if p % q == 0:
            return False
    return True


def curve_discriminant(a_invariants) -> int:
    a1, a2, a3, a4, a6 = (int(v) for v in a_invariants)
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def ap_point_count(a_invariants, p: int):
    """Trace of Frobenius a_p = p + 1 - #E(F_p) by exhaustive enumeration.

    For odd p the count over y is done with the quadratic character of the
    completed square D(x) = (a1 x + a3)^2 + 4(x^3 + a2 x^2 + a4 x + a6).
    Bad reduction (discriminant divisible by p) is handled by counting
    only nonsingular points, which lands on the standard conventions
    automatically: a_p = 0 (additive), +1 (split multiplicative),
    -1 (non-split).

    Returns ``(a_p, good_reduction)``.
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > MAX_POINT_COUNT_PRIME:
        raise ValueError(f"refusing exhaustive count for p > {MAX_POINT_COUNT_PRIME}")
    a1, a2, a3, a4, a6 = (int(v) % p for v in a_invariants)
    good = curve_discriminant(a_invariants) % p != 0

    if p == 2:
        affine = 0
        singular_on_curve = 0
        for x in range(2):
            for y in range(2):
                f = (y * y + a1 * x * y + a3 * y
                     - (x ** 3 + a2 * x * x + a4 * x + a6)) % 2
                if f == 0:
                    fx = (a1 * y - (3 * x * x + 2 * a2 * x + a4)) % 2
                    fy = (2 * y + a1 * x + a3) % 2
                    if fx == 0 and fy == 0:
                        singular_on_curve += 1
                    else:
                        affine += 1
        n_ns = affine + 1
        ap = p + 1 - n_ns if good else p - n_ns
        return int(ap), good

    x = np.arange(p, dtype=np.int64)
    lin = (a1 * x + a3) % p
    f = (x * x % p * x + a2 * x * x + a4 * x + a6) % p
    d = (lin * lin + 4 * f) % p
    sq = np.zeros(p, dtype=bool)
    sq[(x * x) % p] = True
    chi = np.where(d == 0, 0, np.where(sq[d], 1, -1))
    affine = int(p + chi.sum())

    singular_on_curve = 0
    if not good:
        inv2 = pow(2, -1, p)
        for x0 in np.flatnonzero(d == 0):
            x0 = int(x0)
            y0 = (-(a1 * x0 + a3) * inv2) % p
            fx = (a1 * y0 - (3 * x0 * x0 + 2 * a2 * x0 + a4)) % p
            if fx == 0:
                singular_on_curve += 1
    n_ns = affine - singular_on_curve + 1
    ap = p + 1 - n_ns if good else p - n_ns
    return int(ap), good


def explicit_formula_prime_side(a_invariants, log_conductor: float,
                                tf: TestFunctionPair, prime_cutoff: int):
    """Right-hand side of the explicit formula for the curve's L-function:

        phi_hat(0) + phi(0)
        - 2 sum_p (log p / log C) phi_hat(log p / log C)   lambda(p) / sqrt(p)
        - 2 sum_p (log p / log C) phi_hat(2 log p / log C) lambda(p)^2 / p

    with lambda(p) = a_p / sqrt(p).  Terms with p > C^sigma vanish because
    phi_hat is supported in [-sigma, sigma], so the truncation is exact
    once prime_cutoff exceeds that bound.  The remainder term of size
    O(log log C / log C) is NOT modeled.

    Returns a dict with the value, the exact-support prime bound, whether
    the truncation is exact, and the primes with bad reduction.
    """
    if prime_cutoff < 2:
        raise ValueError("prime_cutoff must be at least 2")
    if log_conductor <= 0:
        raise ValueError("log-conductor must be positive")
    logc = float(log_conductor)
    support_prime_bound = math.exp(tf.support_bound * logc)
    total = float(tf.phi_hat(0.0)) + float(tf.phi(0.0))
    bad = []
    for p in primes_up_to(prime_cutoff):
        u = math.log(p) / logc
        h1 = float(tf.phi_hat(u))
        h2 = float(tf.phi_hat(2.0 * u))
        if h1 == 0.0 and h2 == 0.0:
            continue
        ap, good = ap_point_count(a_invariants, p)
        if not good:
            bad.append(p)
        lam = ap / math.sqrt(p)
        total -= 2.0 * u * h1 * lam / math.sqrt(p)
        total -= 2.0 * u * h2 * lam * lam / p
    return {
        "value": total,
        "support_prime_bound": support_prime_bound,
        "truncation_exact": prime_cutoff >= support_prime_bound,
        "bad_reduction_primes": bad,
        "remainder_modeled": False,
    }


def zero_side_sum(record: CurveRecord, tf: TestFunctionPair):
    """Left-hand side of the explicit formula from the stored zeros:
    rank * phi(0) for the central zeros, plus 2 * sum_j phi(z_j) over the
    normalized stored zeros (doubled for the conjugate zeros below the
    central point).

    Only the stored zeros enter, so a truncation bound (phi integrated
    beyond the last stored normalized zero, doubled) is reported with the
    value.
    """
    if not record.zeros:
        raise ValueError("record stores no zeros")
    z = normalize_zeros(record)
    val = record.rank * float(tf.phi(0.0))
    val += 2.0 * float(np.sum(tf.phi(np.asarray(z))))
    # phi(x) <= sigma / (pi sigma x)^2, so the tail beyond the last stored
    # zero is below 2 * integral = 2 / (pi^2 sigma z_last)
    sigma = tf.support_bound
    tail_bound = 2.0 / (math.pi ** 2 * sigma * z[-1])
    return {"value": val, "tail_bound": tail_bound, "zeros_used": len(z)}
