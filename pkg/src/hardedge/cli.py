"""Command-line front end.

Subcommands

    simulate   eigenangle statistics for Haar / block / conditioned models
    theory     kernel densities, gap probabilities, Fredholm means, transforms
    analyze    summary and spacing tables for a zero dataset
    ttest      two-sample t-procedures and the sign test
    explicit   explicit-formula sums for a single curve

Every run writes machine-readable artifacts (CSV tables, a JSON document
embedding the fully resolved run configuration) into the output directory
(``--out``, defaulting to $HARDEDGE_OUTDIR or the working directory).
``--format svg`` additionally renders matplotlib figures next to the
delimited output.  The default seed is the fixed constant 1729 so that
published numbers reproduce; pass ``--seed random`` to opt into entropy.
"""

import argparse
import csv
import json
import math
import os
import secrets
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import ecdata, fredholm, stats
from .ensembles import EnsembleSpec, McmcConfig, simulate_first_angle_stats
from .kernels import one_level_density, one_level_density_fourier

DEFAULT_SEED = 1729

__all__ = ["main", "DEFAULT_SEED"]


class CliError(Exception):
    pass


def _parse_grid(text: str) -> np.ndarray:
    """start:stop:step, inclusive of start, exclusive of stop."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise CliError(f"bad grid {text!r}, expected start:stop:step") from exc
    if step <= 0 or stop <= start:
        raise CliError(f"bad grid {text!r}: need stop > start and step > 0")
    count = int(math.ceil((stop - start) / step - 1e-12))
    return start + step * np.arange(count)


def _parse_range(text: str):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise CliError(f"bad range {text!r}, expected lo:hi") from exc
    if not lo < hi:
        raise CliError(f"bad range {text!r}: need lo < hi")
    return lo, hi


def _resolve_seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(63)
    try:
        return int(text)
    except ValueError as exc:
        raise CliError(f"seed must be an integer or 'random', got {text!r}") from exc


class ArtifactWriter:
    """Collects written paths so a failing run can clean up after itself."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        p = self.out_dir / name
        self.written.append(p)
        return p

    def write_json(self, name: str, payload: dict) -> Path:
        p = self.path(name)
        with open(p, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        return p

    def write_csv(self, name: str, header, rows) -> Path:
        p = self.path(name)
        with open(p, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        return p

    def cleanup(self) -> None:
        for p in self.written:
            try:
                p.unlink()
            except OSError:
                pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _config_echo(args, seed=None) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    if seed is not None:
        cfg["seed"] = seed
    cfg["version"] = __version__
    return cfg


# ---------------------------------------------------------------- simulate

def _cmd_simulate(args, writer: ArtifactWriter) -> int:
    seed = _resolve_seed(args.seed)
    mcmc = McmcConfig(burn_in=args.burn_in, thinning=args.thinning,
                      proposal_width=args.proposal_width, seed=seed)
    spec = EnsembleSpec(model=args.model, size=args.size, pairs=args.pairs,
                        forced=args.forced, hardness=args.hardness,
                        chains=args.chains, mcmc=mcmc)
    summary = simulate_first_angle_stats(spec, args.samples, seed, bins=args.bins,
                                         workers=args.workers)
    hist_rows = [(_fmt(lo), _fmt(hi), int(c)) for lo, hi, c in
                 zip(summary.bin_edges[:-1], summary.bin_edges[1:], summary.counts)]
    writer.write_csv("histogram.csv", ("bin_left", "bin_right", "count"), hist_rows)
    payload = {
        "config": _config_echo(args, seed),
        "ensemble": summary.ensemble,
        "n": summary.n,
        "mean": summary.mean,
        "median": summary.median,
        "stdev": summary.stdev,
        "seed": summary.seed,
        "forced_zero_multiplicity": summary.forced_zero_multiplicity,
    }
    writer.write_json("summary.json", payload)
    if args.format == "svg":
        from .plotting import histogram_figure, save_figure
        overlay = None
        m_overlay = {"haar": (args.size % 2) if args.size else None,
                     "independent": 0,
                     "interaction": args.hardness}[args.model]
        if m_overlay is not None and m_overlay <= 4 and not args.no_overlay:
            xs = np.linspace(1e-3, max(3.0, summary.bin_edges[-1]), 120)
            ys = [fredholm.spacing_density(m_overlay, 0, s, order=30) for s in xs]
            overlay = ((xs, ys))
        fig = histogram_figure(summary.bin_edges, summary.counts,
                               title=f"first normalized eigenangle ({args.model})",
                               xlabel="normalized angle",
                               overlay=overlay,
                               overlay_label="limiting density" if overlay else "")
        save_figure(fig, writer.path("histogram.svg"))
    print(f"n={summary.n} mean={summary.mean:.6f} median={summary.median:.6f} "
          f"stdev={summary.stdev:.6f}")
    return 0


# ------------------------------------------------------------------ theory

def _cmd_theory(args, writer: ArtifactWriter) -> int:
    m = args.m
    payload = {"config": _config_echo(args), "results": {}}
    made_csv = False
    if args.density:
        xs = _parse_grid(args.grid)
        xs = xs[xs > 0]
        dens = one_level_density(m, xs)
        rows = [(_fmt(x), _fmt(v)) for x, v in zip(xs, dens.smooth)]
        writer.write_csv(f"density_m{m}.csv", ("x", "value"), rows)
        payload["results"]["density"] = {
            "file": f"density_m{m}.csv", "point_mass_at_zero": dens.point_mass_at_zero}
        made_csv = True
        if args.format == "svg":
            from .plotting import curve_figure, save_figure
            fig = curve_figure(xs, [(f"hardness {m}", dens.smooth)],
                               title=f"edge one-level density, hardness {m}",
                               xlabel="x", ylabel="density")
            save_figure(fig, writer.path(f"density_m{m}.svg"))
    if args.kernel:
        xs = _parse_grid(args.grid)
        xs = xs[xs > 0]
        from .kernels import hard_kernel
        vals = hard_kernel(m, xs, np.full_like(xs, args.at))
        rows = [(_fmt(x), _fmt(v)) for x, v in zip(xs, vals)]
        writer.write_csv(f"kernel_m{m}.csv", ("x", "value"), rows)
        payload["results"]["kernel"] = {"file": f"kernel_m{m}.csv", "y": args.at}
        made_csv = True
    if args.gap:
        ss = _parse_grid(args.s_grid)
        ss = ss[ss > 0]
        rows = []
        for s in ss:
            e = fredholm.gap_probability(m, args.k, float(s), order=args.order)
            p = fredholm.spacing_density(m, args.k, float(s), order=args.order)
            rows.append((_fmt(s), _fmt(e.probability), _fmt(p)))
        writer.write_csv(f"gap_m{m}_k{args.k}.csv", ("s", "E", "p"), rows)
        payload["results"]["gap"] = {"file": f"gap_m{m}_k{args.k}.csv", "k": args.k}
        made_csv = True
    if args.mean:
        value = fredholm.first_level_mean(m, order=args.order)
        payload["results"]["first_level_mean"] = value
        print(f"first_level_mean(m={m}) = {value:.6f}")
    if args.finite_mean:
        a = m - 0.5 if args.jacobi_a is None else args.jacobi_a
        b = -0.5 if args.jacobi_b is None else args.jacobi_b
        value = fredholm.finite_n_first_level_mean(args.n_size, a, b)
        payload["results"]["finite_first_level_mean"] = {
            "n": args.n_size, "a": a, "b": b, "value": value}
        print(f"finite_n_first_level_mean(n={args.n_size}) = {value:.6f}")
    if args.ft:
        if m <= 2:
            delta, smooth = one_level_density_fourier(m, args.u)
            payload["results"]["fourier"] = {
                "u": args.u, "delta_mass": delta, "smooth": float(smooth),
                "method": "closed-form"}
            print(f"ft(m={m}, u={args.u}) smooth = {float(smooth):.6f}")
        else:
            value = _numerical_density_transform(m, args.u)
            payload["results"]["fourier"] = {
                "u": args.u, "delta_mass": 1.0, "smooth": value,
                "method": "numerical (no closed form wired in)"}
            print(f"ft(m={m}, u={args.u}) smooth = {value:.6f} (numerical)")
    if not (args.density or args.kernel or args.gap or args.mean
            or args.finite_mean or args.ft):
        raise CliError("theory: nothing to do "
                       "(use --density/--gap/--mean/--finite-mean/--ft)")
    writer.write_json("theory.json", payload)
    if made_csv:
        print(f"wrote tables to {writer.out_dir}")
    return 0


def _numerical_density_transform(m: int, u: float, window: float = 400.0,
                                 step: float = 0.005) -> float:
    """Cosine transform of (smooth density - 1) over a finite window, plus
    the point mass and the delta-free limit terms; labeled numerical."""
    xs = np.arange(step, window, step)
    vals = one_level_density(m, xs).smooth - 1.0
    integrand = 2.0 * vals * np.cos(2.0 * np.pi * u * xs)
    return float(m + np.trapezoid(integrand, xs))


# ----------------------------------------------------------------- analyze

def _family_rows(ds):
    byfam: dict = {}
    for rec in ds.records:
        byfam.setdefault(rec.family_id, []).append(rec)
    return byfam


def _first_zero_values(records):
    vals = []
    for rec in records:
        z = ecdata.normalize_zeros(rec)
        if z:
            vals.append(z[0])
    return vals


def _summary_row(label, records):
    vals = _first_zero_values(records)
    logcs = [r.log_conductor for r in records]
    if not vals:
        return (label, "", "", "", _fmt(min(logcs)) if logcs else "",
                _fmt(max(logcs)) if logcs else "", len(records))
    s = stats.descriptive(vals)
    return (label, _fmt(s.median), _fmt(s.mean), _fmt(s.stdev),
            _fmt(min(logcs)), _fmt(max(logcs)), len(records))


def _cmd_analyze(args, writer: ArtifactWriter) -> int:
    ds = ecdata.parse_dataset(args.data, strict=not args.lenient)
    rng = _parse_range(args.logcond) if args.logcond else None
    filtered = ecdata.filter_partition(ds, log_cond_range=rng, rank=args.rank)
    if len(filtered) == 0:
        print("warning: no records match the filters", file=sys.stderr)
    distinct = ecdata.filter_partition(filtered, dedup=True)

    byfam = _family_rows(filtered)
    rows = [_summary_row(fam, recs) for fam, recs in sorted(byfam.items())]
    rows.append(_summary_row("All Curves", list(filtered.records)))
    rows.append(_summary_row("Distinct Curves", list(distinct.records)))
    writer.write_csv("family_summary.csv",
                     ("family", "median", "mean", "stdev",
                      "log_cond_min", "log_cond_max", "count"), rows)

    base = distinct if args.dedup else filtered
    diffs = []
    for rec in base.records:
        if len(rec.zeros) >= 3:
            diffs.append(stats.spacing_differences(
                rec.zeros, rec.log_conductor / (2.0 * math.pi)))
    sp_rows = []
    if diffs:
        arr = np.asarray(diffs)
        for i, label in enumerate(("z2-z1", "z3-z2", "z3-z1")):
            s = stats.descriptive(arr[:, i])
            sp_rows.append((label, _fmt(s.median), _fmt(s.mean), _fmt(s.stdev), s.n))
    writer.write_csv("spacings.csv", ("difference", "median", "mean", "stdev", "count"),
                     sp_rows)

    payload = {
        "config": _config_echo(args),
        "provenance": ds.provenance,
        "counts": {"filtered": len(filtered), "distinct": len(distinct)},
        "duplicates": {str(list(k)): v for k, v in
                       sorted(ecdata.duplicate_report(filtered).items())},
        "files": ["family_summary.csv", "spacings.csv"],
    }
    writer.write_json("analyze.json", payload)

    if args.format == "svg":
        from .plotting import histogram_figure, save_figure
        vals = _first_zero_values(base.records)
        if vals:
            counts, edges = np.histogram(vals, bins=args.bins,
                                         range=(0.0, max(3.0, max(vals))))
            fig = histogram_figure(edges, counts,
                                   title="first normalized zero above the central point",
                                   xlabel="normalized zero")
            save_figure(fig, writer.path("first_zero_hist.svg"))
    print(f"records: {len(filtered)} (distinct {len(distinct)}); "
          f"tables in {writer.out_dir}")
    return 0


# ------------------------------------------------------------------- ttest

def _parse_triple(text: str):
    try:
        n, mean, sd = text.split(",")
        return int(n), float(mean), float(sd)
    except ValueError as exc:
        raise CliError(f"bad summary triple {text!r}, expected n,mean,sd") from exc


def _read_column(spec_text: str):
    if ":" not in spec_text:
        raise CliError(f"bad column spec {spec_text!r}, expected FILE:COLUMN")
    path, col = spec_text.rsplit(":", 1)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or col not in reader.fieldnames:
            raise CliError(f"column {col!r} not found in {path}")
        vals = [float(row[col]) for row in reader if (row.get(col) or "").strip()]
    if not vals:
        raise CliError(f"column {col!r} of {path} is empty")
    return vals


def _cmd_ttest(args, writer: ArtifactWriter) -> int:
    two_sided = not args.one_sided
    if args.sign:
        n_minus, n = args.sign
        res = stats.sign_test(n_minus, n)
    elif args.summary:
        (n1, m1, s1), (n2, m2, s2) = (_parse_triple(t) for t in args.summary)
        fn = stats.pooled_t_summary if args.pooled else stats.unpooled_t_summary
        res = fn(n1, m1, s1, n2, m2, s2, two_sided)
    elif args.data:
        x1, x2 = (_read_column(t) for t in args.data)
        fn = stats.pooled_t if args.pooled else stats.unpooled_t
        res = fn(x1, x2, two_sided)
    else:
        raise CliError("ttest: provide --summary, --data, or --sign")
    payload = {"config": _config_echo(args),
               "statistic": res.statistic, "df": res.df,
               "p_value": res.p_value, "kind": res.kind,
               "two_sided": two_sided if res.kind != "sign" else False}
    print(json.dumps(payload, indent=1, sort_keys=True))
    writer.write_json("ttest.json", payload)
    return 0


# ---------------------------------------------------------------- explicit

def _cmd_explicit(args, writer: ArtifactWriter) -> int:
    tf = ecdata.fejer_pair(args.sigma)
    if args.data:
        ds = ecdata.parse_dataset(args.data)
        if not (0 <= args.row < len(ds)):
            raise CliError(f"row {args.row} out of range for {args.data}")
        rec = ds.records[args.row]
    elif args.curve:
        try:
            wa = tuple(int(v) for v in args.curve.split(","))
        except ValueError as exc:
            raise CliError("bad --curve, expected a1,a2,a3,a4,a6") from exc
        if len(wa) != 5:
            raise CliError("bad --curve, expected 5 integers")
        if args.log_conductor is not None:
            logc = args.log_conductor
        elif args.conductor is not None:
            if args.conductor <= 1:
                raise CliError("conductor must exceed 1")
            logc = math.log(args.conductor)
        else:
            raise CliError("explicit: need --conductor or --log-conductor")
        zeros = tuple(float(z) for z in args.zeros.split(",")) if args.zeros else ()
        rec = ecdata.CurveRecord(weierstrass=wa, log_conductor=logc,
                                 rank=args.rank, sign=1 if args.rank % 2 == 0 else -1,
                                 zeros=zeros, conductor=args.conductor)
        rec.validate()
    else:
        raise CliError("explicit: provide --curve or --data/--row")
    prime = ecdata.explicit_formula_prime_side(rec.weierstrass, rec.log_conductor,
                                               tf, args.cutoff)
    payload = {"config": _config_echo(args),
               "curve": list(rec.weierstrass),
               "log_conductor": rec.log_conductor,
               "test_function": tf.name,
               "prime_side": prime}
    if rec.zeros:
        payload["zero_side"] = ecdata.zero_side_sum(rec, tf)
    print(json.dumps(payload, indent=1, sort_keys=True))
    writer.write_json("explicit.json", payload)
    return 0


# -------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardedge", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory "
                        "(default: $HARDEDGE_OUTDIR or '.')")
    common.add_argument("--format", choices=("csv", "json", "svg"), default="csv",
                        help="svg additionally renders figures")

    p = sub.add_parser("simulate", parents=[common],
                       help="first normalized eigenangle statistics")
    p.add_argument("--model", choices=("haar", "independent", "interaction"),
                   default="haar")
    p.add_argument("--group", choices=("so",), default="so",
                   help="matrix group (special orthogonal)")
    p.add_argument("--size", type=int, default=0, help="matrix dimension (haar)")
    p.add_argument("--pairs", type=int, default=0,
                   help="eigenvalue pairs (independent: ambient count; "
                        "interaction: free count)")
    p.add_argument("--forced", type=int, default=0,
                   help="pinned pairs r of the block model")
    p.add_argument("--hardness", type=int, default=0,
                   help="hardness m of the conditioned model")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", default=str(DEFAULT_SEED))
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chains", type=int, default=64)
    p.add_argument("--burn-in", type=int, default=0, help="0 = default 1e4*pairs")
    p.add_argument("--thinning", type=int, default=0, help="0 = default 10*pairs")
    p.add_argument("--proposal-width", type=float, default=0.1)
    p.add_argument("--no-overlay", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("theory", parents=[common],
                       help="densities, gaps, means, transforms")
    p.add_argument("--m", type=int, default=0, help="edge hardness")
    p.add_argument("--density", action="store_true")
    p.add_argument("--kernel", action="store_true",
                   help="emit K(x, --at) over --grid")
    p.add_argument("--at", type=float, default=1.0,
                   help="second kernel argument for --kernel")
    p.add_argument("--grid", default="0.01:5:0.01", help="start:stop:step")
    p.add_argument("--gap", action="store_true")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--s-grid", default="0.1:4:0.1", help="start:stop:step")
    p.add_argument("--mean", action="store_true")
    p.add_argument("--finite-mean", action="store_true")
    p.add_argument("--n-size", type=int, default=20,
                   help="polynomial count of the finite kernel")
    p.add_argument("--jacobi-a", type=float, default=None)
    p.add_argument("--jacobi-b", type=float, default=None)
    p.add_argument("--ft", action="store_true",
                   help="transform of the one-level density at --u")
    p.add_argument("--u", type=float, default=0.0,
                   help="frequency for --ft")
    p.add_argument("--order", type=int, default=60, help="quadrature order")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("analyze", parents=[common],
                       help="summary/spacing tables for a zero dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--logcond", default=None, help="lo:hi, half-open")
    p.add_argument("--dedup", action="store_true",
                   help="drop repeated curves in the spacing tables")
    p.add_argument("--lenient", action="store_true",
                   help="skip malformed rows instead of aborting")
    p.add_argument("--bins", type=int, default=40)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("ttest", parents=[common],
                       help="two-sample t-procedures / sign test")
    p.add_argument("--summary", nargs=2, metavar="N,MEAN,SD",
                   help="two summary triples")
    p.add_argument("--data", nargs=2, metavar="FILE:COLUMN",
                   help="two CSV columns")
    p.add_argument("--sign", nargs=2, type=int, metavar=("N_MINUS", "N"),
                   help="exact binomial sign test")
    p.add_argument("--pooled", action="store_true")
    p.add_argument("--unpooled", action="store_true")
    p.add_argument("--one-sided", action="store_true")
    p.set_defaults(func=_cmd_ttest)

    p = sub.add_parser("explicit", parents=[common],
                       help="explicit-formula sums for one curve")
    p.add_argument("--curve", default=None, help="a1,a2,a3,a4,a6")
    p.add_argument("--conductor", type=int, default=None)
    p.add_argument("--log-conductor", type=float, default=None)
    p.add_argument("--rank", type=int, default=0)
    p.add_argument("--zeros", default=None, help="comma-separated ordinates")
    p.add_argument("--data", default=None, help="dataset to read the curve from")
    p.add_argument("--row", type=int, default=0)
    p.add_argument("--sigma", type=float, default=1.0,
                   help="support bound of the test-function transform")
    p.add_argument("--cutoff", type=int, default=10_000, help="prime cutoff")
    p.set_defaults(func=_cmd_explicit)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "pooled", False) and getattr(args, "unpooled", False):
        print("error: choose one of --pooled/--unpooled", file=sys.stderr)
        return 1
    out_dir = Path(args.out or os.environ.get("HARDEDGE_OUTDIR", "."))
    writer = ArtifactWriter(out_dir)
    try:
        return args.func(args, writer)
    except (CliError, ValueError, ArithmeticError, OSError,
            ecdata.ParseError) as exc:
        writer.cleanup()
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
