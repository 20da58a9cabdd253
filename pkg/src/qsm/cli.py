"""Command-line interface.

Exit codes: 0 success, 1 validation or acceptance failure, 2 usage error,
3 numerical failure (non-convergence, non-ergodic transfer matrix).
Any machine argument may be a file or a zoo shorthand like ``renewal{4}``.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import analysis, canonical, imps, io, machine as mach, oracle, qsim
from .errors import InputError, NonErgodic, NumericalError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
COMPARE_TOL = 1e-8
fmt = io.fmt


def _err(*args):
    print(*args, file=sys.stderr)


def _alphas(text: str):
    try:
        values = tuple(float(a) for a in text.split(",") if a.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None
    if any(a < 0 for a in values):
        raise argparse.ArgumentTypeError("alpha values must be non-negative")
    return values


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    m = io.load_machine(args.machine)
    report = mach.validate(m, args.tol)
    if report.ok:
        _err(f"{m.name or args.machine}: valid")
        return EXIT_OK
    for v in report.violations:
        _err(f"{m.name or args.machine}: {v}")
    return EXIT_FAIL


def cmd_analyze(args) -> int:
    m = io.load_machine(args.machine)
    try:
        rep = analysis.analyze(m, alphas=args.alpha, rank_cutoff=args.rank_cutoff, tol=args.tol)
    except NonErgodic:
        try:
            pi = mach.stationary_distribution(m)
            _err("classical memory: " + " ".join(f"C_mu^{a:g}={fmt(mach.classical_complexity(pi, a))}"
                                                   for a in args.alpha))
        except NumericalError:
            pass
        raise
    seconds = 0.0 if args.no_timing else rep.seconds
    if args.json:
        d = rep.to_dict()
        d["seconds"] = seconds
        print(json.dumps(d, indent=2))
    elif args.csv:
        header = ["name", "m", "rank", "gap", "ergodic", "eta"]
        header += [f"c_mu_{a:g}" for a in args.alpha] + [f"c_q_{a:g}" for a in args.alpha]
        header += ["schmidt", "seconds"]
        row = [rep.name, rep.m, rep.r, fmt(rep.gap), int(rep.ergodic), fmt(rep.eta)]
        row += [fmt(rep.c_mu[a]) for a in args.alpha] + [fmt(rep.c_q[a]) for a in args.alpha]
        row += [";".join(fmt(v) for v in rep.schmidt), fmt(seconds)]
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerow(row)
    else:
        print(f"name: {rep.name}")
        print(f"m: {rep.m}")
        print(f"rank: {rep.r}")
        print(f"gap: {fmt(rep.gap)}")
        print(f"ergodic: {str(rep.ergodic).lower()}")
        print(f"eta: {fmt(rep.eta)}")
        for a in args.alpha:
            print(f"c_mu[{a:g}]: {fmt(rep.c_mu[a])}")
        for a in args.alpha:
            print(f"c_q[{a:g}]: {fmt(rep.c_q[a])}")
        print("schmidt: " + " ".join(fmt(v) for v in rep.schmidt))
        print(f"seconds: {fmt(seconds)}")
    return EXIT_OK


def cmd_compare(args) -> int:
    m = io.load_machine(args.machine)
    res = analysis.run(m)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["word", "classical", "mps", "oracle", "abs_dev"])
    worst = 0.0
    for L in range(1, args.max_len + 1):
        exact = oracle.enumerate_words(m, res.pi, L)
        mps = imps.word_distribution_mps(res.site, res.fp, L)
        for i, word in enumerate(exact.words()):
            classical = mach.word_probability_classical(m, res.pi, word)
            dev = max(abs(classical - mps[i]), abs(classical - exact.probs[i]), abs(mps[i] - exact.probs[i]))
            worst = max(worst, dev)
            w.writerow([m.format_word(word), fmt(classical), fmt(mps[i]), fmt(exact.probs[i]), fmt(dev)])
    _err(f"max_abs_deviation: {fmt(worst)}")
    return EXIT_OK if worst <= COMPARE_TOL else EXIT_FAIL


def cmd_sample(args) -> int:
    m = io.load_machine(args.machine)
    mach.require_valid(m)
    if args.engine == "classical":
        pi = mach.stationary_distribution(m)
        symbols, _ = mach.sample_classical(m, pi, args.seed, args.steps)
    else:
        res = analysis.run(m)
        pi = res.pi
        sim = qsim.build_qsimulator(res.site, res.cf, pi)
        symbols = qsim.sample_quantum(sim, pi, args.seed, args.steps)
    sep = "" if all(len(a) == 1 for a in m.alphabet) else " "
    text = sep.join(m.alphabet[i] for i in symbols)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")
    if args.tv_len:
        exact = oracle.enumerate_words(m, pi, args.tv_len)
        tv = oracle.empirical_tv(symbols, exact, args.tv_len)
        _err(f"tv_L{args.tv_len}: {fmt(tv)}")
        if tv > args.tv_max:
            _err(f"tv exceeds {args.tv_max}")
            return EXIT_FAIL
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.family != "renewal":
        raise InputError(f"sweep supports only the renewal family, got {args.family!r}")
    if args.n_min < 2 or args.n_max < args.n_min:
        raise InputError("need 2 <= n-min <= n-max")
    rows = analysis.renewal_sweep(args.n_min, args.n_max, threads=args.threads)
    out = Path(args.out)
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(analysis.SWEEP_COLUMNS)
        for row in rows:
            N, m, r, gap, cm0, cm1, cq0, cq1, sec = row
            w.writerow([N, m, r, fmt(gap), fmt(cm0), fmt(cm1), fmt(cq0), fmt(cq1),
                        fmt(0.0 if args.no_timing else sec)])
    _err(f"wrote {len(rows)} rows to {out}")
    if not args.no_plot:
        from .plotting import plot_memory_sweep

        fig = Path(args.plot) if args.plot else out.with_suffix(".svg")
        plot_memory_sweep(rows, fig)
        _err(f"wrote figure {fig}")
    return EXIT_OK


def export_blocks(res: analysis.Analysis, what: str):
    labels = res.machine.alphabet
    if what == "canonical":
        cf = res.cf
        blocks = {"lambda": cf.lam}
        blocks.update({f"Gamma[{a}]": g for a, g in zip(labels, cf.Gamma)})
        blocks.update({"W_l": cf.W_l, "W_r": cf.W_r, "U": cf.U, "V": cf.V})
    else:
        sim = qsim.build_qsimulator(res.site, res.cf, res.pi)
        blocks = {"pi": res.pi, "sigma": sim.sigma}
        blocks.update({f"B[{a}]": b for a, b in zip(labels, sim.kraus)})
        blocks["phi"] = sim.phi
    meta = {"export": what, "machine": res.machine.name, "alphabet": ",".join(labels)}
    return blocks, meta


def cmd_export(args) -> int:
    m = io.load_machine(args.machine)
    res = analysis.run(m, rank_cutoff=args.rank_cutoff)
    blocks, meta = export_blocks(res, args.what)
    io.write_blocks(args.out, blocks, meta)
    _err(f"wrote {len(blocks)} blocks to {args.out}")
    return EXIT_OK


def cmd_truncate(args) -> int:
    m = io.load_machine(args.machine)
    res = analysis.run(m)
    _, report = canonical.truncate(res.cf, res.site, args.chi, args.report_len)
    _err(f"chi: {report.chi} rank: {report.rank} discarded_weight: {fmt(report.discarded_weight)}")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["L", "tv", "mass"])
    for L, tv, mass in report.rows():
        w.writerow([L, fmt(tv), fmt(mass)])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsm", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a machine file")
    s.add_argument("machine")
    s.add_argument("--tol", type=float, default=mach.DEFAULT_VALIDATION_TOL)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("analyze", help="classical and quantum memory")
    s.add_argument("machine")
    s.add_argument("--alpha", type=_alphas, default=canonical.ALPHA_GRID)
    fmt_group = s.add_mutually_exclusive_group()
    fmt_group.add_argument("--json", action="store_true")
    fmt_group.add_argument("--csv", action="store_true")
    s.add_argument("--rank-cutoff", type=float, default=canonical.RANK_CUTOFF)
    s.add_argument("--tol", type=float, default=1e-13)
    s.add_argument("--no-timing", action="store_true", help="report 0 seconds (byte-stable output)")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("compare", help="classical vs MPS vs enumeration word probabilities")
    s.add_argument("machine")
    s.add_argument("--max-len", type=int, required=True)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("sample", help="generate a trajectory")
    s.add_argument("machine")
    s.add_argument("--engine", choices=("classical", "quantum"), default="classical")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--tv-len", type=int, default=0)
    s.add_argument("--tv-max", type=float, default=0.01)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("sweep", help="renewal-family memory sweep")
    s.add_argument("--family", default="renewal")
    s.add_argument("--n-min", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--plot", help="figure path (default: CSV path with .svg suffix)")
    s.add_argument("--no-plot", action="store_true")
    s.add_argument("--threads", type=int, default=None, help="worker processes (default: QSM_THREADS / cpu count)")
    s.add_argument("--no-timing", action="store_true", help="write 0 in the seconds column")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("export", help="write canonical form or q-simulator matrices as CSV blocks")
    s.add_argument("machine")
    s.add_argument("--what", choices=("canonical", "qsim"), required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--rank-cutoff", type=float, default=canonical.RANK_CUTOFF)
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("truncate", help="bond-dimension truncation distortion")
    s.add_argument("machine")
    s.add_argument("--chi", type=int, required=True)
    s.add_argument("--report-len", type=int, default=6)
    s.set_defaults(func=cmd_truncate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    except NumericalError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_NUMERIC
    except InputError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_FAIL
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
