"""Command-line front end: every table is written as CSV.

Files go to ``--out`` (default: ``$NSFS_OUTPUT_DIR`` or the current
directory). Each CSV starts with ``# <comma-separated column names>``;
complex quantities occupy paired ``re``/``im`` columns.

Exit status: 0 on success, 2 on usage errors, 3 on numerical failures.
"""

import argparse
import csv
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import channels, fock, protocols, statistics, twomode, wigner
from .errors import NormalizationError, NumericalError, ParameterError

OUTPUT_ENV = "NSFS_OUTPUT_DIR"
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".15g")
    return str(v)


def write_csv(path: Path, columns, rows) -> Path:
    """Write ``rows`` under a ``# col1,col2,...`` header."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write("# " + ",".join(columns) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def sample_range(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid ``lo, lo + step, ...`` up to ``hi``; empty grids are usage errors."""
    if step <= 0:
        raise UsageError("step must be positive")
    if hi < lo or step > hi - lo:
        raise UsageError(f"empty grid: step {step} exceeds range [{lo}, {hi}]")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


def _alpha(args):
    return complex(args.alpha, getattr(args, "alpha_im", 0.0))


def _tag(value):
    return _fmt(value).replace("-", "m").replace(".", "p")


def _state_rows(s):
    return [(n, a.real, a.imag) for n, a in enumerate(s.amplitudes)]


def _nsfs_or_usage(alpha, m, cutoff=None):
    try:
        return fock.make_nsfs(alpha, m, cutoff)
    except NormalizationError as exc:
        raise UsageError(f"degenerate filtered state: {exc}") from exc


def _or_nan(fn, *a):
    try:
        return fn(*a)
    except NumericalError:
        return math.nan


def cmd_stats(args, out):
    m = args.m
    grid = sample_range(args.alpha_min, args.alpha_max, args.step)
    q_rows, split_rows = [], []
    for a in grid:
        try:
            q = statistics.mandel_q_nsfs(a, m)
        except NormalizationError:
            q = math.nan
        q_u = _or_nan(statistics.mandel_q_utcs, a, m - 1) if m >= 1 else math.nan
        q_l = _or_nan(statistics.mandel_q_ltcs, a, m)
        q_rows.append((a, q, q_u, q_l))
        split = statistics.truncation_split(a, m)
        split_rows.append((a, abs(split.c_upper) ** 2, abs(split.c_lower) ** 2))
    paths = [
        write_csv(out / f"stats_q_m{m}.csv", ["alpha", "Q_nsfs", "Q_utcs", "Q_ltcs"], q_rows),
        write_csv(out / f"stats_split_m{m}.csv", ["alpha", "Cu2", "Cl2"], split_rows),
    ]
    phase_rows = []
    for mm in range(0, args.m_max + 1):
        s = fock.make_nsfs(args.phase_alpha, mm)
        phase_rows.append((mm, statistics.phase_sensitivity(s, args.theta), statistics.mandel_q(s)))
    paths.append(write_csv(out / f"stats_phase_a{_tag(args.phase_alpha)}.csv",
                           ["m", "dtheta", "Q"], phase_rows))
    return paths


def cmd_wigner(args, out):
    alpha = _alpha(args)
    s = _nsfs_or_usage(alpha, args.m)
    half = args.half_width or wigner.default_half_width(alpha, args.m)
    g = wigner.wigner_grid(s, half, args.step)
    rep = wigner.negativity_volume(g, max_refinements=args.refine)
    print(f"negative_volume={_fmt(rep.negative_volume)} grid_step={_fmt(rep.grid_step)} "
          f"converged={int(rep.converged)} integral={_fmt(g.integral())}")
    name = f"wigner_a{_tag(alpha.real)}_{_tag(alpha.imag)}_m{args.m}.csv"
    return [write_csv(out / name, ["re_beta", "im_beta", "W"], g.rows())]


def negativity_sweep(m, alphas, step=0.05, refine=0):
    """Rows ``(alpha, negative volume, final step, converged)`` for ``psi(alpha, m)``."""
    rows = []
    for a in alphas:
        s = fock.make_nsfs(a, m)
        g = wigner.wigner_grid(s, wigner.default_half_width(a, m), step)
        rep = wigner.negativity_volume(g, max_refinements=refine)
        rows.append((a, rep.negative_volume, rep.grid_step, rep.converged))
    return rows


def cmd_wigner_negativity(args, out):
    alphas = sample_range(args.alpha_min, args.alpha_max, args.alpha_step)
    if args.m == 0 and alphas[0] == 0.0:
        raise UsageError("vacuum-filtered state is degenerate at alpha = 0")
    rows = negativity_sweep(args.m, alphas, args.step, args.refine)
    return [write_csv(out / f"negativity_m{args.m}.csv",
                      ["alpha", "negative_volume", "grid_step", "converged"], rows)]


def entanglement_sweep(alpha, beta, m_values, theta=math.pi / 4):
    """Rows ``(m, L_A)`` for ``psi(alpha, m)`` mixed with ``|beta>``."""
    rows = []
    coh = fock.make_coherent(beta)
    for m in m_values:
        s = fock.make_nsfs(alpha, m)
        cut = max(s.cutoff, coh.cutoff)
        t = twomode.beam_split(s.resize(cut), coh.resize(cut), twomode.BeamSplitterParams(theta))
        rows.append((m, twomode.linear_entropy(twomode.reduce(t, "A"))))
    return rows


def cmd_entangle(args, out):
    if args.m_max < args.m_min:
        raise UsageError("empty m range")
    alpha, beta = _alpha(args), complex(args.beta, args.beta_im)
    for m in range(args.m_min, args.m_max + 1):
        _nsfs_or_usage(alpha, m)
    rows = entanglement_sweep(alpha, beta, range(args.m_min, args.m_max + 1), args.theta)
    return [write_csv(out / f"entangle_a{_tag(abs(alpha))}_b{_tag(abs(beta))}.csv",
                      ["m", "L_A"], rows)]


def damping_table(alpha, gamma, times):
    """Closed forms plus both numeric conventions for every family."""
    states = {f: channels.family_state(f, alpha) for f in channels.FAMILIES}
    columns = ["t"]
    for kind in ("closed", "unrenormalized", "renormalized"):
        columns += [f"F_{f}_{kind}" for f in channels.FAMILIES]
    rows = []
    for t in times:
        p = channels.DampingParams(gamma, float(t))
        row = [t]
        row += [channels.fidelity_closed_form(f, alpha, p) for f in channels.FAMILIES]
        for conv in ("unrenormalized", "renormalized"):
            row += [channels.fidelity_numeric(states[f], p, conv) for f in channels.FAMILIES]
        rows.append(row)
    return columns, rows


def cmd_damping(args, out):
    alpha = _alpha(args)
    if alpha == 0:
        raise UsageError("damping families need alpha != 0")
    times = sample_range(0.0, args.t_max, args.t_step)
    columns, rows = damping_table(alpha, args.gamma, times)
    return [write_csv(out / f"damping_a{_tag(abs(alpha))}_g{_tag(args.gamma)}.csv", columns, rows)]


def cmd_qkd(args, out):
    if not 0.0 <= args.cos2theta <= 1.0:
        raise UsageError("cos2theta must lie in [0, 1]")
    theta = math.acos(math.sqrt(args.cos2theta))
    alphas = sample_range(args.alpha_min, args.alpha_max, args.alpha_step)
    if alphas[0] <= 0:
        raise UsageError("alpha grid must be positive")
    keys = ["P_B", "P_E", "Pt_B", "Pt_E", "R_spacs", "R_nsfs"]
    rows = []
    for a in alphas:
        cf = twomode.qkd_closed_forms(a, theta)
        row = [a] + [cf[k] for k in keys]
        if args.numeric:
            nu = twomode.qkd_numeric(a, theta)
            row += [nu[k] for k in keys]
        rows.append(row)
    columns = ["alpha"] + keys + ([f"{k}_numeric" for k in keys] if args.numeric else [])
    return [write_csv(out / f"qkd_c{_tag(args.cos2theta)}.csv", columns, rows)]


def _load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    allowed = {"m", "g", "phi", "t1", "lam", "chi", "t2"}
    extra = set(data) - allowed
    if extra:
        raise UsageError(f"unknown config keys: {sorted(extra)}")
    return protocols.GenerationConfig(**data)


def cmd_generate(args, out):
    if args.config:
        cfg = _load_config(args.config)
    else:
        if args.alpha is None or args.m is None:
            raise UsageError("give --config or both --alpha and --m")
        alpha = complex(args.alpha, args.alpha_im)
        _nsfs_or_usage(alpha, args.m)
        cfg = protocols.solve_generation_config(alpha, args.m, args.g, args.chi, args.convention)
    trace = []
    psi, prob = protocols.generate_nsfs(cfg, convention=args.convention, trace=trace)
    alpha_out = complex(cfg.displacement)
    target = _nsfs_or_usage(alpha_out, cfg.m, psi.cutoff)
    fid = fock.fidelity(psi, target)
    print(json.dumps({"config": {k: getattr(cfg, k) for k in ("m", "g", "phi", "t1", "lam", "chi", "t2")},
                      "alpha": [alpha_out.real, alpha_out.imag]}, sort_keys=True))
    print(f"fidelity={_fmt(fid)} probability={_fmt(prob)}")
    return [
        write_csv(out / f"generate_m{cfg.m}_trace.csv", ["stage", "level", "norm"], trace),
        write_csv(out / f"generate_m{cfg.m}_state.csv", ["n", "re", "im"], _state_rows(psi)),
    ]


def cmd_cat(args, out):
    alpha = _alpha(args)
    _nsfs_or_usage(alpha, args.m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = protocols.cat_protocol(alpha, args.m, args.select)
    line = f"probability={_fmt(res.probability)} is_cat={int(res.is_cat)}"
    if res.is_cat:
        make = fock.make_odd_cat if args.m % 2 == 0 else fock.make_even_cat
        line = f"fidelity={_fmt(fock.fidelity(res.state, make(alpha, res.state.cutoff)))} " + line
    else:
        print("warning: parity pairing does not yield a cat state", file=sys.stderr)
    print(line)
    return [write_csv(out / f"cat_m{args.m}_{args.select}.csv", ["n", "re", "im"],
                      _state_rows(res.state))]


def cmd_overlap(args, out):
    alphas = sample_range(args.alpha_min, args.alpha_max, args.step)
    if alphas[0] <= 0:
        raise UsageError("alpha grid must be positive")
    rows = []
    for a in alphas:
        nsfs0 = fock.make_nsfs(a, 0)
        spacs = fock.make_pacs(a, 1)
        cut = max(nsfs0.cutoff, spacs.cutoff)
        num = fock.fidelity(spacs.resize(cut), nsfs0.resize(cut))
        rows.append((a, statistics.spacs_overlap_closed_form(a), num))
    return [write_csv(out / "overlap_spacs_nsfs0.csv", ["alpha", "closed_form", "numeric"], rows)]


def cmd_position(args, out):
    alpha = _alpha(args)
    xs = sample_range(-args.x_max, args.x_max, args.x_step)
    columns, rows = ["x"], [[x] for x in xs]
    for m in args.m:
        dens = statistics.position_density(_nsfs_or_usage(alpha, m), xs)
        columns.append(f"density_m{m}")
        for row, d in zip(rows, dens):
            row.append(d)
    coh = statistics.position_density(fock.make_coherent(alpha), xs)
    columns.append("density_coherent")
    for row, d in zip(rows, coh):
        row.append(d)
    return [write_csv(out / f"position_a{_tag(alpha.real)}_{_tag(alpha.imag)}.csv", columns, rows)]


_FAMILY_SPECS = {
    "coherent": lambda a, n: fock.Coherent(a),
    "number": lambda a, n: fock.Number(n),
    "nsfs": lambda a, n: fock.NSFS(a, n),
    "utcs": lambda a, n: fock.UTCS(a, n),
    "ltcs": lambda a, n: fock.LTCS(a, n),
    "pacs": lambda a, n: fock.PACS(a, n),
    "even-cat": lambda a, n: fock.EvenCat(a),
    "odd-cat": lambda a, n: fock.OddCat(a),
}


def cmd_state(args, out):
    alpha = _alpha(args)
    spec = _FAMILY_SPECS[args.family](alpha, args.n)
    try:
        s = fock.make_state(spec, args.cutoff)
    except NormalizationError as exc:
        raise UsageError(f"degenerate state: {exc}") from exc
    st = statistics.photon_stats(s) if s.probabilities()[1:].any() else None
    if st is not None:
        print(f"mean={_fmt(st.mean)} mandel_q={_fmt(st.mandel_q)} cutoff={s.cutoff}")
    name = f"state_{args.family}_a{_tag(alpha.real)}_{_tag(alpha.imag)}_n{args.n}.csv"
    return [write_csv(out / name, ["n", "re", "im"], _state_rows(s))]


def _add_alpha(p, default=None, required=False):
    p.add_argument("--alpha", type=float, default=default, required=required,
                   help="real part of the coherent amplitude")
    p.add_argument("--alpha-im", type=float, default=0.0, help="imaginary part")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsfs", description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=None,
                        help=f"output directory (default ${OUTPUT_ENV} or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="Q, truncation weights and phase sensitivity tables")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha-min", type=float, default=0.25)
    p.add_argument("--alpha-max", type=float, default=6.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--phase-alpha", type=float, default=3.0)
    p.add_argument("--m-max", type=int, default=25)
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("wigner", help="Wigner grid of a filtered state")
    _add_alpha(p, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--half-width", type=float, default=None)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--refine", type=int, default=1, help="step-halving budget")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("wigner-negativity", help="negative Wigner volume versus alpha")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha-min", type=float, default=0.5)
    p.add_argument("--alpha-max", type=float, default=4.0)
    p.add_argument("--alpha-step", type=float, default=0.05)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--refine", type=int, default=0)
    p.set_defaults(func=cmd_wigner_negativity)

    p = sub.add_parser("entangle", help="linear entropy after a beam splitter versus m")
    _add_alpha(p, default=3.0)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--beta-im", type=float, default=0.0)
    p.add_argument("--m-min", type=int, default=1)
    p.add_argument("--m-max", type=int, default=25)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("damping", help="fidelity under amplitude damping")
    _add_alpha(p, default=1.0)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=400.0)
    p.add_argument("--t-step", type=float, default=5.0)
    p.set_defaults(func=cmd_damping)

    p = sub.add_parser("qkd", help="detection probabilities and ratios")
    p.add_argument("--cos2theta", type=float, default=0.9)
    p.add_argument("--alpha-min", type=float, default=0.05)
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--alpha-step", type=float, default=0.05)
    p.add_argument("--numeric", action="store_true", help="add beam-split numeric columns")
    p.set_defaults(func=cmd_qkd)

    p = sub.add_parser("generate", help="atom-cavity preparation of a filtered state")
    p.add_argument("--config", type=Path, default=None, help="JSON with m, g, phi, t1, lam, chi, t2")
    _add_alpha(p)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--convention", choices=("printed", "exact"), default="printed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cat", help="cat state from a filtered state")
    _add_alpha(p, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--select", choices=("e", "g"), required=True)
    p.set_defaults(func=cmd_cat)

    p = sub.add_parser("overlap", help="overlap of the vacuum-filtered state with SPACS")
    p.add_argument("--alpha-min", type=float, default=0.05)
    p.add_argument("--alpha-max", type=float, default=5.0)
    p.add_argument("--step", type=float, default=0.05)
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("position", help="position-space densities")
    _add_alpha(p, default=2.0)
    p.add_argument("--m", type=int, nargs="+", default=[0, 2, 4])
    p.add_argument("--x-max", type=float, default=6.0)
    p.add_argument("--x-step", type=float, default=0.02)
    p.set_defaults(func=cmd_position)

    p = sub.add_parser("state", help="Fock amplitudes of a state family")
    p.add_argument("--family", choices=sorted(_FAMILY_SPECS), required=True)
    _add_alpha(p, default=0.0)
    p.add_argument("--n", type=int, default=0, help="m, N or k as the family requires")
    p.add_argument("--cutoff", type=int, default=None)
    p.set_defaults(func=cmd_state)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = args.out or Path(os.environ.get(OUTPUT_ENV, "."))
    try:
        paths = args.func(args, out)
    except (UsageError, ParameterError) as exc:
        print(f"nsfs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"nsfs {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
