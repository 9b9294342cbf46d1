"""Command-line experiment runner.

Subcommands: ptf, ssf, pushnitski, witten, dirac.  Each validates its
configuration, runs the experiment, writes CSV tables and a JSON report
under the output directory (plus PNG figures when plots are enabled) and
exits 0 on pass, 1 on a usage or configuration error, 2 when a configured
tolerance fails.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import dirac as dirac_mod
from . import models, ptf, ssf, suspension, transforms, witten
from .config import ExperimentConfig, load_config
from .errors import SsflabError
from .report import Report, Timer, write_report

EXIT_PASS = 0
EXIT_CONFIG = 1
EXIT_TOLERANCE = 2


def _assemble_pair(cfg: ExperimentConfig):
    return suspension.assemble(cfg.grid(), cfg.path())


def cmd_ptf(cfg: ExperimentConfig) -> Report:
    report = Report(command="ptf", config=cfg.echo())
    timer = Timer()
    with timer.measure("assemble"):
        pair = _assemble_pair(cfg)
    with timer.measure("verify"):
        result = ptf.verify(
            pair, cfg.t_grid, nodes=cfg.s_nodes, refine=True, threads=cfg.threads
        )
    report.add_table(
        "trace_formula",
        ("t", "lhs", "rhs_quad", "rhs_erf", "residual_lr", "residual_quad"),
        result.rows(),
    )
    if result.refined is not None:
        report.add_table(
            "refinement",
            ("t", "points", "residual_lr", "improvement"),
            [
                (float(t), int(result.refined["points"]), float(r), float(g))
                for t, r, g in zip(
                    result.t_values,
                    result.refined["residual_lr"],
                    result.refined["improvement"],
                )
            ],
        )
    tol = cfg.tolerances
    report.add_check(
        "quadrature_matches_erf",
        bool(np.all(result.residual_quad <= tol["quadrature"])),
        f"max residual {result.residual_quad.max():.3e} vs {tol['quadrature']:.1e}",
    )
    report.add_check(
        "trace_formula_residual",
        bool(np.all(result.residual_lr <= tol["ptf_residual"])),
        f"max residual {result.residual_lr.max():.3e} vs {tol['ptf_residual']:.1e}",
    )
    report.timings = timer.durations
    return report


def cmd_ssf(cfg: ExperimentConfig) -> Report:
    from .scalarfn import krein_catalog

    report = Report(command="ssf", config=cfg.echo())
    timer = Timer()
    path = cfg.path()
    with timer.measure("shift_function"):
        xi = ssf.ssf_pair(path.a_plus, path.a_minus)
    report.add_table("shift_function", ("breakpoint", "value_right"), xi.to_rows())

    with timer.measure("krein"):
        rows = []
        worst = 0.0
        for f in krein_catalog():
            lhs, rhs, res = ssf.krein_check(path.a_plus, path.a_minus, f)
            worst = max(worst, res)
            rows.append((f.label, float(lhs), float(rhs), float(res)))
    report.add_table("krein", ("f", "lhs", "rhs", "residual"), rows)

    with timer.measure("cutoff"):
        levels = (
            np.asarray(cfg.cutoff_levels)
            if cfg.cutoff_levels
            else models.cutoff_levels(path.a_minus)
        )
        _, _, gaps = ssf.ssf_cutoff_limit(
            path.a_minus, path.b_plus, levels, p=cfg.ssf_weight_p
        )
    report.add_table(
        "cutoff_gaps",
        ("level", "weighted_l1_gap"),
        [(float(l), float(g)) for l, g in zip(levels, gaps)],
    )

    tol = cfg.tolerances
    report.add_check(
        "krein_residual", worst <= tol["krein_residual"],
        f"max residual {worst:.3e} vs {tol['krein_residual']:.1e}",
    )
    report.add_check(
        "cutoff_gap_final", float(gaps[-1]) <= tol["cutoff_gap_final"],
        f"final gap {gaps[-1]:.3e} vs {tol['cutoff_gap_final']:.1e}",
    )
    nonincreasing = len(gaps) < 2 or gaps[-1] <= gaps[-2] + 1e-15
    report.add_check("cutoff_gap_nonincreasing", nonincreasing, "last two levels")
    report.timings = timer.durations
    return report


def cmd_pushnitski(cfg: ExperimentConfig) -> Report:
    report = Report(command="pushnitski", config=cfg.echo())
    timer = Timer()
    path = cfg.path()
    with timer.measure("assemble"):
        pair = _assemble_pair(cfg)
    xi_small = ssf.ssf_pair(path.a_plus, path.a_minus)
    with timer.measure("abel"):
        push = transforms.pushnitski_verify(pair, xi_small, cfg.lambda_grid)
    report.add_table(
        "abel",
        ("lambda", "windowed_xi", "abel_prediction", "residual", "window_halfwidth"),
        [
            (float(l), float(a), float(p), float(r), float(w))
            for l, a, p, r, w in zip(
                push.lambda_grid, push.averaged, push.predicted,
                push.residuals, push.window_halfwidths,
            )
        ],
    )
    with timer.measure("laplace"):
        lap = transforms.laplace_consistency(pair, xi_small, cfg.t_grid)
    report.add_table(
        "laplace",
        ("t", "discrete", "continuum", "residual"),
        [
            (float(t), float(d), float(c), float(r))
            for t, d, c, r in zip(lap.t_grid, lap.discrete, lap.continuum, lap.residuals)
        ],
    )
    tol = cfg.tolerances
    report.add_check(
        "abel_residual", bool(np.all(push.residuals <= tol["pushnitski_residual"])),
        f"max residual {push.residuals.max():.3e} vs {tol['pushnitski_residual']:.1e}",
    )
    report.add_check(
        "laplace_residual", bool(np.all(lap.residuals <= tol["laplace_residual"])),
        f"max residual {lap.residuals.max():.3e} vs {tol['laplace_residual']:.1e}",
    )
    report.timings = timer.durations
    return report


def cmd_witten(cfg: ExperimentConfig) -> Report:
    report = Report(command="witten", config=cfg.echo())
    timer = Timer()
    path = cfg.path()
    with timer.measure("index_report"):
        idx = witten.index_report(
            path,
            grid=cfg.grid(),
            lambda_grid=cfg.resolvent_lambda_grid,
            chain_tol=cfg.tolerances["chain"],
        )
    rows = [(name, float(value)) for name, value in idx.chain_values()]
    report.add_table("summary", ("quantity", "value"), rows)
    report.add_table("semigroup_trace", ("t", "value"), list(idx.w_s.trace))
    res_rows = []
    for k, res in sorted(idx.w_kr.items()):
        res_rows.extend((int(k), float(lam), float(v)) for lam, v in res.trace)
    report.add_table("resolvent_trace", ("k", "lambda", "value"), res_rows)

    values = [v for _, v in idx.chain_values()]
    spread = max(values) - min(values)
    tol = cfg.tolerances["chain"] if idx.gapped_endpoints else 5e-2
    report.add_check(
        "index_chain",
        spread <= tol,
        f"spread {spread:.3e} vs {tol:.1e}"
        + ("" if idx.gapped_endpoints else " (singular endpoint)"),
    )
    if not idx.w_s.converged:
        report.add_check("semigroup_converged", False, "tail not monotone")
    if idx.notes:
        report.add_table("notes", ("note",), [(n,) for n in idx.notes])
    report.timings = timer.durations
    return report


def cmd_dirac(cfg: ExperimentConfig) -> Report:
    report = Report(command="dirac", config=cfg.echo())
    timer = Timer()
    dc = cfg.dirac
    cl = dirac_mod.clifford(int(dc["d"]))
    defect = _clifford_defect(cl)
    report.add_table(
        "clifford", ("d", "size", "relation_defect"), [(cl.d, cl.size, float(defect))]
    )

    potential = dirac_mod.make_potential(
        str(dc.get("potential", "none")), cl, **dc.get("potential_params", {})
    )
    with timer.measure("assemble"):
        model = dirac_mod.build_dirac(
            int(dc["d"]), float(dc["m"]), float(dc["box"]), int(dc["modes"]),
            potential=potential,
        )
    assembled = model.D.eigenvalues
    symbol = model.symbol_spectrum()
    spec_err = float(np.abs(assembled - symbol).max())
    report.add_table(
        "spectrum",
        ("index", "assembled", "symbol", "abs_error"),
        [
            (int(i), float(a), float(s), float(abs(a - s)))
            for i, (a, s) in enumerate(zip(assembled, symbol))
        ],
    )
    report.add_check("clifford_relations_exact", defect == 0.0, f"defect {defect:.1e}")
    report.add_check("free_spectrum_matches_symbol", spec_err <= 1e-10, f"max error {spec_err:.3e}")

    if model.V is not None:
        with timer.measure("diagnostics"):
            diag = dirac_mod.hypothesis_diagnostics(model, int(dc.get("p", dc["d"])))
        rows = []
        for j, c, f, r in zip(
            diag.schatten_orders, diag.schatten_coarse, diag.schatten_fine, diag.schatten_ratio
        ):
            rows.append(("schatten", int(j), float(c), float(f), float(r)))
        for k, c, f, r in zip(
            diag.commutator_orders, diag.commutator_coarse,
            diag.commutator_fine, diag.commutator_ratio,
        ):
            rows.append(("commutator", int(k), float(c), float(f), float(r)))
        report.add_table("diagnostics", ("kind", "order", "coarse", "fine", "ratio"), rows)
        stable = diag.schatten_stable() and diag.commutator_stable()
        if str(dc.get("potential")) == "sharp-box":
            growth = float(np.max(diag.commutator_ratio))
            report.add_check(
                "negative_control_flagged", growth >= 2.0,
                f"max commutator growth {growth:.2f}x under refinement",
            )
        else:
            report.add_check(
                "hypothesis_stable", stable,
                f"ratios within [{dirac_mod.STABLE_RATIO[0]}, {dirac_mod.STABLE_RATIO[1]}]",
            )
    report.timings = timer.durations
    return report


def _clifford_defect(cl) -> float:
    worst = 0.0
    eye = np.eye(cl.size)
    for i, g in enumerate(cl.gammas):
        worst = max(worst, float(np.abs(g @ g - eye).max()))
        worst = max(worst, float(np.abs(g - g.conj().T).max()))
        for h in cl.gammas[i + 1 :]:
            worst = max(worst, float(np.abs(g @ h + h @ g).max()))
    return worst


COMMANDS = {
    "ptf": cmd_ptf,
    "ssf": cmd_ssf,
    "pushnitski": cmd_pushnitski,
    "witten": cmd_witten,
    "dirac": cmd_dirac,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssflab",
        description="Trace-formula and Witten-index experiments on matrix models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ptf", "verify the principal trace formula on a suspension pair"),
        ("ssf", "spectral shift function, Krein residuals and the cutoff limit"),
        ("pushnitski", "Abel-transform relation between the two shift functions"),
        ("witten", "Witten index regularisations and the equality chain"),
        ("dirac", "Dirac operator assembly and hypothesis diagnostics"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="JSON configuration document")
        p.add_argument("--out", metavar="PATH", help="output directory (default: config output.path)")
        p.add_argument("--format", choices=("csv", "json"), help="table serialisation (default csv)")
        p.add_argument("--seed", type=int, help="seed recorded in the report (default 1234)")
        p.add_argument("--threads", type=int, help="worker threads for independent sweeps")
        p.add_argument("--plots", action="store_true", help="render PNG figures next to the tables")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {"seed": args.seed, "threads": args.threads}
        cfg = load_config(args.config, overrides)
        if args.out is not None:
            cfg.out_path = args.out
        if args.format is not None:
            cfg.out_format = args.format
        if args.plots:
            cfg.plots = True
        report = COMMANDS[args.command](cfg)
    except SsflabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    json_path = write_report(report, cfg.out_path, cfg.out_format)
    rendered = []
    if cfg.plots:
        from . import plots

        rendered = plots.render(report, cfg.out_path)
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.detail}")
    print(f"report: {json_path}")
    for fig in rendered:
        print(f"figure: {fig}")
    return EXIT_PASS if report.passed else EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
