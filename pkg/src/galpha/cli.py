"""Command-line front end: integration runs, stability maps, curves, order checks.

Four subcommands, each writing CSV artifacts plus a ``manifest.txt`` that
captures the fully resolved configuration as sorted ``key = value`` lines, so
a run can be reproduced byte-for-byte from its output directory alone:

* ``integrate``      -- march one problem, write ``trajectory.csv``
* ``stability-map``  -- scan the parameter plane, write ``stability.csv``
                        and a gnuplot script ``stability.plot``
* ``rho-curve``      -- tabulate the four design branches, write
                        ``rho_curves.csv``
* ``order-check``    -- measure the convergence slope, write
                        ``convergence.csv``; optionally re-derive the closure
                        constant

Exit codes: 0 success, 2 configuration problem, 3 numerical failure.  Errors
are reported as one JSON line on standard error.  Long options only; complex
lambda is written ``--lambda RE[,IM]``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GalphaError, PoleAtRho
from .integrator import heat_problem, integrate, scalar_problem, write_trajectory_csv
from .orderlab import measure_order, recover_C, write_convergence_csv
from .schemes import (
    RhoBranch,
    SchemeParams,
    Variant,
    c_of_p,
    in_stability_region,
    make_scheme,
    params_from_rho,
)
from .stability import (
    GridSpec,
    default_t_samples,
    rho_curve,
    scan_region,
    verify_rho_control,
    write_stability_csv,
)

__all__ = ["main", "RunConfig"]


class ConfigError(Exception):
    """Invalid or inconsistent command-line configuration (exit code 2)."""


@dataclass
class RunConfig:
    """Everything a subcommand handler needs, fully resolved."""

    subcommand: str
    out: Path
    params: SchemeParams | None = None
    rho_inf: float | None = None
    branch: RhoBranch | None = None
    lam: complex | None = None
    heat_n: int | None = None
    kappa: float | None = None
    tau: float | None = None
    t_end: float | None = None
    grid: GridSpec | None = None
    variant: Variant | None = None
    t_sample_spec: tuple[int, float, float] | None = None
    n_rho: int | None = None
    tau_start: float | None = None
    n_halvings: int | None = None
    recover_c: bool = False
    manifest: dict = field(default_factory=dict)


def _parse_lambda(text: str) -> complex:
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")
    try:
        re = float(parts[0])
        im = float(parts[1]) if len(parts) == 2 else 0.0
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}") from None
    return complex(re, im)


def _add_scheme_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p", type=int, default=3, help="scheme order (default 3)")
    sub.add_argument(
        "--variant",
        choices=[v.value for v in Variant],
        default=Variant.EQUAL_GAMMA.value,
        help="gamma closure rule",
    )
    sub.add_argument("--alpha-m", type=float, default=None)
    sub.add_argument("--alpha-f", type=float, default=None)
    sub.add_argument("--rho-inf", type=float, default=None, help="stiff-limit eigenvalue modulus")
    sub.add_argument(
        "--branch",
        choices=[b.value for b in RhoBranch],
        default=RhoBranch.MAIN.value,
        help="design branch used with --rho-inf",
    )


def _resolve_scheme(args) -> tuple[SchemeParams, float | None, RhoBranch]:
    """Apply the either/or rule for (alpha_m, alpha_f) vs (rho_inf, branch)."""
    branch = RhoBranch(args.branch)
    has_alpha = args.alpha_m is not None or args.alpha_f is not None
    has_rho = args.rho_inf is not None
    if has_alpha and has_rho:
        raise ConfigError("give --alpha-m/--alpha-f or --rho-inf/--branch, not both")
    if has_alpha and (args.alpha_m is None or args.alpha_f is None):
        raise ConfigError("--alpha-m and --alpha-f must be given together")

    rho: float | None = None
    if has_alpha:
        am, af = args.alpha_m, args.alpha_f
    elif has_rho:
        rho = args.rho_inf
        try:
            am, af = params_from_rho(rho, branch)
        except (PoleAtRho, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
    elif args.p == 3:
        rho = 0.5
        am, af = params_from_rho(rho, branch)
    else:
        am, af = 1.0, 0.75

    try:
        params = make_scheme(args.p, am, af, Variant(args.variant))
    except GalphaError as exc:
        raise ConfigError(str(exc)) from exc
    return params, rho, branch


def _prepare_out(path_text: str) -> Path:
    out = Path(path_text)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}j" if value.imag else repr(value.real)
    return str(value)


def _write_manifest(config: RunConfig) -> None:
    entries = dict(config.manifest)
    entries["subcommand"] = config.subcommand
    entries["version"] = __version__
    lines = [f"{key} = {_fmt(entries[key])}" for key in sorted(entries)]
    (config.out / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _scheme_manifest(config: RunConfig) -> dict:
    p = config.params
    return {
        "p": p.p,
        "variant": p.variant.value,
        "alpha_m": p.alpha_m,
        "alpha_f": p.alpha_f,
        "gammas": ",".join(repr(g) for g in p.gammas),
        "rho_inf": "none" if config.rho_inf is None else repr(config.rho_inf),
        "branch": config.branch.value if config.rho_inf is not None else "none",
    }


def cmd_integrate(config: RunConfig) -> int:
    params = config.params
    if params.p == 3 and not in_stability_region(params.alpha_m, params.alpha_f):
        print(
            f"warning: (alpha_m={params.alpha_m:g}, alpha_f={params.alpha_f:g}) lies "
            "outside the unconditional-stability region; proceeding anyway",
            file=sys.stderr,
        )

    if config.heat_n is not None:
        problem = heat_problem(config.heat_n, config.kappa)
        x = np.arange(1, config.heat_n + 1) / (config.heat_n + 1)
        u0 = np.sin(np.pi * x)
    else:
        problem = scalar_problem(config.lam)
        u0 = 1.0

    trajectory = integrate(params, problem, u0, config.tau, config.t_end)
    write_trajectory_csv(trajectory, config.out / "trajectory.csv")
    print(f"wrote trajectory.csv ({len(trajectory)} rows)")
    if config.heat_n is None:
        exact = np.exp(-config.lam * config.t_end)
        final_error = abs(trajectory[-1][1][0] - exact)
        print(f"final error vs exact exponential: {final_error:.6e}")

    config.manifest.update(_scheme_manifest(config))
    config.manifest.update(tau=config.tau, t_end=config.t_end)
    if config.heat_n is not None:
        config.manifest.update(problem="heat", heat_n=config.heat_n, kappa=config.kappa)
    else:
        config.manifest.update(problem="scalar", **{"lambda": config.lam})
    _write_manifest(config)
    return 0


_PLOT_TEMPLATE = """\
# Render the stability map with gnuplot >= 5:  gnuplot stability.plot
set datafile separator ","
set terminal pngcairo size 900,900
set output "stability.png"
set xlabel "alpha_f"
set ylabel "alpha_m"
set xrange [{af_min}:{af_max}]
set yrange [{am_min}:{am_max}]
set cbrange [0:1]
set palette defined (0 "#f4f4f4", 1 "#3b6ea5")
unset colorbox
set title "Unconditionally stable cells ({variant})"
plot "stability.csv" skip 1 using 2:1:4 with image notitle
"""


def cmd_stability_map(config: RunConfig) -> int:
    n, lo, hi = config.t_sample_spec
    samples = default_t_samples(n, lo, hi)
    smap = scan_region(config.variant, config.grid, t_samples=samples)
    write_stability_csv(smap, config.out / "stability.csv")
    grid = config.grid
    script = _PLOT_TEMPLATE.format(
        af_min=grid.alpha_f_min,
        af_max=grid.alpha_f_max,
        am_min=grid.alpha_m_min,
        am_max=grid.alpha_m_max,
        variant=config.variant.value,
    )
    (config.out / "stability.plot").write_text(script, encoding="utf-8")
    stable = int(smap.stable.sum())
    total = smap.stable.size
    print(f"wrote stability.csv ({total} cells, {stable} stable) and stability.plot")

    config.manifest.update(
        variant=config.variant.value,
        grid_n_alpha_m=grid.n_alpha_m,
        grid_n_alpha_f=grid.n_alpha_f,
        alpha_m_min=grid.alpha_m_min,
        alpha_m_max=grid.alpha_m_max,
        alpha_f_min=grid.alpha_f_min,
        alpha_f_max=grid.alpha_f_max,
        t_samples=n,
        t_min=lo,
        t_max=hi,
    )
    _write_manifest(config)
    return 0


def cmd_rho_curve(config: RunConfig) -> int:
    path = config.out / "rho_curves.csv"
    worst_main = 0.0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("branch,rho,alpha_m,alpha_f,inside_region,max_eig_inf,pole\n")
        for branch in RhoBranch:
            for point in rho_curve(branch, config.n_rho):
                if point.pole:
                    fh.write(f"{branch.value},{point.rho:.17g},,,,,1\n")
                    continue
                max_eig = point.rho + verify_rho_control(point.rho, branch)
                if branch is RhoBranch.MAIN:
                    worst_main = max(worst_main, abs(max_eig - point.rho))
                inside = "true" if point.inside_region else "false"
                fh.write(
                    f"{branch.value},{point.rho:.17g},{point.alpha_m:.17g},"
                    f"{point.alpha_f:.17g},{inside},{max_eig:.17g},0\n"
                )
    print(f"wrote rho_curves.csv ({len(RhoBranch)} branches x {config.n_rho} samples)")
    print(f"main branch: worst |max_eig_inf - rho| = {worst_main:.3e}")

    config.manifest.update(n_rho=config.n_rho)
    _write_manifest(config)
    return 0


def cmd_order_check(config: RunConfig) -> int:
    taus = [config.tau_start / 2**k for k in range(config.n_halvings + 1)]
    report = measure_order(config.params, config.lam, config.t_end, taus)
    write_convergence_csv(report, config.out / "convergence.csv")
    print(f"fitted order slope: {report.slope:.4f}")

    if config.recover_c:
        p = config.params.p
        recovered = recover_C(p)
        tabulated = float(c_of_p(p))
        print(
            f"recovered closure constant C({p}) = {recovered:.12f} "
            f"(tabulated {tabulated:.12f}, |diff| = {abs(recovered - tabulated):.3e})"
        )
        config.manifest.update(recovered_c=recovered)

    config.manifest.update(_scheme_manifest(config))
    config.manifest.update(
        tau_start=config.tau_start,
        n_halvings=config.n_halvings,
        t_end=config.t_end,
        **{"lambda": config.lam},
    )
    _write_manifest(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="galpha",
        description="Generalized-alpha integrators: runs, stability maps, order checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("integrate", help="march one linear problem")
    _add_scheme_flags(sub)
    sub.add_argument("--lambda", dest="lam", type=_parse_lambda, default=complex(1.0))
    sub.add_argument("--heat-n", type=int, default=None, help="use the heat problem with N interior nodes")
    sub.add_argument("--kappa", type=float, default=1.0, help="heat diffusivity")
    sub.add_argument("--tau", type=float, default=0.1)
    sub.add_argument("--t-end", type=float, default=1.0)
    sub.add_argument("--out", default=".")
    sub.set_defaults(handler=cmd_integrate)

    sub = subs.add_parser("stability-map", help="scan the (alpha_m, alpha_f) plane")
    sub.add_argument(
        "--variant",
        choices=[v.value for v in Variant],
        default=Variant.EQUAL_GAMMA.value,
    )
    sub.add_argument("--grid-n", type=int, default=200, help="cells per axis")
    sub.add_argument("--alpha-min", type=float, default=0.0)
    sub.add_argument("--alpha-max", type=float, default=1.5)
    sub.add_argument("--t-samples", type=int, default=48, help="real T samples per cell")
    sub.add_argument("--t-min", type=float, default=1e-4)
    sub.add_argument("--t-max", type=float, default=1e8)
    sub.add_argument("--out", default=".")
    sub.set_defaults(handler=cmd_stability_map)

    sub = subs.add_parser("rho-curve", help="tabulate the stiff-limit design branches")
    sub.add_argument("--n-rho", type=int, default=101, help="samples per branch")
    sub.add_argument("--out", default=".")
    sub.set_defaults(handler=cmd_rho_curve)

    sub = subs.add_parser("order-check", help="measure the convergence order")
    _add_scheme_flags(sub)
    sub.add_argument("--lambda", dest="lam", type=_parse_lambda, default=complex(1.0))
    # Default t_end = 2: at lambda*t_end = 1 exactly, the leading final-time
    # error term of the equal-gamma family cancels and the fit reports the
    # superconvergent order p + 1 instead of p.
    sub.add_argument("--t-end", type=float, default=2.0)
    sub.add_argument("--tau-start", type=float, default=0.125)
    sub.add_argument("--n-halvings", type=int, default=5)
    sub.add_argument("--recover-c", action="store_true", help="re-derive the closure constant")
    sub.add_argument("--out", default=".")
    sub.set_defaults(handler=cmd_order_check)
    return parser


def _build_config(args) -> RunConfig:
    out = _prepare_out(args.out)
    config = RunConfig(subcommand=args.subcommand, out=out)

    if args.subcommand in ("integrate", "order-check"):
        config.params, config.rho_inf, config.branch = _resolve_scheme(args)
        config.lam = args.lam
        config.t_end = args.t_end
    if args.subcommand == "integrate":
        if args.tau <= 0:
            raise ConfigError(f"--tau must be positive, got {args.tau}")
        if args.t_end < args.tau:
            raise ConfigError("--t-end must cover at least one step")
        if args.heat_n is not None and args.heat_n < 2:
            raise ConfigError("--heat-n must be at least 2")
        config.tau, config.heat_n, config.kappa = args.tau, args.heat_n, args.kappa
    elif args.subcommand == "stability-map":
        if args.grid_n < 2:
            raise ConfigError("--grid-n must be at least 2")
        if not 0 < args.t_min < args.t_max:
            raise ConfigError("need 0 < --t-min < --t-max")
        if args.t_samples < 2:
            raise ConfigError("--t-samples must be at least 2")
        config.variant = Variant(args.variant)
        config.grid = GridSpec(
            alpha_m_min=args.alpha_min,
            alpha_m_max=args.alpha_max,
            n_alpha_m=args.grid_n,
            alpha_f_min=args.alpha_min,
            alpha_f_max=args.alpha_max,
            n_alpha_f=args.grid_n,
        )
        config.t_sample_spec = (args.t_samples, args.t_min, args.t_max)
    elif args.subcommand == "rho-curve":
        if args.n_rho < 2:
            raise ConfigError("--n-rho must be at least 2")
        config.n_rho = args.n_rho
    elif args.subcommand == "order-check":
        if args.tau_start <= 0:
            raise ConfigError(f"--tau-start must be positive, got {args.tau_start}")
        if args.n_halvings < 1:
            raise ConfigError("--n-halvings must be at least 1")
        config.tau_start = args.tau_start
        config.n_halvings = args.n_halvings
        config.recover_c = args.recover_c
    return config


def _emit_error(code: int, kind: str, message: str) -> None:
    line = json.dumps(
        {"status": "error", "kind": kind, "exit_code": code, "message": message}
    )
    print(line, file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _build_config(args)
    except ConfigError as exc:
        _emit_error(2, "config", str(exc))
        return 2
    try:
        return args.handler(config)
    except (ConfigError, ValueError) as exc:
        _emit_error(2, "config", str(exc))
        return 2
    except GalphaError as exc:
        _emit_error(3, "numeric", f"{type(exc).__name__}: {exc}")
        return 3
    except OSError as exc:
        _emit_error(2, "config", f"i/o failure: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
