"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 numerical failure.  All output is
deterministic for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import CyclicDDEError, DivergenceError, InputError, InsufficientDataError, ValidationError
from .genenet import repressilator_preset, to_unidirectional
from .integrator import integrate
from .lyapunov import lyapunov_series
from .orbit import detect_cycle, seed_on_eigenspace
from .serialize import dump_json, load_system
from .spectral import char_function, find_roots, oscillation_border, stability_border, critical_frequency, verify_a1
from .steady import attractor_box, equilibrium_gene
from .systems import GeneNetwork, SystemState, UnidirectionalSystem, validate_feedback


def _loop_spec(system):
    """(loop-form system, mu, tau, K) regardless of how the spec was given."""
    if isinstance(system, GeneNetwork):
        tr = to_unidirectional(system)
        return tr.system, tr.system.mu, 1.0, tr.loop_gain
    loop = system.loop()
    return system, loop.mu, loop.tau, loop.loop_gain()


def _analysis_report(system, window=None, margin=1.0):
    sysl, mu, tau, K = _loop_spec(system)
    report = {"K": K}
    val = validate_feedback(sysl)
    report["feedback"] = val.to_json()
    if not val.passed:
        raise ValidationError("feedback sign pattern violated; see report")
    if np.all(mu > 0):
        w1 = critical_frequency(mu, tau)
        report["omega1"] = w1
        report["K_u"] = stability_border(mu, tau)
        report["K_c"] = oscillation_border(mu, tau)
    cf = char_function(sysl)
    a1 = verify_a1(cf, margin=margin)
    report["a1_holds"] = a1.a1_holds
    report["leading"] = a1.spectrum.leading
    if window is not None:
        spec = find_roots(cf, window)
        report["window"] = list(window)
        report["roots"] = [r.to_json() for r in spec.roots]
        report["sigma"] = [float(s) for s in spec.sigma]
    else:
        report["roots"] = [r.to_json() for r in a1.spectrum.roots]
        report["sigma"] = [float(s) for s in a1.spectrum.sigma]
    return report


def _parse_window(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise InputError("--window expects 're_min,re_max,im_min,im_max'")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"bad window: {exc}") from exc


def _initial_state(args, system):
    if isinstance(system, GeneNetwork):
        raise InputError("use gene specs with cmd_repressilator or the API")
    loop = system.loop()
    if args.initial:
        with open(args.initial, encoding="utf-8") as fh:
            obj = json.load(fh)
        if "constant" in obj:
            vals = np.asarray(obj["constant"], dtype=float)
            if np.max(np.abs(vals)) == 0.0:
                raise InputError("zero initial state rejected")
            return SystemState.constant(loop.tau, args.m, vals)
        hist = obj.get("history")
        if hist is None:
            raise InputError("initial file needs 'constant' or 'history'")
        return SystemState(
            loop.tau,
            np.asarray(hist["values"], dtype=float),
            np.asarray(hist["derivs"], dtype=float),
            np.asarray(obj.get("tail", []), dtype=float),
        )
    if args.seed_eps is not None:
        if args.seed_eps == 0.0:
            raise InputError("zero seed rejected")
        cf = char_function(system)
        a1 = verify_a1(cf, margin=1.0 + 0.5 * float(np.max(loop.mu)))
        if not a1.a1_holds:
            raise ValidationError(f"cannot seed on the leading pair: {a1.reason}")
        return seed_on_eigenspace(system, a1, eps=args.seed_eps, steps_per_delay=args.m)
    raise InputError("provide --seed-eps or --initial FILE")


def cmd_analyze(args):
    system = load_system(args.spec)
    window = _parse_window(args.window) if args.window else None
    report = _analysis_report(system, window, margin=args.margin)
    _write_json(report, args.out)
    return 0


def cmd_simulate(args):
    system = load_system(args.spec)
    state = _initial_state(args, system)
    traj = integrate(system, state, args.t_end, args.m)
    traj.to_csv(args.traj_out if args.traj_out else sys.stdout)
    series = lyapunov_series(traj, sample_dt=args.sample_dt)
    if args.v_out:
        series.to_csv(args.v_out)
    if not series.nonincreasing:
        print("warning: functional series not nonincreasing", file=sys.stderr)
    return 0


def cmd_orbit(args):
    system = load_system(args.spec)
    report = detect_cycle(
        system, eps=args.eps, steps_per_delay=args.m,
        tol_rel=args.tol_rel, tol_T_rel=args.tol_period,
    )
    _write_json(report.to_json(), args.out)
    if args.samples_out and report.converged:
        report.samples_to_csv(args.samples_out)
    return 0


def cmd_box(args):
    system = load_system(args.spec)
    if isinstance(system, GeneNetwork):
        system = to_unidirectional(system).system
    if not isinstance(system, UnidirectionalSystem):
        raise InputError("attractor boxes are defined for unidirectional specs")
    _write_json(attractor_box(system).to_json(), args.out)
    return 0


def _sweep_point(system, with_orbit, m):
    sysl, mu, tau, K = _loop_spec(system)
    cf = char_function(sysl)
    a1 = verify_a1(cf, margin=1.0 + 0.5 * float(np.max(mu)))
    row = {
        "K": K,
        "sigma0": a1.sigma0,
        "omega0": a1.omega,
        "K_u": stability_border(mu, tau) if np.all(mu > 0) else None,
        "K_c": oscillation_border(mu, tau) if np.all(mu > 0) else None,
        "a1": a1.a1_holds,
        "period": None,
    }
    if with_orbit and a1.a1_holds:
        try:
            rep = detect_cycle(sysl, steps_per_delay=m)
            if rep.converged:
                row["period"] = rep.period
        except (CyclicDDEError, DivergenceError):
            pass
    return row


def cmd_sweep(args):
    system = load_system(args.spec)
    lo, hi, count = args.grid
    values = np.linspace(lo, hi, int(count))
    rows = []
    for v in values:
        if args.param == "K":
            if not isinstance(system, UnidirectionalSystem):
                raise InputError("K sweeps require a unidirectional spec")
            point = system.with_loop_gain(v)
        elif args.param == "T":
            if not isinstance(system, GeneNetwork):
                raise InputError("T sweeps require a gene spec")
            scale = v / system.total_delay
            point = GeneNetwork(
                system.a, system.b, system.beta, system.c, system.nu,
                system.f_kind, system.tau_p * scale, system.tau_r * scale,
            )
        else:
            raise InputError("--param must be K or T")
        rows.append((float(v), _sweep_point(point, args.orbit, args.m)))
    cols = ["param", "K", "sigma0", "omega0", "K_u", "K_c", "a1", "period"]
    out = [",".join(cols)]
    for v, row in rows:
        cells = [f"{v:.17g}"]
        for c in cols[1:]:
            x = row[c]
            if x is None:
                cells.append("")
            elif isinstance(x, bool):
                cells.append(str(int(x)))
            else:
                cells.append(f"{x:.17g}")
        out.append(",".join(cells))
    text = "\r\n".join(out) + "\r\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_repressilator(args):
    network = repressilator_preset(args.T, nu=args.nu, beta=args.beta)
    tr = to_unidirectional(network)
    r_star, p_star, residual = equilibrium_gene(network)
    report = {
        "T": args.T,
        "nu": args.nu,
        "beta": args.beta,
        "equilibrium": {
            "r": [float(v) for v in r_star],
            "p": [float(v) for v in p_star],
            "residual": residual,
        },
        "K": tr.loop_gain,
        "K_u": stability_border(tr.system.mu, 1.0),
        "K_c": oscillation_border(tr.system.mu, 1.0),
        "feedback": validate_feedback(tr.system).to_json(),
    }
    if args.orbit:
        try:
            rep = detect_cycle(tr.system, steps_per_delay=args.m)
            report["orbit"] = rep.to_json()
        except (CyclicDDEError, DivergenceError) as exc:
            report["orbit"] = {"converged": False, "message": str(exc)}
    _write_json(report, args.out)
    return 0


def _write_json(obj, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            dump_json(obj, fh)
    else:
        dump_json(obj, sys.stdout)


def build_parser():
    ap = argparse.ArgumentParser(prog="cyclicdde",
                                 description="cyclic negative-feedback delay systems")
    ap.add_argument("--rng-seed", type=int, default=0, help="seed for sampled diagnostics")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="feedback check, spectrum, gain borders")
    p.add_argument("spec")
    p.add_argument("--window", help="re_min,re_max,im_min,im_max root window")
    p.add_argument("--margin", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("simulate", help="integrate and export trajectory + functional series")
    p.add_argument("spec")
    p.add_argument("--t-end", type=float, required=True, dest="t_end")
    p.add_argument("--m", type=int, default=128)
    p.add_argument("--seed-eps", type=float, dest="seed_eps")
    p.add_argument("--initial")
    p.add_argument("--sample-dt", type=float, default=0.1, dest="sample_dt")
    p.add_argument("--traj-out", dest="traj_out")
    p.add_argument("--v-out", dest="v_out")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("orbit", help="detect the bounding periodic orbit")
    p.add_argument("spec")
    p.add_argument("--m", type=int, default=128)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--tol-rel", type=float, default=1e-5, dest="tol_rel")
    p.add_argument("--tol-period", type=float, default=1e-4, dest="tol_period")
    p.add_argument("--out")
    p.add_argument("--samples-out", dest="samples_out")
    p.set_defaults(fn=cmd_orbit)

    p = sub.add_parser("box", help="attractor-enclosing interval box")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_box)

    p = sub.add_parser("sweep", help="per-point summary over a parameter grid")
    p.add_argument("spec")
    p.add_argument("--param", choices=("K", "T"), required=True)
    p.add_argument("--grid", nargs=3, type=float, required=True,
                   metavar=("LO", "HI", "COUNT"))
    p.add_argument("--orbit", action="store_true", help="also detect orbits (slow)")
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("repressilator", help="symmetric three-gene preset pipeline")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--nu", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--orbit", action="store_true")
    p.add_argument("--m", type=int, default=128)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_repressilator)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DivergenceError, InsufficientDataError, CyclicDDEError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
