"""Command-line entry point: one binary with a subcommand per capability.

Exit codes: 0 on success, 2 on validation errors (bad flags, malformed
values, unwritable outputs), 3 on numerical failures (non-convergence,
degenerate fits, singular linear algebra), with diagnostics on stderr.

Every JSON artifact embeds the resolved run configuration so outputs are
self-describing. Worker count and output paths are deliberately left out
of the echo: results must not depend on either.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .words import HYPERBOLIC, classify_word, stability_data, word_to_matrix
from .surfaces import (FAM, PT, SurfaceParams, params_from_traces, pt_params,
                       word_monomial)
from .dynamics import (
    green_minus,
    green_plus,
    escape_rate,
    orbit,
    orbit_csv_rows,
    params_dict,
    render_complex_slice,
    render_real_chart,
    write_pgm,
)
from .periodic import (
    cayley_census,
    find_periodic,
    one_sided_probe,
    periodic_csv_rows,
    real_confinement_report,
)
from .schrodinger import (
    NAMED_SUBSTITUTIONS,
    SchrodingerConfig,
    box_dimension,
    build_substitution,
    lyapunov,
    spectrum_estimate,
)
from .painleve import monodromy_report


# flags whose values may start with a dash (negative numbers, windows);
# ``--flag -3:3`` is merged to ``--flag=-3:3`` before argparse sees it
VALUE_FLAGS = {
    "--D", "--params", "--traces", "--point", "--z0", "--window",
    "--kappa", "--E", "--theta", "--seed",
}


def _merge_dash_values(argv: list) -> list:
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if a in VALUE_FLAGS and nxt is not None and nxt.startswith("-") \
                and not nxt.startswith("--"):
            out.append(a + "=" + nxt)
            i += 2
        else:
            out.append(a)
            i += 1
    return out


# ---------------------------------------------------------------------------
# value coercion (shared by flags and --config values)

def _as_int(v, name: str) -> int:
    try:
        out = int(str(v), 10) if not isinstance(v, bool) else None
    except ValueError:
        out = None
    if out is None:
        raise ValueError(f"{name} must be an integer, got {v!r}")
    return out


def _as_float(v, name: str) -> float:
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a number, got {v!r}") from None


def _as_complex(v, name: str) -> complex:
    if isinstance(v, (int, float, complex)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    try:
        return complex(str(v).replace(" ", ""))
    except ValueError:
        raise ValueError(
            f"{name} must be a real or complex scalar, got {v!r}") from None


def _as_tuple(v, n: int, name: str) -> tuple:
    parts = list(v) if isinstance(v, (list, tuple)) else str(v).split(",")
    if len(parts) != n:
        raise ValueError(f"{name} needs {n} comma-separated components")
    return tuple(_as_complex(c, name) for c in parts)


def _window1d(v, name: str = "window") -> tuple:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        lo, hi = float(v[0]), float(v[1])
    else:
        parts = str(v).split(":")
        if len(parts) != 2:
            raise ValueError(f"{name} must be lo:hi, got {v!r}")
        lo, hi = _as_float(parts[0], name), _as_float(parts[1], name)
    if not lo < hi:
        raise ValueError(f"{name} must satisfy lo < hi")
    return (lo, hi)


def _window2d(v) -> tuple:
    """lo:hi for both axes, or xlo:xhi,ylo:yhi for distinct axes."""
    if isinstance(v, (list, tuple)) and len(v) == 2 \
            and all(isinstance(q, (list, tuple)) for q in v):
        return (_window1d(v[0]), _window1d(v[1]))
    s = str(v)
    if "," in s:
        wx, wy = s.split(",", 1)
        return (_window1d(wx, "x window"), _window1d(wy, "y window"))
    w = _window1d(v)
    return (w, w)


# ---------------------------------------------------------------------------
# config merging and shared resolution

def _apply_config(args: argparse.Namespace) -> None:
    """Fill flags still unset from a JSON config; flags win over config."""
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as e:
        raise ValueError(f"config {path}: {e}") from None
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    for key, raw in cfg.items():
        attr = str(key).replace("-", "_")
        if attr in ("config", "func", "command") or not hasattr(args, attr):
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, raw)


def _need(args, attr: str):
    v = getattr(args, attr)
    if v is None:
        raise ValueError(f"missing required flag --{attr.replace('_', '-')}")
    return v


def _resolve_params(args) -> SurfaceParams:
    given = [f for f in ("D", "params", "traces")
             if getattr(args, f, None) is not None]
    if len(given) != 1:
        raise ValueError("give exactly one of --D, --params, --traces")
    if args.D is not None:
        return pt_params(_as_complex(args.D, "--D"))
    if args.traces is not None:
        return params_from_traces(*_as_tuple(args.traces, 4, "--traces"))
    A, B, C, D = _as_tuple(args.params, 4, "--params")
    conv = getattr(args, "convention", None) or FAM
    if conv not in (FAM, PT):
        raise ValueError(f"--convention must be {FAM} or {PT}")
    return SurfaceParams(A, B, C, D, convention=conv)


def _resolve_sub(v):
    s = str(v)
    if s in NAMED_SUBSTITUTIONS:
        ra, rb = NAMED_SUBSTITUTIONS[s]
    elif ":" in s:
        ra, rb = s.split(":", 1)
    else:
        names = ", ".join(sorted(NAMED_SUBSTITUTIONS))
        raise ValueError(
            f"unknown substitution {s!r}; use a name ({names}) or rule_a:rule_b")
    return build_substitution(ra, rb), s


def _workers(args):
    v = getattr(args, "workers", None)
    return None if v is None else _as_int(v, "--workers")


# ---------------------------------------------------------------------------
# emitters

def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.complexfloating, complex)):
        c = complex(v)
        return c.real if c.imag == 0.0 else [c.real, c.imag]
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def _emit_json(doc: dict, out_path) -> None:
    text = json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (np.bool_, bool)):
        return str(bool(v)).lower()
    if isinstance(v, (np.complexfloating, complex)):
        c = complex(v)
        return repr(c.real) if c.imag == 0.0 else str(c)
    if isinstance(v, np.integer):
        return str(int(v))
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    return str(v)


def _write_csv(path: str, header: tuple, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])


# ---------------------------------------------------------------------------
# subcommands

def _cmd_classify(args) -> None:
    w = _need(args, "word")
    cls = classify_word(w)
    doc = {
        "command": "classify", "word": w, "seed": args.seed,
        "kind": cls.kind, "lambda": cls.lam, "slope": cls.slope,
        "stable": None, "ind_f": None, "ind_finv": None,
    }
    if cls.kind == HYPERBOLIC:
        sd = stability_data(w)
        doc.update(stable=sd.stable, ind_f=sd.ind_f, ind_finv=sd.ind_finv)
    _emit_json(doc, args.out)


def _cmd_orbit(args) -> None:
    params = _resolve_params(args)
    w = _need(args, "word")
    p = _as_tuple(_need(args, "point"), 3, "--point")
    n = _as_int(args.n, "--n") if args.n is not None else 100
    radius = _as_float(args.radius, "--radius") if args.radius is not None else 1e3
    rec = orbit(params, w, p, max_iter=n, escape_radius=radius)
    doc = {
        "command": "orbit", "word": w, "params": params_dict(params),
        "point": list(p), "n": n, "escape_radius": radius, "seed": args.seed,
        "escaped": rec.escaped, "escape_time": rec.escape_time,
        "final_log_norm": rec.final_log_norm, "iterations": rec.iterations,
    }
    if args.csv:
        rows = orbit_csv_rows(params, w, p, n)
        _write_csv(args.csv, ("n", "x", "y", "z", "log_norm"), rows)
    _emit_json(doc, args.out)


def _cmd_green(args) -> None:
    params = _resolve_params(args)
    w = _need(args, "word")
    p = _as_tuple(_need(args, "point"), 3, "--point")
    n_max = _as_int(args.n_max, "--n-max") if args.n_max is not None else 60
    side = args.side or "plus"
    if side not in ("plus", "minus", "both"):
        raise ValueError("--side must be plus, minus, or both")
    doc = {
        "command": "green", "word": w, "params": params_dict(params),
        "point": list(p), "n_max": n_max, "side": side, "seed": args.seed,
    }
    if side in ("plus", "both"):
        est = green_plus(params, w, p, n_max=n_max)
        doc["green_plus"] = {"value": est.value,
                             "iterations_used": est.iterations_used}
        doc["lambda"] = est.lam
    if side in ("minus", "both"):
        est = green_minus(params, w, p, n_max=n_max)
        doc["green_minus"] = {"value": est.value,
                              "iterations_used": est.iterations_used}
        doc["lambda"] = est.lam
    if args.rate:
        doc["escape_rate"] = escape_rate(params, w, p)
    _emit_json(doc, args.out)


def _cmd_render_slice(args) -> None:
    params = _resolve_params(args)
    w = _need(args, "word")
    z0 = _as_complex(args.z0, "--z0") if args.z0 is not None else 0j
    window = _window2d(args.window) if args.window is not None else ((-2, 2), (-2, 2))
    grid = _as_int(args.grid, "--grid") if args.grid is not None else 256
    budget = _as_int(args.budget, "--budget") if args.budget is not None else 200
    radius = _as_float(args.radius, "--radius") if args.radius is not None else 1e4
    raster = render_complex_slice(params, w, z0, window=window, grid=grid,
                                  budget=budget, radius=radius,
                                  workers=_workers(args))
    raster.metadata["command"] = "render-slice"
    raster.metadata["seed"] = args.seed
    out = args.out or "render-slice.pgm"
    write_pgm(raster, out)
    _emit_json(raster.metadata, None)


def _cmd_render_real(args) -> None:
    params = _resolve_params(args)
    w = _need(args, "word")
    window = _window2d(args.window) if args.window is not None else ((-10, 10), (-10, 10))
    sheet = _as_int(args.sheet, "--sheet") if args.sheet is not None else 1
    grid = _as_int(args.grid, "--grid") if args.grid is not None else 256
    budget = _as_int(args.budget, "--budget") if args.budget is not None else 200
    radius = _as_float(args.radius, "--radius") if args.radius is not None else 1e3
    raster = render_real_chart(params, w, window=window, sheet=sheet,
                               grid=grid, budget=budget, radius=radius,
                               workers=_workers(args))
    raster.metadata["command"] = "render-real"
    raster.metadata["seed"] = args.seed
    out = args.out or "render-real.pgm"
    write_pgm(raster, out)
    _emit_json(raster.metadata, None)


_PERIODIC_HEADER = ("x", "y", "z", "period", "mu_big", "mu_small",
                    "kind", "is_real", "singular", "one_sided_u", "one_sided_s")


def _cmd_periodic(args) -> None:
    params = _resolve_params(args)
    w = _need(args, "word")
    n = _as_int(_need(args, "n"), "--n")
    if args.confinement:
        rep = real_confinement_report(params, w, n)
        doc = {"command": "periodic", "params": params_dict(params),
               "n_max": n, "seed": args.seed, "confinement": rep}
        _emit_json(doc, args.out)
        return
    pts = find_periodic(params, w, n)
    if args.probe:
        for r in pts:
            probe = one_sided_probe(params, w, r)
            r.one_sided.update(u=probe["u_one_sided"], s=probe["s_one_sided"])
    rows = []
    for r in pts:
        rows.append({
            "point": list(r.point), "period": r.period,
            "multipliers": list(r.multipliers), "kind": r.kind,
            "is_real": r.is_real, "singular": r.singular,
            "one_sided": dict(r.one_sided),
        })
    doc = {
        "command": "periodic", "word": w, "params": params_dict(params),
        "n": n, "probe": bool(args.probe), "seed": args.seed,
        "stats": pts.stats, "points": rows,
    }
    if args.csv:
        _write_csv(args.csv, _PERIODIC_HEADER, periodic_csv_rows(pts))
    _emit_json(doc, args.out)


def _cmd_cayley_census(args) -> None:
    w = _need(args, "word")
    n = _as_int(_need(args, "n"), "--n")
    res = cayley_census(word_monomial(w), n)
    doc = {
        "command": "cayley-census", "word": w, "n": n, "seed": args.seed,
        "matrix": [list(r) for r in word_monomial(w)],
        "count_plus": res.count_plus, "count_minus": res.count_minus,
        "found": len(res.points), "notes": res.notes,
        "points": [list(p) for p in res.points],
    }
    if args.csv:
        _write_csv(args.csv, ("x", "y", "z"), res.points)
    _emit_json(doc, args.out)


def _cmd_spectrum(args) -> None:
    sub, sub_name = _resolve_sub(args.sub or "fib")
    window = _window1d(args.window) if args.window is not None else None
    config = SchrodingerConfig(
        kappa=_as_float(args.kappa, "--kappa") if args.kappa is not None else 0.0,
        window=window,
        grid=_as_int(args.grid, "--grid") if args.grid is not None else 2001,
        budget=_as_int(args.budget, "--budget") if args.budget is not None else 1000,
        escape_radius=_as_float(args.radius, "--radius") if args.radius is not None else 10.0,
    )
    est = spectrum_estimate(sub, config, workers=_workers(args))
    doc = {
        "command": "spectrum", "sub": sub_name, "seed": args.seed,
        "config": est.config,
        "intervals": [list(iv) for iv in est.intervals],
        "gaps": [list(g) for g in est.gaps],
        "dimension": est.dimension, "dimension_residual": est.dimension_residual,
        "bounded_count": int(est.bounded_flags.sum()),
    }
    if args.csv:
        header = ["E", "bounded", "escape_step"]
        cols = [est.energies, est.bounded_flags, est.escape_steps]
        if args.lyapunov is not None:
            n_ly = _as_int(args.lyapunov, "--lyapunov")
            header.append("lyapunov")
            cols.append(np.array([lyapunov(sub, config.kappa, E, n=n_ly)
                                  for E in est.energies]))
        _write_csv(args.csv, tuple(header), zip(*cols))
    _emit_json(doc, args.out)


def _cmd_lyapunov(args) -> None:
    sub, sub_name = _resolve_sub(args.sub or "fib")
    kappa = _as_float(args.kappa, "--kappa") if args.kappa is not None else 0.0
    E = _as_complex(_need(args, "E"), "--E")
    n = _as_int(args.n, "--n") if args.n is not None else 1000
    doc = {
        "command": "lyapunov", "sub": sub_name, "kappa": kappa,
        "E": E, "n": n, "seed": args.seed,
        "value": lyapunov(sub, kappa, E, n=n),
    }
    _emit_json(doc, args.out)


def _load_dimension_input(path: str):
    """Spectrum CSV (E, bounded, ...) or plain text of sample values."""
    with open(path) as fh:
        first = fh.readline()
        rest = fh.read()
    cols = [c.strip().lower() for c in first.split(",")]
    if "e" in cols and "bounded" in cols:
        ie, ib = cols.index("e"), cols.index("bounded")
        energies, flags = [], []
        for line in rest.splitlines():
            if not line.strip():
                continue
            parts = line.split(",")
            energies.append(float(parts[ie]))
            flags.append(parts[ib].strip().lower() in ("true", "1"))
        return np.array(energies), np.array(flags, dtype=bool)
    vals = [float(tok) for tok in (first + rest).replace(",", " ").split()]
    return np.array(vals)


def _cmd_dimension(args) -> None:
    data = _load_dimension_input(_need(args, "input"))
    window = _window1d(args.window) if args.window is not None else None
    try:
        est = box_dimension(data, window=window)
    except ValueError as e:
        # degenerate data is a numerical failure, not a usage error
        raise RuntimeError(f"dimension fit failed: {e}") from None
    doc = {
        "command": "dimension", "seed": args.seed,
        "window": list(window) if window else None,
        "value": est.value, "residual": est.residual,
        "scales": list(est.scales), "counts": list(est.counts),
    }
    _emit_json(doc, args.out)


def _cmd_painleve(args) -> None:
    theta = _as_tuple(_need(args, "theta"), 4, "--theta")
    loop = args.loop or "l0"
    rep = monodromy_report(theta, loop)
    doc = {"command": "painleve", "seed": args.seed}
    doc.update(rep)
    _emit_json(doc, args.report or args.out)


# ---------------------------------------------------------------------------
# parser

def _add_common(sp, workers: bool = False) -> None:
    sp.add_argument("--config", default=None,
                    help="JSON object supplying values for unset flags")
    sp.add_argument("--seed", default=None, type=int,
                    help="seed echoed into artifacts (reserved for randomized seeding)")
    sp.add_argument("--out", default=None, help="output path (default: stdout)")
    if workers:
        sp.add_argument("--workers", default=None,
                        help="thread count; results do not depend on it")


def _add_surface(sp) -> None:
    sp.add_argument("--D", default=None,
                    help="level of the once-punctured-torus family x^2+y^2+z^2 = xyz + D")
    sp.add_argument("--params", default=None,
                    help="A,B,C,D of the four-punctured-sphere family")
    sp.add_argument("--traces", default=None,
                    help="boundary traces a,b,c,d mapped to A,B,C,D")
    sp.add_argument("--convention", default=None, help="fam or pt (with --params)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="charsurf",
        description="Mapping-class-group dynamics on cubic character surfaces")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="word classification and stability")
    sp.add_argument("--word", default=None)
    _add_common(sp)
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("orbit", help="iterate a word from a point")
    sp.add_argument("--word", default=None)
    sp.add_argument("--point", default=None, help="x,y,z (complex entries allowed)")
    sp.add_argument("--n", default=None, help="iteration budget (default 100)")
    sp.add_argument("--radius", default=None, help="escape radius (default 1e3)")
    sp.add_argument("--csv", default=None, help="write per-step rows here")
    _add_surface(sp)
    _add_common(sp)
    sp.set_defaults(func=_cmd_orbit)

    sp = sub.add_parser("green", help="Green function at a point")
    sp.add_argument("--word", default=None)
    sp.add_argument("--point", default=None)
    sp.add_argument("--n-max", dest="n_max", default=None)
    sp.add_argument("--side", default=None, help="plus, minus, or both")
    sp.add_argument("--rate", action="store_true",
                    help="also report the finite-orbit escape-rate estimate")
    _add_surface(sp)
    _add_common(sp)
    sp.set_defaults(func=_cmd_green)

    sp = sub.add_parser("render-slice", help="escape raster on a complex slice z = z0")
    sp.add_argument("--word", default=None)
    sp.add_argument("--z0", default=None)
    sp.add_argument("--window", default=None, help="lo:hi or xlo:xhi,ylo:yhi")
    sp.add_argument("--grid", default=None)
    sp.add_argument("--budget", default=None)
    sp.add_argument("--radius", default=None)
    _add_surface(sp)
    _add_common(sp, workers=True)
    sp.set_defaults(func=_cmd_render_slice)

    sp = sub.add_parser("render-real", help="escape raster on a real (x, y) chart")
    sp.add_argument("--word", default=None)
    sp.add_argument("--window", default=None, help="lo:hi or xlo:xhi,ylo:yhi")
    sp.add_argument("--sheet", default=None, help="+1 or -1 root branch")
    sp.add_argument("--grid", default=None)
    sp.add_argument("--budget", default=None)
    sp.add_argument("--radius", default=None)
    _add_surface(sp)
    _add_common(sp, workers=True)
    sp.set_defaults(func=_cmd_render_real)

    sp = sub.add_parser("periodic", help="periodic points of a word")
    sp.add_argument("--word", default=None)
    sp.add_argument("--n", default=None, help="period (or period bound with --confinement)")
    sp.add_argument("--probe", action="store_true",
                    help="attach one-sided escape probes to each point")
    sp.add_argument("--confinement", action="store_true",
                    help="emit the real-confinement report for periods 1..n")
    sp.add_argument("--csv", default=None)
    _add_surface(sp)
    _add_common(sp)
    sp.set_defaults(func=_cmd_periodic)

    sp = sub.add_parser("cayley-census",
                        help="exact periodic census on the Cayley cubic")
    sp.add_argument("--word", default=None)
    sp.add_argument("--n", default=None, help="period")
    sp.add_argument("--csv", default=None)
    _add_common(sp)
    sp.set_defaults(func=_cmd_cayley_census)

    sp = sub.add_parser("spectrum", help="substitution Schrodinger spectrum")
    sp.add_argument("--sub", default=None,
                    help="named substitution or rule_a:rule_b (default fib)")
    sp.add_argument("--kappa", default=None)
    sp.add_argument("--window", default=None, help="lo:hi energy window")
    sp.add_argument("--grid", default=None)
    sp.add_argument("--budget", default=None)
    sp.add_argument("--radius", default=None)
    sp.add_argument("--csv", default=None, help="per-energy rows")
    sp.add_argument("--lyapunov", default=None,
                    help="add a Lyapunov column to the CSV, computed at this depth")
    _add_common(sp, workers=True)
    sp.set_defaults(func=_cmd_spectrum)

    sp = sub.add_parser("lyapunov", help="transfer-cocycle Lyapunov exponent")
    sp.add_argument("--sub", default=None)
    sp.add_argument("--kappa", default=None)
    sp.add_argument("--E", default=None)
    sp.add_argument("--n", default=None, help="word length (default 1000)")
    _add_common(sp)
    sp.set_defaults(func=_cmd_lyapunov)

    sp = sub.add_parser("dimension", help="box-counting dimension of a sample file")
    sp.add_argument("--input", default=None,
                    help="spectrum CSV (E, bounded, ...) or plain text of values")
    sp.add_argument("--window", default=None, help="lo:hi span override")
    _add_common(sp)
    sp.set_defaults(func=_cmd_dimension)

    sp = sub.add_parser("painleve", help="monodromy report from theta parameters")
    sp.add_argument("--theta", default=None, help="theta_0,theta_1,theta_t,theta_inf")
    sp.add_argument("--loop", default=None,
                    help="loop word in l0, l1, linf (default l0)")
    sp.add_argument("--report", default=None, help="alias for --out")
    _add_common(sp)
    sp.set_defaults(func=_cmd_painleve)

    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_merge_dash_values(argv))
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        _apply_config(args)
        args.func(args)
    except np.linalg.LinAlgError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except (RuntimeError, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
