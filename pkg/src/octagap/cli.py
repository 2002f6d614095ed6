"""Batch command line front end.

One subcommand per computational story: exact group verification, scattering
formula against the lattice oracle, critical-exponent estimates, random cover
experiments, and the cap-volume, flattening-budget, and horoball-cover
checks.  Every run is reproducible from its seed, parameters may come from a
JSON config file (flags override, unknown keys are rejected), and reports are
written as JSON (schema version field, deterministic key order) or CSV (comma
separator, '.' decimal point, mandatory header, 12 significant digits).

Exit codes: 0 when all checks of the subcommand pass, 1 for a computational
failure or a failed check, 2 for invalid input.  Output files are written
only after a computation finishes, so invalid input and mid-run failures
never leave partial files behind.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys

import numpy as np

from . import covers, geometry, group, spectral
from .errors import DomainError, OctagapError, PoleError

__all__ = ["main"]

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_USAGE = 2

_GLOBAL_KEYS = ("seed", "out", "format")

#: Per-subcommand parameter names, casters, and defaults. Config files may
#: set exactly these keys (plus the global ones); flags override.
_PARAM_SPECS: dict[str, dict[str, tuple]] = {}


def _float_list(value) -> list[float]:
    if not isinstance(value, (list, tuple)) or not value:
        raise ValueError(f"expected a nonempty list of numbers, got {value!r}")
    return [float(v) for v in value]


def _area_table(value) -> tuple[tuple[float, float, float], ...]:
    if not isinstance(value, (list, tuple)) or not value:
        raise ValueError(f"expected a list of 3-element area rows, got {value!r}")
    rows = []
    for row in value:
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise ValueError(f"each area row needs exactly 3 entries, got {row!r}")
        rows.append(tuple(float(v) for v in row))
    return tuple(rows)


def _base_point(value) -> geometry.Point3:
    if isinstance(value, (list, tuple)):
        parts = [float(v) for v in value]
    else:
        parts = [float(v) for v in str(value).split(",")]
    if len(parts) != 3:
        raise ValueError(f"base point needs x,y,t with three entries, got {value!r}")
    return geometry.point(parts[0], parts[1], parts[2])


def _window_pair(value) -> tuple[float, float]:
    if isinstance(value, (list, tuple)):
        parts = [float(v) for v in value]
    else:
        parts = [float(v) for v in str(value).split(",")]
    if len(parts) != 2:
        raise ValueError(f"window needs two entries min,max, got {value!r}")
    return (parts[0], parts[1])


_PARAM_SPECS["verify-group"] = {
    "corrupt_generator": (str, None),
}
_PARAM_SPECS["scattering"] = {
    "level": (int, 1),
    "s_min": (float, 2.2),
    "s_max": (float, 4.0),
    "grid": (int, 10),
    "oracle_radius": (float, 120.0),
    "tolerance": (float, 1e-3),
}
_PARAM_SPECS["delta"] = {
    "group": (str, "sa"),
    "word_length": (int, None),
    "base_point": (_base_point, geometry.DEFAULT_BASE_POINT),
    "window": (_window_pair, None),
}
_PARAM_SPECS["cover"] = {
    "n": (int, None),
    "walk_steps": (int, 0),
    "bins": (int, 20),
}
_PARAM_SPECS["bounds-and-budgets"] = {
    "cap_radii": (_float_list, [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]),
    "cap_separations": (_float_list, [0.5, 1.0, 2.0]),
    "budget_lengths": (_float_list, [10.0, 15.0, 20.0, 25.0]),
    "lam": (float, 0.4),
    "lam0": (float, 0.8),
    "eps": (float, 0.01),
    "areas": (_area_table, ((1.0, 1.0, 1.0),)),
    "horoball_samples": (int, 100000),
    "exclusion_radius": (float, 1e-3),
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")
    common.add_argument("--out", default=None, help="output file path")
    common.add_argument(
        "--format", choices=("json", "csv"), default=None, help="output format"
    )
    common.add_argument("--config", default=None, help="JSON config file")

    parser = argparse.ArgumentParser(
        prog="octagap", description="Reflection group, cover, and bound checks."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser(
        "verify-group", parents=[common], help="exact reflection-group invariants"
    ).add_argument("--corrupt-generator", default=None, help=argparse.SUPPRESS)

    scattering = sub.add_parser(
        "scattering", parents=[common], help="scattering formula vs lattice oracle"
    )
    scattering.add_argument("--level", type=int, default=None)
    scattering.add_argument("--s-min", type=float, default=None)
    scattering.add_argument("--s-max", type=float, default=None)
    scattering.add_argument("--grid", type=int, default=None)
    scattering.add_argument("--oracle-radius", type=float, default=None)
    scattering.add_argument("--tolerance", type=float, default=None)

    delta = sub.add_parser(
        "delta", parents=[common], help="critical exponent estimate and gap bounds"
    )
    delta.add_argument("--group", choices=("ap", "sa", "inf"), default=None)
    delta.add_argument("--word-length", type=int, default=None)
    delta.add_argument("--base-point", default=None, help="x,y,t")
    delta.add_argument("--window", default=None, help="Tmin,Tmax")

    cover = sub.add_parser(
        "cover", parents=[common], help="random cover sampling and switching walks"
    )
    cover.add_argument("--n", type=int, default=None)
    cover.add_argument("--walk-steps", type=int, default=None)
    cover.add_argument("--bins", type=int, default=None)

    bounds = sub.add_parser(
        "bounds-and-budgets",
        parents=[common],
        help="cap volume sweep, flattening budgets, horoball cover",
    )
    bounds.add_argument("--lam", type=float, default=None)
    bounds.add_argument("--lam0", type=float, default=None)
    bounds.add_argument("--eps", type=float, default=None)
    bounds.add_argument("--horoball-samples", type=int, default=None)
    bounds.add_argument("--exclusion-radius", type=float, default=None)
    return parser


def _load_config(path: str, spec: dict) -> dict:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise DomainError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(data) - set(spec) - set(_GLOBAL_KEYS))
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _merge_params(args: argparse.Namespace) -> dict:
    """Resolve parameters: explicit flag beats config file beats default."""
    spec = _PARAM_SPECS[args.command]
    config = _load_config(args.config, spec) if args.config else {}
    params: dict = {"command": args.command}
    for name, (caster, default) in spec.items():
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            value = flag_value
        elif name in config:
            value = config[name]
        else:
            params[name] = default
            continue
        try:
            params[name] = caster(value)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"bad value for {name}: {exc}") from exc
    for name in _GLOBAL_KEYS:
        flag_value = getattr(args, name)
        params[name] = flag_value if flag_value is not None else config.get(name)
    params["format"] = params["format"] or "json"
    if params["format"] not in ("json", "csv"):
        raise DomainError(f"format must be json or csv, got {params['format']!r}")
    if params["seed"] is not None:
        seed = int(params["seed"])
        if not 0 <= seed < 2**64:
            raise DomainError(f"seed must fit an unsigned 64-bit integer, got {seed}")
        params["seed"] = seed
    return params


def _require_seed(params: dict) -> int:
    if params["seed"] is None:
        raise DomainError(f"{params['command']} is stochastic and needs --seed")
    return params["seed"]


def _jsonify(value):
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_output(params: dict, report: dict, table: tuple | None) -> None:
    if params["out"] is None:
        return
    if params["format"] == "json":
        text = json.dumps(_jsonify(report), indent=2, sort_keys=True) + "\n"
    else:
        if table is None:
            raise DomainError(f"{params['command']} has no CSV table output")
        header, rows = table
        lines = [",".join(header)]
        lines.extend(",".join(_csv_cell(cell) for cell in row) for row in rows)
        text = "\n".join(lines) + "\n"
    with open(params["out"], "w") as handle:
        handle.write(text)


def _new_report(params: dict) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": params["command"],
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(
            timespec="seconds"
        ),
    }


# -- verify-group ------------------------------------------------------------


def _is_face_letter(name: str) -> bool:
    return not name.endswith("p")


def _expected_commuting(a: str, b: str) -> bool:
    if _is_face_letter(a) == _is_face_letter(b):
        return False
    face, perp = (a, b) if _is_face_letter(a) else (b, a)
    return face[1] != perp[1]


def _cmd_verify_group(params: dict) -> tuple[int, dict, tuple]:
    table = dict(group.STANDARD_GENERATORS)
    corrupt = params.get("corrupt_generator")
    if corrupt is not None:
        if corrupt not in table:
            raise DomainError(f"unknown generator {corrupt!r}")
        stand_in = "r1p" if corrupt != "r1p" else "r1"
        table[corrupt] = table[stand_in]
    ident = group.identity()
    checks: list[tuple[str, bool]] = []
    for name in group.GENERATOR_NAMES:
        checks.append((f"involution:{name}", table[name] * table[name] == ident))
    cube_ok = True
    for i, a in enumerate(group.GENERATOR_NAMES):
        for b in group.GENERATOR_NAMES[i + 1 :]:
            expected = _expected_commuting(a, b)
            measured = table[a] * table[b] == table[b] * table[a]
            kind = "cube-edge" if expected else "cube-non-edge"
            ok = measured == expected
            cube_ok = cube_ok and ok
            checks.append((f"{kind}:{a},{b}", ok))
    checks.append(("commutation-graph-is-cube", cube_ok))
    checks.append(("octa-symmetry-order-24", len(group.octa_symmetry_group()) == 24))
    checks.append(("rotation-order-3", group.ROTATION_ORDER3**3 == ident))
    checks.append(("rotation-order-4", group.ROTATION_ORDER4**4 == ident))
    # Each generator is the plain conjugation times a level-2 congruence
    # element: conjugation bit set, matrix congruent to the identity mod 2.
    rho = group.STANDARD_GENERATORS["r1p"]
    for name in group.GENERATOR_NAMES:
        checks.append(
            (
                f"level2-congruence:{name}",
                table[name].conj == 1
                and group.in_level2_congruence(table[name] * rho),
            )
        )

    failures = [name for name, ok in checks if not ok]
    report = _new_report(params)
    report.update(
        {
            "checks": [{"name": name, "passed": ok} for name, ok in checks],
            "involution_checks": 8,
            "edge_checks": 12,
            "non_edge_checks": 16,
            "passed": not failures,
        }
    )
    table_out = (["check", "passed"], [[name, ok] for name, ok in checks])
    if failures:
        print(f"FAIL: {failures[0]} (and {len(failures) - 1} more)", file=sys.stderr)
        return EXIT_COMPUTE, report, table_out
    print(f"PASS: all {len(checks)} group checks (24-element symmetry group confirmed)")
    return EXIT_OK, report, table_out


# -- scattering --------------------------------------------------------------


def _cmd_scattering(params: dict) -> tuple[int, dict, tuple]:
    level = params["level"]
    s_min, s_max = params["s_min"], params["s_max"]
    grid, radius = params["grid"], params["oracle_radius"]
    tolerance = params["tolerance"]
    if level < 1:
        raise DomainError(f"level must be at least 1, got {level}")
    if not 1.0 < s_min <= s_max:
        raise DomainError(f"need 1 < s_min <= s_max, got ({s_min}, {s_max})")
    if grid < 1:
        raise DomainError(f"grid must be at least 1, got {grid}")
    if not 10.0 <= radius <= 500.0:
        raise DomainError(f"oracle radius must lie in [10, 500], got {radius}")
    if tolerance <= 0:
        raise DomainError(f"tolerance must be positive, got {tolerance}")

    rows = []
    max_relgap = None
    s_values = [s_min] if grid == 1 else list(np.linspace(s_min, s_max, grid))
    for s in s_values:
        s = float(s)
        try:
            formula = spectral.scattering_coefficient(s, level)
        except PoleError:
            rows.append({"s": s, "formula": None, "oracle": None, "relgap": None, "flag": "POLE"})
            continue
        if s > 2.0:
            oracle = spectral.scattering_oracle_value(s, level, radius)
            relgap = abs(formula - oracle) / abs(formula)
            max_relgap = relgap if max_relgap is None else max(max_relgap, relgap)
            rows.append(
                {"s": s, "formula": formula, "oracle": oracle, "relgap": relgap, "flag": "ok"}
            )
        else:
            rows.append(
                {"s": s, "formula": formula, "oracle": None, "relgap": None, "flag": "formula-only"}
            )

    poles = spectral.scattering_pole_scan(level)
    scan_verdict = "no poles" if not poles else f"{len(poles)} pole candidates"
    passed = not poles and (max_relgap is None or max_relgap < tolerance)

    report = _new_report(params)
    report.update(
        {
            "level": level,
            "oracle_radius": radius,
            "tolerance": tolerance,
            "rows": rows,
            "pole_scan": {"interval": [1.05, 1.95], "verdict": scan_verdict, "points": poles},
            "max_relgap": max_relgap,
            "passed": passed,
        }
    )
    header = ["s", "formula", "oracle", "relgap", "flag"]
    table_out = (header, [[r[k] for k in header] for r in rows])
    for r in rows:
        if r["flag"] == "ok":
            print(
                f"s={r['s']:.6g}  formula={r['formula']:.12g}  "
                f"oracle={r['oracle']:.12g}  relgap={r['relgap']:.3e}"
            )
        else:
            value = "" if r["formula"] is None else f"  formula={r['formula']:.12g}"
            print(f"s={r['s']:.6g}{value}  [{r['flag']}]")
    print(f"pole scan (1.05, 1.95) at level {level}: {scan_verdict}")
    if max_relgap is not None:
        print(f"max relgap {max_relgap:.3e} (tolerance {tolerance:g})")
    print("PASS" if passed else "FAIL")
    return (EXIT_OK if passed else EXIT_COMPUTE), report, table_out


# -- delta -------------------------------------------------------------------

_DELTA_GROUPS = {
    "ap": ("free", 14, (1.15, 1.45), geometry.FREE_SUBGROUP_CRITICAL_EXPONENT),
    "sa": ("full", 10, (1.6, 2.0), 2.0),
    "inf": ("kernel", 10, None, None),
}


def _cmd_delta(params: dict) -> tuple[int, dict, tuple]:
    token = params["group"]
    if token not in _DELTA_GROUPS:
        raise DomainError(f"group must be one of ap, sa, inf, got {token!r}")
    orbit_group, default_len, band, reference = _DELTA_GROUPS[token]
    word_length = params["word_length"] or default_len
    if word_length < 1:
        raise DomainError(f"word length must be positive, got {word_length}")
    base = params["base_point"]

    ball = geometry.orbit_ball(orbit_group, base, word_length)
    fit = geometry.estimate_critical_exponent(ball, window=params["window"])
    bounds = geometry.spectral_gap_bounds()
    in_band = band is None or band[0] <= fit.exponent <= band[1]

    report = _new_report(params)
    report.update(
        {
            "group": token,
            "orbit_group": orbit_group,
            "word_length": word_length,
            "base_point": [base.z.real, base.z.imag, base.t],
            "estimate": fit.exponent,
            "fit": {
                "intercept": fit.intercept,
                "n_points": fit.n_points,
                "window": list(fit.window),
                "t_values": list(fit.t_values),
                "counts": list(fit.counts),
            },
            "band": list(band) if band else None,
            "reference": reference,
            "orbit_points": ball.count,
            "bounds": {
                "lower": bounds.lower,
                "upper": bounds.upper,
                "es_at_reference": geometry.elstrodt_sullivan(
                    geometry.FREE_SUBGROUP_CRITICAL_EXPONENT
                ),
            },
            "passed": in_band,
        }
    )
    table_out = (
        ["t", "count"],
        [[t, c] for t, c in zip(fit.t_values, fit.counts)],
    )
    band_text = f", band [{band[0]}, {band[1]}]" if band else ""
    print(
        f"group {token}: estimate {fit.exponent:.6f} from {fit.n_points} points "
        f"on window [{fit.window[0]:.2f}, {fit.window[1]:.2f}]{band_text}"
    )
    print(f"gap bounds: lower {bounds.lower:.10g}, upper {bounds.upper:.10g}")
    print("PASS" if in_band else "FAIL")
    return (EXIT_OK if in_band else EXIT_COMPUTE), report, table_out


# -- cover -------------------------------------------------------------------


def _cmd_cover(params: dict) -> tuple[int, dict, tuple]:
    seed = _require_seed(params)
    n = params["n"]
    if n is None:
        raise DomainError("cover needs --n")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    walk_steps = params["walk_steps"]
    if walk_steps < 0:
        raise DomainError(f"walk steps must be nonnegative, got {walk_steps}")
    bins = params["bins"]
    if bins < 1:
        raise DomainError(f"bins must be at least 1, got {bins}")

    cover = covers.sample_cover(n, seed)
    graph = covers.dual_graph(cover)
    connected = covers.is_connected(graph)
    lambda1 = covers.graph_lambda1(graph)
    radius = covers.tangle_free_radius(graph)

    report = _new_report(params)
    report.update(
        {
            "n": n,
            "seed": seed,
            "num_vertices": graph.num_vertices,
            "num_edges": graph.num_edges,
            "connected": connected,
            "lambda1": lambda1,
            "tangle_free_radius": radius,
        }
    )
    checks = [0.0 <= lambda1 <= 8.0]
    print(
        f"n={n}: {graph.num_vertices} vertices, connected={connected}, "
        f"lambda1={lambda1:.6g}, tangle-free radius {radius}"
    )
    if walk_steps >= 1:
        trajectory = covers.switching_walk(graph, walk_steps, seed)
        summary = covers.walk_summary(n, seed, trajectory, bins=bins)
        summary["signing_hashes"] = [h for h, _ in trajectory]
        report["walk"] = summary
        first = trajectory[0][1]
        checks.append(first <= 1e-9)
        checks.append(all(0.0 <= lam <= 8.0 for _, lam in trajectory))
        table_out = (
            ["step", "signing_hash", "lambda1"],
            [[i, h, lam] for i, (h, lam) in enumerate(trajectory)],
        )
        print(
            f"switching walk: {walk_steps} steps, first lambda1 {first:.3g}, "
            f"max {max(lam for _, lam in trajectory):.6g}"
        )
    else:
        table_out = (
            ["u", "v", "color", "sign"],
            [[u, v, color, 1] for u, v, color in graph.edges],
        )
    passed = all(checks)
    report["passed"] = passed
    print("PASS" if passed else "FAIL")
    return (EXIT_OK if passed else EXIT_COMPUTE), report, table_out


# -- bounds and budgets ------------------------------------------------------


def _cmd_bounds_and_budgets(params: dict) -> tuple[int, dict, tuple]:
    seed = _require_seed(params)
    radii = params["cap_radii"]
    separations = params["cap_separations"]
    lengths = sorted(params["budget_lengths"])
    lam, lam0, eps = params["lam"], params["lam0"], params["eps"]
    areas = params["areas"]
    samples = params["horoball_samples"]
    exclusion = params["exclusion_radius"]
    if any(r <= 0 for r in radii):
        raise DomainError("cap radii must be positive")
    if any(d < 0 for d in separations):
        raise DomainError("cap separations must be nonnegative")
    if any(length <= 0 for length in lengths):
        raise DomainError("budget lengths must be positive")
    if samples < 1:
        raise DomainError(f"horoball sample count must be positive, got {samples}")
    if not 0.0 < lam < lam0 <= 1.0:
        raise DomainError(f"need 0 < lam < lam0 <= 1, got ({lam}, {lam0})")
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")

    cap_rows = []
    caps_ok = True
    for radius in radii:
        for separation in separations:
            volume = geometry.cap_volume(radius, separation)
            bound = geometry.cap_volume_bound(radius, separation)
            ok = volume <= bound * (1.0 + 1e-12)
            caps_ok = caps_ok and ok
            cap_rows.append(
                {
                    "radius": radius,
                    "separation": separation,
                    "volume": volume,
                    "bound": bound,
                    "ok": ok,
                }
            )

    budget_rows = []
    totals = []
    for length in lengths:
        budget = spectral.flattening_budget(areas, length, lam, lam0, eps)
        totals.append(budget.total)
        budget_rows.append(
            {
                "tangle_radius": length,
                "e1": budget.e1,
                "e2": budget.e2,
                "e3": budget.e3,
                "total": budget.total,
            }
        )
    decreasing = all(b < a for a, b in zip(totals, totals[1:]))

    horoball = geometry.horoball_cover_check(samples, seed, exclusion_radius=exclusion)
    horoball_ok = horoball.max_multiplicity <= 3 and horoball.covered_fraction == 1.0

    passed = caps_ok and decreasing and horoball_ok
    report = _new_report(params)
    report.update(
        {
            "cap_sweep": cap_rows,
            "caps_within_bound": caps_ok,
            "budgets": budget_rows,
            "budget_decreasing": decreasing,
            "horoball": {
                "n_checked": horoball.n_checked,
                "n_excluded": horoball.n_excluded,
                "covered_fraction": horoball.covered_fraction,
                "max_multiplicity": horoball.max_multiplicity,
                "multiplicity_counts": horoball.multiplicity_counts,
            },
            "horoball_ok": horoball_ok,
            "passed": passed,
        }
    )
    header = ["radius", "separation", "volume", "bound", "ok"]
    table_out = (header, [[row[k] for k in header] for row in cap_rows])
    print(f"cap sweep: {len(cap_rows)} rows, all within bound: {caps_ok}")
    print(
        "budget totals over lengths "
        + ", ".join(f"{length:g}: {total:.6e}" for length, total in zip(lengths, totals))
        + f" (decreasing: {decreasing})"
    )
    print(
        f"horoball cover: {samples} samples, coverage {horoball.covered_fraction:.6f}, "
        f"max multiplicity {horoball.max_multiplicity}"
    )
    print("PASS" if passed else "FAIL")
    return (EXIT_OK if passed else EXIT_COMPUTE), report, table_out


_HANDLERS = {
    "verify-group": _cmd_verify_group,
    "scattering": _cmd_scattering,
    "delta": _cmd_delta,
    "cover": _cmd_cover,
    "bounds-and-budgets": _cmd_bounds_and_budgets,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        params = _merge_params(args)
        code, report, table = _HANDLERS[args.command](params)
        _write_output(params, report, table)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OctagapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return code


if __name__ == "__main__":
    sys.exit(main())
