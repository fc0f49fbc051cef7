"""Batch experiment runner.

Each subcommand reads a JSON config, runs one study, writes a CSV and a
JSON report next to it, and prints a single PASS/FAIL line. Exit codes:
0 study ran and met its thresholds, 1 configuration or I/O problem,
2 study ran but failed a threshold (or died partway with a solver error).

Outputs are written atomically (tempfile + rename) and floats are
serialized with repr(), so reruns with the same config and seed produce
byte-identical files.
"""

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile

import numpy as np

from .analysis import certify_constants, fit_order, run_convergence, run_convergence_hencky
from .energy import (
    EnergyProfile,
    complementary_energy,
    complementary_gradient,
    conjugate_stress,
    green_stress,
    legendre_transform,
)
from .errors import ConfigInvalid, StrainLimError, StudyFailed
from .families import FamilySpec, family_leading, working_domain
from .kinematics import RotationSpec
from .scalar1d import Scalar1DParams, oned_delta0_study
from .solver import solve_implicit
from .symtensor import SymTensor, frobenius, inner

COMMANDS = ("solve", "converge", "converge-hencky", "certify", "oned", "energy")

_FAMILY_KEYS = ("kind", "a", "p", "E0", "nu", "b", "c", "delta1", "delta_max", "base")
_ROTATION_KEYS = ("axis", "coefficient", "mode")

# Threshold defaults. Order windows come from the quadratic/linear claims the
# studies are meant to confirm; certification caps are the closed-form
# constants for each family kind.
_ORDER_FULL = (1.9, 2.1)
_ORDER_STRESS = (0.9, 1.1)
_SLOPE_1D = (0.9, 1.1)


@dataclasses.dataclass
class ExperimentConfig:
    command: str
    family: FamilySpec
    stress: "SymTensor | None" = None
    stresses: "tuple | None" = None  # scalar sweep, oned only
    rotation: "RotationSpec | None" = None
    deltas: "tuple | None" = None
    delta: "float | None" = None
    samples: int = 10000
    seed: int = 0
    output_dir: str = "."
    thresholds: dict = dataclasses.field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "family": _family_to_dict(self.family),
            "samples": self.samples,
            "seed": self.seed,
            "thresholds": dict(sorted(self.thresholds.items())),
        }
        if self.stress is not None:
            out["stress"] = list(self.stress.components())
        if self.stresses is not None:
            out["stresses"] = list(self.stresses)
        if self.rotation is not None:
            out["rotation"] = {
                "axis": list(self.rotation.axis),
                "coefficient": self.rotation.magnitude_coefficient,
                "mode": self.rotation.mode,
            }
        if self.deltas is not None:
            out["deltas"] = list(self.deltas)
        if self.delta is not None:
            out["delta"] = self.delta
        return out


def _family_to_dict(spec: FamilySpec) -> dict:
    d = {"kind": spec.kind, "a": spec.a, "p": spec.p, "E0": spec.E0, "nu": spec.nu,
         "b": spec.b, "c": spec.c, "delta1": spec.delta1}
    if spec.delta_max is not None:
        d["delta_max"] = spec.delta_max
    if spec.kind == "scaled_base":
        d["base"] = spec.base if isinstance(spec.base, str) else "custom"
    return d


def _require(cond, msg):
    if not cond:
        raise ConfigInvalid(msg)


def _as_float(value, name) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             "%s must be a number, got %r" % (name, value))
    v = float(value)
    _require(math.isfinite(v), "%s must be finite" % name)
    return v


def _parse_family(raw) -> FamilySpec:
    _require(isinstance(raw, dict), "family must be an object")
    unknown = set(raw) - set(_FAMILY_KEYS)
    _require(not unknown, "unknown family keys: %s" % sorted(unknown))
    _require("kind" in raw, "family.kind is required")
    kwargs = {"kind": raw["kind"]}
    for key in _FAMILY_KEYS[1:]:
        if key not in raw:
            continue
        if key == "base":
            _require(raw[key] == "power_law", "family.base must be 'power_law'")
            kwargs[key] = raw[key]
        elif key == "delta_max" and raw[key] is None:
            continue
        else:
            kwargs[key] = _as_float(raw[key], "family.%s" % key)
    try:
        return FamilySpec(**kwargs)
    except ValueError as exc:
        raise ConfigInvalid("bad family: %s" % exc)


def _parse_stress(raw) -> SymTensor:
    _require(isinstance(raw, (list, tuple)) and len(raw) == 6,
             "stress must be a list of six components [xx, yy, zz, xy, xz, yz]")
    return SymTensor(*[_as_float(v, "stress[%d]" % i) for i, v in enumerate(raw)])


def _parse_rotation(raw) -> RotationSpec:
    _require(isinstance(raw, dict), "rotation must be an object")
    unknown = set(raw) - set(_ROTATION_KEYS)
    _require(not unknown, "unknown rotation keys: %s" % sorted(unknown))
    _require("axis" in raw and "coefficient" in raw,
             "rotation needs axis and coefficient")
    axis = raw["axis"]
    _require(isinstance(axis, (list, tuple)) and len(axis) == 3,
             "rotation.axis must be a list of three numbers")
    axis = tuple(_as_float(v, "rotation.axis[%d]" % i) for i, v in enumerate(axis))
    coef = _as_float(raw["coefficient"], "rotation.coefficient")
    _require(coef >= 0.0, "rotation.coefficient must be nonnegative")
    mode = raw.get("mode", "exact_exponential")
    _require(mode == "exact_exponential", "rotation.mode must be 'exact_exponential'")
    return RotationSpec(axis=axis, magnitude_coefficient=coef, mode=mode)


def _parse_deltas(raw) -> tuple:
    _require(isinstance(raw, (list, tuple)) and len(raw) > 0,
             "deltas must be a non-empty list")
    vals = tuple(_as_float(v, "deltas[%d]" % i) for i, v in enumerate(raw))
    for v in vals:
        _require(v > 0.0, "deltas must be positive")
    for lo, hi in zip(vals[1:], vals):
        _require(lo < hi, "deltas must be strictly decreasing")
    return vals


_TOP_KEYS = ("command", "family", "stress", "stresses", "rotation", "deltas",
             "delta", "samples", "seed", "out", "thresholds")


def parse_config(raw: dict, command: str) -> ExperimentConfig:
    """Validate a raw config dict against what `command` needs."""
    _require(isinstance(raw, dict), "config root must be an object")
    unknown = set(raw) - set(_TOP_KEYS)
    _require(not unknown, "unknown config keys: %s" % sorted(unknown))
    if "command" in raw:
        _require(raw["command"] == command,
                 "config is for %r, not %r" % (raw["command"], command))

    cfg = ExperimentConfig(command=command, family=_parse_family(raw.get("family", {"kind": "power_law"})))

    if "thresholds" in raw:
        _require(isinstance(raw["thresholds"], dict), "thresholds must be an object")
        cfg.thresholds = dict(raw["thresholds"])
    if "samples" in raw:
        _require(isinstance(raw["samples"], int) and not isinstance(raw["samples"], bool)
                 and raw["samples"] > 0, "samples must be a positive integer")
        cfg.samples = raw["samples"]
    if "seed" in raw:
        _require(isinstance(raw["seed"], int) and not isinstance(raw["seed"], bool),
                 "seed must be an integer")
        cfg.seed = raw["seed"]
    if "out" in raw:
        _require(isinstance(raw["out"], str), "out must be a string")
        cfg.output_dir = raw["out"]

    if command in ("solve", "converge", "converge-hencky"):
        _require("stress" in raw, "%s needs a stress tensor" % command)
        cfg.stress = _parse_stress(raw["stress"])
    if command in ("converge", "converge-hencky"):
        _require("rotation" in raw, "%s needs a rotation" % command)
        cfg.rotation = _parse_rotation(raw["rotation"])
        _require("deltas" in raw, "%s needs a deltas list" % command)
        cfg.deltas = _parse_deltas(raw["deltas"])
    if command == "certify":
        _require("deltas" in raw, "certify needs a deltas list")
        cfg.deltas = _parse_deltas(raw["deltas"])
    if command in ("solve", "oned", "energy"):
        _require("delta" in raw, "%s needs a delta" % command)
        cfg.delta = _as_float(raw["delta"], "delta")
        _require(cfg.delta > 0.0, "delta must be positive")
    if command == "oned":
        _require(cfg.family.kind == "power_law",
                 "oned uses the scalar power law; family.kind must be power_law")
        if "stresses" in raw:
            _require(isinstance(raw["stresses"], (list, tuple)) and raw["stresses"],
                     "stresses must be a non-empty list")
            cfg.stresses = tuple(_as_float(v, "stresses[%d]" % i)
                                 for i, v in enumerate(raw["stresses"]))
        elif "stress" in raw:
            cfg.stresses = (_as_float(raw["stress"], "stress"),)
        else:
            raise ConfigInvalid("oned needs stresses (list) or stress (scalar)")
    if command == "energy":
        _require(cfg.family.kind in ("power_law", "scaled_base"),
                 "energy needs a power_law or scaled_base family")
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".strainlim-")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: str, header: tuple, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_report(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


# ---------------------------------------------------------------------------
# command runners. Each returns (checks, header, csv_rows, extra_report)
# where checks is a list of (name, ok, detail) triples.


def _in_window(value, window) -> bool:
    return value is not None and window[0] <= value <= window[1]


def _window(thresholds, key, default):
    raw = thresholds.get(key, default)
    _require(isinstance(raw, (list, tuple)) and len(raw) == 2,
             "threshold %s must be a [lo, hi] pair" % key)
    return (_as_float(raw[0], key), _as_float(raw[1], key))


def _run_converge(cfg: ExperimentConfig, hencky: bool):
    runner = run_convergence_hencky if hencky else run_convergence
    report = runner(cfg.family, cfg.stress, cfg.rotation, cfg.deltas)
    rows = [(r.delta, r.delta0, r.residual_full, r.residual_leading,
             r.stress_gap, r.strain_gap) for r in report.records]
    header = ("delta", "delta0", "residual_full", "residual_leading",
              "stress_gap", "strain_gap")

    w_full = _window(cfg.thresholds, "order_full", _ORDER_FULL)
    w_lead = _window(cfg.thresholds, "order_leading", _ORDER_FULL)
    w_stress = _window(cfg.thresholds, "order_stress", _ORDER_STRESS)
    row_factor = _as_float(cfg.thresholds.get("stress_row_factor", 10.0),
                           "stress_row_factor")
    sn = frobenius(cfg.stress)

    checks = [("no_failed_rows", not report.failures,
               "failures=%d" % len(report.failures))]
    checks.append(("order_full", _in_window(report.fitted_order_full, w_full),
                   "fitted=%r window=%r" % (report.fitted_order_full, list(w_full))))
    lead_ok = report.fitted_order_leading is None or _in_window(
        report.fitted_order_leading, w_lead)
    checks.append(("order_leading", lead_ok,
                   "fitted=%r window=%r" % (report.fitted_order_leading, list(w_lead))))
    checks.append(("order_stress", _in_window(report.fitted_order_stress, w_stress),
                   "fitted=%r window=%r" % (report.fitted_order_stress, list(w_stress))))
    bad = [r for r in report.records if r.stress_gap > row_factor * r.delta * sn]
    checks.append(("stress_rows", not bad,
                   "first violation at delta=%r" % (bad[0].delta if bad else None)))
    return checks, header, rows, {"report": _jsonable(report)}


_CERT_EPS = 1e-9


def _certify_caps(spec: FamilySpec, thresholds: dict) -> dict:
    if spec.kind == "power_law":
        caps = {"C0": 1.0 + _CERT_EPS, "C1": 1e-12, "D0": 2.0 * spec.a + 1e-6}
    elif spec.kind == "scaled_base":
        caps = {"C0": 1.0 + _CERT_EPS, "C1": None, "D0": None}
    else:
        bound = (1.0 + 4.0 * spec.nu) * spec.c / (spec.E0 * (1.0 - 2.0 * spec.a * spec.b))
        caps = {"C0": bound, "C1": None, "D0": None}
    for key in ("C0", "C1", "D0", "C3"):
        if key in thresholds:
            caps[key] = _as_float(thresholds[key], key)
    return caps


def _run_certify(cfg: ExperimentConfig):
    report = certify_constants(cfg.family, cfg.deltas, cfg.samples, cfg.seed)
    rows = [(r.delta, r.C0_hat, r.C1_hat, r.D0_hat, r.C3_hat) for r in report.rows]
    header = ("delta", "C0_hat", "C1_hat", "D0_hat", "C3_hat")

    caps = _certify_caps(cfg.family, cfg.thresholds)
    checks = []
    for key, value in (("C0", report.C0_hat), ("C1", report.C1_hat),
                       ("D0", report.D0_hat), ("C3", report.C3_hat)):
        if not math.isfinite(value):
            checks.append((key + "_finite", False, "value=%r" % value))
            continue
        cap = caps.get(key)
        if cap is None:
            checks.append((key + "_finite", True, "value=%r" % value))
        else:
            checks.append((key, value <= cap, "value=%r cap=%r" % (value, cap)))
    return checks, header, rows, {"report": _jsonable(report)}


def _run_oned(cfg: ExperimentConfig):
    params = Scalar1DParams(a=cfg.family.a, p=cfg.family.p, delta=cfg.delta)
    study = oned_delta0_study(params, cfg.stresses)
    header = ("Sbar", "E", "eps", "delta0", "sigma", "gap")
    rows = [(r["Sbar"], r["E"], r["eps"], r["delta0"], r["sigma"], r["gap"])
            for r in study.rows]
    w = _window(cfg.thresholds, "slope", _SLOPE_1D)
    slope_ok = study.slope is None or _in_window(study.slope, w)
    checks = [("gap_slope", slope_ok,
               "fitted=%r window=%r" % (study.slope, list(w)))]
    extra = {"slope": study.slope, "ratio_max": study.ratio_max,
             "quad_constant_max": study.quad_constant_max}
    return checks, header, rows, extra


def _run_solve(cfg: ExperimentConfig):
    report = solve_implicit(cfg.family, cfg.delta, cfg.stress)
    comps = report.solution.components()
    header = ("delta", "iterations", "residual", "method", "interior_ball_ok",
              "xx", "yy", "zz", "xy", "xz", "yz")
    rows = [(cfg.delta, report.iterations, report.residual, report.method,
             report.interior_ball_ok) + comps]
    tol = _as_float(cfg.thresholds.get("residual", 1e-10), "residual")
    checks = [("residual", report.residual <= tol,
               "residual=%r cap=%r" % (report.residual, tol))]
    return checks, header, rows, {"report": _jsonable(report)}


def _energy_strain_radius(spec: FamilySpec) -> float:
    # Saturation value of the scalar law at 99% of the stress ball; conjugate
    # stresses of strains drawn inside this radius stay within the ball.
    u = spec.a * 0.99 * spec.c
    return min(0.9, u * (1.0 + u ** spec.p) ** (-1.0 / spec.p))


def _run_energy(cfg: ExperimentConfig):
    profile = EnergyProfile(cfg.family)
    spec = cfg.family
    rng = np.random.default_rng(cfg.seed)
    n = min(cfg.samples, 1000)
    grad_tol = _as_float(cfg.thresholds.get("grad_tol", 1e-6), "grad_tol")
    fy_tol = _as_float(cfg.thresholds.get("fenchel_tol", 1e-9), "fenchel_tol")
    rt_tol = _as_float(cfg.thresholds.get("roundtrip_tol", 1e-8), "roundtrip_tol")

    stress_r = 0.9 * spec.c
    strain_r = _energy_strain_radius(spec)
    power = spec.kind == "power_law"
    zero = SymTensor()

    rows = []
    worst = {"grad": 0.0, "fenchel": 0.0, "roundtrip": 0.0}
    for i in range(n):
        g = rng.standard_normal(6)
        u = rng.random(3)
        S = _cli_ball_point(g, u[0], stress_r)
        grad_err = frobenius(complementary_gradient(profile, S)
                             - family_leading(spec, zero, S))

        fy_err = float("nan")
        rt_err = float("nan")
        if power:
            g2 = rng.standard_normal(6)
            Et = _cli_ball_point(g2, u[1], strain_r)
            star = conjugate_stress(profile, Et)
            fy_err = abs(legendre_transform(profile, Et)
                         + complementary_energy(profile, star) - inner(Et, star))
            g3 = rng.standard_normal(6)
            eps = _cli_ball_point(g3, u[2], strain_r * cfg.delta)
            sig = green_stress(profile, cfg.delta, eps)
            back = family_leading(spec, zero, sig) * cfg.delta
            rt_err = frobenius(back - eps)
            worst["fenchel"] = max(worst["fenchel"], fy_err)
            worst["roundtrip"] = max(worst["roundtrip"], rt_err)
        worst["grad"] = max(worst["grad"], grad_err)
        rows.append((i, grad_err, fy_err, rt_err))

    header = ("index", "grad_error", "fenchel_error", "roundtrip_error")
    checks = [("grad", worst["grad"] <= grad_tol,
               "max=%r cap=%r" % (worst["grad"], grad_tol))]
    if power:
        checks.append(("fenchel", worst["fenchel"] <= fy_tol,
                       "max=%r cap=%r" % (worst["fenchel"], fy_tol)))
        checks.append(("roundtrip", worst["roundtrip"] <= rt_tol,
                       "max=%r cap=%r" % (worst["roundtrip"], rt_tol)))
    return checks, header, rows, {"worst": dict(worst), "probes": n}


def _cli_ball_point(gauss, u, radius) -> SymTensor:
    norm = float(np.sqrt(np.sum(gauss * gauss)))
    if norm < 1e-300:
        gauss = np.ones(6)
        norm = float(np.sqrt(6.0))
    rho = radius * float(u) ** (1.0 / 6.0)
    v = gauss * (rho / norm)
    s = 1.0 / math.sqrt(2.0)
    return SymTensor(float(v[0]), float(v[1]), float(v[2]),
                     float(v[3]) * s, float(v[4]) * s, float(v[5]) * s)


_RUNNERS = {
    "solve": lambda cfg: _run_solve(cfg),
    "converge": lambda cfg: _run_converge(cfg, hencky=False),
    "converge-hencky": lambda cfg: _run_converge(cfg, hencky=True),
    "certify": lambda cfg: _run_certify(cfg),
    "oned": lambda cfg: _run_oned(cfg),
    "energy": lambda cfg: _run_energy(cfg),
}


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run one configured study and write its CSV and JSON outputs.

    Returns the JSON report payload on success. Raises StudyFailed if the
    study dies partway or misses a threshold; outputs that could be written
    are written either way.
    """
    try:
        checks, header, rows, extra = _RUNNERS[cfg.command](cfg)
    except ConfigInvalid:
        raise
    except StrainLimError as exc:
        raise StudyFailed("%s: %s" % (type(exc).__name__, exc))

    stem = cfg.command.replace("-", "_")
    csv_path = os.path.join(cfg.output_dir, stem + ".csv")
    json_path = os.path.join(cfg.output_dir, stem + "_report.json")
    _write_csv(csv_path, header, rows)

    ok = all(passed for _, passed, _ in checks)
    payload = {
        "command": cfg.command,
        "config": cfg.to_dict(),
        "verdict": "PASS" if ok else "FAIL",
        "checks": [{"name": n, "ok": p, "detail": d} for n, p, d in checks],
        "csv": csv_path,
    }
    payload.update(_jsonable(extra))
    _write_report(json_path, payload)

    if not ok:
        name, detail = next((n, d) for n, p, d in checks if not p)
        raise StudyFailed("check %s: %s" % (name, detail))
    return payload


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strainlim",
        description="Strain-limited constitutive model studies.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("solve", "solve the implicit relation at one delta"),
        ("converge", "strain-driven convergence sweep"),
        ("converge-hencky", "stress-driven convergence sweep"),
        ("certify", "sample family constants over the admissible ball"),
        ("oned", "scalar diagnostic sweep"),
        ("energy", "complementary energy consistency probes"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--config", required=True, help="path to JSON config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="RNG seed override")
    return parser


def _resolve_seed(cli_seed, raw_config) -> "int | None":
    if cli_seed is not None:
        return cli_seed
    if "seed" in raw_config:
        return None  # keep what parse_config read
    env = os.environ.get("STRAINLIM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigInvalid("STRAINLIM_SEED must be an integer, got %r" % env)
    return None


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return 0 if exc.code in (0, None) else 1

    try:
        try:
            with open(args.config, "r") as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise ConfigInvalid("cannot read config: %s" % exc)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid("config is not valid JSON: %s" % exc)
        cfg = parse_config(raw, args.command)
        seed = _resolve_seed(args.seed, raw)
        if seed is not None:
            cfg.seed = seed
        if args.out is not None:
            cfg.output_dir = args.out
        try:
            payload = run_experiment(cfg)
        except OSError as exc:
            raise ConfigInvalid("cannot write outputs: %s" % exc)
        print("PASS %s kind=%s checks=%d csv=%s"
              % (cfg.command, cfg.family.kind, len(payload["checks"]),
                 payload["csv"]))
        return 0
    except StudyFailed as exc:
        print("FAIL %s kind=%s %s" % (args.command, cfg.family.kind, exc))
        return 2
    except ConfigInvalid as exc:
        print("FAIL config: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
