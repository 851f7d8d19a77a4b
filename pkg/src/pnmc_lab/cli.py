"""Command-line front end.

Each command validates its configuration, runs the computation, and only then
writes its files, so a failed run leaves the output directory untouched.
Errors go to stderr as a one-line JSON object; exit code 2 means bad input,
3 a numerical failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import canonical, frame_invariants, gridio, meridian, pde, reconstruct
from .errors import NumericalError, PnmcError, ValidationError
from .surface import ParamDomain, first_form, eval_jet

COMMANDS = ("invariants", "classify", "canonical", "residuals", "meridian", "reconstruct", "roundtrip")
SURFACE_COMMANDS = ("invariants", "classify", "canonical", "meridian")

DEFAULTS = {
    "family": meridian.EUCLIDEAN_FAMILY,
    "kappa": "unit",
    "epsilon": None,
    "h": None,
    "curve_step": 1e-3,
    "tol_beta": 1e-6,
    "drift_bound": reconstruct.DRIFT_BOUND,
    "fields": None,
    "out": "pnmc_out",
}

ANCHORS = {
    "invariants": "geometric functions of the geometric frame (gamma, nu, lambda, mu, beta)",
    "classify": "parallel normalized mean curvature test: beta1 = beta2 = 0",
    "canonical": "canonical parameters: E = G = 1/|mu|, F = 0",
    "residuals": "PDE system for (lambda, mu, nu) in canonical parameters",
    "meridian": "meridian surface z = f(u) l(v) + g(u) axis",
    "reconstruct": "moving-frame equations with beta1 = beta2 = 0 in canonical parameters",
    "roundtrip": "existence and uniqueness up to motion from (lambda, mu, nu)",
}

KAPPA_PRESETS = {
    "unit": lambda: meridian.constant_kappa(1.0),
    "sine": lambda: meridian.sine_kappa(1.0, 0.3, 1.0),
}


def parse_kappa(spec):
    """A preset name or comma-separated polynomial coefficients c0,c1,..."""
    if isinstance(spec, (int, float)):
        return meridian.constant_kappa(spec)
    if isinstance(spec, (list, tuple)):
        return meridian.polynomial_kappa(spec)
    spec = str(spec).strip()
    if spec in KAPPA_PRESETS:
        return KAPPA_PRESETS[spec]()
    try:
        coeffs = [float(c) for c in spec.split(",")]
    except ValueError:
        raise ValidationError(f"kappa must be one of {sorted(KAPPA_PRESETS)} or coefficients "
                              f"'c0,c1,...', got {spec!r}") from None
    return meridian.polynomial_kappa(coeffs)


def parse_epsilon(value):
    if value is None or str(value).lower() in ("none", "euclidean", ""):
        return None
    try:
        eps = int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"epsilon must be 1, -1 or none, got {value!r}") from None
    if eps not in (1, -1):
        raise ValidationError(f"epsilon must be 1, -1 or none, got {value!r}")
    return eps


def build_parser():
    p = argparse.ArgumentParser(prog="pnmc-lab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with option values; flags override it")
    p.add_argument("--family", choices=meridian.FAMILIES)
    p.add_argument("--kappa", help="preset (unit, sine) or polynomial coefficients c0,c1,...")
    p.add_argument("--umin", type=float)
    p.add_argument("--umax", type=float)
    p.add_argument("--vmin", type=float)
    p.add_argument("--vmax", type=float)
    p.add_argument("--nu", type=int, help="grid nodes along u")
    p.add_argument("--nv", type=int, help="grid nodes along v")
    p.add_argument("--epsilon", help="1, -1 or none (Euclidean)")
    p.add_argument("--h", type=float, help="finite-difference step for frame derivatives")
    p.add_argument("--curve-step", type=float, dest="curve_step", help="RK4 step for the directrix curve")
    p.add_argument("--tol-beta", type=float, dest="tol_beta")
    p.add_argument("--drift-bound", type=float, dest="drift_bound")
    p.add_argument("--fields", help="grid file with lambda, mu, nu columns (default: family fields)")
    p.add_argument("--out", help="output directory")
    return p


def resolve_config(args):
    """Merge built-in defaults, the config file and explicit flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a JSON object")
        known = set(DEFAULTS) | {"umin", "umax", "vmin", "vmax", "nu", "nv"}
        unknown = set(loaded) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    if cfg["family"] not in meridian.FAMILIES:
        raise ValidationError(f"unknown family {cfg['family']!r}")
    cfg["kappa_profile"] = parse_kappa(cfg["kappa"])
    cfg["epsilon"] = parse_epsilon(cfg["epsilon"]) if cfg["epsilon"] is not None else (
        None if cfg["family"] == meridian.EUCLIDEAN_FAMILY else 1)
    if args.command in SURFACE_COMMANDS:
        box = (0.0, 2.0, 0.0, 2.0)
        n = 60
    else:
        box = pde.default_canonical_box(cfg["family"])
        n = 50
    for key, default in zip(("umin", "umax", "vmin", "vmax"), box):
        cfg[key] = float(cfg.get(key, default) if cfg.get(key) is not None else default)
    for key in ("nu", "nv"):
        cfg[key] = cfg.get(key) if cfg.get(key) is not None else n
    cfg["domain"] = ParamDomain(cfg["umin"], cfg["umax"], cfg["vmin"], cfg["vmax"], cfg["nu"], cfg["nv"])
    for key in ("h", "curve_step", "tol_beta", "drift_bound"):
        if cfg[key] is not None and not float(cfg[key]) > 0:
            raise ValidationError(f"{key} must be positive")
    return cfg


def _params(cfg):
    """Run parameters recorded in every sidecar."""
    return {"command": cfg["command"], "family": cfg["family"], "kappa": cfg["kappa_profile"].description,
            "epsilon": cfg["epsilon"], "h": cfg["h"], "curve_step": cfg["curve_step"],
            "tol_beta": cfg["tol_beta"], "drift_bound": cfg["drift_bound"], "fields": cfg["fields"],
            "domain": gridio.domain_dict(cfg["domain"])}


def _surface(cfg):
    d = cfg["domain"]
    lo, hi = d.v_min, d.v_max
    pad = 0.05 * (hi - lo) + 0.01
    v_range = (lo - pad, hi + pad)
    origin = min(max(0.0, v_range[0]), v_range[1])
    make = meridian.spherical_curve if cfg["family"] == meridian.EUCLIDEAN_FAMILY else meridian.paraboloid_curve
    curve = make(cfg["kappa_profile"], v_range, cfg["curve_step"], origin)
    return meridian.meridian_surface(cfg["family"], curve)


def _fields(cfg):
    """(sampler, grid fields, domain) from --fields or the family's closed forms.

    A fields file brings its own grid, which replaces the configured one.
    """
    d = cfg["domain"]
    if cfg["fields"]:
        fd, cols = gridio.read_grid(cfg["fields"])
        missing = {"lambda", "mu", "nu"} - set(cols)
        if missing:
            raise ValidationError(f"fields file lacks columns {sorted(missing)}")
        spacing, origin = (fd.h_u, fd.h_v), (fd.u_min, fd.v_min)
        grid = tuple(pde.GridField(cols[k], spacing, origin) for k in ("lambda", "mu", "nu"))
        return grid, grid, fd
    f = pde.family_fields(cfg["family"], cfg["kappa_profile"])
    return f, pde.family_solution(cfg["family"], cfg["kappa_profile"], d), d


def cmd_invariants(cfg):
    d = cfg["domain"]
    m = _surface(cfg)
    g = frame_invariants.invariant_grid(m, d, h=cfg["h"])
    gf = g.functions
    cols = {"E": g.first.E, "F": g.first.F, "G": g.first.G, "lambda": gf.lam, "mu": gf.mu,
            "nu": gf.nu, "nu1": gf.nu1, "nu2": gf.nu2, "gamma1": gf.gamma1, "gamma2": gf.gamma2,
            "beta1": gf.beta1, "beta2": gf.beta2}
    return {"invariants.csv": cols}, {"sup_beta": float(np.max(np.maximum(np.abs(gf.beta1), np.abs(gf.beta2))))}


def cmd_classify(cfg):
    m = _surface(cfg)
    c = frame_invariants.classify_pnmc(m, cfg["domain"], tol_beta=cfg["tol_beta"], h=cfg["h"])
    return {}, {"tag": c.tag.value, "sup_beta": c.sup_beta, "nu_sum_variation": c.nu_sum_variation}


def cmd_canonical(cfg):
    d = cfg["domain"]
    m = _surface(cfg)
    U, V = d.mesh()
    rep = canonical.meridian_canonical_chart(cfg["family"])
    ub, vb = rep.forward(U, V)
    chart_res = canonical.canonicity_residual_at(canonical.compose(m, rep), ub, vb)
    factors = canonical.separable_factors(m, d)
    mi, irep = canonical.reparametrize_integral(m, factors)
    iu, iv = irep.forward(U, V)
    int_res = canonical.canonicity_residual_at(mi, iu, iv)
    cols = {"ubar": ub, "vbar": vb, "residual_closed_form": chart_res,
            "ubar_integral": iu, "vbar_integral": iv, "residual_integral": int_res}
    report = {"original_chart_residual": canonical.canonicity_residual(m, d),
              "closed_form_chart": {"kind": rep.kind, "formula": rep.description,
                                    "residual": float(np.max(chart_res))},
              "integral_chart": {"kind": irep.kind, "formula": irep.description,
                                 "residual": float(np.max(int_res)),
                                 "separability_error": factors.separability_error}}
    return {"canonical.csv": cols}, report


def cmd_residuals(cfg):
    _, (lam, mu, nu), _ = _fields(cfg)
    eps = cfg["epsilon"]
    res, _ = pde.residual_fields(lam, mu, nu, eps)
    rep = pde.residual_euclidean(lam, mu, nu) if eps is None else pde.residual_minkowski(lam, mu, nu, eps)
    cols = {"r1": res[0], "r2": res[1], "r3": res[2]}
    return {"residuals.csv": (lam.domain, cols)}, rep.as_dict()


def cmd_meridian(cfg):
    d = cfg["domain"]
    m = _surface(cfg)
    U, V = d.mesh()
    j = eval_jet(m, U, V, order=2)
    z = j.z
    ff = first_form(j, m.signature)
    cols = {"z1": z[..., 0], "z2": z[..., 1], "z3": z[..., 2], "z4": z[..., 3],
            "E": ff.E, "F": ff.F, "G": ff.G}
    return {"meridian.csv": cols}, {"surface": m.name, "signature": m.signature.name}


def cmd_reconstruct(cfg):
    sampler, _, d = _fields(cfg)
    rec = reconstruct.integrate_surface(sampler, cfg["epsilon"], None, d, cfg["drift_bound"])
    z = rec.z
    cols = {"z1": z[..., 0], "z2": z[..., 1], "z3": z[..., 2], "z4": z[..., 3], "drift": rec.drift}
    defect = reconstruct.compatibility_defect(sampler, cfg["epsilon"], None, d)
    return {"reconstruct.csv": (d, cols)}, {"max_drift": rec.max_drift, "compatibility_defect": defect}


def cmd_roundtrip(cfg):
    sampler, _, d = _fields(cfg)
    r = reconstruct.roundtrip(sampler, cfg["epsilon"], d, drift_bound=cfg["drift_bound"])
    out = r.as_dict()
    out["interior"] = gridio.domain_dict(r.interior)
    return {}, out


HANDLERS = {
    "invariants": cmd_invariants, "classify": cmd_classify, "canonical": cmd_canonical,
    "residuals": cmd_residuals, "meridian": cmd_meridian, "reconstruct": cmd_reconstruct,
    "roundtrip": cmd_roundtrip,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def run(cfg):
    """Compute, then write CSV grids, their sidecars and the command report."""
    grids, report = HANDLERS[cfg["command"]](cfg)
    params = _params(cfg)
    anchor = ANCHORS[cfg["command"]]
    rendered = {}
    for name, payload in grids.items():
        domain, cols = payload if isinstance(payload, tuple) else (cfg["domain"], payload)
        rendered[name] = gridio.format_grid(domain, cols)
        rendered[name[:-4] + ".grid.json"] = gridio.dump_json(_jsonable({
            "anchor": anchor, "columns": list(cols), "grid": gridio.domain_dict(domain),
            "format": "u v columns, u-major, %.17g", "parameters": params}))
    rendered[cfg["command"] + ".json"] = gridio.dump_json(_jsonable(
        {"anchor": anchor, "parameters": params, "result": report}))
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    for name, text in rendered.items():
        (out / name).write_text(text, encoding="ascii")
    return sorted(rendered)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        files = run(cfg)
    except ValidationError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": 2}), file=sys.stderr)
        return 2
    except (NumericalError, PnmcError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": 3}), file=sys.stderr)
        return 3
    print(json.dumps({"command": cfg["command"], "out": str(cfg["out"]), "files": files}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
