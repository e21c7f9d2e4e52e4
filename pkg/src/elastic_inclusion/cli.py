"""Command-line drivers for forward verification and boundary reconstruction.

Configuration is an INI file; see ``configs/`` for the shipped scenarios and
the README for the schema.  Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

import argparse
import configparser
import csv
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .forward import (
    SOLVERS,
    ScatteringProblem,
    SingularSystemError,
    check_sides,
    convergence_study,
    farfield_angles,
)
from .geometry import (
    SHAPES,
    DegenerateCurveError,
    NonPositiveRadiusError,
    RadialTrigCurve,
    polar_radius,
    radial_l2_error,
    shape,
)
from .inverse import (
    ReconstructionConfig,
    ReconstructionError,
    add_noise,
    plane_wave_illuminations,
    reconstruct,
    synthetic_data,
)
from .media import ElasticMedium

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
CURVE_SAMPLES = 256

# source points used when a verify-forward config does not give them
DEFAULT_SOURCES = {
    "peanut": ((0.0, 0.2), (0.4, 0.6)),
    "apple": ((0.0, 0.2), (0.4, 0.6)),
    "kite": ((0.5, 0.5), (-1.0, 0.5)),
}


class ConfigError(ValueError):
    pass


class RunConfig:
    """Validated view of an INI configuration file."""

    def __init__(self, path, mode):
        self.path = Path(path)
        try:
            self.raw = self.path.read_bytes()
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
        self.sha256 = hashlib.sha256(self.raw).hexdigest()
        self.parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            self.parser.read_string(self.raw.decode("utf-8"), source=str(path))
        except (configparser.Error, UnicodeDecodeError) as exc:
            raise ConfigError(str(exc)) from None
        declared = self._get("run", "mode", str, mode)
        if declared != mode:
            raise ConfigError(f"{self.path}: [run] mode = {declared!r} but the command is {mode!r}")
        self.mode = mode
        self.interior, self.exterior = self._media()
        self.shape_name, self.curve = self._geometry()

    # -- low-level accessors with section/key attribution

    def _get(self, section, key, conv, default=None):
        if not self.parser.has_option(section, key):
            if default is None:
                raise ConfigError(f"{self.path}: missing [{section}] {key}")
            return default
        text = self.parser.get(section, key)
        try:
            return conv(text)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{self.path}: [{section}] {key} = {text!r}: {exc}") from None

    def _floats(self, section, key, default=None):
        return self._get(section, key, _float_list, default)

    def _media(self):
        g = lambda key, d=None: self._get("media", key, float, d)
        ext = (g("lambda_e"), g("mu_e"), g("rho_e", 1.0), g("omega"))
        inn = (g("lambda_i"), g("mu_i"), g("rho_i", 1.0), g("omega"))
        try:
            exterior = ElasticMedium(*ext)
            interior = ElasticMedium(*inn)
        except ValueError as exc:
            raise ConfigError(f"{self.path}: [media] {exc}") from None
        return interior, exterior

    def _geometry(self):
        name = self._get("geometry", "shape", str)
        if name == "radial":
            a = self._floats("geometry", "a")
            b = self._floats("geometry", "b", [0.0] * (len(a) - 1))
            try:
                curve = RadialTrigCurve(a, b, name="radial")
            except ValueError as exc:
                raise ConfigError(f"{self.path}: [geometry] {exc}") from None
            t = np.arange(4 * CURVE_SAMPLES) * 2 * np.pi / (4 * CURVE_SAMPLES)
            if np.min(curve.radius(t)) <= 0:
                raise ConfigError(f"{self.path}: [geometry] radial coefficients give a non-positive radius")
            return name, curve
        if name not in SHAPES:
            raise ConfigError(
                f"{self.path}: [geometry] shape = {name!r}; choose from {sorted(SHAPES) + ['radial']}"
            )
        return name, shape(name)

    # -- mode-specific blocks

    def forward_settings(self):
        z_i0, z_e0 = DEFAULT_SOURCES.get(self.shape_name, (None, None))
        z_i = self._floats("geometry", "z_i", z_i0 and list(z_i0))
        z_e = self._floats("geometry", "z_e", z_e0 and list(z_e0))
        for key, z in (("z_i", z_i), ("z_e", z_e)):
            if len(z) != 2:
                raise ConfigError(f"{self.path}: [geometry] {key} needs two coordinates")
        try:
            check_sides(self.curve, z_i, z_e)
        except ValueError as exc:
            raise ConfigError(f"{self.path}: [geometry] {exc}") from None
        n_list = self._get("numerics", "n_list", _int_list)
        if not n_list or n_list != sorted(set(n_list)) or n_list[0] < 2:
            raise ConfigError(f"{self.path}: [numerics] n_list must be strictly ascending integers >= 2")
        reps = self._get("numerics", "representation", _str_list, ["Combined"])
        for r in reps:
            if r not in SOLVERS:
                raise ConfigError(
                    f"{self.path}: [numerics] representation {r!r}; choose from {list(SOLVERS)}"
                )
        return z_i, z_e, n_list, reps

    def inverse_settings(self, seed=None, threads=1):
        s = "inverse"
        L = self._get(s, "illuminations", int)
        if L < 1:
            raise ConfigError(f"{self.path}: [inverse] illuminations must be >= 1")
        kind = self._get(s, "wave", str, "P")
        if kind not in ("P", "S"):
            raise ConfigError(f"{self.path}: [inverse] wave must be P or S")
        try:
            return ReconstructionConfig(
                m=self._get(s, "m", int),
                n=self._get("numerics", "n", int),
                lambda0=self._get(s, "lambda0", float, 0.8),
                decay=self._get(s, "decay", float, 2.0 / 3.0),
                p=self._get(s, "p", float, 1.0),
                max_iter=self._get(s, "max_iter", int),
                r0=self._get(s, "r0", float),
                illuminations=plane_wave_illuminations(L, kind),
                noise_delta=self._get(s, "noise_delta", float, 0.0),
                rng_seed=seed if seed is not None else self._get(s, "seed", int, 0),
                early_stop=self._get(s, "early_stop", _bool, False),
                threads=threads,
            )
        except ValueError as exc:
            raise ConfigError(f"{self.path}: [inverse] {exc}") from None

    def output_dir(self, override=None):
        return Path(override) if override else Path(self._get("output", "directory", str, "out"))


def _float_list(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _int_list(text):
    return [int(v) for v in text.replace(",", " ").split()]


def _str_list(text):
    return [v for v in text.replace(",", " ").split()]


def _bool(text):
    v = text.strip().lower()
    if v in ("1", "yes", "true", "on"):
        return True
    if v in ("0", "no", "false", "off"):
        return False
    raise ValueError("expected a boolean")


# ----------------------------------------------------------------------------
# output helpers


def _header(cfg):
    return f"# artifact {__version__} config-sha256 {cfg.sha256}"


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(path, cfg, columns, rows):
    with open(path, "w", newline="") as fh:
        fh.write(_header(cfg) + "\r\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_summary(path, cfg, payload):
    doc = {"artifact": __version__, "config_sha256": cfg.sha256}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _prepare_out(out):
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory {out}: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")
    return out


# ----------------------------------------------------------------------------
# drivers


def run_verify_forward(cfg, out):
    z_i, z_e, n_list, reps = cfg.forward_settings()
    out = _prepare_out(out)
    problem = ScatteringProblem.create(cfg.interior, cfg.exterior, cfg.curve, n_list[0])
    tables = {}
    for rep in reps:
        rows = convergence_study(problem, z_i, z_e, n_list, rep)
        name = f"convergence_{cfg.shape_name}_{rep}.csv"
        write_table(
            out / name, cfg,
            ["n", "re_up1", "im_up1", "re_us2", "im_us2", "sup_error"],
            [(r.n, r.up0.real, r.up0.imag, r.us0.real, r.us0.imag, r.error) for r in rows],
        )
        tables[rep] = {"file": name, "n": [r.n for r in rows], "sup_error": [r.error for r in rows]}
        print(f"{cfg.shape_name} {rep}: " + "  ".join(f"n={r.n} err={r.error:.3e}" for r in rows))
    write_summary(out / "summary.json", cfg, {
        "mode": "verify-forward",
        "shape": cfg.shape_name,
        "z_i": list(z_i),
        "z_e": list(z_e),
        "tables": tables,
    })


def run_reconstruct(cfg, out, seed=None, threads=1):
    rc = cfg.inverse_settings(seed, threads)
    out = _prepare_out(out)
    angles = farfield_angles(rc.n)
    data = synthetic_data(cfg.interior, cfg.exterior, cfg.curve, rc.n, rc.illuminations, angles)
    if rc.noise_delta > 0:
        data = [add_noise(d, rc.noise_delta, rc.rng_seed + i) for i, d in enumerate(data)]

    failure = None
    try:
        state = reconstruct(rc, data, cfg.interior, cfg.exterior)
    except ReconstructionError as exc:
        if exc.state is None or not exc.state.residual_history:
            raise
        failure, state = str(exc), exc.state
        state.stop_reason = "aborted"

    m = rc.m
    cols = ["iter", "lambda", "residual"] + [f"a{k}" for k in range(m + 1)] + [f"b{k}" for k in range(1, m + 1)]
    rows = []
    for k, coeffs in enumerate(state.trajectory):
        lam = rc.lambda0 * rc.decay ** (k - 1) if k > 0 else ""
        res = state.residual_history[k] if k < len(state.residual_history) else state.final_residual
        rows.append([k, lam, "" if res is None else res] + list(coeffs))
    write_table(out / "trajectory.csv", cfg, cols, rows)

    theta = np.arange(CURVE_SAMPLES) * 2 * np.pi / CURVE_SAMPLES
    exact = polar_radius(cfg.curve, theta)
    initial = np.full(CURVE_SAMPLES, rc.r0)
    recon = state.r.radius(theta)
    write_table(
        out / "curves.csv", cfg,
        ["theta", "r_exact", "r_initial", "r_reconstructed"],
        zip(theta, exact, initial, recon),
    )
    err = radial_l2_error(state.r, cfg.curve)
    res0 = state.residual_history[0]
    summary = {
        "mode": "reconstruct",
        "shape": cfg.shape_name,
        "illuminations": len(rc.illuminations),
        "m": m,
        "n": rc.n,
        "r0": rc.r0,
        "noise_delta": rc.noise_delta,
        "seed": rc.rng_seed,
        "iterations": state.iter,
        "stop_reason": state.stop_reason,
        "failure": failure,
        "initial_residual": res0,
        "final_residual": state.final_residual,
        "radial_l2_error": err,
        "coefficients": {"a": state.r.a.tolist(), "b": state.r.b.tolist()},
    }
    write_summary(out / "summary.json", cfg, summary)
    print(f"{cfg.shape_name}: {state.iter} iterations ({state.stop_reason}), radial L2 error {err:.4e}")
    if failure is not None:
        raise ReconstructionError(failure)


# ----------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="elastic-inclusion", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    vf = sub.add_parser("verify-forward", help="convergence tables against the point-source oracle")
    vf.add_argument("--config", required=True)
    vf.add_argument("--out", help="output directory (overrides [output] directory)")
    rc = sub.add_parser("reconstruct", help="reconstruct a boundary from synthetic far-field data")
    rc.add_argument("--config", required=True)
    rc.add_argument("--out", help="output directory (overrides [output] directory)")
    rc.add_argument("--seed", type=int, help="noise seed (overrides [inverse] seed)")
    rc.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                    help="worker cap for per-illumination solves (default: all cores)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.config, args.command)
        out = cfg.output_dir(args.out)
        if args.command == "verify-forward":
            run_verify_forward(cfg, out)
        else:
            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            run_reconstruct(cfg, out, args.seed, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularSystemError, ReconstructionError, NonPositiveRadiusError,
            DegenerateCurveError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
