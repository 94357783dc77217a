"""Command-line entry point: ``compwave [--config FILE] [--set k=v] COMMAND``.

Exit codes: 0 success, 1 configuration or I/O error, 2 data not in Case 1,
3 a verification check failed, 4 the simulation blew up.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .config import ExperimentConfig, dump_config, load_config
from .diagnostics import DiagnosticsObserver, DiagnosticsRecord, fit_decay, g_functional, running_sup
from .errors import BlowUpError, ClassificationError, CompwaveError, ConfigError, OrderingError
from .interaction import InteractionCurves, curve_table, default_t_grid
from .riemann import CaseLabel
from .solver import initial_data, run
from .verify import run_battery
from .waves import profile_columns

EXIT_OK, EXIT_CONFIG, EXIT_CASE, EXIT_VERIFY, EXIT_BLOWUP = 0, 1, 2, 3, 4

_MIN_T_SAMPLES = 20


def _out_dir(cfg: ExperimentConfig) -> Path:
    path = Path(cfg.output.directory)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc.strerror}") from None
    return path


def _require_case1(cfg: ExperimentConfig):
    label = cfg.case()
    if label is not CaseLabel.CASE1:
        raise ClassificationError(f"command needs Case1 data, got {label.value}")
    return cfg.ansatz()


def cmd_classify(cfg: ExperimentConfig, out=None) -> int:
    out = out or sys.stdout
    label = cfg.case()
    print(label.value, file=out)
    if label is CaseLabel.CASE1:
        d = cfg.far_field()
        for key in ("v_minus", "v_plus", "u_minus", "u_a", "u_plus"):
            print(f"{key} = {getattr(d, key)!r}", file=out)
    return EXIT_OK


def cmd_profile(cfg: ExperimentConfig, t: float, out=None) -> int:
    out = out or sys.stdout
    ans = _require_case1(cfg)
    x = cfg.make_grid(ans).x
    path = _out_dir(cfg) / f"profile_t{t:g}.csv"
    io.write_csv(path, profile_columns(ans, x, t))
    print(f"wrote {path}", file=out)
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out=None) -> int:
    out = out or sys.stdout
    ans = _require_case1(cfg)
    ver = cfg.verification
    if ver.t_samples < _MIN_T_SAMPLES:
        warnings.warn(f"verification.t_samples = {ver.t_samples} is sparse; trends may be unreliable",
                      stacklevel=2)
    checks = run_battery(ans, seed=cfg.seed, beta=ver.beta, eps=ver.eps,
                         t_samples=ver.t_samples, t_max=ver.t_max)
    report = {}
    for c in checks:
        report[f"{c.name}.passed"] = c.passed
        for key, val in c.detail.items():
            report[f"{c.name}.{key}"] = val
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} {c.detail}", file=out)
    odir = _out_dir(cfg)
    io.write_kv(odir / "verify_report.txt", report)
    curves = InteractionCurves(ans, beta=ver.beta, eps=ver.eps)
    try:
        io.write_csv(odir / "interaction.csv", curve_table(curves, default_t_grid(ver.t_samples, ver.t_max)))
    except CompwaveError as exc:
        print(f"interaction table not written: {exc}", file=out)
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print("failed checks: " + ", ".join(failed), file=out)
        return EXIT_VERIFY
    return EXIT_OK


class SnapshotWriter:
    """Observer writing the first, last and every ``stride``-th snapshot."""

    def __init__(self, ans, directory: Path, n_snapshots: int, stride: int = 0):
        self.ans, self.directory = ans, directory
        self.last, self.stride = n_snapshots - 1, stride
        self.count = 0
        self.written = []

    def __call__(self, state):
        i = self.count
        self.count += 1
        if not (i == 0 or i == self.last or (self.stride and i % self.stride == 0)):
            return
        x = state.grid.x
        v_hat, u_hat = self.ans(x, state.t)
        path = self.directory / f"snapshot_{i:05d}.csv"
        io.write_csv(path, {"x": x, "v": state.v, "u": state.u, "v_hat": v_hat, "u_hat": u_hat,
                            "phi": state.v - v_hat, "psi": state.u - u_hat})
        self.written.append((state.t, path))


def decay_summary(records) -> dict:
    t = np.array([r.t for r in records])
    sup = np.array([max(r.sup_phi, r.sup_psi) for r in records])
    n_h1 = running_sup(np.hypot([r.h1_phi for r in records], [r.h1_psi for r in records]))
    _, g, cadence_ok = g_functional(records)
    out = {
        "t_final": t[-1],
        "sup_initial": sup[0],
        "sup_final": sup[-1],
        "sup_ratio": sup[-1] / sup[0] if sup[0] > 0 else float("nan"),
        "h1_running_sup_initial": n_h1[0],
        "h1_running_sup_final": n_h1[-1],
        "g_final": g[-1],
        "g_nondecreasing": bool(np.all(np.diff(g) >= 0)),
        "g_cadence_ok": cadence_ok,
    }
    try:
        fit = fit_decay(t, sup, window=(1.0, t[-1]))
        out["sup_fit_exponent"], out["sup_fit_constant"] = fit.exponent, fit.constant
    except CompwaveError:
        out["sup_fit_exponent"] = out["sup_fit_constant"] = float("nan")
    return out


def cmd_simulate(cfg: ExperimentConfig, out=None) -> int:
    out = out or sys.stdout
    ans = _require_case1(cfg)
    grid = cfg.make_grid(ans)
    state = initial_data(ans, grid, cfg.perturbation)
    odir = _out_dir(cfg)
    n_snap = int(np.floor(cfg.solver.T / cfg.solver.snapshot_dt + 1e-9))
    n_snap += 1 if n_snap * cfg.solver.snapshot_dt < cfg.solver.T - 1e-12 else 0
    diag = DiagnosticsObserver(ans, track_curves=False)
    snaps = SnapshotWriter(ans, odir, n_snap + 1, cfg.output.snapshot_stride)
    meta = {"grid.x_left": grid.x_left, "grid.x_right": grid.x_right, "grid.n": grid.n,
            "grid.h": grid.h, "solver.cfl": cfg.solver.cfl}
    try:
        summary = run(state, cfg.solver, ans, [diag, snaps])
    except BlowUpError as exc:
        meta["status"] = "blowup"
        meta["last_valid_time"] = exc.last_valid_time
        io.write_kv(odir / "run_meta.txt", {**meta, **dump_config(cfg)})
        print(f"blow-up: {exc} (last valid time {exc.last_valid_time:g})", file=out)
        return EXIT_BLOWUP
    meta.update({"status": "ok", "dt": summary.dt, "n_steps": summary.n_steps,
                 "mass_change": summary.mass_change, "boundary_flux": summary.boundary_flux})
    io.write_kv(odir / "run_meta.txt", {**meta, **dump_config(cfg)})
    cols = DiagnosticsRecord.columns()
    io.write_csv(odir / "diagnostics.csv", {c: [getattr(r, c) for r in diag.records] for c in cols})
    summ = decay_summary(diag.records)
    io.write_kv(odir / "decay_summary.txt", summ)
    print(f"sup |(phi, psi)|: {summ['sup_initial']:.6e} -> {summ['sup_final']:.6e} "
          f"(ratio {summ['sup_ratio']:.4g}); fitted exponent {summ['sup_fit_exponent']:.4g}", file=out)
    print(f"H1 running sup: {summ['h1_running_sup_initial']:.6e} -> {summ['h1_running_sup_final']:.6e}; "
          f"G(T) = {summ['g_final']:.6e}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="compwave", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key = value experiment file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", help="classify the far-field data")
    prof = sub.add_parser("profile", help="write the composite-wave profile at one time")
    prof.add_argument("--time", type=float, default=0.0)
    sub.add_parser("verify", help="run the verification battery")
    sub.add_parser("simulate", help="run the stability simulation")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "profile":
            return cmd_profile(cfg, args.time)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_simulate(cfg)
    except ClassificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CASE
    except (ConfigError, OrderingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
