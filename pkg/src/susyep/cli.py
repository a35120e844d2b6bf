"""Command-line front end.

One subcommand per analysis family:

  synthesize          chain matrices in all representations + verification
  spectrum-sweep      eigenvalues vs gamma          (spectrum.csv)
  rigidity-sweep      per-level |r| vs EP distance  (rigidity.csv, fits.csv)
  perturbation-sweep  branch splittings vs epsilon  (splitting.csv, fits.csv)
  jordan-check        EPN certificate               (jordan.json)

Configuration can come from a JSON file (--config) and/or flags; flags
win.  CSV bodies are deterministic: 17 significant digits, scientific
notation, '\n' newlines, no timestamps (run metadata goes to a sidecar
JSON).  Errors are emitted as structured JSON on stderr with exit
status 2.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ep_analysis import jordan_check, rigidity_sweep, scaling_exponent
from .linalg import eig, sort_eigenvalues
from .perturbation import (
    ChannelZeroError,
    PerturbationPlan,
    classify_puiseux_order,
    puiseux_fit,
    splitting_sweep,
)
from .synthesis import (
    ChainSpec,
    analytic_eigenvalues,
    build_chain,
    fock_two_site,
    hermitian_chain,
    spin_operators,
)

CSV_HEADERS = {
    "spectrum": "gamma,level,re_omega,im_omega",
    "rigidity": "control,level,abs_r",
    "splitting": "epsilon,pair_a,pair_b,split_re,split_im",
    "fits": "quantity,slope,intercept,r_squared,window_min,window_max",
}

SWEEP_DPS = 40
SPLITTING_DPS = 50
# floor consistent with the high-precision backend, not the 1e-13
# double-precision floor (see scaling_exponent)
HIGH_PRECISION_RIGIDITY_FLOOR = 1e-30


class CliError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    """Fully resolved run description; echoed to disk for round-trips."""

    command: str
    n: int = 4
    j: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0
    omega0: float = 0.0
    sweep_min: float | None = None
    sweep_max: float | None = None
    sweep_count: int = 17
    sweep_spacing: str = "log"
    control: str = "gamma"
    kind: str = "all_bonds"
    bond_index: int | None = None
    pair_a: int = 0
    pair_b: int | None = None
    output: str = "."
    seed: int = 0  # reserved; pipelines are deterministic
    format: str = "csv"
    threads: int = 1
    tolerance: float = 1e-8

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise CliError("config", f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def chain_spec(self) -> ChainSpec:
        try:
            return ChainSpec(N=self.n, J=self.j, gamma=self.gamma,
                             delta=self.delta, omega0=self.omega0)
        except ValueError as exc:
            raise CliError("chain", str(exc)) from exc

    def grid(self) -> np.ndarray:
        if self.sweep_min is None or self.sweep_max is None:
            raise CliError("sweep", "sweep requires --min and --max")
        lo, hi, count = self.sweep_min, self.sweep_max, self.sweep_count
        if count < 2:
            raise CliError("sweep", f"grid count must be >= 2, got {count}")
        if not lo < hi:
            raise CliError("sweep", f"need min < max, got {lo} >= {hi}")
        if self.sweep_spacing == "linear":
            return np.linspace(lo, hi, count)
        if self.sweep_spacing == "log":
            if lo <= 0:
                raise CliError("sweep", "log spacing requires min > 0")
            return np.logspace(np.log10(lo), np.log10(hi), count)
        raise CliError("sweep", f"unknown spacing {self.sweep_spacing!r}")


def _fmt(x: float) -> str:
    return f"{x:.17e}"


def _write_csv(path: Path, header: str, rows) -> None:
    body = header + "\n" + "".join(",".join(r) + "\n" for r in rows)
    path.write_text(body, newline="")


def _write_json_rows(path: Path, header: str, rows) -> None:
    cols = header.split(",")
    payload = [dict(zip(cols, r)) for r in rows]
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _emit_table(outdir: Path, name: str, header: str, rows, fmt: str) -> list:
    written = []
    if fmt in ("csv", "both"):
        p = outdir / f"{name}.csv"
        _write_csv(p, header, rows)
        written.append(str(p))
    if fmt in ("json", "both"):
        p = outdir / f"{name}.json"
        _write_json_rows(p, header, rows)
        written.append(str(p))
    return written


def _emit_metadata(outdir: Path, cfg: RunConfig, extra: dict | None = None) -> None:
    meta = {
        "config": cfg.to_dict(),
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        meta.update(extra)
    (outdir / "metadata.json").write_text(json.dumps(meta, indent=2) + "\n")
    (outdir / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")


def _matrix_payload(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def cmd_synthesize(cfg: RunConfig) -> None:
    spec = cfg.chain_spec()
    outdir = Path(cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    N = spec.N
    H = build_chain(spec)
    h_herm = hermitian_chain(N, spec.J)
    ops = spin_operators(N)
    fock = fock_two_site(N, spec.J, spec.gamma)
    spin_form = (spec.omega0 * np.eye(N) + spec.J * ops.Sx
                 + (spec.delta + 1j * spec.gamma) * ops.Sz)
    couplings = [float(spec.J * np.sqrt(m * (N - m))) for m in range(1, N)]
    tri_spin = float(np.max(np.abs(H - spin_form)))
    tri_fock = float(np.max(np.abs(H - (spec.omega0 * np.eye(N) + fock)))) \
        if spec.delta == 0 else None
    w = sort_eigenvalues(eig(H).eigenvalues)
    w_ref = sort_eigenvalues(analytic_eigenvalues(spec))
    spectrum_residual = float(np.max(np.abs(w - w_ref)))
    payload = {
        "couplings": couplings,
        "hermitian_chain": _matrix_payload(h_herm),
        "chain": _matrix_payload(H),
        "spin_form": _matrix_payload(spin_form),
        "fock_form": _matrix_payload(fock),
        "verification": {
            "spin_triangle_residual": tri_spin,
            "fock_triangle_residual": tri_fock,
            "analytic_spectrum_residual": spectrum_residual,
        },
    }
    (outdir / "synthesize.json").write_text(json.dumps(payload, indent=2) + "\n")
    _emit_metadata(outdir, cfg)


def cmd_spectrum_sweep(cfg: RunConfig) -> None:
    spec = cfg.chain_spec()
    outdir = Path(cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid()

    def one(g):
        point = ChainSpec(spec.N, spec.J, gamma=float(g),
                          delta=spec.delta, omega0=spec.omega0)
        return sort_eigenvalues(eig(build_chain(point)).eigenvalues)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            levels = list(pool.map(one, grid))
    else:
        levels = [one(g) for g in grid]
    rows = []
    for g, w in zip(grid, levels):
        for k, lam in enumerate(w):
            rows.append((_fmt(g), str(k), _fmt(lam.real), _fmt(lam.imag)))
    _emit_table(outdir, "spectrum", CSV_HEADERS["spectrum"], rows, cfg.format)
    _emit_metadata(outdir, cfg)


def cmd_rigidity_sweep(cfg: RunConfig) -> None:
    spec = cfg.chain_spec()
    outdir = Path(cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    if cfg.control not in ("gamma", "delta"):
        raise CliError("control", f"control must be gamma or delta, got {cfg.control!r}")
    distances = cfg.grid()
    if cfg.control == "gamma":
        # approach gamma_EP = J from the exact-phase side
        grid = spec.J - distances
        base = ChainSpec(spec.N, spec.J, gamma=spec.gamma, delta=spec.delta,
                         omega0=spec.omega0)
    else:
        # Delta_EP = 0 approached from above, gamma pinned at the EP
        grid = distances
        base = ChainSpec(spec.N, spec.J, gamma=spec.J, delta=0.0,
                         omega0=spec.omega0)
    records = rigidity_sweep(base, cfg.control, grid, dps=SWEEP_DPS)
    rows = [(_fmt(r.control), str(r.level_index), _fmt(r.rigidity))
            for r in records]
    _emit_table(outdir, "rigidity", CSV_HEADERS["rigidity"], rows, cfg.format)
    fit_rows = []
    fit_summary = {}
    for level in range(spec.N):
        f = scaling_exponent(records, level, floor=HIGH_PRECISION_RIGIDITY_FLOOR)
        name = f"rigidity_level_{level}"
        fit_rows.append((name, _fmt(f.slope), _fmt(f.intercept),
                         _fmt(f.r_squared), _fmt(f.window[0]), _fmt(f.window[1])))
        fit_summary[name] = {"slope": f.slope, "r_squared": f.r_squared}
    _emit_table(outdir, "fits", CSV_HEADERS["fits"], fit_rows, cfg.format)
    _emit_metadata(outdir, cfg, {"fits": fit_summary})


def cmd_perturbation_sweep(cfg: RunConfig) -> None:
    spec = cfg.chain_spec()
    outdir = Path(cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid()
    if np.any(grid <= 0):
        raise CliError("sweep", "epsilon grid must be strictly positive")
    pair_b = cfg.pair_b if cfg.pair_b is not None else spec.N - 1
    try:
        plan = PerturbationPlan(kind=cfg.kind, epsilon_grid=tuple(grid),
                                bond_index=cfg.bond_index)
        records = splitting_sweep(spec, plan, (cfg.pair_a, pair_b),
                                  dps=SPLITTING_DPS)
    except ValueError as exc:
        raise CliError("perturbation", str(exc)) from exc
    rows = [(_fmt(r.epsilon), str(r.branch_pair[0]), str(r.branch_pair[1]),
             _fmt(r.split_real), _fmt(r.split_imag)) for r in records]
    _emit_table(outdir, "splitting", CSV_HEADERS["splitting"], rows, cfg.format)
    fit_rows = []
    skipped = {}
    fit_summary = {}
    for channel, name in (("real", "split_re"), ("imag", "split_im")):
        try:
            f = puiseux_fit(records, channel)
        except ChannelZeroError as exc:
            skipped[name] = str(exc)
            continue
        fit_rows.append((name, _fmt(f.slope), _fmt(f.intercept),
                         _fmt(f.r_squared), _fmt(f.window[0]), _fmt(f.window[1])))
        fit_summary[name] = {
            "slope": f.slope,
            "r_squared": f.r_squared,
            "order": classify_puiseux_order(f, spec.N),
        }
    _emit_table(outdir, "fits", CSV_HEADERS["fits"], fit_rows, cfg.format)
    _emit_metadata(outdir, cfg, {"fits": fit_summary,
                                 "skipped_channels": skipped})


def cmd_jordan_check(cfg: RunConfig) -> None:
    spec = cfg.chain_spec()
    outdir = Path(cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)
    report = jordan_check(build_chain(spec), spec.omega0, tol=cfg.tolerance)
    payload = {
        "is_epn": report.is_epn,
        "coalesced_value": [report.coalesced_value.real,
                            report.coalesced_value.imag],
        "rank_deficiency": report.rank_deficiency,
        "nilpotency_residual": report.nilpotency_residual,
    }
    (outdir / "jordan.json").write_text(json.dumps(payload, indent=2) + "\n")
    _emit_metadata(outdir, cfg)


COMMANDS = {
    "synthesize": cmd_synthesize,
    "spectrum-sweep": cmd_spectrum_sweep,
    "rigidity-sweep": cmd_rigidity_sweep,
    "perturbation-sweep": cmd_perturbation_sweep,
    "jordan-check": cmd_jordan_check,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None,
                        help="JSON config file; flags override its values")
    common.add_argument("--out", dest="output", type=str, default=None)
    common.add_argument("--format", choices=("csv", "json", "both"), default=None)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("-N", "--sites", dest="n", type=int, default=None)
    common.add_argument("-J", dest="j", type=float, default=None)
    common.add_argument("--gamma", type=float, default=None)
    common.add_argument("--delta", type=float, default=None)
    common.add_argument("--omega0", type=float, default=None)
    common.add_argument("--min", dest="sweep_min", type=float, default=None)
    common.add_argument("--max", dest="sweep_max", type=float, default=None)
    common.add_argument("--count", dest="sweep_count", type=int, default=None)
    common.add_argument("--spacing", dest="sweep_spacing",
                        choices=("linear", "log"), default=None)
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog="susyep",
        description="PT-symmetric SUSY array synthesis and EPN analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synthesize", parents=[common])
    sub.add_parser("spectrum-sweep", parents=[common])
    p = sub.add_parser("rigidity-sweep", parents=[common])
    p.add_argument("--control", choices=("gamma", "delta"), default=None)
    p = sub.add_parser("perturbation-sweep", parents=[common])
    p.add_argument("--kind", choices=("all_bonds", "single_bond"), default=None)
    p.add_argument("--bond", dest="bond_index", type=int, default=None)
    p.add_argument("--pair-a", dest="pair_a", type=int, default=None)
    p.add_argument("--pair-b", dest="pair_b", type=int, default=None)
    sub.add_parser("jordan-check", parents=[common])
    return parser


def resolve_config(argv) -> RunConfig:
    args = _build_parser().parse_args(argv)
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError("config", f"cannot read config: {exc}") from exc
        if not isinstance(base, dict):
            raise CliError("config", "config file must hold a JSON object")
    base["command"] = args.command
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        base[key] = value
    cfg = RunConfig.from_dict(base)
    if cfg.command not in COMMANDS:
        raise CliError("command", f"unknown command {cfg.command!r}")
    return cfg


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = resolve_config(argv)
        COMMANDS[cfg.command](cfg)
    except CliError as exc:
        json.dump({"error": {"code": exc.code, "message": str(exc)}},
                  sys.stderr)
        sys.stderr.write("\n")
        return 2
    except ValueError as exc:
        json.dump({"error": {"code": "validation", "message": str(exc)}},
                  sys.stderr)
        sys.stderr.write("\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
