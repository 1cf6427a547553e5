"""``dse`` command line: gen, transform, validate, bench, train.

Exit codes: 0 ok, 1 failed validation or other runtime error, 2 usage or
configuration error, 3 shape mismatch, 4 out-of-domain input.

Every subcommand takes ``--config FILE`` with ``key = value`` lines using
the long flag names (dashes or underscores). Flags given on the command line
win over the file. The effective configuration is echoed as the first line
of output and, for commands that write files, saved next to them.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from dse import __version__
from dse.errors import ConfigError, DomainError, DSEError, ShapeError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SHAPE, EXIT_DOMAIN = 0, 1, 2, 3, 4
CONFIG_NAME = "run_config.txt"

_FREQ_RANGES = {"nonneg": "nonnegative", "nonnegative": "nonnegative", "symmetric": "symmetric"}
_METHOD_ALIASES = {"fft": "fft_truncated"}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose errors always exit with the usage code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_mode_range(text: str) -> list:
    """``8:64:8`` (inclusive start:stop:step), ``8:64`` (step 1) or ``8,16,32``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError
            start, stop, step = parts
            values = list(range(start, stop + 1, step))
        else:
            values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"bad mode list {text!r}; use start:stop:step or a comma list") from None
    if not values or min(values) < 1:
        raise ConfigError(f"mode list {text!r} is empty or has non-positive entries")
    return values


def _mode_tuple(text: str):
    try:
        values = tuple(int(p) for p in str(text).split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"--modes expects integers, got {text!r}") from None
    if not values:
        raise ConfigError("--modes is empty")
    return values


# parser --------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="key = value file; command-line flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dse", description="Direct spectral evaluation on arbitrary point sets.")
    parser.add_argument("--version", action="version", version=f"dse {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a point distribution (and optionally a field)")
    _add_common(g)
    g.add_argument("--kind", default="equispaced",
                   choices=("equispaced", "contracting_expanding", "random_uniform", "lattice_tanh", "sphere_uniform"))
    g.add_argument("--n", type=int, default=None, help="number of points (per axis for lattices)")
    g.add_argument("--n1", type=int, default=0, help="second-axis size for lattice_tanh")
    g.add_argument("--dim", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--center", type=float, default=0.5)
    g.add_argument("--ratio", type=float, default=1.05)
    g.add_argument("--focus", type=float, default=0.5)
    g.add_argument("--sharpness", type=float, default=2.0)
    g.add_argument("--out", help="points CSV (default: standard output)")
    g.add_argument("--field-out", help="also write a random band-limited field CSV")
    g.add_argument("--max-freq", type=int, default=8)
    g.add_argument("--channels", type=int, default=1)

    t = sub.add_parser("transform", help="forward or adjoint transform of CSV data")
    _add_common(t)
    t.add_argument("--points", help="points CSV")
    t.add_argument("--field", help="field CSV (forward)")
    t.add_argument("--coeffs", help="coefficient CSV (adjoint)")
    t.add_argument("--out", help="output CSV")
    t.add_argument("--basis", default="fourier", choices=("fourier", "spherical"))
    t.add_argument("--direction", default="forward", choices=("forward", "adjoint"))
    t.add_argument("--modes", default=None, help="modes per axis: one integer or a comma list")
    t.add_argument("--dim", type=int, default=None, help="expected point dimension")
    t.add_argument("--lmax", type=int, default=None)
    t.add_argument("--normalization", default="paper", choices=("paper", "unitary", "none"))
    t.add_argument("--freq-range", default="nonneg", choices=tuple(_FREQ_RANGES))
    t.add_argument("--quadrature", default="none", choices=("none", "dh"),
                   help="spherical forward only: apply equiangular grid weights")

    v = sub.add_parser("validate", help="run the numerical self-checks")
    _add_common(v)
    v.add_argument("--inject-fault", default=None, choices=("normalization",),
                   help="deliberately corrupt a constant (negative control)")

    b = sub.add_parser("bench", help="time transforms over a mode sweep")
    _add_common(b)
    b.add_argument("--n", type=int, default=16384)
    b.add_argument("--modes", default="8:32:2", help="start:stop:step (inclusive) or comma list")
    b.add_argument("--methods", default="dse,fft", help="comma list of dse, fft, dft_naive")
    b.add_argument("--reps", type=int, default=7)
    b.add_argument("--warmup", type=int, default=3)
    b.add_argument("--backend", default=None, choices=("compiled", "python"))
    b.add_argument("--precision", default="float64", choices=("float64", "float32"))
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--machine-tag", default=None)
    b.add_argument("--out", help="output directory")

    r = sub.add_parser("train", help="train the spectral operator on a synthetic task")
    _add_common(r)
    r.add_argument("--task", default="derivative", choices=("derivative", "identity"))
    r.add_argument("--n", type=int, default=128)
    r.add_argument("--distribution", default="contracting_expanding",
                   choices=("contracting_expanding", "equispaced", "random_uniform"))
    r.add_argument("--center", type=float, default=0.5)
    r.add_argument("--ratio", type=float, default=1.01)
    r.add_argument("--modes", type=int, default=17)
    r.add_argument("--max-freq", type=int, default=8)
    r.add_argument("--width", type=int, default=32)
    r.add_argument("--layers", type=int, default=4)
    r.add_argument("--epochs", type=int, default=200)
    r.add_argument("--batch-size", type=int, default=20)
    r.add_argument("--lr", type=float, default=0.01)
    r.add_argument("--momentum", type=float, default=0.9)
    r.add_argument("--no-cosine", action="store_true", help="keep the learning rate constant")
    r.add_argument("--activation", default="gelu", choices=("gelu", "relu", "identity"))
    r.add_argument("--loss", default="l1", choices=("l1", "l2"))
    r.add_argument("--n-train", type=int, default=500)
    r.add_argument("--n-test", type=int, default=200)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--log-every", type=int, default=25)
    r.add_argument("--out", help="output directory")
    return parser


_REQUIRED = {"bench": ("out",), "train": ("out",)}


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)  # pragma: no cover


def _apply_config_file(sub, argv, path):
    """Fold a config file into ``sub`` as defaults, then re-parse ``argv``."""
    from dse.io import read_config

    try:
        values = read_config(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    unknown = sorted(set(values) - set(actions))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    defaults = {}
    for key, raw in values.items():
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = _parse_bool(raw)
            continue
        value = raw
        if action.type is not None:
            try:
                value = action.type(raw)
            except ValueError:
                raise ConfigError(f"config key {key}: cannot parse {raw!r}") from None
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"config key {key}: {value!r} is not one of {sorted(action.choices)}")
        defaults[key] = value
    sub.set_defaults(**defaults)
    return sub.parse_args(argv)


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        parser.exit(EXIT_USAGE)
    sub = _subparser(parser, args.command)
    if args.config:
        try:
            command = args.command
            args = _apply_config_file(sub, argv[argv.index(command) + 1:], args.config)
        except ConfigError as exc:
            sub.error(str(exc))
        args.command = command
    for key in _REQUIRED.get(args.command, ()):
        if getattr(args, key) is None:
            sub.error(f"--{key.replace('_', '-')} is required")
    return args


def _config_values(args):
    return {k: v for k, v in vars(args).items() if k not in ("command", "config")}


def _config_line(args):
    from dse.io import format_config

    body = format_config(args.command, _config_values(args)).splitlines()
    return "# " + " ".join(body[1:]).replace(" = ", "=") if len(body) > 1 else "#"


def _save_config(args, directory):
    from dse.io import format_config

    Path(directory, CONFIG_NAME).write_text(format_config(args.command, _config_values(args)), encoding="utf-8")


# commands ------------------------------------------------------------------

def cmd_gen(args, out):
    from dse import io
    from dse.distributions import DistributionConfig, gen_random_band_limited_field, generate

    if args.n is None or args.n < 1:
        raise ConfigError("--n must be a positive integer")
    cfg = DistributionConfig(kind=args.kind, n=args.n, n1=args.n1, dim=args.dim, seed=args.seed,
                             center=args.center, ratio=args.ratio, focus=args.focus,
                             sharpness=args.sharpness)
    points = generate(cfg)
    if args.out:
        io.write_points(args.out, points)
        _save_config(args, Path(args.out).resolve().parent)
    else:
        io.write_points(sys.stdout, points)
    if args.field_out:
        if points.geometry != "cartesian":
            raise DomainError("band-limited fields are generated on cartesian points only")
        bl = gen_random_band_limited_field(points, args.max_freq, args.channels, seed=args.seed)
        io.write_field(args.field_out, bl.field.values)
    print(f"gen: {points.n} points, dim {points.dim}, {points.geometry}, kind {args.kind}, "
          f"fingerprint {points.fingerprint:016x}", file=out)
    return EXIT_OK


def cmd_transform(args, out):
    from dse import io
    from dse.core import CoeffVector, Field, ModeSpec
    from dse.nudft import build_fourier_matrix
    from dse.spherical import build_sh_matrix, dh_grid, dh_quadrature_weights

    if not args.points:
        raise ConfigError("--points is required")
    if not args.out:
        raise ConfigError("--out is required")
    points = io.read_points(args.points)
    if args.dim is not None and args.dim != points.dim:
        raise ShapeError(f"--dim {args.dim} but the points file has {points.dim} coordinate columns")

    if args.basis == "spherical":
        if points.geometry != "spherical":
            raise DomainError("spherical basis needs a theta,phi points file")
        if args.lmax is None or args.lmax < 1:
            raise ConfigError("--lmax (>= 1) is required for the spherical basis")
        spec = ModeSpec.spherical(args.lmax)
        matrix = build_sh_matrix(points, args.lmax)
    else:
        if points.geometry != "cartesian":
            raise DomainError("Fourier basis needs cartesian points in [0, 1]^D")
        if args.modes is None:
            raise ConfigError("--modes is required for the Fourier basis")
        modes = _mode_tuple(args.modes)
        if len(modes) == 1:
            modes = modes * points.dim
        if len(modes) != points.dim:
            raise ShapeError(f"{len(modes)} mode counts given for {points.dim}-D points")
        spec = ModeSpec.fourier(modes, points.dim, _FREQ_RANGES[args.freq_range])
        matrix = build_fourier_matrix(points, spec, args.normalization)

    if args.direction == "forward":
        if not args.field:
            raise ConfigError("--field is required for a forward transform")
        values = io.read_field(args.field)
        if values.shape[0] != points.n:
            raise ShapeError(f"points file has {points.n} rows but field file has {values.shape[0]} rows")
        x = values
        if args.quadrature == "dh":
            if args.basis != "spherical":
                raise ConfigError("--quadrature dh applies to the spherical basis only")
            n_theta = int(round(math.sqrt(points.n / 2)))
            if 2 * n_theta * n_theta != points.n or dh_grid(n_theta) != points:
                raise DomainError("--quadrature dh needs points laid out as the equiangular grid")
            x = values * dh_quadrature_weights(n_theta).weights[:, None]
        coeffs = matrix.entries @ Field.on(points, x).values
        io.write_coeffs(args.out, CoeffVector(coeffs, spec))
        rows = coeffs.shape[0]
        kind = "coefficient"
    else:
        if not args.coeffs:
            raise ConfigError("--coeffs is required for an adjoint transform")
        coeffs = io.read_coeffs(args.coeffs, spec)
        values = matrix.adjoint_entries @ coeffs.values
        io.write_field(args.out, values)
        rows = values.shape[0]
        kind = "field"
    _save_config(args, Path(args.out).resolve().parent)
    print(f"transform: {args.basis} {args.direction}, {rows} {kind} rows -> {args.out}", file=out)
    return EXIT_OK


def cmd_validate(args, out):
    from dse.validation import format_report, run_all

    results = run_all(inject_fault=args.inject_fault)
    print(format_report(results), file=out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"validate: {len(failed)} check(s) failed: {', '.join(failed)}", file=out)
        return EXIT_FAIL
    print(f"validate: all {len(results)} checks passed", file=out)
    return EXIT_OK


def cmd_bench(args, out):
    from dse.bench import crossover_modes, run_mode_sweep

    m_list = parse_mode_range(args.modes)
    methods = []
    for name in (p.strip() for p in args.methods.split(",") if p.strip()):
        methods.append(_METHOD_ALIASES.get(name, name))
    if not methods:
        raise ConfigError("--methods is empty")
    if args.threads < 1:
        raise ConfigError("--threads must be positive")
    directory = Path(args.out)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / "bench.csv"
    records = run_mode_sweep(args.n, m_list, tuple(methods), csv_path, args.reps, args.warmup,
                             args.backend, args.precision, args.threads, args.machine_tag)
    _save_config(args, directory)
    for rec in records:
        print(f"  {rec.method:<14} m={rec.m_total:<4} apply {rec.apply_ns_median / 1e3:10.1f} us"
              f"  build {rec.build_ns_median / 1e3:10.1f} us", file=out)
    if "fft_truncated" in methods and "dse" in methods:
        cross = crossover_modes(records)
        msg = f"dse faster than fft up to m={cross}" if cross else "dse never faster than fft here"
        print(f"bench: {msg} (reported, hardware-dependent)", file=out)
    print(f"bench: {len(records)} rows -> {csv_path}", file=out)
    return EXIT_OK


def cmd_train(args, out):
    from dse import operator as op
    from dse.distributions import gen_contracting_expanding_1d, gen_equispaced_1d, gen_random_cloud

    if args.distribution == "contracting_expanding":
        points = gen_contracting_expanding_1d(args.n, args.center, args.ratio)
    elif args.distribution == "equispaced":
        points = gen_equispaced_1d(args.n)
    else:
        points = gen_random_cloud(args.n, 1, args.seed)
    config = op.ModelConfig(
        width=args.width, n_layers=args.layers, modes=args.modes, activation=args.activation,
        learning_rate=args.lr, momentum=args.momentum, cosine_decay=not args.no_cosine,
        epochs=args.epochs, batch_size=args.batch_size, seed=args.seed, loss=args.loss,
    )
    train_set = op.make_task(args.task, points, args.n_train, args.max_freq, seed=2 * args.seed + 1)
    test_set = op.make_task(args.task, points, args.n_test, args.max_freq, seed=2 * args.seed + 2)
    directory = Path(args.out)
    directory.mkdir(parents=True, exist_ok=True)
    _save_config(args, directory)

    def log(epoch, loss, err):
        if args.log_every and (epoch + 1) % args.log_every == 0:
            print(f"  epoch {epoch + 1:4d}  train_loss {loss:.5g}  test_rel_l1 {err:.5g}", file=out, flush=True)

    result = op.train(config, train_set, test_set, log=log)
    op.save_checkpoint(directory / "model.ckpt", config, result.params)
    op.write_history(directory / "history.csv", result.history)
    print(f"train: {args.task} final test rel-L1 {result.final_test_rel_l1:.6g} -> {directory}", file=out)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "transform": cmd_transform,
    "validate": cmd_validate,
    "bench": cmd_bench,
    "train": cmd_train,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    # gen without --out streams CSV on stdout, so chatter goes to stderr there
    out = sys.stderr if args.command == "gen" and not args.out else sys.stdout
    print(_config_line(args), file=out, flush=True)
    try:
        return COMMANDS[args.command](args, out)
    except (DSEError, OSError, ValueError) as exc:
        print(f"dse {args.command}: error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ShapeError):
        return EXIT_SHAPE
    if isinstance(exc, DomainError):
        return EXIT_DOMAIN
    if isinstance(exc, ConfigError) or (isinstance(exc, ValueError) and not isinstance(exc, DSEError)):
        return EXIT_USAGE
    return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
