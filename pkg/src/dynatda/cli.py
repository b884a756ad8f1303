"""Command-line entry point: ``dynatda {example,invariant,compare,oracle}``."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import shutil
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .complexes import ComplexError
from .distances import compare_betti0, compare_rank
from .dms_core import (
    DMSError,
    SampledDMS,
    TimeGrid,
    constant_dms,
    discretize,
    figure1_positions,
    load_dms,
    save_tensor_json,
    trajectories_to_dms,
)
from .invariants import (
    Axis,
    ConfigError,
    GridFunction,
    RankInvariantGrid,
    betti0_grid,
    crocker,
    default_scale_axis,
)
from .oracles import SizeCapError, ddyn_bruteforce, dyn_gh, gh_bruteforce, weak_lp_gh
from .svg import heatmap

EXIT_OK, EXIT_VALIDATION, EXIT_SIZE_CAP, EXIT_SELF_CHECK = 0, 2, 3, 4


class SelfCheckError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# argument parsing


def _triple(text: str, what: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{what} must look like start:stop:steps, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"{what} must look like start:stop:steps, got {text!r}") from None
    if n < 1 or b < a or (n > 1 and b == a) or (n == 1 and b != a):
        raise ConfigError(f"{what} {text!r} is an empty or malformed range")
    return a, b, n


def _scale_axis(text: str | None, dms_list: Sequence[SampledDMS], ratio: float) -> Axis:
    if text is None:
        return default_scale_axis(dms_list, ratio)
    d0, d1, n = _triple(text, "--scale")
    if d0 > 0:
        raise ConfigError("--scale must include 0")
    step = (d1 - d0) / (n - 1) if n > 1 else ratio * dms_list[0].grid.step
    return Axis("delta", d0, step, n, False, "scale")


def _restrict(dms: SampledDMS, text: str | None) -> SampledDMS:
    """Apply ``--grid t0:t1:steps`` to loaded data by windowing and coarsening."""
    if text is None:
        return dms
    t0, t1, n = _triple(text, "--grid")
    g = dms.grid
    ks = []
    for t in (t0, t1):
        k = round((t - g.t0) / g.step)
        if not 0 <= k < g.count or abs(g.t0 + k * g.step - t) > 1e-6 * g.step + 1e-9:
            raise ConfigError(f"--grid endpoint {t} is not a sample time of the input")
        ks.append(int(k))
    span = ks[1] - ks[0]
    if n == 1:
        return dms.window(ks[0], ks[0])
    if span % (n - 1):
        raise ConfigError(f"--grid asks for {n} samples, which do not divide the {span} input steps")
    return discretize(dms.window(ks[0], ks[1]), span // (n - 1))


def _parse_metric(text: str) -> np.ndarray:
    try:
        rows = [[float(x) for x in r.split(",")] for r in text.split(";")]
        return np.array(rows, dtype=np.float64)
    except ValueError:
        raise ConfigError(f"cannot parse metric {text!r}; use rows like '0,1;1,0'") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynatda", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, two: bool) -> None:
        sp.add_argument("--input", required=True, help="trajectory CSV or distance-tensor JSON")
        if two:
            sp.add_argument("--input-b", required=True)
        sp.add_argument("--grid", help="time window and sample count t0:t1:steps")
        sp.add_argument("--ambient", default="euclidean", choices=["euclidean", "manhattan", "chebyshev"])
        sp.add_argument("--out", default=".", help="output directory")

    ex = sub.add_parser("example", help="write a built-in example DMS")
    ex.add_argument("--family", required=True, choices=["constant", "figure1_X", "figure1_Y"])
    ex.add_argument("--r", type=float, default=1.0)
    ex.add_argument("--metric", help="constant family: rows like '0,1;1,0' or a single distance")
    ex.add_argument("--grid", required=True, help="t0:t1:steps")
    ex.add_argument("--format", choices=["json", "csv"], default="json")
    ex.add_argument("--out", required=True, help="output file")

    for name, two in (("invariant", False), ("compare", True)):
        sp = sub.add_parser(name)
        common(sp, two)
        choices = ["betti0", "rank", "crocker"] if name == "invariant" else ["betti0", "rank"]
        sp.add_argument("--invariant", default="betti0", choices=choices)
        sp.add_argument("--k", type=int, default=0, help="homology dimension for rank/crocker")
        sp.add_argument("--scale", help="scale axis d0:d1:steps")
        sp.add_argument("--unit-ratio", type=float, default=2.0, help="scale step / time step")
        sp.add_argument("--threads", type=int, default=0)
        sp.add_argument("--cache", action="store_true", help="reuse results keyed by config hash")

    oc = sub.add_parser("oracle", help="exact brute-force distances for tiny inputs")
    common(oc, True)
    return p


# ---------------------------------------------------------------------------
# caching


def _cache_dir() -> Path:
    env = os.environ.get("DYNATDA_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "dynatda"


def _config_hash(args: argparse.Namespace, inputs: Sequence[str]) -> str:
    h = hashlib.sha256()
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "threads", "cache", "input", "input_b")}
    cfg["version"] = __version__
    h.update(json.dumps(cfg, sort_keys=True).encode())
    for path in inputs:
        h.update(hashlib.sha256(Path(path).read_bytes()).digest())
    return h.hexdigest()[:16]


def _write_outputs(out: Path, files: dict[str, str]) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in sorted(files.items()):
        path = out / name
        path.write_text(text)
        written.append(path)
    return written


def _run_cached(args, inputs: Sequence[str], compute) -> list[Path]:
    key = _config_hash(args, inputs)
    out = Path(args.out)
    if args.cache:
        slot = _cache_dir() / key
        manifest = slot / "manifest.json"
        if manifest.exists():
            names = json.loads(manifest.read_text())
            out.mkdir(parents=True, exist_ok=True)
            for name in names:
                shutil.copyfile(slot / name, out / name)
            print(f"cache hit {key}", file=sys.stderr)
            return [out / n for n in names]
    files = compute(key)
    written = _write_outputs(out, files)
    if args.cache:
        slot.mkdir(parents=True, exist_ok=True)
        for path in written:
            shutil.copyfile(path, slot / path.name)
        manifest.write_text(json.dumps(sorted(files)))
    return written


# ---------------------------------------------------------------------------
# commands


def _load(path: str, args) -> SampledDMS:
    return _restrict(load_dms(path, args.ambient), args.grid)


def cmd_example(args) -> int:
    t0, t1, n = _triple(args.grid, "--grid")
    grid = TimeGrid.spanning(t0, t1, n) if n > 1 else TimeGrid(t0, 1.0, 1)
    if args.family == "constant":
        if args.metric is None:
            raise ConfigError("--metric is required for the constant family")
        m = _parse_metric(args.metric)
        dms = constant_dms(m.item() if m.size == 1 else m, grid)
        positions = None
    else:
        positions = figure1_positions(args.family, args.r, grid.times())
        dms = trajectories_to_dms(("x1", "x2", "x3"), grid, positions, lipschitz_hint=args.r)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        save_tensor_json(dms, out)
    else:
        if positions is None:
            raise ConfigError("the constant family has no trajectories; use --format json")
        lines = ["id,t,x1"]
        for k, t in enumerate(grid.times()):
            for i, pid in enumerate(dms.points):
                lines.append(f"{pid},{float(t)!r},{float(positions[k, i])!r}")
        out.write_text("\n".join(lines) + "\n")
    print(out)
    return EXIT_OK


def _grid_files(prefix: str, gf: GridFunction, slices) -> dict[str, str]:
    files = {f"{prefix}.json": gf.to_json() + "\n"}
    for tag, keep, fixed, title in slices:
        files[f"{prefix}_{tag}.csv"] = gf.slice_csv(keep, fixed)
        a0, a1 = gf.axes[keep[0]], gf.axes[keep[1]]
        files[f"{prefix}_{tag}.svg"] = heatmap(gf.slice2d(keep, fixed), title, a0.name, a1.name)
    return files


def cmd_invariant(args) -> int:
    dms = _load(args.input, args)
    scale = _scale_axis(args.scale, [dms], args.unit_ratio)

    def compute(key: str) -> dict[str, str]:
        if args.invariant == "betti0":
            gf = betti0_grid(dms, scale, args.unit_ratio, args.threads or None)
            if not gf.is_order_reversing():
                raise SelfCheckError("Betti-0 grid is not order-reversing")
            picks = sorted({0, scale.count // 2, scale.count - 1})
            slices = [
                (f"delta{m}", (0, 1), {2: m}, f"b0 at delta={scale.values()[m]:g}") for m in picks
            ]
            return _grid_files(f"{key}_betti0", gf, slices)
        if args.invariant == "crocker":
            gf = crocker(dms, args.k, scale)
            return _grid_files(f"{key}_crocker{args.k}", gf, [("plane", (0, 1), {}, f"CROCKER H{args.k}")])
        rk = RankInvariantGrid(dms, args.k, scale, args.unit_ratio)
        last = dms.count - 1
        s = scale.count
        vals = np.array(
            [[rk.value((0, last, i, 0, last, j)) for j in range(s)] for i in range(s)], dtype=np.int64
        )
        axes = (
            Axis("delta", scale.origin, scale.step, s, True, "scale"),
            Axis("delta_prime", scale.origin, scale.step, s, False, "scale"),
        )
        gf = GridFunction(axes, vals, True, True, {**rk.meta, "interval": "full"})
        return _grid_files(f"{key}_rank{args.k}", gf, [("scales", (0, 1), {}, f"rank H{args.k}, full interval")])

    for path in _run_cached(args, [args.input], compute):
        print(path)
    return EXIT_OK


def cmd_compare(args) -> int:
    a, b = _load(args.input, args), _load(args.input_b, args)
    scale = _scale_axis(args.scale, [a, b], args.unit_ratio)

    def compute(key: str) -> dict[str, str]:
        if args.invariant == "betti0":
            rep = compare_betti0(a, b, scale, args.unit_ratio, args.threads or None)
        else:
            rep = compare_rank(a, b, args.k, scale, args.unit_ratio)
        return {f"{key}_compare.json": json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n"}

    paths = _run_cached(args, [args.input, args.input_b], compute)
    sys.stdout.write(paths[0].read_text())
    return EXIT_OK


def cmd_oracle(args) -> int:
    a, b = _load(args.input, args), _load(args.input_b, args)
    dd = ddyn_bruteforce(a, b)
    gh = dyn_gh(a, b)
    report = {
        "d_dyn": dd.value,
        "d_dyn_correspondence": [list(p) for p in dd.correspondence.pairs],
        "dyn_gh": gh.value,
        "dyn_gh_correspondence": [list(p) for p in gh.correspondence.pairs],
        "weak_l1_gh": weak_lp_gh(a, b, 1.0),
        "gh_first_slice": gh_bruteforce(a.dist[0], b.dist[0]),
        "points_a": list(a.points),
        "points_b": list(b.points),
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "oracle.json").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"example": cmd_example, "invariant": cmd_invariant, "compare": cmd_compare, "oracle": cmd_oracle}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except SelfCheckError as exc:
        print(f"self-check failed: {exc}", file=sys.stderr)
        return EXIT_SELF_CHECK
    except (DMSError, ConfigError, ComplexError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
