"""Command-line front end: single scans, Monte Carlo campaigns, 2D imaging and the benchmark."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .detection import DetectorConfig, detect
from .errors import ConfigError, SaraError
from .geometry import UlaGeometry, UraGeometry
from .metrics import METRIC_FIELDS
from .reconstruction import LadResponse, reconstruct
from .sampling import SamplingPlan
from .signal_model import MODES, ScanRecord, Scene, scan_scene
from .simulation import (
    METHODS,
    PARAM_FIELDS,
    SAMPLINGS,
    ScenarioConfig,
    build_plan,
    random_scene_2d,
    run_benchmark,
    run_imaging_2d,
    run_multi_target,
    run_single_target,
    trial_rng,
)

BENCH_FIELDS = ["method", "n_elements", "upsample", "output_size", "repeats", "median_seconds"]


def write_rows(path, rows, fieldnames) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames)
        w.writeheader()
        w.writerows(rows)


def write_scan_csv(path, record: ScanRecord) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["lad", "re", "im", "time"])
        for lad, v, t in record.entries:
            w.writerow([repr(lad), repr(v.real), repr(v.imag), repr(t)])


def read_scan_csv(path, scan_period: float = 0.0) -> ScanRecord:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return ScanRecord(data[:, 0], data[:, 1] + 1j * data[:, 2], data[:, 3], scan_period)


def load_config(args) -> ScenarioConfig:
    cfg = ScenarioConfig.load(args.config) if args.config else ScenarioConfig()
    over = {}
    if args.seed is not None:
        over["rng_seed"] = args.seed
    if args.trials is not None:
        over["trials"] = args.trials
    if args.method:
        over["methods"] = args.method
    if args.sampling:
        over["sampling"] = args.sampling
    if getattr(args, "mode", None):
        over["mode"] = args.mode
    return replace(cfg, **over) if over else cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_scan(args) -> int:
    cfg = load_config(args)
    scene = Scene.load(args.scene)
    g = cfg.geometry()
    plan = build_plan(cfg, g, cfg.methods[0])
    record = scan_scene(scene, g, plan, cfg.mode, cfg.scan_period, trial_rng(cfg.rng_seed, 0))
    out = _out_dir(args)
    plan.save(out / "plan.json")
    write_scan_csv(out / "scan.csv", record)
    return 0


def cmd_reconstruct(args) -> int:
    cfg = load_config(args)
    plan = SamplingPlan.load(args.plan)
    record = read_scan_csv(args.scan)
    method = {"sara-ar": "ar", "sara-red": "ar", "sara-lr": "lr", "cubic": "cubic"}.get(cfg.methods[0])
    if method is None:
        raise ConfigError(f"method {cfg.methods[0]} does not reconstruct")
    resp = reconstruct(record, plan, args.upsample or cfg.upsample, method)
    resp.to_csv(_out_dir(args) / "response.csv")
    return 0


def cmd_detect(args) -> int:
    cfg = load_config(args)
    resp = LadResponse.from_csv(args.response, wrap_sign=args.wrap_sign)
    if resp.domain != "lad":
        raise ConfigError("detection needs a response on a uniform LAD axis")
    noise_db = args.noise_db if args.noise_db is not None else cfg.noise_power_db[0]
    det = DetectorConfig(
        10 ** (noise_db / 10) / cfg.n_elements,
        cfg.n_elements,
        cfg.p_fa,
        cfg.kappa,
        cfg.max_iterations,
        cfg.mode,
        cfg.spacing_ratio,
    )
    report = detect(resp, det)
    with open(_out_dir(args) / "detections.jsonl", "a", encoding="utf-8") as fh:
        fh.write(report.to_json(source=str(args.response), noise_power_db=noise_db) + "\n")
    return 0


def cmd_mc_single(args) -> int:
    cfg = load_config(args)
    if args.noise_db:
        cfg = replace(cfg, noise_power_db=args.noise_db)
    rows = run_single_target(cfg)
    write_rows(_out_dir(args) / "single_target.csv", rows, PARAM_FIELDS + METRIC_FIELDS)
    return 0


def cmd_mc_multi(args) -> int:
    cfg = load_config(args)
    if args.elements:
        cfg = replace(cfg, multi_elements=args.elements)
    if args.noise_db:
        cfg = replace(cfg, multi_noise_power_db=args.noise_db)
    rows = run_multi_target(cfg, args.delta)
    write_rows(_out_dir(args) / "multi_target.csv", rows, PARAM_FIELDS + METRIC_FIELDS)
    return 0


def cmd_image2d(args) -> int:
    cfg = load_config(args)
    if args.scene:
        if not Path(args.scene).exists():
            raise ConfigError(f"scene file {args.scene} not found")
        scene = Scene.load(args.scene)
    elif args.random:
        scene = random_scene_2d(args.random, trial_rng(cfg.rng_seed, 0))
    else:
        raise ConfigError("image2d needs --scene PATH or --random K")
    lam = cfg.wavelength
    ula = UlaGeometry(args.size, cfg.spacing_ratio * lam, lam)
    out = _out_dir(args)
    res = run_imaging_2d(scene, UraGeometry(ula, ula), out, args.upsample or 10)
    rows = [
        {"method": m, "n_scatterers": len(scene.scatterers), "size": args.size, "upsample": args.upsample or 10, "epsilon": res[f"eps_{m}"]}
        for m in ("sara", "cubic")
    ]
    write_rows(out / "epsilon.csv", rows, list(rows[0]))
    return 0


def cmd_bench(args) -> int:
    rows = run_benchmark(args.orders, args.output_size, args.repeats, args.warmup)
    write_rows(_out_dir(args) / "benchmark.csv", rows, BENCH_FIELDS)
    return 0


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario JSON; flags override its fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--method", action="append", choices=METHODS, help="repeat for several methods")
    p.add_argument("--sampling", choices=SAMPLINGS)
    p.add_argument("--mode", choices=MODES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sara", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="simulate one sweep of a scene file")
    _common(p)
    p.add_argument("--scene", required=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("reconstruct", help="upsample a recorded sweep")
    _common(p)
    p.add_argument("--scan", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--upsample", type=int)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("detect", help="extract targets from a reconstructed response")
    _common(p)
    p.add_argument("--response", required=True)
    p.add_argument("--noise-db", type=float)
    p.add_argument("--wrap-sign", type=int, choices=(-1, 1), default=1)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("mc-single", help="single-target RMSE campaign")
    _common(p)
    p.add_argument("--noise-db", type=float, nargs="+")
    p.set_defaults(func=cmd_mc_single)

    p = sub.add_parser("mc-multi", help="three-target detection campaign")
    _common(p)
    p.add_argument("--elements", type=int, nargs="+")
    p.add_argument("--noise-db", type=float, nargs="+")
    p.add_argument("--delta", type=float, nargs="+", help="spacings in units of 1/(2N-1)")
    p.set_defaults(func=cmd_mc_multi)

    p = sub.add_parser("image2d", help="URA imaging demo")
    _common(p)
    p.add_argument("--scene")
    p.add_argument("--random", type=int, metavar="K", help="draw K random scatterers instead of a scene file")
    p.add_argument("--size", type=int, default=16, help="elements per URA side")
    p.add_argument("--upsample", type=int)
    p.set_defaults(func=cmd_image2d)

    p = sub.add_parser("bench", help="reconstruction runtime at fixed output size")
    p.add_argument("--orders", type=int, nargs="*", default=[16, 32, 64, 128])
    p.add_argument("--output-size", type=int, default=256)
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--warmup", type=int, default=10)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SaraError, OSError) as exc:
        print(f"sara: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
