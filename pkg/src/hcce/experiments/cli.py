"""``hcce`` command line entry point."""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .. import codec
from ..errors import HCCEError
from ..geometry import mesh_diameter, shapes, load_mesh
from ..loss_math import LossConfig, synthetic_schedule, weight_trajectory
from ..metrics import COORD_FRACTIONS, coordinate_accuracy
from .ablation import run_ablation, write_reports
from .config import load_config
from .io import load_cmap, save_cmap
from .scene import NOISE_STREAM, corrupt_map, generate_scene
from .svg import write_recall_svgs


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="directory for outputs (default: .)")
    p.add_argument("--threads", type=int, default=None, help="override the config thread count")


def _bits(a):
    return "".join(str(int(b)) for b in a)


def cmd_codec_inspect(args):
    x = args.x
    bits = codec.hbce_encode(x)
    levels = codec.hcce_encode(x)
    conv = codec.hcce_to_binary(levels)
    dec = codec.binary_decode(conv)
    dec_mid = codec.binary_decode(conv, midpoint=True)
    print(f"x                 {x!r}")
    print(f"hbce bits         {_bits(bits)}")
    print("hcce levels       " + " ".join(f"{v:.6g}" for v in levels))
    print(f"converted bits    {_bits(conv)}")
    print(f"decoded           {dec!r}")
    print(f"decoded+midpoint  {dec_mid!r}")
    print(f"roundtrip error   {abs(dec - x)!r}")
    return 0


def _load_cfg(args):
    cfg = load_config(args.config).with_overrides(seed=args.seed, threads=args.threads)
    return cfg


def cmd_render(args):
    cfg = _load_cfg(args)
    mesh = cfg.load_mesh()
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    poses = []
    for i in range(cfg.scenes):
        pose, clean = generate_scene(cfg, i, mesh)
        noisy = corrupt_map(clean, cfg.noise, np.random.SeedSequence([cfg.seed, i, NOISE_STREAM]),
                            mesh.diameter, mesh.bounds)
        save_cmap(clean, out / f"scene_{i:04d}_gt.cmap")
        save_cmap(noisy, out / f"scene_{i:04d}_pred.cmap")
        poses.append({"scene": i, "rotation": pose.rotation.tolist(), "translation": pose.translation.tolist(),
                      "pixels": int(clean.mask.sum())})
    with open(out / "scenes.json", "w") as fh:
        json.dump({"config": cfg.to_dict(), "diameter": mesh.diameter, "scenes": poses}, fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    print(f"rendered {cfg.scenes} scenes into {out}")
    return 0


def cmd_ablate(args):
    cfg = _load_cfg(args)
    mesh = cfg.load_mesh()
    rows, scenes = run_ablation(cfg, mesh)
    csv_path, json_path = write_reports(cfg, rows, scenes, args.out_dir)
    if cfg.svg or args.svg:
        write_recall_svgs(scenes, cfg.modes, mesh.diameter, args.out_dir, cfg.auc_max_threshold)
    print(f"{'mode':<5} {'fail':>4} {'recall@0.1':>10} {'auc':>7} {'med rot':>10} {'med trans':>10}")
    for r in rows:
        print(f"{r.mode:<5} {r.failures:>4} {r.recall[0.1]:>10.3f} {r.auc:>7.3f} "
              f"{r.median_rot:>10.3g} {r.median_trans:>10.3g}")
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _schedule(source):
    if source.startswith("synthetic"):
        _, _, n = source.partition(":")
        return synthetic_schedule(int(n) if n else 10)
    with open(source) as fh:
        return json.load(fh)


def cmd_loss_demo(args):
    sigma = LossConfig(sigma=args.sigma).sigma
    hists = weight_trajectory(_schedule(args.schedule), sigma)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    levels = len(hists[0].weights) if hists else 0
    header = ["epoch"] + [f"r{i + 1}" for i in range(levels)] + [f"w{i + 1}" for i in range(levels)]
    lines = [",".join(header)]
    print("epoch  weights (level 1..%d)" % levels)
    for e, h in enumerate(hists):
        lines.append(",".join([str(e)] + [repr(float(v)) for v in h.error_rates] + [repr(float(v)) for v in h.weights]))
        print(f"{e:>5}  " + " ".join(f"{w:.3f}" for w in h.weights))
    (out / "loss_demo.csv").write_text("\n".join(lines) + "\n")
    return 0


def _diameter(args, gt):
    if args.diameter is not None:
        return args.diameter
    if args.mesh is not None:
        if args.mesh.startswith("builtin:"):
            return shapes.builtin(args.mesh.split(":", 1)[1]).diameter
        return load_mesh(args.mesh).diameter
    # fall back to the extent of the visible ground-truth points (a lower bound)
    pts = np.concatenate([gt.front[gt.mask], gt.back[gt.mask]])
    return mesh_diameter(pts)


def cmd_eval(args):
    pred = load_cmap(args.pred)
    gt = load_cmap(args.gt)
    diameter = _diameter(args, gt)
    acc = coordinate_accuracy(pred, gt, diameter)
    doc = {"diameter": diameter, "fractions": list(COORD_FRACTIONS), "coord_accuracy": acc}
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        (args.out_dir / "eval.json").write_text(text + "\n")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="hcce", description="HCCE pose estimation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("codec-inspect", help="show HBCE/HCCE codes for one value in [0, 1]")
    p.add_argument("x", type=float)
    p.set_defaults(func=cmd_codec_inspect)

    p = sub.add_parser("render", help="render scenes to CMAP files")
    p.add_argument("config", type=Path)
    _common(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("ablate", help="run the f/b/bf/bfu ablation")
    p.add_argument("config", type=Path)
    p.add_argument("--svg", action="store_true", help="also write recall curves as SVG")
    _common(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("loss-demo", help="print level weights for an error-rate schedule")
    p.add_argument("schedule", help="JSON file (list of 8-level error-rate vectors) or synthetic[:EPOCHS]")
    p.add_argument("--sigma", type=float, default=LossConfig().sigma)
    _common(p)
    p.set_defaults(func=cmd_loss_demo)

    p = sub.add_parser("eval", help="coordinate accuracy of a predicted CMAP against ground truth")
    p.add_argument("pred", type=Path)
    p.add_argument("gt", type=Path)
    p.add_argument("--mesh", help="mesh path or builtin:NAME giving the diameter")
    p.add_argument("--diameter", type=float, help="object diameter in meters")
    p.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--threads", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--out-dir", type=Path, default=None, help="also write eval.json here")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HCCEError, ValueError, OSError) as exc:
        print(f"hcce: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
