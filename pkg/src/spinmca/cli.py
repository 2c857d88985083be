"""Command-line entry point: ``spinmca {train,quantize,eval,power,device-demo}``.

Exit codes: 0 success, 2 bad arguments, 3 I/O or file-format failure,
4 numeric failure (calibration or programming), 1 anything else.
"""
import argparse
import csv
import io
import sys
import time
from dataclasses import replace

import numpy as np

from . import data, interface, network, power
from .config import apply_overrides, load_config
from .errors import (ArgumentError, CalibrationError, ParseError, ProgrammingError,
                     SpinMCAError)
from .interface import ClockSchedule, IMParams
from .memristor import MemristorParams, WriteController, calibrate_switching
from .spintronic import DWParams

EXIT_OK, EXIT_OTHER, EXIT_ARGS, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3, 4


def device_setup(config_path=None):
    """Device parameters with any config-file overrides applied."""
    cfg = load_config(config_path) if config_path else {}
    mem_over = dict(cfg.get("memristor", {}))
    t_switch = mem_over.pop("t_switch", None)
    v_prog = mem_over.pop("v_prog", None)
    params = apply_overrides(MemristorParams(), mem_over)
    if t_switch is not None or v_prog is not None:
        params = calibrate_switching(params, t_switch or 100e-9, v_prog or 1.0)
    im_over = dict(cfg.get("im", {}))
    k = im_over.pop("k", interface.DEFAULT_K)
    i_half = im_over.pop("i_half", network.DEFAULT_I_HALF)
    dw = apply_overrides(DWParams(), cfg.get("dw", {}))
    schedule = apply_overrides(ClockSchedule(), cfg.get("schedule", {}))
    im = apply_overrides(IMParams(schedule=schedule, dw=dw), im_over)
    crossbar = cfg.get("crossbar", {})
    unknown = set(crossbar) - {"v_read"}
    if unknown:
        raise ArgumentError(f"unknown crossbar parameter(s): {', '.join(sorted(unknown))}")
    return {
        "params": params,
        "ctrl": apply_overrides(WriteController(), cfg.get("write", {})),
        "im": im,
        "k": k,
        "i_half": i_half,
        "v_read": crossbar.get("v_read", 0.5),
    }


def _emit(text, out=None):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def cmd_train(args):
    topo = network.Topology.parse(args.topology) if args.topology else \
        network.Topology(network.PRESET_TOPOLOGIES[args.dataset])
    train = data.load_split(args.dataset, args.data_dir, "train")
    if args.limit:
        train = train.head(args.limit)
    t0 = time.time()

    def log(epoch, loss):
        print(f"epoch {epoch:3d}  loss {loss:.6f}  ({time.time() - t0:.1f} s)", flush=True)

    wf = data.train_mlp(topo, train, lr=args.lr, epochs=args.epochs, batch=args.batch,
                        seed=args.seed, momentum=args.momentum, bias=not args.no_bias, log=log)
    wf.metadata["dataset"] = args.dataset
    try:
        test = data.load_split(args.dataset, args.data_dir, "test")
    except FileNotFoundError:
        test = None
    if test is not None:
        acc = data.float_accuracy([layer.weights for layer in wf.layers], test, wf.bias)
        wf.metadata["float_test_accuracy"] = acc
        print(f"float test accuracy {acc:.4f}")
    data.save_weights(wf, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_quantize(args):
    wf = data.quantize_weights(data.load_weights(args.weights))
    for idx, layer in enumerate(wf.layers):
        err = np.abs(data.dequantized_weights(wf)[idx] - layer.weights).max()
        print(f"layer {idx}: shape {layer.weights.shape}, w_max {layer.w_max:.6g}, max |error| {err:.3g}")
    data.save_weights(wf, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_eval(args):
    wf = data.load_weights(args.weights)
    ds = data.load_split(args.dataset, args.data_dir, args.split)
    if args.limit:
        ds = ds.head(args.limit)
    if len(ds) == 0:
        raise ArgumentError("test set is empty")
    if not wf.quantized:
        if args.fidelity == "device":
            raise ArgumentError("device fidelity needs a quantized weight file; run `spinmca quantize` first")
        acc = data.float_accuracy([layer.weights for layer in wf.layers], ds, wf.bias)
        print(f"float (unquantized) accuracy {acc:.4f} on {len(ds)} samples")
        return EXIT_OK
    dev = device_setup(args.config)
    activation = network.Step() if args.activation == "step" else network.Sigmoid(dev["i_half"])
    programming = args.programming or ("device" if args.fidelity == "device" else "ideal")
    t0 = time.time()
    net = network.from_weight_file(
        wf, activation=activation, fidelity=programming, full_scale=args.full_scale,
        k=dev["k"], params=dev["params"], ctrl=dev["ctrl"], im=dev["im"], v_read=dev["v_read"])
    t1 = time.time()
    acc = network.evaluate_accuracy(net, ds, fidelity=args.fidelity)
    rows = [{"fidelity": args.fidelity, "programming": programming, "activation": args.activation,
             "samples": len(ds), "accuracy": f"{acc:.4f}",
             "program_s": f"{t1 - t0:.2f}", "eval_s": f"{time.time() - t1:.2f}"}]
    _emit(_format_records(rows, args.format), args.out)
    return EXIT_OK


def cmd_power(args):
    table = power.ComponentPowerTable()
    if args.preset:
        rows = power.preset_rows(args.preset, table)
    elif args.topology:
        rows = power.comparison_rows(network.Topology.parse(args.topology), None, table)
    else:
        raise ArgumentError("give --preset or --topology")
    text = power.to_csv(rows) if args.format == "csv" else power.to_table(rows)
    _emit(text, args.out)
    return EXIT_OK


def cmd_device_demo(args):
    dev = device_setup(args.config)
    im = replace(dev["im"], s_in=args.s_in, g_out=args.g_out)
    rows = interface.trace(args.i_plus, args.i_minus, im, steps_per_phase=args.steps)
    text = _format_records(rows, args.format or "csv")
    _emit(text, args.out)
    return EXIT_OK


def _format_records(rows, fmt):
    keys = list(rows[0])
    cells = [[_fmt(r[k]) for k in keys] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        w.writerows(cells)
        return buf.getvalue()
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(line.rstrip() for line in lines)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key/value device parameter file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (default: stdout / weights.json)")
    common.add_argument("--format", choices=["table", "csv"], default=None)

    p = argparse.ArgumentParser(prog="spinmca", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", parents=[common], help="train a float MLP offline")
    t.add_argument("--dataset", choices=["mnist", "cifar10"], required=True)
    t.add_argument("--data-dir", required=True)
    t.add_argument("--topology", help="comma-separated widths (default: dataset preset)")
    t.add_argument("--epochs", type=int, default=30)
    t.add_argument("--lr", type=float, default=0.1)
    t.add_argument("--batch", type=int, default=64)
    t.add_argument("--momentum", type=float, default=0.9)
    t.add_argument("--limit", type=int, help="use only the first N training samples")
    t.add_argument("--no-bias", action="store_true")
    t.set_defaults(func=cmd_train)

    q = sub.add_parser("quantize", parents=[common], help="quantize weights to 31 signed levels")
    q.add_argument("--weights", required=True)
    q.set_defaults(func=cmd_quantize)

    e = sub.add_parser("eval", parents=[common], help="evaluate accuracy on a dataset split")
    e.add_argument("--weights", required=True)
    e.add_argument("--dataset", choices=["mnist", "cifar10"], required=True)
    e.add_argument("--data-dir", required=True)
    e.add_argument("--split", choices=["train", "test"], default="test")
    e.add_argument("--fidelity", choices=["behavioral", "device"], default="behavioral")
    e.add_argument("--programming", choices=["ideal", "device"],
                   help="crossbar programming (default: device for --fidelity device, else ideal)")
    e.add_argument("--activation", choices=["sigmoid", "step"], default="sigmoid")
    e.add_argument("--full-scale", choices=["preactivation", "layer_max"], default="preactivation")
    e.add_argument("--limit", type=int)
    e.set_defaults(func=cmd_eval)

    w = sub.add_parser("power", parents=[common], help="architecture power comparison")
    w.add_argument("--preset", help=f"one of {', '.join(network.PRESET_TOPOLOGIES)}")
    w.add_argument("--topology", help="comma-separated widths")
    w.set_defaults(func=cmd_power)

    d = sub.add_parser("device-demo", parents=[common], help="trace one interface-module clock period")
    d.add_argument("--i-plus", type=float, required=True, help="positive-column current (A)")
    d.add_argument("--i-minus", type=float, required=True, help="negative-column current (A)")
    d.add_argument("--s-in", type=float, default=1.0, help="input mirror ratio")
    d.add_argument("--g-out", type=float, default=1.0, help="output mirror gain")
    d.add_argument("--steps", type=int, default=20, help="integration steps per clock phase")
    d.set_defaults(func=cmd_device_demo)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("train", "quantize") and not args.out:
        args.out = "weights.json"
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CalibrationError, ProgrammingError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except SpinMCAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
