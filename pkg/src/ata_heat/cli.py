"""Command-line experiment runner.

    ata-heat {spectrum,step,evolve,cluster,resources} [--config PATH] [--out DIR]
             [--seed INT] [--oracle {on,off}]

Configs are JSON objects with ``"version": 1`` and optional sections
(``grid``, ``ata``, ``sources``, ``step``, ``evolve``, ``cluster``,
``resources``). Every key has a default (see ``DEFAULTS``); unknown keys
are rejected. Each command writes CSV files plus ``<command>.meta.json``.
"""

from __future__ import annotations

import argparse
import copy
import csv
import datetime
import json
import sys
from importlib import metadata
from pathlib import Path

import jsonschema
import numpy as np

CONFIG_VERSION = 1

DEFAULTS = {
    "seed": 0,
    "grid": {"n": 8, "c": 0.1, "n_t": 200},
    "ata": {"max_depth": 35, "loss_tol": 1e-12, "stagnation_tol": 0.0, "expansion": "latest-node"},
    "sources": {"kind": "field", "smoothness": 20, "mode": 1, "n_terms": 8, "degree": 20},
    "step": {"target": 0.99},
    "evolve": {"n_steps": 200, "d_cut": None, "d_cut_sweep": [], "gamma_mode": "scheme", "gamma": None,
               "lowpass_k": None, "term_cap": None, "preset": "field"},
    "cluster": {"study": "both", "ns": [5, 6, 7, 8, 9], "samples": 10, "depth_cap": 50, "c": 0.1,
                "threshold": 1.0, "smoothness": [2, 5, 10, 20], "n": 8, "n_steps": 100, "depth": 30},
    "resources": {"ns": list(range(4, 21)), "n_steps": [200, 20000], "depths": [35], "ps": [0.01, 0.1],
                  "hhl_constant": 1.0, "rev": "polylog"},
}

_INT = {"type": "integer"}
_POS = {"type": "integer", "minimum": 1}
_NUM = {"type": "number"}
_OPT_POS = {"type": ["integer", "null"], "minimum": 1}


def _section(props: dict) -> dict:
    return {"type": "object", "properties": props, "additionalProperties": False}


SCHEMA = {
    "type": "object",
    "required": ["version"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": CONFIG_VERSION},
        "command": {"enum": ["spectrum", "step", "evolve", "cluster", "resources"]},
        "seed": _INT,
        "grid": _section({"n": _POS, "c": {"type": "number", "exclusiveMinimum": 0}, "n_t": _POS}),
        "ata": _section({"max_depth": _POS, "loss_tol": {"type": "number", "minimum": 0},
                         "stagnation_tol": {"type": "number", "minimum": 0},
                         "expansion": {"enum": ["latest-node", "full-frontier"]}}),
        "sources": _section({"kind": {"enum": ["field", "eigenvector", "heater_cooler", "repr"]},
                             "smoothness": {"type": "integer", "minimum": 0}, "mode": _INT,
                             "n_terms": _POS, "degree": {"type": "integer", "minimum": 0}}),
        "step": _section({"target": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}}),
        "evolve": _section({"n_steps": _POS, "d_cut": _OPT_POS,
                            "d_cut_sweep": {"type": "array", "items": _POS},
                            "gamma_mode": {"enum": ["scheme", "additive"]},
                            "gamma": {"type": ["number", "null"]},
                            "lowpass_k": {"type": ["integer", "null"], "minimum": 0},
                            "term_cap": _OPT_POS,
                            "preset": {"enum": ["field", "repr", "heater_cooler", "zero_source"]}}),
        "cluster": _section({"study": {"enum": ["haar", "smoothness", "both"]},
                             "ns": {"type": "array", "items": _POS}, "samples": {"type": "integer", "minimum": 2},
                             "depth_cap": _POS, "c": {"type": "number", "exclusiveMinimum": 0},
                             "threshold": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                             "smoothness": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                             "n": _POS, "n_steps": _POS, "depth": _POS}),
        "resources": _section({"ns": {"type": "array", "items": _POS},
                               "n_steps": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                               "depths": {"type": "array", "items": _POS},
                               "ps": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0,
                                                                 "exclusiveMaximum": 1}},
                               "hhl_constant": {"type": "number", "exclusiveMinimum": 0},
                               "rev": {"enum": ["polylog", "exponential"]}}),
    },
}


class ConfigError(ValueError):
    pass


def load_config(raw: dict | None) -> dict:
    """Validate a raw config and fill in defaults."""
    raw = {"version": CONFIG_VERSION} if raw is None else raw
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    cfg = copy.deepcopy(DEFAULTS)
    for key, value in raw.items():
        if isinstance(value, dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    return cfg


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return v


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([_fmt(v) for v in r])


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _grid(cfg, n=None):
    from .grid import GridSpec
    g = cfg["grid"]
    return GridSpec.unit_run(n or g["n"], g["c"], g["n_t"])


def _ata(cfg, **over):
    from .ata import AtaConfig
    a = dict(cfg["ata"])
    a.update(over)
    return AtaConfig(**a)


def cmd_spectrum(cfg, out: Path, oracle: bool) -> list:
    from .grid import approx_spectrum, exact_spectrum
    g = _grid(cfg)
    ex, ap = exact_spectrum(g), approx_spectrum(g)
    path = out / "spectrum.csv"
    write_csv(path, ["k", "exact", "approx"], ((k, ex[k], ap[k]) for k in range(g.size)))
    return [path]


def _step_rhs(cfg, g):
    from . import sources as S
    src = cfg["sources"]
    kind = src["kind"]
    if kind == "field":
        s_chi, s_f = S.field_seeds(cfg["seed"], 2)
        chi = S.sample_field(src["smoothness"], 0, s_chi)
        f = S.normalize_pair(chi, S.sample_field(src["smoothness"], src["smoothness"], s_f))
        return g.c * (g.dt * S.discretize(f, g.n, 0.0) - S.discretize(chi, g.n))
    if kind == "eigenvector":
        return np.cos(2.0 * np.pi * src["mode"] * S.grid_points(g.n))
    if kind == "heater_cooler":
        return g.c * g.dt * S.heater_cooler_field(g.n)
    s_chi, _ = S.field_seeds(cfg["seed"], 2)
    return S.prepare_from_pauli_sum(S.sample_repr_initial(g.n, src["n_terms"], s_chi)).amps


def cmd_step(cfg, out: Path, oracle: bool) -> list:
    from .ata import solve_system
    from .grid import approx_spectrum
    from .oracle import fidelity, solve_exact
    from .pauli import decompose_operator

    g = _grid(cfg)
    b = _step_rhs(cfg, g)
    lam = approx_spectrum(g)
    x_ref = solve_exact(b, g).x if oracle else None
    rows = []

    def record(tree):
        fid = None
        if x_ref is not None:
            fid = fidelity(np.fft.ifft(tree.multiplier() * tree.root.amps), x_ref)
        rows.append((tree.depth, tree.loss_history[-1], fid))
        return False

    tree = solve_system(b, lam, decompose_operator(lam), _ata(cfg), callback=record)
    path = out / "step.csv"
    write_csv(path, ["depth", "loss", "fidelity"], rows)
    target = cfg["step"]["target"]
    hit = [d for d, _, f in rows if f is not None and f >= target]
    cfg["_summary"] = {"final_depth": tree.depth, "stop_reason": tree.stop_reason,
                       "min_depth_for_target": hit[0] if hit else None,
                       "saturated": bool(oracle and not hit)}
    return [path]


def _evolve_inputs(cfg, g, n_steps):
    from . import sources as S
    src, preset = cfg["sources"], cfg["evolve"]["preset"]
    s_chi, s_f = S.field_seeds(cfg["seed"], 2)
    if preset == "heater_cooler":
        chi, f = S.heater_cooler_preset(g.n)
        return chi, S.StaticSource(f)
    if preset == "repr":
        chi = S.sample_repr_initial(g.n, src["n_terms"], s_chi)
        model = S.sample_repr_source(g.n, src["n_terms"], src["degree"], n_steps, s_f)
        return chi, S.normalize_repr_pair(chi, model)
    G = src["smoothness"]
    chi = S.sample_field(G, 0, s_chi)
    if preset == "zero_source":
        return S.discretize_repr(chi, g.n), None
    f = S.normalize_pair(chi, S.sample_field(G, G, s_f))
    return S.discretize_repr(chi, g.n), S.FieldSource(f, g.n, n_steps)


def cmd_evolve(cfg, out: Path, oracle: bool) -> list:
    from .evolve import EvolveConfig, run
    ev = cfg["evolve"]
    g = _grid(cfg)
    n_steps = ev["n_steps"]
    chi, model = _evolve_inputs(cfg, g, n_steps)
    sweep = ev["d_cut_sweep"] or [ev["d_cut"]]
    written = []
    finals = []
    for d_cut in sweep:
        ecfg = EvolveConfig(g, _ata(cfg), d_cut=d_cut, gamma_mode=ev["gamma_mode"], gamma=ev["gamma"],
                            lowpass_k=ev["lowpass_k"], term_cap=ev["term_cap"])
        traj = run(chi, model, ecfg, n_steps, track_oracle=oracle)
        name = "trajectory.csv" if len(sweep) == 1 else f"trajectory_dcut_{d_cut}.csv"
        traj.to_csv(out / name)
        written.append(out / name)
        last = traj.diagnostics[-1]
        finals.append((d_cut, None if last.fidelity is None else 1.0 - last.fidelity, last.term_count))
    if len(sweep) > 1:
        path = out / "dropout.csv"
        write_csv(path, ["d_cut", "final_infidelity", "final_term_count"], finals)
        written.append(path)
    return written


def cmd_cluster(cfg, out: Path, oracle: bool) -> list:
    from .cluster import haar_random_study, smoothness_sweep
    cl = cfg["cluster"]
    written = []
    if cl["study"] in ("haar", "both"):
        rows = []
        for n in cl["ns"]:
            rep = haar_random_study(n, cl["samples"], cl["depth_cap"], cl["c"], seed=cfg["seed"] + n,
                                    threshold=cl["threshold"])
            rows.append((n, cl["samples"], rep.size, " ".join(str(m) for m in rep.masks)))
        path = out / "cluster_haar.csv"
        write_csv(path, ["n", "samples", "cluster_size", "masks"], rows)
        written.append(path)
    if cl["study"] in ("smoothness", "both"):
        res = smoothness_sweep(cl["n"], cl["c"], cl["smoothness"], cl["n_steps"], cl["depth"],
                               cfg["seed"], cl["threshold"])
        path = out / "cluster_smoothness.csv"
        write_csv(path, ["smoothness", "trees", "cluster_size"], ((G, r.trees_analyzed, r.size) for G, r in res))
        written.append(path)
    return written


def cmd_resources(cfg, out: Path, oracle: bool) -> list:
    from .resources import comparison_table
    r = cfg["resources"]
    rows = comparison_table(r["ns"], r["n_steps"], r["depths"], r["ps"], r["hhl_constant"], r["rev"])
    path = out / "resources.csv"
    header = list(rows[0].keys()) if rows else ["n"]
    write_csv(path, header, (list(row.values()) for row in rows))
    return [path]


COMMANDS = {
    "spectrum": cmd_spectrum,
    "step": cmd_step,
    "evolve": cmd_evolve,
    "cluster": cmd_cluster,
    "resources": cmd_resources,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ata-heat", description="Ansatz-tree heat-equation experiments")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="JSON config file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--oracle", choices=["on", "off"], default="on", help="track the exact reference")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = json.loads(args.config.read_text()) if args.config else None
        cfg = load_config(raw)
        if "command" in cfg and cfg["command"] != args.command:
            raise ConfigError(f"config is for {cfg['command']!r}, not {args.command!r}")
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"ata-heat: config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg["seed"] = args.seed
    oracle = args.oracle == "on"
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        written = COMMANDS[args.command](cfg, args.out, oracle)
    except Exception as exc:  # noqa: BLE001 - reported and mapped to the exit code
        print(f"ata-heat: {args.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    summary = cfg.pop("_summary", None)
    meta = {
        "command": args.command,
        "config": cfg,
        "seed": cfg["seed"],
        "oracle": oracle,
        "outputs": [p.name for p in written],
        "library_version": _version(),
        "numpy_version": np.__version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if summary is not None:
        meta["summary"] = summary
    with open(args.out / f"{args.command}.meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
