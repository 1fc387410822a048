"""Command-line experiment runner.

Usage::

    twomanifold {generate,embed,twomanifold,sysid,oracle} [--config PATH]
                [--seed N] [--out DIR] [--paper-scale]

Each run writes its outputs plus ``resolved_config.json`` into the output
directory. Exit status is 0 on success, 2 for an invalid config and 1 for
any other failure (missing input, degenerate data, ...).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import eigenmaps, evaluation, gram, spectral, synth, sysid
from .config import COMMANDS, ConfigError, ExperimentConfig, load_config, resolve
from .io import config_hash, read_csv, write_csv, write_json

log = logging.getLogger("twomanifold")


def _swiss_params(c) -> synth.SwissRollParams:
    return synth.SwissRollParams(c.width, c.height, c.a_f, c.b_f, c.a_g, c.b_g)


def _circuit_params(c) -> synth.CircuitParams:
    return synth.CircuitParams(c.omega, c.speed_variation, c.process_noise, c.obs_noise)


def _swiss_sample(cfg: ExperimentConfig):
    c = cfg.generate.swiss_roll
    return synth.swiss_roll_pair(c.n, c.sigma_x, c.sigma_y, cfg.seed, _swiss_params(c))


def _one_view_gram(X, kernel, k_nn, normalized, graph_mode, bandwidth, pinv_rtol):
    if kernel == "rbf":
        return gram.rbf_gram(X, bandwidth)
    if kernel == "linear":
        return gram.linear_gram(X)
    graph = eigenmaps.knn_graph(X, k_nn, graph_mode, bandwidth)
    lap = eigenmaps.graph_laplacian(graph, normalized)
    return eigenmaps.le_gram(lap, pinv_rtol)


def run_generate(cfg: ExperimentConfig, out: Path) -> dict:
    g = cfg.generate
    if g.kind == "swiss_roll":
        s = _swiss_sample(cfg)
        write_csv(out / "X.csv", s.X)
        write_csv(out / "Y.csv", s.Y)
        write_csv(out / "Z.csv", s.Z)
        manifest = {"kind": "swiss_roll", "seed": cfg.seed, "n": g.swiss_roll.n,
                    "sigma_x": s.sigma_x, "sigma_y": s.sigma_y, "params": s.params.to_dict()}
    elif g.kind == "linear":
        c = g.linear
        s = synth.linear_two_view(c.n, c.k_latent, c.d_x, c.d_y, c.sigma_x, c.sigma_y, cfg.seed,
                                  anisotropy=c.anisotropy)
        for name in ("X", "Y", "Z", "M", "N"):
            write_csv(out / f"{name}.csv", getattr(s, name))
        manifest = {"kind": "linear", "seed": cfg.seed, **vars(c)}
    else:
        c = g.circuit
        s = synth.circuit_series(c.T_train + c.T_test, cfg.seed, _circuit_params(c))
        write_csv(out / "train.csv", s.observations[: c.T_train])
        write_csv(out / "test.csv", s.observations[c.T_train :])
        write_csv(out / "train_targets.csv", s.targets[: c.T_train])
        write_csv(out / "test_targets.csv", s.targets[c.T_train :])
        manifest = {"kind": "circuit", "seed": cfg.seed, **vars(c)}
    write_json(out / "manifest.json", manifest)
    return manifest


def run_embed(cfg: ExperimentConfig, out: Path) -> dict:
    e = cfg.embed
    X = read_csv(e.input) if e.input else _swiss_sample(cfg).X
    if e.method == "le":
        graph = eigenmaps.knn_graph(X, e.k_nn, e.graph_mode, e.bandwidth)
        lap = eigenmaps.graph_laplacian(graph, e.normalized)
        E = eigenmaps.le_embedding(lap, e.k, e.scaled)
        sidecar = {"method": "le", "k": E.shape[1], "kernel": "le_normalized" if e.normalized else "le"}
    else:
        G = _one_view_gram(X, e.kernel, e.k_nn, e.normalized, e.graph_mode, e.bandwidth, e.pinv_rtol)
        spec = spectral.kernel_pca(gram.center(G), e.k)
        E = spec.embedding
        sidecar = {"method": "kernel_pca", "k": spec.k, "requested_k": e.k,
                   "kernel": G.kernel, "eigenvalues": spec.eigenvalues}
    write_csv(out / "E.csv", E)
    sidecar["config_hash"] = config_hash(cfg)
    write_json(out / "E.json", sidecar)
    return sidecar


def run_twomanifold(cfg: ExperimentConfig, out: Path) -> dict:
    t = cfg.twomanifold
    if t.x_path or t.y_path:
        if not (t.x_path and t.y_path):
            raise ConfigError("twomanifold: x_path and y_path must be given together")
        X, Y = read_csv(t.x_path, "X"), read_csv(t.y_path, "Y")
        Z = read_csv(t.z_path, "Z") if t.z_path else None
    else:
        s = _swiss_sample(cfg)
        X, Y, Z = s.X, s.Y, s.Z
    if X.shape[0] != Y.shape[0]:
        raise ValueError(f"X and Y must have the same number of rows ({X.shape[0]} vs {Y.shape[0]})")

    grams, separate = [], []
    for V in (X, Y):
        if t.kernel == "le":
            graph = eigenmaps.knn_graph(V, t.k_nn, t.graph_mode, t.bandwidth)
            lap = eigenmaps.graph_laplacian(graph, t.normalized)
            grams.append(eigenmaps.le_gram(lap, t.pinv_rtol))
            separate.append(eigenmaps.le_embedding(lap, t.k))
        else:
            G = _one_view_gram(V, t.kernel, t.k_nn, t.normalized, t.graph_mode, t.bandwidth, t.pinv_rtol)
            grams.append(G)
            separate.append(spectral.kernel_pca(gram.center(G), t.k).embedding)
    pair = spectral.instrumental_eigenmaps(gram.center(grams[0]), gram.center(grams[1]), t.k)
    write_csv(out / "E_X.csv", pair.E_X)
    write_csv(out / "E_Y.csv", pair.E_Y)
    write_csv(out / "separate_X.csv", separate[0])
    write_csv(out / "separate_Y.csv", separate[1])
    report = {
        "experiment": "twomanifold",
        "k": pair.svd.k,
        "requested_k": t.k,
        "singular_values": pair.svd.singular_values,
        "kernels": [grams[0].kernel, grams[1].kernel],
        "config_hash": config_hash(cfg),
    }
    if Z is not None and Z.shape[1] == pair.svd.k:
        rows = {}
        for label, E in (("instrumental_X", pair.E_X), ("instrumental_Y", pair.E_Y),
                         ("separate_X", separate[0]), ("separate_Y", separate[1])):
            rep = evaluation.alignment_report(E, Z, t.eval_k_nn)
            rows[label] = {"procrustes_error": rep.procrustes_error,
                           "neighborhood_overlap": rep.neighborhood_overlap}
        report["alignment"] = rows
    write_json(out / "report.json", report)
    return report


def _sysid_data(cfg: ExperimentConfig):
    s = cfg.sysid
    paths = (s.train_path, s.test_path, s.train_targets_path, s.test_targets_path)
    if any(paths):
        if not all(paths):
            raise ConfigError("sysid: train_path, test_path, train_targets_path and test_targets_path go together")
        return tuple(read_csv(p) for p in paths)
    c = cfg.generate.circuit
    sample = synth.circuit_series(c.T_train + c.T_test, cfg.seed, _circuit_params(c))
    o, y = sample.observations, sample.targets
    return o[: c.T_train], o[c.T_train :], y[: c.T_train], y[c.T_train :]


def run_sysid(cfg: ExperimentConfig, out: Path) -> dict:
    s = cfg.sysid
    train, test, train_t, test_t = _sysid_data(cfg)
    pairs = sysid.hankel_windows(train, s.future_len, s.past_len)
    t1_values = np.arange(max(s.t1_start, s.past_len), s.t1_stop + 1)
    horizons = np.arange(1, s.t2_max + 1)
    summary = {"experiment": "sysid", "paper_scale": cfg.paper_scale, "config_hash": config_hash(cfg),
               "dynamics": "linear ridge regression in the learned state space", "models": {}}
    for kind in s.kernels:
        spec = sysid.KernelSpec(kind, s.bandwidth, s.k_nn, s.normalized, s.graph_mode,
                                s.oos_bandwidth_scale, s.oos_k_nn)
        model = sysid.fit_dynamics(sysid.learn_state_space(pairs, s.k, spec), pairs, s.ridge, targets=train_t)
        rep = sysid.evaluate_prediction(model, test, test_t, t1_values, horizons)
        write_csv(out / f"rmse_{kind}.csv", rep.rmse, header=[f"t2_{h}" for h in horizons])
        summary["models"][kind] = {"state_dim": model.state_dim, "kernel": spec.to_dict(),
                                   "per_horizon_rmse": rep.per_horizon,
                                   "report_horizons": {str(h): rep.at(h) for h in s.report_horizons}}
    base = sysid.evaluate_prediction(lambda o, t1, h: sysid.persistence_predict(test_t, t1, h),
                                     test, test_t, t1_values, horizons)
    write_csv(out / "rmse_persistence.csv", base.rmse, header=[f"t2_{h}" for h in horizons])
    summary["models"]["persistence"] = {"per_horizon_rmse": base.per_horizon,
                                        "report_horizons": {str(h): base.at(h) for h in s.report_horizons}}
    write_json(out / "summary.json", summary)
    return summary


def run_oracle(cfg: ExperimentConfig, out: Path) -> dict:
    from . import oracles

    return oracles.write_golden(out, cfg.oracle.cases, cfg.oracle.n, cfg.seed)


RUNNERS = {
    "generate": run_generate,
    "embed": run_embed,
    "twomanifold": run_twomanifold,
    "sysid": run_sysid,
    "oracle": run_oracle,
}


def run(cfg: ExperimentConfig) -> dict:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "resolved_config.json", cfg.to_dict())
    return RUNNERS[cfg.command](cfg, out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twomanifold", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="JSON experiment config")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", help="output directory (overrides config output_dir)")
    p.add_argument("--paper-scale", action="store_true",
                   help="sysid with 150-step windows, 20-dim state and 50 neighbours")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        data = {}
        if args.config is not None:
            if not args.config.is_file():
                print(f"error: config file not found: {args.config}", file=sys.stderr)
                return 1
            data = json.loads(args.config.read_text())
        cfg = resolve(load_config(data), args.command, args.seed, args.out, args.paper_scale)
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", spectral.RankWarning)
            result = run(cfg)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    log.info("wrote outputs to %s", cfg.output_dir)
    if args.verbose:
        print(json.dumps(sorted(result)), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
