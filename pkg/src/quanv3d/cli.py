"""Command-line front end.

Every subcommand writes its outputs plus a run manifest into ``--out``;
``quanv3d replay <manifest>`` re-runs the recorded command and reproduces
the outputs byte for byte (outputs contain no timestamps or absolute
paths).  Seeds are explicit flags — there are no wall-clock defaults — and
the exit code is 0 only when every output was written; failures print a
machine-readable JSON error to stderr.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import InvalidParameterError, QuanvError
from .frqi import (AngleBlock, frqi_amplitudes, frqi_resources,
                   normalize_block, position_qubits)
from .layer import (QConvConfig, mean_feature_support, qconv_forward,
                    readout_fit, reservoir_sweep)
from .mitigation import (DEFAULT_ALPHA_GRID, RidgeModel, alpha_sweep,
                         fit_ridge, gen_dataset, read_dataset, score,
                         write_dataset)
from .noise import CHANNELS, NoiseSpec, run_noisy
from .reservoirs import G3Spec, IsingSpec, build_ising_hamiltonian, ising_unitary, sample_g3
from .seeding import TAG_GRID, derive_seed
from .simulator import apply_circuit, measure_probs, zero_state
from .voxels import SYNTH_KINDS, gaussian_blur, read_grid, synth_grid, write_grid
from .circuits import circuit_to_json

PAPER_P_VALUES = "0.03,0.01,0.008,0.005,0.003,0.001"
SWEEP_GATE_COUNTS = "20,50,100,200,300,400,500,600"
_ALPHA_GRID_STR = ",".join(repr(a) for a in DEFAULT_ALPHA_GRID)


@dataclass
class RunContext:
    out: Path
    seed: int | None
    jobs: int
    outputs: list[str] = field(default_factory=list)

    def path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out / name

    def require_seed(self) -> int:
        if self.seed is None:
            raise InvalidParameterError(
                "this command is stochastic; pass an explicit --seed")
        return self.seed


def _write_manifest(rc: RunContext, command: list[str], params: dict) -> None:
    manifest = {
        "tool": "quanv3d",
        "version": __version__,
        "command": command,
        "seed": rc.seed,
        "jobs": rc.jobs,
        "params": params,
        "outputs": rc.outputs,
    }
    name = "-".join(command) + ".manifest.json"
    with open(rc.out / name, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _write_json(rc: RunContext, name: str, payload: dict) -> None:
    with open(rc.path(name), "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_csv(rc: RunContext, name: str, header: list[str], rows: list) -> None:
    with open(rc.path(name), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _parse_floats(text: str, name: str) -> list[float]:
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidParameterError(f"cannot parse {name}={text!r}: {exc}") from exc


def _parse_ints(text: str, name: str) -> list[int]:
    try:
        return [int(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidParameterError(f"cannot parse {name}={text!r}: {exc}") from exc


def _parse_shots(text):
    if text == "exact":
        return "exact"
    try:
        return int(text)
    except ValueError as exc:
        raise InvalidParameterError(
            f"shots must be 'exact' or an integer, got {text!r}") from exc


def _channel_name(option_value: str) -> str:
    name = option_value.replace("-", "_")
    if name not in CHANNELS:
        raise InvalidParameterError(
            f"channel must be one of {[c.replace('_', '-') for c in CHANNELS]}")
    return name


# -- command cores (also used by replay) ---------------------------------

def _voxel_gen(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    grid = synth_grid(params["channels"], params["side"], seed, params["kind"])
    write_grid(grid, rc.path(params["name"]))
    _write_manifest(rc, ["voxel", "gen"], params)


def _voxel_blur(rc: RunContext, params: dict) -> None:
    grid = read_grid(params["input"])
    write_grid(gaussian_blur(grid, params["sigma"]), rc.path(params["name"]))
    _write_manifest(rc, ["voxel", "blur"], params)


def _voxel_info(rc: RunContext, params: dict) -> None:
    grid = read_grid(params["input"])
    info = {
        "channels": grid.channels,
        "side": grid.side,
        "values": grid.channels * grid.side**3,
        "min": float(grid.data.min()),
        "max": float(grid.data.max()),
        "sum": float(grid.data.sum()),
    }
    _write_json(rc, params["name"], info)
    click.echo(json.dumps(info))
    _write_manifest(rc, ["voxel", "info"], params)


def _frqi_encode(rc: RunContext, params: dict) -> None:
    grid = read_grid(params["input"])
    if grid.channels != 1:
        raise InvalidParameterError(
            f"block file must have exactly 1 channel, got {grid.channels}")
    vmin = params["vmin"] if params["vmin"] is not None else float(grid.data.min())
    vmax = params["vmax"] if params["vmax"] is not None else float(grid.data.max())
    block = normalize_block(grid.data[0], vmin, vmax)
    state = frqi_amplitudes(block.angles)
    payload = {
        "n": block.n,
        "qubits": block.qubits,
        "vmin": vmin,
        "vmax": vmax,
        "angles": block.angles.tolist(),
        # Ry rotations keep everything real.
        "amplitudes": state.real.tolist(),
    }
    _write_json(rc, params["name"], payload)
    _write_manifest(rc, ["frqi", "encode"], params)


def _frqi_resources(rc: RunContext, params: dict) -> None:
    sides = _parse_ints(params["n"], "--n")
    rows = []
    for n in sides:
        n_angles = n**3
        # Worst case: every angle distinct and nonzero.
        angles = (np.arange(1, n_angles + 1) / (n_angles + 1)) * 2.0 * np.pi
        res = frqi_resources(AngleBlock(n, angles))
        rows.append([n, res.qubits, res.gates])
    _write_csv(rc, params["name"], ["n", "qubits", "gates"], rows)
    # Linear envelope gates ~ a*n^3 + b over the sampled sides.
    sizes = np.array([r[0] ** 3 for r in rows], dtype=float)
    gates = np.array([r[2] for r in rows], dtype=float)
    a, b = np.polyfit(sizes, gates, 1)
    pred = a * sizes + b
    ss_res = float(((gates - pred) ** 2).sum())
    ss_tot = float(((gates - gates.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    _write_json(rc, params["fit_name"],
                {"slope": float(a), "intercept": float(b), "r_squared": r2})
    _write_manifest(rc, ["frqi", "resources"], params)


def _reservoir_sample_g3(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    circuit = sample_g3(G3Spec(params["qubits"], params["gates"], seed))
    with open(rc.path(params["name"]), "w") as fh:
        fh.write(circuit_to_json(circuit))
        fh.write("\n")
    _write_manifest(rc, ["reservoir", "sample-g3"], params)


def _reservoir_ising(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    spec = IsingSpec(params["qubits"], Js=params["js"], h=params["h"],
                     T=params["t"], seed=seed)
    ham = build_ising_hamiltonian(spec)
    unitary = ising_unitary(spec)
    dim = ham.shape[0]
    evals = np.linalg.eigvalsh(ham)
    payload = {
        "qubits": spec.qubits,
        "Js": spec.Js,
        "h": spec.h,
        "T": spec.T,
        "seed": spec.seed,
        "hermiticity_dev": float(np.abs(ham - ham.T.conj()).max()),
        "unitarity_dev": float(np.abs(unitary.conj().T @ unitary - np.eye(dim)).max()),
        "energy_min": float(evals[0]),
        "energy_max": float(evals[-1]),
    }
    _write_json(rc, params["name"], payload)
    _write_manifest(rc, ["reservoir", "ising"], params)


def _make_config(n: int, reservoir: str, gates: int, js: float, h: float,
                 t: float, channel: str | None, p: float, shots,
                 master_seed: int) -> QConvConfig:
    qubits = position_qubits(n) + 1
    if reservoir == "g3":
        spec = G3Spec(qubits, gates, 0)
    elif reservoir == "ising":
        spec = IsingSpec(qubits, Js=js, h=h, T=t, seed=0)
    else:
        raise InvalidParameterError(f"reservoir must be g3 or ising, got {reservoir!r}")
    noise = NoiseSpec(_channel_name(channel), p) if channel else None
    return QConvConfig(n=n, reservoir=spec, noise=noise, shots=shots,
                       master_seed=master_seed)


def _config_provenance(config: QConvConfig) -> dict:
    reservoir = {"family": "g3", "qubits": config.reservoir.qubits}
    if isinstance(config.reservoir, G3Spec):
        reservoir["gate_count"] = config.reservoir.gate_count
    else:
        reservoir.update({"family": "ising", "Js": config.reservoir.Js,
                          "h": config.reservoir.h, "T": config.reservoir.T})
    return {
        "n": config.n,
        "qubits": config.qubits,
        "reservoir": reservoir,
        "noise": None if config.noise is None else
            {"channel": config.noise.channel, "p": config.noise.p},
        "shots": config.shots,
        "master_seed": config.master_seed,
        "filter_index": config.filter_index,
    }


def _qconv_run(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    grid = read_grid(params["input"])
    config = _make_config(params["n"], params["reservoir"], params["gates"],
                          params["js"], params["h"], params["t"],
                          params["channel"], params["p"],
                          _parse_shots(params["shots"]), seed)
    features = qconv_forward(grid, config, jobs=rc.jobs)
    write_grid(features, rc.path(params["name"]))
    _write_json(rc, params["name"] + ".json", _config_provenance(config))
    _write_manifest(rc, ["qconv", "run"], params)


def _qconv_sweep(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    grid = read_grid(params["input"])
    counts = _parse_ints(params["gate_counts"], "--gate-counts")
    maps = reservoir_sweep(grid, counts, seed, n=params["n"], jobs=rc.jobs)
    qubits = position_qubits(params["n"]) + 1
    rows = []
    for count, fm in zip(counts, maps):
        write_grid(fm, rc.path(f"features-{count}.voxg"))
        rows.append([count, mean_feature_support(fm, qubits)])
    _write_csv(rc, params["name"], ["gate_count", "mean_feature_support"], rows)
    _write_manifest(rc, ["qconv", "sweep"], params)


def _qconv_readout(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    grids = [synth_grid(params["channels"], params["side"],
                        derive_seed(seed, TAG_GRID, i), params["kind"])
             for i in range(params["samples"])]
    if params["blur"] > 0:
        grids = [gaussian_blur(g, params["blur"]) for g in grids]
    targets = [float(g.data.mean()) for g in grids]
    config = _make_config(params["n"], "g3", params["gates"], 1.0, 0.1, 10.0,
                          None, 0.0, "exact", seed)
    features = [qconv_forward(g, config, jobs=rc.jobs) for g in grids]
    result = readout_fit(features, targets, params["alpha"])
    payload = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
               for k, v in result.items()}
    _write_json(rc, params["name"], payload)
    _write_manifest(rc, ["qconv", "readout"], params)


def _noise_run(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    channel = _channel_name(params["channel"])
    p_values = _parse_floats(params["p"], "--p")
    circuit = sample_g3(G3Spec(params["qubits"], params["gates"], seed))
    noiseless = measure_probs(apply_circuit(zero_state(params["qubits"]), circuit))
    noisy = [run_noisy(circuit, NoiseSpec(channel, p)) for p in p_values]
    header = ["basis_index", "noiseless"] + [f"noisy_p={p!r}" for p in p_values]
    rows = [[i, repr(float(noiseless[i]))] + [repr(float(col[i])) for col in noisy]
            for i in range(noiseless.size)]
    _write_csv(rc, params["name"], header, rows)
    _write_manifest(rc, ["noise", "run"], params)


def _drer_gen(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    noise = NoiseSpec(_channel_name(params["channel"]), params["p"])
    dataset = gen_dataset(params["samples"], params["qubits"], params["gates"],
                          noise, shots=_parse_shots(params["shots"]),
                          seed=seed, jobs=rc.jobs)
    write_dataset(dataset, rc.path(params["name"]))
    _write_manifest(rc, ["drer", "gen"], params)


def _model_to_json(model: RidgeModel, meta: dict, sweep: dict | None) -> dict:
    payload = {
        "format": "drer-model",
        "alpha": model.alpha,
        "dim": model.W.shape[0],
        "meta": meta,
        "W": model.W.tolist(),
    }
    if sweep is not None:
        payload["sweep"] = {repr(a): s for a, s in sweep.items()}
    return payload


def _drer_fit(rc: RunContext, params: dict) -> None:
    train = read_dataset(params["train"])
    sweep_scores = None
    if params["alpha"] is not None:
        alpha = params["alpha"]
    else:
        if params["validation"] is None:
            raise InvalidParameterError(
                "either --alpha or --validation (for an alpha sweep) is required")
        validation = read_dataset(params["validation"])
        grid = _parse_floats(params["grid"], "--grid")
        alpha, sweep_scores = alpha_sweep(train, validation, grid)
    model = fit_ridge(train, alpha)
    _write_json(rc, params["name"], _model_to_json(model, train.meta, sweep_scores))
    _write_manifest(rc, ["drer", "fit"], params)


def _read_model(path) -> RidgeModel:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != "drer-model":
        raise InvalidParameterError(f"{path} is not a drer model file")
    return RidgeModel(np.asarray(payload["W"]), payload["alpha"])


def _drer_eval(rc: RunContext, params: dict) -> None:
    model = _read_model(params["model"])
    test = read_dataset(params["test"])
    result = score(model, test)
    row = [[test.meta.get("channel", ""), test.meta.get("p", ""),
            repr(model.alpha), repr(result["mse_noisy"]),
            repr(result["mse_mitigated"]), repr(result["tendency_accuracy"])]]
    _write_csv(rc, params["name"],
               ["channel", "p", "alpha", "mse_noisy", "mse_mitigated",
                "tendency_accuracy"], row)
    _write_manifest(rc, ["drer", "eval"], params)


def drer_table_rows(channels, p_values, train_samples, test_samples, qubits,
                    gates, grid, shots, seed, jobs=1):
    """One CSV row per (channel, p): best grid alpha by validation MSE plus
    its scores.  Separate train/test datasets per cell, seeds derived from
    the master seed."""
    rows = []
    for ci, channel in enumerate(channels):
        for pi, p in enumerate(p_values):
            noise = NoiseSpec(channel, p)
            train = gen_dataset(train_samples, qubits, gates, noise, shots=shots,
                                seed=derive_seed(seed, ci, pi, 0), jobs=jobs)
            test = gen_dataset(test_samples, qubits, gates, noise, shots=shots,
                               seed=derive_seed(seed, ci, pi, 1), jobs=jobs)
            best_alpha, sweep_scores = alpha_sweep(train, test, grid)
            best = sweep_scores[best_alpha]
            rows.append([channel, repr(p), repr(best_alpha),
                         repr(best["mse_noisy"]), repr(best["mse_mitigated"]),
                         repr(best["tendency_accuracy"])])
    return rows


def _drer_table(rc: RunContext, params: dict) -> None:
    seed = rc.require_seed()
    if params["channels"] == "all":
        channels = list(CHANNELS)
    else:
        channels = [_channel_name(c) for c in params["channels"].split(",")]
    p_values = _parse_floats(params["p"], "--p")
    grid = _parse_floats(params["grid"], "--grid")
    rows = drer_table_rows(channels, p_values, params["train_samples"],
                           params["test_samples"], params["qubits"],
                           params["gates"], grid, _parse_shots(params["shots"]),
                           seed, jobs=rc.jobs)
    _write_csv(rc, params["name"],
               ["channel", "p", "alpha", "mse_noisy", "mse_mitigated",
                "tendency_accuracy"], rows)
    _write_manifest(rc, ["drer", "table"], params)


_COMMAND_CORES = {
    ("voxel", "gen"): _voxel_gen,
    ("voxel", "blur"): _voxel_blur,
    ("voxel", "info"): _voxel_info,
    ("frqi", "encode"): _frqi_encode,
    ("frqi", "resources"): _frqi_resources,
    ("reservoir", "sample-g3"): _reservoir_sample_g3,
    ("reservoir", "ising"): _reservoir_ising,
    ("qconv", "run"): _qconv_run,
    ("qconv", "sweep"): _qconv_sweep,
    ("qconv", "readout"): _qconv_readout,
    ("noise", "run"): _noise_run,
    ("drer", "gen"): _drer_gen,
    ("drer", "fit"): _drer_fit,
    ("drer", "eval"): _drer_eval,
    ("drer", "table"): _drer_table,
}


# -- click wiring --------------------------------------------------------

@click.group()
@click.version_option(__version__)
@click.option("--seed", type=int, default=None,
              help="Master seed; required by stochastic commands (no wall-clock default).")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Parallel workers for block/sample maps; outputs are identical for any value.")
@click.option("--out", type=click.Path(file_okay=False), default=".",
              show_default=True, help="Output directory.")
@click.pass_context
def cli(ctx, seed, jobs, out):
    """Quantum convolutional layer toolkit for 3D voxel data."""
    out_path = Path(out)
    out_path.mkdir(parents=True, exist_ok=True)
    ctx.obj = RunContext(out=out_path, seed=seed, jobs=jobs)


@cli.group()
def voxel():
    """Synthesize, blur, and inspect voxel grids."""


@voxel.command("gen")
@click.option("--channels", type=int, required=True)
@click.option("--side", type=int, required=True)
@click.option("--kind", type=click.Choice(SYNTH_KINDS), default="sparse-atoms",
              show_default=True)
@click.option("--name", default="grid.voxg", show_default=True)
@click.pass_obj
def voxel_gen(rc, **params):
    """Generate a synthetic grid (VOXG)."""
    _voxel_gen(rc, params)


@voxel.command("blur")
@click.option("--input", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--name", default="blurred.voxg", show_default=True)
@click.pass_obj
def voxel_blur(rc, **params):
    """Gaussian-blur a grid."""
    _voxel_blur(rc, params)


@voxel.command("info")
@click.option("--input", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--name", default="info.json", show_default=True)
@click.pass_obj
def voxel_info(rc, **params):
    """Dump a grid's header and value summary."""
    _voxel_info(rc, params)


@cli.group()
def frqi():
    """FRQI encoding and resource reports."""


@frqi.command("encode")
@click.option("--input", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Single-channel VOXG holding one n^3 block.")
@click.option("--vmin", type=float, default=None,
              help="Normalization minimum (defaults to the block's own).")
@click.option("--vmax", type=float, default=None)
@click.option("--name", default="amplitudes.json", show_default=True)
@click.pass_obj
def frqi_encode(rc, **params):
    """Emit the encoded amplitudes of one block."""
    _frqi_encode(rc, params)


@frqi.command("resources")
@click.option("--n", default="2,4,8", show_default=True,
              help="Comma-separated block sides.")
@click.option("--name", default="resources.csv", show_default=True)
@click.option("--fit-name", default="resources-fit.json", show_default=True)
@click.pass_obj
def frqi_resources_cmd(rc, **params):
    """Qubit/gate scaling CSV for worst-case (all-distinct-angle) blocks."""
    _frqi_resources(rc, params)


@cli.group()
def reservoir():
    """Reservoir circuit families."""


@reservoir.command("sample-g3")
@click.option("--qubits", type=int, required=True)
@click.option("--gates", type=int, required=True)
@click.option("--name", default="circuit.json", show_default=True)
@click.pass_obj
def reservoir_sample_g3(rc, **params):
    """Sample a random G3 circuit to Circuit JSON."""
    _reservoir_sample_g3(rc, params)


@reservoir.command("ising")
@click.option("--qubits", type=int, required=True)
@click.option("--js", type=float, default=1.0, show_default=True)
@click.option("--h", type=float, default=0.1, show_default=True)
@click.option("--t", type=float, default=10.0, show_default=True)
@click.option("--name", default="ising.json", show_default=True)
@click.pass_obj
def reservoir_ising(rc, **params):
    """Build the Ising evolution unitary and report diagnostics."""
    _reservoir_ising(rc, params)


@cli.group()
def qconv():
    """The quantum convolutional layer."""


@qconv.command("run")
@click.option("--input", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--n", type=int, default=4, show_default=True)
@click.option("--reservoir", type=click.Choice(["g3", "ising"]), default="g3",
              show_default=True)
@click.option("--gates", type=int, default=300, show_default=True)
@click.option("--js", type=float, default=1.0, show_default=True)
@click.option("--h", type=float, default=0.1, show_default=True)
@click.option("--t", type=float, default=10.0, show_default=True)
@click.option("--channel", default=None,
              help="Optional noise channel (depolarizing | amplitude-damping | phase-damping).")
@click.option("--p", type=float, default=0.0, show_default=True)
@click.option("--shots", default="exact", show_default=True)
@click.option("--name", default="features.voxg", show_default=True)
@click.pass_obj
def qconv_run(rc, **params):
    """Forward pass: grid in, feature map out (with a config sidecar)."""
    _qconv_run(rc, params)


@qconv.command("sweep")
@click.option("--input", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--n", type=int, default=4, show_default=True)
@click.option("--gate-counts", default=SWEEP_GATE_COUNTS, show_default=True)
@click.option("--name", default="sweep.csv", show_default=True)
@click.pass_obj
def qconv_sweep(rc, **params):
    """Feature maps across reservoir depths, plus a support-size summary."""
    _qconv_sweep(rc, params)


@qconv.command("readout")
@click.option("--samples", type=int, default=50, show_default=True)
@click.option("--channels", type=int, default=1, show_default=True)
@click.option("--side", type=int, default=8, show_default=True)
@click.option("--kind", type=click.Choice(SYNTH_KINDS), default="sparse-atoms",
              show_default=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--gates", type=int, default=100, show_default=True)
@click.option("--blur", type=float, default=1.2, show_default=True,
              help="Gaussian sigma applied to each grid before encoding; "
                   "0 disables. Raw sparse grids carry little linearly "
                   "readable signal (block normalization wraps lone peaks "
                   "back to the empty-block signature).")
@click.option("--alpha", type=float, default=1e-2, show_default=True)
@click.option("--name", default="readout.json", show_default=True)
@click.pass_obj
def qconv_readout(rc, **params):
    """Demo: ridge readout predicting each synthetic grid's mean value."""
    _qconv_readout(rc, params)


@cli.group("noise")
def noise_group():
    """Noisy execution reports."""


@noise_group.command("run")
@click.option("--qubits", type=int, default=7, show_default=True)
@click.option("--gates", type=int, default=300, show_default=True)
@click.option("--channel", required=True)
@click.option("--p", default="0.001,0.005,0.01,0.03", show_default=True,
              help="Comma-separated error rates.")
@click.option("--name", default="noise.csv", show_default=True)
@click.pass_obj
def noise_run(rc, **params):
    """Noisy vs noiseless outcome probabilities for one seeded circuit."""
    _noise_run(rc, params)


@cli.group()
def drer():
    """Data-regression error mitigation."""


@drer.command("gen")
@click.option("--samples", type=int, required=True)
@click.option("--qubits", type=int, default=7, show_default=True)
@click.option("--gates", type=int, default=300, show_default=True)
@click.option("--channel", required=True)
@click.option("--p", type=float, required=True)
@click.option("--shots", default="exact", show_default=True)
@click.option("--name", default="dataset.jsonl", show_default=True)
@click.pass_obj
def drer_gen(rc, **params):
    """Generate a noisy/noiseless pair dataset (JSON lines)."""
    _drer_gen(rc, params)


@drer.command("fit")
@click.option("--train", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--validation", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Needed when sweeping --grid instead of fixing --alpha.")
@click.option("--alpha", type=float, default=None)
@click.option("--grid", default=_ALPHA_GRID_STR, show_default=True)
@click.option("--name", default="model.json", show_default=True)
@click.pass_obj
def drer_fit(rc, **params):
    """Fit the corrector (fixed alpha, or best grid alpha on validation)."""
    _drer_fit(rc, params)


@drer.command("eval")
@click.option("--model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--test", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--name", default="eval.csv", show_default=True)
@click.pass_obj
def drer_eval(rc, **params):
    """Score a fitted corrector on a test dataset."""
    _drer_eval(rc, params)


@drer.command("table")
@click.option("--channels", default="all", show_default=True)
@click.option("--p", default=PAPER_P_VALUES, show_default=True)
@click.option("--train-samples", type=int, default=200, show_default=True)
@click.option("--test-samples", type=int, default=100, show_default=True)
@click.option("--qubits", type=int, default=7, show_default=True)
@click.option("--gates", type=int, default=300, show_default=True)
@click.option("--grid", default=_ALPHA_GRID_STR, show_default=True)
@click.option("--shots", default="exact", show_default=True)
@click.option("--name", default="table.csv", show_default=True)
@click.pass_obj
def drer_table(rc, **params):
    """Full channel x p mitigation grid as CSV."""
    _drer_table(rc, params)


@cli.command("replay")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def replay(rc, manifest):
    """Re-run a recorded manifest; outputs reproduce byte-identically."""
    with open(manifest) as fh:
        payload = json.load(fh)
    if payload.get("tool") != "quanv3d":
        raise InvalidParameterError(f"{manifest} is not a quanv3d manifest")
    key = tuple(payload["command"])
    core = _COMMAND_CORES.get(key)
    if core is None:
        raise InvalidParameterError(f"manifest names unknown command {key}")
    replay_rc = RunContext(out=rc.out, seed=payload.get("seed"),
                           jobs=payload.get("jobs", 1))
    core(replay_rc, payload["params"])


def main():
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        click.echo(json.dumps({"error": "Aborted", "message": "aborted"}), err=True)
        sys.exit(130)
    except click.ClickException as exc:
        click.echo(json.dumps({"error": type(exc).__name__,
                               "message": exc.format_message()}), err=True)
        sys.exit(exc.exit_code)
    except QuanvError as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
                   err=True)
        sys.exit(1)
    except Exception as exc:  # pragma: no cover - last-resort guard
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
                   err=True)
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
