"""Synthesize -> invert -> diagnose pipeline and its files on disk.

Synthesis and inversion build separate operator sets; the only thing passed
between them is a :class:`FarFieldData`.
"""

import csv
from dataclasses import dataclass
import json
import logging
import math
from pathlib import Path
import warnings

import numpy as np

from .csi import CsiWeights, backprop_init, ircsi_run
from .diagnostics import discretization_residual, relative_error, selection_quantities, write_csv
from .forward import FarFieldData, Grid, SolverFailure, add_noise, build_operators, synthesize, uniform_directions
from .phantoms import bump_contrast, contrast_to_pixels, digit_image, image_contrast, read_pgm, write_pgm
from .som import irsom_run

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ("beta", "rel_error", "grad_inf", "iterations", "terminated_by")


def phantom_contrast(cfg, grid):
    if cfg.phantom == "bump":
        return cfg.phantom_scale * bump_contrast(grid)
    if cfg.phantom.startswith("digit:"):
        img = digit_image(cfg.phantom.split(":", 1)[1])
    else:
        img = read_pgm(cfg.phantom)
    return image_contrast(grid, img, cfg.phantom_scale)


def write_complex(path, v):
    """Interleaved little-endian float64 (re, im) pairs in pixel order."""
    np.ascontiguousarray(np.asarray(v, dtype=np.complex128)).astype("<c16").tofile(path)


def read_complex(path):
    return np.fromfile(path, dtype="<c16")


@dataclass
class Synthesis:
    data: FarFieldData
    m_truth: np.ndarray  # on the inversion grid
    ops: object  # inversion-grid operators


def synthesize_data(cfg):
    if cfg.N_synth == cfg.N_inv:
        if not cfg.allow_same_grid:
            warnings.warn("N_synth == N_inv: data and inversion share one discrete model (inverse crime)",
                          stacklevel=2)
    d = uniform_directions(cfg.J)
    x = uniform_directions(cfg.Q)
    fine = build_operators(Grid(cfg.N_synth), cfg.kappa, d, x)
    exact = synthesize(fine, phantom_contrast(cfg, fine.grid))
    data = add_noise(exact, cfg.noise_rel, cfg.seed)
    ops = build_operators(Grid(cfg.N_inv), cfg.kappa, d, x)
    return Synthesis(data=data, m_truth=phantom_contrast(cfg, ops.grid), ops=ops)


def initial_weights(cfg, ops, uinf):
    _, m0 = backprop_init(ops, uinf)
    w = CsiWeights.from_initial(ops.ui, m0, uinf)
    if cfg.eta_overrides:
        J = uinf.shape[0]
        w = CsiWeights(np.broadcast_to(cfg.eta_overrides.get("eta_s", w.eta_s), (J,)),
                       np.broadcast_to(cfg.eta_overrides.get("eta_d", w.eta_d), (J,)))
    return w


def _finite(x):
    return None if isinstance(x, float) and not math.isfinite(x) else x


def run_inversion(cfg, syn):
    ops, uinf = syn.ops, syn.data.uinf
    weights = initial_weights(cfg, ops, uinf)
    gamma, beta, L = cfg.solver_params()
    kw = dict(weights=weights, m_truth=syn.m_truth, use_termination=cfg.use_termination)
    if cfg.algorithm in ("csi", "ircsi"):
        return ircsi_run(ops, uinf, gamma, beta, L, cfg.max_iters, **kw)
    return irsom_run(ops, uinf, gamma, beta, L, cfg.max_iters, L_alpha=cfg.L_alpha, **kw)


def run_experiment(cfg, syn=None, out_dir=None):
    """Run one inversion and write its artifacts; returns the manifest dict.

    A solver failure is recorded in the manifest (``status = "failed"``)
    rather than raised.
    """
    cfg.validate()
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if syn is None:
        syn = synthesize_data(cfg)
    manifest = {"config": cfg.to_dict(), "gamma": cfg.solver_params()[0], "beta": cfg.solver_params()[1],
                "L": cfg.solver_params()[2], "eps": cfg.eps if not cfg.is_original else 0.0,
                "image_mapping": "|m| mapped linearly from [0, max|m_truth|] to [0, 255]; "
                                 "rows top to bottom = x2 descending, columns = x1 ascending",
                "raw_format": "interleaved little-endian float64 (re, im), lexicographic (p1, p2) pixel order"}
    try:
        res = run_inversion(cfg, syn)
    except SolverFailure as exc:
        manifest.update(status="failed", error=str(exc), residual=exc.residual)
        _write_manifest(out, manifest)
        return manifest
    write_csv(out / "iterations.csv", res.records)
    vmax = float(np.abs(syn.m_truth).max()) or 1.0
    grid = syn.ops.grid
    write_pgm(out / "reconstruction.pgm", contrast_to_pixels(grid, res.m, vmax))
    write_pgm(out / "truth.pgm", contrast_to_pixels(grid, syn.m_truth, vmax))
    write_complex(out / "reconstruction.bin", res.m)
    report = selection_report(cfg, syn, res.weights)
    final = res.final
    manifest.update(
        status=res.status, iterations=res.iterations, eps_solver=res.eps,
        final={"objective": final.objective, "grad_inf": final.grad_inf,
               "rel_error": _finite(final.rel_error)},
        weights={"eta_s": res.weights.eta_s.tolist(), "eta_d": res.weights.eta_d.tolist()},
        selection={k: _finite(v) for k, v in vars(report).items()},
        selection_note="delta_csi/delta_som depend on the synthesis grid and the noise draw",
    )
    _write_manifest(out, manifest)
    return manifest


def selection_report(cfg, syn, weights):
    ops = syn.ops
    eps_h = discretization_residual(ops, syn.m_truth, syn.data.exact if syn.data.exact is not None
                                    else syn.data.uinf)
    L_alpha = cfg.L_alpha if cfg.L_alpha <= ops.svd.rank else None
    return selection_quantities(ops, weights, syn.data, L_alpha=L_alpha, eps_h=eps_h)


def _write_manifest(out, manifest):
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_synthesis(cfg, syn, out_dir=None):
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_complex(out / "farfield.bin", syn.data.uinf)
    vmax = float(np.abs(syn.m_truth).max()) or 1.0
    write_pgm(out / "truth.pgm", contrast_to_pixels(syn.ops.grid, syn.m_truth, vmax))
    manifest = {"config": cfg.to_dict(), "farfield_shape": list(syn.data.uinf.shape),
                "noise_level": syn.data.noise_level, "delta": syn.data.delta,
                "raw_format": "interleaved little-endian float64 (re, im), row-major (incidence, observation)"}
    _write_manifest(out, manifest)
    return manifest


def sweep(cfg, betas, out_dir=None):
    """One run per ``beta``; failures are recorded and the sweep continues."""
    if not betas:
        raise ValueError("sweep needs at least one beta")
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    syn = synthesize_data(cfg)
    rows = []
    for beta in betas:
        sub = cfg.override(beta=float(beta))
        try:
            man = run_experiment(sub, syn=syn, out_dir=out / f"beta_{beta:g}")
        except Exception as exc:  # keep sweeping; the row records the failure
            log.error("beta=%g failed: %s", beta, exc)
            man = {"status": f"failed: {exc}"}
        fin = man.get("final", {})
        rows.append([repr(float(beta)), repr(fin.get("rel_error")), repr(fin.get("grad_inf")),
                     man.get("iterations", ""), man["status"]])
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        w.writerows(rows)
    return rows
