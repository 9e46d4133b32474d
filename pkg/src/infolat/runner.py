"""Task execution for the command-line interface."""
from __future__ import annotations

import os
import warnings
from importlib import metadata

import numpy as np
import scipy

from .chain import build_hamiltonian
from .config import ExperimentConfig, build_system
from .currents import (bond_currents, current_lattice, horizontal_currents, particle_current_env,
                       site_balance_residual, vertical_currents)
from .dynamics import default_dt, evolve, solve_ness
from .errors import ConfigError
from .io import write_csv, write_manifest
from .lattice import build_info_lattice, cells, coord_of
from .negativity import Bipartition, fermionic_negativity
from .noise import approx_currents, noise_lattice
from .trajectories import (build_fock_operators, ensemble_correlation, mcwf_run, trajectory_info_lattice,
                           vacuum)

NEG_CLIP = -1e-9


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _cell_rows(label, n, *arrays):
    for ell, jl in cells(n):
        c = coord_of(ell, jl)
        yield [label, ell, c.n2, *(a[ell, jl] for a in arrays)]


def _dt(cfg: ExperimentConfig, res) -> float:
    if "dt" in cfg.params:
        return float(cfg.params["dt"])
    return default_dt(float(cfg.chain.get("J", 1.0)), max(res.max_rate(), 1e-12))


def _initial_state(cfg, variant, H, res):
    kind = cfg.params.get("initial", "ness")
    n = H.shape[0]
    if kind == "empty":
        return np.zeros((n, n), dtype=complex)
    if kind == "pre_quench":
        pre = dict(cfg.params.get("pre_quench", {}))
        spec0, res0 = build_system(cfg, {**{k: v for k, v in variant.items() if k != "label"}, **pre})
        return solve_ness(build_hamiltonian(spec0), res0)
    return solve_ness(H, res)


def _bipartition(cfg, n) -> Bipartition:
    bp = cfg.params.get("bipartition")
    if bp is None:
        width = max(1, n // 5)
        return Bipartition.end_blocks(n, width)
    return Bipartition(tuple(bp["a1"]), tuple(bp["a2"]))


def _n_steps(cfg) -> int:
    if "n_steps" not in cfg.params:
        raise ConfigError(f"task {cfg.task} needs params.n_steps")
    return int(cfg.params["n_steps"])


def run(cfg: ExperimentConfig, out_dir: str, preset: str | None = None) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    tables: dict[str, tuple[list[str], list]] = {}
    summary: dict = {}
    caught: list[str] = []

    def table(name, header):
        if name not in tables:
            tables[name] = (header, [])
        return tables[name][1]

    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        for variant in cfg.variant_list():
            label = variant["label"]
            spec, res = build_system(cfg, variant)
            H = build_hamiltonian(spec)
            n = spec.n_sites
            summary[label] = _TASKS[cfg.task](cfg, variant, label, spec, res, H, n, table)
        caught = sorted({f"{w.category.__name__}: {w.message}" for w in wlist})

    files = []
    for name, (header, rows) in sorted(tables.items()):
        files.append(write_csv(os.path.join(out_dir, f"{name}.csv"), header, rows))
    manifest = {
        "task": cfg.task,
        "preset": preset,
        "config": cfg.as_dict(),
        "versions": {"artifact": _version(), "numpy": np.__version__, "scipy": scipy.__version__},
        "units": {"information": "bits", "negativity": "nats", "energy": "J", "time": "1/J"},
        "summary": summary,
        "warnings": caught,
    }
    write_manifest(out_dir, manifest, files)
    return manifest


def _task_ness(cfg, variant, label, spec, res, H, n, table):
    C = solve_ness(H, res)
    rows = table("occupations", ["variant", "site", "occupation"])
    for j in range(n):
        rows.append([label, j + 1, C[j, j].real])
    rows = table("correlation", ["variant", "i", "j", "re", "im"])
    for i in range(n):
        for j in range(n):
            rows.append([label, i + 1, j + 1, C[i, j].real, C[i, j].imag])
    cur = bond_currents(H, C)
    rows = table("particle_currents", ["variant", "bond", "current"])
    for j, v in enumerate(cur):
        rows.append([label, j + 1, v])
    return {"particle_current_in": -particle_current_env(C, res, 1),
            "particle_current_out": particle_current_env(C, res, n),
            "bond_current_spread": float(np.ptp(cur))}


def _lattice_rows(table, label, C):
    lat = build_info_lattice(C)
    shown = np.where((lat.site < 0) & (lat.site >= NEG_CLIP), 0.0, lat.site)
    rows = table("lattice", ["variant", "ell", "n2", "I_triangle", "i_site", "i_display"])
    rows.extend(_cell_rows(label, C.shape[0], lat.triangle, lat.site, shown))
    return lat


def _task_info_lattice(cfg, variant, label, spec, res, H, n, table):
    C = solve_ness(H, res)
    lat = _lattice_rows(table, label, C)
    return {"total_information": lat.total(), "min_site_value": float(np.nanmin(lat.site))}


def _task_info_currents(cfg, variant, label, spec, res, H, n, table):
    C = solve_ness(H, res)
    lat = _lattice_rows(table, label, C)
    tri, eff = current_lattice(H, res, C)
    rows = table("currents", ["variant", "ell", "n2", "tri_L", "tri_R", "tri_E", "eff_L", "eff_R", "eff_E",
                              "log_clipped"])
    rows.extend(_cell_rows(label, n, tri.left, tri.right, tri.env, eff.left, eff.right, eff.env,
                           tri.clipped))
    bal = site_balance_residual(H, res, C, eff)
    rows = table("global_currents", ["variant", "quantity", "index", "value"])
    rows.append([label, "J_in_left", 1, -tri.env[0, 0]])
    rows.append([label, "J_in_right", n, -tri.env[0, n - 1]])
    rows.append([label, "particle_current", 1, -particle_current_env(C, res, 1)])
    for ell in range(n):
        rows.append([label, "J_v", ell, vertical_currents(eff, ell)])
    mismatch = 0.0
    for site in range(1, n + 1):
        hc = horizontal_currents(tri, eff, site)
        rows.append([label, "J_h_plus", site, hc.plus])
        rows.append([label, "J_h_minus", site, hc.minus])
        rows.append([label, "J_h_plus_full", site, hc.plus_full])
        rows.append([label, "J_h_minus_full", site, hc.minus_full])
        mismatch = max(mismatch, hc.form_mismatch)
    return {"total_information": lat.total(), "max_balance_residual": float(np.nanmax(np.abs(bal))),
            "horizontal_form_mismatch": mismatch, "clipped_segments": int(tri.clipped.sum())}


def _task_noise_lattice(cfg, variant, label, spec, res, H, n, table):
    C = solve_ness(H, res)
    lat = build_info_lattice(C)
    nl = noise_lattice(C)
    rows = table("noise", ["variant", "ell", "n2", "variance", "kappa", "i_appr", "i_exact"])
    rows.extend(_cell_rows(label, n, nl.variance, nl.kappa, nl.i_appr, lat.site))
    _, eff = current_lattice(H, res, C)
    ap = approx_currents(C, res, H)
    rows = table("approx_currents", ["variant", "ell", "n2", "appr_L", "appr_R", "appr_E",
                                     "eff_L", "eff_R", "eff_E"])
    rows.extend(_cell_rows(label, n, ap.left, ap.right, ap.env, eff.left, eff.right, eff.env))
    return {"min_i_appr": float(np.nanmin(nl.i_appr))}


def _task_evolve(cfg, variant, label, spec, res, H, n, table):
    C0 = _initial_state(cfg, variant, H, res)
    traj = evolve(H, res, C0, _dt(cfg, res), _n_steps(cfg), int(cfg.params.get("sample_every", 1)),
                  method=cfg.params.get("integrator", "rk4"))
    part = _bipartition(cfg, n) if "bipartition" in cfg.params else None
    header = ["variant", "t", "particles", "current_in", "current_out"] + (["negativity"] if part else [])
    rows = table("series", header)
    for t, C in zip(traj.times, traj.states):
        row = [label, t, np.trace(C).real, -particle_current_env(C, res, 1), particle_current_env(C, res, n)]
        if part:
            row.append(fermionic_negativity(C, part))
        rows.append(row)
    C = traj.final
    rows = table("final_correlation", ["variant", "i", "j", "re", "im"])
    for i in range(n):
        for j in range(n):
            rows.append([label, i + 1, j + 1, C[i, j].real, C[i, j].imag])
    return {"t_final": float(traj.times[-1]),
            "distance_to_ness": float(np.max(np.abs(C - solve_ness(H, res))))}


def _task_negativity(cfg, variant, label, spec, res, H, n, table):
    part = _bipartition(cfg, n)
    if "n_steps" not in cfg.params:
        val = fermionic_negativity(solve_ness(H, res), part)
        table("negativity", ["variant", "negativity"]).append([label, val])
        return {"negativity": val}
    C0 = _initial_state(cfg, variant, H, res)
    traj = evolve(H, res, C0, _dt(cfg, res), _n_steps(cfg), int(cfg.params.get("sample_every", 1)),
                  method=cfg.params.get("integrator", "rk4"))
    rows = table("negativity_series", ["variant", "t", "negativity"])
    vals = [fermionic_negativity(C, part) for C in traj.states]
    for t, v in zip(traj.times, vals):
        rows.append([label, t, v])
    ness_val = fermionic_negativity(solve_ness(H, res), part)
    return {"final": float(vals[-1]), "steady_state": ness_val}


def _task_trajectories(cfg, variant, label, spec, res, H, n, table):
    fock = build_fock_operators(spec, res)
    p = cfg.params
    if p.get("initial", "empty") != "empty":
        raise ConfigError("trajectories support only initial: empty")
    ens = mcwf_run(fock.hamiltonian, fock.jumps, vacuum(n), float(p.get("dt", 0.1)), _n_steps(cfg),
                   int(p.get("n_traj", 100)), int(p.get("seed", 0)))
    C_ness = solve_ness(H, res)
    mean, err = ensemble_correlation(ens.final, fock.annihilators)
    rows = table("trajectory_correlation", ["variant", "i", "j", "re", "im", "se_re", "se_im", "ness_re",
                                            "ness_im"])
    for i in range(n):
        for j in range(n):
            rows.append([label, i + 1, j + 1, mean[i, j].real, mean[i, j].imag, err[i, j].real,
                         err[i, j].imag, C_ness[i, j].real, C_ness[i, j].imag])
    tl = trajectory_info_lattice(ens)
    lme = build_info_lattice(C_ness)
    rows = table("trajectory_lattice", ["variant", "ell", "n2", "i_trajectory", "i_lme"])
    rows.extend(_cell_rows(label, n, tl.site, lme.site))
    z = np.maximum(np.abs(mean.real - C_ness.real) / np.maximum(err.real, 1e-15),
                   np.abs(mean.imag - C_ness.imag) / np.maximum(err.imag, 1e-15))
    return {"n_traj": ens.n_traj, "seed": ens.seed, "max_z_score": float(z.max()),
            "max_jump_probability": ens.max_jump_probability}


_TASKS = {
    "ness": _task_ness,
    "evolve": _task_evolve,
    "info_lattice": _task_info_lattice,
    "info_currents": _task_info_currents,
    "noise_lattice": _task_noise_lattice,
    "negativity": _task_negativity,
    "trajectories": _task_trajectories,
}
