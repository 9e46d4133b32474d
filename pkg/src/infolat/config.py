"""Experiment configuration: YAML input with strict key checking."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any

import yaml

from .chain import (ChainSpec, ReservoirSpec, rates_from_fermi, rates_large_bias, rates_linear_response,
                    uniform_chain, with_bond_defect, with_site_defect)
from .errors import ConfigError, InfolatError

TASKS = ("ness", "evolve", "info_lattice", "info_currents", "noise_lattice", "negativity", "trajectories")

TOP_KEYS = {"task", "chain", "reservoir", "params", "variants", "description"}
CHAIN_KEYS = {"n_sites", "J", "eps", "hoppings", "onsite", "site_defect", "bond_defect"}
RES_KEYS = {
    "large_bias": {"regime", "g", "delta"},
    "linear_response": {"regime", "g", "delta", "phi"},
    "fermi": {"regime", "g_left", "g_right", "mu_left", "mu_right", "T_left", "T_right"},
}
PARAM_KEYS = {"dt", "n_steps", "sample_every", "initial", "pre_quench", "bipartition", "n_traj", "seed",
              "integrator"}
OVERRIDE_KEYS = {"label", "delta", "g", "phi", "defect_eps", "bond_J"}
INITIAL_STATES = ("ness", "empty", "pre_quench")


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping")
    extra = sorted(set(section) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    chain: dict
    reservoir: dict
    params: dict = field(default_factory=dict)
    variants: tuple = ()
    description: str = ""

    def as_dict(self) -> dict:
        out = {"task": self.task, "chain": copy.deepcopy(self.chain), "reservoir": copy.deepcopy(self.reservoir),
               "params": copy.deepcopy(self.params)}
        if self.variants:
            out["variants"] = [dict(v) for v in self.variants]
        if self.description:
            out["description"] = self.description
        return out

    def variant_list(self) -> list[dict]:
        return [dict(v) for v in self.variants] if self.variants else [{"label": "base"}]


def validate(raw: dict, task: str | None = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping")
    _reject_unknown(raw, TOP_KEYS, "top level")
    task = task or raw.get("task")
    if task not in TASKS:
        raise ConfigError(f"task must be one of {', '.join(TASKS)}, got {task!r}")
    if raw.get("task") not in (None, task):
        raise ConfigError(f"task {task!r} conflicts with config task {raw['task']!r}")
    chain = raw.get("chain")
    if chain is None:
        raise ConfigError("missing section: chain")
    _reject_unknown(chain, CHAIN_KEYS, "chain")
    if "n_sites" not in chain:
        raise ConfigError("chain.n_sites is required")
    for key, allowed in (("site_defect", {"site", "eps"}), ("bond_defect", {"bond", "J"})):
        if key in chain:
            _reject_unknown(chain[key], allowed, f"chain.{key}")
            if set(chain[key]) != allowed:
                raise ConfigError(f"chain.{key} needs keys {sorted(allowed)}")
    res = raw.get("reservoir")
    if res is None:
        raise ConfigError("missing section: reservoir")
    regime = res.get("regime") if isinstance(res, dict) else None
    if regime not in RES_KEYS:
        raise ConfigError(f"reservoir.regime must be one of {', '.join(RES_KEYS)}")
    _reject_unknown(res, RES_KEYS[regime], "reservoir")
    params = raw.get("params") or {}
    _reject_unknown(params, PARAM_KEYS, "params")
    if "initial" in params and params["initial"] not in INITIAL_STATES:
        raise ConfigError(f"params.initial must be one of {', '.join(INITIAL_STATES)}")
    if params.get("integrator", "rk4") not in ("rk4", "exact"):
        raise ConfigError("params.integrator must be rk4 or exact")
    if "pre_quench" in params:
        _reject_unknown(params["pre_quench"], OVERRIDE_KEYS - {"label"}, "params.pre_quench")
    if "bipartition" in params:
        _reject_unknown(params["bipartition"], {"a1", "a2"}, "params.bipartition")
    variants = raw.get("variants") or []
    if not isinstance(variants, list):
        raise ConfigError("variants must be a list")
    labels = []
    for i, v in enumerate(variants):
        _reject_unknown(v, OVERRIDE_KEYS, f"variants[{i}]")
        labels.append(str(v.get("label", i)))
    if len(set(labels)) != len(labels):
        raise ConfigError("variant labels must be unique")
    cfg = ExperimentConfig(task, dict(chain), dict(res), dict(params),
                           tuple(dict(v, label=lab) for v, lab in zip(variants, labels)),
                           str(raw.get("description", "")))
    # build once so that physical validation errors surface early
    for v in cfg.variant_list():
        build_system(cfg, v)
    return cfg


def load_config(path: str, task: str | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return validate(raw or {}, task)


def merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def build_chain(chain: dict, override: dict | None = None) -> ChainSpec:
    override = override or {}
    n = int(chain["n_sites"])
    spec = uniform_chain(n, float(chain.get("J", 1.0)), float(chain.get("eps", 0.0)))
    if "hoppings" in chain or "onsite" in chain:
        spec = ChainSpec(n, chain.get("hoppings", spec.hoppings), chain.get("onsite", spec.onsite))
    if "site_defect" in chain:
        d = chain["site_defect"]
        spec = with_site_defect(spec, int(d["site"]), float(override.get("defect_eps", d["eps"])))
    elif "defect_eps" in override:
        raise ConfigError("defect_eps override needs chain.site_defect")
    if "bond_defect" in chain:
        d = chain["bond_defect"]
        spec = with_bond_defect(spec, int(d["bond"]), float(override.get("bond_J", d["J"])))
    elif "bond_J" in override:
        raise ConfigError("bond_J override needs chain.bond_defect")
    return spec


def build_reservoir(res: dict, spec: ChainSpec, override: dict | None = None) -> ReservoirSpec:
    n_sites = spec.n_sites
    r = dict(res)
    for k in ("delta", "g", "phi"):
        if override and k in override:
            r[k] = override[k]
    regime = r["regime"]
    try:
        if regime == "large_bias":
            return rates_large_bias(n_sites, float(r.get("g", 1.0)), float(r.get("delta", 0.0)))
        if regime == "linear_response":
            return rates_linear_response(n_sites, float(r.get("g", 1.0)), float(r.get("delta", 0.0)),
                                         float(r.get("phi", 0.0)))
        return rates_from_fermi(n_sites, float(r["g_left"]), float(r["g_right"]), float(r["mu_left"]),
                                float(r["mu_right"]), float(r["T_left"]), float(r["T_right"]), spec.onsite[0], spec.onsite[-1])
    except KeyError as exc:
        raise ConfigError(f"reservoir is missing {exc}") from exc


def build_system(cfg: ExperimentConfig, variant: dict[str, Any]) -> tuple[ChainSpec, ReservoirSpec]:
    try:
        spec = build_chain(cfg.chain, variant)
        res = build_reservoir(cfg.reservoir, spec, variant)
    except ConfigError:
        raise
    except InfolatError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return spec, res
