"""Named experiment presets, one per figure of the reference study (panels where useful)."""
from __future__ import annotations

import copy

import numpy as np

from .config import ExperimentConfig, validate
from .errors import ConfigError

LB = {"regime": "large_bias", "g": 1.0, "delta": 0.0}


def _chain(n, site=None, eps=0.0, bond=None, J=None):
    c = {"n_sites": n, "J": 1.0, "eps": 0.0}
    if site is not None:
        c["site_defect"] = {"site": site, "eps": eps}
    if bond is not None:
        c["bond_defect"] = {"bond": bond, "J": J}
    return c


def _grid(key, values, fmt="{:.4g}"):
    return [{"label": f"{key}={fmt.format(v)}", key: float(v)} for v in values]


PANELS_N7 = [
    {"label": "a", "delta": 0.0, "defect_eps": 0.0},
    {"label": "b", "delta": 0.75, "defect_eps": 0.0},
    {"label": "c", "delta": 0.0, "defect_eps": 3.0},
    {"label": "d", "delta": 0.75, "defect_eps": 3.0},
]
DELTA_SWEEP = _grid("delta", np.round(np.linspace(0.0, 0.95, 20), 4))
EPS_SWEEP = _grid("defect_eps", np.round(np.linspace(0.0, 6.0, 25), 4))
END4_N21 = {"a1": [1, 2, 3, 4], "a2": [18, 19, 20, 21]}

PRESETS: dict[str, dict] = {
    "fig5a": {"task": "ness", "chain": _chain(21), "reservoir": LB,
              "variants": _grid("delta", [0.0, 0.25, 0.5, 0.75]),
              "description": "occupations, clean chain, several delta"},
    "fig5b": {"task": "ness", "chain": _chain(21, 11, 0.0), "reservoir": LB,
              "variants": _grid("defect_eps", [0.0, 1.0, 2.0, 3.0]),
              "description": "occupations, central site defect, delta=0"},
    "fig6": {"task": "info_lattice", "chain": _chain(7, 4, 0.0), "reservoir": LB, "variants": PANELS_N7,
             "description": "information lattice, N=7"},
    "fig7": {"task": "info_currents", "chain": _chain(7, 4, 0.0), "reservoir": LB, "variants": PANELS_N7,
             "description": "effective information currents, N=7"},
    "fig8a": {"task": "info_currents", "chain": _chain(7, 4, 0.0), "reservoir": LB, "variants": DELTA_SWEEP,
              "description": "injected information currents and particle current vs delta"},
    "fig8b": {"task": "info_currents", "chain": _chain(7, 4, 0.0), "reservoir": LB, "variants": EPS_SWEEP,
              "description": "injected information currents and particle current vs defect energy"},
    "fig9a": {"task": "info_currents", "chain": _chain(7, 4, 0.0), "reservoir": LB, "variants": DELTA_SWEEP,
              "description": "vertical currents vs delta"},
    "fig9b": {"task": "info_currents", "chain": _chain(7, 4, 0.0), "reservoir": LB, "variants": EPS_SWEEP,
              "description": "vertical currents vs defect energy"},
    "fig10a": {"task": "info_currents", "chain": _chain(7, 4, 0.0), "reservoir": LB, "variants": DELTA_SWEEP,
               "description": "horizontal currents vs delta"},
    "fig10b": {"task": "info_currents", "chain": _chain(7, 4, 0.0), "reservoir": LB, "variants": EPS_SWEEP,
               "description": "horizontal currents vs defect energy"},
    "fig11": {"task": "noise_lattice", "chain": _chain(21, 11, 0.0), "reservoir": LB,
              "variants": [{"label": "clean", "delta": 0.75, "defect_eps": 0.0},
                           {"label": "defect", "delta": 0.0, "defect_eps": 3.0}],
              "description": "exact and noise-lattice information, N=21"},
    "fig12": {"task": "noise_lattice", "chain": _chain(21, 11, 0.0), "reservoir": LB,
              "variants": [{"label": "clean", "delta": 0.75, "defect_eps": 0.0},
                           {"label": "defect", "delta": 0.0, "defect_eps": 3.0}],
              "description": "exact and approximate information currents, N=21"},
    "fig13": {"task": "info_currents", "chain": _chain(20, bond=10, J=0.5), "reservoir": LB,
              "description": "bond defect J_10,11 = 0.5, N=20"},
    "fig14": {"task": "info_currents", "chain": _chain(21, 7, 3.0), "reservoir": LB,
              "description": "off-center site defect, ghost pillar"},
    "fig15": {"task": "info_currents", "chain": _chain(21, 11, 3.0),
              "reservoir": {"regime": "linear_response", "g": 1.0, "delta": 0.0, "phi": 0.1},
              "description": "linear-response regime with central defect"},
    "fig16": {"task": "negativity", "chain": _chain(21, 11, 0.0), "reservoir": LB,
              "params": {"dt": 0.05, "n_steps": 60000, "sample_every": 20, "initial": "pre_quench",
                         "pre_quench": {"delta": 0.0, "defect_eps": 0.0}, "bipartition": END4_N21},
              "variants": [{"label": "eps1", "defect_eps": 1.0, "delta": 0.0},
                           {"label": "eps3", "defect_eps": 3.0, "delta": 0.0},
                           {"label": "eps3_delta0.75", "defect_eps": 3.0, "delta": 0.75},
                           {"label": "eps0_delta0.75", "defect_eps": 0.0, "delta": 0.75}],
              "description": "negativity after a quench from the clean steady state"},
    "fig16_inset": {"task": "negativity", "chain": _chain(21, 11, 3.0), "reservoir": LB,
                    "params": {"dt": 0.05, "n_steps": 60000, "sample_every": 20, "initial": "empty", "integrator": "exact",
                               "bipartition": END4_N21},
                    "description": "negativity from the empty chain, eps_j0=3"},
    "fig17": {"task": "evolve", "chain": _chain(21), "reservoir": LB,
              "params": {"dt": 0.05, "n_steps": 60000, "sample_every": 20, "initial": "empty", "integrator": "exact",
                         "bipartition": END4_N21},
              "description": "clean chain from the empty state: negativity and end currents"},
    "fig18": {"task": "negativity", "chain": _chain(21, 11, 0.0), "reservoir": LB,
              "params": {"bipartition": END4_N21},
              "variants": _grid("defect_eps", np.round(np.linspace(0.0, 4.25, 18), 4)),
              "description": "steady-state negativity vs defect energy"},
    "fig18_inset": {"task": "negativity", "chain": _chain(21, 11, 3.0), "reservoir": LB,
                    "params": {"dt": 0.05, "n_steps": 60000, "sample_every": 20, "initial": "pre_quench",
                               "pre_quench": {"defect_eps": 0.0}, "bipartition": {"a1": [1, 2], "a2": [6, 7]}},
                    "description": "negativity between regions left of the defect after a quench"},
    "fig19": {"task": "trajectories", "chain": _chain(7, 4, 0.0), "reservoir": LB,
              "params": {"dt": 0.1, "n_steps": 35000, "n_traj": 1000, "seed": 20250101, "initial": "empty"},
              "variants": PANELS_N7,
              "description": "trajectory-averaged information lattice, N=7"},
}

# single-panel presets
for _fig in ("fig6", "fig7", "fig19"):
    for _panel in PANELS_N7:
        PRESETS[f"{_fig}{_panel['label']}"] = dict(copy.deepcopy(PRESETS[_fig]), variants=[dict(_panel)])


def preset_names() -> list[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return copy.deepcopy(PRESETS[name])


def load_preset(name: str, task: str | None = None) -> ExperimentConfig:
    return validate(get_preset(name), task)
