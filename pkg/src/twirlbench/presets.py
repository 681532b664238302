"""Named experiment configurations reproducing the reference studies.

Each preset is a plain JSON-compatible dict accepted by the CLI `run`
command.  Angles are given in degrees; `theta2_deg`/`theta1_deg` are the
rotation angles of the coherent error gates exp(-i theta/2 G) attached to
two-qubit elements and X90 pulses respectively.
"""

from __future__ import annotations

import copy

__all__ = ["PRESETS", "preset_config", "preset_names"]

_COHERENT_Z = {
    "name": "coherent_z",
    "seed": 2024,
    "model": {
        "model": "fixed_coherent",
        "theta2_deg": 10.0,
        "theta1_deg": 1.0,
        "placement": "monolithic",
    },
    "protocols": ["haar", "clifford", "local_clifford", "pauli"],
    "interleaved": "cnot",
    "shots": 1500,
    "estimator": "ratio",
    "fit": "Ap_fixedB",
    "bootstrap": {"n_resamples": 1000, "alpha": 0.05},
    "gauge": {"enabled": False, "origin": "U_R", "n": 10000, "m": 10000},
}

_OVERROTATION = {
    "name": "overrotation",
    "seed": 2024,
    "model": {
        "model": "overrotation",
        "delta2": 0.05,
        "delta1": 0.01,
        "placement": "compiled",
    },
    "protocols": ["haar", "clifford", "local_clifford", "pauli"],
    "interleaved": "cnot",
    "shots": 1500,
    "estimator": "ratio",
    "fit": "Ap_fixedB",
    "bootstrap": {"n_resamples": 1000, "alpha": 0.05},
    "gauge": {"enabled": False, "origin": "U_R", "n": 10000, "m": 10000},
}

_ADVERSARIAL = {
    "name": "adversarial",
    "seed": 2024,
    "model": {
        "model": "adversarial",
        "theta_deg": 10.0,
        # +YY on the twirl gates conjugates through the CNOT to -XZ and
        # cancels the +XZ interleaved error (destructive interference)
        "twirl_sign": 1,
    },
    "protocols": ["clifford"],
    "interleaved": "cnot",
    "shots": 1500,
    "estimator": "ratio",
    "fit": "Ap_fixedB",
    "bootstrap": {"n_resamples": 1000, "alpha": 0.05},
    "gauge": {"enabled": False, "origin": "U_R", "n": 10000, "m": 10000},
}

_XRB = {
    "name": "xrb_comparison",
    "seed": 2024,
    "model": {
        "model": "fixed_coherent",
        "theta2_deg": 10.0,
        "theta1_deg": 1.0,
        "dep2": 0.99,
        "placement": "monolithic",
    },
    "protocols": ["clifford", "pauli"],
    "interleaved": "cnot",
    "shots": 1500,
    "estimator": "ratio",
    "fit": "Ap_fixedB",
    "bootstrap": {"n_resamples": 1000, "alpha": 0.05},
    "xrb": {"enabled": True, "circuits_per_depth": 100},
    "gauge": {"enabled": False, "origin": "U_R", "n": 10000, "m": 10000},
}

_THETA1_SWEEP = {
    "name": "theta1_sweep",
    "seed": 2024,
    "model": {
        "model": "fixed_coherent",
        "theta2_deg": 10.0,
        "theta1_deg": 1.0,
        "placement": "monolithic",
    },
    "protocols": ["haar", "clifford", "local_clifford", "pauli"],
    "interleaved": "cnot",
    "shots": 1500,
    "estimator": "ratio",
    "fit": "Ap_fixedB",
    "sweep": {"param": "theta1_deg", "grid": "0:2:0.25"},
    "bootstrap": {"n_resamples": 1000, "alpha": 0.05},
    "gauge": {"enabled": False, "origin": "U_R", "n": 10000, "m": 10000},
}

_SCG = {
    "name": "scg_comparison",
    "seed": 2024,
    "model": {
        "model": "fixed_coherent",
        "theta2_deg": 10.0,
        "theta1_deg": 1.0,
        "placement": "monolithic",
    },
    "protocols": ["haar", "clifford", "local_clifford", "pauli"],
    "interleaved": "cnot",
    "shots": 1500,
    "estimator": "ratio",
    "fit": "Ap_fixedB",
    "bootstrap": {"n_resamples": 1000, "alpha": 0.05},
    "gauge": {"enabled": True, "origin": "U_R", "n": 10000, "m": 10000},
}

PRESETS = {
    "coherent_z": _COHERENT_Z,
    "overrotation": _OVERROTATION,
    "adversarial": _ADVERSARIAL,
    "adversarial_constructive": {
        **copy.deepcopy(_ADVERSARIAL),
        "name": "adversarial_constructive",
        "model": {"model": "adversarial", "theta_deg": 10.0, "twirl_sign": -1},
    },
    "xrb_comparison": _XRB,
    "theta1_sweep": _THETA1_SWEEP,
    "scg_comparison": _SCG,
    # aliases by figure role in the reference study
    "fig4_coherent_z": _COHERENT_Z,
    "fig5_overrotation": _OVERROTATION,
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def preset_config(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        )
    return copy.deepcopy(PRESETS[name])
