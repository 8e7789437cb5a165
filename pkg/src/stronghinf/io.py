"""File formats: system documents, interconnection documents, result
documents, and sweep tables.

Documents are JSON.  A system document mirrors the state-space form
directly: fields n, E, delays, A (index 0 = undelayed), B, C, matrices as
row-major nested arrays.  An interconnection document carries the plant
blocks by name, the controller structure (order, mask, fixed_values,
controller_delays), and optionally a concrete parameter vector p.

Result documents hold plain floats; Python's repr round-trips them, so a
rerun on identical input emits byte-identical output.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ddae import DdaeSystem
from .interconnect import ControllerStructure, PlantModel
from .levelset import NormCertificate
from .transfer import SweepTable

__all__ = ["load_system", "save_system", "system_to_dict", "system_from_dict",
           "InterconnectionDoc", "load_interconnection",
           "is_interconnection_file", "norm_document", "ta_document",
           "synth_document", "write_document", "write_sweep_csv"]


def _matrix(doc, key, required=True):
    if key not in doc or doc[key] is None:
        if required:
            raise ValueError(f"missing matrix field {key!r}")
        return None
    return np.array(doc[key], dtype=float)


def system_from_dict(doc: dict) -> DdaeSystem:
    delays = [float(t) for t in doc.get("delays", [])]
    A = doc.get("A")
    if not isinstance(A, list) or len(A) != len(delays) + 1:
        raise ValueError("A must list one matrix per delay plus the "
                         "undelayed A0 at index 0")
    sys = DdaeSystem.from_matrices(
        _matrix(doc, "E"), [np.array(Ai, dtype=float) for Ai in A],
        delays, _matrix(doc, "B"), _matrix(doc, "C"))
    if "n" in doc and int(doc["n"]) != sys.n:
        raise ValueError(f"declared n = {doc['n']} but matrices are "
                         f"{sys.n} x {sys.n}")
    return sys


def system_to_dict(sys: DdaeSystem) -> dict:
    return {
        "n": sys.n,
        "E": sys.E.tolist(),
        "delays": list(sys.delays.taus),
        "A": [Ai.tolist() for Ai in sys.A],
        "B": sys.B.tolist(),
        "C": sys.C.tolist(),
    }


def load_system(path) -> DdaeSystem:
    with open(path) as fh:
        return system_from_dict(json.load(fh))


def save_system(sys: DdaeSystem, path) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_dict(sys), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _delayed_blocks(doc, key):
    out = []
    for entry in doc.get(key, []) or []:
        if isinstance(entry, dict):
            out.append((float(entry["tau"]), np.array(entry["matrix"],
                                                      dtype=float)))
        else:
            tau, M = entry
            out.append((float(tau), np.array(M, dtype=float)))
    return out


@dataclass(frozen=True)
class InterconnectionDoc:
    plant: PlantModel
    controller: ControllerStructure
    p: Optional[np.ndarray]    # concrete gains, when the file pins them


def load_interconnection(path) -> InterconnectionDoc:
    with open(path) as fh:
        doc = json.load(fh)
    pd = doc["plant"]
    plant = PlantModel(
        A=_matrix(pd, "A"), B0=_matrix(pd, "B0"), B2=_matrix(pd, "B2"),
        Cz=_matrix(pd, "Cz"), Cy=_matrix(pd, "Cy"),
        Ad=_delayed_blocks(pd, "Ad"), H=_delayed_blocks(pd, "H"),
        B1=_delayed_blocks(pd, "B1"), B2d=_delayed_blocks(pd, "B2d"),
        Dz=_matrix(pd, "Dz", required=False),
        Dzu=_matrix(pd, "Dzu", required=False),
        Du=_matrix(pd, "Du", required=False),
        Dyw=_matrix(pd, "Dyw", required=False))
    cd = doc["controller"]
    delays = cd.get("controller_delays", {}) or {}
    ctrl = ControllerStructure(
        order=int(cd.get("order", 0)),
        mask=np.array(cd["mask"], dtype=bool),
        fixed_values=(np.array(cd["fixed_values"], dtype=float)
                      if cd.get("fixed_values") is not None else None),
        y_delay=float(delays.get("y", 0.0)),
        u_delay=float(delays.get("u", 0.0)))
    p = doc.get("p")
    if p is not None:
        p = np.asarray(p, dtype=float).ravel()
    return InterconnectionDoc(plant=plant, controller=ctrl, p=p)


def is_interconnection_file(path) -> bool:
    with open(path) as fh:
        return "plant" in json.load(fh)


def norm_document(cert: NormCertificate) -> dict:
    doc = {
        "value": float(cert.value),
        "branch": cert.kind,
        "ta_value": float(cert.ta_value),
        "iterations": int(cert.iterations),
        "N": int(cert.N),
        "tol": float(cert.tol),
        "corrected": bool(cert.corrected),
    }
    if cert.omega_hat is not None:
        doc["omega_hat"] = float(cert.omega_hat)
    if cert.theta_hat is not None:
        doc["theta_hat"] = [float(t) for t in np.atleast_1d(cert.theta_hat)]
    return doc


def ta_document(value: float, theta_hat, iterations: int,
                converged: bool) -> dict:
    return {
        "value": float(value),
        "branch": "asymptotic-active",
        "theta_hat": [float(t) for t in np.atleast_1d(theta_hat)],
        "iterations": int(iterations),
        "converged": bool(converged),
    }


def synth_document(result) -> dict:
    return {
        "best_value": float(result.best_value),
        "best_p": [float(x) for x in result.best_p],
        "branch": result.certificate.kind,
        "starts": [
            {
                "index": t.index,
                "p0": [float(x) for x in t.p0],
                "phase": t.phase,
                "value": (float(t.value) if np.isfinite(t.value) else None),
                "iterations": len(t.values),
                "stationarity": (float(t.stationarity)
                                 if np.isfinite(t.stationarity) else None),
            }
            for t in result.traces
        ],
    }


def write_document(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def write_sweep_csv(table: SweepTable, path) -> None:
    header = "omega," + ",".join(f"sigma{k + 1}" for k in range(table.k))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for w, row in zip(table.omegas, table.sigmas):
            fh.write(",".join([repr(float(w))] + [repr(float(s))
                                                  for s in row]) + "\n")
