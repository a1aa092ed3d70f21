"""JSON wire formats: matrices as [re, im] pairs, layouts, channels, ensembles,
reports and regions.  All numbers are rounded to 12 significant digits so that
identical runs produce byte-identical payloads."""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .channels import ChannelDims, OneWayChannel, TwoWayChannel, embed_classical, unitary_channel
from .classical import ClassicalTwoWayChannel
from .ensembles import Ensemble
from .optimize import Budget, OptimizationReport
from .region import RateRectangle, RateRegion
from .states import DensityOperator, PureState, SubsystemLayout


class WireFormatError(ValueError):
    pass


def f12(x: float) -> float:
    """Round to 12 significant digits (the package-wide output precision)."""
    return float(f"{float(x):.12g}")


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[f12(v.real), f12(v.imag)] for v in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise WireFormatError(f"bad matrix payload: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise WireFormatError(f"matrix must be nested [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def vector_from_json(data) -> np.ndarray:
    arr = np.array(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise WireFormatError(f"vector must be a list of [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def layout_to_json(layout: SubsystemLayout) -> list:
    return [
        {"label": l, "dim": d, "party": p}
        for l, d, p in zip(layout.labels, layout.dims, layout.parties)
    ]


def layout_from_json(data) -> SubsystemLayout:
    try:
        return SubsystemLayout.of(*((e["label"], int(e["dim"]), e["party"]) for e in data))
    except (KeyError, TypeError) as exc:
        raise WireFormatError(f"bad layout payload: {exc}") from exc


def ensemble_to_json(e: Ensemble) -> dict:
    return {
        "layout": layout_to_json(e.layout),
        "members": [
            {"p": f12(p), "state": matrix_to_json(rho.matrix)} for p, rho in e.members
        ],
    }


def ensemble_from_json(data) -> Ensemble:
    layout = layout_from_json(data["layout"])
    members = []
    for entry in data["members"]:
        state = entry["state"]
        if isinstance(state, dict) and "pure" in state:
            rho = PureState(vector_from_json(state["pure"]), layout).density()
        else:
            rho = DensityOperator(matrix_from_json(state), layout)
        members.append((float(entry["p"]), rho))
    return Ensemble(tuple(members))


def budget_to_json(b: Budget) -> dict:
    return {
        "restarts": b.restarts,
        "max_iters": b.max_iters,
        "seed": b.seed,
        "ancilla_levels": list(b.ancilla_levels) if b.ancilla_levels else None,
    }


def budget_from_json(data) -> Budget:
    levels = data.get("ancilla_levels")
    return Budget(
        restarts=int(data.get("restarts", 32)),
        max_iters=int(data.get("max_iters", 200)),
        seed=data.get("seed"),
        ancilla_levels=tuple(int(x) for x in levels) if levels else None,
    )


def report_to_json(rep: OptimizationReport) -> dict:
    out = {
        "best_value": f12(rep.best_value),
        "restarts": rep.restarts,
        "iterations": rep.iterations,
        "converged_fraction": f12(rep.converged_fraction),
        "direction": rep.direction,
        "family": rep.family,
        "certificate": ensemble_to_json(rep.certificate),
        "notes": list(rep.notes),
    }
    if rep.per_level is not None:
        out["per_level"] = {str(k): f12(v) for k, v in sorted(rep.per_level.items())}
    return out


def rectangle_to_json(r: RateRectangle) -> dict:
    out: dict[str, Any] = {"r_fwd": f12(r.r_fwd), "r_bwd": f12(r.r_bwd)}
    if r.certificate_id:
        out["certificate_id"] = r.certificate_id
    if r.note:
        out["note"] = r.note
    return out


def region_to_json(region: RateRegion) -> dict:
    return {
        "kind": region.kind,
        "channel": region.meta.get("channel", ""),
        "vertices": [[f12(x), f12(y)] for x, y in region.vertices],
        "rectangles": [rectangle_to_json(r) for r in region.rectangles],
        "budget": region.meta.get("budget", {}),
        "heuristic": region.heuristic,
    }


def region_from_json(data) -> RateRegion:
    try:
        vertices = tuple((float(x), float(y)) for x, y in data["vertices"])
        rects = tuple(
            RateRectangle(float(r["r_fwd"]), float(r["r_bwd"]),
                          r.get("certificate_id"), r.get("note", ""))
            for r in data.get("rectangles", [])
        )
        return RateRegion(
            vertices=vertices, kind=data["kind"], rectangles=rects,
            meta={"channel": data.get("channel", ""), "budget": data.get("budget", {})},
            heuristic=bool(data.get("heuristic", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WireFormatError(f"bad region payload: {exc}") from exc


def region_to_csv(region: RateRegion) -> str:
    lines = ["r_fwd,r_bwd"]
    for x, y in region.vertices:
        lines.append(f"{f12(x):.12g},{f12(y):.12g}")
    return "\n".join(lines) + "\n"


def channel_spec_from_json(data) -> TwoWayChannel | OneWayChannel | ClassicalTwoWayChannel:
    """Parse a channel spec; classical specs come back as ClassicalTwoWayChannel."""
    if not isinstance(data, dict) or "type" not in data:
        raise WireFormatError("channel spec must be an object with a 'type' field")
    kind = data["type"]
    if kind == "classical":
        alphabets = data.get("alphabets")
        pmf = np.array(data["pmf"], dtype=float)
        if alphabets is not None:
            want = (
                int(alphabets["a"]), int(alphabets["b"]),
                int(alphabets.get("a_out", alphabets["a"])),
                int(alphabets.get("b_out", alphabets["b"])),
            )
            if tuple(pmf.shape) != want:
                raise WireFormatError(f"pmf shape {pmf.shape} != alphabets {want}")
        return ClassicalTwoWayChannel(pmf)
    dims_data = data.get("dims")
    if dims_data is None:
        raise WireFormatError("quantum channel spec needs a 'dims' object")
    dims = ChannelDims(
        int(dims_data["a_in"]), int(dims_data["b_in"]),
        int(dims_data["a_out"]), int(dims_data["b_out"]),
    )
    if kind == "unitary":
        return unitary_channel(matrix_from_json(data["unitary"]), dims)
    if kind == "kraus":
        kraus = tuple(matrix_from_json(k) for k in data["kraus"])
        if dims.b_in == 1 and dims.a_out == 1:
            return OneWayChannel(kraus, dims.a_in, dims.b_out)
        return TwoWayChannel(kraus, dims)
    raise WireFormatError(f"unknown channel type {kind!r}")


def channel_spec_to_json(obj) -> dict:
    if isinstance(obj, ClassicalTwoWayChannel):
        na, nb, na_o, nb_o = obj.alphabets
        return {
            "type": "classical",
            "alphabets": {"a": na, "b": nb, "a_out": na_o, "b_out": nb_o},
            "pmf": [[[[f12(v) for v in row] for row in blk] for blk in plane]
                    for plane in obj.pmf.tolist()],
        }
    if isinstance(obj, OneWayChannel):
        return {
            "type": "kraus",
            "dims": {"a_in": obj.d_in, "b_in": 1, "a_out": 1, "b_out": obj.d_out},
            "kraus": [matrix_to_json(k) for k in obj.kraus],
        }
    if isinstance(obj, TwoWayChannel):
        return {
            "type": "kraus",
            "dims": {
                "a_in": obj.dims.a_in, "b_in": obj.dims.b_in,
                "a_out": obj.dims.a_out, "b_out": obj.dims.b_out,
            },
            "kraus": [matrix_to_json(k) for k in obj.kraus],
        }
    raise WireFormatError(f"cannot serialize {type(obj).__name__}")


def as_two_way(obj) -> TwoWayChannel:
    if isinstance(obj, TwoWayChannel):
        return obj
    if isinstance(obj, OneWayChannel):
        from .channels import embed_one_way

        return embed_one_way(obj)
    if isinstance(obj, ClassicalTwoWayChannel):
        return embed_classical(obj)
    raise WireFormatError(f"cannot view {type(obj).__name__} as a two-way channel")


def dump_payload(payload: dict, sidecar: dict | None = None) -> str:
    """Deterministic JSON: sorted keys, compact separators, timestamps in the sidecar."""
    doc = {"payload": payload, "sidecar": sidecar or {}}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
