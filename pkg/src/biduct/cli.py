"""Command-line surface: validate specs, estimate capacities, trace regions, run suites.

Exit codes: 0 success, 1 invariant/tolerance failure, 2 input error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import additivity as addmod
from .channels import (
    ChannelValidationError,
    OneWayChannel,
    TwoWayChannel,
    is_entanglement_breaking,
)
from .classical import (
    ClassicalChannelError,
    ClassicalTwoWayChannel,
    JointInputDistribution,
    classical_consistency_check,
    shannon_inner_region,
    shannon_outer_region,
)
from .ensembles import EnsembleError
from .optimize import Budget, bsst_capacity, one_way_capacity
from .region import inner_region, outer_region
from .sampling import (
    random_conditional_pmf,
    random_density_matrix,
    random_kraus_set,
    rng_from,
)
from .states import LayoutError, StateValidationError, entropy_of_matrix
from .wire import (
    WireFormatError,
    as_two_way,
    budget_from_json,
    channel_spec_from_json,
    dump_payload,
    f12,
    region_to_csv,
    region_to_json,
    report_to_json,
)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2


class _InputError(Exception):
    pass


class _InvariantError(Exception):
    pass


@dataclass(frozen=True)
class JobConfig:
    """One CLI invocation: command, referenced paths, budget, output shape.

    Stochastic commands must carry a seed; referenced files must exist.
    """

    command: str
    spec_path: str | None = None
    kind: str | None = None
    direction: str = "forward"
    budget: Budget | None = None
    out_path: str | None = None
    fmt: str = "json"
    suite_name: str | None = None
    config_path: str | None = None

    def __post_init__(self):
        for path in (self.spec_path, self.config_path):
            if path is not None and not Path(path).exists():
                raise _InputError(f"referenced file does not exist: {path}")
        if self.command in ("capacity", "region", "suite"):
            if self.budget is None or self.budget.seed is None:
                raise _InputError(f"{self.command} requires a seed")


def _job_from_args(args) -> JobConfig:
    return JobConfig(
        command=args.command,
        spec_path=getattr(args, "spec", None),
        kind=getattr(args, "kind", None),
        direction=getattr(args, "direction", "forward"),
        budget=_budget_from_args(args) if hasattr(args, "seed") else None,
        out_path=getattr(args, "out", None),
        fmt=getattr(args, "format", "json"),
        suite_name=getattr(args, "name", None),
        config_path=getattr(args, "config", None),
    )


def _sidecar() -> dict:
    return {"created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat()}


def _emit(payload: dict, out=None) -> None:
    text = dump_payload(payload, _sidecar())
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def _load_spec(path: str):
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise _InputError(f"cannot read spec: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _InputError(f"spec is not valid JSON: {exc}") from exc
    return data


def _budget_from_args(args) -> Budget:
    levels = None
    if getattr(args, "ancilla_levels", None):
        levels = tuple(int(x) for x in args.ancilla_levels.split(","))
    return Budget(
        restarts=getattr(args, "budget_restarts", 32),
        max_iters=getattr(args, "budget_iters", 200),
        seed=args.seed,
        ancilla_levels=levels,
    )


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(job: JobConfig) -> int:
    data = _load_spec(job.spec_path)
    report: dict = {"spec": job.spec_path, "valid": False}
    kind = data.get("type")
    if kind == "classical":
        pmf = np.array(data.get("pmf", []), dtype=float)
        if pmf.ndim != 4:
            raise _InputError(f"classical pmf must have 4 indices, got shape {pmf.shape}")
        sums = pmf.sum(axis=(2, 3))
        worst = np.unravel_index(np.argmax(np.abs(sums - 1.0)), sums.shape)
        report.update(
            {
                "type": "classical",
                "alphabets": list(pmf.shape),
                "max_row_deviation": f12(abs(sums[worst] - 1.0)),
                "worst_row": [int(worst[0]), int(worst[1])],
            }
        )
        try:
            ClassicalTwoWayChannel(pmf)
        except ClassicalChannelError as exc:
            report["error"] = str(exc)
            _emit(report)
            return EXIT_INVARIANT
        report["valid"] = True
        _emit(report)
        return EXIT_OK
    try:
        channel = channel_spec_from_json(data)
    except WireFormatError as exc:
        raise _InputError(str(exc)) from exc
    except ChannelValidationError as exc:
        # Recompute the completeness deviation so it can be reported.
        try:
            kraus = [np.array(k, dtype=float)[..., 0] + 1j * np.array(k, dtype=float)[..., 1]
                     for k in data.get("kraus", [])]
            d_in = int(data["dims"]["a_in"]) * int(data["dims"]["b_in"])
            s = sum(K.conj().T @ K for K in kraus)
            report["completeness_deviation"] = f12(float(np.abs(s - np.eye(d_in)).max()))
        except Exception:
            pass
        report["error"] = str(exc)
        _emit(report)
        return EXIT_INVARIANT
    if isinstance(channel, OneWayChannel):
        s = sum(K.conj().T @ K for K in channel.kraus)
        report.update(
            {
                "type": "one-way",
                "dims": {"in": channel.d_in, "out": channel.d_out},
                "completeness_deviation": f12(float(np.abs(s - np.eye(channel.d_in)).max())),
                "entanglement_breaking": is_entanglement_breaking(channel).value,
            }
        )
    else:
        s = sum(K.conj().T @ K for K in channel.kraus)
        report.update(
            {
                "type": "two-way",
                "dims": {
                    "a_in": channel.dims.a_in, "b_in": channel.dims.b_in,
                    "a_out": channel.dims.a_out, "b_out": channel.dims.b_out,
                },
                "completeness_deviation": f12(
                    float(np.abs(s - np.eye(channel.dims.in_dim)).max())
                ),
            }
        )
    report["valid"] = True
    _emit(report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# capacity
# ---------------------------------------------------------------------------


def cmd_capacity(job: JobConfig) -> int:
    data = _load_spec(job.spec_path)
    try:
        parsed = channel_spec_from_json(data)
    except WireFormatError as exc:
        raise _InputError(str(exc)) from exc
    channel = as_two_way(parsed)
    print(
        "warning: ancilla-dimension ladder is heuristic; larger ancillas may achieve more",
        file=sys.stderr,
    )
    rep = one_way_capacity(channel, job.direction, job.budget)
    payload: dict = {"command": "capacity", "direction": job.direction,
                     "report": report_to_json(rep)}
    if isinstance(parsed, OneWayChannel) and job.direction == "forward":
        brep = bsst_capacity(parsed, job.budget)
        payload["bsst"] = report_to_json(brep)
        payload["bsst_gap"] = f12(abs(rep.best_value - brep.best_value))
    _emit(payload, job.out_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# region
# ---------------------------------------------------------------------------


def cmd_region(job: JobConfig) -> int:
    data = _load_spec(job.spec_path)
    try:
        parsed = channel_spec_from_json(data)
    except WireFormatError as exc:
        raise _InputError(str(exc)) from exc
    kind = job.kind
    if kind.startswith("shannon-"):
        if not isinstance(parsed, ClassicalTwoWayChannel):
            raise _InputError(f"{kind} requires a classical channel spec")
        fn = shannon_inner_region if kind == "shannon-inner" else shannon_outer_region
        region = fn(parsed, job.budget, channel_id=job.spec_path)
    elif kind in ("inner", "outer"):
        channel = as_two_way(parsed)
        fn = inner_region if kind == "inner" else outer_region
        region = fn(channel, job.budget, channel_id=job.spec_path)
    else:
        raise _InputError(f"unknown region kind {kind!r}")
    if job.fmt == "csv":
        text = region_to_csv(region)
        if job.out_path:
            Path(job.out_path).write_text(text)
        sys.stdout.write(text)
    else:
        _emit(region_to_json(region), job.out_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _suite_lemma_star(config: dict, seed: int) -> tuple[bool, dict]:
    n = int(config.get("instances", 1000))
    dims = config.get("dims", [2, 3])
    counts = config.get("members", [2, 3, 4])
    slacks = []
    route_devs = []
    ok = True
    for i in range(n):
        rng = rng_from(seed, 101, i)
        d_s = int(rng.choice(dims))
        d_e = int(rng.choice(dims))
        k = int(rng.choice(counts))
        p = rng.dirichlet(np.ones(k))
        sig = [random_density_matrix(rng, d_s) for _ in range(k)]
        eta = [random_density_matrix(rng, d_e) for _ in range(k)]
        s = addmod.lemma_star_check(p, sig, eta)
        s_dp = addmod.lemma_star_via_data_processing(p, sig, eta)
        s_ssa = addmod.lemma_star_via_ssa(p, sig, eta)
        dev = max(abs(s - s_dp), abs(s - s_ssa))
        slacks.append(f12(s))
        route_devs.append(f12(dev))
        if s < -addmod.LEMMA_SLACK_TOL or dev > addmod.PROOF_ROUTE_TOL:
            ok = False
    payload = {
        "suite": "lemma-star",
        "instances": n,
        "min_slack": f12(min(slacks)),
        "max_route_deviation": f12(max(route_devs)),
        "slacks": slacks,
        "ok": ok,
    }
    return ok, payload


def _suite_ssa(config: dict, seed: int) -> tuple[bool, dict]:
    from .states import ALICE, DensityOperator, SubsystemLayout, partial_trace

    n = int(config.get("instances", 200))
    dims = config.get("dims", [2, 3])
    ok = True
    worst = np.inf
    slacks = []
    for i in range(n):
        rng = rng_from(seed, 103, i)
        da, db, dc = (int(rng.choice(dims)) for _ in range(3))
        layout = SubsystemLayout.of(("X", da, ALICE), ("Y", db, ALICE), ("Z", dc, ALICE))
        rho = DensityOperator._trusted(random_density_matrix(rng, da * db * dc), layout)
        s_abc = entropy_of_matrix(rho.matrix)
        s_ab = entropy_of_matrix(partial_trace(rho, ["X", "Y"]).matrix)
        s_ac = entropy_of_matrix(partial_trace(rho, ["X", "Z"]).matrix)
        s_a = entropy_of_matrix(partial_trace(rho, ["X"]).matrix)
        slack = s_ab + s_ac - s_abc - s_a
        slacks.append(f12(slack))
        worst = min(worst, slack)
        if slack < -1e-9:
            ok = False
    return ok, {"suite": "ssa", "instances": n, "min_slack": f12(worst),
                "slacks": slacks, "ok": ok}


def _suite_consistency(config: dict, seed: int) -> tuple[bool, dict]:
    n = int(config.get("instances", 50))
    max_alpha = int(config.get("max_alphabet", 3))
    tol = float(config.get("tolerance", 1e-9))
    devs = []
    ok = True
    for i in range(n):
        rng = rng_from(seed, 107, i)
        na = int(rng.integers(2, max_alpha + 1))
        nb = int(rng.integers(2, max_alpha + 1))
        w = ClassicalTwoWayChannel(random_conditional_pmf(rng, na, nb, na, nb))
        d = JointInputDistribution(rng.dirichlet(np.ones(na * nb)).reshape(na, nb))
        dev = classical_consistency_check(w, d)
        devs.append(f12(dev))
        if dev > tol:
            ok = False
    return ok, {"suite": "consistency", "instances": n, "max_deviation": f12(max(devs)),
                "deviations": devs, "ok": ok}


def _suite_additivity(config: dict, seed: int, budget: Budget) -> tuple[bool, dict]:
    n = int(config.get("instances", 10))
    mode = config.get("mode", "EA")
    tol = float(config.get("tolerance", 2e-2))
    gaps = []
    ok = True
    for i in range(n):
        if mode == "HOLEVO_EB":
            m1, m2 = addmod.random_eb_pair(seed * 1000 + i)
        else:
            m1 = OneWayChannel(tuple(random_kraus_set(rng_from(seed, 113, i, 0), 2, 2, 3)), 2, 2)
            m2 = OneWayChannel(tuple(random_kraus_set(rng_from(seed, 113, i, 1), 2, 2, 3)), 2, 2)
        rep = addmod.additivity_check(m1, m2, mode, budget)
        gaps.append(f12(rep.superadditivity_gap))
        if not -tol <= rep.superadditivity_gap <= tol:
            ok = False
    return ok, {"suite": "additivity", "mode": mode, "instances": n, "gaps": gaps,
                "max_abs_gap": f12(max(abs(g) for g in gaps)), "ok": ok}


def _suite_collapse(config: dict, seed: int, budget: Budget) -> tuple[bool, dict]:
    from .channels import one_way_identity

    n = int(config.get("instances", 10))
    tol = float(config.get("tolerance", 2e-2))
    rows = []
    ok = True
    for i in range(n):
        kraus = addmod.random_eb_pair(seed * 2000 + i)[0]
        rep = addmod.family_collapse_check(kraus, budget)
        rows.append(
            {
                "zero_chi": f12(rep.zero_chi), "product": f12(rep.product),
                "separable": f12(rep.separable), "spread": f12(rep.spread),
                "nesting": rep.nesting_holds,
            }
        )
        if rep.spread > tol or not rep.nesting_holds:
            ok = False
    control = addmod.family_collapse_check(one_way_identity(2), budget)
    control_ok = control.assisted_gap >= 0.5
    ok = ok and control_ok
    return ok, {
        "suite": "collapse", "instances": n, "rows": rows,
        "negative_control_gap": f12(control.assisted_gap),
        "negative_control_ok": control_ok, "ok": ok,
    }


def cmd_suite(job: JobConfig) -> int:
    config = {}
    if job.config_path:
        try:
            config = json.loads(Path(job.config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _InputError(f"cannot read suite config: {exc}") from exc
    seed = job.budget.seed
    budget = budget_from_json(config.get("budget", {})).replace(seed=seed)
    if job.suite_name == "lemma-star":
        ok, payload = _suite_lemma_star(config, seed)
    elif job.suite_name == "ssa":
        ok, payload = _suite_ssa(config, seed)
    elif job.suite_name == "consistency":
        ok, payload = _suite_consistency(config, seed)
    elif job.suite_name == "additivity":
        ok, payload = _suite_additivity(config, seed, budget)
    elif job.suite_name == "collapse":
        ok, payload = _suite_collapse(config, seed, budget)
    else:
        raise _InputError(f"unknown suite {job.suite_name!r}")
    _emit(payload, job.out_path)
    return EXIT_OK if ok else EXIT_INVARIANT


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biduct",
        description="Capacity-region bounds for two-way quantum channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a channel spec file")
    p.add_argument("--spec", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("capacity", help="one-way capacity estimate")
    p.add_argument("--spec", required=True)
    p.add_argument("--direction", choices=["forward", "backward"], default="forward")
    p.add_argument("--budget-restarts", type=int, default=32)
    p.add_argument("--budget-iters", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ancilla-levels", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_capacity)

    p = sub.add_parser("region", help="trace a rate-region estimate")
    p.add_argument("--spec", required=True)
    p.add_argument("--kind", required=True,
                   choices=["inner", "outer", "shannon-inner", "shannon-outer"])
    p.add_argument("--budget-restarts", type=int, default=8)
    p.add_argument("--budget-iters", type=int, default=150)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ancilla-levels", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(fn=cmd_region)

    p = sub.add_parser("suite", help="run a property suite")
    p.add_argument("--name", required=True,
                   choices=["lemma-star", "ssa", "consistency", "additivity", "collapse"])
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(_job_from_args(args))
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ChannelValidationError, ClassicalChannelError, StateValidationError,
            EnsembleError, LayoutError, _InvariantError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
