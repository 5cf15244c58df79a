"""Command-line interface.

Subcommands:

- ``simulate``         integrate the closed loop and classify the outcome
- ``analyze``          run the formation stability test and print the report
- ``enumerate-graphs`` list all symmetry-compatible interaction graphs
- ``verify``           test formation-manifold membership of a state file

Exit codes: 0 success (and, for ``analyze``, verdict exponentially
stable); 1 analysis verdict not stable; 2 invalid arguments; 3 I/O
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    ASSUMPTION2_GAIN,
    SimulationConfig,
    integrate,
    match_vertices,
    perturbed_state,
    random_state,
)
from .graphs import assumption3_graph, graph_from_json, InterAgentGraph
from .polyhedra import formation_membership, make_solid, SchlafliSolid
from .stability import algorithm1, exponential_stability_lift
from .xicoords import equilibrium_xi, xi_s_of_state
from .graphs import enumerate_symmetric_graphs

EXIT_OK = 0
EXIT_NOT_STABLE = 1
EXIT_USAGE = 2
EXIT_IO = 3

# Convergence thresholds for outcome classification.
_TARGET_TOL = 1e-4
_STATIONARY_TOL = 1e-8
_MANIFOLD_TOL = 1e-6


class UsageError(Exception):
    pass


def _parse_solid(text: str) -> SchlafliSolid:
    try:
        p_str, q_str = text.split(",")
        p, q = int(p_str), int(q_str)
    except ValueError as exc:
        raise UsageError(f"--solid expects 'p,q' integers, got {text!r}") from exc
    try:
        return make_solid(p, q)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load_graph(path: str | None, solid: SchlafliSolid) -> InterAgentGraph:
    if path is None:
        return assumption3_graph(solid)
    try:
        graph = graph_from_json(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read graph file {path}: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise UsageError(f"malformed graph file {path}: {exc}") from exc
    if graph.n != solid.n_vertices:
        raise UsageError(
            f"graph has {graph.n} vertices but {solid.symbol} needs {solid.n_vertices}"
        )
    return graph


def _load_state(path: str, solid: SchlafliSolid) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed state file {path}: {exc}") from exc
    states = np.asarray(data, dtype=float)
    if states.shape != (solid.n_vertices, 3):
        raise UsageError(
            f"state file must hold {solid.n_vertices} unit triples for {solid.symbol}"
        )
    norms = np.linalg.norm(states, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise UsageError("state file entries must be unit vectors")
    return states / norms[:, None]


def _manifest(args: argparse.Namespace, solid: SchlafliSolid, config: SimulationConfig | None) -> dict:
    return {
        "command": args.command,
        "solid": [solid.p, solid.q],
        "seed": getattr(args, "seed", None),
        "config": config.to_json_dict() if config else None,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _classify_outcome(
    trajectory, solid: SchlafliSolid, start_mode: str
) -> dict:
    """Label the end state of a run.

    Classes: ``converged-to-target`` when the final xi_s matches the
    solid's target under the best greedy agent relabeling;
    ``stayed-on-manifold`` for canonical starts that remain members;
    ``other-equilibrium`` when xi_s is stationary away from the target;
    ``timeout`` otherwise.
    """
    final = trajectory.final_state
    target_xi = equilibrium_xi(solid)
    perm = match_vertices(final, solid.vertices)
    relabeled = np.empty_like(final)
    for i, j in enumerate(perm):
        relabeled[j] = final[i]
    err_target = float(np.max(np.abs(xi_s_of_state(relabeled) - target_xi)))
    from .dynamics import closed_loop_rhs  # deferred to avoid cycle at import

    if start_mode == "canonical":
        member, residual = formation_membership(final, solid, tol=_MANIFOLD_TOL)
        if member:
            return {
                "class": "stayed-on-manifold",
                "xi_error": err_target,
                "membership_residual": residual,
            }
    if err_target < _TARGET_TOL:
        return {"class": "converged-to-target", "xi_error": err_target}
    # Stationarity of xi_s at a non-target point.
    if len(trajectory.times) >= 2:
        dt = trajectory.times[-1] - trajectory.times[-2]
        xi_prev = xi_s_of_state(trajectory.states[-2])
        xi_last = xi_s_of_state(final)
        rate = float(np.max(np.abs(xi_last - xi_prev)) / dt) if dt > 0 else np.inf
        if rate < _STATIONARY_TOL:
            return {"class": "other-equilibrium", "xi_error": err_target, "xi_rate": rate}
    return {"class": "timeout", "xi_error": err_target}


def _run_one_simulation(
    args: argparse.Namespace, solid: SchlafliSolid, graph: InterAgentGraph,
    seed: int, out_dir: Path, tag: str
) -> dict:
    config = SimulationConfig(
        step_size=args.step,
        t_final=args.t_final,
        integrator=args.integrator,
        renormalize_every=1,
        seed=seed,
    )
    rng = np.random.default_rng(seed)
    if args.start == "random":
        state0 = random_state(solid.n_vertices, rng)
    elif args.start == "canonical":
        state0 = solid.vertices.copy()
    else:
        state0 = _load_state(args.start, solid)
    record_every = max(1, int(round(args.record_dt / config.step_size)))
    trajectory = integrate(state0, graph, ASSUMPTION2_GAIN, config, record_every)
    csv_path = out_dir / f"trajectory{tag}.csv"
    with csv_path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        header = ["t"]
        for i in range(solid.n_vertices):
            header += [f"g{i + 1}x", f"g{i + 1}y", f"g{i + 1}z"]
        writer.writerow(header)
        for t, state in zip(trajectory.times, trajectory.states):
            writer.writerow([f"{t:.6f}"] + [f"{x:.12e}" for x in state.ravel()])
    outcome = _classify_outcome(trajectory, solid, args.start)
    outcome["seed"] = seed
    outcome["max_norm_drift"] = trajectory.max_norm_drift
    return outcome


def cmd_simulate(args: argparse.Namespace) -> int:
    solid = _parse_solid(args.solid)
    graph = _load_graph(args.graph, solid)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        seeds = [args.seed + k for k in range(args.ensemble)]
        outcomes = []
        for k, seed in enumerate(seeds):
            tag = "" if args.ensemble == 1 else f"_{seed}"
            outcomes.append(_run_one_simulation(args, solid, graph, seed, out_dir, tag))
        config = SimulationConfig(
            step_size=args.step, t_final=args.t_final,
            integrator=args.integrator, renormalize_every=1, seed=args.seed,
        )
        payload = {"outcomes": outcomes} if args.ensemble > 1 else outcomes[0]
        _write_json(out_dir / "outcome.json", payload)
        _write_json(out_dir / "manifest.json", _manifest(args, solid, config))
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    solid = _parse_solid(args.solid)
    graph = _load_graph(args.graph, solid)
    report = algorithm1(solid, graph)
    payload = report.to_json_dict()
    payload["exponential_stability"] = exponential_stability_lift(report)
    print(json.dumps(payload, indent=2))
    if args.out is not None:
        try:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            _write_json(out_dir / "report.json", payload)
            _write_json(out_dir / "manifest.json", _manifest(args, solid, None))
        except OSError as exc:
            print(f"I/O failure: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK if report.verdict == "exponentially_stable" else EXIT_NOT_STABLE


def cmd_enumerate_graphs(args: argparse.Namespace) -> int:
    solid = _parse_solid(args.solid)
    graphs = enumerate_symmetric_graphs(solid)
    payload = {
        "solid": [solid.p, solid.q],
        "count": len(graphs),
        "graphs": [g.to_json_dict() for g in graphs],
    }
    print(json.dumps(payload, indent=2))
    if args.out is not None:
        try:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            _write_json(out_dir / "graphs.json", payload)
        except OSError as exc:
            print(f"I/O failure: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    solid = _parse_solid(args.solid)
    states = _load_state(args.state, solid)
    member, residual = formation_membership(states, solid, tol=args.tol)
    payload = {
        "solid": [solid.p, solid.q],
        "member": member,
        "max_residual": residual if np.isfinite(residual) else None,
        "equilibrium_xi": [float(x) for x in equilibrium_xi(solid)],
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphereform",
        description="Formation control of pointing directions on the sphere.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate the closed loop")
    sim.add_argument("--solid", required=True, help="Schlafli symbol p,q")
    sim.add_argument("--graph", default=None, help="interaction graph JSON file")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--t-final", type=float, default=50.0, dest="t_final")
    sim.add_argument("--step", type=float, default=1e-3)
    sim.add_argument("--integrator", choices=("rk4", "euler"), default="rk4")
    sim.add_argument(
        "--start", default="random",
        help="'random', 'canonical', or a JSON state file",
    )
    sim.add_argument("--ensemble", type=int, default=1)
    sim.add_argument("--record-dt", type=float, default=0.1, dest="record_dt")
    sim.add_argument("--out", default="out")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="run the formation stability test")
    ana.add_argument("--solid", required=True, help="Schlafli symbol p,q")
    ana.add_argument("--graph", default=None, help="interaction graph JSON file")
    ana.add_argument("--out", default=None)
    ana.set_defaults(func=cmd_analyze)

    enu = sub.add_parser(
        "enumerate-graphs", help="list symmetry-compatible interaction graphs"
    )
    enu.add_argument("--solid", required=True, help="Schlafli symbol p,q")
    enu.add_argument("--out", default=None)
    enu.set_defaults(func=cmd_enumerate_graphs)

    ver = sub.add_parser("verify", help="formation-manifold membership test")
    ver.add_argument("--solid", required=True, help="Schlafli symbol p,q")
    ver.add_argument("--state", required=True, help="JSON file of unit triples")
    ver.add_argument("--tol", type=float, default=1e-6)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, matching our contract.
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
