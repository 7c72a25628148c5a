#!/usr/bin/env python3
"""
Command-line front-end for tempoflow.

Usage:
    python -m tempoflow maxflow network.json --horizon 3 [--cut] [--oracle]
    python -m tempoflow cten network.json --horizon 3
    python -m tempoflow stats network.json --horizon 3
    python -m tempoflow normalize network.json --horizon 3
    python -m tempoflow verify --seed 7 --count 50 [--workers 4]
    python -m tempoflow gen --seed 1 --nodes 4 --edges 5 --pieces 3 --horizon 20

Exit codes: 0 success, 1 invalid input, 2 budget exceeded, 3 failed self-check.
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from dotenv import load_dotenv
from pydantic import ValidationError

from .config import configure_logging, get_settings
from .critical import breaktimes, critical_times
from .cuts import normalize_with_trace
from .errors import InvariantViolation, NetworkFormatError, TempoflowError, UsageError
from .expand import build_ten, cten_size_report
from .maxflow import extract_cut_function, max_flow, min_cut, solve_cten
from .network import TemporalNetwork, capacity_to_json, dump_network, load_network
from .oracle import CheckResult, gen_random_network, random_corpus, run_checks

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("maxflow", "cten", "verify", "normalize", "gen", "stats")


@dataclass
class RunConfig:
    """One CLI invocation."""

    subcommand: str
    input: Optional[str] = None
    horizon: Optional[int] = None
    cut: bool = False
    oracle: bool = False
    seed: Optional[int] = None
    count: int = 50
    budget: Optional[int] = None
    json_output: bool = False
    workers: Optional[int] = None
    nodes: int = 4
    edges: int = 5
    pieces: int = 2
    max_capacity: int = 8
    tau: int = 1


@dataclass
class RunOutcome:
    """Exit code plus what goes to stdout and stderr."""

    exit_code: int
    stdout: List[str] = field(default_factory=list)
    stderr: List[str] = field(default_factory=list)


def _emit(config: RunConfig, payload: dict, text: List[str]) -> List[str]:
    return [json.dumps(payload)] if config.json_output else text


def _require_input(config: RunConfig) -> Tuple[TemporalNetwork, int]:
    if not config.input:
        raise NetworkFormatError(f"{config.subcommand} needs a network file", field="input")
    if config.horizon is None:
        raise NetworkFormatError(f"{config.subcommand} needs --horizon", field="horizon")
    if config.horizon < 0:
        raise NetworkFormatError(f"horizon must be non-negative, got {config.horizon}", field="horizon")
    return load_network(config.input), config.horizon


def _run_maxflow(config: RunConfig) -> RunOutcome:
    network, horizon = _require_input(config)
    solution = solve_cten(network, horizon, with_cut=config.cut)
    payload = {"value": capacity_to_json(solution.value)}
    text = [str(capacity_to_json(solution.value))]

    if config.cut:
        cut = solution.cut_function.to_dict() if solution.cut_function else None
        payload["cut"] = cut
        text.append(json.dumps(cut))

    if config.oracle:
        ten_value = max_flow(build_ten(network, horizon, node_budget=config.budget)).value
        payload["ten_value"] = capacity_to_json(ten_value)
        text.append(f"ten {capacity_to_json(ten_value)}")
        if ten_value != solution.value:
            raise InvariantViolation(
                f"cTEN value {capacity_to_json(solution.value)} != TEN value {capacity_to_json(ten_value)}"
            )

    return RunOutcome(0, _emit(config, payload, text))


def _run_cten(config: RunConfig) -> RunOutcome:
    network, horizon = _require_input(config)
    solution = solve_cten(network, horizon)
    report = cten_size_report(solution.net, network, solution.times)
    payload = {
        "times": list(solution.times),
        "network": solution.net.to_dict(),
        "size_report": report.to_dict(),
    }
    return RunOutcome(0, [json.dumps(payload)])


def _run_stats(config: RunConfig) -> RunOutcome:
    network, horizon = _require_input(config)
    crit = critical_times(network, horizon)
    solution = solve_cten(network, horizon, times=crit)
    stats = {
        "n": network.n,
        "m": network.m,
        "mu": network.mu,
        "max_capacity": network.max_capacity,
        "tau": network.tau,
        "lengths": sorted(network.lengths),
        "horizon": horizon,
        "breaktimes": len(breaktimes(network, horizon)),
        "critical_times": len(crit),
        "cten_nodes": len(solution.net.nodes),
        "cten_arcs": len(solution.net.arcs),
        "repaired": network.repaired,
    }
    return RunOutcome(0, _emit(config, stats, [f"{key}: {value}" for key, value in stats.items()]))


def _run_normalize(config: RunConfig) -> RunOutcome:
    network, horizon = _require_input(config)
    ten = build_ten(network, horizon, node_budget=config.budget)
    phi = extract_cut_function(min_cut(ten, max_flow(ten)), ten)
    trace = normalize_with_trace(network, horizon, phi)
    return RunOutcome(0, _emit(config, trace.to_dict(), [json.dumps(trace.cut.to_dict())]))


def _run_gen(config: RunConfig) -> RunOutcome:
    network = gen_random_network(
        seed=config.seed if config.seed is not None else 0,
        n=config.nodes,
        m=config.edges,
        mu_per_edge=config.pieces,
        max_capacity=config.max_capacity,
        tau=config.tau,
        horizon=config.horizon if config.horizon is not None else 10,
    )
    return RunOutcome(0, [dump_network(network)])


def _verify_instance(job: Tuple[int, TemporalNetwork, int, Optional[int]]) -> Tuple[int, int, List[CheckResult]]:
    index, network, horizon, budget = job
    return index, horizon, run_checks(network, horizon, budget=budget)


def _run_verify(config: RunConfig) -> RunOutcome:
    if config.input:
        network, horizon = _require_input(config)
        jobs = [(0, network, horizon, config.budget)]
    else:
        seed = config.seed if config.seed is not None else 0
        jobs = [(c.index, c.network, c.horizon, config.budget) for c in random_corpus(seed, config.count)]

    workers = config.workers or get_settings().verify_workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_verify_instance, jobs))
    else:
        outcomes = [_verify_instance(job) for job in jobs]

    lines = []
    instances = []
    failures = 0
    for index, horizon, results in outcomes:
        for r in results:
            failures += not r.passed
            lines.append(f"{index}\t{r.name}\t{'PASS' if r.passed else 'FAIL'}\t{r.detail}")
        instances.append({"index": index, "horizon": horizon, "checks": [r.to_dict() for r in results]})

    logger.info(f"[CLI] verify: {len(jobs)} instances, {failures} failed checks")
    payload = {"passed": failures == 0, "instances": instances}
    return RunOutcome(0 if failures == 0 else 3, _emit(config, payload, lines))


HANDLERS = {
    "maxflow": _run_maxflow,
    "cten": _run_cten,
    "verify": _run_verify,
    "normalize": _run_normalize,
    "gen": _run_gen,
    "stats": _run_stats,
}


def _error_outcome(error: TempoflowError, json_output: bool) -> RunOutcome:
    if json_output:
        return RunOutcome(error.exit_code, [json.dumps({"error": error.to_dict()})])
    where = f" ({error.field})" if error.field else ""
    return RunOutcome(error.exit_code, stderr=[f"error: {error.code}{where}: {error.message}"])


def _settings_error_outcome(error: ValidationError, json_output: bool) -> RunOutcome:
    detail = error.errors()[0]
    where = ".".join(str(part) for part in detail["loc"])
    report = {"code": "invalid_settings", "message": detail["msg"], "field": where}
    if json_output:
        return RunOutcome(1, [json.dumps({"error": report})])
    return RunOutcome(1, stderr=[f"error: invalid_settings ({where}): {detail['msg']}"])


def run(config: RunConfig) -> RunOutcome:
    """Run one subcommand, mapping errors to exit codes."""
    try:
        return HANDLERS[config.subcommand](config)
    except TempoflowError as e:
        logger.debug(f"[CLI] {config.subcommand} failed: {e.code}")
        return _error_outcome(e, config.json_output)
    except ValidationError as e:
        return _settings_error_outcome(e, config.json_output)


class TempoflowArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of printing usage and exiting 2."""

    def error(self, message: str):
        raise UsageError(message, field="argv")


def build_parser() -> argparse.ArgumentParser:
    parser = TempoflowArgumentParser(
        prog="tempoflow",
        description="Maximum flow over time on temporal networks via condensed time-expanded networks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Max flow by T=3, with the min cut function
  python -m tempoflow maxflow network.json --horizon 3 --cut

  # Cross-check against the full time-expanded network
  python -m tempoflow maxflow network.json --horizon 3 --oracle

  # Run the verification suite on 50 seeded instances in 4 processes
  python -m tempoflow verify --seed 7 --count 50 --workers 4
        """,
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS, help="What to run")
    parser.add_argument("input", nargs="?", help="Network file (canonical JSON)")
    parser.add_argument("--horizon", "-T", type=int, help="Horizon T (required except for gen/corpus verify)")
    parser.add_argument("--cut", action="store_true", help="maxflow: also print the min cut function")
    parser.add_argument("--oracle", action="store_true", help="maxflow: also solve the full TEN and compare")
    parser.add_argument("--seed", type=int, help="Random seed for gen and corpus verify")
    parser.add_argument("--count", type=int, default=50, help="Corpus size for verify (default: 50)")
    parser.add_argument("--budget", type=int, help="TEN node budget (default: TEMPOFLOW_BUDGET)")
    parser.add_argument("--json", action="store_true", help="Machine-readable JSON output, errors included")
    parser.add_argument("--workers", type=int, help="verify: worker processes (default: TEMPOFLOW_VERIFY_WORKERS)")
    parser.add_argument("--nodes", type=int, default=4, help="gen: node count (default: 4)")
    parser.add_argument("--edges", type=int, default=5, help="gen: edge count (default: 5)")
    parser.add_argument("--pieces", type=int, default=2, help="gen: pieces per edge (default: 2)")
    parser.add_argument("--max-capacity", type=int, default=8, help="gen: largest capacity U (default: 8)")
    parser.add_argument("--tau", type=int, default=1, help="gen: edge length (default: 1)")
    return parser


def _print(outcome: RunOutcome) -> int:
    for line in outcome.stdout:
        print(line)
    for line in outcome.stderr:
        print(line, file=sys.stderr)
    return outcome.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    argv = list(sys.argv[1:] if argv is None else argv)
    # parse errors happen before args.json exists
    json_output = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        configure_logging(json_output=args.json)
    except TempoflowError as e:
        return _print(_error_outcome(e, json_output))
    except ValidationError as e:
        logging.basicConfig(level=logging.WARNING)
        return _print(_settings_error_outcome(e, json_output))

    config = RunConfig(
        subcommand=args.subcommand,
        input=args.input,
        horizon=args.horizon,
        cut=args.cut,
        oracle=args.oracle,
        seed=args.seed,
        count=args.count,
        budget=args.budget,
        json_output=args.json,
        workers=args.workers,
        nodes=args.nodes,
        edges=args.edges,
        pieces=args.pieces,
        max_capacity=args.max_capacity,
        tau=args.tau,
    )
    return _print(run(config))


if __name__ == "__main__":
    sys.exit(main())
