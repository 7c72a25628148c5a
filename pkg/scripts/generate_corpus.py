#!/usr/bin/env python3
"""
Seeded corpus writer for tempoflow.

Writes one canonical network file per instance plus a manifest.json with
the seed and horizon of each, so a corpus can be checked into a test
fixture directory or replayed with `tempoflow verify FILE -T HORIZON`.

Usage:
    python scripts/generate_corpus.py --seed 7 --count 500 --out corpus/
    python scripts/generate_corpus.py --seed 5 --count 100 --lengths 1 2 --max-nodes 4 --max-horizon 30
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from dotenv import load_dotenv

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tempoflow.config import configure_logging  # noqa: E402
from tempoflow.network import dump_network  # noqa: E402
from tempoflow.oracle import random_corpus  # noqa: E402

# Load environment variables
load_dotenv()

logger = logging.getLogger("tempoflow.corpus")


def write_corpus(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    corpus = random_corpus(
        seed=args.seed,
        count=args.count,
        nodes=(2, args.max_nodes),
        max_edges=args.max_edges,
        horizons=(1, args.max_horizon),
        pieces=(1, args.max_pieces),
        max_capacity=args.max_capacity,
        lengths=tuple(args.lengths) if args.lengths else None,
    )

    manifest = []
    for instance in corpus:
        name = f"instance_{instance.index:04d}.json"
        (out / name).write_text(dump_network(instance.network) + "\n", encoding="utf-8")
        manifest.append({"file": name, "seed": instance.seed, "horizon": instance.horizon})

    (out / "manifest.json").write_text(
        json.dumps({"seed": args.seed, "count": args.count, "instances": manifest}, indent=2) + "\n",
        encoding="utf-8",
    )
    logger.info(f"[CORPUS] Wrote {len(manifest)} instances to {out}")
    print(f"{len(manifest)} instances written to {out}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        description="Write a seeded corpus of random temporal networks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # The default equivalence corpus
  python scripts/generate_corpus.py --seed 7 --count 500 --out corpus/

  # Two edge lengths, small instances
  python scripts/generate_corpus.py --seed 5 --count 100 --lengths 1 2 --max-nodes 4 --max-horizon 30
        """,
    )
    parser.add_argument("--seed", type=int, default=0, help="Corpus seed (default: 0)")
    parser.add_argument("--count", type=int, default=500, help="Number of instances (default: 500)")
    parser.add_argument("--out", default="corpus", help="Output directory (default: corpus)")
    parser.add_argument("--max-nodes", type=int, default=6, help="Largest node count (default: 6)")
    parser.add_argument("--max-edges", type=int, default=10, help="Largest edge count (default: 10)")
    parser.add_argument("--max-horizon", type=int, default=40, help="Largest horizon (default: 40)")
    parser.add_argument("--max-pieces", type=int, default=4, help="Most pieces per edge (default: 4)")
    parser.add_argument("--max-capacity", type=int, default=8, help="Largest capacity value (default: 8)")
    parser.add_argument("--lengths", type=int, nargs="+", help="Draw per-edge lengths from these values")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log progress to stderr")
    args = parser.parse_args(argv)

    if args.verbose:
        logging.basicConfig(level=logging.INFO)
    else:
        configure_logging()
    return write_corpus(args)


if __name__ == "__main__":
    sys.exit(main())
