"""Batch command line: compile, infer, encode, score, suggest and serve.

Output is deterministic: pupils sorted by id, tasks by id, skills row-major.
Human tables show two decimals; ``--format json`` carries full precision.
Exit codes: 0 success, 1 validation or parse errors, 2 impossible evidence.
The RUBRIC_BN_LOG environment variable ({error,info,debug}) controls log
verbosity on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import IO

from .compiler import EvidenceSet, NoisyOrNetwork, PupilRecord, compile_network, encode
from .errors import ImpossibleEvidenceError, ParseError, RubricBnError
from .inference import infer, rank_tasks
from .io import RubricDocument, load_dataset, load_params, load_rubric, network_to_dict
from .oracle import oracle_check
from .scoring import avg_cat_score, pearson, probabilistic_score

log = logging.getLogger("rubric_bn")

ORACLE_CHECK_TOLERANCE = 1e-9


class _UsageError(RubricBnError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise _UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rubric-bn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_model(p):
        p.add_argument("--rubric", required=True, help="rubric document (JSON)")
        p.add_argument("--params", required=True, help="parameter document (JSON)")
        return p

    p = with_model(sub.add_parser("compile", help="compile a network and summarise it"))
    p.add_argument("--out", help="write the serialized network here instead of stdout")

    p = with_model(sub.add_parser("infer", help="posterior report per pupil"))
    p.add_argument("--dataset", required=True, help="pupil dataset (CSV)")
    p.add_argument("--pupil", help="restrict to one pupil id")
    p.add_argument("--format", choices=["table", "json"], default="table")

    p = with_model(sub.add_parser("score", help="deterministic and probabilistic scores"))
    p.add_argument("--dataset", required=True, help="pupil dataset (CSV)")

    p = with_model(sub.add_parser("suggest", help="rank unobserved tasks by information gain"))
    p.add_argument("--evidence", required=True, help="single-pupil dataset (CSV) of observations so far")

    p = with_model(sub.add_parser("serve", help="start the live assessment HTTP service"))
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--session-dir", default="./rubric-bn-sessions", help="event-log directory")
    p.add_argument("--console-dir", help="built console assets to serve at /console")

    p = sub.add_parser("oracle-check", help="randomized engine-vs-oracle equivalence")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=200)

    return parser


def _load_model(args) -> tuple[RubricDocument, NoisyOrNetwork]:
    doc = load_rubric(args.rubric)
    params = load_params(args.params)
    network = compile_network(doc.rubric, list(doc.tasks), params)
    log.info("compiled %s: %d skills, %d answers", network.provenance, len(network.skills), len(network.answers))
    return doc, network


def _select_records(args, doc: RubricDocument) -> list[PupilRecord]:
    records = sorted(load_dataset(args.dataset, doc), key=lambda r: r.pupil_id)
    if getattr(args, "pupil", None):
        records = [r for r in records if r.pupil_id == args.pupil]
        if not records:
            raise ParseError(f"no records for pupil {args.pupil!r}")
    return records


def _cmd_compile(args, out: IO[str], err: IO[str]) -> int:
    doc, network = _load_model(args)
    summary = (
        f"network {network.provenance}: {len(network.skills)} skills, "
        f"{len(network.answers)} answers, {network.arc_count} arcs"
    )
    payload = json.dumps(network_to_dict(network), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
        print(summary, file=out)
        print(f"wrote {args.out}", file=out)
    else:
        print(summary, file=err)
        out.write(payload)
    return 0


def _cmd_infer(args, out: IO[str], err: IO[str]) -> int:
    doc, network = _load_model(args)
    records = _select_records(args, doc)
    reports = []
    for record in records:
        evidence = encode(doc.rubric, network, record)
        log.debug("pupil %s: %d observed answer nodes", record.pupil_id, len(evidence))
        reports.append((record.pupil_id, infer(network, evidence)))

    skill_ids = [s.id for s in network.skills]
    if args.format == "json":
        payload = {
            "model": network.provenance,
            "skills": skill_ids,
            "pupils": [
                {
                    "pupil": pupil,
                    "posteriors": {k: report.posteriors[k] for k in skill_ids},
                    "evidence_digest": report.evidence_digest,
                    "log_likelihood": report.log_likelihood,
                }
                for pupil, report in reports
            ],
        }
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        width = max(len(s) for s in skill_ids)
        width = max(width, 4)
        pupil_width = max([len("pupil")] + [len(p) for p, _ in reports])
        print(
            " ".join(["pupil".ljust(pupil_width)] + [s.rjust(width) for s in skill_ids]),
            file=out,
        )
        for pupil, report in reports:
            cells = [f"{report.posteriors[s]:.2f}".rjust(width) for s in skill_ids]
            print(" ".join([pupil.ljust(pupil_width)] + cells), file=out)
    return 0


def _cmd_score(args, out: IO[str], err: IO[str]) -> int:
    doc, network = _load_model(args)
    records = _select_records(args, doc)
    rows = []
    for record in records:
        evidence = encode(doc.rubric, network, record)
        prob = probabilistic_score(infer(network, evidence))
        try:
            avg = avg_cat_score(record)
        except RubricBnError:
            avg = None
        rows.append((record.pupil_id, avg, prob))

    pupil_width = max([len("pupil")] + [len(p) for p, _, _ in rows])
    print(f"{'pupil'.ljust(pupil_width)} {'avg_cat':>8} {'prob_score':>11}", file=out)
    for pupil, avg, prob in rows:
        avg_text = f"{avg:.2f}" if avg is not None else "-"
        print(f"{pupil.ljust(pupil_width)} {avg_text:>8} {prob:>11.2f}", file=out)

    paired = [(avg, prob) for _, avg, prob in rows if avg is not None]
    r = pearson([a for a, _ in paired], [p for _, p in paired])
    print(f"pearson_r {r:.4f}", file=out)
    return 0


def _cmd_suggest(args, out: IO[str], err: IO[str]) -> int:
    doc, network = _load_model(args)
    records = load_dataset(args.evidence, doc)
    if len(records) > 1:
        raise ParseError("evidence file must describe a single pupil")
    evidence = (
        encode(doc.rubric, network, records[0]) if records else EvidenceSet.empty()
    )
    print("task gain_bits", file=out)
    for task, gain in rank_tasks(network, evidence):
        print(f"{task} {gain:.6f}", file=out)
    return 0


def _cmd_serve(args, out: IO[str], err: IO[str]) -> int:
    import uvicorn

    from .service import create_app

    doc = load_rubric(args.rubric)
    params = load_params(args.params)
    app = create_app(session_dir=args.session_dir, console_dir=args.console_dir)
    model_id = app.state.registry.register(doc, params)
    print(f"model {model_id} ready; serving on http://{args.host}:{args.port}", file=out)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_oracle_check(args, out: IO[str], err: IO[str]) -> int:
    deviation = oracle_check(args.seed, args.cases)
    print(
        f"oracle-check cases={args.cases} seed={args.seed} max_deviation={deviation:.3e}",
        file=out,
    )
    if deviation >= ORACLE_CHECK_TOLERANCE:
        print(
            f"deviation exceeds tolerance {ORACLE_CHECK_TOLERANCE:.0e}", file=err
        )
        return 1
    return 0


_COMMANDS = {
    "compile": _cmd_compile,
    "infer": _cmd_infer,
    "score": _cmd_score,
    "suggest": _cmd_suggest,
    "serve": _cmd_serve,
    "oracle-check": _cmd_oracle_check,
}


def _configure_logging() -> None:
    level = os.environ.get("RUBRIC_BN_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), stream=sys.stderr)


def run(argv: list[str], out: IO[str] | None = None, err: IO[str] | None = None) -> int:
    """Run one invocation; returns the process exit code."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    _configure_logging()
    try:
        args = _build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, out, err)
    except ImpossibleEvidenceError as exc:
        print(f"error: {exc}", file=err)
        return 2
    except RubricBnError as exc:
        print(f"error: {exc}", file=err)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
