import argparse
import logging
import os
import sys
from pathlib import Path

log_file = os.path.join(os.path.dirname(os.path.abspath(__file__)), "debug.log")

from src.core.config import LOG_MESSAGE_MAX_CHARS


class TruncateLongMessagesFilter(logging.Filter):
    def filter(self, record):
        if isinstance(record.msg, str):
            msg = record.getMessage()
            if len(msg) > LOG_MESSAGE_MAX_CHARS:
                msg = msg[:LOG_MESSAGE_MAX_CHARS] + f"... [{len(msg) - LOG_MESSAGE_MAX_CHARS} chars truncated]"
            record.msg = msg
            record.args = ()
        return True


file_handler = logging.FileHandler(log_file, encoding="utf-8")
file_handler.setLevel(logging.WARNING)

stream_handler = logging.StreamHandler(sys.stderr)
stream_handler.setLevel(logging.INFO)

truncate_filter = TruncateLongMessagesFilter()
file_handler.addFilter(truncate_filter)
stream_handler.addFilter(truncate_filter)

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[file_handler, stream_handler]
)
logger = logging.getLogger(__name__)

from src.core.config import AppConfig
from src.core.settings import SettingsManager
from src.core.system import EngineError, EventBus
from src.grammar.parser import to_tree
from src.harness.dataset import load_dataset
from src.harness.evaluate import Evaluator
from src.harness.report import REPORT_FORMATS, emit_report
from src.logic.terms import conj
from src.pipeline.analyze import StageError
from src.pipeline.decide import Pipeline, Problem


EXIT_STATUS_HELP = """exit status:
  0  success (for prove, any of yes, no or unknown)
  1  a sentence failed at a pipeline stage (parse, semantics, prove, tptp)
  2  bad settings, unknown problem id or unreadable files
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=AppConfig.PROGRAM_NAME,
        description="Natural language inference for Japanese comparatives",
        epilog=EXIT_STATUS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {AppConfig.VERSION}")
    parser.add_argument("--config", type=Path, help="key=value settings file")
    parser.add_argument("--lexicon", type=Path, default=AppConfig.DEFAULT_LEXICON)
    parser.add_argument("--adjectives", type=Path, default=AppConfig.DEFAULT_ADJECTIVES)
    parser.add_argument("--debug", action="store_true", help="log at DEBUG level on the console")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="print the top derivation of a sentence")
    p.add_argument("sentence")
    p.add_argument("--dump-tree", action="store_true", help="draw the derivation as a tree")
    p.add_argument("-k", type=int, default=1, help="number of derivations")

    p = sub.add_parser("semantics", help="print the meaning of a sentence")
    p.add_argument("sentence")
    p.add_argument("--dump-semantics", action="store_true", help="print both dimensions separately")

    for name, help_text in (("prove", "decide a single problem"), ("tptp", "export a problem as TPTP")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--premise", "-p", action="append", dest="premises", default=[])
        p.add_argument("--hypothesis", "-H")
        p.add_argument("--problem", help="id of a problem in the dataset")
        p.add_argument("--dataset", type=Path, default=AppConfig.DEFAULT_DATASET)
        p.add_argument("--tptp-out", type=Path)
    prove = sub.choices["prove"]
    prove.add_argument("--dump-semantics", action="store_true")
    prove.add_argument("--oracle-check", action="store_true")
    prove.add_argument("--external-prover", help="command template for an external TPTP prover ({path} is the file)")
    prove.add_argument("--trace", action="store_true", help="print the proof of the deciding direction")

    p = sub.add_parser("eval", help="evaluate a dataset")
    p.add_argument("--dataset", type=Path, default=AppConfig.DEFAULT_DATASET)
    p.add_argument("--out", type=Path, help="report directory (default: output_dir setting)")
    p.add_argument("--format", choices=REPORT_FORMATS, default="both")
    p.add_argument("--no-timings", action="store_true", help="omit timings for reproducible reports")
    p.add_argument("--tptp-out", type=Path)
    p.add_argument("--oracle-check", action="store_true")
    p.add_argument("--external-prover")
    return parser


def _problem_from_args(args) -> Problem:
    if args.problem:
        return load_dataset(args.dataset).get(args.problem)
    if not args.premises or not args.hypothesis:
        raise SystemExit("either --problem or at least one --premise and a --hypothesis are required")
    return Problem("cli", tuple(args.premises), args.hypothesis, "unknown")


def cmd_parse(pipeline: Pipeline, args) -> int:
    pipeline.analyzer.config.parse_fallback = max(args.k - 1, 0)
    for rank, derivation in enumerate(pipeline.analyzer.derivations(args.sentence), start=1):
        print(f"[{rank}] {derivation.bracket()}")
        if args.dump_tree:
            to_tree(derivation).pretty_print()
    return 0


def cmd_semantics(pipeline: Pipeline, args) -> int:
    sem = pipeline.analyze(args.sentence)
    if args.dump_semantics:
        at_issue, presupposition = sem.formulas()
        print(f"at-issue:       {at_issue}")
        print(f"presupposition: {presupposition}")
    print(conj(*sem.formulas()))
    return 0


def cmd_prove(pipeline: Pipeline, args) -> int:
    problem = _problem_from_args(args)
    verdict = pipeline.decide(problem)
    if verdict.error:
        print(f"{problem.id}: error at stage {verdict.error_stage}: {verdict.error.cause}", file=sys.stderr)
        return 1
    if args.dump_semantics:
        for analysis in verdict.analyses:
            print(f"{analysis.sentence}\n    {analysis.semantics}")
        for axiom in verdict.task.axioms.axioms:
            print(f"    axiom {axiom}")
    print(f"{problem.id}: {verdict.label}" + (f" (proved {verdict.evidence})" if verdict.evidence else ""))
    if args.trace and verdict.evidence in ("hypothesis", "negation"):
        print(verdict.directions[verdict.evidence].proof.trace())
    if args.oracle_check:
        for direction, agreed in pipeline.oracle_check(verdict).items():
            print(f"oracle {direction}: " + {True: "agrees", False: "COUNTERMODEL", None: "out of bounds"}[agreed])
    if args.tptp_out:
        for path in pipeline.export_tptp(problem, args.tptp_out):
            print(f"wrote {path}")
    return 0


def cmd_tptp(pipeline: Pipeline, args) -> int:
    problem = _problem_from_args(args)
    if args.tptp_out:
        for path in pipeline.export_tptp(problem, args.tptp_out):
            print(f"wrote {path}")
        return 0
    analyses = [pipeline.analyzer.analyze_full(s) for s in problem.premises + (problem.hypothesis,)]
    print(pipeline.tptp_text(problem.id, pipeline.build_task(analyses), "hypothesis"), end="")
    return 0


def cmd_eval(pipeline: Pipeline, args) -> int:
    dataset = load_dataset(args.dataset)
    event_bus = EventBus()
    done = []

    def on_decided(result) -> None:
        done.append(result)
        logger.info("[%d/%d] %s: %s (gold %s)", len(done), len(dataset), result.problem_id, result.predicted, result.gold)

    event_bus.subscribe("problem_decided", on_decided)
    evaluator = Evaluator(pipeline, event_bus, oracle_check=args.oracle_check, tptp_out=args.tptp_out)
    evaluation = evaluator.evaluate(dataset)
    out_dir = args.out or Path(pipeline.config.output_dir)
    emit_report(dataset.name, evaluation.metrics, evaluation.results, out_dir, args.format, not args.no_timings)
    metrics = evaluation.metrics
    print(f"accuracy {metrics.accuracy:.3f} ({metrics.correct}/{metrics.total}), "
          f"excluding expected failures {metrics.accuracy_excluding_expected:.3f}")
    return 0


COMMANDS = {"parse": cmd_parse, "semantics": cmd_semantics, "prove": cmd_prove, "tptp": cmd_tptp, "eval": cmd_eval}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.debug:
        stream_handler.setLevel(logging.DEBUG)
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        settings = SettingsManager(args.config, strict=args.config is not None)
        if getattr(args, "external_prover", None):
            settings.set("prover_backend", "external")
            settings.set("external_prover_command", args.external_prover)
        pipeline = Pipeline.from_files(settings.engine_config(), args.lexicon, args.adjectives)
        return COMMANDS[args.command](pipeline, args)
    except StageError as e:
        print(f"error at stage {e.stage}: {e.cause}", file=sys.stderr)
        return 1
    except (EngineError, OSError, KeyError) as e:
        logger.error("%s failed: %s", args.command, e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
