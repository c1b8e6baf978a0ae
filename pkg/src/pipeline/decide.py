import logging
from concurrent.futures import Future
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from src.axioms.registry import AdjectiveRegistry
from src.axioms.schemata import AxiomSet, instantiate_axioms
from src.core.config import AppConfig, EngineConfig
from src.core.system import global_executor
from src.core.utils import PerfTracker, atomic_write_text
from src.grammar.lexicon import Lexicon
from src.logic.terms import TRUE, Formula, conj, neg
from src.pipeline.analyze import Analysis, SentenceAnalyzer, StageError, stage
from src.prover.clauses import Clause, SkolemNamer, clausify
from src.prover.external import ExternalProver
from src.prover.model_check import TooLarge, model_check
from src.prover.saturation import Budget, ProofResult, Saturator
from src.prover.tptp import tptp_problem

logger = logging.getLogger(__name__)

Direction = Literal["hypothesis", "negation"]
DIRECTIONS: tuple[Direction, ...] = ("hypothesis", "negation")


@dataclass(frozen=True)
class Problem:
    id: str
    premises: tuple[str, ...]
    hypothesis: str
    gold: str
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def expected_failure(self) -> str | None:
        return self.metadata.get("expected_failure")


@dataclass(frozen=True)
class ProofTask:
    """Everything one problem sends to a prover: premises, axioms and the two goals."""

    premises: tuple[Formula, ...]
    axioms: AxiomSet
    goals: dict[str, Formula]


@dataclass
class DirectionResult:
    direction: str
    proved: bool
    status: str
    proof: ProofResult | None = None
    seconds: float = 0.0


@dataclass
class Verdict:
    problem_id: str
    label: str
    evidence: str | None = None
    error: StageError | None = None
    analyses: list[Analysis] = field(default_factory=list)
    task: ProofTask | None = None
    directions: dict[str, DirectionResult] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def error_stage(self) -> str | None:
        return self.error.stage if self.error else None

    @property
    def error_reason(self) -> str | None:
        return self.error.reason if self.error else None

    @property
    def seconds(self) -> float:
        return sum(self.timings.values())


class Pipeline:
    """Decides problems: analyze every sentence, instantiate axioms, prove both directions."""

    def __init__(self, lexicon: Lexicon, registry: AdjectiveRegistry, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.lexicon = lexicon
        self.registry = registry
        self.analyzer = SentenceAnalyzer(lexicon, registry, self.config)
        self.budget = Budget(
            self.config.prover_time_limit, self.config.prover_max_clauses, self.config.prover_max_literals
        )

    @classmethod
    def from_files(cls, config: EngineConfig | None = None, lexicon_path: Path | None = None,
                   adjectives_path: Path | None = None) -> "Pipeline":
        lexicon = Lexicon.load(lexicon_path or AppConfig.DEFAULT_LEXICON)
        registry = AdjectiveRegistry.load(adjectives_path or AppConfig.DEFAULT_ADJECTIVES)
        return cls(lexicon, registry, config)

    def analyze(self, sentence: str):
        return self.analyzer.analyze(sentence)

    def build_task(self, analyses: list[Analysis]) -> ProofTask:
        *premise_analyses, hypothesis = analyses
        premises = [conj(*a.semantics.formulas()) for a in premise_analyses]
        at_issue, presupposition = hypothesis.semantics.formulas()
        if self.config.hypothesis_presupposition == "premise":
            if presupposition != TRUE:
                premises.append(presupposition)
            goals = {"hypothesis": at_issue, "negation": neg(at_issue)}
        else:
            whole = conj(at_issue, presupposition)
            goals = {"hypothesis": whole, "negation": neg(whole)}
        with stage("axioms"):
            lemmas = self.registry.collect_adjectives(premises + [at_issue, presupposition])
            axioms = instantiate_axioms(lemmas, self.registry)
        return ProofTask(tuple(premises), axioms, goals)

    def decide(self, problem: Problem) -> Verdict:
        perf = PerfTracker(problem.id)
        verdict = Verdict(problem.id, AppConfig.ERROR_LABEL)
        try:
            for sentence in problem.premises + (problem.hypothesis,):
                verdict.analyses.append(self.analyzer.analyze_full(sentence))
            verdict.timings["analyze"] = perf.step("analyze")
            verdict.task = self.build_task(verdict.analyses)
            verdict.timings["axioms"] = perf.step("axioms")
            verdict.directions = self._prove_both(problem.id, verdict.task)
            verdict.timings["prove"] = perf.step("prove")
        except StageError as e:
            logger.warning("Problem %s failed at stage %s: %s", problem.id, e.stage, e.cause)
            verdict.error = e
            return verdict
        verdict.label, verdict.evidence = self._label(problem.id, verdict.directions)
        logger.debug("Problem %s decided %s (%.3fs)", problem.id, verdict.label, perf.total)
        return verdict

    def _label(self, problem_id: str, directions: dict[str, DirectionResult]) -> tuple[str, str | None]:
        yes = directions["hypothesis"].proved
        no = directions["negation"].proved
        if yes and no:
            logger.error("Problem %s: both the hypothesis and its negation were proved", problem_id)
            return "unknown", "both"
        if yes:
            return "yes", "hypothesis"
        if no:
            return "no", "negation"
        return "unknown", None

    def _prove_both(self, problem_id: str, task: ProofTask) -> dict[str, DirectionResult]:
        if not self.config.parallel_directions:
            return {d: self.prove_direction(problem_id, task, d) for d in DIRECTIONS}
        futures: dict[str, Future] = {
            d: global_executor.submit(self.prove_direction, problem_id, task, d) for d in DIRECTIONS
        }
        return {d: future.result() for d, future in futures.items()}

    def clauses(self, task: ProofTask, direction: str) -> tuple[list[Clause], list[bool]]:
        """Clauses of premises, axioms and the negated goal, with their set-of-support flags."""
        namer = SkolemNamer()
        clauses: list[Clause] = []
        support: list[bool] = []
        with stage("prove"):
            for premise in task.premises:
                new = clausify(premise, namer)
                clauses += new
                support += [True] * len(new)
            for axiom in task.axioms.formulas():
                new = clausify(axiom, namer)
                clauses += new
                support += [False] * len(new)
            new = clausify(neg(task.goals[direction]), namer)
            clauses += new
            support += [True] * len(new)
        return clauses, support

    def prove_direction(self, problem_id: str, task: ProofTask, direction: str) -> DirectionResult:
        if self.config.prover_backend == "external":
            return self._prove_external(problem_id, task, direction)
        clauses, support = self.clauses(task, direction)
        result = Saturator(self.budget).saturate(clauses, support)
        logger.debug("%s/%s: %s after %d clauses", problem_id, direction, result.status, result.generated)
        return DirectionResult(direction, result.proved, result.status, result, result.seconds)

    def tptp_text(self, problem_id: str, task: ProofTask, direction: str) -> str:
        return tptp_problem(f"{problem_id}_{direction}", task.premises, task.axioms.formulas(), task.goals[direction])

    def _prove_external(self, problem_id: str, task: ProofTask, direction: str) -> DirectionResult:
        with stage("prove"):
            prover = ExternalProver(
                self.config.external_prover_command,
                self.config.external_prover_success,
                self.config.external_prover_timeout,
            )
            path = Path(self.config.output_dir) / "tptp" / f"{problem_id}_{direction}.p"
            outcome = prover.prove_text(self.tptp_text(problem_id, task, direction), path)
        status = "proved" if outcome.proved else "timeout" if outcome.timed_out else "saturated"
        return DirectionResult(direction, outcome.proved, status)

    def export_tptp(self, problem: Problem, out_dir: Path) -> list[Path]:
        """Writes one TPTP file per proof direction; raises StageError when analysis fails."""
        analyses = [self.analyzer.analyze_full(s) for s in problem.premises + (problem.hypothesis,)]
        task = self.build_task(analyses)
        written = []
        for direction in DIRECTIONS:
            path = out_dir / f"{problem.id}_{direction}.p"
            atomic_write_text(path, self.tptp_text(problem.id, task, direction))
            written.append(path)
        return written

    def oracle_check(self, verdict: Verdict) -> dict[str, bool | None]:
        """For each proved direction: True when no small countermodel exists, None when out of bounds."""
        checks: dict[str, bool | None] = {}
        if verdict.task is None:
            return checks
        task = verdict.task
        for direction, result in verdict.directions.items():
            if not result.proved:
                continue
            refutation = conj(*task.premises, *task.axioms.formulas(), neg(task.goals[direction]))
            try:
                countermodel = model_check(refutation, self.config.oracle_entities, self.config.oracle_degrees)
            except TooLarge as e:
                logger.debug("Oracle skipped %s/%s: %s", verdict.problem_id, direction, e)
                checks[direction] = None
                continue
            if countermodel:
                logger.error("Oracle found a countermodel for proved %s/%s", verdict.problem_id, direction)
            checks[direction] = not countermodel
        return checks
