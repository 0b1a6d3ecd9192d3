"""Steady-state evolutionary loop over a pairwise competition ledger.

One child is born at a time; it replaces the least fit member and plays
every survivor, so the population size and the per-pair game count are
invariant. Fitness is relative: the fraction of ledger games won, with
ties credited 0.5 to each side. Every game hands out exactly one unit of
credit, which pins the population mean fitness at exactly 0.5.

Child production walks down the enabled layers: the symbiotic layer may
fission a seed or fuse two (selection then acts on the whole), the
sexual layer crosses similar parents, the variable-size layer flips,
grows or shrinks, and the uniform layer is a mutated copy. Rejections
at the symbiotic layer fall through to the sexual layer carrying the
already-selected seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import ExperimentConfig
from .engine import credit_for_first, run_games
from .genome import (
    SeedGenome,
    crossover,
    fission,
    fuse,
    grow,
    mutate_flip,
    random_seed,
    shrink,
    shuffle,
    similarity,
)

log = logging.getLogger(__name__)


class UnknownIndividual(KeyError):
    """The requested id is not a live member of the population."""


class Origin(Enum):
    RANDOM = "random"
    FLIP = "flip"
    GROW = "grow"
    SHRINK = "shrink"
    CROSSOVER = "crossover"
    FUSION = "fusion"
    FISSION = "fission"


class FusionClass(Enum):
    NO_PARTS_BENEFIT = "no_parts_benefit"
    ONE_PART_BENEFITS = "one_part_benefits"
    BOTH_PARTS_BENEFIT = "both_parts_benefit"


@dataclass(frozen=True)
class Individual:
    id: int
    genome: SeedGenome
    birth_generation: int
    origin: Origin


@dataclass(frozen=True)
class FusionEvent:
    """One evaluated fusion attempt, accepted into the population or not."""

    generation: int
    part_a_fitness: float
    part_b_fitness: float
    whole_fitness: float
    classification: FusionClass
    accepted: bool


def classify_fusion(whole: float, part_a: float, part_b: float) -> FusionClass:
    """A part benefits exactly when the whole is strictly fitter than it."""
    benefits = (whole > part_a) + (whole > part_b)
    if benefits == 2:
        return FusionClass.BOTH_PARTS_BENEFIT
    if benefits == 1:
        return FusionClass.ONE_PART_BENEFITS
    return FusionClass.NO_PARTS_BENEFIT


class CompetitionLedger:
    """Full record of game results between live members.

    Per unordered pair it keeps one credit (1, 0.5 or 0, from the lower
    id's perspective) per trial; per member it keeps running credit and
    game totals so fitness reads are O(1).
    """

    def __init__(self) -> None:
        self._pairs: dict[tuple[int, int], list[float]] = {}
        self._credit: dict[int, float] = {}
        self._games: dict[int, int] = {}

    def add_member(self, member_id: int) -> None:
        if member_id in self._credit:
            raise ValueError(f"id {member_id} already tracked")
        self._credit[member_id] = 0.0
        self._games[member_id] = 0

    def record(self, id_a: int, id_b: int, credit_a: float) -> None:
        key = (id_a, id_b) if id_a < id_b else (id_b, id_a)
        self._pairs.setdefault(key, []).append(credit_a if key[0] == id_a else 1.0 - credit_a)
        self._credit[id_a] += credit_a
        self._credit[id_b] += 1.0 - credit_a
        self._games[id_a] += 1
        self._games[id_b] += 1

    def remove_member(self, member_id: int) -> None:
        """Drop a member and every record mentioning it."""
        if member_id not in self._credit:
            raise UnknownIndividual(member_id)
        for other in list(self._games):
            if other == member_id:
                continue
            key = (member_id, other) if member_id < other else (other, member_id)
            results = self._pairs.pop(key, None)
            if results is None:
                continue
            for credit_lo in results:
                other_credit = credit_lo if other == key[0] else 1.0 - credit_lo
                self._credit[other] -= other_credit
                self._games[other] -= 1
        del self._credit[member_id]
        del self._games[member_id]

    def fitness(self, member_id: int) -> float:
        if member_id not in self._credit:
            raise UnknownIndividual(member_id)
        games = self._games[member_id]
        return self._credit[member_id] / games if games else 0.5

    def games_played(self, member_id: int) -> int:
        return self._games[member_id]

    def pair_results(self, id_a: int, id_b: int) -> list[float]:
        key = (id_a, id_b) if id_a < id_b else (id_b, id_a)
        return list(self._pairs.get(key, []))


@dataclass
class Population:
    """Constant-size population plus its ledger and event history."""

    config: ExperimentConfig
    members: list[Individual] = field(default_factory=list)
    ledger: CompetitionLedger = field(default_factory=CompetitionLedger)
    births: int = 0
    next_id: int = 0
    fusion_events: list[FusionEvent] = field(default_factory=list)

    @property
    def generation(self) -> int:
        return self.births // self.config.pop_size

    def member(self, member_id: int) -> Individual:
        for m in self.members:
            if m.id == member_id:
                return m
        raise UnknownIndividual(member_id)

    def new_individual(self, genome: SeedGenome, origin: Origin) -> Individual:
        ind = Individual(self.next_id, genome, self.generation, origin)
        self.next_id += 1
        return ind

    def mean_relative_fitness(self) -> float:
        total_credit = sum(self.ledger._credit[m.id] for m in self.members)
        total_games = sum(self.ledger._games[m.id] for m in self.members)
        return total_credit / total_games if total_games else 0.5


def relative_fitness(pop: Population, member_id: int) -> float:
    """Fraction of ledger games won by the member, ties counted half."""
    return pop.ledger.fitness(member_id)


def _play_and_record(pop: Population, pairings: list[tuple[Individual, Individual, int]]) -> None:
    outcomes = run_games([(a.genome, b.genome, t) for a, b, t in pairings], pop.config.factors())
    for (a, b, t), outcome in zip(pairings, outcomes):
        pop.ledger.record(a.id, b.id, credit_for_first(outcome, t))


def initialize_population(config: ExperimentConfig, rng: np.random.Generator) -> Population:
    """Random generation zero with a fully played round-robin ledger."""
    pop = Population(config=config)
    for _ in range(config.pop_size):
        genome = random_seed(config.s_yspan, config.s_xspan, config.seed_density, rng)
        ind = pop.new_individual(genome, Origin.RANDOM)
        pop.members.append(ind)
        pop.ledger.add_member(ind.id)
    pairings = [
        (a, b, t)
        for i, a in enumerate(pop.members)
        for b in pop.members[i + 1:]
        for t in range(config.num_trials)
    ]
    _play_and_record(pop, pairings)
    return pop


def _tournament_over(
    pop: Population, candidates: list[Individual], size: int, rng: np.random.Generator
) -> Individual:
    size = min(size, len(candidates))
    picks = rng.choice(len(candidates), size=size, replace=False)
    sampled = [candidates[int(i)] for i in picks]
    fits = [pop.ledger.fitness(m.id) for m in sampled]
    best = max(fits)
    winners = [m for m, f in zip(sampled, fits) if f == best]
    return winners[int(rng.integers(len(winners)))]


def tournament_select(pop: Population, tournament_size: int, rng: np.random.Generator) -> int:
    """Sample without replacement; return the fittest sampled id.

    Fitness ties inside the sample break uniformly at random.
    """
    return _tournament_over(pop, pop.members, tournament_size, rng).id


def insert_child(pop: Population, child: Individual, rng: np.random.Generator) -> None:
    """Replace the least fit member with the child and update the ledger.

    The outgoing member's records vanish entirely; the child then plays
    ``num_trials`` games against every survivor. Ties for least fit break
    uniformly at random.
    """
    fits = [pop.ledger.fitness(m.id) for m in pop.members]
    worst = min(fits)
    losers = [m for m, f in zip(pop.members, fits) if f == worst]
    removed = losers[int(rng.integers(len(losers)))]
    pop.ledger.remove_member(removed.id)
    pop.members.remove(removed)

    pop.members.append(child)
    pop.ledger.add_member(child.id)
    pairings = [(child, other, t)
                for other in pop.members if other.id != child.id
                for t in range(pop.config.num_trials)]
    _play_and_record(pop, pairings)
    pop.births += 1


def evaluate_provisional(pop: Population, genome: SeedGenome) -> float:
    """Win fraction of a genome played against every current member.

    Nothing is inserted and the ledger is untouched; the game schedule
    matches what the ledger would see if the genome joined the
    population, so the two fitness paths agree exactly.
    """
    pairings = [(genome, other.genome, t)
                for other in pop.members
                for t in range(pop.config.num_trials)]
    outcomes = run_games(pairings, pop.config.factors())
    credit = sum(credit_for_first(o, t) for (_, _, t), o in zip(pairings, outcomes))
    return credit / len(pairings)


def max_area(generation: int, config: ExperimentConfig) -> int:
    """Seed-area ceiling, linearly interpolated over the run and floored."""
    if config.num_generations == 0:
        return config.max_area_first
    span = config.max_area_last - config.max_area_first
    return int(config.max_area_first + span * generation // config.num_generations)


def _layer2(genome: SeedGenome, config: ExperimentConfig, rng: np.random.Generator
            ) -> tuple[SeedGenome, Origin]:
    """Variable-size mutation: exactly one of flip, shrink or grow."""
    r = rng.random()
    if r < config.prob_flip:
        return mutate_flip(genome, config.mutation_rate, rng), Origin.FLIP
    if r < config.prob_flip + config.prob_shrink:
        return shrink(genome, config.min_s_yspan, config.min_s_xspan, rng), Origin.SHRINK
    return grow(genome, config.seed_density, rng), Origin.GROW


def _layer3(pop: Population, first: Individual, rng: np.random.Generator
            ) -> tuple[SeedGenome, Origin | None]:
    """Sexual reproduction among sufficiently similar mates.

    The mate pool holds every other member whose similarity to the first
    parent lies in [min_similarity, max_similarity]; an empty pool passes
    the first parent through asexually.
    """
    config = pop.config
    mates = [
        m for m in pop.members
        if m.id != first.id
        and config.min_similarity <= similarity(first.genome, m.genome) <= config.max_similarity
    ]
    if not mates:
        return first.genome, None
    mate = _tournament_over(pop, mates, config.tournament_size, rng)
    return crossover(first.genome, mate.genome, rng), Origin.CROSSOVER


def _layer4(pop: Population, first: Individual, rng: np.random.Generator
            ) -> Individual | None:
    """Symbiotic layer: rare fission or fusion, otherwise fall through.

    Fusion attempts that would break the interpolated area ceiling are
    prevented outright. Every fused whole that clears the ceiling gets a
    provisional fitness evaluation and a logged event; with the mutualism
    gate on, only wholes strictly fitter than both parts are accepted.
    Returns the finished child, or None to continue at the sexual layer
    with the already-selected first seed.
    """
    config = pop.config
    if config.prob_fission + config.prob_fusion <= 0.0:
        return None
    r = rng.random()
    if r < config.prob_fission:
        kept = fission(first.genome, config.min_s_yspan, config.min_s_xspan, rng)
        if kept is not None:
            return pop.new_individual(kept, Origin.FISSION)
        return None
    if r < config.prob_fission + config.prob_fusion:
        second = pop.member(tournament_select(pop, config.tournament_size, rng))
        genome_a, genome_b = first.genome, second.genome
        if config.fusion_test_flag:
            if rng.random() < 0.5:
                genome_a = shuffle(genome_a, rng)
            else:
                genome_b = shuffle(genome_b, rng)
        whole = fuse(genome_a, genome_b, rng)
        if whole.area > max_area(pop.generation, config):
            return None
        part_a = pop.ledger.fitness(first.id)
        part_b = pop.ledger.fitness(second.id)
        whole_fitness = evaluate_provisional(pop, whole)
        classification = classify_fusion(whole_fitness, part_a, part_b)
        accepted = (not config.symbiosis_flag
                    or classification is FusionClass.BOTH_PARTS_BENEFIT)
        pop.fusion_events.append(FusionEvent(
            generation=pop.generation,
            part_a_fitness=part_a,
            part_b_fitness=part_b,
            whole_fitness=whole_fitness,
            classification=classification,
            accepted=accepted,
        ))
        if accepted:
            return pop.new_individual(whole, Origin.FUSION)
    return None


def produce_child(pop: Population, config: ExperimentConfig, rng: np.random.Generator
                  ) -> Individual:
    """Produce one child through the enabled layer chain.

    The entry layer is ``experiment_type_num``; each layer either
    finishes the child or passes down. Fusion and fission children enter
    as-is; everything else receives exactly one mutation at the
    variable-size layer (or a plain bit-flip in the uniform layer).
    """
    layer = config.experiment_type_num
    first = pop.member(tournament_select(pop, config.tournament_size, rng))
    origin: Origin | None = None

    if layer >= 4:
        done = _layer4(pop, first, rng)
        if done is not None:
            return done
    if layer >= 3:
        genome, origin = _layer3(pop, first, rng)
    else:
        genome = first.genome
    if layer >= 2:
        genome, mutation_origin = _layer2(genome, config, rng)
    else:
        genome = mutate_flip(genome, config.mutation_rate, rng)
        mutation_origin = Origin.FLIP
    return pop.new_individual(genome, origin or mutation_origin)


# ---------------------------------------------------------------------------
# Whole-run driver


@dataclass(frozen=True)
class ArchiveRow:
    generation: int
    rank: int
    id: int
    fitness: float
    area: int
    density: float
    origin: Origin
    genome: SeedGenome


@dataclass(frozen=True)
class MetricsRow:
    generation: int
    elite_area: float
    elite_density: float
    elite_diversity: float


@dataclass
class RunResult:
    archive: list[ArchiveRow]
    fusion_events: list[FusionEvent]
    metrics: list[MetricsRow]


def _elite(pop: Population) -> list[tuple[Individual, float]]:
    scored = [(m, pop.ledger.fitness(m.id)) for m in pop.members]
    scored.sort(key=lambda pair: (-pair[1], pair[0].id))
    return scored[:pop.config.elite_size]


def _snapshot(pop: Population, generation: int, result: RunResult) -> None:
    elite = _elite(pop)
    for rank, (member, fitness) in enumerate(elite):
        result.archive.append(ArchiveRow(
            generation=generation,
            rank=rank,
            id=member.id,
            fitness=fitness,
            area=member.genome.area,
            density=member.genome.density,
            origin=member.origin,
            genome=member.genome,
        ))
    fits = np.array([f for _, f in elite])
    result.metrics.append(MetricsRow(
        generation=generation,
        elite_area=float(np.mean([m.genome.area for m, _ in elite])),
        elite_density=float(np.mean([m.genome.density for m, _ in elite])),
        elite_diversity=float(np.std(fits, ddof=1)) if len(fits) > 1 else 0.0,
    ))


def run_experiment(config: ExperimentConfig, rng: np.random.Generator) -> RunResult:
    """Run one full experiment: init, all births, per-generation archives.

    The archive stores the ``elite_size`` fittest members at generation 0
    and after every subsequent generation, together with per-generation
    elite metrics (mean area, mean density, and diversity measured as the
    sample standard deviation of elite relative fitness). All fusion
    attempt events are collected for later analysis.
    """
    config.validate()
    pop = initialize_population(config, rng)
    result = RunResult(archive=[], fusion_events=pop.fusion_events, metrics=[])
    _snapshot(pop, 0, result)
    total_births = config.pop_size * config.num_generations
    for _ in range(total_births):
        child = produce_child(pop, config, rng)
        insert_child(pop, child, rng)
        if pop.births % config.pop_size == 0:
            _snapshot(pop, pop.generation, result)
            log.debug("generation %d/%d complete (%d births)",
                      pop.generation, config.num_generations, pop.births)
    return result
