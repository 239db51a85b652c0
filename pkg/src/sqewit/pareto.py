"""From-scratch NSGA-II over pure-state genomes for two-objective frontiers.

Genomes are boxes of 2N real genes in [-1, 1] (real and imaginary Fock
amplitudes) decoded by normalization. Two frontier problems are built in:

* ``fidelity``: minimize the witness expectation and the virtual
  interaction fidelity simultaneously; the rank-1 front is the worst-case
  fidelity attainable at a given witness value.
* ``gkp``: minimize the witness expectation while maximizing the GKP
  squeezing left after two breeding rounds; the front is the worst-case
  grid quality for a given witness value.

Both objectives are minimized internally; maximized quantities enter with
their sign flipped. Runs are deterministic functions of the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import breeding, fock, gates, states, witness
from .errors import ContractViolationError
from .fock import FockState
from .witness import WitnessSpec

GENE_LOW = -1.0
GENE_HIGH = 1.0
DECODE_EPS = 1e-9
PROBLEMS = ("fidelity", "gkp")


@dataclass(frozen=True)
class NsgaConfig:
    """Search hyperparameters; the seed is mandatory for reproducibility."""

    seed: int
    population: int = 200
    generations: int = 500
    crossover_prob: float = 0.9
    crossover_eta: float = 15.0
    mutation_prob: float | None = None  # default 1 / (2 * dim)
    mutation_eta: float = 20.0

    def __post_init__(self):
        if self.population < 2 or self.population % 2:
            raise ContractViolationError(f"population must be even and >= 2, got {self.population}")
        if self.generations < 0:
            raise ContractViolationError(f"generations must be >= 0, got {self.generations}")
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ContractViolationError(f"{name} must lie in [0, 1], got {v}")
        if not -(2**63) <= self.seed < 2**64:
            raise ContractViolationError("seed must fit in 64 bits")


def decode(genome: np.ndarray) -> FockState | None:
    """Genome -> normalized state; None marks a (near-)zero invalid genome.

    Decoding is scale-invariant: any nonzero multiple of a genome yields
    the same state.
    """
    genome = np.asarray(genome, dtype=float)
    if genome.ndim != 1 or genome.size % 2:
        raise ContractViolationError(f"genome must hold 2N real genes, got shape {genome.shape}")
    dim = genome.size // 2
    amps = genome[:dim] + 1j * genome[dim:]
    if np.linalg.norm(amps) <= DECODE_EPS:
        return None
    return FockState(amps)


# ---------------------------------------------------------------------------
# Objective evaluation contexts (heavy operators built once per run)
# ---------------------------------------------------------------------------


class _FidelityObjectives:
    metric_name = "fidelity"

    def __init__(self, spec: WitnessSpec, kind: str = "BS"):
        self.spec = spec
        self.w = witness.build_witness(spec)
        self.coupler_cols = np.ascontiguousarray(
            fock.two_mode_coupler(kind, spec.dim)[:, 0 :: spec.dim]
        )  # action on c ⊗ |0>
        self.bra = fock.momentum_eigenbra(0.0, spec.dim)
        # Normalized truncation of the ideal target; small frontier
        # dimensions cannot hold it losslessly.
        self.target = states.ideal_gate_target(kind, spec.u, spec.phi, spec.dim, max_loss=1.0).amps

    def __call__(self, amps: np.ndarray) -> tuple[float, float]:
        z = float(np.real(np.vdot(amps, self.w @ amps)))
        joint = self.coupler_cols @ amps
        out = self.bra @ joint.reshape(self.spec.dim, self.spec.dim)
        norm = np.linalg.norm(out)
        if norm < gates.ANNIHILATION_EPS:
            return (z, math.inf)
        fid = float(abs(np.vdot(self.target, out / norm)) ** 2)
        return (z, fid)

    def metric_value(self, objective_2: float) -> float:
        return objective_2


class _GkpObjectives:
    metric_name = "gkp_db"

    def __init__(self, spec: WitnessSpec, rounds: int = 2):
        self.spec = spec
        self.rounds = rounds
        self.w = witness.build_witness(spec)
        self.coupler = fock.two_mode_coupler("BS", spec.dim)
        self.bra = fock.momentum_eigenbra(0.0, spec.dim)
        self.gkp = breeding.gkp_witness(spec.dim)

    def __call__(self, amps: np.ndarray) -> tuple[float, float]:
        z = float(np.real(np.vdot(amps, self.w @ amps)))
        current = amps
        for _ in range(self.rounds):
            joint = self.coupler @ np.kron(current, current)
            out = self.bra @ joint.reshape(self.spec.dim, self.spec.dim)
            norm = np.linalg.norm(out)
            if norm < gates.ANNIHILATION_EPS:
                return (z, math.inf)
            current = out / norm
        value = max(
            float(np.real(np.vdot(current, self.gkp.matrix @ current))),
            breeding.EXPECTATION_FLOOR,
        )
        gkp_db = 10.0 * math.log10(value / self.gkp.gaussian_min)
        return (z, -gkp_db)

    def metric_value(self, objective_2: float) -> float:
        return -objective_2


def _make_objectives(problem: str, spec: WitnessSpec, breeding_rounds: int):
    if problem == "fidelity":
        return _FidelityObjectives(spec)
    if problem == "gkp":
        return _GkpObjectives(spec, rounds=breeding_rounds)
    raise ContractViolationError(f"unknown problem {problem!r}; expected one of {PROBLEMS}")


# ---------------------------------------------------------------------------
# NSGA-II machinery
# ---------------------------------------------------------------------------


def non_dominated_sort(objectives: np.ndarray) -> list[np.ndarray]:
    """Partition points into fronts by weak Pareto dominance (minimization)."""
    objs = np.asarray(objectives, dtype=float)
    n = objs.shape[0]
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dominates = le & lt  # dominates[i, j]: i dominates j
    n_dominators = dominates.sum(axis=0)
    fronts: list[np.ndarray] = []
    assigned = np.zeros(n, dtype=bool)
    while not assigned.all():
        current = np.nonzero((n_dominators == 0) & ~assigned)[0]
        if current.size == 0:  # defensive; cannot happen with a finite poset
            current = np.nonzero(~assigned)[0]
        fronts.append(current)
        assigned[current] = True
        n_dominators = n_dominators - dominates[current].sum(axis=0)
    return fronts


def crowding_distance(objectives: np.ndarray, front: np.ndarray) -> np.ndarray:
    """Crowding distances within one front; boundary points get +inf."""
    objs = np.asarray(objectives, dtype=float)[front]
    m = front.size
    dist = np.zeros(m)
    if m <= 2:
        return np.full(m, np.inf)
    for k in range(objs.shape[1]):
        order = np.argsort(objs[:, k], kind="stable")
        span = objs[order[-1], k] - objs[order[0], k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span > 0.0:
            gaps = (objs[order[2:], k] - objs[order[:-2], k]) / span
            dist[order[1:-1]] += gaps
    return dist


def _rank_and_crowd(objectives: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = objectives.shape[0]
    ranks = np.empty(n, dtype=int)
    crowd = np.empty(n, dtype=float)
    for r, front in enumerate(non_dominated_sort(objectives)):
        ranks[front] = r
        crowd[front] = crowding_distance(objectives, front)
    return ranks, crowd


def _tournament(rng: np.random.Generator, ranks, crowd, picks: int) -> np.ndarray:
    # Two shuffled pairings per generation, as in the original crowded
    # tournament: every individual competes exactly twice.
    n = ranks.size
    winners = []
    while len(winners) < picks:
        order = rng.permutation(n)
        a, b = order[0::2], order[1::2]
        better_b = (ranks[b] < ranks[a]) | ((ranks[b] == ranks[a]) & (crowd[b] > crowd[a]))
        winners.extend(np.where(better_b, b, a).tolist())
    return np.array(winners[:picks], dtype=int)


def variation(parents: np.ndarray, cfg: NsgaConfig, rng: np.random.Generator) -> np.ndarray:
    """Simulated-binary crossover plus polynomial mutation, clipped to bounds.

    With both probabilities zero the offspring are exact clones of the
    parents.
    """
    parents = np.asarray(parents, dtype=float)
    n, genes = parents.shape
    if n % 2:
        raise ContractViolationError("variation expects an even number of parents")
    half = n // 2
    p1 = parents[0::2].copy()
    p2 = parents[1::2].copy()

    do_pair = rng.random(half) < cfg.crossover_prob
    do_gene = rng.random((half, genes)) < 0.5
    u = rng.random((half, genes))
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (cfg.crossover_eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (cfg.crossover_eta + 1.0)),
    )
    mask = do_pair[:, None] & do_gene
    c1 = np.where(mask, 0.5 * ((1 + beta) * p1 + (1 - beta) * p2), p1)
    c2 = np.where(mask, 0.5 * ((1 - beta) * p1 + (1 + beta) * p2), p2)
    offspring = np.empty_like(parents)
    offspring[0::2] = c1
    offspring[1::2] = c2

    offspring = np.clip(offspring, GENE_LOW, GENE_HIGH)

    p_mut = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / genes
    mut_mask = rng.random((n, genes)) < p_mut
    um = rng.random((n, genes))
    delta = np.where(
        um < 0.5,
        (2.0 * um) ** (1.0 / (cfg.mutation_eta + 1.0)) - 1.0,
        1.0 - (2.0 * (1.0 - um)) ** (1.0 / (cfg.mutation_eta + 1.0)),
    )
    offspring = offspring + mut_mask * delta * (GENE_HIGH - GENE_LOW)
    return np.clip(offspring, GENE_LOW, GENE_HIGH)


def _evaluate(genomes: np.ndarray, objective) -> np.ndarray:
    out = np.empty((genomes.shape[0], 2), dtype=float)
    for i, genome in enumerate(genomes):
        state = decode(genome)
        if state is None:
            out[i] = (math.inf, math.inf)
        else:
            out[i] = objective(state.amps)
    return out


def _select_next(genomes, objectives, target_size):
    fronts = non_dominated_sort(objectives)
    chosen: list[int] = []
    for front in fronts:
        if len(chosen) + front.size <= target_size:
            chosen.extend(front.tolist())
            continue
        crowd = crowding_distance(objectives, front)
        # Stable truncation: widest-spaced first, original index breaks ties.
        order = np.lexsort((front, -crowd))
        chosen.extend(front[order[: target_size - len(chosen)]].tolist())
        break
    idx = np.array(chosen, dtype=int)
    return genomes[idx], objectives[idx]


@dataclass(frozen=True)
class ParetoPoint:
    """One frontier member: genome, raw objectives, and reporting values."""

    genome: np.ndarray
    objective_1: float  # witness expectation (minimized)
    objective_2: float  # internal second objective (minimized)
    xi_sqe_db: float
    metric_name: str
    metric_value: float
    rank: int
    crowding: float


@dataclass(frozen=True)
class EvolveResult:
    points: list[ParetoPoint]
    history: np.ndarray  # per-generation best of each internal objective
    problem: str
    spec: WitnessSpec
    config: NsgaConfig
    evaluations: int


def evolve(
    problem: str,
    spec: WitnessSpec,
    cfg: NsgaConfig,
    breeding_rounds: int = 2,
) -> EvolveResult:
    """Run NSGA-II and return the final rank-1 front sorted by objective 1."""
    objective = _make_objectives(problem, spec, breeding_rounds)
    bound = witness.gaussian_bound(spec.u, spec.phi, spec.c)
    rng = np.random.default_rng(cfg.seed)
    genes = 2 * spec.dim

    genomes = rng.uniform(GENE_LOW, GENE_HIGH, size=(cfg.population, genes))
    objectives = _evaluate(genomes, objective)
    evaluations = cfg.population
    history = [objectives.min(axis=0)]

    for _ in range(cfg.generations):
        ranks, crowd = _rank_and_crowd(objectives)
        parent_idx = _tournament(rng, ranks, crowd, cfg.population)
        offspring = variation(genomes[parent_idx], cfg, rng)
        off_objs = _evaluate(offspring, objective)
        evaluations += cfg.population
        genomes, objectives = _select_next(
            np.vstack([genomes, offspring]),
            np.vstack([objectives, off_objs]),
            cfg.population,
        )
        history.append(objectives.min(axis=0))

    ranks, crowd = _rank_and_crowd(objectives)
    front = np.nonzero(ranks == 0)[0]
    finite = front[np.isfinite(objectives[front]).all(axis=1)]
    order = np.lexsort((finite, objectives[finite, 1], objectives[finite, 0]))
    points = []
    for i in finite[order]:
        z = objectives[i, 0]
        points.append(
            ParetoPoint(
                genome=genomes[i].copy(),
                objective_1=float(z),
                objective_2=float(objectives[i, 1]),
                xi_sqe_db=10.0 * math.log10(max(z, witness.EXPECTATION_FLOOR) / bound.value),
                metric_name=objective.metric_name,
                metric_value=float(objective.metric_value(objectives[i, 1])),
                rank=0,
                crowding=float(crowd[i]),
            )
        )
    return EvolveResult(
        points=points,
        history=np.array(history),
        problem=problem,
        spec=spec,
        config=cfg,
        evaluations=evaluations,
    )


# ---------------------------------------------------------------------------
# Frontier diagnostics
# ---------------------------------------------------------------------------


def hypervolume(objectives: np.ndarray, reference: np.ndarray) -> float:
    """Dominated 2-D hypervolume against a reference (worst) corner."""
    objs = np.asarray(objectives, dtype=float)
    ref = np.asarray(reference, dtype=float)
    keep = (objs[:, 0] < ref[0]) & (objs[:, 1] < ref[1])
    objs = objs[keep]
    if objs.shape[0] == 0:
        return 0.0
    order = np.lexsort((objs[:, 1], objs[:, 0]))
    hv = 0.0
    best_y = ref[1]
    for x, y in objs[order]:
        if y < best_y:
            hv += (ref[0] - x) * (best_y - y)
            best_y = y
    return float(hv)


def worst_corner(*objective_sets: np.ndarray) -> np.ndarray:
    stacked = np.vstack(objective_sets)
    return stacked.max(axis=0)


def dominated_front_points(front_objs: np.ndarray, challenger_objs: np.ndarray) -> np.ndarray:
    """Indices of front points strictly dominated by any challenger.

    A nonempty result flags an under-converged frontier run: a known
    feasible state beats a reported frontier point in both objectives.
    """
    f = np.asarray(front_objs, dtype=float)
    c = np.asarray(challenger_objs, dtype=float)
    le = (c[:, None, :] <= f[None, :, :]).all(axis=2)
    lt = (c[:, None, :] < f[None, :, :]).any(axis=2)
    return np.nonzero((le & lt).any(axis=0))[0]
