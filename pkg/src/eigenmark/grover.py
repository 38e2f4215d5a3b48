"""Grover search: oracle, iteration, iteration-count choice and amplitude analysis."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .qsim import (
    X,
    QubitLayout,
    StateVector,
    apply_controlled_phase,
    apply_gate,
    apply_hadamard_all,
    ground_state,
    inversion_about_mean,
    labels,
    marginal_over_reported,
    probabilities,
)

MAX_GROVER_INPUTS = 14

Oracle = Callable[[StateVector], StateVector]


class PromiseError(ValueError):
    """Original Grover search was asked to run without exactly one winner."""


def _is_power_of_two(N: int) -> bool:
    return N >= 1 and N & (N - 1) == 0


@dataclass(frozen=True)
class WinnerScenario:
    n: int
    winners: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"input width must be >= 1, got {self.n}")
        winners = frozenset(self.winners)
        for w in winners:
            if len(w) != self.n or set(w) - {"0", "1"}:
                raise ValueError(f"winner {w!r} is not a {self.n}-bit label")
        object.__setattr__(self, "winners", winners)

    @classmethod
    def from_bitmask(cls, n: int, mask: int) -> WinnerScenario:
        return cls(n, frozenset(format(x, f"0{n}b") for x in range(1 << n) if mask >> x & 1))

    @property
    def bitmask(self) -> int:
        return sum(1 << int(w, 2) for w in self.winners)

    @property
    def non_winners(self) -> list[str]:
        return [x for x in labels(self.n) if x not in self.winners]

    def sorted_winners(self) -> list[str]:
        return sorted(self.winners)

    def winning_fraction(self, n_tags: int = 0) -> float:
        return len(self.winners) / 2 ** (self.n + n_tags)


@dataclass(frozen=True)
class AmplitudePair:
    k: float
    l: float
    j: int
    N: int


def build_oracle(scn: WinnerScenario, theta: float, layout: QubitLayout | None = None) -> Oracle:
    """Phase ``theta`` on every |winner, y=1> component; identity elsewhere."""
    if not -2 * math.pi < theta <= 2 * math.pi:
        raise ValueError(f"oracle angle {theta} outside (-2pi, 2pi]")
    layout = layout or QubitLayout.standard(scn.n)
    if len(layout.input_qubits) != scn.n:
        raise ValueError(f"layout has {len(layout.input_qubits)} input qubits, scenario needs {scn.n}")
    patterns = [
        [(q, int(b)) for q, b in zip(layout.input_qubits, w)] for w in scn.sorted_winners()
    ]

    def oracle(state: StateVector) -> StateVector:
        for controls in patterns:
            state = apply_controlled_phase(state, controls, layout.ancilla, theta)
        return state

    return oracle


def grover_iteration(state: StateVector, oracle: Oracle, layout: QubitLayout) -> StateVector:
    return inversion_about_mean(oracle(state), layout.input_qubits)


def optimal_iterations_argmin(N: int) -> int:
    """Iteration count minimising the non-winner probability (1/(N-1)) cos^2((2j+1) asin(1/sqrt N)).

    Ties (within 1e-12) go to the smallest j.  N=1 has nothing to search.
    """
    if not _is_power_of_two(N):
        raise ValueError(f"N={N} is not a power of two")
    if N == 1:
        return 0
    theta = math.asin(math.sqrt(1 / N))
    best_j, best = 0, math.inf
    for j in range(math.ceil(math.pi * math.sqrt(N) / 4) + 2):
        v = math.cos((2 * j + 1) * theta) ** 2 / (N - 1)
        if v < best - 1e-12:
            best_j, best = j, v
    return best_j


def optimal_iterations_rounded(N: int) -> int:
    if N < 2:
        raise ValueError(f"N={N} must be >= 2")
    x = math.pi * math.sqrt(N) / 4 - 0.5
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def amplitude_recurrence(N: int, j: int) -> AmplitudePair:
    if j < 0:
        raise ValueError("iteration count must be non-negative")
    k = l = 1 / math.sqrt(N)
    for _ in range(j):
        k, l = ((N - 2) * k + 2 * (N - 1) * l) / N, (-2 * k + (N - 2) * l) / N
    return AmplitudePair(k, l, j, N)


def amplitude_closed_form(N: int, j: int) -> AmplitudePair:
    if N < 2:
        raise ValueError(f"N={N} must be >= 2")
    theta = math.asin(1 / math.sqrt(N))
    phase = (2 * j + 1) * theta
    return AmplitudePair(math.sin(phase), math.cos(phase) / math.sqrt(N - 1), j, N)


def amplitude_trajectory(N: int, j_max: int) -> list[AmplitudePair]:
    if j_max < 0:
        raise ValueError("j_max must be non-negative")
    return [amplitude_closed_form(N, j) for j in range(j_max + 1)]


def trajectory_csv(Ns: Iterable[int], j_max: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "j", "k_j", "l_j"])
    for N in Ns:
        if not _is_power_of_two(N) or N < 2:
            raise ValueError(f"N={N} is not a power of two >= 2")
        for p in amplitude_trajectory(N, j_max):
            w.writerow([N, p.j, repr(p.k), repr(p.l)])
    return buf.getvalue()


@dataclass
class GroverRun:
    scenario: WinnerScenario
    iterations: int
    final_state: StateVector
    reported: dict[str, float]
    layout: QubitLayout

    @property
    def winner(self) -> str:
        (w,) = self.scenario.winners
        return w

    def winner_amplitude(self) -> complex:
        idx = int(self.winner, 2) << 1 | 1
        return complex(self.final_state.amps[idx])


def grover_states(scn: WinnerScenario, theta: float = math.pi):
    """Yield the register after 0, 1, 2, ... Grover iterations (ancilla prepared in |1>)."""
    layout = QubitLayout.standard(scn.n)
    oracle = build_oracle(scn, theta, layout)
    state = apply_gate(ground_state(layout.num_qubits), X, layout.ancilla)
    state = apply_hadamard_all(state, layout.input_qubits)
    while True:
        yield state
        state = grover_iteration(state, oracle, layout)


def run_original_grover(scn: WinnerScenario, iterations: int | None = None) -> GroverRun:
    if len(scn.winners) != 1:
        raise PromiseError(f"original Grover search needs exactly one winner, got {len(scn.winners)}")
    if scn.n > MAX_GROVER_INPUTS:
        raise ValueError(f"n={scn.n} exceeds {MAX_GROVER_INPUTS} input qubits")
    J = optimal_iterations_argmin(2**scn.n) if iterations is None else iterations
    if J < 0:
        raise ValueError("iteration count must be non-negative")
    layout = QubitLayout.standard(scn.n)
    states = grover_states(scn)
    for _ in range(J + 1):
        state = next(states)
    probs = marginal_over_reported(probabilities(state), layout)
    reported = dict(zip(labels(scn.n), probs.tolist()))
    return GroverRun(scn, J, state, reported, layout)
