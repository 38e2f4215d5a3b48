"""Dense statevector simulation.

Basis index ``i`` of an ``m``-qubit register stores qubit ``q`` in bit ``q`` of
``i``; the label string of ``i`` is its ``m``-bit binary form, highest qubit on
the left.  Registers used by this package put the ancilla on qubit 0, the input
word above it, and the tag qubits on top, so reported labels read
``tags + input`` left to right.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_QUBITS = 24
NORM_TOL = 1e-10


class SizeError(ValueError):
    pass


class QubitIndexError(IndexError):
    pass


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (1 << self.num_qubits,):
            raise SizeError(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, got {amps.shape}"
            )
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps) -> StateVector:
        amps = np.asarray(amps, dtype=np.complex128)
        m = int(amps.size).bit_length() - 1
        if m < 1 or amps.size != 1 << m:
            raise SizeError(f"length {amps.size} is not a power of two >= 2")
        return cls(m, amps)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def label(self, index: int) -> str:
        return format(index, f"0{self.num_qubits}b")

    def tensor(self) -> np.ndarray:
        # axis a of the tensor holds qubit m-1-a
        return self.amps.reshape((2,) * self.num_qubits)


@dataclass(frozen=True)
class QubitLayout:
    """Role of every qubit in a register.

    ``tag_qubits`` and ``input_qubits`` are listed in reported-label order
    (most significant first).  The ancilla never appears in a reported label.
    """

    tag_qubits: tuple[int, ...]
    input_qubits: tuple[int, ...]
    ancilla: int

    def __post_init__(self):
        object.__setattr__(self, "tag_qubits", tuple(self.tag_qubits))
        object.__setattr__(self, "input_qubits", tuple(self.input_qubits))
        used = [*self.tag_qubits, *self.input_qubits, self.ancilla]
        if sorted(used) != list(range(len(used))):
            raise ValueError(f"layout indices {used} must be disjoint and cover 0..{len(used) - 1}")

    @classmethod
    def standard(cls, n_inputs: int, n_tags: int = 0) -> QubitLayout:
        """Ancilla on qubit 0, input word on 1..n, tags above it."""
        inputs = tuple(range(n_inputs, 0, -1))
        tags = tuple(range(n_inputs + n_tags, n_inputs, -1))
        return cls(tags, inputs, 0)

    @property
    def num_qubits(self) -> int:
        return len(self.tag_qubits) + len(self.input_qubits) + 1

    @property
    def reported_qubits(self) -> tuple[int, ...]:
        return self.tag_qubits + self.input_qubits

    @property
    def label_width(self) -> int:
        return len(self.reported_qubits)


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.num_qubits:
        raise QubitIndexError(f"qubit {q} out of range for {state.num_qubits}-qubit state")


def ground_state(m: int) -> StateVector:
    if not 1 <= m <= MAX_QUBITS:
        raise SizeError(f"qubit count {m} outside 1..{MAX_QUBITS}")
    amps = np.zeros(1 << m, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(m, amps)


# -- 2x2 gates ---------------------------------------------------------------

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def rz(theta: float) -> np.ndarray:
    """Phase rotation diag(1, e^{i theta})."""
    return np.diag([1.0, np.exp(1j * theta)]).astype(np.complex128)


def rz_symmetric(theta: float) -> np.ndarray:
    """Rotation-gate convention diag(e^{-i theta/2}, e^{i theta/2})."""
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def is_unitary(g: np.ndarray, tol: float = 1e-12) -> bool:
    g = np.asarray(g)
    return g.shape == (2, 2) and np.allclose(g.conj().T @ g, I2, atol=tol, rtol=0)


# -- operations ----------------------------------------------------------------


def apply_gate(state: StateVector, g: np.ndarray, q: int) -> StateVector:
    _check_qubit(state, q)
    g = np.asarray(g, dtype=np.complex128)
    if not is_unitary(g):
        raise ValueError("gate is not a unitary 2x2 matrix")
    m = state.num_qubits
    view = state.amps.reshape(1 << (m - 1 - q), 2, 1 << q)
    out = np.einsum("ab,ibj->iaj", g, view)
    return StateVector(m, out.reshape(-1))


def apply_hadamard_all(state: StateVector, qs: Sequence[int]) -> StateVector:
    qs = list(qs)
    if len(set(qs)) != len(qs):
        raise QubitIndexError(f"duplicate qubit in {qs}")
    for q in qs:
        _check_qubit(state, q)
    for q in qs:
        state = apply_gate(state, H, q)
    return state


def basis_bits(m: int) -> np.ndarray:
    """bits[q, i] is the value of qubit q in basis index i."""
    idx = np.arange(1 << m)
    return (idx[None, :] >> np.arange(m)[:, None]) & 1


def control_mask(m: int, controls: Sequence[tuple[int, int]]) -> np.ndarray:
    idx = np.arange(1 << m)
    mask = np.ones(1 << m, dtype=bool)
    for q, bit in controls:
        mask &= ((idx >> q) & 1) == bit
    return mask


def apply_controlled_phase(
    state: StateVector,
    controls: Sequence[tuple[int, int]],
    target: int,
    theta: float,
) -> StateVector:
    """Multiply by e^{i theta} every amplitude whose controls match and whose target is 1.

    A control ``(q, 0)`` fires on qubit ``q`` being 0, which is the same
    operator as conjugating that control with X.
    """
    _check_qubit(state, target)
    seen = {target}
    for q, bit in controls:
        _check_qubit(state, q)
        if q in seen:
            raise QubitIndexError(f"qubit {q} used twice in controlled phase")
        if bit not in (0, 1):
            raise ValueError(f"required bit must be 0 or 1, got {bit}")
        seen.add(q)
    mask = control_mask(state.num_qubits, [*controls, (target, 1)])
    out = state.amps.copy()
    out[mask] *= np.exp(1j * theta)
    return StateVector(state.num_qubits, out)


def apply_controlled_rz(state: StateVector, control: int, target: int, theta: float) -> StateVector:
    """Controlled ``rz_symmetric(theta)`` on ``target``.

    Decomposes into a controlled phase of ``theta`` plus a phase of
    ``-theta/2`` on the control qubit.
    """
    state = apply_controlled_phase(state, [(control, 1)], target, theta)
    return apply_controlled_phase(state, [], control, -theta / 2)


def inversion_about_mean(state: StateVector, qs: Sequence[int]) -> StateVector:
    """Apply 2A - I on the subspace of ``qs`` (identity on the other qubits)."""
    qs = list(qs)
    if not qs:
        raise ValueError("inversion about mean needs at least one qubit")
    if len(set(qs)) != len(qs):
        raise QubitIndexError(f"duplicate qubit in {qs}")
    for q in qs:
        _check_qubit(state, q)
    m = state.num_qubits
    t = state.tensor()
    axes = tuple(m - 1 - q for q in qs)
    mean = t.mean(axis=axes, keepdims=True)
    return StateVector(m, (2 * mean - t).reshape(-1))


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amps) ** 2


def marginal_over_reported(probs: np.ndarray, layout: QubitLayout) -> np.ndarray:
    """Sum out the ancilla; the result is indexed by the tags+input label."""
    probs = np.asarray(probs, dtype=float)
    m = layout.num_qubits
    if probs.shape != (1 << m,):
        raise SizeError(f"layout has {m} qubits but probabilities have length {probs.size}")
    t = probs.reshape((2,) * m).sum(axis=m - 1 - layout.ancilla)
    # remaining axes are the non-ancilla qubits, highest first
    rest = sorted((q for q in range(m) if q != layout.ancilla), reverse=True)
    order = [rest.index(q) for q in layout.reported_qubits]
    return np.transpose(t, order).reshape(-1)


def labels(width: int) -> list[str]:
    return [format(i, f"0{width}b") for i in range(1 << width)]
