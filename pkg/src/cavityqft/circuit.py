"""Gate-level model of the n-photon + 1-atom streaming QFT circuit.

Register convention: qubit 0 is the atom and is the most significant bit
of the state index; photons 1..n follow in order.  |0>_p is horizontal
polarization, |0>_a is spin up.

Output convention of the full program on |x1..xn>_p |0>_a (fixed
empirically at n = 1, 2 and asserted for all larger n): photon 1 carries
the initial ancilla state |0>, the atom carries output bit y1, and photon
j (j >= 2) carries output bit y_{n+2-j} of the transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

MAX_PURE_QUBITS = 20
MAX_DENSITY_QUBITS = 8

_H_MATRIX = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


class ArityMismatch(ValueError):
    """Gate refers to a qubit outside the circuit arity."""


class ZeroWeight(ArithmeticError):
    """Post-selection weight underflowed: all amplitude was lost."""


@dataclass(frozen=True)
class QubitRef:
    """Reference to the atom or to photon `index` (1-based)."""

    kind: str
    index: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("atom", "photon"):
            raise ValueError(f"unknown qubit kind {self.kind!r}")
        if self.kind == "photon" and (self.index is None or self.index < 1):
            raise ValueError(f"photon index must be >= 1, got {self.index}")
        if self.kind == "atom" and self.index is not None:
            raise ValueError("atom carries no index")

    def __str__(self) -> str:
        return "a" if self.kind == "atom" else f"p{self.index}"


ATOM = QubitRef("atom")


def photon(j: int) -> QubitRef:
    return QubitRef("photon", j)


@dataclass(frozen=True)
class GateOp:
    """One abstract gate instruction.

    name "H": Hadamard on `qubit`.
    name "CR": controlled phase diag(1,1,1,e^{i 2 pi / 2^k}) between the
        atom and photon `qubit`.
    name "SWAP": atom <-> photon `qubit` exchange.
    name "PHASEFIX": diag(1, e^{i angle}) on `qubit`.
    """

    name: str
    qubit: QubitRef | None = None
    k: int | None = None
    angle: float | None = None

    @staticmethod
    def hadamard(q: QubitRef) -> "GateOp":
        return GateOp("H", qubit=q)

    @staticmethod
    def controlled_phase(k: int, target: QubitRef) -> "GateOp":
        if k < 1:
            raise ValueError(f"CR_k needs k >= 1, got {k}")
        if target.kind != "photon":
            raise ValueError("controlled phase targets a photon")
        return GateOp("CR", qubit=target, k=k)

    @staticmethod
    def swap(j: int) -> "GateOp":
        return GateOp("SWAP", qubit=photon(j))

    @staticmethod
    def phase_fix(angle: float, q: QubitRef = ATOM) -> "GateOp":
        return GateOp("PHASEFIX", qubit=q, angle=float(angle))


@dataclass(frozen=True)
class CircuitProgram:
    """Ordered gate list for an n-photon circuit with CR cutoff K."""

    arity: int
    cutoff: int
    gates: tuple[GateOp, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError("arity must be nonnegative")
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        for gate in self.gates:
            if gate.qubit is not None and gate.qubit.kind == "photon":
                if gate.qubit.index > self.arity:
                    raise ArityMismatch(
                        f"gate {gate} references photon {gate.qubit.index} "
                        f"but arity is {self.arity}"
                    )
            if gate.name == "CR" and gate.k > self.cutoff:
                raise ValueError(f"CR_{gate.k} present but cutoff is {self.cutoff}")


class QuantumState:
    """Pure state vector or density matrix over n photons + 1 atom."""

    def __init__(self, n: int, data: np.ndarray, density: bool = False):
        self.n = n
        self.density = density
        m = n + 1
        dim = 2**m
        if density:
            if m > MAX_DENSITY_QUBITS:
                raise ValueError(f"density path capped at {MAX_DENSITY_QUBITS} qubits")
            if data.shape != (dim, dim):
                raise ValueError(f"expected {dim}x{dim} density matrix")
        else:
            if m > MAX_PURE_QUBITS:
                raise ValueError(f"pure path capped at {MAX_PURE_QUBITS} qubits")
            if data.shape != (dim,):
                raise ValueError(f"expected state vector of length {dim}")
        self.data = np.asarray(data, dtype=complex)

    @property
    def num_qubits(self) -> int:
        return self.n + 1

    @classmethod
    def basis(cls, n: int, photon_bits: Iterable[int] = (), atom_bit: int = 0) -> "QuantumState":
        bits = list(photon_bits)
        if len(bits) != n:
            raise ValueError(f"need {n} photon bits, got {len(bits)}")
        index = atom_bit
        for b in bits:
            index = (index << 1) | (b & 1)
        vec = np.zeros(2 ** (n + 1), dtype=complex)
        vec[index] = 1.0
        return cls(n, vec)

    @classmethod
    def from_photon_state(cls, n: int, photon_amps: np.ndarray, atom_bit: int = 0) -> "QuantumState":
        """Tensor an arbitrary photon-register state with an atom basis state."""
        photon_amps = np.asarray(photon_amps, dtype=complex)
        if photon_amps.shape != (2**n,):
            raise ValueError(f"expected photon state of length {2**n}")
        atom = np.zeros(2, dtype=complex)
        atom[atom_bit] = 1.0
        return cls(n, np.kron(atom, photon_amps))

    def copy(self) -> "QuantumState":
        return QuantumState(self.n, self.data.copy(), self.density)

    def to_density(self) -> "QuantumState":
        if self.density:
            return self.copy()
        return QuantumState(self.n, np.outer(self.data, self.data.conj()), density=True)

    def norm(self) -> float:
        if self.density:
            return float(np.trace(self.data).real)
        return float(np.vdot(self.data, self.data).real)

    def check(self, tol: float = 1e-12) -> None:
        """Assert the state invariants (unit norm / Hermitian PSD unit trace)."""
        if self.density:
            if abs(np.trace(self.data).real - 1.0) > tol:
                raise ValueError("density matrix trace differs from 1")
            if np.max(np.abs(self.data - self.data.conj().T)) > tol:
                raise ValueError("density matrix not Hermitian")
            if np.min(np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))) < -tol:
                raise ValueError("density matrix not positive semidefinite")
        else:
            if abs(self.norm() - 1.0) > tol:
                raise ValueError("state vector not normalized")

    def _qubit_axis(self, q: QubitRef) -> int:
        if q.kind == "atom":
            return 0
        if q.index > self.n:
            raise ArityMismatch(f"photon {q.index} out of range for n={self.n}")
        return q.index


def _apply_single(data: np.ndarray, axis: int, matrix: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to one tensor axis of an array reshaped to [2]*rank."""
    tensor = np.moveaxis(data, axis, -1)
    tensor = tensor @ matrix.T
    return np.moveaxis(tensor, -1, axis)


def _pair_slice(rank: int, assignments: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * rank
    for axis, value in assignments.items():
        idx[axis] = value
    return tuple(idx)


class _Register:
    """Tensor view of a state with unitary single/diagonal gate application."""

    def __init__(self, state: QuantumState):
        self.state = state
        m = state.num_qubits
        if state.density:
            self.rank = 2 * m
        else:
            self.rank = m
        self.m = m
        self.tensor = state.data.reshape([2] * self.rank)

    def finish(self) -> QuantumState:
        if self.state.density:
            dim = 2**self.m
            data = self.tensor.reshape(dim, dim)
        else:
            data = self.tensor.reshape(-1)
        return QuantumState(self.state.n, data, self.state.density)

    def single(self, axis: int, matrix: np.ndarray) -> None:
        self.tensor = _apply_single(self.tensor, axis, matrix)
        if self.state.density:
            self.tensor = _apply_single(self.tensor, axis + self.m, matrix.conj())

    def phase_on(self, assignments: dict[int, int], phase: complex) -> None:
        """Multiply the amplitudes selected by bit assignments by a phase."""
        self.tensor = self.tensor.copy()
        self.tensor[_pair_slice(self.rank, assignments)] *= phase
        if self.state.density:
            col = {axis + self.m: v for axis, v in assignments.items()}
            self.tensor[_pair_slice(self.rank, col)] *= np.conj(phase)

    def scale_axis_values(self, axis_factors: dict[tuple[int, ...], float], axes: tuple[int, ...]) -> None:
        """Multiply amplitudes by real factors keyed on the bit values of `axes`."""
        self.tensor = self.tensor.copy()
        for bits, factor in axis_factors.items():
            if factor == 1.0:
                continue
            self.tensor[_pair_slice(self.rank, dict(zip(axes, bits)))] *= factor
        if self.state.density:
            col_axes = tuple(a + self.m for a in axes)
            for bits, factor in axis_factors.items():
                if factor == 1.0:
                    continue
                self.tensor[_pair_slice(self.rank, dict(zip(col_axes, bits)))] *= factor

    def swap_axes(self, a: int, b: int) -> None:
        order = list(range(self.rank))
        order[a], order[b] = order[b], order[a]
        if self.state.density:
            order[a + self.m], order[b + self.m] = order[b + self.m], order[a + self.m]
        self.tensor = np.transpose(self.tensor, order)


def apply_gate(state: QuantumState, gate: GateOp) -> QuantumState:
    """Apply one gate unitary; norm/trace preserving."""
    reg = _Register(state)
    if gate.name == "H":
        reg.single(state._qubit_axis(gate.qubit), _H_MATRIX)
    elif gate.name == "CR":
        axis = state._qubit_axis(gate.qubit)
        phase = np.exp(2j * math.pi / 2**gate.k)
        reg.phase_on({0: 1, axis: 1}, phase)
    elif gate.name == "SWAP":
        reg.swap_axes(0, state._qubit_axis(gate.qubit))
    elif gate.name == "PHASEFIX":
        axis = state._qubit_axis(gate.qubit)
        reg.phase_on({axis: 1}, np.exp(1j * gate.angle))
    else:
        raise ValueError(f"unknown gate {gate.name!r}")
    return reg.finish()


def swap_from_cr1(j: int) -> list[GateOp]:
    """Atom <-> photon-j swap as three CR_1 reflections with interleaved Hadamards.

    Time-ordered: the product H_{a,p} CR_1 H_{a,p} CR_1 H_{a,p} CR_1 equals
    the SWAP unitary exactly (H_{a,p} is a Hadamard on both atom and photon).
    """
    block = [
        GateOp.controlled_phase(1, photon(j)),
        GateOp.hadamard(ATOM),
        GateOp.hadamard(photon(j)),
    ]
    return block * 3


def build_qft_program(n: int, K: int) -> CircuitProgram:
    """Streaming QFT on n photons with CR gates above k=K discarded.

    Subroutine i swaps photon i into the atom, Hadamard-rotates the atom,
    then applies CR_{j-i+1} between the atom and each later photon j.  In
    hardware the trailing atom Hadamard merges with the atom half of the
    final swap Hadamard (H_a H_a = 1), leaving two atomic Hadamards per
    subroutine.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gates: list[GateOp] = []
    for i in range(1, n + 1):
        # swap + trailing H_a, with the cancelling H_a H_a pair removed
        # (H_a commutes with H_p): two atomic Hadamards survive.
        gates.extend(swap_from_cr1(i)[:-2])
        gates.append(GateOp.hadamard(photon(i)))
        for j in range(i + 1, n + 1):
            k = j - i + 1
            if k <= K:
                gates.append(GateOp.controlled_phase(k, photon(j)))
    return CircuitProgram(arity=n, cutoff=max(K, 1), gates=tuple(gates))


def ideal_qft_unitary(n: int) -> np.ndarray:
    """Matrix with entries 2^{-n/2} e^{i 2 pi x y / 2^n}."""
    if n > MAX_PURE_QUBITS:
        raise ValueError(f"n capped at {MAX_PURE_QUBITS}")
    dim = 2**n
    grid = np.outer(np.arange(dim), np.arange(dim))
    return np.exp(2j * math.pi * grid / dim) / math.sqrt(dim)


def embed_qft_output(n: int, amplitudes: np.ndarray) -> np.ndarray:
    """Map an ideal n-qubit QFT output vector onto the full register layout.

    Places output bit y1 on the atom, |0> on photon 1, and y_{n+2-j} on
    photon j, matching the documented program output convention.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex)
    out = np.zeros(2 ** (n + 1), dtype=complex)
    for y in range(2**n):
        bits = [(y >> (n - 1 - b)) & 1 for b in range(n)]  # y1..yn
        index = bits[0]  # atom
        index <<= 1  # photon 1 fixed to 0
        for j in range(2, n + 1):
            index = (index << 1) | bits[n + 1 - j]
        out[index] += amplitudes[y]
    return out


def simulate_program(program: CircuitProgram, state: QuantumState) -> QuantumState:
    """Sequential deterministic application of every gate in the program."""
    if state.n != program.arity:
        raise ArityMismatch(f"state has n={state.n}, program arity {program.arity}")
    for gate in program.gates:
        state = apply_gate(state, gate)
    return state


# --- noise channels (density-matrix only) ---------------------------------


def _require_density(state: QuantumState) -> None:
    if not state.density:
        raise ValueError("noise channels act on density matrices")


def dephasing_channel(state: QuantumState, qubit: QubitRef, t: float, T2: float) -> QuantumState:
    """Damp the qubit's off-diagonal elements by e^{-t/T2}."""
    _require_density(state)
    if t < 0.0 or T2 <= 0.0:
        raise ValueError("need t >= 0 and T2 > 0")
    factor = math.exp(-t / T2) if math.isfinite(T2) else 1.0
    axis = state._qubit_axis(qubit)
    m = state.num_qubits
    tensor = state.data.reshape([2] * (2 * m)).copy()
    tensor[_pair_slice(2 * m, {axis: 0, axis + m: 1})] *= factor
    tensor[_pair_slice(2 * m, {axis: 1, axis + m: 0})] *= factor
    return QuantumState(state.n, tensor.reshape(2**m, 2**m), density=True)


def noisy_hadamard(state: QuantumState, qubit: QubitRef, p: float) -> QuantumState:
    """Ideal Hadamard followed by a phase flip applied with probability p."""
    _require_density(state)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    out = apply_gate(state, GateOp.hadamard(qubit))
    if p == 0.0:
        return out
    z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    reg = _Register(out.copy())
    reg.single(state._qubit_axis(qubit), z)
    flipped = reg.finish()
    data = (1.0 - p) * out.data + p * flipped.data
    return QuantumState(state.n, data, density=True)


def lossy_reflection(
    state: QuantumState,
    k: int,
    target: QubitRef,
    r_up: complex,
    r_down: complex,
) -> tuple[QuantumState, float]:
    """Ideal CR_k followed by the loss measurement M = diag(1, 1, |r_up|, |r_down|).

    M is diagonal in the (photon, atom) basis: vertical-polarization
    amplitudes are scaled by the spin-dependent reflection magnitude.
    Returns the unnormalized post-measurement state and its trace weight;
    the caller renormalizes after post-selection.
    """
    _require_density(state)
    mag_up, mag_down = abs(r_up), abs(r_down)
    if mag_up > 1.0 + 1e-12 or mag_down > 1.0 + 1e-12:
        raise ValueError("reflection magnitudes must not exceed 1")
    out = apply_gate(state, GateOp.controlled_phase(k, target))
    axis = out._qubit_axis(target)
    reg = _Register(out)
    # (photon bit, atom bit) -> eigenvalue of M; photon |1> is the lossy branch.
    reg.scale_axis_values({(1, 0): mag_up, (1, 1): mag_down}, (axis, 0))
    damped = reg.finish()
    weight = float(np.trace(damped.data).real)
    if weight < 1e-300:
        raise ZeroWeight("post-selection weight underflowed")
    return damped, weight


# --- serialization ---------------------------------------------------------


def program_to_text(program: CircuitProgram) -> str:
    """Line-oriented gate listing (one gate per line)."""
    lines = []
    for gate in program.gates:
        if gate.name == "H":
            lines.append(f"H {gate.qubit}")
        elif gate.name == "CR":
            lines.append(f"CR {gate.k} {gate.qubit}")
        elif gate.name == "SWAP":
            lines.append(f"SWAP {gate.qubit}")
        elif gate.name == "PHASEFIX":
            if gate.qubit == ATOM:
                lines.append(f"PHASEFIX {gate.angle!r}")
            else:
                lines.append(f"PHASEFIX {gate.angle!r} {gate.qubit}")
    return "\n".join(lines) + ("\n" if lines else "")


def _parse_qubit(token: str) -> QubitRef:
    if token == "a":
        return ATOM
    if token.startswith("p"):
        return photon(int(token[1:]))
    raise ValueError(f"bad qubit token {token!r}")


def program_from_text(text: str, arity: int, cutoff: int) -> CircuitProgram:
    gates: list[GateOp] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "H":
            gates.append(GateOp.hadamard(_parse_qubit(parts[1])))
        elif parts[0] == "CR":
            gates.append(GateOp.controlled_phase(int(parts[1]), _parse_qubit(parts[2])))
        elif parts[0] == "SWAP":
            gates.append(GateOp.swap(_parse_qubit(parts[1]).index))
        elif parts[0] == "PHASEFIX":
            qubit = _parse_qubit(parts[2]) if len(parts) > 2 else ATOM
            gates.append(GateOp.phase_fix(float(parts[1]), qubit))
        else:
            raise ValueError(f"unknown gate line {line!r}")
    return CircuitProgram(arity=arity, cutoff=cutoff, gates=tuple(gates))
