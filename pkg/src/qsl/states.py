"""
Energy spectra, pure states, density matrices and tensor-product states.

All states are expressed in the energy eigenbasis of a Hamiltonian whose
ground level is exactly zero; hbar = 1 throughout.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (BadProbabilities, BadSpectrum, NotNormalized,
                     SpectrumMismatch, StateFormatError)
from .numerics import HermitianMatrix, eigh

__all__ = [
    "EnergySpectrum", "PureState", "DensityMatrix", "TwoLevelState",
    "CompositeState", "mean_energy", "energy_spread", "ensemble_to_density",
    "composite_product", "entangled_family", "state_from_dict",
    "state_to_dict", "read_state_file",
]

NORM_TOL = 1e-12
MAX_JOINT_DIMENSION = 4096


@dataclass(frozen=True, eq=False)
class EnergySpectrum:
    """Finite list of energy levels with a zero ground level.

    Degenerate levels are allowed; they stay distinct basis states.
    """
    levels: np.ndarray

    def __post_init__(self):
        lv = np.array(self.levels, dtype=float).ravel()
        if lv.size == 0:
            raise BadSpectrum("spectrum needs at least one level")
        if not np.all(np.isfinite(lv)):
            raise BadSpectrum("levels must be finite")
        if lv[0] != 0.0:
            raise BadSpectrum(f"ground level must be exactly 0, got {lv[0]!r} "
                              "(see EnergySpectrum.shift_to_zero_ground)")
        if np.any(np.diff(lv) < 0):
            raise BadSpectrum("levels must be sorted in nondecreasing order")
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)

    @classmethod
    def shift_to_zero_ground(cls, levels) -> "EnergySpectrum":
        lv = np.array(levels, dtype=float)
        return cls(lv - lv.min())

    @property
    def count(self) -> int:
        return self.levels.size

    def __len__(self):
        return self.levels.size

    def __eq__(self, other):
        return (isinstance(other, EnergySpectrum)
                and np.array_equal(self.levels, other.levels))

    def __hash__(self):
        return hash(self.levels.tobytes())


def _spectrum(levels) -> EnergySpectrum:
    return levels if isinstance(levels, EnergySpectrum) else EnergySpectrum(levels)


@dataclass(frozen=True, eq=False)
class PureState:
    spectrum: EnergySpectrum
    amplitudes: np.ndarray

    def __post_init__(self):
        spec = _spectrum(self.spectrum)
        amp = np.array(self.amplitudes, dtype=complex).ravel()
        if amp.size != spec.count:
            raise SpectrumMismatch(f"{amp.size} amplitudes for {spec.count} levels")
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"sum |c_n|^2 = {norm!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "spectrum", spec)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, levels, amplitudes) -> "PureState":
        """Build a state from unnormalized amplitudes."""
        amp = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise NotNormalized("all amplitudes are zero")
        return cls(_spectrum(levels), amp / norm)

    @classmethod
    def eigenstate(cls, levels, index: int) -> "PureState":
        spec = _spectrum(levels)
        amp = np.zeros(spec.count, dtype=complex)
        amp[index] = 1.0
        return cls(spec, amp)

    @property
    def levels(self) -> np.ndarray:
        return self.spectrum.levels

    @property
    def weights(self) -> np.ndarray:
        """Occupation probabilities ``|c_n|^2``."""
        return np.abs(self.amplitudes) ** 2

    @property
    def mean_energy(self) -> float:
        return float(np.dot(self.weights, self.levels))

    @property
    def energy_spread(self) -> float:
        e = self.mean_energy
        var = float(np.dot(self.weights, (self.levels - e) ** 2))
        return math.sqrt(max(var, 0.0))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class TwoLevelState:
    """The state ``sqrt(1 - xi^2)|0> + xi|e0>``."""
    xi: float
    e0: float

    def __post_init__(self):
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError(f"xi must lie in [0, 1], got {self.xi}")
        if not self.e0 > 0:
            raise ValueError(f"e0 must be positive, got {self.e0}")

    @property
    def pure(self) -> PureState:
        amp = [math.sqrt(1.0 - self.xi ** 2), self.xi]
        return PureState(EnergySpectrum([0.0, self.e0]), amp)

    @property
    def mean_energy(self) -> float:
        return self.xi ** 2 * self.e0

    @property
    def energy_spread(self) -> float:
        return self.xi * math.sqrt(1.0 - self.xi ** 2) * self.e0


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    spectrum: EnergySpectrum
    matrix: HermitianMatrix

    def __post_init__(self):
        spec = _spectrum(self.spectrum)
        mat = self.matrix if isinstance(self.matrix, HermitianMatrix) else HermitianMatrix(self.matrix)
        if mat.dimension != spec.count:
            raise SpectrumMismatch(f"{mat.dimension}x{mat.dimension} matrix for "
                                   f"{spec.count} levels")
        tr = np.trace(mat.entries)
        if abs(tr - 1.0) > NORM_TOL:
            raise NotNormalized(f"trace = {tr!r}")
        w, _ = eigh(mat)
        if w[0] < -1e-12:
            raise BadProbabilities(f"negative eigenvalue {w[0]:.3g}")
        object.__setattr__(self, "spectrum", spec)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        return cls(state.spectrum, state.projector())

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    @property
    def levels(self) -> np.ndarray:
        return self.spectrum.levels

    @property
    def mean_energy(self) -> float:
        return float(np.real(np.dot(np.diag(self.entries), self.levels)))

    @property
    def energy_spread(self) -> float:
        e = self.mean_energy
        pops = np.real(np.diag(self.entries))
        return math.sqrt(max(float(np.dot(pops, (self.levels - e) ** 2)), 0.0))


def mean_energy(state) -> float:
    """Average energy ``<H>`` of a pure, composite or mixed state."""
    if isinstance(state, CompositeState):
        state = state.as_pure_state()
    return state.mean_energy


def energy_spread(state) -> float:
    """Energy standard deviation ``sqrt(<(H - E)^2>)``."""
    if isinstance(state, CompositeState):
        state = state.as_pure_state()
    return state.energy_spread


def _check_probs(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float).ravel()
    if p.size == 0 or np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise BadProbabilities("probabilities must be finite and positive")
    if abs(p.sum() - 1.0) > NORM_TOL:
        raise BadProbabilities(f"probabilities sum to {p.sum()!r}")
    return p


def _common_spectrum(states: Sequence[PureState]) -> EnergySpectrum:
    spec = states[0].spectrum
    for s in states[1:]:
        if s.spectrum != spec:
            raise SpectrumMismatch("ensemble members live on different spectra")
    return spec


def ensemble_to_density(probs, states: Sequence[PureState]) -> DensityMatrix:
    """``sum_n p_n |phi_n><phi_n|`` for a (not necessarily orthogonal) ensemble."""
    p = _check_probs(probs)
    if len(states) != p.size:
        raise BadProbabilities(f"{p.size} probabilities for {len(states)} states")
    spec = _common_spectrum(states)
    amps = np.array([s.amplitudes for s in states])
    rho = (amps.T * p) @ amps.conj()
    return DensityMatrix(spec, 0.5 * (rho + rho.conj().T))


# ----------------------------------------------------------------------------
# Composite systems

@dataclass(frozen=True, eq=False)
class CompositeState:
    """Pure state of ``M`` non-interacting subsystems.

    ``joint`` holds the amplitudes over the product basis in tensor
    (row-major) order; ``joint_levels`` are the matching sums of subsystem
    levels.  ``factors`` is kept when the state was built as a product.
    """
    subsystems: tuple
    joint: np.ndarray
    factors: tuple | None = None

    def __post_init__(self):
        subs = tuple(_spectrum(s) for s in self.subsystems)
        if not subs:
            raise ValueError("need at least one subsystem")
        dim = math.prod(s.count for s in subs)
        if dim > MAX_JOINT_DIMENSION:
            raise ValueError(f"joint dimension {dim} exceeds {MAX_JOINT_DIMENSION}")
        amp = np.array(self.joint, dtype=complex).ravel()
        if amp.size != dim:
            raise SpectrumMismatch(f"{amp.size} joint amplitudes for dimension {dim}")
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"joint norm = {norm!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "subsystems", subs)
        object.__setattr__(self, "joint", amp)
        if self.factors is not None:
            object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def subsystem_count(self) -> int:
        return len(self.subsystems)

    @property
    def dims(self) -> tuple:
        return tuple(s.count for s in self.subsystems)

    @property
    def joint_levels(self) -> np.ndarray:
        return reduce(lambda acc, s: np.add.outer(acc, s.levels).ravel(),
                      self.subsystems[1:], self.subsystems[0].levels.copy())

    @property
    def is_separable(self) -> bool:
        return self.factors is not None

    def as_pure_state(self) -> PureState:
        """The joint state as a single system, levels sorted ascending."""
        lv = self.joint_levels
        order = np.argsort(lv, kind="stable")
        return PureState(EnergySpectrum(lv[order]), self.joint[order])

    def reduced_density(self, k: int) -> DensityMatrix:
        """Partial trace over every subsystem except ``k``."""
        psi = self.joint.reshape(self.dims)
        psi = np.moveaxis(psi, k, 0).reshape(self.dims[k], -1)
        rho = psi @ psi.conj().T
        return DensityMatrix(self.subsystems[k], 0.5 * (rho + rho.conj().T))

    @property
    def mean_energy(self) -> float:
        return float(np.dot(np.abs(self.joint) ** 2, self.joint_levels))

    @property
    def energy_spread(self) -> float:
        return self.as_pure_state().energy_spread


def composite_product(factors: Sequence[PureState]) -> CompositeState:
    """Separable state ``|psi_1>|psi_2>...|psi_M>``."""
    factors = tuple(factors)
    if not factors:
        raise ValueError("need at least one factor")
    joint = reduce(lambda acc, f: np.outer(acc, f.amplitudes).ravel(),
                   factors[1:], factors[0].amplitudes.copy())
    joint = joint / np.linalg.norm(joint)
    return CompositeState(tuple(f.spectrum for f in factors), joint, factors)


def entangled_family(xi: float, e0: float, m: int) -> CompositeState:
    """``sqrt(1 - xi^2)|0...0> + xi|e0...e0>`` on ``m`` two-level subsystems."""
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi must lie in [0, 1], got {xi}")
    if not e0 > 0:
        raise ValueError("e0 must be positive")
    if m < 1:
        raise ValueError("m must be a positive integer")
    joint = np.zeros(2 ** m, dtype=complex)
    joint[0] = math.sqrt(1.0 - xi * xi)
    joint[-1] = xi
    spec = EnergySpectrum([0.0, e0])
    return CompositeState((spec,) * m, joint)


# ----------------------------------------------------------------------------
# JSON state descriptions

def _pure_from_dict(d: dict) -> PureState:
    try:
        levels = np.asarray(d["levels"], dtype=float)
        re = np.asarray(d["amplitudes_re"], dtype=float)
        im = np.asarray(d.get("amplitudes_im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFormatError(f"bad pure state entry: {exc}") from exc
    if re.shape != im.shape:
        raise StateFormatError("amplitudes_re and amplitudes_im differ in length")
    return PureState(EnergySpectrum(levels), re + 1j * im)


def _pure_to_dict(s: PureState) -> dict:
    return {"levels": s.levels.tolist(),
            "amplitudes_re": s.amplitudes.real.tolist(),
            "amplitudes_im": s.amplitudes.imag.tolist()}


def state_from_dict(d: dict):
    """Decode a state description.

    Returns a :class:`PureState`, a :class:`CompositeState`, or a
    ``(probs, states)`` tuple for an ensemble.
    """
    if not isinstance(d, dict):
        raise StateFormatError("state description must be a JSON object")
    try:
        if "probs" in d:
            states = [_pure_from_dict(s) for s in d["states"]]
            probs = np.asarray(d["probs"], dtype=float)
            _check_probs(probs)
            if len(states) != probs.size:
                raise StateFormatError("probs and states differ in length")
            _common_spectrum(states)
            return probs, states
        if "factors" in d:
            return composite_product([_pure_from_dict(f) for f in d["factors"]])
        if "joint" in d:
            j = d["joint"]
            re = np.asarray(j["amplitudes_re"], dtype=float)
            im = np.asarray(j.get("amplitudes_im", np.zeros_like(re)), dtype=float)
            subs = [EnergySpectrum(lv) for lv in j["subsystem_levels"]]
            return CompositeState(tuple(subs), re + 1j * im)
        return _pure_from_dict(d)
    except StateFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFormatError(str(exc)) from exc


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return _pure_to_dict(state)
    if isinstance(state, CompositeState):
        if state.factors is not None:
            return {"factors": [_pure_to_dict(f) for f in state.factors]}
        return {"joint": {"subsystem_levels": [s.levels.tolist() for s in state.subsystems],
                          "amplitudes_re": state.joint.real.tolist(),
                          "amplitudes_im": state.joint.imag.tolist()}}
    if isinstance(state, tuple) and len(state) == 2:
        probs, states = state
        return {"probs": list(map(float, probs)),
                "states": [_pure_to_dict(s) for s in states]}
    raise TypeError(f"cannot serialize {type(state).__name__}")


def read_state_file(path) -> object:
    try:
        with open(Path(path)) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFormatError(f"{path}: {exc}") from exc
    return state_from_dict(data)
