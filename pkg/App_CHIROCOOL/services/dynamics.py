"""
Evolución temporal rho(t) = e^{tL}[rho(0)] en forma matricial con un
integrador Runge-Kutta adaptativo (DOP853) y estado inicial térmico.
"""

import csv
import logging
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.integrate import DOP853

from ..exceptions import DimensionMismatchError, InvalidTruncationError, StiffnessError, UndefinedNormalizationError
from ..utils import parametro
from .chain_model import build_dissipators, build_hamiltonian
from .liouvillian import MatrixGenerator, unvec, vec
from .operator_algebra import SpaceDescriptor, excited_projector, number_operator
from .steady_state import DensityMatrix, single_ion_reference

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    times: np.ndarray
    occupations: np.ndarray  # (N, T): <n_i(t)>
    normalized: np.ndarray  # (N, T): ñ_i(t); NaN si Omega_i = 0
    excited: np.ndarray  # (N, T): <σ_i†σ_i>(t)
    snapshots: dict = field(default_factory=dict, repr=False)
    steps: int = 0
    max_trace_drift: float = 0.0
    max_hermiticity_drift: float = 0.0
    config: object = None

    @property
    def n_ions(self):
        return self.occupations.shape[0]

    def occupation(self, ion):
        return self.occupations[ion - 1]

    def ntilde(self, ion):
        return self.normalized[ion - 1]

    def final_state(self):
        if not self.snapshots:
            return None
        return self.snapshots[max(self.snapshots)]

    def to_csv(self, path):
        """Columnas t, n_1..n_N, ntilde_1..ntilde_N (floats con repr completo)."""
        n = self.n_ions
        encabezado = ["t"] + [f"n_{i}" for i in range(1, n + 1)] + [f"ntilde_{i}" for i in range(1, n + 1)]
        with open(path, "w", newline="", encoding="utf-8") as archivo:
            escritor = csv.writer(archivo)
            escritor.writerow(encabezado)
            for k, t in enumerate(self.times):
                fila = [repr(float(t))]
                fila += [repr(float(v)) for v in self.occupations[:, k]]
                fila += [repr(float(v)) for v in self.normalized[:, k]]
                escritor.writerow(fila)
        return path


def thermal_populations(n0, n_max):
    """p_n = n0^n / (n0+1)^(n+1), n = 0..n_max, sin renormalizar."""
    n = np.arange(n_max + 1)
    return n0**n / (n0 + 1.0) ** (n + 1)


def thermal_state(n0, n_max, n_ions):
    """
    Producto de estados térmicos truncados en |g>, renormalizado a traza 1
    después de la truncación.
    """
    if n0 < 0:
        raise ValueError(f"n0 debe ser >= 0 (recibido {n0})")
    if n_max < 1:
        raise InvalidTruncationError(f"n_max debe ser >= 1 (recibido {n_max})")
    space = SpaceDescriptor(n_ions, n_max)
    poblaciones = thermal_populations(n0, n_max)
    poblaciones = poblaciones / poblaciones.sum()
    espin_g = np.array([1.0, 0.0])
    sitio = np.kron(espin_g, poblaciones)
    diagonal = reduce(np.kron, [sitio] * n_ions)
    return DensityMatrix(np.diag(diagonal).astype(complex), space)


def _grilla(t_end, grid, points):
    if grid is None:
        grid = np.linspace(0.0, t_end, points)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("La grilla de salida debe ser un vector no vacío.")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("La grilla de salida debe ser estrictamente creciente.")
    if grid[0] < 0 or grid[-1] > t_end * (1 + 1e-12):
        raise ValueError(f"La grilla de salida debe estar contenida en [0, {t_end}].")
    return grid


def evolve(config, rho0, t_end, grid=None, points=201, snapshot_times=()):
    """
    Integra dρ/dt = L[ρ] desde ρ0 hasta t_end y muestrea los observables en la grilla.

    Solo se guardan estados completos en snapshot_times (y siempre el final).
    La traza no se renormaliza durante la integración: se monitorea su deriva.
    """
    if not t_end > 0:
        raise ValueError(f"t_end debe ser > 0 (recibido {t_end})")
    space = config.space
    dim = space.total_dim
    if rho0.data.shape != (dim, dim):
        raise DimensionMismatchError(f"rho0 {rho0.data.shape} no coincide con D={dim}")
    grid = _grilla(t_end, grid, points)
    instantes = sorted({float(t) for t in snapshot_times} | {float(grid[-1])})

    generador = MatrixGenerator(build_hamiltonian(config, space), build_dissipators(config), space)
    numeros = [number_operator(space, i) for i in range(1, config.n_ions + 1)]
    proyectores = [excited_projector(space, i) for i in range(1, config.n_ions + 1)]
    referencias = []
    for i in range(1, config.n_ions + 1):
        try:
            referencias.append(single_ion_reference(config, i))
        except UndefinedNormalizationError:
            referencias.append(np.nan)

    def derivada(_t, y):
        return vec(generador(unvec(y, dim)))

    diagonal = np.arange(dim) * (dim + 1)
    ocupaciones = np.empty((config.n_ions, grid.size))
    excitadas = np.empty((config.n_ions, grid.size))
    snapshots = {}
    deriva_hermitica = 0.0

    def registrar(k, y):
        nonlocal deriva_hermitica
        rho = unvec(y, dim)
        deriva_hermitica = max(deriva_hermitica, float(np.linalg.norm(rho - rho.conj().T)))
        for i in range(config.n_ions):
            ocupaciones[i, k] = np.real(np.trace(numeros[i] @ rho))
            excitadas[i, k] = np.real(np.trace(proyectores[i] @ rho))

    def guardar(t, y):
        snapshots[t] = DensityMatrix(unvec(np.array(y, copy=True), dim), space)

    solver = DOP853(
        derivada,
        0.0,
        vec(rho0.data).astype(complex),
        t_end,
        rtol=parametro("ODE_RTOL"),
        atol=parametro("ODE_ATOL"),
    )
    k = 0
    s = 0
    while k < grid.size and grid[k] <= 0.0:
        registrar(k, solver.y)
        k += 1
    while s < len(instantes) and instantes[s] <= 0.0:
        guardar(instantes[s], solver.y)
        s += 1

    pasos = 0
    deriva_traza = 0.0
    while solver.status == "running":
        mensaje = solver.step()
        if solver.status == "failed":
            raise StiffnessError(
                f"El integrador falló en t={solver.t:.6g}: {mensaje}. "
                "Reduzca Gamma·dt o use un método de Krylov."
            )
        pasos += 1
        deriva_traza = max(deriva_traza, abs(solver.y[diagonal].sum() - 1.0))
        if (k < grid.size and grid[k] <= solver.t) or (s < len(instantes) and instantes[s] <= solver.t):
            interpolante = solver.dense_output()
            while k < grid.size and grid[k] <= solver.t:
                registrar(k, interpolante(grid[k]))
                k += 1
            while s < len(instantes) and instantes[s] <= solver.t:
                guardar(instantes[s], interpolante(instantes[s]))
                s += 1

    if deriva_traza > parametro("TRACE_DRIFT_TOL"):
        logger.warning("Deriva de traza %.2e por encima de la tolerancia", deriva_traza)
    if deriva_hermitica > parametro("TRACE_DRIFT_TOL"):
        logger.warning("Deriva de hermiticidad %.2e por encima de la tolerancia", deriva_hermitica)
    logger.info("Evolución D=%d hasta t=%.4g: %d pasos, deriva de traza %.2e", dim, t_end, pasos, deriva_traza)

    normalizadas = ocupaciones / np.asarray(referencias)[:, None]
    return Trajectory(
        times=grid,
        occupations=ocupaciones,
        normalized=normalizadas,
        excited=excitadas,
        snapshots=snapshots,
        steps=pasos,
        max_trace_drift=float(deriva_traza),
        max_hermiticity_drift=deriva_hermitica,
        config=config,
    )
