"""
Estado estacionario rho_st = Null(L) con Tr(rho_st) = 1 y observables derivados.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..exceptions import (
    AmbiguousSteadyStateError,
    InvalidDensityMatrixError,
    NonNormalizableSteadyStateError,
    NumericalError,
    UndefinedNormalizationError,
)
from ..utils import parametro
from .chain_model import ChainConfig, build_dissipators, build_hamiltonian
from .liouvillian import MatrixGenerator, build_liouvillian, unvec, vec
from .operator_algebra import excited_projector, number_operator, spin_lowering

logger = logging.getLogger(__name__)

# σ = INVERSE_ITERATION_SHIFT·Γ: lejos de la precisión de máquina y por debajo de la brecha espectral.
INVERSE_ITERATION_SHIFT = 1e-6
INVERSE_ITERATION_POLISH = 2
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    data: np.ndarray = field(repr=False)
    space: object = None

    @property
    def dim(self):
        return self.data.shape[0]

    def trace(self):
        return complex(np.trace(self.data))

    def expect(self, operator):
        """Tr(rho O) para un operador disperso o denso."""
        return complex(np.trace(operator @ self.data))

    def hermiticity_error(self):
        return float(np.linalg.norm(self.data - self.data.conj().T))

    def min_eigenvalue(self):
        return float(np.min(np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))))

    def check(self, herm_tol=1e-10, trace_tol=1e-10, positivity_tol=1e-8):
        """Lanza InvalidDensityMatrixError si no es hermítica, de traza 1 y semidefinida positiva."""
        if self.hermiticity_error() > herm_tol:
            raise InvalidDensityMatrixError(f"rho no es hermítica (||rho - rho†|| = {self.hermiticity_error():.2e})")
        if abs(self.trace() - 1) > trace_tol:
            raise InvalidDensityMatrixError(f"Tr(rho) = {self.trace():.12g} != 1")
        if self.min_eigenvalue() < -positivity_tol:
            raise InvalidDensityMatrixError(f"rho tiene autovalor {self.min_eigenvalue():.2e} < 0")
        return self


@dataclass(frozen=True)
class SteadyObservables:
    occupations: tuple
    normalized: tuple  # None donde la normalización no está definida (Omega_i = 0)
    excited: tuple
    correlations: np.ndarray = field(repr=False)  # C[i, j] = <σ_i†σ_j> - <σ_i†><σ_j>
    residual: float = 0.0
    n_max: int = 1
    dim: int = 0

    def correlation(self, i, j):
        return complex(self.correlations[i - 1, j - 1])

    def to_record(self):
        n = len(self.occupations)
        return {
            "n": list(self.occupations),
            "ntilde": list(self.normalized),
            "excited": list(self.excited),
            "c_st": {
                f"{i}{j}": [self.correlations[i - 1, j - 1].real, self.correlations[i - 1, j - 1].imag]
                for i in range(1, n + 1)
                for j in range(i + 1, n + 1)
            },
            "residual": self.residual,
            "n_max": self.n_max,
            "dim": self.dim,
        }


def _normalize(vector, liouvillian):
    rho = unvec(vector, liouvillian.dim)
    traza = np.trace(rho)
    if abs(traza) < 1e-300 or not np.isfinite(traza):
        raise NonNormalizableSteadyStateError("El vector nulo tiene traza cero: no es normalizable.")
    rho = rho / traza
    return 0.5 * (rho + rho.conj().T)


def _null_vector_dense(liouvillian):
    _, valores, vh = scipy.linalg.svd(liouvillian.matrix.toarray())
    menor, segundo = valores[-1], valores[-2]
    escala = valores[0]
    ratio = parametro("DEGENERACY_RATIO")
    umbral = max(menor, np.finfo(float).eps * escala)
    if segundo <= ratio * umbral:
        raise AmbiguousSteadyStateError(
            f"Espacio nulo degenerado: valores singulares {menor:.3e} y {segundo:.3e}"
        )
    return vh[-1].conj()


def _null_vector_sparse(liouvillian):
    """
    Vector nulo por shift-invert: ARPACK sobre (L - σ)^-1 con σ > 0 fuera del
    espectro (Re λ <= 0), de modo que λ = 0 es el autovalor más cercano a σ.

    Los dos autovalores de mayor módulo de (L - σ)^-1 dan λ_0 ≈ 0 y el segundo
    autovalor λ_1 de L, que decide la degeneración.
    """
    matriz = liouvillian.matrix
    n = matriz.shape[0]
    sigma = INVERSE_ITERATION_SHIFT * liouvillian.rate_scale
    try:
        lu = spla.splu((matriz - sigma * sp.identity(n, dtype=complex, format="csc")).tocsc())
    except RuntimeError as error:
        raise NumericalError(f"Factorización LU de L - σ falló (σ = {sigma:.2e}): {error}") from error
    inversa = spla.LinearOperator(matriz.shape, matvec=lu.solve, dtype=complex)
    inicial = vec(np.eye(liouvillian.dim, dtype=complex) / liouvillian.dim)
    try:
        mu, vectores = spla.eigs(inversa, k=2, which="LM", v0=inicial)
    except spla.ArpackError as error:
        raise NumericalError(f"ARPACK no convergió en el espacio nulo: {error}") from error
    orden = np.argsort(-np.abs(mu))
    autovalores = sigma + 1.0 / mu[orden]
    x = vectores[:, orden[0]]
    for _ in range(INVERSE_ITERATION_POLISH):
        x = lu.solve(x)
        x = x / np.linalg.norm(x)
    logger.info(
        "Shift-invert: λ_0 = %.2e, λ_1 = %.2e, residuo %.2e",
        abs(autovalores[0]),
        abs(autovalores[1]),
        np.linalg.norm(matriz @ x),
    )

    umbral = max(abs(autovalores[0]), np.finfo(float).eps * spla.norm(matriz, 1))
    if abs(autovalores[1]) <= parametro("DEGENERACY_RATIO") * umbral:
        raise AmbiguousSteadyStateError(
            f"Espacio nulo degenerado: autovalores |{abs(autovalores[0]):.3e}|, |{abs(autovalores[1]):.3e}|"
        )
    return x


def solve_steady(liouvillian):
    """
    Devuelve rho_st con L[rho_st] = 0, hermitizada y de traza 1.

    SVD densa si D <= DENSE_SVD_MAX_DIM; si no, shift-invert con factorización
    LU dispersa. Un residuo por encima de STEADY_RESIDUAL_TOL·Γ lanza
    NumericalError y un autovalor de rho por debajo de -POSITIVITY_TOL lanza
    InvalidDensityMatrixError.
    """
    if liouvillian.dim <= parametro("DENSE_SVD_MAX_DIM"):
        vector = _null_vector_dense(liouvillian)
    else:
        vector = _null_vector_sparse(liouvillian)
    rho = DensityMatrix(_normalize(vector, liouvillian), liouvillian.space)
    residuo = steady_residual(liouvillian, rho)
    tolerancia = parametro("STEADY_RESIDUAL_TOL") * liouvillian.rate_scale
    if residuo > tolerancia:
        raise NumericalError(f"Residuo estacionario {residuo:.2e} por encima de la tolerancia {tolerancia:.2e}")
    rho.check(positivity_tol=POSITIVITY_TOL)
    logger.info("Estado estacionario D=%d, residuo %.2e", liouvillian.dim, residuo)
    return rho


def steady_residual(liouvillian, rho):
    return float(np.linalg.norm(liouvillian.matrix @ vec(rho.data)))


def steady_state(config):
    return solve_steady(build_liouvillian(config))


@lru_cache(maxsize=4096)
def _single_ion_reference(eta, delta, nu, n_max, omega, total_decay):
    referencia = ChainConfig(
        n_ions=1,
        eta=eta,
        omega=(omega,),
        gamma_r=0.0,
        gamma_l=0.0,
        gamma_ng=total_decay,
        delta=delta,
        nu=nu,
        n_max=n_max,
    )
    rho = steady_state(referencia)
    return float(np.real(rho.expect(number_operator(rho.space, 1))))


def single_ion_reference(config, i):
    """<n>^s_st de un ion aislado con el mismo eta, Delta, nu, n_max, su Omega_i y tasa total Gamma."""
    omega = config.omega[i - 1]
    if omega == 0:
        raise UndefinedNormalizationError(
            f"Omega_{i} = 0: el ion aislado no tiene estado estacionario único y <n>^s_st no define la normalización."
        )
    return _single_ion_reference(config.eta, config.delta, config.nu, config.n_max, omega, config.total_decay)


def normalized_occupation(config, i, rho_st=None):
    """ñ_i = <n_i>_st / <n>^s_st."""
    referencia = single_ion_reference(config, i)
    if referencia <= 0:
        raise UndefinedNormalizationError(f"<n>^s_st = {referencia} para el ion {i}")
    rho_st = rho_st or steady_state(config)
    return float(np.real(rho_st.expect(number_operator(rho_st.space, i)))) / referencia


def observables(rho_st, config):
    space = rho_st.space or config.space
    n = config.n_ions
    ocupaciones = []
    normalizadas = []
    excitadas = []
    for i in range(1, n + 1):
        ocupacion = float(np.real(rho_st.expect(number_operator(space, i))))
        ocupaciones.append(ocupacion)
        excitadas.append(float(np.real(rho_st.expect(excited_projector(space, i)))))
        try:
            normalizadas.append(ocupacion / single_ion_reference(config, i))
        except UndefinedNormalizationError:
            normalizadas.append(None)

    bajada = [spin_lowering(space, i) for i in range(1, n + 1)]
    medias = np.array([rho_st.expect(s) for s in bajada])  # <σ_i>; <σ_i†> = conj
    correlaciones = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            conjunta = rho_st.expect(bajada[i].conj().T @ bajada[j])
            correlaciones[i, j] = conjunta - np.conj(medias[i]) * medias[j]

    generador = MatrixGenerator(build_hamiltonian(config, space), build_dissipators(config), space)
    residuo = float(np.linalg.norm(generador(rho_st.data)))
    return SteadyObservables(
        occupations=tuple(ocupaciones),
        normalized=tuple(normalizadas),
        excited=tuple(excitadas),
        correlations=correlaciones,
        residual=residuo,
        n_max=space.n_max,
        dim=space.total_dim,
    )
