"""
Sistema reducido O(N^2) para el estado estacionario del ion objetivo en una
cadena de N iones con excitación asimétrica (solo el objetivo, a la izquierda,
está excitado) y separación entre iones múltiplo de 2π.

Elementos de matriz (tras trazar los fonones refrigerantes; el objetivo se
etiqueta con espín y fonón, cada refrigerante con su espín):
    A     = rho_{g1g..g, e0g..g}
    B_i   = rho_{g1g..g, g0g..e_i..g}
    C_i   = rho_{e0g..g, g0g..e_i..g}
    D_ij  = rho_{g0g..e_i..g, g0g..e_j..g}
con rho_{g0g..g, g0g..g} = 1 a orden dominante.
"""

import logging
import string
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import minimize_scalar

from ..exceptions import DegenerateParameterError
from ..utils import parametro
from .analytic import single_ion_nst
from .steady_state import DensityMatrix

logger = logging.getLogger(__name__)

MIN_GRID_RESOLUTION = 50
REFINEMENT_ROUNDS = 3


@dataclass(frozen=True)
class ReducedSolution:
    n_ions: int
    gamma_r: float
    gamma_l: float
    gamma_ng: float
    eta: float
    omega: float
    A: complex
    B: tuple
    C: tuple
    D: np.ndarray = field(repr=False)
    rho_e0: complex = 0j
    rho_g1: complex = 0j
    rho_e1: float = 0.0
    rho_g0: float = 1.0
    n1: float = 0.0
    ntilde1: float = 0.0
    condition: float = 1.0

    @property
    def n_unknowns(self):
        return self.n_ions * (self.n_ions + 3) // 2

    @property
    def total_decay(self):
        return self.gamma_r + self.gamma_l + self.gamma_ng

    def as_elements(self):
        """Valores por par de etiquetas (fila, columna), con la convención de trace_refrigerant_phonons."""
        n = self.n_ions

        def etiqueta(objetivo, excitado=None):
            refrigerantes = ["e" if excitado == k else "g" for k in range(1, n)]
            return objetivo + "".join(refrigerantes)

        elementos = {
            (etiqueta("g0"), etiqueta("g0")): complex(self.rho_g0),
            (etiqueta("e1"), etiqueta("e1")): complex(self.rho_e1),
            (etiqueta("e0"), etiqueta("e0")): complex(self.rho_e0),
            (etiqueta("g1"), etiqueta("g1")): complex(self.rho_g1),
            (etiqueta("g1"), etiqueta("e0")): complex(self.A),
        }
        for i in range(1, n):
            elementos[(etiqueta("g1"), etiqueta("g0", i))] = complex(self.B[i - 1])
            elementos[(etiqueta("e0"), etiqueta("g0", i))] = complex(self.C[i - 1])
            for j in range(1, n):
                elementos[(etiqueta("g0", i), etiqueta("g0", j))] = complex(self.D[i - 1, j - 1])
        return elementos

    def to_record(self):
        return {
            "n_ions": self.n_ions,
            "gamma_r": self.gamma_r,
            "gamma_l": self.gamma_l,
            "gamma_ng": self.gamma_ng,
            "beta": (self.gamma_r + self.gamma_l) / self.total_decay,
            "n1": self.n1,
            "ntilde1": self.ntilde1,
            "unknowns": self.n_unknowns,
            "condition": self.condition,
        }


@dataclass(frozen=True)
class MinSearchResult:
    n_ions: int
    beta: float
    gamma_r_over_gamma: float
    ntilde1_min: float
    grid_beta: float
    grid_gamma_r_over_gamma: float
    grid_ntilde1: float

    def to_record(self):
        return {
            "n_ions": self.n_ions,
            "beta": self.beta,
            "gamma_r_over_gamma": self.gamma_r_over_gamma,
            "ntilde1_min": self.ntilde1_min,
            "grid": {
                "beta": self.grid_beta,
                "gamma_r_over_gamma": self.grid_gamma_r_over_gamma,
                "ntilde1": self.grid_ntilde1,
            },
        }


class _Indices:
    """Posición de cada incógnita: [A, B_1..B_{N-1}, C_1..C_{N-1}, D_ij (i<=j), rho_e0]."""

    def __init__(self, n_ions):
        self.m = n_ions - 1
        self.A = 0
        self._pares = {}
        siguiente = 1 + 2 * self.m
        for i in range(1, self.m + 1):
            for j in range(i, self.m + 1):
                self._pares[(i, j)] = siguiente
                siguiente += 1
        self.rho_e0 = siguiente
        self.total = siguiente + 1

    def B(self, i):
        return i

    def C(self, i):
        return self.m + i

    def D(self, i, j):
        return self._pares[(min(i, j), max(i, j))]


def _sistema(n_ions, gamma_r, gamma_l, total_decay, r, rho_e1):
    idx = _Indices(n_ions)
    m = idx.m
    matriz = np.zeros((idx.total, idx.total), dtype=complex)
    lado_derecho = np.zeros(idx.total, dtype=complex)
    fila = 0

    # -2i r A = 2 Gamma rho_e1
    matriz[fila, idx.A] = -2j * r
    lado_derecho[fila] = 2.0 * total_decay * rho_e1
    fila += 1

    for i in range(1, m + 1):
        matriz[fila, idx.B(i)] += total_decay
        matriz[fila, idx.A] += 2.0 * gamma_r
        for j in range(1, i):
            matriz[fila, idx.B(j)] += 2.0 * gamma_r
        for j in range(i + 1, m + 1):
            matriz[fila, idx.B(j)] += 2.0 * gamma_l
        matriz[fila, idx.C(i)] += 1j * r
        fila += 1

    for i in range(1, m + 1):
        matriz[fila, idx.C(i)] += 2.0 * total_decay
        for j in range(1, i):
            matriz[fila, idx.C(j)] += 2.0 * gamma_r
        for j in range(i + 1, m + 1):
            matriz[fila, idx.C(j)] += 2.0 * gamma_l
        for j in range(1, m + 1):
            matriz[fila, idx.D(j, i)] += 2.0 * gamma_l
        matriz[fila, idx.B(i)] += 1j * r
        matriz[fila, idx.rho_e0] += 2.0 * gamma_r
        fila += 1

    for i in range(1, m + 1):
        for j in range(i, m + 1):
            matriz[fila, idx.D(i, j)] += total_decay
            for k in range(1, i):
                matriz[fila, idx.D(k, j)] += gamma_r
            for k in range(i + 1, m + 1):
                matriz[fila, idx.D(k, j)] += gamma_l
            for k in range(1, j):
                matriz[fila, idx.D(i, k)] += gamma_r
            for k in range(j + 1, m + 1):
                matriz[fila, idx.D(i, k)] += gamma_l
            matriz[fila, idx.C(i)] += gamma_r
            matriz[fila, idx.C(j)] += gamma_r
            fila += 1

    # 2 Gamma rho_e0 + 4 gamma_L sum C + 2i r A = 0
    matriz[fila, idx.rho_e0] = 2.0 * total_decay
    for j in range(1, m + 1):
        matriz[fila, idx.C(j)] += 4.0 * gamma_l
    matriz[fila, idx.A] += 2j * r
    return idx, matriz, lado_derecho


def solve_reduced(n_ions, gamma_r, gamma_l, gamma_ng, eta, omega):
    """
    Resuelve el sistema lineal de N(N+3)/2 incógnitas y arma <n_1>_st = rho_e1 + rho_g1.

    Lanza DegenerateParameterError si el número de condición supera REDUCED_MAX_CONDITION.
    """
    if n_ions < 2:
        raise ValueError(f"El sistema reducido requiere N >= 2 (recibido {n_ions})")
    total_decay = gamma_r + gamma_l + gamma_ng
    r = eta * omega
    if total_decay <= 0 or r == 0:
        raise DegenerateParameterError(f"Parámetros degenerados: Gamma={total_decay}, eta*Omega={r}")
    rho_e1 = r * r / 16.0

    idx, matriz, lado_derecho = _sistema(n_ions, gamma_r, gamma_l, total_decay, r, rho_e1)
    condicion = float(np.linalg.cond(matriz))
    if not np.isfinite(condicion) or condicion > parametro("REDUCED_MAX_CONDITION"):
        raise DegenerateParameterError(
            f"Sistema reducido singular (condición {condicion:.3e}) para N={n_ions}, "
            f"gamma_R={gamma_r}, gamma_L={gamma_l}, gamma_ng={gamma_ng}"
        )
    x = np.linalg.solve(matriz, lado_derecho)

    m = idx.m
    A = x[idx.A]
    B = tuple(complex(x[idx.B(i)]) for i in range(1, m + 1))
    C = tuple(complex(x[idx.C(i)]) for i in range(1, m + 1))
    D = np.array([[x[idx.D(i, j)] for j in range(1, m + 1)] for i in range(1, m + 1)])
    rho_e0 = x[idx.rho_e0]
    rho_g1 = rho_e0 + (total_decay * A + 2.0 * gamma_l * sum(B)) / (1j * r)

    n1 = float(np.real(rho_e1 + rho_g1))
    ntilde1 = n1 / single_ion_nst(total_decay, eta, omega)
    logger.debug("Sistema reducido N=%d: %d incógnitas, condición %.2e, n1=%.4e", n_ions, idx.total, condicion, n1)
    return ReducedSolution(
        n_ions=n_ions,
        gamma_r=gamma_r,
        gamma_l=gamma_l,
        gamma_ng=gamma_ng,
        eta=eta,
        omega=omega,
        A=complex(A),
        B=B,
        C=C,
        D=D,
        rho_e0=complex(rho_e0),
        rho_g1=complex(rho_g1),
        rho_e1=rho_e1,
        rho_g0=1.0,
        n1=n1,
        ntilde1=ntilde1,
        condition=condicion,
    )


def _tasas(total_decay, beta, ratio):
    gamma = beta * total_decay
    gamma_r = ratio * gamma
    return gamma_r, gamma - gamma_r, total_decay - gamma


def reduced_point(n_ions, total_decay, eta, omega, beta, ratio):
    """ñ_1 en un punto (beta, gamma_R/gamma) a Gamma fijo."""
    gamma_r, gamma_l, gamma_ng = _tasas(total_decay, beta, ratio)
    return solve_reduced(n_ions, gamma_r, gamma_l, gamma_ng, eta, omega)


def reduced_scan(n_ions, total_decay, eta, omega, betas, ratios, observable="ntilde1"):
    """Grilla de ñ_1 (o n1) sobre [beta, gamma_R/gamma]; los puntos degenerados quedan en NaN."""
    betas = np.asarray(betas, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    grilla = np.full((betas.size, ratios.size), np.nan)
    for a, beta in enumerate(betas):
        for b, ratio in enumerate(ratios):
            try:
                grilla[a, b] = getattr(reduced_point(n_ions, total_decay, eta, omega, beta, ratio), observable)
            except DegenerateParameterError as error:
                logger.warning("Punto degenerado beta=%.4g, gamma_R/gamma=%.4g: %s", beta, ratio, error)
    return grilla


def min_search(n_ions, total_decay, eta, omega, resolution=(61, 61)):
    """
    Mínimo global de ñ_1 sobre (beta, gamma_R/gamma) en [0,1]^2.

    Barrido grueso y refinamiento alternado por eje con Brent acotado alrededor de la
    celda ganadora; los empates se resuelven hacia el gamma_R menor.
    """
    n_beta, n_ratio = resolution
    if min(n_beta, n_ratio) < MIN_GRID_RESOLUTION:
        raise ValueError(f"La grilla de búsqueda debe ser al menos {MIN_GRID_RESOLUTION}x{MIN_GRID_RESOLUTION}")
    betas = np.linspace(0.0, 1.0, n_beta)
    ratios = np.linspace(0.0, 1.0, n_ratio)
    grilla = reduced_scan(n_ions, total_decay, eta, omega, betas, ratios)

    valores = np.where(np.isnan(grilla), np.inf, grilla).ravel()
    razones = np.tile(ratios, n_beta)
    ganador = np.lexsort((razones, valores))[0]
    a, b = np.unravel_index(ganador, grilla.shape)
    beta, ratio, mejor = float(betas[a]), float(ratios[b]), float(grilla[a, b])
    paso_beta, paso_ratio = betas[1] - betas[0], ratios[1] - ratios[0]

    def objetivo(beta_, ratio_):
        try:
            return reduced_point(n_ions, total_decay, eta, omega, beta_, ratio_).ntilde1
        except DegenerateParameterError:
            return np.inf

    for _ in range(REFINEMENT_ROUNDS):
        resultado = minimize_scalar(
            lambda valor: objetivo(valor, ratio),
            bounds=(max(0.0, beta - paso_beta), min(1.0, beta + paso_beta)),
            method="bounded",
        )
        if resultado.fun < mejor:
            beta, mejor = float(resultado.x), float(resultado.fun)
        resultado = minimize_scalar(
            lambda valor: objetivo(beta, valor),
            bounds=(max(0.0, ratio - paso_ratio), min(1.0, ratio + paso_ratio)),
            method="bounded",
        )
        if resultado.fun < mejor:
            ratio, mejor = float(resultado.x), float(resultado.fun)

    logger.info("min_search N=%d: ñ1_min=%.5f en beta=%.4f, gamma_R/gamma=%.4f", n_ions, mejor, beta, ratio)
    return MinSearchResult(
        n_ions=n_ions,
        beta=beta,
        gamma_r_over_gamma=ratio,
        ntilde1_min=mejor,
        grid_beta=float(betas[a]),
        grid_gamma_r_over_gamma=float(ratios[b]),
        grid_ntilde1=float(grilla[a, b]),
    )


def _excitaciones(etiqueta):
    espin_objetivo, fonon, refrigerantes = etiqueta[0], etiqueta[1], etiqueta[2:]
    return (espin_objetivo == "e") + (fonon == "1") + refrigerantes.count("e")


def _etiquetas(n_ions):
    return [s + n + "".join(resto) for s, n, *resto in product("ge", "01", *(["ge"] * (n_ions - 1)))]


def element_filter(n_ions):
    """
    Pares (fila, columna) retenidos: distancia de Hamming al estado fundamental <= 2
    y a lo sumo una excitación (e o n=1) por índice, más rho_{e1g..g, e1g..g}.
    """
    if n_ions < 2:
        raise ValueError(f"element_filter requiere N >= 2 (recibido {n_ions})")
    excepcion = "e1" + "g" * (n_ions - 1)
    retenidos = []
    for fila in _etiquetas(n_ions):
        for columna in _etiquetas(n_ions):
            ef, ec = _excitaciones(fila), _excitaciones(columna)
            if (ef + ec <= 2 and ef <= 1 and ec <= 1) or fila == columna == excepcion:
                retenidos.append((fila, columna))
    return retenidos


def trace_refrigerant_phonons(rho, config):
    """
    Traza parcial sobre los fonones de los iones 2..N de un estado completo, con el
    fonón del objetivo restringido a {0, 1}. Acepta DensityMatrix o ndarray D x D. Devuelve {(fila, columna): valor}.
    """
    n = config.n_ions
    p = config.n_max + 1
    datos = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    tensor = datos.reshape([2, p] * (2 * n))

    letras = iter(string.ascii_letters)
    fila, columna, salida_fila, salida_columna = [], [], [], []
    for sitio in range(1, n + 1):
        s, f, S, F = next(letras), next(letras), next(letras), next(letras)
        if sitio > 1:
            F = f  # índice repetido: traza del fonón refrigerante
        fila += [s, f]
        columna += [S, F]
        salida_fila += [s] + ([f] if sitio == 1 else [])
        salida_columna += [S] + ([F] if sitio == 1 else [])
    subindices = "".join(fila + columna) + "->" + "".join(salida_fila + salida_columna)
    reducido = np.einsum(subindices, tensor)

    # ejes: (s1, n1, s2..sN, S1, N1, S2..SN)
    elementos = {}
    for indice_fila in product(range(2), range(2), *([range(2)] * (n - 1))):
        for indice_columna in product(range(2), range(2), *([range(2)] * (n - 1))):
            valor = reducido[indice_fila + indice_columna]
            elementos[(_etiqueta(indice_fila), _etiqueta(indice_columna))] = complex(valor)
    return elementos


def _etiqueta(indice):
    espines = "ge"
    return espines[indice[0]] + str(indice[1]) + "".join(espines[k] for k in indice[2:])
