"""
Configuración física de la cadena de iones y construcción del Hamiltoniano y de
los disipadores quirales (guiados L/R y no guiado).

Unidades: la frecuencia de trampa nu fija la escala (nu = 1); tasas, Rabi y
desintonía se guardan en unidades de nu.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from ..exceptions import ConfigValidationError
from .operator_algebra import SpaceDescriptor, annihilation, number_operator, spin_lowering

logger = logging.getLogger(__name__)

ERROR = "error"
WARNING = "warning"

# Umbral a partir del cual eta*Omega o Gamma dejan de ser "<< nu".
SIDEBAND_LIMIT = 0.2


@dataclass(frozen=True)
class ChainConfig:
    n_ions: int
    eta: float
    omega: tuple
    gamma_r: float
    gamma_l: float
    gamma_ng: float = 0.0
    delta: float = -1.0
    nu: float = 1.0
    xi: float = 2 * math.pi
    positions: tuple | None = None  # fases explícitas k_s * r_mu
    n_max: int = 1
    target: int = 1

    def __post_init__(self):
        # Normaliza listas a tuplas para mantener la configuración inmutable y hasheable.
        object.__setattr__(self, "omega", tuple(float(o) for o in np.atleast_1d(self.omega)))
        if self.positions is not None:
            object.__setattr__(self, "positions", tuple(float(p) for p in self.positions))

    @property
    def gamma(self):
        return self.gamma_r + self.gamma_l

    @property
    def total_decay(self):
        return self.gamma_r + self.gamma_l + self.gamma_ng

    @property
    def beta(self):
        total = self.total_decay
        return self.gamma / total if total > 0 else 0.0

    @property
    def phases(self):
        """k_s * r_mu por ion; trampas equidistantes con fase xi si no hay posiciones explícitas."""
        if self.positions is not None:
            return np.asarray(self.positions, dtype=float)
        return self.xi * np.arange(self.n_ions, dtype=float)

    @property
    def space(self):
        return SpaceDescriptor(self.n_ions, self.n_max)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        datos = asdict(self)
        datos["omega"] = list(self.omega)
        datos["positions"] = list(self.positions) if self.positions is not None else None
        return datos


@dataclass(frozen=True)
class ConfigIssue:
    code: str
    field: str
    message: str
    severity: str = ERROR


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple = ()
    warnings: tuple = ()

    @property
    def ok(self):
        return not self.errors

    def raise_for_errors(self):
        if self.errors:
            raise ConfigValidationError(self.errors)


@dataclass(frozen=True)
class DissipatorSpec:
    """Canal de Lindblad: matriz de coeficientes Gamma_{mu nu} sobre los operadores sigma_mu."""

    name: str
    coefficients: np.ndarray = field(repr=False)

    @property
    def total_rate(self):
        return float(np.real(np.trace(self.coefficients)))


def validate_config(config):
    """
    Revisa todas las invariantes de la configuración.

    Nunca lanza excepciones: devuelve un ValidationReport con los errores y las
    advertencias (no fatales) sobre las hipótesis de Lamb-Dicke / banda lateral
    resuelta que asumen las fórmulas analíticas.
    """
    errores = []
    avisos = []

    def error(code, campo, mensaje):
        errores.append(ConfigIssue(code, campo, mensaje, ERROR))

    def aviso(code, campo, mensaje):
        avisos.append(ConfigIssue(code, campo, mensaje, WARNING))

    if config.n_ions < 1:
        error("invalid_n_ions", "n_ions", f"Se requiere al menos un ion (n_ions={config.n_ions}).")
    if len(config.omega) != config.n_ions:
        error(
            "omega_length",
            "omega",
            f"Se esperaban {config.n_ions} frecuencias de Rabi, llegaron {len(config.omega)}.",
        )
    for campo in ("gamma_r", "gamma_l", "gamma_ng"):
        valor = getattr(config, campo)
        if not math.isfinite(valor) or valor < 0:
            error("negative_rate", campo, f"Tasa negativa o no finita: {campo}={valor}.")
    if not errores and config.total_decay <= 0:
        error("zero_total_decay", "gamma_r", "La tasa total Gamma = gamma_R + gamma_L + gamma_ng debe ser > 0.")
    if not config.eta > 0:
        error("non_positive_eta", "eta", f"El parámetro de Lamb-Dicke debe ser > 0 (eta={config.eta}).")
    if config.n_max < 1:
        error("invalid_truncation", "n_max", f"La truncación fonónica debe ser >= 1 (n_max={config.n_max}).")
    if not config.nu > 0:
        error("non_positive_nu", "nu", f"La frecuencia de trampa debe ser > 0 (nu={config.nu}).")
    for indice, valor in enumerate(config.omega, start=1):
        if not math.isfinite(valor) or valor < 0:
            error("negative_rabi", f"omega[{indice - 1}]", f"Frecuencia de Rabi negativa: Omega_{indice}={valor}.")
    if config.positions is not None:
        if len(config.positions) != config.n_ions:
            error("positions_length", "positions", "Debe haber una posición por ion.")
        elif np.any(np.diff(config.positions) <= 0):
            error("unsorted_positions", "positions", "Las posiciones deben ser estrictamente crecientes.")
    if not 1 <= config.target <= max(config.n_ions, 1):
        error("target_out_of_range", "target", f"Ion objetivo {config.target} fuera de [1, {config.n_ions}].")

    # Hipótesis de las fórmulas analíticas (no fatales).
    if abs(config.delta + config.nu) > 1e-9 * config.nu:
        aviso(
            "resolved_sideband",
            "delta",
            f"Se viola la condición de banda lateral resuelta (delta={config.delta}, se asume -nu).",
        )
    if config.omega and config.eta * max(config.omega) > SIDEBAND_LIMIT * config.nu:
        aviso("lamb_dicke", "omega", "eta*Omega no es << nu; las fórmulas de primer orden pierden validez.")
    if config.total_decay > SIDEBAND_LIMIT * config.nu:
        aviso("weak_decay", "gamma_r", "Gamma no es << nu; las fórmulas de primer orden pierden validez.")

    for issue in avisos:
        logger.warning("Configuración: %s", issue.message)
    return ValidationReport(tuple(errores), tuple(avisos))


def build_hamiltonian(config, space=None):
    """
    H = H_LD + H_L + H_R.

    H_LD = -Delta sum σ†σ + nu sum a†a + 1/2 sum eta Omega_i (σ_i + σ_i†)(a_i + a_i†)
    H_L(R) = -i gamma_L(R)/2 sum_{mu<(>)nu} (e^{i k_s |r_mu - r_nu|} σ_mu† σ_nu - h.c.)
    """
    validate_config(config).raise_for_errors()
    space = space or config.space
    dim = space.total_dim
    hamiltoniano = sp.csr_matrix((dim, dim), dtype=complex)

    for i in range(1, config.n_ions + 1):
        s = spin_lowering(space, i)
        a = annihilation(space, i)
        hamiltoniano = hamiltoniano - config.delta * (s.conj().T @ s)
        hamiltoniano = hamiltoniano + config.nu * number_operator(space, i)
        acople = 0.5 * config.eta * config.omega[i - 1]
        if acople:
            hamiltoniano = hamiltoniano + acople * ((s + s.conj().T) @ (a + a.conj().T))

    fases = config.phases
    for mu in range(1, config.n_ions + 1):
        for nu_ in range(1, config.n_ions + 1):
            if mu == nu_:
                continue
            tasa = config.gamma_l if mu < nu_ else config.gamma_r
            if tasa == 0:
                continue
            fase = np.exp(1j * abs(fases[mu - 1] - fases[nu_ - 1]))
            salto = fase * (spin_lowering(space, mu).conj().T @ spin_lowering(space, nu_))
            hamiltoniano = hamiltoniano - 0.5j * tasa * (salto - salto.conj().T)

    return hamiltoniano.tocsr()


def build_dissipators(config):
    """
    Tres canales: guiado L (fase e^{-i k_s (r_mu - r_nu)}), guiado R (e^{+i ...}) y
    no guiado (gamma_ng * identidad). Cada uno actúa como
    D[rho] = -1/2 sum Gamma_{mu nu} (σ_mu†σ_nu rho + rho σ_mu†σ_nu - 2 σ_nu rho σ_mu†).
    """
    validate_config(config).raise_for_errors()
    fases = config.phases
    diferencias = fases[:, None] - fases[None, :]
    return [
        DissipatorSpec("L", config.gamma_l * np.exp(-1j * diferencias)),
        DissipatorSpec("R", config.gamma_r * np.exp(1j * diferencias)),
        DissipatorSpec("ng", config.gamma_ng * np.eye(config.n_ions, dtype=complex)),
    ]


def channel_jumps(spec, space, tol=1e-14):
    """
    Diagonaliza Gamma = sum_k lambda_k u_k u_k† y devuelve [(lambda_k, J_k)] con
    J_k = sum_nu conj(u_k[nu]) σ_nu, de modo que D[rho] = sum_k lambda_k (J rho J† - 1/2 {J†J, rho}).
    """
    coeficientes = np.asarray(spec.coefficients, dtype=complex)
    hermitica = 0.5 * (coeficientes + coeficientes.conj().T)
    autovalores, autovectores = np.linalg.eigh(hermitica)
    escala = max(np.max(np.abs(autovalores)), 1.0) if autovalores.size else 1.0
    saltos = []
    for lam, u in zip(autovalores, autovectores.T):
        if lam <= tol * escala:
            continue
        salto = sp.csr_matrix((space.total_dim, space.total_dim), dtype=complex)
        for nu_, componente in enumerate(u, start=1):
            if abs(componente) > 0:
                salto = salto + np.conj(componente) * spin_lowering(space, nu_)
        saltos.append((float(lam), salto.tocsr()))
    return saltos
