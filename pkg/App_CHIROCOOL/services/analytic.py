"""
Predicciones cerradas a primer orden en gamma^2/nu^2 y eta^2 Omega^2/nu^2 (nu = 1).

Notación interna: x = (eta Omega)^2, Gamma = gamma_R + gamma_L + gamma_ng,
gamma = gamma_R + gamma_L = beta Gamma.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

from ..exceptions import OutOfValidityError
from .chain_model import SIDEBAND_LIMIT

logger = logging.getLogger(__name__)

BOUNDED = "bounded"
EVERYWHERE = "everywhere"
NOWHERE = "nowhere"


@dataclass(frozen=True)
class TargetTerms:
    single: float  # Gamma^2/16 + x/8
    modification: float  # -gamma_R gamma_L/4 + x gamma_R gamma_L/(x + 2Gamma^2 - 8 gamma_R gamma_L)
    total: float


@dataclass(frozen=True)
class MinimaResult:
    n1_min: float
    gamma_r_min: tuple
    beta0: float
    feasible: bool


@dataclass(frozen=True)
class SuperiorBoundary:
    gamma_r_s: tuple | None
    exists: bool
    regime: str


@dataclass(frozen=True)
class AnalyticPrediction:
    gamma_r: float
    gamma_l: float
    gamma_ng: float
    eta: float
    omega: float
    n_st_single: float
    n1_st: float | None
    ntilde1_st: float | None
    n1_max: float | None
    n1_min: float
    gamma_r_min: tuple
    beta0: float
    gamma_r_s: tuple | None
    flags: dict = field(default_factory=dict)

    @property
    def total_decay(self):
        return self.gamma_r + self.gamma_l + self.gamma_ng

    @property
    def beta(self):
        return (self.gamma_r + self.gamma_l) / self.total_decay

    def to_record(self):
        datos = asdict(self)
        datos["total_decay"] = self.total_decay
        datos["beta"] = self.beta
        datos["gamma_r_min"] = list(self.gamma_r_min)
        datos["gamma_r_s"] = list(self.gamma_r_s) if self.gamma_r_s else None
        return datos


def single_ion_nst(gamma_total, eta, omega):
    """<n>^s_st ≈ (Gamma/4)^2 + (eta Omega)^2/8."""
    return gamma_total**2 / 16.0 + (eta * omega) ** 2 / 8.0


def target_nst_terms(gamma_r, gamma_l, gamma_ng, eta, omega):
    """Descompone <n_1>_st en la parte de ion aislado y la modificación quiral."""
    x = (eta * omega) ** 2
    total_decay = gamma_r + gamma_l + gamma_ng
    producto = gamma_r * gamma_l
    denominador = x + 2.0 * total_decay**2 - 8.0 * producto
    if denominador <= 0:
        raise OutOfValidityError(
            f"eta^2 Omega^2 + 2 Gamma^2 - 8 gamma_R gamma_L = {denominador:.3e} <= 0: fuera del régimen de validez."
        )
    single = single_ion_nst(total_decay, eta, omega)
    modificacion = -producto / 4.0 + x * producto / denominador
    return TargetTerms(single=single, modification=modificacion, total=single + modificacion)


def target_nst(gamma_r, gamma_l, gamma_ng, eta, omega):
    return target_nst_terms(gamma_r, gamma_l, gamma_ng, eta, omega).total


def reciprocal_maximum(gamma, gamma_ng, eta, omega):
    """<n_1>^max_st en el punto recíproco gamma_R = gamma_L = gamma/2."""
    return target_nst(gamma / 2.0, gamma / 2.0, gamma_ng, eta, omega)


def beta1_extrema(eta, omega, gamma):
    """
    Extremos de <n_1>_st en beta = 1 como valores de gamma_R - gamma_L:
    0 es el máximo local; ±sqrt(-x/2 + eta Omega sqrt(x + 2 gamma^2)) los mínimos.
    """
    r = eta * omega
    x = r * r
    radicando = -x / 2.0 + r * math.sqrt(x + 2.0 * gamma**2)
    if radicando < 0:
        return {"maximum": 0.0, "minima": ()}
    raiz = math.sqrt(radicando)
    return {"maximum": 0.0, "minima": (-raiz, raiz)}


def minima(eta, omega, total_decay, beta):
    """Mínimo de <n_1>_st sobre gamma_R a beta fijo, su ubicación y el umbral beta_0."""
    r = eta * omega
    x = r * r
    g2 = total_decay**2
    raiz = math.sqrt(x + 2.0 * g2)
    n1_min = r * raiz / 8.0 - x / 32.0
    beta0 = math.sqrt(max(0.0, 1.0 - (r / g2) * (raiz - r / 2.0)))
    discriminante = (beta**2 - 1.0) * g2 - x / 2.0 + r * raiz

    factible = 2.0 * g2 >= 3.0 * x and discriminante >= 0
    par = ()
    if factible:
        centro = beta * total_decay / 2.0
        semiancho = 0.5 * math.sqrt(discriminante)
        par = (centro - semiancho, centro + semiancho)
        if par[0] < 0 or par[1] > beta * total_decay:
            factible = False
            par = ()
    if not factible:
        logger.debug("Mínimo inalcanzable para beta=%.4g (discriminante %.3e)", beta, discriminante)
    return MinimaResult(n1_min=n1_min, gamma_r_min=par, beta0=beta0, feasible=factible)


def superior_boundary(eta, omega, total_decay, beta):
    """
    Frontera gamma_R^s de la región de enfriamiento superior (ñ_1 < 1).

    La región superior queda fuera del intervalo [gamma_R^s-, gamma_R^s+].
    """
    x = (eta * omega) ** 2
    g2 = total_decay**2
    if 2.0 * g2 < 3.0 * x:
        return SuperiorBoundary(gamma_r_s=None, exists=False, regime=NOWHERE)
    radicando = (beta**2 - 1.0) * g2 + 1.5 * x
    if radicando < 0:
        return SuperiorBoundary(gamma_r_s=None, exists=False, regime=EVERYWHERE)
    centro = beta * total_decay / 2.0
    semiancho = 0.5 * math.sqrt(radicando)
    return SuperiorBoundary(gamma_r_s=(centro - semiancho, centro + semiancho), exists=True, regime=BOUNDED)


def is_superior(gamma_r, gamma_l, gamma_ng, eta, omega):
    """3 eta^2 Omega^2 < 2 Gamma^2 - 8 gamma_R gamma_L, con acople bidireccional (ñ_1 < 1 estricto)."""
    x = (eta * omega) ** 2
    total_decay = gamma_r + gamma_l + gamma_ng
    return gamma_r * gamma_l > 0 and 3.0 * x < 2.0 * total_decay**2 - 8.0 * gamma_r * gamma_l


def predict(gamma_r, gamma_l, gamma_ng, eta, omega):
    """Todas las predicciones cerradas con sus banderas de validez."""
    total_decay = gamma_r + gamma_l + gamma_ng
    if total_decay <= 0:
        raise OutOfValidityError("La tasa total Gamma debe ser > 0.")
    gamma = gamma_r + gamma_l
    beta = gamma / total_decay
    single = single_ion_nst(total_decay, eta, omega)

    try:
        n1 = target_nst(gamma_r, gamma_l, gamma_ng, eta, omega)
    except OutOfValidityError:
        n1 = None
    try:
        n1_max = reciprocal_maximum(gamma, gamma_ng, eta, omega)
    except OutOfValidityError:
        n1_max = None
    minimo = minima(eta, omega, total_decay, beta)
    frontera = superior_boundary(eta, omega, total_decay, beta)

    flags = {
        "target_valid": n1 is not None,
        "maximum_valid": n1_max is not None,
        "minimum_feasible": minimo.feasible,
        "superior_boundary_exists": frontera.exists,
        "superior_regime": frontera.regime,
        "superior": is_superior(gamma_r, gamma_l, gamma_ng, eta, omega),
        "lamb_dicke": eta * omega <= SIDEBAND_LIMIT,
        "weak_decay": total_decay <= SIDEBAND_LIMIT,
    }
    return AnalyticPrediction(
        gamma_r=gamma_r,
        gamma_l=gamma_l,
        gamma_ng=gamma_ng,
        eta=eta,
        omega=omega,
        n_st_single=single,
        n1_st=n1,
        ntilde1_st=None if n1 is None else n1 / single,
        n1_max=n1_max,
        n1_min=minimo.n1_min,
        gamma_r_min=minimo.gamma_r_min,
        beta0=minimo.beta0,
        gamma_r_s=frontera.gamma_r_s,
        flags=flags,
    )
