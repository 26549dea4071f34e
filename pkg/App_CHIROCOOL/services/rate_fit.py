"""
Tasas de enfriamiento W por ajuste exponencial a·e^{-Wt} + <n>_st (asíntota fija)
y tiempo de cruce ñ_i = 1.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from ..exceptions import FitFailureError
from ..utils import parametro

logger = logging.getLogger(__name__)

# Fracción máxima de la brecha inicial que puede quedar al final de la trayectoria.
TAIL_GAP_FRACTION = 0.05
RESIDUAL_WARNING_FRACTION = 0.05
MAX_EVALUATIONS = 5000


@dataclass(frozen=True)
class CoolingRateFit:
    ion: int
    amplitude: float
    rate: float
    n_st: float
    window: tuple
    residual: float
    converged: bool = True
    monotone: bool = True

    def to_record(self):
        return {
            "ion": self.ion,
            "W": self.rate,
            "a": self.amplitude,
            "n_st": self.n_st,
            "window": list(self.window),
            "residual": self.residual,
            "converged": self.converged,
            "monotone": self.monotone,
        }


def _inicio_de_ventana(traj):
    if traj.config is None:
        return float(traj.times[0])
    return max(float(traj.times[0]), parametro("FIT_TRANSIENT_FACTOR") / traj.config.total_decay)


def _tasa_inicial(t, brecha):
    """Estimación de b a partir del tiempo de media caída de la brecha."""
    mitad = 0.5 * brecha[0]
    indices = np.nonzero(np.abs(brecha) <= abs(mitad))[0]
    if indices.size and t[indices[0]] > t[0]:
        return np.log(2.0) / (t[indices[0]] - t[0])
    return 1.0 / max(t[-1] - t[0], np.finfo(float).tiny)


def _ajustar(traj, ion, n_st, t_lo):
    t = np.asarray(traj.times, dtype=float)
    n = np.asarray(traj.occupation(ion), dtype=float)
    brecha_inicial = n[0] - n_st
    brecha_final = n[-1] - n_st
    diagnostico = {
        "ion": ion,
        "n_st": n_st,
        "initial_gap": float(brecha_inicial),
        "final_gap": float(brecha_final),
        "t_end": float(t[-1]),
    }
    if abs(brecha_final) > TAIL_GAP_FRACTION * abs(brecha_inicial):
        raise FitFailureError(
            f"Trayectoria demasiado corta para el ion {ion}: la brecha final {brecha_final:.3e} supera "
            f"el {TAIL_GAP_FRACTION:.0%} de la inicial {brecha_inicial:.3e}.",
            diagnostico,
        )

    ventana = t >= t_lo
    if np.count_nonzero(ventana) < 3:
        raise FitFailureError(f"La ventana de ajuste [{t_lo:.4g}, {t[-1]:.4g}] tiene menos de 3 puntos.", diagnostico)
    t_ventana = t[ventana]
    brecha = n[ventana] - n_st
    origen = t_ventana[0]
    desplazado = t_ventana - origen

    def modelo(x, a, b):
        return a * np.exp(-b * x)

    b0 = _tasa_inicial(t_ventana, brecha)
    try:
        parametros, _ = curve_fit(modelo, desplazado, brecha, p0=[brecha[0], b0], maxfev=MAX_EVALUATIONS)
    except (RuntimeError, ValueError) as error:
        raise FitFailureError(f"El ajuste exponencial no convergió para el ion {ion}: {error}", diagnostico) from error

    a_desplazado, b = (float(p) for p in parametros)
    if not np.isfinite(b):
        raise FitFailureError(f"El ajuste devolvió una tasa no finita para el ion {ion}.", diagnostico)
    residuo = float(np.sqrt(np.mean((modelo(desplazado, a_desplazado, b) - brecha) ** 2)))
    # a·e^{-b t} en tiempo absoluto
    amplitud = a_desplazado * float(np.exp(b * origen))

    escala = max(np.max(np.abs(n[ventana])), np.finfo(float).tiny)
    monotona = bool(np.all(np.diff(n[ventana]) <= 1e-9 * escala))
    if not monotona:
        logger.warning("Trayectoria no monótona para el ion %d en la ventana de ajuste", ion)
    if residuo > RESIDUAL_WARNING_FRACTION * abs(a_desplazado):
        logger.warning("Residuo de ajuste %.2e mayor al 5%% de la amplitud %.2e", residuo, a_desplazado)
    if b <= 0:
        logger.warning("Tasa ajustada no positiva (W=%.3e) para el ion %d", b, ion)

    return CoolingRateFit(
        ion=ion,
        amplitude=amplitud,
        rate=b,
        n_st=float(n_st),
        window=(float(t_ventana[0]), float(t_ventana[-1])),
        residual=residuo,
        converged=True,
        monotone=monotona,
    )


def fit_cooling_rate(traj, ion, n_st, t_lo=None):
    """
    Ajusta a·e^{-Wt} + n_st a <n_ion>(t) con n_st fijo (del solver estacionario).

    La ventana empieza en FIT_TRANSIENT_FACTOR/Gamma salvo que se indique t_lo.
    """
    t_lo = _inicio_de_ventana(traj) if t_lo is None else float(t_lo)
    ajuste = _ajustar(traj, ion, n_st, t_lo)
    logger.info("Ion %d: W = %.4e (ventana %s, residuo %.2e)", ion, ajuste.rate, ajuste.window, ajuste.residual)
    return ajuste


def refit_tail(traj, ion, n_st):
    """Reajuste sobre la mitad final de la ventana: control de adecuación de una sola exponencial."""
    t_lo = _inicio_de_ventana(traj)
    mitad = 0.5 * (t_lo + float(traj.times[-1]))
    return _ajustar(traj, ion, n_st, mitad)


def crossing_time(traj, ion, band=None):
    """
    Primer instante posterior al máximo global de ñ_ion en el que ñ <= 1 - band
    y permanece así hasta el final de la ventana; None si no ocurre.
    """
    band = parametro("CROSSING_BAND") if band is None else band
    ntilde = np.asarray(traj.ntilde(ion), dtype=float)
    if ntilde.size == 0 or np.all(np.isnan(ntilde)):
        return None
    maximo = int(np.nanargmax(ntilde))
    debajo = ntilde[maximo:] <= 1.0 - band
    # sufijos completamente por debajo del umbral
    sufijo = np.flip(np.logical_and.accumulate(np.flip(debajo)))
    candidatos = np.nonzero(sufijo)[0]
    if candidatos.size == 0:
        return None
    return float(traj.times[maximo + candidatos[0]])
