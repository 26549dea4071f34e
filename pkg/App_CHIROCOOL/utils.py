import hashlib
import json
import os

from django.conf import settings

# Valores por defecto cuando se usa la librería sin configurar Django.
PARAMETROS_POR_DEFECTO = {
    "SUPEROPERATOR_MAX_DIM": 256,
    "DENSE_SVD_MAX_DIM": 16,
    "DEGENERACY_RATIO": 1e3,
    "STEADY_RESIDUAL_TOL": 1e-10,
    "ODE_RTOL": 1e-9,
    "ODE_ATOL": 1e-12,
    "TRACE_DRIFT_TOL": 1e-8,
    "FIT_TRANSIENT_FACTOR": 5.0,
    "CROSSING_BAND": 0.005,
    "REDUCED_MAX_CONDITION": 1e12,
    "JOBS": None,
    "RESULTS_DIR": "results",
}


def parametro(nombre):
    """Lee un parámetro del dict CHIROCOOL de settings, con respaldo en los defaults."""
    if settings.configured:
        valores = getattr(settings, "CHIROCOOL", {})
        if nombre in valores:
            return valores[nombre]
    return PARAMETROS_POR_DEFECTO[nombre]


def numero_de_trabajos(jobs=None):
    """Cantidad de procesos para barridos: argumento > CHIROCOOL_JOBS > núcleos lógicos."""
    if jobs is not None:
        return max(1, int(jobs))
    configurado = parametro("JOBS")
    if configurado:
        return max(1, int(configurado))
    desde_entorno = os.environ.get("CHIROCOOL_JOBS")
    if desde_entorno:
        return max(1, int(desde_entorno))
    return os.cpu_count() or 1


def hash_canonico(datos):
    """SHA-256 del JSON canónico (claves ordenadas) de un dict serializable."""
    texto = json.dumps(datos, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(texto.encode("utf-8")).hexdigest()
