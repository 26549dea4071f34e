import csv
import json
import logging
import math
from pathlib import Path

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

logger = logging.getLogger(__name__)

SWEEP_CSV_HEADER = ["axis1", "axis2", "observable", "value", "status"]
REDUCED_CSV_HEADER = ["beta", "gamma_r_over_gamma", "n1", "ntilde1"]


class ChirocoolJSONEncoder(DjangoJSONEncoder):
    """DjangoJSONEncoder que además entiende escalares/arrays de numpy, complejos y rutas."""

    def default(self, o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, (complex, np.complexfloating)):
            return [float(np.real(o)), float(np.imag(o))]
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, Path):
            return str(o)
        return super().default(o)


def _numero(valor):
    if valor is None:
        return ""
    if isinstance(valor, (int, np.integer)):
        return str(int(valor))
    return repr(float(valor))


def _sin_nan(datos):
    """JSON estricto: NaN/inf pasan a None."""
    if isinstance(datos, dict):
        return {k: _sin_nan(v) for k, v in datos.items()}
    if isinstance(datos, (list, tuple)):
        return [_sin_nan(v) for v in datos]
    if isinstance(datos, (float, np.floating)) and not math.isfinite(datos):
        return None
    return datos


def to_json(datos):
    return json.dumps(_sin_nan(datos), cls=ChirocoolJSONEncoder, indent=2, sort_keys=True, ensure_ascii=False)


def write_json(datos, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(datos) + "\n", encoding="utf-8")
    logger.info("JSON escrito en %s", path)
    return path


def write_sweep_csv(result, path):
    """CSV largo (axis1, axis2, observable, value, status) con floats en repr."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as archivo:
        escritor = csv.writer(archivo)
        escritor.writerow(SWEEP_CSV_HEADER)
        for x1, x2, observable, valor, estado in result.to_rows():
            escritor.writerow([_numero(x1), _numero(x2), observable, _numero(valor), estado])
    logger.info("CSV de barrido escrito en %s", path)
    return path


def write_reduced_csv(betas, ratios, grids, path):
    """Grilla del solver reducido: columnas beta, gamma_r_over_gamma, n1, ntilde1."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n1, ntilde1 = grids
    with open(path, "w", newline="", encoding="utf-8") as archivo:
        escritor = csv.writer(archivo)
        escritor.writerow(REDUCED_CSV_HEADER)
        for a, beta in enumerate(betas):
            for b, ratio in enumerate(ratios):
                escritor.writerow([_numero(beta), _numero(ratio), _numero(n1[a, b]), _numero(ntilde1[a, b])])
    logger.info("CSV reducido escrito en %s", path)
    return path
