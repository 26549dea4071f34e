"""
Punto de entrada del simulador: ``python -m App_CHIROCOOL.cli <subcomando> [opciones]``
(equivalente a ``python manage.py <subcomando> [opciones]``).

Subcomandos: steady, evolve, analytic, reduced, sweep, validate (unidades ν = 1,
tiempos en 1/ν). Códigos de salida: 0 éxito, 1 uso o configuración, 2 solver.
"""

import json
import logging
import os
import sys
from pathlib import Path

from .exceptions import ConfigParseError

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("steady", "evolve", "analytic", "reduced", "sweep", "validate")

USAGE = (
    "uso: python -m App_CHIROCOOL.cli {" + ",".join(SUBCOMMANDS) + "} [opciones]\n"
    "     python -m App_CHIROCOOL.cli <subcomando> --help  (unidades: ν = 1, tiempo en 1/ν)\n"
)


def read_json_file(path):
    """Lee un JSON; los errores de sintaxis informan línea y columna."""
    ruta = Path(path)
    try:
        texto = ruta.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigParseError(f"No se pudo leer '{ruta}': {error.strerror or error}") from error
    try:
        return json.loads(texto)
    except json.JSONDecodeError as error:
        raise ConfigParseError(
            f"{ruta}: JSON inválido en línea {error.lineno}, columna {error.colno}: {error.msg}"
        ) from error


def load_config(path=None, overrides=None):
    """
    Carga la configuración JSON, aplica los flags (los flags ganan) y valida.

    Lanza ConfigParseError (lectura/sintaxis) o ConfigValidationError (claves o valores).
    """
    from .forms import config_from_mapping

    datos = {}
    if path is not None:
        datos = read_json_file(path)
        if not isinstance(datos, dict):
            raise ConfigParseError(f"{path}: se esperaba un objeto JSON en la raíz")
    for clave, valor in (overrides or {}).items():
        if valor is None:
            continue
        datos[clave] = valor
        # xi y xi_pi son excluyentes: el flag reemplaza a la forma del archivo
        if clave == "xi":
            datos.pop("xi_pi", None)
        elif clave == "xi_pi":
            datos.pop("xi", None)
    return config_from_mapping(datos)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stderr.write(USAGE)
        return 0 if argv else 1
    subcomando, resto = argv[0], argv[1:]
    if subcomando not in SUBCOMMANDS:
        sys.stderr.write(f"Subcomando desconocido '{subcomando}'.\n{USAGE}")
        return 1

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "Proyecto_CHIROCOOL.settings")
    import django
    from django.core.management import call_command
    from django.core.management.base import CommandError

    django.setup()
    try:
        call_command(subcomando, *resto)
    except CommandError as error:
        sys.stderr.write(f"{error}\n")
        return error.returncode
    except SystemExit as salida:
        # --help de argparse
        return salida.code if isinstance(salida.code, int) else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
