"""Base común de los subcomandos: flags de configuración, errores y registro de corridas."""

import logging
from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand, CommandError
from django.utils import timezone

from App_CHIROCOOL import __version__
from App_CHIROCOOL.cli import load_config
from App_CHIROCOOL.exceptions import (
    ChirocoolError,
    ConfigParseError,
    ConfigValidationError,
    DimensionMismatchError,
    InvalidSweepSpecError,
    InvalidTruncationError,
    NumericalError,
    SiteOutOfRangeError,
    SuperoperatorTooLargeError,
    UnknownPresetError,
)
from App_CHIROCOOL.services.document_services import RegistroDeCorrida
from App_CHIROCOOL.services.export_services import to_json, write_json
from App_CHIROCOOL.utils import parametro

logger = logging.getLogger(__name__)

USAGE_RETURNCODE = 1
SOLVER_RETURNCODE = 2

# Fallas de numpy/scipy que no pasan por un ChirocoolError (ARPACK, LU singular, curve_fit).
NUMERICAL_FAILURES = (RuntimeError, ArithmeticError, np.linalg.LinAlgError)

# Errores atribuibles a la entrada del usuario (código 1); el resto de ChirocoolError es del solver (código 2).
USAGE_ERRORS = (
    ConfigParseError,
    ConfigValidationError,
    InvalidSweepSpecError,
    UnknownPresetError,
    InvalidTruncationError,
    DimensionMismatchError,
    SiteOutOfRangeError,
    SuperoperatorTooLargeError,
)

UNITS_EPILOG = "Unidades: ν = 1 (tasas, Rabi y desintonía en unidades de ν), tiempos en 1/ν."

DJANGO_OPTIONS = {
    "verbosity",
    "settings",
    "pythonpath",
    "traceback",
    "no_color",
    "force_color",
    "skip_checks",
    "stdout",
    "stderr",
}


class ChirocoolCommand(BaseCommand):
    requires_migrations_checks = False
    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        kwargs.setdefault("epilog", UNITS_EPILOG)
        return super().create_parser(prog_name, subcommand, **kwargs)

    def add_config_arguments(self, parser, config_required=False):
        grupo = parser.add_argument_group("configuración de la cadena (los flags ganan sobre --config)")
        grupo.add_argument("--config", required=config_required, help="Archivo JSON de configuración.")
        grupo.add_argument("--n-ions", type=int, help="Número de iones N.")
        grupo.add_argument("--eta", type=float, help="Parámetro de Lamb-Dicke η.")
        grupo.add_argument("--omega", type=float, nargs="+", help="Frecuencias de Rabi Ω_i (unidades de ν).")
        grupo.add_argument("--gamma-r", type=float, help="Tasa guiada hacia la derecha γ_R (unidades de ν).")
        grupo.add_argument("--gamma-l", type=float, help="Tasa guiada hacia la izquierda γ_L (unidades de ν).")
        grupo.add_argument("--gamma-ng", type=float, help="Tasa no guiada γ_ng (unidades de ν).")
        grupo.add_argument("--delta", type=float, help="Desintonía Δ (por defecto -ν).")
        grupo.add_argument("--xi", type=float, help="Fase entre iones vecinos ξ en radianes.")
        grupo.add_argument("--xi-pi", type=float, help="Fase ξ en múltiplos de π.")
        grupo.add_argument("--n-max", type=int, help="Truncación fonónica n_max.")
        grupo.add_argument("--target", type=int, help="Ion objetivo (1..N).")

    def add_output_argument(self, parser):
        parser.add_argument("--out", help="Carpeta de salida (por defecto RESULTS_DIR/<subcomando>/<fecha>).")

    def overrides_from_options(self, options):
        claves = (
            "n_ions",
            "eta",
            "omega",
            "gamma_r",
            "gamma_l",
            "gamma_ng",
            "delta",
            "xi",
            "xi_pi",
            "n_max",
            "target",
        )
        return {clave: options.get(clave) for clave in claves if options.get(clave) is not None}

    def resolve_config(self, options, overrides=None):
        overrides = overrides if overrides is not None else self.overrides_from_options(options)
        try:
            return load_config(options.get("config"), overrides)
        except ChirocoolError as error:
            raise self.to_command_error(error)

    def to_command_error(self, error):
        if isinstance(error, USAGE_ERRORS):
            return CommandError(str(error), returncode=USAGE_RETURNCODE)
        return CommandError(f"Error del solver ({type(error).__name__}): {error}", returncode=SOLVER_RETURNCODE)

    def output_dir(self, options, command):
        if options.get("out"):
            return Path(options["out"])
        return Path(parametro("RESULTS_DIR")) / command / timezone.now().strftime("%Y%m%d-%H%M%S")

    def recorded_arguments(self, command, options):
        """Argumentos efectivos de la corrida (sin las opciones genéricas de Django)."""
        argumentos = [command]
        for clave, valor in sorted(options.items()):
            if clave in DJANGO_OPTIONS or valor is None or valor is False:
                continue
            argumentos.append("--" + clave.replace("_", "-"))
            if valor is not True:
                argumentos.extend(str(v) for v in (valor if isinstance(valor, (list, tuple)) else [valor]))
        return argumentos

    def emit(self, record):
        self.stdout.write(to_json(record))

    def run_registered(self, command, options, config_record, producir, spec_hash=""):
        """
        Ejecuta producir(out_dir) -> (registro, archivos) dentro de una corrida registrada.

        Escribe <command>.json con el registro, y por último manifest.json.
        """
        out_dir = self.output_dir(options, command)
        out_dir.mkdir(parents=True, exist_ok=True)
        registro_corrida = RegistroDeCorrida(
            command,
            self.recorded_arguments(command, options),
            config_record,
            out_dir,
            spec_hash=spec_hash,
            code_version=__version__,
        )
        try:
            registro, archivos = producir(out_dir)
        except ChirocoolError as error:
            registro_corrida.fallar(str(error))
            raise self.to_command_error(error)
        except NUMERICAL_FAILURES as error:
            logger.exception("Falla numérica en %s", command)
            registro_corrida.fallar(f"{type(error).__name__}: {error}")
            raise self.to_command_error(NumericalError(f"{type(error).__name__}: {error}")) from error
        archivos = list(archivos) + [write_json(registro, out_dir / f"{command}.json")]
        manifiesto = registro_corrida.completar(archivos)
        self.emit(registro)
        self.stderr.write(f"Salida en {out_dir} (manifiesto: {manifiesto.name})")
        return registro
