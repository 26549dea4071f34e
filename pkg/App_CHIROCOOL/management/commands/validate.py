import logging
from dataclasses import asdict

from django.core.management.base import CommandError

from App_CHIROCOOL.cli import load_config, read_json_file
from App_CHIROCOOL.exceptions import ChirocoolError, ConfigValidationError
from App_CHIROCOOL.services.chain_model import validate_config
from App_CHIROCOOL.services.sweep import sweep_spec_from_dict

from ._base import USAGE_RETURNCODE, ChirocoolCommand

logger = logging.getLogger(__name__)


class Command(ChirocoolCommand):
    help = "Revisa una configuración (o un barrido con --spec) sin resolver nada; no registra corrida."

    def add_arguments(self, parser):
        self.add_config_arguments(parser)
        parser.add_argument("--spec", help="Archivo JSON de barrido personalizado a validar.")

    def _revisar(self, options):
        if options.get("spec"):
            spec = sweep_spec_from_dict(read_json_file(options["spec"]))
            return validate_config(spec.base).warnings
        config = load_config(options.get("config"), self.overrides_from_options(options))
        return validate_config(config).warnings

    def handle(self, *args, **options):
        errores, avisos = [], []
        try:
            avisos = [asdict(issue) for issue in self._revisar(options)]
        except ConfigValidationError as error:
            errores = [asdict(issue) for issue in error.issues]
        except ChirocoolError as error:
            errores = [{"code": type(error).__name__, "field": "", "message": str(error), "severity": "error"}]
        self.emit({"ok": not errores, "errors": errores, "warnings": avisos})
        if errores:
            raise CommandError("La configuración tiene errores.", returncode=USAGE_RETURNCODE)
