import logging
from pathlib import Path

from django.db import DatabaseError

from .export_services import write_json

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
RUN_PREFIX = "RUN"
RUN_DIGITS = 5


def siguiente_numero_de_corrida(prefix=RUN_PREFIX, digits=RUN_DIGITS):
    """
    Devuelve el número de corrida siguiente al mayor registrado con ese prefijo
    ('RUN-00001', 'RUN-00002', ...). Los huecos por corridas borradas no se reutilizan.
    """
    from ..models import RunManifest

    numeros = RunManifest.objects.filter(numero_run__startswith=f"{prefix}-").values_list("numero_run", flat=True)
    sufijos = [int(numero.rsplit("-", 1)[1]) for numero in numeros if numero.rsplit("-", 1)[1].isdigit()]
    return f"{prefix}-{max(sufijos, default=0) + 1:0{digits}d}"


def escribir_manifiesto(datos, out_dir):
    """Escribe manifest.json en out_dir; debe ser el último archivo de la corrida."""
    return write_json(datos, Path(out_dir) / MANIFEST_NAME)


class RegistroDeCorrida:
    """
    Registra una corrida en RunManifest. Si la tabla no existe (migraciones sin
    aplicar) el manifiesto se escribe igual en disco y se emite una advertencia.
    """

    def __init__(self, command, argv, config, out_dir, spec_hash="", code_version=""):
        from ..models import RunManifest

        self.datos = {
            "command": command,
            "argv": list(argv),
            "config": config,
            "spec_hash": spec_hash,
            "code_version": code_version,
            "out_dir": str(out_dir),
        }
        self.out_dir = Path(out_dir)
        self.manifiesto = None
        try:
            numero = siguiente_numero_de_corrida()
            self.manifiesto = RunManifest.objects.create(numero_run=numero, **self.datos)
            logger.info("Corrida %s registrada (%s)", numero, command)
        except DatabaseError as error:
            logger.warning("Registro de corridas no disponible (¿falta 'migrate'?): %s", error)

    @property
    def numero(self):
        return self.manifiesto.numero_run if self.manifiesto else None

    def completar(self, output_files):
        """Marca la corrida como COMPLETADA; la señal post_save escribe manifest.json."""
        archivos = [str(f) for f in output_files]
        if self.manifiesto is not None:
            try:
                self.manifiesto.completar(archivos)
                return self.out_dir / MANIFEST_NAME
            except DatabaseError as error:
                logger.warning("No se pudo actualizar el registro de corridas: %s", error)
        return escribir_manifiesto(
            {**self.datos, "run": None, "output_files": archivos, "estado": "COMPLETADA"}, self.out_dir
        )

    def fallar(self, mensaje):
        if self.manifiesto is None:
            return
        try:
            self.manifiesto.fallar(mensaje)
        except DatabaseError as error:
            logger.warning("No se pudo actualizar el registro de corridas: %s", error)
