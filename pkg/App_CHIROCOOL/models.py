# App_CHIROCOOL/models.py

from django.core.serializers.json import DjangoJSONEncoder
from django.db import models
from django.utils import timezone


# --- REGISTRO DE CORRIDAS ---
class RunManifest(models.Model):
    ESTADO_CHOICES = [
        ("EN_CURSO", "En curso"),
        ("COMPLETADA", "Completada"),
        ("FALLIDA", "Fallida"),
    ]
    numero_run = models.CharField(max_length=20, unique=True, verbose_name="N° de Corrida")
    command = models.CharField(max_length=30, verbose_name="Subcomando")
    argv = models.JSONField(default=list, encoder=DjangoJSONEncoder)
    config = models.JSONField(default=dict, encoder=DjangoJSONEncoder, verbose_name="Configuración resuelta")
    spec_hash = models.CharField(max_length=64, blank=True)
    code_version = models.CharField(max_length=20)
    out_dir = models.CharField(max_length=500, verbose_name="Carpeta de salida")
    output_files = models.JSONField(default=list, encoder=DjangoJSONEncoder, verbose_name="Archivos generados")
    estado = models.CharField(max_length=20, choices=ESTADO_CHOICES, default="EN_CURSO")
    mensaje_error = models.TextField(blank=True, null=True)
    started_at = models.DateTimeField(default=timezone.now)
    finished_at = models.DateTimeField(blank=True, null=True)

    class Meta:
        verbose_name = "Manifiesto de Corrida"
        verbose_name_plural = "Manifiestos de Corridas"
        ordering = ["-started_at"]

    def __str__(self):
        return f"{self.numero_run} ({self.command}) - {self.get_estado_display()}"

    def to_manifest(self):
        """Contenido de manifest.json: suficiente para reproducir la corrida."""
        return {
            "run": self.numero_run,
            "command": self.command,
            "argv": self.argv,
            "config": self.config,
            "spec_hash": self.spec_hash,
            "code_version": self.code_version,
            "out_dir": self.out_dir,
            "output_files": self.output_files,
            "estado": self.estado,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    def completar(self, output_files):
        self.output_files = [str(f) for f in output_files]
        self.estado = "COMPLETADA"
        self.finished_at = timezone.now()
        self.save()

    def fallar(self, mensaje):
        self.estado = "FALLIDA"
        self.mensaje_error = mensaje
        self.finished_at = timezone.now()
        self.save(update_fields=["estado", "mensaje_error", "finished_at"])
