# App_CHIROCOOL/signals.py

import logging

from django.db.models.signals import post_save
from django.dispatch import receiver

from .models import RunManifest
from .services.document_services import escribir_manifiesto

logger = logging.getLogger(__name__)


# Al completarse una corrida se escribe manifest.json, último archivo de la salida.
@receiver(post_save, sender=RunManifest)
def escribir_manifiesto_al_completar(sender, instance, created, **kwargs):
    if instance.estado != "COMPLETADA":
        return
    ruta = escribir_manifiesto(instance.to_manifest(), instance.out_dir)
    logger.info("Manifiesto de %s escrito en %s", instance.numero_run, ruta)
