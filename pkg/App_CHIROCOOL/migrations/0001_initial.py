# Generated by Django 5.2.1 on 2026-10-18 10:12

import django.core.serializers.json
import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="RunManifest",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "numero_run",
                    models.CharField(
                        max_length=20, unique=True, verbose_name="N° de Corrida"
                    ),
                ),
                (
                    "command",
                    models.CharField(max_length=30, verbose_name="Subcomando"),
                ),
                (
                    "argv",
                    models.JSONField(
                        default=list,
                        encoder=django.core.serializers.json.DjangoJSONEncoder,
                    ),
                ),
                (
                    "config",
                    models.JSONField(
                        default=dict,
                        encoder=django.core.serializers.json.DjangoJSONEncoder,
                        verbose_name="Configuración resuelta",
                    ),
                ),
                ("spec_hash", models.CharField(blank=True, max_length=64)),
                ("code_version", models.CharField(max_length=20)),
                (
                    "out_dir",
                    models.CharField(max_length=500, verbose_name="Carpeta de salida"),
                ),
                (
                    "output_files",
                    models.JSONField(
                        default=list,
                        encoder=django.core.serializers.json.DjangoJSONEncoder,
                        verbose_name="Archivos generados",
                    ),
                ),
                (
                    "estado",
                    models.CharField(
                        choices=[
                            ("EN_CURSO", "En curso"),
                            ("COMPLETADA", "Completada"),
                            ("FALLIDA", "Fallida"),
                        ],
                        default="EN_CURSO",
                        max_length=20,
                    ),
                ),
                ("mensaje_error", models.TextField(blank=True, null=True)),
                (
                    "started_at",
                    models.DateTimeField(default=django.utils.timezone.now),
                ),
                ("finished_at", models.DateTimeField(blank=True, null=True)),
            ],
            options={
                "verbose_name": "Manifiesto de Corrida",
                "verbose_name_plural": "Manifiestos de Corridas",
                "ordering": ["-started_at"],
            },
        ),
    ]
