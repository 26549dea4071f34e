import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from App_CHIROCOOL.cli import main
from App_CHIROCOOL.models import RunManifest
from App_CHIROCOOL.services.document_services import (
    MANIFEST_NAME,
    RegistroDeCorrida,
    siguiente_numero_de_corrida,
)

UN_ION = ["--n-ions", "1", "--eta", "0.04", "--omega", "1.0", "--gamma-r", "0", "--gamma-l", "0", "--n-max", "1"]


class CommandTestCase(TestCase):
    def setUp(self):
        self.carpeta = tempfile.TemporaryDirectory()
        self.addCleanup(self.carpeta.cleanup)
        self.out = Path(self.carpeta.name)

    def ejecutar(self, *args):
        salida, errores = StringIO(), StringIO()
        call_command(*args, stdout=salida, stderr=errores)
        return json.loads(salida.getvalue())

    def manifiesto(self):
        return json.loads((self.out / MANIFEST_NAME).read_text(encoding="utf-8"))


class SteadyCommandTests(CommandTestCase):
    def test_estacionario_con_manifiesto(self):
        registro = self.ejecutar("steady", *UN_ION, "--gamma-ng", "0.1", "--out", str(self.out))
        self.assertEqual(registro["observables"]["dim"], 4)
        self.assertAlmostEqual(registro["observables"]["ntilde"][0], 1.0, places=10)

        manifiesto = self.manifiesto()
        self.assertEqual(manifiesto["command"], "steady")
        self.assertEqual(manifiesto["estado"], "COMPLETADA")
        self.assertEqual(manifiesto["output_files"], [str(self.out / "steady.json")])
        self.assertEqual(manifiesto["config"]["gamma_ng"], 0.1)
        self.assertIn("--gamma-ng", manifiesto["argv"])

        corrida = RunManifest.objects.get()
        self.assertEqual(corrida.numero_run, "RUN-00001")
        self.assertEqual(corrida.estado, "COMPLETADA")
        self.assertIsNotNone(corrida.finished_at)

    def test_error_del_solver(self):
        # ion sin láser: espacio nulo degenerado
        args = [a if a != "1.0" else "0.0" for a in UN_ION]
        with self.assertRaises(CommandError) as contexto:
            self.ejecutar("steady", *args, "--gamma-ng", "0.1", "--out", str(self.out))
        self.assertEqual(contexto.exception.returncode, 2)
        corrida = RunManifest.objects.get()
        self.assertEqual(corrida.estado, "FALLIDA")
        self.assertIn("degenerado", corrida.mensaje_error)
        self.assertFalse((self.out / MANIFEST_NAME).exists())

    def test_falla_numerica_de_scipy(self):
        with mock.patch(
            "App_CHIROCOOL.management.commands.steady.steady_state", side_effect=RuntimeError("ARPACK sin convergencia")
        ):
            with self.assertRaises(CommandError) as contexto:
                self.ejecutar("steady", *UN_ION, "--gamma-ng", "0.1", "--out", str(self.out))
        self.assertEqual(contexto.exception.returncode, 2)
        corrida = RunManifest.objects.get()
        self.assertEqual(corrida.estado, "FALLIDA")
        self.assertIn("RuntimeError: ARPACK", corrida.mensaje_error)

    def test_error_de_configuracion(self):
        with self.assertRaises(CommandError) as contexto:
            self.ejecutar("steady", "--n-ions", "2", "--eta", "0.04", "--out", str(self.out))
        self.assertEqual(contexto.exception.returncode, 1)
        self.assertFalse(RunManifest.objects.exists())


class AnalyticCommandTests(CommandTestCase):
    def test_parametros_directos(self):
        registro = self.ejecutar(
            "analytic", "--eta", "0.04", "--omega", "0.1", "--gamma", "0.1", "--beta", "1", "--out", str(self.out)
        )
        prediccion = registro["prediction"]
        self.assertAlmostEqual(prediccion["n1_min"], 7.02e-5, delta=0.01e-5)
        self.assertAlmostEqual(prediccion["gamma_r_min"][0] / 0.1, 0.382, delta=1e-3)
        self.assertAlmostEqual(registro["parameters"]["gamma_r"], 0.05)

    def test_beta0(self):
        registro = self.ejecutar(
            "analytic", "--eta", "0.04", "--omega", "1", "--gamma", "0.1", "--out", str(self.out)
        )
        self.assertAlmostEqual(registro["prediction"]["beta0"], 0.7015, delta=1e-3)

    def test_desde_configuracion(self):
        registro = self.ejecutar(
            "analytic", *UN_ION[:6], "--gamma-r", "0.085", "--gamma-l", "0.015", "--out", str(self.out)
        )
        self.assertAlmostEqual(registro["parameters"]["gamma_ng"], 0.0)

    def test_beta_invalido(self):
        with self.assertRaises(CommandError) as contexto:
            self.ejecutar("analytic", "--gamma", "0.1", "--beta", "1.5", "--out", str(self.out))
        self.assertEqual(contexto.exception.returncode, 1)


class EvolveCommandTests(CommandTestCase):
    def test_trayectoria_y_ajuste_fallido_registrado(self):
        registro = self.ejecutar(
            "evolve", *UN_ION, "--gamma-ng", "0.1", "--t-end", "20", "--points", "5", "--fit", "--out", str(self.out)
        )
        self.assertTrue((self.out / "trajectory.csv").exists())
        self.assertTrue((self.out / "trajectory.svg").exists())
        self.assertIn("error", registro["fits"][0])
        self.assertEqual(len(registro["final"]["n"]), 1)
        self.assertIn(str(self.out / "trajectory.csv"), self.manifiesto()["output_files"])

    def test_tiempo_final_invalido(self):
        with self.assertRaises(CommandError) as contexto:
            self.ejecutar("evolve", *UN_ION, "--gamma-ng", "0.1", "--t-end", "0", "--out", str(self.out))
        self.assertEqual(contexto.exception.returncode, 1)


class ReducedCommandTests(CommandTestCase):
    ARGS = ["--n-ions", "3", "--eta", "0.04", "--omega", "1.0", "--gamma-r", "0.1", "--gamma-l", "0"]

    def test_punto_unico(self):
        registro = self.ejecutar("reduced", *self.ARGS, "--out", str(self.out))
        self.assertAlmostEqual(registro["solution"]["ntilde1"], 1.0, places=10)
        self.assertEqual(registro["config"]["omega"], [1.0, 0.0, 0.0])

    def test_grilla(self):
        self.ejecutar("reduced", *self.ARGS, "--grid", "--resolution", "3", "4", "--out", str(self.out))
        with open(self.out / "reduced_grid.csv", encoding="utf-8") as archivo:
            self.assertEqual(len(archivo.readlines()), 13)

    def test_resolucion_insuficiente(self):
        with self.assertRaises(CommandError) as contexto:
            self.ejecutar("reduced", *self.ARGS, "--min-search", "--resolution", "10", "10", "--out", str(self.out))
        self.assertEqual(contexto.exception.returncode, 1)

    def test_fase_no_multiplo_de_dos_pi(self):
        with self.assertRaises(CommandError) as contexto:
            self.ejecutar("reduced", *self.ARGS, "--xi-pi", "1", "--out", str(self.out))
        self.assertEqual(contexto.exception.returncode, 1)


class SweepCommandTests(CommandTestCase):
    def test_barrido_personalizado(self):
        spec = {
            "name": "mini",
            "base": {"n_ions": 3, "eta": 0.04, "omega": [1.0, 0.0, 0.0], "gamma_r": 0.05, "gamma_l": 0.05},
            "axis1": {"path": "beta", "start": 0.5, "stop": 1.0, "points": 2},
            "axis2": {"path": "gamma_r_over_gamma", "values": [0.25, 0.6, 0.75]},
            "observables": ["ntilde_1"],
            "solver": "reduced",
        }
        ruta = self.out / "spec.json"
        ruta.write_text(json.dumps(spec), encoding="utf-8")
        salida = self.out / "resultados"
        registro = self.ejecutar("sweep", "--spec", str(ruta), "--jobs", "1", "--out", str(salida))
        self.assertEqual(registro["failed_points"], [])
        self.assertTrue((salida / "mini.csv").exists())
        self.assertTrue((salida / "mini_ntilde_1.svg").exists())
        manifiesto = json.loads((salida / MANIFEST_NAME).read_text(encoding="utf-8"))
        self.assertEqual(manifiesto["spec_hash"], registro["spec_hash"])

    def test_preset_desconocido(self):
        with self.assertRaises(CommandError):
            self.ejecutar("sweep", "--preset", "fig9", "--out", str(self.out))

    def test_spec_invalida(self):
        ruta = self.out / "spec.json"
        ruta.write_text('{"axis1": {"path": "beta"}}', encoding="utf-8")
        with self.assertRaises(CommandError) as contexto:
            self.ejecutar("sweep", "--spec", str(ruta), "--out", str(self.out))
        self.assertEqual(contexto.exception.returncode, 1)


class ValidateCommandTests(CommandTestCase):
    def test_configuracion_valida_con_advertencias(self):
        registro = self.ejecutar("validate", *UN_ION, "--gamma-ng", "0.1", "--delta", "-0.8")
        self.assertTrue(registro["ok"])
        self.assertEqual(registro["warnings"][0]["code"], "resolved_sideband")
        self.assertFalse(RunManifest.objects.exists())

    def test_configuracion_invalida(self):
        salida = StringIO()
        with self.assertRaises(CommandError) as contexto:
            call_command(
                "validate", "--n-ions", "2", "--eta", "0.04", "--omega", "1.0", "--gamma-r", "0.1",
                "--gamma-l", "0", stdout=salida,
            )
        self.assertEqual(contexto.exception.returncode, 1)
        registro = json.loads(salida.getvalue())
        self.assertFalse(registro["ok"])
        self.assertEqual(registro["errors"][0]["field"], "omega")


class MainTests(TestCase):
    def test_codigos_de_uso(self):
        self.assertEqual(main([]), 1)
        self.assertEqual(main(["--help"]), 0)
        self.assertEqual(main(["desconocido"]), 1)
        self.assertEqual(main(["steady", "--flag-inexistente"]), 1)
        self.assertEqual(main(["steady", "--n-ions", "2"]), 1)

    def test_ayuda_de_subcomando(self):
        self.assertEqual(main(["analytic", "--help"]), 0)


class RunRegistryTests(TestCase):
    def test_numeracion_secuencial(self):
        with tempfile.TemporaryDirectory() as carpeta:
            primero = RegistroDeCorrida("steady", ["steady"], {}, carpeta)
            segundo = RegistroDeCorrida("sweep", ["sweep"], {}, carpeta, spec_hash="abc")
        self.assertEqual(primero.numero, "RUN-00001")
        self.assertEqual(segundo.numero, "RUN-00002")
        self.assertEqual(siguiente_numero_de_corrida(), "RUN-00003")

    def test_manifiesto_al_completar(self):
        with tempfile.TemporaryDirectory() as carpeta:
            registro = RegistroDeCorrida("analytic", ["analytic"], {"eta": 0.04}, carpeta, code_version="0.1.0")
            ruta = registro.completar([Path(carpeta) / "analytic.json"])
            manifiesto = json.loads(ruta.read_text(encoding="utf-8"))
        self.assertEqual(manifiesto["run"], "RUN-00001")
        self.assertEqual(manifiesto["code_version"], "0.1.0")
        self.assertEqual(len(manifiesto["output_files"]), 1)
        self.assertEqual(str(RunManifest.objects.get()), "RUN-00001 (analytic) - Completada")

    def test_numeracion_continua_tras_el_mayor(self):
        RunManifest.objects.create(numero_run="RUN-00007", command="steady", argv=[], config={}, out_dir="")
        RunManifest.objects.create(numero_run="RUN-00003", command="steady", argv=[], config={}, out_dir="")
        self.assertEqual(siguiente_numero_de_corrida(), "RUN-00008")
        self.assertEqual(siguiente_numero_de_corrida(prefix="TEST"), "TEST-00001")
