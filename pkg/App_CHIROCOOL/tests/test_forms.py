import json
import math
import tempfile
from pathlib import Path

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from App_CHIROCOOL.cli import load_config, read_json_file
from App_CHIROCOOL.exceptions import ConfigParseError, ConfigValidationError
from App_CHIROCOOL.forms import ChainConfigForm, FloatListField, config_from_mapping

MINIMA = {"n_ions": 2, "eta": 0.04, "omega": [1.0, 0.1], "gamma_r": 0.085, "gamma_l": 0.015, "xi": 6.2832}


class FloatListFieldTests(SimpleTestCase):
    def test_formatos_aceptados(self):
        campo = FloatListField()
        self.assertEqual(campo.clean("1.0, 0.1"), (1.0, 0.1))
        self.assertEqual(campo.clean([1, 2]), (1.0, 2.0))
        self.assertEqual(campo.clean(0.5), (0.5,))

    def test_valores_invalidos(self):
        campo = FloatListField()
        for valor in ("1.0,abc", [True], {"a": 1}, [math.inf]):
            with self.subTest(valor=valor):
                with self.assertRaises(ValidationError):
                    campo.clean(valor)


class ConfigFromMappingTests(SimpleTestCase):
    def test_configuracion_minima(self):
        config = config_from_mapping(dict(MINIMA))
        self.assertEqual(config.n_ions, 2)
        self.assertEqual(config.delta, -1.0)
        self.assertEqual(config.n_max, 1)
        self.assertEqual(config.gamma_ng, 0.0)

    def test_falta_eta(self):
        datos = dict(MINIMA)
        del datos["eta"]
        with self.assertRaises(ConfigValidationError) as contexto:
            config_from_mapping(datos)
        self.assertEqual([i.field for i in contexto.exception.issues], ["eta"])

    def test_clave_desconocida(self):
        with self.assertRaises(ConfigValidationError) as contexto:
            config_from_mapping({**MINIMA, "temperatura": 3})
        self.assertEqual(contexto.exception.issues[0].code, "unknown_key")

    def test_xi_en_multiplos_de_pi(self):
        datos = {**MINIMA, "xi_pi": 0.5}
        del datos["xi"]
        self.assertAlmostEqual(config_from_mapping(datos).xi, math.pi / 2)

    def test_xi_y_xi_pi_son_excluyentes(self):
        form = ChainConfigForm(data={**MINIMA, "xi_pi": 2})
        self.assertFalse(form.is_valid())
        self.assertIn("xi_pi", form.errors)

    def test_invariantes_del_modelo(self):
        with self.assertRaises(ConfigValidationError) as contexto:
            config_from_mapping({**MINIMA, "omega": [1.0]})
        self.assertEqual(contexto.exception.issues[0].code, "omega_length")


class LoadConfigTests(SimpleTestCase):
    def escribir(self, carpeta, texto):
        ruta = Path(carpeta) / "config.json"
        ruta.write_text(texto, encoding="utf-8")
        return ruta

    def test_los_flags_ganan(self):
        with tempfile.TemporaryDirectory() as carpeta:
            ruta = self.escribir(carpeta, json.dumps(MINIMA))
            config = load_config(ruta, {"gamma_r": 0.05, "gamma_l": None})
        self.assertEqual(config.gamma_r, 0.05)
        self.assertEqual(config.gamma_l, 0.015)

    def test_flag_xi_pi_reemplaza_xi_del_archivo(self):
        with tempfile.TemporaryDirectory() as carpeta:
            ruta = self.escribir(carpeta, json.dumps(MINIMA))
            config = load_config(ruta, {"xi_pi": 1.0})
        self.assertAlmostEqual(config.xi, math.pi)

    def test_error_de_sintaxis_con_linea_y_columna(self):
        with tempfile.TemporaryDirectory() as carpeta:
            ruta = self.escribir(carpeta, '{\n  "n_ions": 2,\n  "eta": ,\n}')
            with self.assertRaises(ConfigParseError) as contexto:
                read_json_file(ruta)
        self.assertIn("línea 3", str(contexto.exception))

    def test_raiz_no_objeto(self):
        with tempfile.TemporaryDirectory() as carpeta:
            ruta = self.escribir(carpeta, "[1, 2]")
            with self.assertRaises(ConfigParseError):
                load_config(ruta)

    def test_archivo_inexistente(self):
        with self.assertRaises(ConfigParseError):
            load_config("/no/existe/config.json")
