from unittest import mock

import numpy as np
from django.test import SimpleTestCase, tag

from App_CHIROCOOL.exceptions import (
    AmbiguousSteadyStateError,
    InvalidDensityMatrixError,
    NumericalError,
    UndefinedNormalizationError,
)
from App_CHIROCOOL.services.analytic import single_ion_nst
from App_CHIROCOOL.services.chain_model import ChainConfig
from App_CHIROCOOL.services.liouvillian import build_liouvillian, vec
from App_CHIROCOOL.services.operator_algebra import SpaceDescriptor, number_operator
from App_CHIROCOOL.services.steady_state import (
    DensityMatrix,
    normalized_occupation,
    observables,
    single_ion_reference,
    solve_steady,
    steady_residual,
    steady_state,
)


def un_ion(omega=1.0, gamma=0.1, n_max=2):
    return ChainConfig(n_ions=1, eta=0.04, omega=(omega,), gamma_r=0.0, gamma_l=0.0, gamma_ng=gamma, n_max=n_max)


def dos_iones(gamma_r_over_gamma, omega_1=1.0, razon=0.1, gamma=0.1, n_max=2, gamma_ng=0.0):
    return ChainConfig(
        n_ions=2,
        eta=0.04,
        omega=(omega_1, omega_1 * razon),
        gamma_r=gamma_r_over_gamma * gamma,
        gamma_l=(1 - gamma_r_over_gamma) * gamma,
        gamma_ng=gamma_ng,
        n_max=n_max,
    )


class DensityMatrixTests(SimpleTestCase):
    def test_chequeo_valido(self):
        rho = DensityMatrix(np.diag([0.75, 0.25]).astype(complex))
        self.assertIs(rho.check(), rho)
        self.assertAlmostEqual(rho.min_eigenvalue(), 0.25)

    def test_no_hermitica(self):
        with self.assertRaises(InvalidDensityMatrixError):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)).check()

    def test_traza_distinta_de_uno(self):
        with self.assertRaises(InvalidDensityMatrixError):
            DensityMatrix(np.diag([0.5, 0.25]).astype(complex)).check()

    def test_no_positiva(self):
        with self.assertRaises(InvalidDensityMatrixError):
            DensityMatrix(np.diag([1.5, -0.5]).astype(complex)).check()


class SingleIonTests(SimpleTestCase):
    def test_ley_de_ion_aislado(self):
        for gamma in (0.05, 0.1):
            for omega in (0.1, 0.5, 1.0):
                with self.subTest(gamma=gamma, omega=omega):
                    rho = steady_state(un_ion(omega, gamma))
                    n = rho.expect(number_operator(rho.space, 1)).real
                    esperado = single_ion_nst(gamma, 0.04, omega)
                    self.assertLess(abs(n - esperado) / esperado, 0.05)

    def test_estado_fisico_y_residuo(self):
        config = un_ion()
        liouvillian = build_liouvillian(config)
        rho = solve_steady(liouvillian)
        rho.check()
        self.assertLessEqual(steady_residual(liouvillian, rho), 1e-10 * config.total_decay)

    def test_ion_sin_laser_es_degenerado(self):
        config = un_ion(omega=0.0, n_max=1)
        with self.assertRaises(AmbiguousSteadyStateError):
            steady_state(config)
        # |g,0><g,0| pertenece al espacio nulo
        fundamental = np.zeros((4, 4), dtype=complex)
        fundamental[0, 0] = 1.0
        self.assertLess(np.linalg.norm(build_liouvillian(config) @ vec(fundamental)), 1e-14)

    def test_normalizacion_indefinida(self):
        with self.assertRaises(UndefinedNormalizationError):
            single_ion_reference(un_ion(omega=0.0), 1)

    def test_referencia_usa_la_tasa_total(self):
        config = dos_iones(0.85, gamma_ng=0.05)
        referencia = single_ion_reference(config, 1)
        rho = steady_state(un_ion(1.0, config.total_decay))
        self.assertAlmostEqual(referencia, rho.expect(number_operator(rho.space, 1)).real, places=12)


class TwoIonTests(SimpleTestCase):
    def test_acople_unidireccional_recupera_el_ion_aislado(self):
        config = dos_iones(1.0)
        self.assertAlmostEqual(normalized_occupation(config, 1), 1.0, delta=0.02)
        config = dos_iones(0.0)
        self.assertAlmostEqual(normalized_occupation(config, 2), 1.0, delta=0.02)

    def test_observables(self):
        config = dos_iones(0.5, omega_1=0.2)
        rho = steady_state(config)
        rho.check(herm_tol=1e-8, trace_tol=1e-10, positivity_tol=1e-8)
        obs = observables(rho, config)
        self.assertEqual(obs.dim, 36)
        self.assertEqual(len(obs.occupations), 2)
        self.assertLessEqual(obs.residual, 1e-10 * config.total_decay)
        # C es hermítica: C_21 = conj(C_12)
        self.assertAlmostEqual(obs.correlation(2, 1), np.conj(obs.correlation(1, 2)), places=12)
        registro = obs.to_record()
        self.assertEqual(set(registro["c_st"]), {"12"})
        self.assertEqual(registro["n_max"], 2)

    @tag("slow")
    def test_mejora_de_diez_veces(self):
        # Omega_1 = 0.1, Omega_2 = 0.01, mínimo cerca de gamma_R/gamma = 0.382
        config = dos_iones(0.382, omega_1=0.1)
        self.assertAlmostEqual(normalized_occupation(config, 1), 0.11, delta=0.02)

    @tag("slow")
    def test_minimos_en_grilla_de_41_puntos(self):
        razones = np.linspace(0.0, 1.0, 41)
        ntilde = np.array([normalized_occupation(dos_iones(r, omega_1=0.1, n_max=1), 1) for r in razones])
        self.assertAlmostEqual(ntilde.min(), 0.11, delta=0.02)
        paso = razones[1] - razones[0]
        mitad = len(razones) // 2
        self.assertLessEqual(abs(razones[np.argmin(ntilde[:mitad])] - 0.382), paso)
        self.assertLessEqual(abs(razones[mitad + np.argmin(ntilde[mitad:])] - 0.618), paso)

    @tag("slow")
    def test_refrigeracion_no_guiada_en_reciprocidad(self):
        # beta = 0.8 con Gamma = 0.1 fijo
        self.assertLess(normalized_occupation(dos_iones(0.5, gamma=0.08, gamma_ng=0.02), 1), 1.0)
        self.assertGreater(normalized_occupation(dos_iones(0.5), 1), 1.0)


class SolverChecksTests(SimpleTestCase):
    def test_residuo_alto_es_falla_numerica(self):
        base = np.zeros((4, 4), dtype=complex)
        base[2, 2] = 1.0  # |e,0><e,0| decae a tasa Gamma
        with mock.patch("App_CHIROCOOL.services.steady_state._null_vector_dense", return_value=vec(base)):
            with self.assertRaises(NumericalError):
                solve_steady(build_liouvillian(un_ion(n_max=1)))

    def test_estado_no_positivo_se_rechaza(self):
        no_positiva = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
        with (
            mock.patch("App_CHIROCOOL.services.steady_state._null_vector_dense", return_value=vec(no_positiva)),
            mock.patch("App_CHIROCOOL.services.steady_state.steady_residual", return_value=0.0),
        ):
            with self.assertRaises(InvalidDensityMatrixError):
                solve_steady(build_liouvillian(un_ion(n_max=1)))


class ThreeIonTests(SimpleTestCase):
    def test_estado_unico_con_factorizacion_dispersa(self):
        # D = 64: camino disperso; el espacio nulo es unidimensional
        config = ChainConfig(
            n_ions=3, eta=0.04, omega=(1.0, 0.1, 0.1), gamma_r=0.07, gamma_l=0.03, gamma_ng=0.0, n_max=1
        )
        liouvillian = build_liouvillian(config)
        self.assertGreater(liouvillian.dim, 16)
        rho = solve_steady(liouvillian)
        self.assertLessEqual(steady_residual(liouvillian, rho), 1e-10 * config.total_decay)
        self.assertGreaterEqual(rho.min_eigenvalue(), -1e-8)
        self.assertAlmostEqual(rho.trace().real, 1.0, places=10)


class SteadyInvariantTests(SimpleTestCase):
    def test_estabilidad_frente_a_la_truncacion(self):
        ocupaciones = [
            steady_state(dos_iones(0.5, n_max=n_max)).expect(number_operator(SpaceDescriptor(2, n_max), 1)).real
            for n_max in (1, 2)
        ]
        self.assertLess(abs(ocupaciones[1] - ocupaciones[0]) / ocupaciones[1], 0.02)

    def test_el_refrigerante_siempre_se_calienta(self):
        for gamma_r_over_gamma in (0.0, 0.25, 0.5, 0.75, 1.0):
            for razon in (0.1, 0.5, 1.0):
                with self.subTest(gamma_r=gamma_r_over_gamma, razon=razon):
                    config = dos_iones(gamma_r_over_gamma, razon=razon, n_max=1)
                    rho = steady_state(config)
                    ocupacion = rho.expect(number_operator(rho.space, 2)).real
                    self.assertGreaterEqual(ocupacion, single_ion_reference(config, 2) * (1 - 1e-6))

    def test_correlaciones_crecen_en_el_regimen_de_calentamiento(self):
        magnitudes = {}
        for gamma_r_over_gamma in (0.4, 0.5):
            config = dos_iones(gamma_r_over_gamma, omega_1=0.2, n_max=1)
            magnitudes[gamma_r_over_gamma] = abs(observables(steady_state(config), config).correlation(1, 2).real)
        self.assertGreater(magnitudes[0.5], 0.0)
        self.assertGreater(magnitudes[0.5], magnitudes[0.4])


class SpaceTests(SimpleTestCase):
    def test_espacio_del_estado(self):
        rho = steady_state(un_ion(n_max=1))
        self.assertEqual(rho.space, SpaceDescriptor(1, 1))
