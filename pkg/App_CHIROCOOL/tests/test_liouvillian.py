import numpy as np
from django.test import SimpleTestCase

from App_CHIROCOOL.exceptions import DimensionMismatchError, SuperoperatorTooLargeError
from App_CHIROCOOL.services.chain_model import ChainConfig, build_dissipators, build_hamiltonian
from App_CHIROCOOL.services.liouvillian import MatrixGenerator, apply, build_liouvillian, unvec, vec


def densidad_aleatoria(dim, semilla=7):
    rng = np.random.default_rng(semilla)
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


class VecTests(SimpleTestCase):
    def test_apilado_por_columnas(self):
        m = np.array([[1, 2], [3, 4]])
        np.testing.assert_array_equal(vec(m), [1, 3, 2, 4])
        np.testing.assert_array_equal(unvec(vec(m), 2), m)

    def test_identidad_de_kronecker(self):
        rng = np.random.default_rng(1)
        a, x, b = (rng.normal(size=(3, 3)) for _ in range(3))
        np.testing.assert_allclose(vec(a @ x @ b), np.kron(b.T, a) @ vec(x))


class LiouvillianTests(SimpleTestCase):
    def setUp(self):
        self.config = ChainConfig(
            n_ions=2, eta=0.04, omega=(1.0, 0.1), gamma_r=0.06, gamma_l=0.03, gamma_ng=0.01, xi=1.1, n_max=1
        )
        self.liouvillian = build_liouvillian(self.config)
        self.dim = self.config.space.total_dim

    def test_preserva_la_traza(self):
        rho = densidad_aleatoria(self.dim)
        derivada = unvec(self.liouvillian @ vec(rho), self.dim)
        escala = self.config.total_decay * np.linalg.norm(rho)
        self.assertLessEqual(abs(np.trace(derivada)), 1e-12 * max(escala, 1.0))

    def test_preserva_la_hermiticidad(self):
        rho = densidad_aleatoria(self.dim)
        derivada = unvec(self.liouvillian @ vec(rho), self.dim)
        np.testing.assert_allclose(derivada, derivada.conj().T, atol=1e-13)

    def test_forma_matricial_coincide_con_el_superoperador(self):
        rho = densidad_aleatoria(self.dim, semilla=3)
        generador = MatrixGenerator(
            build_hamiltonian(self.config), build_dissipators(self.config), self.config.space
        )
        np.testing.assert_allclose(generador(rho), unvec(self.liouvillian @ vec(rho), self.dim), atol=1e-13)

    def test_apply(self):
        rho = densidad_aleatoria(self.dim, semilla=5)
        resultado = apply(
            build_hamiltonian(self.config), build_dissipators(self.config), rho, self.config.space
        )
        np.testing.assert_allclose(resultado, unvec(self.liouvillian @ vec(rho), self.dim), atol=1e-13)

    def test_dimension_incorrecta(self):
        generador = MatrixGenerator(
            build_hamiltonian(self.config), build_dissipators(self.config), self.config.space
        )
        with self.assertRaises(DimensionMismatchError):
            generador(np.eye(3))

    def test_limite_de_ensamblado(self):
        with self.assertRaises(SuperoperatorTooLargeError):
            build_liouvillian(self.config, max_dim=8)

    def test_decaimiento_del_excitado(self):
        config = ChainConfig(n_ions=1, eta=0.04, omega=(0.0,), gamma_r=0.0, gamma_l=0.0, gamma_ng=0.1, n_max=1)
        liouvillian = build_liouvillian(config)
        rho = np.zeros((4, 4), dtype=complex)
        rho[2, 2] = 1.0  # |e,0><e,0|
        derivada = unvec(liouvillian @ vec(rho), 4)
        self.assertAlmostEqual(derivada[2, 2].real, -0.1)
        self.assertAlmostEqual(derivada[0, 0].real, 0.1)

    def test_espectro_en_el_semiplano_izquierdo(self):
        for n_ions, omega in ((1, (1.0,)), (2, (1.0, 0.1))):
            with self.subTest(n_ions=n_ions):
                config = ChainConfig(
                    n_ions=n_ions, eta=0.04, omega=omega, gamma_r=0.06, gamma_l=0.03, gamma_ng=0.01, n_max=1
                )
                liouvillian = build_liouvillian(config)
                autovalores = np.linalg.eigvals(liouvillian.matrix.toarray())
                self.assertLessEqual(autovalores.real.max(), 1e-10 * config.total_decay)
