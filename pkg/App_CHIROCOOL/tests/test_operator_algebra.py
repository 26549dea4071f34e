import numpy as np
import scipy.sparse as sp
from django.test import SimpleTestCase

from App_CHIROCOOL.exceptions import DimensionMismatchError, InvalidTruncationError, SiteOutOfRangeError
from App_CHIROCOOL.services.operator_algebra import (
    PHONON,
    SPIN,
    SpaceDescriptor,
    annihilation,
    embed,
    excited_projector,
    local_annihilation,
    local_lowering_spin,
    number_operator,
    spin_lowering,
)


class SpaceDescriptorTests(SimpleTestCase):
    def test_dimensiones(self):
        space = SpaceDescriptor(2, 2)
        self.assertEqual(space.phonon_dim, 3)
        self.assertEqual(space.site_dim, 6)
        self.assertEqual(space.total_dim, 36)

    def test_truncacion_invalida(self):
        with self.assertRaises(InvalidTruncationError):
            SpaceDescriptor(1, 0)

    def test_sin_iones(self):
        with self.assertRaises(DimensionMismatchError):
            SpaceDescriptor(0, 1)

    def test_sitio_fuera_de_rango(self):
        with self.assertRaises(SiteOutOfRangeError):
            spin_lowering(SpaceDescriptor(2, 1), 3)


class LocalOperatorTests(SimpleTestCase):
    def test_aniquilacion_truncada(self):
        a = local_annihilation(2).toarray()
        np.testing.assert_allclose(a, [[0, 1, 0], [0, 0, np.sqrt(2)], [0, 0, 0]])

    def test_conmutador_salvo_ultimo_nivel(self):
        a = local_annihilation(3).toarray()
        conmutador = a @ a.conj().T - a.conj().T @ a
        np.testing.assert_allclose(np.diag(conmutador)[:-1], np.ones(3), atol=1e-14)
        self.assertAlmostEqual(np.diag(conmutador)[-1].real, -3.0)

    def test_bajada_de_espin(self):
        s = local_lowering_spin().toarray()
        np.testing.assert_allclose(s @ np.array([0, 1]), [1, 0])


class EmbedTests(SimpleTestCase):
    def test_ion_uno_es_el_factor_mas_lento(self):
        space = SpaceDescriptor(2, 1)
        esperado = np.kron(np.kron(local_lowering_spin().toarray(), np.eye(2)), np.eye(4))
        np.testing.assert_allclose(spin_lowering(space, 1).toarray(), esperado)

    def test_operadores_de_sitios_distintos_conmutan(self):
        space = SpaceDescriptor(2, 1)
        a1, s2 = annihilation(space, 1), spin_lowering(space, 2)
        self.assertEqual(abs(a1 @ s2 - s2 @ a1).max(), 0)

    def test_numero_y_proyector(self):
        space = SpaceDescriptor(2, 2)
        n2 = number_operator(space, 2)
        self.assertTrue(sp.isspmatrix_csr(n2) or sp.issparse(n2))
        self.assertEqual(sorted(set(np.round(n2.diagonal().real, 12))), [0.0, 1.0, 2.0])
        p = excited_projector(space, 1)
        np.testing.assert_allclose((p @ p - p).toarray(), 0)

    def test_dimension_local_incorrecta(self):
        with self.assertRaises(DimensionMismatchError):
            embed(np.eye(3), 1, SPIN, SpaceDescriptor(1, 1))
        with self.assertRaises(DimensionMismatchError):
            embed(np.eye(2), 1, PHONON, SpaceDescriptor(1, 2))
