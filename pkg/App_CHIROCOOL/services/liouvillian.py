"""
Generador de Lindblad: superoperador explícito (vectorización por columnas) y
acción en forma matricial sin materializar el superoperador.

Convención única del proyecto: vec(rho) apila columnas, vec(A X B) = (B^T ⊗ A) vec(X).
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..exceptions import DimensionMismatchError, SuperoperatorTooLargeError
from ..utils import parametro
from .chain_model import build_dissipators, build_hamiltonian, channel_jumps

logger = logging.getLogger(__name__)


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(vector, dim):
    return np.asarray(vector).reshape((dim, dim), order="F")


@dataclass(frozen=True)
class Liouvillian:
    matrix: sp.csc_matrix = field(repr=False)
    hamiltonian: sp.csr_matrix = field(repr=False)
    channels: tuple = field(repr=False)
    space: object = None
    rate_scale: float = 1.0  # Gamma total, escala de las tolerancias

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    def __matmul__(self, vector):
        return self.matrix @ vector


class MatrixGenerator:
    """
    dρ/dt = -i (H_eff ρ - ρ H_eff†) + sum_k λ_k J_k ρ J_k†, con H_eff = H - i/2 sum λ J†J.

    Costo O(nnz · D) por evaluación: H y los saltos son dispersos.
    """

    def __init__(self, hamiltonian, channels, space):
        self.dim = hamiltonian.shape[0]
        self.jumps = []
        for canal in channels:
            self.jumps.extend(channel_jumps(canal, space))
        efectivo = sp.csr_matrix(hamiltonian, dtype=complex)
        for lam, salto in self.jumps:
            efectivo = efectivo - 0.5j * lam * (salto.conj().T @ salto)
        self.h_eff = efectivo.tocsr()

    def __call__(self, rho):
        rho = np.asarray(rho)
        if rho.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"rho {rho.shape} no coincide con D={self.dim}")
        # ρ X† = (X ρ†)† vale para cualquier ρ; así solo se multiplica disperso @ denso.
        rho_dag = rho.conj().T
        salida = -1j * (self.h_eff @ rho - (self.h_eff @ rho_dag).conj().T)
        for lam, salto in self.jumps:
            salida = salida + lam * (salto @ (salto @ rho_dag).conj().T)
        return np.asarray(salida)


def assemble(hamiltonian, channels, space, max_dim=None):
    """
    Superoperador D^2 x D^2:
        -i(I⊗H - H^T⊗I) + sum_k λ_k [conj(J)⊗J - 1/2 I⊗J†J - 1/2 (J†J)^T⊗I].
    """
    dim = hamiltonian.shape[0]
    if dim != space.total_dim:
        raise DimensionMismatchError(f"H es {dim}x{dim} pero el espacio tiene D={space.total_dim}")
    max_dim = max_dim or parametro("SUPEROPERATOR_MAX_DIM")
    if dim > max_dim:
        raise SuperoperatorTooLargeError(
            f"D={dim} supera el límite de ensamblado explícito ({max_dim}); use la forma matricial."
        )
    identidad = sp.identity(dim, dtype=complex, format="csr")
    h = sp.csr_matrix(hamiltonian, dtype=complex)
    superop = -1j * (sp.kron(identidad, h) - sp.kron(h.T, identidad))
    tasa_total = 0.0
    for canal in channels:
        tasa_total += canal.total_rate
        for lam, salto in channel_jumps(canal, space):
            jdj = salto.conj().T @ salto
            superop = superop + lam * (
                sp.kron(salto.conj(), salto) - 0.5 * sp.kron(identidad, jdj) - 0.5 * sp.kron(jdj.T, identidad)
            )
    logger.info("Liouvilliano ensamblado: D=%d, superoperador %dx%d", dim, dim**2, dim**2)
    return Liouvillian(
        matrix=superop.tocsc(),
        hamiltonian=h,
        channels=tuple(channels),
        space=space,
        rate_scale=tasa_total / max(space.n_ions, 1) or 1.0,
    )


def apply(hamiltonian, channels, rho, space):
    """dρ/dt en forma matricial, sin construir el superoperador."""
    return MatrixGenerator(hamiltonian, channels, space)(rho)


def build_liouvillian(config, max_dim=None):
    space = config.space
    return assemble(build_hamiltonian(config, space), build_dissipators(config), space, max_dim=max_dim)
