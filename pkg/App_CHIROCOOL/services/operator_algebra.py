"""
Espacio de Hilbert compuesto espín ⊗ fonón de una cadena de N iones y
embebido de operadores locales.

Convenciones fijas:
    - por sitio el orden es (espín ⊗ fonón), espín (|g>, |e>), fonón (|0>, ..., |n_max>);
    - el ion 1 es el factor tensorial más lento (el de más a la izquierda).

Los operadores son matrices dispersas CSR de scipy; se direccionan por índice
igual que una matriz densa (``op[fila, columna]``).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
import scipy.sparse as sp

from ..exceptions import DimensionMismatchError, InvalidTruncationError, SiteOutOfRangeError

logger = logging.getLogger(__name__)

SPIN = "spin"
PHONON = "phonon"


@dataclass(frozen=True)
class SpaceDescriptor:
    n_ions: int
    n_max: int
    spin_dim: int = 2

    def __post_init__(self):
        if self.n_ions < 1:
            raise DimensionMismatchError(f"n_ions debe ser >= 1 (recibido {self.n_ions})")
        if self.n_max < 1:
            raise InvalidTruncationError(f"n_max debe ser >= 1 (recibido {self.n_max})")

    @property
    def phonon_dim(self):
        return self.n_max + 1

    @property
    def site_dim(self):
        return self.spin_dim * self.phonon_dim

    @property
    def total_dim(self):
        return self.site_dim**self.n_ions

    def check_site(self, site):
        if not 1 <= site <= self.n_ions:
            raise SiteOutOfRangeError(f"Sitio {site} fuera de [1, {self.n_ions}]")


def local_lowering_spin():
    """σ = |g><e| en la base (|g>, |e>)."""
    return sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def local_annihilation(n_max):
    """a|n> = sqrt(n)|n-1>, truncado en n_max."""
    if n_max < 1:
        raise InvalidTruncationError(f"n_max debe ser >= 1 (recibido {n_max})")
    return sp.diags(np.sqrt(np.arange(1, n_max + 1)), offsets=1, format="csr", dtype=complex)


def embed(local, site, kind, space):
    """
    Devuelve identidad ⊗ ... ⊗ local ⊗ ... ⊗ identidad en el orden global de sitios.

    Args:
        local: operador de un sitio (2x2 para espín, (n_max+1)^2 para fonón).
        site: índice de ion en [1, N].
        kind: "spin" o "phonon".
        space: SpaceDescriptor del espacio compuesto.
    """
    space.check_site(site)
    local = sp.csr_matrix(local, dtype=complex)
    if kind == SPIN:
        esperado = space.spin_dim
        factor_sitio = sp.kron(local, sp.identity(space.phonon_dim, dtype=complex))
    elif kind == PHONON:
        esperado = space.phonon_dim
        factor_sitio = sp.kron(sp.identity(space.spin_dim, dtype=complex), local)
    else:
        raise ValueError(f"Tipo de operador desconocido: {kind!r}")

    if local.shape != (esperado, esperado):
        raise DimensionMismatchError(
            f"Operador local {local.shape} no coincide con la dimensión {kind} {esperado}"
        )

    factores = [
        factor_sitio if s == site else sp.identity(space.site_dim, dtype=complex)
        for s in range(1, space.n_ions + 1)
    ]
    return reduce(lambda izq, der: sp.kron(izq, der, format="csr"), factores).tocsr()


@lru_cache(maxsize=None)
def spin_lowering(space, site):
    return embed(local_lowering_spin(), site, SPIN, space)


@lru_cache(maxsize=None)
def annihilation(space, site):
    return embed(local_annihilation(space.n_max), site, PHONON, space)


@lru_cache(maxsize=None)
def number_operator(space, site):
    a = annihilation(space, site)
    return (a.conj().T @ a).tocsr()


@lru_cache(maxsize=None)
def excited_projector(space, site):
    s = spin_lowering(space, site)
    return (s.conj().T @ s).tocsr()
