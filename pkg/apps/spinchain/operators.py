"""
Operators of the XY chain: embedded Paulis, the Hamiltonian, total magnetization.

Single-site matrices are written in index order (|down>, |up>), so sigma_z is
diag(-1, +1) and sigma_z|up> = +|up>.
"""
import numpy as np

from apps.qmatrix.linalg import identity, kron_all

from .exceptions import SiteIndexError
from .states import BasisLabel

PAULI = {
    'x': np.array([[0, 1], [1, 0]], dtype=np.complex128),
    'y': np.array([[0, 1j], [-1j, 0]], dtype=np.complex128),
    'z': np.array([[-1, 0], [0, 1]], dtype=np.complex128),
}


def pauli_at(which, site, n_sites):
    """
    I x ... x sigma_which x ... x I with the Pauli matrix on ``site``.

    Raises:
        SiteIndexError: if ``site`` is not in [0, n_sites)
        ValueError: for an unknown Pauli name
    """
    try:
        sigma = PAULI[which]
    except KeyError:
        raise ValueError(f'Unknown Pauli operator {which!r}; expected one of x, y, z') from None
    if not 0 <= site < n_sites:
        raise SiteIndexError(f'Site {site} out of range for {n_sites} sites')
    factors = [identity(2)] * n_sites
    factors[site] = sigma
    return kron_all(factors) if n_sites > 1 else sigma.copy()


def hamiltonian(p):
    """
    H = sum_i omega_i sz_i + (J/2) sum_i (sx_i sx_{i+1} + sy_i sy_{i+1})

    with omega_gate = omega0 + delta and all other sites at omega0.
    """
    n = p.n_sites
    h = np.zeros((p.dimension, p.dimension), dtype=np.complex128)
    for site, omega in enumerate(p.frequencies()):
        if omega:
            h += omega * pauli_at('z', site, n)
    if p.coupling_j:
        for site in range(n - 1):
            h += 0.5 * p.coupling_j * (
                pauli_at('x', site, n) @ pauli_at('x', site + 1, n)
                + pauli_at('y', site, n) @ pauli_at('y', site + 1, n)
            )
    return h


def magnetization_operator(n_sites):
    """sum_i sz_i; diagonal with spectrum {-n, -n+2, ..., n}."""
    if n_sites < 1:
        raise ValueError(f'n_sites must be >= 1 (got {n_sites})')
    return sum(pauli_at('z', site, n_sites) for site in range(n_sites))


def sector_indices(n_sites, magnetization):
    """Basis indices with the given total magnetization, ascending."""
    return [
        index for index in range(2 ** n_sites)
        if BasisLabel.from_index(index, n_sites).magnetization == magnetization
    ]


def sector_block(matrix, indices):
    """Restriction of ``matrix`` to the listed basis indices."""
    idx = np.asarray(indices)
    return np.asarray(matrix)[np.ix_(idx, idx)]
