"""Assembly of Gamma x Z2 representation data from a finite-group action.

The antipodal Z2 factor is realized as one extra 2-point orbit appended to the
permutation domain; its nontrivial element acts as -Id on every representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonIntegralMultiplicity
from .groups import CharacterTable, FiniteGroup, OrthogonalAction, Permutation, cyclic_group, direct_product
from .orbit_types import Irrep


def antipodal_product(gamma: FiniteGroup) -> tuple[FiniteGroup, list[int]]:
    """Gamma' = Gamma x Z2 plus the map (gamma index, sign index) -> Gamma' index.

    Returns (gamma_prime, lookup) with lookup[2 * gi + (0 if +1 else 1)].
    """
    gamma_prime = direct_product(gamma, cyclic_group(2))
    d = gamma.degree
    lookup = [0] * (2 * gamma.order)
    for gi, p in enumerate(gamma.elements):
        for sbit, tail in ((0, [d, d + 1]), (1, [d + 1, d])):
            q = Permutation(list(p.images) + tail)
            lookup[2 * gi + sbit] = gamma_prime.index[q]
    return gamma_prime, lookup


def split_gamma_prime(gamma: FiniteGroup, gamma_prime: FiniteGroup) -> list[tuple[int, int]]:
    """For each Gamma' element index: (gamma index, sign in {+1,-1})."""
    d = gamma.degree
    out = []
    for p in gamma_prime.elements:
        base = Permutation(p.images[:d])
        sign = 1 if p.images[d] == d else -1
        out.append((gamma.index[base], sign))
    return out


@dataclass(frozen=True)
class IsotypicComponent:
    """One isotypic block of the model representation V."""

    j: int
    label: str
    irrep_dim: int
    multiplicity: int
    basis: np.ndarray  # V-coordinates, shape (k, irrep_dim * multiplicity)


def isotypic_components(action: OrthogonalAction, table: CharacterTable) -> list[IsotypicComponent]:
    """Isotypic decomposition of an action using a supplied character table."""
    g = action.group
    k = action.dimension
    classes = g.conjugacy_classes()
    out = []
    for j, (label, row) in enumerate(zip(table.labels, table.rows)):
        d_j = int(row[table._identity_column()])
        P = np.zeros((k, k))
        chi = {}
        for rep, val in zip(table.class_representatives, row):
            chi[g.element_class_index(rep)] = float(val)
        for x in range(g.order):
            P += chi[g.element_class_index(x)] * action.matrices[x]
        P *= d_j / g.order
        vals, vecs = np.linalg.eigh((P + P.T) / 2)
        basis = vecs[:, vals > 0.5]
        dim_block = basis.shape[1]
        if dim_block % d_j != 0:
            raise NonIntegralMultiplicity(f"isotypic block of {label} has dimension {dim_block}")
        if dim_block:
            out.append(IsotypicComponent(j, label, d_j, dim_block // d_j, basis))
    total = sum(c.irrep_dim * c.multiplicity for c in out)
    if total != k:
        raise NonIntegralMultiplicity(f"isotypic blocks sum to {total}, expected {k}")
    return out


def irreps_with_antipodal(gamma: FiniteGroup, gamma_prime: FiniteGroup,
                          action: OrthogonalAction,
                          components: Sequence[IsotypicComponent]) -> dict[int, Irrep]:
    """Matrix models of V_j^- (one copy of each irrep, antipodal sign included).

    For multiplicity > 1 the first irreducible summand of the block is used;
    the summand split is obtained by symmetry-averaging a generic projector.
    """
    split = split_gamma_prime(gamma, gamma_prime)
    out = {}
    for comp in components:
        q = _single_copy_basis(gamma, action, comp)
        mats = []
        for gi, sign in split:
            mats.append(sign * (q.T @ action.matrices[gi] @ q))
        for m in mats:
            if np.abs(m @ m.T - np.eye(comp.irrep_dim)).max() > 1e-9:
                raise NonIntegralMultiplicity(f"irrep block for {comp.label} not orthogonal")
        out[comp.j] = Irrep.from_matrices(comp.j, mats)
    return out


def _single_copy_basis(gamma: FiniteGroup, action: OrthogonalAction,
                       comp: IsotypicComponent) -> np.ndarray:
    if comp.multiplicity == 1:
        return comp.basis
    # average a fixed generic symmetric matrix over the group; its eigenspaces
    # inside the block split the copies
    rng = np.random.default_rng(12345)
    k = action.dimension
    M = rng.standard_normal((k, k))
    M = M + M.T
    Mbar = np.zeros((k, k))
    for x in range(gamma.order):
        R = action.matrices[x]
        Mbar += R @ M @ R.T
    Mbar /= gamma.order
    sub = comp.basis.T @ Mbar @ comp.basis
    vals, vecs = np.linalg.eigh(sub)
    # group eigenvalues; each cluster of size irrep_dim spans one copy
    order = np.argsort(vals)
    chosen = vecs[:, order[: comp.irrep_dim]]
    return comp.basis @ chosen
