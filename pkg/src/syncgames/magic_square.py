"""The Mermin-Peres magic square: a 6-equation, 9-variable GF(2) system with no
classical solution, together with its standard two-qubit Pauli representation of
the solution group (J represented by -I)."""
from __future__ import annotations

import numpy as np

from .gf2 import BinaryLinearSystem
from .solution_group import GroupRep

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def mermin_peres_system() -> BinaryLinearSystem:
    """Rows multiply to +1, columns to +1, +1, -1 on the 3 x 3 variable grid."""
    return BinaryLinearSystem(
        m=6,
        n=9,
        rows=(
            frozenset({1, 2, 3}),
            frozenset({4, 5, 6}),
            frozenset({7, 8, 9}),
            frozenset({1, 4, 7}),
            frozenset({2, 5, 8}),
            frozenset({3, 6, 9}),
        ),
        b=(0, 0, 0, 0, 0, 1),
    )


def pauli_magic_square_rep() -> GroupRep:
    """The standard two-qubit observable table; each row and the first two columns
    multiply to +I, the last column to -I, and equation-mates commute."""
    table = (
        np.kron(PAULI_X, PAULI_I),
        np.kron(PAULI_I, PAULI_X),
        np.kron(PAULI_X, PAULI_X),
        np.kron(PAULI_I, PAULI_Z),
        np.kron(PAULI_Z, PAULI_I),
        np.kron(PAULI_Z, PAULI_Z),
        np.kron(PAULI_X, PAULI_Z),
        np.kron(PAULI_Z, PAULI_X),
        np.kron(PAULI_Y, PAULI_Y),
    )
    return GroupRep(images=table, j_image=-np.eye(4, dtype=complex))
