"""
Primitivas de álgebra linear complexa compartilhadas pelos demais serviços.

`SparseComplexMatrix` é uma lista de coordenadas imutável e canônica
(ordenada por (linha, coluna), sem duplicatas e sem entradas abaixo da
tolerância de zero). Produtos de Kronecker são delegados a `scipy.sparse`.
Matrizes densas são `numpy.ndarray` complexos.
"""
from __future__ import annotations

from functools import reduce
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from app.core.config import settings
from app.core.exceptions import (
    DenseCapExceededError,
    DimensionMismatchError,
    DimensionOverflowError,
    ValidationException,
)

DenseComplexMatrix = npt.NDArray[np.complex128]
Entry = Tuple[int, int, complex]


def _check_dimension(value: int, what: str) -> int:
    if value > settings.MAX_DIMENSION:
        raise DimensionOverflowError(
            f"Dimensão {what}={value} excede MAX_DIMENSION={settings.MAX_DIMENSION}",
            **{what: value},
        )
    return value


class SparseComplexMatrix:
    """
    Matriz esparsa complexa em formato de coordenadas.

    Attributes:
        rows: Número de linhas
        cols: Número de colunas
        row_idx, col_idx, values: Arrays canônicos (somente leitura)

    Example:
        >>> m = SparseComplexMatrix.from_entries(2, 2, [(0, 1, 1.0)])
        >>> m.nnz
        1
    """

    __slots__ = ("rows", "cols", "row_idx", "col_idx", "values")

    def __init__(
        self,
        rows: int,
        cols: int,
        row_idx: Sequence[int] = (),
        col_idx: Sequence[int] = (),
        values: Sequence[complex] = (),
        tol: Optional[float] = None,
    ):
        if rows < 0 or cols < 0:
            raise ValidationException(
                "Dimensões negativas", field_errors={"rows/cols": [f"{rows}x{cols}"]}
            )
        _check_dimension(rows, "rows")
        _check_dimension(cols, "cols")
        tol = settings.ZERO_TOL if tol is None else tol

        r = np.asarray(row_idx, dtype=np.int64).ravel()
        c = np.asarray(col_idx, dtype=np.int64).ravel()
        v = np.asarray(values, dtype=np.complex128).ravel()
        if not (r.size == c.size == v.size):
            raise DimensionMismatchError(
                "Arrays de coordenadas com tamanhos diferentes",
                rows=int(r.size), cols=int(c.size), values=int(v.size),
            )

        if r.size:
            bad = (r < 0) | (r >= rows) | (c < 0) | (c >= cols)
            if bad.any():
                k = int(np.flatnonzero(bad)[0])
                raise ValidationException(
                    "Índice fora do intervalo",
                    field_errors={f"entries[{k}]": [f"({r[k]}, {c[k]}) fora de {rows}x{cols}"]},
                )

        keep = np.abs(v) >= tol
        r, c, v = r[keep], c[keep], v[keep]

        order = np.lexsort((c, r))
        r, c, v = r[order], c[order], v[order]
        if r.size > 1:
            dup = (r[1:] == r[:-1]) & (c[1:] == c[:-1])
            if dup.any():
                k = int(np.flatnonzero(dup)[0])
                raise ValidationException(
                    "Entrada duplicada",
                    field_errors={"entries": [f"par ({r[k]}, {c[k]}) repetido"]},
                )

        for arr in (r, c, v):
            arr.setflags(write=False)

        self.rows = int(rows)
        self.cols = int(cols)
        self.row_idx = r
        self.col_idx = c
        self.values = v

    # ----- construtores -----

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[Entry]) -> "SparseComplexMatrix":
        entries = list(entries)
        if not entries:
            return cls(rows, cols)
        r, c, v = zip(*entries)
        return cls(rows, cols, r, c, v)

    @classmethod
    def from_scipy(cls, matrix: sp.spmatrix) -> "SparseComplexMatrix":
        """Converte uma matriz scipy, somando duplicatas."""
        coo = sp.coo_matrix(matrix)
        coo.sum_duplicates()
        return cls(coo.shape[0], coo.shape[1], coo.row, coo.col, coo.data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseComplexMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, dim: int) -> "SparseComplexMatrix":
        idx = np.arange(dim)
        return cls(dim, dim, idx, idx, np.ones(dim))

    # ----- propriedades -----

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    @property
    def entries(self) -> List[Entry]:
        return [
            (int(r), int(c), complex(v))
            for r, c, v in zip(self.row_idx, self.col_idx, self.values)
        ]

    def __iter__(self) -> Iterator[Entry]:
        return iter(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseComplexMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_idx, other.row_idx)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:
        return hash((self.shape, self.row_idx.tobytes(), self.col_idx.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        return f"SparseComplexMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    # ----- conversões -----

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, (self.row_idx, self.col_idx)), shape=self.shape, dtype=np.complex128
        )

    def to_dense(self) -> DenseComplexMatrix:
        """
        Raises:
            DenseCapExceededError: se a maior dimensão passar de 2^DENSE_QUBIT_CAP
        """
        dim = max(self.rows, self.cols)
        if dim > 2 ** settings.DENSE_QUBIT_CAP:
            raise DenseCapExceededError(num_qubits_for(dim), settings.DENSE_QUBIT_CAP)
        dense = np.zeros(self.shape, dtype=np.complex128)
        dense[self.row_idx, self.col_idx] = self.values
        return dense

    # ----- álgebra -----

    def scale(self, alpha: complex) -> "SparseComplexMatrix":
        return SparseComplexMatrix(self.rows, self.cols, self.row_idx, self.col_idx, self.values * alpha)

    def __add__(self, other: "SparseComplexMatrix") -> "SparseComplexMatrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(
                "Soma de matrizes com formas diferentes", left=self.shape, right=other.shape
            )
        return SparseComplexMatrix.from_scipy(self.to_scipy() + other.to_scipy())

    def allclose(self, other: "SparseComplexMatrix", atol: float = 1e-12) -> bool:
        if self.shape != other.shape:
            return False
        diff = abs(self.to_scipy() - other.to_scipy())
        return diff.nnz == 0 or float(diff.max()) <= atol

    def padded(self, rows: int, cols: int) -> "SparseComplexMatrix":
        """Mesma matriz embutida no canto superior esquerdo de uma matriz maior."""
        if rows < self.rows or cols < self.cols:
            raise DimensionMismatchError(
                "Padding menor que a matriz", shape=self.shape, target=(rows, cols)
            )
        return SparseComplexMatrix(rows, cols, self.row_idx, self.col_idx, self.values)


def from_dense(dense: npt.ArrayLike, tol: Optional[float] = None) -> SparseComplexMatrix:
    """Inversa de `to_dense`: mantém as entradas com |v| >= tolerância."""
    arr = np.asarray(dense, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatchError("Matriz densa deve ter duas dimensões", ndim=arr.ndim)
    r, c = np.nonzero(arr)
    return SparseComplexMatrix(arr.shape[0], arr.shape[1], r, c, arr[r, c], tol=tol)


def to_dense(m: SparseComplexMatrix) -> DenseComplexMatrix:
    return m.to_dense()


def kron(a: SparseComplexMatrix, b: SparseComplexMatrix) -> SparseComplexMatrix:
    """Produto de Kronecker a ⊗ b."""
    _check_dimension(a.rows * b.rows, "rows")
    _check_dimension(a.cols * b.cols, "cols")
    if a.nnz == 0 or b.nnz == 0:
        return SparseComplexMatrix.zeros(a.rows * b.rows, a.cols * b.cols)
    return SparseComplexMatrix.from_scipy(sp.kron(a.to_scipy(), b.to_scipy(), format="coo"))


def kron_all(factors: Sequence[SparseComplexMatrix]) -> SparseComplexMatrix:
    """Produto de Kronecker de uma sequência não vazia de fatores."""
    if not factors:
        raise DimensionMismatchError("Lista de fatores vazia")
    return reduce(kron, factors)


def identity_padded_embed(
    m: SparseComplexMatrix, left_copies: int, right_copies: int, block_dim: int
) -> SparseComplexMatrix:
    """
    Retorna I_d^{⊗left} ⊗ m ⊗ I_d^{⊗right}.

    Args:
        m: Matriz central
        left_copies: Número de identidades à esquerda
        right_copies: Número de identidades à direita
        block_dim: Dimensão d de cada identidade
    """
    if block_dim < 1:
        raise ValidationException(
            "block_dim deve ser >= 1", field_errors={"block_dim": [str(block_dim)]}
        )
    if left_copies < 0 or right_copies < 0:
        raise ValidationException(
            "Número de cópias negativo",
            field_errors={"copies": [f"left={left_copies}, right={right_copies}"]},
        )
    left_dim = _check_dimension(block_dim ** left_copies, "rows")
    right_dim = _check_dimension(block_dim ** right_copies, "rows")

    result = m
    if left_dim > 1:
        result = kron(SparseComplexMatrix.identity(left_dim), result)
    if right_dim > 1:
        result = kron(result, SparseComplexMatrix.identity(right_dim))
    return result


def matvec(m: SparseComplexMatrix, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """Produto matriz-vetor m·x."""
    vec = np.asarray(x, dtype=np.complex128)
    if vec.shape[0] != m.cols:
        raise DimensionMismatchError("Vetor incompatível com a matriz", cols=m.cols, vector=vec.shape[0])
    return np.asarray(m.to_scipy() @ vec, dtype=np.complex128)


def is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


def next_power_of_two(value: int) -> int:
    if value <= 1:
        return 1
    return 1 << (int(value) - 1).bit_length()


def num_qubits_for(dim: int) -> int:
    """log2 de uma dimensão potência de dois."""
    return next_power_of_two(dim).bit_length() - 1


def pad_to_power_of_two(m: SparseComplexMatrix) -> SparseComplexMatrix:
    """Completa com zeros até a próxima potência de dois (matriz quadrada)."""
    dim = next_power_of_two(max(m.rows, m.cols))
    if (m.rows, m.cols) == (dim, dim):
        return m
    return m.padded(dim, dim)
