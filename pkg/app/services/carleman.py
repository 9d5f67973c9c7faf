"""
Linearização de Carleman de EDOs polinomiais.

Monta o sistema linear truncado dy/dt = A(t)·y + b(t) sobre os estados
elevados y_j = Φ^{⊗j}, integra esse sistema com RK4 de passo fixo e
mede a convergência em função da ordem de truncamento N.

Convenções:
    - M_0 entra como vetor de forçamento no bloco 1 e como banda
      subdiagonal (coluna de bloco j-1) nos blocos j >= 2.
    - Coeficientes dependentes do tempo são polinômios em t:
      M_k(t) = Σ_q t^q · C_{k,q}.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import pandas as pd
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from app.core.config import settings
from app.core.exceptions import (
    DimensionMismatchError,
    DimensionOverflowError,
    DivergenceError,
    ValidationException,
)
from app.core.logging import get_logger
from app.services.tensorcore import SparseComplexMatrix, identity_padded_embed

logger = get_logger(__name__)

ComplexVector = npt.NDArray[np.complex128]
Evaluator = Callable[[float], Tuple[SparseComplexMatrix, ...]]
TimeTerm = Tuple[int, int, SparseComplexMatrix]  # (k, potência de t, C_{k,q})


# ----- tipos de domínio -----

@dataclass(frozen=True)
class PolynomialSystem:
    """
    Modelo dΦ/dt = M_0 + M_1 Φ + Σ_{k>=2} M_k Φ^{⊗k}.

    Attributes:
        n: Dimensão do estado
        p: Grau polinomial (>= 1)
        matrices: M_0..M_p (M_0 é n x 1, M_k é n x n^k). Para sistemas
            dependentes do tempo, guarda os coeficientes avaliados em
            `reference_time` e serve de molde estrutural.
        evaluator: Função opcional t -> (M_0(t), ..., M_p(t))
        time_terms: Termos polinomiais em t, quando o avaliador vem deles
        reference_time: Instante usado para preencher `matrices`
    """

    n: int
    p: int
    matrices: Tuple[SparseComplexMatrix, ...]
    evaluator: Optional[Evaluator] = field(default=None, compare=False)
    time_terms: Optional[Tuple[TimeTerm, ...]] = field(default=None, compare=False)
    reference_time: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationException("n deve ser >= 1", field_errors={"n": [str(self.n)]})
        if self.p < 1:
            raise ValidationException("p deve ser >= 1", field_errors={"p": [str(self.p)]})
        if len(self.matrices) != self.p + 1:
            raise DimensionMismatchError(
                "Número de matrizes incompatível com o grau",
                expected=self.p + 1, received=len(self.matrices),
            )
        for k, m in enumerate(self.matrices):
            expected = (self.n, self.n ** k)
            if m.shape != expected:
                raise DimensionMismatchError(
                    f"M_{k} deve ter forma {expected}", k=k, shape=m.shape, expected=expected
                )

    @property
    def time_dependent(self) -> bool:
        return self.evaluator is not None

    @classmethod
    def from_time_polynomials(
        cls,
        n: int,
        p: int,
        terms: Sequence[TimeTerm],
        reference_time: float = 1.0,
    ) -> "PolynomialSystem":
        """
        Cria um sistema com M_k(t) = Σ_q t^q · C_{k,q}.

        Se nenhuma potência for positiva o sistema resultante é autônomo.
        """
        terms = tuple(terms)
        for k, q, c in terms:
            if not 0 <= k <= p:
                raise ValidationException(
                    f"Grau k={k} fora de 0..{p}", field_errors={"M.k": [str(k)]}
                )
            if q < 0:
                raise ValidationException(
                    "Potência de t negativa", field_errors={"M.t_power": [str(q)]}
                )
            if c.shape != (n, n ** k):
                raise DimensionMismatchError(
                    f"M_{k} deve ter forma {(n, n ** k)}", k=k, shape=c.shape
                )

        def evaluate(t: float) -> Tuple[SparseComplexMatrix, ...]:
            acc = [sp.csr_matrix((n, n ** k), dtype=np.complex128) for k in range(p + 1)]
            for k, q, c in terms:
                acc[k] = acc[k] + c.to_scipy() * (t ** q)
            return tuple(SparseComplexMatrix.from_scipy(m) for m in acc)

        if all(q == 0 for _, q, _ in terms):
            return cls(n=n, p=p, matrices=evaluate(0.0))
        return cls(
            n=n,
            p=p,
            matrices=evaluate(reference_time),
            evaluator=evaluate,
            time_terms=terms,
            reference_time=reference_time,
        )

    def at(self, t: float) -> "PolynomialSystem":
        """Sistema autônomo com coeficientes congelados em t."""
        if self.evaluator is None:
            return self
        return PolynomialSystem(n=self.n, p=self.p, matrices=self.evaluator(t))

    def rhs(self, t: float, phi: npt.ArrayLike) -> ComplexVector:
        """Lado direito da EDO original em (t, Φ)."""
        phi = np.asarray(phi, dtype=np.complex128)
        mats = self.at(t).matrices
        out = mats[0].to_dense()[:, 0].copy()
        power = np.ones(1, dtype=np.complex128)
        for k in range(1, self.p + 1):
            power = np.kron(power, phi)
            if mats[k].nnz:
                out += mats[k].to_scipy() @ power
        return out


@dataclass(frozen=True)
class CarlemanSystem:
    """
    Sistema linear truncado de ordem N.

    Attributes:
        order: Ordem de truncamento N
        n: Dimensão do estado original
        dimension: D = Σ_{j=1..N} n^j
        matrix: Matriz D x D
        offsets: Índice inicial de cada bloco y_j (j = 1..N)
        forcing: Vetor de forçamento (M_0 no bloco 1), comprimento D
    """

    order: int
    n: int
    dimension: int
    matrix: SparseComplexMatrix
    offsets: Tuple[int, ...]
    forcing: ComplexVector

    def block_slice(self, j: int) -> slice:
        start = self.offsets[j - 1]
        return slice(start, start + self.n ** j)


@dataclass(frozen=True)
class LiftedState:
    """Vetor elevado y = [y_1; ...; y_N] com os offsets de cada bloco."""

    values: ComplexVector
    offsets: Tuple[int, ...]
    n: int

    @property
    def order(self) -> int:
        return len(self.offsets)

    def block(self, j: int) -> ComplexVector:
        start = self.offsets[j - 1]
        return self.values[start:start + self.n ** j]

    @property
    def first_block(self) -> ComplexVector:
        return self.block(1)


@dataclass(frozen=True)
class Trajectory:
    """Trajetória amostrada de um sistema truncado."""

    times: npt.NDArray[np.float64]
    states: npt.NDArray[np.complex128]  # (amostras, D)
    offsets: Tuple[int, ...]
    n: int

    def first_block(self) -> npt.NDArray[np.complex128]:
        """Aproximação de Φ(t): (amostras, n)."""
        return self.states[:, : self.n]

    def state_at(self, index: int) -> LiftedState:
        return LiftedState(values=self.states[index], offsets=self.offsets, n=self.n)


# ----- operações -----

def carleman_dimension(d: int, N: int) -> int:
    """
    Dimensão do vetor truncado: Σ_{i=1..N} d^i.

    Para d = 1 a soma vale N; para d >= 2 coincide com d(d^N - 1)/(d - 1).
    """
    if d < 1 or N < 1:
        raise ValidationException(
            "carleman_dimension exige d >= 1 e N >= 1", field_errors={"d/N": [f"{d}/{N}"]}
        )
    total = N if d == 1 else sum(d ** i for i in range(1, N + 1))
    if total > settings.MAX_DIMENSION:
        raise DimensionOverflowError(
            f"Dimensão de Carleman {total} excede MAX_DIMENSION", d=d, N=N, dimension=total
        )
    return total


def block_offsets(n: int, N: int) -> Tuple[int, ...]:
    offsets = []
    start = 0
    for j in range(1, N + 1):
        offsets.append(start)
        start += n ** j
    return tuple(offsets)


def transfer_operator(m_k: SparseComplexMatrix, k: int, j: int, n: int) -> SparseComplexMatrix:
    """
    A_{k+j-1}^{(k)} = Σ_{i=1..j} I_n^{⊗(i-1)} ⊗ M_k ⊗ I_n^{⊗(j-i)}.

    Retorna uma matriz n^j x n^{k+j-1}.
    """
    if m_k.shape != (n, n ** k):
        raise DimensionMismatchError(
            f"M_{k} deve ser {n}x{n ** k}", shape=m_k.shape, k=k, n=n
        )
    if j < 1:
        raise ValidationException("j deve ser >= 1", field_errors={"j": [str(j)]})

    rows, cols = n ** j, n ** (k + j - 1)
    if m_k.nnz == 0:
        return SparseComplexMatrix.zeros(rows, cols)

    acc = sp.csr_matrix((rows, cols), dtype=np.complex128)
    for i in range(1, j + 1):
        acc = acc + identity_padded_embed(m_k, i - 1, j - i, n).to_scipy()
    return SparseComplexMatrix.from_scipy(acc)


def assemble(system: PolynomialSystem, N: int) -> CarlemanSystem:
    """
    Monta a matriz de Carleman truncada na ordem N.

    O bloco (j, k+j-1) recebe A^{(k)} para 1 <= k+j-1 <= N; a banda de M_0
    entra na coluna de bloco j-1 para j >= 2 e como forçamento no bloco 1.
    """
    if N < 1:
        raise ValidationException("N deve ser >= 1", field_errors={"order": [str(N)]})

    n, p = system.n, system.p
    dimension = carleman_dimension(n, N)
    offsets = block_offsets(n, N)
    m0 = system.matrices[0]

    grid: List[List[Optional[sp.spmatrix]]] = [[None] * N for _ in range(N)]
    for j in range(1, N + 1):
        for k in range(1, p + 1):
            m = k + j - 1
            if m > N:
                break
            block = transfer_operator(system.matrices[k], k, j, n)
            if block.nnz or k == 1:
                grid[j - 1][m - 1] = block.to_scipy()
        if j >= 2 and m0.nnz:
            grid[j - 1][j - 2] = transfer_operator(m0, 0, j, n).to_scipy()

    matrix = SparseComplexMatrix.from_scipy(sp.bmat(grid, format="coo", dtype=np.complex128))
    forcing = np.zeros(dimension, dtype=np.complex128)
    forcing[:n] = m0.to_dense()[:, 0]

    logger.debug("Sistema de Carleman montado", order=N, dimension=dimension, nnz=matrix.nnz)
    return CarlemanSystem(
        order=N, n=n, dimension=dimension, matrix=matrix, offsets=offsets, forcing=forcing
    )


def carleman_builder(
    system: PolynomialSystem, N: int
) -> Union[CarlemanSystem, Callable[[float], CarlemanSystem]]:
    """
    Sistema truncado pronto para `integrate`.

    Autônomo: devolve o próprio `CarlemanSystem`. Coeficientes polinomiais
    em t: monta uma parte por potência e soma A(t) = Σ_q t^q A_q, o que
    equivale a remontar com coeficientes congelados a cada estágio.
    Avaliador arbitrário: remonta em cada chamada.
    """
    if not system.time_dependent:
        return assemble(system, N)

    if system.time_terms is None:
        return lambda t: assemble(system.at(t), N)

    parts: Dict[int, CarlemanSystem] = {}
    for q in sorted({q for _, q, _ in system.time_terms}):
        only_q = [(k, 0, c) for k, qq, c in system.time_terms if qq == q]
        parts[q] = assemble(PolynomialSystem.from_time_polynomials(system.n, system.p, only_q), N)

    template = next(iter(parts.values()))
    scipy_parts = {q: part.matrix.to_scipy() for q, part in parts.items()}

    def build(t: float) -> CarlemanSystem:
        matrix = sum((m * (t ** q) for q, m in scipy_parts.items()), sp.csr_matrix(template.matrix.shape))
        forcing = sum((part.forcing * (t ** q) for q, part in parts.items()), np.zeros(template.dimension))
        return CarlemanSystem(
            order=N,
            n=system.n,
            dimension=template.dimension,
            matrix=SparseComplexMatrix.from_scipy(matrix),
            offsets=template.offsets,
            forcing=np.asarray(forcing, dtype=np.complex128),
        )

    return build


def lift_state(phi0: npt.ArrayLike, N: int) -> LiftedState:
    """Bloco j = phi0^{⊗j}, j = 1..N."""
    phi = np.atleast_1d(np.asarray(phi0, dtype=np.complex128))
    if N < 1:
        raise ValidationException("N deve ser >= 1", field_errors={"order": [str(N)]})
    blocks = [phi]
    for _ in range(N - 1):
        blocks.append(np.kron(blocks[-1], phi))
    return LiftedState(values=np.concatenate(blocks), offsets=block_offsets(phi.size, N), n=phi.size)


def integrate(
    builder: Union[CarlemanSystem, Callable[[float], CarlemanSystem]],
    y0: LiftedState,
    t_span: Tuple[float, float],
    dt: Optional[float] = None,
    record_every: int = 1,
) -> Trajectory:
    """
    Integra ẏ = A(t)·y + b(t) com RK4 de passo fixo.

    Args:
        builder: Sistema fixo ou função t -> CarlemanSystem
        y0: Estado elevado inicial
        t_span: (t0, t1)
        dt: Passo nominal; ajustado para cair exatamente em t1
        record_every: Guarda um estado a cada `record_every` passos

    Raises:
        DivergenceError: se surgirem valores não finitos
    """
    dt = settings.DEFAULT_DT if dt is None else dt
    if dt <= 0:
        raise ValidationException("dt deve ser positivo", field_errors={"dt": [str(dt)]})
    t0, t1 = float(t_span[0]), float(t_span[1])
    steps = max(1, int(round((t1 - t0) / dt)))
    h = (t1 - t0) / steps

    if isinstance(builder, CarlemanSystem):
        a_static = builder.matrix.to_scipy()
        b_static = builder.forcing

        def rhs(t: float, y: ComplexVector) -> ComplexVector:
            return a_static @ y + b_static
    else:
        def rhs(t: float, y: ComplexVector) -> ComplexVector:
            system = builder(t)
            return system.matrix.to_scipy() @ y + system.forcing

    y = np.array(y0.values, dtype=np.complex128)
    times = [t0]
    states = [y.copy()]

    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(steps):
            t = t0 + step * h
            k1 = rhs(t, y)
            k2 = rhs(t + h / 2, y + h / 2 * k1)
            k3 = rhs(t + h / 2, y + h / 2 * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise DivergenceError(failure_time=t + h)
            if (step + 1) % record_every == 0 or step + 1 == steps:
                times.append(t + h)
                states.append(y.copy())

    return Trajectory(times=np.asarray(times), states=np.vstack(states), offsets=y0.offsets, n=y0.n)


def reference_solution(
    system: PolynomialSystem,
    phi0: npt.ArrayLike,
    times: npt.ArrayLike,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> npt.NDArray[np.complex128]:
    """
    Solução de alta precisão da EDO não linear original (DOP853 adaptativo).

    Returns:
        Array (len(times), n)
    """
    times = np.asarray(times, dtype=float)
    phi0 = np.atleast_1d(np.asarray(phi0, dtype=np.complex128))
    result = solve_ivp(
        system.rhs,
        (float(times[0]), float(times[-1])),
        phi0,
        method="DOP853",
        t_eval=times,
        rtol=settings.REFERENCE_RTOL if rtol is None else rtol,
        atol=settings.REFERENCE_ATOL if atol is None else atol,
    )
    if not result.success:
        failure = float(result.t[-1]) if result.t.size else float(times[0])
        raise DivergenceError(failure_time=failure, message=f"Solver de referência falhou: {result.message}")
    return result.y.T


def convergence_study(
    system: PolynomialSystem,
    phi0: npt.ArrayLike,
    orders: Sequence[int],
    t_span: Tuple[float, float],
    reference: Optional[Callable[[npt.NDArray[np.float64]], npt.ArrayLike]] = None,
    dt: Optional[float] = None,
    samples: int = 101,
) -> pd.DataFrame:
    """
    Erro máximo do truncamento de Carleman contra uma solução de referência.

    Args:
        system: Sistema polinomial
        phi0: Estado inicial
        orders: Ordens N a avaliar
        t_span: Horizonte (t0, t1)
        reference: Função times -> Φ (amostras, n); por padrão `reference_solution`
        dt: Passo do RK4
        samples: Pontos da grade de comparação

    Returns:
        DataFrame com colunas N, D, nnz, max_error, runtime_ms. Ordens que
        divergem ficam com max_error = inf e são registradas no log.
    """
    dt = settings.DEFAULT_DT if dt is None else dt
    steps = max(1, int(round((t_span[1] - t_span[0]) / dt)))
    record_every = max(1, steps // max(1, samples - 1))
    phi0 = np.atleast_1d(np.asarray(phi0, dtype=np.complex128))

    rows = []
    reference_cache: Dict[Tuple[float, ...], npt.NDArray] = {}
    with logger.timing("convergence_study"):
        for N in orders:
            log = logger.bind(order=N)
            start = time.perf_counter()
            structure = assemble(system, N)
            try:
                trajectory = integrate(carleman_builder(system, N), lift_state(phi0, N), t_span, dt, record_every)
                key = tuple(trajectory.times)
                if key not in reference_cache:
                    ref = reference(trajectory.times) if reference else reference_solution(system, phi0, trajectory.times)
                    reference_cache[key] = np.asarray(ref, dtype=np.complex128).reshape(len(trajectory.times), -1)
                error = float(np.max(np.abs(trajectory.first_block() - reference_cache[key])))
            except DivergenceError as exc:
                log.warning("Truncamento divergiu", failure_time=exc.failure_time)
                error = float("inf")
            runtime_ms = (time.perf_counter() - start) * 1000.0
            log.info("Ordem avaliada", max_error=error, dimension=structure.dimension)
            rows.append(
                {
                    "N": N,
                    "D": structure.dimension,
                    "nnz": structure.matrix.nnz,
                    "max_error": error,
                    "runtime_ms": runtime_ms,
                }
            )
    return pd.DataFrame(rows, columns=["N", "D", "nnz", "max_error", "runtime_ms"])


# ----- modelos prontos -----

def bernoulli_system(reference_time: float = 1.0) -> PolynomialSystem:
    """
    Modelo quadrático de Bernoulli: y' = -P(t)·y + Q(t)·y², P = 2t, Q = 2t³.

    Com y(0) = 1 a solução exata é 1/(1 + t²) (ver `bernoulli_exact`).
    """
    one = SparseComplexMatrix.from_entries(1, 1, [(0, 0, 1.0)])
    return PolynomialSystem.from_time_polynomials(
        n=1,
        p=2,
        terms=[(1, 1, one.scale(-2.0)), (2, 3, one.scale(2.0))],
        reference_time=reference_time,
    )


def bernoulli_exact(times: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Solução fechada via v = 1/y: v' - 2t·v = -2t³, v(0) = 1 => v = 1 + t²."""
    t = np.asarray(times, dtype=float)
    return (1.0 / (1.0 + t ** 2)).reshape(-1, 1)


def scalar_quadratic_system(a: complex, b: complex) -> PolynomialSystem:
    """y' = a·y + b·y² (n = 1, p = 2)."""
    return PolynomialSystem(
        n=1,
        p=2,
        matrices=(
            SparseComplexMatrix.zeros(1, 1),
            SparseComplexMatrix.from_entries(1, 1, [(0, 0, a)]),
            SparseComplexMatrix.from_entries(1, 1, [(0, 0, b)]),
        ),
    )


def autonomize(system: PolynomialSystem) -> PolynomialSystem:
    """
    Acrescenta o tempo como estado: Ψ = (Φ, x), ẋ = 1.

    Cada termo t^q · C_{k,q} · Φ^{⊗k} vira um monômio de grau k+q em Ψ,
    com os índices de Φ primeiro e as q cópias de x depois.
    """
    if system.time_terms is None:
        if system.time_dependent:
            raise ValidationException(
                "Autonomização exige coeficientes polinomiais em t",
                field_errors={"time_dependent": ["avaliador arbitrário"]},
            )
        terms: Sequence[TimeTerm] = [(k, 0, m) for k, m in enumerate(system.matrices) if m.nnz]
    else:
        terms = system.time_terms

    n, m = system.n, system.n + 1
    new_p = max([k + q for k, q, _ in terms] + [1])
    entries: Dict[int, Dict[Tuple[int, int], complex]] = {d: {} for d in range(new_p + 1)}
    entries[0][(n, 0)] = 1.0  # ẋ = 1

    for k, q, c in terms:
        degree = k + q
        for row, col, value in c.entries:
            # dígitos de Φ (base n) -> mesma posição em base n+1, seguidos de q dígitos x = n
            digits = [int(d) for d in np.base_repr(col, base=n).zfill(k)] if k and n > 1 else [0] * k
            new_col = 0
            for digit in digits + [n] * q:
                new_col = new_col * m + digit
            key = (row, new_col)
            entries[degree][key] = entries[degree].get(key, 0.0) + value

    matrices = tuple(
        SparseComplexMatrix.from_entries(m, m ** d, [(r, c, v) for (r, c), v in entries[d].items()])
        for d in range(new_p + 1)
    )
    return PolynomialSystem(n=m, p=new_p, matrices=matrices)


def autonomize_bernoulli() -> PolynomialSystem:
    """Modelo de Bernoulli autonomizado: Ψ = (y, x), grau 5."""
    return autonomize(bernoulli_system())
