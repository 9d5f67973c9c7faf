"""
Sonda de treinabilidade variacional: custo global vs local.

O ansatz aplica RY em todos os qubits na camada 0 e alterna RX/RY nas
camadas seguintes; cada camada termina com um anel de CZ. Custos e
gradientes são calculados exatamente, em lote sobre vários vetores de
parâmetros.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import numpy.typing as npt
import pandas as pd

from app.core.config import settings
from app.core.exceptions import DimensionMismatchError, ValidationException
from app.core.logging import get_logger
from app.services.circuit import Control, GateCircuit, GateLabel, SingleQubitGate
from app.utils.data_analysis import log_slope

logger = get_logger(__name__)

SHIFT = np.pi / 2

# faixa dos ângulos da primeira camada na inicialização PLATEAU
PLATEAU_FIRST_LAYER = (2.5, 3.0)


class CostKind(str, Enum):
    GLOBAL = "global"
    LOCAL = "local"


class InitStrategy(str, Enum):
    """
    Sorteio de θ inicial em `train`.

    UNIFORM: todos os ângulos uniformes em [0, 2π).
    PLATEAU: primeira camada uniforme em `PLATEAU_FIRST_LAYER`, demais
    rotações em zero. Com RX em zero os anéis de CZ de camadas vizinhas se
    cancelam, e o estado inicial é um produto com cada qubit perto de |1⟩:
    o custo global parte de ~1 com gradiente da ordem de Π cos²(θ_q/2),
    enquanto o custo local tem gradiente da ordem de 1/n.
    """

    UNIFORM = "uniform"
    PLATEAU = "plateau"


@dataclass(frozen=True)
class CostSpec:
    """
    C = 1 − ⟨O⟩ no estado U(θ)|0…0⟩.

    global: O = |0…0⟩⟨0…0|; local: O = média dos projetores |0⟩⟨0|_i.
    """

    kind: CostKind = CostKind.GLOBAL

    def evaluate(self, states: npt.NDArray[np.complex128], n: int) -> npt.NDArray[np.float64]:
        """Custo de um lote de estados (lote, 2^n)."""
        probs = np.abs(states) ** 2
        if self.kind is CostKind.GLOBAL:
            return 1.0 - probs[:, 0]
        tensor = probs.reshape((-1,) + (2,) * n)
        zero_prob = np.zeros(probs.shape[0])
        for q in range(n):
            axes = tuple(a for a in range(1, n + 1) if a != q + 1)
            zero_prob += tensor.sum(axis=axes)[:, 0] if axes else tensor[:, 0]
        return 1.0 - zero_prob / n


def entangler_edges(n: int) -> List[Tuple[int, int]]:
    """Anel de CZ: um único CZ para n = 2, nenhum para n = 1."""
    if n < 2:
        return []
    if n == 2:
        return [(0, 1)]
    return [(q, (q + 1) % n) for q in range(n)]


def light_cone(n: int, qubit: int, hops: int = 1) -> Set[int]:
    """Qubits a no máximo `hops` arestas do anel de entrelaçadores."""
    cone = {qubit}
    for _ in range(hops):
        cone |= {b for a, b in entangler_edges(n) if a in cone} | {a for a, b in entangler_edges(n) if b in cone}
    return cone


@dataclass(frozen=True)
class Ansatz:
    """
    Ansatz eficiente em hardware com n·L rotações.

    Attributes:
        n: Número de qubits
        layers: Número de camadas L
        theta: Vetor de parâmetros (radianos), índice = camada·n + qubit
    """

    n: int
    layers: int
    theta: npt.NDArray[np.float64] = field(default=None, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.n < 1 or self.layers < 1:
            raise ValidationException(
                "Ansatz exige n >= 1 e L >= 1", field_errors={"qubits/layers": [f"{self.n}/{self.layers}"]}
            )
        theta = np.zeros(self.num_parameters) if self.theta is None else np.asarray(self.theta, dtype=float)
        if theta.shape != (self.num_parameters,):
            raise DimensionMismatchError(
                "Vetor de parâmetros com tamanho errado", expected=self.num_parameters, received=theta.shape
            )
        object.__setattr__(self, "theta", theta)

    @property
    def num_parameters(self) -> int:
        return self.n * self.layers

    def axis(self, layer: int) -> GateLabel:
        """Camada 0: RY; depois RX, RY, RX, ..."""
        if layer == 0:
            return GateLabel.RY
        return GateLabel.RX if layer % 2 == 1 else GateLabel.RY

    def parameter_specs(self) -> List[Tuple[int, GateLabel]]:
        """(qubit alvo, eixo) de cada parâmetro."""
        return [(q, self.axis(layer)) for layer in range(self.layers) for q in range(self.n)]

    def with_theta(self, theta: npt.ArrayLike) -> "Ansatz":
        return Ansatz(self.n, self.layers, np.asarray(theta, dtype=float))

    def circuit(self) -> GateCircuit:
        """O ansatz como `GateCircuit` (rotações seguidas de CZ por camada)."""
        gates = []
        for layer in range(self.layers):
            label = self.axis(layer)
            for q in range(self.n):
                gates.append(SingleQubitGate(q, label, float(self.theta[layer * self.n + q])))
            for a, b in entangler_edges(self.n):
                gates.append(SingleQubitGate(b, GateLabel.Z, controls=(Control(a),)))
        return GateCircuit(self.n, tuple(gates))


def _cz_signs(n: int) -> npt.NDArray[np.float64]:
    index = np.arange(2 ** n)
    bits = [(index >> (n - 1 - q)) & 1 for q in range(n)]
    parity = np.zeros(2 ** n, dtype=np.int64)
    for a, b in entangler_edges(n):
        parity += bits[a] * bits[b]
    return np.where(parity % 2 == 0, 1.0, -1.0)


def simulate(ansatz: Ansatz, thetas: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """
    Estados U(θ)|0…0⟩ para um lote de vetores de parâmetros.

    Args:
        ansatz: Estrutura (n, L); seus próprios parâmetros são ignorados
        thetas: Array (lote, n·L)

    Returns:
        Array (lote, 2^n)
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    n, batch = ansatz.n, thetas.shape[0]
    if thetas.shape[1] != ansatz.num_parameters:
        raise DimensionMismatchError(
            "Lote de parâmetros incompatível", expected=ansatz.num_parameters, received=thetas.shape[1]
        )
    signs = _cz_signs(n)

    state = np.zeros((batch,) + (2,) * n, dtype=np.complex128)
    state[(slice(None),) + (0,) * n] = 1.0
    for layer in range(ansatz.layers):
        label = ansatz.axis(layer)
        for q in range(n):
            angle = thetas[:, layer * n + q].reshape((batch,) + (1,) * (n - 1))
            c, s = np.cos(angle / 2), np.sin(angle / 2)
            a0 = np.take(state, 0, axis=q + 1)
            a1 = np.take(state, 1, axis=q + 1)
            if label is GateLabel.RX:
                new0, new1 = c * a0 - 1j * s * a1, -1j * s * a0 + c * a1
            else:
                new0, new1 = c * a0 - s * a1, s * a0 + c * a1
            state = np.stack([new0, new1], axis=q + 1)
        state = (state.reshape(batch, -1) * signs).reshape(state.shape)
    return state.reshape(batch, -1)


def batch_costs(ansatz: Ansatz, cost: CostSpec, thetas: npt.ArrayLike) -> npt.NDArray[np.float64]:
    return cost.evaluate(simulate(ansatz, thetas), ansatz.n)


def evaluate_cost(ansatz: Ansatz, cost: CostSpec) -> float:
    """Valor exato do custo em `ansatz.theta`, em [0, 1]."""
    return float(batch_costs(ansatz, cost, ansatz.theta)[0])


def _shift_batch(thetas: npt.NDArray[np.float64], index: int) -> npt.NDArray[np.float64]:
    plus = thetas.copy()
    minus = thetas.copy()
    plus[:, index] += SHIFT
    minus[:, index] -= SHIFT
    return np.vstack([plus, minus])


def gradient(ansatz: Ansatz, cost: CostSpec) -> npt.NDArray[np.float64]:
    """Regra de deslocamento: ∂C/∂θ_μ = [C(θ_μ + π/2) − C(θ_μ − π/2)] / 2."""
    p = ansatz.num_parameters
    shifted = np.tile(ansatz.theta, (2 * p, 1))
    idx = np.arange(p)
    shifted[idx, idx] += SHIFT
    shifted[p + idx, idx] -= SHIFT
    values = batch_costs(ansatz, cost, shifted)
    return (values[:p] - values[p:]) / 2.0


def gradient_component(
    ansatz: Ansatz, cost: CostSpec, thetas: npt.ArrayLike, index: int = 0
) -> npt.NDArray[np.float64]:
    """∂C/∂θ_index para cada linha de `thetas`."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    values = batch_costs(ansatz, cost, _shift_batch(thetas, index))
    half = thetas.shape[0]
    return (values[:half] - values[half:]) / 2.0


@dataclass(frozen=True)
class TrainingResult:
    trace: npt.NDArray[np.float64]  # T+1 valores de custo
    theta: npt.NDArray[np.float64]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"iter": np.arange(self.trace.size), "cost": self.trace})


def initial_theta(
    ansatz: Ansatz, strategy: InitStrategy, rng: np.random.Generator
) -> npt.NDArray[np.float64]:
    """Vetor inicial de parâmetros segundo `strategy`."""
    if InitStrategy(strategy) is InitStrategy.UNIFORM:
        return rng.uniform(0.0, 2 * np.pi, ansatz.num_parameters)
    theta = np.zeros(ansatz.num_parameters)
    theta[: ansatz.n] = rng.uniform(*PLATEAU_FIRST_LAYER, ansatz.n)
    return theta


def train(
    ansatz: Ansatz,
    cost: CostSpec,
    learning_rate: float,
    iterations: int,
    seed: Optional[int] = None,
    init: InitStrategy = InitStrategy.PLATEAU,
) -> TrainingResult:
    """
    Descida de gradiente θ ← θ − β∇C.

    Com `seed`, θ inicial vem de `initial_theta(ansatz, init, rng)`; sem
    seed, parte de `ansatz.theta`.
    """
    if learning_rate < 0:
        raise ValidationException("Taxa de aprendizado negativa", field_errors={"lr": [str(learning_rate)]})
    if iterations < 0:
        raise ValidationException("Número de iterações negativo", field_errors={"iters": [str(iterations)]})

    if seed is not None:
        theta = initial_theta(ansatz, init, np.random.default_rng(seed))
    else:
        theta = ansatz.theta.copy()

    current = ansatz.with_theta(theta)
    trace = [evaluate_cost(current, cost)]
    with logger.timing("train"):
        for _ in range(iterations):
            theta = theta - learning_rate * gradient(current, cost)
            current = ansatz.with_theta(theta)
            trace.append(evaluate_cost(current, cost))
    logger.info(
        "Treinamento concluído",
        cost=cost.kind.value,
        qubits=ansatz.n,
        layers=ansatz.layers,
        initial=trace[0],
        final=trace[-1],
    )
    return TrainingResult(trace=np.asarray(trace), theta=theta)


def variance_scan(
    n_list: Sequence[int],
    layers: int,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    kinds: Iterable[CostKind] = (CostKind.GLOBAL, CostKind.LOCAL),
) -> pd.DataFrame:
    """
    Variância amostral de ∂C/∂θ_1 sobre θ uniforme em [0, 2π).

    Os mesmos sorteios de θ são usados para todos os tipos de custo.

    Returns:
        DataFrame com colunas n, kind, variance, mean
    """
    samples = settings.VARSCAN_SAMPLES if samples is None else samples
    if samples < 100:
        raise ValidationException("variance_scan exige ao menos 100 amostras", field_errors={"samples": [str(samples)]})
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    kinds = [CostKind(k) for k in kinds]

    rows = []
    with logger.timing("variance_scan"):
        for n in n_list:
            ansatz = Ansatz(n, layers)
            thetas = rng.uniform(0.0, 2 * np.pi, (samples, ansatz.num_parameters))
            for kind in kinds:
                grads = gradient_component(ansatz, CostSpec(kind), thetas, 0)
                rows.append(
                    {
                        "n": n,
                        "kind": kind.value,
                        "variance": float(np.var(grads, ddof=1)),
                        "mean": float(np.mean(grads)),
                    }
                )
            logger.debug("Varredura de variância", qubits=n, samples=samples)
    return pd.DataFrame(rows, columns=["n", "kind", "variance", "mean"])


def decay_slopes(table: pd.DataFrame) -> Dict[str, float]:
    """Inclinação de log(Var) vs n por tipo de custo."""
    return {
        kind: log_slope(group["n"].to_numpy(), group["variance"].to_numpy())
        for kind, group in table.groupby("kind")
    }
