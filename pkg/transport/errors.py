"""
Hierarquia de exceções do pacote transport
"""

from typing import Optional


class TransportError(Exception):
    """Erro base de todo o pacote"""


class ShapeError(TransportError, ValueError):
    """Dimensões incompatíveis entre operandos"""


class ValidationError(TransportError, ValueError):
    """Objeto numérico viola um invariante de construção"""


class NotHermitianError(ValidationError):
    """Matriz não é hermitiana dentro da tolerância"""


class NegativeEigenvalueError(ValidationError):
    """Autovalor abaixo de -1e-10"""


class TraceError(ValidationError):
    """Traço difere de 1 além da tolerância"""


class NotUnitaryError(ValidationError):
    """Matriz não é unitária dentro da tolerância"""


class EnergyConservationError(TransportError, ValueError):
    """Unitária não comuta com o Hamiltoniano total"""


class DomainError(TransportError, ValueError):
    """Argumento fora do domínio da função"""


class UnsupportedDimensionError(TransportError, ValueError):
    """Dimensão não suportada pelo algoritmo pedido"""


class RetryLimitError(TransportError, RuntimeError):
    """Amostrador por rejeição esgotou o número de tentativas"""

    def __init__(self, message: str, attempts: int, sample_index: Optional[int] = None):
        self.attempts = attempts
        self.sample_index = sample_index
        if sample_index is not None:
            message = f"{message} (amostra {sample_index})"
        super().__init__(message)

    def with_sample_index(self, sample_index: int) -> "RetryLimitError":
        return RetryLimitError(str(self), self.attempts, sample_index)


class DegenerateGeometryError(TransportError, ValueError):
    """Casco convexo degenerado (menos de 3 pontos ou colineares)"""


class ResultsFormatError(TransportError, ValueError):
    """Arquivo de resultados malformado ou vazio"""
