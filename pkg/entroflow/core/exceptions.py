from typing import Optional, Sequence


class EntroflowError(Exception):
    """Базовое исключение расчётов."""


class InvalidDiscretizationError(EntroflowError):
    """Недопустимые параметры дискретизации."""


class InvalidDimensionError(EntroflowError):
    """Размерность Бакри-Эмери не задана или не больше n."""


class MissingWeightError(EntroflowError):
    """Мера ν запрошена у многообразия без весовой функции."""


class AssemblyError(EntroflowError):
    """Ошибка сборки оператора."""


class SpectralError(EntroflowError):
    """Собственная задача не решена."""

    def __init__(
            self, message: str, residuals: Optional[Sequence[float]] = None
    ):
        self.residuals = list(residuals) if residuals is not None else []
        if self.residuals:
            message = (
                f'{message}; максимальная невязка {max(self.residuals):.3e}'
            )
        super().__init__(message)


class UnsupportedTopologyError(EntroflowError):
    """Операция не поддерживается для данной топологии."""


class FlowError(EntroflowError):
    """Ошибка шага теплового потока."""

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f'{message}; невязка {residual:.3e}'
        super().__init__(message)


class KernelTruncationError(EntroflowError):
    """Усечённого спектра не хватает для ядра в момент t."""

    def __init__(self, message: str, required_k: int):
        self.required_k = required_k
        super().__init__(f'{message}; требуется k >= {required_k}')


class DegenerateDensityError(EntroflowError):
    """Слишком большая доля массы ниже порога плотности."""

    def __init__(self, message: str, masked_fraction: float):
        self.masked_fraction = masked_fraction
        super().__init__(message)


class NormalizationError(EntroflowError):
    """Интеграл u² отличается от единицы."""


class NonPositiveOmegaError(EntroflowError):
    """ω = ∫|∇u|² + a неположительна, логарифм не определён."""

    def __init__(self, omega: float, time: Optional[float] = None):
        self.omega = omega
        self.time = time
        message = f'ω = {omega:.6g} <= 0'
        if time is not None:
            message = f'{message} при t = {time:.6g}'
        super().__init__(message)


class RemainderConstraintError(EntroflowError):
    """Нарушено условие на константу a."""


class MissingColumnError(EntroflowError):
    """В траектории нет нужного столбца."""


class ScenarioConfigError(EntroflowError):
    """Некорректная конфигурация сценария."""
