from typing import Any, Callable, Tuple

from django import forms

from diagnostics.models import (
    CUSTOM, EUCLIDEAN_FAMILY, FAMILIES, SPECTRAL, SPHERE_KERNEL,
    TORUS_KERNEL, WEIGHTED_TORUS
)
from flow.models import SCHEMES
from manifold.models import TOPOLOGIES


class _ListField(forms.Field):
    """Список чисел: JSON-массив или строка через запятую."""
    item_type: Callable[[Any], Any] = float
    item_name = 'чисел'

    def to_python(self, value: Any) -> Tuple[Any, ...]:
        if value in self.empty_values:
            return ()
        if isinstance(value, str):
            value = [item for item in value.split(',') if item.strip()]
        if not isinstance(value, (list, tuple)):
            value = [value]
        try:
            return tuple(self.item_type(item) for item in value)
        except (TypeError, ValueError):
            raise forms.ValidationError(
                f'Ожидается список {self.item_name}, получено {value!r}'
            )


class FloatListField(_ListField):
    item_type = float


class IntegerListField(_ListField):
    item_type = int
    item_name = 'целых чисел'

    def validate(self, value: Tuple[int, ...]) -> None:
        super().validate(value)
        if any(item < 1 for item in value):
            raise forms.ValidationError(
                'Разрешение по осям должно быть положительным'
            )


class ScenarioConfigForm(forms.Form):
    """Плоские ключи конфигурации сценария."""
    kind = forms.ChoiceField(choices=[(kind, kind) for kind in FAMILIES])
    name = forms.CharField(required=False)
    a = forms.FloatField()
    m = forms.FloatField(required=False)
    dt = forms.FloatField(min_value=0.0)
    t_start = forms.FloatField()
    t_end = forms.FloatField()
    sample_count = forms.IntegerField(min_value=2)
    k = forms.IntegerField(min_value=2)
    scheme = forms.ChoiceField(
        choices=[(scheme, scheme) for scheme in SCHEMES + (SPECTRAL,)]
    )
    tol_scale = forms.FloatField(min_value=0.0)
    source = forms.IntegerField(min_value=0)
    seed = forms.IntegerField(required=False)
    out = forms.CharField(required=False)

    def clean(self) -> dict:
        cleaned = super().clean()
        t_start = cleaned.get('t_start')
        t_end = cleaned.get('t_end')
        if t_start is None or t_end is None:
            return cleaned
        if not 0 < t_start < t_end:
            raise forms.ValidationError(
                f'Нарушено условие 0 < t_start < t_end: '
                f't_start = {t_start}, t_end = {t_end}'
            )
        samples = cleaned.get('sample_count')
        dt = cleaned.get('dt')
        if samples and dt is not None and dt > (t_end - t_start) / samples:
            raise forms.ValidationError(
                f'Нарушено условие dt <= (t_end − t_start)/sample_count: '
                f'dt = {dt}, предел {(t_end - t_start) / samples:.6g}'
            )
        return cleaned


class TorusGeometryForm(forms.Form):
    """Геометрия плоского тора."""
    resolution = IntegerListField()
    side_lengths = FloatListField()

    def clean(self) -> dict:
        cleaned = super().clean()
        resolution = cleaned.get('resolution')
        lengths = cleaned.get('side_lengths')
        if resolution and lengths and len(resolution) != len(lengths):
            raise forms.ValidationError(
                'Длины resolution и side_lengths должны совпадать'
            )
        return cleaned


class WeightedTorusGeometryForm(TorusGeometryForm):
    """Тор с весовой функцией h = amplitude·cos x."""
    amplitude = forms.FloatField()


class SphereGeometryForm(forms.Form):
    """Икосаэдрическая сфера."""
    level = forms.IntegerField(min_value=1, max_value=8)
    radius = forms.FloatField(min_value=0.0)


class EuclideanGeometryForm(forms.Form):
    """Размерность ℝⁿ для замкнутых формул."""
    dimension = forms.IntegerField(min_value=1)


class CustomGeometryForm(forms.Form):
    """Произвольная геометрия из реестра топологий."""
    topology = forms.ChoiceField(choices=[(name, name) for name in TOPOLOGIES])
    resolution = IntegerListField(required=False)
    side_lengths = FloatListField(required=False)
    amplitude = forms.FloatField(required=False)
    level = forms.IntegerField(min_value=1, max_value=8, required=False)
    radius = forms.FloatField(min_value=0.0, required=False)
    dimension = forms.IntegerField(min_value=1, required=False)


GEOMETRY_FORMS = {
    TORUS_KERNEL: TorusGeometryForm,
    WEIGHTED_TORUS: WeightedTorusGeometryForm,
    SPHERE_KERNEL: SphereGeometryForm,
    EUCLIDEAN_FAMILY: EuclideanGeometryForm,
    CUSTOM: CustomGeometryForm,
}
