import csv
import json
import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from django import forms

from core.conf import entroflow_setting
from core.exceptions import (
    EntroflowError, InvalidDimensionError, InvalidDiscretizationError,
    KernelTruncationError, MissingColumnError, ScenarioConfigError
)
from diagnostics.calibration import Calibration, calibrate
from diagnostics.models import (
    CUSTOM, WEIGHTED_TORUS, EntropyTrace, Scenario, Verdict
)
from diagnostics.traces import build_manifold, run_trace
from diagnostics.verifiers import (
    tolerance_constant, tolerance_model, verify_trace
)
from flow.dumps import dump_state
from flow.kernels import heat_kernel
from flow.models import KernelSpec
from manifold.dumps import dump_manifold
from manifold.models import (
    EUCLIDEAN_ORACLE, FLAT_TORUS, MU, NU, DiscreteManifold
)
from operators.assembly import assemble_laplacian
from operators.dumps import dump_operator, dump_spectrum
from operators.models import LaplacianOperator, SpectralData
from operators.spectrum import low_spectrum

from .charts import chart_columns, render_chart
from .forms import GEOMETRY_FORMS, ScenarioConfigForm
from .models import RunManifest, ScenarioConfig
from .registry import get_scenario

logger = logging.getLogger(__name__)

TRACE_FILE = 'trace.csv'
VERDICT_FILE = 'verdicts.txt'
MANIFEST_FILE = 'manifest.json'
GEOMETRY_KEY = 'geometry'

_calibration_lock = threading.Lock()


def _errors_text(form: forms.Form) -> str:
    return '; '.join(
        f'{field}: {" ".join(errors)}' if field != '__all__'
        else ' '.join(errors)
        for field, errors in form.errors.items()
    )


def _check_keys(data: Dict[str, Any], valid: Iterable[str],
                where: str) -> None:
    valid = sorted(valid)
    unknown = sorted(set(data) - set(valid))
    if unknown:
        raise ScenarioConfigError(
            f'Неизвестные ключи {where}: {", ".join(unknown)}; '
            f'допустимые: {", ".join(valid)}'
        )


def _coerce(text: str) -> Any:
    """Значение из --set: JSON, список через запятую или строка."""
    try:
        return json.loads(text)
    except ValueError:
        if ',' in text:
            return [_coerce(part.strip()) for part in text.split(',')]
        return text


def apply_overrides(
        data: Dict[str, Any], overrides: Iterable[str]
) -> Dict[str, Any]:
    """Применяет пары key=value; ключ geometry.x попадает в geometry."""
    for item in overrides:
        key, separator, text = item.partition('=')
        if not separator or not key:
            raise ScenarioConfigError(
                f'Ожидается переопределение вида key=value: {item!r}'
            )
        *parents, leaf = key.strip().split('.')
        target = data
        for parent in parents:
            target = target.setdefault(parent, {})
            if not isinstance(target, dict):
                raise ScenarioConfigError(f'Ключ {parent} не является '
                                          f'объектом')
        target[leaf] = _coerce(text.strip())
    return data


def load_config_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, encoding='utf-8') as stream:
            data = json.load(stream)
    except OSError as error:
        raise ScenarioConfigError(f'Не удалось прочитать {path}: {error}')
    except ValueError as error:
        raise ScenarioConfigError(f'Файл {path} не является JSON: {error}')
    if not isinstance(data, dict):
        raise ScenarioConfigError(f'В {path} ожидается JSON-объект')
    return data


def _flat_defaults(kind: str) -> Dict[str, Any]:
    scenario = get_scenario(kind)
    return {
        'name': scenario.name,
        'a': scenario.a,
        'm': scenario.m,
        'dt': scenario.dt,
        't_start': scenario.t_start,
        't_end': scenario.t_end,
        'sample_count': scenario.samples,
        'k': scenario.k,
        'scheme': scenario.scheme,
        'tol_scale': scenario.tol_scale,
        'source': scenario.source,
        'seed': scenario.seed,
    }


def _geometry_defaults(kind: str) -> Dict[str, Any]:
    scenario = get_scenario(kind)
    return {
        'topology': scenario.topology,
        'resolution': list(scenario.resolution),
        'side_lengths': list(scenario.side_lengths),
        'amplitude': scenario.amplitude,
        'level': scenario.level,
        'radius': scenario.radius,
        'dimension': scenario.dimension,
    }


def _clean_geometry(kind: str, raw: Any) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        raise ScenarioConfigError('geometry должен быть JSON-объектом')
    form_class = GEOMETRY_FORMS[kind]
    _check_keys(raw, form_class.base_fields, 'в geometry')
    defaults = _geometry_defaults(kind)
    data = {
        name: defaults[name] for name in form_class.base_fields
    }
    data.update(raw)
    form = form_class(data)
    if not form.is_valid():
        raise ScenarioConfigError(
            f'Некорректная геометрия: {_errors_text(form)}'
        )
    geometry = {**defaults}
    geometry.update({
        name: value for name, value in form.cleaned_data.items()
        if value not in (None, ())
    })
    return geometry


def _check_dimension(
        kind: str, m: Optional[float], geometry: Dict[str, Any]
) -> None:
    """m задаётся только для взвешенных сценариев и должна превышать n."""
    if m is None:
        return
    if kind not in (WEIGHTED_TORUS, CUSTOM):
        raise ScenarioConfigError(
            f'Ключ m допустим только для {WEIGHTED_TORUS} и {CUSTOM}'
        )
    dimension = (len(geometry['resolution'])
                 if geometry['topology'] == FLAT_TORUS else 2)
    if not m > dimension:
        raise InvalidDimensionError(
            f'Размерность Бакри-Эмери m = {m} должна быть больше '
            f'n = {dimension}'
        )


def parse_config(
        path: Optional[Path] = None,
        overrides: Iterable[str] = (),
        kind: Optional[str] = None,
) -> ScenarioConfig:
    """Конфигурация из файла и переопределений --set."""
    raw = load_config_file(path) if path else {}
    if kind and 'kind' not in raw:
        raw['kind'] = kind
    apply_overrides(raw, overrides)
    _check_keys(raw, list(ScenarioConfigForm.base_fields) + [GEOMETRY_KEY],
                'конфигурации')
    if 'kind' not in raw:
        raise ScenarioConfigError('В конфигурации не указан kind')
    kind = str(raw['kind'])
    data = _flat_defaults(kind)
    data.update({
        key: value for key, value in raw.items() if key != GEOMETRY_KEY
    })
    form = ScenarioConfigForm(data)
    if not form.is_valid():
        raise ScenarioConfigError(
            f'Некорректная конфигурация: {_errors_text(form)}'
        )
    cleaned = form.cleaned_data
    geometry = _clean_geometry(kind, raw.get(GEOMETRY_KEY, {}))

    m = cleaned['m']
    topology = geometry['topology']
    _check_dimension(kind, m, geometry)
    scenario = get_scenario(kind).with_values(
        name=cleaned['name'] or kind,
        topology=topology,
        a=cleaned['a'],
        m=m,
        dt=cleaned['dt'],
        t_start=cleaned['t_start'],
        t_end=cleaned['t_end'],
        samples=cleaned['sample_count'],
        k=cleaned['k'],
        scheme=cleaned['scheme'],
        tol_scale=cleaned['tol_scale'],
        source=cleaned['source'],
        seed=cleaned['seed'],
        resolution=tuple(geometry['resolution']),
        side_lengths=tuple(geometry['side_lengths']),
        amplitude=geometry['amplitude'],
        level=geometry['level'],
        radius=geometry['radius'],
        dimension=geometry['dimension'],
    )
    return ScenarioConfig(scenario=scenario, raw=raw, out=cleaned['out'])


def output_root(out: Optional[str] = None) -> Path:
    """Каталог вывода: флаг, затем ENTROFLOW_OUT, затем настройки."""
    return Path(
        out
        or os.environ.get('ENTROFLOW_OUT')
        or entroflow_setting('OUTPUT_DIR')
    )


def write_trace_csv(trace: EntropyTrace, path: Path) -> None:
    digits = entroflow_setting('CSV_DIGITS')
    with open(path, 'w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(trace.names)
        for row in trace.rows():
            writer.writerow(f'{value:.{digits}g}' for value in row)


def read_trace_csv(
        path: Path, metadata: Optional[Dict[str, Any]] = None
) -> EntropyTrace:
    """Трасса из CSV; метаданные берутся из манифеста."""
    try:
        with open(path, newline='', encoding='utf-8') as stream:
            rows = list(csv.reader(stream))
    except OSError as error:
        raise ScenarioConfigError(f'Не удалось прочитать {path}: {error}')
    if not rows:
        raise MissingColumnError(f'Файл {path} пуст')
    header, body = rows[0], rows[1:]
    if 't' not in header:
        raise MissingColumnError(f'В {path} нет столбца t')
    try:
        values = np.array(body, dtype=float).reshape(len(body), len(header))
    except ValueError as error:
        raise ScenarioConfigError(f'Трасса {path} повреждена: {error}')
    columns = {name: values[:, index] for index, name in enumerate(header)}
    return EntropyTrace(columns, dict(metadata or {}))


def read_manifest(path: Path) -> Dict[str, Any]:
    try:
        with open(path, encoding='utf-8') as stream:
            return json.load(stream)
    except (OSError, ValueError) as error:
        raise ScenarioConfigError(f'Манифест {path} не прочитан: {error}')


def write_verdicts(verdicts: List[Verdict], path: Path) -> None:
    path.write_text(
        ''.join(f'{verdict.as_line()}\n' for verdict in verdicts),
        encoding='utf-8',
    )


def write_manifest(manifest: RunManifest, path: Path) -> None:
    with open(path, 'w', encoding='utf-8') as stream:
        json.dump(manifest.as_dict(), stream, ensure_ascii=False, indent=2,
                  default=float)
        stream.write('\n')


def _calibration_path(root: Path) -> Path:
    return root / entroflow_setting('CALIBRATION_FILE')


def load_calibrations(root: Path) -> Dict[str, Calibration]:
    """Сохранённые калибровки семейств из каталога вывода."""
    path = _calibration_path(root)
    if not path.exists():
        return {}
    try:
        with open(path, encoding='utf-8') as stream:
            data = json.load(stream)
        return {
            family: Calibration.from_dict(values)
            for family, values in data.items()
        }
    except (OSError, ValueError, TypeError, KeyError) as error:
        raise ScenarioConfigError(
            f'Файл калибровки {path} не прочитан: {error}'
        )


def store_calibration(root: Path, calibration: Calibration) -> None:
    with _calibration_lock:
        stored = load_calibrations(root)
        stored[calibration.family] = calibration
        root.mkdir(parents=True, exist_ok=True)
        with open(_calibration_path(root), 'w', encoding='utf-8') as stream:
            json.dump(
                {family: value.as_dict() for family, value in stored.items()},
                stream, ensure_ascii=False, indent=2,
            )
            stream.write('\n')


def _calibration_for(
        scenario: Scenario, trace: EntropyTrace, root: Path, force: bool
) -> Tuple[Optional[Calibration], bool]:
    """Калибровка семейства: сохранённая или новая; флаг новой."""
    if scenario.topology != FLAT_TORUS:
        return None, False
    if not force:
        with _calibration_lock:
            stored = load_calibrations(root).get(scenario.family)
        if stored is not None:
            return stored, False
    try:
        calibration = calibrate(scenario, trace)
    except InvalidDiscretizationError as error:
        logger.warning('Сценарий %s без калибровки: %s', scenario.name,
                       error)
        return None, False
    store_calibration(root, calibration)
    return calibration, True


def _jsonable(metadata: Dict[str, Any]) -> Dict[str, Any]:
    return {
        key: (list(value) if isinstance(value, tuple) else
              float(value) if isinstance(value, np.floating) else value)
        for key, value in metadata.items()
    }


def _geometry(
        scenario: Scenario
) -> Tuple[DiscreteManifold, LaplacianOperator]:
    manifold = build_manifold(scenario)
    op = assemble_laplacian(manifold, NU if scenario.is_weighted else MU)
    return manifold, op


def _dump(directory: Path, name: str, writer, target) -> str:
    with open(directory / name, 'w', newline='', encoding='utf-8') as stream:
        writer(target, stream)
    return name


def dump_geometry(
        manifold: DiscreteManifold, op: LaplacianOperator, directory: Path
) -> List[str]:
    """CSV-снимки многообразия и оператора."""
    return [
        _dump(directory, 'manifold.csv', dump_manifold, manifold),
        _dump(directory, 'operator.csv', dump_operator, op),
    ]


def run_scenario(
        config: ScenarioConfig,
        root: Path,
        dump: bool = False,
        recalibrate: bool = False,
) -> Tuple[RunManifest, List[Verdict]]:
    """
    Трасса, проверки, графики и манифест в каталоге сценария.
    Для сеточных трасс C берётся из калибровки семейства; если её нет
    или задан recalibrate, калибровка считается и сохраняется в root.
    """
    scenario = config.scenario
    directory = root / scenario.name
    directory.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config=config.echo())
    logger.info('Сценарий %s: запуск в %s', scenario.name, directory)
    verdicts: List[Verdict] = []
    try:
        trace = run_trace(scenario)
        calibration, fresh = _calibration_for(
            scenario, trace, root, recalibrate
        )
        if calibration is not None:
            trace.metadata['tol_constant'] = calibration.constant
            manifest.calibration = calibration.as_dict()
        write_trace_csv(trace, directory / TRACE_FILE)
        manifest.files.append(TRACE_FILE)
        manifest.first_nonzero = trace.metadata.get('first_nonzero')
        manifest.metadata = _jsonable(trace.metadata)
        manifest.tolerances = {
            'constant': tolerance_constant(trace),
            'model': tolerance_model(trace),
            'monotone': entroflow_setting('MONOTONE_TOL'),
            'mass': entroflow_setting('MASS_TOL'),
        }
        verdicts = verify_trace(trace)
        if fresh:
            verdicts.append(calibration.verdict())
        write_verdicts(verdicts, directory / VERDICT_FILE)
        manifest.files.append(VERDICT_FILE)
        manifest.verdicts = [verdict.as_line() for verdict in verdicts]
        for column in chart_columns(trace):
            name = f'{column}.svg'
            (directory / name).write_text(render_chart(trace, column),
                                          encoding='utf-8')
            manifest.files.append(name)
        if dump and scenario.topology != EUCLIDEAN_ORACLE:
            manifest.files.extend(
                dump_geometry(*_geometry(scenario), directory)
            )
        manifest.exit_status = 0 if all(v.passed for v in verdicts) else 2
    except EntroflowError as error:
        manifest.exit_status = 1
        manifest.error = str(error)
        raise
    finally:
        manifest.files.append(MANIFEST_FILE)
        write_manifest(manifest, directory / MANIFEST_FILE)
        logger.info('Сценарий %s: статус %d', scenario.name,
                    manifest.exit_status)
    return manifest, verdicts


def _run_guarded(config: ScenarioConfig, root: Path, dump: bool,
                 recalibrate: bool) -> RunManifest:
    try:
        return run_scenario(config, root, dump, recalibrate)[0]
    except EntroflowError as error:
        logger.error('Сценарий %s завершился ошибкой: %s', config.name, error)
        directory = root / config.name
        return RunManifest(**read_manifest(directory / MANIFEST_FILE))


def run_batch(
        configs: List[ScenarioConfig],
        root: Path,
        workers: Optional[int] = None,
        dump: bool = False,
        recalibrate: bool = False,
) -> List[RunManifest]:
    """Сценарии в пуле потоков; каждый сценарий считается одним потоком."""
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_guarded, config, root, dump, recalibrate)
            for config in configs
        ]
        return [future.result() for future in futures]


def spectrum_report(
        config: ScenarioConfig, count: int,
        dump_dir: Optional[Path] = None,
) -> SpectralData:
    """
    Нижняя часть спектра сценария.
    С dump_dir пишет снимки многообразия, оператора, спектра
    и ядра в момент t_start, если мод для него хватает.
    """
    scenario = config.scenario
    manifold, op = _geometry(scenario)
    spectrum = low_spectrum(op, min(max(count, 2), manifold.vertex_count),
                            seed=scenario.seed)
    if dump_dir is None:
        return spectrum
    dump_dir.mkdir(parents=True, exist_ok=True)
    dump_geometry(manifold, op, dump_dir)
    _dump(dump_dir, 'spectrum.csv', dump_spectrum, spectrum)
    spec = KernelSpec(scenario.source, spectrum.size, op.measure)
    try:
        state = heat_kernel(manifold, op, spec, scenario.t_start, spectrum)
    except KernelTruncationError as error:
        logger.warning('Снимок ядра не записан: %s', error)
    else:
        _dump(dump_dir, 'state.csv', dump_state, state)
    return spectrum
