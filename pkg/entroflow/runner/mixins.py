from pathlib import Path
from typing import Any, Iterable, List

from django.core.management.base import CommandError, CommandParser

from core.exceptions import EntroflowError
from diagnostics.models import Verdict

from .models import ScenarioConfig
from .services import output_root, parse_config

EXIT_FAIL = 2
EXIT_ERROR = 1


class EntroflowErrorMixin:
    """
    Переводит ошибки расчёта в CommandError с кодом 1.
    Сообщение модуля передаётся без изменений.
    """

    def handle(self, *args: Any, **options: Any) -> None:
        try:
            self.run_command(*args, **options)
        except EntroflowError as error:
            raise CommandError(str(error), returncode=EXIT_ERROR)

    def run_command(self, *args: Any, **options: Any) -> None:
        raise NotImplementedError


class ScenarioArgumentsMixin:
    """Флаги выбора и настройки сценария."""

    def add_scenario_arguments(self, parser: CommandParser) -> None:
        parser.add_argument(
            'kind', nargs='?',
            help='Сценарий из реестра, если не задан --config',
        )
        parser.add_argument('--config', type=Path, help='JSON-конфигурация')
        parser.add_argument(
            '--set', dest='overrides', action='append', default=[],
            metavar='KEY=VALUE', help='Переопределение ключа конфигурации',
        )
        parser.add_argument('--seed', type=int,
                            help='Зерно начального вектора eigsh')
        parser.add_argument('--tol-scale', type=float,
                            help='Множитель модели допуска')

    def scenario_overrides(self, options: dict) -> List[str]:
        overrides = list(options['overrides'])
        if options.get('seed') is not None:
            overrides.append(f'seed={options["seed"]}')
        if options.get('tol_scale') is not None:
            overrides.append(f'tol_scale={options["tol_scale"]}')
        return overrides

    def get_config(self, options: dict) -> ScenarioConfig:
        if not options.get('kind') and not options.get('config'):
            raise CommandError(
                'Укажите сценарий или --config', returncode=EXIT_ERROR
            )
        return parse_config(
            options.get('config'),
            self.scenario_overrides(options),
            kind=options.get('kind'),
        )


class OutputArgumentsMixin:
    """Каталог вывода: --out, затем ENTROFLOW_OUT."""

    def add_output_arguments(self, parser: CommandParser) -> None:
        parser.add_argument('--out', help='Каталог для артефактов')

    def get_output_root(self, options: dict, fallback: str = '') -> Path:
        return output_root(options.get('out') or fallback or None)


class VerdictExitMixin:
    """Печатает вердикты; любой FAIL завершает команду с кодом 2."""

    def report_verdicts(self, lines: Iterable[str]) -> None:
        for line in lines:
            self.stdout.write(line)

    def exit_on_failure(self, verdicts: Iterable[Verdict]) -> None:
        failed = [verdict.name for verdict in verdicts if not verdict.passed]
        if failed:
            raise CommandError(
                f'Не пройдены проверки: {", ".join(failed)}',
                returncode=EXIT_FAIL,
            )
