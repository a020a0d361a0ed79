import os
from typing import Any, List

from django.core.management.base import BaseCommand, CommandError

from runner.mixins import (
    EXIT_ERROR, EXIT_FAIL, EntroflowErrorMixin, OutputArgumentsMixin,
    ScenarioArgumentsMixin, VerdictExitMixin
)
from runner.models import RunManifest
from runner.registry import batch_scenarios
from runner.services import parse_config, run_batch, run_scenario


class Command(EntroflowErrorMixin, ScenarioArgumentsMixin,
              OutputArgumentsMixin, VerdictExitMixin, BaseCommand):
    help = 'Запускает сценарий: трасса, проверки, графики и манифест'

    def add_arguments(self, parser):
        self.add_scenario_arguments(parser)
        self.add_output_arguments(parser)
        parser.add_argument(
            '--all', dest='run_all', action='store_true',
            help='Все сценарии реестра, кроме custom',
        )
        parser.add_argument(
            '--workers', type=int, default=os.cpu_count(),
            help='Размер пула для --all',
        )
        parser.add_argument(
            '--dump', action='store_true',
            help='Записать CSV-снимки многообразия и оператора',
        )
        parser.add_argument(
            '--calibrate', action='store_true',
            help='Заново откалибровать C на паре разрешений',
        )

    def run_command(self, *args: Any, **options: Any) -> None:
        if options['run_all']:
            self.run_all(options)
            return
        config = self.get_config(options)
        root = self.get_output_root(options, config.out or '')
        manifest, verdicts = run_scenario(
            config, root, options['dump'], options['calibrate']
        )
        self.report_verdicts(manifest.verdicts)
        self.stdout.write(f'Артефакты: {root / config.name}')
        self.exit_on_failure(verdicts)

    def run_all(self, options: dict) -> None:
        overrides = self.scenario_overrides(options)
        configs = [
            parse_config(options.get('config'), overrides,
                         kind=scenario.name)
            for scenario in batch_scenarios()
        ]
        root = self.get_output_root(options)
        manifests = run_batch(configs, root, options['workers'],
                              options['dump'], options['calibrate'])
        for manifest in manifests:
            self.stdout.write(f'== {manifest.config["name"]}: '
                              f'статус {manifest.exit_status}')
            self.report_verdicts(manifest.verdicts)
            if manifest.error:
                self.stderr.write(manifest.error)
        self.exit_on_batch(manifests)

    def exit_on_batch(self, manifests: List[RunManifest]) -> None:
        statuses = {manifest.exit_status for manifest in manifests}
        if EXIT_ERROR in statuses:
            raise CommandError('Часть сценариев завершилась ошибкой',
                               returncode=EXIT_ERROR)
        if EXIT_FAIL in statuses:
            raise CommandError('Часть проверок не пройдена',
                               returncode=EXIT_FAIL)
