from pathlib import Path
from typing import Any

from django.core.management.base import BaseCommand

from core.conf import entroflow_setting
from runner.mixins import EntroflowErrorMixin, ScenarioArgumentsMixin
from runner.services import spectrum_report


class Command(EntroflowErrorMixin, ScenarioArgumentsMixin, BaseCommand):
    help = 'Печатает нижнюю часть спектра оператора сценария'

    def add_arguments(self, parser):
        self.add_scenario_arguments(parser)
        parser.add_argument('--count', type=int, default=8,
                            help='Число собственных значений')
        parser.add_argument('--dump', type=Path,
                            help='Каталог для CSV-снимков')

    def run_command(self, *args: Any, **options: Any) -> None:
        config = self.get_config(options)
        spectrum = spectrum_report(config, options['count'], options['dump'])
        rtol = entroflow_setting('MULTIPLICITY_RTOL')
        self.stdout.write(f'first_nonzero {spectrum.first_nonzero:.12g}')
        self.stdout.write(f'multiplicity {spectrum.multiplicity(rtol)}')
        for index, value in enumerate(spectrum.eigenvalues):
            self.stdout.write(f'{index} {value:.12g}')
