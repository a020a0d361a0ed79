from pathlib import Path
from typing import Any

from django.core.management.base import BaseCommand

from diagnostics.verifiers import tolerance_model, verify_trace
from runner.mixins import EntroflowErrorMixin, VerdictExitMixin
from runner.services import MANIFEST_FILE, read_manifest, read_trace_csv


class Command(EntroflowErrorMixin, VerdictExitMixin, BaseCommand):
    help = 'Повторно проверяет сохранённую трассу'

    def add_arguments(self, parser):
        parser.add_argument('trace', type=Path, help='CSV-файл трассы')
        parser.add_argument(
            '--manifest', type=Path,
            help='Манифест прогона; по умолчанию рядом с трассой',
        )
        parser.add_argument('--tol-scale', type=float,
                            help='Множитель модели допуска')

    def run_command(self, *args: Any, **options: Any) -> None:
        path = options['trace']
        manifest = read_manifest(
            options['manifest'] or path.parent / MANIFEST_FILE
        )
        metadata = dict(manifest.get('metadata', {}))
        if options['tol_scale'] is not None:
            metadata['tol_scale'] = options['tol_scale']
        trace = read_trace_csv(path, metadata)
        verdicts = verify_trace(trace, tolerance_model(trace))
        self.report_verdicts(verdict.as_line() for verdict in verdicts)
        self.exit_on_failure(verdicts)
