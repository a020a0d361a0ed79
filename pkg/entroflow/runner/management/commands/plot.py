from pathlib import Path
from typing import Any

from django.core.management.base import BaseCommand

from core.exceptions import MissingColumnError
from runner.charts import chart_columns, render_chart
from runner.mixins import EntroflowErrorMixin
from runner.services import MANIFEST_FILE, read_manifest, read_trace_csv


class Command(EntroflowErrorMixin, BaseCommand):
    help = 'Строит SVG-графики столбцов сохранённой трассы'

    def add_arguments(self, parser):
        parser.add_argument('trace', type=Path, help='CSV-файл трассы')
        parser.add_argument(
            '--columns', nargs='+',
            help='Столбцы; по умолчанию все энтропии трассы',
        )
        parser.add_argument('--out', type=Path,
                            help='Каталог графиков; по умолчанию рядом '
                                 'с трассой')

    def run_command(self, *args: Any, **options: Any) -> None:
        path = options['trace']
        manifest_path = path.parent / MANIFEST_FILE
        metadata = (read_manifest(manifest_path).get('metadata', {})
                    if manifest_path.exists() else {})
        trace = read_trace_csv(path, metadata)
        columns = options['columns'] or chart_columns(trace)
        if not columns:
            raise MissingColumnError('В трассе нет столбцов энтропий')
        directory = options['out'] or path.parent
        directory.mkdir(parents=True, exist_ok=True)
        for column in columns:
            target = directory / f'{column}.svg'
            target.write_text(render_chart(trace, column), encoding='utf-8')
            self.stdout.write(str(target))
