import csv
from typing import Any

import numpy as np
from django.core.management.base import BaseCommand

from core.conf import entroflow_setting
from diagnostics.models import Verdict
from diagnostics.oracle import euclidean_oracle, oracle_self_check
from diagnostics.verifiers import verify_trace
from runner.mixins import EntroflowErrorMixin, VerdictExitMixin


class Command(EntroflowErrorMixin, VerdictExitMixin, BaseCommand):
    help = ('Замкнутая трасса гауссова ядра на ℝⁿ и её сверка '
            'с квадратурой')

    def add_arguments(self, parser):
        parser.add_argument('--dimension', type=int, default=2)
        parser.add_argument('--a', type=float, default=0.0)
        parser.add_argument('--t-start', type=float, default=0.05)
        parser.add_argument('--t-end', type=float, default=10.0)
        parser.add_argument('--samples', type=int, default=40)

    def run_command(self, *args: Any, **options: Any) -> None:
        n, a = options['dimension'], options['a']
        times = np.linspace(options['t_start'], options['t_end'],
                            max(options['samples'], 2))
        trace = euclidean_oracle(n, a, times)
        digits = entroflow_setting('CSV_DIGITS')
        writer = csv.writer(self.stdout, lineterminator='\n')
        writer.writerow(trace.names)
        for row in trace.rows():
            writer.writerow(f'{value:.{digits}g}' for value in row)

        tolerance = entroflow_setting('ORACLE_TOL')
        worst = max(oracle_self_check(n, a, float(t)) for t in times)
        verdicts = verify_trace(trace) + [
            Verdict('quadrature', worst <= tolerance, worst, tolerance)
        ]
        self.report_verdicts(verdict.as_line() for verdict in verdicts)
        self.exit_on_failure(verdicts)
