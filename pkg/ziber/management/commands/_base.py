import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from ziber.datasets import read_dataset
from ziber.exceptions import ZiberError
from ziber.serializers import CsvSchemaSerializer, FitConfigSerializer, ScenarioSerializer, flatten_errors
from ziber.simulation import BUILTIN_SCENARIOS

VERBOSITY_LEVELS = {2: logging.INFO, 3: logging.DEBUG}


def column_names(value):
    """'a,b' -> ['a', 'b']."""
    return [name.strip() for name in value.split(',') if name.strip()]


def option(name, default=None):
    return settings.ZIBER.get(name, default)


class ZiberCommand(BaseCommand):
    """
    Shared plumbing for the ziber commands.

    Library errors become CommandError (exit 1); argument errors exit 1
    as well instead of argparse's 2, which is reserved for non-converged fits.
    """

    requires_system_checks = []
    _executing = False

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except SystemExit as exc:
            if exc.code == 2 and not self._executing:
                raise SystemExit(1) from exc
            raise

    def execute(self, *args, **options):
        self._executing = True
        level = VERBOSITY_LEVELS.get(options.get('verbosity', 1))
        if level is not None:
            logging.getLogger('ziber').setLevel(level)
        try:
            return super().execute(*args, **options)
        except ValidationError as exc:
            raise CommandError('; '.join(flatten_errors(exc.detail))) from exc
        except (ZiberError, OSError, ValueError) as exc:
            raise CommandError(str(exc)) from exc

    def add_data_arguments(self, parser):
        parser.add_argument('--data', required=True, help='CSV file with a header row')
        parser.add_argument('--y', required=True, help='binary response column')
        parser.add_argument('--x', type=column_names, default=[], help='event covariates, comma-separated')
        parser.add_argument('--z', type=column_names, default=[], help='SP covariates, comma-separated')
        parser.add_argument('--dichotomize', action='store_true', help='use 1{y > 0} as the response')

    def add_fit_arguments(self, parser):
        parser.add_argument('--max-iters', type=int)
        parser.add_argument('--grad-tol', type=float)
        parser.add_argument('--n-restarts', type=int)
        parser.add_argument('--eps-lower', type=float)
        parser.add_argument('--eps-upper', type=float)

    def add_output_arguments(self, parser):
        parser.add_argument('--out', help='also write the table as CSV')
        parser.add_argument('--level', type=float, default=option('LEVEL', 0.95))

    def load_data(self, options):
        columns = {
            key: column_names(value) if isinstance(value, str) else value
            for key, value in (('x', options['x']), ('z', options['z']))
        }
        serializer = CsvSchemaSerializer(data={'y': options['y'], **columns})
        serializer.is_valid(raise_exception=True)
        return read_dataset(options['data'], serializer.save(), dichotomize=options['dichotomize'])

    def fit_config(self, options, seed=None):
        values = {
            'max_iters': options.get('max_iters'),
            'grad_tol': options.get('grad_tol'),
            'n_restarts': options.get('n_restarts'),
            'eps_lower': options.get('eps_lower'),
            'eps_upper': options.get('eps_upper'),
            'seed': seed,
        }
        serializer = FitConfigSerializer(data={k: v for k, v in values.items() if v is not None})
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def check_level(self, level):
        if not 0.0 < level < 1.0:
            raise CommandError(f'--level must lie in (0, 1), got {level}')
        return level

    def load_scenario(self, name_or_path):
        if name_or_path in BUILTIN_SCENARIOS:
            return BUILTIN_SCENARIOS[name_or_path]
        path = Path(name_or_path)
        if not path.is_file():
            raise CommandError(
                f'unknown scenario {name_or_path!r}; built-in scenarios: {", ".join(BUILTIN_SCENARIOS)}'
            )
        try:
            payload = json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as exc:
            raise CommandError(f'{path}: invalid JSON ({exc})') from exc
        serializer = ScenarioSerializer(data=payload)
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def decimals(self):
        return option('TABLE_DECIMALS', 4)
