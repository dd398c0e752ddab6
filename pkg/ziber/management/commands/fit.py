from django.core.management.base import CommandError

from ziber.estimation import MODEL_LABELS, fit_model
from ziber.reports import fit_frame, fit_summary, format_frame, write_csv

from ._base import ZiberCommand


class Command(ZiberCommand):
    help = 'Fit a ZIBer model (or a plain baseline) to a CSV file and print the Wald table.'

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        parser.add_argument('--link', required=True, choices=MODEL_LABELS)
        parser.add_argument('--seed', type=int, help='seed of the random restarts')
        self.add_fit_arguments(parser)
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        level = self.check_level(options['level'])
        data = self.load_data(options)
        config = self.fit_config(options, seed=options['seed'])
        result = fit_model(data, options['link'], config)

        for key, value in fit_summary(result).items():
            if isinstance(value, float):
                value = f'{value:.{self.decimals()}f}'
            self.stdout.write(f'{key}: {value}')
        frame = fit_frame(result, level)
        self.stdout.write(format_frame(frame, self.decimals()))
        if options['out']:
            write_csv(frame, options['out'])

        if not result.converged:
            self.stderr.write(self.style.WARNING(
                f'warning: the {options["link"]} fit did not converge; estimates are the best point found'
            ))
            raise CommandError('fit did not converge', returncode=2)
