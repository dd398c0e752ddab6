from django.core.management.base import CommandError

from ziber.estimation import MODEL_LABELS, fit_model
from ziber.reports import format_frame, vuong_frame, write_csv
from ziber.selection import vuong

from ._base import ZiberCommand


class Command(ZiberCommand):
    help = 'Vuong comparisons of the first --link against every other one on the same data.'

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        parser.add_argument('--link', action='append', choices=MODEL_LABELS, dest='links', default=[])
        parser.add_argument('--seed', type=int, help='seed of the random restarts')
        self.add_fit_arguments(parser)
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        links = options['links']
        if len(links) < 2:
            raise CommandError('compare needs at least two --link values')
        data = self.load_data(options)
        config = self.fit_config(options, seed=options['seed'])

        fits = {}
        for label in links:
            if label not in fits:
                fits[label] = fit_model(data, label, config)
                self.stdout.write(f'{label}: log-likelihood {fits[label].loglik:.{self.decimals()}f}')

        first = links[0]
        comparisons = [(first, other, vuong(fits[first], fits[other], data.n)) for other in links[1:]]
        frame = vuong_frame(comparisons)
        self.stdout.write(format_frame(frame, self.decimals()))
        for (a, b, _), verdict in zip(comparisons, frame['preferred']):
            self.stdout.write(f'{a} vs {b}: {verdict}')
        if options['out']:
            write_csv(frame, options['out'])

        unconverged = [label for label, result in fits.items() if not result.converged]
        if unconverged:
            self.stderr.write(self.style.WARNING(f'warning: not converged: {", ".join(unconverged)}'))
            raise CommandError('some fits did not converge', returncode=2)
