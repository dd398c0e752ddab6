from ziber.reports import format_frame, study_header, write_csv
from ziber.simulation import run_study

from ._base import ZiberCommand


class Command(ZiberCommand):
    help = 'Monte Carlo study: bias, mean ASE, SD and coverage for a scenario.'

    def add_arguments(self, parser):
        parser.add_argument('--scenario', required=True, help='built-in name or a scenario JSON file')
        parser.add_argument('--n', type=int, required=True)
        parser.add_argument('--reps', type=int, required=True)
        parser.add_argument('--seed', type=int, default=0)
        self.add_fit_arguments(parser)
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        level = self.check_level(options['level'])
        scenario = self.load_scenario(options['scenario'])
        config = self.fit_config(options)
        report = run_study(
            scenario,
            n=options['n'],
            reps=options['reps'],
            seed=options['seed'],
            config=config,
            level=level,
        )
        for line in study_header(report):
            self.stdout.write(line)
        frame = report.to_frame()
        self.stdout.write(format_frame(frame, self.decimals()))
        if options['out']:
            write_csv(frame, options['out'])
