from ziber.simulation import fish_synthetic_frame

from ._base import ZiberCommand


class Command(ZiberCommand):
    help = (
        'Write the synthetic fishing data: a probit-ZIBer sample at reference '
        'estimates with columns fish_caught, fish_caught_bin, persons, livebait.'
    )

    def add_arguments(self, parser):
        parser.add_argument('--out', required=True)
        parser.add_argument('--seed', type=int, default=248)
        parser.add_argument('--n', type=int, default=248)

    def handle(self, *args, **options):
        frame = fish_synthetic_frame(seed=options['seed'], n=options['n'])
        frame.to_csv(options['out'], index=False)
        zeros = int((frame['fish_caught'] == 0).sum())
        self.stdout.write(f'wrote {len(frame)} rows to {options["out"]} ({zeros} zero catches)')
