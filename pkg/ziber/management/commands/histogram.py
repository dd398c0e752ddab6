from ziber.datasets import count_frequencies
from ziber.reports import write_csv

from ._base import ZiberCommand


class Command(ZiberCommand):
    help = 'Frequency table of an integer column, for an external bar plot.'

    def add_arguments(self, parser):
        parser.add_argument('--data', required=True)
        parser.add_argument('--column', required=True)
        parser.add_argument('--out', help='CSV destination (stdout when omitted)')

    def handle(self, *args, **options):
        table, zero_fraction = count_frequencies(options['data'], options['column'])
        if options['out']:
            write_csv(table, options['out'])
        else:
            self.stdout.write(table.to_csv(index=False), ending='')
        self.stdout.write(f'zero fraction: {zero_fraction:.4f}')
