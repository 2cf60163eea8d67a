from ...harness import replay
from ...reports import emit_reports
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Run the strategy matrix on a recorded risk stream and write the reports.'

    def add_arguments(self, parser):
        parser.add_argument('stream', help='Risk stream file (t,user_id,risk).')
        parser.add_argument('--events', help='Events file; defaults to <stream>.events.csv beside the stream.')
        super().add_arguments(parser)
        self.add_experiment_arguments(parser)

    def run(self, options):
        cfg = self.load_config(options)
        result = replay(options['stream'], options.get('events'), cfg)
        for path in emit_reports(result, cfg.output_dir):
            self.stdout.write(str(path))
